pub mod complex;
pub mod gen;
pub mod name;
pub mod rational;
pub mod verdict;
pub mod point;
pub mod connectivity;
pub mod maps;
pub mod pl;
pub mod stars;
pub mod refine;
pub mod carrier;
pub mod tower;
pub mod lift;
pub mod io;
