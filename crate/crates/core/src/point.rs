//! Points of polyhedra in barycentric coordinates and the scale-κ ℓ1 metric.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::complex::{Complex, Simplex, Subcomplex, Subdivision};
use crate::name::VertexName;
use crate::rational::{self, one, zero, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointError {
    #[error("points live at different scales ({0} vs {1})")]
    ScaleMismatch(String, String),
    #[error("scale must be positive, got {0}")]
    BadScale(String),
    #[error("coordinates must be non-negative and sum to 1")]
    BadCoordinates,
    #[error("support {0:?} is not a simplex of the complex")]
    NotInComplex(Vec<usize>),
}

/// Barycentric coordinates (only non-zero entries are stored) at scale κ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: BTreeMap<usize, Rational>,
    scale: Rational,
}

impl Point {
    /// Zero coordinates are dropped.
    pub fn new(coords: BTreeMap<usize, Rational>, scale: Rational) -> Point {
        let coords = coords.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Point { coords, scale }
    }

    pub fn vertex(v: usize, scale: Rational) -> Point {
        Point { coords: BTreeMap::from([(v, one())]), scale }
    }

    pub fn barycenter(s: &Simplex, scale: Rational) -> Point {
        let w = Rational::new(1.into(), (s.len() as i64).into());
        Point { coords: s.vertices().iter().map(|v| (*v, w.clone())).collect(), scale }
    }

    pub fn from_names(
        k: &Complex,
        coords: &[(VertexName, Rational)],
        scale: Rational,
    ) -> Result<Point, crate::complex::ComplexError> {
        let mut map = BTreeMap::new();
        for (n, c) in coords {
            *map.entry(k.vertex(n)?).or_insert_with(zero) += c;
        }
        Ok(Point::new(map, scale))
    }

    pub fn coords(&self) -> &BTreeMap<usize, Rational> {
        &self.coords
    }

    pub fn coord(&self, v: usize) -> Rational {
        self.coords.get(&v).cloned().unwrap_or_else(zero)
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn with_scale(&self, scale: Rational) -> Point {
        Point { coords: self.coords.clone(), scale }
    }

    pub fn support(&self) -> Simplex {
        Simplex::new(self.coords.keys().copied().collect())
    }

    pub fn validate(&self, k: &Complex) -> Result<(), PointError> {
        if !self.scale.is_positive() {
            return Err(PointError::BadScale(rational::format(&self.scale)));
        }
        let sum: Rational = self.coords.values().sum();
        if self.coords.values().any(|c| c.is_negative()) || sum != one() {
            return Err(PointError::BadCoordinates);
        }
        let s = self.support();
        if !k.contains(&s) {
            return Err(PointError::NotInComplex(s.vertices().to_vec()));
        }
        Ok(())
    }

    /// κ · ‖x − y‖₁.
    pub fn distance(&self, other: &Point) -> Result<Rational, PointError> {
        if self.scale != other.scale {
            return Err(PointError::ScaleMismatch(
                rational::format(&self.scale),
                rational::format(&other.scale),
            ));
        }
        Ok(&self.scale * l1(&self.coords, &other.coords))
    }

    pub fn in_subcomplex(&self, a: &Subcomplex) -> bool {
        a.contains(&self.support())
    }

    /// `(1 − t)·self + t·other`; the scale of `self` is kept.
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        let s = one() - t;
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in &self.coords {
            *out.entry(*v).or_insert_with(zero) += c * &s;
        }
        for (v, c) in &other.coords {
            *out.entry(*v).or_insert_with(zero) += c * t;
        }
        Point::new(out, self.scale.clone())
    }

    /// Same point in the coordinates of the parent of `sd` (self lives in the fine complex).
    pub fn flatten(&self, sd: &Subdivision) -> Point {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (w, c) in &self.coords {
            let carrier = sd.carrier(*w);
            let share = c / Rational::from_integer((carrier.len() as i64).into());
            for v in carrier.vertices() {
                *out.entry(*v).or_insert_with(zero) += &share;
            }
        }
        Point::new(out, self.scale.clone())
    }

    /// Same point in the coordinates of the fine complex of `sd` (self lives in the parent).
    pub fn refine(&self, sd: &Subdivision) -> Point {
        let mut order: Vec<(usize, Rational)> = self.coords.iter().map(|(v, c)| (*v, c.clone())).collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut out = BTreeMap::new();
        for j in 0..order.len() {
            let next = order.get(j + 1).map(|p| p.1.clone()).unwrap_or_else(zero);
            let c = (&order[j].1 - next) * Rational::from_integer(((j + 1) as i64).into());
            if c.is_zero() {
                continue;
            }
            let face = Simplex::new(order[..=j].iter().map(|p| p.0).collect());
            let w = sd.vertex_of(&face).expect("support is a simplex of the parent");
            out.insert(w, c);
        }
        Point::new(out, self.scale.clone())
    }

    pub fn named_coords(&self, k: &Complex) -> Vec<(VertexName, Rational)> {
        self.coords.iter().map(|(v, c)| (k.name(*v).clone(), c.clone())).collect()
    }
}

/// ‖x − y‖₁ of two sparse coordinate vectors.
pub fn l1(x: &BTreeMap<usize, Rational>, y: &BTreeMap<usize, Rational>) -> Rational {
    let mut total = zero();
    for (v, c) in x {
        total += (c - y.get(v).cloned().unwrap_or_else(zero)).abs();
    }
    for (v, c) in y {
        if !x.contains_key(v) {
            total += c.abs();
        }
    }
    total
}
