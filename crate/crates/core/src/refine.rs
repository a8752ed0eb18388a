//! Refinements of a triangulated domain: a finer complex whose vertices are placed at
//! exact points of the coarse one, each fine simplex inside a coarse simplex.

use std::collections::BTreeMap;

use crate::complex::{Complex, Simplex, Subcomplex, Subdivision};
use crate::pl::PlMap;
use crate::point::Point;
use crate::rational::{one, zero, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub coarse: Complex,
    pub fine: Complex,
    positions: Vec<Point>,
}

impl Refinement {
    /// `positions[v]` is the place of fine vertex `v` in coarse coordinates. Returns `None`
    /// when some fine simplex is not inside one coarse simplex.
    pub fn new(coarse: Complex, fine: Complex, positions: Vec<Point>) -> Option<Refinement> {
        if positions.len() != fine.vertex_count() {
            return None;
        }
        let r = Refinement { coarse, fine, positions };
        r.fine.maximal().iter().all(|s| r.coarse.contains(&r.carrier_of(s))).then_some(r)
    }

    pub fn identity(k: &Complex) -> Refinement {
        let positions = (0..k.vertex_count()).map(|v| Point::vertex(v, one())).collect();
        Refinement { coarse: k.clone(), fine: k.clone(), positions }
    }

    pub fn from_subdivision(sd: &Subdivision) -> Refinement {
        let positions = (0..sd.fine.vertex_count()).map(|w| Point::barycenter(sd.carrier(w), one())).collect();
        Refinement { coarse: sd.parent.clone(), fine: sd.fine.clone(), positions }
    }

    pub fn position(&self, v: usize) -> &Point {
        &self.positions[v]
    }

    pub fn carrier(&self, v: usize) -> Simplex {
        self.positions[v].support()
    }

    /// Smallest coarse simplex containing the fine simplex `s`.
    pub fn carrier_of(&self, s: &Simplex) -> Simplex {
        s.vertices().iter().fold(Simplex::new(Vec::new()), |acc, v| acc.union(&self.carrier(*v)))
    }

    /// Coarse coordinates of a point given in fine coordinates.
    pub fn to_coarse(&self, x: &Point) -> Point {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (w, c) in x.coords() {
            for (v, d) in self.positions[*w].coords() {
                *out.entry(*v).or_insert_with(zero) += c * d;
            }
        }
        Point::new(out, x.scale().clone())
    }

    /// Fine simplices lying in `a`.
    pub fn pull_subcomplex(&self, a: &Subcomplex) -> Subcomplex {
        Subcomplex::generated_by(self.fine.simplices().filter(|s| a.contains(&self.carrier_of(s))).cloned())
    }

    /// The same map, on the fine simplices inside its defined part.
    pub fn pull_map(&self, f: &PlMap) -> PlMap {
        assert_eq!(f.domain, self.coarse);
        let defined = self.pull_subcomplex(&f.defined);
        let images = defined.vertices().into_iter().map(|w| (w, f.apply(&self.positions[w]))).collect();
        PlMap::new(self.fine.clone(), f.target.clone(), defined, images).expect("fine simplices sit inside coarse ones")
    }

    /// Composite refinement `coarse ← fine ← next.fine`.
    pub fn then(&self, next: &Refinement) -> Refinement {
        assert_eq!(next.coarse, self.fine);
        let positions = next.positions.iter().map(|p| self.to_coarse(p)).collect();
        Refinement { coarse: self.coarse.clone(), fine: next.fine.clone(), positions }
    }

    /// Fine vertex sitting exactly at coarse vertex `v`, if any.
    pub fn vertex_at(&self, v: usize) -> Option<usize> {
        self.positions.iter().position(|p| p.coords().len() == 1 && p.coords().contains_key(&v))
    }
}
