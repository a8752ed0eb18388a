//! Maps that are affine on each simplex of a triangulated domain.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::complex::{Complex, Simplex, Subcomplex, Subdivision};
use crate::maps::{AffineMap, QsMap};
use crate::point::Point;
use crate::rational::{int, zero, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("vertex {0} of the defined part has no image")]
    MissingImage(usize),
    #[error("image of domain simplex {0:?} is not inside one target simplex")]
    NotInSimplex(Vec<usize>),
    #[error("{0}")]
    Mismatch(String),
}

/// A (partial) map from `domain` to `target`, defined on the subcomplex `defined`
/// and affine on each of its simplices. Every simplex must land in one target simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlMap {
    pub domain: Complex,
    pub target: Complex,
    pub defined: Subcomplex,
    images: BTreeMap<usize, Point>,
}

impl PlMap {
    pub fn new(
        domain: Complex,
        target: Complex,
        defined: Subcomplex,
        images: BTreeMap<usize, Point>,
    ) -> Result<PlMap, PlError> {
        for v in defined.vertices() {
            if !images.contains_key(&v) {
                return Err(PlError::MissingImage(v));
            }
        }
        let images: BTreeMap<usize, Point> = images.into_iter().filter(|(v, _)| defined.contains(&Simplex::vertex(*v))).collect();
        let map = PlMap { domain, target, defined, images };
        for s in map.defined.maximal() {
            if !map.target.contains(&map.image_simplex(&s)) {
                return Err(PlError::NotInSimplex(s.vertices().to_vec()));
            }
        }
        Ok(map)
    }

    pub fn total(domain: Complex, target: Complex, images: BTreeMap<usize, Point>) -> Result<PlMap, PlError> {
        let whole = domain.whole();
        Self::new(domain, target, whole, images)
    }

    pub fn empty(domain: Complex, target: Complex) -> PlMap {
        PlMap { domain, target, defined: Subcomplex::empty(), images: BTreeMap::new() }
    }

    pub fn from_affine(f: &AffineMap) -> Result<PlMap, PlError> {
        let images = (0..f.source.vertex_count())
            .map(|v| (v, Point::new(f.image_of_vertex(v).clone(), int(1))))
            .collect();
        Self::total(f.source.clone(), f.target.clone(), images)
    }

    /// Inclusion of a subcomplex, or the identity when `a` is everything.
    pub fn inclusion(domain: &Complex, a: &Subcomplex) -> PlMap {
        let images = a.vertices().into_iter().map(|v| (v, Point::vertex(v, int(1)))).collect();
        PlMap { domain: domain.clone(), target: domain.clone(), defined: a.clone(), images }
    }

    /// Constant map with value `p` on all of `domain`.
    pub fn constant(domain: &Complex, target: &Complex, p: &Point) -> PlMap {
        let images = (0..domain.vertex_count()).map(|v| (v, p.clone())).collect();
        PlMap { domain: domain.clone(), target: target.clone(), defined: domain.whole(), images }
    }

    pub fn is_total(&self) -> bool {
        self.defined.len() == self.domain.simplex_count()
    }

    pub fn images(&self) -> &BTreeMap<usize, Point> {
        &self.images
    }

    pub fn image(&self, v: usize) -> Option<&Point> {
        self.images.get(&v)
    }

    /// Target simplex spanned by the images of the vertices of `s`.
    pub fn image_simplex(&self, s: &Simplex) -> Simplex {
        Simplex::new(s.vertices().iter().flat_map(|v| self.images[v].coords().keys().copied()).collect())
    }

    /// Value at a point of the defined part (coordinates in the domain).
    pub fn apply(&self, x: &Point) -> Point {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in x.coords() {
            for (w, d) in self.images[v].coords() {
                *out.entry(*w).or_insert_with(zero) += c * d;
            }
        }
        Point::new(out, int(1))
    }

    pub fn restrict(&self, a: &Subcomplex) -> PlMap {
        let defined = self.defined.intersection(a);
        let verts = defined.vertices();
        let images = self.images.iter().filter(|(v, _)| verts.contains(v)).map(|(v, p)| (*v, p.clone())).collect();
        PlMap { domain: self.domain.clone(), target: self.target.clone(), defined, images }
    }

    /// Re-expresses a map into `βT` as a map into `T`.
    pub fn flatten_target(&self, sd: &Subdivision) -> PlMap {
        assert_eq!(self.target, sd.fine);
        let images = self.images.iter().map(|(v, p)| (*v, p.flatten(sd))).collect();
        PlMap { domain: self.domain.clone(), target: sd.parent.clone(), defined: self.defined.clone(), images }
    }

    /// `p ∘ self`, for a map into the source of `p`; the result lands in `βL`.
    pub fn then_qs(&self, p: &QsMap) -> Result<PlMap, PlError> {
        if &self.target != p.source() {
            return Err(PlError::Mismatch("map does not land in the source of the bond".into()));
        }
        let images = self.images.iter().map(|(v, x)| (*v, p.push(x))).collect();
        Ok(PlMap {
            domain: self.domain.clone(),
            target: p.subdivision().fine.clone(),
            defined: self.defined.clone(),
            images,
        })
    }

    /// `f ∘ self` for a map affine on simplices of this map's target.
    pub fn then_affine(&self, f: &AffineMap) -> Result<PlMap, PlError> {
        if self.target != f.source {
            return Err(PlError::Mismatch("map does not land in the source of the affine map".into()));
        }
        let images = self.images.iter().map(|(v, x)| (*v, f.apply(x, &int(1)))).collect();
        PlMap::new(self.domain.clone(), f.target.clone(), self.defined.clone(), images)
    }

    /// The same map on the barycentric subdivision of the domain.
    pub fn subdivide_domain(&self) -> (PlMap, Subdivision) {
        let sd = Subdivision::of(&self.domain);
        let defined = sd.subdivide_subcomplex(&self.defined);
        let images = defined
            .vertices()
            .into_iter()
            .map(|w| (w, self.apply(&Point::barycenter(sd.carrier(w), int(1)))))
            .collect();
        (PlMap { domain: sd.fine.clone(), target: self.target.clone(), defined, images }, sd)
    }

    /// Sup distance over the common defined part, at target scale `lambda`. Exact: the
    /// difference is affine on each simplex and ℓ1 is convex, so vertices realize it.
    pub fn sup_distance(&self, other: &PlMap, lambda: &Rational) -> Rational {
        let common: BTreeSet<usize> = self.defined.vertices().intersection(&other.defined.vertices()).copied().collect();
        let mut best = zero();
        for v in common {
            let d = crate::point::l1(self.images[&v].coords(), other.images[&v].coords()) * lambda;
            if d > best {
                best = d;
            }
        }
        best
    }

    /// Whether two maps agree on the intersection of their defined parts.
    pub fn agrees_with(&self, other: &PlMap, on: &Subcomplex) -> bool {
        on.vertices().into_iter().all(|v| match (self.images.get(&v), other.images.get(&v)) {
            (Some(a), Some(b)) => a.coords() == b.coords(),
            _ => false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::rational::{one, rat};

    #[test]
    fn images_must_stay_in_a_simplex() {
        let circle = gen::circle();
        let edge = gen::simplex(1);
        let images = BTreeMap::from([(0, Point::vertex(0, one())), (1, Point::vertex(1, one()))]);
        assert!(PlMap::total(edge.clone(), circle.clone(), images).is_ok());
        let bar = Point::barycenter(&Simplex::new(vec![1, 2]), one());
        let images = BTreeMap::from([(0, Point::vertex(0, one())), (1, bar)]);
        assert!(matches!(PlMap::total(edge, circle, images), Err(PlError::NotInSimplex(_))));
    }

    #[test]
    fn subdivided_domain_evaluates_the_same() {
        let d2 = gen::simplex(2);
        let f = PlMap::inclusion(&d2, &d2.whole());
        let (g, sd) = f.subdivide_domain();
        let x = Point::new(BTreeMap::from([(0, rat(1, 2)), (1, rat(1, 3)), (2, rat(1, 6))]), one());
        assert_eq!(g.apply(&x.refine(&sd)).coords(), f.apply(&x).coords());
        assert_eq!(f.sup_distance(&f, &one()), zero());
    }
}
