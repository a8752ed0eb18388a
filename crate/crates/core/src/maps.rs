//! Vertex maps, quasi-simplicial maps and maps that are affine on simplices.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::complex::{Complex, ComplexError, Simplex, Subcomplex, Subdivision};
use crate::connectivity::{self, snf::Matrix};
use crate::name::VertexName;
use crate::point::{l1, Point};
use crate::rational::{int, zero, Rational};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("vertex {0} has no image")]
    MissingImage(VertexName),
    #[error("image of {0} is not a vertex of the target")]
    BadImage(VertexName),
    #[error("map is not simplicial, witness {0:?}")]
    NotSimplicial(Witness),
    #[error("{0}")]
    Mismatch(String),
}

/// A map of complexes given on vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMap {
    pub source: Complex,
    pub target: Complex,
    images: Vec<usize>,
}

impl VertexMap {
    pub fn new(source: Complex, target: Complex, images: Vec<usize>) -> Result<VertexMap, MapError> {
        if images.len() != source.vertex_count() {
            return Err(MapError::Mismatch(format!(
                "{} images for {} vertices",
                images.len(),
                source.vertex_count()
            )));
        }
        if let Some(v) = images.iter().position(|w| *w >= target.vertex_count()) {
            return Err(MapError::BadImage(source.name(v).clone()));
        }
        Ok(VertexMap { source, target, images })
    }

    pub fn from_names(
        source: Complex,
        target: Complex,
        table: &BTreeMap<VertexName, VertexName>,
    ) -> Result<VertexMap, MapError> {
        for key in table.keys() {
            source.vertex(key)?;
        }
        let images = source
            .names()
            .iter()
            .map(|n| {
                let img = table.get(n).ok_or_else(|| MapError::MissingImage(n.clone()))?;
                target.index_of(img).ok_or_else(|| MapError::BadImage(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, images)
    }

    pub fn identity(k: &Complex) -> VertexMap {
        VertexMap { source: k.clone(), target: k.clone(), images: (0..k.vertex_count()).collect() }
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn image_simplex(&self, s: &Simplex) -> Simplex {
        Simplex::new(s.vertices().iter().map(|v| self.images[*v]).collect())
    }

    pub fn table(&self) -> BTreeMap<VertexName, VertexName> {
        (0..self.images.len())
            .map(|v| (self.source.name(v).clone(), self.target.name(self.images[v]).clone()))
            .collect()
    }

    /// Holds iff every simplex goes to a simplex; the witness is the first bad maximal simplex.
    pub fn check_simplicial(&self) -> Verdict {
        for s in self.source.maximal() {
            if !self.target.contains(&self.image_simplex(s)) {
                return Verdict::fails(Witness::Simplex { simplex: self.source.simplex_names(s) });
            }
        }
        Verdict::Holds
    }

    /// `after ∘ self`.
    pub fn compose(&self, after: &VertexMap) -> Result<VertexMap, MapError> {
        if self.target != after.source {
            return Err(MapError::Mismatch("target of the first map is not the source of the second".into()));
        }
        Ok(VertexMap {
            source: self.source.clone(),
            target: after.target.clone(),
            images: self.images.iter().map(|w| after.images[*w]).collect(),
        })
    }

    /// Matrix of the induced map on H_k and whether it is an isomorphism.
    pub fn induced_homology(&self, k: usize) -> (Matrix, Verdict) {
        let (m, _, _, v) = connectivity::induced_homology(&self.source, &self.target, &self.images, k);
        (m, v)
    }
}

/// A vertex map from `K` into `βL` that is simplicial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QsMap {
    map: VertexMap,
    sd: Subdivision,
}

impl QsMap {
    /// Validates `map` (whose target must be the subdivision of `base`) as simplicial.
    pub fn new(map: VertexMap, base: &Complex) -> Result<QsMap, MapError> {
        let sd = Subdivision::recover(base, &map.target)?;
        Self::with_subdivision(map, sd)
    }

    fn with_subdivision(map: VertexMap, sd: Subdivision) -> Result<QsMap, MapError> {
        if let Verdict::Fails { witness } = map.check_simplicial() {
            return Err(MapError::NotSimplicial(witness));
        }
        Ok(QsMap { map, sd })
    }

    /// Images are given as names of vertices of `βL`, i.e. sorted sets of `L`-names.
    pub fn from_names(
        source: Complex,
        base: &Complex,
        table: &BTreeMap<VertexName, VertexName>,
    ) -> Result<QsMap, MapError> {
        let sd = Subdivision::of(base);
        let map = VertexMap::from_names(source, sd.fine.clone(), table)?;
        Self::with_subdivision(map, sd)
    }

    /// The identity `βL → L`, seen as a quasi-simplicial map.
    pub fn subdivision_identity(base: &Complex) -> QsMap {
        let sd = Subdivision::of(base);
        let map = VertexMap::identity(&sd.fine);
        QsMap { map, sd }
    }

    /// The subdivision `βf : βK → βL` of a simplicial map, a quasi-simplicial map `βK → L`.
    pub fn subdivided(f: &VertexMap) -> Result<QsMap, MapError> {
        let src = Subdivision::of(&f.source);
        let sd = Subdivision::of(&f.target);
        let images = (0..src.fine.vertex_count())
            .map(|w| {
                let img = f.image_simplex(src.carrier(w));
                sd.vertex_of(&img).ok_or_else(|| MapError::NotSimplicial(Witness::Simplex {
                    simplex: f.source.simplex_names(src.carrier(w)),
                }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let map = VertexMap::new(src.fine.clone(), sd.fine.clone(), images)?;
        Self::with_subdivision(map, sd)
    }

    pub fn source(&self) -> &Complex {
        &self.map.source
    }

    pub fn base(&self) -> &Complex {
        &self.sd.parent
    }

    pub fn subdivision(&self) -> &Subdivision {
        &self.sd
    }

    pub fn vertex_map(&self) -> &VertexMap {
        &self.map
    }

    /// Simplex of the base whose barycenter is the image of `v`.
    pub fn carrier(&self, v: usize) -> &Simplex {
        self.sd.carrier(self.map.image(v))
    }

    /// Holds iff every maximal simplex of `βL` is the image of a simplex; the witness lists
    /// every uncovered maximal simplex.
    pub fn is_surjective(&self) -> Verdict {
        let images: BTreeSet<Simplex> = self.source().maximal().iter().map(|s| self.map.image_simplex(s)).collect();
        let missing: Vec<Vec<VertexName>> = self
            .sd
            .fine
            .maximal()
            .iter()
            .filter(|m| !images.contains(*m))
            .map(|m| self.sd.fine.simplex_names(m))
            .collect();
        if missing.is_empty() {
            Verdict::Holds
        } else {
            Verdict::fails(Witness::Simplices { simplices: missing })
        }
    }

    /// Induced subcomplex on the vertices mapped into `delta` (a simplex of `βL`).
    pub fn preimage(&self, delta: &Simplex) -> Subcomplex {
        let w: BTreeSet<usize> = delta.vertices().iter().copied().collect();
        self.preimage_of_vertices(&w)
    }

    /// Preimage of a full subcomplex of `βL` given by its vertex set.
    pub fn preimage_of_vertices(&self, w: &BTreeSet<usize>) -> Subcomplex {
        let keep: BTreeSet<usize> = (0..self.source().vertex_count()).filter(|v| w.contains(&self.map.image(*v))).collect();
        self.source().induced(&keep)
    }

    /// Pushes a point forward into `βL`.
    pub fn push(&self, x: &Point) -> Point {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in x.coords() {
            *out.entry(self.map.image(*v)).or_insert_with(zero) += c;
        }
        Point::new(out, x.scale().clone())
    }

    /// Image of `x` in `L`-coordinates at scale `lambda`.
    pub fn apply(&self, x: &Point, lambda: &Rational) -> Point {
        self.push(x).flatten(&self.sd).with_scale(lambda.clone())
    }

    pub fn affine(&self) -> AffineMap {
        let images = (0..self.source().vertex_count())
            .map(|v| Point::barycenter(self.carrier(v), int(1)).coords().clone())
            .collect();
        AffineMap { source: self.source().clone(), target: self.base().clone(), images }
    }

    /// The same map with images as vertices of `βL`.
    pub fn affine_fine(&self) -> AffineMap {
        let images = self.map.images.iter().map(|w| BTreeMap::from([(*w, int(1))])).collect();
        AffineMap { source: self.source().clone(), target: self.sd.fine.clone(), images }
    }

    /// Exact Lipschitz constant of the affine extension for scales `kappa` (source) and
    /// `lambda` (target).
    pub fn lipschitz_constant(&self, kappa: &Rational, lambda: &Rational) -> Rational {
        self.affine().lipschitz_constant(kappa, lambda)
    }

    /// `q ∘ self` as a map into an iterated subdivision. When every vertex lands on a single
    /// vertex of `βM` the result is a quasi-simplicial map onto `M`; otherwise it is a
    /// quasi-simplicial map onto `βM`.
    pub fn then(&self, q: &QsMap) -> Result<QsMap, MapError> {
        if self.base() != q.source() {
            return Err(MapError::Mismatch("base of the first map is not the source of the second".into()));
        }
        let images: Vec<Simplex> = (0..self.source().vertex_count())
            .map(|v| q.map.image_simplex(self.carrier(v)))
            .collect();
        if images.iter().all(|s| s.len() == 1) {
            let map = VertexMap::new(
                self.source().clone(),
                q.sd.fine.clone(),
                images.iter().map(|s| s.vertices()[0]).collect(),
            )?;
            return Self::with_subdivision(map, q.sd.clone());
        }
        let sd = Subdivision::of(&q.sd.fine);
        let idx = images.iter().map(|s| sd.vertex_of(s).expect("image is a simplex")).collect();
        let map = VertexMap::new(self.source().clone(), sd.fine.clone(), idx)?;
        Self::with_subdivision(map, sd)
    }

    /// Induced map on H_k from the source to `βL` (whose homology is that of `L`).
    pub fn induced_homology(&self, k: usize) -> (Matrix, Verdict) {
        self.map.induced_homology(k)
    }
}

/// A map affine on every simplex, given by the barycentric coordinates of vertex images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub source: Complex,
    pub target: Complex,
    images: Vec<BTreeMap<usize, Rational>>,
}

impl AffineMap {
    pub fn identity(k: &Complex) -> AffineMap {
        AffineMap {
            source: k.clone(),
            target: k.clone(),
            images: (0..k.vertex_count()).map(|v| BTreeMap::from([(v, int(1))])).collect(),
        }
    }

    pub fn image_of_vertex(&self, v: usize) -> &BTreeMap<usize, Rational> {
        &self.images[v]
    }

    pub fn apply(&self, x: &Point, lambda: &Rational) -> Point {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in x.coords() {
            for (w, d) in &self.images[*v] {
                *out.entry(*w).or_insert_with(zero) += c * d;
            }
        }
        Point::new(out, lambda.clone())
    }

    /// `after ∘ self`; `after` must be affine on simplices of this map's target.
    pub fn compose(&self, after: &AffineMap) -> Result<AffineMap, MapError> {
        if self.target != after.source {
            return Err(MapError::Mismatch("target of the first map is not the source of the second".into()));
        }
        let images = (0..self.source.vertex_count())
            .map(|v| {
                let p = Point::new(self.images[v].clone(), int(1));
                after.apply(&p, &int(1)).coords().clone()
            })
            .collect();
        Ok(AffineMap { source: self.source.clone(), target: after.target.clone(), images })
    }

    /// Smallest target simplex containing the image of a source simplex.
    pub fn image_simplex(&self, s: &Simplex) -> Simplex {
        Simplex::new(s.vertices().iter().flat_map(|v| self.images[*v].keys().copied()).collect())
    }

    /// Source edge realizing the Lipschitz constant, if there are edges.
    pub fn extremal_edge(&self) -> Option<(Simplex, Rational)> {
        let mut best: Option<(Simplex, Rational)> = None;
        for e in self.source.simplices_of_dim(1) {
            let [a, b] = e.vertices() else { unreachable!() };
            let d = l1(&self.images[*a], &self.images[*b]);
            if best.as_ref().map_or(true, |(_, m)| d > *m) {
                best = Some((e.clone(), d));
            }
        }
        best
    }

    /// `λ / (2κ) · max over edges ‖f(a) − f(b)‖₁`. The affine extension is the restriction
    /// of a linear map, and on zero-sum vectors the ℓ1 ratio peaks at `e_a − e_b`.
    pub fn lipschitz_constant(&self, kappa: &Rational, lambda: &Rational) -> Rational {
        match self.extremal_edge() {
            None => zero(),
            Some((_, d)) => d * lambda / (kappa * int(2)),
        }
    }

    /// Supremum distance between two maps with the same source, evaluated at vertices
    /// (exact, since the difference is affine on each simplex and ℓ1 is convex).
    pub fn sup_distance(&self, other: &AffineMap, lambda: &Rational) -> Rational {
        let mut best = zero();
        for v in 0..self.source.vertex_count() {
            let d = l1(&self.images[v], &other.images[v]) * lambda;
            if d > best {
                best = d;
            }
        }
        best
    }

    pub fn is_zero_map(&self) -> bool {
        self.images.iter().all(|m| m.values().all(Zero::is_zero))
    }
}
