//! Open and barycentric stars, indexed covers, nerves, pull-backs and mesh.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{is_full_subcomplex, Complex, ComplexError, Simplex, Subcomplex, Subdivision};
use crate::maps::{AffineMap, QsMap};
use crate::name::VertexName;
use crate::pl::PlMap;
use crate::point::{l1, Point};
use crate::rational::{self, one, zero, Rational};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("element {0} does not match the cover kind")]
    KindMismatch(VertexName),
    #[error("element {0} is not a subcomplex of the ambient complex")]
    NotSubcomplex(VertexName),
    #[error("index sets differ")]
    IndexMismatch,
    #[error("{0}")]
    Mismatch(String),
    #[error("point is not in the open star")]
    NotInOpenStar,
    #[error("subcomplex is not full")]
    NotFull,
    #[error("deformation parameter must lie in [0, 1]")]
    BadParameter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverKind {
    Open,
    Closed,
}

/// The open star of a subcomplex depends only on its vertex set: a point belongs to it
/// iff its support contains one of those vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpenStar {
    pub vertices: BTreeSet<usize>,
}

impl OpenStar {
    pub fn contains(&self, x: &Point) -> bool {
        x.coords().keys().any(|v| self.vertices.contains(v))
    }

    /// Positive mass on the star's vertices; for convex hulls this is checked at the corners.
    fn mass(&self, x: &Point) -> Rational {
        x.coords().iter().filter(|(v, _)| self.vertices.contains(v)).map(|(_, c)| c.clone()).sum()
    }

    /// Simplices that avoid the star's vertices; their union is the complement.
    pub fn avoided(&self, k: &Complex) -> Subcomplex {
        let rest = (0..k.vertex_count()).filter(|v| !self.vertices.contains(v)).collect();
        k.induced(&rest)
    }

    /// Simplices whose interiors lie in the star.
    pub fn open_simplices<'a>(&'a self, k: &'a Complex) -> impl Iterator<Item = &'a Simplex> + 'a {
        k.simplices().filter(|s| s.meets(&self.vertices))
    }
}

pub fn open_star(l: &Subcomplex) -> OpenStar {
    OpenStar { vertices: l.vertices() }
}

/// Simplices of `βK` whose least chain element lies in `L`, closed under faces.
pub fn barycentric_star(sd: &Subdivision, l: &Subcomplex) -> Subcomplex {
    // Any chain starting in L extends to a maximal chain starting in L, so maximal chains suffice.
    Subcomplex::generated_by(sd.fine.maximal().iter().filter(|s| l.contains(sd.chain(s)[0])).cloned())
}

/// Point test for barycentric stars in `K`-coordinates: some vertex of `L` carries a
/// maximal coordinate.
pub fn in_barycentric_star(x: &Point, l: &Subcomplex) -> bool {
    let max = x.coords().values().max().cloned().unwrap_or_else(zero);
    let verts = l.vertices();
    x.coords().iter().any(|(v, c)| *c == max && verts.contains(v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverElement {
    Closed(Subcomplex),
    Open(OpenStar),
}

impl CoverElement {
    pub fn is_empty(&self) -> bool {
        match self {
            CoverElement::Closed(s) => s.is_empty(),
            CoverElement::Open(o) => o.vertices.is_empty(),
        }
    }

    pub fn contains_point(&self, x: &Point) -> bool {
        match self {
            CoverElement::Closed(s) => x.in_subcomplex(s),
            CoverElement::Open(o) => o.contains(x),
        }
    }

    /// Whether the convex hull of the points (all in one ambient simplex) lies in the element.
    pub fn contains_hull<'a, I: IntoIterator<Item = &'a Point>>(&self, points: I) -> bool {
        match self {
            CoverElement::Closed(s) => {
                let support = points.into_iter().fold(Simplex::new(Vec::new()), |acc, p| acc.union(&p.support()));
                support.is_empty() || s.contains(&support)
            }
            CoverElement::Open(o) => points.into_iter().all(|p| o.mass(p).is_positive()),
        }
    }
}

/// A cover of `ambient` by subcomplexes or by open stars, with an explicit index set.
/// When `geometry` is present, `ambient` is the subdivision of `geometry.parent` and
/// distances are measured in the parent's coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedCover {
    pub ambient: Complex,
    pub geometry: Option<Subdivision>,
    pub kind: CoverKind,
    pub elements: BTreeMap<VertexName, CoverElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exhausted {
    pub checked: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshReport {
    #[serde(with = "rational")]
    pub value: Rational,
    /// Set when open elements were measured through their closures.
    pub closures: bool,
}

impl IndexedCover {
    pub fn new(
        ambient: Complex,
        kind: CoverKind,
        elements: BTreeMap<VertexName, CoverElement>,
    ) -> Result<IndexedCover, CoverError> {
        for (i, e) in &elements {
            match (kind, e) {
                (CoverKind::Closed, CoverElement::Closed(s)) => {
                    if !s.is_subcomplex_of(&ambient) {
                        return Err(CoverError::NotSubcomplex(i.clone()));
                    }
                }
                (CoverKind::Open, CoverElement::Open(o)) => {
                    if o.vertices.iter().any(|v| *v >= ambient.vertex_count()) {
                        return Err(CoverError::NotSubcomplex(i.clone()));
                    }
                }
                _ => return Err(CoverError::KindMismatch(i.clone())),
            }
        }
        Ok(IndexedCover { ambient, geometry: None, kind, elements })
    }

    /// Declares the ambient complex to be the subdivision of `base`.
    pub fn with_base(mut self, base: &Complex) -> Result<IndexedCover, CoverError> {
        self.geometry = Some(Subdivision::recover(base, &self.ambient)?);
        Ok(self)
    }

    pub fn indices(&self) -> Vec<VertexName> {
        self.elements.keys().cloned().collect()
    }

    pub fn element(&self, i: &VertexName) -> Option<&CoverElement> {
        self.elements.get(i)
    }

    /// Closed covers must contain every maximal simplex in some element; open covers must
    /// have every vertex in some star.
    pub fn is_cover(&self) -> Verdict {
        match self.kind {
            CoverKind::Closed => {
                for m in self.ambient.maximal() {
                    let covered = self.elements.values().any(|e| match e {
                        CoverElement::Closed(s) => s.contains(m),
                        CoverElement::Open(_) => false,
                    });
                    if !covered {
                        return Verdict::fails(Witness::Simplex { simplex: self.ambient.simplex_names(m) });
                    }
                }
            }
            CoverKind::Open => {
                for v in 0..self.ambient.vertex_count() {
                    let covered = self.elements.values().any(|e| match e {
                        CoverElement::Open(o) => o.vertices.contains(&v),
                        CoverElement::Closed(_) => false,
                    });
                    if !covered {
                        return Verdict::fails(Witness::Simplex { simplex: vec![self.ambient.name(v).clone()] });
                    }
                }
            }
        }
        Verdict::Holds
    }

    fn elements_of(&self, indices: &[&VertexName]) -> Vec<&CoverElement> {
        indices.iter().map(|i| &self.elements[*i]).collect()
    }

    /// Intersection of closed elements.
    pub fn closed_intersection(&self, indices: &[&VertexName]) -> Subcomplex {
        let mut acc: Option<Subcomplex> = None;
        for e in self.elements_of(indices) {
            if let CoverElement::Closed(s) = e {
                acc = Some(match acc {
                    None => s.clone(),
                    Some(a) => a.intersection(s),
                });
            }
        }
        acc.unwrap_or_else(|| self.ambient.whole())
    }

    /// Open simplices making up the intersection of open stars (an up-set of the face poset).
    pub fn open_intersection(&self, indices: &[&VertexName]) -> Vec<Simplex> {
        let stars: Vec<&OpenStar> = self
            .elements_of(indices)
            .into_iter()
            .filter_map(|e| match e {
                CoverElement::Open(o) => Some(o),
                CoverElement::Closed(_) => None,
            })
            .collect();
        self.ambient.simplices().filter(|s| stars.iter().all(|o| s.meets(&o.vertices))).cloned().collect()
    }

    pub fn intersection_nonempty(&self, indices: &[&VertexName]) -> bool {
        match self.kind {
            CoverKind::Closed => !self.closed_intersection(indices).is_empty(),
            CoverKind::Open => {
                let stars: Vec<&OpenStar> = self
                    .elements_of(indices)
                    .into_iter()
                    .filter_map(|e| match e {
                        CoverElement::Open(o) => Some(o),
                        CoverElement::Closed(_) => None,
                    })
                    .collect();
                self.ambient.maximal().iter().any(|m| stars.iter().all(|o| m.meets(&o.vertices)))
            }
        }
    }

    /// A finite complex with the homotopy type of the intersection: the subcomplex itself
    /// for closed covers, and the order complex of the open simplices for open ones.
    pub fn intersection_model(&self, indices: &[&VertexName]) -> Complex {
        match self.kind {
            CoverKind::Closed => self.closed_intersection(indices).to_complex(&self.ambient),
            CoverKind::Open => {
                let up: BTreeSet<Simplex> = self.open_intersection(indices).into_iter().collect();
                let sd = Subdivision::of(&self.ambient);
                let verts: BTreeSet<usize> = up.iter().map(|s| sd.vertex_of(s).expect("simplex")).collect();
                sd.fine.induced(&verts).to_complex(&sd.fine)
            }
        }
    }

    /// Subsets of the index set with non-empty intersection, by levels; stops once more
    /// than `budget` subsets have been examined.
    pub fn nerve_sets(&self, budget: u64) -> Result<Vec<Vec<VertexName>>, Exhausted> {
        let names: Vec<&VertexName> = self.elements.keys().collect();
        let mut checked = 0u64;
        let mut level: Vec<Vec<usize>> = Vec::new();
        for (i, n) in names.iter().enumerate() {
            checked += 1;
            if checked > budget {
                return Err(Exhausted { checked });
            }
            if !self.elements[*n].is_empty() && self.intersection_nonempty(&[n]) {
                level.push(vec![i]);
            }
        }
        let mut all: Vec<Vec<usize>> = level.clone();
        while !level.is_empty() {
            let present: BTreeSet<&Vec<usize>> = level.iter().collect();
            let mut next = Vec::new();
            for a in 0..level.len() {
                for b in a + 1..level.len() {
                    let (x, y) = (&level[a], &level[b]);
                    if x[..x.len() - 1] != y[..y.len() - 1] {
                        break;
                    }
                    let mut cand = x.clone();
                    cand.push(*y.last().expect("non-empty"));
                    let pruned = (0..cand.len()).all(|skip| {
                        let sub: Vec<usize> =
                            cand.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect();
                        present.contains(&sub)
                    });
                    if !pruned {
                        continue;
                    }
                    checked += 1;
                    if checked > budget {
                        return Err(Exhausted { checked });
                    }
                    let idx: Vec<&VertexName> = cand.iter().map(|i| names[*i]).collect();
                    if self.intersection_nonempty(&idx) {
                        next.push(cand);
                    }
                }
            }
            all.extend(next.iter().cloned());
            level = next;
        }
        Ok(all.into_iter().map(|s| s.into_iter().map(|i| names[i].clone()).collect()).collect())
    }

    pub fn nerve(&self, budget: u64) -> Result<Complex, Exhausted> {
        let sets = self.nerve_sets(budget)?;
        Ok(Complex::from_maximal(&sets).expect("index subsets are valid simplices"))
    }

    /// Position of an ambient vertex in the coordinates used for distances.
    fn position(&self, v: usize) -> BTreeMap<usize, Rational> {
        match &self.geometry {
            Some(sd) => Point::barycenter(sd.carrier(v), one()).coords().clone(),
            None => BTreeMap::from([(v, one())]),
        }
    }

    fn element_vertices(&self, e: &CoverElement) -> BTreeSet<usize> {
        match e {
            CoverElement::Closed(s) => s.vertices(),
            CoverElement::Open(o) => self
                .ambient
                .maximal()
                .iter()
                .filter(|m| m.meets(&o.vertices))
                .flat_map(|m| m.vertices().iter().copied())
                .collect(),
        }
    }

    pub fn diameter(&self, i: &VertexName, kappa: &Rational) -> Rational {
        let verts: Vec<usize> = self.element_vertices(&self.elements[i]).into_iter().collect();
        let pos: Vec<BTreeMap<usize, Rational>> = verts.iter().map(|v| self.position(*v)).collect();
        let mut best = zero();
        for a in 0..pos.len() {
            for b in a + 1..pos.len() {
                let d = l1(&pos[a], &pos[b]);
                if d > best {
                    best = d;
                }
            }
        }
        best * kappa
    }

    /// Largest element diameter at scale `kappa`, exact (extremal at vertex pairs).
    pub fn mesh(&self, kappa: &Rational) -> MeshReport {
        let value = self.elements.keys().map(|i| self.diameter(i, kappa)).max().unwrap_or_else(zero);
        MeshReport { value, closures: self.kind == CoverKind::Open }
    }
}

pub fn cover_o(k: &Complex) -> IndexedCover {
    let elements = (0..k.vertex_count())
        .map(|v| (k.name(v).clone(), CoverElement::Open(OpenStar { vertices: BTreeSet::from([v]) })))
        .collect();
    IndexedCover { ambient: k.clone(), geometry: None, kind: CoverKind::Open, elements }
}

pub fn cover_b(k: &Complex) -> IndexedCover {
    cover_b_of(&Subdivision::of(k))
}

pub fn cover_b_of(sd: &Subdivision) -> IndexedCover {
    let k = &sd.parent;
    let elements = (0..k.vertex_count())
        .map(|v| {
            let star = barycentric_star(sd, &Subcomplex::generated_by([Simplex::vertex(v)]));
            (k.name(v).clone(), CoverElement::Closed(star))
        })
        .collect();
    IndexedCover { ambient: sd.fine.clone(), geometry: Some(sd.clone()), kind: CoverKind::Closed, elements }
}

/// Open stars in `βK` of a family of subcomplexes of `K`.
pub fn swell(sd: &Subdivision, family: &BTreeMap<VertexName, Subcomplex>) -> IndexedCover {
    let elements = family
        .iter()
        .map(|(i, a)| {
            let fine = sd.subdivide_subcomplex(a);
            (i.clone(), CoverElement::Open(open_star(&fine)))
        })
        .collect();
    IndexedCover { ambient: sd.fine.clone(), geometry: Some(sd.clone()), kind: CoverKind::Open, elements }
}

/// Pull-back along a map that is affine on simplices and lands in `F.ambient`.
pub fn pullback_affine(f: &AffineMap, cover: &IndexedCover) -> Result<IndexedCover, CoverError> {
    if f.target != cover.ambient {
        return Err(CoverError::Mismatch("map does not land in the ambient complex of the cover".into()));
    }
    let elements = cover
        .elements
        .iter()
        .map(|(i, e)| {
            let pulled = match e {
                CoverElement::Closed(sub) => CoverElement::Closed(Subcomplex::generated_by(
                    f.source.simplices().filter(|s| sub.contains(&f.image_simplex(s))).cloned(),
                )),
                CoverElement::Open(o) => CoverElement::Open(OpenStar {
                    vertices: (0..f.source.vertex_count())
                        .filter(|v| f.image_of_vertex(*v).iter().any(|(w, c)| o.vertices.contains(w) && c.is_positive()))
                        .collect(),
                }),
            };
            (i.clone(), pulled)
        })
        .collect();
    Ok(IndexedCover { ambient: f.source.clone(), geometry: None, kind: cover.kind, elements })
}

/// Pull-back of a cover of `βL` or of `L` along a quasi-simplicial map `K → L`.
pub fn pullback_cover(p: &QsMap, cover: &IndexedCover) -> Result<IndexedCover, CoverError> {
    if cover.ambient == p.subdivision().fine {
        pullback_affine(&p.affine_fine(), cover)
    } else if &cover.ambient == p.base() {
        pullback_affine(&p.affine(), cover)
    } else {
        Err(CoverError::Mismatch("cover does not live on the target of the map".into()))
    }
}

/// Holds iff the nerves agree; fails with the first subset (shortest, then least) on which
/// they differ.
pub fn covers_isomorphic(f: &IndexedCover, g: &IndexedCover, budget: u64) -> Result<Verdict, CoverError> {
    if f.indices() != g.indices() {
        return Err(CoverError::IndexMismatch);
    }
    let (a, b) = match (f.nerve_sets(budget), g.nerve_sets(budget)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Ok(Verdict::inconclusive(format!("nerve subset budget {budget} exhausted"))),
    };
    let a: BTreeSet<Vec<VertexName>> = a.into_iter().collect();
    let b: BTreeSet<Vec<VertexName>> = b.into_iter().collect();
    let mut diff: Vec<&Vec<VertexName>> = a.symmetric_difference(&b).collect();
    diff.sort_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)));
    Ok(match diff.first() {
        None => Verdict::Holds,
        Some(j) => Verdict::fails(Witness::IndexSubset { indices: (*j).clone() }),
    })
}

/// `Φ(x, t) = t·q(x) + (1 − t)·x` with `q(x)` the normalized part of `x` on `K`.
pub fn deformation_phi(l: &Complex, k: &Subcomplex, x: &Point, t: &Rational) -> Result<Point, CoverError> {
    if t.is_negative() || *t > one() {
        return Err(CoverError::BadParameter);
    }
    if !is_full_subcomplex(k, l) {
        return Err(CoverError::NotFull);
    }
    let verts = k.vertices();
    let part: BTreeMap<usize, Rational> =
        x.coords().iter().filter(|(v, _)| verts.contains(v)).map(|(v, c)| (*v, c.clone())).collect();
    let mass: Rational = part.values().sum();
    if mass.is_zero() {
        return Err(CoverError::NotInOpenStar);
    }
    let q = Point::new(part.into_iter().map(|(v, c)| (v, c / &mass)).collect(), x.scale().clone());
    Ok(x.lerp(&q, t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closeness {
    pub verdict: Verdict,
    /// For each maximal domain simplex, a cover index containing both of its images.
    pub certificate: Vec<(Vec<VertexName>, VertexName)>,
    /// Whether the certificate refers to the barycentric subdivision of the domain.
    pub subdivided: bool,
}

fn certify(f: &PlMap, g: &PlMap, cover: &IndexedCover) -> (Option<Witness>, Result<Vec<(Vec<VertexName>, VertexName)>, ()>) {
    let common = f.defined.intersection(&g.defined);
    for v in common.vertices() {
        let (a, b) = (&f.images()[&v], &g.images()[&v]);
        if !cover.elements.values().any(|e| e.contains_point(a) && e.contains_point(b)) {
            let mut coords: Vec<String> = Vec::new();
            for (w, c) in a.coords().iter().chain(b.coords()) {
                coords.push(format!("{}:{}", cover.ambient.name(*w), rational::format(c)));
            }
            let witness = Witness::Point { support: vec![f.domain.name(v).clone()], coords };
            return (Some(witness), Err(()));
        }
    }
    let mut cert = Vec::new();
    for s in common.maximal() {
        let fs = s.vertices().iter().map(|v| &f.images()[v]);
        let gs = s.vertices().iter().map(|v| &g.images()[v]);
        match cover.elements.iter().find(|(_, e)| e.contains_hull(fs.clone()) && e.contains_hull(gs.clone())) {
            Some((i, _)) => cert.push((f.domain.simplex_names(&s), i.clone())),
            None => return (None, Err(())),
        }
    }
    (None, Ok(cert))
}

/// Certificate that `f` and `g` are `F`-close: per domain simplex an element containing
/// `f(σ)` and `g(σ)`. Fails when some domain vertex has no common element; tries one
/// subdivision of the domain before giving up.
pub fn are_close(f: &PlMap, g: &PlMap, cover: &IndexedCover) -> Result<Closeness, CoverError> {
    if f.domain != g.domain || f.target != cover.ambient || g.target != cover.ambient {
        return Err(CoverError::Mismatch("maps must share a domain and land in the ambient complex".into()));
    }
    match certify(f, g, cover) {
        (Some(w), _) => return Ok(Closeness { verdict: Verdict::fails(w), certificate: Vec::new(), subdivided: false }),
        (None, Ok(c)) => return Ok(Closeness { verdict: Verdict::Holds, certificate: c, subdivided: false }),
        _ => {}
    }
    let (f2, _) = f.subdivide_domain();
    let (g2, _) = g.subdivide_domain();
    Ok(match certify(&f2, &g2, cover) {
        (Some(w), _) => Closeness { verdict: Verdict::fails(w), certificate: Vec::new(), subdivided: true },
        (None, Ok(c)) => Closeness { verdict: Verdict::Holds, certificate: c, subdivided: true },
        _ => Closeness {
            verdict: Verdict::inconclusive("no per-simplex closeness certificate after one subdivision"),
            certificate: Vec::new(),
            subdivided: true,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::rational::rat;

    fn nm(s: &str) -> VertexName {
        VertexName::atom(s)
    }

    #[test]
    fn open_star_of_a_vertex() {
        let d2 = gen::simplex(2);
        let a = Subcomplex::generated_by([Simplex::vertex(0)]);
        let o = open_star(&a);
        assert_eq!(o.avoided(&d2).f_vector(), vec![2, 1]);
        assert!(o.contains(&Point::barycenter(&d2.maximal()[0], one())));
        assert!(!o.contains(&Point::vertex(1, one())));
    }

    #[test]
    fn barycentric_star_of_an_endpoint() {
        let edge = gen::simplex_on(&["a", "b"]);
        let sd = Subdivision::of(&edge);
        let star = barycentric_star(&sd, &Subcomplex::generated_by([Simplex::vertex(0)]));
        let names = star.names(&sd.fine);
        assert_eq!(names, vec![vec![VertexName::set([nm("a")]), VertexName::set([nm("a"), nm("b")])]]);
        assert_eq!(barycentric_star(&sd, &edge.whole()), sd.fine.whole());
    }

    #[test]
    fn closeness_allows_images_in_different_simplices_of_one_star() {
        let d2 = gen::simplex(2);
        let sd = Subdivision::of(&d2);
        let at = |names: &[&str]| Point::vertex(sd.fine.index_of(&VertexName::set(gen::named(names))).unwrap(), one());
        let x = gen::simplex_on(&["p", "q"]);
        let f = PlMap::total(x.clone(), sd.fine.clone(), BTreeMap::from([(0, at(&["a"])), (1, at(&["a", "b"]))])).unwrap();
        let g = PlMap::total(x, sd.fine.clone(), BTreeMap::from([(0, at(&["a"])), (1, at(&["a", "c"]))])).unwrap();
        let c = are_close(&f, &g, &cover_b(&d2)).unwrap();
        assert!(c.verdict.holds());
        assert!(!c.subdivided);
        assert_eq!(c.certificate[0].1, nm("a"));
    }

    #[test]
    fn star_covers() {
        let edge = gen::simplex(1);
        let b = cover_b(&edge);
        assert!(b.is_cover().holds());
        assert_eq!(b.mesh(&one()).value, one());
        assert_eq!(b.mesh(&rat(1, 2)).value, rat(1, 2));
        let o = cover_o(&gen::simplex(2));
        assert!(o.is_cover().holds());
        let all: Vec<VertexName> = o.indices();
        let refs: Vec<&VertexName> = all.iter().collect();
        assert!(o.intersection_nonempty(&refs));
        let pt = cover_b(&gen::simplex(0));
        assert_eq!(pt.elements.len(), 1);
    }

    #[test]
    fn nerves() {
        let d2 = gen::simplex(2);
        assert_eq!(cover_o(&d2).nerve(1000).unwrap(), d2);
        assert_eq!(cover_b(&d2).nerve(1000).unwrap(), d2);
        let two = Complex::from_maximal(&[vec![nm("a")], vec![nm("b")]]).unwrap();
        assert_eq!(cover_o(&two).nerve(1000).unwrap(), two);
        assert!(cover_o(&d2).nerve(2).is_err());
    }

    #[test]
    fn isomorphism_of_covers() {
        let d2 = gen::simplex(2);
        let (o, b) = (cover_o(&d2), cover_b(&d2));
        assert!(covers_isomorphic(&o, &o, 1000).unwrap().holds());
        assert!(covers_isomorphic(&o, &b, 1000).unwrap().holds());
        let circle = gen::circle();
        let bad = covers_isomorphic(&cover_o(&circle), &cover_o(&d2), 1000).unwrap();
        assert_eq!(bad.witness(), Some(&Witness::IndexSubset { indices: vec![nm("a"), nm("b"), nm("c")] }));
        assert_eq!(covers_isomorphic(&o, &cover_o(&gen::simplex(1)), 10), Err(CoverError::IndexMismatch));
    }

    #[test]
    fn pullbacks() {
        let (cyl, base) = gen::cylinder();
        let b = cover_b(&base);
        let pulled = pullback_cover(&cyl, &b).unwrap();
        assert_eq!(pulled.indices(), b.indices());
        let sizes: Vec<Vec<usize>> = pulled
            .elements
            .values()
            .map(|e| match e {
                CoverElement::Closed(s) => s.f_vector(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(sizes, vec![vec![6, 12, 6], vec![6, 12, 6]]);
        assert!(covers_isomorphic(&pulled, &b, 1000).unwrap().holds());
        let id = QsMap::subdivision_identity(&base);
        let o = cover_o(&base);
        let back = pullback_cover(&id, &o).unwrap();
        assert!(covers_isomorphic(&back, &o, 1000).unwrap().holds());
    }

    #[test]
    fn deformation_examples() {
        let edge = gen::simplex(1);
        let a = Subcomplex::generated_by([Simplex::vertex(0)]);
        let x = Point::barycenter(&edge.maximal()[0], one());
        let half = deformation_phi(&edge, &a, &x, &rat(1, 2)).unwrap();
        assert_eq!(half.coord(0), rat(3, 4));
        assert_eq!(deformation_phi(&edge, &a, &x, &one()).unwrap(), Point::vertex(0, one()));
        assert_eq!(deformation_phi(&edge, &a, &x, &zero()).unwrap(), x);
        let b = Point::vertex(1, one());
        assert_eq!(deformation_phi(&edge, &a, &b, &rat(1, 2)), Err(CoverError::NotInOpenStar));
        let circle = gen::circle();
        let two = Subcomplex::generated_by([Simplex::vertex(0), Simplex::vertex(1)]);
        assert_eq!(deformation_phi(&circle, &two, &x, &zero()), Err(CoverError::NotFull));
    }

    #[test]
    fn closeness() {
        let edge = gen::simplex(1);
        let cover = cover_o(&edge);
        let id = PlMap::inclusion(&edge, &edge.whole());
        let c = are_close(&id, &id, &cover).unwrap();
        assert!(c.verdict.holds());
        let swap: BTreeMap<usize, Point> = BTreeMap::from([(0, Point::vertex(1, one())), (1, Point::vertex(0, one()))]);
        let flip = PlMap::total(edge.clone(), edge.clone(), swap).unwrap();
        assert!(are_close(&id, &flip, &cover).unwrap().verdict.is_fails());
    }
}
