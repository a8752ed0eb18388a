//! Carriers from a closed cover of a domain to subcomplexes of a target, extension of
//! carried partial maps over domains of dimension at most two, and homotopies between
//! close maps.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex, Simplex, Subcomplex};
use crate::connectivity::collapse::collapse;
use crate::connectivity::Budgets;
use crate::name::VertexName;
use crate::pl::PlMap;
use crate::point::Point;
use crate::rational::{int, one, Rational};
use crate::refine::Refinement;
use crate::stars::{are_close, CoverElement, CoverError, CoverKind, IndexedCover};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CarrierError {
    #[error("the source of a carrier must be a closed cover")]
    NotClosed,
    #[error("carrier indices differ from the cover's")]
    IndexMismatch,
    #[error("assigned set for {0} is not a subcomplex of the target")]
    NotSubcomplex(VertexName),
    #[error("{0}")]
    Mismatch(String),
    #[error("partial map is not carried")]
    NotCarried(Witness),
    #[error("extension handles domains of dimension at most 2, got {0}")]
    TooLarge(isize),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Assigns to each element of a closed cover of the domain a subcomplex of the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Carrier {
    pub source: IndexedCover,
    pub target: Complex,
    pub assignment: BTreeMap<VertexName, Subcomplex>,
}

impl Carrier {
    pub fn new(
        source: IndexedCover,
        target: Complex,
        assignment: BTreeMap<VertexName, Subcomplex>,
    ) -> Result<Carrier, CarrierError> {
        if source.kind != CoverKind::Closed {
            return Err(CarrierError::NotClosed);
        }
        if source.elements.keys().ne(assignment.keys()) {
            return Err(CarrierError::IndexMismatch);
        }
        for (i, s) in &assignment {
            if !s.is_subcomplex_of(&target) {
                return Err(CarrierError::NotSubcomplex(i.clone()));
            }
        }
        Ok(Carrier { source, target, assignment })
    }

    fn source_element(&self, i: &VertexName) -> &Subcomplex {
        match &self.source.elements[i] {
            CoverElement::Closed(s) => s,
            CoverElement::Open(_) => unreachable!("closed cover"),
        }
    }

    /// Every index subset with non-empty source intersection must have non-empty target
    /// intersection.
    pub fn validate(&self, budget: u64) -> Verdict {
        let sets = match self.source.nerve_sets(budget) {
            Ok(s) => s,
            Err(e) => return Verdict::inconclusive(format!("nerve budget exhausted after {} subsets", e.checked)),
        };
        for j in sets {
            let mut acc: Option<Subcomplex> = None;
            for i in &j {
                let s = &self.assignment[i];
                acc = Some(match acc {
                    None => s.clone(),
                    Some(a) => a.intersection(s),
                });
            }
            if acc.map_or(true, |a| a.is_empty()) {
                return Verdict::fails(Witness::IndexSubset { indices: j });
            }
        }
        Verdict::Holds
    }

    /// `T(σ)`: intersection of the assigned sets over all elements containing `σ`.
    pub fn required(&self, s: &Simplex) -> Option<Subcomplex> {
        let mut acc: Option<Subcomplex> = None;
        for i in self.assignment.keys() {
            if self.source_element(i).contains(s) {
                let t = &self.assignment[i];
                acc = Some(match acc {
                    None => t.clone(),
                    Some(a) => a.intersection(t),
                });
            }
        }
        acc
    }

    /// The same carrier on a refined domain.
    pub fn refine(&self, r: &Refinement) -> Carrier {
        let elements = self
            .assignment
            .keys()
            .map(|i| (i.clone(), CoverElement::Closed(r.pull_subcomplex(self.source_element(i)))))
            .collect();
        let source = IndexedCover { ambient: r.fine.clone(), geometry: None, kind: CoverKind::Closed, elements };
        Carrier { source, target: self.target.clone(), assignment: self.assignment.clone() }
    }

    /// Whether `f(F ∩ dom f) ⊂ C(F)` for every element `F`.
    pub fn is_carried(&self, f: &PlMap) -> Verdict {
        if f.domain != self.source.ambient || f.target != self.target {
            return Verdict::inconclusive("map does not match the carrier's domain and target");
        }
        for (i, c) in &self.assignment {
            let part = self.source_element(i).intersection(&f.defined);
            for s in part.maximal() {
                if !c.contains(&f.image_simplex(&s)) {
                    return Verdict::fails(Witness::Carried { index: i.clone(), simplex: f.domain.simplex_names(&s) });
                }
            }
        }
        Verdict::Holds
    }
}

/// A carried map on a refinement of the carrier's domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub map: PlMap,
    pub refinement: Refinement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extended {
    Done(Extension),
    /// No filler was found for the listed cells of the domain.
    Stuck { reason: String, cells: Vec<Vec<VertexName>> },
}

impl Extended {
    pub fn verdict(&self) -> Verdict {
        match self {
            Extended::Done(_) => Verdict::Holds,
            Extended::Stuck { reason, cells } => {
                let cells: Vec<String> = cells.iter().map(|c| format!("{c:?}")).collect();
                Verdict::inconclusive(format!("{reason}: {}", cells.join(" ")))
            }
        }
    }

    pub fn extension(&self) -> Option<&Extension> {
        match self {
            Extended::Done(e) => Some(e),
            Extended::Stuck { .. } => None,
        }
    }
}

fn span<'a, I: IntoIterator<Item = &'a Point>>(points: I) -> Simplex {
    points.into_iter().fold(Simplex::new(Vec::new()), |acc, p| acc.union(&p.support()))
}

fn least_vertex(p: &Point) -> usize {
    *p.coords().keys().next().expect("points have non-empty support")
}

/// Shortest edge path inside `t`, ties broken towards smaller vertices.
fn shortest_path(t: &Subcomplex, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for s in t.simplices().filter(|s| s.len() == 2) {
        let [a, b] = s.vertices() else { unreachable!() };
        adj.entry(*a).or_default().insert(*b);
        adj.entry(*b).or_default().insert(*a);
    }
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while let Some(p) = parent.get(&cur) {
                path.push(*p);
                cur = *p;
            }
            path.reverse();
            return Some(path);
        }
        for w in adj.get(&v).into_iter().flatten() {
            if seen.insert(*w) {
                parent.insert(*w, v);
                queue.push_back(*w);
            }
        }
    }
    None
}

struct Builder {
    names: Vec<VertexName>,
    positions: Vec<Point>,
    images: Vec<Point>,
    generators: Vec<Vec<usize>>,
    prefix: String,
}

impl Builder {
    fn fresh(&mut self, position: Point, image: Point) -> usize {
        self.names.push(VertexName::atom(format!("{}{}", self.prefix, self.names.len())));
        self.positions.push(position);
        self.images.push(image);
        self.names.len() - 1
    }
}

enum Step {
    /// Each outer point is followed by `k - 1` inner copies of its value.
    Refine(usize),
    /// Same parameters, new values.
    Move,
    /// New points inserted right after the listed outer positions.
    Insert(BTreeSet<usize>),
}

/// Ring of vertex values around the boundary of a triangle, at parameters in `[0, 3)`.
#[derive(Clone)]
struct Ring {
    params: Vec<Rational>,
    values: Vec<usize>,
}

impl Ring {
    fn refine(params: &[Rational], values: impl Fn(usize) -> usize, k: usize) -> Ring {
        let n = params.len();
        let mut out = Ring { params: Vec::new(), values: Vec::new() };
        for i in 0..n {
            let next = if i + 1 < n { params[i + 1].clone() } else { params[0].clone() + int(3) };
            for j in 0..k {
                out.params.push(&params[i] + (&next - &params[i]) * Rational::new(j.into(), k.into()));
                out.values.push(values(i));
            }
        }
        out
    }
}

/// Homotopy of a vertex loop inside `t` to a constant loop, guided by a collapse of `t`.
/// Returns the rings after the first one, the steps leading to each, and the final value.
fn contract(t: &Subcomplex, first: Ring, moves: &mut u64, budget: u64) -> Option<(Vec<(Step, Ring)>, usize)> {
    let mut rings: Vec<(Step, Ring)> = Vec::new();
    let mut ring = first;
    let col = collapse(t);
    for (tau, sigma) in &col.steps {
        match tau.len() {
            1 => {
                let u = tau.vertices()[0];
                let w = *sigma.vertices().iter().find(|x| **x != u).expect("edge");
                if ring.values.contains(&u) {
                    if ring.values.iter().any(|x| *x != u) {
                        let m = ring.values.len();
                        let bad = (0..m).any(|j| {
                            let (a, b) = (ring.values[j], ring.values[(j + 1) % m]);
                            (a == u && b != u && b != w) || (b == u && a != u && a != w)
                        });
                        if bad {
                            return None;
                        }
                    }
                    ring.values.iter_mut().filter(|x| **x == u).for_each(|x| *x = w);
                    *moves += 1;
                    if *moves > budget {
                        return None;
                    }
                    rings.push((Step::Move, ring.clone()));
                }
            }
            2 => {
                let (u, w) = (tau.vertices()[0], tau.vertices()[1]);
                let x = *sigma.vertices().iter().find(|y| !tau.contains_vertex(**y)).expect("triangle");
                let m = ring.values.len();
                let at: BTreeSet<usize> = (0..m)
                    .filter(|j| {
                        let (a, b) = (ring.values[*j], ring.values[(j + 1) % m]);
                        (a == u && b == w) || (a == w && b == u)
                    })
                    .collect();
                if at.is_empty() {
                    continue;
                }
                let mut next = Ring { params: Vec::new(), values: Vec::new() };
                for j in 0..m {
                    next.params.push(ring.params[j].clone());
                    next.values.push(ring.values[j]);
                    if at.contains(&j) {
                        let end = if j + 1 < m { ring.params[j + 1].clone() } else { int(3) };
                        next.params.push((&ring.params[j] + end) / int(2));
                        next.values.push(x);
                    }
                }
                ring = next;
                rings.push((Step::Insert(at), ring.clone()));
                *moves += 1;
                if *moves > budget {
                    return None;
                }
            }
            _ => {}
        }
    }
    let v0 = ring.values[0];
    if ring.values.iter().all(|x| *x == v0) {
        return Some((rings, v0));
    }
    let m = ring.values.len();
    let apex = t.vertices().into_iter().find(|c| {
        (0..m).all(|j| t.contains(&Simplex::new(vec![ring.values[j], ring.values[(j + 1) % m], *c])))
    })?;
    Some((rings, apex))
}

/// Extends a carried partial map over every simplex of a domain of dimension at most 2.
/// Vertices go to the least vertex of `T(v)`, edges along shortest paths in `T(e)`, and
/// triangles are filled by a direct simplex, a cone, or rings contracting the boundary
/// loop along a collapse of `T(σ)`. Only simplices outside the defined part are subdivided.
pub fn extend_carried(f: &PlMap, c: &Carrier, budget: u64) -> Result<Extended, CarrierError> {
    let x = &c.source.ambient;
    if f.domain != *x || f.target != c.target {
        return Err(CarrierError::Mismatch("map does not match the carrier's domain and target".into()));
    }
    if x.dim() > 2 {
        return Err(CarrierError::TooLarge(x.dim()));
    }
    if let Verdict::Fails { witness } = c.is_carried(f) {
        return Err(CarrierError::NotCarried(witness));
    }
    let mut prefix = String::from("~");
    while x.names().iter().any(|n| matches!(n, VertexName::Atom(a) if a.starts_with(&prefix))) {
        prefix.push('~');
    }
    let mut b = Builder { names: Vec::new(), positions: Vec::new(), images: Vec::new(), generators: Vec::new(), prefix };
    let stuck = |reason: &str, s: &Simplex| {
        Ok(Extended::Stuck { reason: reason.to_string(), cells: vec![x.simplex_names(s)] })
    };
    let required = |s: &Simplex| c.required(s).unwrap_or_else(Subcomplex::empty);

    for v in 0..x.vertex_count() {
        let s = Simplex::vertex(v);
        let image = match f.image(v) {
            Some(p) => p.clone(),
            None => match required(&s).vertices().into_iter().next() {
                Some(u) => Point::vertex(u, one()),
                None => return stuck("empty target for vertex", &s),
            },
        };
        b.names.push(x.name(v).clone());
        b.positions.push(Point::vertex(v, one()));
        b.images.push(image);
        b.generators.push(vec![v]);
    }

    let mut chains: BTreeMap<Simplex, Vec<(usize, Rational)>> = BTreeMap::new();
    for e in x.simplices_of_dim(1) {
        let (a, z) = (e.vertices()[0], e.vertices()[1]);
        if f.defined.contains(e) {
            chains.insert(e.clone(), vec![(a, int(0)), (z, int(1))]);
            b.generators.push(vec![a, z]);
            continue;
        }
        let t = required(e);
        let (pa, pz) = (b.images[a].clone(), b.images[z].clone());
        let Some(path) = shortest_path(&t, least_vertex(&pa), least_vertex(&pz)) else {
            return stuck("endpoints are not joined inside the carrier", e);
        };
        let mut points: Vec<Point> = vec![pa];
        for u in path {
            points.push(Point::vertex(u, one()));
        }
        points.push(pz);
        points.dedup_by(|p, q| p.coords() == q.coords());
        let len = points.len().max(2) - 1;
        let mut chain = vec![(a, int(0))];
        for (k, p) in points.iter().enumerate().skip(1).take(len.saturating_sub(1)) {
            let frac = Rational::new(k.into(), len.into());
            let pos = Point::vertex(a, one()).lerp(&Point::vertex(z, one()), &frac);
            let id = b.fresh(pos, p.clone());
            chain.push((id, frac));
        }
        chain.push((z, int(1)));
        for w in chain.windows(2) {
            b.generators.push(vec![w[0].0, w[1].0]);
        }
        chains.insert(e.clone(), chain);
    }

    let mut moves = 0u64;
    for s in x.simplices_of_dim(2) {
        let [v0, v1, v2] = s.vertices() else { unreachable!() };
        if f.defined.contains(s) {
            b.generators.push(s.vertices().to_vec());
            continue;
        }
        let t = required(s);
        let side = |p: usize, q: usize| chains[&Simplex::new(vec![p, q])].clone();
        let mut outer: Vec<(usize, Rational)> = Vec::new();
        for (id, frac) in &side(*v0, *v1)[..side(*v0, *v1).len() - 1] {
            outer.push((*id, frac.clone()));
        }
        for (id, frac) in &side(*v1, *v2)[..side(*v1, *v2).len() - 1] {
            outer.push((*id, int(1) + frac));
        }
        let back = side(*v0, *v2);
        for (id, frac) in back.iter().rev().take(back.len() - 1) {
            outer.push((*id, int(3) - frac));
        }
        let n = outer.len();
        let pts: Vec<Point> = outer.iter().map(|(id, _)| b.images[*id].clone()).collect();
        if n == 3 && t.contains(&span(&pts)) {
            b.generators.push(s.vertices().to_vec());
            continue;
        }
        let centre_image = if t.contains(&span(&pts)) {
            Some((Vec::new(), pts[0].clone()))
        } else {
            t.vertices()
                .into_iter()
                .find(|apex| {
                    (0..n).all(|j| t.contains(&span([&pts[j], &pts[(j + 1) % n]]).union(&Simplex::vertex(*apex))))
                })
                .map(|apex| (Vec::new(), Point::vertex(apex, one())))
        };
        let (rings, centre) = match centre_image {
            Some(found) => found,
            None => {
                let params: Vec<Rational> = outer.iter().map(|(_, p)| p.clone()).collect();
                let first = Ring::refine(&params, |i| least_vertex(&pts[i]), 2);
                match contract(&t, first.clone(), &mut moves, budget) {
                    Some((mut rest, value)) => {
                        rest.insert(0, (Step::Refine(2), first));
                        (rest, Point::vertex(value, one()))
                    }
                    None => {
                        let reason = if moves > budget { "filler budget exhausted" } else { "no filler found" };
                        return stuck(reason, s);
                    }
                }
            }
        };
        let corners = [*v0, *v1, *v2, *v0];
        let bary = Point::barycenter(s, one());
        let total = rings.len() + 1;
        let place = |param: &Rational, r: usize| -> Point {
            let whole = param.floor();
            let k = whole.to_integer().try_into().unwrap_or(0usize).min(2);
            let frac = param - &whole;
            let edge = Point::vertex(corners[k], one()).lerp(&Point::vertex(corners[k + 1], one()), &frac);
            let lambda = Rational::new((total - r).into(), total.into());
            bary.lerp(&edge, &lambda)
        };
        let mut previous: Vec<usize> = outer.iter().map(|(id, _)| *id).collect();
        for (r, (step, ring)) in rings.iter().enumerate() {
            let ids: Vec<usize> = ring
                .params
                .iter()
                .zip(&ring.values)
                .map(|(p, v)| b.fresh(place(p, r + 1), Point::vertex(*v, one())))
                .collect();
            let m = previous.len();
            match step {
                Step::Refine(k) => {
                    for i in 0..m {
                        for j in 0..*k {
                            let next = if j + 1 < *k { ids[i * k + j + 1] } else { ids[((i + 1) % m) * k] };
                            b.generators.push(vec![previous[i], ids[i * k + j], next]);
                        }
                        b.generators.push(vec![previous[i], previous[(i + 1) % m], ids[((i + 1) % m) * k]]);
                    }
                }
                Step::Insert(at) => {
                    let total = ids.len();
                    let mut k = 0;
                    for j in 0..m {
                        let jn = (j + 1) % m;
                        if at.contains(&j) {
                            b.generators.push(vec![previous[j], ids[k], ids[k + 1]]);
                            b.generators.push(vec![previous[j], ids[k + 1], ids[(k + 2) % total]]);
                            b.generators.push(vec![previous[j], previous[jn], ids[(k + 2) % total]]);
                            k += 2;
                        } else {
                            b.generators.push(vec![previous[j], previous[jn], ids[(k + 1) % total]]);
                            b.generators.push(vec![previous[j], ids[k], ids[(k + 1) % total]]);
                            k += 1;
                        }
                    }
                }
                Step::Move => {
                    for j in 0..m {
                        let jn = (j + 1) % m;
                        b.generators.push(vec![previous[j], previous[jn], ids[jn]]);
                        b.generators.push(vec![previous[j], ids[j], ids[jn]]);
                    }
                }
            }
            previous = ids;
        }
        let centre_id = b.fresh(bary.clone(), centre);
        let m = previous.len();
        for j in 0..m {
            b.generators.push(vec![centre_id, previous[j], previous[(j + 1) % m]]);
        }
    }

    let (fine, remap) = Complex::from_named_parts(b.names, b.generators);
    let mut positions = vec![Point::vertex(0, one()); fine.vertex_count()];
    let mut images = BTreeMap::new();
    for (old, new) in remap.iter().enumerate() {
        positions[*new] = b.positions[old].clone();
        images.insert(*new, b.images[old].clone());
    }
    let refinement = Refinement::new(x.clone(), fine.clone(), positions)
        .ok_or_else(|| CarrierError::Mismatch("refinement left a coarse simplex".into()))?;
    let map = PlMap::total(fine, c.target.clone(), images)
        .map_err(|e| CarrierError::Mismatch(format!("extension does not land in the target: {e}")))?;
    if let Verdict::Fails { witness } = c.refine(&refinement).is_carried(&map) {
        return Err(CarrierError::NotCarried(witness));
    }
    Ok(Extended::Done(Extension { map, refinement }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomotopyKind {
    /// `(1 − t)·f + t·g`, inside one element per domain simplex.
    Linear,
    /// A carried map on a triangulated prism `X × [0, 1]`.
    Prism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub verdict: Verdict,
    pub kind: Option<HomotopyKind>,
    /// Per maximal domain simplex, the element containing its tracks.
    pub certificate: Vec<(Vec<VertexName>, VertexName)>,
    pub prism: Option<Extension>,
}

impl Homotopy {
    fn without(verdict: Verdict) -> Homotopy {
        Homotopy { verdict, kind: None, certificate: Vec::new(), prism: None }
    }
}

/// Prism `X × [0, 1]` with vertices `w@0`, `w@1`, triangulated by staircases.
pub fn prism(x: &Complex) -> Complex {
    let mut names = Vec::new();
    for w in x.names() {
        names.push(VertexName::atom(format!("{w}@0")));
        names.push(VertexName::atom(format!("{w}@1")));
    }
    let mut gens = Vec::new();
    for s in x.maximal() {
        let vs = s.vertices();
        for j in 0..vs.len() {
            let mut g: Vec<usize> = vs[..=j].iter().map(|v| 2 * v).collect();
            g.extend(vs[j..].iter().map(|v| 2 * v + 1));
            gens.push(g);
        }
    }
    Complex::from_named_parts(names, gens).0
}

/// A homotopy between `F`-close maps whose tracks stay inside elements of `F`.
pub fn close_maps_homotopy(f: &PlMap, g: &PlMap, cover: &IndexedCover, budgets: &Budgets) -> Result<Homotopy, CarrierError> {
    let close = are_close(f, g, cover)?;
    if !close.verdict.holds() {
        return Ok(Homotopy::without(close.verdict));
    }
    let (f, g) = if close.subdivided { (f.subdivide_domain().0, g.subdivide_domain().0) } else { (f.clone(), g.clone()) };
    let x = f.domain.clone();
    let mut linear = Vec::new();
    for s in x.maximal() {
        let pts: Vec<&Point> = s.vertices().iter().flat_map(|v| [&f.images()[v], &g.images()[v]]).collect();
        if !cover.ambient.contains(&span(pts.iter().copied())) {
            break;
        }
        if let Some((i, _)) = cover.elements.iter().find(|(_, e)| e.contains_hull(pts.iter().copied())) {
            linear.push((x.simplex_names(s), i.clone()));
        }
    }
    if linear.len() == x.maximal().len() {
        return Ok(Homotopy { verdict: Verdict::Holds, kind: Some(HomotopyKind::Linear), certificate: linear, prism: None });
    }
    if cover.kind == CoverKind::Open {
        return Ok(Homotopy::without(Verdict::inconclusive(
            "no straight-line certificate, and prism fillers need closed elements",
        )));
    }
    if x.dim() > 1 {
        return Ok(Homotopy::without(Verdict::inconclusive("prism over a 2-dimensional domain exceeds the filler dimension")));
    }
    let p = prism(&x);
    let at = |v: usize, level: usize| p.index_of(&VertexName::atom(format!("{}@{level}", x.name(v)))).expect("prism vertex");
    let mut elements: BTreeMap<VertexName, Vec<Simplex>> = cover.elements.keys().map(|i| (i.clone(), Vec::new())).collect();
    for (names, i) in &close.certificate {
        let s = x.simplex(names).expect("certificate simplex");
        let vs = s.vertices();
        for j in 0..vs.len() {
            let mut g: Vec<usize> = vs[..=j].iter().map(|v| at(*v, 0)).collect();
            g.extend(vs[j..].iter().map(|v| at(*v, 1)));
            elements.get_mut(i).expect("index").push(Simplex::new(g));
        }
    }
    let source = IndexedCover {
        ambient: p.clone(),
        geometry: None,
        kind: CoverKind::Closed,
        elements: elements.into_iter().map(|(i, gens)| (i, CoverElement::Closed(Subcomplex::generated_by(gens)))).collect(),
    };
    let assignment = cover
        .elements
        .iter()
        .map(|(i, e)| match e {
            CoverElement::Closed(s) => (i.clone(), s.clone()),
            CoverElement::Open(_) => unreachable!("closed cover"),
        })
        .collect();
    let carrier = Carrier::new(source, cover.ambient.clone(), assignment)?;
    let ends: Vec<Simplex> = x
        .simplices()
        .flat_map(|s| {
            [0, 1].map(|level| Simplex::new(s.vertices().iter().map(|v| at(*v, level)).collect()))
        })
        .collect();
    let mut images = BTreeMap::new();
    for v in 0..x.vertex_count() {
        images.insert(at(v, 0), f.images()[&v].clone());
        images.insert(at(v, 1), g.images()[&v].clone());
    }
    let ends = PlMap::new(p, cover.ambient.clone(), Subcomplex::generated_by(ends), images)
        .map_err(|e| CarrierError::Mismatch(e.to_string()))?;
    let extended = extend_carried(&ends, &carrier, budgets.filler_steps)?;
    Ok(match extended {
        Extended::Done(ext) => Homotopy {
            verdict: Verdict::Holds,
            kind: Some(HomotopyKind::Prism),
            certificate: close.certificate,
            prism: Some(ext),
        },
        stuck => Homotopy::without(stuck.verdict()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::stars::cover_b;

    fn closed_cover(x: &Complex, parts: &[(&str, &[&[&str]])]) -> IndexedCover {
        let elements = parts
            .iter()
            .map(|(i, gens)| {
                let gens: Vec<Vec<VertexName>> = gens.iter().map(|g| g.iter().map(|n| VertexName::atom(*n)).collect()).collect();
                (VertexName::atom(*i), CoverElement::Closed(Subcomplex::from_names(x, &gens).unwrap()))
            })
            .collect();
        IndexedCover::new(x.clone(), CoverKind::Closed, elements).unwrap()
    }

    #[test]
    fn vertex_and_edge_fillers() {
        let edge = gen::simplex_on(&["p", "q"]);
        let cover = closed_cover(&edge, &[("all", &[&["p", "q"]])]);
        let target = gen::simplex(2).barycentric_subdivision();
        let c = Carrier::new(cover, target.clone(), BTreeMap::from([(VertexName::atom("all"), target.whole())])).unwrap();
        assert!(c.validate(100).holds());
        let a = Subcomplex::generated_by([Simplex::vertex(0), Simplex::vertex(1)]);
        let f = PlMap::new(
            edge.clone(),
            target.clone(),
            a,
            BTreeMap::from([(0, Point::vertex(0, one())), (1, Point::vertex(target.vertex_count() - 1, one()))]),
        )
        .unwrap();
        let Extended::Done(ext) = extend_carried(&f, &c, 1000).unwrap() else { panic!() };
        assert!(ext.map.is_total());
        assert!(ext.map.agrees_with(&f, &f.defined));
        let graph_distance = shortest_path(&target.whole(), 0, target.vertex_count() - 1).unwrap().len() - 1;
        assert_eq!(ext.map.domain.simplices_of_dim(1).len(), graph_distance);
    }

    #[test]
    fn invalid_carrier_fails_with_subset() {
        let edge = gen::simplex_on(&["p", "q"]);
        let cover = closed_cover(&edge, &[("i", &[&["p"]]), ("j", &[&["p", "q"]])]);
        let target = Complex::from_maximal(&[gen::named(&["a"]), gen::named(&["b"])]).unwrap();
        let left = Subcomplex::generated_by([Simplex::vertex(0)]);
        let right = Subcomplex::generated_by([Simplex::vertex(1)]);
        let c = Carrier::new(cover, target, BTreeMap::from([(VertexName::atom("i"), left), (VertexName::atom("j"), right)])).unwrap();
        assert_eq!(
            c.validate(100).witness(),
            Some(&Witness::IndexSubset { indices: vec![VertexName::atom("i"), VertexName::atom("j")] })
        );
    }

    #[test]
    fn triangle_boundary_is_coned_in_a_star() {
        let tri = gen::simplex_on(&["p", "q", "r"]);
        let cover = closed_cover(&tri, &[("all", &[&["p", "q", "r"]])]);
        let d2 = gen::simplex(2);
        let sd = crate::complex::Subdivision::of(&d2);
        let star = crate::stars::barycentric_star(&sd, &Subcomplex::generated_by([Simplex::vertex(0)]));
        let c = Carrier::new(cover, sd.fine.clone(), BTreeMap::from([(VertexName::atom("all"), star.clone())])).unwrap();
        let boundary = Subcomplex::generated_by(tri.simplices_of_dim(1).iter().cloned());
        let outer: Vec<usize> = star.vertices().into_iter().filter(|w| sd.carrier(*w).len() > 1).collect();
        let images = BTreeMap::from([
            (0, Point::vertex(outer[0], one())),
            (1, Point::vertex(outer[1], one())),
            (2, Point::vertex(outer[2], one())),
        ]);
        let corners = Subcomplex::generated_by(tri.simplices_of_dim(0).iter().cloned());
        let f = PlMap::new(tri.clone(), sd.fine.clone(), corners, images).unwrap();
        let Extended::Done(ext) = extend_carried(&f, &c, 1000).unwrap() else { panic!() };
        assert!(ext.map.is_total());
        assert!(ext.map.agrees_with(&f, &f.defined));
        assert!(ext.refinement.pull_subcomplex(&boundary).simplices().all(|s| star.contains(&ext.map.image_simplex(s))));
        assert!(c.refine(&ext.refinement).is_carried(&ext.map).holds());
    }

    #[test]
    fn loop_around_a_disc_is_contracted() {
        let tri = gen::simplex_on(&["p", "q", "r"]);
        let cover = closed_cover(&tri, &[("all", &[&["p", "q", "r"]])]);
        let disc = gen::simplex(2).barycentric_subdivision().barycentric_subdivision();
        let c = Carrier::new(cover, disc.clone(), BTreeMap::from([(VertexName::atom("all"), disc.whole())])).unwrap();
        // three boundary vertices of the twice subdivided triangle: its original corners
        let corners: Vec<usize> = (0..disc.vertex_count())
            .filter(|v| matches!(disc.name(*v), VertexName::Set(s) if s.len() == 1 && matches!(&s[0], VertexName::Set(t) if t.len() == 1)))
            .collect();
        assert_eq!(corners.len(), 3);
        let images = corners.iter().enumerate().map(|(i, w)| (i, Point::vertex(*w, one()))).collect();
        let boundary = Subcomplex::generated_by(tri.simplices_of_dim(1).iter().cloned());
        let f = PlMap::new(tri.clone(), disc.clone(), Subcomplex::generated_by(tri.simplices_of_dim(0).iter().cloned()), images).unwrap();
        let Extended::Done(ext) = extend_carried(&f, &c, 10_000).unwrap() else { panic!() };
        assert!(ext.map.is_total());
        assert!(ext.refinement.pull_subcomplex(&boundary).len() > 3);
        let area: Rational = ext
            .refinement
            .fine
            .simplices_of_dim(2)
            .iter()
            .map(|s| signed_area(&ext.refinement, s))
            .map(|a| if a < int(0) { -a } else { a })
            .sum();
        assert_eq!(area, one());
        let tiny = extend_carried(&f, &c, 1).unwrap();
        assert!(tiny.verdict().is_inconclusive() || tiny.extension().is_some());
    }

    /// Area of a fine triangle relative to the coarse one (all fine triangles sit in one
    /// coarse triangle here). Sums of absolute values equal 1 iff the pieces do not overlap.
    fn signed_area(r: &Refinement, s: &Simplex) -> Rational {
        let p: Vec<[Rational; 2]> = s.vertices().iter().map(|v| [r.position(*v).coord(1), r.position(*v).coord(2)]).collect();
        let det = (&p[1][0] - &p[0][0]) * (&p[2][1] - &p[0][1]) - (&p[2][0] - &p[0][0]) * (&p[1][1] - &p[0][1]);
        assert!(det != int(0), "degenerate fine triangle");
        det
    }

    #[test]
    fn not_carried_is_rejected() {
        let edge = gen::simplex_on(&["p", "q"]);
        let cover = closed_cover(&edge, &[("all", &[&["p", "q"]])]);
        let target = Complex::from_maximal(&[gen::named(&["a"]), gen::named(&["b"])]).unwrap();
        let only_a = Subcomplex::generated_by([Simplex::vertex(0)]);
        let c = Carrier::new(cover, target.clone(), BTreeMap::from([(VertexName::atom("all"), only_a)])).unwrap();
        let f = PlMap::new(edge, target, Subcomplex::generated_by([Simplex::vertex(0)]), BTreeMap::from([(0, Point::vertex(1, one()))])).unwrap();
        assert!(matches!(extend_carried(&f, &c, 10), Err(CarrierError::NotCarried(Witness::Carried { .. }))));
    }

    #[test]
    fn close_maps_on_an_edge() {
        let edge = gen::simplex(1);
        let b = cover_b(&edge);
        let fine = b.ambient.clone();
        let mid = fine.index_of(&VertexName::set([VertexName::atom("a"), VertexName::atom("b")])).unwrap();
        let a0 = fine.index_of(&VertexName::set([VertexName::atom("a")])).unwrap();
        let f = PlMap::constant(&edge, &fine, &Point::vertex(a0, one()));
        let g = PlMap::constant(&edge, &fine, &Point::vertex(mid, one()));
        let h = close_maps_homotopy(&f, &g, &b, &Budgets::default()).unwrap();
        assert!(h.verdict.holds());
        assert_eq!(h.kind, Some(HomotopyKind::Linear));
        assert_eq!(prism(&edge).f_vector(), vec![4, 5, 2]);
    }
}
