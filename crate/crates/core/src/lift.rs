//! Lifting maps along quasi-simplicial bonds and through towers.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::carrier::{extend_carried, Carrier, CarrierError, Extended, Extension};
use crate::complex::{Complex, Subcomplex, Subdivision};
use crate::connectivity::Budgets;
use crate::maps::QsMap;
use crate::name::VertexName;
use crate::pl::{PlError, PlMap};
use crate::point::Point;
use crate::rational::{self, int, one, zero, Rational};
use crate::refine::Refinement;
use crate::stars::{are_close, cover_b_of, pullback_cover, Closeness, CoverElement, CoverKind, IndexedCover};
use crate::tower::{intersection_verdicts, summability, TailEntry, Tower};
use crate::verdict::{self, Verdict, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("{0}")]
    Mismatch(String),
    #[error("domain of dimension {domain} exceeds n = {n}")]
    Dimension { domain: isize, n: usize },
    #[error("the partial lift does not project onto the map on its domain")]
    Incompatible,
    #[error("map into {0} does not refine to the barycentric subdivision")]
    NoRefinement(String),
    #[error("thread is not compatible at level {0}")]
    Thread(usize),
    #[error(transparent)]
    Carrier(#[from] CarrierError),
    #[error(transparent)]
    Pl(#[from] PlError),
}

/// Points `x_0, …, x_m` with `x_i ∈ K_i` and `p_i(x_{i+1}) = x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadApprox {
    pub points: Vec<Point>,
}

fn project(p: &QsMap, x: &Point) -> Point {
    p.push(x).flatten(p.subdivision())
}

impl ThreadApprox {
    /// The thread through `x ∈ K_m`.
    pub fn from_top(t: &Tower, m: usize, x: &Point) -> ThreadApprox {
        let mut points = vec![x.clone()];
        for j in (0..m).rev() {
            let next = project(&t.bonds[j], points.last().expect("non-empty"));
            points.push(next);
        }
        points.reverse();
        ThreadApprox { points }
    }

    pub fn depth(&self) -> usize {
        self.points.len()
    }

    /// First level where compatibility breaks, if any.
    pub fn check(&self, t: &Tower) -> Result<(), LiftError> {
        if self.points.len() > t.depth() {
            return Err(LiftError::Thread(t.depth()));
        }
        for (i, x) in self.points.iter().enumerate() {
            if x.validate(&t.levels[i]).is_err() {
                return Err(LiftError::Thread(i));
            }
        }
        for j in 0..self.points.len().saturating_sub(1) {
            if project(&t.bonds[j], &self.points[j + 1]).coords() != self.points[j].coords() {
                return Err(LiftError::Thread(j));
            }
        }
        Ok(())
    }
}

/// `f⁻¹(F)` for a closed cover `F` of the target of `f`: the domain simplices whose image
/// lies in the element.
pub fn pullback_pl(f: &PlMap, cover: &IndexedCover) -> Result<IndexedCover, LiftError> {
    if f.target != cover.ambient || cover.kind != CoverKind::Closed {
        return Err(LiftError::Mismatch("expected a closed cover of the target".into()));
    }
    let elements = cover
        .elements
        .iter()
        .map(|(i, e)| {
            let CoverElement::Closed(sub) = e else { unreachable!("closed cover") };
            let gens = f.domain.simplices().filter(|s| f.defined.contains(s) && sub.contains(&f.image_simplex(s))).cloned();
            (i.clone(), CoverElement::Closed(Subcomplex::generated_by(gens)))
        })
        .collect();
    Ok(IndexedCover { ambient: f.domain.clone(), geometry: None, kind: CoverKind::Closed, elements })
}

/// Re-expresses `f : X → K` as a map into `βK`, subdividing `X` up to `depth` times until
/// every simplex lands in one simplex of `βK`.
pub fn into_subdivision(f: &PlMap, sd: &Subdivision, depth: usize) -> Result<(PlMap, Refinement), LiftError> {
    if f.target == sd.fine {
        return Ok((f.clone(), Refinement::identity(&f.domain)));
    }
    if f.target != sd.parent || !f.is_total() {
        return Err(LiftError::Mismatch("expected a total map into the parent complex".into()));
    }
    let mut current = f.clone();
    let mut r = Refinement::identity(&f.domain);
    for round in 0..=depth {
        let images: BTreeMap<usize, Point> = current.images().iter().map(|(v, x)| (*v, x.refine(sd))).collect();
        if let Ok(g) = PlMap::total(current.domain.clone(), sd.fine.clone(), images) {
            return Ok((g, r));
        }
        if round < depth {
            let (next, sdx) = current.subdivide_domain();
            r = r.then(&Refinement::from_subdivision(&sdx));
            current = next;
        }
    }
    Err(LiftError::NoRefinement(format!("{} simplices", f.target.simplex_count())))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleLift {
    pub verdict: Verdict,
    /// Verdicts on the intersections of `p⁻¹(F)`.
    pub pullback: Verdict,
    pub extension: Option<Extension>,
    /// `p ∘ g` against `f` on the refined domain.
    pub closeness: Option<Closeness>,
}

/// Lifts `f : X → βK` along `p : K' → βK` to `g : X' → βK'` extending `g0` (defined on
/// `A ⊆ X`), with `p ∘ g` close to `f` with respect to `B_K`.
pub fn single_lift(p: &QsMap, f: &PlMap, g0: &PlMap, n: usize, budgets: &Budgets) -> Result<SingleLift, LiftError> {
    let sd_top = Subdivision::of(p.source());
    if f.target != p.subdivision().fine || !f.is_total() {
        return Err(LiftError::Mismatch("map must be total into the subdivided base of the bond".into()));
    }
    if g0.domain != f.domain || g0.target != sd_top.fine {
        return Err(LiftError::Mismatch("partial lift must share the domain and land in the subdivided source".into()));
    }
    if f.domain.dim() > n as isize {
        return Err(LiftError::Dimension { domain: f.domain.dim(), n });
    }
    let projected = g0.flatten_target(&sd_top).then_qs(p)?;
    if !projected.agrees_with(f, &g0.defined) {
        return Err(LiftError::Incompatible);
    }
    let cover = cover_b_of(p.subdivision());
    let pulled = pullback_cover(p, &cover).map_err(CarrierError::from)?;
    let (_, pullback) = intersection_verdicts(&pulled, n, budgets);
    let pullback = p.is_surjective().and(pullback);
    if !pullback.holds() {
        let detail = match &pullback {
            Verdict::Fails { witness } => format!("{witness:?}"),
            Verdict::Inconclusive { reason } => reason.clone(),
            Verdict::Holds => unreachable!(),
        };
        return Ok(SingleLift {
            verdict: Verdict::inconclusive(format!("condition (D) not established for the pull-back cover: {detail}")),
            pullback,
            extension: None,
            closeness: None,
        });
    }
    let source = pullback_pl(f, &cover)?;
    let assignment = pulled
        .elements
        .iter()
        .map(|(i, e)| {
            let CoverElement::Closed(sub) = e else { unreachable!("closed cover") };
            (i.clone(), sd_top.subdivide_subcomplex(sub))
        })
        .collect();
    let carrier = Carrier::new(source, sd_top.fine.clone(), assignment)?;
    let ext = match extend_carried(g0, &carrier, budgets.filler_steps)? {
        Extended::Done(e) => e,
        stuck @ Extended::Stuck { .. } => {
            return Ok(SingleLift { verdict: stuck.verdict(), pullback, extension: None, closeness: None })
        }
    };
    let pg = ext.map.flatten_target(&sd_top).then_qs(p)?;
    let fine_f = ext.refinement.pull_map(f);
    let closeness = are_close(&pg, &fine_f, &cover).map_err(CarrierError::from)?;
    Ok(SingleLift { verdict: closeness.verdict.clone(), pullback, extension: Some(ext), closeness: Some(closeness) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub level: usize,
    /// `f_level : X_level → βK_level`.
    pub map: PlMap,
    /// `X_level` as a refinement of the previous stage's domain (of `X` at level 0).
    pub step: Refinement,
    /// `X_level` as a refinement of `X`.
    pub to_domain: Refinement,
    /// `p ∘ f_level` against `f_{level−1}`; absent at level 0.
    pub closeness: Option<Closeness>,
    /// `f_level = g0_level` on the refined `A`.
    pub agrees: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CauchyEntry {
    /// Start level `k` of the projections.
    pub start: usize,
    pub level: usize,
    /// `d_sup(π^m_k ∘ f_m, π^{m+1}_k ∘ f_{m+1})` at scale `κ_k`.
    #[serde(with = "rational")]
    pub increment: Rational,
    /// `2·Lip(π^m_k)·mesh(F_m)`.
    #[serde(with = "rational")]
    pub bound: Rational,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CauchyReport {
    #[serde(with = "rational::vec")]
    pub meshes: Vec<Rational>,
    pub entries: Vec<CauchyEntry>,
    /// For start level 0: the bounds summed from each level on, plus the tail beyond.
    #[serde(with = "rational::vec")]
    pub remaining: Vec<Rational>,
    pub tails: Vec<TailEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageSummary {
    pub level: usize,
    pub domain: Vec<usize>,
    pub closeness: Option<Verdict>,
    /// Per maximal domain simplex the cover index witnessing closeness.
    pub certificate: Vec<(Vec<VertexName>, VertexName)>,
    pub agrees: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerLift {
    pub stages: Vec<Stage>,
    pub cauchy: CauchyReport,
    pub verdict: Verdict,
}

impl TowerLift {
    pub fn summary(&self) -> Vec<StageSummary> {
        self.stages
            .iter()
            .map(|s| StageSummary {
                level: s.level,
                domain: s.map.domain.f_vector(),
                closeness: s.closeness.as_ref().map(|c| c.verdict.clone()),
                certificate: s.closeness.as_ref().map(|c| c.certificate.clone()).unwrap_or_default(),
                agrees: s.agrees.clone(),
            })
            .collect()
    }
}

/// `g0` at level `i` on `A ⊆ X` as a map into `βK_i`.
fn thread_map(t: &Tower, x: &Complex, a: &Subcomplex, threads: &BTreeMap<usize, ThreadApprox>, i: usize) -> Result<PlMap, LiftError> {
    let sd = t.subdivision_of(i);
    let images = a.vertices().into_iter().map(|v| (v, threads[&v].points[i].with_scale(one()).refine(&sd))).collect();
    Ok(PlMap::new(x.clone(), sd.fine.clone(), a.clone(), images)?)
}

fn flat(t: &Tower, i: usize, f: &PlMap) -> PlMap {
    f.flatten_target(&t.subdivision_of(i))
}

/// Lifts `f : X → K_0` (or `βK_0`) through the tower, keeping `f_i = g0_i` on `A` where
/// `g0` assigns a thread to every vertex of `A`.
pub fn tower_lift(
    t: &Tower,
    f: &PlMap,
    a: &Subcomplex,
    threads: &BTreeMap<usize, ThreadApprox>,
    n: usize,
    budgets: &Budgets,
) -> Result<TowerLift, LiftError> {
    if &f.target != &t.levels[0] && f.target != t.subdivision_of(0).fine {
        return Err(LiftError::Mismatch("map must land in the first level".into()));
    }
    if !a.is_subcomplex_of(&f.domain) {
        return Err(LiftError::Mismatch("A is not a subcomplex of the domain".into()));
    }
    for v in a.vertices() {
        let thread = threads.get(&v).ok_or_else(|| LiftError::Mismatch(format!("no thread for vertex {}", f.domain.name(v))))?;
        if thread.depth() < t.depth() {
            return Err(LiftError::Thread(thread.depth()));
        }
        thread.check(t)?;
    }
    let (f0, r0) = into_subdivision(f, &t.subdivision_of(0), 2)?;
    let g00 = r0.pull_map(&thread_map(t, &f.domain, a, threads, 0)?);
    if !f0.agrees_with(&g00, &g00.defined) {
        return Err(LiftError::Incompatible);
    }
    let mut stages = vec![Stage {
        level: 0,
        map: f0,
        step: r0.clone(),
        to_domain: r0,
        closeness: None,
        agrees: Verdict::Holds,
    }];
    let mut verdict = Verdict::Holds;
    for i in 0..t.depth() - 1 {
        let prev = stages.last().expect("non-empty");
        let g0 = prev.to_domain.pull_map(&thread_map(t, &f.domain, a, threads, i + 1)?);
        let lift = single_lift(&t.bonds[i], &prev.map, &g0, n, budgets)?;
        let Some(ext) = lift.extension else {
            verdict = lift.verdict.map_witness(|w| Witness::Level { level: i, cause: Box::new(w) });
            break;
        };
        let agrees = {
            let g = ext.refinement.pull_map(&g0);
            Verdict::from_bool(ext.map.agrees_with(&g, &g.defined), || Witness::Note { text: format!("lift leaves g0 at level {}", i + 1) })
        };
        let closeness = lift.closeness.expect("present with an extension");
        verdict = verdict
            .and(closeness.verdict.clone().map_witness(|w| Witness::Level { level: i, cause: Box::new(w) }))
            .and(agrees.clone());
        let to_domain = prev.to_domain.then(&ext.refinement);
        stages.push(Stage {
            level: i + 1,
            map: ext.map,
            step: ext.refinement,
            to_domain,
            closeness: Some(closeness),
            agrees,
        });
    }
    let cauchy = cauchy_report(t, &stages);
    verdict = verdict.and(verdict::all(cauchy.entries.iter().map(|e| {
        Verdict::from_bool(e.within, || Witness::Note { text: format!("increment above bound at level {} from {}", e.level, e.start) })
    })));
    Ok(TowerLift { stages, cauchy, verdict })
}

fn cauchy_report(t: &Tower, stages: &[Stage]) -> CauchyReport {
    let meshes: Vec<Rational> = (0..t.depth()).map(|m| cover_b_of(&t.subdivision_of(m)).mesh(&t.scales[m]).value).collect();
    let mut entries = Vec::new();
    for m in 0..stages.len().saturating_sub(1) {
        let here = flat(t, m, &stages[m].map);
        let next = flat(t, m + 1, &stages[m + 1].map);
        for k in 0..=m {
            let a = stages[m + 1].step.pull_map(&here.then_affine(&t.projection(m, k)).expect("projection"));
            let b = next.then_affine(&t.projection(m + 1, k)).expect("projection");
            let increment = a.sup_distance(&b, &t.scales[k]);
            let bound = int(2) * t.projection_lipschitz(m, k) * &meshes[m];
            let within = increment <= bound;
            entries.push(CauchyEntry { start: k, level: m, increment, bound, within });
        }
    }
    let tails = summability(t).tails;
    let beyond = tails.first().map(|e| e.beyond.clone()).unwrap_or_else(zero);
    let mut remaining = Vec::new();
    let mut acc = beyond;
    for m in (0..t.depth()).rev() {
        acc += int(2) * t.projection_lipschitz(m, 0) * &meshes[m];
        remaining.push(acc.clone());
    }
    remaining.reverse();
    CauchyReport { meshes, entries, remaining, tails }
}
