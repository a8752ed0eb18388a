//! Towers of quasi-simplicial maps: regularity reports, certification of the limit
//! conditions at finite depth, restrictions and pulled-back star covers.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{Complex, Simplex, Subcomplex, Subdivision};
use crate::connectivity::{self, collapse::collapse, homology, Budgets};
use crate::maps::{AffineMap, MapError, QsMap};
use crate::name::VertexName;
use crate::rational::{self, int, one, pow2_inv, zero, Rational};
use crate::stars::{cover_b_of, cover_o, pullback_affine, CoverKind, IndexedCover};
use crate::verdict::{self, Verdict, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("a tower needs at least one level")]
    Empty,
    #[error("{levels} levels need {expected} bonds, got {got}", expected = levels - 1)]
    BondCount { levels: usize, got: usize },
    #[error("bond {0} does not map level {} onto level {0}", .0 + 1)]
    Chain(usize),
    #[error("expected {0} positive scales")]
    Scales(usize),
    #[error("level index {0} out of range")]
    Level(usize),
    #[error("restriction is not a subcomplex of the level")]
    NotSubcomplex,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Levels `K_0 ← K_1 ← …` (0-based), bonds `p_i : K_{i+1} → βK_i`, scales and covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub levels: Vec<Complex>,
    pub bonds: Vec<QsMap>,
    pub scales: Vec<Rational>,
    /// Per level: closed means `B_{K_i}`, open means `O_{K_i}`.
    pub covers: Vec<CoverKind>,
}

/// `2^{-(i+1)}` for 0-based level `i`.
pub fn default_scales(levels: usize) -> Vec<Rational> {
    (0..levels).map(|i| pow2_inv(i as u32 + 1)).collect()
}

impl Tower {
    pub fn new(levels: Vec<Complex>, bonds: Vec<QsMap>, scales: Option<Vec<Rational>>) -> Result<Tower, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::Empty);
        }
        if bonds.len() + 1 != levels.len() {
            return Err(TowerError::BondCount { levels: levels.len(), got: bonds.len() });
        }
        for (i, p) in bonds.iter().enumerate() {
            if p.source() != &levels[i + 1] || p.base() != &levels[i] {
                return Err(TowerError::Chain(i));
            }
        }
        let scales = scales.unwrap_or_else(|| default_scales(levels.len()));
        if scales.len() != levels.len() || scales.iter().any(|s| *s <= zero()) {
            return Err(TowerError::Scales(levels.len()));
        }
        let covers = vec![CoverKind::Closed; levels.len()];
        Ok(Tower { levels, bonds, scales, covers })
    }

    /// `K ← βK ← β²K ← …` with identity bonds.
    pub fn subdivision(base: &Complex, depth: usize) -> Tower {
        let mut levels = vec![base.clone()];
        let mut bonds = Vec::new();
        for _ in 1..depth.max(1) {
            let p = QsMap::subdivision_identity(levels.last().expect("non-empty"));
            levels.push(p.source().clone());
            bonds.push(p);
        }
        Tower::new(levels, bonds, None).expect("subdivision towers are well formed")
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn with_covers(mut self, kind: CoverKind) -> Tower {
        self.covers = vec![kind; self.levels.len()];
        self
    }

    pub fn subdivision_of(&self, i: usize) -> Subdivision {
        match self.bonds.get(i) {
            Some(p) => p.subdivision().clone(),
            None => Subdivision::of(&self.levels[i]),
        }
    }

    /// The cover `F_i`: `B_{K_i}` on `βK_i` or `O_{K_i}` on `K_i`.
    pub fn cover(&self, i: usize) -> IndexedCover {
        match self.covers[i] {
            CoverKind::Closed => cover_b_of(&self.subdivision_of(i)),
            CoverKind::Open => cover_o(&self.levels[i]),
        }
    }

    /// The short projection `π^m_k : K_m → K_k` in `K_k`-coordinates.
    pub fn projection(&self, m: usize, k: usize) -> AffineMap {
        assert!(k <= m && m < self.depth());
        let mut f = AffineMap::identity(&self.levels[m]);
        for j in (k..m).rev() {
            f = f.compose(&self.bonds[j].affine()).expect("bonds chain");
        }
        f
    }

    /// `π^m_k` landing in `βK_k` (requires `k < m`), or the identity when `k = m`.
    pub fn projection_fine(&self, m: usize, k: usize) -> AffineMap {
        if k == m {
            return AffineMap::identity(&self.levels[m]);
        }
        let mut f = AffineMap::identity(&self.levels[m]);
        for j in (k + 1..m).rev() {
            f = f.compose(&self.bonds[j].affine()).expect("bonds chain");
        }
        f.compose(&self.bonds[k].affine_fine()).expect("bonds chain")
    }

    /// Per-piece Lipschitz constant of `π^m_k` for scales `κ_m` and `κ_k`.
    pub fn projection_lipschitz(&self, m: usize, k: usize) -> Rational {
        self.projection(m, k).lipschitz_constant(&self.scales[m], &self.scales[k])
    }

    pub fn max_dimension(&self) -> usize {
        self.levels.iter().map(|k| k.dim().max(0) as usize).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityEntry {
    pub delta: Vec<VertexName>,
    pub preimage_simplices: usize,
    pub connected: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi1: Option<Verdict>,
    /// `H_2 … H_{n−1}` of the preimage.
    pub higher: Vec<connectivity::HomologyGroup>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub n: usize,
    pub entries: Vec<RegularityEntry>,
    /// Simplices of `βL` with empty preimage.
    pub non_surjective: Vec<Vec<VertexName>>,
    pub verdict: Verdict,
}

/// Checks every preimage of a simplex of `βL` for `k`-connectedness, `k < n`.
pub fn n_regular_report(p: &QsMap, n: usize, budgets: &Budgets) -> RegularityReport {
    let fine = &p.subdivision().fine;
    let mut entries = Vec::new();
    let mut non_surjective = Vec::new();
    for delta in fine.simplices() {
        let names = fine.simplex_names(delta);
        let pre = p.preimage(delta);
        let k = pre.to_complex(p.source());
        let connected = connectivity::is_connected(&k);
        let mut pi1 = None;
        let mut higher = Vec::new();
        if !k.is_empty() && n >= 2 && connected.holds() {
            pi1 = Some(if collapse(&k.whole()).to_point() {
                Verdict::Holds
            } else {
                connectivity::pi1_verdict(&k, None, budgets.pi1_steps)
            });
            higher = (2..n).map(|d| homology(&k, d, false)).collect();
        }
        let verdict = connectivity::k_connected_verdict(&k, n, budgets)
            .map_witness(|cause| Witness::Preimage { delta: names.clone(), cause: Box::new(cause) });
        if pre.is_empty() {
            non_surjective.push(names.clone());
        }
        entries.push(RegularityEntry { delta: names, preimage_simplices: pre.len(), connected, pi1, higher, verdict });
    }
    let verdict = verdict::all_collecting(entries.iter().map(|e| e.verdict.clone()));
    RegularityReport { n, entries, non_surjective, verdict }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionVerdict {
    pub indices: Vec<VertexName>,
    pub verdict: Verdict,
}

/// `k_connected_verdict(·, n)` on every non-empty intersection of a cover.
pub fn intersection_verdicts(cover: &IndexedCover, n: usize, budgets: &Budgets) -> (Vec<IntersectionVerdict>, Verdict) {
    let sets = match cover.nerve_sets(budgets.nerve_subsets) {
        Ok(s) => s,
        Err(e) => {
            let v = Verdict::inconclusive(format!("nerve subset budget exhausted after {} subsets", e.checked));
            return (Vec::new(), v);
        }
    };
    let mut out = Vec::new();
    for j in sets {
        let refs: Vec<&VertexName> = j.iter().collect();
        let model = cover.intersection_model(&refs);
        let verdict = connectivity::k_connected_verdict(&model, n, budgets)
            .map_witness(|cause| Witness::Preimage { delta: j.clone(), cause: Box::new(cause) });
        out.push(IntersectionVerdict { indices: j, verdict });
    }
    let v = verdict::all(out.iter().map(|e| e.verdict.clone()));
    (out, v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub dimension: isize,
    #[serde(with = "rational")]
    pub scale: Rational,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BondReport {
    /// The bond `K_{bond+1} → βK_bond`.
    pub bond: usize,
    pub quasi_simplicial: Verdict,
    pub surjective: Verdict,
    pub regularity: RegularityReport,
    #[serde(with = "rational")]
    pub lipschitz: Rational,
    /// `D/(D+1) · κ_i / κ_{i+1}`, the largest per-piece constant of a quasi-simplicial map.
    #[serde(with = "rational")]
    pub lipschitz_bound: Rational,
    pub pullback: Vec<IntersectionVerdict>,
    pub pullback_verdict: Verdict,
    /// Induced maps on `H_k`, `k < n`.
    pub homology: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailEntry {
    pub start: usize,
    /// `Σ_{k ≤ m < M} 2·Lip(π^m_k)·mesh(F_m)` over the supplied levels.
    #[serde(with = "rational")]
    pub finite: Rational,
    /// Geometric bound for levels beyond the truncation.
    #[serde(with = "rational")]
    pub beyond: Rational,
    #[serde(with = "rational")]
    pub total: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summability {
    pub dimension: usize,
    /// `D / (D + 1)`.
    #[serde(with = "rational")]
    pub ratio: Rational,
    #[serde(with = "rational::vec")]
    pub meshes: Vec<Rational>,
    pub tails: Vec<TailEntry>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerCertificate {
    pub n: usize,
    pub depth: usize,
    pub levels: Vec<LevelReport>,
    pub bonds: Vec<BondReport>,
    pub completeness: Verdict,
    pub lipschitz: Verdict,
    pub cover_kind: Verdict,
    pub pullback: Verdict,
    pub summability: Summability,
    pub homology: Verdict,
    pub conclusion: Verdict,
    pub statement: String,
}

fn rho(d: usize) -> Rational {
    Rational::new(d.into(), (d + 1).into())
}

/// Mesh bound factor: `B` covers have diameter at most `2κ·D/(D+1)`, open stars `2κ`.
fn mesh_factor(kind: CoverKind, d: usize) -> Rational {
    match kind {
        CoverKind::Closed => rho(d),
        CoverKind::Open => one(),
    }
}

pub fn summability(t: &Tower) -> Summability {
    let d = t.max_dimension();
    let r = rho(d);
    let last = t.depth() - 1;
    let meshes: Vec<Rational> = (0..t.depth()).map(|m| t.cover(m).mesh(&t.scales[m]).value).collect();
    let mut problems = Vec::new();
    for (m, mesh) in meshes.iter().enumerate() {
        let cap = int(2) * &t.scales[m] * mesh_factor(t.covers[m], d);
        if *mesh > cap {
            problems.push(format!("mesh at level {m} exceeds 2κ·{}", rational::format(&mesh_factor(t.covers[m], d))));
        }
    }
    let mu = t.covers.iter().map(|k| mesh_factor(*k, d)).max().unwrap_or_else(one);
    let tails = (0..t.depth())
        .map(|k| {
            let finite: Rational = (k..t.depth()).map(|m| int(2) * t.projection_lipschitz(m, k) * &meshes[m]).sum();
            let beyond = if r < one() {
                int(4) * t.projection_lipschitz(last, k) * &t.scales[last] * &mu * &r / (one() - &r)
            } else {
                zero()
            };
            let total = &finite + &beyond;
            TailEntry { start: k, finite, beyond, total }
        })
        .collect();
    let verdict = if r >= one() {
        Verdict::inconclusive("no geometric tail bound")
    } else if let Some(p) = problems.first() {
        Verdict::inconclusive(p.clone())
    } else {
        Verdict::Holds
    };
    Summability { dimension: d, ratio: r, meshes, tails, verdict }
}

pub fn verify_tower(t: &Tower, n: usize, budgets: &Budgets) -> TowerCertificate {
    let levels: Vec<LevelReport> = t
        .levels
        .iter()
        .enumerate()
        .map(|(i, k)| LevelReport {
            level: i,
            dimension: k.dim(),
            scale: t.scales[i].clone(),
            verdict: Verdict::from_bool(!k.is_empty(), || Witness::Level { level: i, cause: Box::new(Witness::Empty) }),
        })
        .collect();
    let d = t.max_dimension();
    let at = |i: usize, v: Verdict| v.map_witness(|w| Witness::Level { level: i, cause: Box::new(w) });
    let mut bonds = Vec::new();
    for (i, p) in t.bonds.iter().enumerate() {
        let quasi_simplicial = p.vertex_map().check_simplicial();
        let surjective = p.is_surjective();
        let regularity = n_regular_report(p, n, budgets);
        let lipschitz = p.lipschitz_constant(&t.scales[i + 1], &t.scales[i]);
        let lipschitz_bound = rho(t.levels[i].dim().max(0) as usize) * &t.scales[i] / &t.scales[i + 1];
        let pulled = pullback_affine(
            &match t.covers[i] {
                CoverKind::Closed => p.affine_fine(),
                CoverKind::Open => p.affine(),
            },
            &t.cover(i),
        )
        .expect("bond lands in the cover's ambient complex");
        let (pullback, pullback_verdict) = intersection_verdicts(&pulled, n, budgets);
        let homology = (0..n).map(|k| p.induced_homology(k).1).collect();
        bonds.push(BondReport {
            bond: i,
            quasi_simplicial,
            surjective,
            regularity,
            lipschitz,
            lipschitz_bound,
            pullback,
            pullback_verdict,
            homology,
        });
    }
    let completeness = Verdict::Holds;
    let lipschitz = verdict::all(bonds.iter().map(|b| {
        at(
            b.bond,
            Verdict::from_bool(b.lipschitz <= b.lipschitz_bound, || Witness::Note {
                text: format!("Lipschitz constant {} above {}", rational::format(&b.lipschitz), rational::format(&b.lipschitz_bound)),
            }),
        )
    }));
    let cover_kind = Verdict::from_bool(t.levels.iter().all(|k| k.dim() < isize::MAX), || Witness::Empty);
    let pullback = verdict::all(bonds.iter().map(|b| at(b.bond, b.pullback_verdict.clone())));
    let summability = summability(t);
    let homology = verdict::all(bonds.iter().map(|b| at(b.bond, verdict::all(b.homology.iter().cloned()))));
    let structural = verdict::all(
        levels.iter().map(|l| l.verdict.clone()).chain(bonds.iter().flat_map(|b| {
            [
                at(b.bond, b.quasi_simplicial.clone()),
                at(b.bond, b.surjective.clone()),
                at(b.bond, b.regularity.verdict.clone()),
            ]
        })),
    );
    let conclusion = verdict::all([
        structural,
        completeness.clone(),
        lipschitz.clone(),
        cover_kind.clone(),
        pullback.clone(),
        summability.verdict.clone(),
        homology.clone(),
    ]);
    let statement = match &conclusion {
        Verdict::Holds => format!(
            "levels 0..{} of dimension at most {d}: every bond is surjective and {n}-regular, every pull-back cover \
             intersection is {}-connected, induced homology is an isomorphism below degree {n}, and the Cauchy tail \
             is bounded; evidence that the limit is locally k-connected for k < {n} (this truncation only)",
            t.depth() - 1,
            n.saturating_sub(1)
        ),
        Verdict::Fails { .. } => "refuted at the reported level".to_string(),
        Verdict::Inconclusive { .. } => "undecided within the given budgets".to_string(),
    };
    TowerCertificate {
        n,
        depth: t.depth(),
        levels,
        bonds,
        completeness,
        lipschitz,
        cover_kind,
        pullback,
        summability,
        homology,
        conclusion,
        statement,
    }
}

/// Tower over a subcomplex `A ⊆ K_m`: `K'_m = A`, `K'_{j+1} = p_j⁻¹(βK'_j)`.
pub fn restrict_tower(t: &Tower, m: usize, a: &Subcomplex) -> Result<Tower, TowerError> {
    if m >= t.depth() {
        return Err(TowerError::Level(m));
    }
    if !a.is_subcomplex_of(&t.levels[m]) {
        return Err(TowerError::NotSubcomplex);
    }
    let mut levels = vec![a.to_complex(&t.levels[m])];
    let mut bonds = Vec::new();
    let mut current = a.clone();
    for j in m..t.depth() - 1 {
        let p = &t.bonds[j];
        let fine = p.subdivision().subdivide_subcomplex(&current);
        let pre = Subcomplex::generated_by(
            p.source().simplices().filter(|s| fine.contains(&p.vertex_map().image_simplex(s))).cloned(),
        );
        let source = pre.to_complex(p.source());
        let table = source
            .names()
            .iter()
            .map(|nm| {
                let v = p.source().index_of(nm).expect("restricted vertex");
                (nm.clone(), p.subdivision().fine.name(p.vertex_map().image(v)).clone())
            })
            .collect();
        let q = QsMap::from_names(source.clone(), levels.last().expect("non-empty"), &table)?;
        levels.push(source);
        bonds.push(q);
        current = pre;
    }
    let mut out = Tower::new(levels, bonds, Some(t.scales[m..].to_vec()))?;
    out.covers = t.covers[m..].to_vec();
    Ok(out)
}

/// `(π^m_i)⁻¹` of the star cover of `K_i` (indices `V(K_i)`) on `K_m`, with a verdict for
/// every non-empty intersection. Closed elements pulled back along a composite of several
/// bonds are the largest subcomplexes inside the preimages.
pub fn pullback_star_cover(
    t: &Tower,
    i: usize,
    m: usize,
    kind: CoverKind,
    n: usize,
    budgets: &Budgets,
) -> Result<(IndexedCover, Vec<IntersectionVerdict>, Verdict), TowerError> {
    if i > m || m >= t.depth() {
        return Err(TowerError::Level(m));
    }
    let cover = match kind {
        CoverKind::Closed => cover_b_of(&t.subdivision_of(i)),
        CoverKind::Open => cover_o(&t.levels[i]),
    };
    let pulled = if i == m {
        cover
    } else {
        let f = match kind {
            CoverKind::Closed => t.projection_fine(m, i),
            CoverKind::Open => t.projection(m, i),
        };
        pullback_affine(&f, &cover).expect("projection lands in the cover's ambient complex")
    };
    let (entries, verdict) = intersection_verdicts(&pulled, n, budgets);
    let verdict = pulled.is_cover().and(verdict);
    Ok((pulled, entries, verdict))
}

/// Vertices of `K_m` whose projection lands in `A ⊆ K_i` (used for cross-checks).
pub fn projected_into(t: &Tower, m: usize, i: usize, a: &Subcomplex) -> BTreeSet<usize> {
    let f = t.projection(m, i);
    (0..t.levels[m].vertex_count()).filter(|v| a.contains(&Simplex::new(f.image_of_vertex(*v).keys().copied().collect()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn cylinder_tower() -> Tower {
        let (p, base) = gen::cylinder();
        Tower::new(vec![base, p.source().clone()], vec![p], None).unwrap()
    }

    fn w() -> VertexName {
        VertexName::set(gen::named(&["u", "v"]))
    }

    #[test]
    fn subdivision_identity_is_regular() {
        let p = QsMap::subdivision_identity(&gen::simplex(1));
        let r = n_regular_report(&p, 4, &Budgets::default());
        assert!(r.verdict.holds());
        assert!(r.entries.iter().all(|e| e.verdict.holds()));
        assert_eq!(r.entries.len(), 5);
    }

    #[test]
    fn cylinder_regularity() {
        let (p, _) = gen::cylinder();
        assert!(n_regular_report(&p, 1, &Budgets::default()).verdict.holds());
        let r = n_regular_report(&p, 2, &Budgets::default());
        let middle = r.entries.iter().find(|e| e.delta == vec![w()]).unwrap();
        assert_eq!(middle.preimage_simplices, 6);
        assert_eq!(
            middle.verdict.witness(),
            Some(&Witness::Preimage {
                delta: vec![w()],
                cause: Box::new(Witness::Homology { degree: 1, betti: 1, torsion: vec![] })
            })
        );
        assert!(r.verdict.is_fails());
    }

    #[test]
    fn constant_map_warns() {
        let d2 = gen::simplex(2);
        let base = gen::simplex_on(&["u", "v"]);
        let table = d2.names().iter().map(|n| (n.clone(), VertexName::set(gen::named(&["u"])))).collect();
        let p = QsMap::from_names(d2, &base, &table).unwrap();
        let r = n_regular_report(&p, 1, &Budgets::default());
        assert_eq!(r.non_surjective.len(), 3);
        assert!(r.verdict.is_fails());
    }

    #[test]
    fn subdivision_tower_certifies() {
        let t = Tower::subdivision(&gen::simplex(2), 3);
        let c = verify_tower(&t, 2, &Budgets::default());
        assert_eq!(c.conclusion, Verdict::Holds, "{:?}", c.conclusion);
        assert!(c.bonds.iter().all(|b| b.regularity.entries.iter().all(|e| e.preimage_simplices > 0)));
        let tails: Vec<&Rational> = c.summability.tails.iter().map(|e| &e.total).collect();
        assert!(tails.windows(2).all(|w| w[1] <= w[0]));
        assert!(c.summability.meshes.windows(2).all(|w| w[1] == &w[0] / int(2)));
    }

    #[test]
    fn cylinder_tower_fails_at_two() {
        let t = cylinder_tower();
        assert!(verify_tower(&t, 1, &Budgets::default()).conclusion.holds());
        let c = verify_tower(&t, 2, &Budgets::default());
        assert!(c.conclusion.is_fails());
        assert!(c.pullback.is_fails());
        assert_eq!(verify_tower(&Tower::subdivision(&gen::simplex(2), 1), 3, &Budgets::default()).conclusion, Verdict::Holds);
    }

    #[test]
    fn restrictions() {
        let t = Tower::subdivision(&gen::simplex(2), 3);
        assert_eq!(restrict_tower(&t, 1, &t.levels[1].whole()).unwrap().levels, t.levels[1..].to_vec());
        let edge = t.levels[0].simplex(&gen::named(&["a", "b"])).unwrap();
        let r = restrict_tower(&t, 0, &Subcomplex::generated_by([edge])).unwrap();
        let sub = Tower::subdivision(&gen::simplex_on(&["a", "b"]), 3);
        assert_eq!(r.levels, sub.levels);
        let c = cylinder_tower();
        let u = Subcomplex::generated_by([Simplex::vertex(0)]);
        let r = restrict_tower(&c, 0, &u).unwrap();
        assert_eq!(r.levels[1].f_vector(), vec![3, 3]);
    }

    #[test]
    fn pulled_back_star_covers() {
        let t = Tower::subdivision(&gen::simplex(2), 3);
        let (cover, entries, v) = pullback_star_cover(&t, 0, 2, CoverKind::Closed, 2, &Budgets::default()).unwrap();
        assert_eq!(cover.elements.len(), 3);
        assert!(v.holds());
        assert_eq!(entries.len(), 7);
        let (own, _, _) = pullback_star_cover(&t, 1, 1, CoverKind::Closed, 2, &Budgets::default()).unwrap();
        assert_eq!(own, t.cover(1));
        let c = cylinder_tower();
        let (_, entries, v) = pullback_star_cover(&c, 0, 1, CoverKind::Closed, 2, &Budgets::default()).unwrap();
        assert!(v.is_fails());
        let both = entries.iter().find(|e| e.indices.len() == 2).unwrap();
        assert!(both.verdict.is_fails());
    }
}
