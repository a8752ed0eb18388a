//! Integer homology, fundamental group presentations and k-connectedness verdicts.

pub mod collapse;
pub mod pi1;
pub mod snf;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Simplex, Subcomplex};
use crate::verdict::{Verdict, Witness};
use snf::{smith, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub pi1_steps: u64,
    pub filler_steps: u64,
    pub nerve_subsets: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { pi1_steps: 10_000, filler_steps: 10_000, nerve_subsets: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub degree: usize,
    pub betti: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    pub fn witness(&self) -> Witness {
        Witness::Homology { degree: self.degree, betti: self.betti, torsion: self.torsion.clone() }
    }

    pub fn same_group(&self, other: &HomologyGroup) -> bool {
        self.betti == other.betti && self.torsion == other.torsion
    }
}

fn big_to_u64(x: &BigInt) -> u64 {
    x.to_u64().unwrap_or(u64::MAX)
}

/// Boundary matrix ∂_k: rows are (k−1)-simplices, columns k-simplices, both in
/// canonical order. For `k = 0` this is the augmentation when `reduced`, else empty.
pub fn boundary(k: &Complex, deg: usize, reduced: bool) -> (Matrix, usize, usize) {
    let cols = k.simplices_of_dim(deg);
    if deg == 0 {
        if reduced && !cols.is_empty() {
            return (vec![vec![BigInt::one(); cols.len()]], 1, cols.len());
        }
        return (Vec::new(), 0, cols.len());
    }
    let rows = k.simplices_of_dim(deg - 1);
    let row_of: BTreeMap<&Simplex, usize> = rows.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut m = snf::zeros(rows.len(), cols.len());
    for (j, s) in cols.iter().enumerate() {
        for (i, f) in s.facets().iter().enumerate() {
            m[row_of[f]][j] = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        }
    }
    (m, rows.len(), cols.len())
}

/// H_k(K; ℤ), optionally reduced.
pub fn homology(k: &Complex, deg: usize, reduced: bool) -> HomologyGroup {
    let n = k.simplices_of_dim(deg).len();
    let (d, r, c) = boundary(k, deg, reduced);
    let rank_k = snf::rank(&d, r, c);
    let (d1, r1, c1) = boundary(k, deg + 1, reduced);
    let s = smith(&d1, r1, c1, false);
    HomologyGroup {
        degree: deg,
        betti: n - rank_k - s.rank(),
        torsion: s.torsion().iter().map(big_to_u64).collect(),
    }
}

/// Homology in every degree up to the dimension.
pub fn homology_all(k: &Complex, reduced: bool) -> Vec<HomologyGroup> {
    (0..=k.dim().max(0) as usize).map(|d| homology(k, d, reduced)).collect()
}

/// A chosen basis of H_k with the data to express any cycle in it.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub group: HomologyGroup,
    /// Representative cycles, torsion generators first then free ones.
    pub generators: Vec<Vec<BigInt>>,
    /// Order of each generator, 0 for free generators.
    pub orders: Vec<BigInt>,
    rank_k: usize,
    v_inv: Matrix,
    u2: Matrix,
    /// Which row of `u2 · (V⁻¹ z)[r..]` gives each generator's coordinate.
    rows: Vec<usize>,
}

impl HomologyBasis {
    pub fn new(k: &Complex, deg: usize) -> HomologyBasis {
        let n = k.simplices_of_dim(deg).len();
        let (d, r, c) = boundary(k, deg, false);
        let s = smith(&d, r, c, true);
        let rank_k = s.rank();
        let v = s.v.expect("tracked");
        let v_inv = s.v_inv.expect("tracked");
        let z = n - rank_k;
        let (d1, r1, c1) = boundary(k, deg + 1, false);
        // Boundaries expressed in the kernel basis V[:, r..].
        let full = snf::mul(&v_inv, &d1, r1, c1);
        let m: Matrix = full[rank_k..].to_vec();
        let s2 = smith(&m, z, c1, true);
        let rank2 = s2.rank();
        let u2 = s2.u.expect("tracked");
        let u2_inv = s2.u_inv.expect("tracked");
        let mut tors = Vec::new();
        let mut free = Vec::new();
        for i in 0..z {
            if i < rank2 {
                if !s2.diagonal[i].is_one() {
                    tors.push((i, s2.diagonal[i].clone()));
                }
            } else {
                free.push((i, BigInt::zero()));
            }
        }
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        let mut rows = Vec::new();
        for (i, order) in tors.into_iter().chain(free) {
            // cycle = V[:, r..] · U2⁻¹[:, i]
            let coeffs: Vec<BigInt> = (0..z).map(|j| u2_inv[j][i].clone()).collect();
            let cycle: Vec<BigInt> = (0..n)
                .map(|row| (0..z).map(|j| &v[row][rank_k + j] * &coeffs[j]).sum())
                .collect();
            generators.push(cycle);
            orders.push(order);
            rows.push(i);
        }
        let group = HomologyGroup {
            degree: deg,
            betti: orders.iter().filter(|o| o.is_zero()).count(),
            torsion: orders.iter().filter(|o| !o.is_zero()).map(big_to_u64).collect(),
        };
        HomologyBasis { group, generators, orders, rank_k, v_inv, u2, rows }
    }

    /// Coordinates of the class of a cycle; torsion coordinates are reduced.
    pub fn coordinates(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        let w = snf::mul_vec(&self.v_inv, cycle);
        let tail = &w[self.rank_k..];
        let y = snf::mul_vec(&self.u2, tail);
        self.rows
            .iter()
            .zip(&self.orders)
            .map(|(i, o)| if o.is_zero() { y[*i].clone() } else { y[*i].mod_floor(o) })
            .collect()
    }
}

/// Whether a homomorphism between groups with the given bases is onto: the images of the
/// source generators together with the target's torsion relations must generate everything.
pub fn is_onto(matrix: &Matrix, target: &HomologyBasis, source_gens: usize) -> bool {
    let rows = target.generators.len();
    if rows == 0 {
        return true;
    }
    let relations: Vec<usize> = (0..rows).filter(|i| !target.orders[*i].is_zero()).collect();
    let cols = source_gens + relations.len();
    let mut m = snf::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..source_gens {
            m[i][j] = matrix[i][j].clone();
        }
    }
    for (c, i) in relations.iter().enumerate() {
        m[*i][source_gens + c] = target.orders[*i].clone();
    }
    let s = smith(&m, rows, cols, false);
    s.rank() == rows && s.diagonal.iter().all(|d| d.is_one())
}

pub fn components(k: &Complex) -> Vec<Vec<usize>> {
    let n = k.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for e in k.simplices_of_dim(1) {
        let (a, b) = (find(&mut parent, e.vertices()[0]), find(&mut parent, e.vertices()[1]));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

pub fn is_connected(k: &Complex) -> Verdict {
    if k.is_empty() {
        return Verdict::fails(Witness::Empty);
    }
    let comps = components(k);
    if comps.len() == 1 {
        Verdict::Holds
    } else {
        Verdict::fails(Witness::Components {
            first: k.name(comps[0][0]).clone(),
            second: k.name(comps[1][0]).clone(),
        })
    }
}

/// π₁ verdict for the component of `basepoint`, or for every component when `None`.
pub fn pi1_verdict(k: &Complex, basepoint: Option<usize>, budget: u64) -> Verdict {
    if k.is_empty() {
        return Verdict::fails(Witness::Empty);
    }
    let comps = components(k);
    let selected: Vec<&Vec<usize>> = match basepoint {
        Some(b) => comps.iter().filter(|c| c.contains(&b)).collect(),
        None => comps.iter().collect(),
    };
    crate::verdict::all(selected.into_iter().map(|comp| {
        let p = pi1::presentation(k, comp[0]);
        let (outcome, _) = pi1::simplify(&p, budget);
        if outcome == pi1::Outcome::Trivial {
            return Verdict::Holds;
        }
        let sub = k.induced(&comp.iter().copied().collect()).to_complex(k);
        let h1 = homology(&sub, 1, false);
        if !h1.is_trivial() {
            return Verdict::fails(h1.witness());
        }
        match outcome {
            pi1::Outcome::Exhausted => Verdict::inconclusive(format!("pi1 step budget {budget} exhausted")),
            pi1::Outcome::Stuck { generators, relators } => Verdict::inconclusive(format!(
                "pi1 presentation stuck at {generators} generators and {relators} relators with trivial H1"
            )),
            pi1::Outcome::Trivial => unreachable!(),
        }
    }))
}

/// Sound verdict for "k-connected for every k < n": connected, then π₁, then H_k = 0
/// for 2 ≤ k < n (Hurewicz). A complex that collapses to a point holds outright.
pub fn k_connected_verdict(k: &Complex, n: usize, budgets: &Budgets) -> Verdict {
    if k.is_empty() {
        return Verdict::fails(Witness::Empty);
    }
    if n == 0 {
        return Verdict::Holds;
    }
    let connected = is_connected(k);
    if !connected.holds() || n == 1 {
        return connected;
    }
    if collapse::collapse(&k.whole()).to_point() {
        return Verdict::Holds;
    }
    let v = pi1_verdict(k, None, budgets.pi1_steps);
    if v.is_fails() {
        return v;
    }
    for d in 2..n {
        let h = homology(k, d, false);
        if !h.is_trivial() {
            return Verdict::fails(h.witness());
        }
    }
    v
}

/// Finite polyhedra are ANE(∞), so AE(n) reduces to (n−1)-connectedness.
pub fn ae_verdict(k: &Complex, n: usize, budgets: &Budgets) -> Verdict {
    k_connected_verdict(k, n, budgets)
}

pub fn subcomplex_k_connected(parent: &Complex, a: &Subcomplex, n: usize, budgets: &Budgets) -> Verdict {
    k_connected_verdict(&a.to_complex(parent), n, budgets)
}

/// Image chain of a k-chain under a vertex map; degenerate simplices go to zero.
pub fn push_chain(
    source: &Complex,
    target: &Complex,
    images: &[usize],
    deg: usize,
    chain: &[BigInt],
) -> Vec<BigInt> {
    let tgt = target.simplices_of_dim(deg);
    let index: BTreeMap<&Simplex, usize> = tgt.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = vec![BigInt::zero(); tgt.len()];
    for (s, c) in source.simplices_of_dim(deg).iter().zip(chain) {
        if c.is_zero() {
            continue;
        }
        let img: Vec<usize> = s.vertices().iter().map(|v| images[*v]).collect();
        let Some(sign) = permutation_sign(&img) else { continue };
        let t = Simplex::new(img);
        let i = index[&t];
        if sign > 0 {
            out[i] += c;
        } else {
            out[i] -= c;
        }
    }
    out
}

/// Sign of the permutation sorting `v`, or `None` if `v` has repeats.
fn permutation_sign(v: &[usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                return None;
            }
            if v[i] > v[j] {
                sign = -sign;
            }
        }
    }
    Some(sign)
}

/// Matrix of the induced map H_k(source) → H_k(target) in the chosen bases,
/// plus a verdict on whether it is an isomorphism.
pub fn induced_homology(
    source: &Complex,
    target: &Complex,
    images: &[usize],
    deg: usize,
) -> (Matrix, HomologyBasis, HomologyBasis, Verdict) {
    let hs = HomologyBasis::new(source, deg);
    let ht = HomologyBasis::new(target, deg);
    let cols: Vec<Vec<BigInt>> = hs
        .generators
        .iter()
        .map(|g| ht.coordinates(&push_chain(source, target, images, deg, g)))
        .collect();
    let rows = ht.generators.len();
    let matrix: Matrix = (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let verdict = if !hs.group.same_group(&ht.group) {
        let witness = if ht.group.is_trivial() { hs.group.witness() } else { ht.group.witness() };
        Verdict::fails(witness)
    } else if is_onto(&matrix, &ht, hs.generators.len()) {
        Verdict::Holds
    } else {
        Verdict::fails(Witness::Note { text: format!("induced map in degree {deg} is not onto") })
    };
    (matrix, hs, ht, verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Subdivision;
    use crate::gen;
    use num_traits::Signed;

    fn betti(k: &Complex) -> Vec<(usize, Vec<u64>)> {
        homology_all(k, false).into_iter().map(|h| (h.betti, h.torsion)).collect()
    }

    #[test]
    fn boundary_squares_to_zero() {
        for k in [gen::sphere(3), gen::rp2(), gen::simplex(3).barycentric_subdivision()] {
            for d in 1..=k.dim() as usize {
                let (a, ra, ca) = boundary(&k, d, false);
                let (b, _, cb) = boundary(&k, d + 1, false);
                let prod = snf::mul(&a, &b, ca, cb);
                assert!(prod.iter().flatten().all(Zero::is_zero));
                assert_eq!(prod.len(), ra);
            }
        }
    }

    #[test]
    fn standard_homology() {
        assert_eq!(betti(&gen::circle()), vec![(1, vec![]), (1, vec![])]);
        assert_eq!(betti(&gen::sphere(2)), vec![(1, vec![]), (0, vec![]), (1, vec![])]);
        assert_eq!(betti(&gen::rp2()), vec![(1, vec![]), (0, vec![2]), (0, vec![])]);
        for d in 0..=5 {
            assert!(homology_all(&gen::simplex(d), true).iter().all(HomologyGroup::is_trivial));
        }
    }

    #[test]
    fn euler_characteristic_matches_betti_numbers() {
        for k in [gen::circle(), gen::sphere(2), gen::sphere(3), gen::simplex(3)] {
            let alt: i64 = homology_all(&k, false)
                .iter()
                .map(|h| if h.degree % 2 == 0 { h.betti as i64 } else { -(h.betti as i64) })
                .sum();
            assert_eq!(alt, k.euler_characteristic());
        }
    }

    #[test]
    fn subdivision_invariance() {
        for k in [gen::circle(), gen::rp2()] {
            let fine = Subdivision::of(&k).fine;
            assert_eq!(homology_all(&k, false), homology_all(&fine, false));
        }
    }

    #[test]
    fn connectivity_verdicts() {
        assert!(is_connected(&gen::simplex(2)).holds());
        let two = Complex::from_maximal(&[gen::named(&["a"]), gen::named(&["b"])]).unwrap();
        assert!(matches!(is_connected(&two).witness(), Some(Witness::Components { .. })));
        assert_eq!(is_connected(&Complex::empty()).witness(), Some(&Witness::Empty));
    }

    #[test]
    fn pi1_verdicts() {
        let b = Budgets::default();
        assert!(pi1_verdict(&gen::simplex(3), None, b.pi1_steps).holds());
        let circle = pi1_verdict(&gen::circle(), None, b.pi1_steps);
        assert_eq!(circle.witness(), Some(&Witness::Homology { degree: 1, betti: 1, torsion: vec![] }));
        assert!(pi1_verdict(&gen::sphere(2), None, b.pi1_steps).holds());
        let rp2 = pi1_verdict(&gen::rp2(), None, b.pi1_steps);
        assert_eq!(rp2.witness(), Some(&Witness::Homology { degree: 1, betti: 0, torsion: vec![2] }));
        let big = gen::sphere(3).barycentric_subdivision();
        assert!(pi1_verdict(&big, None, 1).is_inconclusive());
    }

    #[test]
    fn k_connected_rules() {
        let b = Budgets::default();
        let s2 = gen::sphere(2);
        assert_eq!(
            k_connected_verdict(&s2, 3, &b).witness(),
            Some(&Witness::Homology { degree: 2, betti: 1, torsion: vec![] })
        );
        assert!(k_connected_verdict(&s2, 2, &b).holds());
        assert_eq!(k_connected_verdict(&Complex::empty(), 2, &b).witness(), Some(&Witness::Empty));
        assert!(ae_verdict(&gen::simplex(2), 5, &b).holds());
        assert!(ae_verdict(&gen::circle(), 2, &b).is_fails());
    }

    #[test]
    fn induced_maps() {
        let s2 = gen::sphere(2);
        let id: Vec<usize> = (0..s2.vertex_count()).collect();
        for d in 0..3 {
            assert!(induced_homology(&s2, &s2, &id, d).3.holds());
        }
        // Folding the circle onto an edge kills H_1.
        let circle = gen::circle();
        let edge = gen::simplex(1);
        let (m, _, _, v) = induced_homology(&circle, &edge, &[0, 1, 1], 1);
        assert!(m.is_empty());
        assert!(v.is_fails());
        // Reflection of the circle acts by −1 on H_1 and is still an isomorphism.
        let (m, _, _, v) = induced_homology(&circle, &circle, &[1, 0, 2], 1);
        assert_eq!(m[0][0].abs(), BigInt::one());
        assert!(v.holds());
    }

    #[test]
    fn degree_two_map_is_not_onto() {
        // A 6-gon wrapped twice around a triangle.
        let hex = Complex::from_maximal(
            &(0..6)
                .map(|i| vec![crate::name::VertexName::atom(format!("h{i}")), crate::name::VertexName::atom(format!("h{}", (i + 1) % 6))])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let tri = gen::circle();
        let images: Vec<usize> = (0..6).map(|i| i % 3).collect();
        let (m, _, _, v) = induced_homology(&hex, &tri, &images, 1);
        assert_eq!(m[0][0].abs(), BigInt::from(2));
        assert!(v.is_fails());
    }
}
