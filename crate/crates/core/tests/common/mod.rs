#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use polytower_core::complex::{Complex, Simplex};
use polytower_core::point::Point;
use polytower_core::rational::{one, Rational};
use rand::seq::SliceRandom;
use rand::Rng;

/// A point of the closed simplex `s` with random positive rational weights; each vertex
/// is dropped with probability 1/4 (the first one is always kept).
pub fn sample_in_simplex<R: Rng>(rng: &mut R, s: &Simplex) -> Point {
    let mut weights: BTreeMap<usize, i64> = BTreeMap::new();
    for (i, v) in s.vertices().iter().enumerate() {
        if i == 0 || rng.gen_range(0..4) > 0 {
            weights.insert(*v, rng.gen_range(1..=12));
        }
    }
    let total: i64 = weights.values().sum();
    Point::new(weights.into_iter().map(|(v, w)| (v, Rational::new(w.into(), total.into()))).collect(), one())
}

pub fn sample_in<R: Rng>(rng: &mut R, k: &Complex) -> Point {
    let s = k.maximal().choose(rng).expect("non-empty complex").clone();
    sample_in_simplex(rng, &s)
}

/// Every non-empty subset of every generator, by brute force.
pub fn faces(generators: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for g in generators {
        for mask in 1u32..(1 << g.len()) {
            let mut f: Vec<usize> = (0..g.len()).filter(|i| mask & (1 << i) != 0).map(|i| g[i]).collect();
            f.sort();
            out.insert(f);
        }
    }
    out
}

fn is_proper_face(a: &[usize], b: &[usize]) -> bool {
    a.len() < b.len() && a.iter().all(|v| b.contains(v))
}

/// Number of strictly increasing chains of each length (index `k` counts chains of
/// `k + 1` faces) in the face poset.
pub fn chain_counts(faces: &BTreeSet<Vec<usize>>) -> Vec<usize> {
    let list: Vec<&Vec<usize>> = faces.iter().collect();
    let mut counts = Vec::new();
    // ending[i] = number of chains of the current length ending at list[i]
    let mut ending: Vec<usize> = vec![1; list.len()];
    while ending.iter().any(|c| *c > 0) {
        counts.push(ending.iter().sum());
        let next: Vec<usize> = (0..list.len())
            .map(|j| (0..list.len()).filter(|i| is_proper_face(list[*i], list[j])).map(|i| ending[i]).sum())
            .collect();
        ending = next;
    }
    counts
}

pub fn generators(k: &Complex) -> Vec<Vec<usize>> {
    k.maximal().iter().map(|s| s.vertices().to_vec()).collect()
}
