//! Greedy elementary collapses through free faces.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{Simplex, Subcomplex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collapse {
    /// Elementary collapses in order: (free face, the unique simplex containing it).
    pub steps: Vec<(Simplex, Simplex)>,
    pub remaining: Subcomplex,
}

impl Collapse {
    pub fn to_point(&self) -> bool {
        self.remaining.len() == 1
    }
}

/// Collapses greedily, always removing the highest-dimensional free pair first and
/// breaking ties by the lexicographically least free face.
pub fn collapse(sub: &Subcomplex) -> Collapse {
    let mut alive: BTreeSet<Simplex> = sub.simplices().cloned().collect();
    let vertices: Vec<usize> = sub.vertices().into_iter().collect();
    let mut cofaces: BTreeMap<Simplex, usize> = alive.iter().map(|s| (s.clone(), 0)).collect();
    for s in &alive {
        for f in s.faces() {
            if &f != s {
                *cofaces.get_mut(&f).expect("face-closed") += 1;
            }
        }
    }
    let mut queue: BTreeSet<(Reverse<usize>, Simplex)> =
        cofaces.iter().filter(|(_, c)| **c == 1).map(|(s, _)| (Reverse(s.len()), s.clone())).collect();
    let mut steps = Vec::new();
    while let Some(entry) = queue.pop_first() {
        let tau = entry.1;
        if !alive.contains(&tau) || cofaces[&tau] != 1 {
            continue;
        }
        let sigma = vertices
            .iter()
            .filter(|v| !tau.contains_vertex(**v))
            .map(|v| tau.union(&Simplex::vertex(*v)))
            .find(|s| alive.contains(s))
            .expect("a simplex with one coface has a coface one dimension up");
        for removed in [&sigma, &tau] {
            alive.remove(removed);
            for f in removed.faces() {
                if &f == removed {
                    continue;
                }
                let c = cofaces.get_mut(&f).expect("face-closed");
                *c -= 1;
                if *c == 1 && alive.contains(&f) {
                    queue.insert((Reverse(f.len()), f));
                }
            }
        }
        steps.push((tau, sigma));
    }
    Collapse { steps, remaining: Subcomplex::generated_by(alive) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Subdivision;
    use crate::gen;

    #[test]
    fn simplices_collapse_to_a_point() {
        for d in 0..5 {
            let k = gen::simplex(d);
            assert!(collapse(&k.whole()).to_point(), "d = {d}");
        }
        let sd = Subdivision::of(&gen::simplex(2));
        assert!(collapse(&sd.fine.whole()).to_point());
    }

    #[test]
    fn spheres_do_not_collapse() {
        let c = collapse(&gen::circle().whole());
        assert!(c.steps.is_empty());
        let s2 = collapse(&gen::sphere(2).whole());
        assert!(!s2.to_point());
        let rp2 = collapse(&gen::rp2().whole());
        assert!(!rp2.to_point());
    }

    #[test]
    fn collapse_is_deterministic() {
        let k = gen::simplex(3).whole();
        assert_eq!(collapse(&k), collapse(&k));
    }
}
