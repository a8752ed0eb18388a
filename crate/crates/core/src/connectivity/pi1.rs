//! Edge-path presentations of the fundamental group and Tietze simplification.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::complex::{Complex, Simplex};

/// Letters are `g + 1` for generator `g` and `-(g + 1)` for its inverse.
pub type Word = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub basepoint: usize,
    /// Non-tree edges of a breadth-first spanning tree, one generator each.
    pub generators: Vec<Simplex>,
    /// One relator per triangle of the component, tree letters already removed.
    pub relators: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Every generator was eliminated.
    Trivial,
    /// Simplification stopped with this many generators and relators left.
    Stuck { generators: usize, relators: usize },
    /// The step budget ran out.
    Exhausted,
}

/// Presentation of π₁ of the component containing `basepoint`.
pub fn presentation(k: &Complex, basepoint: usize) -> Presentation {
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen = BTreeSet::from([basepoint]);
    let mut queue = VecDeque::from([basepoint]);
    while let Some(v) = queue.pop_front() {
        for w in k.neighbours(v) {
            if seen.insert(w) {
                parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    let tree: BTreeSet<Simplex> = parent.iter().map(|(w, v)| Simplex::new(vec![*v, *w])).collect();
    let mut generators = Vec::new();
    let mut letter: BTreeMap<Simplex, i64> = BTreeMap::new();
    for e in k.simplices_of_dim(1) {
        if seen.contains(&e.vertices()[0]) && !tree.contains(e) {
            letter.insert(e.clone(), generators.len() as i64 + 1);
            generators.push(e.clone());
        }
    }
    let edge = |a: usize, b: usize| letter.get(&Simplex::new(vec![a, b])).copied();
    let mut relators = Vec::new();
    for t in k.simplices_of_dim(2) {
        let [a, b, c] = t.vertices() else { unreachable!() };
        if !seen.contains(a) {
            continue;
        }
        let mut word = Vec::new();
        word.extend(edge(*a, *b));
        word.extend(edge(*b, *c));
        word.extend(edge(*a, *c).map(|x| -x));
        relators.push(word);
    }
    Presentation { basepoint, generators, relators }
}

fn reduce(word: &Word) -> Word {
    let mut out: Word = Vec::with_capacity(word.len());
    for &x in word {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    let (mut i, mut j) = (0, out.len());
    while j > i + 1 && out[i] == -out[j - 1] {
        i += 1;
        j -= 1;
    }
    out[i..j].to_vec()
}

fn inverse(word: &[i64]) -> Word {
    word.iter().rev().map(|x| -x).collect()
}

/// Eliminates generators that occur exactly once in some relator, shortest relator first.
/// Each elimination costs one step plus the number of letters written during substitution.
pub fn simplify(p: &Presentation, budget: u64) -> (Outcome, u64) {
    let mut relators: Vec<Word> = p.relators.clone();
    let mut alive: BTreeSet<i64> = (1..=p.generators.len() as i64).collect();
    let mut steps = 0u64;
    loop {
        let mut reduced: Vec<Word> = relators.iter().map(reduce).filter(|w| !w.is_empty()).collect();
        reduced.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        reduced.dedup();
        relators = reduced;
        if alive.is_empty() {
            return (Outcome::Trivial, steps);
        }
        let mut pick = None;
        'search: for (ri, r) in relators.iter().enumerate() {
            let mut count: BTreeMap<i64, usize> = BTreeMap::new();
            for x in r {
                *count.entry(x.abs()).or_default() += 1;
            }
            for (pos, x) in r.iter().enumerate() {
                if count[&x.abs()] == 1 {
                    pick = Some((ri, pos));
                    break 'search;
                }
            }
        }
        let Some((ri, pos)) = pick else {
            return (Outcome::Stuck { generators: alive.len(), relators: relators.len() }, steps);
        };
        let r = relators.remove(ri);
        let x = r[pos];
        // r = A x B, so x = A⁻¹ B⁻¹ for a positive letter, or x⁻¹ = A⁻¹ B⁻¹.
        let mut rest: Word = r[pos + 1..].to_vec();
        rest.extend_from_slice(&r[..pos]);
        let mut value = inverse(&rest);
        if x < 0 {
            value = rest;
        }
        let g = x.abs();
        let value_inv = inverse(&value);
        steps += 1;
        for rel in relators.iter_mut() {
            if !rel.iter().any(|y| y.abs() == g) {
                continue;
            }
            let mut out = Vec::with_capacity(rel.len() + value.len());
            for &y in rel.iter() {
                if y == g {
                    out.extend_from_slice(&value);
                    steps += value.len() as u64;
                } else if y == -g {
                    out.extend_from_slice(&value_inv);
                    steps += value.len() as u64;
                } else {
                    out.push(y);
                }
            }
            *rel = out;
        }
        alive.remove(&g);
        if steps > budget {
            return (Outcome::Exhausted, steps);
        }
    }
}
