//! Generators for standard complexes, maps and towers.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::Complex;
use crate::maps::{QsMap, VertexMap};
use crate::name::VertexName;
use crate::tower::Tower;

/// `n` atom names `a, b, c, ...`; past `z` the names become `v26, v27, ...`.
pub fn letters(n: usize) -> Vec<VertexName> {
    (0..n)
        .map(|i| {
            if i < 26 {
                VertexName::atom(((b'a' + i as u8) as char).to_string())
            } else {
                VertexName::atom(format!("v{i}"))
            }
        })
        .collect()
}

pub fn named(names: &[&str]) -> Vec<VertexName> {
    names.iter().map(|s| VertexName::atom(*s)).collect()
}

/// Complex generated by one simplex on the given names.
pub fn simplex_on(names: &[&str]) -> Complex {
    Complex::from_maximal(&[named(names)]).expect("distinct names")
}

/// The full `d`-simplex on `a, b, ...`.
pub fn simplex(d: usize) -> Complex {
    Complex::from_maximal(&[letters(d + 1)]).expect("distinct names")
}

/// Boundary of the `(d+1)`-simplex, a triangulated `d`-sphere.
pub fn sphere(d: usize) -> Complex {
    let v = letters(d + 2);
    let facets: Vec<Vec<VertexName>> = (0..v.len())
        .map(|skip| v.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, n)| n.clone()).collect())
        .collect();
    Complex::from_maximal(&facets).expect("distinct names")
}

pub fn circle() -> Complex {
    sphere(1)
}

/// Six-vertex triangulation of the real projective plane.
pub fn rp2() -> Complex {
    const TRIANGLES: [[u8; 3]; 10] = [
        [1, 2, 3],
        [1, 2, 4],
        [1, 3, 5],
        [1, 4, 6],
        [1, 5, 6],
        [2, 3, 6],
        [2, 4, 5],
        [2, 5, 6],
        [3, 4, 5],
        [3, 4, 6],
    ];
    let tris: Vec<Vec<VertexName>> = TRIANGLES
        .iter()
        .map(|t| t.iter().map(|v| VertexName::atom(v.to_string())).collect())
        .collect();
    Complex::from_maximal(&tris).expect("distinct names")
}

/// Stacked cylinder: three triangulated rings `b`, `m`, `t` joined by two triangulated tubes.
pub fn cylinder_complex() -> Complex {
    let ring = |p: &str, i: usize| VertexName::atom(format!("{p}{}", i % 3 + 1));
    let mut tris = Vec::new();
    for (lo, hi) in [("b", "m"), ("m", "t")] {
        for i in 0..3 {
            tris.push(vec![ring(lo, i), ring(lo, i + 1), ring(hi, i)]);
            tris.push(vec![ring(lo, i + 1), ring(hi, i), ring(hi, i + 1)]);
        }
    }
    Complex::from_maximal(&tris).expect("distinct names")
}

/// The cylinder mapped onto the edge `[u, v]`: bottom ring to `u`, middle ring to the
/// barycenter of the edge, top ring to `v`. Returns the map and its base edge.
pub fn cylinder() -> (QsMap, Complex) {
    let source = cylinder_complex();
    let base = simplex_on(&["u", "v"]);
    let image = |n: &VertexName| -> VertexName {
        let s = n.to_string();
        match &s[..1] {
            "b" => VertexName::set(named(&["u"])),
            "m" => VertexName::set(named(&["u", "v"])),
            _ => VertexName::set(named(&["v"])),
        }
    };
    let table: BTreeMap<VertexName, VertexName> = source.names().iter().map(|n| (n.clone(), image(n))).collect();
    let map = QsMap::from_names(source, &base, &table).expect("cylinder map is quasi-simplicial");
    (map, base)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random complex on at most six vertices with at most `max_simplices` simplices.
pub fn random_complex<R: Rng>(rng: &mut R, max_simplices: usize) -> Complex {
    loop {
        let n = rng.gen_range(2..=6);
        let names = letters(n);
        let facets: Vec<Vec<VertexName>> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let size = rng.gen_range(1..=3.min(n));
                names.choose_multiple(rng, size).cloned().collect()
            })
            .collect();
        let k = Complex::from_maximal(&facets).expect("distinct names");
        if k.simplex_count() <= max_simplices {
            return k;
        }
    }
}

/// A surjective simplicial map onto `l` from a complex with one or two copies `v.0`, `v.1`
/// of every vertex; each simplex of `l` is covered by at least one copy.
pub fn vertex_doubling<R: Rng>(l: &Complex, rng: &mut R) -> VertexMap {
    let copies: Vec<usize> = (0..l.vertex_count()).map(|_| rng.gen_range(1..=2)).collect();
    let copy = |v: usize, j: usize| VertexName::atom(format!("{}.{j}", l.name(v)));
    let mut facets: BTreeSet<Vec<VertexName>> = BTreeSet::new();
    for s in l.maximal() {
        for round in 0..2 {
            let picked = s
                .vertices()
                .iter()
                .map(|v| copy(*v, if round == 0 { 0 } else { rng.gen_range(0..copies[*v]) }))
                .collect();
            facets.insert(picked);
        }
    }
    let facets: Vec<Vec<VertexName>> = facets.into_iter().collect();
    let k = Complex::from_maximal(&facets).expect("distinct names");
    let origin: BTreeMap<VertexName, usize> = (0..l.vertex_count()).flat_map(|v| (0..2).map(move |j| (copy(v, j), v))).collect();
    let images = k.names().iter().map(|n| origin[n]).collect();
    VertexMap::new(k, l.clone(), images).expect("copies map to their vertex")
}

/// `βq : βK → βL` for a random vertex doubling `q : K → L` of a random `L`.
pub fn random_qs_map<R: Rng>(rng: &mut R, max_simplices: usize) -> QsMap {
    let l = random_complex(rng, max_simplices);
    let q = vertex_doubling(&l, rng);
    QsMap::subdivided(&q).expect("subdivisions of simplicial maps are quasi-simplicial")
}

/// A tower whose bonds are subdivided vertex doublings, starting from a random complex.
pub fn random_tower(seed: u64, depth: usize) -> Tower {
    let mut r = rng(seed);
    let mut levels = vec![random_complex(&mut r, 12)];
    let mut bonds = Vec::new();
    for _ in 1..depth.max(1) {
        let q = vertex_doubling(levels.last().expect("non-empty"), &mut r);
        let p = QsMap::subdivided(&q).expect("subdivisions of simplicial maps are quasi-simplicial");
        levels.push(p.source().clone());
        bonds.push(p);
    }
    Tower::new(levels, bonds, None).expect("generated towers are well formed")
}
