use std::collections::{BTreeMap, BTreeSet, VecDeque};

use polytower_core::carrier::{extend_carried, Carrier, Extended};
use polytower_core::complex::{Complex, Simplex, Subcomplex, Subdivision};
use polytower_core::gen;
use polytower_core::name::VertexName;
use polytower_core::pl::PlMap;
use polytower_core::point::Point;
use polytower_core::rational::one;
use polytower_core::stars::{barycentric_star, CoverElement, CoverKind, IndexedCover};
use proptest::prelude::*;
use rand::seq::{IteratorRandom, SliceRandom};

fn single_element(x: &Complex, target: &Complex, t: &Subcomplex) -> Carrier {
    let all = VertexName::atom("all");
    let cover = IndexedCover::new(x.clone(), CoverKind::Closed, BTreeMap::from([(all.clone(), CoverElement::Closed(x.whole()))])).unwrap();
    Carrier::new(cover, target.clone(), BTreeMap::from([(all, t.clone())])).unwrap()
}

/// Edge-graph distances from `from` inside `t`.
fn distances(t: &Subcomplex, from: usize) -> BTreeMap<usize, usize> {
    let edges: Vec<(usize, usize)> = t.simplices().filter(|s| s.len() == 2).map(|s| (s.vertices()[0], s.vertices()[1])).collect();
    let mut dist = BTreeMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for (a, b) in &edges {
            let w = if *a == v { *b } else if *b == v { *a } else { continue };
            if !dist.contains_key(&w) {
                dist.insert(w, dist[&v] + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn cone_target(seed: u64) -> Option<(Complex, Subcomplex)> {
    let mut rng = gen::rng(seed);
    let k = gen::random_complex(&mut rng, 30);
    let v = (0..k.vertex_count()).choose(&mut rng)?;
    let sd = Subdivision::of(&k);
    let star = barycentric_star(&sd, &Subcomplex::generated_by([Simplex::vertex(v)]));
    Some((sd.fine, star))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn edge_fillers_follow_shortest_paths(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let k = gen::random_complex(&mut rng, 30).barycentric_subdivision();
        let t = k.whole();
        let a = (0..k.vertex_count()).choose(&mut rng).unwrap();
        let dist = distances(&t, a);
        let b = **dist.keys().collect::<Vec<_>>().choose(&mut rng).unwrap();
        let diameter = (0..k.vertex_count()).filter(|v| dist.contains_key(v)).map(|v| distances(&t, v).values().copied().max().unwrap()).max().unwrap();
        let edge = gen::simplex_on(&["p", "q"]);
        let ends = Subcomplex::generated_by([Simplex::vertex(0), Simplex::vertex(1)]);
        let f = PlMap::new(edge.clone(), k.clone(), ends, BTreeMap::from([(0, Point::vertex(a, one())), (1, Point::vertex(b, one()))])).unwrap();
        let c = single_element(&edge, &k, &t);
        let Extended::Done(ext) = extend_carried(&f, &c, 10_000).unwrap() else { panic!("connected target") };
        let steps = ext.map.domain.simplices_of_dim(1).len();
        prop_assert!(steps <= diameter.max(1));
        prop_assert_eq!(steps, dist[&b].max(1));
        prop_assert!(c.refine(&ext.refinement).is_carried(&ext.map).holds());
    }

    #[test]
    fn triangles_fill_inside_cones(seed in any::<u64>()) {
        let Some((fine, star)) = cone_target(seed) else { return Ok(()) };
        let mut rng = gen::rng(seed ^ 3);
        let tri = gen::simplex_on(&["p", "q", "r"]);
        let verts: Vec<usize> = star.vertices().into_iter().collect();
        let images: BTreeMap<usize, Point> = (0..3).map(|i| (i, Point::vertex(*verts.choose(&mut rng).unwrap(), one()))).collect();
        let corners = Subcomplex::generated_by((0..3).map(Simplex::vertex));
        let f = PlMap::new(tri.clone(), fine.clone(), corners, images).unwrap();
        let c = single_element(&tri, &fine, &star);
        let first = extend_carried(&f, &c, 10_000).unwrap();
        let Extended::Done(ext) = &first else { panic!("cones are contractible") };
        prop_assert!(ext.map.is_total());
        prop_assert!(c.refine(&ext.refinement).is_carried(&ext.map).holds());
        for v in 0..3 {
            let w = ext.refinement.vertex_at(v).unwrap();
            prop_assert_eq!(ext.map.image(w).unwrap().coords(), f.image(v).unwrap().coords());
        }
        prop_assert_eq!(&first, &extend_carried(&f, &c, 10_000).unwrap());
    }

    #[test]
    fn given_boundaries_are_kept(seed in any::<u64>()) {
        let Some((fine, star)) = cone_target(seed) else { return Ok(()) };
        let mut rng = gen::rng(seed ^ 5);
        let s = star.maximal().choose(&mut rng).unwrap().clone();
        let images: BTreeMap<usize, Point> = (0..3).map(|i| (i, Point::vertex(*s.vertices().choose(&mut rng).unwrap(), one()))).collect();
        let tri = gen::simplex_on(&["p", "q", "r"]);
        let boundary = Subcomplex::generated_by(tri.simplices_of_dim(1).iter().cloned());
        let f = PlMap::new(tri.clone(), fine.clone(), boundary.clone(), images).unwrap();
        let c = single_element(&tri, &fine, &star);
        let Extended::Done(ext) = extend_carried(&f, &c, 10_000).unwrap() else { panic!("cones are contractible") };
        let given = ext.refinement.pull_map(&f);
        prop_assert!(ext.map.agrees_with(&given, &given.defined));
        let on_boundary: BTreeSet<usize> = given.defined.vertices();
        prop_assert!(on_boundary.len() >= 3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn loops_contract_in_a_disc(seed in any::<u64>()) {
        let disc = gen::simplex(2).barycentric_subdivision().barycentric_subdivision();
        let mut rng = gen::rng(seed);
        let tri = gen::simplex_on(&["p", "q", "r"]);
        let images: BTreeMap<usize, Point> = (0..3).map(|i| (i, Point::vertex((0..disc.vertex_count()).choose(&mut rng).unwrap(), one()))).collect();
        let corners = Subcomplex::generated_by((0..3).map(Simplex::vertex));
        let f = PlMap::new(tri.clone(), disc.clone(), corners, images).unwrap();
        let c = single_element(&tri, &disc, &disc.whole());
        let Extended::Done(ext) = extend_carried(&f, &c, 10_000).unwrap() else { panic!("discs are contractible") };
        prop_assert!(ext.map.is_total());
        prop_assert!(c.refine(&ext.refinement).is_carried(&ext.map).holds());
    }
}
