use std::collections::{BTreeMap, BTreeSet};

use polytower_core::complex::{Simplex, Subcomplex};
use polytower_core::connectivity::{homology, Budgets};
use polytower_core::gen;
use polytower_core::io;
use polytower_core::lift::{tower_lift, ThreadApprox};
use polytower_core::pl::PlMap;
use polytower_core::point::Point;
use polytower_core::rational::one;
use polytower_core::tower::{projected_into, restrict_tower, summability, verify_tower, Tower};
use proptest::prelude::*;
use rand::seq::IteratorRandom;
use rand::Rng;

fn random_subcomplex(seed: u64, k: &polytower_core::complex::Complex) -> Subcomplex {
    let mut rng = gen::rng(seed);
    let n = rng.gen_range(1..=3);
    Subcomplex::generated_by(k.simplices().cloned().choose_multiple(&mut rng, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certified_bonds_preserve_homology(seed in any::<u64>()) {
        let t = gen::random_tower(seed, 3);
        for n in 1..=2 {
            let c = verify_tower(&t, n, &Budgets::default());
            for b in &c.bonds {
                prop_assert!(b.quasi_simplicial.holds());
                prop_assert!(b.surjective.holds());
                if !b.regularity.verdict.holds() {
                    continue;
                }
                prop_assert!(b.homology.iter().all(|v| v.holds()), "{:?}", b.homology);
                for d in 0..n {
                    prop_assert_eq!(homology(&t.levels[b.bond + 1], d, false), homology(&t.levels[b.bond], d, false));
                }
            }
            if c.conclusion.holds() {
                prop_assert!(c.bonds.iter().all(|b| b.lipschitz <= b.lipschitz_bound));
            }
        }
    }

    #[test]
    fn tails_shrink(seed in any::<u64>()) {
        let t = gen::random_tower(seed, 3);
        let s = summability(&t);
        prop_assert!(s.ratio < one());
        for e in &s.tails {
            prop_assert_eq!(&e.total, &(&e.finite + &e.beyond));
        }
        prop_assert!(s.tails.windows(2).all(|w| w[1].total <= w[0].total));
        let again = verify_tower(&t, 1, &Budgets::default());
        prop_assert_eq!(&again, &verify_tower(&t, 1, &Budgets::default()));
    }

    #[test]
    fn restriction_is_coherent(seed in any::<u64>()) {
        let t = gen::random_tower(seed, 3);
        let a = random_subcomplex(seed ^ 9, &t.levels[0]);
        let r = restrict_tower(&t, 0, &a).unwrap();
        prop_assert_eq!(r.depth(), t.depth());
        for j in 0..t.depth() {
            let names: BTreeSet<_> = r.levels[j].names().iter().cloned().collect();
            let oracle: BTreeSet<_> = projected_into(&t, j, 0, &a).into_iter().map(|v| t.levels[j].name(v).clone()).collect();
            prop_assert_eq!(&names, &oracle);
            let inside = Subcomplex::from_names(&t.levels[j], &r.levels[j].maximal_names()).unwrap();
            for s in inside.simplices() {
                let x = Point::barycenter(s, one());
                let down = ThreadApprox::from_top(&t, j, &x);
                prop_assert!(down.points[0].in_subcomplex(&a));
            }
        }
        let top = Subcomplex::from_names(&t.levels[1], &r.levels[1].maximal_names()).unwrap();
        let from_one = restrict_tower(&t, 1, &top).unwrap();
        prop_assert_eq!(&from_one.levels[..], &r.levels[1..]);
        let same = restrict_tower(&r, 0, &r.levels[0].whole()).unwrap();
        prop_assert_eq!(same.levels, r.levels);
    }

    #[test]
    fn threads_project_exactly(seed in any::<u64>()) {
        let t = gen::random_tower(seed, 3);
        let mut rng = gen::rng(seed ^ 13);
        let top = t.levels[2].simplices().choose(&mut rng).unwrap().clone();
        let x = Point::barycenter(&top, one());
        let thread = ThreadApprox::from_top(&t, 2, &x);
        prop_assert!(thread.check(&t).is_ok());
        prop_assert_eq!(thread.depth(), 3);
        let mut broken = thread.clone();
        let other = (0..t.levels[0].vertex_count()).find(|v| !thread.points[0].coords().contains_key(v));
        if let Some(v) = other {
            broken.points[0] = Point::vertex(v, one());
            prop_assert!(broken.check(&t).is_err());
        }
    }

    #[test]
    fn towers_survive_json(seed in any::<u64>()) {
        let t = gen::random_tower(seed, 3);
        let text = io::to_string(&io::tower_to_json(&t));
        prop_assert_eq!(&io::parse_tower(&text).unwrap(), &t);
        let k = &t.levels[0];
        prop_assert_eq!(&io::parse_complex(&io::to_string(&io::complex_to_json(k))).unwrap(), k);
        let c = t.cover(1);
        prop_assert_eq!(io::parse_cover(&io::to_string(&io::cover_to_json(&c))).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn edge_lifts_through_subdivision_towers(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let k = gen::random_complex(&mut rng, 8);
        let Some(edge) = k.simplices_of_dim(1).iter().choose(&mut rng).cloned() else { return Ok(()) };
        let t = Tower::subdivision(&k, 3);
        let x = gen::simplex_on(&["p", "q"]);
        let images = BTreeMap::from([(0, Point::vertex(edge.vertices()[0], one())), (1, Point::vertex(edge.vertices()[1], one()))]);
        let f = PlMap::total(x.clone(), k.clone(), images).unwrap();
        let start = (0..t.levels[2].vertex_count())
            .map(|v| ThreadApprox::from_top(&t, 2, &Point::vertex(v, one())))
            .find(|th| th.points[0].coords().keys().eq([edge.vertices()[0]].iter()))
            .unwrap();
        let a = Subcomplex::generated_by([Simplex::vertex(0)]);
        let threads = BTreeMap::from([(0, start)]);
        let l = tower_lift(&t, &f, &a, &threads, 2, &Budgets::default()).unwrap();
        prop_assert!(l.verdict.holds(), "{:?}", l.verdict);
        prop_assert_eq!(l.stages.len(), 3);
        for (i, s) in l.stages.iter().enumerate() {
            prop_assert!(s.map.is_total());
            prop_assert_eq!(&s.map.target, &t.subdivision_of(i).fine);
            prop_assert!(s.agrees.holds());
            if let Some(c) = &s.closeness {
                prop_assert!(c.verdict.holds());
            }
        }
        prop_assert!(l.cauchy.entries.iter().all(|e| e.within && e.increment <= e.bound));
        prop_assert!(l.cauchy.remaining.windows(2).all(|w| w[1] < w[0]));
        let again = tower_lift(&t, &f, &a, &threads, 2, &Budgets::default()).unwrap();
        prop_assert_eq!(l.summary(), again.summary());
    }
}
