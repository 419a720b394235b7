use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uphocore::constructions::{build_lf, FiberFunction};
use uphocore::iso::{automorphisms, verify_isomorphism};
use uphocore::poset::{
    char_series, from_json, mobius_from_bottom, rank_series, series_invert, to_json, upho_check,
};
use uphocore::presentation::{build_element_table, parse_presentation};
use uphocore::{canonical_form, find_isomorphism, IsoMode, NodeId, Presentation, PowerSeriesTrunc, TruncatedPoset, Word};

fn random_poset(seed: u64, max_nodes: usize) -> TruncatedPoset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks: Vec<Vec<NodeId>> = vec![vec![0]];
    let mut next: NodeId = 1;
    while (next as usize) < max_nodes && rng.gen_bool(0.8) {
        let s = rng.gen_range(1..=(max_nodes - next as usize).min(4));
        ranks.push((next..next + s as NodeId).collect());
        next += s as NodeId;
    }
    let mut covers = Vec::new();
    for r in 1..ranks.len() {
        for &v in &ranks[r] {
            let k = rng.gen_range(1..=ranks[r - 1].len());
            for &u in ranks[r - 1].choose_multiple(&mut rng, k) {
                covers.push((u, v));
            }
        }
    }
    TruncatedPoset::new(ranks, &covers, None).unwrap()
}

fn relabel(p: &TruncatedPoset, seed: u64) -> TruncatedPoset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map = vec![0; p.len()];
    for r in 0..=p.depth() {
        let ids: Vec<NodeId> = p.rank(r).collect();
        let mut to = ids.clone();
        to.shuffle(&mut rng);
        for (a, b) in ids.into_iter().zip(to) {
            map[a as usize] = b;
        }
    }
    let covers: Vec<_> = p.edges().into_iter().map(|(l, u, _)| (map[l as usize], map[u as usize])).collect();
    TruncatedPoset::new(p.ranks(), &covers, None).unwrap()
}

/// Exhaustive rank-preserving search, small posets only.
fn brute_isomorphic(p: &TruncatedPoset, q: &TruncatedPoset) -> bool {
    fn go(v: usize, p: &TruncatedPoset, q: &TruncatedPoset, map: &mut Vec<NodeId>, used: &mut [bool]) -> bool {
        if v == p.len() {
            return true;
        }
        for w in q.rank(p.rank_of(v as NodeId)) {
            if used[w as usize] {
                continue;
            }
            let fits = (0..v).all(|u| {
                let a = p.up(u as NodeId).contains(&(v as NodeId));
                let b = q.up(map[u]).contains(&w);
                a == b
            });
            if fits {
                used[w as usize] = true;
                map.push(w);
                if go(v + 1, p, q, map, used) {
                    return true;
                }
                map.pop();
                used[w as usize] = false;
            }
        }
        false
    }
    p.rank_sizes() == q.rank_sizes() && go(0, p, q, &mut Vec::new(), &mut vec![false; q.len()])
}

fn presentation_strategy() -> impl Strategy<Value = Presentation> {
    (2usize..=3, prop::collection::vec((2usize..=3, any::<u64>()), 1..=3)).prop_filter_map(
        "relations must equate distinct words",
        |(rank, rels)| {
            let relations: Vec<(Word, Word)> = rels
                .into_iter()
                .map(|(len, seed)| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut w = || Word((0..len).map(|_| rng.gen_range(0..rank as u8)).collect());
                    (w(), w())
                })
                .collect();
            Presentation::with_indexed_names(rank, relations).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_matches_exhaustive_search(a in any::<u64>(), b in any::<u64>(), same in any::<bool>()) {
        let p = random_poset(a, 9);
        let q = if same { relabel(&p, b) } else { random_poset(b, 9) };
        let certified = canonical_form(&p, IsoMode::Plain) == canonical_form(&q, IsoMode::Plain);
        prop_assert_eq!(certified, brute_isomorphic(&p, &q));
        if certified {
            let map = find_isomorphism(&p, &q, IsoMode::Plain).expect("witness exists");
            prop_assert!(verify_isomorphism(&p, &q, &map, IsoMode::Plain));
        }
    }

    #[test]
    fn automorphism_generators_are_automorphisms(a in any::<u64>()) {
        let p = random_poset(a, 10);
        for g in automorphisms(&p, IsoMode::Plain).generators {
            prop_assert!(verify_isomorphism(&p, &p, &g, IsoMode::Plain));
        }
    }

    #[test]
    fn mobius_sums_vanish_above_bottom(a in any::<u64>()) {
        let p = random_poset(a, 12);
        let mu = mobius_from_bottom(&p);
        let downs = p.down_sets();
        for x in 1..p.len() {
            let sum: num_bigint::BigInt = downs[x].ones().map(|y| mu.values[y].clone()).sum();
            prop_assert_eq!(sum, 0.into());
        }
    }

    #[test]
    fn series_inverse_is_two_sided(c in prop::collection::vec(-40i64..=40, 8), negative in any::<bool>()) {
        let mut coeffs = vec![if negative { -1 } else { 1 }];
        coeffs.extend(c);
        let s = PowerSeriesTrunc::from_i64(&coeffs);
        let inv = series_invert(&s).unwrap();
        prop_assert!(s.mul_trunc(&inv).is_one());
        prop_assert!(inv.mul_trunc(&s).is_one());
    }

    #[test]
    fn class_counts_ignore_generator_order(m in presentation_strategy(), seed in any::<u64>()) {
        let base = build_element_table(&m, 5).unwrap().class_counts();
        let mut perm: Vec<usize> = (0..m.rank()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let q = m.permute_generators(&perm).unwrap();
        prop_assert_eq!(build_element_table(&q, 5).unwrap().class_counts(), base);
    }

    #[test]
    fn mono_text_round_trips(m in presentation_strategy()) {
        prop_assert_eq!(parse_presentation(&m.to_mono()).unwrap(), m);
    }

    #[test]
    fn poset_json_round_trips(a in any::<u64>()) {
        let p = random_poset(a, 12);
        prop_assert_eq!(from_json(&to_json(&p)).unwrap(), p);
    }

    #[test]
    fn fiber_lattices_are_upho_with_inverse_series(values in prop::collection::vec(1usize..=3, 3)) {
        let f = FiberFunction::new(values).unwrap();
        let p = build_lf(&f, 4).unwrap();
        prop_assert!(upho_check(&p, 2).passed());
        prop_assert!(rank_series(&p).mul_trunc(&char_series(&p)).is_one());
    }
}
