use std::collections::BTreeSet;

use uphocore::coloring::{enumerate_pre_upho_colorings, monoid_of_coloring, realize_core, RealizeOptions, DEFAULT_CHAIN_CAP};
use uphocore::constructions::{build_lf, build_mn, fiber_function_of_partition, monoid_mf, monoid_poset, partitions, FiberFunction};
use uphocore::{canonical_form, IsoMode};

#[test]
fn survivors_include_every_partition_lattice() {
    for n in 2..=6 {
        let report = realize_core(&build_mn(n).unwrap(), &format!("M_{n}"), &RealizeOptions::new(4, 2)).unwrap();
        let survivors: BTreeSet<&str> = report.survivors.iter().map(|s| s.certificate.as_str()).collect();
        let family: BTreeSet<String> = partitions(n)
            .iter()
            .map(|l| canonical_form(&build_lf(&fiber_function_of_partition(l), 4).unwrap(), IsoMode::Plain).to_hex())
            .collect();
        assert_eq!(family.len(), partitions(n).len());
        assert!(family.iter().all(|c| survivors.contains(c.as_str())), "n={n}");
        assert!(report.survivors.len() >= partitions(n).len());
        assert_eq!(report.colorings_enumerated, n.pow(n as u32));
    }
}

#[test]
fn compiled_monoids_match_fiber_monoids_for_n4() {
    let l = build_mn(4).unwrap();
    for c in enumerate_pre_upho_colorings(&l).unwrap() {
        let values = (1..=4u32)
            .map(|atom| c.color(atom, 5).unwrap() as usize + 1)
            .collect();
        let f = FiberFunction::new(values).unwrap();
        let m = monoid_of_coloring(&l, &c, DEFAULT_CHAIN_CAP).unwrap();
        assert_eq!(
            canonical_form(&monoid_poset(&m, 4).unwrap(), IsoMode::Plain),
            canonical_form(&monoid_poset(&monoid_mf(&f), 4).unwrap(), IsoMode::Plain),
        );
    }
}

#[test]
fn reports_are_reproducible() {
    let l = build_mn(4).unwrap();
    let one = realize_core(&l, "M_4", &RealizeOptions::new(4, 2)).unwrap().to_json();
    let mut single = RealizeOptions::new(4, 2);
    single.workers = Some(1);
    let two = realize_core(&l, "M_4", &single).unwrap().to_json();
    assert_eq!(one, two);
}
