//! Small lattices and presentations used by the criteria.

use uphocore::coloring::Coloring;
use uphocore::{NodeId, Presentation, TruncatedPoset};

/// `⟨a,b,c | aa=ba, aaa=caa⟩`, the monoid of [`two_branch_coloring`].
pub const TWO_BRANCH_MONOID: &str = "gens: a b c\nrel: aa = ba\nrel: aaa = caa\n";
/// `⟨a,b | abb=baa⟩`, a monoid whose order is a meet semilattice but not a lattice.
pub const ALTERNATING_MONOID: &str = "gens: a b\nrel: abb = baa\n";
/// `⟨a,b,c | aa=ba, bb=cb, ab=cc⟩`, read off a coloring of `B_3` minus its top.
pub const SEMILATTICE_MONOID: &str = "gens: a b c\nrel: aa = ba\nrel: bb = cb\nrel: ab = cc\n";
/// `⟨a,b,c | aa=bb, ba=ca⟩`, proposed for [`symmetric_lattice`].
pub const SYMMETRIC_MONOID: &str = "gens: a b c\nrel: aa = bb\nrel: ba = ca\n";

pub fn parse(text: &str) -> Presentation {
    uphocore::presentation::parse_presentation(text).expect("built-in presentation parses")
}

fn lattice(ranks: Vec<Vec<NodeId>>, covers: &[(NodeId, NodeId)], labels: &[&str]) -> TruncatedPoset {
    let labels = labels.iter().map(|s| s.to_string()).collect();
    TruncatedPoset::new(ranks, covers, Some(labels)).expect("built-in lattice is valid")
}

/// Seven elements: atoms `a, b, c`; `d` covers `a, b`; `e` covers `c`.
pub fn two_branch_lattice() -> TruncatedPoset {
    lattice(
        vec![vec![0], vec![1, 2, 3], vec![4, 5], vec![6]],
        &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 5), (4, 6), (5, 6)],
        &["0", "a", "b", "c", "d", "e", "1"],
    )
}

/// Every edge above rank one colored `a`.
pub fn two_branch_coloring() -> Coloring {
    let l = two_branch_lattice();
    Coloring::of(&l.with_coloring(|x, y| if x == 0 { y - 1 } else { 0 })).expect("fully colored")
}

/// Seven elements: atoms `a, b, c`; `d` covers `a, b`; `e` covers `b, c`.
/// Swapping `a ↔ c` and `d ↔ e` is a nontrivial automorphism.
pub fn symmetric_lattice() -> TruncatedPoset {
    lattice(
        vec![vec![0], vec![1, 2, 3], vec![4, 5], vec![6]],
        &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (2, 5), (3, 5), (4, 6), (5, 6)],
        &["0", "a", "b", "c", "d", "e", "1"],
    )
}

/// The Boolean lattice `B_3` without its maximum.
pub fn b3_without_top() -> TruncatedPoset {
    lattice(
        vec![vec![0], vec![1, 2, 3], vec![4, 5, 6]],
        &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 4), (2, 6), (3, 5), (3, 6)],
        &["0", "a", "b", "c", "ab", "ac", "bc"],
    )
}
