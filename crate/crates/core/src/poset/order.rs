//! Bounds, lattice certificates, cores, filters, truncations and products.

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use super::{NodeId, TruncatedPoset};
use crate::iso::{canonical_form, IsoMode};

/// Antichain of bounds for every unordered pair `x ≤ y` of node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable {
    n: usize,
    entries: Vec<Vec<NodeId>>,
}

impl PairTable {
    fn index(&self, x: NodeId, y: NodeId) -> usize {
        let (a, b) = if x <= y { (x as usize, y as usize) } else { (y as usize, x as usize) };
        b * (b + 1) / 2 + a
    }

    pub fn get(&self, x: NodeId, y: NodeId) -> &[NodeId] {
        &self.entries[self.index(x, y)]
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// `(x, y, bounds)` for all `x ≤ y`.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId, &[NodeId])> + '_ {
        (0..self.n as NodeId).flat_map(move |y| (0..=y).map(move |x| (x, y, self.get(x, y))))
    }
}

fn minimal_elements(p: &TruncatedPoset, set: &FixedBitSet) -> Vec<NodeId> {
    set.ones()
        .filter(|&m| p.down(m as NodeId).iter().all(|&d| !set.contains(d as usize)))
        .map(|m| m as NodeId)
        .collect()
}

fn maximal_elements(p: &TruncatedPoset, set: &FixedBitSet) -> Vec<NodeId> {
    set.ones()
        .filter(|&m| p.up(m as NodeId).iter().all(|&u| !set.contains(u as usize)))
        .map(|m| m as NodeId)
        .collect()
}

fn intersect(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut s = a.clone();
    s.intersect_with(b);
    s
}

/// Minimal common upper bounds of `x` and `y` inside the truncation.
pub fn minimal_upper_bounds(p: &TruncatedPoset, ups: &[FixedBitSet], x: NodeId, y: NodeId) -> Vec<NodeId> {
    minimal_elements(p, &intersect(&ups[x as usize], &ups[y as usize]))
}

/// Maximal common lower bounds of `x` and `y`.
pub fn maximal_lower_bounds(p: &TruncatedPoset, downs: &[FixedBitSet], x: NodeId, y: NodeId) -> Vec<NodeId> {
    maximal_elements(p, &intersect(&downs[x as usize], &downs[y as usize]))
}

/// Minimal upper bounds of every pair.
pub fn joins_table(p: &TruncatedPoset) -> PairTable {
    let ups = p.up_sets();
    let n = p.len();
    let mut entries = Vec::with_capacity(n * (n + 1) / 2);
    for y in 0..n as NodeId {
        for x in 0..=y {
            entries.push(minimal_upper_bounds(p, &ups, x, y));
        }
    }
    PairTable { n, entries }
}

/// Maximal lower bounds of every pair.
pub fn meets_table(p: &TruncatedPoset) -> PairTable {
    let downs = p.down_sets();
    let n = p.len();
    let mut entries = Vec::with_capacity(n * (n + 1) / 2);
    for y in 0..n as NodeId {
        for x in 0..=y {
            entries.push(maximal_lower_bounds(p, &downs, x, y));
        }
    }
    PairTable { n, entries }
}

/// Outcome of [`lattice_certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum LatticeVerdict {
    /// No pair has two minimal upper bounds, meets are unique, and no pair
    /// that must have a join at this depth lacks an upper bound.
    LatticeToDepth { depth: usize },
    /// Two or more minimal upper bounds. Every lower bound set in a
    /// truncation is complete, so this holds in the full poset as well.
    JoinAmbiguity { x: NodeId, y: NodeId, bounds: Vec<NodeId> },
    /// Two or more maximal lower bounds (also definitive).
    MeetAmbiguity { x: NodeId, y: NodeId, bounds: Vec<NodeId> },
    /// No common upper bound although one was expected within the depth.
    /// Inconclusive: the bound may lie above the cut.
    JoinMissing { x: NodeId, y: NodeId },
}

impl LatticeVerdict {
    pub fn is_lattice(&self) -> bool {
        matches!(self, LatticeVerdict::LatticeToDepth { .. })
    }

    /// Definitive failures are the ambiguity verdicts.
    pub fn is_definitive_failure(&self) -> bool {
        matches!(self, LatticeVerdict::JoinAmbiguity { .. } | LatticeVerdict::MeetAmbiguity { .. })
    }

    pub fn describe(&self, p: &TruncatedPoset) -> String {
        let names = |v: &[NodeId]| v.iter().map(|&b| p.label(b)).collect::<Vec<_>>().join(", ");
        match self {
            LatticeVerdict::LatticeToDepth { depth } => format!("lattice up to depth {depth}"),
            LatticeVerdict::JoinAmbiguity { x, y, bounds } => format!(
                "not a lattice: {} and {} have minimal upper bounds {{{}}}",
                p.label(*x),
                p.label(*y),
                names(bounds)
            ),
            LatticeVerdict::MeetAmbiguity { x, y, bounds } => format!(
                "not a lattice: {} and {} have maximal lower bounds {{{}}}",
                p.label(*x),
                p.label(*y),
                names(bounds)
            ),
            LatticeVerdict::JoinMissing { x, y } => format!(
                "inconclusive: {} and {} have no common upper bound up to depth {}",
                p.label(*x),
                p.label(*y),
                p.depth()
            ),
        }
    }
}

/// Checks lattice behaviour within the truncation.
///
/// Pairs are scanned in ascending id order (hence by rank). Joins that are
/// expected inside the cut come from pairs of covers of a common element
/// `z`: in an upho lattice whose core has rank `r` such a pair has a join
/// of rank at most `ρ(z) + r`. Any other pair `x, y` is expected to have an
/// upper bound by rank `max(ρx, ρy) + r·min(ρx, ρy)`. That bound is a
/// heuristic, which is one reason a missing bound is only inconclusive.
pub fn lattice_certificate(p: &TruncatedPoset) -> LatticeVerdict {
    let ups = p.up_sets();
    let downs = p.down_sets();
    let n = p.len() as NodeId;
    for y in 0..n {
        for x in 0..y {
            if ups[x as usize].contains(y as usize) {
                continue;
            }
            let bounds = minimal_upper_bounds(p, &ups, x, y);
            if bounds.len() >= 2 {
                return LatticeVerdict::JoinAmbiguity { x, y, bounds };
            }
        }
    }
    for y in 0..n {
        for x in 0..y {
            if downs[y as usize].contains(x as usize) {
                continue;
            }
            let bounds = maximal_lower_bounds(p, &downs, x, y);
            if bounds.len() >= 2 {
                return LatticeVerdict::MeetAmbiguity { x, y, bounds };
            }
        }
    }
    let atoms: Vec<NodeId> = p.atoms().collect();
    let core_rank = match atoms_join(p, &ups) {
        Ok(j) => p.rank_of(j),
        Err(_) => {
            // no common upper bound of all atoms inside the cut
            for (i, &a) in atoms.iter().enumerate() {
                for &b in &atoms[i + 1..] {
                    if intersect(&ups[a as usize], &ups[b as usize]).count_ones(..) == 0 {
                        return LatticeVerdict::JoinMissing { x: a, y: b };
                    }
                }
            }
            return LatticeVerdict::JoinMissing {
                x: atoms[0],
                y: *atoms.last().expect("atoms are nonempty when the join is undetermined"),
            };
        }
    };
    for z in 0..n {
        if p.rank_of(z) + core_rank > p.depth() {
            break;
        }
        let covers = p.up(z);
        for (i, &a) in covers.iter().enumerate() {
            for &b in &covers[i + 1..] {
                if intersect(&ups[a as usize], &ups[b as usize]).count_ones(..) == 0 {
                    return LatticeVerdict::JoinMissing { x: a, y: b };
                }
            }
        }
    }
    // any other pair with no upper bound although the heuristic join rank fits
    for y in 1..n {
        for x in 1..y {
            let (rx, ry) = (p.rank_of(x), p.rank_of(y));
            if rx.max(ry) + core_rank * rx.min(ry) > p.depth() || ups[x as usize].contains(y as usize) {
                continue;
            }
            if intersect(&ups[x as usize], &ups[y as usize]).count_ones(..) == 0 {
                return LatticeVerdict::JoinMissing { x, y };
            }
        }
    }
    LatticeVerdict::LatticeToDepth { depth: p.depth() }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("core undetermined at this depth: the atoms have {} minimal upper bounds (deepen the truncation)", .candidates.len())]
    Undetermined { candidates: Vec<NodeId> },
}

fn atoms_join(p: &TruncatedPoset, ups: &[FixedBitSet]) -> Result<NodeId, CoreError> {
    let mut common = FixedBitSet::with_capacity(p.len());
    common.insert_range(..);
    for a in p.atoms() {
        common.intersect_with(&ups[a as usize]);
    }
    let bounds = minimal_elements(p, &common);
    match bounds.as_slice() {
        [j] => Ok(*j),
        _ => Err(CoreError::Undetermined { candidates: bounds }),
    }
}

fn up_set_of(p: &TruncatedPoset, v: NodeId) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(p.len());
    s.insert(v as usize);
    // ids are rank ordered, so one ascending sweep closes the set
    for w in v as usize..p.len() {
        if s.contains(w) {
            for &u in p.up(w as NodeId) {
                s.insert(u as usize);
            }
        }
    }
    s
}

fn down_set_of(p: &TruncatedPoset, v: NodeId) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(p.len());
    s.insert(v as usize);
    for w in (0..=v as usize).rev() {
        if s.contains(w) {
            for &d in p.down(w as NodeId) {
                s.insert(d as usize);
            }
        }
    }
    s
}

/// The join of the atoms, when it is determined inside the truncation.
pub fn core_top(p: &TruncatedPoset) -> Result<NodeId, CoreError> {
    if p.atoms().is_empty() {
        return Ok(0);
    }
    atoms_join(p, &p.up_sets())
}

/// The interval `[0̂, join of the atoms]`.
pub fn core(p: &TruncatedPoset) -> Result<TruncatedPoset, CoreError> {
    let top = core_top(p)?;
    let keep = down_set_of(p, top);
    Ok(p.induced(&keep, 0, p.rank_of(top)))
}

/// Smallest depth at which the truncation already determines the core.
///
/// Lower sets are complete at every depth, so once the atoms have a unique
/// minimal upper bound the core no longer changes.
pub fn core_stability_depth(p: &TruncatedPoset) -> Option<usize> {
    core_top(p).ok().map(|top| p.rank_of(top))
}

/// The principal filter `V_v`, re-ranked from 0.
pub fn order_filter(p: &TruncatedPoset, v: NodeId) -> TruncatedPoset {
    let r = p.rank_of(v);
    p.induced(&up_set_of(p, v), r, p.depth() - r)
}

/// Ranks `0..=depth` of `p`.
pub fn truncate(p: &TruncatedPoset, depth: usize) -> TruncatedPoset {
    let depth = depth.min(p.depth());
    let keep = down_closed_prefix(p, depth);
    p.induced(&keep, 0, depth)
}

fn down_closed_prefix(p: &TruncatedPoset, depth: usize) -> FixedBitSet {
    let mut keep = FixedBitSet::with_capacity(p.len());
    keep.insert_range(..p.rank(depth).end as usize);
    keep
}

/// Outcome of [`upho_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum UphoVerdict {
    Pass { probe: usize },
    Fail { node: NodeId },
}

impl UphoVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, UphoVerdict::Pass { .. })
    }
}

/// Checks `V_v ≅ P` (truncated to the filter's depth) for every `v` of rank `≤ k`.
pub fn upho_check(p: &TruncatedPoset, k: usize) -> UphoVerdict {
    upho_check_with(p, k, IsoMode::Plain)
}

pub(crate) fn upho_check_with(p: &TruncatedPoset, k: usize, mode: IsoMode) -> UphoVerdict {
    let k = k.min(p.depth());
    let mut reference: Vec<Option<(TruncatedPoset, Option<crate::iso::CanonicalForm>)>> = vec![None; k + 1];
    for v in 0..p.rank(k).end {
        let r = p.rank_of(v);
        let filter = order_filter(p, v);
        if reference[r].is_none() {
            let t = truncate(p, p.depth() - r);
            // colored comparisons go through the direct witness search
            let form = (mode == IsoMode::Plain).then(|| canonical_form(&t, mode));
            reference[r] = Some((t, form));
        }
        let (t, form) = reference[r].as_ref().expect("filled above");
        let same = filter.rank_sizes() == t.rank_sizes()
            && match form {
                Some(form) => canonical_form(&filter, mode) == *form,
                None => crate::iso::isomorphic(&filter, t, mode),
            };
        if !same {
            return UphoVerdict::Fail { node: v };
        }
    }
    UphoVerdict::Pass { probe: k }
}

/// Product poset truncated at the smaller depth.
///
/// When both factors are colored, colors of the second factor are shifted
/// past those of the first.
pub fn direct_product(p: &TruncatedPoset, q: &TruncatedPoset) -> TruncatedPoset {
    let depth = p.depth().min(q.depth());
    let mut ids: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); depth + 1];
    for a in 0..p.len() as NodeId {
        for b in 0..q.len() as NodeId {
            let r = p.rank_of(a) + q.rank_of(b);
            if r <= depth {
                ids[r].push((a, b));
            }
        }
    }
    let mut index = rustc_hash::FxHashMap::default();
    let mut ranks = Vec::with_capacity(depth + 1);
    let mut next = 0u32;
    for level in &mut ids {
        level.sort_unstable();
        let mut r = Vec::with_capacity(level.len());
        for &pair in level.iter() {
            index.insert(pair, next);
            r.push(next);
            next += 1;
        }
        ranks.push(r);
    }
    let shift = p.color_count() as u32;
    let mut covers = Vec::new();
    for level in &ids {
        for &(a, b) in level {
            let from = index[&(a, b)];
            for (j, &a2) in p.up(a).iter().enumerate() {
                if let Some(&to) = index.get(&(a2, b)) {
                    covers.push((from, to, p.up_colors(a).map_or(0, |c| c[j])));
                }
            }
            for (j, &b2) in q.up(b).iter().enumerate() {
                if let Some(&to) = index.get(&(a, b2)) {
                    covers.push((from, to, shift + q.up_colors(b).map_or(0, |c| c[j])));
                }
            }
        }
    }
    let labels = if p.labels().is_some() || q.labels().is_some() {
        Some(
            ids.iter()
                .flatten()
                .map(|&(a, b)| format!("({},{})", p.label(a), q.label(b)))
                .collect(),
        )
    } else {
        None
    };
    let out = TruncatedPoset::from_colored_covers(ranks, &covers, labels).expect("product of graded posets is graded");
    if p.is_colored() && q.is_colored() {
        out
    } else {
        out.without_colors()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{rank_series, tests::b2};

    fn chain(n: usize) -> TruncatedPoset {
        let ranks = (0..=n as u32).map(|i| vec![i]).collect();
        let covers: Vec<(u32, u32)> = (0..n as u32).map(|i| (i, i + 1)).collect();
        TruncatedPoset::new(ranks, &covers, None).unwrap()
    }

    #[test]
    fn joins_and_meets_of_b2() {
        let p = b2();
        let j = joins_table(&p);
        assert_eq!(j.get(1, 2), &[3]);
        assert_eq!(j.get(2, 1), &[3]);
        assert_eq!(j.get(2, 2), &[2]);
        let m = meets_table(&p);
        assert_eq!(m.get(1, 2), &[0]);
        assert_eq!(lattice_certificate(&p), LatticeVerdict::LatticeToDepth { depth: 2 });
    }

    #[test]
    fn bowtie_is_ambiguous() {
        // two atoms both covered by two rank-2 elements
        let p = TruncatedPoset::new(
            vec![vec![0], vec![1, 2], vec![3, 4]],
            &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 4)],
            None,
        )
        .unwrap();
        assert_eq!(
            lattice_certificate(&p),
            LatticeVerdict::JoinAmbiguity { x: 1, y: 2, bounds: vec![3, 4] }
        );
        assert!(core(&p).is_err());
    }

    #[test]
    fn chain_is_lattice() {
        assert!(lattice_certificate(&chain(2)).is_lattice());
    }

    #[test]
    fn missing_join_of_atoms() {
        let p = TruncatedPoset::new(vec![vec![0], vec![1, 2], vec![3, 4]], &[(0, 1), (0, 2), (1, 3), (2, 4)], None)
            .unwrap();
        assert_eq!(lattice_certificate(&p), LatticeVerdict::JoinMissing { x: 1, y: 2 });
    }

    #[test]
    fn core_of_b2_is_b2() {
        let p = b2();
        assert_eq!(core(&p).unwrap(), p);
        assert_eq!(core_stability_depth(&p), Some(2));
    }

    #[test]
    fn filter_of_bottom_is_identity() {
        let p = b2();
        assert_eq!(order_filter(&p, 0), p);
        let f = order_filter(&p, 1);
        assert_eq!(f.rank_sizes(), vec![1, 1]);
    }

    #[test]
    fn truncation() {
        let p = b2();
        assert_eq!(truncate(&p, 1).rank_sizes(), vec![1, 2]);
        assert_eq!(truncate(&p, 5), p);
    }

    #[test]
    fn product_of_chains() {
        let p = direct_product(&chain(2), &chain(2));
        assert_eq!(p.rank_sizes(), vec![1, 2, 3]);
        let big = direct_product(&chain(3), &b2());
        let expect = rank_series(&chain(3)).mul_trunc(&rank_series(&b2()));
        assert_eq!(rank_series(&big), expect);
    }

    #[test]
    fn finite_lattice_is_not_upho() {
        assert_eq!(upho_check(&b2(), 1), UphoVerdict::Fail { node: 1 });
        assert!(upho_check(&chain(3), 3).passed());
    }
}
