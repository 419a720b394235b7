//! Truncated finite-type graded posets and their order/enumerative analysis.

mod io;
mod order;
mod series;

pub use io::{from_json, to_json, PosetDocument};
pub use order::{
    core, core_stability_depth, direct_product, joins_table, lattice_certificate, maximal_lower_bounds,
    meets_table, minimal_upper_bounds, order_filter, truncate, upho_check, CoreError, LatticeVerdict, core_top,
    PairTable, UphoVerdict,
};
pub(crate) use order::upho_check_with;
pub use series::{char_series, mobius_from_bottom, rank_series, series_invert, MobiusVector, PowerSeriesTrunc, SeriesError};

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Dense node identifier.
pub type NodeId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("invalid poset: {0}")]
    Invalid(String),
    #[error("malformed poset document: {0}")]
    Format(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, PosetError> {
    Err(PosetError::Invalid(msg.into()))
}

/// A graded poset with a unique minimum, cut at rank `depth`.
///
/// Node ids are contiguous per rank in ascending order, so rank `i` holds the
/// ids `offset(i)..offset(i+1)`. Up-cover lists are sorted; when edges are
/// colored, `up_colors[v][j]` is the color of the edge `v ⋖ up[v][j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedPoset {
    depth: usize,
    offsets: Vec<u32>,
    rank_of: Vec<u32>,
    up: Vec<Vec<NodeId>>,
    down: Vec<Vec<NodeId>>,
    up_colors: Option<Vec<Vec<u32>>>,
    labels: Option<Vec<String>>,
}

impl TruncatedPoset {
    /// Builds an uncolored poset from per-rank node lists and cover pairs `(lower, upper)`.
    pub fn new(ranks: Vec<Vec<NodeId>>, covers: &[(NodeId, NodeId)], labels: Option<Vec<String>>) -> Result<Self, PosetError> {
        let colored: Vec<(NodeId, NodeId, Option<u32>)> = covers.iter().map(|&(l, u)| (l, u, None)).collect();
        Self::assemble(ranks, &colored, labels, false)
    }

    /// Builds a poset whose cover edges carry colors: `(lower, upper, color)`.
    pub fn from_colored_covers(
        ranks: Vec<Vec<NodeId>>,
        covers: &[(NodeId, NodeId, u32)],
        labels: Option<Vec<String>>,
    ) -> Result<Self, PosetError> {
        let colored: Vec<(NodeId, NodeId, Option<u32>)> = covers.iter().map(|&(l, u, c)| (l, u, Some(c))).collect();
        Self::assemble(ranks, &colored, labels, true)
    }

    fn assemble(
        ranks: Vec<Vec<NodeId>>,
        covers: &[(NodeId, NodeId, Option<u32>)],
        labels: Option<Vec<String>>,
        colored: bool,
    ) -> Result<Self, PosetError> {
        if ranks.is_empty() {
            return invalid("no ranks");
        }
        if ranks[0].len() != 1 {
            return invalid(format!("rank 0 must hold exactly one node, found {}", ranks[0].len()));
        }
        let mut offsets = Vec::with_capacity(ranks.len() + 1);
        let mut next = 0u32;
        let mut rank_of = Vec::new();
        for (i, r) in ranks.iter().enumerate() {
            offsets.push(next);
            for &v in r {
                if v != next {
                    return invalid(format!(
                        "node ids must be contiguous per rank in ascending order (rank {i} lists {v}, expected {next})"
                    ));
                }
                next += 1;
                rank_of.push(i as u32);
            }
        }
        offsets.push(next);
        let n = next as usize;
        let depth = ranks.len() - 1;
        let mut up: Vec<Vec<(NodeId, Option<u32>)>> = vec![Vec::new(); n];
        let mut down: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for &(l, u, c) in covers {
            if l as usize >= n || u as usize >= n {
                return invalid(format!("cover ({l}, {u}) names an unknown node"));
            }
            if rank_of[u as usize] != rank_of[l as usize] + 1 {
                return invalid(format!("cover ({l}, {u}) does not join consecutive ranks"));
            }
            up[l as usize].push((u, c));
            down[u as usize].push(l);
        }
        for (v, list) in up.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0].0 == w[1].0) {
                return invalid(format!("duplicate cover above node {v}"));
            }
        }
        for (v, list) in down.iter_mut().enumerate() {
            list.sort_unstable();
            if v > 0 && list.is_empty() {
                return invalid(format!("node {v} has rank {} but no lower cover", rank_of[v]));
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return invalid(format!("{} labels for {n} nodes", l.len()));
            }
        }
        let up_colors = if colored {
            Some(up.iter().map(|l| l.iter().map(|&(_, c)| c.unwrap_or(0)).collect()).collect())
        } else {
            None
        };
        let up = up.into_iter().map(|l| l.into_iter().map(|(u, _)| u).collect()).collect();
        Ok(TruncatedPoset {
            depth,
            offsets,
            rank_of,
            up,
            down,
            up_colors,
            labels,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.rank_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank_of.is_empty()
    }

    pub fn bottom(&self) -> NodeId {
        0
    }

    /// Node ids at rank `i`.
    pub fn rank(&self, i: usize) -> std::ops::Range<NodeId> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn rank_sizes(&self) -> Vec<usize> {
        (0..=self.depth).map(|i| (self.offsets[i + 1] - self.offsets[i]) as usize).collect()
    }

    /// Node ids grouped by rank.
    pub fn ranks(&self) -> Vec<Vec<NodeId>> {
        (0..=self.depth).map(|i| self.rank(i).collect()).collect()
    }

    pub fn rank_of(&self, v: NodeId) -> usize {
        self.rank_of[v as usize] as usize
    }

    pub fn atoms(&self) -> std::ops::Range<NodeId> {
        if self.depth == 0 {
            1..1
        } else {
            self.rank(1)
        }
    }

    pub fn up(&self, v: NodeId) -> &[NodeId] {
        &self.up[v as usize]
    }

    pub fn down(&self, v: NodeId) -> &[NodeId] {
        &self.down[v as usize]
    }

    pub fn is_colored(&self) -> bool {
        self.up_colors.is_some()
    }

    /// Colors parallel to [`up`](Self::up), if the edges are colored.
    pub fn up_colors(&self, v: NodeId) -> Option<&[u32]> {
        self.up_colors.as_ref().map(|c| c[v as usize].as_slice())
    }

    /// Color of the cover `l ⋖ u`.
    pub fn color(&self, l: NodeId, u: NodeId) -> Option<u32> {
        let colors = self.up_colors.as_ref()?;
        let j = self.up[l as usize].binary_search(&u).ok()?;
        Some(colors[l as usize][j])
    }

    /// Number of distinct colors used (largest color + 1).
    pub fn color_count(&self) -> usize {
        self.up_colors
            .as_ref()
            .map(|c| c.iter().flatten().map(|&x| x as usize + 1).max().unwrap_or(0))
            .unwrap_or(0)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: NodeId) -> String {
        match &self.labels {
            Some(l) => l[v as usize].clone(),
            None => v.to_string(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.up.iter().map(Vec::len).sum()
    }

    /// All covers `(lower, upper, color)` in ascending order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId, Option<u32>)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for v in 0..self.len() as NodeId {
            for (j, &u) in self.up(v).iter().enumerate() {
                out.push((v, u, self.up_colors(v).map(|c| c[j])));
            }
        }
        out
    }

    /// Replaces all edge colors; `color(l, u)` is queried for each cover.
    pub fn with_coloring(&self, mut color: impl FnMut(NodeId, NodeId) -> u32) -> TruncatedPoset {
        let mut p = self.clone();
        p.up_colors = Some(
            (0..self.len() as NodeId)
                .map(|v| self.up(v).iter().map(|&u| color(v, u)).collect())
                .collect(),
        );
        p
    }

    pub fn without_colors(&self) -> TruncatedPoset {
        let mut p = self.clone();
        p.up_colors = None;
        p
    }

    pub fn with_labels(&self, labels: Option<Vec<String>>) -> TruncatedPoset {
        assert!(labels.as_ref().is_none_or(|l| l.len() == self.len()));
        let mut p = self.clone();
        p.labels = labels;
        p
    }

    /// For each node, the set of nodes `≤` it (including itself).
    pub fn down_sets(&self) -> Vec<FixedBitSet> {
        let n = self.len();
        let mut sets: Vec<FixedBitSet> = Vec::with_capacity(n);
        for v in 0..n {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(v);
            for &d in &self.down[v] {
                s.union_with(&sets[d as usize]);
            }
            sets.push(s);
        }
        sets
    }

    /// For each node, the set of nodes `≥` it (including itself).
    pub fn up_sets(&self) -> Vec<FixedBitSet> {
        let n = self.len();
        let mut sets: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); n];
        for v in (0..n).rev() {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(v);
            for &u in &self.up[v] {
                s.union_with(&sets[u as usize]);
            }
            sets[v] = s;
        }
        sets
    }

    /// Induced subposet on `keep`, which must be convex and have a unique
    /// minimum at rank `base`. Ranks are shifted down by `base`, keeping at
    /// most ranks `base..=base+depth`.
    pub(crate) fn induced(&self, keep: &FixedBitSet, base: usize, depth: usize) -> TruncatedPoset {
        let mut new_id = vec![u32::MAX; self.len()];
        let mut ranks: Vec<Vec<NodeId>> = vec![Vec::new(); depth + 1];
        let mut next = 0u32;
        for v in keep.ones() {
            let r = self.rank_of(v as NodeId);
            if r < base || r > base + depth {
                continue;
            }
            new_id[v] = next;
            ranks[r - base].push(next);
            next += 1;
        }
        while ranks.len() > 1 && ranks.last().is_some_and(Vec::is_empty) {
            ranks.pop();
        }
        let mut covers = Vec::new();
        let mut labels = self.labels.as_ref().map(|_| Vec::with_capacity(next as usize));
        for v in keep.ones() {
            if new_id[v] == u32::MAX {
                continue;
            }
            if let (Some(out), Some(src)) = (labels.as_mut(), self.labels.as_ref()) {
                out.push(src[v].clone());
            }
            for (j, &u) in self.up[v].iter().enumerate() {
                if new_id[u as usize] != u32::MAX {
                    let c = self.up_colors.as_ref().map_or(0, |c| c[v][j]);
                    covers.push((new_id[v], new_id[u as usize], c));
                }
            }
        }
        let p = TruncatedPoset::from_colored_covers(ranks, &covers, labels)
            .expect("induced subposet of a convex set is valid");
        if self.is_colored() {
            p
        } else {
            p.without_colors()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn b2() -> TruncatedPoset {
        TruncatedPoset::new(vec![vec![0], vec![1, 2], vec![3]], &[(0, 1), (0, 2), (1, 3), (2, 3)], None).unwrap()
    }

    #[test]
    fn basic_accessors() {
        let p = b2();
        assert_eq!(p.len(), 4);
        assert_eq!(p.depth(), 2);
        assert_eq!(p.rank_sizes(), vec![1, 2, 1]);
        assert_eq!(p.up(0), &[1, 2]);
        assert_eq!(p.down(3), &[1, 2]);
        assert_eq!(p.edge_count(), 4);
        assert!(!p.is_colored());
    }

    #[test]
    fn validation() {
        assert!(TruncatedPoset::new(vec![vec![0, 1]], &[], None).is_err());
        assert!(TruncatedPoset::new(vec![vec![0], vec![2, 1]], &[(0, 1), (0, 2)], None).is_err());
        assert!(TruncatedPoset::new(vec![vec![0], vec![1], vec![2]], &[(0, 1)], None).is_err());
        assert!(TruncatedPoset::new(vec![vec![0], vec![1], vec![2]], &[(0, 1), (0, 2)], None).is_err());
        assert!(TruncatedPoset::new(vec![vec![0], vec![1]], &[(0, 1), (0, 1)], None).is_err());
    }

    #[test]
    fn closures() {
        let p = b2();
        let d = p.down_sets();
        assert_eq!(d[3].ones().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let u = p.up_sets();
        assert_eq!(u[1].ones().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn colors() {
        let p = b2().with_coloring(|l, u| if l == 0 { u - 1 } else { 2 - l });
        assert_eq!(p.color(0, 2), Some(1));
        assert_eq!(p.color(1, 3), Some(1));
        assert_eq!(p.color_count(), 2);
    }
}
