//! Builders for the named posets and monoids: `D_n`, `F_n`, `M(f)`, `f_λ`,
//! `M_n`, `B_n`, chains, the free commutative monoid and the shifted monoid.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::poset::{NodeId, TruncatedPoset};
use crate::presentation::{
    build_element_table_capped, divisibility_covers, Presentation, PresentationError, Word, DEFAULT_WORD_CAP,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self, ConstructionError> {
        if parts.contains(&0) {
            return Err(ConstructionError::Parameter("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(ConstructionError::Parameter("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }
}

impl FromStr for Partition {
    type Err = ConstructionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Partition::new(parse_list(s)?)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>, ConstructionError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| ConstructionError::Parameter(format!("`{}` is not a nonnegative integer", t.trim())))
        })
        .collect()
}

/// All partitions of `n`, in reverse lexicographic order (starting with `(n)`).
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            prefix.push(p);
            rec(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// A function `f: [n] → [n]`, stored with 1-based values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberFunction {
    values: Vec<usize>,
}

impl FiberFunction {
    pub fn new(values: Vec<usize>) -> Result<Self, ConstructionError> {
        let n = values.len();
        if n == 0 {
            return Err(ConstructionError::Parameter("a fiber function needs n ≥ 1".into()));
        }
        if let Some(&bad) = values.iter().find(|&&v| v == 0 || v > n) {
            return Err(ConstructionError::Parameter(format!("value {bad} is outside [1, {n}]")));
        }
        Ok(FiberFunction { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `f(i)` for `1 ≤ i ≤ n`.
    pub fn apply(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn image_size(&self) -> usize {
        let mut v = self.values.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.image_size() == self.n()
    }

    /// Sorted fiber sizes as a partition of `n`.
    pub fn fiber_partition(&self) -> Partition {
        let mut sizes = vec![0usize; self.n()];
        for &v in &self.values {
            sizes[v - 1] += 1;
        }
        let mut parts: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// All `n^n` functions in lexicographic order of their value lists.
    pub fn all(n: usize) -> impl Iterator<Item = FiberFunction> {
        let total = (n as u64).pow(n as u32);
        (0..total).map(move |mut code| {
            let mut values = vec![0usize; n];
            for slot in values.iter_mut().rev() {
                *slot = (code % n as u64) as usize + 1;
                code /= n as u64;
            }
            FiberFunction { values }
        })
    }
}

impl FromStr for FiberFunction {
    type Err = ConstructionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FiberFunction::new(parse_list(s)?)
    }
}

impl fmt::Display for FiberFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.values.iter().map(usize::to_string).collect();
        write!(f, "{}", v.join(","))
    }
}

fn require(cond: bool, msg: &str) -> Result<(), ConstructionError> {
    if cond {
        Ok(())
    } else {
        Err(ConstructionError::Parameter(msg.into()))
    }
}

/// Assembles a poset from ranks built as lists of lower-cover lists.
fn from_layers(layers: &[Vec<Vec<NodeId>>]) -> TruncatedPoset {
    let mut ranks = Vec::with_capacity(layers.len());
    let mut covers = Vec::new();
    let mut next = 0u32;
    let mut offset_prev = 0u32;
    for layer in layers {
        let offset = next;
        let mut r = Vec::with_capacity(layer.len());
        for lowers in layer {
            for &l in lowers {
                covers.push((offset_prev + l, next));
            }
            r.push(next);
            next += 1;
        }
        ranks.push(r);
        offset_prev = offset;
    }
    TruncatedPoset::new(ranks, &covers, None).expect("layered construction is graded")
}

/// Depth-`depth` truncation of the dominating vertex construction `D_n`.
///
/// Each rank starts with the node covering the whole rank below, followed
/// by `n − 1` private children of each lower node in order.
pub fn build_dn(n: usize, depth: usize) -> Result<TruncatedPoset, ConstructionError> {
    require(n >= 2, "D_n needs n ≥ 2")?;
    // layers[i][j] = lower covers of node j of rank i, as indices within rank i−1
    let mut layers: Vec<Vec<Vec<NodeId>>> = vec![vec![Vec::new()]];
    for i in 1..=depth {
        let below = layers[i - 1].len() as NodeId;
        let mut layer = vec![(0..below).collect::<Vec<_>>()];
        for p in 0..below {
            for _ in 0..n - 1 {
                layer.push(vec![p]);
            }
        }
        layers.push(layer);
    }
    Ok(from_layers(&layers))
}

/// Depth-`depth` truncation of the flip construction `F_n`.
///
/// Each rank starts with the flips of the rank two below (in order),
/// followed by private children topping every lower node up to `n` covers.
pub fn build_fn(n: usize, depth: usize) -> Result<TruncatedPoset, ConstructionError> {
    require(n >= 2, "F_n needs n ≥ 2")?;
    let mut layers: Vec<Vec<Vec<NodeId>>> = vec![vec![Vec::new()]];
    if depth >= 1 {
        layers.push(vec![vec![0]; n]);
    }
    for i in 2..=depth {
        let below = layers[i - 1].len();
        // up covers of each rank i−2 node, as indices within rank i−1
        let mut up_of_grand: Vec<Vec<NodeId>> = vec![Vec::new(); layers[i - 2].len()];
        for (q, lowers) in layers[i - 1].iter().enumerate() {
            for &p in lowers {
                up_of_grand[p as usize].push(q as NodeId);
            }
        }
        let mut layer: Vec<Vec<NodeId>> = up_of_grand;
        let mut up_count = vec![0usize; below];
        for lowers in &layer {
            for &q in lowers {
                up_count[q as usize] += 1;
            }
        }
        for (q, &c) in up_count.iter().enumerate() {
            for _ in c..n {
                layer.push(vec![q as NodeId]);
            }
        }
        layers.push(layer);
    }
    Ok(from_layers(&layers))
}

/// `M(f) = ⟨s_1,…,s_n | s_1 s_{f(1)} = ⋯ = s_n s_{f(n)}⟩`, chained as `n − 1` adjacent equalities.
pub fn monoid_mf(f: &FiberFunction) -> Presentation {
    let n = f.n();
    let word = |i: usize| Word(vec![(i - 1) as u8, (f.apply(i) - 1) as u8]);
    let relations = (1..n).map(|i| (word(i), word(i + 1))).collect();
    Presentation::with_indexed_names(n, relations).expect("M(f) is a valid homogeneous presentation")
}

/// The block-constant idempotent `f_λ`: each block of `λ` maps to its last element.
pub fn fiber_function_of_partition(lambda: &Partition) -> FiberFunction {
    let mut values = Vec::with_capacity(lambda.n());
    let mut end = 0;
    for &part in lambda.parts() {
        end += part;
        values.extend(std::iter::repeat_n(end, part));
    }
    FiberFunction { values }
}

/// The rank-two lattice with `n` atoms.
pub fn build_mn(n: usize) -> Result<TruncatedPoset, ConstructionError> {
    require(n >= 1, "M_n needs n ≥ 1")?;
    let layers = vec![vec![vec![]], vec![vec![0]; n], vec![(0..n as NodeId).collect()]];
    Ok(from_layers(&layers))
}

/// The Boolean lattice of subsets of `[n]`; within a rank, subsets are ordered as bitmasks.
pub fn build_bn(n: usize) -> Result<TruncatedPoset, ConstructionError> {
    require(n <= 20, "B_n is limited to n ≤ 20")?;
    let mut by_rank: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for s in 0..1u32 << n {
        by_rank[s.count_ones() as usize].push(s);
    }
    let mut index = vec![0u32; 1 << n];
    for level in &by_rank {
        for (i, &s) in level.iter().enumerate() {
            index[s as usize] = i as u32;
        }
    }
    let layers: Vec<Vec<Vec<NodeId>>> = by_rank
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|&s| (0..n).filter(|b| s & (1 << b) != 0).map(|b| index[(s & !(1 << b)) as usize]).collect())
                .collect()
        })
        .collect();
    Ok(from_layers(&layers))
}

/// The chain `0 < 1 < ⋯ < depth`.
pub fn build_chain(depth: usize) -> TruncatedPoset {
    let layers: Vec<Vec<Vec<NodeId>>> = (0..=depth).map(|i| vec![if i == 0 { vec![] } else { vec![0] }]).collect();
    from_layers(&layers)
}

/// `⟨s_1,…,s_n | s_i s_j = s_j s_i for i < j⟩`.
pub fn monoid_free_commutative(n: usize) -> Result<Presentation, ConstructionError> {
    require(n >= 1, "needs n ≥ 1")?;
    let mut relations = Vec::new();
    for i in 0..n as u8 {
        for j in i + 1..n as u8 {
            relations.push((Word(vec![i, j]), Word(vec![j, i])));
        }
    }
    Ok(Presentation::with_indexed_names(n, relations)?)
}

/// `⟨s_1,…,s_n | s_i s_{j−1} = s_j s_i for 1 ≤ i < j ≤ n⟩`.
pub fn monoid_shifted(n: usize) -> Result<Presentation, ConstructionError> {
    require(n >= 1, "needs n ≥ 1")?;
    let mut relations = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let l = Word(vec![(i - 1) as u8, (j - 2) as u8]);
            let r = Word(vec![(j - 1) as u8, (i - 1) as u8]);
            relations.push((l, r));
        }
    }
    Ok(Presentation::with_indexed_names(n, relations)?)
}

/// Left-divisibility truncation of a presentation (colored by generator).
pub fn monoid_poset(p: &Presentation, depth: usize) -> Result<TruncatedPoset, ConstructionError> {
    monoid_poset_capped(p, depth, DEFAULT_WORD_CAP)
}

pub fn monoid_poset_capped(p: &Presentation, depth: usize, cap: u64) -> Result<TruncatedPoset, ConstructionError> {
    let table = build_element_table_capped(p, depth, cap)?;
    Ok(divisibility_covers(p, &table))
}

/// The truncation of `L(f)`, the divisibility order of `M(f)`.
pub fn build_lf(f: &FiberFunction, depth: usize) -> Result<TruncatedPoset, ConstructionError> {
    monoid_poset(&monoid_mf(f), depth)
}
