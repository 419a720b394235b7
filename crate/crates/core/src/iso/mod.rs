//! Rank-preserving isomorphism, canonical forms and automorphism groups of
//! truncated posets, optionally respecting edge colors.

mod graph;
mod search;

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::poset::{NodeId, TruncatedPoset};
use graph::{poset_graph, reduce_twins, Reduced};
use search::{canonical_labeling, Labeling};

/// How edge colors take part in isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IsoMode {
    /// Colors are ignored.
    Plain,
    /// Colors are preserved up to a renaming of the atom ids.
    Colored,
    /// Colors are preserved exactly. Automorphisms in [`IsoMode::Colored`]
    /// are computed in this mode.
    ColorExact,
}

impl IsoMode {
    fn tag(self) -> u8 {
        match self {
            IsoMode::Plain => 0,
            IsoMode::Colored => 1,
            IsoMode::ColorExact => 2,
        }
    }
}

/// Certificate of a poset up to isomorphism in a given mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u8>);

impl CanonicalForm {
    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        hex::decode(s).map(CanonicalForm)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A node bijection `P → Q`, with the color renaming used (if any).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoMap {
    pub map: Vec<NodeId>,
    pub color_map: Option<Vec<u32>>,
}

impl IsoMap {
    pub fn identity(n: usize) -> IsoMap {
        IsoMap {
            map: (0..n as NodeId).collect(),
            color_map: None,
        }
    }

    pub fn apply(&self, v: NodeId) -> NodeId {
        self.map[v as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i as NodeId == v)
    }
}

/// Order and generators of the automorphism group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismGroup {
    pub order: BigUint,
    pub generators: Vec<IsoMap>,
}

struct Canon {
    reduced: Reduced,
    labeling: Labeling,
    perm: Option<Vec<u32>>,
}

fn encode(p: &TruncatedPoset, mode: IsoMode, kinds: usize, cert: &[u32]) -> CanonicalForm {
    let mut bytes = Vec::with_capacity(16 + 4 * cert.len());
    bytes.push(mode.tag());
    bytes.extend_from_slice(&(p.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&(kinds as u32).to_le_bytes());
    for &x in cert {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    CanonicalForm(bytes)
}

fn canon_with(p: &TruncatedPoset, perm: Option<Vec<u32>>) -> Canon {
    let g = poset_graph(p, perm.as_deref());
    let reduced = reduce_twins(&g);
    let labeling = canonical_labeling(&reduced.graph);
    Canon {
        reduced,
        labeling,
        perm,
    }
}

fn permutations(k: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i as u32);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn canon(p: &TruncatedPoset, mode: IsoMode) -> Canon {
    let colors = p.color_count().max(1);
    match mode {
        IsoMode::Plain => canon_with(p, None),
        IsoMode::ColorExact => canon_with(p, Some((0..colors as u32).collect())),
        IsoMode::Colored => permutations(colors)
            .into_iter()
            .map(|perm| canon_with(p, Some(perm)))
            .min_by(|a, b| a.labeling.cert.cmp(&b.labeling.cert))
            .expect("at least one permutation"),
    }
}

fn kinds_of(p: &TruncatedPoset, mode: IsoMode) -> usize {
    match mode {
        IsoMode::Plain => 2,
        _ => 2 * p.color_count().max(1),
    }
}

/// Canonical certificate of `p` in the given mode.
///
/// Colored modes require `p` to carry edge colors; an uncolored poset is
/// treated as having every edge colored `0`.
pub fn canonical_form(p: &TruncatedPoset, mode: IsoMode) -> CanonicalForm {
    let c = canon(p, mode);
    encode(p, mode, kinds_of(p, mode), &c.labeling.cert)
}

/// Original node order induced by a canonical labeling.
fn canonical_order(c: &Canon) -> Vec<NodeId> {
    c.labeling
        .lab
        .iter()
        .flat_map(|&r| c.reduced.classes[r as usize].iter().copied())
        .collect()
}

fn color_deterministic(p: &TruncatedPoset) -> bool {
    (0..p.len() as NodeId).all(|v| {
        let cs = p.up_colors(v).unwrap_or(&[]);
        let mut seen: Vec<u32> = cs.to_vec();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    })
}

/// Follows colors from the minimum. Valid only when `p` is color deterministic.
fn forced_color_map(p: &TruncatedPoset, q: &TruncatedPoset) -> Option<IsoMap> {
    if p.rank_sizes() != q.rank_sizes() || p.edge_count() != q.edge_count() {
        return None;
    }
    let mut map = vec![u32::MAX; p.len()];
    map[0] = 0;
    for v in 0..p.len() as NodeId {
        let w = map[v as usize];
        if w == u32::MAX {
            return None;
        }
        let pc = p.up_colors(v)?;
        let qc = q.up_colors(w)?;
        if pc.len() != qc.len() {
            return None;
        }
        for (j, &u) in p.up(v).iter().enumerate() {
            let k = qc.iter().position(|&c| c == pc[j])?;
            let target = q.up(w)[k];
            match map[u as usize] {
                x if x == u32::MAX => map[u as usize] = target,
                x if x == target => {}
                _ => return None,
            }
        }
    }
    let candidate = IsoMap { map, color_map: None };
    verify_isomorphism(p, q, &candidate, IsoMode::ColorExact).then_some(candidate)
}

/// A witness isomorphism `p → q`, or `None` when none exists.
pub fn find_isomorphism(p: &TruncatedPoset, q: &TruncatedPoset, mode: IsoMode) -> Option<IsoMap> {
    if p.len() != q.len() || p.rank_sizes() != q.rank_sizes() || p.edge_count() != q.edge_count() {
        return None;
    }
    if mode == IsoMode::ColorExact && p.is_colored() && q.is_colored() && color_deterministic(p) && color_deterministic(q) {
        return forced_color_map(p, q);
    }
    if mode == IsoMode::Colored && p.color_count() != q.color_count() {
        return None;
    }
    let cp = canon(p, mode);
    let cq = canon(q, mode);
    if cp.labeling.cert != cq.labeling.cert {
        return None;
    }
    let op = canonical_order(&cp);
    let oq = canonical_order(&cq);
    let mut map = vec![0; p.len()];
    for (i, &v) in op.iter().enumerate() {
        map[v as usize] = oq[i];
    }
    let color_map = match (mode, &cp.perm, &cq.perm) {
        (IsoMode::Colored, Some(pp), Some(pq)) => {
            let mut inv = vec![0u32; pq.len()];
            for (c, &x) in pq.iter().enumerate() {
                inv[x as usize] = c as u32;
            }
            Some(pp.iter().map(|&x| inv[x as usize]).collect())
        }
        _ => None,
    };
    let iso = IsoMap { map, color_map };
    debug_assert!(verify_isomorphism(p, q, &iso, mode));
    Some(iso)
}

/// True iff `p` and `q` are isomorphic in the given mode.
pub fn isomorphic(p: &TruncatedPoset, q: &TruncatedPoset, mode: IsoMode) -> bool {
    find_isomorphism(p, q, mode).is_some()
}

/// Checks that `iso` is a cover- (and color-) preserving bijection `p → q`.
pub fn verify_isomorphism(p: &TruncatedPoset, q: &TruncatedPoset, iso: &IsoMap, mode: IsoMode) -> bool {
    if p.len() != q.len() || iso.map.len() != p.len() || p.edge_count() != q.edge_count() {
        return false;
    }
    let mut hit = vec![false; q.len()];
    for (v, &w) in iso.map.iter().enumerate() {
        if w as usize >= q.len() || hit[w as usize] || p.rank_of(v as NodeId) != q.rank_of(w) {
            return false;
        }
        hit[w as usize] = true;
    }
    for (l, u, c) in p.edges() {
        let (ml, mu) = (iso.apply(l), iso.apply(u));
        if q.up(ml).binary_search(&mu).is_err() {
            return false;
        }
        let want = match mode {
            IsoMode::Plain => continue,
            IsoMode::ColorExact => c,
            IsoMode::Colored => match (&iso.color_map, c) {
                (Some(m), Some(c)) => Some(m[c as usize]),
                (None, c) => c,
                (Some(_), None) => None,
            },
        };
        if want.unwrap_or(0) != q.color(ml, mu).unwrap_or(0) {
            return false;
        }
    }
    true
}

/// Exact automorphism group order with a generating set.
pub fn automorphisms(p: &TruncatedPoset, mode: IsoMode) -> AutomorphismGroup {
    let mode = if mode == IsoMode::Colored { IsoMode::ColorExact } else { mode };
    let c = canon(p, mode);
    let classes = &c.reduced.classes;
    let mut order = c.labeling.order.clone();
    let mut generators = Vec::new();
    for members in classes {
        let m = members.len() as u64;
        for k in 2..=m {
            order *= k;
        }
        for w in members.windows(2) {
            let mut map: Vec<NodeId> = (0..p.len() as NodeId).collect();
            map.swap(w[0] as usize, w[1] as usize);
            generators.push(IsoMap { map, color_map: None });
        }
    }
    for gamma in &c.labeling.generators {
        let mut map = vec![0; p.len()];
        for (r, members) in classes.iter().enumerate() {
            let image = &classes[gamma[r] as usize];
            for (i, &v) in members.iter().enumerate() {
                map[v as usize] = image[i];
            }
        }
        generators.push(IsoMap { map, color_map: None });
    }
    if order.is_one() {
        generators.clear();
    }
    AutomorphismGroup { order, generators }
}

/// True iff every automorphism fixes every atom.
pub fn atom_action_is_trivial(p: &TruncatedPoset) -> bool {
    let group = automorphisms(p, IsoMode::Plain);
    group
        .generators
        .iter()
        .all(|g| p.atoms().all(|a| g.apply(a) == a))
}

/// Order of the permutation group the automorphisms induce on the atoms.
pub fn atom_action_order(p: &TruncatedPoset) -> BigUint {
    let group = automorphisms(p, IsoMode::Plain);
    let atoms: Vec<NodeId> = p.atoms().collect();
    let gens: Vec<Vec<u32>> = group
        .generators
        .iter()
        .map(|g| atoms.iter().map(|&a| g.apply(a) - atoms[0]).collect())
        .collect();
    BigUint::from(permutation_group_order(atoms.len(), &gens))
}

/// Size of the group generated by `gens` on `0..k`, by closure (small `k` only).
fn permutation_group_order(k: usize, gens: &[Vec<u32>]) -> u64 {
    let identity: Vec<u32> = (0..k as u32).collect();
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y: Vec<u32> = x.iter().map(|&i| g[i as usize]).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bn(n: usize) -> TruncatedPoset {
        let mut ranks: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        let mut subsets: Vec<u32> = (0..1u32 << n).collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        let mut id = vec![0u32; 1 << n];
        for (i, &s) in subsets.iter().enumerate() {
            id[s as usize] = i as u32;
            ranks[s.count_ones() as usize].push(i as u32);
        }
        let mut covers = Vec::new();
        for &s in &subsets {
            for b in 0..n {
                if s & (1 << b) == 0 {
                    covers.push((id[s as usize], id[(s | 1 << b) as usize]));
                }
            }
        }
        TruncatedPoset::new(ranks, &covers, None).unwrap()
    }

    fn relabel_within_ranks(p: &TruncatedPoset, seed: u64) -> TruncatedPoset {
        // reverse node order inside each rank, optionally rotated by the seed
        let mut new_id = vec![0u32; p.len()];
        for r in 0..=p.depth() {
            let ids: Vec<u32> = p.rank(r).collect();
            let k = ids.len();
            for (i, &v) in ids.iter().enumerate() {
                new_id[v as usize] = ids[(k - 1 - i + seed as usize) % k];
            }
        }
        let covers: Vec<(u32, u32, u32)> = p
            .edges()
            .into_iter()
            .map(|(l, u, c)| (new_id[l as usize], new_id[u as usize], c.unwrap_or(0)))
            .collect();
        let q = TruncatedPoset::from_colored_covers(p.ranks(), &covers, None).unwrap();
        if p.is_colored() {
            q
        } else {
            q.without_colors()
        }
    }

    #[test]
    fn boolean_lattice_group_orders() {
        let mut fact = 1u32;
        for n in 1..=5 {
            fact *= n as u32;
            assert_eq!(automorphisms(&bn(n), IsoMode::Plain).order, BigUint::from(fact), "B_{n}");
        }
    }

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        let p = bn(4);
        for seed in 0..4 {
            let q = relabel_within_ranks(&p, seed);
            assert_eq!(canonical_form(&p, IsoMode::Plain), canonical_form(&q, IsoMode::Plain));
            let iso = find_isomorphism(&p, &q, IsoMode::Plain).unwrap();
            assert!(verify_isomorphism(&p, &q, &iso, IsoMode::Plain));
        }
    }

    #[test]
    fn self_isomorphism() {
        let p = bn(3);
        let iso = find_isomorphism(&p, &p, IsoMode::Plain).unwrap();
        assert!(verify_isomorphism(&p, &p, &iso, IsoMode::Plain));
    }

    #[test]
    fn colored_modes() {
        let b2 = bn(2);
        // atoms 1, 2; swap-colored top edges versus straight ones
        let swapped = b2.with_coloring(|l, u| if l == 0 { u - 1 } else { 2 - l });
        let straight = b2.with_coloring(|l, u| if l == 0 { u - 1 } else { l - 1 });
        assert!(!isomorphic(&swapped, &straight, IsoMode::ColorExact));
        assert!(!isomorphic(&swapped, &straight, IsoMode::Colored));
        let renamed = b2.with_coloring(|l, u| if l == 0 { 2 - u } else { l - 1 });
        let iso = find_isomorphism(&swapped, &renamed, IsoMode::Colored).unwrap();
        assert!(verify_isomorphism(&swapped, &renamed, &iso, IsoMode::Colored));
        assert_eq!(canonical_form(&swapped, IsoMode::Colored), canonical_form(&renamed, IsoMode::Colored));
    }

    #[test]
    fn atom_action() {
        assert!(!atom_action_is_trivial(&bn(2)));
        assert_eq!(atom_action_order(&bn(3)), BigUint::from(6u32));
        let chain = TruncatedPoset::new(vec![vec![0], vec![1], vec![2]], &[(0, 1), (1, 2)], None).unwrap();
        assert!(atom_action_is_trivial(&chain));
        assert_eq!(automorphisms(&chain, IsoMode::Plain).order, BigUint::one());
    }

    #[test]
    fn hex_round_trip() {
        let f = canonical_form(&bn(2), IsoMode::Plain);
        assert_eq!(CanonicalForm::from_hex(&f.to_hex()).unwrap(), f);
    }
}
