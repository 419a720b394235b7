//! Upho colorings of truncations, pre-upho colorings of finite lattices,
//! monoids read off colorings, and the core realization pipeline.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iso::{automorphisms, canonical_form, isomorphic, IsoMode};
use crate::poset::{
    core, core_stability_depth, lattice_certificate, truncate, upho_check_with, CoreError, LatticeVerdict, NodeId,
    PosetError, TruncatedPoset, UphoVerdict,
};
use crate::presentation::{
    build_element_table_capped, check_left_cancellative, divisibility_covers, Presentation,
    PresentationError, Word, DEFAULT_WORD_CAP,
};

/// Default bound on saturated chains per atom pair in [`monoid_of_coloring`].
pub const DEFAULT_CHAIN_CAP: usize = 100_000;

/// Largest automorphism group that is expanded element by element for orbit reduction.
const GROUP_EXPANSION_CAP: usize = 50_000;

#[derive(Debug, Error)]
pub enum ColoringError {
    #[error("input is not a lattice: {0}")]
    NotLattice(String),
    #[error("the top element is not the join of the atoms")]
    TopNotJoinOfAtoms,
    #[error("the poset has no colors on its cover edges")]
    Uncolored,
    #[error("coloring does not match the host: {0}")]
    Mismatch(String),
    #[error("more than {cap} saturated chains below the join of atoms {s} and {t}")]
    ChainCap { s: usize, t: usize, cap: usize },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("could not build worker pool: {0}")]
    Workers(String),
}

/// Atom-valued colors of every cover edge of a host poset.
///
/// Colors are atom indices: color `j` names the `j`-th atom of the host.
/// Edges are listed in the host's [`TruncatedPoset::edges`] order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    pub edges: Vec<(NodeId, NodeId, u32)>,
}

impl Coloring {
    /// Reads the colors stored on a colored poset.
    pub fn of(p: &TruncatedPoset) -> Result<Coloring, ColoringError> {
        let edges = p
            .edges()
            .into_iter()
            .map(|(l, u, c)| c.map(|c| (l, u, c)).ok_or(ColoringError::Uncolored))
            .collect::<Result<_, _>>()?;
        Ok(Coloring { edges })
    }

    /// The host with these colors attached.
    pub fn apply(&self, host: &TruncatedPoset) -> Result<TruncatedPoset, ColoringError> {
        if self.edges.len() != host.edge_count() {
            return Err(ColoringError::Mismatch(format!(
                "{} colors for {} edges",
                self.edges.len(),
                host.edge_count()
            )));
        }
        let map: FxHashMap<(NodeId, NodeId), u32> = self.edges.iter().map(|&(l, u, c)| ((l, u), c)).collect();
        let atoms = host.atoms().len() as u32;
        for (l, u, _) in host.edges() {
            match map.get(&(l, u)) {
                Some(&c) if c < atoms => {}
                Some(&c) => return Err(ColoringError::Mismatch(format!("color {c} is not an atom"))),
                None => return Err(ColoringError::Mismatch(format!("edge {l}-{u} has no color"))),
            }
        }
        Ok(host.with_coloring(|l, u| map[&(l, u)]))
    }

    pub fn color(&self, l: NodeId, u: NodeId) -> Option<u32> {
        self.edges.iter().find(|e| e.0 == l && e.1 == u).map(|e| e.2)
    }
}

/// Checks that every atom edge `0̂ ⋖ s` carries the color of `s`.
fn forced_law_holds(p: &TruncatedPoset) -> bool {
    let start = p.atoms().start;
    p.atoms().all(|a| p.color(p.bottom(), a) == Some(a - start))
}

/// Upho coloring check up to probe rank `k`.
///
/// Every filter rooted at rank at most `k` must be color-preserving
/// isomorphic to the truncation of the whole poset at the matching depth,
/// and atom edges must carry their own atom's color.
pub fn check_upho_coloring(p: &TruncatedPoset, k: usize) -> Result<UphoVerdict, ColoringError> {
    if !p.is_colored() {
        return Err(ColoringError::Uncolored);
    }
    if !forced_law_holds(p) {
        return Ok(UphoVerdict::Fail { node: p.bottom() });
    }
    Ok(upho_check_with(p, k, IsoMode::ColorExact))
}

/// Outcome of [`check_pre_upho`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum PreUphoVerdict {
    Pass,
    /// An atom edge whose color is not its atom.
    AtomColor { atom: NodeId },
    /// The interval above `node` has no colored embedding at the bottom.
    NoEmbedding { node: NodeId },
}

impl PreUphoVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PreUphoVerdict::Pass)
    }
}

/// Order data of a finite lattice shared by the pre-upho checks.
struct LatticeFrame<'a> {
    l: &'a TruncatedPoset,
    ups: Vec<FixedBitSet>,
    /// Interior elements with the nodes of `[x, ∨ covers(x)]` in id order.
    intervals: Vec<(NodeId, Vec<NodeId>)>,
}

fn join_of(l: &TruncatedPoset, ups: &[FixedBitSet], nodes: &[NodeId]) -> Option<NodeId> {
    let mut common = ups[nodes[0] as usize].clone();
    for &v in &nodes[1..] {
        common.intersect_with(&ups[v as usize]);
    }
    // the join is the common upper bound below every other one
    let first = common.ones().next()? as NodeId;
    common
        .ones()
        .all(|m| ups[first as usize].contains(m))
        .then_some(first)
        .filter(|&j| l.rank_of(j) <= l.depth())
}

impl<'a> LatticeFrame<'a> {
    fn new(l: &'a TruncatedPoset, require_atom_join: bool) -> Result<Self, ColoringError> {
        let top_rank = l.rank(l.depth());
        if top_rank.len() != 1 || (0..l.len() as NodeId).any(|v| v != top_rank.start && l.up(v).is_empty()) {
            return Err(ColoringError::NotLattice("no unique maximum".into()));
        }
        let verdict = lattice_certificate(l);
        if !verdict.is_lattice() {
            return Err(ColoringError::NotLattice(verdict.describe(l)));
        }
        let top = top_rank.start;
        let ups = l.up_sets();
        let downs = l.down_sets();
        if require_atom_join && l.depth() > 0 {
            let atoms: Vec<NodeId> = l.atoms().collect();
            if join_of(l, &ups, &atoms) != Some(top) {
                return Err(ColoringError::TopNotJoinOfAtoms);
            }
        }
        let mut intervals = Vec::new();
        for x in 1..top {
            let j = join_of(l, &ups, l.up(x)).expect("lattices have joins");
            let mut nodes = ups[x as usize].clone();
            nodes.intersect_with(&downs[j as usize]);
            intervals.push((x, nodes.ones().map(|v| v as NodeId).collect()));
        }
        Ok(LatticeFrame { l, ups, intervals })
    }

    /// Colored embedding of `[x, ∨ covers(x)]` sending `x` to the bottom.
    ///
    /// `color(l, u)` must be defined on every edge inside the interval and on
    /// every edge up to the interval's height above the bottom.
    fn interval_embeds(&self, nodes: &[NodeId], color: &impl Fn(NodeId, NodeId) -> u32) -> bool {
        let l = self.l;
        let mut image: FxHashMap<NodeId, NodeId> = FxHashMap::default();
        let mut used = FixedBitSet::with_capacity(l.len());
        image.insert(nodes[0], l.bottom());
        used.insert(l.bottom() as usize);
        self.extend(nodes, 1, &mut image, &mut used, color)
    }

    fn extend(
        &self,
        nodes: &[NodeId],
        i: usize,
        image: &mut FxHashMap<NodeId, NodeId>,
        used: &mut FixedBitSet,
        color: &impl Fn(NodeId, NodeId) -> u32,
    ) -> bool {
        if i == nodes.len() {
            return true;
        }
        let l = self.l;
        let z = nodes[i];
        let lower: Vec<NodeId> = l.down(z).iter().copied().filter(|d| image.contains_key(d)).collect();
        let d0 = lower[0];
        let base = image[&d0];
        let want = color(d0, z);
        for &w in l.up(base) {
            if used.contains(w as usize) || color(base, w) != want {
                continue;
            }
            let covers_ok = lower[1..].iter().all(|&d| {
                let m = image[&d];
                l.up(m).contains(&w) && color(m, w) == color(d, z)
            });
            // order reflection against everything placed so far
            let reflects = covers_ok
                && nodes[..i]
                    .iter()
                    .all(|&a| !self.ups[image[&a] as usize].contains(w as usize) || self.ups[a as usize].contains(z as usize));
            if !reflects {
                continue;
            }
            image.insert(z, w);
            used.insert(w as usize);
            if self.extend(nodes, i + 1, image, used, color) {
                return true;
            }
            image.remove(&z);
            used.set(w as usize, false);
        }
        false
    }
}

/// Pre-upho check of a coloring on a finite graded lattice.
///
/// Fails on the first atom edge with a foreign color, otherwise on the
/// first interior element (by id) whose cover interval has no rank- and
/// color-preserving embedding at the bottom.
pub fn check_pre_upho(l: &TruncatedPoset, c: &Coloring) -> Result<PreUphoVerdict, ColoringError> {
    let frame = LatticeFrame::new(l, true)?;
    let colored = c.apply(l)?;
    let start = l.atoms().start;
    for a in l.atoms() {
        if colored.color(l.bottom(), a) != Some(a - start) {
            return Ok(PreUphoVerdict::AtomColor { atom: a });
        }
    }
    let color = |x: NodeId, y: NodeId| colored.color(x, y).expect("cover edge");
    for (x, nodes) in &frame.intervals {
        if !frame.interval_embeds(nodes, &color) {
            return Ok(PreUphoVerdict::NoEmbedding { node: *x });
        }
    }
    Ok(PreUphoVerdict::Pass)
}

/// All pre-upho colorings of a finite graded lattice.
///
/// Free edges are assigned in order of (upper rank, upper id, lower id) and
/// each interior element is checked as soon as its interval is fully
/// colored. Output is lexicographic in that assignment order.
///
/// Unlike [`check_pre_upho`] this accepts lattices whose top lies above the
/// join of the atoms, such as chains.
pub fn enumerate_pre_upho_colorings(l: &TruncatedPoset) -> Result<Vec<Coloring>, ColoringError> {
    let frame = LatticeFrame::new(l, false)?;
    let bottom = l.bottom();
    let atoms = l.atoms().len() as u32;
    let mut free: Vec<(NodeId, NodeId)> = l
        .edges()
        .into_iter()
        .filter(|&(lo, _, _)| lo != bottom)
        .map(|(lo, u, _)| (lo, u))
        .collect();
    free.sort_by_key(|&(lo, u)| (l.rank_of(u), u, lo));
    let slot: FxHashMap<(NodeId, NodeId), usize> = free.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    // interior elements become checkable once their last interval edge is set
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
    for (k, (_, nodes)) in frame.intervals.iter().enumerate() {
        let last = nodes
            .iter()
            .flat_map(|&v| {
                let slot = &slot;
                l.up(v).iter().filter(|u| nodes.contains(u)).map(move |&u| slot[&(v, u)])
            })
            .max()
            .expect("interior elements have covers");
        due[last].push(k);
    }
    let mut search = EdgeSearch {
        frame: &frame,
        free: &free,
        slot: &slot,
        due: &due,
        atoms,
        assignment: vec![0; free.len()],
        out: Vec::new(),
    };
    search.run(0);
    Ok(search.out)
}

struct EdgeSearch<'a> {
    frame: &'a LatticeFrame<'a>,
    free: &'a [(NodeId, NodeId)],
    slot: &'a FxHashMap<(NodeId, NodeId), usize>,
    due: &'a [Vec<usize>],
    atoms: u32,
    assignment: Vec<u32>,
    out: Vec<Coloring>,
}

impl EdgeSearch<'_> {
    fn color(&self, x: NodeId, y: NodeId) -> u32 {
        let l = self.frame.l;
        if x == l.bottom() {
            y - l.atoms().start
        } else {
            self.assignment[self.slot[&(x, y)]]
        }
    }

    fn run(&mut self, i: usize) {
        if i == self.free.len() {
            let edges = self
                .frame
                .l
                .edges()
                .into_iter()
                .map(|(lo, u, _)| (lo, u, self.color(lo, u)))
                .collect();
            self.out.push(Coloring { edges });
            return;
        }
        for c in 0..self.atoms {
            self.assignment[i] = c;
            let color = |x, y| self.color(x, y);
            if self.due[i]
                .iter()
                .all(|&k| self.frame.interval_embeds(&self.frame.intervals[k].1, &color))
            {
                self.run(i + 1);
            }
        }
    }
}

fn generator_names(l: &TruncatedPoset) -> Vec<String> {
    let indexed = || (1..=l.atoms().len()).map(|i| format!("s{i}")).collect();
    let Some(labels) = l.labels() else {
        return indexed();
    };
    let names: Vec<String> = l.atoms().map(|a| labels[a as usize].clone()).collect();
    let distinct: FxHashSet<&str> = names.iter().map(String::as_str).collect();
    let valid = distinct.len() == names.len()
        && names
            .iter()
            .all(|n| !n.is_empty() && !n.contains(|c: char| c.is_whitespace() || c == '=' || c == '#'));
    if valid {
        names
    } else {
        indexed()
    }
}

/// True iff `v` is reachable from `u` by applying `rules` in either direction.
fn congruent(rules: &[(Word, Word)], u: &Word, v: &Word) -> bool {
    let mut seen: FxHashSet<Vec<u8>> = FxHashSet::default();
    let mut queue = VecDeque::new();
    seen.insert(u.0.clone());
    queue.push_back(u.0.clone());
    while let Some(w) = queue.pop_front() {
        if w == v.0 {
            return true;
        }
        for (a, b) in rules {
            for (from, to) in [(a, b), (b, a)] {
                let k = from.len();
                for pos in 0..=w.len().saturating_sub(k) {
                    if w.len() >= k && w[pos..pos + k] == from.0[..] {
                        let mut next = w.clone();
                        next[pos..pos + k].copy_from_slice(&to.0);
                        if seen.insert(next.clone()) {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    false
}

/// Color words of all saturated chains from the bottom to `top`.
fn chain_words(
    l: &TruncatedPoset,
    below_top: &FixedBitSet,
    colored: &TruncatedPoset,
    top: NodeId,
    cap: usize,
) -> Option<BTreeSet<Vec<u8>>> {
    fn walk(
        l: &TruncatedPoset,
        below_top: &FixedBitSet,
        colored: &TruncatedPoset,
        v: NodeId,
        top: NodeId,
        word: &mut Vec<u8>,
        out: &mut BTreeSet<Vec<u8>>,
        count: &mut usize,
        cap: usize,
    ) -> bool {
        if v == top {
            *count += 1;
            out.insert(word.clone());
            return *count <= cap;
        }
        for &u in l.up(v) {
            if below_top.contains(u as usize) {
                word.push(colored.color(v, u).expect("colored edge") as u8);
                let ok = walk(l, below_top, colored, u, top, word, out, count, cap);
                word.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = BTreeSet::new();
    let mut count = 0;
    walk(l, below_top, colored, l.bottom(), top, &mut Vec::new(), &mut out, &mut count, cap).then_some(out)
}

/// The monoid presented by a pre-upho coloring.
///
/// Generators are the atoms, named by their labels when those are usable
/// and `s1, s2, …` otherwise. For each pair of atoms, the color words of the
/// saturated chains from the bottom to their join are all related to the
/// lexicographically least one. Pairs are taken in index order, and a
/// relation already implied by the earlier ones is dropped.
pub fn monoid_of_coloring(l: &TruncatedPoset, c: &Coloring, chain_cap: usize) -> Result<Presentation, ColoringError> {
    let frame = LatticeFrame::new(l, false)?;
    let colored = c.apply(l)?;
    let downs = l.down_sets();
    let atoms: Vec<NodeId> = l.atoms().collect();
    let mut relations: Vec<(Word, Word)> = Vec::new();
    for (i, &s) in atoms.iter().enumerate() {
        for (j, &t) in atoms.iter().enumerate().skip(i + 1) {
            let top = join_of(l, &frame.ups, &[s, t]).expect("lattices have joins");
            let words = chain_words(l, &downs[top as usize], &colored, top, chain_cap).ok_or(
                ColoringError::ChainCap {
                    s: i,
                    t: j,
                    cap: chain_cap,
                },
            )?;
            let mut words = words.into_iter().map(Word);
            let least = words.next().expect("at least one chain");
            for w in words {
                if !congruent(&relations, &least, &w) {
                    relations.push((least.clone(), w));
                }
            }
        }
    }
    Ok(Presentation::new(generator_names(l), relations)?)
}

/// The caveat attached to every realization report.
pub const COLORABLE_CAVEAT: &str =
    "only colorable upho lattices are found; upho lattices without an upho coloring are not enumerated";

/// Settings for [`realize_core`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizeOptions {
    pub depth: usize,
    pub probe: usize,
    /// Worker threads; `None` uses the default pool.
    pub workers: Option<usize>,
    pub word_cap: u64,
    pub chain_cap: usize,
}

impl RealizeOptions {
    pub fn new(depth: usize, probe: usize) -> Self {
        RealizeOptions {
            depth,
            probe,
            workers: None,
            word_cap: DEFAULT_WORD_CAP,
            chain_cap: DEFAULT_CHAIN_CAP,
        }
    }
}

/// A realized lattice, distinct from the others at the report depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    /// `.mono` text of the first coloring's monoid.
    pub presentation: String,
    /// Plain canonical form (hex) of the truncation at the report depth.
    pub certificate: String,
    pub rank_sizes: Vec<usize>,
    pub cancellativity: String,
    pub lattice: String,
    pub core_equal: bool,
    pub stability_depth: Option<usize>,
    /// Depth at which the verdicts were settled.
    pub decided_at_depth: usize,
    /// Colorings of the input realizing this truncation.
    pub colorings: usize,
}

/// A candidate that only failed with inconclusive verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Undecided {
    pub presentation: String,
    pub reason: String,
    pub depth: usize,
    pub colorings: usize,
}

/// A candidate removed by a definitive filter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub presentation: String,
    /// One of `chain-cap`, `cancellativity`, `lattice`, `core`, `upho-coloring`.
    pub stage: String,
    pub reason: String,
    pub colorings: usize,
}

/// Result of [`realize_core`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub lattice: String,
    pub lattice_size: usize,
    pub depth: usize,
    pub probe: usize,
    pub colorings_enumerated: usize,
    /// Colorings processed after reduction by automorphisms of the input.
    pub orbit_representatives: usize,
    /// Describes what the survivor count means.
    pub survivor_label: String,
    pub caveat: String,
    pub survivors: Vec<Survivor>,
    pub undecided: Vec<Undecided>,
    pub rejected: Vec<Rejection>,
}

impl RealizationReport {
    /// Number of distinct truncations found at the report depth.
    pub fn lower_bound(&self) -> usize {
        self.survivors.len()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

enum Outcome {
    Survivor {
        poset: TruncatedPoset,
        presentation: String,
        cancellativity: String,
        lattice: String,
        stability_depth: Option<usize>,
        depth: usize,
    },
    Undecided {
        presentation: String,
        reason: String,
        retry: bool,
    },
    Rejected {
        presentation: String,
        stage: &'static str,
        reason: String,
    },
}

fn evaluate(l: &TruncatedPoset, plain_l: &TruncatedPoset, c: &Coloring, depth: usize, opts: &RealizeOptions) -> Outcome {
    let monoid = match monoid_of_coloring(l, c, opts.chain_cap) {
        Ok(m) => m,
        Err(e) => {
            return Outcome::Rejected {
                presentation: String::new(),
                stage: "chain-cap",
                reason: e.to_string(),
            }
        }
    };
    let presentation = monoid.to_mono();
    let table = match build_element_table_capped(&monoid, depth, opts.word_cap) {
        Ok(t) => t,
        Err(e) => {
            return Outcome::Undecided {
                presentation,
                reason: e.to_string(),
                retry: false,
            }
        }
    };
    let poset = divisibility_covers(&monoid, &table);
    let cancel = check_left_cancellative(&monoid, &table);
    if cancel.is_violation() {
        return Outcome::Rejected {
            presentation,
            stage: "cancellativity",
            reason: cancel.describe(&monoid),
        };
    }
    let lattice = lattice_certificate(&poset);
    match lattice {
        LatticeVerdict::LatticeToDepth { .. } => {}
        LatticeVerdict::JoinMissing { .. } => {
            return Outcome::Undecided {
                presentation,
                reason: lattice.describe(&poset),
                retry: true,
            }
        }
        _ => {
            return Outcome::Rejected {
                presentation,
                stage: "lattice",
                reason: lattice.describe(&poset),
            }
        }
    }
    match core(&poset) {
        Ok(k) => {
            if !isomorphic(&k.without_colors(), plain_l, IsoMode::Plain) {
                return Outcome::Rejected {
                    presentation,
                    stage: "core",
                    reason: format!(
                        "core has {} elements in ranks {:?}, the input has {} in ranks {:?}",
                        k.len(),
                        k.rank_sizes(),
                        plain_l.len(),
                        plain_l.rank_sizes()
                    ),
                };
            }
        }
        Err(e @ CoreError::Undetermined { .. }) => {
            return Outcome::Undecided {
                presentation,
                reason: e.to_string(),
                retry: true,
            }
        }
    }
    match check_upho_coloring(&poset, opts.probe) {
        Ok(UphoVerdict::Pass { .. }) => {}
        Ok(UphoVerdict::Fail { node }) => {
            return Outcome::Rejected {
                presentation,
                stage: "upho-coloring",
                reason: format!("filter at {} differs", poset.label(node)),
            }
        }
        Err(e) => {
            return Outcome::Rejected {
                presentation,
                stage: "upho-coloring",
                reason: e.to_string(),
            }
        }
    }
    Outcome::Survivor {
        presentation,
        cancellativity: cancel.describe(&monoid),
        lattice: lattice.describe(&poset),
        stability_depth: core_stability_depth(&poset),
        poset,
        depth,
    }
}

/// Automorphisms of `l` as node maps, or only the identity when the group is too large.
fn group_elements(l: &TruncatedPoset) -> Vec<Vec<NodeId>> {
    let group = automorphisms(l, IsoMode::Plain);
    let identity: Vec<NodeId> = (0..l.len() as NodeId).collect();
    let too_big = group.order > num_bigint::BigUint::from(GROUP_EXPANSION_CAP);
    if too_big || group.generators.is_empty() {
        return vec![identity];
    }
    let mut seen: FxHashSet<Vec<NodeId>> = FxHashSet::default();
    seen.insert(identity.clone());
    let mut out = vec![identity.clone()];
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in &group.generators {
            let y: Vec<NodeId> = x.iter().map(|&v| g.apply(v)).collect();
            if seen.insert(y.clone()) {
                out.push(y.clone());
                frontier.push(y);
            }
        }
    }
    out.sort();
    out
}

/// Orbit representatives (lexicographically least color vectors) with orbit sizes.
fn orbit_representatives(l: &TruncatedPoset, colorings: &[Coloring]) -> Vec<(usize, usize)> {
    let group = group_elements(l);
    let edges: Vec<(NodeId, NodeId)> = l.edges().into_iter().map(|(a, b, _)| (a, b)).collect();
    let index: FxHashMap<(NodeId, NodeId), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let start = l.atoms().start;
    let actions: Vec<(Vec<usize>, Vec<u32>)> = group
        .iter()
        .map(|g| {
            let edge_map = edges.iter().map(|&(a, b)| index[&(g[a as usize], g[b as usize])]).collect();
            let atom_map = l.atoms().map(|a| g[a as usize] - start).collect();
            (edge_map, atom_map)
        })
        .collect();
    let mut reps = Vec::new();
    for (i, c) in colorings.iter().enumerate() {
        let colors: Vec<u32> = c.edges.iter().map(|e| e.2).collect();
        let mut images: FxHashSet<Vec<u32>> = FxHashSet::default();
        let mut least = true;
        for (edge_map, atom_map) in &actions {
            let mut image = vec![0u32; colors.len()];
            for (e, &col) in colors.iter().enumerate() {
                image[edge_map[e]] = atom_map[col as usize];
            }
            if image < colors {
                least = false;
                break;
            }
            images.insert(image);
        }
        if least {
            reps.push((i, images.len()));
        }
    }
    reps
}

/// Enumerates pre-upho colorings of `l` and keeps the monoids whose
/// divisibility order looks like an upho lattice with core `l`.
///
/// Colorings related by an automorphism of `l` give monoids that differ by a
/// renaming of generators, so only one coloring per orbit is compiled.
/// Survivors are deduplicated by the plain canonical form of their depth
/// `opts.depth` truncation. Candidates with inconclusive verdicts are rerun
/// once one rank deeper and reported as undecided if still inconclusive.
pub fn realize_core(l: &TruncatedPoset, id: &str, opts: &RealizeOptions) -> Result<RealizationReport, ColoringError> {
    LatticeFrame::new(l, true)?;
    let colorings = enumerate_pre_upho_colorings(l)?;
    let reps = orbit_representatives(l, &colorings);
    let plain_l = l.without_colors();
    let run = || -> Vec<Outcome> {
        reps.par_iter()
            .map(|&(i, _)| match evaluate(l, &plain_l, &colorings[i], opts.depth, opts) {
                Outcome::Undecided { retry: true, .. } => evaluate(l, &plain_l, &colorings[i], opts.depth + 1, opts),
                other => other,
            })
            .collect()
    };
    let outcomes = match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ColoringError::Workers(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mut survivors: Vec<Survivor> = Vec::new();
    let mut by_form: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut undecided = Vec::new();
    let mut rejected = Vec::new();
    for (outcome, &(_, orbit)) in outcomes.into_iter().zip(&reps) {
        match outcome {
            Outcome::Survivor {
                poset,
                presentation,
                cancellativity,
                lattice,
                stability_depth,
                depth,
            } => {
                let cut = truncate(&poset, opts.depth).without_colors();
                let form = canonical_form(&cut, IsoMode::Plain);
                if let Some(&k) = by_form.get(&form.0) {
                    survivors[k].colorings += orbit;
                    continue;
                }
                by_form.insert(form.0.clone(), survivors.len());
                survivors.push(Survivor {
                    presentation,
                    certificate: form.to_hex(),
                    rank_sizes: cut.rank_sizes(),
                    cancellativity,
                    lattice,
                    core_equal: true,
                    stability_depth,
                    decided_at_depth: depth,
                    colorings: orbit,
                });
            }
            Outcome::Undecided { presentation, reason, retry } => undecided.push(Undecided {
                presentation,
                reason,
                depth: if retry { opts.depth + 1 } else { opts.depth },
                colorings: orbit,
            }),
            Outcome::Rejected {
                presentation,
                stage,
                reason,
            } => rejected.push(Rejection {
                presentation,
                stage: stage.to_string(),
                reason,
                colorings: orbit,
            }),
        }
    }
    Ok(RealizationReport {
        lattice: id.to_string(),
        lattice_size: l.len(),
        depth: opts.depth,
        probe: opts.probe,
        colorings_enumerated: colorings.len(),
        orbit_representatives: reps.len(),
        survivor_label: format!("distinct at depth {}", opts.depth),
        caveat: COLORABLE_CAVEAT.to_string(),
        survivors,
        undecided,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        build_bn, build_dn, build_fn, build_mn, monoid_free_commutative, monoid_mf, monoid_poset, monoid_shifted,
        FiberFunction,
    };

    /// Seven-element lattice: atoms a, b, c; d above a and b; e above c.
    fn two_branch_lattice() -> TruncatedPoset {
        let labels = ["0", "a", "b", "c", "d", "e", "1"].map(String::from).to_vec();
        TruncatedPoset::new(
            vec![vec![0], vec![1, 2, 3], vec![4, 5], vec![6]],
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 5), (4, 6), (5, 6)],
            Some(labels),
        )
        .unwrap()
    }

    /// The coloring with every non-atom edge colored `a`.
    fn two_branch_coloring(l: &TruncatedPoset) -> Coloring {
        Coloring::of(&l.with_coloring(|x, y| if x == 0 { y - 1 } else { 0 })).unwrap()
    }

    fn mn_coloring(l: &TruncatedPoset, f: &FiberFunction) -> Coloring {
        Coloring::of(&l.with_coloring(|x, y| if x == 0 { y - 1 } else { f.apply(x as usize) as u32 - 1 })).unwrap()
    }

    #[test]
    fn upho_colorings_of_rank_two_monoids() {
        for m in [monoid_free_commutative(2).unwrap(), monoid_shifted(2).unwrap()] {
            let p = monoid_poset(&m, 4).unwrap();
            assert!(check_upho_coloring(&p, 2).unwrap().passed());
        }
    }

    #[test]
    fn miscolored_dn_fails() {
        let d = build_dn(2, 4).unwrap();
        // atom 1 dominates; its private children reuse the dominating color
        let colored = d.with_coloring(|x, y| {
            if x == 0 {
                y - 1
            } else if d.up(x).len() == 1 || d.rank_of(x) >= 2 {
                0
            } else {
                (d.up(x).iter().position(|&u| u == y).unwrap() % 2) as u32
            }
        });
        assert!(!check_upho_coloring(&colored, 2).unwrap().passed());
        assert!(matches!(check_upho_coloring(&d, 2), Err(ColoringError::Uncolored)));
    }

    #[test]
    fn all_colorings_of_b2_are_pre_upho() {
        let b2 = build_bn(2).unwrap();
        let mut count = 0;
        for c1 in 0..2 {
            for c2 in 0..2 {
                let c = Coloring::of(&b2.with_coloring(|x, y| match (x, y) {
                    (0, y) => y - 1,
                    (1, _) => c1,
                    _ => c2,
                }))
                .unwrap();
                assert_eq!(check_pre_upho(&b2, &c).unwrap(), PreUphoVerdict::Pass);
                count += 1;
            }
        }
        assert_eq!(count, 4);
        let wrong = Coloring::of(&b2.with_coloring(|_, _| 0)).unwrap();
        assert_eq!(check_pre_upho(&b2, &wrong).unwrap(), PreUphoVerdict::AtomColor { atom: 2 });
    }

    #[test]
    fn fiber_colorings_of_mn_are_pre_upho() {
        for n in 2..=3 {
            let l = build_mn(n).unwrap();
            for f in FiberFunction::all(n) {
                assert!(check_pre_upho(&l, &mn_coloring(&l, &f)).unwrap().passed(), "{f}");
            }
        }
    }

    #[test]
    fn b3_without_top_is_rejected() {
        let b3 = build_bn(3).unwrap();
        let ranks: Vec<Vec<NodeId>> = (0..3).map(|r| b3.rank(r).collect()).collect();
        let covers: Vec<(NodeId, NodeId)> = b3
            .edges()
            .into_iter()
            .filter(|&(_, u, _)| b3.rank_of(u) < 3)
            .map(|(l, u, _)| (l, u))
            .collect();
        let semi = TruncatedPoset::new(ranks, &covers, None).unwrap();
        let c = Coloring::of(&semi.with_coloring(|x, y| if x == 0 { y - 1 } else { 0 })).unwrap();
        assert!(matches!(check_pre_upho(&semi, &c), Err(ColoringError::NotLattice(_))));
    }

    #[test]
    fn top_must_be_join_of_atoms() {
        // 0 < a < x < 1 and 0 < b < x: the atoms join at x, below the top
        let p = TruncatedPoset::new(vec![vec![0], vec![1, 2], vec![3], vec![4]], &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)], None)
            .unwrap();
        let c = Coloring::of(&p.with_coloring(|x, y| if x == 0 { y - 1 } else { 0 })).unwrap();
        assert!(matches!(check_pre_upho(&p, &c), Err(ColoringError::TopNotJoinOfAtoms)));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_pre_upho_colorings(&build_bn(2).unwrap()).unwrap().len(), 4);
        assert_eq!(enumerate_pre_upho_colorings(&crate::constructions::build_chain(2)).unwrap().len(), 1);
        for n in 1..=4 {
            let l = build_mn(n).unwrap();
            let all = enumerate_pre_upho_colorings(&l).unwrap();
            assert_eq!(all.len(), n.pow(n as u32));
            for c in &all {
                let colored = c.apply(&l).unwrap();
                assert!(forced_law_holds(&colored));
                if n >= 2 {
                    assert!(check_pre_upho(&l, c).unwrap().passed());
                }
            }
        }
    }

    #[test]
    fn enumeration_agrees_with_single_checks_on_b3() {
        let b3 = build_bn(3).unwrap();
        let listed: FxHashSet<Coloring> = enumerate_pre_upho_colorings(&b3).unwrap().into_iter().collect();
        let free: Vec<(NodeId, NodeId)> = b3.edges().into_iter().filter(|e| e.0 != 0).map(|e| (e.0, e.1)).collect();
        let mut passing = 0;
        for code in 0..3usize.pow(free.len() as u32) {
            let c = Coloring::of(&b3.with_coloring(|x, y| {
                if x == 0 {
                    return y - 1;
                }
                let i = free.iter().position(|&e| e == (x, y)).unwrap();
                (code / 3usize.pow(i as u32) % 3) as u32
            }))
            .unwrap();
            let pass = check_pre_upho(&b3, &c).unwrap().passed();
            assert_eq!(pass, listed.contains(&c));
            passing += pass as usize;
        }
        assert_eq!(passing, listed.len());
    }

    #[test]
    fn monoid_of_b2_swap() {
        let b2 = build_bn(2).unwrap();
        let c = Coloring::of(&b2.with_coloring(|x, y| if x == 0 { y - 1 } else { 2 - x })).unwrap();
        let m = monoid_of_coloring(&b2, &c, DEFAULT_CHAIN_CAP).unwrap();
        assert_eq!(m.to_mono(), "gens: s1 s2\nrel: s1 s2 = s2 s1\n");
    }

    #[test]
    fn monoid_of_two_branch_lattice() {
        let l = two_branch_lattice();
        let c = two_branch_coloring(&l);
        assert!(check_pre_upho(&l, &c).unwrap().passed());
        let m = monoid_of_coloring(&l, &c, DEFAULT_CHAIN_CAP).unwrap();
        assert_eq!(m.to_mono(), "gens: a b c\nrel: aa = ba\nrel: aaa = caa\n");
        assert!(matches!(
            monoid_of_coloring(&l, &c, 2),
            Err(ColoringError::ChainCap { s: 0, t: 2, cap: 2 })
        ));
    }

    #[test]
    fn monoid_compilation_matches_fiber_monoids() {
        for n in 1..=3 {
            let l = build_mn(n).unwrap();
            for f in FiberFunction::all(n) {
                let m = monoid_of_coloring(&l, &mn_coloring(&l, &f), DEFAULT_CHAIN_CAP).unwrap();
                let got = canonical_form(&monoid_poset(&m, 4).unwrap(), IsoMode::Plain);
                let want = canonical_form(&monoid_poset(&monoid_mf(&f), 4).unwrap(), IsoMode::Plain);
                assert_eq!(got, want, "{f}");
            }
        }
    }

    #[test]
    fn realize_b2() {
        let report = realize_core(&build_bn(2).unwrap(), "B2", &RealizeOptions::new(5, 2)).unwrap();
        assert_eq!(report.colorings_enumerated, 4);
        assert_eq!(report.orbit_representatives, 3);
        let mut got: Vec<String> = report.survivors.iter().map(|s| s.certificate.clone()).collect();
        let mut want = vec![
            canonical_form(&build_dn(2, 5).unwrap(), IsoMode::Plain).to_hex(),
            canonical_form(&build_fn(2, 5).unwrap(), IsoMode::Plain).to_hex(),
        ];
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(report.survivors.iter().map(|s| s.colorings).sum::<usize>(), 4);
        assert!(report.undecided.is_empty() && report.rejected.is_empty());
        assert_eq!(report.survivor_label, "distinct at depth 5");
        assert_eq!(report.caveat, COLORABLE_CAVEAT);
    }

    #[test]
    fn realize_m3() {
        let l = build_mn(3).unwrap();
        let report = realize_core(&l, "M3", &RealizeOptions::new(4, 2)).unwrap();
        assert_eq!(report.colorings_enumerated, 27);
        assert_eq!(report.survivors.len(), 4);
        let mut again = RealizeOptions::new(4, 2);
        again.workers = Some(2);
        assert_eq!(realize_core(&l, "M3", &again).unwrap().to_json(), report.to_json());
    }

    #[test]
    fn realize_two_branch_lattice() {
        let l = two_branch_lattice();
        let report = realize_core(&l, "two-branch", &RealizeOptions::new(5, 2)).unwrap();
        let two_branch = report
            .rejected
            .iter()
            .find(|r| r.presentation == "gens: a b c\nrel: aa = ba\nrel: aaa = caa\n")
            .expect("two-branch coloring is a candidate");
        assert_eq!(two_branch.stage, "core");
        assert!(two_branch.reason.starts_with("core has 10 elements"), "{}", two_branch.reason);
    }
}
