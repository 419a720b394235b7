//! Individualization-refinement canonical labeling.
//!
//! Each search-tree node holds an ordered equitable partition. Leaves are
//! discrete partitions; the canonical leaf minimizes the pair (refinement
//! trace, relabeled adjacency). Automorphisms found by comparing leaves
//! prune the tree, and the orbit sizes along the first path give the exact
//! group order.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::hash::Hasher;

use num_bigint::BigUint;
use num_traits::One;
use rustc_hash::FxHasher;

use super::graph::Graph;

#[derive(Debug, Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    /// Indexed by position: start of the enclosing cell.
    start: Vec<u32>,
    /// Indexed by cell start: cell length.
    len: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn initial(g: &Graph) -> Partition {
        let n = g.n;
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&v| (g.color[v as usize], v));
        let mut pos = vec![0u32; n];
        for (i, &v) in lab.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        let mut start = vec![0u32; n];
        let mut len = vec![0u32; n];
        let mut cells = 0;
        let mut i = 0;
        while i < n {
            let c = g.color[lab[i] as usize];
            let mut j = i;
            while j < n && g.color[lab[j] as usize] == c {
                start[j] = i as u32;
                j += 1;
            }
            len[i] = (j - i) as u32;
            cells += 1;
            i = j;
        }
        Partition {
            lab,
            pos,
            start,
            len,
            cells,
        }
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    fn cell_starts(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.cells);
        let mut s = 0usize;
        while s < self.lab.len() {
            out.push(s as u32);
            s += self.len[s] as usize;
        }
        out
    }

    /// First non-singleton cell of minimum size.
    fn target_cell(&self) -> Option<u32> {
        let mut best: Option<(u32, u32)> = None;
        let mut s = 0usize;
        while s < self.lab.len() {
            let l = self.len[s];
            if l > 1 && best.is_none_or(|(_, bl)| l < bl) {
                best = Some((s as u32, l));
                if l == 2 {
                    break;
                }
            }
            s += l as usize;
        }
        best.map(|(s, _)| s)
    }

    /// Moves `v` into a singleton cell at the front of its cell; returns its position.
    fn individualize(&mut self, v: u32) -> u32 {
        let p = self.pos[v as usize] as usize;
        let s = self.start[p] as usize;
        let l = self.len[s] as usize;
        debug_assert!(l > 1);
        let w = self.lab[s];
        self.lab.swap(s, p);
        self.pos[v as usize] = s as u32;
        self.pos[w as usize] = p as u32;
        self.len[s] = 1;
        self.len[s + 1] = (l - 1) as u32;
        for q in s + 1..s + l {
            self.start[q] = (s + 1) as u32;
        }
        self.cells += 1;
        s as u32
    }
}

struct Refiner {
    count: Vec<u32>,
    touched: Vec<u32>,
    mark: Vec<bool>,
    in_queue: Vec<bool>,
    queue: VecDeque<u32>,
    scratch: Vec<u32>,
}

impl Refiner {
    fn new(n: usize) -> Refiner {
        Refiner {
            count: vec![0; n],
            touched: Vec::new(),
            mark: vec![false; n],
            in_queue: vec![false; n],
            queue: VecDeque::new(),
            scratch: Vec::new(),
        }
    }

    /// Refines to the coarsest equitable partition finer than `part`, with
    /// the given cells as initial splitters. Returns the trace hash.
    fn refine(&mut self, g: &Graph, part: &mut Partition, splitters: &[u32]) -> u64 {
        let mut h = FxHasher::default();
        for &s in splitters {
            if !self.in_queue[s as usize] {
                self.in_queue[s as usize] = true;
                self.queue.push_back(s);
            }
        }
        let mut cell_list: Vec<u32> = Vec::new();
        while let Some(s) = self.queue.pop_front() {
            self.in_queue[s as usize] = false;
            if part.is_discrete() {
                continue;
            }
            self.scratch.clear();
            let sl = part.len[s as usize] as usize;
            self.scratch.extend_from_slice(&part.lab[s as usize..s as usize + sl]);
            let splitter = std::mem::take(&mut self.scratch);
            for k in 0..g.kinds {
                let csr = &g.by_kind[k];
                for &w in &splitter {
                    for &u in csr.neighbors(w) {
                        if self.count[u as usize] == 0 {
                            self.touched.push(u);
                        }
                        self.count[u as usize] += 1;
                    }
                }
                if self.touched.is_empty() {
                    continue;
                }
                cell_list.clear();
                for &u in &self.touched {
                    let c = part.start[part.pos[u as usize] as usize];
                    if part.len[c as usize] > 1 && !self.mark[c as usize] {
                        self.mark[c as usize] = true;
                        cell_list.push(c);
                    }
                }
                cell_list.sort_unstable();
                for &c in &cell_list {
                    self.mark[c as usize] = false;
                    self.split(part, c, k as u32, &mut h);
                }
                for &u in &self.touched {
                    self.count[u as usize] = 0;
                }
                self.touched.clear();
            }
            self.scratch = splitter;
        }
        h.write_usize(part.cells);
        h.finish()
    }

    fn split(&mut self, part: &mut Partition, c: u32, kind: u32, h: &mut FxHasher) {
        let c = c as usize;
        let l = part.len[c] as usize;
        let count = &self.count;
        let cell = &mut part.lab[c..c + l];
        cell.sort_unstable_by_key(|&v| (count[v as usize], v));
        let first = count[cell[0] as usize];
        if first == count[cell[l - 1] as usize] {
            return;
        }
        h.write_u32(kind);
        h.write_usize(c);
        // fragment boundaries
        let mut frags: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < l {
            let cv = count[cell[i] as usize];
            let mut j = i;
            while j < l && count[cell[j] as usize] == cv {
                j += 1;
            }
            h.write_u32(cv);
            h.write_usize(j - i);
            frags.push((c + i, j - i));
            i = j;
        }
        for q in c..c + l {
            part.pos[part.lab[q] as usize] = q as u32;
        }
        for &(fs, fl) in &frags {
            part.len[fs] = fl as u32;
            for q in fs..fs + fl {
                part.start[q] = fs as u32;
            }
        }
        part.cells += frags.len() - 1;
        if self.in_queue[c] {
            for &(fs, _) in &frags[1..] {
                self.in_queue[fs] = true;
                self.queue.push_back(fs as u32);
            }
        } else {
            let mut largest = 0;
            for (idx, &(_, fl)) in frags.iter().enumerate() {
                if fl > frags[largest].1 {
                    largest = idx;
                }
            }
            for (idx, &(fs, _)) in frags.iter().enumerate() {
                if idx != largest {
                    self.in_queue[fs] = true;
                    self.queue.push_back(fs as u32);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Leaf {
    traces: Vec<u64>,
    cert: Vec<u32>,
    lab: Vec<u32>,
}

/// Result of a canonical labeling run.
#[derive(Debug, Clone)]
pub(crate) struct Labeling {
    /// Canonical position -> vertex.
    pub lab: Vec<u32>,
    /// Relabeled graph encoding; equal across graphs iff they are isomorphic.
    pub cert: Vec<u32>,
    /// Automorphism generators (vertex permutations).
    pub generators: Vec<Vec<u32>>,
    /// Exact order of the automorphism group.
    pub order: BigUint,
}

fn certificate(g: &Graph, lab: &[u32]) -> Vec<u32> {
    let n = g.n;
    let mut pos = vec![0u32; n];
    for (i, &v) in lab.iter().enumerate() {
        pos[v as usize] = i as u32;
    }
    let mut out = Vec::with_capacity(3 * n + 2 * g.adj.iter().map(Vec::len).sum::<usize>());
    let mut row: Vec<(u32, u32)> = Vec::new();
    for &v in lab {
        let c = g.color[v as usize];
        out.push((c >> 32) as u32);
        out.push(c as u32);
        row.clear();
        row.extend(g.adj[v as usize].iter().map(|&(u, k)| (pos[u as usize], k)));
        row.sort_unstable();
        out.push(row.len() as u32);
        for &(u, k) in &row {
            out.push(u);
            out.push(k);
        }
    }
    out
}

struct Search<'g> {
    g: &'g Graph,
    refiner: Refiner,
    first: Option<Leaf>,
    best: Option<Leaf>,
    first_path: Vec<u32>,
    path: Vec<u32>,
    traces: Vec<u64>,
    explored: Vec<Vec<u32>>,
    generators: Vec<Vec<u32>>,
    orbit_sizes: Vec<u64>,
    leaves: u64,
}

struct Orbits {
    parent: Vec<u32>,
    size: Vec<u32>,
    applied: usize,
}

impl Orbits {
    fn new(n: usize) -> Orbits {
        Orbits {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            applied: 0,
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = p;
        }
        v
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] { (ra, rb) } else { (rb, ra) };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
    }

    /// Absorbs generators not yet seen that fix every vertex of `prefix`.
    fn update(&mut self, generators: &[Vec<u32>], prefix: &[u32]) {
        for gamma in &generators[self.applied..] {
            if prefix.iter().all(|&v| gamma[v as usize] == v) {
                for (v, &w) in gamma.iter().enumerate() {
                    if v as u32 != w {
                        self.union(v as u32, w);
                    }
                }
            }
        }
        self.applied = generators.len();
    }
}

impl<'g> Search<'g> {
    fn lex_vs_best(&self) -> Ordering {
        match &self.best {
            None => Ordering::Less,
            Some(b) => {
                let m = self.traces.len().min(b.traces.len());
                self.traces[..m].cmp(&b.traces[..m])
            }
        }
    }

    fn on_first_path_trace(&self) -> bool {
        match &self.first {
            None => true,
            Some(f) => f.traces.len() >= self.traces.len() && f.traces[..self.traces.len()] == self.traces[..],
        }
    }

    fn explore(&mut self, part: &Partition) -> Option<usize> {
        let level = self.path.len();
        if !self.on_first_path_trace() && self.lex_vs_best() == Ordering::Greater {
            return None;
        }
        if part.is_discrete() {
            return self.leaf(part);
        }
        let t = part.target_cell().expect("non-discrete partition has a non-singleton cell") as usize;
        let mut children: Vec<u32> = part.lab[t..t + part.len[t] as usize].to_vec();
        children.sort_unstable();
        self.explored.push(Vec::new());
        let mut orbits = Orbits::new(self.g.n);
        let on_first = self.first.is_none() || self.path[..] == self.first_path[..level.min(self.first_path.len())];
        for &u in &children {
            if !self.explored[level].is_empty() {
                orbits.update(&self.generators, &self.path);
                let ru = orbits.find(u);
                let explored = std::mem::take(&mut self.explored[level]);
                let skip = explored.iter().any(|&e| orbits.find(e) == ru);
                self.explored[level] = explored;
                if skip {
                    continue;
                }
            }
            let mut child = part.clone();
            let s = child.individualize(u);
            let h = self.refiner.refine(self.g, &mut child, &[s]);
            self.path.push(u);
            self.traces.push(h);
            let jump = self.explore(&child);
            self.path.pop();
            self.traces.pop();
            self.explored[level].push(u);
            if let Some(d) = jump {
                if d < level {
                    self.explored.pop();
                    return Some(d);
                }
            }
        }
        if on_first && self.first_path.len() > level && self.path[..] == self.first_path[..level] {
            orbits.update(&self.generators, &self.path);
            let root = orbits.find(self.first_path[level]);
            let size = orbits.size[root as usize] as u64;
            if self.orbit_sizes.len() <= level {
                self.orbit_sizes.resize(level + 1, 1);
            }
            self.orbit_sizes[level] = size;
        }
        self.explored.pop();
        None
    }

    fn leaf(&mut self, part: &Partition) -> Option<usize> {
        self.leaves += 1;
        let cert = certificate(self.g, &part.lab);
        let Some(first) = &self.first else {
            let leaf = Leaf {
                traces: self.traces.clone(),
                cert,
                lab: part.lab.clone(),
            };
            self.first_path = self.path.clone();
            self.best = Some(leaf.clone());
            self.first = Some(leaf);
            return None;
        };
        if first.traces == self.traces && first.cert == cert {
            let gamma = mapping(&part.lab, &first.lab);
            return self.found_automorphism(gamma);
        }
        let best = self.best.as_ref().expect("best is set with first");
        let ord = (&self.traces, &cert).cmp(&(&best.traces, &best.cert));
        match ord {
            Ordering::Equal => {
                let gamma = mapping(&part.lab, &best.lab);
                self.found_automorphism(gamma)
            }
            Ordering::Less => {
                self.best = Some(Leaf {
                    traces: self.traces.clone(),
                    cert,
                    lab: part.lab.clone(),
                });
                None
            }
            Ordering::Greater => None,
        }
    }

    /// Records `gamma` and returns the shallowest level whose current child
    /// is mapped onto an already explored sibling.
    fn found_automorphism(&mut self, gamma: Vec<u32>) -> Option<usize> {
        if gamma.iter().enumerate().all(|(v, &w)| v as u32 == w) {
            return None;
        }
        let mut jump = None;
        for d in 0..self.path.len() {
            if d > 0 {
                let prev = self.path[d - 1];
                if gamma[prev as usize] != prev {
                    break;
                }
            }
            let c = self.path[d];
            let img = gamma[c as usize];
            if img != c && self.explored[d].contains(&img) {
                jump = Some(d);
                break;
            }
        }
        self.generators.push(gamma);
        jump
    }
}

/// `gamma(from[i]) = to[i]`.
fn mapping(from: &[u32], to: &[u32]) -> Vec<u32> {
    let mut gamma = vec![0u32; from.len()];
    for (i, &v) in from.iter().enumerate() {
        gamma[v as usize] = to[i];
    }
    gamma
}

/// Canonical labeling of a colored graph with typed edges.
pub(crate) fn canonical_labeling(g: &Graph) -> Labeling {
    let mut part = Partition::initial(g);
    let mut refiner = Refiner::new(g.n);
    if g.n == 0 {
        return Labeling {
            lab: Vec::new(),
            cert: Vec::new(),
            generators: Vec::new(),
            order: BigUint::one(),
        };
    }
    let starts = part.cell_starts();
    let h0 = refiner.refine(g, &mut part, &starts);
    let mut search = Search {
        g,
        refiner,
        first: None,
        best: None,
        first_path: Vec::new(),
        path: Vec::new(),
        traces: vec![h0],
        explored: Vec::new(),
        generators: Vec::new(),
        orbit_sizes: Vec::new(),
        leaves: 0,
    };
    search.explore(&part);
    let best = search.best.expect("search reaches at least one leaf");
    let mut order = BigUint::one();
    for &s in &search.orbit_sizes {
        order *= s;
    }
    Labeling {
        lab: best.lab,
        cert: best.cert,
        generators: search.generators,
        order,
    }
}
