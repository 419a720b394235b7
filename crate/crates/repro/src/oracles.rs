//! Deliberately naive reference computations.
//!
//! Nothing here shares code with the algorithms under test: word classes come
//! from union-find over every word, order relations from explicit transitive
//! closure, and isomorphisms from exhaustive search.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use uphocore::{NodeId, TruncatedPoset};

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Congruence classes of all words of length at most `depth`.
pub struct WordClasses {
    rank: usize,
    depth: usize,
    /// Class of each word, indexed by [`WordClasses::index`].
    class: Vec<usize>,
    /// Words of each class.
    members: Vec<Vec<Vec<u8>>>,
    /// Length of the words in each class.
    lengths: Vec<usize>,
}

impl WordClasses {
    /// Joins every word with each single rewrite by a relation in either direction.
    pub fn enumerate(rank: usize, relations: &[(Vec<u8>, Vec<u8>)], depth: usize) -> Self {
        let words: Vec<Vec<u8>> = (0..=depth).flat_map(|len| all_words(rank, len)).collect();
        let position: BTreeMap<&[u8], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
        let mut uf = UnionFind::new(words.len());
        for (i, w) in words.iter().enumerate() {
            for (u, v) in relations {
                for (from, to) in [(u, v), (v, u)] {
                    if from.len() > w.len() {
                        continue;
                    }
                    for at in 0..=w.len() - from.len() {
                        if &w[at..at + from.len()] == from.as_slice() {
                            let mut x = w.clone();
                            x.splice(at..at + from.len(), to.iter().copied());
                            uf.union(i, position[x.as_slice()]);
                        }
                    }
                }
            }
        }
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        let mut class = Vec::with_capacity(words.len());
        let mut members: Vec<Vec<Vec<u8>>> = Vec::new();
        let mut lengths = Vec::new();
        for (i, w) in words.iter().enumerate() {
            let root = uf.find(i);
            let next = ids.len();
            let id = *ids.entry(root).or_insert(next);
            if id == members.len() {
                members.push(Vec::new());
                lengths.push(w.len());
            }
            members[id].push(w.clone());
            class.push(id);
        }
        WordClasses {
            rank,
            depth,
            class,
            members,
            lengths,
        }
    }

    fn index(&self, w: &[u8]) -> usize {
        let mut offset = 0;
        for len in 0..w.len() {
            offset += self.rank.pow(len as u32);
        }
        offset + w.iter().fold(0, |acc, &x| acc * self.rank + x as usize)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn class_of(&self, w: &[u8]) -> usize {
        assert!(w.len() <= self.depth);
        self.class[self.index(w)]
    }

    pub fn length(&self, class: usize) -> usize {
        self.lengths[class]
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.depth + 1];
        for &l in &self.lengths {
            counts[l] += 1;
        }
        counts
    }

    /// `u` left-divides `w`: some word of `w`'s class starts with a word of `u`'s class.
    pub fn divides(&self, u: usize, w: usize) -> bool {
        let k = self.lengths[u];
        self.members[w].iter().any(|x| x.len() >= k && self.class_of(&x[..k]) == u)
    }

    /// The least class divisible by every generator, if there is exactly one of least length.
    pub fn join_of_generators(&self) -> Option<usize> {
        let gens: Vec<usize> = (0..self.rank as u8).map(|s| self.class_of(&[s])).collect();
        for len in 1..=self.depth {
            let found: Vec<usize> = (0..self.len())
                .filter(|&c| self.lengths[c] == len && gens.iter().all(|&g| self.divides(g, c)))
                .collect();
            match found.len() {
                0 => continue,
                1 => return Some(found[0]),
                _ => return None,
            }
        }
        None
    }

    /// The interval below `top` as a poset, with covers between adjacent lengths.
    pub fn interval_below(&self, top: usize) -> TruncatedPoset {
        let mut inside: Vec<usize> = (0..self.len()).filter(|&c| self.divides(c, top)).collect();
        inside.sort_by_key(|&c| (self.lengths[c], c));
        let id: BTreeMap<usize, NodeId> = inside.iter().enumerate().map(|(i, &c)| (c, i as NodeId)).collect();
        let height = self.lengths[top];
        let mut ranks = vec![Vec::new(); height + 1];
        for &c in &inside {
            ranks[self.lengths[c]].push(id[&c]);
        }
        let mut covers = Vec::new();
        for &u in &inside {
            for &w in &inside {
                if self.lengths[w] == self.lengths[u] + 1 && self.divides(u, w) {
                    covers.push((id[&u], id[&w]));
                }
            }
        }
        TruncatedPoset::new(ranks, &covers, None).expect("intervals of a graded order are valid")
    }
}

fn all_words(rank: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..rank as u8).map(move |s| {
                    let mut x = w.clone();
                    x.push(s);
                    x
                })
            })
            .collect();
    }
    out
}

/// `leq[x][y]` iff `x ≤ y`, by repeated relaxation over covers.
pub fn order_matrix(p: &TruncatedPoset) -> Vec<Vec<bool>> {
    let n = p.len();
    let mut leq = vec![vec![false; n]; n];
    for (x, row) in leq.iter_mut().enumerate() {
        row[x] = true;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..n {
            for y in 0..n as NodeId {
                if !leq[x][y as usize] {
                    continue;
                }
                for &z in p.up(y) {
                    if !leq[x][z as usize] {
                        leq[x][z as usize] = true;
                        changed = true;
                    }
                }
            }
        }
    }
    leq
}

/// `μ(0̂, x)` straight from the defining recursion.
pub fn mobius(p: &TruncatedPoset) -> Vec<i64> {
    let leq = order_matrix(p);
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| p.rank_of(v as NodeId));
    let mut mu = vec![0i64; n];
    for &x in &order {
        mu[x] = if x == p.bottom() as usize {
            1
        } else {
            -(0..n).filter(|&y| y != x && leq[y][x]).map(|y| mu[y]).sum::<i64>()
        };
    }
    mu
}

/// Coefficients of `Σ μ(0̂, x) t^ρ(x)`.
pub fn char_coefficients(p: &TruncatedPoset) -> Vec<i64> {
    let mu = mobius(p);
    let mut out = vec![0; p.depth() + 1];
    for (x, m) in mu.iter().enumerate() {
        out[p.rank_of(x as NodeId)] += m;
    }
    out
}

/// Exhaustive search for a rank-preserving bijection carrying covers to covers.
pub fn brute_isomorphic(p: &TruncatedPoset, q: &TruncatedPoset) -> bool {
    if p.rank_sizes() != q.rank_sizes() || p.edge_count() != q.edge_count() {
        return false;
    }
    let n = p.len();
    let pe: Vec<Vec<bool>> = adjacency(p);
    let qe: Vec<Vec<bool>> = adjacency(q);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn assign(
        v: usize,
        p: &TruncatedPoset,
        q: &TruncatedPoset,
        pe: &[Vec<bool>],
        qe: &[Vec<bool>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if v == map.len() {
            return true;
        }
        for w in q.rank(p.rank_of(v as NodeId)) {
            let w = w as usize;
            if used[w] || (0..v).any(|u| pe[u][v] != qe[map[u]][w]) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if assign(v + 1, p, q, pe, qe, map, used) {
                return true;
            }
            used[w] = false;
        }
        false
    }
    assign(0, p, q, &pe, &qe, &mut map, &mut used)
}

fn adjacency(p: &TruncatedPoset) -> Vec<Vec<bool>> {
    let n = p.len();
    let mut a = vec![vec![false; n]; n];
    for (l, u, _) in p.edges() {
        a[l as usize][u as usize] = true;
        a[u as usize][l as usize] = true;
    }
    a
}

/// A random graded poset with a minimum and at most `max_nodes` nodes.
pub fn random_graded_poset(rng: &mut impl Rng, max_nodes: usize) -> TruncatedPoset {
    let mut sizes = vec![1usize];
    let mut total = 1;
    while total < max_nodes {
        let room = max_nodes - total;
        let s = rng.gen_range(1..=room.min(4));
        sizes.push(s);
        total += s;
        if rng.gen_bool(0.25) {
            break;
        }
    }
    let mut ranks = Vec::new();
    let mut next = 0;
    for &s in &sizes {
        ranks.push((next..next + s as NodeId).collect::<Vec<_>>());
        next += s as NodeId;
    }
    let mut covers = Vec::new();
    for r in 1..ranks.len() {
        for &v in &ranks[r] {
            let below = &ranks[r - 1];
            let k = rng.gen_range(1..=below.len());
            for &u in below.choose_multiple(rng, k) {
                covers.push((u, v));
            }
        }
    }
    TruncatedPoset::new(ranks, &covers, None).expect("generated poset is valid")
}

/// The same poset with node ids shuffled within each rank.
pub fn shuffle_within_ranks(p: &TruncatedPoset, rng: &mut impl Rng) -> TruncatedPoset {
    let mut map = vec![0 as NodeId; p.len()];
    for r in 0..=p.depth() {
        let ids: Vec<NodeId> = p.rank(r).collect();
        let mut shuffled = ids.clone();
        shuffled.shuffle(rng);
        for (a, b) in ids.iter().zip(shuffled) {
            map[*a as usize] = b;
        }
    }
    let covers: Vec<(NodeId, NodeId)> = p
        .edges()
        .into_iter()
        .map(|(l, u, _)| (map[l as usize], map[u as usize]))
        .collect();
    TruncatedPoset::new(p.ranks(), &covers, None).expect("relabeling keeps validity")
}
