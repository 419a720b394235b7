//! Vertex-colored graphs with typed edges, built from truncated posets, and
//! their reduction by classes of false twins.

use rustc_hash::FxHashMap;

use crate::poset::{NodeId, TruncatedPoset};

/// Neighbor lists split by edge kind, in compressed form.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    off: Vec<u32>,
    nbr: Vec<u32>,
}

impl Csr {
    pub(crate) fn neighbors(&self, v: u32) -> &[u32] {
        &self.nbr[self.off[v as usize] as usize..self.off[v as usize + 1] as usize]
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Graph {
    pub n: usize,
    pub color: Vec<u64>,
    pub kinds: usize,
    /// Per vertex, sorted `(neighbor, kind)` pairs.
    pub adj: Vec<Vec<(u32, u32)>>,
    pub by_kind: Vec<Csr>,
}

impl Graph {
    pub(crate) fn new(color: Vec<u64>, kinds: usize, mut adj: Vec<Vec<(u32, u32)>>) -> Graph {
        let n = color.len();
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let mut by_kind = Vec::with_capacity(kinds);
        for k in 0..kinds as u32 {
            let mut off = Vec::with_capacity(n + 1);
            let mut nbr = Vec::new();
            off.push(0);
            for list in &adj {
                nbr.extend(list.iter().filter(|e| e.1 == k).map(|e| e.0));
                off.push(nbr.len() as u32);
            }
            by_kind.push(Csr { off, nbr });
        }
        Graph {
            n,
            color,
            kinds,
            adj,
            by_kind,
        }
    }
}

/// Builds the typed graph of a poset.
///
/// Without a color permutation edges have two kinds (up, down). With one,
/// the edge `l ⋖ u` of color `c` has kind `2σ(c)` seen from `l` and
/// `2σ(c)+1` seen from `u`.
pub(crate) fn poset_graph(p: &TruncatedPoset, colors: Option<&[u32]>) -> Graph {
    let n = p.len();
    let kinds = match colors {
        Some(perm) => 2 * perm.len().max(1),
        None => 2,
    };
    let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (l, u, c) in p.edges() {
        let (k_up, k_down) = match colors {
            Some(perm) => {
                let c = perm[c.unwrap_or(0) as usize];
                (2 * c, 2 * c + 1)
            }
            None => (0, 1),
        };
        adj[l as usize].push((u, k_up));
        adj[u as usize].push((l, k_down));
    }
    let color = (0..n as NodeId).map(|v| p.rank_of(v) as u64).collect();
    Graph::new(color, kinds, adj)
}

/// A graph with each maximal class of false twins collapsed to one vertex
/// whose color records the class size.
#[derive(Debug, Clone)]
pub(crate) struct Reduced {
    pub graph: Graph,
    /// Original members of each reduced vertex, ascending.
    pub classes: Vec<Vec<u32>>,
}

pub(crate) fn reduce_twins(g: &Graph) -> Reduced {
    let mut key_to_class: FxHashMap<(u64, &[(u32, u32)]), u32> = FxHashMap::default();
    let mut class_of = vec![0u32; g.n];
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for v in 0..g.n {
        let key = (g.color[v], g.adj[v].as_slice());
        let id = *key_to_class.entry(key).or_insert_with(|| {
            classes.push(Vec::new());
            (classes.len() - 1) as u32
        });
        classes[id as usize].push(v as u32);
        class_of[v] = id;
    }
    let color: Vec<u64> = classes
        .iter()
        .map(|members| (g.color[members[0] as usize] << 32) | members.len() as u64)
        .collect();
    if classes.len() == g.n {
        let mut graph = g.clone();
        graph.color = color;
        return Reduced { graph, classes };
    }
    let adj = classes
        .iter()
        .map(|members| {
            g.adj[members[0] as usize]
                .iter()
                .map(|&(u, k)| (class_of[u as usize], k))
                .collect()
        })
        .collect();
    Reduced {
        graph: Graph::new(color, g.kinds, adj),
        classes,
    }
}
