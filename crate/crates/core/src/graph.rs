//! Small directed-graph helpers over dense vertex ids.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::NodeFiltered;

pub(crate) struct Graph {
    g: DiGraph<(), (), u32>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
}

impl Graph {
    pub fn new(succ: Vec<Vec<u32>>) -> Self {
        let n = succ.len();
        let mut g = DiGraph::with_capacity(n, succ.iter().map(Vec::len).sum());
        for _ in 0..n {
            g.add_node(());
        }
        let mut pred = vec![Vec::new(); n];
        for (v, out) in succ.iter().enumerate() {
            for &w in out {
                g.add_edge(NodeIndex::new(v), NodeIndex::new(w as usize), ());
                pred[w as usize].push(v as u32);
            }
        }
        Graph { g, succ, pred }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    #[cfg(test)]
    pub fn successors(&self, v: usize) -> &[u32] {
        &self.succ[v]
    }

    fn search(&self, starts: impl IntoIterator<Item = usize>, adj: &[Vec<u32>], mask: Option<&FixedBitSet>) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.len());
        let mut queue = VecDeque::new();
        for s in starts {
            if mask.is_none_or(|m| m[s]) && !seen.put(s) {
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                let w = w as usize;
                if mask.is_none_or(|m| m[w]) && !seen.put(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Vertices that can reach one of `targets`.
    pub fn co_reachable(&self, targets: impl IntoIterator<Item = usize>) -> FixedBitSet {
        self.search(targets, &self.pred, None)
    }

    /// Strongly connected components of the subgraph induced by `mask` that
    /// contain at least one edge.
    pub fn cyclic_sccs(&self, mask: &FixedBitSet) -> Vec<Vec<usize>> {
        let view = NodeFiltered::from_fn(&self.g, |n: NodeIndex<u32>| mask[n.index()]);
        tarjan_scc(&view)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .filter(|c| c.len() > 1 || self.succ[c[0]].contains(&(c[0] as u32)))
            .collect()
    }

    /// Shortest path from `from` to a vertex in `to`, staying inside `mask`
    /// when one is given. Returns the vertex sequence including both ends.
    pub fn path(&self, from: usize, to: &FixedBitSet, mask: Option<&FixedBitSet>) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([from]);
        parent[from] = from;
        while let Some(v) = queue.pop_front() {
            if to[v] {
                let mut path = vec![v];
                let mut cur = v;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.succ[v] {
                let w = w as usize;
                if parent[w] == usize::MAX && mask.is_none_or(|m| m[w]) {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// A closed walk starting and ending at `scc[0]` that visits every vertex
    /// of the strongly connected set `scc` and no other vertex.
    pub fn covering_cycle(&self, scc: &[usize]) -> Vec<usize> {
        let mut mask = FixedBitSet::with_capacity(self.len());
        scc.iter().for_each(|&v| mask.insert(v));
        let start = scc[0];
        let mut walk = vec![start];
        let mut unvisited = mask.clone();
        unvisited.set(start, false);
        let mut cur = start;
        while !unvisited.is_clear() {
            let p = self.path(cur, &unvisited, Some(&mask)).expect("strongly connected");
            for &v in &p[1..] {
                unvisited.set(v, false);
            }
            cur = *p.last().unwrap();
            walk.extend_from_slice(&p[1..]);
        }
        let mut target = FixedBitSet::with_capacity(self.len());
        target.insert(start);
        if cur == start {
            // single vertex with a self-loop, or already back home
            if walk.len() == 1 {
                walk.push(start);
            }
        } else {
            let p = self.path(cur, &target, Some(&mask)).expect("strongly connected");
            walk.extend_from_slice(&p[1..]);
        }
        if walk.len() == 1 {
            walk.push(start);
        }
        walk
    }
}
