//! Small directed-multigraph utilities shared by the address-space and
//! recognition code.

use alloc::vec;
use alloc::vec::Vec;

/// Edge list multigraph on nodes `0..n`. Edges keep a caller-chosen label.
#[derive(Clone, Debug)]
pub(crate) struct Digraph {
    pub n: usize,
    /// (from, to, label)
    pub edges: Vec<(usize, usize, usize)>,
    pub out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); n];
        for (i, &(u, _, _)) in edges.iter().enumerate() {
            out[u].push(i);
        }
        Digraph { n, edges, out }
    }

    /// Strongly connected components (Kosaraju). Returns the component id of
    /// every node; ids are in topological order of the condensation (an edge
    /// between distinct components always goes from a smaller to a larger id).
    pub fn scc(&self) -> Vec<usize> {
        let n = self.n;
        let mut rin = vec![Vec::new(); n];
        for &(u, v, _) in &self.edges {
            rin[v].push(u);
        }
        // first pass: finishing order
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![(s, 0usize)];
            while let Some(&mut (u, ref mut i)) = stack.last_mut() {
                if *i < self.out[u].len() {
                    let v = self.edges[self.out[u][*i]].1;
                    *i += 1;
                    if !seen[v] {
                        seen[v] = true;
                        stack.push((v, 0));
                    }
                } else {
                    order.push(u);
                    stack.pop();
                }
            }
        }
        // second pass on the reverse graph in decreasing finish time
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &rin[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Nodes reachable from `start` (inclusive).
    pub fn reachable(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &e in &self.out[u] {
                let v = self.edges[e].1;
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Shortest edge path from `from` to `to` using only nodes allowed by
    /// `inside`; the path never revisits `to` before its end.
    pub fn shortest_path(&self, from: usize, to: usize, inside: &dyn Fn(usize) -> bool) -> Option<Vec<usize>> {
        if from == to {
            return Some(Vec::new());
        }
        let mut prev: Vec<Option<usize>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[from] = true;
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            for &e in &self.out[u] {
                let v = self.edges[e].1;
                if seen[v] || !inside(v) {
                    continue;
                }
                seen[v] = true;
                prev[v] = Some(e);
                if v == to {
                    let mut path = Vec::new();
                    let mut cur = to;
                    while let Some(e) = prev[cur] {
                        path.push(e);
                        cur = self.edges[e].0;
                        if cur == from {
                            break;
                        }
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_orders_components_topologically() {
        // 0 -> 1 <-> 2 -> 3
        let g = Digraph::new(4, vec![(0, 1, 0), (1, 2, 1), (2, 1, 2), (2, 3, 3)]);
        let c = g.scc();
        assert_eq!(c[1], c[2]);
        assert!(c[0] < c[1]);
        assert!(c[1] < c[3]);
    }

    #[test]
    fn shortest_path_returns_edge_indices() {
        let g = Digraph::new(3, vec![(0, 1, 0), (1, 2, 1), (0, 2, 2)]);
        assert_eq!(g.shortest_path(0, 2, &|_| true), Some(vec![2]));
        assert_eq!(g.shortest_path(0, 2, &|v| v != 2 || true), Some(vec![2]));
        assert_eq!(g.shortest_path(2, 0, &|_| true), None);
    }
}
