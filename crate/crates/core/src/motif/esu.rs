//! ESU enumeration of connected induced subgraphs.
//!
//! Each connected subgraph whose smallest node is `root` is reached exactly
//! once, and every prefix of the growth path is itself connected, so one
//! traversal yields all sizes up to the limit.

use crate::graph::ColoredGraph;

use super::canon::pair_bit;

pub(crate) struct Esu<'g> {
    graph: &'g ColoredGraph,
    /// number of nodes in `sub` equal or adjacent to each node
    marks: Vec<u16>,
    sub: Vec<usize>,
    max_size: usize,
}

impl<'g> Esu<'g> {
    pub(crate) fn new(graph: &'g ColoredGraph, max_size: usize) -> Self {
        Self { graph, marks: vec![0; graph.node_count()], sub: Vec::with_capacity(max_size), max_size }
    }

    /// Visits every connected induced subgraph of at most `max_size` nodes
    /// whose smallest node is `root`. `visit` receives the nodes in growth
    /// order (root first) and the edge mask over those positions.
    pub(crate) fn run_from<F: FnMut(&[usize], u32)>(&mut self, root: usize, visit: &mut F) {
        if self.max_size == 0 {
            return;
        }
        self.push(root);
        let ext: Vec<usize> = self
            .graph
            .neighbors(root)
            .iter()
            .map(|&u| u as usize)
            .filter(|&u| u > root)
            .collect();
        self.extend(root, &ext, 0, visit);
        self.pop();
    }

    fn push(&mut self, w: usize) {
        self.marks[w] += 1;
        for &u in self.graph.neighbors(w) {
            self.marks[u as usize] += 1;
        }
        self.sub.push(w);
    }

    fn pop(&mut self) {
        let w = self.sub.pop().expect("pop on empty subgraph");
        self.marks[w] -= 1;
        for &u in self.graph.neighbors(w) {
            self.marks[u as usize] -= 1;
        }
    }

    fn extend<F: FnMut(&[usize], u32)>(&mut self, root: usize, ext: &[usize], edge_mask: u32, visit: &mut F) {
        visit(&self.sub, edge_mask);
        if self.sub.len() == self.max_size {
            return;
        }
        let mut ext = ext.to_vec();
        while let Some(w) = ext.pop() {
            let remaining = ext.len();
            // exclusive neighbors of w with respect to the current subgraph
            for &u in self.graph.neighbors(w) {
                let u = u as usize;
                if u > root && self.marks[u] == 0 {
                    ext.push(u);
                }
            }
            let p = self.sub.len();
            let mut mask = edge_mask;
            for (i, &x) in self.sub.iter().enumerate() {
                if self.graph.has_edge(x, w) {
                    mask |= 1 << pair_bit(i, p);
                }
            }
            self.push(w);
            self.extend(root, &ext, mask, visit);
            self.pop();
            ext.truncate(remaining);
        }
    }
}
