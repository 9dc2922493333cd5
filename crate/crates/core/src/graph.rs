//! Undirected simple graph whose nodes are colored user or video.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeColor {
    User,
    Video,
}

impl NodeColor {
    pub fn letter(self) -> char {
        match self {
            NodeColor::User => 'U',
            NodeColor::Video => 'V',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'U' | 'u' => Some(NodeColor::User),
            'V' | 'v' => Some(NodeColor::Video),
            _ => None,
        }
    }
}

impl fmt::Display for NodeColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeColor::User => "user",
            NodeColor::Video => "video",
        })
    }
}

/// Adjacency-list graph with sorted neighbor lists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColoredGraph {
    colors: Vec<NodeColor>,
    adj: Vec<Vec<u32>>,
}

impl ColoredGraph {
    pub fn new(colors: Vec<NodeColor>) -> Self {
        let adj = vec![Vec::new(); colors.len()];
        Self { colors, adj }
    }

    /// Builds a graph from an edge list. Self loops are ignored and
    /// duplicate edges collapse.
    pub fn from_edges(colors: Vec<NodeColor>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(colors);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_node(&mut self, color: NodeColor) -> usize {
        self.colors.push(color);
        self.adj.push(Vec::new());
        self.colors.len() - 1
    }

    /// Returns false when the edge already existed or is a self loop.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        let (ua, ub) = (a as u32, b as u32);
        match self.adj[a].binary_search(&ub) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[a].insert(pos, ub);
                let pos = self.adj[b].binary_search(&ua).unwrap_err();
                self.adj[b].insert(pos, ua);
                true
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.colors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn color(&self, n: usize) -> NodeColor {
        self.colors[n]
    }

    pub fn colors(&self) -> &[NodeColor] {
        &self.colors
    }

    pub fn neighbors(&self, n: usize) -> &[u32] {
        &self.adj[n]
    }

    pub fn degree(&self, n: usize) -> usize {
        self.adj[n].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (short, other) = if self.adj[a].len() <= self.adj[b].len() { (a, b) } else { (b, a) };
        self.adj[short].binary_search(&(other as u32)).is_ok()
    }

    /// Edges as `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, ns)| {
            ns.iter().map(|&b| b as usize).filter(move |&b| a < b).map(move |b| (a, b))
        })
    }

    /// Nodes within `radius` hops of `source`, in BFS discovery order
    /// (ties by node index), starting with `source`.
    pub fn bfs_within(&self, source: usize, radius: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        let mut order = vec![source];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(n) = queue.pop_front() {
            if dist[n] == radius {
                continue;
            }
            for &m in &self.adj[n] {
                let m = m as usize;
                if dist[m] == usize::MAX {
                    dist[m] = dist[n] + 1;
                    order.push(m);
                    queue.push_back(m);
                }
            }
        }
        order
    }

    /// Induced subgraph on `nodes`; node `i` of the result is `nodes[i]`.
    pub fn induced(&self, nodes: &[usize]) -> ColoredGraph {
        let mut local = vec![u32::MAX; self.node_count()];
        for (i, &n) in nodes.iter().enumerate() {
            local[n] = i as u32;
        }
        let colors = nodes.iter().map(|&n| self.colors[n]).collect();
        let adj = nodes
            .iter()
            .map(|&n| {
                let mut ns: Vec<u32> = self.adj[n]
                    .iter()
                    .map(|&m| local[m as usize])
                    .filter(|&m| m != u32::MAX)
                    .collect();
                ns.sort_unstable();
                ns
            })
            .collect();
        ColoredGraph { colors, adj }
    }

    /// Whether `nodes` induces a connected subgraph. The empty set is not connected.
    pub fn is_connected_subset(&self, nodes: &[usize]) -> bool {
        let Some(&first) = nodes.first() else {
            return false;
        };
        let mut seen = vec![false; nodes.len()];
        seen[0] = true;
        let mut stack = vec![first];
        let mut reached = 1;
        while let Some(n) = stack.pop() {
            for (i, &m) in nodes.iter().enumerate() {
                if !seen[i] && self.has_edge(n, m) {
                    seen[i] = true;
                    reached += 1;
                    stack.push(m);
                }
            }
        }
        reached == nodes.len()
    }
}
