//! Egocentric networks and colored motif counting.
//!
//! For each user (the ego) the induced k-hop neighbourhood is extracted and
//! every connected induced subgraph of 3 to 5 nodes that contains the ego is
//! classified up to color-preserving isomorphism.

mod canon;
mod esu;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ColoredGraph, NodeColor};
use crate::graphbuild::CommentNetwork;

pub use canon::{canonical_form, MAX_MOTIF_SIZE};
pub use oracle::brute_force_counts;

use canon::{MotifTable, NOT_CONNECTED};
use esu::Esu;

pub const DEFAULT_EGO_RADIUS: usize = 2;
pub const DEFAULT_MOTIF_SIZES: [usize; 3] = [3, 4, 5];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MotifError {
    #[error("unknown ego `{0}`")]
    UnknownEgo(String),
    #[error("node set does not induce a connected subgraph")]
    Disconnected,
    #[error("motif size {0} outside supported range 3..=5")]
    InvalidSize(usize),
    #[error("oracle limited to {limit} nodes, graph has {nodes}")]
    OracleTooLarge { nodes: usize, limit: usize },
    #[error("malformed motif id `{0}`")]
    Parse(String),
}

/// Canonical name of a connected colored subgraph:
/// `n=<size>;colors=<U..V..>;edges=<i-j,...>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MotifId(String);

impl MotifId {
    pub(crate) fn from_parts(colors: &[NodeColor], edges: &[(usize, usize)]) -> Self {
        let colors: String = colors.iter().map(|c| c.letter()).collect();
        let edges: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        MotifId(format!("n={};colors={};edges={}", colors.len(), colors, edges.join(",")))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Node colors and edges as encoded in the id.
    pub fn parts(&self) -> (Vec<NodeColor>, Vec<(usize, usize)>) {
        parse_parts(&self.0).expect("MotifId holds a well-formed id")
    }

    pub fn size(&self) -> usize {
        self.parts().0.len()
    }

    pub fn user_count(&self) -> usize {
        self.parts().0.iter().filter(|&&c| c == NodeColor::User).count()
    }

    pub fn video_count(&self) -> usize {
        self.size() - self.user_count()
    }

    pub fn has_video_video_edge(&self) -> bool {
        let (colors, edges) = self.parts();
        edges.iter().any(|&(a, b)| colors[a] == NodeColor::Video && colors[b] == NodeColor::Video)
    }

    /// One user joined to `videos` videos and nothing else.
    pub fn user_video_star(videos: usize) -> Self {
        let mut colors = vec![NodeColor::User];
        colors.extend(std::iter::repeat_n(NodeColor::Video, videos));
        let edges: Vec<_> = (1..=videos).map(|v| (0, v)).collect();
        canonical_form(&colors, &edges)
    }

    /// Multi-line text drawing: node list and edge list.
    pub fn render_ascii(&self) -> String {
        let (colors, edges) = self.parts();
        let mut out = String::new();
        out.push_str(&format!("{self}\n"));
        for (i, c) in colors.iter().enumerate() {
            let ns: Vec<String> = edges
                .iter()
                .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
                .map(|n| format!("{}{}", colors[n].letter(), n))
                .collect();
            out.push_str(&format!("  {}{} -- {}\n", c.letter(), i, ns.join(" ")));
        }
        out
    }
}

fn parse_parts(s: &str) -> Option<(Vec<NodeColor>, Vec<(usize, usize)>)> {
    let mut fields = s.split(';');
    let n: usize = fields.next()?.strip_prefix("n=")?.parse().ok()?;
    let colors: Vec<NodeColor> =
        fields.next()?.strip_prefix("colors=")?.chars().map(NodeColor::from_letter).collect::<Option<_>>()?;
    let edge_field = fields.next()?.strip_prefix("edges=")?;
    if fields.next().is_some() || colors.len() != n {
        return None;
    }
    let mut edges = Vec::new();
    for e in edge_field.split(',').filter(|e| !e.is_empty()) {
        let (a, b) = e.split_once('-')?;
        let (a, b): (usize, usize) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        if a >= n || b >= n || a == b {
            return None;
        }
        edges.push((a.min(b), a.max(b)));
    }
    Some((colors, edges))
}

impl FromStr for MotifId {
    type Err = MotifError;

    /// Accepts any node ordering and returns the canonical id.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (colors, edges) = parse_parts(s.trim()).ok_or_else(|| MotifError::Parse(s.to_string()))?;
        if !(3..=MAX_MOTIF_SIZE).contains(&colors.len()) {
            return Err(MotifError::InvalidSize(colors.len()));
        }
        let g = ColoredGraph::from_edges(colors.clone(), edges.iter().copied());
        if !g.is_connected_subset(&(0..colors.len()).collect::<Vec<_>>()) {
            return Err(MotifError::Disconnected);
        }
        Ok(canonical_form(&colors, &edges))
    }
}

impl fmt::Display for MotifId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Canonical motif of the subgraph induced by `nodes` in `g`.
pub fn canonical_motif(nodes: &[usize], g: &ColoredGraph) -> Result<MotifId, MotifError> {
    if !(1..=MAX_MOTIF_SIZE).contains(&nodes.len()) {
        return Err(MotifError::InvalidSize(nodes.len()));
    }
    if !g.is_connected_subset(nodes) {
        return Err(MotifError::Disconnected);
    }
    let colors: Vec<NodeColor> = nodes.iter().map(|&n| g.color(n)).collect();
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if g.has_edge(nodes[i], nodes[j]) {
                edges.push((i, j));
            }
        }
    }
    Ok(canonical_form(&colors, &edges))
}

/// Every connected colored motif class on `size` nodes, optionally
/// excluding classes with a video-video edge, in id order.
pub fn all_motifs(size: usize, allow_video_video: bool) -> Vec<MotifId> {
    let mut out: Vec<MotifId> = MotifTable::get()
        .classes()
        .iter()
        .filter(|m| m.size() == size && (allow_video_video || !m.has_video_video_edge()))
        .cloned()
        .collect();
    out.sort();
    out
}

/// Induced k-hop neighbourhood of one user. The ego is local node 0.
#[derive(Debug, Clone)]
pub struct EgoNetwork {
    pub ego: String,
    /// parent-network index of each local node
    pub members: Vec<usize>,
    pub graph: ColoredGraph,
}

impl EgoNetwork {
    pub fn from_graph(ego: impl Into<String>, parent: &ColoredGraph, ego_node: usize, radius: usize) -> Self {
        let members = parent.bfs_within(ego_node, radius);
        let graph = parent.induced(&members);
        Self { ego: ego.into(), members, graph }
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

pub fn ego_network(net: &CommentNetwork, ego: &str, radius: usize) -> Result<EgoNetwork, MotifError> {
    let node = net.user_index(ego).ok_or_else(|| MotifError::UnknownEgo(ego.to_string()))?;
    Ok(EgoNetwork::from_graph(ego, net.graph(), node, radius))
}

/// Streams each connected induced subgraph of exactly `size` nodes once.
pub fn enumerate_connected_subgraphs<F: FnMut(&[usize])>(
    g: &ColoredGraph,
    size: usize,
    mut visit: F,
) -> Result<(), MotifError> {
    if !(1..=MAX_MOTIF_SIZE).contains(&size) {
        return Err(MotifError::InvalidSize(size));
    }
    let mut esu = Esu::new(g, size);
    let mut on_sub = |sub: &[usize], _mask: u32| {
        if sub.len() == size {
            visit(sub);
        }
    };
    for root in 0..g.node_count() {
        esu.run_from(root, &mut on_sub);
    }
    Ok(())
}

/// Per-ego motif counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifProfile {
    pub ego: String,
    pub counts: BTreeMap<MotifId, u64>,
}

impl MotifProfile {
    pub fn count(&self, motif: &MotifId) -> u64 {
        self.counts.get(motif).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

fn validate_sizes(sizes: &[usize]) -> Result<(), MotifError> {
    match sizes.iter().find(|s| !(3..=MAX_MOTIF_SIZE).contains(s)) {
        Some(&bad) => Err(MotifError::InvalidSize(bad)),
        None => Ok(()),
    }
}

/// Counts motif instances of sizes 3 to 5 containing the ego.
pub fn ego_motif_counts(eg: &EgoNetwork) -> MotifProfile {
    ego_motif_counts_sized(eg, &DEFAULT_MOTIF_SIZES).expect("default sizes are valid")
}

/// Counts the motif instances of the given sizes that contain the ego.
///
/// Enumeration is rooted at the ego: since the ego has the smallest local
/// index, the subgraphs ESU reaches from it are exactly those containing it.
pub fn ego_motif_counts_sized(eg: &EgoNetwork, sizes: &[usize]) -> Result<MotifProfile, MotifError> {
    validate_sizes(sizes)?;
    let mut profile = MotifProfile { ego: eg.ego.clone(), counts: BTreeMap::new() };
    let Some(&max_size) = sizes.iter().max() else {
        return Ok(profile);
    };
    let mut wanted = [false; MAX_MOTIF_SIZE + 1];
    for &s in sizes {
        wanted[s] = true;
    }
    let table = MotifTable::get();
    let colors = eg.graph.colors();
    let mut tally: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
    let mut esu = Esu::new(&eg.graph, max_size);
    esu.run_from(0, &mut |sub: &[usize], edge_mask: u32| {
        if !wanted[sub.len()] {
            return;
        }
        let color_mask = sub
            .iter()
            .enumerate()
            .fold(0u32, |m, (i, &n)| if colors[n] == NodeColor::Video { m | 1 << i } else { m });
        let class = table.class_of(sub.len(), color_mask, edge_mask);
        debug_assert_ne!(class, NOT_CONNECTED);
        *tally.entry(class).or_insert(0) += 1;
    });
    profile.counts = tally.into_iter().map(|(c, n)| (table.motif(c).clone(), n)).collect();
    Ok(profile)
}

/// Motif profiles for every user of the network, in user id order.
/// Egos are processed in parallel on the current rayon pool.
pub fn window_profiles(net: &CommentNetwork, radius: usize, sizes: &[usize]) -> Result<Vec<MotifProfile>, MotifError> {
    validate_sizes(sizes)?;
    let users: Vec<&str> = net.users().collect();
    users
        .par_iter()
        .map(|&u| {
            let eg = ego_network(net, u, radius)?;
            ego_motif_counts_sized(&eg, sizes)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use NodeColor::*;

    fn ego_of(colors: Vec<NodeColor>, edges: &[(usize, usize)], radius: usize) -> EgoNetwork {
        let g = ColoredGraph::from_edges(colors, edges.iter().copied());
        EgoNetwork::from_graph("ego", &g, 0, radius)
    }

    #[test]
    fn isolated_ego() {
        let eg = ego_of(vec![User, Video], &[], 2);
        assert_eq!(eg.node_count(), 1);
        assert!(ego_motif_counts(&eg).counts.is_empty());
    }

    #[test]
    fn star_ego_network() {
        let eg = ego_of(vec![User, Video, Video, Video, Video], &[(0, 1), (0, 2), (0, 3), (0, 4)], 2);
        assert_eq!(eg.node_count(), 5);
        assert_eq!(eg.graph.edge_count(), 4);
    }

    #[test]
    fn radius_cuts_path() {
        // ego - u2 - v2 - u3
        let eg = ego_of(vec![User, User, Video, User], &[(0, 1), (1, 2), (2, 3)], 2);
        let mut members = eg.members.clone();
        members.sort();
        assert_eq!(members, vec![0, 1, 2]);
    }

    #[test]
    fn unknown_ego_is_an_error() {
        let net = CommentNetwork::default();
        assert_eq!(ego_network(&net, "nobody", 2).unwrap_err(), MotifError::UnknownEgo("nobody".into()));
    }

    #[test]
    fn enumeration_small_cases() {
        let tri = ColoredGraph::from_edges(vec![User; 3], [(0, 1), (1, 2), (0, 2)]);
        let mut n = 0;
        enumerate_connected_subgraphs(&tri, 3, |_| n += 1).unwrap();
        assert_eq!(n, 1);

        let star = ColoredGraph::from_edges(vec![User; 5], [(0, 1), (0, 2), (0, 3), (0, 4)]);
        let mut n = 0;
        enumerate_connected_subgraphs(&star, 3, |_| n += 1).unwrap();
        assert_eq!(n, 6);

        let path = ColoredGraph::from_edges(vec![User; 5], [(0, 1), (1, 2), (2, 3), (3, 4)]);
        let mut seen = Vec::new();
        enumerate_connected_subgraphs(&path, 5, |s| {
            let mut s = s.to_vec();
            s.sort();
            seen.push(s)
        })
        .unwrap();
        assert_eq!(seen, vec![vec![0, 1, 2, 3, 4]]);

        assert_eq!(enumerate_connected_subgraphs(&path, 6, |_| {}), Err(MotifError::InvalidSize(6)));
    }

    #[test]
    fn canonical_motif_examples() {
        // U - V - U with ids permuted
        let g = ColoredGraph::from_edges(vec![User, Video, User, Video, User], [(0, 1), (1, 2), (3, 4), (3, 0)]);
        assert_eq!(canonical_motif(&[0, 1, 2], &g).unwrap(), canonical_motif(&[4, 3, 0], &g).unwrap());

        let uuv = ColoredGraph::from_edges(vec![User, User, Video], [(0, 1), (1, 2)]);
        let uvu = ColoredGraph::from_edges(vec![User, Video, User], [(0, 1), (1, 2)]);
        assert_ne!(canonical_motif(&[0, 1, 2], &uuv).unwrap(), canonical_motif(&[0, 1, 2], &uvu).unwrap());

        assert_eq!(MotifId::user_video_star(4).as_str(), "n=5;colors=UVVVV;edges=0-1,0-2,0-3,0-4");

        let split = ColoredGraph::from_edges(vec![User, User, Video], [(0, 1)]);
        assert_eq!(canonical_motif(&[0, 1, 2], &split), Err(MotifError::Disconnected));
    }

    #[test]
    fn star_counts() {
        let eg = ego_of(vec![User, Video, Video, Video, Video], &[(0, 1), (0, 2), (0, 3), (0, 4)], 2);
        let p = ego_motif_counts(&eg);
        assert_eq!(p.counts.len(), 3);
        assert_eq!(p.count(&MotifId::user_video_star(2)), 6);
        assert_eq!(p.count(&MotifId::user_video_star(3)), 4);
        assert_eq!(p.count(&MotifId::user_video_star(4)), 1);
    }

    #[test]
    fn user_triangle() {
        let eg = ego_of(vec![User; 3], &[(0, 1), (1, 2), (0, 2)], 2);
        let p = ego_motif_counts(&eg);
        let tri: MotifId = "n=3;colors=UUU;edges=0-1,0-2,1-2".parse().unwrap();
        assert_eq!(p.counts, BTreeMap::from([(tri, 1)]));
    }

    #[test]
    fn motif_id_parsing_canonicalizes() {
        let a: MotifId = "n=3;colors=VUV;edges=0-1,1-2".parse().unwrap();
        assert_eq!(a.as_str(), "n=3;colors=UVV;edges=0-1,0-2");
        assert!("n=3;colors=UUV;edges=0-1".parse::<MotifId>().is_err());
        assert!("garbage".parse::<MotifId>().is_err());
        assert!("n=2;colors=UV;edges=0-1".parse::<MotifId>().is_err());
    }

    #[test]
    fn size_subset() {
        let eg = ego_of(vec![User, Video, Video, Video, Video], &[(0, 1), (0, 2), (0, 3), (0, 4)], 2);
        let p = ego_motif_counts_sized(&eg, &[4]).unwrap();
        assert_eq!(p.counts.len(), 1);
        assert_eq!(ego_motif_counts_sized(&eg, &[2]), Err(MotifError::InvalidSize(2)));
    }

    #[test]
    fn motif_catalogue_has_no_video_pairs() {
        for size in 3..=5 {
            let all = all_motifs(size, false);
            assert!(!all.is_empty());
            assert!(all.iter().all(|m| !m.has_video_video_edge() && m.size() == size));
        }
    }

    #[test]
    fn ascii_rendering_lists_neighbors() {
        let text = MotifId::user_video_star(2).render_ascii();
        assert!(text.contains("U0 -- V1 V2"));
    }
}
