//! Per-window user/video comment network.
//!
//! Users are joined to the videos they commented on (edge weight = number of
//! retained comments) and to other users whose comments are near duplicates
//! of theirs. Weights are kept for export only; motif counting ignores them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{ColoredGraph, NodeColor};
use crate::ingest::CommentRecord;
use crate::textnorm::{jaccard_distance, Normalizer, ShingleSet};

pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.6;

/// A comment that survived normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedComment {
    pub comment_id: String,
    pub user_id: String,
    pub video_id: String,
    pub modified_text: String,
    pub shingles: ShingleSet,
}

impl NormalizedComment {
    pub fn from_record(record: &CommentRecord, normalizer: &Normalizer) -> Option<Self> {
        let (modified_text, shingles) = normalizer.process(&record.text)?;
        Some(Self {
            comment_id: record.comment_id.clone(),
            user_id: record.user_id.clone(),
            video_id: record.video_id.clone(),
            modified_text,
            shingles,
        })
    }
}

/// Normalizes a window's records, dropping those that are too short.
pub fn normalize_records(records: &[CommentRecord], normalizer: &Normalizer) -> Vec<NormalizedComment> {
    records
        .par_iter()
        .filter_map(|r| NormalizedComment::from_record(r, normalizer))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserLabel {
    Spam,
    Regular,
}

impl fmt::Display for UserLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UserLabel::Spam => "spam",
            UserLabel::Regular => "regular",
        })
    }
}

impl std::str::FromStr for UserLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spam" => Ok(UserLabel::Spam),
            "regular" => Ok(UserLabel::Regular),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

/// Undirected two-colored comment network for one time window.
///
/// Users occupy the low node indices in id order, videos follow in id order.
#[derive(Debug, Clone, Default)]
pub struct CommentNetwork {
    graph: ColoredGraph,
    ids: Vec<String>,
    index: HashMap<(NodeColor, String), usize>,
    /// (user node, video node) -> comment count
    weights: BTreeMap<(usize, usize), u32>,
    labels: BTreeMap<String, UserLabel>,
}

impl CommentNetwork {
    fn with_nodes(users: Vec<String>, videos: Vec<String>) -> Self {
        let mut colors = vec![NodeColor::User; users.len()];
        colors.extend(std::iter::repeat_n(NodeColor::Video, videos.len()));
        let mut index = HashMap::with_capacity(users.len() + videos.len());
        let ids: Vec<String> = users.into_iter().chain(videos).collect();
        for (i, id) in ids.iter().enumerate() {
            index.insert((colors[i], id.clone()), i);
        }
        Self { graph: ColoredGraph::new(colors), ids, index, weights: BTreeMap::new(), labels: BTreeMap::new() }
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn node_id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn node_index(&self, color: NodeColor, id: &str) -> Option<usize> {
        self.index.get(&(color, id.to_string())).copied()
    }

    pub fn user_index(&self, id: &str) -> Option<usize> {
        self.node_index(NodeColor::User, id)
    }

    pub fn user_count(&self) -> usize {
        self.graph.colors().iter().filter(|&&c| c == NodeColor::User).count()
    }

    pub fn video_count(&self) -> usize {
        self.graph.node_count() - self.user_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.node_count() == 0
    }

    /// User ids in ascending order.
    pub fn users(&self) -> impl Iterator<Item = &str> + '_ {
        (0..self.graph.node_count())
            .filter(|&n| self.graph.color(n) == NodeColor::User)
            .map(|n| self.ids[n].as_str())
    }

    pub fn videos(&self) -> impl Iterator<Item = &str> + '_ {
        (0..self.graph.node_count())
            .filter(|&n| self.graph.color(n) == NodeColor::Video)
            .map(|n| self.ids[n].as_str())
    }

    /// `(user, video, weight)` triples.
    pub fn uv_edges(&self) -> impl Iterator<Item = (&str, &str, u32)> + '_ {
        self.weights.iter().map(|(&(u, v), &w)| (self.ids[u].as_str(), self.ids[v].as_str(), w))
    }

    /// Unordered user pairs, each reported once.
    pub fn uu_edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.graph
            .edges()
            .filter(|&(a, b)| self.graph.color(a) == NodeColor::User && self.graph.color(b) == NodeColor::User)
            .map(|(a, b)| (self.ids[a].as_str(), self.ids[b].as_str()))
    }

    pub fn labels(&self) -> &BTreeMap<String, UserLabel> {
        &self.labels
    }

    pub fn label(&self, user: &str) -> Option<UserLabel> {
        self.labels.get(user).copied()
    }

    pub fn set_labels(&mut self, labels: BTreeMap<String, UserLabel>) {
        self.labels = labels;
    }

    pub fn spam_user_count(&self) -> usize {
        self.labels.values().filter(|&&l| l == UserLabel::Spam).count()
    }

    pub fn to_graphml(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        s.push_str("  <key id=\"color\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n");
        s.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
        s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n");
        s.push_str("  <graph id=\"comments\" edgedefault=\"undirected\">\n");
        for n in 0..self.graph.node_count() {
            let color = self.graph.color(n);
            let _ = write!(s, "    <node id=\"{}\"><data key=\"color\">{color}</data>", self.xml_node_id(n));
            if let Some(l) = self.labels.get(&self.ids[n]).filter(|_| color == NodeColor::User) {
                let _ = write!(s, "<data key=\"label\">{l}</data>");
            }
            s.push_str("</node>\n");
        }
        for (a, b) in self.graph.edges() {
            let w = self.weights.get(&(a, b)).copied().unwrap_or(1);
            let _ = writeln!(
                s,
                "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{w}</data></edge>",
                self.xml_node_id(a),
                self.xml_node_id(b)
            );
        }
        s.push_str("  </graph>\n</graphml>\n");
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph comments {\n");
        for n in 0..self.graph.node_count() {
            let color = self.graph.color(n);
            let label = match color {
                NodeColor::User => self.labels.get(&self.ids[n]).map(ToString::to_string).unwrap_or_default(),
                NodeColor::Video => String::new(),
            };
            let _ = writeln!(s, "  \"{}\" [color=\"{color}\", label=\"{label}\"];", dot_escape(&self.prefixed_id(n)));
        }
        for (a, b) in self.graph.edges() {
            let w = self.weights.get(&(a, b)).copied().unwrap_or(1);
            let _ = writeln!(
                s,
                "  \"{}\" -- \"{}\" [weight={w}];",
                dot_escape(&self.prefixed_id(a)),
                dot_escape(&self.prefixed_id(b))
            );
        }
        s.push_str("}\n");
        s
    }

    /// User and video ids may collide, so exported ids carry a color prefix.
    fn prefixed_id(&self, n: usize) -> String {
        let prefix = match self.graph.color(n) {
            NodeColor::User => "u:",
            NodeColor::Video => "v:",
        };
        format!("{prefix}{}", self.ids[n])
    }

    fn xml_node_id(&self, n: usize) -> String {
        xml_escape(&self.prefixed_id(n))
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Builds the window network from normalized comments.
///
/// Every pair of comments by distinct users at Jaccard distance strictly
/// below `threshold` links the two users (at most one edge per pair).
pub fn build_network(comments: &[NormalizedComment], threshold: f64) -> CommentNetwork {
    let users: BTreeSet<&str> = comments.iter().map(|c| c.user_id.as_str()).collect();
    let videos: BTreeSet<&str> = comments.iter().map(|c| c.video_id.as_str()).collect();
    let mut net = CommentNetwork::with_nodes(
        users.into_iter().map(String::from).collect(),
        videos.into_iter().map(String::from).collect(),
    );

    let user_nodes: Vec<usize> = comments.iter().map(|c| net.index[&(NodeColor::User, c.user_id.clone())]).collect();
    for (c, &u) in comments.iter().zip(&user_nodes) {
        let v = net.index[&(NodeColor::Video, c.video_id.clone())];
        *net.weights.entry((u, v)).or_insert(0) += 1;
    }
    let uv: Vec<(usize, usize)> = net.weights.keys().copied().collect();
    for (u, v) in uv {
        net.graph.add_edge(u, v);
    }

    let pairs: BTreeSet<(usize, usize)> = (0..comments.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (comments, user_nodes) = (&comments, &user_nodes);
            (i + 1..comments.len()).filter_map(move |j| {
                let (ui, uj) = (user_nodes[i], user_nodes[j]);
                if ui == uj {
                    return None;
                }
                let (a, b) = (&comments[i].shingles, &comments[j].shingles);
                // |a∩b|/|a∪b| <= min/max, so skip pairs that cannot get close enough
                let (lo, hi) = (a.len().min(b.len()), a.len().max(b.len()));
                if hi == 0 || 1.0 - lo as f64 / hi as f64 >= threshold {
                    return None;
                }
                (jaccard_distance(a, b) < threshold).then_some((ui.min(uj), ui.max(uj)))
            })
        })
        .collect();
    for (a, b) in pairs {
        net.graph.add_edge(a, b);
    }
    net
}

/// Removes users whose only neighbor is a single video, then any video left
/// without neighbors. One pass, not repeated to a fixpoint.
pub fn prune_singleton_users(net: &CommentNetwork) -> CommentNetwork {
    let g = &net.graph;
    let removed_user = |n: usize| {
        g.color(n) == NodeColor::User && g.degree(n) == 1 && g.color(g.neighbors(n)[0] as usize) == NodeColor::Video
    };
    let keep_user: Vec<bool> = (0..g.node_count()).map(|n| !removed_user(n)).collect();
    let keep = |n: usize| -> bool {
        match g.color(n) {
            NodeColor::User => keep_user[n],
            NodeColor::Video => g.neighbors(n).iter().any(|&m| keep_user[m as usize]),
        }
    };
    let kept: Vec<usize> = (0..g.node_count()).filter(|&n| keep(n)).collect();
    let users = kept.iter().filter(|&&n| g.color(n) == NodeColor::User).map(|&n| net.ids[n].clone()).collect();
    let videos = kept.iter().filter(|&&n| g.color(n) == NodeColor::Video).map(|&n| net.ids[n].clone()).collect();
    let mut out = CommentNetwork::with_nodes(users, videos);
    // both node lists preserve order, so old -> new is monotone
    let mut remap = vec![usize::MAX; g.node_count()];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new;
    }
    for (a, b) in g.edges() {
        if remap[a] != usize::MAX && remap[b] != usize::MAX {
            out.graph.add_edge(remap[a], remap[b]);
        }
    }
    for (&(u, v), &w) in &net.weights {
        if remap[u] != usize::MAX {
            out.weights.insert((remap[u], remap[v]), w);
        }
    }
    out.labels = net.labels.iter().filter(|(id, _)| out.user_index(id).is_some()).map(|(k, v)| (k.clone(), *v)).collect();
    out
}

/// Labels every user of `net` SPAM when any of their window comments carries
/// the spam hint, REGULAR otherwise.
pub fn label_users(net: &CommentNetwork, records: &[CommentRecord]) -> BTreeMap<String, UserLabel> {
    let hinted: BTreeSet<&str> = records.iter().filter(|r| r.spam_hint).map(|r| r.user_id.as_str()).collect();
    net.users()
        .map(|u| {
            let label = if hinted.contains(u) { UserLabel::Spam } else { UserLabel::Regular };
            (u.to_string(), label)
        })
        .collect()
}
