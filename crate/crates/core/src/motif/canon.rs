//! Canonical forms of small colored graphs.
//!
//! A canonical form is the lexicographically smallest `(color string, edge
//! list)` pair over all node orderings. Colors sort `U` before `V`, so only
//! orderings that place every user before every video need to be tried.

use std::sync::OnceLock;

use crate::graph::NodeColor;

use super::MotifId;

pub const MAX_MOTIF_SIZE: usize = 5;

/// Bit index of the unordered pair `(i, j)`, `i < j`, in an edge mask.
/// Pairs are grouped by their larger endpoint so that adding node `j`
/// touches bits `j(j-1)/2 .. j(j-1)/2 + j`.
#[inline]
pub(crate) const fn pair_bit(i: usize, j: usize) -> usize {
    j * (j - 1) / 2 + i
}

pub(crate) const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Smallest encoding over all color-sorted node orderings. Connectivity is
/// not checked here.
pub fn canonical_form(colors: &[NodeColor], edges: &[(usize, usize)]) -> MotifId {
    let n = colors.len();
    assert!(n <= MAX_MOTIF_SIZE + 1, "canonical_form supports at most {} nodes", MAX_MOTIF_SIZE + 1);
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        if a != b {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    }
    let mut sorted_colors = colors.to_vec();
    sorted_colors.sort();

    let mut best: Option<Vec<(usize, usize)>> = None;
    // order[pos] = original node placed at position pos
    for order in permutations(n) {
        if order.iter().map(|&o| colors[o]).ne(sorted_colors.iter().copied()) {
            continue;
        }
        let mut list = Vec::with_capacity(edges.len());
        for i in 0..n {
            for j in i + 1..n {
                if adj[order[i]][order[j]] {
                    list.push((i, j));
                }
            }
        }
        if best.as_ref().is_none_or(|b| list < *b) {
            best = Some(list);
        }
    }
    MotifId::from_parts(&sorted_colors, &best.unwrap_or_default())
}

/// Lookup from `(size, color mask, edge mask)` to a motif class, covering
/// every connected colored graph on 3 to 5 nodes.
pub(crate) struct MotifTable {
    classes: Vec<MotifId>,
    /// per size, indexed by `color_mask << pair_count(size) | edge_mask`
    lookup: [Vec<u32>; MAX_MOTIF_SIZE + 1],
}

pub(crate) const NOT_CONNECTED: u32 = u32::MAX;

fn mask_connected(n: usize, edge_mask: u32) -> bool {
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let mut next = 0;
        for a in 0..n {
            if frontier & (1 << a) == 0 {
                continue;
            }
            for b in 0..n {
                if a != b && edge_mask & (1 << pair_bit(a.min(b), a.max(b))) != 0 {
                    next |= 1 << b;
                }
            }
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == (1 << n) - 1
}

fn mask_edges(n: usize, edge_mask: u32) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for j in 1..n {
        for i in 0..j {
            if edge_mask & (1 << pair_bit(i, j)) != 0 {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn mask_colors(n: usize, color_mask: u32) -> Vec<NodeColor> {
    (0..n)
        .map(|i| if color_mask & (1 << i) != 0 { NodeColor::Video } else { NodeColor::User })
        .collect()
}

impl MotifTable {
    fn build() -> Self {
        let mut classes: Vec<MotifId> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut lookup: [Vec<u32>; MAX_MOTIF_SIZE + 1] = Default::default();
        for n in 3..=MAX_MOTIF_SIZE {
            let pairs = pair_count(n);
            let mut table = vec![NOT_CONNECTED; 1 << (n + pairs)];
            for edge_mask in 0..(1u32 << pairs) {
                if !mask_connected(n, edge_mask) {
                    continue;
                }
                let edges = mask_edges(n, edge_mask);
                for color_mask in 0..(1u32 << n) {
                    let id = canonical_form(&mask_colors(n, color_mask), &edges);
                    let class = *index.entry(id.clone()).or_insert_with(|| {
                        classes.push(id);
                        (classes.len() - 1) as u32
                    });
                    table[((color_mask as usize) << pairs) | edge_mask as usize] = class;
                }
            }
            lookup[n] = table;
        }
        Self { classes, lookup }
    }

    pub(crate) fn get() -> &'static MotifTable {
        static TABLE: OnceLock<MotifTable> = OnceLock::new();
        TABLE.get_or_init(MotifTable::build)
    }

    #[inline]
    pub(crate) fn class_of(&self, size: usize, color_mask: u32, edge_mask: u32) -> u32 {
        self.lookup[size][((color_mask as usize) << pair_count(size)) | edge_mask as usize]
    }

    pub(crate) fn motif(&self, class: u32) -> &MotifId {
        &self.classes[class as usize]
    }

    pub(crate) fn classes(&self) -> &[MotifId] {
        &self.classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use NodeColor::*;

    #[test]
    fn pair_bits_are_dense() {
        let mut bits: Vec<usize> = (1..5).flat_map(|j| (0..j).map(move |i| pair_bit(i, j))).collect();
        bits.sort();
        assert_eq!(bits, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn table_agrees_with_direct_canonicalization() {
        let table = MotifTable::get();
        for n in 3..=5 {
            for edge_mask in (0..(1u32 << pair_count(n))).step_by(7) {
                for color_mask in 0..(1u32 << n) {
                    let class = table.class_of(n, color_mask, edge_mask);
                    if !mask_connected(n, edge_mask) {
                        assert_eq!(class, NOT_CONNECTED);
                        continue;
                    }
                    let direct = canonical_form(&mask_colors(n, color_mask), &mask_edges(n, edge_mask));
                    assert_eq!(table.motif(class), &direct);
                }
            }
        }
    }

    #[test]
    fn colors_sort_users_first() {
        let id = canonical_form(&[Video, User, Video], &[(0, 1), (1, 2)]);
        assert_eq!(id.as_str(), "n=3;colors=UVV;edges=0-1,0-2");
    }
}
