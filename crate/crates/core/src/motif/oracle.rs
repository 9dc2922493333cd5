//! Brute-force reference counts for checking the ESU path.

use std::collections::BTreeMap;

use super::{canonical_motif, EgoNetwork, MotifError, MotifProfile, DEFAULT_MOTIF_SIZES};

pub const ORACLE_NODE_LIMIT: usize = 30;

/// Tallies every node subset of sizes 3 to 5 that contains the ego and
/// induces a connected subgraph. Each subset is canonicalized directly,
/// without the lookup table the fast path uses.
pub fn brute_force_counts(eg: &EgoNetwork) -> Result<MotifProfile, MotifError> {
    brute_force_counts_sized(eg, &DEFAULT_MOTIF_SIZES)
}

pub fn brute_force_counts_sized(eg: &EgoNetwork, sizes: &[usize]) -> Result<MotifProfile, MotifError> {
    let n = eg.graph.node_count();
    if n > ORACLE_NODE_LIMIT {
        return Err(MotifError::OracleTooLarge { nodes: n, limit: ORACLE_NODE_LIMIT });
    }
    let mut counts = BTreeMap::new();
    for &size in sizes {
        if !(3..=5).contains(&size) {
            return Err(MotifError::InvalidSize(size));
        }
        if size > n {
            continue;
        }
        // choose size-1 companions for the ego among nodes 1..n
        let mut pick: Vec<usize> = (1..size).collect();
        loop {
            let mut nodes = vec![0];
            nodes.extend_from_slice(&pick);
            if eg.graph.is_connected_subset(&nodes) {
                let id = canonical_motif(&nodes, &eg.graph)?;
                *counts.entry(id).or_insert(0u64) += 1;
            }
            if !next_combination(&mut pick, n) {
                break;
            }
        }
    }
    Ok(MotifProfile { ego: eg.ego.clone(), counts })
}

/// Advances a strictly increasing selection from `1..n`; false when exhausted.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - (k - i) {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
