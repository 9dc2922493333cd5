//! Motif activity across windows and per-user rankings.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graphbuild::{CommentNetwork, UserLabel};
use crate::motif::{MotifId, MotifProfile};
use crate::profile::motif_support;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrackingError {
    #[error("no users labeled {0}")]
    EmptyLabelClass(UserLabel),
}

/// Edge count and ego profiles of one window.
#[derive(Debug, Clone, Copy)]
pub struct WindowActivity<'a> {
    pub edge_count: usize,
    pub profiles: &'a [MotifProfile],
}

impl<'a> WindowActivity<'a> {
    pub fn new(net: &CommentNetwork, profiles: &'a [MotifProfile]) -> Self {
        Self { edge_count: net.edge_count(), profiles }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotifSeries {
    pub motif: MotifId,
    /// summed ego counts per window
    pub raw: Vec<u64>,
    /// `raw / edge_count` per window
    pub per_edge: Vec<f64>,
    /// `per_edge` min-max scaled to [0, 1]
    pub normalized: Vec<f64>,
}

/// Min-max scaling; a constant series maps to all zeros.
pub fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

pub fn motif_series(windows: &[WindowActivity<'_>], motif: &MotifId) -> MotifSeries {
    let raw: Vec<u64> = windows.iter().map(|w| w.profiles.iter().map(|p| p.count(motif)).sum()).collect();
    let per_edge: Vec<f64> = windows
        .iter()
        .zip(&raw)
        .map(|(w, &r)| if w.edge_count == 0 { 0.0 } else { r as f64 / w.edge_count as f64 })
        .collect();
    let normalized = min_max(&per_edge);
    MotifSeries { motif: motif.clone(), raw, per_edge, normalized }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankEntry {
    pub user: String,
    pub count: u64,
    pub label: Option<UserLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRanking {
    pub motif: MotifId,
    pub window: usize,
    pub entries: Vec<RankEntry>,
}

/// Users with a nonzero count of `motif`, by descending count then user id.
pub fn rank_users_by_motif(
    window_profiles: &[MotifProfile],
    motif: &MotifId,
    labels: &BTreeMap<String, UserLabel>,
    window: usize,
) -> UserRanking {
    let mut entries: Vec<RankEntry> = window_profiles
        .iter()
        .map(|p| (p, p.count(motif)))
        .filter(|&(_, c)| c > 0)
        .map(|(p, count)| RankEntry { user: p.ego.clone(), count, label: labels.get(&p.ego).copied() })
        .collect();
    entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.user.cmp(&b.user)));
    UserRanking { motif: motif.clone(), window, entries }
}

/// Scores each motif by the difference between the mean share of that motif
/// in SPAM users' profiles and in REGULAR users' profiles. Profiles are L1
/// normalized first. Egos without a label are ignored.
pub fn discriminating_motifs(
    window_profiles: &[MotifProfile],
    labels: &BTreeMap<String, UserLabel>,
    top_n: usize,
) -> Result<Vec<(MotifId, f64)>, TrackingError> {
    let support = motif_support(window_profiles);
    let mut sums = [vec![0.0; support.len()], vec![0.0; support.len()]];
    let mut sizes = [0usize; 2];
    for p in window_profiles {
        let class = match labels.get(&p.ego) {
            Some(UserLabel::Spam) => 0,
            Some(UserLabel::Regular) => 1,
            None => continue,
        };
        sizes[class] += 1;
        let total = p.total();
        if total == 0 {
            continue;
        }
        for (j, m) in support.iter().enumerate() {
            sums[class][j] += p.count(m) as f64 / total as f64;
        }
    }
    if sizes[0] == 0 {
        // an empty profile list still needs both classes
        return Err(TrackingError::EmptyLabelClass(UserLabel::Spam));
    }
    if sizes[1] == 0 {
        return Err(TrackingError::EmptyLabelClass(UserLabel::Regular));
    }
    let mut scored: Vec<(MotifId, f64)> = support
        .into_iter()
        .enumerate()
        .map(|(j, m)| (m, sums[0][j] / sizes[0] as f64 - sums[1][j] / sizes[1] as f64))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(top_n);
    Ok(scored)
}

/// Union of motifs across several windows' profiles, sorted.
pub fn tracked_motifs<'a>(windows: impl IntoIterator<Item = &'a [MotifProfile]>) -> Vec<MotifId> {
    windows
        .into_iter()
        .flat_map(|ps| ps.iter().flat_map(|p| p.counts.keys().cloned()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(ego: &str, counts: &[(&MotifId, u64)]) -> MotifProfile {
        MotifProfile { ego: ego.into(), counts: counts.iter().map(|(m, c)| ((*m).clone(), *c)).collect() }
    }

    #[test]
    fn min_max_examples() {
        let v = min_max(&[0.1, 0.3, 0.2]);
        let expected = [0.0, 1.0, 0.5];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(min_max(&[0.4, 0.4, 0.4]), vec![0.0; 3]);
        assert!(min_max(&[]).is_empty());
    }

    #[test]
    fn series_divides_by_edges() {
        let m = MotifId::user_video_star(4);
        let w0 = [profile("a", &[(&m, 2)]), profile("b", &[(&m, 3)])];
        let w1: [MotifProfile; 0] = [];
        let w2 = [profile("a", &[(&m, 10)])];
        let windows = [
            WindowActivity { edge_count: 10, profiles: &w0 },
            WindowActivity { edge_count: 0, profiles: &w1 },
            WindowActivity { edge_count: 5, profiles: &w2 },
        ];
        let s = motif_series(&windows, &m);
        assert_eq!(s.raw, vec![5, 0, 10]);
        assert_eq!(s.per_edge, vec![0.5, 0.0, 2.0]);
        assert_eq!(s.normalized, vec![0.25, 0.0, 1.0]);
    }

    #[test]
    fn ranking_order_and_ties() {
        let m = MotifId::user_video_star(4);
        let ps = [profile("c", &[]), profile("b", &[(&m, 3)]), profile("a", &[(&m, 10)]), profile("d", &[(&m, 3)])];
        let r = rank_users_by_motif(&ps, &m, &BTreeMap::new(), 0);
        let users: Vec<_> = r.entries.iter().map(|e| e.user.as_str()).collect();
        assert_eq!(users, vec!["a", "b", "d"]);
    }

    #[test]
    fn discriminating_scores() {
        let (star, path) = (MotifId::user_video_star(4), MotifId::user_video_star(2));
        let ps = [profile("s", &[(&star, 3), (&path, 1)]), profile("r", &[(&path, 4)])];
        let labels = BTreeMap::from([("s".to_string(), UserLabel::Spam), ("r".to_string(), UserLabel::Regular)]);
        let top = discriminating_motifs(&ps, &labels, 5).unwrap();
        assert_eq!(top[0], (star.clone(), 0.75));
        assert_eq!(top[1], (path, -0.75));
        assert_eq!(discriminating_motifs(&ps, &labels, 1).unwrap().len(), 1);
    }

    #[test]
    fn degenerate_labels() {
        let m = MotifId::user_video_star(2);
        let ps = [profile("a", &[(&m, 1)]), profile("b", &[(&m, 2)])];
        let all_regular = BTreeMap::from([("a".to_string(), UserLabel::Regular), ("b".to_string(), UserLabel::Regular)]);
        assert_eq!(discriminating_motifs(&ps, &all_regular, 3), Err(TrackingError::EmptyLabelClass(UserLabel::Spam)));

        let zeros = [profile("a", &[]), profile("b", &[])];
        let mixed = BTreeMap::from([("a".to_string(), UserLabel::Spam), ("b".to_string(), UserLabel::Regular)]);
        assert!(discriminating_motifs(&zeros, &mixed, 3).unwrap().iter().all(|(_, s)| *s == 0.0));
    }
}
