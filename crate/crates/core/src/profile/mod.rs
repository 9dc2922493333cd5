//! Ratio profiles, their normalized form, and a PCA projection of them.
//!
//! For ego count `c` of motif `i` and the window-wide mean `m_i` over all
//! egos, the ratio value is `(c - m_i) / (c + m_i + epsilon)`. The normalized
//! profile scales the ratio vector to unit Euclidean length.

mod pca;

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::motif::{MotifId, MotifProfile};

pub use pca::{pca_project, Projection};

pub const DEFAULT_EPSILON: u32 = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("no motif profiles to compare")]
    Empty,
    #[error("epsilon must be at least 1")]
    InvalidEpsilon,
    #[error("need at least {needed} egos for {components} components, got {egos}")]
    TooFewEgos { egos: usize, components: usize, needed: usize },
    #[error("requested {components} components but the motif support has {support}")]
    TooFewMotifs { components: usize, support: usize },
    #[error("profiles are not aligned to the same support")]
    Misaligned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioProfile {
    pub ego: String,
    pub support: Arc<Vec<MotifId>>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedRatioProfile {
    pub ego: String,
    pub support: Arc<Vec<MotifId>>,
    pub values: Vec<f64>,
}

/// Sorted union of every motif seen in any profile.
pub fn motif_support(profiles: &[MotifProfile]) -> Vec<MotifId> {
    profiles
        .iter()
        .flat_map(|p| p.counts.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Count matrix over the shared support, one row per profile, zero-filled.
pub fn count_matrix(profiles: &[MotifProfile], support: &[MotifId]) -> Vec<Vec<u64>> {
    profiles.iter().map(|p| support.iter().map(|m| p.count(m)).collect()).collect()
}

#[inline]
pub fn ratio_value(count: f64, mean: f64, epsilon: f64) -> f64 {
    (count - mean) / (count + mean + epsilon)
}

pub fn ratio_profiles(profiles: &[MotifProfile], epsilon: u32) -> Result<Vec<RatioProfile>, ProfileError> {
    if profiles.is_empty() {
        return Err(ProfileError::Empty);
    }
    if epsilon == 0 {
        return Err(ProfileError::InvalidEpsilon);
    }
    let support = Arc::new(motif_support(profiles));
    let counts = count_matrix(profiles, &support);
    let n = profiles.len() as f64;
    let means: Vec<f64> = (0..support.len())
        .map(|j| counts.iter().map(|row| row[j] as f64).sum::<f64>() / n)
        .collect();
    let eps = f64::from(epsilon);
    Ok(profiles
        .par_iter()
        .zip(counts.par_iter())
        .map(|(p, row)| RatioProfile {
            ego: p.ego.clone(),
            support: Arc::clone(&support),
            values: row.iter().zip(&means).map(|(&c, &m)| ratio_value(c as f64, m, eps)).collect(),
        })
        .collect())
}

/// Scales to unit Euclidean norm; an all-zero profile stays all zero.
pub fn normalize_profile(rp: &RatioProfile) -> NormalizedRatioProfile {
    let norm = rp.values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let values = if norm > 0.0 { rp.values.iter().map(|v| v / norm).collect() } else { vec![0.0; rp.values.len()] };
    NormalizedRatioProfile { ego: rp.ego.clone(), support: Arc::clone(&rp.support), values }
}

pub fn normalize_profiles(rps: &[RatioProfile]) -> Vec<NormalizedRatioProfile> {
    rps.par_iter().map(normalize_profile).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn profile(ego: &str, counts: &[(&MotifId, u64)]) -> MotifProfile {
        MotifProfile { ego: ego.into(), counts: counts.iter().map(|(m, c)| ((*m).clone(), *c)).collect() }
    }

    #[test]
    fn ratio_hand_values() {
        assert_eq!(ratio_value(5.0, 5.0, 4.0), 0.0);
        assert!((ratio_value(10.0, 0.0, 4.0) - 10.0 / 14.0).abs() < 1e-12);

        let m = MotifId::user_video_star(2);
        let rps = ratio_profiles(&[profile("a", &[]), profile("b", &[(&m, 10)])], 4).unwrap();
        assert_eq!(rps[0].support.as_slice(), &[m]);
        // mean 5
        assert!((rps[0].values[0] - (-5.0 / 9.0)).abs() < 1e-12);
        assert!((rps[1].values[0] - (5.0 / 19.0)).abs() < 1e-12);
        assert!((rps[0].values[0] - -0.556).abs() < 1e-3);
        assert!((rps[1].values[0] - 0.263).abs() < 1e-3);
    }

    #[test]
    fn support_is_sorted_union() {
        let (a, b) = (MotifId::user_video_star(2), MotifId::user_video_star(3));
        let ps = [profile("x", &[(&b, 1)]), profile("y", &[(&a, 2)])];
        let support = motif_support(&ps);
        let mut expected = vec![a, b];
        expected.sort();
        assert_eq!(support, expected);
    }

    #[test]
    fn errors() {
        assert_eq!(ratio_profiles(&[], 4).unwrap_err(), ProfileError::Empty);
        let p = MotifProfile { ego: "a".into(), counts: BTreeMap::new() };
        assert_eq!(ratio_profiles(&[p], 0).unwrap_err(), ProfileError::InvalidEpsilon);
    }

    #[test]
    fn normalization() {
        let support = Arc::new(vec![MotifId::user_video_star(2), MotifId::user_video_star(3)]);
        let rp = RatioProfile { ego: "a".into(), support: Arc::clone(&support), values: vec![3.0, 4.0] };
        assert_eq!(normalize_profile(&rp).values, vec![0.6, 0.8]);
        let zero = RatioProfile { ego: "a".into(), support, values: vec![0.0, 0.0] };
        assert_eq!(normalize_profile(&zero).values, vec![0.0, 0.0]);
    }
}
