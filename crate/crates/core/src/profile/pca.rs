use std::cmp::Ordering;
use std::sync::Arc;

use crate::motif::MotifId;

use super::{NormalizedRatioProfile, ProfileError};

const JACOBI_TOLERANCE: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub egos: Vec<String>,
    pub support: Arc<Vec<MotifId>>,
    pub mean: Vec<f64>,
    /// one row per ego, one column per component
    pub coordinates: Vec<Vec<f64>>,
    /// fraction of total variance per component
    pub explained_variance: Vec<f64>,
    /// one unit vector over the support per component
    pub loadings: Vec<Vec<f64>>,
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and eigenvectors as columns of the second value.
pub(crate) fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = a.len();
    let mut v: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let frob = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let off = (0..d)
            .flat_map(|p| (0..d).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOLERANCE * frob || off == 0.0 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..d {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    ((0..d).map(|i| a[i][i]).collect(), v)
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Projects the profiles onto their leading principal components.
///
/// Components come from the covariance matrix of the mean-centered profile
/// matrix, ordered by decreasing eigenvalue; eigenvalues within the solver
/// tolerance are ordered by descending loading vector. Each loading vector
/// has its largest-magnitude entry positive.
pub fn pca_project(nrps: &[NormalizedRatioProfile], components: usize) -> Result<Projection, ProfileError> {
    let n = nrps.len();
    let needed = components.max(2);
    if n < needed {
        return Err(ProfileError::TooFewEgos { egos: n, components, needed });
    }
    let support = Arc::clone(&nrps[0].support);
    let d = support.len();
    if nrps.iter().any(|p| p.values.len() != d) {
        return Err(ProfileError::Misaligned);
    }
    if components > d {
        return Err(ProfileError::TooFewMotifs { components, support: d });
    }

    let mean: Vec<f64> = (0..d).map(|j| nrps.iter().map(|p| p.values[j]).sum::<f64>() / n as f64).collect();
    let centered: Vec<Vec<f64>> = nrps.iter().map(|p| p.values.iter().zip(&mean).map(|(x, m)| x - m).collect()).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for row in &centered {
        for i in 0..d {
            if row[i] == 0.0 {
                continue;
            }
            for j in i..d {
                cov[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= (n - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }

    let (values, vectors) = symmetric_eigen(cov);
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut eig: Vec<(f64, Vec<f64>)> = (0..d)
        .map(|k| {
            let mut col: Vec<f64> = vectors.iter().map(|row| row[k]).collect();
            orient(&mut col);
            (values[k].max(0.0), col)
        })
        .collect();
    eig.sort_by(|(la, _), (lb, _)| lb.total_cmp(la));
    // runs of numerically equal eigenvalues are ordered by loadings
    let mut start = 0;
    while start < eig.len() {
        let mut end = start + 1;
        while end < eig.len() && eig[end - 1].0 - eig[end].0 <= JACOBI_TOLERANCE * scale {
            end += 1;
        }
        eig[start..end].sort_by(|(_, va), (_, vb)| lex_cmp(vb, va));
        start = end;
    }

    let total: f64 = eig.iter().map(|(l, _)| l).sum();
    let kept = &eig[..components];
    let explained_variance = kept.iter().map(|(l, _)| if total > 0.0 { l / total } else { 0.0 }).collect();
    let loadings: Vec<Vec<f64>> = kept.iter().map(|(_, v)| v.clone()).collect();
    let coordinates = centered
        .iter()
        .map(|row| loadings.iter().map(|v| row.iter().zip(v).map(|(x, w)| x * w).sum()).collect())
        .collect();
    Ok(Projection {
        egos: nrps.iter().map(|p| p.ego.clone()).collect(),
        support,
        mean,
        coordinates,
        explained_variance,
        loadings,
    })
}
