//! Python bindings: text normalization, motif ids and counts, ratio
//! profiles, the scenario generator and the full pipeline.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spamtrack::graphbuild::{build_network, label_users, normalize_records, prune_singleton_users, CommentNetwork};
use spamtrack::ingest::parse_comments;
use spamtrack::motif::{ego_network, ego_motif_counts_sized, MotifId};
use spamtrack::pipeline::RunConfig;
use spamtrack::profile::{self, RatioProfile};
use spamtrack::synth::ScenarioConfig;
use spamtrack::textnorm::{self, Normalizer, ShingleSet, Stopwords};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn stopword_list(words: Option<Vec<String>>) -> Stopwords {
    match words {
        Some(w) => Stopwords::parse(&w.join("\n")),
        None => Stopwords::english(),
    }
}

/// Normalized comment text, or None when shorter than `min_length`.
#[pyfunction]
#[pyo3(signature = (text, min_length = textnorm::DEFAULT_MIN_LENGTH, stopwords = None))]
fn normalize_comment(text: &str, min_length: usize, stopwords: Option<Vec<String>>) -> Option<String> {
    textnorm::normalize_comment(text, &stopword_list(stopwords), min_length)
}

/// Sorted distinct rolling hashes of every `window`-character substring.
#[pyfunction]
#[pyo3(signature = (modified_text, window = textnorm::DEFAULT_SHINGLE_WINDOW))]
fn shingle(modified_text: &str, window: usize) -> PyResult<Vec<u64>> {
    if window == 0 {
        return Err(value_err("window must be positive"));
    }
    Ok(textnorm::shingle(modified_text, window).as_slice().to_vec())
}

#[pyfunction]
fn jaccard_distance(a: Vec<u64>, b: Vec<u64>) -> f64 {
    textnorm::jaccard_distance(&ShingleSet::from_hashes(a), &ShingleSet::from_hashes(b))
}

/// Canonical id of a motif given node colors ("U"/"V" per node) and edges.
#[pyfunction]
fn canonical_motif(colors: &str, edges: Vec<(usize, usize)>) -> PyResult<String> {
    let edge_list: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    let raw = format!("n={};colors={colors};edges={}", colors.chars().count(), edge_list.join(","));
    raw.parse::<MotifId>().map(|m| m.to_string()).map_err(value_err)
}

#[pyfunction]
fn render_motif(motif: &str) -> PyResult<String> {
    motif.parse::<MotifId>().map(|m| m.render_ascii()).map_err(value_err)
}

/// Ratio profiles of a window's egos. Takes one `{motif id: count}` dict per
/// ego; returns the shared motif support and one row per ego.
#[pyfunction]
#[pyo3(signature = (counts, epsilon = profile::DEFAULT_EPSILON))]
fn ratio_profiles(counts: Vec<BTreeMap<String, u64>>, epsilon: u32) -> PyResult<(Vec<String>, Vec<Vec<f64>>)> {
    let profiles = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let counts = c
                .into_iter()
                .map(|(m, n)| Ok((m.parse::<MotifId>().map_err(value_err)?, n)))
                .collect::<PyResult<_>>()?;
            Ok(spamtrack::motif::MotifProfile { ego: i.to_string(), counts })
        })
        .collect::<PyResult<Vec<_>>>()?;
    let rps = profile::ratio_profiles(&profiles, epsilon).map_err(value_err)?;
    let support = rps.first().map(|r| r.support.iter().map(|m| m.to_string()).collect()).unwrap_or_default();
    Ok((support, rps.into_iter().map(|r| r.values).collect()))
}

/// Unit-length copy of a ratio profile; all-zero input stays zero.
#[pyfunction]
fn normalize_profile(values: Vec<f64>) -> Vec<f64> {
    let rp = RatioProfile { ego: String::new(), support: Arc::new(Vec::new()), values };
    profile::normalize_profile(&rp).values
}

/// Synthetic comment stream as JSONL text plus `{user id: group}`.
#[pyfunction]
#[pyo3(signature = (seed = None, config = None))]
fn generate_scenario(seed: Option<u64>, config: Option<&str>) -> PyResult<(String, BTreeMap<String, String>)> {
    let mut cfg = match config {
        Some(text) => ScenarioConfig::from_toml(text).map_err(value_err)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let scenario = spamtrack::synth::generate_scenario(&cfg).map_err(value_err)?;
    let jsonl = String::from_utf8(scenario.to_jsonl()).map_err(value_err)?;
    let truth = scenario.ground_truth.iter().map(|(u, g)| (u.clone(), g.to_string())).collect();
    Ok((jsonl, truth))
}

/// Runs the full pipeline. `config` is TOML text overriding the defaults.
#[pyfunction]
#[pyo3(signature = (input, output, config = None, threads = 0))]
fn run_pipeline<'py>(
    py: Python<'py>,
    input: PathBuf,
    output: PathBuf,
    config: Option<&str>,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let base = RunConfig { input, output, threads, ..RunConfig::default() };
    let cfg = match config {
        Some(text) => base.merge_toml(text).map_err(value_err)?,
        None => base,
    };
    let summary = py.detach(|| spamtrack::pipeline::run_pipeline(&cfg)).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("windows", summary.windows)?;
    out.set_item("records", summary.records)?;
    out.set_item("output", summary.output)?;
    out.set_item("top_ranked", summary.top_ranked)?;
    Ok(out)
}

/// Pruned and labeled user/video network of one window's comments.
#[pyclass(name = "CommentNetwork", frozen)]
struct PyCommentNetwork {
    inner: CommentNetwork,
}

#[pymethods]
impl PyCommentNetwork {
    #[staticmethod]
    #[pyo3(signature = (jsonl, threshold = 0.6, min_length = textnorm::DEFAULT_MIN_LENGTH))]
    fn from_jsonl(jsonl: &str, threshold: f64, min_length: usize) -> PyResult<Self> {
        let parsed = parse_comments(jsonl.as_bytes()).map_err(value_err)?;
        let normalizer = Normalizer { min_length, ..Normalizer::default() };
        let comments = normalize_records(&parsed.records, &normalizer);
        let mut inner = prune_singleton_users(&build_network(&comments, threshold));
        inner.set_labels(label_users(&inner, &parsed.records));
        Ok(Self { inner })
    }

    #[getter]
    fn user_count(&self) -> usize {
        self.inner.user_count()
    }

    #[getter]
    fn video_count(&self) -> usize {
        self.inner.video_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn users(&self) -> Vec<String> {
        self.inner.users().map(String::from).collect()
    }

    fn labels(&self) -> BTreeMap<String, String> {
        self.inner.labels().iter().map(|(u, l)| (u.clone(), l.to_string())).collect()
    }

    /// Motif counts of sizes 3 to 5 in the user's k-hop ego network.
    #[pyo3(signature = (user, radius = 2, sizes = vec![3, 4, 5]))]
    fn ego_motif_counts(&self, py: Python<'_>, user: &str, radius: usize, sizes: Vec<usize>) -> PyResult<BTreeMap<String, u64>> {
        let eg = ego_network(&self.inner, user, radius).map_err(value_err)?;
        let profile = py.detach(|| ego_motif_counts_sized(&eg, &sizes)).map_err(value_err)?;
        Ok(profile.counts.into_iter().map(|(m, c)| (m.to_string(), c)).collect())
    }

    fn to_graphml(&self) -> String {
        self.inner.to_graphml()
    }

    fn __repr__(&self) -> String {
        format!(
            "CommentNetwork(users={}, videos={}, edges={})",
            self.inner.user_count(),
            self.inner.video_count(),
            self.inner.edge_count()
        )
    }
}

#[pyfunction]
fn user_video_star(videos: usize) -> PyResult<String> {
    if !(2..=4).contains(&videos) {
        return Err(value_err("star motifs have 2 to 4 videos"));
    }
    Ok(MotifId::user_video_star(videos).to_string())
}

#[pymodule]
fn spamtrack_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normalize_comment, m)?)?;
    m.add_function(wrap_pyfunction!(shingle, m)?)?;
    m.add_function(wrap_pyfunction!(jaccard_distance, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_motif, m)?)?;
    m.add_function(wrap_pyfunction!(render_motif, m)?)?;
    m.add_function(wrap_pyfunction!(user_video_star, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_profiles, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_profile, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_class::<PyCommentNetwork>()?;
    Ok(())
}
