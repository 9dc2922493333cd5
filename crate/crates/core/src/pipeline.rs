//! End-to-end run: ingest, per-window analysis, and artifact files.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graphbuild::{build_network, label_users, normalize_records, prune_singleton_users, CommentNetwork, UserLabel};
use crate::ingest::{parse_comments, parse_timestamp, slice_windows, CommentRecord, WindowSpec};
use crate::motif::{window_profiles, MotifId, MotifProfile};
use crate::profile::{motif_support, normalize_profiles, pca_project, ratio_profiles, Projection};
use crate::textnorm::{Normalizer, Stopwords};
use crate::tracking::{discriminating_motifs, motif_series, rank_users_by_motif, MotifSeries, UserRanking, WindowActivity};

/// The many-videos star of a single account.
pub const DEFAULT_TRACKED_STAR: &str = "n=5;colors=UVVVV;edges=0-1,0-2,0-3,0-4";
/// A user joined to two similar users and two videos of its own.
pub const DEFAULT_TRACKED_USER_HUB: &str = "n=5;colors=UUUVV;edges=0-1,0-2,0-3,0-4";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Textnorm,
    Motif,
    Profile,
    Tracking,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Textnorm => "textnorm",
            Stage::Motif => "motif",
            Stage::Profile => "profile",
            Stage::Tracking => "tracking",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl PipelineError {
    fn new(stage: Stage, message: impl fmt::Display) -> Self {
        Self { stage, message: message.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    /// RFC 3339; the earliest record when unset
    pub window_start: Option<String>,
    pub window_hours: i64,
    pub window_count: usize,
    pub min_length: usize,
    pub shingle_window: usize,
    /// one stopword per line; the built-in English list when unset
    pub stopwords: Option<PathBuf>,
    pub similarity_threshold: f64,
    pub epsilon: u32,
    pub motif_sizes: Vec<usize>,
    pub ego_radius: usize,
    /// 0 uses every available core
    pub threads: usize,
    pub seed: Option<u64>,
    pub track_motifs: Vec<String>,
    pub top_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::from("comments.jsonl"),
            output: PathBuf::from("out"),
            window_start: None,
            window_hours: WindowSpec::DEFAULT_HOURS,
            window_count: WindowSpec::DEFAULT_COUNT,
            min_length: crate::textnorm::DEFAULT_MIN_LENGTH,
            shingle_window: crate::textnorm::DEFAULT_SHINGLE_WINDOW,
            stopwords: None,
            similarity_threshold: crate::graphbuild::DEFAULT_SIMILARITY_THRESHOLD,
            epsilon: crate::profile::DEFAULT_EPSILON,
            motif_sizes: crate::motif::DEFAULT_MOTIF_SIZES.to_vec(),
            ego_radius: crate::motif::DEFAULT_EGO_RADIUS,
            threads: 0,
            seed: None,
            track_motifs: vec![DEFAULT_TRACKED_STAR.into(), DEFAULT_TRACKED_USER_HUB.into()],
            top_n: 10,
        }
    }
}

impl RunConfig {
    /// Overlays the keys of a TOML document onto `self`.
    pub fn merge_toml(&self, text: &str) -> Result<Self, PipelineError> {
        let err = |e: &dyn fmt::Display| PipelineError::new(Stage::Config, e);
        let overlay: toml::Table = toml::from_str(text).map_err(|e| err(&e))?;
        let mut base = toml::Table::try_from(self).map_err(|e| err(&e))?;
        base.extend(overlay);
        base.try_into().map_err(|e: toml::de::Error| err(&e))
    }

    pub fn tracked_motifs(&self) -> Result<Vec<MotifId>, PipelineError> {
        self.track_motifs
            .iter()
            .map(|s| s.parse().map_err(|e| PipelineError::new(Stage::Config, format!("motif `{s}`: {e}"))))
            .collect()
    }

    fn normalizer(&self) -> Result<Normalizer, PipelineError> {
        let stopwords = match &self.stopwords {
            Some(p) => Stopwords::from_file(p).map_err(|e| PipelineError::new(Stage::Textnorm, format!("{}: {e}", p.display())))?,
            None => Stopwords::english(),
        };
        if self.shingle_window == 0 {
            return Err(PipelineError::new(Stage::Config, "shingle window must be positive"));
        }
        Ok(Normalizer { stopwords, min_length: self.min_length, shingle_window: self.shingle_window })
    }

    fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::new(Stage::Config, m));
        if !(0.0..=1.0).contains(&self.similarity_threshold) {
            return bad("similarity threshold must lie in [0, 1]");
        }
        if self.epsilon == 0 {
            return bad("epsilon must be at least 1");
        }
        if self.motif_sizes.is_empty() || self.motif_sizes.iter().any(|s| !(3..=5).contains(s)) {
            return bad("motif sizes must be drawn from 3, 4, 5");
        }
        if self.window_hours <= 0 || self.window_count == 0 {
            return bad("need at least one window of positive length");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct WindowResult {
    pub index: usize,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub record_count: usize,
    pub retained_count: usize,
    /// pruned and labeled
    pub network: CommentNetwork,
    pub profiles: Vec<MotifProfile>,
    pub projection: Option<Projection>,
    pub discriminating: Vec<(MotifId, f64)>,
}

impl WindowResult {
    pub fn ranking(&self, motif: &MotifId) -> UserRanking {
        rank_users_by_motif(&self.profiles, motif, self.network.labels(), self.index)
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub spec: WindowSpec,
    pub rejected_lines: usize,
    pub dropped_records: usize,
    pub windows: Vec<WindowResult>,
    pub tracked: Vec<MotifId>,
    pub series: Vec<MotifSeries>,
}

impl Analysis {
    /// Window with the highest normalized value of a tracked motif,
    /// earliest on ties.
    pub fn peak_window(&self, series: &MotifSeries) -> usize {
        let mut best = 0;
        for (i, &v) in series.normalized.iter().enumerate() {
            if v > series.normalized[best] {
                best = i;
            }
        }
        best
    }
}

fn analyze_window(index: usize, start: DateTime<Utc>, end: DateTime<Utc>, records: &[CommentRecord], cfg: &RunConfig, normalizer: &Normalizer) -> Result<WindowResult, PipelineError> {
    let normalized = normalize_records(records, normalizer);
    let mut network = prune_singleton_users(&build_network(&normalized, cfg.similarity_threshold));
    network.set_labels(label_users(&network, records));
    let profiles = window_profiles(&network, cfg.ego_radius, &cfg.motif_sizes)
        .map_err(|e| PipelineError::new(Stage::Motif, format!("window {index}: {e}")))?;

    let projection = if motif_support(&profiles).len() >= 2 && profiles.len() >= 2 {
        let rps = ratio_profiles(&profiles, cfg.epsilon).map_err(|e| PipelineError::new(Stage::Profile, format!("window {index}: {e}")))?;
        let proj = pca_project(&normalize_profiles(&rps), 2).map_err(|e| PipelineError::new(Stage::Profile, format!("window {index}: {e}")))?;
        Some(proj)
    } else {
        log::warn!("window {index}: too few egos or motifs for a projection");
        None
    };
    let discriminating = match discriminating_motifs(&profiles, network.labels(), cfg.top_n) {
        Ok(d) => d,
        Err(e) => {
            log::info!("window {index}: no discriminating motifs ({e})");
            Vec::new()
        }
    };
    log::info!(
        "window {index}: {} records, {} users, {} videos, {} edges",
        records.len(),
        network.user_count(),
        network.video_count(),
        network.edge_count()
    );
    Ok(WindowResult {
        index,
        start,
        end,
        record_count: records.len(),
        retained_count: normalized.len(),
        network,
        profiles,
        projection,
        discriminating,
    })
}

/// Runs every analysis stage on already-parsed records.
pub fn analyze_records(records: &[CommentRecord], cfg: &RunConfig) -> Result<Analysis, PipelineError> {
    cfg.validate()?;
    let tracked = cfg.tracked_motifs()?;
    let normalizer = cfg.normalizer()?;
    let Some(earliest) = records.iter().map(|r| r.published_at).min() else {
        return Err(PipelineError::new(Stage::Ingest, "no valid records"));
    };
    let start = match &cfg.window_start {
        Some(s) => parse_timestamp(s).map_err(|e| PipelineError::new(Stage::Config, format!("window start `{s}`: {e}")))?,
        None => earliest,
    };
    let spec = WindowSpec::new(start, Duration::hours(cfg.window_hours), cfg.window_count)
        .map_err(|e| PipelineError::new(Stage::Config, e))?;
    let sliced = slice_windows(records, &spec);

    let windows = sliced
        .windows
        .par_iter()
        .enumerate()
        .map(|(i, recs)| {
            let (s, e) = spec.window_bounds(i);
            analyze_window(i, s, e, recs, cfg, &normalizer)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let activity: Vec<WindowActivity<'_>> = windows.iter().map(|w| WindowActivity::new(&w.network, &w.profiles)).collect();
    let series = tracked.iter().map(|m| motif_series(&activity, m)).collect();
    Ok(Analysis { spec, rejected_lines: 0, dropped_records: sliced.dropped, windows, tracked, series })
}

pub fn read_records(path: &Path) -> Result<(Vec<CommentRecord>, usize), PipelineError> {
    let file = fs::File::open(path).map_err(|e| PipelineError::new(Stage::Ingest, format!("{}: {e}", path.display())))?;
    let parsed = parse_comments(BufReader::new(file)).map_err(|e| PipelineError::new(Stage::Ingest, e))?;
    for r in parsed.rejected.iter().take(5) {
        log::warn!("line {}: {}", r.line, r.reason);
    }
    Ok((parsed.records, parsed.rejected.len()))
}

/// Pins a value to 9 significant digits and prints the shortest form.
pub fn format_number(x: f64) -> String {
    let rounded: f64 = format!("{x:.8e}").parse().expect("float round trip");
    if rounded == 0.0 {
        return "0".into();
    }
    rounded.to_string()
}

/// File name fragment for a motif id.
pub fn motif_slug(m: &MotifId) -> String {
    crate::plot::slug(m.as_str())
}

pub fn window_dir_name(index: usize) -> String {
    format!("window_{index:02}")
}

/// Files are written under a `.partial` name and renamed together once the
/// whole run has succeeded.
struct Staged {
    files: Vec<PathBuf>,
}

impl Staged {
    fn write(&mut self, path: PathBuf, contents: &[u8]) -> Result<(), PipelineError> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| PipelineError::new(Stage::Output, format!("{}: {e}", dir.display())))?;
        }
        let partial = partial_path(&path);
        fs::write(&partial, contents).map_err(|e| PipelineError::new(Stage::Output, format!("{}: {e}", partial.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn commit(self) -> Result<(), PipelineError> {
        for path in self.files {
            fs::rename(partial_path(&path), &path).map_err(|e| PipelineError::new(Stage::Output, format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn partial_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".partial");
    PathBuf::from(s)
}

fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, PipelineError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let err = |e: csv::Error| PipelineError::new(Stage::Output, e);
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    w.into_inner().map_err(|e| PipelineError::new(Stage::Output, e))
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn label_str(l: Option<UserLabel>) -> String {
    l.map(|l| l.to_string()).unwrap_or_default()
}

fn ranking_rows(r: &UserRanking) -> Vec<Vec<String>> {
    r.entries
        .iter()
        .enumerate()
        .map(|(i, e)| vec![(i + 1).to_string(), e.user.clone(), e.count.to_string(), label_str(e.label)])
        .collect()
}

#[derive(Debug, Serialize)]
struct WindowManifest {
    index: usize,
    start: String,
    end: String,
    records: usize,
    retained: usize,
    users: usize,
    videos: usize,
    edges: usize,
    spam_users: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    parameters: &'a RunConfig,
    resolved_window_start: String,
    rejected_lines: usize,
    records_outside_windows: usize,
    tracked_motifs: Vec<&'a str>,
    ranking: RankingManifest<'a>,
    windows: Vec<WindowManifest>,
}

#[derive(Debug, Serialize)]
struct RankingManifest<'a> {
    motif: &'a str,
    window: usize,
}

fn timestamp(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Writes every artifact of an analysis into `dir`.
pub fn write_artifacts(analysis: &Analysis, cfg: &RunConfig, dir: &Path) -> Result<(), PipelineError> {
    let mut staged = Staged { files: Vec::new() };
    for w in &analysis.windows {
        let wdir = dir.join(window_dir_name(w.index));
        staged.write(wdir.join("network.graphml"), w.network.to_graphml().as_bytes())?;

        let support = motif_support(&w.profiles);
        let mut header = strings(["ego_id"]);
        header.extend(support.iter().map(|m| m.as_str().to_string()));
        let rows = w.profiles.iter().map(|p| {
            let mut row = vec![p.ego.clone()];
            row.extend(support.iter().map(|m| p.count(m).to_string()));
            row
        });
        staged.write(wdir.join("profiles.csv"), &csv_bytes(&header, rows)?)?;

        let (coords, loadings) = match &w.projection {
            Some(p) => {
                let coords: Vec<Vec<String>> = p
                    .egos
                    .iter()
                    .zip(&p.coordinates)
                    .map(|(ego, c)| vec![ego.clone(), format_number(c[0]), format_number(c[1]), label_str(w.network.label(ego))])
                    .collect();
                let loadings: Vec<Vec<String>> = p
                    .loadings
                    .iter()
                    .zip(&p.explained_variance)
                    .enumerate()
                    .map(|(k, (l, ev))| {
                        let mut row = vec![format!("pc{}", k + 1), format_number(*ev)];
                        row.extend(l.iter().map(|x| format_number(*x)));
                        row
                    })
                    .collect();
                (coords, (p.support.iter().map(|m| m.as_str().to_string()).collect::<Vec<_>>(), loadings))
            }
            None => (Vec::new(), (Vec::new(), Vec::new())),
        };
        staged.write(wdir.join("coords.csv"), &csv_bytes(&strings(["ego_id", "pc1", "pc2", "label"]), coords)?)?;
        let mut lheader = strings(["component", "explained_variance"]);
        lheader.extend(loadings.0);
        staged.write(wdir.join("loadings.csv"), &csv_bytes(&lheader, loadings.1)?)?;

        if let Some(first) = analysis.tracked.first() {
            let header = strings(["rank", "user_id", "count", "label"]);
            staged.write(wdir.join("ranking.csv"), &csv_bytes(&header, ranking_rows(&w.ranking(first)))?)?;
        }
    }

    let rows = analysis.series.iter().flat_map(|s| {
        (0..s.raw.len()).map(move |i| vec![i.to_string(), s.motif.as_str().to_string(), s.raw[i].to_string(), format_number(s.normalized[i])])
    });
    staged.write(dir.join("series.csv"), &csv_bytes(&strings(["window_index", "motif_id", "raw", "normalized"]), rows)?)?;

    let (rank_motif, rank_window) = match analysis.series.first() {
        Some(s) => (s.motif.as_str(), analysis.peak_window(s)),
        None => ("", 0),
    };
    let ranking = match (analysis.tracked.first(), analysis.windows.get(rank_window)) {
        (Some(m), Some(w)) => ranking_rows(&w.ranking(m)),
        _ => Vec::new(),
    };
    staged.write(dir.join("ranking.csv"), &csv_bytes(&strings(["rank", "user_id", "count", "label"]), ranking)?)?;

    let rows = analysis.windows.iter().flat_map(|w| {
        w.discriminating
            .iter()
            .enumerate()
            .map(move |(r, (m, s))| vec![w.index.to_string(), (r + 1).to_string(), m.as_str().to_string(), format_number(*s)])
    });
    staged.write(dir.join("discriminating.csv"), &csv_bytes(&strings(["window_index", "rank", "motif_id", "score"]), rows)?)?;

    let manifest = Manifest {
        tool: "spamtrack",
        version: env!("CARGO_PKG_VERSION"),
        parameters: cfg,
        resolved_window_start: timestamp(analysis.spec.start),
        rejected_lines: analysis.rejected_lines,
        records_outside_windows: analysis.dropped_records,
        tracked_motifs: analysis.tracked.iter().map(|m| m.as_str()).collect(),
        ranking: RankingManifest { motif: rank_motif, window: rank_window },
        windows: analysis
            .windows
            .iter()
            .map(|w| WindowManifest {
                index: w.index,
                start: timestamp(w.start),
                end: timestamp(w.end),
                records: w.record_count,
                retained: w.retained_count,
                users: w.network.user_count(),
                videos: w.network.video_count(),
                edges: w.network.edge_count(),
                spam_users: w.network.spam_user_count(),
            })
            .collect(),
    };
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(|e| PipelineError::new(Stage::Output, e))?;
    json.push(b'\n');
    staged.write(dir.join("run_manifest.json"), &json)?;
    staged.commit()
}

/// Summary of a completed run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub windows: usize,
    pub records: usize,
    pub output: PathBuf,
    pub top_ranked: BTreeMap<usize, Vec<String>>,
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PipelineError::new(Stage::Config, e))?;
    Ok(pool.install(f))
}

/// Reads the input, analyzes every window, and writes the artifacts.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunSummary, PipelineError> {
    let (records, rejected) = read_records(&cfg.input)?;
    let mut analysis = with_threads(cfg.threads, || analyze_records(&records, cfg))??;
    analysis.rejected_lines = rejected;
    write_artifacts(&analysis, cfg, &cfg.output)?;
    let top_ranked = match analysis.tracked.first() {
        Some(m) => analysis
            .windows
            .iter()
            .map(|w| (w.index, w.ranking(m).entries.iter().take(5).map(|e| e.user.clone()).collect()))
            .collect(),
        None => BTreeMap::new(),
    };
    Ok(RunSummary { windows: analysis.windows.len(), records: records.len(), output: cfg.output.clone(), top_ranked })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333");
        assert_eq!(format_number(-2.0 / 3.0), "-0.666666667");
        assert_eq!(format_number(123456789.123), "123456789");
    }

    #[test]
    fn config_overlay_wins() {
        let flags = RunConfig { epsilon: 1, top_n: 3, ..RunConfig::default() };
        let merged = flags.merge_toml("epsilon = 7\nmotif_sizes = [3, 4]\n").unwrap();
        assert_eq!(merged.epsilon, 7);
        assert_eq!(merged.motif_sizes, vec![3, 4]);
        assert_eq!(merged.top_n, 3);
        assert!(flags.merge_toml("no_such_key = 1").is_err());
    }

    #[test]
    fn default_tracked_motifs_parse() {
        let ms = RunConfig::default().tracked_motifs().unwrap();
        assert_eq!(ms[0], MotifId::user_video_star(4));
        assert_eq!(ms[1].as_str(), DEFAULT_TRACKED_USER_HUB);
    }

    #[test]
    fn empty_records_fail_at_ingest() {
        let err = analyze_records(&[], &RunConfig::default()).unwrap_err();
        assert_eq!(err.stage, Stage::Ingest);
        assert!(err.to_string().contains("no valid records"));
    }

    #[test]
    fn slug_is_filename_safe() {
        assert_eq!(motif_slug(&MotifId::user_video_star(2)), "n_3_colors_UVV_edges_0_1_0_2");
    }
}
