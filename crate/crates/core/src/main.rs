use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use spamtrack::motif::{all_motifs, MotifId};
use spamtrack::pipeline::{read_records, analyze_records, run_pipeline, RunConfig};
use spamtrack::plot::emit_plots;
use spamtrack::synth::{generate_scenario, ScenarioConfig};

#[derive(Parser)]
#[command(name = "spamtrack", version, about = "Find and track comment-spam campaigns with ego-network motif profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic comment stream with planted campaigns
    Synth {
        #[arg(long)]
        seed: Option<u64>,
        /// TOML scenario config
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, short, default_value = "synth")]
        output: PathBuf,
    },
    /// Run the full pipeline and write all artifacts
    Run(RunArgs),
    /// Draw SVG charts from a run's artifacts
    Plot {
        /// output directory of a previous `run`
        dir: PathBuf,
    },
    /// Print the users with the highest count of one motif in one window
    Rank {
        #[command(flatten)]
        run: RunArgs,
        /// motif id, e.g. "n=5;colors=UVVVV;edges=0-1,0-2,0-3,0-4"
        #[arg(long)]
        motif: String,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// List motif ids with ASCII drawings
    Motifs {
        /// restrict to one size
        #[arg(long)]
        size: Option<usize>,
        /// include motifs with video-video edges
        #[arg(long)]
        all_colorings: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSONL comments, one object per line
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// TOML file; its keys override flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// RFC 3339 start of window 0 (default: earliest comment)
    #[arg(long)]
    window_start: Option<String>,
    #[arg(long)]
    window_hours: Option<i64>,
    #[arg(long)]
    window_count: Option<usize>,
    /// minimum length of a normalized comment
    #[arg(long)]
    min_length: Option<usize>,
    #[arg(long)]
    shingle_window: Option<usize>,
    /// stopword list, one word per line
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Jaccard distance below which two users are linked
    #[arg(long)]
    similarity_threshold: Option<f64>,
    /// smoothing constant of the ratio profile
    #[arg(long)]
    epsilon: Option<u32>,
    /// comma-separated, from 3,4,5
    #[arg(long, value_delimiter = ',')]
    motif_sizes: Option<Vec<usize>>,
    #[arg(long)]
    ego_radius: Option<usize>,
    /// worker threads, 0 for all cores
    #[arg(long)]
    threads: Option<usize>,
    /// motif to track across windows; repeatable
    #[arg(long = "track-motif")]
    track_motifs: Vec<String>,
    /// discriminating motifs kept per window
    #[arg(long)]
    top_n: Option<usize>,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let d = RunConfig::default();
        let flags = RunConfig {
            input: self.input.unwrap_or(d.input),
            output: self.output.unwrap_or(d.output),
            window_start: self.window_start.or(d.window_start),
            window_hours: self.window_hours.unwrap_or(d.window_hours),
            window_count: self.window_count.unwrap_or(d.window_count),
            min_length: self.min_length.unwrap_or(d.min_length),
            shingle_window: self.shingle_window.unwrap_or(d.shingle_window),
            stopwords: self.stopwords.or(d.stopwords),
            similarity_threshold: self.similarity_threshold.unwrap_or(d.similarity_threshold),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            motif_sizes: self.motif_sizes.unwrap_or(d.motif_sizes),
            ego_radius: self.ego_radius.unwrap_or(d.ego_radius),
            threads: self.threads.unwrap_or(d.threads),
            seed: d.seed,
            track_motifs: if self.track_motifs.is_empty() { d.track_motifs } else { self.track_motifs },
            top_n: self.top_n.unwrap_or(d.top_n),
        };
        match self.config {
            Some(path) => {
                let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                Ok(flags.merge_toml(&text)?)
            }
            None => Ok(flags),
        }
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Synth { seed, config, output } => {
            let mut cfg = match config {
                Some(p) => ScenarioConfig::from_file(&p)?,
                None => ScenarioConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let scenario = generate_scenario(&cfg)?;
            scenario.write_to(&output)?;
            println!("wrote {} comments by {} users to {}", scenario.records.len(), scenario.ground_truth.len(), output.display());
        }
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let summary = run_pipeline(&cfg)?;
            println!("{} records in {} windows; artifacts in {}", summary.records, summary.windows, summary.output.display());
            for (w, users) in &summary.top_ranked {
                println!("window {w:2}: {}", users.join(" "));
            }
        }
        Command::Plot { dir } => {
            for path in emit_plots(&dir)? {
                println!("{}", path.display());
            }
        }
        Command::Rank { run, motif, window, limit } => {
            let cfg = run.resolve()?;
            let motif: MotifId = motif.parse()?;
            if window >= cfg.window_count {
                bail!("window {window} outside 0..{}", cfg.window_count);
            }
            let (records, _) = read_records(&cfg.input)?;
            let cfg = RunConfig { track_motifs: vec![motif.to_string()], ..cfg };
            let analysis = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()?
                .install(|| analyze_records(&records, &cfg))?;
            let ranking = analysis.windows[window].ranking(&motif);
            println!("rank,user_id,count,label");
            for (i, e) in ranking.entries.iter().take(limit).enumerate() {
                let label = e.label.map(|l| l.to_string()).unwrap_or_default();
                println!("{},{},{},{}", i + 1, e.user, e.count, label);
            }
        }
        Command::Motifs { size, all_colorings } => {
            let sizes = match size {
                Some(s @ 3..=5) => vec![s],
                Some(s) => bail!("motif size {s} outside 3..=5"),
                None => vec![3, 4, 5],
            };
            for s in sizes {
                for m in all_motifs(s, all_colorings) {
                    println!("{m}\n{}", m.render_ascii());
                }
            }
        }
    }
    Ok(())
}
