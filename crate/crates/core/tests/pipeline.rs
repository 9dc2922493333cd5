use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use spamtrack::graphbuild::UserLabel;
use spamtrack::motif::MotifId;
use spamtrack::pipeline::{analyze_records, run_pipeline, window_dir_name, RunConfig, Stage};
use spamtrack::plot::emit_plots;
use spamtrack::synth::{generate_scenario, Group, Scenario, ScenarioConfig};
use spamtrack::tracking::discriminating_motifs;

fn small_config() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.background.comments_per_window = 600;
    cfg.background.n_users = 3000;
    cfg
}

fn write_scenario(dir: &Path, cfg: &ScenarioConfig) -> Scenario {
    let s = generate_scenario(cfg).unwrap();
    s.write_to(dir).unwrap();
    s
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).unwrap();
    r.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn run_writes_full_artifact_set() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(&tmp.path().join("data"), &small_config());
    let out = tmp.path().join("out");
    let cfg = RunConfig { input: tmp.path().join("data/comments.jsonl"), output: out.clone(), ..RunConfig::default() };
    let summary = run_pipeline(&cfg).unwrap();
    assert_eq!(summary.windows, 12);

    for w in 0..12 {
        for f in ["network.graphml", "profiles.csv", "coords.csv", "loadings.csv", "ranking.csv"] {
            assert!(out.join(window_dir_name(w)).join(f).is_file(), "window {w} {f}");
        }
    }
    for f in ["series.csv", "ranking.csv", "discriminating.csv", "run_manifest.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let leftovers: Vec<_> = walk(&out).into_iter().filter(|p| p.ends_with(".partial")).collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");

    assert_eq!(read_csv(&out.join("series.csv"))[0], ["window_index", "motif_id", "raw", "normalized"]);
    assert_eq!(read_csv(&out.join("discriminating.csv"))[0], ["window_index", "rank", "motif_id", "score"]);
    let coords = read_csv(&out.join("window_02/coords.csv"));
    assert_eq!(coords[0], ["ego_id", "pc1", "pc2", "label"]);
    let profiles = read_csv(&out.join("window_02/profiles.csv"));
    assert_eq!(profiles[0][0], "ego_id");
    assert!(profiles[0][1..].iter().all(|m| m.parse::<MotifId>().is_ok_and(|id| id.as_str() == m)));

    // global ranking is the star motif at its peak window: the planted accounts lead
    let ranking = read_csv(&out.join("ranking.csv"));
    assert_eq!(ranking[0], ["rank", "user_id", "count", "label"]);
    let c1 = scenario.accounts(Group::Campaign1);
    let top: Vec<&str> = ranking[1..=c1.len()].iter().map(|r| r[1].as_str()).collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(sorted, c1);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["parameters"]["epsilon"], 4);
    assert_eq!(manifest["parameters"]["min_length"], 25);
    assert_eq!(manifest["parameters"]["similarity_threshold"], 0.6);
    assert_eq!(manifest["windows"].as_array().unwrap().len(), 12);
}

fn walk(dir: &Path) -> Vec<String> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p.display().to_string());
        }
    }
    out
}

#[test]
fn plots_do_not_touch_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    write_scenario(&tmp.path().join("data"), &small_config());
    let out = tmp.path().join("out");
    run_pipeline(&RunConfig { input: tmp.path().join("data/comments.jsonl"), output: out.clone(), ..RunConfig::default() }).unwrap();
    let before: BTreeMap<String, Vec<u8>> = walk(&out).into_iter().map(|p| (p.clone(), fs::read(&p).unwrap())).collect();

    let written = emit_plots(&out).unwrap();
    let names: Vec<String> = written.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(names.iter().filter(|n| n.starts_with("spatialization_w")).count(), 12);
    assert_eq!(names.iter().filter(|n| n.starts_with("series_")).count(), 2);
    assert!(names.iter().any(|n| n.starts_with("ranking_n_5_colors_UVVVV")));

    let series = fs::read_to_string(written.iter().find(|p| p.to_string_lossy().contains("series_n_5_colors_UVVVV")).unwrap()).unwrap();
    assert_eq!(series.matches("class=\"bar\"").count(), 12);
    let scatter = fs::read_to_string(out.join("spatialization_w2.svg")).unwrap();
    assert!(scatter.contains(spamtrack::plot::SPAM_COLOR) && scatter.contains(spamtrack::plot::REGULAR_COLOR));

    for (p, bytes) in before {
        assert_eq!(fs::read(&p).unwrap(), bytes, "{p} changed");
    }
}

#[test]
fn failed_write_leaves_partial_files() {
    let tmp = tempfile::tempdir().unwrap();
    write_scenario(&tmp.path().join("data"), &small_config());
    let out = tmp.path().join("out");
    // a non-empty directory where series.csv should go makes the final rename fail
    fs::create_dir_all(out.join("series.csv/blocker")).unwrap();
    let err = run_pipeline(&RunConfig { input: tmp.path().join("data/comments.jsonl"), output: out.clone(), ..RunConfig::default() }).unwrap_err();
    assert_eq!(err.stage, Stage::Output);
    assert!(err.to_string().starts_with("[output]"));
    assert!(out.join("series.csv.partial").is_file());
}

#[test]
fn campaign1_star_counts_dwarf_background() {
    let mut cfg = small_config();
    cfg.campaign1.n_accounts = 2;
    let s = generate_scenario(&cfg).unwrap();
    let run = RunConfig { window_start: Some(cfg.start.clone()), ..RunConfig::default() };
    let analysis = analyze_records(&s.records, &run).unwrap();
    let star = MotifId::user_video_star(4);
    for &w in &cfg.campaign1.active_windows {
        let ranking = analysis.windows[w].ranking(&star);
        let (planted, rest): (Vec<_>, Vec<_>) = ranking.entries.iter().partition(|e| e.user.starts_with("c1"));
        assert_eq!(planted.len(), 2);
        let best_background = rest.first().map_or(0, |e| e.count);
        assert!(planted.iter().all(|e| e.count > 100 * best_background.max(1)), "window {w}");
    }
}

#[test]
fn campaign2_accounts_favor_user_rich_motifs() {
    let cfg = small_config();
    let s = generate_scenario(&cfg).unwrap();
    let run = RunConfig { window_start: Some(cfg.start.clone()), ..RunConfig::default() };
    let analysis = analyze_records(&s.records, &run).unwrap();
    let star = MotifId::user_video_star(4);
    let hub: MotifId = spamtrack::pipeline::DEFAULT_TRACKED_USER_HUB.parse().unwrap();
    for &w in &cfg.campaign2.active_windows {
        let profiles = &analysis.windows[w].profiles;
        // ground-truth labels instead of the hint
        let labels: BTreeMap<String, UserLabel> = profiles
            .iter()
            .map(|p| {
                let l = if s.ground_truth[&p.ego] == Group::Campaign2 { UserLabel::Spam } else { UserLabel::Regular };
                (p.ego.clone(), l)
            })
            .collect();
        let scores: BTreeMap<MotifId, f64> = discriminating_motifs(profiles, &labels, usize::MAX).unwrap().into_iter().collect();
        let score = |m: &MotifId| scores.get(m).copied().unwrap_or(0.0);
        assert!(score(&hub) > score(&star), "window {w}: {} vs {}", score(&hub), score(&star));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    write_scenario(&tmp.path().join("data"), &small_config());
    let run = |name: &str| {
        let out = tmp.path().join(name);
        run_pipeline(&RunConfig { input: tmp.path().join("data/comments.jsonl"), output: out.clone(), threads: 2, ..RunConfig::default() }).unwrap();
        let mut files: BTreeMap<String, Vec<u8>> =
            walk(&out).into_iter().map(|p| (p.strip_prefix(out.to_str().unwrap()).unwrap().to_string(), fs::read(&p).unwrap())).collect();
        // the manifest records the output directory, which differs on purpose
        let mut manifest: serde_json::Value = serde_json::from_slice(&files.remove("/run_manifest.json").unwrap()).unwrap();
        manifest["parameters"]["output"] = serde_json::Value::Null;
        (files, manifest)
    };
    let (a, b) = (run("a"), run("b"));
    assert!(a.0 == b.0, "artifacts differ");
    assert_eq!(a.1, b.1);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spamtrack"))
}

#[test]
fn cli_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("scenario.toml");
    fs::write(&cfg_path, "[background]\ncomments_per_window = 400\nn_users = 2000\n").unwrap();
    let data = tmp.path().join("data");
    let o = cli().args(["synth", "--seed", "5", "--config"]).arg(&cfg_path).arg("-o").arg(&data).output().unwrap();
    assert!(o.status.success());
    assert!(data.join("ground_truth.csv").is_file());

    // config file keys win over flags
    let run_cfg = tmp.path().join("run.toml");
    fs::write(&run_cfg, "window_count = 6\n").unwrap();
    let out = tmp.path().join("out");
    let o = cli()
        .args(["run", "--window-count", "3", "--threads", "1", "--config"])
        .arg(&run_cfg)
        .arg("-i")
        .arg(data.join("comments.jsonl"))
        .arg("-o")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("window_05").is_dir() && !out.join("window_06").exists());

    assert!(cli().arg("plot").arg(&out).output().unwrap().status.success());
    assert!(out.join("spatialization_w0.svg").is_file());

    let o = cli()
        .args(["rank", "--motif", "n=5;colors=VVVVU;edges=4-0,4-1,4-2,4-3", "--window", "2", "--limit", "4", "-i"])
        .arg(data.join("comments.jsonl"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let users: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(users.len(), 4);
    assert!(users.iter().all(|u| u.starts_with("c1acct")));
}

#[test]
fn cli_reports_empty_input() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("empty.jsonl");
    fs::write(&input, "").unwrap();
    let o = cli().args(["run", "-i"]).arg(&input).arg("-o").arg(tmp.path().join("out")).output().unwrap();
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("[ingest]") && err.contains("no valid records"), "{err}");
}

#[test]
fn cli_lists_motifs() {
    let o = cli().args(["motifs", "--size", "3"]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("n=3;colors=UVV;edges=0-1,0-2"));
    assert!(!text.contains("n=4"));
    assert!(!cli().args(["motifs", "--size", "6"]).output().unwrap().status.success());
}
