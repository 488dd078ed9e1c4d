//! Command-line driver. Every stage reads and writes artifacts under the
//! output directory; each artifact records the config hash.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::drift::{
    analyze_drift, cross_period_cases, group_by_participant, summarize_case_tables, write_shapes_csv,
    write_stability_csv, Case, CaseSummary, CaseTable, CasesConfig, DriftReport,
};
use crate::ebm::{evaluate, fit_ebm, fit_ensemble, Dataset, EbmConfig, EbmModel, EnsembleConfig, Metrics};
use crate::error::{Error, Result};
use crate::features::{extract_features, read_feature_table, write_feature_table, FeatureName, FeatureVector};
use crate::preprocess::{remove_outliers_sigma, write_outlier_log};
use crate::seed::{derive_seed, str_key};
use crate::selection::{selection_to_json, sequential_forward_select, SelectionResult};
use crate::signal::{discover_sessions, extract_labeled_segments_detailed, load_session, write_session, ChannelKind, Period};
use crate::synth::{render_session, sample_dataset, write_truth_csv, SyntheticRow, TruthSpec, PRESETS};

pub const INVENTORY: &str = "inventory.json";
pub const FEATURES: &str = "features.csv";
pub const OUTLIERS: &str = "outliers.csv";
pub const REJECTED: &str = "rejected.csv";
pub const SELECTION: &str = "selection.json";
pub const CASES: &str = "cases.json";
pub const DRIFT_REPORT: &str = "drift_report.json";
pub const SHAPES: &str = "shapes.csv";
pub const STABILITY: &str = "stability.csv";
pub const REPORT: &str = "report.md";
pub const TRUTH: &str = "truth.csv";
pub const TRUTH_SPEC: &str = "truth_spec.json";
pub const RUN_CONFIG: &str = "config.toml";

#[derive(Debug, Parser)]
#[command(name = "affect-drift", version, about = "Arousal estimation and temporal-drift analysis for wearable recordings")]
pub struct Cli {
    /// TOML pipeline configuration.
    #[arg(long, global = true, env = "AFFECT_DRIFT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Global seed; overrides the config file.
    #[arg(long, global = true, env = "AFFECT_DRIFT_SEED")]
    pub seed: Option<u64>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true, env = "AFFECT_DRIFT_OUT")]
    pub out: Option<PathBuf>,
    /// Sessions root; defaults to `<out>/sessions`.
    #[arg(long, global = true, env = "AFFECT_DRIFT_SESSIONS")]
    pub sessions: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate session directories and write inventory.json.
    Ingest,
    /// Extract per-annotation features into features.csv.
    Features,
    /// Sequential forward feature selection into selection.json.
    Select,
    /// Fit the repeated-subsample ensemble and a full-data model per participant.
    Fit {
        #[arg(long)]
        participant: Option<String>,
    },
    /// Cross-period train/test cases into cases.json.
    Eval {
        #[arg(long)]
        participant: Option<String>,
    },
    /// Shape-similarity drift analysis.
    Drift,
    /// Generate a synthetic session tree with known ground truth.
    Synth {
        /// One of the built-in presets.
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        /// JSON truth spec.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Override the annotations per participant and period.
        #[arg(long)]
        n_per_period: Option<usize>,
        /// Write features.csv directly instead of rendering signals.
        #[arg(long)]
        table: bool,
    },
    /// Markdown summary of selection, cases and stability.
    Report,
}

/// Parses arguments, runs the command and returns the process exit code.
/// Failures print a JSON error record on stderr.
pub fn main_entry() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("AFFECT_DRIFT_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let record = serde_json::json!({
                "error": e.kind(),
                "message": e.to_string(),
                "exit_code": e.exit_code(),
            });
            eprintln!("{record}");
            e.exit_code()
        }
    }
}

pub fn resolve_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.paths.out = Some(o.clone());
    }
    if let Some(s) = &cli.sessions {
        cfg.paths.sessions = Some(s.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    let ctx = Context::new(cfg)?;
    match &cli.command {
        Command::Ingest => ctx.ingest(),
        Command::Features => ctx.features(),
        Command::Select => ctx.select(),
        Command::Fit { participant } => ctx.fit(participant.as_deref()),
        Command::Eval { participant } => ctx.eval(participant.as_deref()),
        Command::Drift => ctx.drift(),
        Command::Synth {
            preset,
            spec,
            n_per_period,
            table,
        } => ctx.synth(preset.as_deref(), spec.as_deref(), *n_per_period, *table, cli.seed.is_some()),
        Command::Report => ctx.report(),
    }
}

/// Artifact body with the config hash in front.
#[derive(Serialize, Deserialize)]
struct Stamped<T> {
    config_hash: String,
    #[serde(flatten)]
    body: T,
}

struct Context {
    cfg: PipelineConfig,
    hash: String,
    out: PathBuf,
}

impl Context {
    fn new(cfg: PipelineConfig) -> Result<Self> {
        let out = cfg.out_dir();
        fs::create_dir_all(&out)?;
        let hash = cfg.hash();
        let ctx = Self { cfg, hash, out };
        // Record the effective settings without paths so reruns elsewhere
        // stay byte-identical.
        let mut canonical = ctx.cfg.clone();
        canonical.paths = Default::default();
        ctx.write(RUN_CONFIG, &format!("# config_hash={}\n{}", ctx.hash, canonical.to_toml()))?;
        Ok(ctx)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write(&self, name: &str, content: &str) -> Result<()> {
        fs::write(self.path(name), content)?;
        log::info!("wrote {}", self.path(name).display());
        Ok(())
    }

    fn write_json<T: Serialize>(&self, name: &str, body: T) -> Result<()> {
        let doc = Stamped {
            config_hash: self.hash.clone(),
            body,
        };
        self.write(name, &(serde_json::to_string_pretty(&doc)? + "\n"))
    }

    fn read(&self, name: &str) -> Result<String> {
        let path = self.path(name);
        let text = fs::read_to_string(&path).map_err(|e| Error::MissingInput {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        if let Some(h) = artifact_hash(&text) {
            if h != self.hash {
                log::warn!("{name} was written under config {h}, current config is {}", self.hash);
            }
        }
        Ok(text)
    }

    fn read_json<T: for<'de> Deserialize<'de>>(&self, name: &str) -> Result<T> {
        let doc: Stamped<T> = serde_json::from_str(&self.read(name)?)?;
        Ok(doc.body)
    }

    fn feature_rows(&self) -> Result<Vec<FeatureVector>> {
        Ok(read_feature_table(&self.read(FEATURES)?)?.0)
    }

    fn selected(&self) -> Result<Vec<FeatureName>> {
        let sel: SelectionResult = self.read_json(SELECTION)?;
        if sel.selected.is_empty() {
            return Err(Error::EmptyDataset("selection.json lists no features".into()));
        }
        Ok(sel.selected)
    }

    fn ingest(&self) -> Result<()> {
        let root = self.cfg.sessions_dir();
        let dirs = discover_sessions(&root)?;
        if dirs.is_empty() {
            return Err(Error::EmptyDataset(format!("no sessions under {}", root.display())));
        }
        let entries = dirs
            .par_iter()
            .map(|d| {
                let s = load_session(d, self.cfg.preprocess.acc_units_per_g)?;
                let warnings = s.warnings();
                for w in &warnings {
                    log::warn!("{}: {w}", d.display());
                }
                let channels = ChannelKind::ALL
                    .iter()
                    .map(|k| {
                        let c = s.channel(*k);
                        ChannelInventory {
                            channel: k.file_name().to_string(),
                            rate: c.rate(),
                            samples: c.len(),
                            start_time: c.start_time(),
                        }
                    })
                    .collect();
                Ok(SessionInventory {
                    path: relative(&root, d),
                    participant: s.participant_id.clone(),
                    period: s.period,
                    annotations: s.annotations.len(),
                    channels,
                    warnings,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.write_json(INVENTORY, Inventory { sessions: entries })
    }

    fn features(&self) -> Result<()> {
        let root = self.cfg.sessions_dir();
        let dirs = discover_sessions(&root)?;
        let pre = &self.cfg.preprocess;
        let mut rejected = String::from("participant,period,timestamp,reason\n");
        let mut segments = Vec::new();
        for d in &dirs {
            let s = load_session(d, pre.acc_units_per_g)?;
            let (segs, skipped) = extract_labeled_segments_detailed(&s, &pre.arousal, pre.segment);
            for k in skipped {
                log::warn!("{} {}: annotation at {} skipped ({:?})", s.participant_id, s.period, k.timestamp, k.reason);
                let _ = writeln!(rejected, "{},{},{},{:?}", s.participant_id, s.period, k.timestamp, k.reason);
            }
            segments.extend(segs);
        }
        let extraction = extract_features(&segments, &self.cfg.features)?;
        for r in &extraction.rejected {
            let _ = writeln!(rejected, "{},{},{},{:?}", r.participant_id, r.period, r.timestamp, r.reason);
        }
        let cleaned = remove_outliers_sigma(extraction.vectors, &[], pre.outlier_sigma);
        if cleaned.rows.is_empty() {
            log::warn!("no valid annotations; the feature table is empty");
        }
        self.write(FEATURES, &write_feature_table(&cleaned.rows, Some(&self.hash)))?;
        self.write(OUTLIERS, &write_outlier_log(&cleaned.log, Some(&self.hash)))?;
        self.write(REJECTED, &format!("# config_hash={}\n{rejected}", self.hash))
    }

    fn select(&self) -> Result<()> {
        let rows = self.feature_rows()?;
        if rows.is_empty() {
            return Err(Error::EmptyDataset("features.csv has no rows".into()));
        }
        let result = sequential_forward_select(&rows, &self.cfg.selection_config())?;
        self.write(SELECTION, &(selection_to_json(&result, Some(&self.hash)) + "\n"))
    }

    fn participants<'a>(
        &self,
        rows: &'a [FeatureVector],
        only: Option<&str>,
    ) -> Result<BTreeMap<String, Vec<FeatureVector>>> {
        let mut groups = group_by_participant(rows);
        if let Some(p) = only {
            groups.retain(|k, _| k == p);
            if groups.is_empty() {
                return Err(Error::EmptyDataset(format!("participant {p} has no rows")));
            }
        }
        if groups.is_empty() {
            return Err(Error::EmptyDataset("features.csv has no rows".into()));
        }
        Ok(groups)
    }

    fn fit(&self, only: Option<&str>) -> Result<()> {
        let rows = self.feature_rows()?;
        let features = self.selected()?;
        let base = self.cfg.ensemble_config();
        let mut written = 0;
        for (pid, group) in self.participants(&rows, only)? {
            let (data, _) = Dataset::from_vectors(&group, &features);
            let ens_cfg = EnsembleConfig {
                seed: derive_seed(base.seed, &[str_key(&pid), 0]),
                ..base.clone()
            };
            let model_cfg = EbmConfig {
                seed: derive_seed(self.cfg.model_seed(), &[str_key(&pid)]),
                ..self.cfg.ebm.clone()
            };
            let fitted = fit_ensemble(&data, &ens_cfg).and_then(|e| Ok((e, fit_ebm(&data, &model_cfg)?)));
            match fitted {
                Ok((ensemble, model)) => {
                    self.write_json(&format!("ensemble_{}.json", file_key(&pid)), &ensemble)?;
                    self.write_json(&format!("model_{}.json", file_key(&pid)), &model)?;
                    written += 1;
                }
                Err(e) if only.is_none() => log::warn!("participant {pid} skipped: {e}"),
                Err(e) => return Err(e),
            }
        }
        if written == 0 {
            return Err(Error::EmptyDataset("no participant could be fitted".into()));
        }
        Ok(())
    }

    fn eval(&self, only: Option<&str>) -> Result<()> {
        let rows = self.feature_rows()?;
        let features = self.selected()?;
        let base = self.cfg.cases_config();
        let mut participants = Vec::new();
        for (pid, group) in self.participants(&rows, only)? {
            let (data, _) = Dataset::from_vectors(&group, &features);
            let cfg = CasesConfig {
                seed: derive_seed(base.seed, &[str_key(&pid), 1]),
                ..base.clone()
            };
            let (cases, skipped) = match cross_period_cases(&data, &cfg) {
                Ok(t) => (Some(t), None),
                Err(e) => {
                    log::warn!("participant {pid}: cases skipped: {e}");
                    (None, Some(e.to_string()))
                }
            };
            let in_sample = self.in_sample(&pid, &data)?;
            participants.push(ParticipantCases {
                participant: pid,
                cases,
                skipped,
                in_sample,
            });
        }
        let tables: Vec<&CaseTable> = participants.iter().filter_map(|p| p.cases.as_ref()).collect();
        let summary = summarize_case_tables(&tables);
        self.write_json(
            CASES,
            CasesDoc {
                features,
                participants,
                summary,
            },
        )
    }

    /// Per-period fit of the stored full-data model, when `fit` has run.
    fn in_sample(&self, pid: &str, data: &Dataset) -> Result<Vec<PeriodMetrics>> {
        let name = format!("model_{}.json", file_key(pid));
        if !self.path(&name).is_file() {
            return Ok(Vec::new());
        }
        let text = self.read(&name)?;
        let model = EbmModel::from_json(&text)?;
        let mut out = Vec::new();
        for period in [Period::P1, Period::P2] {
            let idx = data.indices_of(period);
            if idx.is_empty() {
                continue;
            }
            out.push(PeriodMetrics {
                period,
                metrics: evaluate(&model, &data.subset(&idx))?,
            });
        }
        Ok(out)
    }

    fn drift(&self) -> Result<()> {
        let rows = self.feature_rows()?;
        let features = self.selected()?;
        if rows.is_empty() {
            return Err(Error::EmptyDataset("features.csv has no rows".into()));
        }
        let mut analysis = analyze_drift(&rows, &features, &self.cfg.drift_config())?;
        if analysis.report.participants.is_empty() {
            return Err(Error::EmptyDataset("no participant could be analyzed".into()));
        }
        analysis.report.config_hash = Some(self.hash.clone());
        self.write(DRIFT_REPORT, &(serde_json::to_string_pretty(&analysis.report)? + "\n"))?;
        self.write(SHAPES, &write_shapes_csv(&analysis.ensembles, Some(&self.hash)))?;
        self.write(STABILITY, &write_stability_csv(&analysis.report, Some(&self.hash)))
    }

    fn synth(
        &self,
        preset: Option<&str>,
        spec_path: Option<&Path>,
        n_per_period: Option<usize>,
        table: bool,
        seed_given: bool,
    ) -> Result<()> {
        let mut spec = match (preset, spec_path) {
            (Some(name), None) => {
                let mut s = TruthSpec::preset(name)?;
                s.seed = self.cfg.seed;
                s
            }
            (None, Some(p)) => {
                let text = fs::read_to_string(p).map_err(|e| Error::MissingInput {
                    path: p.to_path_buf(),
                    reason: e.to_string(),
                })?;
                let mut s = TruthSpec::from_json(&text)?;
                if seed_given {
                    s.seed = self.cfg.seed;
                }
                s
            }
            _ => {
                return Err(Error::Config(format!(
                    "synth needs --preset ({}) or --spec",
                    PRESETS.join(", ")
                )))
            }
        };
        if let Some(n) = n_per_period {
            spec.n_per_period = n;
        }
        spec.validate()?;
        self.write(TRUTH_SPEC, &(serde_json::to_string_pretty(&spec)? + "\n"))?;

        if table {
            let rows = sample_dataset(&spec);
            let vectors: Vec<FeatureVector> = rows.iter().map(|r| r.vector.clone()).collect();
            self.write(FEATURES, &write_feature_table(&vectors, Some(&self.hash)))?;
            return self.write(TRUTH, &write_truth_csv(&rows, Some(&self.hash)));
        }

        let jobs: Vec<(String, Period)> = spec
            .participants
            .iter()
            .flat_map(|p| [(p.clone(), Period::P1), (p.clone(), Period::P2)])
            .collect();
        let root = self.cfg.sessions_dir();
        let acc_units = self.cfg.preprocess.acc_units_per_g;
        let truth: Vec<Vec<SyntheticRow>> = jobs
            .par_iter()
            .map(|(pid, period)| {
                let rendered = render_session(&spec, pid, *period)?;
                write_session(&root.join(format!("{}_{period}", file_key(pid))), &rendered.session, acc_units)?;
                Ok(rendered.truth)
            })
            .collect::<Result<_>>()?;
        let rows: Vec<SyntheticRow> = truth.into_iter().flatten().collect();
        self.write(TRUTH, &write_truth_csv(&rows, Some(&self.hash)))
    }

    fn report(&self) -> Result<()> {
        // Every hash-carrying artifact present must agree.
        let mut hashes: BTreeMap<String, String> = BTreeMap::new();
        for entry in fs::read_dir(&self.out)? {
            let path = entry?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
            if !path.is_file() || name == REPORT || name == RUN_CONFIG {
                continue;
            }
            if let Ok(text) = fs::read_to_string(&path) {
                if let Some(h) = artifact_hash(&text) {
                    hashes.insert(name, h);
                }
            }
        }
        let distinct: std::collections::BTreeSet<&String> = hashes.values().collect();
        if distinct.len() > 1 {
            let detail: Vec<String> = hashes.iter().map(|(n, h)| format!("{n}={}", &h[..h.len().min(12)])).collect();
            return Err(Error::HashMismatch(detail.join(", ")));
        }
        if let Some(h) = distinct.into_iter().next() {
            if *h != self.hash {
                log::warn!("artifacts were written under config {h}, current config is {}", self.hash);
            }
        }
        let artifact_hash = hashes.values().next().cloned().unwrap_or_else(|| self.hash.clone());

        let drift: DriftReport = serde_json::from_str(&self.read(DRIFT_REPORT)?)?;
        let selection: Option<SelectionResult> =
            if self.path(SELECTION).is_file() { Some(self.read_json(SELECTION)?) } else { None };
        let cases: Option<CasesDoc> = if self.path(CASES).is_file() { Some(self.read_json(CASES)?) } else { None };
        self.write(REPORT, &render_report(&artifact_hash, selection.as_ref(), cases.as_ref(), &drift))
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelInventory {
    channel: String,
    rate: f64,
    samples: usize,
    start_time: f64,
}

#[derive(Serialize, Deserialize)]
struct SessionInventory {
    path: String,
    participant: String,
    period: Period,
    annotations: usize,
    channels: Vec<ChannelInventory>,
    warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Inventory {
    sessions: Vec<SessionInventory>,
}

#[derive(Serialize, Deserialize)]
struct PeriodMetrics {
    period: Period,
    metrics: Metrics,
}

#[derive(Serialize, Deserialize)]
struct ParticipantCases {
    participant: String,
    cases: Option<CaseTable>,
    skipped: Option<String>,
    /// Full-data model scored on its own training rows.
    in_sample: Vec<PeriodMetrics>,
}

#[derive(Serialize, Deserialize)]
struct CasesDoc {
    features: Vec<FeatureName>,
    participants: Vec<ParticipantCases>,
    summary: Vec<CaseSummary>,
}

/// Config hash of an artifact: a `config_hash` JSON field or a leading
/// `# config_hash=` comment line.
pub fn artifact_hash(text: &str) -> Option<String> {
    if let Some(rest) = text.strip_prefix("# config_hash=") {
        return rest.lines().next().map(|s| s.trim().to_string());
    }
    if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(text).ok()?;
        return v.get("config_hash")?.as_str().map(str::to_string);
    }
    None
}

fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
    if parts.is_empty() {
        ".".into()
    } else {
        parts.join("/")
    }
}

/// Participant id reduced to characters safe in file names.
fn file_key(pid: &str) -> String {
    pid.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn case_design(case: Case) -> (&'static str, &'static str) {
    match case {
        Case::A => ("P1 (90)", "P1 rest"),
        Case::B => ("P1 (90)", "P2 all"),
        Case::C => ("P2 (90)", "P2 rest"),
        Case::D => ("P1 + P2 (90 + 90)", "P2 rest"),
    }
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.digits$}"))
}

fn render_report(
    hash: &str,
    selection: Option<&SelectionResult>,
    cases: Option<&CasesDoc>,
    drift: &DriftReport,
) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Arousal drift report\n");
    let _ = writeln!(md, "Config hash: `{hash}`\n");

    let _ = writeln!(md, "## Selected features\n");
    match selection {
        Some(sel) if !sel.trajectory.is_empty() => {
            let _ = writeln!(md, "| step | feature | CV accuracy | rows |\n|---|---|---|---|");
            for (i, s) in sel.trajectory.iter().enumerate() {
                let _ = writeln!(md, "| {} | {} | {:.3} | {} |", i + 1, s.feature, s.cv_accuracy, s.n_rows);
            }
        }
        _ => {
            let names: Vec<String> = drift.features.iter().map(|f| f.to_string()).collect();
            let _ = writeln!(md, "{}", names.join(", "));
        }
    }

    let _ = writeln!(md, "\n## Cross-period cases\n");
    match cases {
        Some(doc) if !doc.summary.is_empty() => {
            let _ = writeln!(
                md,
                "| case | train | test | accuracy | SE | AUC | SE | participants |\n|---|---|---|---|---|---|---|---|"
            );
            for s in &doc.summary {
                let (train, test) = case_design(s.case);
                let _ = writeln!(
                    md,
                    "| {} | {train} | {test} | {:.3} | {:.3} | {} | {} | {} |",
                    serde_json::to_value(s.case).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
                    s.accuracy,
                    s.accuracy_se,
                    fmt_opt(s.auc, 3),
                    fmt_opt(s.auc_se, 3),
                    s.n_participants
                );
            }
        }
        Some(_) => {
            let _ = writeln!(md, "No participant had enough rows for the case table.");
        }
        None => {
            let _ = writeln!(md, "Not computed (run `eval`).");
        }
    }

    let _ = writeln!(md, "\n## Feature stability\n");
    let _ = writeln!(
        md,
        "Shape correlation r between the period-1 and period-2 curves, least stable first.\n"
    );
    let mut ranked = drift.stability.clone();
    ranked.sort_by(|a, b| a.median.total_cmp(&b.median).then(a.feature.cmp(&b.feature)));
    let _ = writeln!(md, "| rank | feature | median r | mean r | Q1 | Q3 | participants |\n|---|---|---|---|---|---|---|");
    for (i, s) in ranked.iter().enumerate() {
        let _ = writeln!(
            md,
            "| {} | {} | {:.3} | {:.3} | {:.3} | {:.3} | {} |",
            i + 1,
            s.feature,
            s.median,
            s.mean,
            s.q1,
            s.q3,
            s.n
        );
    }

    let _ = writeln!(md, "\n## Participants\n");
    let header: Vec<String> = drift.features.iter().map(|f| format!("r {f}")).collect();
    let _ = writeln!(
        md,
        "| participant | n P1 | n P2 | test accuracy | {} |\n|---|---|---|---|{}",
        header.join(" | "),
        "---|".repeat(header.len())
    );
    for p in &drift.participants {
        let rs: Vec<String> = p.features.iter().map(|f| fmt_opt(f.r, 3)).collect();
        let degraded = if p.degraded { " (degraded)" } else { "" };
        let _ = writeln!(
            md,
            "| {}{degraded} | {} | {} | {} | {} |",
            p.participant,
            p.n_p1,
            p.n_p2,
            fmt_opt(p.mean_test_accuracy, 3),
            rs.join(" | ")
        );
    }
    for s in &drift.skipped {
        let _ = writeln!(md, "\nSkipped {}: {}", s.participant, s.reason);
    }
    md
}
