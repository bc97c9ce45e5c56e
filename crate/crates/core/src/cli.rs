//! The `msde` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numeric error. Failures print one line `MSDE-ERR <module>: <detail>` on
//! stderr. Config precedence: built-in defaults, then `--config` file, then
//! flags.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::config::{ConfigOverrides, MsdeConfig};
use crate::data_io::{
    self, generate_synthetic, load_embeddings, load_scores, save_scores, text, BlobSpec,
    DatasetSplit, EmbeddingMatrix, Format,
};
use crate::density::DensityWeights;
use crate::error::{MsdeError, Result};
use crate::eval::evaluate;
use crate::par;
use crate::scoring::run_pipeline;
use crate::tune::{random_search, SearchSpace, DEFAULT_TRIALS};

#[derive(Debug, Parser)]
#[command(name = "msde", version, about = "Mean-shift density enhancement anomaly scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a test set against a training set of normals.
    Run(RunArgs),
    /// Write a synthetic Gaussian-blob dataset.
    Synth(SynthArgs),
    /// Random hyperparameter search with a leakage-free validation split.
    Tune(TuneArgs),
    /// Recompute metrics from a scores CSV.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Training embeddings (.npy or .csv).
    #[arg(long)]
    train: PathBuf,
    /// Test embeddings (.npy or .csv).
    #[arg(long)]
    test: PathBuf,
    /// Sidecar `row_id,label` CSV for the test set.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Default)]
struct ConfigArgs {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    t_nbd: Option<usize>,
    #[arg(long)]
    k_umap: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    static_graph: Option<bool>,
    #[arg(long)]
    pca_dim: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    standardize: Option<bool>,
    /// Same as `--standardize false`.
    #[arg(long, conflicts_with = "standardize")]
    no_standardize: bool,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    fit_on_joint: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the shift (max-iters = 0): plain PCA + Gaussian baseline.
    #[arg(long, conflicts_with = "max_iters")]
    no_shift: bool,
    /// Worker threads; outputs are identical for every value.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<MsdeConfig> {
        let file = match &self.config {
            Some(p) => ConfigOverrides::from_file(p)?,
            None => ConfigOverrides::default(),
        };
        let flags = ConfigOverrides {
            k: self.k,
            eta: self.eta,
            max_iters: if self.no_shift { Some(0) } else { self.max_iters },
            tol: self.tol,
            t_nbd: self.t_nbd,
            k_umap: self.k_umap,
            static_graph: self.static_graph,
            pca_dim: self.pca_dim,
            lambda: self.lambda,
            standardize: if self.no_standardize { Some(false) } else { self.standardize },
            fit_on_joint: self.fit_on_joint,
            seed: self.seed,
        };
        let config = file.merge(flags).apply(MsdeConfig::default());
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Also write the density weights (`weights.csv`, `weights_joint.csv`).
    #[arg(long)]
    dump_weights: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 32)]
    dim: usize,
    #[arg(long, default_value_t = 500)]
    n_train: usize,
    #[arg(long, default_value_t = 100)]
    n_test_normal: usize,
    #[arg(long, default_value_t = 100)]
    n_test_anomalous: usize,
    #[arg(long, default_value_t = 2.5)]
    anomaly_offset: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Scores CSV written by `msde run`.
    #[arg(long)]
    scores: PathBuf,
    /// Optional `row_id,label` CSV overriding the labels in the scores file.
    #[arg(long)]
    labels: Option<PathBuf>,
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("MSDE_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("MSDE-ERR {}: {e}", e.module());
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run(a) => cmd_run(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Tune(a) => cmd_tune(&a),
        Command::Eval(a) => cmd_eval(&a),
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| MsdeError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| MsdeError::io(path, e))
}

fn load_split(input: &InputArgs) -> Result<DatasetSplit> {
    let train = load_embeddings(&input.train, Format::from_path(&input.train))?;
    let mut test = load_embeddings(&input.test, Format::from_path(&input.test))?;
    if let Some(labels) = &input.labels {
        test = data_io::attach_labels(test, labels)?;
    } else if test.labels().is_none() {
        return Err(MsdeError::InvalidMatrix(format!(
            "{} has no label column; pass --labels",
            input.test.display()
        )));
    }
    if train.dim() != test.dim() {
        return Err(MsdeError::shape(
            "data_io",
            format!(
                "train {} has dim {} but test {} has dim {}",
                input.train.display(),
                train.dim(),
                input.test.display(),
                test.dim()
            ),
        ));
    }
    DatasetSplit::new(train, test)
}

fn config_echo(config: &MsdeConfig, input: &InputArgs, threads: usize) -> Result<String> {
    let mut s = String::from("# resolved configuration\n");
    s.push_str(&config.to_config_text());
    s.push_str(&format!("# threads: {threads}\n"));
    s.push_str(&format!("# train: {} sha256 {}\n", input.train.display(), sha256_file(&input.train)?));
    s.push_str(&format!("# test: {} sha256 {}\n", input.test.display(), sha256_file(&input.test)?));
    if let Some(l) = &input.labels {
        s.push_str(&format!("# labels: {} sha256 {}\n", l.display(), sha256_file(l)?));
    }
    Ok(s)
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| MsdeError::io(dir, e))
}

fn write_weights(path: &Path, ids: &[String], w: &DensityWeights) -> Result<()> {
    let mut s = String::from("row_id,weight\n");
    for (id, v) in ids.iter().zip(&w.weights) {
        s.push_str(&format!("{id},{}\n", text::fmt_f64(*v)));
    }
    write_file(path, &s)
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let config = a.config.resolve()?;
    let split = load_split(&a.input)?;
    create_out(&a.input.out)?;
    let out = &a.input.out;
    let threads = a.config.threads;
    let run = par::with_threads(threads, || run_pipeline(&split, &config))?;

    save_scores(&run.report, out.join("scores.csv"))?;
    match &run.report.metrics {
        Some(m) => write_file(&out.join("metrics.json"), &format!("{}\n", m.to_json()))?,
        None => log::warn!("metrics.json not written: test labels contain one class"),
    }
    write_file(&out.join("config_echo.txt"), &config_echo(&config, &a.input, threads)?)?;

    let mut trace = String::from("phase,iteration,mean_displacement\n");
    for (phase, t) in [("train", &run.shift.train_solo.trace), ("joint", &run.shift.joint_trace)] {
        for (i, d) in t.deltas.iter().enumerate() {
            trace.push_str(&format!("{phase},{},{}\n", i + 1, text::fmt_f64(*d)));
        }
        trace.push_str(&format!("# {phase}: converged = {}\n", t.converged));
    }
    write_file(&out.join("shift_trace.log"), &trace)?;
    run.bundle(&config).save(&out.join("model.json"))?;

    if a.dump_weights {
        if let Some(w) = &run.shift.train_solo.weights_used {
            write_weights(&out.join("weights.csv"), split.train.row_ids(), w)?;
        }
        if let Some(w) = &run.shift.joint_weights {
            let ids: Vec<String> = split
                .train
                .row_ids()
                .iter()
                .map(|id| format!("train:{id}"))
                .chain(split.test.row_ids().iter().map(|id| format!("test:{id}")))
                .collect();
            write_weights(&out.join("weights_joint.csv"), &ids, w)?;
        }
    }
    if let Some(m) = &run.report.metrics {
        println!("{}", m.to_json());
    }
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let spec = BlobSpec {
        dim: a.dim,
        n_train: a.n_train,
        n_test_normal: a.n_test_normal,
        n_test_anomalous: a.n_test_anomalous,
        anomaly_offset: a.anomaly_offset,
        noise_scale: a.noise_scale,
    };
    let split = generate_synthetic(&spec, a.seed)?;
    create_out(&a.out)?;
    data_io::save_embeddings(&split.train, a.out.join("train.npy"), Format::Npy)?;
    data_io::save_embeddings(&split.test, a.out.join("test.npy"), Format::Npy)?;
    // NPY rows are identified by position, so the sidecar uses row numbers.
    let test = EmbeddingMatrix::from_rows(split.test.values().to_vec(), split.test.dim())?
        .with_labels(split.test.labels().map(<[u8]>::to_vec))?;
    text::write_label_sidecar(&test, &a.out.join("labels.csv"))?;
    Ok(())
}

fn cmd_tune(a: &TuneArgs) -> Result<()> {
    let config = a.config.resolve()?;
    let split = load_split(&a.input)?;
    create_out(&a.input.out)?;
    let out = &a.input.out;
    let outcome = par::with_threads(a.config.threads, || {
        random_search(&split, &SearchSpace::default(), a.trials, config.seed, &config)
    })?;

    let mut lines = String::new();
    for t in &outcome.trials {
        let line = serde_json::to_string(t).map_err(|e| MsdeError::numeric("tune", e.to_string()))?;
        lines.push_str(&line);
        lines.push('\n');
    }
    let summary = serde_json::json!({
        "summary": {
            "trials": outcome.trials.len(),
            "best_trial": outcome.best.trial_index,
            "best_params": outcome.best.params,
            "best_val_auc": outcome.best.val_auc,
            "final": outcome.final_metrics,
        }
    });
    lines.push_str(&summary.to_string());
    lines.push('\n');
    write_file(&out.join("trials.jsonl"), &lines)?;

    let mut csv = String::from("trial_index,seed,k,t_nbd,eta,max_iters,tol,val_auc,val_ap\n");
    for t in &outcome.trials {
        let p = &t.params;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            t.trial_index,
            t.seed,
            p.k,
            p.t_nbd,
            text::fmt_f64(p.eta),
            p.max_iters,
            text::fmt_f64(p.tol),
            text::fmt_f64(t.val_auc),
            text::fmt_f64(t.val_ap)
        ));
    }
    write_file(&out.join("trials.csv"), &csv)?;

    let best_config = MsdeConfig {
        shift: outcome.best.params,
        seed: outcome.best.seed,
        ..config.clone()
    };
    write_file(&out.join("best_params.txt"), &best_config.to_config_text())?;
    write_file(
        &out.join("metrics.json"),
        &format!("{}\n", outcome.final_metrics.to_json()),
    )?;
    write_file(
        &out.join("config_echo.txt"),
        &format!(
            "{}# trials: {}\n",
            config_echo(&config, &a.input, a.config.threads)?,
            a.trials
        ),
    )?;
    println!("{}", outcome.final_metrics.to_json());
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let rows = load_scores(&a.scores)?;
    let mut labels: Vec<u8> = rows.iter().map(|r| r.label).collect();
    if let Some(path) = &a.labels {
        let sidecar = text::read_label_sidecar(path)?;
        let by_id: std::collections::HashMap<&str, u8> =
            sidecar.iter().map(|(id, l)| (id.as_str(), *l)).collect();
        for (slot, r) in labels.iter_mut().zip(&rows) {
            *slot = *by_id
                .get(r.row_id.as_str())
                .ok_or_else(|| MsdeError::load(path, format!("no label for row id {:?}", r.row_id)))?;
        }
    }
    let raw: Vec<f64> = rows.iter().map(|r| r.raw).collect();
    let m = evaluate(&raw, &labels)?;
    println!("{}", m.to_json());
    let _ = std::io::stdout().flush();
    Ok(())
}
