//! The `roadshare` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::agents::{run_baseline, run_training, Algo};
use crate::config::ExperimentConfig;
use crate::metrics::{epochs_to_fraction, metrics_to_bytes, read_metrics, EpochMetrics};
use crate::neural::write_checkpoint;
use crate::plot::plot_metrics;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "roadshare", version, about = "Right-of-way control experiments on small road networks")]
pub struct Cli {
    /// Experiment config (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run seed; defaults to the first entry of `experiment.seeds`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output root; defaults to `experiment.out_dir`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the network edge list and demand schedule.
    Gen,
    /// Simulate one day with the initial layout and report one metrics row.
    Baseline,
    /// Train a controller.
    Train {
        /// ddpg or maddpg; overrides `experiment.algo`.
        #[arg(long, value_parser = parse_algo)]
        algo: Option<Algo>,
        /// Initial exploration noise; overrides `training.sigma0`.
        #[arg(long)]
        sigma0: Option<f64>,
        /// Overrides `training.epochs`.
        #[arg(long)]
        epochs: Option<usize>,
        /// Keep measured wall-clock times in the metrics (otherwise 0, so
        /// reruns are byte-identical).
        #[arg(long)]
        record_timing: bool,
    },
    /// Train once per (sigma0, seed) cell and summarise convergence speed.
    AblateNoise {
        /// Comma-separated initial noise levels, at least two.
        #[arg(long, value_delimiter = ',', required = true)]
        sigmas: Vec<f64>,
        /// Comma-separated seeds; defaults to `experiment.seeds`.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// ddpg or maddpg; overrides `experiment.algo`.
        #[arg(long, value_parser = parse_algo)]
        algo: Option<Algo>,
        /// Overrides `training.epochs`.
        #[arg(long)]
        epochs: Option<usize>,
        /// Keep measured wall-clock times in the metrics.
        #[arg(long)]
        record_timing: bool,
    },
    /// Render reward curves from metrics CSVs as SVG.
    Plot {
        /// metrics.csv or baseline.csv files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Add a second panel with the mean action.
        #[arg(long)]
        with_action: bool,
    },
}

fn parse_algo(s: &str) -> std::result::Result<Algo, String> {
    s.parse()
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let out_root = cli.out_dir.clone().unwrap_or_else(|| cfg.experiment.out_dir.clone());
    match &cli.command {
        Command::Gen => cmd_gen(&cfg, seed_of(cli, &cfg), &out_root),
        Command::Baseline => cmd_baseline(&cfg, seed_of(cli, &cfg), &out_root),
        Command::Train {
            algo,
            sigma0,
            epochs,
            record_timing,
        } => {
            apply_overrides(&mut cfg, *algo, *sigma0, *epochs)?;
            cmd_train(&cfg, seed_of(cli, &cfg), &out_root, *record_timing)
        }
        Command::AblateNoise {
            sigmas,
            seeds,
            algo,
            epochs,
            record_timing,
        } => {
            apply_overrides(&mut cfg, *algo, None, *epochs)?;
            let seeds = if !seeds.is_empty() {
                seeds.clone()
            } else if let Some(s) = cli.seed {
                vec![s]
            } else {
                cfg.experiment.seeds.clone()
            };
            cmd_ablate_noise(&cfg, sigmas, &seeds, &out_root, *record_timing)
        }
        Command::Plot {
            files,
            out,
            with_action,
        } => cmd_plot(files, out, *with_action),
    }
}

fn seed_of(cli: &Cli, cfg: &ExperimentConfig) -> u64 {
    cli.seed.unwrap_or(cfg.experiment.seeds[0])
}

fn apply_overrides(cfg: &mut ExperimentConfig, algo: Option<Algo>, sigma0: Option<f64>, epochs: Option<usize>) -> Result<()> {
    if let Some(a) = algo {
        cfg.experiment.algo = a;
    }
    if let Some(s) = sigma0 {
        cfg.training.sigma0 = s;
    }
    if let Some(e) = epochs {
        cfg.training.epochs = e;
    }
    cfg.validate().map_err(|e| Error::Usage(e.to_string()))
}

/// Files are written into a staging directory and only moved into the run
/// directory once everything has been produced, so a failed run leaves
/// nothing behind. Each move is a rename.
struct Staging {
    tmp: PathBuf,
    target: PathBuf,
    files: Vec<String>,
}

impl Staging {
    fn new(target: PathBuf) -> Result<Self> {
        let name = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let tmp = target.with_file_name(format!(".{name}.partial-{}", std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
        }
        fs::create_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
        Ok(Staging {
            tmp,
            target,
            files: Vec::new(),
        })
    }

    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        self.files.push(rel.to_string());
        let path = self.tmp.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))
    }

    fn commit(self) -> Result<PathBuf> {
        for rel in &self.files {
            let to = self.target.join(rel);
            if let Some(parent) = to.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::rename(self.tmp.join(rel), &to).map_err(|e| Error::io(&to, e))?;
        }
        Ok(self.target.clone())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.tmp);
    }
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    let res = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn run_dir(out_root: &Path, cfg: &ExperimentConfig, seed: u64) -> PathBuf {
    out_root.join(format!("{}-s{seed}", cfg.hash()))
}

pub fn cmd_gen(cfg: &ExperimentConfig, seed: u64, out_root: &Path) -> Result<()> {
    let scenario = cfg.scenario()?;
    let mut stage = Staging::new(run_dir(out_root, cfg, seed))?;
    let mut edges = Vec::new();
    scenario.network.write_edge_list(&mut edges).map_err(|e| Error::io("network.csv", e))?;
    let mut demand = Vec::new();
    scenario.schedule.write_csv(&mut demand).map_err(|e| Error::io("demand.csv", e))?;
    stage.write("network.csv", &edges)?;
    stage.write("demand.csv", &demand)?;
    stage.write("config.toml", cfg.to_toml().as_bytes())?;
    let dir = stage.commit()?;
    let (veh, ped) = scenario.schedule.mean_rates();
    println!("scenario: {}", scenario.name);
    println!("edges |K| = {}", scenario.num_edges());
    println!("slots |T| = {}", scenario.slots());
    println!("mean rate per OD pair: {veh:.2} veh/h, {ped:.2} p/h");
    println!("wrote {}", dir.display());
    Ok(())
}

pub fn cmd_baseline(cfg: &ExperimentConfig, seed: u64, out_root: &Path) -> Result<()> {
    let scenario = cfg.scenario()?;
    let mut row = run_baseline(&scenario, &cfg.training, seed)?;
    row.wall_ms = 0;
    let mut stage = Staging::new(run_dir(out_root, cfg, seed))?;
    stage.write("baseline.csv", &metrics_to_bytes(std::slice::from_ref(&row))?)?;
    stage.write("config.toml", cfg.to_toml().as_bytes())?;
    let dir = stage.commit()?;
    println!(
        "baseline {}: epoch_reward {:.3}, drive {:.3} m/s, walk {:.3} m/s",
        row.scenario, row.epoch_reward, row.mean_drive_speed_mps, row.mean_walk_speed_mps
    );
    println!("wrote {}", dir.display());
    Ok(())
}

pub fn cmd_train(cfg: &ExperimentConfig, seed: u64, out_root: &Path, record_timing: bool) -> Result<()> {
    let scenario = cfg.scenario()?;
    let run = run_training(cfg.experiment.algo, cfg.training.clone(), scenario, seed)?;
    let mut rows = run.metrics;
    if !record_timing {
        rows.iter_mut().for_each(|r| r.wall_ms = 0);
    }
    let mut stage = Staging::new(run_dir(out_root, cfg, seed))?;
    for (name, net) in run.trainer.checkpoints() {
        let mut buf = Vec::new();
        write_checkpoint(net, &mut buf).map_err(|e| Error::io(&name, e))?;
        stage.write(&format!("checkpoints/{name}"), &buf)?;
    }
    stage.write("config.toml", cfg.to_toml().as_bytes())?;
    stage.write("metrics.csv", &metrics_to_bytes(&rows)?)?;
    let dir = stage.commit()?;
    if let Some(last) = rows.last() {
        println!(
            "{} on {}: {} epochs, final epoch_reward {:.3}",
            cfg.experiment.algo,
            last.scenario,
            rows.len(),
            last.epoch_reward
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

/// `(sigma0, seed, epochs to 95% of the final reward)` per grid cell.
pub fn convergence_summary(rows: &[EpochMetrics]) -> Vec<(f64, u64, Option<usize>)> {
    let mut cells: Vec<(f64, u64)> = Vec::new();
    for r in rows {
        if !cells.iter().any(|&(s, seed)| s == r.sigma0 && seed == r.seed) {
            cells.push((r.sigma0, r.seed));
        }
    }
    cells
        .into_iter()
        .map(|(s, seed)| {
            let rewards: Vec<f64> = rows
                .iter()
                .filter(|r| r.sigma0 == s && r.seed == seed)
                .map(|r| r.epoch_reward)
                .collect();
            (s, seed, epochs_to_fraction(&rewards, 0.95, 10))
        })
        .collect()
}

pub fn cmd_ablate_noise(
    cfg: &ExperimentConfig,
    sigmas: &[f64],
    seeds: &[u64],
    out_root: &Path,
    record_timing: bool,
) -> Result<()> {
    if sigmas.len() < 2 {
        return Err(Error::Usage("ablate-noise needs at least two sigma values".into()));
    }
    if let Some(bad) = sigmas.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::Usage(format!("sigma values must be positive, got {bad}")));
    }
    let scenario = cfg.scenario()?;
    let cells: Vec<(f64, u64)> = sigmas
        .iter()
        .flat_map(|&s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(sigma0, seed)| {
            let mut hp = cfg.training.clone();
            hp.sigma0 = sigma0;
            run_training(cfg.experiment.algo, hp, scenario.clone(), seed).map(|r| r.metrics)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<EpochMetrics> = results.into_iter().flatten().collect();
    if !record_timing {
        rows.iter_mut().for_each(|r| r.wall_ms = 0);
    }
    let summary = convergence_summary(&rows);
    let mut text = String::from("sigma0,seed,epochs_to_95pct\n");
    for (s, seed, n) in &summary {
        let n = n.map_or_else(|| "NA".to_string(), |v| v.to_string());
        text.push_str(&format!("{s},{seed},{n}\n"));
        println!("sigma0 {s} seed {seed}: {n} epochs to 95% of final reward");
    }
    let mut tagged = cfg.clone();
    tagged.experiment.seeds = seeds.to_vec();
    let dir = out_root.join(format!("{}-ablate", tagged.hash()));
    let mut stage = Staging::new(dir)?;
    stage.write("metrics.csv", &metrics_to_bytes(&rows)?)?;
    stage.write("summary.csv", text.as_bytes())?;
    stage.write("config.toml", tagged.to_toml().as_bytes())?;
    let dir = stage.commit()?;
    println!("wrote {}", dir.display());
    Ok(())
}

pub fn cmd_plot(files: &[PathBuf], out: &Path, with_action: bool) -> Result<()> {
    let mut tables = Vec::with_capacity(files.len());
    for f in files {
        let file = fs::File::open(f).map_err(|e| Error::io(f, e))?;
        let rows = read_metrics(file).map_err(|e| Error::Other(format!("{}: {e}", f.display())))?;
        if rows.is_empty() {
            return Err(Error::Other(format!("{}: no metrics rows", f.display())));
        }
        tables.push(rows);
    }
    let svg = plot_metrics(&tables, with_action)?;
    write_atomic(out, svg.as_bytes())?;
    println!("wrote {}", out.display());
    Ok(())
}
