//! Batch command-line front end.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 internal error.
//! Progress goes to standard error; results only to the declared files.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::degrade::{add_noise, bd_downsample, bicubic_downscale, prepare_pair, NoiseParams};
use crate::error::Error;
use crate::frame::{list_frames, load_frame, load_sequence, save_frame, FrameSequence};
use crate::metric::{erqa_score, render_heatmap, Overlay};
use crate::stats::{self, bt_fit_with, kmedoids, plcc, srcc, BtOptions};
use config::{ConfigEcho, Settings};
use report::{read_features, read_votes, Outputs, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "erqa", version, about = "Edge-restoration quality assessment toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set shift_radius=3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<Settings, Error> {
        let mut s = Settings::default();
        if let Some(p) = &self.config {
            s.apply_file(p)?;
        }
        for o in &self.overrides {
            s.apply_override(o)?;
        }
        Ok(s)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    Erqa,
    Psnr,
    Ssim,
}

impl MetricKind {
    fn name(self) -> &'static str {
        match self {
            MetricKind::Erqa => "erqa",
            MetricKind::Psnr => "psnr",
            MetricKind::Ssim => "ssim",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DegradeMode {
    /// Bicubic downscale by `scale`.
    Bi,
    /// Gaussian blur then strided sampling.
    Bd,
    /// Signal-dependent sensor noise.
    Noise,
    /// 1920x1080 ground truth plus 480x270 low-resolution frames.
    Pair,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score a distorted frame directory against a reference directory.
    Score {
        gt_dir: PathBuf,
        dist_dir: PathBuf,
        #[arg(long, value_enum, default_value = "erqa")]
        metric: MetricKind,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads (default: logical processors).
        #[arg(long)]
        jobs: Option<usize>,
        /// Record wall-clock timings in the report (makes it non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Render artifact heatmaps for one frame pair.
    Heatmap {
        gt: PathBuf,
        dist: PathBuf,
        /// Output prefix; writes `<prefix>_gt_overlay.png`, `<prefix>_dist_overlay.png`, `<prefix>_counts.json`.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Generate degraded frames.
    Degrade {
        in_dir: PathBuf,
        #[arg(long, value_enum)]
        mode: DegradeMode,
        #[arg(long)]
        scale: Option<usize>,
        /// Blur std for `bd`.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Fit Bradley-Terry abilities from a votes CSV.
    Bt {
        votes: PathBuf,
        #[arg(long, default_value = "abilities.json")]
        out: PathBuf,
        /// Pseudo-wins added to both sides of every record.
        #[arg(long, default_value_t = 0.0)]
        smoothing: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Correlate feature columns with subjective scores.
    Correlate {
        features: PathBuf,
        subjective: PathBuf,
        #[arg(long, default_value = "corr.json")]
        out: PathBuf,
    },
    /// Select representative rows with k-medoids.
    Cluster {
        features: PathBuf,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "clusters.json")]
        out: PathBuf,
    },
    /// Histogram of per-frame global shifts.
    ShiftDiag {
        gt_dir: PathBuf,
        dist_dir: PathBuf,
        #[arg(long, default_value_t = 5)]
        radius: u32,
        #[arg(long, default_value = "hist.json")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Write { .. } => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl CliError {
    fn internal(message: impl ToString) -> Self {
        CliError {
            code: 2,
            message: message.to_string(),
        }
    }
}

type CmdResult = Result<(), CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: Command) -> CmdResult {
    let mut outputs = Outputs::default();
    let result = match command {
        Command::Score {
            gt_dir,
            dist_dir,
            metric,
            config,
            out,
            csv,
            jobs,
            timing,
        } => with_pool(jobs, || {
            cmd_score(
                &gt_dir,
                &dist_dir,
                metric,
                &config,
                &out,
                csv.as_deref(),
                timing,
                &mut outputs,
            )
        }),
        Command::Heatmap { gt, dist, out, config } => cmd_heatmap(&gt, &dist, &out, &config, &mut outputs),
        Command::Degrade {
            in_dir,
            mode,
            scale,
            sigma,
            seed,
            out,
            config,
            jobs,
        } => with_pool(jobs, || {
            cmd_degrade(&in_dir, mode, scale, sigma, seed, &out, &config, &mut outputs)
        }),
        Command::Bt {
            votes,
            out,
            smoothing,
            max_iter,
            tol,
        } => cmd_bt(
            &votes,
            &out,
            &BtOptions {
                max_iter,
                tol,
                smoothing,
            },
            &mut outputs,
        ),
        Command::Correlate {
            features,
            subjective,
            out,
        } => cmd_correlate(&features, &subjective, &out, &mut outputs),
        Command::Cluster { features, k, seed, out } => cmd_cluster(&features, k, seed, &out, &mut outputs),
        Command::ShiftDiag {
            gt_dir,
            dist_dir,
            radius,
            out,
            jobs,
        } => with_pool(jobs, || cmd_shift_diag(&gt_dir, &dist_dir, radius, &out, &mut outputs)),
    };
    if result.is_err() {
        outputs.discard();
    }
    result
}

fn with_pool(jobs: Option<usize>, f: impl FnOnce() -> CmdResult + Send) -> CmdResult {
    let threads = jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(CliError::internal)?;
    log::debug!("using {} worker threads", pool.current_num_threads());
    pool.install(f)
}

fn load_pair(gt_dir: &Path, dist_dir: &Path) -> Result<(FrameSequence, FrameSequence), Error> {
    let gt = load_sequence(gt_dir)?;
    let dist = load_sequence(dist_dir)?;
    if gt.len() != dist.len() {
        return Err(Error::dims(
            format!("{} frames in {}", gt.len(), gt_dir.display()),
            format!("{} frames in {}", dist.len(), dist_dir.display()),
        ));
    }
    Ok((gt, dist))
}

#[derive(Serialize)]
pub struct FrameValue {
    pub index: usize,
    pub file: String,
    pub value: Value,
}

#[derive(Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub per_frame_seconds: Vec<f64>,
}

#[derive(Serialize)]
pub struct RunReport {
    pub tool_version: &'static str,
    pub metric: &'static str,
    pub gt: String,
    pub dist: String,
    pub config: ConfigEcho,
    pub per_frame: Vec<FrameValue>,
    pub aggregate: Value,
    pub timing: Option<Timing>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_score(
    gt_dir: &Path,
    dist_dir: &Path,
    metric: MetricKind,
    config: &ConfigArgs,
    out: &Path,
    csv_path: Option<&Path>,
    timing: bool,
    outputs: &mut Outputs,
) -> CmdResult {
    let settings = config.resolve()?;
    if metric == MetricKind::Erqa {
        settings.erqa.validate()?;
    }
    let start = Instant::now();
    let (gt, dist) = load_pair(gt_dir, dist_dir)?;
    log::info!("scoring {} frame pairs with {}", gt.len(), metric.name());

    let results: Vec<(f64, f64)> = gt
        .frames()
        .par_iter()
        .zip(dist.frames().par_iter())
        .map(|(g, d)| {
            let t = Instant::now();
            let v = match metric {
                MetricKind::Erqa => erqa_score(g, d, &settings.erqa).map(|s| s.value),
                MetricKind::Psnr => stats::psnr(g, d),
                MetricKind::Ssim => stats::ssim(g, d),
            }?;
            Ok((v, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<_, Error>>()?;

    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let aggregate = values.iter().sum::<f64>() / values.len() as f64;
    let per_frame: Vec<FrameValue> = values
        .iter()
        .enumerate()
        .map(|(index, &v)| FrameValue {
            index,
            file: gt.file_names()[index].clone(),
            value: Value(v),
        })
        .collect();
    let total = start.elapsed().as_secs_f64();
    log::info!("aggregate {} = {} ({total:.2} s)", metric.name(), Value(aggregate).text());

    let report = RunReport {
        tool_version: TOOL_VERSION,
        metric: metric.name(),
        gt: gt_dir.display().to_string(),
        dist: dist_dir.display().to_string(),
        config: settings.echo(),
        per_frame,
        aggregate: Value(aggregate),
        timing: timing.then(|| Timing {
            total_seconds: total,
            per_frame_seconds: results.iter().map(|r| r.1).collect(),
        }),
    };
    outputs.write_json(out, &report)?;
    if let Some(csv_path) = csv_path {
        let rows: Vec<Vec<String>> = report
            .per_frame
            .iter()
            .map(|f| vec![f.index.to_string(), f.file.clone(), f.value.text()])
            .collect();
        outputs.write_csv(csv_path, &["index", "file", metric.name()], &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct HeatmapSidecar {
    tool_version: &'static str,
    score: f64,
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    gt_overlay: String,
    dist_overlay: String,
    config: ConfigEcho,
}

fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_heatmap(gt: &Path, dist: &Path, prefix: &Path, config: &ConfigArgs, outputs: &mut Outputs) -> CmdResult {
    let settings = config.resolve()?;
    let g = load_frame(gt)?;
    let d = load_frame(dist)?;
    let score = erqa_score(&g, &d, &settings.erqa)?;
    let gt_map = render_heatmap(&score.masks, &g, Overlay::Reference)?;
    let dist_map = render_heatmap(&score.masks, &d, Overlay::Distorted)?;

    let gt_path = prefixed(prefix, "_gt_overlay.png");
    let dist_path = prefixed(prefix, "_dist_overlay.png");
    let json_path = prefixed(prefix, "_counts.json");
    outputs.record(gt_path.clone());
    save_frame(&gt_map, &gt_path)?;
    outputs.record(dist_path.clone());
    save_frame(&dist_map, &dist_path)?;
    let sidecar = HeatmapSidecar {
        tool_version: TOOL_VERSION,
        score: score.value,
        tp: score.masks.tp_count(),
        fp: score.masks.fp_count(),
        fn_: score.masks.fn_count(),
        gt_overlay: file_name(&gt_path),
        dist_overlay: file_name(&dist_path),
        config: settings.echo(),
    };
    outputs.write_json(&json_path, &sidecar)?;
    log::info!(
        "score {:.6}: tp {} fp {} fn {}",
        sidecar.score,
        sidecar.tp,
        sidecar.fp,
        sidecar.fn_
    );
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name().unwrap_or_default().to_string_lossy().into_owned()
}

#[derive(Serialize)]
struct DegradeManifest {
    tool_version: &'static str,
    mode: &'static str,
    scale: usize,
    bd_sigma: f64,
    bd_offset: usize,
    sigma_s: f64,
    sigma_c: f64,
    seed: u64,
    /// Frame `i` of a noise run uses `seed + i` (wrapping).
    files: Vec<String>,
}

fn create_dir(p: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(p).map_err(|source| Error::Io {
        path: p.to_path_buf(),
        source,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_degrade(
    in_dir: &Path,
    mode: DegradeMode,
    scale: Option<usize>,
    sigma: Option<f64>,
    seed: Option<u64>,
    out: &Path,
    config: &ConfigArgs,
    outputs: &mut Outputs,
) -> CmdResult {
    let mut settings = config.resolve()?;
    if let Some(s) = scale {
        settings.degrade.scale = s;
    }
    if let Some(s) = sigma {
        settings.degrade.bd_sigma = s;
    }
    if let Some(s) = seed {
        settings.noise.seed = s;
    }
    settings.degrade.validate()?;
    settings.noise.validate()?;

    let paths = list_frames(in_dir)?;
    create_dir(out)?;
    let (hr_dir, lr_dir) = (out.join("hr"), out.join("lr"));
    if mode == DegradeMode::Pair {
        create_dir(&hr_dir)?;
        create_dir(&lr_dir)?;
    }
    log::info!("degrading {} frames ({:?})", paths.len(), mode);

    let written: Vec<Result<Vec<PathBuf>, Error>> = paths
        .par_iter()
        .enumerate()
        .map(|(i, path)| {
            let name = path.file_name().unwrap_or_default();
            let frame = load_frame(path)?;
            let mut files = Vec::new();
            let mut save = |f: &crate::frame::Frame, target: PathBuf| -> Result<(), Error> {
                files.push(target.clone());
                save_frame(f, &target)
            };
            let res = match mode {
                DegradeMode::Bi => save(&bicubic_downscale(&frame, settings.degrade.scale)?, out.join(name)),
                DegradeMode::Bd => save(&bd_downsample(&frame, &settings.degrade)?, out.join(name)),
                DegradeMode::Noise => {
                    let params = NoiseParams {
                        seed: settings.noise.seed.wrapping_add(i as u64),
                        ..settings.noise
                    };
                    save(&add_noise(&frame, &params)?, out.join(name))
                }
                DegradeMode::Pair => {
                    let (hr, lr) = prepare_pair(&frame)?;
                    save(&hr, hr_dir.join(name)).and_then(|_| save(&lr, lr_dir.join(name)))
                }
            };
            res.map(|_| files)
        })
        .collect();

    let mut first_err = None;
    for w in written {
        match w {
            Ok(files) => files.into_iter().for_each(|f| outputs.record(f)),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_err {
        return Err(e.into());
    }

    let manifest = DegradeManifest {
        tool_version: TOOL_VERSION,
        mode: match mode {
            DegradeMode::Bi => "bi",
            DegradeMode::Bd => "bd",
            DegradeMode::Noise => "noise",
            DegradeMode::Pair => "pair",
        },
        scale: settings.degrade.scale,
        bd_sigma: settings.degrade.bd_sigma,
        bd_offset: settings.degrade.bd_offset,
        sigma_s: settings.noise.sigma_s,
        sigma_c: settings.noise.sigma_c,
        seed: settings.noise.seed,
        files: paths.iter().map(|p| file_name(p)).collect(),
    };
    outputs.write_json(&out.join("manifest.json"), &manifest)?;
    Ok(())
}

#[derive(Serialize)]
struct BtItem {
    item: String,
    ability: f64,
    display_score: f64,
}

#[derive(Serialize)]
struct BtReport {
    tool_version: &'static str,
    items: Vec<BtItem>,
    iterations_used: usize,
    converged: bool,
    log_likelihood: f64,
    smoothing: f64,
}

fn cmd_bt(votes: &Path, out: &Path, opts: &BtOptions, outputs: &mut Outputs) -> CmdResult {
    let records = read_votes(votes)?;
    let fit = bt_fit_with(&records, opts)?;
    let display = fit.display_scores();
    let mut order: Vec<usize> = (0..fit.items.len()).collect();
    order.sort_by(|&a, &b| fit.abilities[b].total_cmp(&fit.abilities[a]).then(a.cmp(&b)));
    let report = BtReport {
        tool_version: TOOL_VERSION,
        items: order
            .into_iter()
            .map(|i| BtItem {
                item: fit.items[i].clone(),
                ability: fit.abilities[i],
                display_score: display[i],
            })
            .collect(),
        iterations_used: fit.iterations_used,
        converged: fit.converged,
        log_likelihood: *fit.log_likelihood.last().unwrap_or(&f64::NAN),
        smoothing: opts.smoothing,
    };
    if !fit.converged {
        log::warn!("Bradley-Terry fit did not converge in {} iterations", fit.iterations_used);
    }
    outputs.write_json(out, &report)?;
    Ok(())
}

#[derive(Serialize)]
struct CorrelationRow {
    feature: String,
    plcc: f64,
    srcc: f64,
}

#[derive(Serialize)]
struct CorrelationReport {
    tool_version: &'static str,
    subjective_column: String,
    n: usize,
    rows: Vec<CorrelationRow>,
}

fn cmd_correlate(features: &Path, subjective: &Path, out: &Path, outputs: &mut Outputs) -> CmdResult {
    let fm = read_features(features)?;
    let subj = read_features(subjective)?;
    let subjective_column = subj.cols()[0].clone();
    let target: Vec<f64> = fm
        .rows()
        .iter()
        .map(|id| {
            subj.rows()
                .iter()
                .position(|r| r == id)
                .map(|k| subj.values()[k][0])
                .ok_or_else(|| Error::InvalidInput(format!("no subjective score for `{id}`")))
        })
        .collect::<Result<_, Error>>()?;
    let mut rows = Vec::with_capacity(fm.cols().len());
    for (j, name) in fm.cols().iter().enumerate() {
        let col = fm.column(j);
        rows.push(CorrelationRow {
            feature: name.clone(),
            plcc: plcc(&col, &target)?,
            srcc: srcc(&col, &target)?,
        });
    }
    rows.sort_by(|a, b| b.plcc.total_cmp(&a.plcc).then_with(|| a.feature.cmp(&b.feature)));
    let report = CorrelationReport {
        tool_version: TOOL_VERSION,
        subjective_column,
        n: target.len(),
        rows,
    };
    outputs.write_json(out, &report)?;
    Ok(())
}

#[derive(Serialize)]
struct Membership {
    model: String,
    medoid: String,
}

#[derive(Serialize)]
struct ClusterReport {
    tool_version: &'static str,
    k: usize,
    seed: u64,
    medoids: Vec<String>,
    assignment: Vec<Membership>,
    cost: f64,
    build_cost: f64,
    dropped_columns: Vec<String>,
}

fn cmd_cluster(features: &Path, k: usize, seed: u64, out: &Path, outputs: &mut Outputs) -> CmdResult {
    let fm = read_features(features)?;
    let c = kmedoids(&fm, k, seed)?;
    let ids = fm.rows();
    let report = ClusterReport {
        tool_version: TOOL_VERSION,
        k,
        seed,
        medoids: c.medoids.iter().map(|&m| ids[m].clone()).collect(),
        assignment: c
            .assignment
            .iter()
            .enumerate()
            .map(|(i, &a)| Membership {
                model: ids[i].clone(),
                medoid: ids[c.medoids[a]].clone(),
            })
            .collect(),
        cost: c.cost,
        build_cost: c.build_cost,
        dropped_columns: c.dropped_columns,
    };
    outputs.write_json(out, &report)?;
    Ok(())
}

#[derive(Serialize)]
struct FrameShift {
    index: usize,
    file: String,
    dx: i32,
    dy: i32,
    psnr: Value,
}

#[derive(Serialize)]
struct ShiftReport {
    tool_version: &'static str,
    radius: u32,
    /// `grid[dy + radius][dx + radius]`.
    grid: Vec<Vec<u64>>,
    per_frame: Vec<FrameShift>,
}

fn cmd_shift_diag(gt_dir: &Path, dist_dir: &Path, radius: u32, out: &Path, outputs: &mut Outputs) -> CmdResult {
    let (gt, dist) = load_pair(gt_dir, dist_dir)?;
    let hist = stats::shift_distribution(&gt, &dist, radius)?;
    let report = ShiftReport {
        tool_version: TOOL_VERSION,
        radius,
        grid: hist.counts,
        per_frame: hist
            .per_frame
            .iter()
            .enumerate()
            .map(|(index, e)| FrameShift {
                index,
                file: gt.file_names()[index].clone(),
                dx: e.shift.dx,
                dy: e.shift.dy,
                psnr: Value(e.psnr),
            })
            .collect(),
    };
    outputs.write_json(out, &report)?;
    Ok(())
}
