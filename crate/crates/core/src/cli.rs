//! The `rsh` command line: `apply`, `dataset`, `preview` and `stats`.
//!
//! Exit codes: 0 on success, 1 on I/O, decode or manifest failures, 2 on bad
//! flags or bad configuration.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::augment::{apply_rsh, Op};
use crate::error::Error;
use crate::image::Image;
use crate::imgio;
use crate::params::{DiskParams, GammaParams, JitterParams, RshParams};
use crate::pipeline::{self, digest_hex, draw_labels, JobConfig, Manifest, Summary};
use crate::rng::{ChaChaSource, RecordingSource};

#[derive(Debug, Parser)]
#[command(
    name = "rsh",
    version,
    about = "Random Shadows and Highlights and other lighting augmentations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transform a single image.
    Apply(ApplyArgs),
    /// Transform every image under a directory into a mirrored output tree.
    Dataset(DatasetArgs),
    /// Render a grid of independently seeded RSH samples of one image.
    Preview(PreviewArgs),
    /// Summarize an existing run manifest.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpKind {
    Rsh,
    Gamma,
    Jitter,
    Disk,
    None,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    /// Input image (PNG, JPEG, PPM or PGM).
    #[arg(short, long)]
    input: PathBuf,
    /// Output image (PNG, PPM or PGM).
    #[arg(short, long)]
    output: PathBuf,
    /// Transform to apply.
    #[arg(long, value_enum)]
    op: OpKind,
    /// Seed of the draw stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply unconditionally (gating probability 1).
    #[arg(long)]
    force: bool,
    /// JSON parameter file; missing entries keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print every draw taken.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    /// Input directory, searched recursively.
    #[arg(short, long)]
    input: PathBuf,
    /// Output directory; receives the mirrored tree.
    #[arg(short, long)]
    output: PathBuf,
    /// Transform to apply.
    #[arg(long, value_enum)]
    op: OpKind,
    /// Gating probability, overriding the config (use 1 to corrupt a test set).
    #[arg(long)]
    p: Option<f64>,
    /// Base seed; each image derives its own seed from this and its path.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Manifest path [default: OUTPUT/manifest.json].
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// JSON parameter file; missing entries keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PreviewArgs {
    /// Input image.
    #[arg(short, long)]
    input: PathBuf,
    /// Grid shape as ROWSxCOLS, e.g. 3x3.
    #[arg(long)]
    grid: String,
    /// Output montage (PNG, PPM or PGM).
    #[arg(short, long, default_value = "preview.png")]
    output: PathBuf,
    /// Base seed; cell i uses the seed derived from this and "cell/i".
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON parameter file (only the "rsh" entry is used).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Manifest written by `rsh dataset`.
    #[arg(long)]
    manifest: PathBuf,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

/// Parameter file: one optional object per transform.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub rsh: RshParams,
    pub gamma: GammaParams,
    pub jitter: JitterParams,
    pub disk: DiskParams,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))
    }

    fn op(&self, kind: OpKind) -> Op {
        match kind {
            OpKind::Rsh => Op::Rsh(self.rsh),
            OpKind::Gamma => Op::Gamma(self.gamma),
            OpKind::Jitter => Op::Jitter(self.jitter),
            OpKind::Disk => Op::Disk(self.disk),
            OpKind::None => Op::None,
        }
    }
}

/// A command failure and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parameter_error() {
            Failure::usage(format!("invalid parameters: {e}"))
        } else {
            Failure::runtime(e.to_string())
        }
    }
}

/// Help footer listing every transform's default parameters.
pub fn defaults_help() -> String {
    let d = ConfigFile::default();
    let line = |name: &str, value: serde_json::Value| format!("  {name:<7} {value}\n");
    let mut s = String::from("Default parameters (override with --config FILE):\n");
    s.push_str(&line("rsh", serde_json::to_value(d.rsh).unwrap()));
    s.push_str(&line("gamma", serde_json::to_value(d.gamma).unwrap()));
    s.push_str(&line("jitter", serde_json::to_value(d.jitter).unwrap()));
    s.push_str(&line("disk", serde_json::to_value(d.disk).unwrap()));
    s.push_str("Ranges are [lo, hi) sampling intervals; p is the gating probability.");
    s
}

fn command() -> clap::Command {
    let footer = defaults_help();
    Cli::command()
        .mut_subcommand("apply", |c| c.after_help(footer.clone()))
        .mut_subcommand("dataset", |c| c.after_help(footer.clone()))
        .mut_subcommand("preview", |c| c.after_help(footer.clone()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    let result = match cli.command {
        Command::Apply(a) => cmd_apply(a, out),
        Command::Dataset(a) => cmd_dataset(a, out),
        Command::Preview(a) => cmd_preview(a, out),
        Command::Stats(a) => cmd_stats(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    path.map(ConfigFile::load)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn write_image(img: &Image, path: &Path) -> Result<Vec<u8>, Failure> {
    // Unwritable extensions are a flag problem, not an I/O one.
    imgio::output_format(path, img).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(imgio::save_image(img, path)?)
}

fn cmd_apply(args: ApplyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let config = load_config(args.config.as_deref())?;
    let mut op = config.op(args.op);
    if args.force {
        op = op.with_p(1.0);
    }
    op.validate()?;
    let img = imgio::load_image(&args.input)?;
    let mut rng = RecordingSource::new(ChaChaSource::new(args.seed));
    let outcome = op.apply(&img, &mut rng)?;
    let bytes = write_image(&outcome.image, &args.output)?;

    if args.verbose {
        let labels = draw_labels(&op);
        for (i, u) in rng.draws().iter().enumerate() {
            let label = labels.get(i).copied().unwrap_or("draw");
            let _ = writeln!(out, "draw {i} {label:<17} {u:.17}");
        }
        if let Some(area) = outcome.mask_area_fraction {
            let _ = writeln!(out, "mask area fraction {area:.6}");
        }
    }
    let _ = writeln!(
        out,
        "{}  applied={}  sha256={}",
        args.output.display(),
        outcome.applied,
        digest_hex(&bytes)
    );
    Ok(())
}

fn cmd_dataset(args: DatasetArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let config = load_config(args.config.as_deref())?;
    let mut op = config.op(args.op);
    if let Some(p) = args.p {
        op = op.with_p(p);
    }
    op.validate()?;
    if args.jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    let cfg = JobConfig {
        op,
        base_seed: args.seed,
        jobs: args.jobs,
        input_root: args.input.clone(),
        output_root: args.output.clone(),
    };
    let report = pipeline::process_dataset(&cfg)?;
    let manifest_path = args
        .manifest
        .unwrap_or_else(|| args.output.join("manifest.json"));
    report.manifest.write(&manifest_path)?;
    let _ = write!(out, "{}", report.summary.render());
    let _ = writeln!(out, "manifest:     {}", manifest_path.display());
    Ok(())
}

/// Parses `ROWSxCOLS` with both parts at least 1.
pub fn parse_grid(text: &str) -> Option<(usize, usize)> {
    let (r, c) = text.split_once(['x', 'X'])?;
    let (r, c) = (r.trim().parse().ok()?, c.trim().parse().ok()?);
    (r >= 1 && c >= 1).then_some((r, c))
}

/// Seed for montage cell `index` (row-major).
pub fn preview_cell_seed(base_seed: u64, index: usize) -> u64 {
    pipeline::derive_seed(base_seed, &format!("cell/{index}"))
}

/// Tiles `rows x cols` RSH samples of `img` (each forced on) without padding.
pub fn preview_montage(
    img: &Image,
    params: &RshParams,
    rows: usize,
    cols: usize,
    base_seed: u64,
) -> crate::error::Result<Image> {
    let params = params.with_p(1.0);
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let mut data = vec![0u8; w * h * c * rows * cols];
    let stride = w * cols * c;
    for i in 0..rows * cols {
        let mut rng = ChaChaSource::new(preview_cell_seed(base_seed, i));
        let cell = apply_rsh(img, &params, &mut rng)?;
        let (r, col) = (i / cols, i % cols);
        for y in 0..h {
            let src = &cell.data()[y * w * c..(y + 1) * w * c];
            let start = (r * h + y) * stride + col * w * c;
            data[start..start + w * c].copy_from_slice(src);
        }
    }
    Image::new(w * cols, h * rows, c, data)
}

fn cmd_preview(args: PreviewArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (rows, cols) = parse_grid(&args.grid).ok_or_else(|| {
        Failure::usage(format!(
            "--grid expects ROWSxCOLS with both at least 1, got {:?}",
            args.grid
        ))
    })?;
    let config = load_config(args.config.as_deref())?;
    config.rsh.validate()?;
    let img = imgio::load_image(&args.input)?;
    let montage = preview_montage(&img, &config.rsh, rows, cols, args.seed)?;
    let bytes = write_image(&montage, &args.output)?;
    let _ = writeln!(
        out,
        "{}  {}x{}  sha256={}",
        args.output.display(),
        montage.width(),
        montage.height(),
        digest_hex(&bytes)
    );
    Ok(())
}

fn cmd_stats(args: StatsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let manifest = Manifest::read(&args.manifest).map_err(|e| Failure::runtime(e.to_string()))?;
    let summary = Summary::from_manifest(&manifest).map_err(|e| Failure::runtime(e.to_string()))?;
    if args.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&summary).unwrap());
    } else {
        let _ = write!(out, "{}", summary.render());
    }
    Ok(())
}
