//! Dataset-scale runs: per-image seeds, parallel application, manifests and
//! summary statistics.
//!
//! Each image gets its own [`ChaChaSource`] seeded by [`derive_seed`] from the
//! run's base seed and the image's relative path, so the output of one file
//! never depends on which other files exist, their order, or the worker count.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::Op;
use crate::error::{Error, Result};
use crate::imgio::{self, FileFormat};
use crate::rng::{ChaChaSource, RecordingSource};

pub const TOOL_NAME: &str = "rsh";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Name of the seed derivation scheme, echoed into manifests.
pub const SEED_SCHEME: &str =
    "sha256(\"rsh-seed-v1\\0\" || base_seed_le64 || path_utf8)[0..8] as le64";
/// Name of the draw generator, echoed into manifests.
pub const RNG_SCHEME: &str =
    "chacha8 (rand_chacha 0.9, seed_from_u64), u = (next_u64 >> 11) * 2^-53";

/// Per-image seed: the first eight bytes (little endian) of
/// `SHA-256("rsh-seed-v1\0" || base_seed as 8 LE bytes || path bytes)`.
///
/// `relative_path` uses `/` separators regardless of platform.
pub fn derive_seed(base_seed: u64, relative_path: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"rsh-seed-v1\0");
    hasher.update(base_seed.to_le_bytes());
    hasher.update(relative_path.as_bytes());
    let hash = hasher.finalize();
    u64::from_le_bytes(hash[..8].try_into().expect("sha256 yields 32 bytes"))
}

/// Lowercase hex SHA-256.
pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Train-test difference: `test_error - train_error`. Negative values mean the
/// model does better on unseen data than on its training data.
pub fn compute_ttd(train_error: f64, test_error: f64) -> Result<f64> {
    for (field, v) in [("train_error", train_error), ("test_error", test_error)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                field: field.into(),
                value: v,
                allowed: "[0, 1]",
            });
        }
    }
    Ok(test_error - train_error)
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub op: Op,
    pub base_seed: u64,
    pub jobs: usize,
    pub input_root: PathBuf,
    pub output_root: PathBuf,
}

/// Run settings that affect the output bytes. Worker count and directory
/// roots are left out so equal runs produce equal manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestConfig {
    pub transform: Op,
    pub base_seed: u64,
    pub seed_derivation: String,
    pub rng: String,
    /// Meaning of each entry of a record's `draws`, in order.
    pub draw_order: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ManifestConfig {
    pub fn new(op: Op, base_seed: u64) -> Self {
        Self {
            transform: op,
            base_seed,
            seed_derivation: SEED_SCHEME.into(),
            rng: RNG_SCHEME.into(),
            draw_order: draw_labels(&op).iter().map(|s| s.to_string()).collect(),
            note: match op {
                Op::Disk(_) => Some(
                    "disk illumination is an approximation: uniform center, hard edge, \
                     radius as a fraction of min(W, H)"
                        .into(),
                ),
                _ => None,
            },
        }
    }
}

/// Labels for the draws an applied transform consumes.
pub fn draw_labels(op: &Op) -> &'static [&'static str] {
    match op {
        Op::Rsh(_) => &[
            "gate",
            "left_height",
            "left_top",
            "right_height",
            "right_top",
            "shadow_factor",
            "highlight_factor",
        ],
        Op::Gamma(_) => &["gate", "gamma"],
        Op::Jitter(_) => &["gate", "brightness", "contrast", "saturation", "hue"],
        Op::Disk(_) => &["gate", "center_x", "center_y", "radius", "factor"],
        Op::None => &[],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub relative_path: String,
    pub output_path: String,
    pub derived_seed: u64,
    pub applied: bool,
    pub draws: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_area_fraction: Option<f64>,
    pub input_digest: String,
    pub output_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Failure {
    pub relative_path: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ManifestConfig,
    pub records: Vec<ManifestRecord>,
    #[serde(default)]
    pub failures: Vec<Failure>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Mean, spread and a 10-bin histogram over `[0, 1]` of mask coverage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaStats {
    pub count: usize,
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Vec<usize>,
}

impl AreaStats {
    pub const BINS: usize = 10;

    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mut histogram = vec![0; Self::BINS];
        for v in values {
            let bin = ((v * Self::BINS as f64) as usize).min(Self::BINS - 1);
            histogram[bin] += 1;
        }
        Some(Self {
            count: values.len(),
            mean,
            stddev: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            histogram,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawStats {
    pub label: String,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub op: String,
    pub images: usize,
    pub applied: usize,
    pub failed: usize,
    pub gating_rate: f64,
    pub mask_area: Option<AreaStats>,
    pub draws: Vec<DrawStats>,
    pub failures: Vec<Failure>,
}

impl Summary {
    /// Fails on a manifest with no records.
    pub fn from_manifest(manifest: &Manifest) -> Result<Self> {
        let records = &manifest.records;
        if records.is_empty() {
            return Err(Error::Manifest("manifest has no records".into()));
        }
        let applied = records.iter().filter(|r| r.applied).count();
        let areas: Vec<f64> = records
            .iter()
            .filter_map(|r| r.mask_area_fraction)
            .collect();

        let labels = &manifest.config.draw_order;
        let width = records.iter().map(|r| r.draws.len()).max().unwrap_or(0);
        let draws = (0..width)
            .map(|i| {
                let values: Vec<f64> = records
                    .iter()
                    .filter_map(|r| r.draws.get(i).copied())
                    .collect();
                DrawStats {
                    label: labels.get(i).cloned().unwrap_or_else(|| format!("draw{i}")),
                    count: values.len(),
                    mean: values.iter().sum::<f64>() / values.len() as f64,
                    min: values.iter().copied().fold(f64::INFINITY, f64::min),
                    max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                }
            })
            .collect();

        Ok(Self {
            op: manifest.config.transform.name().into(),
            images: records.len(),
            applied,
            failed: manifest.failures.len(),
            gating_rate: applied as f64 / records.len() as f64,
            mask_area: AreaStats::from_values(&areas),
            draws,
            failures: manifest.failures.clone(),
        })
    }

    /// Human-readable block, as printed by the CLI.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("op:           {}\n", self.op));
        out.push_str(&format!("images:       {}\n", self.images));
        out.push_str(&format!("applied:      {}\n", self.applied));
        out.push_str(&format!("gating rate:  {:.4}\n", self.gating_rate));
        out.push_str(&format!("failed:       {}\n", self.failed));
        if let Some(a) = &self.mask_area {
            out.push_str(&format!(
                "mask area:    mean {:.4}  stddev {:.4}  min {:.4}  max {:.4}\n",
                a.mean, a.stddev, a.min, a.max
            ));
            out.push_str("area histogram:\n");
            for (i, n) in a.histogram.iter().enumerate() {
                let lo = i as f64 / AreaStats::BINS as f64;
                let hi = (i + 1) as f64 / AreaStats::BINS as f64;
                out.push_str(&format!(
                    "  [{lo:.1}, {hi:.1}{}  {n}\n",
                    if i + 1 == AreaStats::BINS { "]" } else { ")" }
                ));
            }
        }
        if !self.draws.is_empty() {
            out.push_str("uniform draws (before scaling):\n");
            for d in &self.draws {
                out.push_str(&format!(
                    "  {:<17} n={:<7} mean {:.4}  min {:.4}  max {:.4}\n",
                    d.label, d.count, d.mean, d.min, d.max
                ));
            }
        }
        for f in &self.failures {
            out.push_str(&format!("failure: {}: {}\n", f.relative_path, f.error));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest: Manifest,
    pub summary: Summary,
}

/// Where an input's output lands: JPEG inputs become PNG, everything else
/// keeps its path.
pub fn output_relative_path(relative_path: &str) -> String {
    match FileFormat::from_path(Path::new(relative_path)) {
        Some(FileFormat::Jpeg) => {
            let stem = relative_path
                .rsplit_once('.')
                .map(|(stem, _)| stem)
                .unwrap_or(relative_path);
            format!("{stem}.png")
        }
        _ => relative_path.to_string(),
    }
}

/// Runs `op` on one already-read input and returns the encoded output plus its record.
fn transform_bytes(
    op: &Op,
    base_seed: u64,
    relative_path: &str,
    input: &[u8],
) -> Result<(Vec<u8>, ManifestRecord)> {
    let rel_path = Path::new(relative_path);
    let format = FileFormat::from_path(rel_path)
        .ok_or_else(|| Error::UnsupportedFormat(relative_path.to_string()))?;
    let img = imgio::decode_image(input, format, rel_path)?;
    let seed = derive_seed(base_seed, relative_path);
    let mut rng = RecordingSource::new(ChaChaSource::new(seed));
    let outcome = op.apply(&img, &mut rng)?;
    let output_path = output_relative_path(relative_path);
    let out_format = imgio::output_format(Path::new(&output_path), &outcome.image)?;
    let bytes = imgio::encode_image(&outcome.image, out_format)?;
    let record = ManifestRecord {
        relative_path: relative_path.to_string(),
        output_path,
        derived_seed: seed,
        applied: outcome.applied,
        draws: rng.into_draws(),
        mask_area_fraction: outcome.mask_area_fraction,
        input_digest: digest_hex(input),
        output_digest: digest_hex(&bytes),
    };
    Ok((bytes, record))
}

fn process_one(cfg: &JobConfig, relative_path: &str) -> Result<ManifestRecord> {
    let src = imgio::join_relative(&cfg.input_root, relative_path);
    let input = fs::read(&src).map_err(|e| Error::io(&src, e))?;
    let (bytes, record) = transform_bytes(&cfg.op, cfg.base_seed, relative_path, &input)?;
    let dst = imgio::join_relative(&cfg.output_root, &record.output_path);
    if let Some(parent) = dst.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(&dst, &bytes).map_err(|e| Error::io(&dst, e))?;
    Ok(record)
}

/// Transforms every image under `input_root` into a mirrored tree under
/// `output_root`.
///
/// Files that fail to decode or write are recorded as failures and skipped.
/// An input tree with no images, or with none that decode, is an error.
pub fn process_dataset(cfg: &JobConfig) -> Result<RunReport> {
    cfg.op.validate()?;
    let inputs = imgio::list_dataset(&cfg.input_root)?;
    if inputs.is_empty() {
        return Err(Error::EmptyDataset(cfg.input_root.clone()));
    }

    // Two inputs may map to one output (a.jpg and a.png); the first in sort order wins.
    let mut claimed: HashMap<String, &str> = HashMap::new();
    let mut collisions = Vec::new();
    let mut work = Vec::new();
    for rel in &inputs {
        let out = output_relative_path(rel);
        match claimed.get(&out) {
            Some(first) => collisions.push(Failure {
                relative_path: rel.clone(),
                error: format!("output path {out} is already produced by {first}"),
            }),
            None => {
                claimed.insert(out, rel);
                work.push(rel.as_str());
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::io(&cfg.input_root, std::io::Error::other(e)))?;
    let results: Vec<(String, Result<ManifestRecord>)> = pool.install(|| {
        work.par_iter()
            .map(|rel| (rel.to_string(), process_one(cfg, rel)))
            .collect()
    });

    let mut records = Vec::with_capacity(results.len());
    let mut failures = collisions;
    for (rel, result) in results {
        match result {
            Ok(record) => records.push(record),
            Err(e) => {
                log::warn!("{rel}: {e}");
                failures.push(Failure {
                    relative_path: rel,
                    error: e.to_string(),
                });
            }
        }
    }
    failures.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));
    if records.is_empty() {
        return Err(Error::EmptyDataset(cfg.input_root.clone()));
    }

    let manifest = Manifest {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        config: ManifestConfig::new(cfg.op, cfg.base_seed),
        records,
        failures,
    };
    let summary = Summary::from_manifest(&manifest)?;
    Ok(RunReport { manifest, summary })
}

/// Re-runs one record from its input file and returns the recomputed record.
/// A faithful replay has the same `output_digest` (and draws) as the original.
pub fn replay_record(
    op: &Op,
    base_seed: u64,
    input_root: &Path,
    record: &ManifestRecord,
) -> Result<ManifestRecord> {
    let src = imgio::join_relative(input_root, &record.relative_path);
    let input = fs::read(&src).map_err(|e| Error::io(&src, e))?;
    let (_, replayed) = transform_bytes(op, base_seed, &record.relative_path, &input)?;
    Ok(replayed)
}
