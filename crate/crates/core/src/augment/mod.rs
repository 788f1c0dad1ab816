//! Lighting transforms.
//!
//! Every transform takes the image by reference, leaves it untouched and
//! returns a new image of the same geometry. Each begins with a gating draw
//! `p1`; when `p1 >= p` the input comes back unchanged after that single draw.

mod color;
mod disk;
mod gamma;
mod jitter;
mod rsh;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{quantize, Image};
use crate::params::{DiskParams, GammaParams, JitterParams, RshParams};
use crate::rng::RandomSource;

pub use self::color::{hsv_to_rgb, rgb_to_hsv};
pub use self::disk::{disk_illumination, disk_illumination_detailed, disk_mask};
pub use self::gamma::{gamma_value, random_gamma, random_gamma_detailed};
pub use self::jitter::{
    adjust_contrast, adjust_saturation, color_jitter, color_jitter_detailed, shift_hue,
};
pub use self::rsh::{apply_rsh, apply_rsh_detailed, render_rsh, sample_rsh, RshSample};

/// Result of running a transform, with the facts a manifest needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub image: Image,
    /// Whether the gating draw let the transform through.
    pub applied: bool,
    /// Shadow-mask coverage, for applied RSH runs only.
    pub mask_area_fraction: Option<f64>,
}

impl Outcome {
    fn skipped(img: &Image) -> Self {
        Self {
            image: img.clone(),
            applied: false,
            mask_area_fraction: None,
        }
    }
}

/// Multiplies every channel value by `factor`, rounding and clamping to 8 bits.
pub fn adjust_brightness(img: &Image, factor: f64) -> Result<Image> {
    let table = brightness_table(factor)?;
    Ok(img.map_values(|v| table[v as usize]))
}

pub(crate) fn brightness_table(factor: f64) -> Result<[u8; 256]> {
    if factor.is_nan() || factor < 0.0 {
        return Err(Error::NegativeFactor {
            field: "factor".into(),
            value: factor,
        });
    }
    Ok(std::array::from_fn(|v| quantize(v as f64 * factor)))
}

/// Draws `p1` and reports whether the transform should run.
pub(crate) fn gate<R: RandomSource + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.next_uniform() < p
}

/// One of the supported transforms together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "params", rename_all = "lowercase")]
pub enum Op {
    Rsh(RshParams),
    Gamma(GammaParams),
    Jitter(JitterParams),
    Disk(DiskParams),
    None,
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Rsh(_) => "rsh",
            Op::Gamma(_) => "gamma",
            Op::Jitter(_) => "jitter",
            Op::Disk(_) => "disk",
            Op::None => "none",
        }
    }

    /// The op named `name` with default parameters.
    pub fn from_name(name: &str) -> Option<Op> {
        Some(match name {
            "rsh" => Op::Rsh(RshParams::default()),
            "gamma" => Op::Gamma(GammaParams::default()),
            "jitter" => Op::Jitter(JitterParams::default()),
            "disk" => Op::Disk(DiskParams::default()),
            "none" => Op::None,
            _ => return None,
        })
    }

    pub fn p(&self) -> Option<f64> {
        match self {
            Op::Rsh(p) => Some(p.p),
            Op::Gamma(p) => Some(p.p),
            Op::Jitter(p) => Some(p.p),
            Op::Disk(p) => Some(p.p),
            Op::None => None,
        }
    }

    /// Same op with the gating probability replaced. No effect on `none`.
    pub fn with_p(self, p: f64) -> Op {
        match self {
            Op::Rsh(x) => Op::Rsh(RshParams { p, ..x }),
            Op::Gamma(x) => Op::Gamma(GammaParams { p, ..x }),
            Op::Jitter(x) => Op::Jitter(JitterParams { p, ..x }),
            Op::Disk(x) => Op::Disk(DiskParams { p, ..x }),
            Op::None => Op::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Op::Rsh(p) => p.validate(),
            Op::Gamma(p) => p.validate(),
            Op::Jitter(p) => p.validate(),
            Op::Disk(p) => p.validate(),
            Op::None => Ok(()),
        }
    }

    pub fn apply<R: RandomSource + ?Sized>(&self, img: &Image, rng: &mut R) -> Result<Outcome> {
        match self {
            Op::Rsh(p) => apply_rsh_detailed(img, p, rng),
            Op::Gamma(p) => random_gamma_detailed(img, p, rng),
            Op::Jitter(p) => color_jitter_detailed(img, p, rng),
            Op::Disk(p) => disk_illumination_detailed(img, p, rng),
            Op::None => Ok(Outcome::skipped(img)),
        }
    }
}
