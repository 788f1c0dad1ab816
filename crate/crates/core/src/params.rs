//! Parameter sets for the four lighting transforms.
//!
//! Defaults reproduce the published experimental settings: RSH highlight
//! factors in [1, 2), shadow factors in [0, 1), upper edge offsets in
//! [0, 0.3) H and edge heights in [0.4, 0.8) H on both sides; gamma in
//! [0, 1.5); jitter brightness, contrast and saturation in [0, 2) and hue in
//! [-0.5, 0.5).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed-open `[lo, hi)` sampling range. Serializes as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span(pub f64, pub f64);

impl Span {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Span(lo, hi)
    }

    pub fn lo(&self) -> f64 {
        self.0
    }

    pub fn hi(&self) -> f64 {
        self.1
    }

    fn check_ordered(&self, field: &str) -> Result<()> {
        if self.0.is_nan() || self.1.is_nan() || self.0 > self.1 {
            return Err(Error::RangeInverted {
                field: field.to_string(),
                lo: self.0,
                hi: self.1,
            });
        }
        Ok(())
    }

    fn check_nonnegative(&self, field: &str) -> Result<()> {
        self.check_ordered(field)?;
        if self.0 < 0.0 {
            return Err(Error::NegativeFactor {
                field: format!("{field}[0]"),
                value: self.0,
            });
        }
        Ok(())
    }
}

fn check_probability(field: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability {
            field: field.to_string(),
            value: p,
        });
    }
    Ok(())
}

/// Gating probability used when none is configured.
pub const DEFAULT_P: f64 = 0.5;

/// Random Shadows and Highlights parameters.
///
/// Edge ranges are fractions of the image height. `left_upper`/`right_upper`
/// place the top corners, `left_lower`/`right_lower` give the vertical extent
/// of the left and right sides of the trapezoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RshParams {
    pub p: f64,
    pub highlight_range: Span,
    pub shadow_range: Span,
    pub left_upper: Span,
    pub left_lower: Span,
    pub right_upper: Span,
    pub right_lower: Span,
}

impl Default for RshParams {
    fn default() -> Self {
        Self {
            p: DEFAULT_P,
            highlight_range: Span(1.0, 2.0),
            shadow_range: Span(0.0, 1.0),
            left_upper: Span(0.0, 0.3),
            left_lower: Span(0.4, 0.8),
            right_upper: Span(0.0, 0.3),
            right_lower: Span(0.4, 0.8),
        }
    }
}

impl RshParams {
    pub fn with_p(self, p: f64) -> Self {
        Self { p, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        self.highlight_range.check_nonnegative("highlight_range")?;
        self.shadow_range.check_nonnegative("shadow_range")?;
        self.left_upper.check_nonnegative("left_upper")?;
        self.left_lower.check_nonnegative("left_lower")?;
        self.right_upper.check_nonnegative("right_upper")?;
        self.right_lower.check_nonnegative("right_lower")?;
        Ok(())
    }
}

/// Returns `params` unchanged when every range invariant holds.
pub fn validate_params(params: RshParams) -> Result<RshParams> {
    params.validate()?;
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GammaParams {
    pub p: f64,
    pub gamma_range: Span,
}

impl Default for GammaParams {
    fn default() -> Self {
        Self {
            p: DEFAULT_P,
            gamma_range: Span(0.0, 1.5),
        }
    }
}

impl GammaParams {
    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        self.gamma_range.check_nonnegative("gamma_range")
    }
}

/// Color jitter parameters. The hue range is a fraction of a full turn of the
/// color wheel, so `[-0.5, 0.5)` covers every hue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JitterParams {
    pub p: f64,
    pub brightness_range: Span,
    pub contrast_range: Span,
    pub saturation_range: Span,
    pub hue_range: Span,
}

impl Default for JitterParams {
    fn default() -> Self {
        Self {
            p: DEFAULT_P,
            brightness_range: Span(0.0, 2.0),
            contrast_range: Span(0.0, 2.0),
            saturation_range: Span(0.0, 2.0),
            hue_range: Span(-0.5, 0.5),
        }
    }
}

impl JitterParams {
    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        self.brightness_range
            .check_nonnegative("brightness_range")?;
        self.contrast_range.check_nonnegative("contrast_range")?;
        self.saturation_range
            .check_nonnegative("saturation_range")?;
        self.hue_range.check_ordered("hue_range")?;
        for (i, v) in [self.hue_range.0, self.hue_range.1].into_iter().enumerate() {
            if !(-0.5..=0.5).contains(&v) {
                return Err(Error::OutOfRange {
                    field: format!("hue_range[{i}]"),
                    value: v,
                    allowed: "[-0.5, 0.5]",
                });
            }
        }
        Ok(())
    }

    /// True when saturation and hue can only ever be the identity, which is
    /// what grayscale input requires.
    pub fn is_luma_only(&self) -> bool {
        self.saturation_range == Span(1.0, 1.0) && self.hue_range == Span(0.0, 0.0)
    }
}

/// Disk illumination parameters. An approximation of illumination-circle
/// augmentation: a hard-edged disk with a uniformly placed center,
/// a radius given as a fraction of `min(W, H)` and a brightness factor applied
/// inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiskParams {
    pub p: f64,
    pub radius_range: Span,
    pub factor_range: Span,
}

impl Default for DiskParams {
    fn default() -> Self {
        Self {
            p: DEFAULT_P,
            radius_range: Span(0.25, 0.75),
            factor_range: Span(0.0, 2.0),
        }
    }
}

impl DiskParams {
    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        self.radius_range.check_nonnegative("radius_range")?;
        self.factor_range.check_nonnegative("factor_range")
    }
}
