//! Deterministic Random Shadows and Highlights (RSH) augmentation.
//!
//! The crate darkens a random trapezoidal region of an image and brightens its
//! complement, alongside three comparison lighting augmentations (random gamma,
//! color jitter and disk illumination). Every transform is a pure function of
//! the input image, its parameters and the draws taken from a caller-owned
//! [`RandomSource`], which makes whole-dataset corruption runs replayable from
//! a manifest.
//!
//! ```
//! use rsh_augment::{apply_rsh, ChaChaSource, Image, RshParams};
//!
//! let img = Image::filled(64, 64, 3, 128)?;
//! let mut rng = ChaChaSource::new(42);
//! let out = apply_rsh(&img, &RshParams::default().with_p(1.0), &mut rng)?;
//! assert_eq!((out.width(), out.height()), (64, 64));
//! # Ok::<(), rsh_augment::Error>(())
//! ```

pub mod augment;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod image;
pub mod imgio;
pub mod params;
pub mod pipeline;
pub mod rng;

pub use crate::augment::{
    adjust_brightness, apply_rsh, color_jitter, disk_illumination, random_gamma, Op, Outcome,
};
pub use crate::error::{Error, Result};
pub use crate::geometry::{
    invert_mask, mask_area_fraction, rasterize_mask, sample_trapezoid, Mask, Trapezoid,
};
pub use crate::image::Image;
pub use crate::params::{validate_params, DiskParams, GammaParams, JitterParams, RshParams, Span};
pub use crate::rng::{
    uniform_in, ChaChaSource, CountingSource, RandomSource, RecordingSource, ScriptedSource,
};
