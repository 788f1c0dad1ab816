//! Uniform draw streams.
//!
//! Every random decision in the crate goes through [`RandomSource`]. The only
//! production source is [`ChaChaSource`]: ChaCha with 8 rounds from
//! `rand_chacha` 0.9, keyed by `SeedableRng::seed_from_u64(seed)`, producing a
//! draw as `(next_u64() >> 11) * 2^-53`. Both the keystream and the seed
//! expansion are value-stable across `rand_chacha`/`rand_core` releases, and
//! the float conversion lives here, so manifests replay across versions of
//! this tool.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A stream of uniform draws on the half-open interval `[0, 1)`.
pub trait RandomSource {
    fn next_uniform(&mut self) -> f64;
}

impl<R: RandomSource + ?Sized> RandomSource for &mut R {
    fn next_uniform(&mut self) -> f64 {
        (**self).next_uniform()
    }
}

impl<R: RandomSource + ?Sized> RandomSource for Box<R> {
    fn next_uniform(&mut self) -> f64 {
        (**self).next_uniform()
    }
}

const TWO_POW_MINUS_53: f64 = 1.0 / (1u64 << 53) as f64;

/// The seeded ChaCha8 stream. Equal seeds give equal sequences on every platform.
#[derive(Debug, Clone)]
pub struct ChaChaSource {
    inner: ChaCha8Rng,
}

impl ChaChaSource {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl RandomSource for ChaChaSource {
    fn next_uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * TWO_POW_MINUS_53
    }
}

/// Wraps a source and counts how many draws were taken.
#[derive(Debug, Clone)]
pub struct CountingSource<R> {
    inner: R,
    count: usize,
}

impl<R: RandomSource> CountingSource<R> {
    pub fn new(inner: R) -> Self {
        Self { inner, count: 0 }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn reset(&mut self) {
        self.count = 0;
    }

    pub fn into_inner(self) -> R {
        self.inner
    }
}

impl<R: RandomSource> RandomSource for CountingSource<R> {
    fn next_uniform(&mut self) -> f64 {
        self.count += 1;
        self.inner.next_uniform()
    }
}

/// Wraps a source and keeps every value it hands out, in order.
#[derive(Debug, Clone)]
pub struct RecordingSource<R> {
    inner: R,
    draws: Vec<f64>,
}

impl<R: RandomSource> RecordingSource<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            draws: Vec::new(),
        }
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn into_draws(self) -> Vec<f64> {
        self.draws
    }
}

impl<R: RandomSource> RandomSource for RecordingSource<R> {
    fn next_uniform(&mut self) -> f64 {
        let u = self.inner.next_uniform();
        self.draws.push(u);
        u
    }
}

/// Replays a fixed list of draws. Panics when the list runs out.
#[derive(Debug, Clone)]
pub struct ScriptedSource {
    draws: Vec<f64>,
    pos: usize,
}

impl ScriptedSource {
    /// Every value must lie in `[0, 1)`.
    pub fn new(draws: impl Into<Vec<f64>>) -> Self {
        let draws = draws.into();
        assert!(
            draws.iter().all(|u| (0.0..1.0).contains(u)),
            "scripted draws must lie in [0, 1)"
        );
        Self { draws, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.draws.len() - self.pos
    }
}

impl RandomSource for ScriptedSource {
    fn next_uniform(&mut self) -> f64 {
        let u = *self
            .draws
            .get(self.pos)
            .unwrap_or_else(|| panic!("scripted source exhausted after {} draws", self.pos));
        self.pos += 1;
        u
    }
}

/// Draw from `[lo, hi)`; a zero-width range returns `lo` exactly.
pub fn uniform_in<R: RandomSource + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Result<f64> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::RangeInverted {
            field: "range".into(),
            lo,
            hi,
        });
    }
    Ok(scale_draw(rng.next_uniform(), lo, hi))
}

/// `lo + u * (hi - lo)`, kept strictly below `hi` when the range is non-empty.
pub(crate) fn scale_draw(u: f64, lo: f64, hi: f64) -> f64 {
    let x = lo + u * (hi - lo);
    if x >= hi && lo < hi {
        hi.next_down()
    } else {
        x
    }
}
