//! The 8-bit interleaved raster every transform consumes and produces.

use crate::error::{Error, Result};

/// Row-major, interleaved 8-bit image with one (gray) or three (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::InvalidImage("dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "buffer holds {} values, {width}x{height}x{channels} needs {expected}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Image with every channel of every pixel set to `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(
            width,
            height,
            channels,
            vec![value; width.saturating_mul(height).saturating_mul(channels)],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Channel values of the pixel at column `x`, row `y`.
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let start = (y * self.width + x) * self.channels;
        &self.data[start..start + self.channels]
    }

    /// Same geometry, every channel value passed through `f`.
    pub(crate) fn map_values(&self, mut f: impl FnMut(u8) -> u8) -> Image {
        Image {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Same geometry, every pixel passed through `f` (which sees and writes all channels).
    pub(crate) fn map_pixels(&self, mut f: impl FnMut(&[u8], &mut [u8])) -> Image {
        let mut data = vec![0u8; self.data.len()];
        for (src, dst) in self
            .data
            .chunks_exact(self.channels)
            .zip(data.chunks_exact_mut(self.channels))
        {
            f(src, dst);
        }
        Image {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data,
        }
    }
}

/// Round to nearest (ties away from zero), then clamp to the 8-bit range.
pub fn quantize(value: f64) -> u8 {
    if value.is_nan() {
        return 0;
    }
    value.round().clamp(0.0, 255.0) as u8
}

/// Rec. 601 luma of an RGB triple.
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}
