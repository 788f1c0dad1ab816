use crate::error::{Error, Result};
use crate::image::{luma, quantize, Image};
use crate::params::JitterParams;
use crate::rng::{scale_draw, RandomSource};

use super::color::{hsv_to_rgb, rgb_to_hsv};
use super::{adjust_brightness, gate, Outcome};

fn pixel_luma(px: &[u8]) -> f64 {
    match px {
        [v] => *v as f64,
        [r, g, b] => luma(*r as f64, *g as f64, *b as f64),
        _ => unreachable!("images have one or three channels"),
    }
}

fn require_rgb(img: &Image, op: &'static str) -> Result<()> {
    if img.channels() != 3 {
        return Err(Error::ChannelMismatch {
            op,
            expected: 3,
            found: img.channels(),
        });
    }
    Ok(())
}

/// Blends every value with the image's mean luma: `m + (v - m) * factor`.
pub fn adjust_contrast(img: &Image, factor: f64) -> Image {
    let total: f64 = img
        .data()
        .chunks_exact(img.channels())
        .map(pixel_luma)
        .sum();
    let mean = total / img.pixel_count() as f64;
    img.map_values(|v| quantize(mean + (v as f64 - mean) * factor))
}

/// Blends each channel with its own pixel's luma: `g + (v - g) * factor`.
pub fn adjust_saturation(img: &Image, factor: f64) -> Result<Image> {
    require_rgb(img, "saturation")?;
    Ok(img.map_pixels(|src, dst| {
        let g = pixel_luma(src);
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = quantize(g + (s as f64 - g) * factor);
        }
    }))
}

/// Rotates hue by `turns` of the color wheel (0.5 = 180 degrees).
pub fn shift_hue(img: &Image, turns: f64) -> Result<Image> {
    require_rgb(img, "hue")?;
    let degrees = turns * 360.0;
    Ok(img.map_pixels(|src, dst| {
        let (h, s, v) = rgb_to_hsv(
            src[0] as f64 / 255.0,
            src[1] as f64 / 255.0,
            src[2] as f64 / 255.0,
        );
        let (r, g, b) = hsv_to_rgb((h + degrees).rem_euclid(360.0), s, v);
        dst[0] = quantize(r * 255.0);
        dst[1] = quantize(g * 255.0);
        dst[2] = quantize(b * 255.0);
    }))
}

/// Random color jitter.
///
/// After the gating draw it takes four more, for brightness, contrast,
/// saturation and hue, and applies them in that order. Grayscale input is
/// accepted only when the saturation and hue ranges are the identity.
pub fn color_jitter<R: RandomSource + ?Sized>(
    img: &Image,
    params: &JitterParams,
    rng: &mut R,
) -> Result<Image> {
    color_jitter_detailed(img, params, rng).map(|o| o.image)
}

pub fn color_jitter_detailed<R: RandomSource + ?Sized>(
    img: &Image,
    params: &JitterParams,
    rng: &mut R,
) -> Result<Outcome> {
    params.validate()?;
    if img.channels() != 3 && !params.is_luma_only() {
        return Err(Error::ChannelMismatch {
            op: "saturation/hue jitter",
            expected: 3,
            found: img.channels(),
        });
    }
    if !gate(params.p, rng) {
        return Ok(Outcome::skipped(img));
    }
    let mut draw = |span: crate::params::Span| scale_draw(rng.next_uniform(), span.lo(), span.hi());
    let brightness = draw(params.brightness_range);
    let contrast = draw(params.contrast_range);
    let saturation = draw(params.saturation_range);
    let hue = draw(params.hue_range);

    let mut out = adjust_brightness(img, brightness)?;
    out = adjust_contrast(&out, contrast);
    if out.channels() == 3 {
        out = adjust_saturation(&out, saturation)?;
        out = shift_hue(&out, hue)?;
    }
    Ok(Outcome {
        image: out,
        applied: true,
        mask_area_fraction: None,
    })
}
