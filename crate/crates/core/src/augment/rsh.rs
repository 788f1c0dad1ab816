use crate::error::Result;
use crate::geometry::{mask_area_fraction, rasterize_mask, sample_trapezoid, Mask, Trapezoid};
use crate::image::Image;
use crate::params::RshParams;
use crate::rng::{scale_draw, RandomSource};

use super::{brightness_table, gate, Outcome};

/// Everything RSH draws once the gate has passed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RshSample {
    pub trapezoid: Trapezoid,
    pub shadow_factor: f64,
    pub highlight_factor: f64,
}

/// Takes six draws: the four trapezoid edges, then the shadow factor, then
/// the highlight factor.
pub fn sample_rsh<R: RandomSource + ?Sized>(
    params: &RshParams,
    height: usize,
    rng: &mut R,
) -> RshSample {
    let trapezoid = sample_trapezoid(params, height, rng);
    let shadow_factor = scale_draw(
        rng.next_uniform(),
        params.shadow_range.lo(),
        params.shadow_range.hi(),
    );
    let highlight_factor = scale_draw(
        rng.next_uniform(),
        params.highlight_range.lo(),
        params.highlight_range.hi(),
    );
    RshSample {
        trapezoid,
        shadow_factor,
        highlight_factor,
    }
}

/// Darkens the masked region by the shadow factor and scales everything else
/// by the highlight factor.
pub fn render_rsh(img: &Image, sample: &RshSample) -> Result<(Image, Mask)> {
    let mask = rasterize_mask(&sample.trapezoid, img.width(), img.height());
    let shadow = brightness_table(sample.shadow_factor)?;
    let highlight = brightness_table(sample.highlight_factor)?;
    let mut bits = mask.bits().iter();
    let out = img.map_pixels(|src, dst| {
        let table = if *bits.next().unwrap() {
            &shadow
        } else {
            &highlight
        };
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = table[s as usize];
        }
    });
    Ok((out, mask))
}

/// Random Shadows and Highlights.
///
/// Takes one draw when the gate rejects and seven when it passes, in the order
/// gate, left height, left top, right height, right top, shadow factor,
/// highlight factor.
pub fn apply_rsh<R: RandomSource + ?Sized>(
    img: &Image,
    params: &RshParams,
    rng: &mut R,
) -> Result<Image> {
    apply_rsh_detailed(img, params, rng).map(|o| o.image)
}

pub fn apply_rsh_detailed<R: RandomSource + ?Sized>(
    img: &Image,
    params: &RshParams,
    rng: &mut R,
) -> Result<Outcome> {
    params.validate()?;
    if !gate(params.p, rng) {
        return Ok(Outcome::skipped(img));
    }
    let sample = sample_rsh(params, img.height(), rng);
    let (image, mask) = render_rsh(img, &sample)?;
    debug_assert!(mask.matches(&image));
    Ok(Outcome {
        image,
        applied: true,
        mask_area_fraction: Some(mask_area_fraction(&mask)),
    })
}
