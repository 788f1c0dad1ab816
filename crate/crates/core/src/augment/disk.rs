use crate::error::Result;
use crate::geometry::Mask;
use crate::image::Image;
use crate::params::DiskParams;
use crate::rng::{scale_draw, RandomSource};

use super::{brightness_table, gate, Outcome};

/// Pixels whose centers lie strictly closer than `radius` to `(cx, cy)`.
pub fn disk_mask(width: usize, height: usize, cx: f64, cy: f64, radius: f64) -> Mask {
    let mut bits = Vec::with_capacity(width * height);
    let r2 = radius * radius;
    for y in 0..height {
        let dy = y as f64 + 0.5 - cy;
        for x in 0..width {
            let dx = x as f64 + 0.5 - cx;
            bits.push(dx * dx + dy * dy < r2);
        }
    }
    Mask::from_bits(width, height, bits)
}

/// Hard-edged disk illumination.
///
/// After the gating draw it takes four more: center x and y as fractions of
/// the width and height, the radius as a fraction of `min(W, H)`, and the
/// brightness factor applied inside the disk. Outside pixels are unchanged.
pub fn disk_illumination<R: RandomSource + ?Sized>(
    img: &Image,
    params: &DiskParams,
    rng: &mut R,
) -> Result<Image> {
    disk_illumination_detailed(img, params, rng).map(|o| o.image)
}

pub fn disk_illumination_detailed<R: RandomSource + ?Sized>(
    img: &Image,
    params: &DiskParams,
    rng: &mut R,
) -> Result<Outcome> {
    params.validate()?;
    if !gate(params.p, rng) {
        return Ok(Outcome::skipped(img));
    }
    let (w, h) = (img.width(), img.height());
    let cx = rng.next_uniform() * w as f64;
    let cy = rng.next_uniform() * h as f64;
    let radius = scale_draw(
        rng.next_uniform(),
        params.radius_range.lo(),
        params.radius_range.hi(),
    ) * w.min(h) as f64;
    let factor = scale_draw(
        rng.next_uniform(),
        params.factor_range.lo(),
        params.factor_range.hi(),
    );

    let mask = disk_mask(w, h, cx, cy, radius);
    let table = brightness_table(factor)?;
    let mut bits = mask.bits().iter();
    let image = img.map_pixels(|src, dst| {
        let inside = *bits.next().unwrap();
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = if inside { table[s as usize] } else { s };
        }
    });
    Ok(Outcome {
        image,
        applied: true,
        mask_area_fraction: None,
    })
}
