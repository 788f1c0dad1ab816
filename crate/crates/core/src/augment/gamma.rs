use crate::error::Result;
use crate::image::{quantize, Image};
use crate::params::GammaParams;
use crate::rng::{scale_draw, RandomSource};

use super::{gate, Outcome};

/// `255 * (v / 255)^gamma`, with 0 always mapping to 0 (so `gamma = 0` sends
/// every positive value to 255).
pub fn gamma_value(v: u8, gamma: f64) -> u8 {
    if v == 0 {
        return 0;
    }
    quantize(255.0 * (v as f64 / 255.0).powf(gamma))
}

/// Random gamma correction: one gating draw, then one draw for the exponent.
pub fn random_gamma<R: RandomSource + ?Sized>(
    img: &Image,
    params: &GammaParams,
    rng: &mut R,
) -> Result<Image> {
    random_gamma_detailed(img, params, rng).map(|o| o.image)
}

pub fn random_gamma_detailed<R: RandomSource + ?Sized>(
    img: &Image,
    params: &GammaParams,
    rng: &mut R,
) -> Result<Outcome> {
    params.validate()?;
    if !gate(params.p, rng) {
        return Ok(Outcome::skipped(img));
    }
    let gamma = scale_draw(
        rng.next_uniform(),
        params.gamma_range.lo(),
        params.gamma_range.hi(),
    );
    let table: [u8; 256] = std::array::from_fn(|v| gamma_value(v as u8, gamma));
    Ok(Outcome {
        image: img.map_values(|v| table[v as usize]),
        applied: true,
        mask_area_fraction: None,
    })
}
