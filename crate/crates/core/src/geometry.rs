//! Trapezoid sampling and the contour fill that turns it into a shadow mask.
//!
//! The trapezoid has its parallel sides on the left (`x = 0`) and right
//! (`x = W`) image borders. Its corners are
//! `(0, left_top)`, `(W, right_top)`, `(W, right_top + right_height)` and
//! `(0, left_top + left_height)`, in image coordinates with `y` growing down.

use crate::image::Image;
use crate::params::RshParams;
use crate::rng::{scale_draw, RandomSource};

/// A sampled shadow trapezoid, in continuous pixel units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoid {
    pub left_top: f64,
    pub left_height: f64,
    pub right_top: f64,
    pub right_height: f64,
}

impl Trapezoid {
    pub fn left_bottom(&self) -> f64 {
        self.left_top + self.left_height
    }

    pub fn right_bottom(&self) -> f64 {
        self.right_top + self.right_height
    }

    /// Corners in contour order: top-left, top-right, bottom-right, bottom-left.
    pub fn corners(&self, width: usize) -> [(f64, f64); 4] {
        let w = width as f64;
        [
            (0.0, self.left_top),
            (w, self.right_top),
            (w, self.right_bottom()),
            (0.0, self.left_bottom()),
        ]
    }

    /// Ordinate of the top edge at abscissa `x` for an image `width` wide.
    pub fn top_at(&self, x: f64, width: usize) -> f64 {
        lerp(self.left_top, self.right_top, x / width as f64)
    }

    /// Ordinate of the bottom edge at abscissa `x`.
    pub fn bottom_at(&self, x: f64, width: usize) -> f64 {
        lerp(self.left_bottom(), self.right_bottom(), x / width as f64)
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Draws the four edge values, in the order left height, left top, right
/// height, right top, each scaled by `height`.
///
/// `params` must already be validated.
pub fn sample_trapezoid<R: RandomSource + ?Sized>(
    params: &RshParams,
    height: usize,
    rng: &mut R,
) -> Trapezoid {
    let h = height as f64;
    let mut draw =
        |span: crate::params::Span| scale_draw(rng.next_uniform(), span.lo(), span.hi()) * h;
    let left_height = draw(params.left_lower);
    let left_top = draw(params.left_upper);
    let right_height = draw(params.right_lower);
    let right_top = draw(params.right_upper);
    Trapezoid {
        left_top,
        left_height,
        right_top,
        right_height,
    }
}

/// Per-pixel boolean raster; `true` marks the shadow region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    /// Row-major bits; panics if the length does not match the dimensions.
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "mask bit count");
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn matches(&self, img: &Image) -> bool {
        self.width == img.width() && self.height == img.height()
    }
}

/// Fills the trapezoid: pixel `(x, y)` is inside when its center lies between
/// the top and bottom edges, both inclusive. Parts of the trapezoid beyond the
/// image are dropped.
pub fn rasterize_mask(trap: &Trapezoid, width: usize, height: usize) -> Mask {
    let mut mask = Mask::empty(width, height);
    for x in 0..width {
        let cx = x as f64 + 0.5;
        let top = trap.top_at(cx, width);
        let bottom = trap.bottom_at(cx, width);
        for y in 0..height {
            let cy = y as f64 + 0.5;
            if top <= cy && cy <= bottom {
                mask.bits[y * width + x] = true;
            }
        }
    }
    mask
}

pub fn invert_mask(mask: &Mask) -> Mask {
    Mask {
        width: mask.width,
        height: mask.height,
        bits: mask.bits.iter().map(|b| !b).collect(),
    }
}

/// Fraction of pixels inside the mask.
///
/// The ratio is rounded (half to even) to a multiple of 2^-53, which makes the
/// fraction of the inverted mask exactly `1 - fraction`.
pub fn mask_area_fraction(mask: &Mask) -> f64 {
    if mask.bits.is_empty() {
        return 0.0;
    }
    exact_ratio(mask.count(), mask.bits.len())
}

fn exact_ratio(count: usize, total: usize) -> f64 {
    const SCALE: u128 = 1 << 53;
    let (count, total) = (count as u128, total as u128);
    let num = count * SCALE;
    let (mut units, rem) = (num / total, num % total);
    if 2 * rem > total || (2 * rem == total && units % 2 == 1) {
        units += 1;
    }
    units as f64 / SCALE as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Span;
    use crate::rng::{ChaChaSource, ScriptedSource};

    fn band(left_top: f64, left_height: f64, right_top: f64, right_height: f64) -> Trapezoid {
        Trapezoid {
            left_top,
            left_height,
            right_top,
            right_height,
        }
    }

    fn rows_in_column(mask: &Mask, x: usize) -> Vec<usize> {
        (0..mask.height()).filter(|&y| mask.get(x, y)).collect()
    }

    #[test]
    fn mid_range_draws_on_defaults() {
        let mut rng = ScriptedSource::new([0.5; 4]);
        let t = sample_trapezoid(&RshParams::default(), 100, &mut rng);
        assert!((t.left_height - 60.0).abs() < 1e-9);
        assert!((t.left_top - 15.0).abs() < 1e-9);
        assert!((t.right_height - 60.0).abs() < 1e-9);
        assert!((t.right_top - 15.0).abs() < 1e-9);
        let c = t.corners(100);
        assert!((c[0].1 - 15.0).abs() < 1e-9);
        assert!((c[3].1 - 75.0).abs() < 1e-9);
        assert_eq!(rng.remaining(), 0);
    }

    #[test]
    fn lower_bound_draws_on_defaults() {
        let mut rng = ScriptedSource::new([0.0; 4]);
        let t = sample_trapezoid(&RshParams::default(), 100, &mut rng);
        assert_eq!(t, band(0.0, 40.0, 0.0, 40.0));
    }

    #[test]
    fn zero_ranges_collapse_to_the_top_border() {
        let z = Span(0.0, 0.0);
        let params = RshParams {
            left_upper: z,
            left_lower: z,
            right_upper: z,
            right_lower: z,
            ..Default::default()
        };
        let t = sample_trapezoid(&params, 50, &mut ChaChaSource::new(9));
        assert!(t.corners(50).iter().all(|&(_, y)| y == 0.0));
        assert_eq!(mask_area_fraction(&rasterize_mask(&t, 50, 50)), 0.0);
    }

    #[test]
    fn horizontal_band() {
        let m = rasterize_mask(&band(1.0, 3.0, 1.0, 3.0), 4, 6);
        for x in 0..4 {
            assert_eq!(rows_in_column(&m, x), vec![1, 2, 3]);
        }
        assert_eq!(mask_area_fraction(&m), 0.5);

        let inv = invert_mask(&m);
        for x in 0..4 {
            assert_eq!(rows_in_column(&inv, x), vec![0, 4, 5]);
        }
    }

    #[test]
    fn sloped_bottom_edge_touches_centers_inclusively() {
        // bottom(x) = 4 - x, so centers (0.5, 3.5) and (1.5, 2.5) sit exactly on it.
        let m = rasterize_mask(&band(0.0, 4.0, 0.0, 2.0), 2, 4);
        assert_eq!(rows_in_column(&m, 0), vec![0, 1, 2, 3]);
        assert_eq!(rows_in_column(&m, 1), vec![0, 1, 2]);
    }

    #[test]
    fn inversion_is_an_involution() {
        let empty = Mask::empty(3, 5);
        assert_eq!(invert_mask(&empty), Mask::full(3, 5));
        let m = rasterize_mask(&band(0.3, 2.2, 1.7, 0.4), 7, 5);
        assert_eq!(invert_mask(&invert_mask(&m)), m);
    }

    #[test]
    fn area_fraction_extremes() {
        assert_eq!(mask_area_fraction(&Mask::empty(4, 4)), 0.0);
        assert_eq!(mask_area_fraction(&Mask::full(4, 4)), 1.0);
    }

    #[test]
    fn edges_interpolate_to_corner_ordinates() {
        let t = band(3.25, 10.0, 17.5, 2.0);
        let w = 37;
        assert!((t.top_at(0.0, w) - 3.25).abs() < 1e-9);
        assert!((t.top_at(w as f64, w) - 17.5).abs() < 1e-9);
        assert!((t.bottom_at(0.0, w) - 13.25).abs() < 1e-9);
        assert!((t.bottom_at(w as f64, w) - 19.5).abs() < 1e-9);
        // affine: equal steps between consecutive column centers
        let steps: Vec<f64> = (0..w)
            .map(|x| t.top_at(x as f64 + 1.5, w) - t.top_at(x as f64 + 0.5, w))
            .collect();
        for s in &steps {
            assert!((s - steps[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn columns_are_contiguous_for_sampled_trapezoids() {
        let mut rng = ChaChaSource::new(2024);
        let params = RshParams::default();
        for i in 0..10_000 {
            let w = 1 + i % 48;
            let h = 1 + (i * 7) % 48;
            let t = sample_trapezoid(&params, h, &mut rng);
            let m = rasterize_mask(&t, w, h);
            for x in 0..w {
                let rows = rows_in_column(&m, x);
                if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
                    assert_eq!(rows.len(), last - first + 1, "gap in column {x} of {t:?}");
                }
            }
        }
    }

    #[test]
    fn ratio_complement_is_exact_for_every_count() {
        for total in [1usize, 3, 7, 10, 24, 49, 4096, 12_345] {
            for count in 0..=total.min(2000) {
                assert_eq!(
                    exact_ratio(total - count, total),
                    1.0 - exact_ratio(count, total)
                );
            }
        }
        assert_eq!(exact_ratio(12, 24), 0.5);
    }

    #[test]
    fn complement_area_sums_to_one() {
        let mut rng = ChaChaSource::new(5);
        for _ in 0..200 {
            let t = sample_trapezoid(&RshParams::default(), 33, &mut rng);
            let m = rasterize_mask(&t, 21, 33);
            assert_eq!(
                mask_area_fraction(&invert_mask(&m)),
                1.0 - mask_area_fraction(&m)
            );
        }
    }
}
