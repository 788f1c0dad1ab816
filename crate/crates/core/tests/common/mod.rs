//! Independent reference computations used by the integration and acceptance
//! tests. Nothing here calls into the rasterizer or the transforms it checks.

#![allow(dead_code)]

use std::fs;
use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rsh_augment::imgio;
use rsh_augment::{Image, RshParams};

/// Inclusive point-in-quadrilateral test for a convex (possibly degenerate)
/// polygon, by the sign of the edge cross products.
pub fn point_in_convex_polygon(corners: &[(f64, f64); 4], px: f64, py: f64) -> bool {
    let mut pos = false;
    let mut neg = false;
    for i in 0..4 {
        let (ax, ay) = corners[i];
        let (bx, by) = corners[(i + 1) % 4];
        let cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        if cross > 0.0 {
            pos = true;
        } else if cross < 0.0 {
            neg = true;
        }
    }
    !(pos && neg)
}

/// Brute-force mask over pixel centers; `true` inside.
pub fn brute_force_mask(corners: &[(f64, f64); 4], width: usize, height: usize) -> Vec<bool> {
    let mut bits = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            bits.push(point_in_convex_polygon(
                corners,
                x as f64 + 0.5,
                y as f64 + 0.5,
            ));
        }
    }
    bits
}

/// Corners from the four edge values, in contour order tl, tr, br, bl.
pub fn corners_of(
    width: usize,
    left_top: f64,
    left_height: f64,
    right_top: f64,
    right_height: f64,
) -> [(f64, f64); 4] {
    let w = width as f64;
    [
        (0.0, left_top),
        (w, right_top),
        (w, right_top + right_height),
        (0.0, left_top + left_height),
    ]
}

/// Round half away from zero for non-negative inputs, then clamp to 8 bits.
pub fn quantize_ref(x: f64) -> u8 {
    let r = (x + 0.5).floor();
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

fn lerp_draw(u: f64, (lo, hi): (f64, f64)) -> f64 {
    lo + u * (hi - lo)
}

/// Recomputes an applied RSH output from its seven recorded draws.
pub fn rsh_reference(img: &Image, params: &RshParams, draws: &[f64]) -> Image {
    assert_eq!(draws.len(), 7);
    let h = img.height() as f64;
    let span = |s: rsh_augment::Span| (s.lo(), s.hi());
    let left_height = lerp_draw(draws[1], span(params.left_lower)) * h;
    let left_top = lerp_draw(draws[2], span(params.left_upper)) * h;
    let right_height = lerp_draw(draws[3], span(params.right_lower)) * h;
    let right_top = lerp_draw(draws[4], span(params.right_upper)) * h;
    let shadow = lerp_draw(draws[5], span(params.shadow_range));
    let highlight = lerp_draw(draws[6], span(params.highlight_range));
    let corners = corners_of(img.width(), left_top, left_height, right_top, right_height);
    let mask = brute_force_mask(&corners, img.width(), img.height());
    let c = img.channels();
    let mut data = Vec::with_capacity(img.data().len());
    for (i, v) in img.data().iter().enumerate() {
        let factor = if mask[i / c] { shadow } else { highlight };
        data.push(quantize_ref(*v as f64 * factor));
    }
    Image::new(img.width(), img.height(), c, data).unwrap()
}

/// Monte-Carlo mean of the clipped shadow-area fraction under `params`,
/// integrating each sampled trapezoid's clipped column heights numerically.
pub fn monte_carlo_area(params: &RshParams, samples: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut draw = |s: rsh_augment::Span| s.lo() + rng.random::<f64>() * (s.hi() - s.lo());
    const COLUMNS: usize = 256;
    let mut total = 0.0;
    for _ in 0..samples {
        let lh = draw(params.left_lower);
        let lt = draw(params.left_upper);
        let rh = draw(params.right_lower);
        let rt = draw(params.right_upper);
        let mut area = 0.0;
        for k in 0..COLUMNS {
            let t = (k as f64 + 0.5) / COLUMNS as f64;
            let top = (lt + (rt - lt) * t).clamp(0.0, 1.0);
            let bottom = ((lt + lh) + ((rt + rh) - (lt + lh)) * t).clamp(0.0, 1.0);
            area += (bottom - top).max(0.0);
        }
        total += area / COLUMNS as f64;
    }
    total / samples as f64
}

pub fn random_image(rng: &mut StdRng, max_side: usize) -> Image {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    let c = if rng.random_bool(0.5) { 3 } else { 1 };
    let data = (0..w * h * c).map(|_| rng.random()).collect();
    Image::new(w, h, c, data).unwrap()
}

/// Writes `count` small synthetic images in assorted formats and folders.
pub fn write_fixture_tree(root: &Path, count: usize, side: Option<usize>, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..count {
        let mut img = random_image(&mut rng, 24);
        if let Some(s) = side {
            let c = img.channels();
            let data = (0..s * s * c).map(|_| rng.random()).collect();
            img = Image::new(s, s, c, data).unwrap();
        }
        let ext = match (i % 3, img.channels()) {
            (0, _) => "png",
            (1, 1) => "pgm",
            (1, _) => "ppm",
            _ => "png",
        };
        let rel = format!("class{}/img_{i:04}.{ext}", i % 7);
        imgio::save_image(&img, &imgio::join_relative(root, &rel)).unwrap();
    }
}

/// Every file under `root` as (relative path, bytes), sorted.
pub fn snapshot_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = walkdir::WalkDir::new(root)
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e
                .path()
                .strip_prefix(root)
                .unwrap()
                .to_string_lossy()
                .replace('\\', "/");
            (rel, fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}
