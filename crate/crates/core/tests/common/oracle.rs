//! Straight-from-the-formula reference metrics and random test images.

use std::collections::HashMap;

use deformlab::{GrayImage, SsimParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    let pixels = (0..w * h).map(|_| rng.random::<u8>()).collect();
    GrayImage::new(w, h, pixels).unwrap()
}

/// A noisy copy, so the pair is correlated like a real reconstruction.
pub fn perturbed(rng: &mut ChaCha8Rng, img: &GrayImage, amp: i32) -> GrayImage {
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| (v as i32 + rng.random_range(-amp..=amp)).clamp(0, 255) as u8)
        .collect();
    GrayImage::new(img.width(), img.height(), pixels).unwrap()
}

pub fn oracle_psnr(a: &GrayImage, b: &GrayImage, peak: f64) -> f64 {
    let mut sq = 0.0;
    for y in 0..a.height() {
        for x in 0..a.width() {
            let d = a.get(x, y) as f64 - b.get(x, y) as f64;
            sq += d * d;
        }
    }
    let mse = sq / (a.width() * a.height()) as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// SSIM of two equal-length samples, written as luminance·contrast·structure
/// with the moments computed as E[xy] − E[x]E[y].
pub fn oracle_ssim(xs: &[f64], ys: &[f64], p: &SsimParams) -> f64 {
    let n = xs.len() as f64;
    let ex = xs.iter().sum::<f64>() / n;
    let ey = ys.iter().sum::<f64>() / n;
    let exx = xs.iter().map(|v| v * v).sum::<f64>() / n;
    let eyy = ys.iter().map(|v| v * v).sum::<f64>() / n;
    let exy = xs.iter().zip(ys).map(|(a, b)| a * b).sum::<f64>() / n;
    let vx = (exx - ex * ex).max(0.0);
    let vy = (eyy - ey * ey).max(0.0);
    let cxy = exy - ex * ey;
    let (sx, sy) = (vx.sqrt(), vy.sqrt());
    let c3 = p.c2 / 2.0;
    let l = (2.0 * ex * ey + p.c1) / (ex * ex + ey * ey + p.c1);
    let c = (2.0 * sx * sy + p.c2) / (vx + vy + p.c2);
    let s = (cxy + c3) / (sx * sy + c3);
    let s_pow = if s < 0.0 {
        -(-s).powf(p.gamma)
    } else {
        s.powf(p.gamma)
    };
    l.powf(p.alpha) * c.powf(p.beta) * s_pow
}

pub fn samples(img: &GrayImage) -> Vec<f64> {
    img.pixels().iter().map(|&v| v as f64).collect()
}

/// Mean SSIM by bucketing every pixel into its tile index.
pub fn oracle_mean_ssim(a: &GrayImage, b: &GrayImage, p: &SsimParams) -> f64 {
    let mut tiles: HashMap<(usize, usize), (Vec<f64>, Vec<f64>)> = HashMap::new();
    for y in 0..a.height() {
        for x in 0..a.width() {
            let t = tiles.entry((x / p.window, y / p.window)).or_default();
            t.0.push(a.get(x, y) as f64);
            t.1.push(b.get(x, y) as f64);
        }
    }
    let total: f64 = tiles.values().map(|(xs, ys)| oracle_ssim(xs, ys, p)).sum();
    total / tiles.len() as f64
}
