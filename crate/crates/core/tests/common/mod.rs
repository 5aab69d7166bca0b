#![allow(dead_code)]

pub mod oracle;

use deformlab::deform::sample_monitor;
use deformlab::{GrayImage, Grid2D, MonitorPair, ScalarField2D};

/// Raw radial target: 1 at the centre rising to 3 far away (contrast 3).
pub fn radial_target(n: usize) -> ScalarField2D {
    ScalarField2D::from_fn(n, n, |x, y| {
        let r2 = (x - 0.5).powi(2) + (y - 0.5).powi(2);
        3.0 - 2.0 * (-r2 / (2.0 * 0.15 * 0.15)).exp()
    })
    .unwrap()
}

/// Max relative |J_h(φ) − f1(φ)| over interior nodes.
pub fn jacobian_error(grid: &Grid2D, pair: &MonitorPair) -> f64 {
    let jac = grid.jacobian();
    let mut worst: f64 = 0.0;
    for j in 1..grid.ny() - 1 {
        for i in 1..grid.nx() - 1 {
            let (x, y) = grid.get(i, j);
            let f = sample_monitor(pair.f1(), x, y);
            worst = worst.max((jac.get(i, j) - f).abs() / f);
        }
    }
    worst
}

/// 32×32 board of 8×8 squares, black at the origin.
pub fn checkerboard() -> GrayImage {
    GrayImage::from_fn(
        32,
        32,
        |x, y| if (x / 8 + y / 8) % 2 == 0 { 0 } else { 255 },
    )
    .unwrap()
}

/// 3×3 box blur with edge clamping, rounded half up.
pub fn box_blur(img: &GrayImage) -> GrayImage {
    let (w, h) = img.dims();
    GrayImage::from_fn(w, h, |x, y| {
        let mut sum = 0u32;
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let xx = (x as i64 + dx).clamp(0, w as i64 - 1) as usize;
                let yy = (y as i64 + dy).clamp(0, h as i64 - 1) as usize;
                sum += img.get(xx, yy) as u32;
            }
        }
        ((sum as f64 / 9.0) + 0.5).floor() as u8
    })
    .unwrap()
}

/// Smooth 48×48 test image: two Gaussian blobs on a dim background.
pub fn blobs() -> GrayImage {
    GrayImage::from_fn(48, 48, |x, y| {
        let (u, v) = (x as f64 / 47.0, y as f64 / 47.0);
        let g = |cx: f64, cy: f64, s: f64| {
            (-((u - cx).powi(2) + (v - cy).powi(2)) / (2.0 * s * s)).exp()
        };
        let val = 30.0 + 200.0 * g(0.3, 0.35, 0.12) + 150.0 * g(0.7, 0.65, 0.15);
        val.min(255.0).round() as u8
    })
    .unwrap()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].partial_cmp(&v[j]).unwrap());
        let mut r = vec![0.0; v.len()];
        let mut k = 0;
        while k < idx.len() {
            let mut end = k;
            while end + 1 < idx.len() && v[idx[end + 1]] == v[idx[k]] {
                end += 1;
            }
            let avg = (k + end) as f64 / 2.0;
            for &i in &idx[k..=end] {
                r[i] = avg;
            }
            k = end + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
