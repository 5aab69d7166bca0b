//! Full-reference image quality metrics and mean opinion scores.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::raster::GrayImage;

/// Mean squared error over all pixels, accumulated exactly in integers.
pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    a.check_same_dims(b)?;
    let sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u64;
            d * d
        })
        .sum();
    Ok(sum as f64 / a.pixels().len() as f64)
}

/// Peak signal-to-noise ratio `10·log10(L²/MSE)` in dB; `f64::INFINITY`
/// for identical images.
pub fn psnr(a: &GrayImage, b: &GrayImage, peak: f64) -> Result<f64> {
    let m = mse(a, b)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / m).log10())
}

/// Constants and exponents of the SSIM index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub c1: f64,
    pub c2: f64,
    /// Luminance exponent.
    pub alpha: f64,
    /// Contrast exponent.
    pub beta: f64,
    /// Structure exponent.
    pub gamma: f64,
    /// Tile side for [`mean_ssim`].
    pub window: usize,
}

impl Default for SsimParams {
    fn default() -> Self {
        SsimParams {
            c1: (0.01f64 * 255.0).powi(2),
            c2: (0.03f64 * 255.0).powi(2),
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            window: 8,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c1.is_finite() && self.c2.is_finite()) {
            return Err(Error::InvalidSsimParams("c1 and c2 must be positive"));
        }
        if [self.alpha, self.beta, self.gamma]
            .iter()
            .any(|e| !(e.is_finite() && *e > 0.0))
        {
            return Err(Error::InvalidSsimParams("exponents must be positive"));
        }
        if self.window < 3 {
            return Err(Error::InvalidSsimParams("window must be at least 3"));
        }
        Ok(())
    }

    fn unit_exponents(&self) -> bool {
        self.alpha == 1.0 && self.beta == 1.0 && self.gamma == 1.0
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy)]
struct Tile {
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
}

/// `sign(b)·|b|^e`, so fractional exponents of a negative structure term
/// stay real.
fn signed_pow(b: f64, e: f64) -> f64 {
    if e == 1.0 {
        b
    } else {
        b.signum() * b.abs().powf(e)
    }
}

fn ssim_tile(a: &GrayImage, b: &GrayImage, t: Tile, p: &SsimParams) -> f64 {
    let width = a.width();
    let rows = (t.y0..t.y0 + t.h).map(|y| y * width + t.x0..y * width + t.x0 + t.w);
    let n = (t.w * t.h) as f64;

    let (mut sa, mut sb) = (0u64, 0u64);
    for r in rows.clone() {
        sa += a.pixels()[r.clone()].iter().map(|&v| v as u64).sum::<u64>();
        sb += b.pixels()[r].iter().map(|&v| v as u64).sum::<u64>();
    }
    let (mu_a, mu_b) = (sa as f64 / n, sb as f64 / n);

    let (mut vaa, mut vbb, mut vab) = (0.0, 0.0, 0.0);
    for r in rows {
        for (&x, &y) in a.pixels()[r.clone()].iter().zip(&b.pixels()[r]) {
            let (da, db) = (x as f64 - mu_a, y as f64 - mu_b);
            vaa += da * da;
            vbb += db * db;
            vab += da * db;
        }
    }
    let (var_a, var_b, cov) = (vaa / n, vbb / n, vab / n);

    if p.unit_exponents() {
        return ((2.0 * mu_a * mu_b + p.c1) * (2.0 * cov + p.c2))
            / ((mu_a * mu_a + mu_b * mu_b + p.c1) * (var_a + var_b + p.c2));
    }
    let (sd_a, sd_b) = (var_a.sqrt(), var_b.sqrt());
    let c3 = p.c2 / 2.0;
    let luminance = (2.0 * mu_a * mu_b + p.c1) / (mu_a * mu_a + mu_b * mu_b + p.c1);
    let contrast = (2.0 * sd_a * sd_b + p.c2) / (var_a + var_b + p.c2);
    let structure = (cov + c3) / (sd_a * sd_b + c3);
    luminance.powf(p.alpha) * contrast.powf(p.beta) * signed_pow(structure, p.gamma)
}

/// SSIM over the whole image with population (divisor `N`) statistics.
pub fn ssim_global(a: &GrayImage, b: &GrayImage, p: &SsimParams) -> Result<f64> {
    a.check_same_dims(b)?;
    p.validate()?;
    let whole = Tile {
        x0: 0,
        y0: 0,
        w: a.width(),
        h: a.height(),
    };
    Ok(ssim_tile(a, b, whole, p))
}

/// Arithmetic mean of SSIM over non-overlapping `window × window` tiles;
/// tiles on the right and bottom edges keep whatever size remains.
pub fn mean_ssim(a: &GrayImage, b: &GrayImage, p: &SsimParams) -> Result<f64> {
    mean_ssim_with(a, b, p, Execution::default())
}

pub fn mean_ssim_with(
    a: &GrayImage,
    b: &GrayImage,
    p: &SsimParams,
    exec: Execution,
) -> Result<f64> {
    a.check_same_dims(b)?;
    p.validate()?;
    let (width, height) = a.dims();
    if p.window > width.min(height) {
        return Err(Error::WindowTooLarge {
            window: p.window,
            width,
            height,
        });
    }
    let tiles: Vec<Tile> = (0..height)
        .step_by(p.window)
        .flat_map(|y0| {
            (0..width).step_by(p.window).map(move |x0| Tile {
                x0,
                y0,
                w: p.window.min(width - x0),
                h: p.window.min(height - y0),
            })
        })
        .collect();
    let scores = exec.map_collect(tiles.len(), |k| ssim_tile(a, b, tiles[k], p));
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// One opinion score.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Rating {
    pub image_id: String,
    pub method_id: String,
    pub rater_id: String,
    pub score: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RatingsTable {
    pub records: Vec<Rating>,
}

impl RatingsTable {
    /// Reads CSV with header `image_id,method_id,rater_id,score`.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let records = rdr.deserialize().collect::<Result<Vec<Rating>, _>>()?;
        Ok(RatingsTable { records })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }
}

/// Mean score per method over all images and raters, sorted by method id.
pub fn mos_aggregate(table: &RatingsTable) -> Result<Vec<(String, f64)>> {
    if table.records.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut acc: BTreeMap<&str, (i64, usize)> = BTreeMap::new();
    for r in &table.records {
        if !(1..=5).contains(&r.score) {
            return Err(Error::InvalidScore {
                image_id: r.image_id.clone(),
                method_id: r.method_id.clone(),
                score: r.score,
            });
        }
        let e = acc.entry(&r.method_id).or_default();
        e.0 += r.score;
        e.1 += 1;
    }
    Ok(acc
        .into_iter()
        .map(|(m, (sum, n))| (m.to_string(), sum as f64 / n as f64))
        .collect())
}
