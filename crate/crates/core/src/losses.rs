//! Super-resolution training losses evaluated on precomputed inputs.

use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{cv_feature_map, PipelineConfig};
use crate::raster::GrayImage;

/// Weight of the adversarial term in the perceptual loss.
pub const ADVERSARIAL_WEIGHT: f64 = 1e-3;

/// Mean squared difference between the CV feature maps of a reference and
/// a reconstructed image, both computed with the same pipeline settings.
pub fn content_loss_cv(hr: &GrayImage, sr: &GrayImage, cfg: &PipelineConfig) -> Result<f64> {
    hr.check_same_dims(sr)?;
    let (a, b) = cfg
        .execution
        .join(|| cv_feature_map(hr, cfg), || cv_feature_map(sr, cfg));
    let (a, b) = (a?, b?);
    let n = a.values().len() as f64;
    let sum: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / n)
}

/// Discriminator outputs `D(G(x))`, one per sample, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorProbs(Vec<f64>);

impl DiscriminatorProbs {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p > 0.0 && **p <= 1.0))
        {
            return Err(Error::InvalidProbability { index, value });
        }
        Ok(DiscriminatorProbs(probs))
    }

    /// One probability per line; blank lines and a leading non-numeric
    /// header line are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut probs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            match line.parse::<f64>() {
                Ok(p) => probs.push(p),
                Err(_) if n == 0 => continue,
                Err(_) => return Err(Error::Parse(format!("line {}: {line:?}", n + 1))),
            }
        }
        Self::new(probs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `Σ −ln D`, unnormalized over the batch.
pub fn adversarial_loss(probs: &DiscriminatorProbs) -> f64 {
    probs.0.iter().map(|p| -p.ln()).sum()
}

/// `content + 1e-3 · adversarial`.
pub fn perceptual_loss(content: f64, adversarial: f64) -> Result<f64> {
    if !(content.is_finite() && adversarial.is_finite() && content >= 0.0 && adversarial >= 0.0) {
        return Err(Error::NonFiniteInput);
    }
    Ok(content + ADVERSARIAL_WEIGHT * adversarial)
}
