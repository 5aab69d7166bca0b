//! Monitor functions: the positive fields prescribing the target Jacobian
//! determinant of the deformation.
//!
//! A monitor `f` is *normalized* when the discrete mean of `1/f` over the
//! unit square equals 1, the discrete counterpart of `∫ 1/f dx = |Ω0|`.
//! Time dependence between an initial and a target monitor is linear in
//! `1/f`, which keeps every intermediate monitor normalized and makes
//! `∂/∂t (1/f)` independent of time.

use crate::error::{Error, Result};
use crate::field::ScalarField2D;
use crate::raster::GrayImage;

/// Tolerance on `|mean(1/f) − 1|` accepted by [`MonitorPair::new`].
pub const NORMALIZATION_TOL: f64 = 1e-10;

fn check_positive(field: &ScalarField2D) -> Result<()> {
    match field.values().iter().position(|&v| v <= 0.0) {
        Some(index) => Err(Error::NonPositiveMonitor {
            index,
            value: field.values()[index],
        }),
        None => Ok(()),
    }
}

/// Rescales a positive field by `s = mean(1/raw)` so that `mean(1/f) = 1`.
pub fn normalize_monitor(raw: &ScalarField2D) -> Result<ScalarField2D> {
    check_positive(raw)?;
    let s = raw.recip().mean();
    Ok(raw.map(|v| s * v))
}

/// Monitor derived from image intensity: `1 + alpha * I / 255`, normalized.
///
/// Brighter pixels get a larger prescribed Jacobian, i.e. the deformation
/// expands bright regions and compresses dark ones. `alpha = 0` yields the
/// constant monitor 1.
pub fn image_to_monitor(img: &GrayImage, alpha: f64) -> Result<ScalarField2D> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and non-negative, got {alpha}"
        )));
    }
    let raw = img
        .pixels()
        .iter()
        .map(|&p| 1.0 + alpha * (p as f64 / 255.0))
        .collect();
    let raw = ScalarField2D::new(img.width(), img.height(), raw)?;
    normalize_monitor(&raw)
}

/// Initial and target monitors on a shared lattice, both normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorPair {
    f0: ScalarField2D,
    f1: ScalarField2D,
}

impl MonitorPair {
    /// Wraps two already-normalized monitors.
    pub fn new(f0: ScalarField2D, f1: ScalarField2D) -> Result<Self> {
        f0.check_same_lattice(f1.lattice())?;
        for f in [&f0, &f1] {
            check_positive(f)?;
            let m = f.recip().mean();
            if (m - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidParameter(format!(
                    "monitor is not normalized: mean(1/f) = {m}"
                )));
            }
        }
        Ok(MonitorPair { f0, f1 })
    }

    /// Normalizes both raw fields and pairs them.
    pub fn from_raw(f0: &ScalarField2D, f1: &ScalarField2D) -> Result<Self> {
        Self::new(normalize_monitor(f0)?, normalize_monitor(f1)?)
    }

    /// Pair starting from the identity map (`f0 ≡ 1`) towards `raw` target.
    pub fn from_identity(target: &ScalarField2D) -> Result<Self> {
        let f0 = ScalarField2D::constant(target.nx(), target.ny(), 1.0)?;
        Self::new(f0, normalize_monitor(target)?)
    }

    pub fn f0(&self) -> &ScalarField2D {
        &self.f0
    }

    pub fn f1(&self) -> &ScalarField2D {
        &self.f1
    }

    /// `−∂/∂t (1/f) = 1/f0 − 1/f1`, constant in time.
    pub fn divergence_source(&self) -> ScalarField2D {
        let vals = self
            .f0
            .values()
            .iter()
            .zip(self.f1.values())
            .map(|(a, b)| 1.0 / a - 1.0 / b)
            .collect();
        ScalarField2D::from_parts(self.f0.lattice(), vals)
    }
}

/// Monitor at time `t`: `1/f(t) = (1−t)/f0 + t/f1`. Returns `f0` and `f1`
/// unchanged at the endpoints.
pub fn monitor_at_time(pair: &MonitorPair, t: f64) -> Result<ScalarField2D> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TimeOutOfRange(t));
    }
    if t == 0.0 {
        return Ok(pair.f0.clone());
    }
    if t == 1.0 {
        return Ok(pair.f1.clone());
    }
    let vals = pair
        .f0
        .values()
        .iter()
        .zip(pair.f1.values())
        .map(|(a, b)| 1.0 / ((1.0 - t) / a + t / b))
        .collect();
    Ok(ScalarField2D::from_parts(pair.f0.lattice(), vals))
}
