//! Jacobian-determinant (JD) and curl (CV) feature maps of an image.
//!
//! The image defines a monitor, the monitor a deformation of the unit
//! square, and the deformed grid the two feature fields, both living on the
//! image's own pixel lattice.

use crate::deform::{integrate_deformation, DeformConfig, Grid2D};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::ScalarField2D;
use crate::monitor::{image_to_monitor, MonitorPair};
use crate::poisson::{velocity_from_monitor, SolverConfig};
use crate::raster::GrayImage;

/// Parameters of the image → deformation → feature pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// Contrast of the intensity monitor `1 + alpha * I / 255`.
    pub alpha: f64,
    /// RK4 steps over `t ∈ [0, 1]`.
    pub steps: usize,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub execution: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        PipelineConfig {
            alpha: 1.0,
            steps: 100,
            solver_tol: solver.tol,
            solver_max_iter: solver.max_iter,
            execution: Execution::default(),
        }
    }
}

impl PipelineConfig {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            tol: self.solver_tol,
            max_iter: self.solver_max_iter,
            execution: self.execution,
        }
    }

    pub fn deform(&self) -> DeformConfig {
        DeformConfig {
            steps: self.steps,
            execution: self.execution,
        }
    }
}

/// `J = xξ·yη − xη·yξ` on the reference lattice.
pub fn jacobian_determinant(grid: &Grid2D) -> ScalarField2D {
    grid.jacobian()
}

/// Scalar curl of the displacement `d = φ(ξ) − ξ`:
/// `∂dy/∂ξ − ∂dx/∂η`, central inside and one-sided on the boundary.
pub fn curl_of_map(grid: &Grid2D) -> ScalarField2D {
    let lat = grid.lattice();
    let id = Grid2D::identity(lat);
    let dx: Vec<f64> = grid.px().iter().zip(id.px()).map(|(a, b)| a - b).collect();
    let dy: Vec<f64> = grid.py().iter().zip(id.py()).map(|(a, b)| a - b).collect();
    let mut out = vec![0.0; lat.len()];
    for j in 0..lat.ny {
        for i in 0..lat.nx {
            let (dy_xi, _) = grid.partials(&dy, i, j);
            let (_, dx_eta) = grid.partials(&dx, i, j);
            out[lat.idx(i, j)] = dy_xi - dx_eta;
        }
    }
    ScalarField2D::from_parts(lat, out)
}

/// Min–max maps the field onto `0..=255` with rounding half up. A constant
/// field renders as uniform 128.
pub fn render_feature_image(field: &ScalarField2D) -> Result<GrayImage> {
    let v = field.values();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteField);
    }
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let pixels = if hi > lo {
        let range = hi - lo;
        v.iter()
            .map(|&x| ((x - lo) / range * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8)
            .collect()
    } else {
        vec![128; v.len()]
    };
    GrayImage::new(field.nx(), field.ny(), pixels)
}

/// Everything the pipeline produces for one image.
#[derive(Debug, Clone)]
pub struct FeatureMaps {
    pub grid: Grid2D,
    pub jd: ScalarField2D,
    pub cv: ScalarField2D,
}

/// Deformed grid of an image: monitor, velocity, RK4 transport.
pub fn deform_image(img: &GrayImage, cfg: &PipelineConfig) -> Result<Grid2D> {
    let pair = MonitorPair::from_identity(&image_to_monitor(img, cfg.alpha)?)?;
    let u = velocity_from_monitor(&pair, &cfg.solver())?;
    integrate_deformation(&pair, &u, &cfg.deform())
}

pub fn feature_maps(img: &GrayImage, cfg: &PipelineConfig) -> Result<FeatureMaps> {
    let grid = deform_image(img, cfg)?;
    Ok(FeatureMaps {
        jd: jacobian_determinant(&grid),
        cv: curl_of_map(&grid),
        grid,
    })
}

pub fn cv_feature_map(img: &GrayImage, cfg: &PipelineConfig) -> Result<ScalarField2D> {
    deform_image(img, cfg).map(|g| curl_of_map(&g))
}

pub fn jd_feature_map(img: &GrayImage, cfg: &PipelineConfig) -> Result<ScalarField2D> {
    deform_image(img, cfg).map(|g| jacobian_determinant(&g))
}
