//! Prescribed-Jacobian deformations of the unit square and the image
//! features, quality metrics and super-resolution losses built on them.
//!
//! The core pipeline turns a grayscale image into a monitor function,
//! solves a Neumann Poisson problem for a curl-free velocity, integrates
//! node trajectories with RK4 to obtain a grid whose Jacobian determinant
//! matches the monitor, and reads off Jacobian-determinant (JD) and curl
//! (CV) feature maps.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is on
//! (the default); [`Execution`] selects the strategy per call and both
//! strategies produce bitwise-identical results.

pub mod deform;
pub mod error;
pub mod exec;
pub mod features;
pub mod field;
pub mod io;
pub mod losses;
pub mod metrics;
pub mod monitor;
pub mod poisson;
pub mod raster;

pub use deform::{integrate_deformation, sample_monitor, DeformConfig, Grid2D, Sample};
pub use error::{Error, Result};
pub use exec::Execution;
pub use features::{
    curl_of_map, cv_feature_map, feature_maps, jacobian_determinant, jd_feature_map,
    render_feature_image, FeatureMaps, PipelineConfig,
};
pub use field::{Lattice, ScalarField2D, VectorField2D};
pub use losses::{adversarial_loss, content_loss_cv, perceptual_loss, DiscriminatorProbs};
pub use metrics::{mean_ssim, mos_aggregate, mse, psnr, ssim_global, RatingsTable, SsimParams};
pub use monitor::{image_to_monitor, monitor_at_time, normalize_monitor, MonitorPair};
pub use poisson::{solve_neumann_poisson, velocity_from_monitor, SolverConfig};
pub use raster::GrayImage;
