//! Neumann Poisson problem on the unit square and the curl-free velocity
//! field derived from it.
//!
//! The operator is the 5-point Laplacian on the node lattice with ghost
//! nodes mirrored across each wall (`w[-1] = w[1]`), which imposes
//! `∂w/∂n = 0`. Its eigenvectors are products of type-I cosines, so the
//! system is solved directly by a pair of 2-D DCT-I transforms, followed by
//! iterative refinement until the residual meets the tolerance.
//!
//! The mirrored operator annihilates constants, and its range is the set
//! of fields with zero trapezoidal mean, which is the same discrete mean
//! used to normalize monitors.

use std::sync::Arc;

use rustdct::{Dct1, DctPlanner};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{Lattice, ScalarField2D, VectorField2D};
use crate::monitor::MonitorPair;

/// Largest `|mean(rhs)|` accepted as a compatible Neumann right-hand side.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Max-norm residual tolerance.
    pub tol: f64,
    /// Budget of refinement sweeps after the initial direct solve.
    pub max_iter: usize,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: 20,
            execution: Execution::default(),
        }
    }
}

/// 5-point Laplacian with mirrored ghost nodes, evaluated at every node.
pub fn laplacian(w: &ScalarField2D, exec: Execution) -> ScalarField2D {
    let lat = w.lattice();
    let (hx, hy) = lat.spacing();
    let (ax, ay) = (1.0 / (hx * hx), 1.0 / (hy * hy));
    let v = w.values();
    let mut out = vec![0.0; lat.len()];
    exec.fill(&mut out, |k| {
        let (i, j) = (k % lat.nx, k / lat.nx);
        let il = if i == 0 { 1 } else { i - 1 };
        let ir = if i == lat.nx - 1 { lat.nx - 2 } else { i + 1 };
        let jd = if j == 0 { 1 } else { j - 1 };
        let ju = if j == lat.ny - 1 { lat.ny - 2 } else { j + 1 };
        let c = v[k];
        ax * (v[lat.idx(il, j)] - 2.0 * c + v[lat.idx(ir, j)])
            + ay * (v[lat.idx(i, jd)] - 2.0 * c + v[lat.idx(i, ju)])
    });
    ScalarField2D::from_parts(lat, out)
}

/// Discrete gradient: central differences, with the mirrored ghost node on
/// walls so the normal component is exactly zero there.
pub fn gradient(w: &ScalarField2D, exec: Execution) -> VectorField2D {
    let lat = w.lattice();
    let (hx, hy) = lat.spacing();
    let v = w.values();
    let mut ux = vec![0.0; lat.len()];
    let mut uy = vec![0.0; lat.len()];
    exec.join(
        || {
            exec.fill(&mut ux, |k| {
                let (i, j) = (k % lat.nx, k / lat.nx);
                if i == 0 || i == lat.nx - 1 {
                    0.0
                } else {
                    (v[lat.idx(i + 1, j)] - v[lat.idx(i - 1, j)]) / (2.0 * hx)
                }
            })
        },
        || {
            exec.fill(&mut uy, |k| {
                let (i, j) = (k % lat.nx, k / lat.nx);
                if j == 0 || j == lat.ny - 1 {
                    0.0
                } else {
                    (v[lat.idx(i, j + 1)] - v[lat.idx(i, j - 1)]) / (2.0 * hy)
                }
            })
        },
    );
    VectorField2D::from_parts(lat, ux, uy)
}

/// Diagonalization of the mirrored Laplacian on one lattice.
struct SpectralSolver {
    lattice: Lattice,
    dct_x: Arc<dyn Dct1<f64>>,
    dct_y: Arc<dyn Dct1<f64>>,
    eig_x: Vec<f64>,
    eig_y: Vec<f64>,
    exec: Execution,
}

impl SpectralSolver {
    fn new(lattice: Lattice, exec: Execution) -> Self {
        let mut planner = DctPlanner::new();
        let eig = |n: usize| -> Vec<f64> {
            let h = 1.0 / (n - 1) as f64;
            (0..n)
                .map(|k| {
                    let s = (std::f64::consts::PI * k as f64 / (2.0 * (n - 1) as f64)).sin();
                    -4.0 * s * s / (h * h)
                })
                .collect()
        };
        SpectralSolver {
            lattice,
            dct_x: planner.plan_dct1(lattice.nx),
            dct_y: planner.plan_dct1(lattice.ny),
            eig_x: eig(lattice.nx),
            eig_y: eig(lattice.ny),
            exec,
        }
    }

    /// Solves `L w = rhs` for the component of `rhs` orthogonal to the
    /// constants; the returned `w` has zero trapezoidal mean.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.lattice.nx, self.lattice.ny);
        let exec = self.exec;

        let mut rows = rhs.to_vec();
        exec.for_each_row(&mut rows, nx, |_, row| self.dct_x.process_dct1(row));

        // column-major: one contiguous line of ny samples per kx
        let mut cols = transpose(&rows, nx, ny);
        exec.for_each_row(&mut cols, ny, |kx, col| {
            self.dct_y.process_dct1(col);
            for (ky, c) in col.iter_mut().enumerate() {
                let lambda = self.eig_x[kx] + self.eig_y[ky];
                *c = if kx == 0 && ky == 0 { 0.0 } else { *c / lambda };
            }
            self.dct_y.process_dct1(col);
        });

        let mut out = transpose(&cols, ny, nx);
        let scale = 4.0 / ((nx - 1) * (ny - 1)) as f64;
        exec.for_each_row(&mut out, nx, |_, row| {
            self.dct_x.process_dct1(row);
            row.iter_mut().for_each(|v| *v *= scale);
        });
        out
    }
}

/// `rows × cols` row-major to `cols × rows` row-major.
fn transpose(data: &[f64], cols: usize, rows: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

fn max_residual(w: &ScalarField2D, rhs: &[f64], exec: Execution) -> (f64, Vec<f64>) {
    let lw = laplacian(w, exec);
    let r: Vec<f64> = rhs.iter().zip(lw.values()).map(|(b, a)| b - a).collect();
    let m = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (m, r)
}

/// Solves `Δ_h w = rhs` with homogeneous Neumann walls and gauge
/// `mean(w) = 0`.
///
/// `rhs` must have discrete mean within [`COMPATIBILITY_TOL`] of zero; that
/// residual mean is removed before solving, and the residual tolerance
/// applies to the projected right-hand side.
pub fn solve_neumann_poisson(rhs: &ScalarField2D, cfg: &SolverConfig) -> Result<ScalarField2D> {
    let mean = rhs.mean();
    if mean.abs() > COMPATIBILITY_TOL || mean.is_nan() {
        return Err(Error::IncompatibleRhs { mean });
    }
    let lat = rhs.lattice();
    let projected: Vec<f64> = rhs.values().iter().map(|v| v - mean).collect();
    let solver = SpectralSolver::new(lat, cfg.execution);

    let mut w = ScalarField2D::from_parts(lat, solver.solve(&projected));
    let (mut residual, mut r) = max_residual(&w, &projected, cfg.execution);
    let mut iterations = 0;
    while residual > cfg.tol && iterations < cfg.max_iter {
        let r_mean = lat.mean(&r);
        r.iter_mut().for_each(|v| *v -= r_mean);
        let dw = solver.solve(&r);
        let vals = w.values().iter().zip(&dw).map(|(a, b)| a + b).collect();
        w = ScalarField2D::from_parts(lat, vals);
        (residual, r) = max_residual(&w, &projected, cfg.execution);
        iterations += 1;
    }
    if residual > cfg.tol || residual.is_nan() {
        return Err(Error::SolverDiverged {
            residual,
            tol: cfg.tol,
            iterations,
        });
    }
    let gauge = w.mean();
    Ok(w.map(|v| v - gauge))
}

/// Curl-free velocity `u = ∇_h w` with `Δ_h w = 1/f0 − 1/f1`.
pub fn velocity_from_monitor(pair: &MonitorPair, cfg: &SolverConfig) -> Result<VectorField2D> {
    let w = solve_neumann_poisson(&pair.divergence_source(), cfg)?;
    Ok(gradient(&w, cfg.execution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let rhs = ScalarField2D::constant(9, 7, 0.0).unwrap();
        let w = solve_neumann_poisson(&rhs, &cfg()).unwrap();
        assert!(w.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_rhs_is_incompatible() {
        let rhs = ScalarField2D::constant(9, 9, 1.0).unwrap();
        assert!(matches!(
            solve_neumann_poisson(&rhs, &cfg()),
            Err(Error::IncompatibleRhs { .. })
        ));
    }

    #[test]
    fn residual_and_gauge_on_rectangular_lattice() {
        let rhs =
            ScalarField2D::from_fn(23, 14, |x, y| (3.0 * x).sin() * (2.0 * y).cos() + x * x - y)
                .unwrap();
        let m = rhs.mean();
        let rhs = rhs.map(|v| v - m);
        let w = solve_neumann_poisson(&rhs, &cfg()).unwrap();
        assert!(w.mean().abs() < 1e-14);
        let lw = laplacian(&w, Execution::Sequential);
        for (a, b) in lw.values().iter().zip(rhs.values()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn manufactured_cosine_is_second_order() {
        let mut errors = Vec::new();
        for n in [17, 33, 65] {
            let rhs = ScalarField2D::from_fn(n, n, |x, y| {
                -2.0 * PI * PI * (PI * x).cos() * (PI * y).cos()
            })
            .unwrap();
            let w = solve_neumann_poisson(&rhs, &cfg()).unwrap();
            let exact =
                ScalarField2D::from_fn(n, n, |x, y| (PI * x).cos() * (PI * y).cos()).unwrap();
            let shift = exact.mean();
            let err = w
                .values()
                .iter()
                .zip(exact.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - (b - shift)).abs()));
            errors.push(err);
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let rhs = ScalarField2D::from_fn(31, 17, |x, y| (5.0 * x * y).sin() - 0.3 * x).unwrap();
        let m = rhs.mean();
        let rhs = rhs.map(|v| v - m);
        let a = solve_neumann_poisson(
            &rhs,
            &SolverConfig {
                execution: Execution::Sequential,
                ..cfg()
            },
        )
        .unwrap();
        let b = solve_neumann_poisson(
            &rhs,
            &SolverConfig {
                execution: Execution::Parallel,
                ..cfg()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tight_budget_reports_divergence() {
        let rhs =
            ScalarField2D::from_fn(33, 33, |x, y| (PI * x).cos() * (2.0 * PI * y).cos()).unwrap();
        let err = solve_neumann_poisson(
            &rhs,
            &SolverConfig {
                tol: 1e-30,
                max_iter: 2,
                ..cfg()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SolverDiverged { iterations: 2, .. }));
    }

    #[test]
    fn gradient_normal_component_vanishes_on_walls() {
        let w = ScalarField2D::from_fn(11, 9, |x, y| x * x * x + (y * 4.0).sin()).unwrap();
        let u = gradient(&w, Execution::Sequential);
        let lat = u.lattice();
        for j in 0..lat.ny {
            for i in 0..lat.nx {
                let (ux, uy) = u.get(i, j);
                if i == 0 || i == lat.nx - 1 {
                    assert_eq!(ux.to_bits(), 0.0f64.to_bits());
                }
                if j == 0 || j == lat.ny - 1 {
                    assert_eq!(uy.to_bits(), 0.0f64.to_bits());
                }
            }
        }
    }
}
