//! Transport of lattice nodes along `∂φ/∂t = f(φ, t) u(φ)`.
//!
//! Starting from the identity map, each node is advanced independently with
//! fixed-step classical RK4. The monitor is sampled by interpolating `1/f`
//! bilinearly, the velocity by plain bilinear interpolation. Nodes on a
//! wall keep their normal coordinate, so the unit square maps onto itself.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{Lattice, ScalarField2D, VectorField2D};
use crate::monitor::MonitorPair;

/// Node positions of a deformed structured grid, `φ(ξ)` sampled on the
/// reference lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    lattice: Lattice,
    px: Vec<f64>,
    py: Vec<f64>,
    /// Time steps taken to produce this grid (0 for constructed grids).
    pub steps: usize,
    /// Integrator name, empty for constructed grids.
    pub scheme: String,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, px: Vec<f64>, py: Vec<f64>) -> Result<Self> {
        let lattice = Lattice::new(nx, ny)?;
        for c in [&px, &py] {
            if c.len() != lattice.len() {
                return Err(Error::SampleCount {
                    expected: lattice.len(),
                    actual: c.len(),
                });
            }
        }
        if px.iter().chain(&py).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        if px.iter().chain(&py).any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter(
                "grid coordinates must lie in [0, 1]".into(),
            ));
        }
        Ok(Grid2D {
            lattice,
            px,
            py,
            steps: 0,
            scheme: String::new(),
        })
    }

    pub fn identity(lattice: Lattice) -> Self {
        let mut px = Vec::with_capacity(lattice.len());
        let mut py = Vec::with_capacity(lattice.len());
        for j in 0..lattice.ny {
            for i in 0..lattice.nx {
                let (x, y) = lattice.node(i, j);
                px.push(x);
                py.push(y);
            }
        }
        Grid2D {
            lattice,
            px,
            py,
            steps: 0,
            scheme: String::new(),
        }
    }

    /// Grid whose node `(i, j)` sits at `map(ξ, η)`.
    pub fn from_map(nx: usize, ny: usize, map: impl Fn(f64, f64) -> (f64, f64)) -> Result<Self> {
        let id = Self::identity(Lattice::new(nx, ny)?);
        let (px, py) = id.px.iter().zip(&id.py).map(|(&x, &y)| map(x, y)).unzip();
        Self::new(nx, ny, px, py)
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }
    #[inline]
    pub fn nx(&self) -> usize {
        self.lattice.nx
    }
    #[inline]
    pub fn ny(&self) -> usize {
        self.lattice.ny
    }
    #[inline]
    pub fn px(&self) -> &[f64] {
        &self.px
    }
    #[inline]
    pub fn py(&self) -> &[f64] {
        &self.py
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        let k = self.lattice.idx(i, j);
        (self.px[k], self.py[k])
    }

    /// Largest Euclidean distance of a node from its reference position.
    pub fn max_displacement(&self) -> f64 {
        let id = Grid2D::identity(self.lattice);
        (0..self.lattice.len())
            .map(|k| (self.px[k] - id.px[k]).hypot(self.py[k] - id.py[k]))
            .fold(0.0, f64::max)
    }

    /// Derivatives of one coordinate array with respect to `(ξ, η)` at
    /// node `(i, j)`: central inside, one-sided on the boundary.
    pub(crate) fn partials(&self, c: &[f64], i: usize, j: usize) -> (f64, f64) {
        let lat = self.lattice;
        let (hx, hy) = lat.spacing();
        let d = |lo: usize, hi: usize, h: f64, along_x: bool| {
            let (a, b) = if along_x {
                (c[lat.idx(lo, j)], c[lat.idx(hi, j)])
            } else {
                (c[lat.idx(i, lo)], c[lat.idx(i, hi)])
            };
            (b - a) / ((hi - lo) as f64 * h)
        };
        let dxi = match i {
            0 => d(0, 1, hx, true),
            _ if i == lat.nx - 1 => d(i - 1, i, hx, true),
            _ => d(i - 1, i + 1, hx, true),
        };
        let deta = match j {
            0 => d(0, 1, hy, false),
            _ if j == lat.ny - 1 => d(j - 1, j, hy, false),
            _ => d(j - 1, j + 1, hy, false),
        };
        (dxi, deta)
    }

    /// Discrete Jacobian determinant `xξ·yη − xη·yξ` at every node.
    pub fn jacobian(&self) -> ScalarField2D {
        let lat = self.lattice;
        let mut out = vec![0.0; lat.len()];
        for j in 0..lat.ny {
            for i in 0..lat.nx {
                let (x_xi, x_eta) = self.partials(&self.px, i, j);
                let (y_xi, y_eta) = self.partials(&self.py, i, j);
                out[lat.idx(i, j)] = x_xi * y_eta - x_eta * y_xi;
            }
        }
        ScalarField2D::from_parts(lat, out)
    }

    /// Sum of the signed areas of all deformed cells.
    pub fn total_area(&self) -> f64 {
        let lat = self.lattice;
        let mut area = 0.0;
        for j in 0..lat.ny - 1 {
            for i in 0..lat.nx - 1 {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let mut twice = 0.0;
                for k in 0..4 {
                    let (a, b) = (corners[k], corners[(k + 1) % 4]);
                    let (xa, ya) = self.get(a.0, a.1);
                    let (xb, yb) = self.get(b.0, b.1);
                    twice += xa * yb - xb * ya;
                }
                area += 0.5 * twice;
            }
        }
        area
    }
}

/// Cell containing `t ∈ [0,1]` on an axis with `n` nodes and the local
/// coordinate inside it.
#[inline]
fn locate(t: f64, n: usize) -> (usize, f64) {
    let s = t.clamp(0.0, 1.0) * (n - 1) as f64;
    let i = (s.floor() as usize).min(n - 2);
    (i, s - i as f64)
}

#[inline]
fn bilinear_with(values: &[f64], lat: Lattice, x: f64, y: f64, g: impl Fn(f64) -> f64) -> f64 {
    let (i, tx) = locate(x, lat.nx);
    let (j, ty) = locate(y, lat.ny);
    let v00 = g(values[lat.idx(i, j)]);
    let v10 = g(values[lat.idx(i + 1, j)]);
    let v01 = g(values[lat.idx(i, j + 1)]);
    let v11 = g(values[lat.idx(i + 1, j + 1)]);
    let bottom = v00 + tx * (v10 - v00);
    let top = v01 + tx * (v11 - v01);
    bottom + ty * (top - bottom)
}

#[inline]
fn bilinear(values: &[f64], lat: Lattice, x: f64, y: f64) -> f64 {
    bilinear_with(values, lat, x, y, |v| v)
}

/// Off-lattice evaluation by bilinear interpolation over the containing
/// cell. Points outside `[0,1]²` are clamped onto it.
pub trait Sample {
    type Output;
    fn sample(&self, x: f64, y: f64) -> Self::Output;
}

impl Sample for ScalarField2D {
    type Output = f64;
    fn sample(&self, x: f64, y: f64) -> f64 {
        bilinear(self.values(), self.lattice(), x, y)
    }
}

impl Sample for VectorField2D {
    type Output = (f64, f64);
    fn sample(&self, x: f64, y: f64) -> (f64, f64) {
        let lat = self.lattice();
        (
            bilinear(self.ux(), lat, x, y),
            bilinear(self.uy(), lat, x, y),
        )
    }
}

/// Samples a monitor by interpolating `1/f` and taking the reciprocal.
pub fn sample_monitor(monitor: &ScalarField2D, x: f64, y: f64) -> f64 {
    1.0 / bilinear_with(monitor.values(), monitor.lattice(), x, y, f64::recip)
}

/// Right-hand side `f(p, t) u(p)` with the reciprocal monitors cached.
struct TransportField<'a> {
    lattice: Lattice,
    inv_f0: Vec<f64>,
    inv_f1: Vec<f64>,
    u: &'a VectorField2D,
}

impl TransportField<'_> {
    #[inline]
    fn eval(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let lat = self.lattice;
        let (i, tx) = locate(x, lat.nx);
        let (j, ty) = locate(y, lat.ny);
        let k = lat.idx(i, j);
        let corners = [k, k + 1, k + lat.nx, k + lat.nx + 1];
        let weights = [
            (1.0 - tx) * (1.0 - ty),
            tx * (1.0 - ty),
            (1.0 - tx) * ty,
            tx * ty,
        ];
        let blend =
            |v: &[f64]| -> f64 { corners.iter().zip(&weights).map(|(&c, &w)| w * v[c]).sum() };
        let g0 = blend(&self.inv_f0);
        let g1 = blend(&self.inv_f1);
        let f = 1.0 / ((1.0 - t) * g0 + t * g1);
        (f * blend(self.u.ux()), f * blend(self.u.uy()))
    }
}

/// Which coordinates of a node are pinned to a wall.
#[derive(Clone, Copy)]
struct Walls {
    x: Option<f64>,
    y: Option<f64>,
}

impl Walls {
    fn of(lat: Lattice, i: usize, j: usize) -> Self {
        let (x0, y0) = lat.node(i, j);
        Walls {
            x: (i == 0 || i == lat.nx - 1).then_some(x0),
            y: (j == 0 || j == lat.ny - 1).then_some(y0),
        }
    }

    #[inline]
    fn project(self, x: f64, y: f64) -> (f64, f64) {
        (
            self.x.unwrap_or(x.clamp(0.0, 1.0)),
            self.y.unwrap_or(y.clamp(0.0, 1.0)),
        )
    }

    #[inline]
    fn tangential(self, (vx, vy): (f64, f64)) -> (f64, f64) {
        (
            if self.x.is_some() { 0.0 } else { vx },
            if self.y.is_some() { 0.0 } else { vy },
        )
    }
}

/// Classical RK4 from `t = 0` to `t = 1` in `steps` equal steps, with every
/// stage and step projected back onto the square and the node's walls.
fn rk4_path(
    start: (f64, f64),
    walls: Walls,
    steps: usize,
    velocity: impl Fn(f64, f64, f64) -> (f64, f64),
) -> (f64, f64) {
    let dt = 1.0 / steps as f64;
    let rhs = |x: f64, y: f64, t: f64| walls.tangential(velocity(x, y, t));
    let (mut x, mut y) = start;
    for n in 0..steps {
        let t = n as f64 * dt;
        let k1 = rhs(x, y, t);
        let (x2, y2) = walls.project(x + 0.5 * dt * k1.0, y + 0.5 * dt * k1.1);
        let k2 = rhs(x2, y2, t + 0.5 * dt);
        let (x3, y3) = walls.project(x + 0.5 * dt * k2.0, y + 0.5 * dt * k2.1);
        let k3 = rhs(x3, y3, t + 0.5 * dt);
        let (x4, y4) = walls.project(x + dt * k3.0, y + dt * k3.1);
        let k4 = rhs(x4, y4, t + dt);
        (x, y) = walls.project(
            x + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            y + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
    }
    (x, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformConfig {
    pub steps: usize,
    pub execution: Execution,
}

impl Default for DeformConfig {
    fn default() -> Self {
        DeformConfig {
            steps: 100,
            execution: Execution::default(),
        }
    }
}

/// Integrates every node from `t = 0` to `t = 1` and returns `φ(·, 1)`.
///
/// Fails with [`Error::FoldDetected`] (carrying the grid) when the discrete
/// Jacobian is non-positive at any interior node.
pub fn integrate_deformation(
    pair: &MonitorPair,
    u: &VectorField2D,
    cfg: &DeformConfig,
) -> Result<Grid2D> {
    if cfg.steps == 0 {
        return Err(Error::InvalidSteps);
    }
    let lat = pair.f0().lattice();
    pair.f1().check_same_lattice(lat)?;
    if u.lattice() != lat {
        return Err(Error::LatticeMismatch {
            left: (lat.nx, lat.ny),
            right: (u.nx(), u.ny()),
        });
    }
    let field = TransportField {
        lattice: lat,
        inv_f0: pair.f0().recip().into_values(),
        inv_f1: pair.f1().recip().into_values(),
        u,
    };

    let positions = cfg.execution.map_collect(lat.len(), |k| {
        let (i, j) = (k % lat.nx, k / lat.nx);
        rk4_path(
            lat.node(i, j),
            Walls::of(lat, i, j),
            cfg.steps,
            |x, y, t| field.eval(x, y, t),
        )
    });
    let (px, py) = positions.into_iter().unzip();
    let grid = Grid2D {
        lattice: lat,
        px,
        py,
        steps: cfg.steps,
        scheme: "rk4".into(),
    };
    check_fold_free(grid)
}

fn check_fold_free(grid: Grid2D) -> Result<Grid2D> {
    let lat = grid.lattice;
    let jac = grid.jacobian();
    let mut worst: Option<(usize, f64)> = None;
    for j in 1..lat.ny - 1 {
        for i in 1..lat.nx - 1 {
            let k = lat.idx(i, j);
            let v = jac.values()[k];
            if (v <= 0.0 || v.is_nan()) && worst.is_none_or(|(_, w)| v < w || v.is_nan()) {
                worst = Some((k, v));
            }
        }
    }
    match worst {
        Some((index, min_jacobian)) => Err(Error::FoldDetected {
            min_jacobian,
            index,
            grid: Box::new(grid),
        }),
        None => Ok(grid),
    }
}
