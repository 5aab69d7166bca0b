//! Node-sampled fields on the unit square.
//!
//! A lattice of `nx × ny` nodes covers `[0,1]²` with node `(i, j)` at
//! `(i / (nx-1), j / (ny-1))`. Samples are stored row-major: index
//! `j * nx + i`, so `i` runs along x (ξ) and `j` along y (η).

use crate::error::{Error, Result};

/// Smallest admissible node count along either axis.
pub const MIN_NODES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub nx: usize,
    pub ny: usize,
}

impl Lattice {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::LatticeTooSmall { nx, ny });
        }
        Ok(Lattice { nx, ny })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Node spacing `(hx, hy)`.
    #[inline]
    pub fn spacing(&self) -> (f64, f64) {
        (1.0 / (self.nx - 1) as f64, 1.0 / (self.ny - 1) as f64)
    }

    /// Reference position of node `(i, j)`.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (
            i as f64 / (self.nx - 1) as f64,
            j as f64 / (self.ny - 1) as f64,
        )
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    #[inline]
    fn weight_x(&self, i: usize) -> f64 {
        if i == 0 || i == self.nx - 1 {
            0.5
        } else {
            1.0
        }
    }

    #[inline]
    fn weight_y(&self, j: usize) -> f64 {
        if j == 0 || j == self.ny - 1 {
            0.5
        } else {
            1.0
        }
    }

    /// Trapezoidal quadrature weight of node `(i, j)` in units of one cell
    /// area: 1 inside, 1/2 on edges, 1/4 at corners.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weight_x(i) * self.weight_y(j)
    }

    /// Sum of all node weights, i.e. the number of cells.
    #[inline]
    pub fn total_weight(&self) -> f64 {
        ((self.nx - 1) * (self.ny - 1)) as f64
    }

    /// Discrete mean of `values` over the unit square: the trapezoidal
    /// approximation of `∫ v dx` with `|Ω| = 1`.
    pub fn mean(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let mut sum = 0.0;
        for j in 0..self.ny {
            let row = &values[j * self.nx..(j + 1) * self.nx];
            let row_sum: f64 = row
                .iter()
                .enumerate()
                .map(|(i, v)| self.weight_x(i) * v)
                .sum();
            sum += self.weight_y(j) * row_sum;
        }
        sum / self.total_weight()
    }
}

/// Real samples on a node lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    lattice: Lattice,
    values: Vec<f64>,
}

impl ScalarField2D {
    pub fn new(nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        let lattice = Lattice::new(nx, ny)?;
        if values.len() != lattice.len() {
            return Err(Error::SampleCount {
                expected: lattice.len(),
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(ScalarField2D { lattice, values })
    }

    pub fn constant(nx: usize, ny: usize, value: f64) -> Result<Self> {
        Self::new(nx, ny, vec![value; nx * ny])
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let lattice = Lattice::new(nx, ny)?;
        let mut values = Vec::with_capacity(lattice.len());
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = lattice.node(i, j);
                values.push(f(x, y));
            }
        }
        Self::new(nx, ny, values)
    }

    pub(crate) fn from_parts(lattice: Lattice, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), lattice.len());
        ScalarField2D { lattice, values }
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
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.lattice.idx(i, j)]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.lattice.mean(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField2D {
        ScalarField2D::from_parts(self.lattice, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise reciprocal.
    pub fn recip(&self) -> ScalarField2D {
        self.map(f64::recip)
    }

    pub(crate) fn check_same_lattice(&self, other: Lattice) -> Result<()> {
        if self.lattice != other {
            return Err(Error::LatticeMismatch {
                left: (self.nx(), self.ny()),
                right: (other.nx, other.ny),
            });
        }
        Ok(())
    }
}

/// Two-component samples on a node lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2D {
    lattice: Lattice,
    ux: Vec<f64>,
    uy: Vec<f64>,
}

impl VectorField2D {
    pub fn new(nx: usize, ny: usize, ux: Vec<f64>, uy: Vec<f64>) -> Result<Self> {
        let lattice = Lattice::new(nx, ny)?;
        for c in [&ux, &uy] {
            if c.len() != lattice.len() {
                return Err(Error::SampleCount {
                    expected: lattice.len(),
                    actual: c.len(),
                });
            }
        }
        if ux.iter().chain(&uy).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(VectorField2D { lattice, ux, uy })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        VectorField2D {
            lattice,
            ux: vec![0.0; lattice.len()],
            uy: vec![0.0; lattice.len()],
        }
    }

    pub(crate) fn from_parts(lattice: Lattice, ux: Vec<f64>, uy: Vec<f64>) -> Self {
        VectorField2D { lattice, ux, uy }
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
    pub fn ux(&self) -> &[f64] {
        &self.ux
    }
    #[inline]
    pub fn uy(&self) -> &[f64] {
        &self.uy
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        let k = self.lattice.idx(i, j);
        (self.ux[k], self.uy[k])
    }

    pub fn max_norm(&self) -> f64 {
        self.ux
            .iter()
            .zip(&self.uy)
            .fold(0.0, |m, (x, y)| m.max(x.hypot(*y)))
    }

    pub fn scale(&self, c: f64) -> VectorField2D {
        VectorField2D::from_parts(
            self.lattice,
            self.ux.iter().map(|v| c * v).collect(),
            self.uy.iter().map(|v| c * v).collect(),
        )
    }

    /// Central-difference curl `∂uy/∂x − ∂ux/∂y` at interior nodes; zero on
    /// the boundary.
    pub fn curl(&self) -> ScalarField2D {
        let lat = self.lattice;
        let (hx, hy) = lat.spacing();
        let mut out = vec![0.0; lat.len()];
        for j in 1..lat.ny - 1 {
            for i in 1..lat.nx - 1 {
                let dvy_dx = (self.uy[lat.idx(i + 1, j)] - self.uy[lat.idx(i - 1, j)]) / (2.0 * hx);
                let dvx_dy = (self.ux[lat.idx(i, j + 1)] - self.ux[lat.idx(i, j - 1)]) / (2.0 * hy);
                out[lat.idx(i, j)] = dvy_dx - dvx_dy;
            }
        }
        ScalarField2D::from_parts(lat, out)
    }
}
