//! Numerical laboratory for integral kernels of the Gibbs semigroup of the
//! two-dimensional magnetic operator: magnetic phases and fluxes, heat and
//! resolvent kernels, gauge regularisation, Duhamel correction kernels,
//! simplex integrals and the resulting perturbative expansions in the field.
//!
//! Kernels live on the lattice of a [`BoxGrid`]. A [`GridKernel`] stores
//! kernel values `K(x_i, x_j)`; the matrix of the corresponding operator is
//! `h^d K`, which is what the internal algebra works with.

mod duhamel;
mod expansion;
mod jet;
mod moments;

pub use duhamel::{correction_kernel, simplex_integral, simplex_integrals, CorrectionKind, SimplexRule};
pub use expansion::{
    g_expansion_trace, g_expansion_trace_from, identity_residual, remainder_slope, semigroup_expansion, semigroup_expansion_from,
    trace_coefficients, trace_derivatives, DuhamelTerms, ExpansionOptions, ExpansionReport, LabPoint, RemainderSample, Smallness, TraceCrossCheck,
};
pub use jet::Jet;
pub use moments::{flux_moment, flux_moment_scaling, FactorKind, MomentScaling};

use crate::linalg::{self, CMat, Eigensystem};
use crate::spectrum::{self, BoxGrid, Hamiltonian};
use crate::{Complex64, Error, Result};
use faer::Mat;
use std::f64::consts::PI;

pub use crate::spectrum::phase as magnetic_phase;

/// Flux of the closed polygon `base -> chain[0] -> ... -> chain[k-1] -> base`,
/// i.e. the sum of the phases along its edges.
pub fn flux_chain(base: [f64; 2], chain: &[[f64; 2]]) -> f64 {
    let mut prev = base;
    let mut total = 0.0;
    for &y in chain {
        total += magnetic_phase(prev, y);
        prev = y;
    }
    total + magnetic_phase(prev, base)
}

/// Flux through the triangle `(x, y, x2)`.
pub fn triangle_flux(x: [f64; 2], y: [f64; 2], x2: [f64; 2]) -> f64 {
    magnetic_phase(x, y) + magnetic_phase(y, x2) + magnetic_phase(x2, x)
}

/// Kernel values on the lattice of `grid`.
#[derive(Debug, Clone)]
pub struct GridKernel {
    grid: BoxGrid,
    values: CMat,
}

impl GridKernel {
    pub fn from_values(grid: BoxGrid, values: CMat) -> Result<Self> {
        if values.nrows() != grid.len() || values.ncols() != grid.len() {
            return Err(Error::domain("kernel shape does not match the grid"));
        }
        Ok(GridKernel { grid, values })
    }

    /// Kernel of the operator whose matrix is `op`.
    pub fn from_operator(grid: BoxGrid, op: CMat) -> Self {
        let s = Complex64::new(1.0 / grid.cell_volume(), 0.0);
        GridKernel { grid, values: linalg::scale(op.as_ref(), s) }
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &CMat {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[(i, j)]
    }

    /// Matrix of the operator, `h^d K`.
    pub fn operator(&self) -> CMat {
        linalg::scale(self.values.as_ref(), Complex64::new(self.grid.cell_volume(), 0.0))
    }

    pub fn compose(&self, other: &GridKernel) -> GridKernel {
        let prod = &self.values * &other.values;
        GridKernel { grid: self.grid, values: linalg::scale(prod.as_ref(), Complex64::new(self.grid.cell_volume(), 0.0)) }
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(self.values.as_ref()) * self.grid.cell_volume()
    }

    pub fn op_norm(&self) -> Result<f64> {
        linalg::op_norm(self.operator().as_ref())
    }

    pub fn trace_norm(&self) -> Result<f64> {
        linalg::trace_norm(self.operator().as_ref())
    }
}

/// Lattice Hamiltonian for the lab: magnetic in two dimensions, free otherwise.
fn lab_hamiltonian(grid: &BoxGrid, omega: f64) -> Result<Hamiltonian> {
    match grid.dim() {
        2 => spectrum::build_magnetic_hamiltonian_2d(grid, omega),
        _ if omega == 0.0 => Ok(spectrum::build_free_hamiltonian(grid)),
        d => Err(Error::Unsupported(format!("a field in dimension {d}"))),
    }
}

/// Kernel of `exp(-beta H_omega)`.
pub fn heat_kernel_grid(grid: &BoxGrid, beta: f64, omega: f64) -> Result<GridKernel> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta must be positive, got {beta}")));
    }
    let es = spectrum::eigen_decompose(&lab_hamiltonian(grid, omega)?)?;
    Ok(GridKernel::from_operator(*grid, es.apply_fn(|e| Complex64::new((-beta * e).exp(), 0.0))))
}

/// Kernel of the free whole-space heat semigroup, `(2 pi beta)^(-d/2) exp(-|x-y|^2 / (2 beta))`.
pub fn free_heat_kernel(dim: usize, beta: f64, x: [f64; 2], y: [f64; 2]) -> f64 {
    let r2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    (2.0 * PI * beta).powf(-(dim as f64) / 2.0) * (-r2 / (2.0 * beta)).exp()
}

/// `sqrt(sup_x sum_y |K(x,y)| h^d * sup_y sum_x |K(x,y)| h^d)`, an upper
/// bound on the operator norm.
pub fn schur_holmgren_norm(k: &GridKernel) -> f64 {
    let v = k.values();
    let dv = k.grid().cell_volume();
    let n = v.nrows();
    let mut rows = vec![0.0; n];
    let mut cols = vec![0.0; n];
    for j in 0..n {
        for i in 0..n {
            let a = v[(i, j)].norm();
            rows[i] += a;
            cols[j] += a;
        }
    }
    let r = rows.into_iter().fold(0.0, f64::max);
    let c = cols.into_iter().fold(0.0, f64::max);
    (r * c).sqrt() * dv
}

/// Kernel of `g = (xi - z W)^-1 z W` with `W = exp(-beta H_omega)`.
pub fn g_kernel(grid: &BoxGrid, beta: f64, omega: f64, xi: Complex64, z: Complex64) -> Result<GridKernel> {
    let es = spectrum::eigen_decompose(&lab_hamiltonian(grid, omega)?)?;
    Ok(GridKernel::from_operator(*grid, resolvent_op(&es, beta, xi, z)?))
}

fn resolvent_op(es: &Eigensystem, beta: f64, xi: Complex64, z: Complex64) -> Result<CMat> {
    let gap = es.values.iter().map(|e| (xi - z * (-beta * e).exp()).norm()).fold(f64::INFINITY, f64::min);
    if gap < 1e-10 * xi.norm().max(1.0) {
        return Err(Error::domain(format!("xi = {xi} lies on the spectrum of z W")));
    }
    Ok(es.apply_fn(|e| {
        let zw = z * (-beta * e).exp();
        zw / (xi - zw)
    }))
}

/// Matrix `exp(i dw phi(x_i, x_j))`.
pub fn phase_matrix(grid: &BoxGrid, dw: f64) -> CMat {
    let pts = grid.points();
    Mat::from_fn(pts.len(), pts.len(), |i, j| Complex64::from_polar(1.0, dw * magnetic_phase(pts[i], pts[j])))
}

/// Gauge regularisation `K(x, y) -> exp(i dw phi(x, y)) K(x, y)`.
pub fn regularize(k: &GridKernel, dw: f64) -> GridKernel {
    let phi = phase_matrix(k.grid(), dw);
    GridKernel { grid: *k.grid(), values: linalg::hadamard(phi.as_ref(), k.values().as_ref()) }
}

/// Largest `|G(x,y)| / G_free(x,y)` over lattice pairs, where `G_free` is
/// the whole-space free heat kernel.
pub fn diamagnetic_ratio(k: &GridKernel, beta: f64) -> f64 {
    let pts = k.grid().points();
    let dim = k.grid().dim();
    let mut worst: f64 = 0.0;
    for j in 0..pts.len() {
        for i in 0..pts.len() {
            let g0 = free_heat_kernel(dim, beta, pts[i], pts[j]);
            worst = worst.max(k.value(i, j).norm() / g0);
        }
    }
    worst
}

/// Heat semigroup at a reference field, diagonalised once.
pub struct HeatContext {
    grid: BoxGrid,
    beta: f64,
    omega0: f64,
    ham: Hamiltonian,
    eig: Eigensystem,
    points: Vec<[f64; 2]>,
    neighbours: Vec<Vec<(usize, Complex64)>>,
}

impl HeatContext {
    pub fn new(grid: BoxGrid, beta: f64, omega0: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::domain(format!("beta must be positive, got {beta}")));
        }
        let ham = lab_hamiltonian(&grid, omega0)?;
        let eig = spectrum::eigen_decompose(&ham)?;
        let h = ham.matrix();
        let mut neighbours: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); grid.len()];
        for (p, q) in grid.links() {
            neighbours[p].push((q, h[(p, q)]));
            neighbours[q].push((p, h[(q, p)]));
        }
        Ok(HeatContext { points: grid.points(), grid, beta, omega0, ham, eig, neighbours })
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn eigensystem(&self) -> &Eigensystem {
        &self.eig
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.ham
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Off-diagonal entries of each row of the reference Hamiltonian.
    pub(crate) fn neighbours(&self) -> &[Vec<(usize, Complex64)>] {
        &self.neighbours
    }

    /// Spread of the spectrum, the fastest decay rate in the semigroup.
    pub fn spectral_width(&self) -> f64 {
        let v = &self.eig.values;
        v.last().copied().unwrap_or(0.0) - v.first().copied().unwrap_or(0.0)
    }

    /// Matrix of `exp(-t H_omega0)`.
    pub fn heat(&self, t: f64) -> CMat {
        self.eig.apply_fn(|e| Complex64::new((-t * e).exp(), 0.0))
    }

    /// Matrix of `(xi - z W)^-1 z W` at the reference field.
    pub fn resolvent(&self, xi: Complex64, z: Complex64) -> Result<CMat> {
        resolvent_op(&self.eig, self.beta, xi, z)
    }

    pub fn phase(&self, dw: f64) -> CMat {
        phase_matrix(&self.grid, dw)
    }

    /// `(i phi)^q / q!` entrywise, `q = 0..=order`.
    pub fn phase_powers(&self, order: usize) -> Vec<CMat> {
        let n = self.points.len();
        let pts = &self.points;
        let mut out = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for q in 0..=order {
            if q > 0 {
                fact *= q as f64;
            }
            let iq = Complex64::i().powi(q as i32) / fact;
            out.push(Mat::from_fn(n, n, |i, j| iq * magnetic_phase(pts[i], pts[j]).powi(q as i32)));
        }
        out
    }
}
