//! Dirichlet boxes, the Peierls discretisation of the two-dimensional
//! magnetic Schroedinger operator and spectra of the three-dimensional box.
//!
//! Conventions: the box is `(-L/2, L/2)^dim` with `n` interior points per
//! axis, spacing `h = L/(n+1)`, and the vector potential is the symmetric
//! gauge `a(x) = (-x2, x1)/2`. Lattice points are numbered `i + n j`.

use crate::linalg::{self, CMat, Eigensystem};
use crate::{Complex64, Error, Result};
use faer::Mat;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};

/// Residual tolerance on every returned eigenpair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    l: f64,
    n: usize,
    dim: usize,
}

impl BoxGrid {
    pub fn new(l: f64, n: usize, dim: usize) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::domain(format!("box side must be positive, got {l}")));
        }
        if n < 2 {
            return Err(Error::domain(format!("need at least 2 interior points per axis, got {n}")));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::domain(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        Ok(BoxGrid { l, n, dim })
    }

    /// Grid of side `l` whose spacing is `h` (so `l/h - 1` must be a
    /// positive integer up to rounding).
    pub fn with_spacing(l: f64, h: f64, dim: usize) -> Result<Self> {
        let cells = l / h;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-9 * cells {
            return Err(Error::domain(format!("side {l} is not a multiple of spacing {h}")));
        }
        Self::new(l, rounded as usize - 1, dim)
    }

    pub fn side(&self) -> f64 {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.l / (self.n + 1) as f64
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h^dim`, the volume element.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.l.powi(self.dim as i32)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.l + (i + 1) as f64 * self.spacing()
    }

    /// First two coordinates of point `p` (the second is 0 in one dimension).
    pub fn point(&self, p: usize) -> [f64; 2] {
        let i = p % self.n;
        let j = (p / self.n) % self.n;
        [self.coord(i), if self.dim >= 2 { self.coord(j) } else { 0.0 }]
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|p| self.point(p)).collect()
    }

    /// Nearest-neighbour pairs `(p, q)` with `p < q`.
    pub fn links(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for p in 0..self.len() {
            let mut stride = 1;
            for _ in 0..self.dim {
                let coord = (p / stride) % n;
                if coord + 1 < n {
                    out.push((p, p + stride));
                }
                stride *= n;
            }
        }
        out
    }
}

/// `phi(x, y) = (x2 y1 - x1 y2) / 2`.
pub fn phase(x: [f64; 2], y: [f64; 2]) -> f64 {
    0.5 * (x[1] * y[0] - x[0] * y[1])
}

/// A Hermitian lattice operator together with its grid and field.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: BoxGrid,
    omega: f64,
    matrix: CMat,
}

impl Hamiltonian {
    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    /// Derivative of the matrix with respect to the field strength.
    pub fn field_derivative(&self) -> CMat {
        let pts = self.grid.points();
        let m = &self.matrix;
        Mat::from_fn(m.nrows(), m.ncols(), |p, q| {
            if p == q {
                Complex64::new(0.0, 0.0)
            } else {
                m[(p, q)] * Complex64::new(0.0, phase(pts[p], pts[q]))
            }
        })
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for j in 0..m.ncols() {
            for i in 0..=j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// Peierls discretisation of `(1/2)(-i grad - omega a)^2` with Dirichlet
/// conditions on a two-dimensional grid.
pub fn build_magnetic_hamiltonian_2d(grid: &BoxGrid, omega: f64) -> Result<Hamiltonian> {
    if grid.dim() != 2 {
        return Err(Error::domain(format!("magnetic operator needs a 2D grid, got dim {}", grid.dim())));
    }
    if !omega.is_finite() {
        return Err(Error::domain("field strength must be finite"));
    }
    Ok(lattice_operator(grid, omega))
}

/// The free Dirichlet Laplacian `-(1/2) Delta_h` on a grid of any dimension.
pub fn build_free_hamiltonian(grid: &BoxGrid) -> Hamiltonian {
    lattice_operator(grid, 0.0)
}

fn lattice_operator(grid: &BoxGrid, omega: f64) -> Hamiltonian {
    let n = grid.len();
    let h2 = grid.spacing().powi(2);
    let mut m = linalg::zeros(n);
    let diag = grid.dim() as f64 / h2;
    for p in 0..n {
        m[(p, p)] = Complex64::new(diag, 0.0);
    }
    let pts = grid.points();
    for (p, q) in grid.links() {
        let hop = -Complex64::from_polar(1.0, omega * phase(pts[p], pts[q])) / (2.0 * h2);
        m[(p, q)] = hop;
        m[(q, p)] = hop.conj();
    }
    Hamiltonian { grid: *grid, omega, matrix: m }
}

/// Sorted one-particle energies of a box of side `l` in `dim` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub side: f64,
    pub dim: usize,
    pub omega: f64,
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn ground(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["index", "eigenvalue"])?;
        for (i, e) in self.eigenvalues.iter().enumerate() {
            wr.write_record([i.to_string(), format!("{e:?}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads the eigenvalue column back; metadata is supplied by the caller.
    pub fn read_csv<R: Read>(r: R, side: f64, dim: usize, omega: f64) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut eigenvalues = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let v: f64 = rec
                .get(1)
                .ok_or_else(|| Error::Config("missing eigenvalue column".into()))?
                .parse()
                .map_err(|e| Error::Config(format!("bad eigenvalue: {e}")))?;
            eigenvalues.push(v);
        }
        Ok(Spectrum { side, dim, omega, eigenvalues })
    }
}

/// Full eigendecomposition, rejecting it if any pair has a residual above
/// [`EIGEN_RESIDUAL_TOL`].
pub fn eigen_decompose(h: &Hamiltonian) -> Result<Eigensystem> {
    let es = linalg::eigh(h.matrix().as_ref())?;
    let res = es.max_residual(h.matrix().as_ref());
    if res > EIGEN_RESIDUAL_TOL {
        return Err(Error::numerical("eigen_spectrum", format!("eigenpair residual {res:.3e} exceeds {EIGEN_RESIDUAL_TOL:.0e}")));
    }
    Ok(es)
}

/// The lowest `count` eigenvalues (all when `None`) with residual check.
pub fn eigen_spectrum(h: &Hamiltonian, count: Option<usize>) -> Result<Spectrum> {
    let mut values = if h.grid().len() == 0 { Vec::new() } else { eigen_decompose(h)?.values };
    if let Some(c) = count {
        values.truncate(c);
    }
    Ok(Spectrum { side: h.grid().side(), dim: h.grid().dim(), omega: h.omega(), eigenvalues: values })
}

/// All eigenvalues without eigenvectors; used inside parameter sweeps.
pub fn eigenvalues(h: &Hamiltonian) -> Result<Spectrum> {
    let values = linalg::eigvalsh(h.matrix().as_ref())?;
    Ok(Spectrum { side: h.grid().side(), dim: h.grid().dim(), omega: h.omega(), eigenvalues: values })
}

/// Exact Dirichlet levels `pi^2 k^2 / (2 L^2)`, `k = 1..=kmax`, of the free
/// axis parallel to the field.
pub fn third_axis_levels(l: f64, kmax: usize) -> Vec<f64> {
    (1..=kmax).map(|k| PI * PI * (k * k) as f64 / (2.0 * l * l)).collect()
}

/// Smallest `kmax` whose neglected Boltzmann weight on the free axis is
/// below `rel_tol` times the kept weight.
pub fn third_axis_cutoff(l: f64, beta: f64, rel_tol: f64) -> usize {
    let a = beta * PI * PI / (2.0 * l * l);
    let mut kept = 0.0;
    let mut k = 1usize;
    loop {
        kept += (-a * (k * k) as f64).exp();
        // Tail after k bounded by a geometric series in the ratio at k+1.
        let next = (-a * ((k + 1) * (k + 1)) as f64).exp();
        let ratio = (-a * (2 * k + 3) as f64).exp();
        if next / (1.0 - ratio) <= rel_tol * kept || k > 1_000_000 {
            return k;
        }
        k += 1;
    }
}

/// Relative Boltzmann weight of the free-axis levels beyond `kmax`.
pub fn third_axis_tail(l: f64, beta: f64, kmax: usize) -> f64 {
    let a = beta * PI * PI / (2.0 * l * l);
    let kept: f64 = (1..=kmax).map(|k| (-a * (k * k) as f64).exp()).sum();
    let mut tail = 0.0;
    let mut k = kmax + 1;
    loop {
        let t = (-a * (k * k) as f64).exp();
        tail += t;
        if t < 1e-20 * (kept + tail) {
            break;
        }
        k += 1;
    }
    tail / kept
}

/// Combines cross-section levels with the free-axis levels into the sorted
/// spectrum of the three-dimensional box.
pub fn assemble_3d_spectrum(cross: &Spectrum, kmax: usize) -> Result<Spectrum> {
    if cross.dim != 2 {
        return Err(Error::domain("cross-section spectrum must be two-dimensional"));
    }
    if kmax == 0 {
        return Err(Error::domain("need at least one free-axis level"));
    }
    let axis = third_axis_levels(cross.side, kmax);
    let mut values = Vec::with_capacity(cross.eigenvalues.len() * kmax);
    for e in &cross.eigenvalues {
        for t in &axis {
            values.push(e + t);
        }
    }
    values.sort_by(f64::total_cmp);
    Ok(Spectrum { side: cross.side, dim: 3, omega: cross.omega, eigenvalues: values })
}
