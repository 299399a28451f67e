//! Grand-canonical pressure of the gas confined to a cube `(-L/2, L/2)^3`
//! with the field along the third axis, by eigenvalue sums and by contour
//! integrals of the resolvent, and its field derivatives.

use crate::bulk::ThermoParams;
use crate::linalg;
use crate::numdiff::{richardson_sweep, Derivative};
use crate::spectrum::{self, assemble_3d_spectrum, BoxGrid, Spectrum};
use crate::{Complex64, Error, Result, Statistics};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

/// Default minimum distance of the contour from the spectrum and the cut.
pub const CONTOUR_MARGIN: f64 = 1e-3;
/// Default number of trapezoidal nodes on the contour.
pub const CONTOUR_NODES: usize = 256;

/// A finite sample of fugacities standing in for a compact set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FugacityCompact {
    samples: Vec<Complex64>,
}

impl FugacityCompact {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("fugacity set is empty"));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("fugacity samples must be finite"));
        }
        Ok(FugacityCompact { samples })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Checks that every sample stays `margin` away from the cut of the
    /// gas with lowest level `e0`.
    pub fn check_domain(&self, stats: Statistics, beta: f64, e0: f64, margin: f64) -> Result<()> {
        for z in &self.samples {
            let zeta = z * (-beta * e0).exp();
            if stats.distance_to_cut(zeta) < margin {
                return Err(Error::domain(format!("fugacity {z} is within {margin:.1e} of the {} cut", stats.name())));
            }
        }
        Ok(())
    }
}

/// Trapezoidal discretisation of a closed curve: `sum_k weights[k] f(nodes[k])`
/// approximates `(2 pi i)^-1` times the contour integral of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub radius: f64,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

impl Contour {
    /// Circle `|xi| = radius` with `n` equally spaced nodes.
    pub fn circle(radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) || n < 4 {
            return Err(Error::Contour(format!("invalid circle: radius {radius}, {n} nodes")));
        }
        let nodes: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / n as f64)).collect();
        // d xi / (2 pi i) = xi d theta / (2 pi)
        let weights = nodes.iter().map(|xi| xi / n as f64).collect();
        Ok(Contour { radius, nodes, weights })
    }
}

/// Circle separating the spectrum of `z W` (contained in the disc of radius
/// `max|z| e^(-beta E0)`) from the cut of `ln(1 - eps xi)` (outside the unit
/// disc). `radius = None` takes the midpoint between the two.
pub fn build_contour(k: &FugacityCompact, beta: f64, e0: f64, radius: Option<f64>, nodes: usize) -> Result<Contour> {
    let r_in = k.max_abs() * (-beta * e0).exp();
    if r_in >= 1.0 - 2.0 * CONTOUR_MARGIN {
        return Err(Error::Contour(format!(
            "spectral radius {r_in:.4} of zW is too close to the cut at 1; no circle separates them"
        )));
    }
    let r = radius.unwrap_or(0.5 * (r_in + 1.0));
    if r <= r_in + CONTOUR_MARGIN || r >= 1.0 - CONTOUR_MARGIN {
        return Err(Error::Contour(format!("radius {r} does not lie strictly between {r_in:.4} and 1")));
    }
    Contour::circle(r, nodes)
}

/// `sup_(xi on contour, z in K) ||(xi - z W)^-1||`; exact since `W` is normal.
pub fn resolvent_sup_estimate(levels: &Spectrum, beta: f64, k: &FugacityCompact, contour: &Contour) -> f64 {
    let mut worst: f64 = 0.0;
    for z in k.samples() {
        for xi in &contour.nodes {
            let gap = levels
                .eigenvalues
                .iter()
                .map(|e| (xi - z * (-beta * e).exp()).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(1.0 / gap);
        }
    }
    worst
}

/// Pressure with the smallest `|1 - eps z e^(-beta E)|` encountered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigSum {
    pub value: Complex64,
    pub min_gap: f64,
}

/// `P = -eps / (beta V) sum_j ln(1 - eps z e^(-beta E_j))`.
pub fn pressure_eigsum(levels: &Spectrum, p: &ThermoParams) -> Result<EigSum> {
    let eps = p.stats.sign();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut min_gap = f64::INFINITY;
    for e in &levels.eigenvalues {
        let arg = 1.0 - eps * p.z * (-p.beta * e).exp();
        min_gap = min_gap.min(arg.norm());
        sum += arg.ln();
    }
    if min_gap < CONTOUR_MARGIN {
        return Err(Error::domain(format!("1 - eps z e^(-beta E) comes within {min_gap:.2e} of 0")));
    }
    Ok(EigSum { value: sum * (-eps / (p.beta * levels.volume())), min_gap })
}

/// The same pressure as a contour integral of
/// `ln(1 - eps xi) / xi * Tr[z W (xi - z W)^-1]`.
pub fn pressure_contour(levels: &Spectrum, p: &ThermoParams, contour: &Contour) -> Result<Complex64> {
    let eps = p.stats.sign();
    let zw: Vec<Complex64> = levels.eigenvalues.iter().map(|e| p.z * (-p.beta * e).exp()).collect();
    let r_in = zw.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if r_in >= contour.radius - CONTOUR_MARGIN {
        return Err(Error::Contour(format!("contour radius {} does not enclose the spectrum (radius {r_in:.4})", contour.radius)));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (xi, w) in contour.nodes.iter().zip(&contour.weights) {
        let tr: Complex64 = zw.iter().map(|v| v / (xi - v)).sum();
        total += w * (1.0 - eps * xi).ln() / xi * tr;
    }
    Ok(total * (-eps / (p.beta * levels.volume())))
}

/// A three-dimensional box whose cross-section is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteBox {
    pub grid: BoxGrid,
    /// Number of exact free-axis levels kept.
    pub kmax: usize,
}

impl FiniteBox {
    /// Keeps enough free-axis levels for a relative weight error below 1e-16
    /// at inverse temperature `beta`.
    pub fn new(grid: BoxGrid, beta: f64) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::domain("the cross-section grid must be two-dimensional"));
        }
        Ok(FiniteBox { grid, kmax: spectrum::third_axis_cutoff(grid.side(), beta, 1e-16) })
    }

    pub fn side(&self) -> f64 {
        self.grid.side()
    }

    pub fn cross_section(&self, omega: f64) -> Result<Spectrum> {
        spectrum::eigenvalues(&spectrum::build_magnetic_hamiltonian_2d(&self.grid, omega)?)
    }

    pub fn spectrum(&self, omega: f64) -> Result<Spectrum> {
        assemble_3d_spectrum(&self.cross_section(omega)?, self.kmax)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiMethod {
    EigFd,
    ContourFd,
    Hellmann,
}

impl ChiMethod {
    pub fn name(self) -> &'static str {
        match self {
            ChiMethod::EigFd => "eig_fd",
            ChiMethod::ContourFd => "contour_fd",
            ChiMethod::Hellmann => "hellmann",
        }
    }
}

impl std::str::FromStr for ChiMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eig_fd" => Ok(ChiMethod::EigFd),
            "contour_fd" => Ok(ChiMethod::ContourFd),
            "hellmann" => Ok(ChiMethod::Hellmann),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Finite-difference options: candidate base steps (related by powers of two
/// so evaluations are shared) and contour resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdOptions {
    pub steps: Vec<f64>,
    pub contour_nodes: usize,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { steps: vec![0.2, 0.1, 0.05], contour_nodes: CONTOUR_NODES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteChi {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: ChiMethod,
    pub order: u32,
    /// Base step of the selected difference quotient (0 for exact methods).
    pub step: f64,
}

fn fd_offsets(order: u32, steps: &[f64]) -> Vec<f64> {
    let stencil = crate::numdiff::central_stencil(order as usize);
    let mut out: Vec<f64> = Vec::new();
    for &s in steps {
        for level in 0..3 {
            let h = s / (1u32 << level) as f64;
            for &(k, _) in &stencil {
                out.push(k as f64 * h);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `d^n P_L / d omega^n` in the box.
pub fn susceptibility_finite(bx: &FiniteBox, p: &ThermoParams, order: u32, method: ChiMethod, opts: &FdOptions) -> Result<FiniteChi> {
    if order == 0 {
        let s = bx.spectrum(p.omega)?;
        let v = match method {
            ChiMethod::ContourFd => {
                let k = FugacityCompact::new(vec![p.z])?;
                let c = build_contour(&k, p.beta, s.ground().unwrap_or(0.0), None, opts.contour_nodes)?;
                pressure_contour(&s, p, &c)?
            }
            _ => pressure_eigsum(&s, p)?.value,
        };
        return Ok(FiniteChi { value: v, error_estimate: 1e-14 * v.norm(), method, order, step: 0.0 });
    }
    match method {
        ChiMethod::Hellmann => hellmann(bx, p, order),
        ChiMethod::EigFd | ChiMethod::ContourFd => {
            let spectra = shifted_spectra(bx, p.omega, order, &opts.steps)?;
            fd_from_spectra(&spectra, p, order, method, opts)
        }
    }
}

/// Spectra at every offset used by the difference quotients.
pub fn shifted_spectra(bx: &FiniteBox, omega: f64, order: u32, steps: &[f64]) -> Result<BTreeMap<u64, Spectrum>> {
    shifted_spectra_for(bx, omega, &[order], steps)
}

/// Spectra at the union of the offsets needed by several derivative orders.
pub fn shifted_spectra_for(bx: &FiniteBox, omega: f64, orders: &[u32], steps: &[f64]) -> Result<BTreeMap<u64, Spectrum>> {
    let mut offsets: Vec<f64> = orders.iter().flat_map(|&n| fd_offsets(n, steps)).collect();
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();
    let spectra: Result<Vec<(u64, Spectrum)>> = offsets
        .par_iter()
        .map(|dw| Ok((dw.to_bits(), bx.spectrum(omega + dw)?)))
        .collect();
    Ok(spectra?.into_iter().collect())
}

/// Difference quotients of the pressure over precomputed spectra.
pub fn fd_from_spectra(spectra: &BTreeMap<u64, Spectrum>, p: &ThermoParams, order: u32, method: ChiMethod, opts: &FdOptions) -> Result<FiniteChi> {
    let contour = if method == ChiMethod::ContourFd {
        let e0 = spectra.values().filter_map(|s| s.ground()).fold(f64::INFINITY, f64::min);
        let k = FugacityCompact::new(vec![p.z])?;
        Some(build_contour(&k, p.beta, e0, None, opts.contour_nodes)?)
    } else {
        None
    };
    let mut eval = |dw: f64| -> Result<Complex64> {
        let s = spectra
            .get(&dw.to_bits())
            .ok_or_else(|| Error::numerical("finite differences", format!("no spectrum at offset {dw}")))?;
        let q = p.with_omega(p.omega + dw);
        match &contour {
            Some(c) => pressure_contour(s, &q, c),
            None => Ok(pressure_eigsum(s, &q)?.value),
        }
    };
    let d: Derivative = richardson_sweep(order as usize, &opts.steps, &mut eval)?;
    Ok(FiniteChi { value: d.value, error_estimate: d.error, method, order, step: d.step })
}

/// Cross-section levels of a box with their field slopes `<v|dH/d omega|v>`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSlopes {
    pub side: f64,
    pub omega: f64,
    pub levels: Vec<f64>,
    pub slopes: Vec<f64>,
    pub axis: Vec<f64>,
    pub residual: f64,
}

/// Eigenvalues and eigenvalue slopes of the cross-section at `omega`.
pub fn level_slopes(bx: &FiniteBox, omega: f64) -> Result<LevelSlopes> {
    let h = spectrum::build_magnetic_hamiltonian_2d(&bx.grid, omega)?;
    let es = spectrum::eigen_decompose(&h)?;
    let dh = h.field_derivative();
    let dv = &dh * &es.vectors;
    let slopes: Vec<f64> = (0..es.values.len())
        .map(|j| {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..dv.nrows() {
                s += es.vectors[(i, j)].conj() * dv[(i, j)];
            }
            s.re
        })
        .collect();
    let residual = es.max_residual(h.matrix().as_ref());
    Ok(LevelSlopes {
        side: bx.side(),
        omega,
        levels: es.values,
        slopes,
        axis: spectrum::third_axis_levels(bx.side(), bx.kmax),
        residual,
    })
}

/// `-(1/L^3) sum z w E' / (1 - eps z w)` over all levels.
pub fn chi_from_slopes(d: &LevelSlopes, p: &ThermoParams) -> FiniteChi {
    let eps = p.stats.sign();
    let mut sum = Complex64::new(0.0, 0.0);
    for (e, de) in d.levels.iter().zip(&d.slopes) {
        for t in &d.axis {
            let zw = p.z * (-p.beta * (e + t)).exp();
            sum += zw * *de / (1.0 - eps * zw);
        }
    }
    let value = -sum / d.side.powi(3);
    let err = (d.residual + 1e-13) * value.norm();
    FiniteChi { value, error_estimate: err, method: ChiMethod::Hellmann, order: 1, step: 0.0 }
}

fn hellmann(bx: &FiniteBox, p: &ThermoParams, order: u32) -> Result<FiniteChi> {
    if order != 1 {
        return Err(Error::Unsupported(format!("the eigenvalue-slope method gives only N = 1, not N = {order}")));
    }
    Ok(chi_from_slopes(&level_slopes(bx, p.omega)?, p))
}

/// One exported susceptibility row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiRow {
    #[serde(rename = "L")]
    pub l: f64,
    pub beta: f64,
    pub omega: f64,
    pub re_z: f64,
    pub im_z: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub chi_re: f64,
    pub chi_im: f64,
    pub method: String,
    pub error_estimate: f64,
}

impl ChiRow {
    pub fn new(l: f64, p: &ThermoParams, chi: &FiniteChi) -> Self {
        ChiRow {
            l,
            beta: p.beta,
            omega: p.omega,
            re_z: p.z.re,
            im_z: p.z.im,
            n: chi.order,
            chi_re: chi.value.re,
            chi_im: chi.value.im,
            method: chi.method.name().to_string(),
            error_estimate: chi.error_estimate,
        }
    }
}

pub fn write_chi_csv<W: Write>(rows: &[ChiRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_chi_csv<R: Read>(r: R) -> Result<Vec<ChiRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Linear-algebra form of the trace used by the contour representation, for
/// cross-checks against the eigenvalue formula.
pub fn resolvent_trace(w: &linalg::CMat, z: Complex64, xi: Complex64) -> Complex64 {
    let n = w.nrows();
    let a = linalg::scale(w.as_ref(), -z);
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] += xi;
    }
    let zw = linalg::scale(w.as_ref(), z);
    let x = linalg::solve(m.as_ref(), zw.as_ref());
    linalg::trace(x.as_ref())
}
