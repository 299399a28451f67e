//! Grand-canonical pressure of the infinite gas as a sum over Landau levels
//! and its field derivatives.
//!
//! `P(beta, omega, z) = omega (2 pi beta)^(-3/2) sum_k f_(3/2)(z e^(-(k+1/2) beta omega))`.

use crate::numdiff::richardson;
use crate::special_fn::{f_shifted, f_value};
use crate::{Complex64, Error, Result, Statistics};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default relative truncation tolerance of the level sums.
pub const LEVEL_TOL: f64 = 1e-15;
/// Hard cap on the number of Landau levels summed.
pub const LEVEL_CAP: usize = 50_000_000;

/// Inverse temperature, field, statistics and fugacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoParams {
    pub beta: f64,
    pub omega: f64,
    pub stats: Statistics,
    pub z: Complex64,
}

impl ThermoParams {
    pub fn new(beta: f64, omega: f64, stats: Statistics, z: Complex64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::domain(format!("beta must be positive, got {beta}")));
        }
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!("omega must be non-negative, got {omega}")));
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain("fugacity must be finite"));
        }
        Ok(ThermoParams { beta, omega, stats, z })
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        ThermoParams { omega, ..*self }
    }

    fn prefactor(&self) -> f64 {
        (2.0 * PI * self.beta).powf(-1.5)
    }

    fn level_arg(&self, k: usize) -> Complex64 {
        self.z * (-(k as f64 + 0.5) * self.beta * self.omega).exp()
    }
}

/// Value of a truncated level sum with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSum {
    pub value: Complex64,
    pub levels: usize,
    pub tail_bound: f64,
}

/// Pressure of the free gas, `(2 pi beta)^(-3/2) f_(5/2)(z) / beta`.
pub fn free_gas_pressure(beta: f64, stats: Statistics, z: Complex64) -> Result<Complex64> {
    Ok(f_value(2.5, z, stats)? * ((2.0 * PI * beta).powf(-1.5) / beta))
}

/// Bound on `sum_(k >= k0) ((k+1/2) beta)^m |f_(3/2-m)(zeta_k)|`.
fn level_tail(p: &ThermoParams, m: u32, k0: usize) -> Option<f64> {
    let q = (-p.beta * p.omega).exp();
    let u0 = p.z.norm() * (-(k0 as f64 + 0.5) * p.beta * p.omega).exp();
    if u0 >= 1.0 || q >= 1.0 {
        return None;
    }
    // |f_(3/2-m)(zeta)| <= |zeta| sum_n n^m u0^(n-1) for |zeta| <= u0.
    let s_m = if m == 0 {
        1.0 / (1.0 - u0)
    } else {
        let mut s = 0.0;
        let mut n = 1usize;
        loop {
            let t = (n as f64).powi(m as i32) * u0.powi(n as i32 - 1);
            s += t;
            let ratio = ((n + 1) as f64 / n as f64).powi(m as i32) * u0;
            if ratio < 0.5 && t * ratio / (1.0 - ratio) < 1e-3 * s {
                s += t * ratio / (1.0 - ratio);
                break;
            }
            n += 1;
            if n > 100_000 {
                return None;
            }
        }
        s
    };
    let x0 = k0 as f64 + 0.5;
    let rho = ((x0 + 1.0) / x0).powi(m as i32) * q;
    if rho >= 1.0 {
        return None;
    }
    let first = (x0 * p.beta).powi(m as i32) * p.z.norm() * (-x0 * p.beta * p.omega).exp();
    Some(s_m * first / (1.0 - rho))
}

/// Bound on the modulus of the pressure terms with `k >= k0`.
pub fn landau_tail_bound(p: &ThermoParams, k0: usize) -> Result<f64> {
    if p.omega <= 0.0 {
        return Err(Error::domain("the Landau sum needs omega > 0"));
    }
    let q = (-p.beta * p.omega).exp();
    let u0 = p.z.norm() * (-(k0 as f64 + 0.5) * p.beta * p.omega).exp();
    if u0 >= 1.0 {
        return Err(Error::domain(format!("tail bound needs |zeta_k0| < 1, got {u0}")));
    }
    Ok(p.omega * p.prefactor() * p.z.norm() * (-(k0 as f64 + 0.5) * p.beta * p.omega).exp() / ((1.0 - q) * (1.0 - u0)))
}

/// `sum_k ((k+1/2) beta)^m (-1)^m f_(3/2-m)(zeta_k)`, i.e. the m-th
/// omega-derivative of `sum_k f_(3/2)(zeta_k)`.
fn level_derivative_sum(p: &ThermoParams, m: u32, tol: f64) -> Result<LevelSum> {
    let mut sum = Complex64::new(0.0, 0.0);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    for k in 0..LEVEL_CAP {
        let x = (k as f64 + 0.5) * p.beta;
        sum += f_shifted(1.5, m, p.level_arg(k), p.stats)? * (sign * x.powi(m as i32));
        if let Some(tail) = level_tail(p, m, k + 1) {
            if tail <= tol * sum.norm() || tail == 0.0 {
                return Ok(LevelSum { value: sum, levels: k + 1, tail_bound: tail });
            }
        }
    }
    Err(Error::numerical("Landau level sum", format!("not converged within {LEVEL_CAP} levels")))
}

/// Bulk pressure, summing levels until the tail bound drops below `tol`
/// relative to the partial sum.
pub fn pressure_bulk(p: &ThermoParams, tol: f64) -> Result<LevelSum> {
    if p.omega <= 0.0 {
        return Err(Error::domain("the Landau sum needs omega > 0; use free_gas_pressure at zero field"));
    }
    let s = level_derivative_sum(p, 0, tol)?;
    let c = p.omega * p.prefactor();
    Ok(LevelSum { value: s.value * c, levels: s.levels, tail_bound: s.tail_bound * c })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BulkMethod {
    Analytic,
    FiniteDiff,
}

/// A susceptibility value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    pub value: Complex64,
    pub error_estimate: f64,
    pub levels: usize,
}

/// `d^n P / d omega^n` of the bulk gas.
pub fn susceptibility_bulk(p: &ThermoParams, n: u32, method: BulkMethod) -> Result<Susceptibility> {
    if p.omega <= 0.0 {
        return Err(Error::domain("bulk susceptibilities need omega > 0"));
    }
    if n == 0 {
        let s = pressure_bulk(p, LEVEL_TOL)?;
        return Ok(Susceptibility { value: s.value, error_estimate: s.tail_bound, levels: s.levels });
    }
    match method {
        BulkMethod::Analytic => {
            // d^n (omega F) = omega F^(n) + n F^(n-1)
            let hi = level_derivative_sum(p, n, LEVEL_TOL)?;
            let lo = level_derivative_sum(p, n - 1, LEVEL_TOL)?;
            let c = p.prefactor();
            let value = (hi.value * p.omega + lo.value * n as f64) * c;
            let err = (hi.tail_bound * p.omega + lo.tail_bound * n as f64) * c + 1e-14 * value.norm();
            Ok(Susceptibility { value, error_estimate: err, levels: hi.levels.max(lo.levels) })
        }
        BulkMethod::FiniteDiff => {
            let step = (1e-2 * p.omega).max(1e-3);
            let reach = n.div_ceil(2) as f64 * step;
            if reach >= p.omega {
                return Err(Error::domain(format!("finite-difference stencil reaches omega <= 0 (omega = {})", p.omega)));
            }
            let mut levels = 0;
            let d = richardson(n as usize, step, &mut |dw| {
                let s = pressure_bulk(&p.with_omega(p.omega + dw), LEVEL_TOL)?;
                levels = levels.max(s.levels);
                Ok(s.value)
            })?;
            Ok(Susceptibility { value: d.value, error_estimate: d.error, levels })
        }
    }
}
