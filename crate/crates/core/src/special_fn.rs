//! Bose and Fermi functions `f_sigma(zeta)` (complete Fermi-Dirac and
//! Bose-Einstein integrals, i.e. signed polylogarithms), their lower-order
//! ladder and their zeta-derivatives.
//!
//! With `eps = +1` for bosons and `-1` for fermions,
//! `f_sigma(zeta) = sum_{n>=1} eps^(n-1) zeta^n / n^sigma`, continued
//! analytically off the cut through
//! `f_sigma(zeta) = zeta / Gamma(sigma) * int_0^inf t^(sigma-1) e^-t / (1 - eps zeta e^-t) dt`.

use crate::quadrature::integrate_adaptive;
use crate::{Complex64, Error, Result, Statistics};
use std::f64::consts::PI;

/// Default minimum distance between the argument and the branch cut.
pub const CUT_MARGIN: f64 = 1e-3;
/// Default cap on the number of series terms.
pub const SERIES_CAP: usize = 100_000;

/// Below this modulus the series converges fast enough to be the method of
/// choice.
const SERIES_RADIUS: f64 = 0.6;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Gamma(sigma)`, exact up to rounding for positive integers and half
/// integers, Lanczos otherwise.
pub fn gamma_value(sigma: f64) -> Result<f64> {
    if !sigma.is_finite() {
        return Err(Error::domain(format!("Gamma argument {sigma} is not finite")));
    }
    if sigma <= 0.0 && sigma.fract() == 0.0 {
        return Err(Error::domain(format!("Gamma has a pole at {sigma}")));
    }
    if sigma > 0.0 && sigma <= 171.0 {
        if sigma.fract() == 0.0 {
            return Ok((1..sigma as u64).fold(1.0, |acc, k| acc * k as f64));
        }
        if (sigma - 0.5).fract() == 0.0 {
            // Gamma(k + 1/2) = sqrt(pi) (2k-1)!! / 2^k
            let k = (sigma - 0.5) as u64;
            return Ok((0..k).fold(PI.sqrt(), |acc, j| acc * (j as f64 + 0.5)));
        }
    }
    Ok(lanczos(sigma))
}

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// A validated argument pair for the Bose/Fermi functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyArg {
    sigma: f64,
    zeta: Complex64,
    stats: Statistics,
}

impl PolyArg {
    /// Rejects non-finite input and arguments closer than `margin` to the cut.
    pub fn new(sigma: f64, zeta: Complex64, stats: Statistics, margin: f64) -> Result<Self> {
        if !sigma.is_finite() || !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Err(Error::domain("non-finite argument"));
        }
        let d = stats.distance_to_cut(zeta);
        if d < margin {
            return Err(Error::domain(format!(
                "zeta = {zeta} lies within {d:.2e} of the {} cut (margin {margin:.1e})",
                stats.name()
            )));
        }
        Ok(PolyArg { sigma, zeta, stats })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn eval(&self) -> Result<Complex64> {
        f_value(self.sigma, self.zeta, self.stats)
    }
}

/// Partial sum of the defining series with the number of terms used.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSum {
    pub value: Complex64,
    pub terms: usize,
}

/// `sum_n eps^(n-1) zeta^n / n^sigma`, for `|zeta| <= 1`.
pub fn f_series(sigma: f64, zeta: Complex64, stats: Statistics) -> Result<SeriesSum> {
    series_shifted(sigma, 0, zeta, stats, SERIES_CAP)
}

/// `f_(sigma - m)` by its series, with an explicit term cap.
pub fn series_shifted(sigma: f64, m: u32, zeta: Complex64, stats: Statistics, cap: usize) -> Result<SeriesSum> {
    let r = zeta.norm();
    let power = m as f64 - sigma;
    if r > 1.0 || (r == 1.0 && power >= -1.0) {
        return Err(Error::domain(format!("series for order {} diverges at |zeta| = {r}", sigma - m as f64)));
    }
    let eps = stats.sign();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zn = Complex64::new(1.0, 0.0);
    for n in 1..=cap {
        zn *= zeta * if n > 1 { eps } else { 1.0 };
        let term = zn * (n as f64).powf(power);
        sum += term;
        let t = term.norm();
        if t == 0.0 {
            return Ok(SeriesSum { value: sum, terms: n });
        }
        // Ratio bound on the tail once the terms decrease monotonically.
        let ratio = r * ((n + 1) as f64 / n as f64).powf(power);
        if ratio < 1.0 {
            let tail = t * ratio / (1.0 - ratio);
            if tail <= 1e-17 * sum.norm().max(f64::MIN_POSITIVE) {
                return Ok(SeriesSum { value: sum, terms: n });
            }
        }
    }
    Err(Error::numerical(
        "f_series",
        format!("no convergence within the cap of {cap} terms at |zeta| = {r}, sigma = {}", sigma - m as f64),
    ))
}

/// Coefficients of `P_m` with `Q_m(u) = P_m(u) / (1 - eps u)^(m+1)` and
/// `Q_m = (u d/du)^m [u / (1 - eps u)]`.
fn ladder_numerator(m: u32, eps: f64) -> Vec<f64> {
    let mut p = vec![0.0, 1.0];
    for k in 0..m {
        // P_{k+1} = u (P_k' (1 - eps u) + (k+1) eps P_k)
        let deg = p.len() - 1;
        let mut q = vec![0.0; deg + 2];
        for (j, &c) in p.iter().enumerate() {
            if j >= 1 {
                q[j] += j as f64 * c;
                q[j + 1] -= eps * j as f64 * c;
            }
            q[j + 1] += (k + 1) as f64 * eps * c;
        }
        p = q;
    }
    p
}

/// Options for the integral representation.
#[derive(Debug, Clone, Copy)]
pub struct IntegralOptions {
    pub margin: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions { margin: CUT_MARGIN, rel_tol: 1e-14, max_intervals: 4000 }
    }
}

/// `f_sigma` by its integral representation, for `sigma > 0`.
pub fn f_integral(sigma: f64, zeta: Complex64, stats: Statistics) -> Result<Complex64> {
    ladder_integral(sigma, 0, zeta, stats, IntegralOptions::default())
}

/// `f_(sigma - m)` as `Gamma(sigma)^-1 int_0^inf t^(sigma-1) Q_m(zeta e^-t) dt`.
pub fn ladder_integral(sigma: f64, m: u32, zeta: Complex64, stats: Statistics, opts: IntegralOptions) -> Result<Complex64> {
    if sigma <= 0.0 {
        return Err(Error::domain(format!("integral representation needs sigma > 0, got {sigma}")));
    }
    PolyArg::new(sigma, zeta, stats, opts.margin)?;
    let r = zeta.norm();
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let eps = stats.sign();
    let p = ladder_numerator(m, eps);
    let q = |w: Complex64| -> Complex64 {
        let num = p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c);
        num / (1.0 - eps * w).powi(m as i32 + 1)
    };
    // |Q_m(w)| <= c_m |w| whenever |w| <= 1/2.
    let c_m: f64 = (1..200).map(|n| (n as f64).powi(m as i32) * 0.5f64.powi(n - 1)).sum();
    let gamma = gamma_value(sigma)?;
    let t_min = (2.0 * r).ln().max(0.0) + 2.0 * (sigma - 1.0).abs() + 1.0;
    let mut t_max = t_min;
    let tail = |t: f64| c_m * r * 2.0 * t.powf(sigma - 1.0) * (-t).exp() / gamma;
    while tail(t_max) > 1e-18 * r {
        t_max += 1.0;
    }
    // Substituting t = u^2 makes the integrand smooth at the origin for
    // integer and half-integer orders.
    let integrand = |u: f64| -> Complex64 {
        let t = u * u;
        q(zeta * (-t).exp()) * (2.0 * u.powf(2.0 * sigma - 1.0))
    };
    let u_max = t_max.sqrt();
    let mut points = vec![0.0, u_max];
    if r > 1.0 {
        points.push(r.ln().sqrt());
    }
    if sigma > 0.5 {
        points.push((sigma - 0.5).sqrt().min(u_max));
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let res = integrate_adaptive(integrand, &points, opts.rel_tol, 1e-30, opts.max_intervals)?;
    Ok(res.value / gamma)
}

/// `f_sigma(zeta)` for any real order, choosing between series and integral.
pub fn f_value(sigma: f64, zeta: Complex64, stats: Statistics) -> Result<Complex64> {
    f_shifted(sigma, 0, zeta, stats)
}

/// `f_(sigma - m)(zeta)`.
pub fn f_shifted(sigma: f64, m: u32, zeta: Complex64, stats: Statistics) -> Result<Complex64> {
    let order = sigma - m as f64;
    if zeta.norm() <= SERIES_RADIUS {
        return Ok(series_shifted(order, 0, zeta, stats, SERIES_CAP)?.value);
    }
    // Lift the order to at least 1/2 for the integral, lowering by the ladder.
    let lift = if order >= 0.5 { 0 } else { (0.5 - order).ceil() as u32 };
    ladder_integral(order + lift as f64, lift, zeta, stats, IntegralOptions::default())
}

/// Signed Stirling numbers of the first kind `s(m, j)`, `j = 0..=m`.
pub fn stirling_first(m: usize) -> Vec<f64> {
    let mut s = vec![1.0];
    for k in 0..m {
        let mut next = vec![0.0; s.len() + 1];
        for (j, &c) in s.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= k as f64 * c;
        }
        s = next;
    }
    s
}

/// `d^m/dzeta^m f_sigma(zeta)`.
pub fn f_derivative(sigma: f64, zeta: Complex64, stats: Statistics, m: u32) -> Result<Complex64> {
    if m == 0 {
        return f_value(sigma, zeta, stats);
    }
    let r = zeta.norm();
    if r < 0.5 {
        // Termwise differentiated series.
        let eps = stats.sign();
        let mut sum = Complex64::new(0.0, 0.0);
        for n in (m as usize)..SERIES_CAP {
            let falling: f64 = (0..m as usize).map(|k| (n - k) as f64).product();
            let term = zeta.powi((n - m as usize) as i32) * (eps.powi(n as i32 - 1) * falling * (n as f64).powf(-sigma));
            sum += term;
            if n > m as usize + 4 && term.norm() <= 1e-18 * sum.norm().max(f64::MIN_POSITIVE) {
                return Ok(sum);
            }
            if term.norm() == 0.0 {
                return Ok(sum);
            }
        }
        return Err(Error::numerical("f_derivative", format!("series did not converge at |zeta| = {r}")));
    }
    // zeta^m d^m = sum_j s(m, j) (zeta d)^j and (zeta d) f_sigma = f_(sigma-1).
    let s = stirling_first(m as usize);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, c) in s.iter().enumerate() {
        if *c != 0.0 {
            acc += f_shifted(sigma, j as u32, zeta, stats)? * *c;
        }
    }
    Ok(acc / zeta.powi(m as i32))
}
