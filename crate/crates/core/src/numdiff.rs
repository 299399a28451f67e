//! Central finite differences with Richardson extrapolation.

use crate::{Complex64, Error, Result};
use std::collections::HashMap;

/// Assumed relative accuracy of the differenced function values.
const ROUNDOFF: f64 = 1e-15;

/// Finite-difference weights (Fornberg) for the `order`-th derivative at 0
/// on the integer offsets `offsets`.
pub fn fd_weights(offsets: &[i64], order: usize) -> Vec<f64> {
    let n = offsets.len();
    assert!(order < n, "need more points than the derivative order");
    let x: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    // c[i][k]: weight of point i for derivative k.
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    for i in 1..n {
        let mut c2 = 1.0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            for k in (0..=order.min(i)).rev() {
                if j == i - 1 {
                    let prev = if k > 0 { c[i - 1][k - 1] } else { 0.0 };
                    c[i][k] = c1 * (k as f64 * prev - x[i - 1] * c[i - 1][k]) / c2;
                }
                let prevj = if k > 0 { c[j][k - 1] } else { 0.0 };
                c[j][k] = (x[i] * c[j][k] - k as f64 * prevj) / c3;
            }
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// Symmetric stencil of second-order accuracy for the `order`-th derivative.
pub fn central_stencil(order: usize) -> Vec<(i64, f64)> {
    assert!(order >= 1);
    let half = order.div_ceil(2) as i64;
    let offsets: Vec<i64> = (-half..=half).collect();
    let w = fd_weights(&offsets, order);
    offsets.into_iter().zip(w).filter(|(_, w)| w.abs() > 1e-14).collect()
}

/// A derivative estimate with its extrapolation discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Derivative {
    pub value: Complex64,
    pub error: f64,
    pub step: f64,
}

/// `order`-th derivative at `x0` from central differences with steps
/// `s, s/2, s/4`, extrapolated twice. `f` receives the offset from `x0`.
pub fn richardson<F>(order: usize, step: f64, f: &mut F) -> Result<Derivative>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let stencil = central_stencil(order);
    let mut d = [Complex64::new(0.0, 0.0); 3];
    let mut fmax: f64 = 0.0;
    for (level, dk) in d.iter_mut().enumerate() {
        let s = step / (1u32 << level) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, w) in &stencil {
            let v = f(k as f64 * s)?;
            fmax = fmax.max(v.norm());
            acc += v * w;
        }
        *dk = acc / s.powi(order as i32);
    }
    // Rounding of the function values, amplified by the finest quotient and
    // the extrapolation weights.
    let wsum: f64 = stencil.iter().map(|p| p.1.abs()).sum();
    let roundoff = 4.0 * ROUNDOFF * fmax * wsum / (step / 4.0).powi(order as i32);
    let r1a = (d[1] * 4.0 - d[0]) / 3.0;
    let r1b = (d[2] * 4.0 - d[1]) / 3.0;
    let r2 = (r1b * 16.0 - r1a) / 15.0;
    let value = r2;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::numerical("finite differences", "non-finite derivative estimate"));
    }
    Ok(Derivative { value, error: (r2 - r1b).norm() + roundoff, step })
}

/// Runs [`richardson`] for each candidate step and keeps the estimate with
/// the smallest discrepancy. Function values are cached across candidates,
/// so steps related by powers of two share evaluations.
pub fn richardson_sweep<F>(order: usize, steps: &[f64], f: &mut F) -> Result<Derivative>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut cache: HashMap<u64, Complex64> = HashMap::new();
    let mut best: Option<Derivative> = None;
    for &s in steps {
        let mut cached = |x: f64| -> Result<Complex64> {
            let key = x.to_bits();
            if let Some(v) = cache.get(&key) {
                return Ok(*v);
            }
            let v = f(x)?;
            cache.insert(key, v);
            Ok(v)
        };
        let est = richardson(order, s, &mut cached)?;
        if best.is_none_or(|b| est.error < b.error) {
            best = Some(est);
        }
    }
    best.ok_or_else(|| Error::domain("empty step list"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_stencils() {
        let s1 = central_stencil(1);
        assert_eq!(s1.len(), 2);
        assert!((s1[0].1 + 0.5).abs() < 1e-15 && (s1[1].1 - 0.5).abs() < 1e-15);
        let s2: Vec<f64> = central_stencil(2).iter().map(|p| p.1).collect();
        assert!((s2[0] - 1.0).abs() < 1e-14 && (s2[1] + 2.0).abs() < 1e-14);
        let s4: Vec<f64> = central_stencil(4).iter().map(|p| p.1).collect();
        let want = [1.0, -4.0, 6.0, -4.0, 1.0];
        for (a, b) in s4.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_of_exp() {
        for order in 1..=4 {
            let d = richardson_sweep(order, &[0.4, 0.2, 0.1], &mut |x| Ok(Complex64::new((0.3 + x).exp(), 0.0))).unwrap();
            let exact = 0.3f64.exp();
            assert!((d.value.re - exact).abs() < 1e-6 * exact, "order {order}: {} vs {exact}", d.value.re);
        }
    }
}
