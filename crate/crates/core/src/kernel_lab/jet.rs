//! Truncated Taylor series in the field increment with matrix coefficients.

use crate::linalg::{self, CMat};
use crate::Complex64;

/// `sum_q dw^q c_q`, truncated after `order`. Missing coefficients are zero.
#[derive(Debug, Clone)]
pub struct Jet {
    coeffs: Vec<Option<CMat>>,
}

impl Jet {
    pub fn zero(order: usize) -> Self {
        Jet { coeffs: vec![None; order + 1] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// A field-independent matrix.
    pub fn constant(m: CMat, order: usize) -> Self {
        let mut j = Jet::zero(order);
        j.coeffs[0] = Some(m);
        j
    }

    /// `dw^shift m`.
    pub fn monomial(m: CMat, shift: usize, order: usize) -> Self {
        let mut j = Jet::zero(order);
        if shift <= order {
            j.coeffs[shift] = Some(m);
        }
        j
    }

    /// Series of `exp(i dw phi) . m` from the powers `(i phi)^q / q!`.
    pub fn regularized(m: &CMat, powers: &[CMat], order: usize) -> Self {
        let mut j = Jet::zero(order);
        for q in 0..=order {
            j.coeffs[q] = Some(if q == 0 { m.clone() } else { linalg::hadamard(powers[q].as_ref(), m.as_ref()) });
        }
        j
    }

    /// Regularises every coefficient: `exp(i dw phi) . (sum_n dw^n m_n)`.
    pub fn regularize(&self, powers: &[CMat]) -> Self {
        let order = self.order();
        let mut out = Jet::zero(order);
        for (n, c) in self.coeffs.iter().enumerate() {
            let Some(c) = c else { continue };
            for q in 0..=(order - n) {
                let term = if q == 0 { c.clone() } else { linalg::hadamard(powers[q].as_ref(), c.as_ref()) };
                out.add_coeff(n + q, Complex64::new(1.0, 0.0), &term);
            }
        }
        out
    }

    pub fn coeff(&self, q: usize) -> Option<&CMat> {
        self.coeffs.get(q).and_then(|c| c.as_ref())
    }

    fn add_coeff(&mut self, q: usize, s: Complex64, m: &CMat) {
        if q >= self.coeffs.len() {
            return;
        }
        match &mut self.coeffs[q] {
            Some(c) => linalg::axpy(c, s, m.as_ref()),
            None => self.coeffs[q] = Some(linalg::scale(m.as_ref(), s)),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &Jet) {
        for (q, c) in other.coeffs.iter().enumerate() {
            if let Some(c) = c {
                self.add_coeff(q, s, c);
            }
        }
    }

    pub fn scaled(&self, s: Complex64) -> Jet {
        Jet { coeffs: self.coeffs.iter().map(|c| c.as_ref().map(|m| linalg::scale(m.as_ref(), s))).collect() }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.order().min(other.order());
        let mut out = Jet::zero(order);
        for (a, ca) in self.coeffs.iter().enumerate().take(order + 1) {
            let Some(ca) = ca else { continue };
            for (b, cb) in other.coeffs.iter().enumerate().take(order + 1 - a) {
                let Some(cb) = cb else { continue };
                let p = ca * cb;
                out.add_coeff(a + b, Complex64::new(1.0, 0.0), &p);
            }
        }
        out
    }

    /// Traces of the coefficients.
    pub fn traces(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.as_ref().map_or(Complex64::new(0.0, 0.0), |m| linalg::trace(m.as_ref()))).collect()
    }

    /// Evaluates the truncated series at `dw`.
    pub fn eval(&self, dw: f64, n: usize) -> CMat {
        let mut out = linalg::zeros(n);
        for (q, c) in self.coeffs.iter().enumerate() {
            if let Some(c) = c {
                linalg::axpy(&mut out, Complex64::new(dw.powi(q as i32), 0.0), c.as_ref());
            }
        }
        out
    }
}

impl Jet {
    /// `dw^k * self`, truncated at the same order.
    pub fn shifted(&self, k: usize) -> Jet {
        let order = self.order();
        let mut out = Jet::zero(order);
        for (q, c) in self.coeffs.iter().enumerate() {
            if q + k <= order {
                out.coeffs[q + k] = c.clone();
            }
        }
        out
    }

    /// Same series with a lower truncation order.
    pub fn truncated(&self, order: usize) -> Jet {
        Jet { coeffs: self.coeffs.iter().take(order + 1).cloned().collect() }
    }

    /// Same series with a higher truncation order, padded with zeros.
    pub fn extended(&self, order: usize) -> Jet {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, None);
        Jet { coeffs }
    }
}
