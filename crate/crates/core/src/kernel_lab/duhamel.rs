//! Duhamel correction kernels and the iterated time integrals built from them.
//!
//! With `Phi = exp(i dw phi)` and `W0(t) = exp(-t H_omega0)`, the Peierls
//! links give `H_omega = Phi . H_omega0` exactly, so
//! `H_omega (Phi . W0(t)) - Phi . (H_omega0 W0(t)) = Phi . sum_k dw^k R_k(t)` with
//! `R_k(t)(x, x') = sum_y H_omega0(x, y) (i fl(x, y, x'))^k / k! W0(t)(y, x')`
//! and `fl` the flux through the triangle `(x, y, x')`.

use super::{triangle_flux, GridKernel, HeatContext, Jet};
use crate::linalg::{self, CMat};
use crate::quadrature::graded_rule;
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrectionKind {
    /// `R_k(tau)`, the k-th field-order part of the Duhamel generator.
    Generator(usize),
    /// `r_(L,n)`, the n-th order part of the resolvent correction.
    Resolvent(usize),
}

impl CorrectionKind {
    pub const R1: CorrectionKind = CorrectionKind::Generator(1);
    pub const R2: CorrectionKind = CorrectionKind::Generator(2);
}

/// Composite Gauss-Legendre rule per time variable: `order` nodes per panel,
/// panels graded geometrically by `ratio` toward the ends of each interval
/// until the fastest semigroup transient is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexRule {
    pub order: usize,
    pub ratio: f64,
}

impl Default for SimplexRule {
    fn default() -> Self {
        SimplexRule { order: 8, ratio: 2.0 }
    }
}

impl SimplexRule {
    pub fn new(order: usize) -> Self {
        SimplexRule { order, ..Default::default() }
    }
}

/// Applies the k-th generator stencil to the matrix `w` (columns indexed by `x'`).
pub(crate) fn generator_op(ctx: &HeatContext, k: usize, w: &CMat) -> CMat {
    let pts = ctx.points();
    let n = pts.len();
    let nbr = ctx.neighbours();
    let kfact: f64 = (1..=k).map(|j| j as f64).product();
    let ik = Complex64::i().powi(k as i32) / kfact;
    let mut out = linalg::zeros(n);
    for xp in 0..n {
        for x in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(y, hxy) in &nbr[x] {
                let f = triangle_flux(pts[x], pts[y], pts[xp]);
                acc += hxy * w[(y, xp)] * f.powi(k as i32);
            }
            out[(x, xp)] = acc * ik;
        }
    }
    out
}

/// Matrix of `r_(L,n) = -z sum_(a+b+c=n) (i^n / a! b! c!) phi(x',x)^c . [(phi^a . W0)(phi^b . g0)]`,
/// the n-th field-order coefficient of
/// `-z int (exp(i dw fl(x, y, x')) - 1) G(x, y) g(y, x') dy`.
pub(crate) fn resolvent_correction_op(powers: &[CMat], n: usize, z: Complex64, w0: &CMat, g0: &CMat) -> CMat {
    let dim = w0.nrows();
    let mut out = linalg::zeros(dim);
    for a in 0..=n {
        let wa = if a == 0 { w0.clone() } else { linalg::hadamard(powers[a].as_ref(), w0.as_ref()) };
        for b in 0..=(n - a) {
            let c = n - a - b;
            let gb = if b == 0 { g0.clone() } else { linalg::hadamard(powers[b].as_ref(), g0.as_ref()) };
            let prod = &wa * &gb;
            // powers[c] carries (i phi(x, x'))^c / c!; phi(x', x) = -phi(x, x').
            let term = if c == 0 {
                prod
            } else {
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                linalg::scale(linalg::hadamard(powers[c].as_ref(), prod.as_ref()).as_ref(), Complex64::new(sign, 0.0))
            };
            linalg::axpy(&mut out, -z, term.as_ref());
        }
    }
    out
}

/// Correction kernel `R_k(tau)` or `r_(L,n)`. The resolvent correction needs
/// `point = Some((xi, z))`.
pub fn correction_kernel(ctx: &HeatContext, kind: CorrectionKind, tau: f64, point: Option<(Complex64, Complex64)>) -> Result<GridKernel> {
    let op = match kind {
        CorrectionKind::Generator(k) => {
            if k == 0 {
                return Err(Error::domain("generator corrections start at order 1"));
            }
            if !(tau > 0.0) {
                return Err(Error::domain(format!("tau must be positive, got {tau}")));
            }
            generator_op(ctx, k, &ctx.heat(tau))
        }
        CorrectionKind::Resolvent(n) => {
            let (xi, z) = point.ok_or_else(|| Error::domain("the resolvent correction needs (xi, z)"))?;
            let powers = ctx.phase_powers(n);
            resolvent_correction_op(&powers, n, z, &ctx.heat(ctx.beta()), &ctx.resolvent(xi, z)?)
        }
    };
    Ok(GridKernel::from_operator(*ctx.grid(), op))
}

/// How factor matrices are lifted to field-dependent quantities.
trait Lift {
    type V;
    fn lift(&self, raw: &CMat) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn axpy(&self, acc: &mut Option<Self::V>, w: f64, x: Self::V);
}

/// Exact phases at a list of increments.
struct Samples {
    phases: Vec<CMat>,
}

impl Lift for Samples {
    type V = Vec<CMat>;
    fn lift(&self, raw: &CMat) -> Vec<CMat> {
        self.phases.iter().map(|p| linalg::hadamard(p.as_ref(), raw.as_ref())).collect()
    }
    fn mul(&self, a: &Vec<CMat>, b: &Vec<CMat>) -> Vec<CMat> {
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }
    fn axpy(&self, acc: &mut Option<Vec<CMat>>, w: f64, x: Vec<CMat>) {
        match acc {
            Some(a) => {
                for (ai, xi) in a.iter_mut().zip(&x) {
                    linalg::axpy(ai, Complex64::new(w, 0.0), xi.as_ref());
                }
            }
            None => *acc = Some(x.iter().map(|m| linalg::scale(m.as_ref(), Complex64::new(w, 0.0))).collect()),
        }
    }
}

/// Taylor coefficients of the phases.
struct Jets {
    powers: Vec<CMat>,
    order: usize,
}

impl Lift for Jets {
    type V = Jet;
    fn lift(&self, raw: &CMat) -> Jet {
        Jet::regularized(raw, &self.powers, self.order)
    }
    fn mul(&self, a: &Jet, b: &Jet) -> Jet {
        a.mul(b)
    }
    fn axpy(&self, acc: &mut Option<Jet>, w: f64, x: Jet) {
        match acc {
            Some(a) => a.add_scaled(Complex64::new(w, 0.0), &x),
            None => *acc = Some(x.scaled(Complex64::new(w, 0.0))),
        }
    }
}

/// `Z_j(s) = int_0^s R_(f_j)(s - t) Z_(j+1)(t) dt` with `Z_last(s) = R_(f_last)(s)`.
fn inner<L: Lift>(ctx: &HeatContext, lift: &L, factors: &[usize], s: f64, rule: &SimplexRule) -> L::V {
    let raw = |t: f64| generator_op(ctx, factors[0], &ctx.heat(t));
    if factors.len() == 1 {
        return lift.lift(&raw(s));
    }
    let nodes = graded_rule(0.0, s, rule.order, ctx.spectral_width(), rule.ratio, (true, true));
    let mut acc = None;
    for (t, w) in nodes.iter() {
        let left = lift.lift(&raw(s - t));
        let right = inner(ctx, lift, &factors[1..], t, rule);
        lift.axpy(&mut acc, w, lift.mul(&left, &right));
    }
    acc.expect("non-empty rule")
}

fn outer<L: Lift>(ctx: &HeatContext, lift: &L, factors: &[usize], rule: &SimplexRule) -> Result<L::V> {
    if factors.is_empty() || factors.len() > 3 {
        return Err(Error::Unsupported(format!("simplex integrals with {} factors (1 to 3 supported)", factors.len())));
    }
    if factors.contains(&0) {
        return Err(Error::domain("factor indices start at 1"));
    }
    let beta = ctx.beta();
    let nodes = graded_rule(0.0, beta, rule.order, ctx.spectral_width(), rule.ratio, (true, true));
    let mut acc = None;
    for (t, w) in nodes.iter() {
        let left = lift.lift(&ctx.heat(beta - t));
        let right = inner(ctx, lift, factors, t, rule);
        lift.axpy(&mut acc, w, lift.mul(&left, &right));
    }
    Ok(acc.expect("non-empty rule"))
}

/// Matrices of `I_k(f_1..f_k) = int_(simplex) W~(beta - t_1) R~_(f_1)(t_1 - t_2) ... R~_(f_k)(t_k)`
/// at each field increment in `dws`, where `~` denotes regularisation.
pub fn simplex_integrals(ctx: &HeatContext, factors: &[usize], dws: &[f64], rule: &SimplexRule) -> Result<Vec<CMat>> {
    let lift = Samples { phases: dws.iter().map(|&dw| ctx.phase(dw)).collect() };
    outer(ctx, &lift, factors, rule)
}

/// Kernel of a single simplex integral at field increment `dw`.
pub fn simplex_integral(ctx: &HeatContext, factors: &[usize], dw: f64, rule: &SimplexRule) -> Result<GridKernel> {
    let mut v = simplex_integrals(ctx, factors, &[dw], rule)?;
    Ok(GridKernel::from_operator(*ctx.grid(), v.pop().expect("one sample")))
}

/// Taylor coefficients in `dw` of a simplex integral, up to `order`.
pub(crate) fn simplex_integral_jet(ctx: &HeatContext, factors: &[usize], order: usize, rule: &SimplexRule) -> Result<Jet> {
    let lift = Jets { powers: ctx.phase_powers(order), order };
    outer(ctx, &lift, factors, rule)
}
