//! Field expansions of the Gibbs semigroup and of `g = (xi - z W)^-1 z W`
//! around a reference field, with their remainders measured against exact
//! recomputation at the shifted field.

use super::duhamel::{resolvent_correction_op, simplex_integral_jet, simplex_integrals, SimplexRule};
use super::{HeatContext, Jet};
use crate::fit::{loglog_fit, SlopeFit};
use crate::linalg::{self, CMat};
use crate::numdiff::{richardson_sweep, Derivative};
use crate::spectrum::{self, BoxGrid};
use std::collections::HashMap;
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};

/// A point `(xi, z)` at which resolvent quantities are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabPoint {
    pub xi: Complex64,
    pub z: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderSample {
    pub delta_omega: f64,
    pub norm: f64,
}

/// Derivatives of a trace from finite differences next to the ones
/// implied by the expansion coefficients (`n! a_n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCrossCheck {
    pub fd_derivatives: Vec<Complex64>,
    pub fd_errors: Vec<f64>,
    pub coefficient_derivatives: Vec<Complex64>,
    pub relative_differences: Vec<f64>,
}

/// Measured quantities in the smallness condition `C1 M |dw| sup|z| < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smallness {
    pub c1: f64,
    pub m: f64,
    pub worst_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub kind: String,
    pub order: usize,
    pub side: f64,
    pub n: usize,
    pub beta: f64,
    pub omega0: f64,
    pub point: Option<LabPoint>,
    /// Traces of the expansion coefficients, orders `1..=order`.
    pub coefficients: Vec<Complex64>,
    /// The same divided by the area `L^2`.
    pub coefficients_per_area: Vec<Complex64>,
    /// Operator-norm (semigroup) or trace-norm (resolvent) remainders.
    pub remainder: Vec<RemainderSample>,
    pub slope: Option<SlopeFit>,
    /// `|Tr(exact) - Tr(truncated series)|`.
    pub trace_remainder: Vec<RemainderSample>,
    pub trace_slope: Option<SlopeFit>,
    pub cross_check: Option<TraceCrossCheck>,
    pub smallness: Option<Smallness>,
    pub rule_single: SimplexRule,
    pub rule_nested: SimplexRule,
}

impl ExpansionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Quadrature and differencing controls for the expansions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionOptions {
    /// Rule for single time integrals.
    pub rule_single: SimplexRule,
    /// Rule per variable for iterated time integrals.
    pub rule_nested: SimplexRule,
    /// Base steps for the finite-difference cross-check.
    pub fd_steps: Vec<f64>,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions {
            rule_single: SimplexRule { order: 8, ratio: 2.0 },
            rule_nested: SimplexRule { order: 3, ratio: 4.0 },
            fd_steps: vec![0.1, 0.05, 0.025],
        }
    }
}

/// Slope of a remainder curve, reported only for at least four samples
/// spanning at least one decade.
pub fn remainder_slope(samples: &[RemainderSample]) -> Option<SlopeFit> {
    if samples.len() < 4 {
        return None;
    }
    let lo = samples.iter().map(|s| s.delta_omega.abs()).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.delta_omega.abs()).fold(0.0, f64::max);
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return None;
    }
    let x: Vec<f64> = samples.iter().map(|s| s.delta_omega.abs()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.norm).collect();
    loglog_fit(&x, &y).ok()
}

/// Ordered tuples of positive integers summing to `n` with at most `max_len` parts.
fn compositions(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max_len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if cur.len() == max_len {
            return;
        }
        for first in 1..=rest {
            cur.push(first);
            rec(rest - first, max_len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max_len, &mut Vec::new(), &mut out);
    out
}

fn rule_for(factors: usize, opts: &ExpansionOptions) -> SimplexRule {
    if factors == 1 {
        opts.rule_single
    } else {
        opts.rule_nested
    }
}

/// Duhamel terms `W_n(dw) = sum_k (-1)^k sum_(f_1+..+f_k = n) I_k(f_1..f_k)(dw)`
/// for `n = 1..=order`, tabulated at `dw = 0` followed by the requested increments.
#[derive(Debug, Clone)]
pub struct DuhamelTerms {
    order: usize,
    dws: Vec<f64>,
    // [n - 1][sample], sample 0 being the reference field.
    values: Vec<Vec<CMat>>,
}

impl DuhamelTerms {
    pub fn compute(ctx: &HeatContext, order: usize, dws: &[f64], opts: &ExpansionOptions) -> Result<Self> {
        check_order(order)?;
        check_samples(dws)?;
        let mut all = vec![0.0];
        all.extend_from_slice(dws);
        let dim = ctx.grid().len();
        let mut values = Vec::with_capacity(order);
        for n in 1..=order {
            let mut acc: Vec<CMat> = (0..all.len()).map(|_| linalg::zeros(dim)).collect();
            for comp in compositions(n, 3) {
                let sign = if comp.len() % 2 == 0 { 1.0 } else { -1.0 };
                let vals = simplex_integrals(ctx, &comp, &all, &rule_for(comp.len(), opts))?;
                for (a, v) in acc.iter_mut().zip(&vals) {
                    linalg::axpy(a, Complex64::new(sign, 0.0), v.as_ref());
                }
            }
            values.push(acc);
        }
        Ok(DuhamelTerms { order, dws: dws.to_vec(), values })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The terms up to `order` only.
    pub fn truncated(&self, order: usize) -> Result<Self> {
        check_order(order)?;
        if order > self.order {
            return Err(Error::domain(format!("terms were computed to order {}, asked for {order}", self.order)));
        }
        Ok(DuhamelTerms { order, dws: self.dws.clone(), values: self.values[..order].to_vec() })
    }

    /// The non-zero increments.
    pub fn increments(&self) -> &[f64] {
        &self.dws
    }

    /// `W_n` at the reference field.
    pub fn at_reference(&self, n: usize) -> &CMat {
        &self.values[n - 1][0]
    }

    /// `W_n` at the `s`-th increment.
    pub fn at(&self, n: usize, s: usize) -> &CMat {
        &self.values[n - 1][s + 1]
    }
}

/// Jets of `W_n` at the reference field, each to order `order - n`. A
/// top-order term already tabulated at the reference field is reused.
fn semigroup_term_jets(ctx: &HeatContext, order: usize, opts: &ExpansionOptions, known: Option<&DuhamelTerms>) -> Result<Vec<Jet>> {
    let mut out = Vec::with_capacity(order);
    for n in 1..=order {
        if let Some(t) = known.filter(|t| n == order && t.order() >= n) {
            out.push(Jet::constant(t.at_reference(n).clone(), 0));
            continue;
        }
        let mut acc = Jet::zero(order - n);
        for comp in compositions(n, 3) {
            let sign = if comp.len() % 2 == 0 { 1.0 } else { -1.0 };
            let j = simplex_integral_jet(ctx, &comp, order - n, &rule_for(comp.len(), opts))?;
            acc.add_scaled(Complex64::new(sign, 0.0), &j);
        }
        out.push(acc);
    }
    Ok(out)
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > 3 {
        return Err(Error::Unsupported(format!("expansion order {order} (1 to 3 supported)")));
    }
    Ok(())
}

fn check_samples(dws: &[f64]) -> Result<()> {
    if dws.is_empty() || dws.iter().any(|d| *d == 0.0 || !d.is_finite()) {
        return Err(Error::domain("field increments must be finite and non-zero"));
    }
    Ok(())
}

/// Expansion `W(omega0 + dw) = W~ + sum_(n<=N) dw^n W_n(dw) + R` with the
/// operator norm of `R` at each sample.
pub fn semigroup_expansion(ctx: &HeatContext, order: usize, dws: &[f64], opts: &ExpansionOptions) -> Result<ExpansionReport> {
    let terms = DuhamelTerms::compute(ctx, order, dws, opts)?;
    semigroup_expansion_from(ctx, &terms, opts)
}

/// [`semigroup_expansion`] from precomputed Duhamel terms.
pub fn semigroup_expansion_from(ctx: &HeatContext, terms: &DuhamelTerms, opts: &ExpansionOptions) -> Result<ExpansionReport> {
    let order = terms.order();
    let dws = terms.increments();
    let grid = ctx.grid();
    let beta = ctx.beta();
    let w0 = ctx.heat(beta);
    let coefficients: Vec<Complex64> = (1..=order).map(|n| linalg::trace(terms.at_reference(n).as_ref())).collect();
    let mut remainder = Vec::with_capacity(dws.len());
    for (s, &dw) in dws.iter().enumerate() {
        let exact = HeatContext::new(*grid, beta, ctx.omega0() + dw)?.heat(beta);
        let phi = ctx.phase(dw);
        let mut r = exact;
        linalg::axpy(&mut r, Complex64::new(-1.0, 0.0), linalg::hadamard(phi.as_ref(), w0.as_ref()).as_ref());
        for n in 1..=order {
            linalg::axpy(&mut r, Complex64::new(-dw.powi(n as i32), 0.0), terms.at(n, s).as_ref());
        }
        remainder.push(RemainderSample { delta_omega: dw, norm: linalg::op_norm(r.as_ref())? });
    }
    let area = grid.volume();
    Ok(ExpansionReport {
        kind: "semigroup".into(),
        order,
        side: grid.side(),
        n: grid.n(),
        beta,
        omega0: ctx.omega0(),
        point: None,
        coefficients_per_area: coefficients.iter().map(|c| c / area).collect(),
        coefficients,
        slope: remainder_slope(&remainder),
        remainder,
        trace_remainder: Vec::new(),
        trace_slope: None,
        cross_check: None,
        smallness: None,
        rule_single: opts.rule_single,
        rule_nested: opts.rule_nested,
    })
}

pub(crate) fn trace_g(values: &[f64], beta: f64, p: &LabPoint) -> Complex64 {
    values
        .iter()
        .map(|e| {
            let zw = p.z * (-beta * e).exp();
            zw / (p.xi - zw)
        })
        .sum()
}

/// Traces `a_1..a_N` of the field-expansion coefficients of
/// `Tr g(omega0 + dw) = Tr g(omega0) + sum_j a_j dw^j + O(dw^(N+1))`, from
/// the decomposition of `g` into its regularised part, the resolvent
/// corrections and the Duhamel terms.
pub fn trace_coefficients(ctx: &HeatContext, p: &LabPoint, order: usize, opts: &ExpansionOptions) -> Result<Vec<Complex64>> {
    trace_coefficients_with(ctx, p, order, opts, None)
}

fn trace_coefficients_with(
    ctx: &HeatContext,
    p: &LabPoint,
    order: usize,
    opts: &ExpansionOptions,
    known: Option<&DuhamelTerms>,
) -> Result<Vec<Complex64>> {
    check_order(order)?;
    if order > 2 {
        return Err(Error::Unsupported(format!("resolvent expansion order {order} (1 or 2 supported)")));
    }
    let k = order;
    let dim = ctx.grid().len();
    let (xi, z) = (p.xi, p.z);
    let one = Complex64::new(1.0, 0.0);
    let powers = ctx.phase_powers(k);
    let w0 = ctx.heat(ctx.beta());
    let g0 = ctx.resolvent(xi, z)?;
    let jw = Jet::regularized(&w0, &powers, k);
    let jg = Jet::regularized(&g0, &powers, k);
    let r_coeffs: Vec<CMat> = (1..=k).map(|n| resolvent_correction_op(&powers, n, z, &w0, &g0)).collect();
    let jr: Vec<Jet> = r_coeffs.iter().map(|r| Jet::regularized(r, &powers, k)).collect();
    let mut r_hat = Jet::zero(k);
    for (n, j) in jr.iter().enumerate() {
        r_hat.add_scaled(one, &j.shifted(n + 1));
    }
    // Traces of the regularised part M = g~ - r^/xi: phases drop on the diagonal.
    let mut total = vec![Complex64::new(0.0, 0.0); k + 1];
    total[0] = linalg::trace(g0.as_ref());
    for (n, r) in r_coeffs.iter().enumerate() {
        total[n + 1] -= linalg::trace(r.as_ref()) / xi;
    }
    // S_k with (xi - z W~)^-1 = sum_k dw^k S_k + O(dw^(N+1)).
    let mut one_plus_g = Jet::constant(linalg::identity(dim), k);
    one_plus_g.add_scaled(one, &jg);
    let s0 = one_plus_g.scaled(one / xi);
    let s1 = one_plus_g.mul(&jr[0]).scaled(-one / (xi * xi));
    let mut s_series = s0.clone();
    s_series.add_scaled(one, &s1.shifted(1));
    if k >= 2 {
        let mut s2 = one_plus_g.mul(&jr[1]).scaled(-one / (xi * xi));
        s2.add_scaled(one / (xi * xi * xi), &one_plus_g.mul(&jr[0]).mul(&jr[0]));
        s_series.add_scaled(one, &s2.shifted(2));
    }
    let tail = s_series.mul(&jw).mul(&r_hat).traces();
    for (q, t) in tail.iter().enumerate() {
        total[q] -= z / xi * t;
    }
    // Duhamel terms g_(L,n).
    let wn = semigroup_term_jets(ctx, k, opts, known)?;
    let w1 = wn[0].extended(k);
    let t1 = s0.mul(&w1).mul(&s0).scaled(z);
    let mut g1 = s0.mul(&w1).scaled(z);
    g1.add_scaled(z, &t1.mul(&jw));
    for (q, t) in g1.shifted(1).traces().iter().enumerate() {
        total[q] += t;
    }
    if k >= 2 {
        let w2 = wn[1].extended(k);
        let mut t2 = s0.mul(&w2).mul(&s0);
        t2.add_scaled(one, &s1.mul(&w1).mul(&s0));
        t2.add_scaled(one, &s0.mul(&w1).mul(&s1));
        let mut t2 = t2.scaled(z);
        t2.add_scaled(z * z, &s0.mul(&w1).mul(&s0).mul(&w1).mul(&s0));
        let mut g2 = s1.mul(&w1).scaled(z);
        g2.add_scaled(z, &t1.mul(&w1));
        g2.add_scaled(z, &s0.mul(&w2));
        g2.add_scaled(z, &t2.mul(&jw));
        for (q, t) in g2.shifted(2).traces().iter().enumerate() {
            total[q] += t;
        }
    }
    Ok(total[1..].to_vec())
}

/// Expansion of `g(omega0 + dw)` in the field increment: coefficient traces,
/// trace-norm remainders of the operator expansion, remainders of the trace
/// series and a finite-difference cross-check of `n! a_n`.
pub fn g_expansion_trace(ctx: &HeatContext, p: &LabPoint, order: usize, dws: &[f64], opts: &ExpansionOptions) -> Result<ExpansionReport> {
    check_order(order)?;
    check_samples(dws)?;
    if order > 2 {
        return Err(Error::Unsupported(format!("resolvent expansion order {order} (1 or 2 supported)")));
    }
    let terms = DuhamelTerms::compute(ctx, order, dws, opts)?;
    g_expansion_trace_from(ctx, p, &terms, opts)
}

/// [`g_expansion_trace`] from precomputed Duhamel terms.
pub fn g_expansion_trace_from(ctx: &HeatContext, p: &LabPoint, terms: &DuhamelTerms, opts: &ExpansionOptions) -> Result<ExpansionReport> {
    let order = terms.order();
    let dws = terms.increments();
    if order > 2 {
        return Err(Error::Unsupported(format!("resolvent expansion order {order} (1 or 2 supported)")));
    }
    let grid = *ctx.grid();
    let beta = ctx.beta();
    let (xi, z) = (p.xi, p.z);
    let one = Complex64::new(1.0, 0.0);
    let dim = grid.len();
    let w0 = ctx.heat(beta);
    let g0 = ctx.resolvent(xi, z)?;
    let powers = ctx.phase_powers(order);
    let r_coeffs: Vec<CMat> = (1..=order).map(|n| resolvent_correction_op(&powers, n, z, &w0, &g0)).collect();

    // Exact quantities at every sample, and the smallness condition.
    let mut exact_w = Vec::with_capacity(dws.len());
    let mut exact_g = Vec::with_capacity(dws.len());
    let mut exact_tr = Vec::with_capacity(dws.len());
    let gap0 = ctx.eigensystem().values.iter().map(|e| (xi - z * (-beta * e).exp()).norm()).fold(f64::INFINITY, f64::min);
    let mut m = 1.0 / gap0;
    let mut c1: f64 = 0.0;
    for &dw in dws {
        let c = HeatContext::new(grid, beta, ctx.omega0() + dw)?;
        let w = c.heat(beta);
        let wt = linalg::hadamard(ctx.phase(dw).as_ref(), w0.as_ref());
        let mut diff = w.clone();
        linalg::axpy(&mut diff, -one, wt.as_ref());
        c1 = c1.max(linalg::op_norm(diff.as_ref())? / dw.abs());
        let gap = c.eigensystem().values.iter().map(|e| (xi - z * (-beta * e).exp()).norm()).fold(f64::INFINITY, f64::min);
        m = m.max(1.0 / gap);
        exact_tr.push(trace_g(&c.eigensystem().values, beta, p));
        exact_g.push(c.resolvent(xi, z)?);
        exact_w.push(w);
    }
    let max_dw = dws.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let worst = c1 * m * max_dw * z.norm();
    if worst >= 0.5 {
        return Err(Error::Smallness(format!(
            "C1 M |dw| |z| = {worst:.3} >= 1/2 (C1 = {c1:.3}, M = {m:.3}, max |dw| = {max_dw})"
        )));
    }
    drop(exact_w);

    let coefficients = trace_coefficients_with(ctx, p, order, opts, Some(terms))?;
    let tr0 = linalg::trace(g0.as_ref());
    let mut remainder = Vec::with_capacity(dws.len());
    let mut trace_remainder = Vec::with_capacity(dws.len());
    for (s, &dw) in dws.iter().enumerate() {
        let phi = ctx.phase(dw);
        let reg = |m: &CMat| linalg::hadamard(phi.as_ref(), m.as_ref());
        let wt = reg(&w0);
        let gt = reg(&g0);
        let rt: Vec<CMat> = r_coeffs.iter().map(&reg).collect();
        let mut one_plus_g = gt.clone();
        for i in 0..dim {
            one_plus_g[(i, i)] += one;
        }
        let s0 = linalg::scale(one_plus_g.as_ref(), one / xi);
        let s1 = linalg::scale((&one_plus_g * &rt[0]).as_ref(), -one / (xi * xi));
        // (xi - z W~)^-1 z W~
        let mut a = linalg::scale(wt.as_ref(), -z);
        for i in 0..dim {
            a[(i, i)] += xi;
        }
        let zwt = linalg::scale(wt.as_ref(), z);
        let mut r = exact_g[s].clone();
        linalg::axpy(&mut r, -one, linalg::solve(a.as_ref(), zwt.as_ref()).as_ref());
        let w1 = terms.at(1, s);
        let t1 = linalg::scale((&(&s0 * w1) * &s0).as_ref(), z);
        let mut g1 = &s0 * w1;
        g1 = &g1 + &(&t1 * &wt);
        linalg::axpy(&mut r, Complex64::new(-dw, 0.0) * z, g1.as_ref());
        if order >= 2 {
            let w2 = terms.at(2, s);
            let mut t2 = &(&s0 * w2) * &s0;
            t2 = &t2 + &(&(&s1 * w1) * &s0);
            t2 = &t2 + &(&(&s0 * w1) * &s1);
            let t2 = &linalg::scale(t2.as_ref(), z) + &linalg::scale((&(&(&(&s0 * w1) * &s0) * w1) * &s0).as_ref(), z * z);
            let mut g2 = &s1 * w1;
            g2 = &g2 + &(&t1 * w1);
            g2 = &g2 + &(&s0 * w2);
            g2 = &g2 + &(&t2 * &wt);
            linalg::axpy(&mut r, Complex64::new(-dw * dw, 0.0) * z, g2.as_ref());
        }
        remainder.push(RemainderSample { delta_omega: dw, norm: linalg::trace_norm(r.as_ref())? });
        let series: Complex64 = coefficients.iter().enumerate().map(|(j, a)| a * dw.powi(j as i32 + 1)).sum();
        trace_remainder.push(RemainderSample { delta_omega: dw, norm: (exact_tr[s] - tr0 - series).norm() });
    }

    let cross_check = Some(cross_check(ctx, p, &coefficients, &opts.fd_steps)?);
    let area = grid.volume();
    Ok(ExpansionReport {
        kind: "resolvent".into(),
        order,
        side: grid.side(),
        n: grid.n(),
        beta,
        omega0: ctx.omega0(),
        point: Some(*p),
        coefficients_per_area: coefficients.iter().map(|c| c / area).collect(),
        coefficients,
        slope: remainder_slope(&remainder),
        remainder,
        trace_slope: remainder_slope(&trace_remainder),
        trace_remainder,
        cross_check,
        smallness: Some(Smallness { c1, m, worst_product: worst }),
        rule_single: opts.rule_single,
        rule_nested: opts.rule_nested,
    })
}

/// `d^n/d omega^n Tr g` for `n = 1..=order` at every point, by
/// Richardson-extrapolated differences of the spectral trace; indexed
/// `[point][n - 1]`. Spectra at shifted fields are shared.
pub fn trace_derivatives(grid: &BoxGrid, beta: f64, omega0: f64, points: &[LabPoint], order: usize, steps: &[f64]) -> Result<Vec<Vec<Derivative>>> {
    let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let mut per = Vec::with_capacity(order);
        for n in 1..=order {
            let d = richardson_sweep(n, steps, &mut |dw| {
                let key = dw.to_bits();
                if !cache.contains_key(&key) {
                    let h = spectrum::build_magnetic_hamiltonian_2d(grid, omega0 + dw)?;
                    cache.insert(key, spectrum::eigenvalues(&h)?.eigenvalues);
                }
                Ok(trace_g(&cache[&key], beta, p))
            })?;
            per.push(d);
        }
        out.push(per);
    }
    Ok(out)
}

/// Finite-difference derivatives of `Tr g` compared with `n! a_n`.
fn cross_check(ctx: &HeatContext, p: &LabPoint, coefficients: &[Complex64], steps: &[f64]) -> Result<TraceCrossCheck> {
    let ds = trace_derivatives(ctx.grid(), ctx.beta(), ctx.omega0(), &[*p], coefficients.len(), steps)?.remove(0);
    let mut fd = Vec::new();
    let mut fd_err = Vec::new();
    let mut from_coeff = Vec::new();
    let mut rel = Vec::new();
    for (j, (a, d)) in coefficients.iter().zip(&ds).enumerate() {
        let fact: f64 = (1..=j + 1).map(|k| k as f64).product();
        let c = a * fact;
        rel.push((c - d.value).norm() / d.value.norm().max(f64::MIN_POSITIVE));
        fd.push(d.value);
        fd_err.push(d.error);
        from_coeff.push(c);
    }
    Ok(TraceCrossCheck { fd_derivatives: fd, fd_errors: fd_err, coefficient_derivatives: from_coeff, relative_differences: rel })
}

/// Operator norm of `(xi - z W~) g~ - z W~ - r^` at field increment `dw`,
/// where `r^` is the regularised resolvent correction
/// `-z int (exp(i dw fl(x, y, x')) - 1) G(x, y) g(y, x') dy`.
pub fn identity_residual(ctx: &HeatContext, p: &LabPoint, dw: f64) -> Result<f64> {
    let (xi, z) = (p.xi, p.z);
    let one = Complex64::new(1.0, 0.0);
    let w0 = ctx.heat(ctx.beta());
    let g0 = ctx.resolvent(xi, z)?;
    let phi = ctx.phase(dw);
    let wt = linalg::hadamard(phi.as_ref(), w0.as_ref());
    let gt = linalg::hadamard(phi.as_ref(), g0.as_ref());
    // The triangle phase factorises: exp(i dw fl(x,y,x')) = Phi(x,y) Phi(y,x') Phi(x',x).
    let twisted = &wt * &gt;
    let plain = &w0 * &g0;
    let n = w0.nrows();
    let r_l = faer::Mat::from_fn(n, n, |i, j| -z * (phi[(j, i)] * twisted[(i, j)] - plain[(i, j)]));
    let r_hat = linalg::hadamard(phi.as_ref(), r_l.as_ref());
    let mut lhs = linalg::scale(gt.as_ref(), xi);
    linalg::axpy(&mut lhs, -z, (&wt * &gt).as_ref());
    linalg::axpy(&mut lhs, -z, wt.as_ref());
    linalg::axpy(&mut lhs, -one, r_hat.as_ref());
    linalg::op_norm(lhs.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(1, 3), vec![vec![1]]);
        assert_eq!(compositions(2, 3), vec![vec![1, 1], vec![2]]);
        assert_eq!(compositions(3, 3).len(), 4);
        assert_eq!(compositions(4, 3).len(), 7);
    }
}
