//! Flux moments of closed kernel chains,
//! `d_(m,n) = int [i fl(x, y_1, .., y_n)]^m t_0(x, y_1) t_1(y_1, y_2) .. t_n(y_n, x)`,
//! where `fl` is the flux through the closed polygon `x, y_1, .., y_n`.
//!
//! The polygon flux is a sum of edge phases, so the multinomial expansion
//! turns the moment into traces of products of phase-weighted matrices.

use super::{HeatContext, LabPoint};
use crate::fit::{loglog_fit, SlopeFit};
use crate::linalg::{self, CMat};
use crate::spectrum::BoxGrid;
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    /// The heat kernel `G` of `W = exp(-beta H)`.
    Heat,
    /// The kernel of `g = (xi - z W)^-1 z W`.
    Resolvent,
}

/// `d_(m,n)` with `t_0 = G` and `t_1..t_n` given by `factors`.
pub fn flux_moment(ctx: &HeatContext, m: usize, factors: &[FactorKind], point: Option<&LabPoint>) -> Result<Complex64> {
    if factors.is_empty() {
        return Err(Error::domain("a flux moment needs at least one factor after the heat kernel"));
    }
    let w = ctx.heat(ctx.beta());
    let g = if factors.contains(&FactorKind::Resolvent) {
        let p = point.ok_or_else(|| Error::domain("resolvent factors need (xi, z)"))?;
        Some(ctx.resolvent(p.xi, p.z)?)
    } else {
        None
    };
    let mut mats: Vec<&CMat> = vec![&w];
    for f in factors {
        mats.push(match f {
            FactorKind::Heat => &w,
            FactorKind::Resolvent => g.as_ref().expect("computed above"),
        });
    }
    let powers = ctx.phase_powers(m);
    let weighted = |k: usize, a: usize| -> CMat {
        if a == 0 {
            mats[k].clone()
        } else {
            linalg::hadamard(powers[a].as_ref(), mats[k].as_ref())
        }
    };
    fn rec(k: usize, rest: usize, prefix: Option<CMat>, count: usize, weighted: &dyn Fn(usize, usize) -> CMat) -> Complex64 {
        if k == count - 1 {
            let last = weighted(k, rest);
            return match prefix {
                Some(p) => linalg::trace_of_product(p.as_ref(), last.as_ref()),
                None => linalg::trace(last.as_ref()),
            };
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..=rest {
            let f = weighted(k, a);
            let next = match &prefix {
                Some(p) => p * &f,
                None => f,
            };
            acc += rec(k + 1, rest - a, Some(next), count, weighted);
        }
        acc
    }
    let mfact: f64 = (1..=m).map(|k| k as f64).product();
    Ok(rec(0, m, None, mats.len(), &weighted) * mfact)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentScaling {
    pub m: usize,
    pub factors: Vec<FactorKind>,
    pub sides: Vec<f64>,
    pub moments: Vec<Complex64>,
    pub fit: SlopeFit,
}

/// `d_(m,n)(L)` over a family of boxes and the log-log slope of `|d_(m,n)|` in `L`.
pub fn flux_moment_scaling(
    grids: &[BoxGrid],
    beta: f64,
    omega0: f64,
    m: usize,
    factors: &[FactorKind],
    point: Option<&LabPoint>,
) -> Result<MomentScaling> {
    if grids.len() < 2 {
        return Err(Error::domain("a scaling fit needs at least two boxes"));
    }
    let mut moments = Vec::with_capacity(grids.len());
    for g in grids {
        let ctx = HeatContext::new(*g, beta, omega0)?;
        moments.push(flux_moment(&ctx, m, factors, point)?);
    }
    let sides: Vec<f64> = grids.iter().map(|g| g.side()).collect();
    let mags: Vec<f64> = moments.iter().map(|d| d.norm()).collect();
    let fit = loglog_fit(&sides, &mags)?;
    Ok(MomentScaling { m, factors: factors.to_vec(), sides, moments, fit })
}
