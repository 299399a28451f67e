//! Registry of named property checks at small sizes.

use super::study::CheckOutcome;
use crate::bulk::{free_gas_pressure, pressure_bulk, susceptibility_bulk, BulkMethod, ThermoParams};
use crate::finite_gas::{
    build_contour, pressure_contour, pressure_eigsum, susceptibility_finite, ChiMethod, FdOptions, FiniteBox, FugacityCompact,
};
use crate::kernel_lab::{
    diamagnetic_ratio, g_kernel, heat_kernel_grid, identity_residual, magnetic_phase, regularize, schur_holmgren_norm, triangle_flux,
    GridKernel, HeatContext, LabPoint,
};
use crate::linalg;
use crate::special_fn::{f_derivative, f_integral, f_series, f_value};
use crate::spectrum::{self, BoxGrid};
use crate::{Complex64, Error, Result, Statistics};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

type CheckFn = fn() -> Result<CheckOutcome>;

fn outcome(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome { name: name.into(), passed: value <= threshold, value, threshold, detail: detail.into() }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

const STATS: [Statistics; 2] = [Statistics::Bose, Statistics::Fermi];

fn disc_grid() -> impl Iterator<Item = Complex64> {
    (1..=10).flat_map(|i| (0..10).map(move |k| Complex64::from_polar(0.09 * i as f64, 2.0 * std::f64::consts::PI * k as f64 / 10.0)))
}

fn series_vs_integral() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for stats in STATS {
        for sigma in [0.5, 1.0, 1.5, 2.5] {
            for z in disc_grid() {
                worst = worst.max(rel(f_series(sigma, z, stats)?.value, f_integral(sigma, z, stats)?));
            }
        }
    }
    Ok(outcome("series_vs_integral", worst, 1e-10, "max relative difference on |zeta| <= 0.9"))
}

fn fermi_log() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for k in 0..=40 {
        let z = Complex64::new(0.05 * k as f64, 0.0);
        let v = f_value(1.0, z, Statistics::Fermi)?;
        worst = worst.max((v - (1.0 + z).ln()).norm() / (1.0 + z).ln().norm().max(1.0));
    }
    Ok(outcome("fermi_log", worst, 1e-12, "f_1 (Fermi) against ln(1 + zeta) on [0, 2]"))
}

fn ladder_identity() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for stats in STATS {
        for sigma in [1.5, 2.5] {
            for z in disc_grid() {
                let lhs = z * f_derivative(sigma, z, stats, 1)?;
                worst = worst.max(rel(lhs, f_value(sigma - 1.0, z, stats)?));
            }
        }
    }
    Ok(outcome("ladder_identity", worst, 1e-9, "zeta f'_sigma against f_(sigma-1)"))
}

fn conjugation_symmetry() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for stats in STATS {
        for z in disc_grid() {
            worst = worst.max(rel(f_value(1.5, z.conj(), stats)?, f_value(1.5, z, stats)?.conj()));
        }
    }
    Ok(outcome("conjugation_symmetry", worst, 1e-13, "f(conj zeta) against conj f(zeta)"))
}

fn bulk_free_limit() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for stats in STATS {
        let z = Complex64::new(0.5, 0.0);
        let p = ThermoParams::new(1.0, 1e-3, stats, z)?;
        worst = worst.max(rel(pressure_bulk(&p, 1e-15)?.value, free_gas_pressure(1.0, stats, z)?));
    }
    Ok(outcome("bulk_free_limit", worst, 1e-5, "Landau sum at omega beta = 1e-3 against the free gas"))
}

fn bulk_derivatives() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for stats in STATS {
        for n in [1, 2] {
            let p = ThermoParams::new(1.0, 1.0, stats, Complex64::new(0.4, 0.2))?;
            let a = susceptibility_bulk(&p, n, BulkMethod::Analytic)?.value;
            let f = susceptibility_bulk(&p, n, BulkMethod::FiniteDiff)?.value;
            worst = worst.max(rel(f, a));
        }
    }
    Ok(outcome("bulk_derivatives", worst, 1e-6, "analytic against differenced field derivatives, N = 1, 2"))
}

fn small_box() -> Result<FiniteBox> {
    FiniteBox::new(BoxGrid::new(4.0, 12, 2)?, 1.0)
}

fn contour_equivalence() -> Result<CheckOutcome> {
    let bx = small_box()?;
    let s = bx.spectrum(1.0)?;
    let mut worst: f64 = 0.0;
    let zs = [Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.5)];
    let k = FugacityCompact::new(zs.to_vec())?;
    let c = build_contour(&k, 1.0, s.ground().unwrap_or(0.0), None, 256)?;
    for stats in STATS {
        for z in zs {
            let p = ThermoParams::new(1.0, 1.0, stats, z)?;
            worst = worst.max(rel(pressure_contour(&s, &p, &c)?, pressure_eigsum(&s, &p)?.value));
        }
    }
    Ok(outcome("contour_equivalence", worst, 1e-8, "contour pressure against the eigenvalue sum, L = 4, n = 12"))
}

fn chi_methods() -> Result<CheckOutcome> {
    let bx = small_box()?;
    let opts = FdOptions::default();
    let mut worst: f64 = 0.0;
    for stats in STATS {
        let p = ThermoParams::new(1.0, 1.0, stats, Complex64::new(0.5, 0.0))?;
        let hf = susceptibility_finite(&bx, &p, 1, ChiMethod::Hellmann, &opts)?.value;
        let fd = susceptibility_finite(&bx, &p, 1, ChiMethod::EigFd, &opts)?.value;
        let cf = susceptibility_finite(&bx, &p, 1, ChiMethod::ContourFd, &opts)?.value;
        worst = worst.max(rel(fd, hf) / 1e-4).max(rel(cf, fd) / 1e-6);
    }
    Ok(outcome(
        "chi_methods",
        worst,
        1.0,
        "N = 1 method agreement, in units of the tolerances (1e-4 slopes vs eig_fd, 1e-6 eig_fd vs contour_fd)",
    ))
}

fn diamagnetic() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 32, 2)?;
    let mut worst: f64 = 0.0;
    for omega in [0.5, 1.0, 2.0] {
        worst = worst.max(diamagnetic_ratio(&heat_kernel_grid(&g, 1.0, omega)?, 1.0));
    }
    Ok(outcome("diamagnetic", worst - 1.0, 1e-3, "max |G_omega| / G_free - 1 at L = 4, n = 32, beta = 1"))
}

fn trace_bound() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 32, 2)?;
    let mut worst: f64 = 0.0;
    for omega in [0.0, 1.0] {
        let tr = heat_kernel_grid(&g, 1.0, omega)?.trace().re;
        worst = worst.max(tr / (g.volume() / (2.0 * std::f64::consts::PI)));
    }
    Ok(outcome("trace_bound", worst, 1.05, "Tr W / (L^2 (2 pi beta)^-1), L = 4, n = 32"))
}

fn hermiticity() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 10, 2)?;
    let d = spectrum::build_magnetic_hamiltonian_2d(&g, 1.3)?.hermiticity_defect();
    Ok(outcome("hermiticity", d, 1e-14, "max |H - H^*|"))
}

fn semigroup_property() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 10, 2)?;
    let ctx = HeatContext::new(g, 1.0, 1.0)?;
    let mut d = &ctx.heat(0.3) * &ctx.heat(0.7);
    linalg::axpy(&mut d, Complex64::new(-1.0, 0.0), ctx.heat(1.0).as_ref());
    Ok(outcome("semigroup_property", linalg::op_norm(d.as_ref())?, 1e-8, "||W(0.3) W(0.7) - W(1)||"))
}

fn random_kernel(rng: &mut ChaCha8Rng, g: &BoxGrid) -> Result<GridKernel> {
    let n = g.len();
    GridKernel::from_values(*g, Mat::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)))
}

fn regularization_trace() -> Result<CheckOutcome> {
    let g = BoxGrid::new(5.0, 8, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let k = random_kernel(&mut rng, &g)?;
        let dw = 4.0 * rng.random::<f64>() - 2.0;
        let r = regularize(&k, dw);
        worst = worst.max((r.trace() - k.trace()).norm());
    }
    Ok(outcome("regularization_trace", worst, 0.0, "|Tr K~ - Tr K| over 50 random kernels"))
}

fn phase_antisymmetry() -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = [rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0];
        let y = [rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0];
        worst = worst.max((magnetic_phase(x, y) + magnetic_phase(y, x)).abs()).max(magnetic_phase(x, x).abs());
    }
    Ok(outcome("phase_antisymmetry", worst, 0.0, "|phi(x,y) + phi(y,x)| and |phi(x,x)|"))
}

fn flux_bound() -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut pt = || [rng.random::<f64>() * 6.0 - 3.0, rng.random::<f64>() * 6.0 - 3.0];
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    for _ in 0..10_000 {
        let (x, y, w) = (pt(), pt(), pt());
        let bound = dist(x, y) * dist(y, w);
        if bound > 0.0 {
            worst = worst.max(triangle_flux(x, y, w).abs() / bound);
        }
    }
    Ok(outcome("flux_bound", worst, 1.0, "max |fl(x,y,x')| / (|x-y| |y-x'|) over 1e4 triples"))
}

fn gauge_conjugation() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 10, 2)?;
    let h = spectrum::build_magnetic_hamiltonian_2d(&g, 1.0)?;
    let pts = g.points();
    let c = [0.7, -0.4];
    let u: Vec<Complex64> = pts.iter().map(|&x| Complex64::from_polar(1.0, 0.8 * magnetic_phase(x, c))).collect();
    let m = h.matrix();
    let conj = Mat::from_fn(m.nrows(), m.ncols(), |i, j| u[i] * m[(i, j)] * u[j].conj());
    let a = linalg::eigvalsh(m.as_ref())?;
    let b = linalg::eigvalsh(conj.as_ref())?;
    let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(outcome("gauge_conjugation", worst, 1e-10, "eigenvalue shift under a diagonal phase conjugation"))
}

fn schur_holmgren() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 6, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = random_kernel(&mut rng, &g)?;
        worst = worst.max(k.op_norm()? / schur_holmgren_norm(&k));
    }
    Ok(outcome("schur_holmgren", worst, 1.0, "max operator norm / Schur-Holmgren bound over 20 random kernels"))
}

fn lab_point(beta: f64, e0: f64, z: Complex64) -> LabPoint {
    let r = (z.norm() * (-beta * e0).exp() + 1.0) / 2.0;
    LabPoint { xi: Complex64::from_polar(r, std::f64::consts::FRAC_PI_4), z }
}

fn g_relation() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 10, 2)?;
    let ctx = HeatContext::new(g, 1.0, 1.0)?;
    let p = lab_point(1.0, ctx.eigensystem().values[0], Complex64::new(0.5, 0.0));
    let gk = g_kernel(&g, 1.0, 1.0, p.xi, p.z)?.operator();
    let w = ctx.heat(1.0);
    let mut lhs = linalg::scale(gk.as_ref(), p.xi);
    linalg::axpy(&mut lhs, -p.z, (&w * &gk).as_ref());
    linalg::axpy(&mut lhs, -p.z, w.as_ref());
    Ok(outcome("g_relation", linalg::op_norm(lhs.as_ref())?, 1e-10, "||(xi - z W) g - z W||"))
}

fn trace_norm_g() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 10, 2)?;
    let ctx = HeatContext::new(g, 1.0, 1.0)?;
    let p = lab_point(1.0, ctx.eigensystem().values[0], Complex64::new(0.5, 0.0));
    let gk = g_kernel(&g, 1.0, 1.0, p.xi, p.z)?;
    let m = ctx.eigensystem().values.iter().map(|e| 1.0 / (p.xi - p.z * (-e).exp()).norm()).fold(0.0, f64::max);
    let trw = linalg::trace(ctx.heat(1.0).as_ref()).re;
    Ok(outcome("trace_norm_g", gk.trace_norm()? / (p.z.norm() * m * trw), 1.0, "||g||_1 / (|z| M Tr W)"))
}

fn resolvent_identity() -> Result<CheckOutcome> {
    let g = BoxGrid::new(4.0, 10, 2)?;
    let ctx = HeatContext::new(g, 1.0, 1.0)?;
    let p = lab_point(1.0, ctx.eigensystem().values[0], Complex64::new(0.5, 0.0));
    let r = identity_residual(&ctx, &p, 0.1)?;
    Ok(outcome("resolvent_identity", r, 1e-10, "||(xi - z W~) g~ - z W~ - r^|| at dw = 0.1"))
}

fn domain_errors() -> Result<CheckOutcome> {
    let cases: [(&str, bool); 4] = [
        ("series outside the disc", f_series(1.5, Complex64::new(1.2, 0.0), Statistics::Bose).is_err()),
        ("Bose on the cut", f_integral(1.5, Complex64::new(2.0, 0.0), Statistics::Bose).is_err()),
        ("non-positive beta", ThermoParams::new(0.0, 1.0, Statistics::Bose, Complex64::new(0.1, 0.0)).is_err()),
        ("empty fugacity set", FugacityCompact::new(Vec::new()).is_err()),
    ];
    let missed: Vec<&str> = cases.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok(outcome("domain_errors", missed.len() as f64, 0.0, if missed.is_empty() { "all rejected".to_string() } else { missed.join(", ") }))
}

/// Every registered check, in reporting order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("series_vs_integral", series_vs_integral),
    ("fermi_log", fermi_log),
    ("ladder_identity", ladder_identity),
    ("conjugation_symmetry", conjugation_symmetry),
    ("bulk_free_limit", bulk_free_limit),
    ("bulk_derivatives", bulk_derivatives),
    ("contour_equivalence", contour_equivalence),
    ("chi_methods", chi_methods),
    ("diamagnetic", diamagnetic),
    ("trace_bound", trace_bound),
    ("hermiticity", hermiticity),
    ("semigroup_property", semigroup_property),
    ("regularization_trace", regularization_trace),
    ("phase_antisymmetry", phase_antisymmetry),
    ("flux_bound", flux_bound),
    ("gauge_conjugation", gauge_conjugation),
    ("schur_holmgren", schur_holmgren),
    ("g_relation", g_relation),
    ("trace_norm_g", trace_norm_g),
    ("resolvent_identity", resolvent_identity),
    ("domain_errors", domain_errors),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!("{} {}: {:.3e} (threshold {:.3e}) {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold, c.detail));
        }
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        s.push_str(&format!("{n_pass}/{} checks passed\n", self.checks.len()));
        s
    }
}

/// Runs the selected checks; `"all"` expands to the whole registry. An
/// unknown name is a configuration error and nothing runs.
pub fn verify_suite<S: AsRef<str>>(selection: &[S]) -> Result<VerifyReport> {
    let mut chosen: Vec<(&str, CheckFn)> = Vec::new();
    for name in selection {
        let name = name.as_ref();
        if name == "all" {
            for c in CHECKS {
                if !chosen.iter().any(|x| x.0 == c.0) {
                    chosen.push(*c);
                }
            }
            continue;
        }
        let c = CHECKS
            .iter()
            .find(|c| c.0 == name)
            .ok_or_else(|| Error::Config(format!("unknown check '{name}'; known: all, {}", check_names().join(", "))))?;
        if !chosen.iter().any(|x| x.0 == c.0) {
            chosen.push(*c);
        }
    }
    let checks: Vec<CheckOutcome> = chosen
        .iter()
        .map(|(name, f)| {
            f().unwrap_or_else(|e| CheckOutcome { name: name.to_string(), passed: false, value: f64::NAN, threshold: f64::NAN, detail: format!("error: {e}") })
        })
        .collect();
    Ok(VerifyReport { passed: checks.iter().all(|c| c.passed), checks })
}
