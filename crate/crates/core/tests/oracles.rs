//! Library results against values computed here by unrelated routes:
//! naive series, closed forms, lattice sine modes and the Daleckii-Krein
//! formula.

use diamag::bulk::{pressure_bulk, susceptibility_bulk, BulkMethod, ThermoParams, LEVEL_TOL};
use diamag::finite_gas::{pressure_eigsum, FiniteBox};
use diamag::kernel_lab::{
    flux_moment, heat_kernel_grid, schur_holmgren_norm, triangle_flux, DuhamelTerms, ExpansionOptions, FactorKind, GridKernel,
    HeatContext,
};
use diamag::linalg::{self, CMat};
use diamag::special_fn::{f_value, gamma_value};
use diamag::spectrum::{self, BoxGrid};
use diamag::{Complex64, Statistics};
use faer::Mat;
use std::f64::consts::PI;

const BOTH: [Statistics; 2] = [Statistics::Bose, Statistics::Fermi];

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn naive_polylog(sigma: f64, z: Complex64, stats: Statistics) -> Complex64 {
    let eps = stats.sign();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 1..=4000 {
        zk *= z;
        let sign = if k % 2 == 1 { 1.0 } else { eps };
        sum += zk * (sign / (k as f64).powf(sigma));
    }
    sum
}

#[test]
fn f_matches_naive_series() {
    for stats in BOTH {
        for sigma in [0.5, 1.0, 1.5, 2.5, 3.5] {
            for r in [0.1, 0.4, 0.7] {
                for a in 0..8 {
                    let z = Complex64::from_polar(r, a as f64 * PI / 4.0 + 0.1);
                    let got = f_value(sigma, z, stats).unwrap();
                    let want = naive_polylog(sigma, z, stats);
                    assert!(rel(got, want) < 1e-13, "{stats:?} sigma={sigma} z={z}: {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn f_one_is_a_logarithm() {
    for x in [-0.9, -0.5, 0.0, 0.3, 0.8] {
        let z = Complex64::new(x, 0.2);
        let b = f_value(1.0, z, Statistics::Bose).unwrap();
        assert!((b + (Complex64::new(1.0, 0.0) - z).ln()).norm() < 1e-13);
        let f = f_value(1.0, z, Statistics::Fermi).unwrap();
        assert!((f - (Complex64::new(1.0, 0.0) + z).ln()).norm() < 1e-13);
    }
    // outside the unit disc on the Fermi side
    for x in [1.0, 1.5, 2.0, 5.0] {
        let f = f_value(1.0, Complex64::new(x, 0.0), Statistics::Fermi).unwrap();
        assert!((f.re - (1.0 + x).ln()).abs() < 1e-12, "{x}: {f}");
    }
}

#[test]
fn gamma_at_half_integers() {
    let sp = PI.sqrt();
    for (s, want) in [(0.5, sp), (1.5, sp / 2.0), (2.5, 0.75 * sp), (3.0, 2.0), (5.0, 24.0)] {
        assert!((gamma_value(s).unwrap() - want).abs() < 1e-13 * want);
    }
}

/// `omega (2 pi beta)^(-3/2) sum_j eps^(j+1) z^j / (j^(3/2) 2 sinh(j beta omega / 2))`,
/// the level sum done in closed form before the fugacity series.
fn landau_closed_form(beta: f64, omega: f64, stats: Statistics, z: Complex64) -> Complex64 {
    let eps = stats.sign();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zj = Complex64::new(1.0, 0.0);
    for j in 1..=3000 {
        zj *= z;
        let jf = j as f64;
        let sign = if j % 2 == 1 { 1.0 } else { eps };
        sum += zj * (sign * omega / (jf.powf(1.5) * 2.0 * (jf * beta * omega / 2.0).sinh()));
    }
    sum * (2.0 * PI * beta).powf(-1.5)
}

fn landau_closed_form_d1(beta: f64, omega: f64, stats: Statistics, z: Complex64) -> Complex64 {
    let eps = stats.sign();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zj = Complex64::new(1.0, 0.0);
    for j in 1..=3000 {
        zj *= z;
        let jf = j as f64;
        let c = jf * beta / 2.0;
        if c * omega > 300.0 {
            break;
        }
        let (s, ch) = ((c * omega).sinh(), (c * omega).cosh());
        let d = (1.0 / s - c * omega * ch / (s * s)) / 2.0;
        let sign = if j % 2 == 1 { 1.0 } else { eps };
        sum += zj * (sign * d / jf.powf(1.5));
    }
    sum * (2.0 * PI * beta).powf(-1.5)
}

#[test]
fn bulk_pressure_matches_closed_form() {
    for stats in BOTH {
        for omega in [0.5, 1.0, 2.0] {
            for beta in [0.5, 1.0, 2.0] {
                for z in [Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.2), Complex64::new(-0.4, 0.0), Complex64::new(0.0, 0.6)] {
                    let p = ThermoParams::new(beta, omega, stats, z).unwrap();
                    let got = pressure_bulk(&p, LEVEL_TOL).unwrap().value;
                    let want = landau_closed_form(beta, omega, stats, z);
                    assert!(rel(got, want) < 1e-12, "{stats:?} w={omega} b={beta} z={z}: {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn bulk_derivatives_match_closed_form() {
    for stats in BOTH {
        for omega in [0.5, 1.0, 2.0] {
            for z in [Complex64::new(0.5, 0.0), Complex64::new(0.3, -0.2)] {
                let p = ThermoParams::new(1.0, omega, stats, z).unwrap();
                let d1 = susceptibility_bulk(&p, 1, BulkMethod::Analytic).unwrap().value;
                let want1 = landau_closed_form_d1(1.0, omega, stats, z);
                assert!(rel(d1, want1) < 1e-11, "N=1 {stats:?} {omega} {z}: {d1} vs {want1}");

                let t = 1e-4;
                let want2 = (landau_closed_form_d1(1.0, omega + t, stats, z) - landau_closed_form_d1(1.0, omega - t, stats, z)) / (2.0 * t);
                let d2 = susceptibility_bulk(&p, 2, BulkMethod::Analytic).unwrap().value;
                assert!(rel(d2, want2) < 1e-6, "N=2 {stats:?} {omega} {z}: {d2} vs {want2}");
            }
        }
    }
}

fn sine_level(k: usize, n: usize, h: f64) -> f64 {
    2.0 / (h * h) * (k as f64 * PI / (2.0 * (n + 1) as f64)).sin().powi(2)
}

#[test]
fn zero_field_levels_are_lattice_sine_levels() {
    let grid = BoxGrid::new(3.0, 9, 2).unwrap();
    let h = grid.spacing();
    let mut want: Vec<f64> = Vec::new();
    for a in 1..=9 {
        for b in 1..=9 {
            want.push(sine_level(a, 9, h) + sine_level(b, 9, h));
        }
    }
    want.sort_by(f64::total_cmp);
    for ham in [spectrum::build_magnetic_hamiltonian_2d(&grid, 0.0).unwrap(), spectrum::build_free_hamiltonian(&grid)] {
        let got = spectrum::eigen_spectrum(&ham, None).unwrap().eigenvalues;
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-11 * w, "{g} vs {w}");
        }
    }
}

#[test]
fn one_dimensional_levels_approach_continuum() {
    // 1D free Dirichlet box of side 1: pi^2 k^2 / 2 up to O(h^2)
    let mut errs = Vec::new();
    for n in [31, 63] {
        let grid = BoxGrid::new(1.0, n, 1).unwrap();
        let s = spectrum::eigen_spectrum(&spectrum::build_free_hamiltonian(&grid), Some(4)).unwrap();
        let exact = spectrum::third_axis_levels(1.0, 4);
        let e: f64 = s.eigenvalues.iter().zip(&exact).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
        errs.push(e);
    }
    assert!(errs[0] < 2e-2, "{errs:?}");
    let ratio = errs[0] / errs[1];
    assert!((3.5..4.5).contains(&ratio), "second-order convergence expected, ratio {ratio}");
    let exact = spectrum::third_axis_levels(1.0, 4);
    for (k, e) in exact.iter().enumerate() {
        let want = [4.9348, 19.739, 44.413, 78.957][k];
        assert!((e - want).abs() < 1e-3, "{e} vs {want}");
    }
}

#[test]
fn box_spectrum_factorizes() {
    let bx = FiniteBox::new(BoxGrid::new(3.0, 8, 2).unwrap(), 1.0).unwrap();
    let cross = bx.cross_section(0.7).unwrap();
    let full = spectrum::assemble_3d_spectrum(&cross, 40).unwrap();
    let beta = 0.6;
    let lhs: f64 = full.eigenvalues.iter().map(|e| (-beta * e).exp()).sum();
    let a: f64 = cross.eigenvalues.iter().map(|e| (-beta * e).exp()).sum();
    let b: f64 = (1..=40).map(|k| (-beta * PI * PI * (k * k) as f64 / 18.0).exp()).sum();
    assert!((lhs - a * b).abs() < 1e-12 * lhs);
}

#[test]
fn box_pressure_is_the_level_log_sum() {
    let bx = FiniteBox::new(BoxGrid::new(3.0, 8, 2).unwrap(), 1.0).unwrap();
    let s = bx.spectrum(1.0).unwrap();
    for stats in BOTH {
        for z in [Complex64::new(0.5, 0.0), Complex64::new(0.2, 0.4)] {
            let p = ThermoParams::new(1.0, 1.0, stats, z).unwrap();
            let got = pressure_eigsum(&s, &p).unwrap().value;
            let eps = stats.sign();
            let want: Complex64 = s
                .eigenvalues
                .iter()
                .map(|e| -(Complex64::new(1.0, 0.0) - z * (-e).exp() * eps).ln() * eps)
                .sum::<Complex64>()
                / 27.0;
            assert!(rel(got, want) < 1e-12, "{got} vs {want}");
        }
    }
}

/// Lattice heat kernel at zero field from the tensor product of sine modes.
fn sine_heat_kernel(grid: &BoxGrid, beta: f64) -> CMat {
    let n = grid.n();
    let h = grid.spacing();
    let modes: Vec<Vec<f64>> = (1..=n)
        .map(|k| (0..n).map(|i| (2.0 / (n + 1) as f64).sqrt() * (k as f64 * PI * (i + 1) as f64 / (n + 1) as f64).sin()).collect())
        .collect();
    let decay: Vec<f64> = (1..=n).map(|k| (-beta * sine_level(k, n, h)).exp()).collect();
    let one_d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| modes[k][i] * modes[k][j] * decay[k]).sum()).collect())
        .collect();
    Mat::from_fn(grid.len(), grid.len(), |p, q| {
        let (i, j) = (p % n, p / n);
        let (a, b) = (q % n, q / n);
        Complex64::new(one_d[i][a] * one_d[j][b] / (h * h), 0.0)
    })
}

#[test]
fn zero_field_heat_kernel_is_the_sine_series() {
    let grid = BoxGrid::new(4.0, 12, 2).unwrap();
    let k = heat_kernel_grid(&grid, 1.0, 0.0).unwrap();
    let want = sine_heat_kernel(&grid, 1.0);
    let mut diff = k.values().clone();
    linalg::axpy(&mut diff, Complex64::new(-1.0, 0.0), want.as_ref());
    assert!(linalg::max_abs(diff.as_ref()) < 1e-11 * linalg::max_abs(want.as_ref()));
}

/// Continuum Dirichlet heat kernel on `[-l/2, l/2]`, 200 sine terms.
fn continuum_sine_1d(l: f64, beta: f64, a: f64, b: f64) -> f64 {
    (1..=200)
        .map(|k| {
            let kk = k as f64 * PI / l;
            2.0 / l * (kk * (a + l / 2.0)).sin() * (kk * (b + l / 2.0)).sin() * (-beta * kk * kk / 2.0).exp()
        })
        .sum()
}

#[test]
fn lattice_heat_kernel_converges_to_continuum() {
    let mut errs = Vec::new();
    for n in [15, 31] {
        let grid = BoxGrid::new(4.0, n, 2).unwrap();
        let k = heat_kernel_grid(&grid, 1.0, 0.0).unwrap();
        let table: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| continuum_sine_1d(4.0, 1.0, grid.coord(i), grid.coord(j))).collect()).collect();
        let mut worst: f64 = 0.0;
        for p in 0..grid.len() {
            for q in 0..grid.len() {
                let want = table[p % n][q % n] * table[p / n][q / n];
                worst = worst.max((k.value(p, q).re - want).abs());
            }
        }
        errs.push(worst);
    }
    let ratio = errs[0] / errs[1];
    assert!(errs[1] < 2e-3, "{errs:?}");
    assert!((3.0..5.0).contains(&ratio), "second-order convergence expected, {errs:?}");
}

#[test]
fn first_duhamel_term_is_the_daleckii_krein_derivative() {
    // d W / d omega = (i phi) . W + W_1(0), with d W / d omega from the
    // divided differences of exp(-beta x) in the eigenbasis.
    let grid = BoxGrid::new(3.0, 8, 2).unwrap();
    let (beta, omega0) = (1.0, 0.8);
    let ctx = HeatContext::new(grid, beta, omega0).unwrap();
    let opts = ExpansionOptions::default();
    let terms = DuhamelTerms::compute(&ctx, 1, &[0.01], &opts).unwrap();
    let w1 = terms.at_reference(1);

    let ham = spectrum::build_magnetic_hamiltonian_2d(&grid, omega0).unwrap();
    let t = 1e-5;
    let hp = spectrum::build_magnetic_hamiltonian_2d(&grid, omega0 + t).unwrap();
    let hm = spectrum::build_magnetic_hamiltonian_2d(&grid, omega0 - t).unwrap();
    let mut v = hp.matrix().clone();
    linalg::axpy(&mut v, Complex64::new(-1.0, 0.0), hm.matrix().as_ref());
    let v = linalg::scale(v.as_ref(), Complex64::new(1.0 / (2.0 * t), 0.0));

    let es = linalg::eigh(ham.matrix().as_ref()).unwrap();
    let u = &es.vectors;
    let vt = u.adjoint() * &v * u;
    let lam = &es.values;
    let f = |x: f64| (-beta * x).exp();
    let dd = Mat::from_fn(lam.len(), lam.len(), |i, j| {
        let (a, b) = (lam[i], lam[j]);
        let d = if (a - b).abs() < 1e-10 { -beta * f(0.5 * (a + b)) } else { (f(a) - f(b)) / (a - b) };
        vt[(i, j)] * d
    });
    let dw = u * &dd * u.adjoint();

    let w0 = ctx.heat(beta);
    let pts = grid.points();
    let mut expect = dw.clone();
    for p in 0..grid.len() {
        for q in 0..grid.len() {
            let phi = 0.5 * (pts[p][1] * pts[q][0] - pts[p][0] * pts[q][1]);
            expect[(p, q)] -= Complex64::new(0.0, phi) * w0[(p, q)];
        }
    }
    let mut diff = w1.clone();
    linalg::axpy(&mut diff, Complex64::new(-1.0, 0.0), expect.as_ref());
    let err = linalg::op_norm(diff.as_ref()).unwrap() / linalg::op_norm(expect.as_ref()).unwrap();
    assert!(err < 1e-6, "relative operator-norm error {err:e}");

    // and the trace is the Hellmann-Feynman slope of Tr W
    let hf: f64 = (0..lam.len()).map(|i| -beta * f(lam[i]) * vt[(i, i)].re).sum();
    assert!((linalg::trace(w1.as_ref()).re - hf).abs() < 1e-8 * hf.abs());
}

#[test]
fn triangle_flux_is_the_signed_area() {
    let cases = [([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]), ([0.3, -1.2], [2.0, 0.5], [-1.0, 0.7]), ([1.0, 1.0], [2.0, 2.0], [3.0, 3.0])];
    for (x, y, x2) in cases {
        let area = 0.5 * ((y[0] - x[0]) * (x2[1] - x[1]) - (y[1] - x[1]) * (x2[0] - x[0]));
        let fl = triangle_flux(x, y, x2);
        assert!((fl.abs() - area.abs()).abs() < 1e-14, "{fl} vs {area}");
        // orientation reverses the sign
        assert!((triangle_flux(x, x2, y) + fl).abs() < 1e-14);
    }
}

#[test]
fn schur_holmgren_reference_kernels() {
    let grid = BoxGrid::new(4.0, 10, 2).unwrap();
    let delta = GridKernel::from_operator(grid, linalg::identity(grid.len()));
    assert!((schur_holmgren_norm(&delta) - 1.0).abs() < 1e-12);

    let pts = grid.points();
    let gauss = GridKernel::from_values(
        grid,
        Mat::from_fn(grid.len(), grid.len(), |p, q| {
            Complex64::new(diamag::kernel_lab::free_heat_kernel(2, 0.5, pts[p], pts[q]), 0.0)
        }),
    )
    .unwrap();
    let sh = schur_holmgren_norm(&gauss);
    assert!(sh <= 1.0 + 1e-12, "{sh}");
    assert!(gauss.op_norm().unwrap() <= sh * (1.0 + 1e-12));
}

#[test]
fn flux_moment_zero_is_a_doubled_temperature_trace() {
    let grid = BoxGrid::new(3.0, 8, 2).unwrap();
    let ctx = HeatContext::new(grid, 0.7, 1.0).unwrap();
    let d = flux_moment(&ctx, 0, &[FactorKind::Heat], None).unwrap();
    let want: f64 = ctx.eigensystem().values.iter().map(|e| (-1.4 * e).exp()).sum();
    assert!((d.re - want).abs() < 1e-12 * want && d.im.abs() < 1e-12 * want);
}

#[test]
fn odd_flux_moments_vanish_at_zero_field() {
    let grid = BoxGrid::new(3.0, 8, 2).unwrap();
    let ctx = HeatContext::new(grid, 0.7, 0.0).unwrap();
    let scale = flux_moment(&ctx, 0, &[FactorKind::Heat, FactorKind::Heat], None).unwrap().norm();
    for (m, f) in [(1, vec![FactorKind::Heat, FactorKind::Heat]), (3, vec![FactorKind::Heat, FactorKind::Heat]), (1, vec![FactorKind::Heat; 3])] {
        let d = flux_moment(&ctx, m, &f, None).unwrap();
        assert!(d.norm() < 1e-10 * scale, "m={m}: {d}");
    }
}
