use diamag::bulk::{pressure_bulk, ThermoParams, LEVEL_TOL};
use diamag::finite_gas::{build_contour, pressure_contour, pressure_eigsum, Contour, FiniteBox, FugacityCompact};
use diamag::kernel_lab::{magnetic_phase, phase_matrix, regularize, triangle_flux, GridKernel, HeatContext};
use diamag::linalg;
use diamag::special_fn::f_value;
use diamag::spectrum::{self, BoxGrid};
use diamag::{Complex64, Statistics};
use faer::Mat;
use proptest::prelude::*;

fn stats() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Bose), Just(Statistics::Fermi)]
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    [-5.0..5.0f64, -5.0..5.0f64]
}

fn disc(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, a)| Complex64::from_polar(m, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_is_real_on_reals_and_conjugation_symmetric(sigma in prop_oneof![Just(0.5), Just(1.5), Just(2.5)], z in disc(0.9), s in stats()) {
        let a = f_value(sigma, z, s).unwrap();
        let b = f_value(sigma, z.conj(), s).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-14 * a.norm().max(1e-300));
        let r = f_value(sigma, Complex64::new(z.re, 0.0), s).unwrap();
        prop_assert_eq!(r.im, 0.0);
    }

    #[test]
    fn phase_is_antisymmetric_and_vanishes_on_the_diagonal(x in point(), y in point()) {
        prop_assert_eq!(magnetic_phase(x, y), -magnetic_phase(y, x));
        prop_assert_eq!(magnetic_phase(x, x), 0.0);
    }

    #[test]
    fn triangle_flux_is_bounded_by_side_lengths(x in point(), y in point(), x2 in point()) {
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        prop_assert!(triangle_flux(x, y, x2).abs() <= d(x, y) * d(y, x2) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn bulk_pressure_is_real_for_real_fugacity(beta in 0.3..3.0f64, omega in 0.2..3.0f64, zr in -0.9..0.9f64, s in stats()) {
        let p = ThermoParams::new(beta, omega, s, Complex64::new(zr, 0.0)).unwrap();
        let v = pressure_bulk(&p, LEVEL_TOL).unwrap().value;
        prop_assert_eq!(v.im, 0.0);
        // sign follows the fugacity for small |z|
        if zr != 0.0 { prop_assert_eq!(v.re.signum(), zr.signum()); }
    }

    #[test]
    fn bulk_pressure_conjugation(beta in 0.3..3.0f64, omega in 0.2..3.0f64, z in disc(0.9), s in stats()) {
        let a = pressure_bulk(&ThermoParams::new(beta, omega, s, z).unwrap(), LEVEL_TOL).unwrap().value;
        let b = pressure_bulk(&ThermoParams::new(beta, omega, s, z.conj()).unwrap(), LEVEL_TOL).unwrap().value;
        prop_assert!((a.conj() - b).norm() <= 1e-14 * a.norm().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hamiltonian_is_hermitian_and_gauge_covariant(l in 1.0..6.0f64, n in 3usize..9, omega in -2.0..2.0f64, dw in -1.0..1.0f64) {
        let grid = BoxGrid::new(l, n, 2).unwrap();
        let h0 = spectrum::build_magnetic_hamiltonian_2d(&grid, omega).unwrap();
        prop_assert!(h0.hermiticity_defect() <= 1e-14 * linalg::max_abs(h0.matrix().as_ref()));
        let h1 = spectrum::build_magnetic_hamiltonian_2d(&grid, omega + dw).unwrap();
        let expect = linalg::hadamard(phase_matrix(&grid, dw).as_ref(), h0.matrix().as_ref());
        let mut diff = h1.matrix().clone();
        linalg::axpy(&mut diff, Complex64::new(-1.0, 0.0), expect.as_ref());
        prop_assert!(linalg::max_abs(diff.as_ref()) <= 1e-12 * linalg::max_abs(h0.matrix().as_ref()));
    }

    #[test]
    fn spectrum_is_positive_sorted_and_counted(l in 1.0..6.0f64, n in 3usize..9, omega in 0.0..3.0f64) {
        let grid = BoxGrid::new(l, n, 2).unwrap();
        let s = spectrum::eigen_spectrum(&spectrum::build_magnetic_hamiltonian_2d(&grid, omega).unwrap(), None).unwrap();
        prop_assert!(s.eigenvalues.len() <= n * n);
        prop_assert!(s.eigenvalues[0] > 0.0);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn regularization_keeps_the_trace(n in 2usize..7, dw in -3.0..3.0f64, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = BoxGrid::new(2.5, n, 2).unwrap();
        let k = GridKernel::from_values(grid, Mat::from_fn(grid.len(), grid.len(), |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).unwrap();
        prop_assert_eq!(regularize(&k, dw).trace(), k.trace());
    }

    #[test]
    fn gauge_conjugation_keeps_the_spectrum(n in 3usize..7, dw in -2.0..2.0f64, c in point()) {
        let grid = BoxGrid::new(3.0, n, 2).unwrap();
        let ctx = HeatContext::new(grid, 0.8, 1.0).unwrap();
        let w = ctx.heat(0.8);
        let pts = grid.points();
        let u: Vec<Complex64> = pts.iter().map(|&x| Complex64::from_polar(1.0, dw * magnetic_phase(x, c))).collect();
        let conj = Mat::from_fn(grid.len(), grid.len(), |p, q| u[p] * w[(p, q)] * u[q].conj());
        let a = linalg::eigvalsh(w.as_ref()).unwrap();
        let b = linalg::eigvalsh(conj.as_ref()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * a.last().unwrap().abs());
        }
    }

    #[test]
    fn semigroup_property(n in 3usize..7, b1 in 0.1..1.5f64, b2 in 0.1..1.5f64, omega in 0.0..2.0f64) {
        let grid = BoxGrid::new(3.0, n, 2).unwrap();
        let ctx = HeatContext::new(grid, b1, omega).unwrap();
        let k1 = GridKernel::from_operator(grid, ctx.heat(b1));
        let k2 = GridKernel::from_operator(grid, ctx.heat(b2));
        let k12 = GridKernel::from_operator(grid, ctx.heat(b1 + b2));
        let mut d = k1.compose(&k2).operator();
        linalg::axpy(&mut d, Complex64::new(-1.0, 0.0), k12.operator().as_ref());
        prop_assert!(linalg::op_norm(d.as_ref()).unwrap() <= 1e-8);
    }

    #[test]
    fn contour_pressure_is_radius_independent(z in disc(0.6), s in stats(), t in 0.1..0.9f64) {
        let bx = FiniteBox::new(BoxGrid::new(3.0, 6, 2).unwrap(), 1.0).unwrap();
        let sp = bx.spectrum(1.0).unwrap();
        let p = ThermoParams::new(1.0, 1.0, s, z).unwrap();
        let k = FugacityCompact::new(vec![z]).unwrap();
        let e0 = sp.ground().unwrap();
        let base = build_contour(&k, 1.0, e0, None, 256).unwrap();
        // any admissible radius between the fugacity image and the cut
        let lo = z.norm() * (-e0).exp();
        let r = lo + t * (1.0 - lo);
        let a = pressure_contour(&sp, &p, &base).unwrap();
        let b = pressure_contour(&sp, &p, &Contour::circle(r, 256).unwrap());
        let direct = pressure_eigsum(&sp, &p).unwrap().value;
        prop_assert!((a - direct).norm() <= 1e-10 * direct.norm().max(1e-300));
        if let Ok(b) = b {
            prop_assert!((a - b).norm() <= 1e-8 * direct.norm().max(1e-300), "{} vs {} at r={}", a, b, r);
        }
    }
}
