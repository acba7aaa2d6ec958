//! Cross-checks against independent oracles: direct sums, quadrature of the
//! defining integrals, and values worked out by residues.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratfourier_core::kernels::{
    cd_kernel_minus, cd_kernel_plus, mu, mu_derivatives, phase_integral,
};
use ratfourier_core::quadrature::{fourier_coefficient, inner_product};
use ratfourier_core::series::{lp_error, partial_sum_coefficients};
use ratfourier_core::{targets, BasisSystem, Complex64, Integrator, PoleSequence};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mixed_poles() -> PoleSequence {
    PoleSequence::upper(vec![
        c(0.0, 2.0),
        c(1.0, 1.0),
        c(-1.0, 2.0),
        c(0.0, 3.0),
        c(0.5, 1.5),
        c(-0.5, 1.0),
    ])
    .unwrap()
}

#[test]
fn gram_matrix_is_identity() {
    let sys = BasisSystem::conjugate_paired(mixed_poles()).unwrap();
    let q = Integrator::new(1e-12);
    let mut worst = 0.0f64;
    for j in -5..=5i64 {
        for k in j..=5i64 {
            let g = inner_product(&q, |x| sys.phi_real(j, x), |x| sys.phi_real(k, x)).unwrap();
            let expect = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g - c(expect, 0.0)).norm());
        }
    }
    assert!(worst < 1e-8, "max Gram deviation {worst:e}");
}

#[test]
fn gram_matrix_general_system() {
    let up = PoleSequence::upper(vec![c(0.3, 0.8), c(-2.0, 1.7), c(1.0, 0.5)]).unwrap();
    let lo = PoleSequence::lower(vec![c(0.0, -1.0), c(2.0, -0.6), c(-1.0, -2.5)]).unwrap();
    let sys = BasisSystem::new(up, lo).unwrap();
    let q = Integrator::new(1e-12);
    for j in -3..=2i64 {
        for k in -3..=2i64 {
            let g = inner_product(&q, |x| sys.phi_real(j, x), |x| sys.phi_real(k, x)).unwrap();
            let expect = if j == k { 1.0 } else { 0.0 };
            assert!((g - c(expect, 0.0)).norm() < 1e-8, "<Φ_{j}, Φ_{k}> = {g}");
        }
    }
}

fn random_off_pole(rng: &mut ChaCha8Rng, poles: &[Complex64]) -> Complex64 {
    loop {
        let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        if poles
            .iter()
            .all(|p| (z - p).norm() > 0.05 && (z - p.conj()).norm() > 0.05)
        {
            return z;
        }
    }
}

#[test]
fn christoffel_darboux_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let up = PoleSequence::upper(
        (0..8)
            .map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0)))
            .collect(),
    )
    .unwrap();
    let sys = BasisSystem::conjugate_paired(up.clone()).unwrap();
    let all: Vec<Complex64> = up.poles().to_vec();
    let mut done = 0;
    while done < 100 {
        let z = random_off_pole(&mut rng, &all);
        let zeta = random_off_pole(&mut rng, &all);
        if (zeta.conj() - z).norm() <= 0.1 {
            continue;
        }
        let n = rng.random_range(1..=8usize);
        let m = rng.random_range(1..=8usize);
        let direct_plus: Complex64 = (0..n as i64)
            .map(|k| sys.phi(k, zeta).unwrap().conj() * sys.phi(k, z).unwrap())
            .sum();
        let direct_minus: Complex64 = (1..m as i64)
            .map(|k| sys.phi(-k, zeta).unwrap().conj() * sys.phi(-k, z).unwrap())
            .sum();
        let plus = cd_kernel_plus(&up, n, z, zeta).unwrap();
        let minus = cd_kernel_minus(sys.lower(), m, z, zeta).unwrap();
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(1e-300);
        assert!(rel(plus, direct_plus) < 1e-10, "n={n} z={z} ζ={zeta}");
        if m > 1 {
            assert!(rel(minus, direct_minus) < 1e-10, "m={m} z={z} ζ={zeta}");
        } else {
            assert!(minus.norm() < 1e-15);
        }
        done += 1;
    }
}

#[test]
fn residue_coefficient_of_lorentzian() {
    // (1/π)∫ √2/((1+x²)(x−2i)) dx, closed in the lower half-plane: i√2/3
    let sys =
        BasisSystem::conjugate_paired(PoleSequence::upper(vec![c(0.0, 2.0)]).unwrap()).unwrap();
    let c0 = fourier_coefficient(&Integrator::new(1e-12), &sys, &targets::lorentzian(), 0).unwrap();
    assert!(
        (c0 - c(0.0, 2f64.sqrt() / 3.0)).norm() < 1e-10,
        "c_0 = {c0}"
    );
}

#[test]
fn basis_function_has_unit_coefficient() {
    let sys = BasisSystem::conjugate_paired(mixed_poles()).unwrap();
    let f = targets::basis_combination(&sys, &[(0, c(1.0, 0.0))]).unwrap();
    let q = Integrator::new(1e-12);
    for k in -3..=3i64 {
        let ck = fourier_coefficient(&q, &sys, &f, k).unwrap();
        let expect = if k == 0 { 1.0 } else { 0.0 };
        assert!((ck - c(expect, 0.0)).norm() < 1e-9, "c_{k} = {ck}");
    }
}

#[test]
fn coefficients_are_linear() {
    let sys = BasisSystem::conjugate_paired(mixed_poles()).unwrap();
    let q = Integrator::new(1e-12);
    let (f, g) = (targets::gaussian(), targets::lorentzian());
    let (alpha, beta) = (c(0.7, -1.2), c(-2.0, 0.3));
    let h = ratfourier_core::TargetFunction::linear_combination(alpha, &f, beta, &g);
    for k in [-4, -1, 0, 2, 5] {
        let lhs = fourier_coefficient(&q, &sys, &h, k).unwrap();
        let rhs = alpha * fourier_coefficient(&q, &sys, &f, k).unwrap()
            + beta * fourier_coefficient(&q, &sys, &g, k).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn l2_error_matches_bessel_identity() {
    // ‖f − S_n f‖² = ‖f‖² − π Σ|c_k|², with ∫(1+x²)^{-2} dx = π/2
    let up = PoleSequence::upper(vec![c(0.0, 2.0); 8]).unwrap();
    let sys = BasisSystem::conjugate_paired(up).unwrap();
    let q = Integrator::new(1e-12);
    let f = targets::lorentzian();
    for n in [1, 3, 8] {
        let coeffs = partial_sum_coefficients(&q, &sys, &f, n).unwrap();
        let energy: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let oracle = (PI / 2.0 - PI * energy).max(0.0).sqrt();
        let err = lp_error(&q, &sys, &f, n, 2.0).unwrap();
        assert!(
            (err - oracle).abs() < 1e-6 * (1.0 + oracle),
            "n={n}: {err} vs {oracle}"
        );
    }
}

fn rho(poles: &[Complex64], u: f64) -> f64 {
    poles
        .iter()
        .map(|a| a.im / ((u - a.re).powi(2) + a.im * a.im))
        .sum()
}

#[test]
fn mu_matches_quadrature_of_its_integrand() {
    // μ_n(y; x) = (2/y) ∫_x^{x+y} Σ γ_k/((u−α_k)²+γ_k²) du
    let up = mixed_poles();
    let n = up.len();
    let q = Integrator::new(1e-13);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let x = rng.random_range(-5.0..5.0);
        let y = rng.random_range(-5.0..5.0);
        let oracle = q
            .integrate_interval(|u| c(2.0 * rho(up.poles(), u), 0.0), x, x + y)
            .unwrap()
            .value
            .re
            / y;
        let got = mu(&up, n, x, y).unwrap();
        assert!(
            (got - oracle).abs() < 1e-10,
            "x={x} y={y}: {got} vs {oracle}"
        );
    }
}

#[test]
fn mu_derivatives_match_central_differences() {
    let up = mixed_poles();
    let n = up.len();
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let x = rng.random_range(-5.0..5.0);
        let y = rng.random_range(-5.0..5.0);
        let d = mu_derivatives(&up, n, x, y).unwrap();
        let g = |yy: f64| phase_integral(&up, n, x, yy).unwrap();
        let fd1 = (g(y + h) - g(y - h)) / (2.0 * h);
        let gp = |yy: f64| mu_derivatives(&up, n, x, yy).unwrap().d_y_of_y_mu;
        let fd2 = (gp(y + h) - gp(y - h)) / (2.0 * h);
        assert!((d.d_y_of_y_mu - fd1).abs() < 1e-6, "x={x} y={y}");
        assert!((d.d2_y_of_y_mu - fd2).abs() < 1e-6, "x={x} y={y}");
    }
}
