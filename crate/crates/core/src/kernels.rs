//! Christoffel–Darboux and Dirichlet kernels of the rational system, and the
//! phase function `μ_n(y; x)`.
//!
//! All phases are accumulated pole by pole from arctangent differences, never
//! by taking the argument of a product of Blaschke factors, so phases larger
//! than `π` do not wrap.

use num_complex::Complex64;

use crate::basis::{blaschke_minus, blaschke_plus, BasisSystem};
use crate::error::{Error, Result};
use crate::poles::PoleSequence;

/// `|t − x|` below `DIAGONAL_THRESHOLD · (1 + |x|)` switches the Dirichlet
/// kernels to their Taylor expansion about the diagonal.
pub const DIAGONAL_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    DirectSum,
    ClosedForm,
    SineForm,
    DiagonalLimit,
}

/// What to do when `t` is on (or numerically at) the diagonal `t = x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalPolicy {
    #[default]
    Limit,
    Forbid,
}

/// A Dirichlet kernel value `D_{n,m}(x, t)` with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEvaluation {
    pub value: Complex64,
    pub method: KernelMethod,
    pub n: usize,
    pub m: usize,
    pub x: f64,
    pub t: f64,
}

/// `∫_x^t Im p / ((u − Re p)² + (Im p)²) du`.
///
/// Equal to `arctan((t − Re p)/Im p) − arctan((x − Re p)/Im p)`, evaluated as
/// a single `atan2` so the difference keeps its digits as `t → x`. Valid in
/// either half-plane.
pub fn phase_increment(p: Complex64, x: f64, t: f64) -> f64 {
    let g = p.im;
    let u = (t - p.re) / g;
    let v = (x - p.re) / g;
    ((t - x) / g).atan2(1.0 + u * v)
}

fn phase_sum(poles: &[Complex64], x: f64, t: f64) -> f64 {
    poles.iter().map(|&p| phase_increment(p, x, t)).sum()
}

/// `Σ Im p / ((u − Re p)² + (Im p)²)`: the derivative of [`phase_sum`] in `t`.
fn phase_density(poles: &[Complex64], u: f64) -> f64 {
    poles
        .iter()
        .map(|p| {
            let d = u - p.re;
            p.im / (d * d + p.im * p.im)
        })
        .sum()
}

/// Derivative of [`phase_density`] in `u`.
fn phase_density_slope(poles: &[Complex64], u: f64) -> f64 {
    poles
        .iter()
        .map(|p| {
            let d = u - p.re;
            let q = d * d + p.im * p.im;
            -2.0 * p.im * d / (q * q)
        })
        .sum()
}

fn on_diagonal(x: f64, t: f64) -> bool {
    (t - x).abs() < DIAGONAL_THRESHOLD * (1.0 + x.abs())
}

fn check_degenerate(z: Complex64, zeta: Complex64) -> Result<Complex64> {
    let gap = zeta.conj() - z;
    if gap.norm() < 1e-13 * (1.0 + z.norm()) {
        Err(Error::DegenerateArguments("conj(zeta) equals z"))
    } else {
        Ok(gap)
    }
}

/// Closed form of `Σ_{k=0}^{n−1} conj(Φ⁺_k(ζ)) Φ⁺_k(z)`:
/// `[1 − conj(B⁺_n(ζ)) B⁺_n(z)] / (2i (ζ̄ − z))`.
pub fn cd_kernel_plus(
    upper: &PoleSequence,
    n: usize,
    z: Complex64,
    zeta: Complex64,
) -> Result<Complex64> {
    let gap = check_degenerate(z, zeta)?;
    let bz = blaschke_plus(upper, n, z)?;
    let bzeta = blaschke_plus(upper, n, zeta)?;
    Ok((Complex64::new(1.0, 0.0) - bzeta.conj() * bz) / (Complex64::new(0.0, 2.0) * gap))
}

/// Closed form of `Σ_{k=1}^{m−1} conj(Φ⁻_k(ζ)) Φ⁻_k(z)`:
/// `[conj(B⁻_m(ζ)) B⁻_m(z) − 1] / (2i (ζ̄ − z))`.
pub fn cd_kernel_minus(
    lower: &PoleSequence,
    m: usize,
    z: Complex64,
    zeta: Complex64,
) -> Result<Complex64> {
    let gap = check_degenerate(z, zeta)?;
    let bz = blaschke_minus(lower, m, z)?;
    let bzeta = blaschke_minus(lower, m, zeta)?;
    Ok((bzeta.conj() * bz - Complex64::new(1.0, 0.0)) / (Complex64::new(0.0, 2.0) * gap))
}

fn check_orders(system: &BasisSystem, n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "Dirichlet kernel requires m >= 1".into(),
        ));
    }
    system.upper().prefix(n)?;
    system.lower().prefix(m - 1)?;
    Ok(())
}

/// `D_{n,m}(x, t) = Σ_{k=−m+1}^{n−1} conj(Φ_k(x)) Φ_k(t)` by direct summation.
pub fn dirichlet_direct(
    system: &BasisSystem,
    n: usize,
    m: usize,
    x: f64,
    t: f64,
) -> Result<KernelEvaluation> {
    check_orders(system, n, m)?;
    let lo = 1 - m as i64;
    let hi = n as i64 - 1;
    let px = system.phi_range_real(lo, hi, x)?;
    let pt = system.phi_range_real(lo, hi, t)?;
    let value = px
        .iter()
        .zip(&pt)
        .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b);
    Ok(KernelEvaluation {
        value,
        method: KernelMethod::DirectSum,
        n,
        m,
        x,
        t,
    })
}

/// `D_{n,m}(x, t)` in exponential form.
///
/// With `I_a = ∫_x^t Σ_{k<n} Im a_k/|u − a_k|² du` and `I_b` the analogous
/// sum over `b_1..b_{m−1}`, `D = e^{i(I_a + I_b)} sin(I_a − I_b) / (t − x)`.
/// Near the diagonal a first-order Taylor expansion in `t − x` is used unless
/// `policy` forbids it.
pub fn dirichlet_closed_with(
    system: &BasisSystem,
    n: usize,
    m: usize,
    x: f64,
    t: f64,
    policy: DiagonalPolicy,
) -> Result<KernelEvaluation> {
    check_orders(system, n, m)?;
    let a = system.upper().prefix(n)?;
    let b = system.lower().prefix(m - 1)?;
    let h = t - x;
    let (value, method) = if on_diagonal(x, t) {
        if policy == DiagonalPolicy::Forbid {
            return Err(Error::DegenerateArguments("t is on the diagonal t = x"));
        }
        let (rho_a, rho_b) = (phase_density(a, x), phase_density(b, x));
        let r1 = rho_a - rho_b;
        let r2 = phase_density_slope(a, x) - phase_density_slope(b, x);
        let s1 = rho_a + rho_b;
        (
            Complex64::new(r1 + 0.5 * r2 * h, r1 * s1 * h),
            KernelMethod::DiagonalLimit,
        )
    } else {
        let (ia, ib) = (phase_sum(a, x, t), phase_sum(b, x, t));
        (
            Complex64::from_polar((ia - ib).sin() / h, ia + ib),
            KernelMethod::ClosedForm,
        )
    };
    Ok(KernelEvaluation {
        value,
        method,
        n,
        m,
        x,
        t,
    })
}

/// [`dirichlet_closed_with`] taking the diagonal limit where needed.
pub fn dirichlet_closed(
    system: &BasisSystem,
    n: usize,
    m: usize,
    x: f64,
    t: f64,
) -> Result<KernelEvaluation> {
    dirichlet_closed_with(system, n, m, x, t, DiagonalPolicy::Limit)
}

/// Sine form of `D_{n,n+1}` for the conjugate-paired system `b_k = ā_{k−1}`:
/// `sin(A) / (t − x)` with `A = ∫_x^t Σ_{k<n} 2 Im a_k / |u − a_k|² du`.
///
/// Symmetric in `(x, t)` and real. On the diagonal returns
/// `A′(x) + A″(x)(t − x)/2`.
pub fn dirichlet_sine(upper: &PoleSequence, n: usize, x: f64, t: f64) -> Result<f64> {
    Ok(sine_kernel(upper.prefix(n)?, x, t))
}

pub(crate) fn sine_kernel(poles: &[Complex64], x: f64, t: f64) -> f64 {
    let h = t - x;
    if on_diagonal(x, t) {
        2.0 * phase_density(poles, x) + phase_density_slope(poles, x) * h
    } else {
        (2.0 * phase_sum(poles, x, t)).sin() / h
    }
}

/// `y·μ_n(y; x) = ∫_x^{x+y} Σ_{k<n} 2 Im a_k / |u − a_k|² du`.
///
/// Defined for every real `y`, including 0.
pub fn phase_integral(upper: &PoleSequence, n: usize, x: f64, y: f64) -> Result<f64> {
    Ok(2.0 * phase_sum(upper.prefix(n)?, x, x + y))
}

/// `μ_n(y; x)`, the mean of the phase density over `[x, x + y]`
/// (or `[x + y, x]` for negative `y`).
pub fn mu(upper: &PoleSequence, n: usize, x: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::ZeroWidth);
    }
    Ok(phase_integral(upper, n, x, y)? / y)
}

/// `lim_{y→0} μ_n(y; x)`, the phase density at `x`.
pub fn mu_limit(upper: &PoleSequence, n: usize, x: f64) -> Result<f64> {
    Ok(2.0 * phase_density(upper.prefix(n)?, x))
}

/// First and second `y`-derivatives of `y·μ_n(y; x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuDerivatives {
    pub d_y_of_y_mu: f64,
    pub d2_y_of_y_mu: f64,
}

pub fn mu_derivatives(upper: &PoleSequence, n: usize, x: f64, y: f64) -> Result<MuDerivatives> {
    let poles = upper.prefix(n)?;
    Ok(MuDerivatives {
        d_y_of_y_mu: 2.0 * phase_density(poles, x + y),
        d2_y_of_y_mu: 2.0 * phase_density_slope(poles, x + y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_i() -> PoleSequence {
        PoleSequence::upper(vec![c(0.0, 2.0)]).unwrap()
    }

    #[test]
    fn phase_increment_matches_arctan_difference() {
        for &(p, x, t) in &[
            (c(0.3, 1.2), -2.0, 5.0),
            (c(-1.0, 0.4), 3.0, -4.0),
            (c(2.0, -0.7), -1.0, 1.5),
        ] {
            let expect = ((t - p.re) / p.im).atan() - ((x - p.re) / p.im).atan();
            assert!((phase_increment(p, x, t) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn cd_plus_empty_is_zero() {
        let v = cd_kernel_plus(&two_i(), 0, c(0.3, 0.1), c(1.0, 2.0)).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn cd_plus_single_term() {
        let upper = two_i();
        let sys = BasisSystem::conjugate_paired(upper.clone()).unwrap();
        let expect = sys.phi(0, c(1.0, 0.0)).unwrap().conj() * sys.phi(0, c(0.0, 0.0)).unwrap();
        let got = cd_kernel_plus(&upper, 1, c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((got - expect).norm() < 1e-15);
    }

    #[test]
    fn cd_minus_cases() {
        let lower = PoleSequence::lower(vec![c(0.0, -2.0)]).unwrap();
        assert_eq!(
            cd_kernel_minus(&lower, 1, c(0.5, 0.5), c(0.1, 0.0)).unwrap(),
            c(0.0, 0.0)
        );
        let sys = BasisSystem::new(two_i(), lower.clone()).unwrap();
        let expect = sys.phi(-1, c(1.0, 0.0)).unwrap().conj() * sys.phi(-1, c(0.0, 0.0)).unwrap();
        let got = cd_kernel_minus(&lower, 2, c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((got - expect).norm() < 1e-15);
    }

    #[test]
    fn cd_degenerate_arguments() {
        assert!(matches!(
            cd_kernel_plus(&two_i(), 1, c(1.0, 0.5), c(1.0, -0.5)),
            Err(Error::DegenerateArguments(_))
        ));
    }

    #[test]
    fn dirichlet_small_cases() {
        let sys = BasisSystem::conjugate_paired(two_i()).unwrap();
        assert_eq!(
            dirichlet_direct(&sys, 0, 1, 0.3, 0.9).unwrap().value,
            c(0.0, 0.0)
        );
        assert_eq!(
            dirichlet_closed(&sys, 0, 1, 0.3, 0.9).unwrap().value.norm(),
            0.0
        );

        let single = dirichlet_direct(&sys, 1, 1, 0.2, -1.0).unwrap().value;
        let expect = sys.phi_real(0, 0.2).conj() * sys.phi_real(0, -1.0);
        assert!((single - expect).norm() < 1e-16);

        let paired = dirichlet_direct(&sys, 1, 2, 0.0, 1.0).unwrap().value;
        assert!(paired.im.abs() < 1e-16);
    }

    #[test]
    fn dirichlet_hand_value() {
        let upper = two_i();
        let sys = BasisSystem::new(
            upper.clone(),
            PoleSequence::lower(vec![c(0.0, -2.0)]).unwrap(),
        )
        .unwrap();
        let closed = dirichlet_closed(&sys, 1, 2, 0.0, 2.0).unwrap();
        assert_eq!(closed.method, KernelMethod::ClosedForm);
        assert!((closed.value - c(0.5, 0.0)).norm() < 1e-15);
        let direct = dirichlet_direct(&sys, 1, 2, 0.0, 2.0).unwrap();
        assert!((direct.value - c(0.5, 0.0)).norm() < 1e-15);
        assert!((dirichlet_sine(&upper, 1, 0.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_general_system_matches_direct() {
        let upper = PoleSequence::upper(vec![c(0.0, 2.0), c(1.0, 1.0), c(-0.5, 0.7)]).unwrap();
        let lower = PoleSequence::lower(vec![c(0.4, -1.3), c(-2.0, -0.6)]).unwrap();
        let sys = BasisSystem::new(upper, lower).unwrap();
        for &(x, t) in &[(0.0, 1.0), (-2.0, 3.0), (0.5, 0.5 + 1e-7), (1.0, 1.0)] {
            let d = dirichlet_direct(&sys, 3, 3, x, t).unwrap().value;
            let cl = dirichlet_closed(&sys, 3, 3, x, t).unwrap().value;
            assert!((d - cl).norm() < 1e-12, "x={x} t={t}: {d} vs {cl}");
        }
    }

    #[test]
    fn diagonal_policy() {
        let sys = BasisSystem::conjugate_paired(two_i()).unwrap();
        let ev = dirichlet_closed(&sys, 1, 2, 0.0, 0.0).unwrap();
        assert_eq!(ev.method, KernelMethod::DiagonalLimit);
        assert!((ev.value - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            dirichlet_closed_with(&sys, 1, 2, 0.0, 0.0, DiagonalPolicy::Forbid),
            Err(Error::DegenerateArguments(_))
        ));
    }

    #[test]
    fn sine_diagonal_value() {
        assert!((dirichlet_sine(&two_i(), 1, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mu_hand_values() {
        let upper = two_i();
        assert!((mu(&upper, 1, 0.0, 2.0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert_eq!(mu(&upper, 0, 0.0, 2.0).unwrap(), 0.0);
        assert!(matches!(mu(&upper, 1, 0.0, 0.0), Err(Error::ZeroWidth)));
        assert!((mu_limit(&upper, 1, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((mu(&upper, 1, 0.0, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        // μ(−y; x) is the mean over [x − y, x], positive as well
        assert!((mu(&upper, 1, 0.0, -2.0).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn mu_derivative_hand_values() {
        let upper = two_i();
        let d0 = mu_derivatives(&upper, 1, 0.0, 0.0).unwrap();
        assert!((d0.d_y_of_y_mu - 1.0).abs() < 1e-15);
        assert_eq!(d0.d2_y_of_y_mu, 0.0);
        let d2 = mu_derivatives(&upper, 1, 0.0, 2.0).unwrap();
        assert!((d2.d_y_of_y_mu - 0.5).abs() < 1e-15);
        // −4·2·2/(8²)
        assert!((d2.d2_y_of_y_mu + 0.25).abs() < 1e-15);
    }
}
