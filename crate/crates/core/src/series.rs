//! Partial sums `S_n = S_{n,n+1}` of the rational Fourier series, their
//! `L_p` and pointwise errors, and the numerical probes of the phase
//! function used by the convergence experiments.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::BasisSystem;
use crate::error::{Error, Result};
use crate::kernels::{self, dirichlet_closed, mu, mu_derivatives, phase_integral};
use crate::poles::PoleSequence;
use crate::quadrature::{fourier_coefficients, Decay, Integrator, TargetFunction};

/// `S_n(f; x) = (1/π) ∫ f(t) D_{n,n+1}(t, x) dt`.
///
/// The integral is folded onto `y = |t − x| ∈ (0, ∞)`, so a jump of `f` at
/// `x` sits on an endpoint of the integration range. Conjugate-paired
/// systems use the sine kernel; general systems the exponential form.
pub fn partial_sum(
    integrator: &Integrator,
    system: &BasisSystem,
    f: &TargetFunction,
    n: usize,
    x: f64,
) -> Result<Complex64> {
    let upper = system.upper().prefix(n)?;
    system.lower().prefix(n)?;
    if n == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kernel = |t: f64| -> Complex64 {
        if system.is_conjugate_paired() {
            Complex64::new(kernels::sine_kernel(upper, t, x), 0.0)
        } else {
            dirichlet_closed(system, n, n + 1, t, x)
                .expect("orders validated above")
                .value
        }
    };
    let folded = |y: f64| {
        let (r, l) = (x + y, x - y);
        f.eval(r) * kernel(r) + f.eval(l) * kernel(l)
    };
    let reach = folding_range(f, x, integrator.tol);
    let breaks: Vec<f64> = f
        .breakpoints()
        .iter()
        .map(|p| (p - x).abs())
        .filter(|&y| y > 0.0)
        .collect();
    let r = integrator.integrate(folded, 0.0, reach, &breaks)?;
    Ok(r.value / PI)
}

/// Upper limit of the folded integral. For algebraic decay of order `q` the
/// tail `∫_R^∞` is bounded using `|f(x ± y)| ≤ scale·(y/2)^{-q}` for
/// `y ≥ 2|x|` and `|D| ≤ 1/y`, and `R` is chosen so that bound is `tol/10`.
fn folding_range(f: &TargetFunction, x: f64, tol: f64) -> f64 {
    match f.decay {
        Decay::SchwartzLike => f64::INFINITY,
        Decay::Compact { lo, hi } => (hi - x).max(x - lo).max(0.0),
        Decay::AlgebraicOrder { order, scale } => {
            if order <= 0.0 || scale <= 0.0 {
                return f64::INFINITY;
            }
            let tail_const = 2f64.powf(order + 1.0) * scale / order;
            let r = (10.0 * tail_const / tol).powf(1.0 / order);
            r.max(2.0 * x.abs() + 1.0)
        }
    }
}

/// `Σ_{k=−n}^{n−1} c_k Φ_k(x)`; `coeffs[i]` is `c_{i−n}`.
pub fn partial_sum_via_coefficients(
    system: &BasisSystem,
    coeffs: &[Complex64],
    n: usize,
    x: f64,
) -> Result<Complex64> {
    if coeffs.len() != 2 * n {
        return Err(Error::InvalidParameter(format!(
            "expected {} coefficients for S_{n}, got {}",
            2 * n,
            coeffs.len()
        )));
    }
    if n == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = n as i64;
    let phis = system.phi_range_real(-n, n - 1, x)?;
    Ok(coeffs
        .iter()
        .zip(&phis)
        .fold(Complex64::new(0.0, 0.0), |acc, (c, p)| acc + c * p))
}

/// Coefficients `c_{−n}, …, c_{n−1}` in the layout expected by
/// [`partial_sum_via_coefficients`].
pub fn partial_sum_coefficients(
    integrator: &Integrator,
    system: &BasisSystem,
    f: &TargetFunction,
    n: usize,
) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let n = n as i64;
    fourier_coefficients(integrator, system, f, -n, n - 1)
}

/// `(∫ |f(x) − S_n(f; x)|^p dx)^{1/p}`.
///
/// `S_n` is evaluated from its coefficients at every quadrature node.
pub fn lp_error(
    integrator: &Integrator,
    system: &BasisSystem,
    f: &TargetFunction,
    n: usize,
    p: f64,
) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    system.upper().prefix(n)?;
    system.lower().prefix(n)?;
    let coeffs = partial_sum_coefficients(integrator, system, f, n)?;
    let integrand = |x: f64| {
        let s = partial_sum_via_coefficients(system, &coeffs, n, x)
            .expect("coefficient layout fixed above");
        Complex64::new((f.eval(x) - s).norm().powf(p), 0.0)
    };
    let r = integrator.integrate(
        integrand,
        f64::NEG_INFINITY,
        f64::INFINITY,
        &f.breakpoints(),
    )?;
    Ok(r.value.re.max(0.0).powf(1.0 / p))
}

/// One row of a convergence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sigma: f64,
    pub varsigma: f64,
    pub ratio: f64,
    pub x0: f64,
    pub value: Complex64,
    /// `(f(x0 − 0) + f(x0 + 0)) / 2`.
    pub target: f64,
    /// `|S_n(f; x0) − target|`.
    pub deviation: f64,
}

fn pointwise_rows(
    integrator: &Integrator,
    system: &BasisSystem,
    f: &TargetFunction,
    x0: f64,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let target = f
        .marked_point(x0)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "{} has no declared one-sided limits at x0 = {x0}",
                f.name
            ))
        })?
        .midpoint();
    n_list
        .iter()
        .map(|&n| {
            let value = partial_sum(integrator, system, f, n, x0)?;
            let sigma = system.upper().sigma_n(n)?;
            let varsigma = system.upper().varsigma_n(n)?;
            Ok(ConvergenceRow {
                n,
                sigma,
                varsigma,
                ratio: varsigma / sigma,
                x0,
                value,
                target,
                deviation: (value - target).norm(),
            })
        })
        .collect()
}

/// Partial sums at a point with declared one-sided limits, for a function of
/// bounded variation.
pub fn jump_convergence(
    integrator: &Integrator,
    system: &BasisSystem,
    f: &TargetFunction,
    x0: f64,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    pointwise_rows(integrator, system, f, x0, n_list)
}

/// Same rows as [`jump_convergence`]; the caller asserts that the Dini
/// integrals exist at `x0` (recorded through the function's classes, not
/// checked).
pub fn dini_convergence(
    integrator: &Integrator,
    system: &BasisSystem,
    f: &TargetFunction,
    x0: f64,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    pointwise_rows(integrator, system, f, x0, n_list)
}

/// Which of `μ_n(y; x)` and `μ_n(−y; x)` a probe uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// `y·μ_n(±y; x)` for `y ≥ 0`; nonnegative on both sides.
fn signed_phase(poles: &PoleSequence, n: usize, x: f64, y: f64, side: Side) -> f64 {
    let v = match side {
        Side::Plus => phase_integral(poles, n, x, y),
        Side::Minus => phase_integral(poles, n, x, -y).map(|v| -v),
    };
    v.expect("prefix validated by caller")
}

/// `∫_0^∞ φ(y) sin[y μ_n(±y; x)] dy` for each `n`.
pub fn riemann_lebesgue_probe<F: Fn(f64) -> f64>(
    integrator: &Integrator,
    upper: &PoleSequence,
    phi: F,
    n_list: &[usize],
    x: f64,
    side: Side,
) -> Result<Vec<f64>> {
    n_list
        .iter()
        .map(|&n| {
            upper.prefix(n)?;
            let r = integrator.integrate_half_line(|y| {
                Complex64::new(phi(y) * signed_phase(upper, n, x, y, side).sin(), 0.0)
            })?;
            Ok(r.value.re)
        })
        .collect()
}

/// `∫_0^δ sin[y μ_n(±y; x)] / y dy` for each `n`.
pub fn sine_integral_probe(
    integrator: &Integrator,
    upper: &PoleSequence,
    n_list: &[usize],
    x: f64,
    delta: f64,
    side: Side,
) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    n_list
        .iter()
        .map(|&n| {
            upper.prefix(n)?;
            let r = integrator.integrate_interval(
                |y| Complex64::new(signed_phase(upper, n, x, y, side).sin() / y, 0.0),
                0.0,
                delta,
            )?;
            Ok(r.value.re)
        })
        .collect()
}

/// Step for the central differences of `μ_n` in [`bound_check`].
pub const FD_STEP: f64 = 1e-5;

/// Names of the five phase-function inequalities, in margin order.
pub const BOUND_NAMES: [&str; 5] = [
    "ymu_prime_lower",
    "mu_lower",
    "ymu_second_upper",
    "mu_prime_upper",
    "mu_second_upper",
];

/// Allowed negative margin per inequality: the first three use closed-form
/// derivatives, the last two central differences.
pub const BOUND_SLACK: [f64; 5] = [1e-9, 1e-9, 1e-9, 1e-3, 1e-3];

/// Margins at one grid point; nonnegative means the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundMargins {
    pub x: f64,
    pub y: f64,
    pub margins: [f64; 5],
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub sigma: f64,
    pub varsigma: f64,
    pub inverse_cube_sum: f64,
    pub points: Vec<BoundMargins>,
    /// Smallest margin per inequality and where it occurred.
    pub worst: [BoundMargins; 5],
}

impl BoundReport {
    pub fn worst_margins(&self) -> [f64; 5] {
        std::array::from_fn(|i| self.worst[i].margins[i])
    }

    /// Indices of inequalities whose worst margin is below `-slack[i]`.
    pub fn violations(&self, slack: &[f64; 5]) -> Vec<usize> {
        (0..5)
            .filter(|&i| self.worst[i].margins[i] < -slack[i])
            .collect()
    }
}

/// Central first and second differences of `y ↦ μ_n(±y; x)`.
fn mu_fd(upper: &PoleSequence, n: usize, x: f64, y: f64, side: Side) -> Result<(f64, f64)> {
    let g = |yy: f64| match side {
        Side::Plus => mu(upper, n, x, yy),
        Side::Minus => mu(upper, n, x, -yy),
    };
    let h = FD_STEP;
    let (gm, g0, gp) = (g(y - h)?, g(y)?, g(y + h)?);
    Ok(((gp - gm) / (2.0 * h), (gp - 2.0 * g0 + gm) / (h * h)))
}

/// Check the lower bounds `|[yμ_n(±y;x)]′| ≥ σ_n/(1+(|x|+y)²)` and
/// `|μ_n(±y;x)| ≥ σ_n/(1+(|x|+y)²)`, and the upper bounds
/// `|[yμ_n]″| ≤ ς_n`, `|μ_n′| ≤ ς_n`, `|μ_n″| ≤ (8/3) Σ 1/(Im a_k)³` on a grid.
///
/// `y_grid` must be positive and larger than [`FD_STEP`].
pub fn bound_check(
    upper: &PoleSequence,
    n: usize,
    x_grid: &[f64],
    y_grid: &[f64],
) -> Result<BoundReport> {
    if let Some(&y) = y_grid.iter().find(|&&y| !(y > FD_STEP)) {
        return Err(Error::InvalidParameter(format!(
            "bound grid needs y > {FD_STEP}, got {y}"
        )));
    }
    let sigma = upper.sigma_n(n)?;
    let varsigma = upper.varsigma_n(n)?;
    let cube = upper.inverse_cube_sum(n)?;
    let mut points = Vec::with_capacity(x_grid.len() * y_grid.len());
    for &x in x_grid {
        for &y in y_grid {
            let lower = sigma / (1.0 + (x.abs() + y).powi(2));
            let mut margins = [f64::INFINITY; 5];
            for (side, signed_y) in [(Side::Plus, y), (Side::Minus, -y)] {
                let d = mu_derivatives(upper, n, x, signed_y)?;
                let m = mu(upper, n, x, signed_y)?;
                let (d1, d2) = mu_fd(upper, n, x, y, side)?;
                let here = [
                    d.d_y_of_y_mu.abs() - lower,
                    m.abs() - lower,
                    varsigma - d.d2_y_of_y_mu.abs(),
                    varsigma - d1.abs(),
                    8.0 / 3.0 * cube - d2.abs(),
                ];
                for (slot, v) in margins.iter_mut().zip(here) {
                    *slot = slot.min(v);
                }
            }
            points.push(BoundMargins { x, y, margins });
        }
    }
    let empty = BoundMargins {
        x: f64::NAN,
        y: f64::NAN,
        margins: [f64::INFINITY; 5],
    };
    let mut worst = [empty; 5];
    for p in &points {
        for (i, w) in worst.iter_mut().enumerate() {
            if p.margins[i] < w.margins[i] {
                *w = *p;
            }
        }
    }
    Ok(BoundReport {
        n,
        sigma,
        varsigma,
        inverse_cube_sum: cube,
        points,
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constant_2i(len: usize) -> PoleSequence {
        PoleSequence::upper(vec![c(0.0, 2.0); len]).unwrap()
    }

    #[test]
    fn zero_function_has_zero_sums() {
        let sys = BasisSystem::conjugate_paired(constant_2i(4)).unwrap();
        let q = Integrator::new(1e-10);
        let f = targets::zero();
        assert_eq!(partial_sum(&q, &sys, &f, 3, 0.4).unwrap(), c(0.0, 0.0));
        assert_eq!(lp_error(&q, &sys, &f, 3, 2.0).unwrap(), 0.0);
        let zeros = vec![c(0.0, 0.0); 6];
        assert_eq!(
            partial_sum_via_coefficients(&sys, &zeros, 3, 1.0).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn unit_coefficient_reproduces_phi0() {
        let sys = BasisSystem::conjugate_paired(constant_2i(2)).unwrap();
        let mut coeffs = vec![c(0.0, 0.0); 4];
        coeffs[2] = c(1.0, 0.0);
        for x in [-1.0, 0.0, 2.5] {
            let s = partial_sum_via_coefficients(&sys, &coeffs, 2, x).unwrap();
            assert!((s - sys.phi_real(0, x)).norm() < 1e-16);
        }
        assert!(partial_sum_via_coefficients(&sys, &coeffs, 1, 0.0).is_err());
    }

    #[test]
    fn invalid_exponent() {
        let sys = BasisSystem::conjugate_paired(constant_2i(2)).unwrap();
        assert!(matches!(
            lp_error(&Integrator::default(), &sys, &targets::zero(), 1, 1.0),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn probes_vanish_for_trivial_inputs() {
        let q = Integrator::new(1e-10);
        let upper = constant_2i(4);
        let rl = riemann_lebesgue_probe(&q, &upper, |_| 0.0, &[1, 4], 0.0, Side::Plus).unwrap();
        assert_eq!(rl, vec![0.0, 0.0]);
        let rl0 =
            riemann_lebesgue_probe(&q, &upper, |y| (-y).exp(), &[0], 0.0, Side::Plus).unwrap();
        assert_eq!(rl0, vec![0.0]);
        let si = sine_integral_probe(&q, &upper, &[0], 0.0, 1.0, Side::Plus).unwrap();
        assert_eq!(si, vec![0.0]);
        assert!(sine_integral_probe(&q, &upper, &[1], 0.0, 0.0, Side::Plus).is_err());
    }

    #[test]
    fn bound_check_hand_point() {
        let upper = constant_2i(5);
        let rep = bound_check(&upper, 5, &[0.0], &[1.0]).unwrap();
        // σ_5 = 2, lower bound 2/(1+1) = 1; [yμ]′ at y=1 is 5·4/(1+4) = 4
        let m = rep.points[0].margins;
        assert!((m[0] - 3.0).abs() < 1e-12, "{m:?}");
        assert!(m[1] > 0.0);
        assert!(m[3] > 0.0 && m[4] > 0.0);
    }

    #[test]
    fn bound_check_empty_prefix() {
        let rep = bound_check(&constant_2i(1), 0, &[0.0, 1.0], &[0.5]).unwrap();
        for p in &rep.points {
            assert_eq!(p.margins, [0.0; 5]);
        }
        assert!(bound_check(&constant_2i(1), 1, &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn missing_marked_point_is_an_error() {
        let sys = BasisSystem::conjugate_paired(constant_2i(2)).unwrap();
        let f = targets::lorentzian();
        assert!(jump_convergence(&Integrator::default(), &sys, &f, 0.5, &[1]).is_err());
    }
}
