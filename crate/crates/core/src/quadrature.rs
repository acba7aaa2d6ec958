//! Adaptive Gauss–Legendre integration on finite intervals, half-lines and
//! the whole real line, plus the `1/π`-normalised inner product and Fourier
//! coefficients of a target function.
//!
//! Unbounded ranges are mapped to a bounded `θ`-interval by `x = tan θ`.
//! Every integrand used here decays at least like `|x|^{-2}`, which makes
//! the mapped integrand bounded and smooth at `θ = ±π/2`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::basis::BasisSystem;
use crate::error::{Error, Result};

const GL_POINTS: usize = 15;
const INITIAL_PANELS: usize = 4;

/// Finite ranges longer than this use the tangent substitution.
pub const LONG_INTERVAL: f64 = 1e3;
/// Evaluations needed to bisect one panel and estimate both halves.
const SPLIT_COST: usize = 4 * GL_POINTS;

fn gauss_legendre() -> &'static ([f64; GL_POINTS], [f64; GL_POINTS]) {
    static RULE: OnceLock<([f64; GL_POINTS], [f64; GL_POINTS])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut nodes = [0.0; GL_POINTS];
        let mut weights = [0.0; GL_POINTS];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Fixed 15-point rule on `[a, b]`; returns `(∫g, ∫|g|)`.
fn gl_panel<G: Fn(f64) -> Complex64>(g: &G, a: f64, b: f64) -> (Complex64, f64) {
    let (nodes, weights) = gauss_legendre();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let v = g(mid + half * x);
        sum += v * *w;
        abs += v.norm() * w;
    }
    (sum * half, abs * half.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub nodes_used: usize,
}

impl fmt::Display for QuadratureResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ± {:e} ({} nodes)",
            self.value, self.abs_error_estimate, self.nodes_used
        )
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    abs: f64,
    err: f64,
    left: Complex64,
    right: Complex64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn make_panel<G: Fn(f64) -> Complex64>(g: &G, a: f64, b: f64, coarse: Complex64) -> Panel {
    let m = 0.5 * (a + b);
    let (left, la) = gl_panel(g, a, m);
    let (right, ra) = gl_panel(g, m, b);
    let value = left + right;
    let err = (coarse - value).norm();
    Panel {
        a,
        b,
        value,
        abs: la + ra,
        err: if err.is_finite() { err } else { f64::INFINITY },
        left,
        right,
    }
}

/// Adaptive composite Gauss–Legendre integrator.
///
/// Panels are bisected in order of decreasing error estimate until the summed
/// estimate drops below `tol` (absolute), or below a roundoff floor of
/// `100 ε ∫|f|`, whichever is larger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_evals: 1 << 18,
        }
    }
}

impl Integrator {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn with_budget(self, max_evals: usize) -> Self {
        Self { max_evals, ..self }
    }

    /// `∫_{-∞}^{∞} f(x) dx`.
    pub fn integrate_line<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<QuadratureResult> {
        self.integrate(f, f64::NEG_INFINITY, f64::INFINITY, &[])
    }

    /// `∫_0^∞ f(y) dy`.
    pub fn integrate_half_line<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<QuadratureResult> {
        self.integrate(f, 0.0, f64::INFINITY, &[])
    }

    /// `∫_a^b f(x) dx` over a finite interval.
    pub fn integrate_interval<F: Fn(f64) -> Complex64>(
        &self,
        f: F,
        a: f64,
        b: f64,
    ) -> Result<QuadratureResult> {
        self.integrate(f, a, b, &[])
    }

    /// `∫_lo^hi f(x) dx` where either endpoint may be infinite. Points in
    /// `breaks` strictly inside the range start new panels, so jumps there
    /// do not slow convergence.
    ///
    /// Ranges longer than [`LONG_INTERVAL`] are integrated in `θ = atan x`,
    /// which keeps panels near the origin narrow.
    pub fn integrate<F: Fn(f64) -> Complex64>(
        &self,
        f: F,
        lo: f64,
        hi: f64,
        breaks: &[f64],
    ) -> Result<QuadratureResult> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerance must be positive, got {}",
                self.tol
            )));
        }
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidParameter("NaN integration bound".into()));
        }
        let (lo, hi, sign) = if lo <= hi {
            (lo, hi, 1.0)
        } else {
            (hi, lo, -1.0)
        };
        if lo == hi {
            return Ok(QuadratureResult {
                value: Complex64::new(0.0, 0.0),
                abs_error_estimate: 0.0,
                nodes_used: 0,
            });
        }
        let mut result = if hi - lo <= LONG_INTERVAL {
            self.adaptive(&f, lo, hi, breaks)
        } else {
            let mapped = |theta: f64| {
                let (s, c) = theta.sin_cos();
                f(s / c) / (c * c)
            };
            let to_theta = |x: f64| {
                if x == f64::INFINITY {
                    FRAC_PI_2
                } else if x == f64::NEG_INFINITY {
                    -FRAC_PI_2
                } else {
                    x.atan()
                }
            };
            let theta_breaks: Vec<f64> = breaks.iter().map(|&x| to_theta(x)).collect();
            self.adaptive(&mapped, to_theta(lo), to_theta(hi), &theta_breaks)
        };
        match &mut result {
            Ok(r) => r.value *= sign,
            Err(Error::ToleranceNotMet { partial, .. }) => partial.value *= sign,
            Err(_) => {}
        }
        result
    }

    fn adaptive<G: Fn(f64) -> Complex64>(
        &self,
        g: &G,
        lo: f64,
        hi: f64,
        breaks: &[f64],
    ) -> Result<QuadratureResult> {
        let mut cuts: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut edges = vec![lo];
        edges.extend(cuts);
        edges.push(hi);

        let mut evals = 0usize;
        let mut heap = BinaryHeap::new();
        for seg in edges.windows(2) {
            let width = (seg[1] - seg[0]) / INITIAL_PANELS as f64;
            for i in 0..INITIAL_PANELS {
                let a = seg[0] + width * i as f64;
                let b = if i + 1 == INITIAL_PANELS {
                    seg[1]
                } else {
                    a + width
                };
                let (coarse, _) = gl_panel(g, a, b);
                heap.push(make_panel(g, a, b, coarse));
                evals += 3 * GL_POINTS;
            }
        }
        let mut frozen: Vec<Panel> = Vec::new();

        loop {
            let total_err: f64 = heap.iter().chain(&frozen).map(|p| p.err).sum();
            let total_abs: f64 = heap.iter().chain(&frozen).map(|p| p.abs).sum();
            let target = self.tol.max(100.0 * f64::EPSILON * total_abs);
            if total_err <= target {
                break;
            }
            if evals + SPLIT_COST > self.max_evals || heap.is_empty() {
                let partial = summarize(heap.into_vec(), frozen, evals);
                return Err(Error::ToleranceNotMet {
                    budget: self.max_evals,
                    partial,
                });
            }
            // Split worst panels until the error estimate could plausibly be
            // met; re-summing after every split would be quadratic.
            let mut budget_err = total_err;
            while budget_err > target && evals + SPLIT_COST <= self.max_evals {
                let Some(p) = heap.pop() else { break };
                let m = 0.5 * (p.a + p.b);
                if !(m > p.a && m < p.b) {
                    frozen.push(p);
                    continue;
                }
                budget_err -= p.err;
                let l = make_panel(g, p.a, m, p.left);
                let r = make_panel(g, m, p.b, p.right);
                evals += SPLIT_COST;
                budget_err += l.err + r.err;
                heap.push(l);
                heap.push(r);
            }
        }
        Ok(summarize(heap.into_vec(), frozen, evals))
    }
}

fn summarize(mut panels: Vec<Panel>, frozen: Vec<Panel>, evals: usize) -> QuadratureResult {
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in &panels {
        value += p.value;
        err += p.err;
    }
    QuadratureResult {
        value,
        abs_error_estimate: err,
        nodes_used: evals,
    }
}

/// How a target function decays, used to choose the integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Faster than any power.
    SchwartzLike,
    /// `|f(x)| ≤ scale · |x|^{-order}` for large `|x|`.
    AlgebraicOrder { order: f64, scale: f64 },
    /// Zero outside `[lo, hi]`.
    Compact { lo: f64, hi: f64 },
}

/// Caller-declared function class, recorded but not verified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionClass {
    L1,
    Lp(f64),
    BoundedVariation,
    /// The Dini integrals at the marked points exist.
    DiniRegular,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionClass::L1 => f.write_str("L1"),
            FunctionClass::Lp(p) => write!(f, "L{p}"),
            FunctionClass::BoundedVariation => f.write_str("BV"),
            FunctionClass::DiniRegular => f.write_str("Dini"),
        }
    }
}

/// A point with declared one-sided limits `f(x0 − 0)` and `f(x0 + 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint {
    pub x0: f64,
    pub left_limit: f64,
    pub right_limit: f64,
}

impl MarkedPoint {
    pub fn continuous(x0: f64, value: f64) -> Self {
        Self {
            x0,
            left_limit: value,
            right_limit: value,
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left_limit + self.right_limit)
    }
}

type RealFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A host-supplied function on ℝ with its declared analytic metadata.
#[derive(Clone)]
pub struct TargetFunction {
    pub name: String,
    eval: Arc<RealFn>,
    pub decay: Decay,
    pub marked_points: Vec<MarkedPoint>,
    pub classes: Vec<FunctionClass>,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("decay", &self.decay)
            .field("marked_points", &self.marked_points)
            .field("classes", &self.classes)
            .finish_non_exhaustive()
    }
}

impl TargetFunction {
    pub fn new<F>(name: impl Into<String>, decay: Decay, eval: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            decay,
            marked_points: Vec::new(),
            classes: Vec::new(),
        }
    }

    /// Real-valued convenience constructor.
    pub fn real<F>(name: impl Into<String>, decay: Decay, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, decay, move |x| Complex64::new(eval(x), 0.0))
    }

    pub fn with_marked_point(mut self, point: MarkedPoint) -> Self {
        self.marked_points.push(point);
        self
    }

    pub fn with_class(mut self, class: FunctionClass) -> Self {
        self.classes.push(class);
        self
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self.decay {
            Decay::Compact { lo, hi } if x < lo || x > hi => Complex64::new(0.0, 0.0),
            _ => (self.eval)(x),
        }
    }

    pub fn marked_point(&self, x0: f64) -> Option<&MarkedPoint> {
        self.marked_points.iter().find(|p| p.x0 == x0)
    }

    /// Integration range of `f` over ℝ.
    pub fn support(&self) -> (f64, f64) {
        match self.decay {
            Decay::Compact { lo, hi } => (lo, hi),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Breakpoints for the integrator: marked points and support edges.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.marked_points.iter().map(|p| p.x0).collect();
        if let Decay::Compact { lo, hi } = self.decay {
            out.push(lo);
            out.push(hi);
        }
        out
    }

    /// `α f + β g`, keeping the weaker decay and the marked points of both.
    pub fn linear_combination(alpha: Complex64, f: &Self, beta: Complex64, g: &Self) -> Self {
        let decay = match (f.decay, g.decay) {
            (Decay::Compact { lo: a, hi: b }, Decay::Compact { lo: c, hi: d }) => Decay::Compact {
                lo: a.min(c),
                hi: b.max(d),
            },
            (Decay::Compact { .. }, other) | (other, Decay::Compact { .. }) => other,
            (
                Decay::AlgebraicOrder { order: p, scale: s },
                Decay::AlgebraicOrder { order: q, scale: t },
            ) => Decay::AlgebraicOrder {
                order: p.min(q),
                scale: alpha.norm() * s + beta.norm() * t,
            },
            (a @ Decay::AlgebraicOrder { .. }, Decay::SchwartzLike)
            | (Decay::SchwartzLike, a @ Decay::AlgebraicOrder { .. }) => a,
            (Decay::SchwartzLike, Decay::SchwartzLike) => Decay::SchwartzLike,
        };
        let (f2, g2) = (f.clone(), g.clone());
        let mut out = Self::new(
            format!("({alpha})*{}+({beta})*{}", f.name, g.name),
            decay,
            move |x| alpha * f2.eval(x) + beta * g2.eval(x),
        );
        out.marked_points = f.marked_points.clone();
        out.marked_points.extend(g.marked_points.iter().copied());
        out
    }
}

/// `(1/π) ∫ f(x) conj(g(x)) dx`.
pub fn inner_product<F, G>(integrator: &Integrator, f: F, g: G) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    let r = integrator.integrate_line(|x| f(x) * g(x).conj())?;
    Ok(r.value / PI)
}

/// `c_k = (1/π) ∫ f(x) conj(Φ_k(x)) dx`.
pub fn fourier_coefficient(
    integrator: &Integrator,
    system: &BasisSystem,
    f: &TargetFunction,
    k: i64,
) -> Result<Complex64> {
    // index check up front so the integrand cannot fail
    system.phi(k, Complex64::new(0.0, 0.0))?;
    let (lo, hi) = f.support();
    let r = integrator.integrate(
        |x| f.eval(x) * system.phi_real(k, x).conj(),
        lo,
        hi,
        &f.breakpoints(),
    )?;
    Ok(r.value / PI)
}

/// Coefficients `c_k` for `k` in `lo..=hi`, in index order.
pub fn fourier_coefficients(
    integrator: &Integrator,
    system: &BasisSystem,
    f: &TargetFunction,
    lo: i64,
    hi: i64,
) -> Result<Vec<Complex64>> {
    (lo..=hi)
        .map(|k| fourier_coefficient(integrator, system, f, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rule_is_exact_for_degree_29() {
        let r = gl_panel(&|x: f64| re(x.powi(28)), -1.0, 1.0).0;
        assert!((r.re - 2.0 / 29.0).abs() < 1e-15);
        let (nodes, weights) = gauss_legendre();
        assert!((weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(nodes.iter().all(|x| x.abs() < 1.0));
    }

    #[test]
    fn lorentzian_is_pi() {
        let r = Integrator::new(1e-10)
            .integrate_line(|x| re(1.0 / (1.0 + x * x)))
            .unwrap();
        assert!((r.value.re - PI).abs() < 1e-10);
        assert!(r.abs_error_estimate >= 0.0);
    }

    #[test]
    fn gaussian_is_sqrt_pi() {
        let r = Integrator::new(1e-12)
            .integrate_line(|x| re((-x * x).exp()))
            .unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn zero_integrand() {
        let r = Integrator::new(1e-10).integrate_line(|_| re(0.0)).unwrap();
        assert_eq!(r.value, re(0.0));
        assert_eq!(r.abs_error_estimate, 0.0);
    }

    #[test]
    fn finite_and_reversed_intervals() {
        let q = Integrator::new(1e-12);
        let r = q.integrate_interval(|x| re(x.sin()), 0.0, PI).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-12);
        let r = q.integrate_interval(|x| re(x.sin()), PI, 0.0).unwrap();
        assert!((r.value.re + 2.0).abs() < 1e-12);
        let r = q.integrate_half_line(|y| re((-y).exp())).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let q = Integrator::new(1e-12);
        let step = |x: f64| re(if x < 0.3 { 1.0 } else { 2.0 });
        let r = q.integrate(step, 0.0, 1.0, &[0.3]).unwrap();
        assert!((r.value.re - 1.7).abs() < 1e-12);
        assert!(r.nodes_used < 1000);
    }

    #[test]
    fn budget_exhaustion_reports_partial() {
        let q = Integrator::new(1e-14).with_budget(200);
        let f = |x: f64| re(if x < 0.123456 { 1.0 } else { 0.0 });
        match q.integrate_interval(f, 0.0, 1.0) {
            Err(Error::ToleranceNotMet { budget, partial }) => {
                assert_eq!(budget, 200);
                assert!(partial.abs_error_estimate > 1e-14);
                assert!((partial.value.re - 0.123456).abs() < 0.1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tolerance_sweep_improves() {
        let mut prev = f64::INFINITY;
        for tol in [1e-6, 1e-8, 1e-10] {
            let r = Integrator::new(tol)
                .integrate_line(|x| re((-x * x).exp() * (5.0 * x).cos()))
                .unwrap();
            let exact = PI.sqrt() * (-6.25f64).exp();
            let err = (r.value.re - exact).abs();
            assert!(err <= tol, "tol {tol}: err {err}");
            assert!(err <= prev + 1e-15);
            prev = err;
        }
    }

    #[test]
    fn compact_target_is_zero_outside() {
        let f = TargetFunction::real("box", Decay::Compact { lo: -1.0, hi: 1.0 }, |_| 1.0);
        assert_eq!(f.eval(2.0), re(0.0));
        assert_eq!(f.eval(0.0), re(1.0));
        assert_eq!(f.support(), (-1.0, 1.0));
    }
}
