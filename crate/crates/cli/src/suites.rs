//! The experiment suites. Each produces one [`ExperimentReport`] (one row
//! per `n`) and a list of named checks whose margins decide pass/fail.

use std::f64::consts::FRAC_PI_2;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ratfourier_core::kernels::{
    cd_kernel_minus, cd_kernel_plus, dirichlet_closed, dirichlet_direct, dirichlet_sine,
    KernelMethod,
};
use ratfourier_core::quadrature::inner_product;
use ratfourier_core::series::{
    bound_check, dini_convergence, jump_convergence, lp_error, riemann_lebesgue_probe,
    sine_integral_probe, ConvergenceRow, Side, BOUND_NAMES,
};
use ratfourier_core::{
    BasisSystem, Complex64, ExperimentReport, Integrator, PoleSequence, TargetFunction,
};

use crate::config::{
    BoundsSuite, ExperimentConfig, KernelSuite, LpSuite, OrthonormalitySuite, PointwiseSuite,
    ProbeSuite,
};

/// One pass/fail condition. `margin >= 0` passes; strict checks also fail
/// at exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub margin: f64,
    pub strict: bool,
}

impl Check {
    fn new(name: impl Into<String>, margin: f64) -> Self {
        Self {
            name: name.into(),
            margin,
            strict: false,
        }
    }

    fn strict(name: impl Into<String>, margin: f64) -> Self {
        Self {
            name: name.into(),
            margin,
            strict: true,
        }
    }

    pub fn passed(&self) -> bool {
        if self.strict {
            self.margin > 0.0
        } else {
            self.margin >= 0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub report: Option<ExperimentReport>,
    pub checks: Vec<Check>,
    /// The function the suite expanded, if any.
    pub target: Option<TargetFunction>,
    /// Set when the suite could not be computed at all.
    pub error: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(Check::passed)
    }

    pub fn worst_margin(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn first_violation(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn summary_line(&self) -> String {
        if let Some(e) = &self.error {
            return format!("{:<20} FAIL error: {e}", self.suite);
        }
        let mut line = format!(
            "{:<20} {} worst_margin={:+.3e}",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.worst_margin()
        );
        if let Some(c) = self.first_violation() {
            line.push_str(&format!(
                " first_violation={} margin={:+.3e}",
                c.name, c.margin
            ));
        }
        line
    }
}

/// Shared inputs for every suite in a run.
pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub system: BasisSystem,
    pub integrator: Integrator,
    pub parallel: bool,
    pub generator: String,
}

impl<'a> Context<'a> {
    /// Generates enough poles for every `n` any suite asks for and, if
    /// `perturb > 0`, detaches the lower sequence from the conjugates.
    pub fn new(config: &'a ExperimentConfig, parallel: bool) -> Result<Self, String> {
        let source = config.poles_source();
        let len = max_order(config) + 1;
        let upper = source.upper(len)?;
        let system = if config.poles.perturb > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let lower: Vec<Complex64> = upper
                .poles()
                .iter()
                .map(|a| {
                    let d_re = config.poles.perturb * rng.random_range(-1.0..1.0);
                    let s_im = (config.poles.perturb * rng.random_range(-1.0..1.0)).exp();
                    Complex64::new(a.re + d_re, -a.im * s_im)
                })
                .collect();
            let lower = PoleSequence::lower(lower).map_err(|e| e.to_string())?;
            BasisSystem::new(upper, lower)
        } else {
            BasisSystem::conjugate_paired(upper)
        }
        .map_err(|e| e.to_string())?;
        Ok(Self {
            config,
            system,
            integrator: Integrator::new(config.tolerances.quadrature),
            parallel,
            generator: source.name(),
        })
    }

    fn rows<T, F>(&self, n_list: &[usize], f: F) -> Result<Vec<T>, String>
    where
        T: Send,
        F: Fn(usize) -> Result<T, String> + Sync + Send,
    {
        if self.parallel {
            n_list.par_iter().map(|&n| f(n)).collect()
        } else {
            n_list.iter().map(|&n| f(n)).collect()
        }
    }

    fn upper(&self) -> &PoleSequence {
        self.system.upper()
    }

    fn diagnostics(&self, n: usize) -> Result<[f64; 3], String> {
        let s = self.upper().sigma_n(n).map_err(|e| e.to_string())?;
        let v = self.upper().varsigma_n(n).map_err(|e| e.to_string())?;
        Ok([s, v, v / s])
    }

    fn report(&self, suite: &str, function: &str, columns: &[&str]) -> ExperimentReport {
        ExperimentReport::new(
            suite,
            self.generator.clone(),
            function,
            self.config.tolerances.quadrature,
            columns,
        )
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(stream);
        rng
    }
}

fn max_order(cfg: &ExperimentConfig) -> usize {
    let lists = cfg.suite_n_lists();
    lists
        .into_iter()
        .flatten()
        .chain(std::iter::once(&cfg.n_list))
        .filter_map(|l| l.last().copied())
        .max()
        .unwrap_or(0)
}

fn finish(
    suite: &'static str,
    built: Result<(ExperimentReport, Vec<Check>), String>,
) -> SuiteOutcome {
    match built {
        Ok((report, checks)) => SuiteOutcome {
            suite,
            report: Some(report),
            checks,
            target: None,
            error: None,
        },
        Err(e) => SuiteOutcome {
            suite,
            report: None,
            checks: Vec::new(),
            target: None,
            error: Some(e),
        },
    }
}

fn push_rows(report: &mut ExperimentReport, n_list: &[usize], rows: Vec<Vec<f64>>) {
    for (&n, values) in n_list.iter().zip(rows) {
        report.push(n, values);
    }
}

pub fn orthonormality(ctx: &Context, s: &OrthonormalitySuite) -> SuiteOutcome {
    let n_list = s.n_list.as_ref().unwrap_or(&ctx.config.n_list);
    let build = || {
        let sys = &ctx.system;
        let rows = ctx.rows(n_list, |n| {
            let n = n as i64;
            let mut worst = 0.0f64;
            for j in -n..=n {
                for k in j..=n {
                    sys.phi(j, Complex64::new(0.0, 0.0))
                        .map_err(|e| e.to_string())?;
                    sys.phi(k, Complex64::new(0.0, 0.0))
                        .map_err(|e| e.to_string())?;
                    let g = inner_product(
                        &ctx.integrator,
                        |x| sys.phi_real(j, x),
                        |x| sys.phi_real(k, x),
                    )
                    .map_err(|e| e.to_string())?;
                    let expect = if j == k { 1.0 } else { 0.0 };
                    worst = worst.max((g - Complex64::new(expect, 0.0)).norm());
                }
            }
            let [sg, vs, r] = ctx.diagnostics(n as usize)?;
            Ok(vec![worst, sg, vs, r])
        })?;
        let checks = n_list
            .iter()
            .zip(&rows)
            .map(|(n, r)| Check::strict(format!("gram_deviation@n={n}"), s.threshold - r[0]))
            .collect();
        let mut report = ctx.report(
            "orthonormality",
            "-",
            &["gram_max_deviation", "sigma", "varsigma", "ratio"],
        );
        push_rows(&mut report, n_list, rows);
        Ok((report, checks))
    };
    finish("orthonormality", build())
}

fn random_off_pole(rng: &mut ChaCha8Rng, poles: &[Complex64]) -> Complex64 {
    loop {
        let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        if poles
            .iter()
            .all(|p| (z - p).norm() > 0.05 && (z - p.conj()).norm() > 0.05)
        {
            return z;
        }
    }
}

pub fn kernel_equivalence(ctx: &Context, s: &KernelSuite) -> SuiteOutcome {
    let n_list = s.n_list.as_ref().unwrap_or(&ctx.config.n_list);
    let build = || {
        let sys = &ctx.system;
        let paired = sys.is_conjugate_paired();
        let rows = ctx.rows(n_list, |n| {
            let mut rng = ctx.rng(1000 + n as u64);
            let (mut closed_err, mut sine_err) = (0.0f64, 0.0f64);
            let mut diagonal = 0usize;
            for i in 0..s.samples {
                let x = rng.random_range(-5.0..5.0);
                // every other pair is near the diagonal, gaps 1e-8 ..= 1
                let t = if i % 2 == 0 {
                    rng.random_range(-5.0..5.0)
                } else {
                    let gap = 10f64.powf(rng.random_range(-8.0..0.0));
                    if rng.random_bool(0.5) {
                        x + gap
                    } else {
                        x - gap
                    }
                };
                let direct = dirichlet_direct(sys, n, n + 1, x, t).map_err(|e| e.to_string())?;
                let closed = dirichlet_closed(sys, n, n + 1, x, t).map_err(|e| e.to_string())?;
                if closed.method == KernelMethod::DiagonalLimit {
                    diagonal += 1;
                }
                closed_err = closed_err.max((closed.value - direct.value).norm());
                if paired {
                    let sine = dirichlet_sine(sys.upper(), n, x, t).map_err(|e| e.to_string())?;
                    sine_err = sine_err.max((Complex64::new(sine, 0.0) - direct.value).norm());
                }
            }
            let poles: Vec<Complex64> = sys
                .upper()
                .prefix(n)
                .map_err(|e| e.to_string())?
                .iter()
                .chain(sys.lower().prefix(n).map_err(|e| e.to_string())?)
                .copied()
                .collect();
            let (mut plus_err, mut minus_err) = (0.0f64, 0.0f64);
            let mut done = 0;
            while done < s.samples {
                let z = random_off_pole(&mut rng, &poles);
                let zeta = random_off_pole(&mut rng, &poles);
                if (zeta.conj() - z).norm() <= 0.1 {
                    continue;
                }
                let term = |k: i64| -> Result<Complex64, String> {
                    let a = sys.phi(k, zeta).map_err(|e| e.to_string())?;
                    let b = sys.phi(k, z).map_err(|e| e.to_string())?;
                    Ok(a.conj() * b)
                };
                let mut dp = Complex64::new(0.0, 0.0);
                for k in 0..n as i64 {
                    dp += term(k)?;
                }
                let mut dm = Complex64::new(0.0, 0.0);
                for k in 1..=n as i64 {
                    dm += term(-k)?;
                }
                let cp = cd_kernel_plus(sys.upper(), n, z, zeta).map_err(|e| e.to_string())?;
                let cm = cd_kernel_minus(sys.lower(), n + 1, z, zeta).map_err(|e| e.to_string())?;
                let rel = |a: Complex64, b: Complex64| {
                    if b.norm() == 0.0 {
                        a.norm()
                    } else {
                        (a - b).norm() / b.norm()
                    }
                };
                plus_err = plus_err.max(rel(cp, dp));
                minus_err = minus_err.max(rel(cm, dm));
                done += 1;
            }
            let sine_col = if paired { sine_err } else { f64::NAN };
            Ok(vec![
                closed_err,
                sine_col,
                plus_err,
                minus_err,
                diagonal as f64,
            ])
        })?;
        let mut checks = Vec::new();
        for (n, r) in n_list.iter().zip(&rows) {
            checks.push(Check::strict(
                format!("dirichlet_closed@n={n}"),
                s.dirichlet_threshold - r[0],
            ));
            if paired {
                checks.push(Check::strict(
                    format!("dirichlet_sine@n={n}"),
                    s.dirichlet_threshold - r[1],
                ));
            }
            checks.push(Check::strict(
                format!("cd_plus@n={n}"),
                s.cd_threshold - r[2],
            ));
            checks.push(Check::strict(
                format!("cd_minus@n={n}"),
                s.cd_threshold - r[3],
            ));
        }
        let mut report = ctx.report(
            "kernel_equivalence",
            "-",
            &[
                "dirichlet_closed_abs_err",
                "dirichlet_sine_abs_err",
                "cd_plus_rel_err",
                "cd_minus_rel_err",
                "diagonal_evaluations",
            ],
        );
        push_rows(&mut report, n_list, rows);
        Ok((report, checks))
    };
    finish("kernel_equivalence", build())
}

pub fn lp_convergence(ctx: &Context, s: &LpSuite) -> SuiteOutcome {
    let n_list = s.n_list.as_ref().unwrap_or(&ctx.config.n_list);
    let f = ctx.config.function_for(s.function.as_ref());
    let build = || {
        let rows = ctx.rows(n_list, |n| {
            let e =
                lp_error(&ctx.integrator, &ctx.system, &f, n, s.p).map_err(|e| e.to_string())?;
            let [sg, vs, r] = ctx.diagnostics(n)?;
            Ok(vec![e, sg, vs, r])
        })?;
        let checks = n_list
            .windows(2)
            .zip(rows.windows(2))
            .map(|(n, r)| Check::strict(format!("lp_decrease@n={}", n[1]), r[0][0] - r[1][0]))
            .collect();
        let mut report = ctx.report(
            "lp_convergence",
            &f.name,
            &["lp_error", "sigma", "varsigma", "ratio"],
        );
        push_rows(&mut report, n_list, rows);
        Ok((report, checks))
    };
    SuiteOutcome {
        target: Some(f.clone()),
        ..finish("lp_convergence", build())
    }
}

type PointwiseFn = fn(
    &Integrator,
    &BasisSystem,
    &TargetFunction,
    f64,
    &[usize],
) -> ratfourier_core::Result<Vec<ConvergenceRow>>;

fn pointwise(
    ctx: &Context,
    s: &PointwiseSuite,
    suite: &'static str,
    run: PointwiseFn,
) -> SuiteOutcome {
    let n_list = s.n_list.as_ref().unwrap_or(&ctx.config.n_list);
    let f = ctx.config.function_for(s.function.as_ref());
    let build = || {
        let rows = ctx.rows(n_list, |n| {
            let r = run(&ctx.integrator, &ctx.system, &f, s.x0, &[n]).map_err(|e| e.to_string())?;
            Ok(r.into_iter().next().expect("one row per n"))
        })?;
        let first = rows.first().expect("n_list is nonempty");
        let last = rows.last().expect("n_list is nonempty");
        let mut checks = vec![Check::strict(
            format!("final_deviation@n={}", last.n),
            s.final_threshold - last.deviation,
        )];
        if let Some(ratio) = s.ratio {
            checks.push(Check::new(
                format!("deviation_ratio@n={}", last.n),
                ratio * first.deviation - last.deviation,
            ));
        }
        let mut report = ctx.report(
            suite,
            &f.name,
            &[
                "x0",
                "value_re",
                "value_im",
                "target",
                "deviation",
                "sigma",
                "varsigma",
                "ratio",
            ],
        );
        for r in rows {
            report.push(
                r.n,
                vec![
                    r.x0,
                    r.value.re,
                    r.value.im,
                    r.target,
                    r.deviation,
                    r.sigma,
                    r.varsigma,
                    r.ratio,
                ],
            );
        }
        Ok((report, checks))
    };
    SuiteOutcome {
        target: Some(f.clone()),
        ..finish(suite, build())
    }
}

pub fn jump_pointwise(ctx: &Context, s: &PointwiseSuite) -> SuiteOutcome {
    pointwise(ctx, s, "jump_pointwise", jump_convergence)
}

pub fn dini_pointwise(ctx: &Context, s: &PointwiseSuite) -> SuiteOutcome {
    pointwise(ctx, s, "dini_pointwise", dini_convergence)
}

/// `x_points` equispaced values on `[x_min, x_max]` and `y_points` values
/// `y_max·j/y_points`, `j = 1..=y_points`.
pub fn bounds_grid(s: &BoundsSuite) -> (Vec<f64>, Vec<f64>) {
    let xs = if s.x_points == 1 {
        vec![s.x_min]
    } else {
        (0..s.x_points)
            .map(|i| s.x_min + (s.x_max - s.x_min) * i as f64 / (s.x_points - 1) as f64)
            .collect()
    };
    let ys = (1..=s.y_points)
        .map(|j| s.y_max * j as f64 / s.y_points as f64)
        .collect();
    (xs, ys)
}

pub fn bounds(ctx: &Context, s: &BoundsSuite) -> SuiteOutcome {
    let n_list = s.n_list.as_ref().unwrap_or(&ctx.config.n_list);
    let (xs, ys) = bounds_grid(s);
    let slack = ctx.config.tolerances.slack;
    let slacks = [slack, slack, slack, s.fd_slack, s.fd_slack];
    let build = || {
        let rows = ctx.rows(n_list, |n| {
            let r = bound_check(ctx.upper(), n, &xs, &ys).map_err(|e| e.to_string())?;
            let mut v = r.worst_margins().to_vec();
            v.extend([r.sigma, r.varsigma, r.inverse_cube_sum]);
            Ok(v)
        })?;
        let mut checks = Vec::new();
        for (n, r) in n_list.iter().zip(&rows) {
            for i in 0..5 {
                checks.push(Check::new(
                    format!("{}@n={n}", BOUND_NAMES[i]),
                    r[i] + slacks[i],
                ));
            }
        }
        let mut columns: Vec<&str> = BOUND_NAMES.to_vec();
        columns.extend(["sigma", "varsigma", "inverse_cube_sum"]);
        let mut report = ctx.report("bounds", "-", &columns);
        push_rows(&mut report, n_list, rows);
        Ok((report, checks))
    };
    finish("bounds", build())
}

pub fn probes(ctx: &Context, s: &ProbeSuite) -> SuiteOutcome {
    let n_list = s.n_list.as_ref().unwrap_or(&ctx.config.n_list);
    let build = || {
        let rows = ctx.rows(n_list, |n| {
            let q = &ctx.integrator;
            let up = ctx.upper();
            let mut v = Vec::with_capacity(4);
            for side in [Side::Plus, Side::Minus] {
                v.push(
                    sine_integral_probe(q, up, &[n], s.x, s.delta, side)
                        .map_err(|e| e.to_string())?[0],
                );
            }
            for side in [Side::Plus, Side::Minus] {
                v.push(
                    riemann_lebesgue_probe(q, up, |y| (-y).exp(), &[n], s.x, side)
                        .map_err(|e| e.to_string())?[0],
                );
            }
            Ok(v)
        })?;
        let last = rows.last().expect("n_list is nonempty");
        let n_last = n_list[n_list.len() - 1];
        let mut checks = vec![
            Check::strict(
                format!("sine_integral_plus@n={n_last}"),
                s.threshold - (last[0] - FRAC_PI_2).abs(),
            ),
            Check::strict(
                format!("sine_integral_minus@n={n_last}"),
                s.threshold - (last[1] - FRAC_PI_2).abs(),
            ),
        ];
        for (col, name) in [(2, "riemann_lebesgue_plus"), (3, "riemann_lebesgue_minus")] {
            for (n, w) in n_list.windows(2).zip(rows.windows(2)) {
                checks.push(Check::strict(
                    format!("{name}_decrease@n={}", n[1]),
                    w[0][col].abs() - w[1][col].abs(),
                ));
            }
            checks.push(Check::strict(
                format!("{name}@n={n_last}"),
                s.threshold - last[col].abs(),
            ));
        }
        let mut report = ctx.report(
            "probes",
            "exp(-y)",
            &[
                "sine_integral_plus",
                "sine_integral_minus",
                "riemann_lebesgue_plus",
                "riemann_lebesgue_minus",
            ],
        );
        push_rows(&mut report, n_list, rows);
        Ok((report, checks))
    };
    finish("probes", build())
}
