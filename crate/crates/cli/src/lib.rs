//! Configuration-driven experiment runner.
//!
//! [`run`] executes every suite present in an [`ExperimentConfig`], writes
//! `<suite>.csv` and `<suite>.meta.toml` into the output directory and
//! returns the per-suite outcomes in a fixed order.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod suites;

use std::fs;
use std::io::{self, Write};
use std::path::Path;

pub use config::{ConfigError, ExperimentConfig};
pub use ratfourier_core::ExperimentReport;
pub use suites::{Check, SuiteOutcome};

use suites::Context;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("building the basis system: {0}")]
    Setup(String),
    #[error("writing {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: io::Error,
    },
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Compute the rows of each suite in parallel; output order is unchanged.
    pub parallel: bool,
}

/// Write `report` as CSV to `path`, replacing any existing file.
pub fn emit_csv(report: &ExperimentReport, path: &Path) -> io::Result<()> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    report.write_csv(&mut file)?;
    file.flush()
}

fn metadata(cfg: &ExperimentConfig, ctx: &Context, outcome: &SuiteOutcome) -> String {
    let mut s = String::new();
    s.push_str(&format!("suite = {:?}\n", outcome.suite));
    s.push_str(&format!("seed = {}\n", cfg.seed));
    s.push_str(&format!("generator = {:?}\n", ctx.generator));
    s.push_str(&format!(
        "conjugate_paired = {}\n",
        ctx.system.is_conjugate_paired()
    ));
    s.push_str(&format!("perturb = {:?}\n", cfg.poles.perturb));
    if let Some(f) = &outcome.target {
        s.push_str(&format!("function = {:?}\n", f.name));
        s.push_str(&format!("decay = {:?}\n", format!("{:?}", f.decay)));
        s.push_str(&format!(
            "declared_classes = {:?}\n",
            format!("{:?}", f.classes)
        ));
    }
    s.push_str(&format!(
        "quadrature_tolerance = {:?}\n",
        cfg.tolerances.quadrature
    ));
    s.push_str(&format!("slack = {:?}\n", cfg.tolerances.slack));
    s.push_str(&format!("passed = {}\n", outcome.passed()));
    s.push_str(&format!("worst_margin = {:?}\n", outcome.worst_margin()));
    if let Some(c) = outcome.first_violation() {
        s.push_str(&format!("first_violation = {:?}\n", c.name));
    }
    if let Some(e) = &outcome.error {
        s.push_str(&format!("error = {e:?}\n"));
    }
    s
}

/// Run every configured suite, write its files, and return the outcomes.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<SuiteOutcome>, RunError> {
    let ctx = Context::new(cfg, opts.parallel).map_err(RunError::Setup)?;
    let mut outcomes = Vec::new();
    if let Some(s) = &cfg.orthonormality {
        outcomes.push(suites::orthonormality(&ctx, s));
    }
    if let Some(s) = &cfg.kernel_equivalence {
        outcomes.push(suites::kernel_equivalence(&ctx, s));
    }
    if let Some(s) = &cfg.lp_convergence {
        outcomes.push(suites::lp_convergence(&ctx, s));
    }
    if let Some(s) = &cfg.jump_pointwise {
        outcomes.push(suites::jump_pointwise(&ctx, s));
    }
    if let Some(s) = &cfg.dini_pointwise {
        outcomes.push(suites::dini_pointwise(&ctx, s));
    }
    if let Some(s) = &cfg.bounds {
        outcomes.push(suites::bounds(&ctx, s));
    }
    if let Some(s) = &cfg.probes {
        outcomes.push(suites::probes(&ctx, s));
    }

    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(&cfg.output).map_err(io_err(&cfg.output))?;
    for o in &outcomes {
        if let Some(report) = &o.report {
            let path = cfg.output.join(format!("{}.csv", o.suite));
            emit_csv(report, &path).map_err(io_err(&path))?;
        }
        let path = cfg.output.join(format!("{}.meta.toml", o.suite));
        fs::write(&path, metadata(cfg, &ctx, o)).map_err(io_err(&path))?;
    }
    Ok(outcomes)
}
