//! Experiment configuration.
//!
//! The format is TOML restricted to one level of tables:
//!
//! ```toml
//! seed = 42
//! n_list = [1, 2, 4, 8, 16]
//! output = "out"
//!
//! [poles]
//! generator = "constant"   # constant | geometric | power_law | file
//! re = 0.0
//! im = 2.0
//!
//! [function]
//! name = "lorentzian"
//!
//! [tolerances]
//! quadrature = 1e-10
//! slack = 1e-9
//!
//! [lp_convergence]
//! p = 2.0
//! ```
//!
//! Every suite table that is present is run. Suite tables accept `n_list`
//! and `function` overrides; the remaining keys are listed on each suite
//! struct below.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use ratfourier_core::{targets, PoleGenerator, PoleSequence, TargetFunction};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl ConfigError {
    fn at(text: &str, key: &str, message: impl Into<String>) -> Self {
        ConfigError::Parse {
            line: line_of_key(text, key),
            message: message.into(),
        }
    }
}

/// 1-based line of the first `key =` assignment, or 1 if absent.
fn line_of_key(text: &str, key: &str) -> usize {
    let dotted = key.rsplit('.').next().unwrap_or(key);
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(dotted)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(1, |i| i + 1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub n_list: Vec<usize>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub poles: PoleConfig,
    #[serde(default)]
    pub function: FunctionConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub orthonormality: Option<OrthonormalitySuite>,
    pub kernel_equivalence: Option<KernelSuite>,
    pub lp_convergence: Option<LpSuite>,
    pub jump_pointwise: Option<PointwiseSuite>,
    pub dini_pointwise: Option<PointwiseSuite>,
    pub bounds: Option<BoundsSuite>,
    pub probes: Option<ProbeSuite>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleConfig {
    pub generator: String,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub base: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub path: Option<PathBuf>,
    /// Random offset added to the lower-half-plane poles; zero keeps the
    /// system conjugate-paired.
    #[serde(default)]
    pub perturb: f64,
}

/// Where the poles come from, after validation.
#[derive(Debug, Clone)]
pub enum PoleSource {
    Generator(PoleGenerator),
    File(PathBuf),
}

impl PoleSource {
    pub fn name(&self) -> String {
        match self {
            PoleSource::Generator(g) => g.name(),
            PoleSource::File(p) => format!("file({})", p.display()),
        }
    }

    pub fn upper(&self, len: usize) -> Result<PoleSequence, String> {
        match self {
            PoleSource::Generator(g) => g.generate(len).map_err(|e| e.to_string()),
            PoleSource::File(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("reading {}: {e}", p.display()))?;
                PoleSequence::parse(&text, ratfourier_core::HalfPlane::Upper)
                    .map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub name: String,
    pub value: Option<f64>,
    pub half_width: Option<f64>,
}

impl Default for FunctionConfig {
    fn default() -> Self {
        Self {
            name: "gaussian".into(),
            value: None,
            half_width: None,
        }
    }
}

impl FunctionConfig {
    pub fn build(&self) -> Option<TargetFunction> {
        Some(match self.name.as_str() {
            "gaussian" => targets::gaussian(),
            "lorentzian" => targets::lorentzian(),
            "sign_exp" => targets::sign_exp(),
            "sign_gauss" => targets::sign_gauss(),
            "one_sided_exp" => targets::one_sided_exp(),
            "plateau" => {
                targets::plateau(self.value.unwrap_or(1.0), self.half_width.unwrap_or(1.0))
            }
            "zero" => targets::zero(),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_quadrature")]
    pub quadrature: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_quadrature() -> f64 {
    1e-10
}
fn default_slack() -> f64 {
    1e-9
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: default_quadrature(),
            slack: default_slack(),
        }
    }
}

/// Gram matrix of `Φ_k`, `|k| ≤ n`, per row.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthonormalitySuite {
    pub n_list: Option<Vec<usize>>,
    #[serde(default = "threshold_gram")]
    pub threshold: f64,
}

fn threshold_gram() -> f64 {
    1e-8
}

/// Closed and sine forms vs direct sums, at `samples` random points per row.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSuite {
    pub n_list: Option<Vec<usize>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "threshold_dirichlet")]
    pub dirichlet_threshold: f64,
    #[serde(default = "threshold_cd")]
    pub cd_threshold: f64,
}

fn default_samples() -> usize {
    200
}
fn threshold_dirichlet() -> f64 {
    1e-9
}
fn threshold_cd() -> f64 {
    1e-10
}

/// `‖f − S_n f‖_p`; passes if strictly decreasing in `n`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpSuite {
    pub n_list: Option<Vec<usize>>,
    pub function: Option<String>,
    #[serde(default = "default_p")]
    pub p: f64,
}

fn default_p() -> f64 {
    2.0
}

/// `S_n(f; x0)` against the midpoint of the one-sided limits.
///
/// Passes if the last deviation is below `final_threshold` and, when
/// `ratio` is set, at most `ratio` times the first deviation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointwiseSuite {
    pub n_list: Option<Vec<usize>>,
    pub function: Option<String>,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "threshold_pointwise")]
    pub final_threshold: f64,
    pub ratio: Option<f64>,
}

fn threshold_pointwise() -> f64 {
    0.05
}

/// Phase-function inequalities on a rectangular grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSuite {
    pub n_list: Option<Vec<usize>>,
    #[serde(default = "default_x_min")]
    pub x_min: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_x_points")]
    pub x_points: usize,
    #[serde(default = "default_y_max")]
    pub y_max: f64,
    #[serde(default = "default_y_points")]
    pub y_points: usize,
    #[serde(default = "default_fd_slack")]
    pub fd_slack: f64,
}

fn default_x_min() -> f64 {
    -5.0
}
fn default_x_max() -> f64 {
    5.0
}
fn default_x_points() -> usize {
    21
}
fn default_y_max() -> f64 {
    5.0
}
fn default_y_points() -> usize {
    20
}
fn default_fd_slack() -> f64 {
    1e-3
}

/// Sine-integral and Riemann–Lebesgue probes of `μ_n`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSuite {
    pub n_list: Option<Vec<usize>>,
    #[serde(default)]
    pub x: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "threshold_pointwise")]
    pub threshold: f64,
}

fn default_delta() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        // relative pole files are resolved against the config's directory
        if let Some(p) = cfg.poles.path.as_mut() {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.span().map_or(1, |s| line_of_offset(text, s.start)),
            message: e.message().to_string(),
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    fn validate(&self, text: &str) -> Result<(), ConfigError> {
        check_n_list(text, "n_list", &self.n_list)?;
        let t = &self.tolerances;
        if !(t.quadrature > 0.0) {
            return Err(ConfigError::at(
                text,
                "quadrature",
                "tolerance must be positive",
            ));
        }
        if !(t.slack > 0.0) {
            return Err(ConfigError::at(text, "slack", "tolerance must be positive"));
        }
        self.pole_source(text)?;
        if !(self.poles.perturb >= 0.0) {
            return Err(ConfigError::at(text, "perturb", "must be nonnegative"));
        }
        if self.function.build().is_none() {
            return Err(ConfigError::at(
                text,
                "name",
                format!("unknown function `{}`", self.function.name),
            ));
        }
        let functions = [
            self.lp_convergence
                .as_ref()
                .and_then(|s| s.function.as_ref()),
            self.jump_pointwise
                .as_ref()
                .and_then(|s| s.function.as_ref()),
            self.dini_pointwise
                .as_ref()
                .and_then(|s| s.function.as_ref()),
        ];
        for n_list in self.suite_n_lists().into_iter().flatten() {
            check_n_list(text, "n_list", n_list)?;
        }
        for name in functions.into_iter().flatten() {
            let probe = FunctionConfig {
                name: name.clone(),
                ..self.function.clone()
            };
            if probe.build().is_none() {
                return Err(ConfigError::at(
                    text,
                    "function",
                    format!("unknown function `{name}`"),
                ));
            }
        }
        if self.suite_count() == 0 {
            return Err(ConfigError::Parse {
                line: 1,
                message: "no suite tables present".into(),
            });
        }
        if let Some(lp) = &self.lp_convergence {
            if !(lp.p > 1.0) {
                return Err(ConfigError::at(text, "p", "exponent must exceed 1"));
            }
        }
        if let Some(b) = &self.bounds {
            if !(b.x_min <= b.x_max) || b.x_points == 0 || b.y_points == 0 || !(b.y_max > 0.0) {
                return Err(ConfigError::at(text, "x_min", "empty bounds grid"));
            }
            if !(b.fd_slack > 0.0) {
                return Err(ConfigError::at(
                    text,
                    "fd_slack",
                    "tolerance must be positive",
                ));
            }
        }
        if let Some(p) = &self.probes {
            if !(p.delta > 0.0) {
                return Err(ConfigError::at(text, "delta", "must be positive"));
            }
        }
        Ok(())
    }

    fn pole_source(&self, text: &str) -> Result<PoleSource, ConfigError> {
        let p = &self.poles;
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| {
                ConfigError::at(
                    text,
                    "generator",
                    format!("generator `{}` needs `{key}`", p.generator),
                )
            })
        };
        let gen = match p.generator.as_str() {
            "constant" => PoleGenerator::Constant {
                re: p.re.unwrap_or(0.0),
                im: need(p.im, "im")?,
            },
            "geometric" => PoleGenerator::GeometricIm {
                base: need(p.base, "base")?,
            },
            "power_law" => PoleGenerator::PowerLaw {
                alpha: need(p.alpha, "alpha")?,
                beta: need(p.beta, "beta")?,
            },
            "file" => {
                let path = p.path.clone().ok_or_else(|| {
                    ConfigError::at(text, "generator", "generator `file` needs `path`")
                })?;
                return Ok(PoleSource::File(path));
            }
            other => {
                return Err(ConfigError::at(
                    text,
                    "generator",
                    format!("unknown generator `{other}`"),
                ))
            }
        };
        // a single generated pole tells us whether the half-plane is right
        gen.generate(1)
            .map_err(|e| ConfigError::at(text, "generator", e.to_string()))?;
        Ok(PoleSource::Generator(gen))
    }

    pub fn poles_source(&self) -> PoleSource {
        self.pole_source("").expect("validated at parse time")
    }

    /// Per-suite `n_list` overrides, `None` where a suite is absent or
    /// uses the top-level list.
    pub fn suite_n_lists(&self) -> [Option<&Vec<usize>>; 7] {
        [
            self.orthonormality.as_ref().and_then(|s| s.n_list.as_ref()),
            self.kernel_equivalence
                .as_ref()
                .and_then(|s| s.n_list.as_ref()),
            self.lp_convergence.as_ref().and_then(|s| s.n_list.as_ref()),
            self.jump_pointwise.as_ref().and_then(|s| s.n_list.as_ref()),
            self.dini_pointwise.as_ref().and_then(|s| s.n_list.as_ref()),
            self.bounds.as_ref().and_then(|s| s.n_list.as_ref()),
            self.probes.as_ref().and_then(|s| s.n_list.as_ref()),
        ]
    }

    pub fn suite_count(&self) -> usize {
        [
            self.orthonormality.is_some(),
            self.kernel_equivalence.is_some(),
            self.lp_convergence.is_some(),
            self.jump_pointwise.is_some(),
            self.dini_pointwise.is_some(),
            self.bounds.is_some(),
            self.probes.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count()
    }

    /// The target function for a suite, honouring a per-suite override.
    pub fn function_for(&self, name: Option<&String>) -> TargetFunction {
        match name {
            Some(n) => FunctionConfig {
                name: n.clone(),
                ..self.function.clone()
            },
            None => self.function.clone(),
        }
        .build()
        .expect("validated at parse time")
    }
}

fn check_n_list(text: &str, key: &str, n_list: &[usize]) -> Result<(), ConfigError> {
    if n_list.is_empty() {
        return Err(ConfigError::at(text, key, "n_list must be nonempty"));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::at(
            text,
            key,
            "n_list must be strictly increasing",
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 7
n_list = [1, 2, 4]

[poles]
generator = "constant"
im = 2.0

[lp_convergence]
p = 2.0
"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tolerances.quadrature, 1e-10);
        assert_eq!(cfg.suite_count(), 1);
        assert_eq!(cfg.poles_source().name(), "constant(0,2)");
    }

    #[test]
    fn empty_n_list_reports_its_line() {
        let text = MINIMAL.replace("[1, 2, 4]", "[]");
        match ExperimentConfig::parse(&text) {
            Err(ConfigError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("nonempty"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decreasing_n_list_rejected() {
        let text = MINIMAL.replace("[1, 2, 4]", "[4, 2]");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn syntax_error_carries_line() {
        let text = MINIMAL.replace("im = 2.0", "im = = 2.0");
        match ExperimentConfig::parse(&text) {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        let text = format!("{MINIMAL}\n[tolerances]\nquadrature = 0.0\n");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn lower_half_plane_generator_rejected() {
        let text = MINIMAL.replace("im = 2.0", "im = -2.0");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn unknown_keys_and_functions_rejected() {
        assert!(ExperimentConfig::parse(&format!("{MINIMAL}\nbogus = 1\n")).is_err());
        let text = MINIMAL.replace("p = 2.0", "p = 2.0\nfunction = \"nope\"");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn no_suites_is_an_error() {
        let text = MINIMAL.replace("[lp_convergence]\np = 2.0\n", "");
        assert!(ExperimentConfig::parse(&text).is_err());
    }
}
