//! Pole sequences confined to one open half-plane and their admissibility
//! diagnostics.
//!
//! A [`PoleSequence`] is a finite prefix of a conceptually infinite sequence.
//! Every diagnostic takes an explicit prefix length `n`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfPlane {
    /// `Im p > 0`.
    Upper,
    /// `Im p < 0`.
    Lower,
}

impl HalfPlane {
    pub fn contains(self, p: Complex64) -> bool {
        match self {
            HalfPlane::Upper => p.im > 0.0,
            HalfPlane::Lower => p.im < 0.0,
        }
    }

    pub fn opposite(self) -> HalfPlane {
        match self {
            HalfPlane::Upper => HalfPlane::Lower,
            HalfPlane::Lower => HalfPlane::Upper,
        }
    }
}

impl fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HalfPlane::Upper => f.write_str("upper"),
            HalfPlane::Lower => f.write_str("lower"),
        }
    }
}

/// Check that every pole lies strictly inside `half_plane`.
///
/// On failure all offending indices are reported, not just the first.
pub fn validate(poles: &[Complex64], half_plane: HalfPlane) -> Result<()> {
    if poles.is_empty() {
        return Err(Error::EmptySequence);
    }
    let indices: Vec<usize> = poles
        .iter()
        .enumerate()
        .filter(|(_, p)| !half_plane.contains(**p))
        .map(|(k, _)| k)
        .collect();
    if indices.is_empty() {
        Ok(())
    } else {
        Err(Error::WrongHalfPlane { indices })
    }
}

/// An ordered, validated list of poles in one open half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSequence {
    poles: Vec<Complex64>,
    half_plane: HalfPlane,
}

impl PoleSequence {
    pub fn new(poles: Vec<Complex64>, half_plane: HalfPlane) -> Result<Self> {
        validate(&poles, half_plane)?;
        Ok(Self { poles, half_plane })
    }

    pub fn upper(poles: Vec<Complex64>) -> Result<Self> {
        Self::new(poles, HalfPlane::Upper)
    }

    pub fn lower(poles: Vec<Complex64>) -> Result<Self> {
        Self::new(poles, HalfPlane::Lower)
    }

    /// Parse the text format: one pole per line as `re im`.
    ///
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str, half_plane: HalfPlane) -> Result<Self> {
        let mut poles = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(parse_err(format!(
                    "expected two fields `re im`, found {}",
                    fields.len()
                )));
            }
            let re = f64::from_str(fields[0])
                .map_err(|e| parse_err(format!("bad real part {:?}: {e}", fields[0])))?;
            let im = f64::from_str(fields[1])
                .map_err(|e| parse_err(format!("bad imaginary part {:?}: {e}", fields[1])))?;
            poles.push(Complex64::new(re, im));
        }
        Self::new(poles, half_plane)
    }

    /// Render in the same `re im` text format accepted by [`PoleSequence::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.poles {
            out.push_str(&format!("{:e} {:e}\n", p.re, p.im));
        }
        out
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn half_plane(&self) -> HalfPlane {
        self.half_plane
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Pole-wise complex conjugate, living in the opposite half-plane.
    pub fn conjugated(&self) -> PoleSequence {
        PoleSequence {
            poles: self.poles.iter().map(|p| p.conj()).collect(),
            half_plane: self.half_plane.opposite(),
        }
    }

    /// The first `n` poles, or `PrefixTooShort`.
    pub fn prefix(&self, n: usize) -> Result<&[Complex64]> {
        self.poles.get(..n).ok_or(Error::PrefixTooShort {
            requested: n,
            available: self.poles.len(),
        })
    }

    /// `σ_n = Σ_{k<n} |Im a_k| / (1 + |a_k|²)`.
    pub fn sigma_n(&self, n: usize) -> Result<f64> {
        Ok(self.prefix(n)?.iter().map(|&p| sigma_term(p)).sum())
    }

    /// `ς_n = Σ_{k<n} 1 / (Im a_k)²`.
    pub fn varsigma_n(&self, n: usize) -> Result<f64> {
        Ok(self.prefix(n)?.iter().map(|&p| varsigma_term(p)).sum())
    }

    /// `Σ_{k<n} 1 / |Im a_k|³`, the constant in the second-derivative bound
    /// of the phase function.
    pub fn inverse_cube_sum(&self, n: usize) -> Result<f64> {
        Ok(self
            .prefix(n)?
            .iter()
            .map(|p| 1.0 / p.im.abs().powi(3))
            .sum())
    }

    /// Finite-prefix evidence for the divergence and ratio conditions.
    pub fn admissibility(
        &self,
        n_max: usize,
        sigma_threshold: f64,
        ratio_bound: f64,
    ) -> Result<AdmissibilityReport> {
        let prefix = self.prefix(n_max)?;
        let mut sigma = Vec::with_capacity(n_max);
        let mut varsigma = Vec::with_capacity(n_max);
        let mut ratio = Vec::with_capacity(n_max);
        let (mut s, mut v) = (0.0, 0.0);
        for &p in prefix {
            s += sigma_term(p);
            v += varsigma_term(p);
            sigma.push(s);
            varsigma.push(v);
            ratio.push(v / s);
        }
        let min_abs_im = prefix
            .iter()
            .map(|p| p.im.abs())
            .fold(f64::INFINITY, f64::min);
        let sigma_diverges_trend = sigma.last().is_some_and(|&s| s >= sigma_threshold);
        let ratio_bounded = ratio.iter().all(|&r| r <= ratio_bound);
        Ok(AdmissibilityReport {
            n_max,
            sigma,
            varsigma,
            ratio,
            min_abs_im,
            sigma_diverges_trend,
            ratio_bounded,
        })
    }
}

fn sigma_term(p: Complex64) -> f64 {
    p.im.abs() / (1.0 + p.norm_sqr())
}

fn varsigma_term(p: Complex64) -> f64 {
    1.0 / (p.im * p.im)
}

/// Diagnostics over `n = 1..=n_max`; entry `i` belongs to prefix length `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub n_max: usize,
    pub sigma: Vec<f64>,
    pub varsigma: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Smallest `|Im a_k|` over the prefix; `+inf` for an empty prefix.
    /// Stands in for "no limit points on the real axis".
    pub min_abs_im: f64,
    pub sigma_diverges_trend: bool,
    pub ratio_bounded: bool,
}

/// Named parametric families of upper half-plane poles.
#[derive(Debug, Clone, PartialEq)]
pub enum PoleGenerator {
    /// `a_k = re + i·im` for every k.
    Constant { re: f64, im: f64 },
    /// `a_k = i·base^k`.
    GeometricIm { base: f64 },
    /// `a_k = k^alpha + i·(k+1)^beta`.
    PowerLaw { alpha: f64, beta: f64 },
    /// Repeats the given list.
    Cyclic(Vec<Complex64>),
}

impl PoleGenerator {
    pub fn name(&self) -> String {
        match self {
            PoleGenerator::Constant { re, im } => format!("constant({re},{im})"),
            PoleGenerator::GeometricIm { base } => format!("geometric_im({base})"),
            PoleGenerator::PowerLaw { alpha, beta } => format!("power_law({alpha},{beta})"),
            PoleGenerator::Cyclic(list) => format!("cyclic({})", list.len()),
        }
    }

    pub fn pole(&self, k: usize) -> Complex64 {
        match self {
            PoleGenerator::Constant { re, im } => Complex64::new(*re, *im),
            PoleGenerator::GeometricIm { base } => Complex64::new(0.0, base.powi(k as i32)),
            PoleGenerator::PowerLaw { alpha, beta } => {
                Complex64::new((k as f64).powf(*alpha), ((k + 1) as f64).powf(*beta))
            }
            PoleGenerator::Cyclic(list) => list[k % list.len()],
        }
    }

    /// The first `len` poles as a validated upper sequence.
    pub fn generate(&self, len: usize) -> Result<PoleSequence> {
        if let PoleGenerator::Cyclic(list) = self {
            if list.is_empty() {
                return Err(Error::EmptySequence);
            }
        }
        PoleSequence::upper((0..len).map(|k| self.pole(k)).collect())
    }
}
