//! Blaschke products and the two-sided orthonormal rational system `Φ_n`,
//! `n ∈ ℤ`, built from poles in the upper (`a_k`, `k ≥ 0`) and lower
//! (`b_k`, `k ≥ 1`) half-planes.
//!
//! For `n ≥ 0`, `Φ_n = √(Im a_n) / (z − ā_n) · B⁺_n(z)`; for `n ≤ −1`,
//! `Φ_n = √(−Im b_{−n}) / (z − b̄_{−n}) · B⁻_{−n}(z)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poles::{HalfPlane, PoleSequence};

/// Relative distance below which an evaluation point counts as a pole hit.
pub const POLE_HIT_TOLERANCE: f64 = 1e-13;

/// The unimodular normalising factor `|1 + p²| / (1 + p²)`.
///
/// At `p = ±i` the formula is `0/0`; the factor is then defined as 1.
pub fn chi(pole: Complex64) -> Complex64 {
    let w = Complex64::new(1.0, 0.0) + pole * pole;
    let r = w.norm();
    if r <= f64::EPSILON * (1.0 + pole.norm_sqr()) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(r, 0.0) / w
    }
}

fn check_pole_hit(z: Complex64, pole: Complex64) -> Result<()> {
    if (z - pole).norm() < POLE_HIT_TOLERANCE * (1.0 + pole.norm()) {
        Err(Error::PoleHit { z, pole })
    } else {
        Ok(())
    }
}

/// `Π_{p ∈ zeros} χ(p) (z − p) / (z − p̄)`, factors taken left to right.
fn blaschke_product(zeros: &[Complex64], z: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for &p in zeros {
        let pole = p.conj();
        check_pole_hit(z, pole)?;
        acc *= chi(p) * (z - p) / (z - pole);
    }
    Ok(acc)
}

/// `B⁺_n(z)` with zeros at `a_0, …, a_{n−1}`; `B⁺_0 = 1`.
pub fn blaschke_plus(upper: &PoleSequence, n: usize, z: Complex64) -> Result<Complex64> {
    blaschke_product(upper.prefix(n)?, z)
}

/// `B⁻_m(z)` with zeros at `b_1, …, b_{m−1}`; `B⁻_1 = 1`.
///
/// `lower.poles()[0]` holds `b_1`. `m = 0` is treated like `m = 1`.
pub fn blaschke_minus(lower: &PoleSequence, m: usize, z: Complex64) -> Result<Complex64> {
    blaschke_product(lower.prefix(m.saturating_sub(1))?, z)
}

/// A paired upper/lower pole configuration defining `Φ_n` for all
/// available integer `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSystem {
    upper: PoleSequence,
    lower: PoleSequence,
    conjugate_paired: bool,
}

impl BasisSystem {
    /// General configuration. Pairing `b_k = ā_{k−1}` is detected on the
    /// common prefix.
    pub fn new(upper: PoleSequence, lower: PoleSequence) -> Result<Self> {
        if upper.half_plane() != HalfPlane::Upper {
            return Err(Error::InvalidParameter(
                "upper sequence must lie in the upper half-plane".into(),
            ));
        }
        if lower.half_plane() != HalfPlane::Lower {
            return Err(Error::InvalidParameter(
                "lower sequence must lie in the lower half-plane".into(),
            ));
        }
        let conjugate_paired = lower.len() <= upper.len()
            && lower
                .poles()
                .iter()
                .zip(upper.poles())
                .all(|(b, a)| *b == a.conj());
        Ok(Self {
            upper,
            lower,
            conjugate_paired,
        })
    }

    /// The conjugate-paired configuration `b_k = ā_{k−1}`, `k = 1..=upper.len()`.
    pub fn conjugate_paired(upper: PoleSequence) -> Result<Self> {
        let lower = upper.conjugated();
        Self::new(upper, lower)
    }

    pub fn upper(&self) -> &PoleSequence {
        &self.upper
    }

    pub fn lower(&self) -> &PoleSequence {
        &self.lower
    }

    pub fn is_conjugate_paired(&self) -> bool {
        self.conjugate_paired
    }

    /// Smallest available index, `−lower.len()`.
    pub fn min_index(&self) -> i64 {
        -(self.lower.len() as i64)
    }

    /// Largest available index, `upper.len() − 1`.
    pub fn max_index(&self) -> i64 {
        self.upper.len() as i64 - 1
    }

    fn check_index(&self, n: i64) -> Result<()> {
        if n < self.min_index() || n > self.max_index() {
            Err(Error::IndexOutOfRange {
                index: n,
                min: self.min_index(),
                max: self.max_index(),
            })
        } else {
            Ok(())
        }
    }

    /// Largest `n` such that the partial sum `S_n = S_{n,n+1}` has all of
    /// its basis functions available.
    pub fn max_partial_sum_order(&self) -> usize {
        self.upper.len().min(self.lower.len())
    }

    /// `Φ_n(z)`.
    pub fn phi(&self, n: i64, z: Complex64) -> Result<Complex64> {
        self.check_index(n)?;
        if n >= 0 {
            let k = n as usize;
            let a = self.upper.poles()[k];
            check_pole_hit(z, a.conj())?;
            let b = blaschke_plus(&self.upper, k, z)?;
            Ok(Complex64::new(a.im.sqrt(), 0.0) / (z - a.conj()) * b)
        } else {
            let j = (-n) as usize;
            let b = self.lower.poles()[j - 1];
            check_pole_hit(z, b.conj())?;
            let bl = blaschke_minus(&self.lower, j, z)?;
            Ok(Complex64::new((-b.im).sqrt(), 0.0) / (z - b.conj()) * bl)
        }
    }

    /// `Φ_n(x)` on the real axis, where no pole can be hit.
    ///
    /// Panics if `n` is outside the available range.
    pub fn phi_real(&self, n: i64, x: f64) -> Complex64 {
        self.phi(n, Complex64::new(x, 0.0))
            .expect("basis index checked by caller; real points are never poles")
    }

    /// All `Φ_k(x)` for `k` in `lo..=hi`, sharing the Blaschke products.
    ///
    /// Agrees with repeated [`BasisSystem::phi_real`] calls up to rounding.
    pub fn phi_range_real(&self, lo: i64, hi: i64, x: f64) -> Result<Vec<Complex64>> {
        if lo > hi {
            return Ok(Vec::new());
        }
        self.check_index(lo)?;
        self.check_index(hi)?;
        let z = Complex64::new(x, 0.0);
        let mut out = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];

        if hi >= 0 {
            let mut b = Complex64::new(1.0, 0.0);
            for k in 0..=hi as usize {
                let a = self.upper.poles()[k];
                if k as i64 >= lo {
                    out[(k as i64 - lo) as usize] =
                        Complex64::new(a.im.sqrt(), 0.0) / (z - a.conj()) * b;
                }
                b *= chi(a) * (z - a) / (z - a.conj());
            }
        }
        if lo < 0 {
            let mut b = Complex64::new(1.0, 0.0);
            for j in 1..=(-lo) as usize {
                let p = self.lower.poles()[j - 1];
                let idx = -(j as i64);
                if idx <= hi {
                    out[(idx - lo) as usize] =
                        Complex64::new((-p.im).sqrt(), 0.0) / (z - p.conj()) * b;
                }
                b *= chi(p) * (z - p) / (z - p.conj());
            }
        }
        Ok(out)
    }
}
