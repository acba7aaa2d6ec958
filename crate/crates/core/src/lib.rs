//! Orthonormal rational functions with fixed poles on the real axis.
//!
//! Given poles `a_k` in the upper half-plane and `b_k` in the lower
//! half-plane, the system `Φ_n`, `n ∈ ℤ`, is orthonormal on ℝ under
//! `(1/π) ∫ f ḡ dx`. This crate evaluates the system and its Blaschke
//! products ([`basis`]), the Christoffel–Darboux and Dirichlet kernels in
//! direct and closed form ([`kernels`]), integrals over ℝ and Fourier
//! coefficients ([`quadrature`]), and partial sums together with the
//! convergence experiments built on them ([`series`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod kernels;
pub mod poles;
pub mod quadrature;
pub mod report;
pub mod series;
pub mod targets;

pub use basis::BasisSystem;
pub use error::{Error, Result};
pub use kernels::{KernelEvaluation, KernelMethod};
pub use num_complex::Complex64;
pub use poles::{AdmissibilityReport, HalfPlane, PoleGenerator, PoleSequence};
pub use quadrature::{Decay, Integrator, MarkedPoint, QuadratureResult, TargetFunction};
pub use report::ExperimentReport;
