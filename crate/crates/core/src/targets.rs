//! Standard test functions for the convergence experiments.

use num_complex::Complex64;

use crate::basis::BasisSystem;
use crate::error::Result;
use crate::quadrature::{Decay, FunctionClass, MarkedPoint, TargetFunction};

/// `e^{−x²}`, continuous at 0 with value 1.
pub fn gaussian() -> TargetFunction {
    TargetFunction::real("gaussian", Decay::SchwartzLike, |x| (-x * x).exp())
        .with_marked_point(MarkedPoint::continuous(0.0, 1.0))
        .with_class(FunctionClass::L1)
        .with_class(FunctionClass::BoundedVariation)
        .with_class(FunctionClass::DiniRegular)
}

/// `1 / (1 + x²)`.
pub fn lorentzian() -> TargetFunction {
    TargetFunction::real(
        "lorentzian",
        Decay::AlgebraicOrder {
            order: 2.0,
            scale: 1.0,
        },
        |x| 1.0 / (1.0 + x * x),
    )
    .with_marked_point(MarkedPoint::continuous(0.0, 1.0))
    .with_class(FunctionClass::L1)
    .with_class(FunctionClass::Lp(2.0))
    .with_class(FunctionClass::BoundedVariation)
}

/// `sign(x)·e^{−|x|}`: odd, with a jump from −1 to 1 at 0.
pub fn sign_exp() -> TargetFunction {
    TargetFunction::real("sign_exp", Decay::SchwartzLike, |x| {
        if x == 0.0 {
            0.0
        } else {
            x.signum() * (-x.abs()).exp()
        }
    })
    .with_marked_point(MarkedPoint {
        x0: 0.0,
        left_limit: -1.0,
        right_limit: 1.0,
    })
    .with_class(FunctionClass::L1)
    .with_class(FunctionClass::BoundedVariation)
    .with_class(FunctionClass::DiniRegular)
}

/// `sign(x)·e^{−x²}`.
pub fn sign_gauss() -> TargetFunction {
    TargetFunction::real("sign_gauss", Decay::SchwartzLike, |x| {
        if x == 0.0 {
            0.0
        } else {
            x.signum() * (-x * x).exp()
        }
    })
    .with_marked_point(MarkedPoint {
        x0: 0.0,
        left_limit: -1.0,
        right_limit: 1.0,
    })
    .with_class(FunctionClass::L1)
    .with_class(FunctionClass::BoundedVariation)
    .with_class(FunctionClass::DiniRegular)
}

/// `e^{−x}` for `x > 0`, zero otherwise; midpoint 1/2 at the jump.
pub fn one_sided_exp() -> TargetFunction {
    TargetFunction::real("one_sided_exp", Decay::SchwartzLike, |x| {
        if x > 0.0 {
            (-x).exp()
        } else {
            0.0
        }
    })
    .with_marked_point(MarkedPoint {
        x0: 0.0,
        left_limit: 0.0,
        right_limit: 1.0,
    })
    .with_class(FunctionClass::L1)
    .with_class(FunctionClass::BoundedVariation)
    .with_class(FunctionClass::DiniRegular)
}

/// The constant `value` on `[−half_width, half_width]`, continuous at 0.
pub fn plateau(value: f64, half_width: f64) -> TargetFunction {
    TargetFunction::real(
        format!("plateau({value},{half_width})"),
        Decay::Compact {
            lo: -half_width,
            hi: half_width,
        },
        move |_| value,
    )
    .with_marked_point(MarkedPoint::continuous(0.0, value))
    .with_class(FunctionClass::L1)
    .with_class(FunctionClass::BoundedVariation)
}

pub fn zero() -> TargetFunction {
    TargetFunction::real("zero", Decay::Compact { lo: 0.0, hi: 0.0 }, |_| 0.0)
        .with_marked_point(MarkedPoint::continuous(0.0, 0.0))
}

/// `Σ c_k Φ_k(x)` over the given `(k, c_k)` terms.
pub fn basis_combination(
    system: &BasisSystem,
    terms: &[(i64, Complex64)],
) -> Result<TargetFunction> {
    let mut scale = 0.0;
    for &(k, c) in terms {
        system.phi(k, Complex64::new(0.0, 0.0))?;
        let p = if k >= 0 {
            system.upper().poles()[k as usize]
        } else {
            system.lower().poles()[(-k - 1) as usize]
        };
        // |Φ_k(x)| = √|Im p| / |x − p̄| ≤ √|Im p| / (|x| − |p|)
        scale += 2.0 * c.norm() * p.im.abs().sqrt() * (1.0 + p.norm());
    }
    let sys = system.clone();
    let terms = terms.to_vec();
    Ok(TargetFunction::new(
        "basis_combination",
        Decay::AlgebraicOrder { order: 1.0, scale },
        move |x| {
            terms.iter().fold(Complex64::new(0.0, 0.0), |acc, &(k, c)| {
                acc + c * sys.phi_real(k, x)
            })
        },
    )
    .with_class(FunctionClass::Lp(2.0)))
}
