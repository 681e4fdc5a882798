//! The piecewise-parabolic kernel K(x, t), the functional L it represents,
//! and numerical verification of the identity between them.
//!
//! K(x, t) = (alpha/(alpha+beta)) (t-a)(x-t)/(x-a)   on [a, x],
//!           -(beta/(alpha+beta)) (b-t)(x-t)/(b-x)   on [x, b],
//! and   integral_a^b K(x, t) f''(t) dt = L(f; x, alpha, beta)  with
//! L = f(x) + (alpha f(a) + beta f(b))/(alpha+beta)
//!       - (2/(alpha+beta)) [ alpha/(x-a) int_a^x f + beta/(b-x) int_x^b f ].

use crate::quadrature::oracle_integrate;
use crate::types::{BoundReport, Error, Interval, ProblemFrame, TestFunction, Tolerances};

/// Which piece of the kernel produced a value. Ties at t = x (where both give
/// zero) are recorded as Left for reproducible reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelBranch {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub branch: KernelBranch,
}

fn kernel_left(frame: &ProblemFrame, t: f64) -> f64 {
    frame.weight_left() * (t - frame.a()) * (frame.x() - t) / frame.dx_left()
}

fn kernel_right(frame: &ProblemFrame, t: f64) -> f64 {
    -frame.weight_right() * (frame.b() - t) * (frame.x() - t) / frame.dx_right()
}

/// Evaluate K(x, t). Exactly zero at t in {a, x, b} because a vanishing factor
/// multiplies the rest.
pub fn eval_kernel(frame: &ProblemFrame, t: f64) -> Result<KernelValue, Error> {
    if !frame.interval().contains(t) {
        return Err(Error::OutsideDomain { t, a: frame.a(), b: frame.b() });
    }
    if t <= frame.x() {
        Ok(KernelValue { value: kernel_left(frame, t), branch: KernelBranch::Left })
    } else {
        Ok(KernelValue { value: kernel_right(frame, t), branch: KernelBranch::Right })
    }
}

/// Partial integral of f over [lo, hi]: exact antiderivative when available,
/// oracle otherwise.
pub(crate) fn partial_integral(
    fun: &TestFunction,
    lo: f64,
    hi: f64,
    tol: &Tolerances,
) -> Result<f64, Error> {
    if let Some(anti) = &fun.antiderivative {
        Ok(anti(hi) - anti(lo))
    } else {
        let (v, _) = oracle_integrate(|t| fun.f_at(t), Interval::new(lo, hi)?, tol)?;
        Ok(v)
    }
}

/// The functional L(f; x, alpha, beta) that every bound in the suite controls.
pub fn lhs_functional(
    fun: &TestFunction,
    frame: &ProblemFrame,
    tol: &Tolerances,
) -> Result<f64, Error> {
    if !fun.domain.contains_interval(&frame.interval()) {
        return Err(Error::OutsideDomain {
            t: frame.a(),
            a: fun.domain.a(),
            b: fun.domain.b(),
        });
    }
    let (a, b, x) = (frame.a(), frame.b(), frame.x());
    let (alpha, beta) = (frame.alpha(), frame.beta());
    let w = alpha + beta;
    let left = partial_integral(fun, a, x, tol)?;
    let right = partial_integral(fun, x, b, tol)?;
    Ok(fun.f_at(x) + (alpha * fun.f_at(a) + beta * fun.f_at(b)) / w
        - (2.0 / w) * (alpha / (x - a) * left + beta / (b - x) * right))
}

/// integral_a^b K(x, t) f''(t) dt, split at t = x where the kernel has a
/// derivative kink, so each oracle call sees a smooth integrand.
pub fn kernel_integral(
    fun: &TestFunction,
    frame: &ProblemFrame,
    tol: &Tolerances,
) -> Result<f64, Error> {
    if !fun.domain.contains_interval(&frame.interval()) {
        return Err(Error::OutsideDomain {
            t: frame.a(),
            a: fun.domain.a(),
            b: fun.domain.b(),
        });
    }
    let left_iv = Interval::new(frame.a(), frame.x())?;
    let right_iv = Interval::new(frame.x(), frame.b())?;
    let (left, _) = oracle_integrate(|t| kernel_left(frame, t) * fun.f2_at(t), left_iv, tol)?;
    let (right, _) = oracle_integrate(|t| kernel_right(frame, t) * fun.f2_at(t), right_iv, tol)?;
    Ok(left + right)
}

/// Check the identity numerically: HOLDS iff the two sides agree within
/// `tol.identity_abs`.
pub fn verify_identity(
    fun: &TestFunction,
    frame: &ProblemFrame,
    tol: &Tolerances,
) -> Result<BoundReport, Error> {
    let kernel_side = kernel_integral(fun, frame, tol)?;
    let functional_side = lhs_functional(fun, frame, tol)?;
    Ok(BoundReport::identity(&fun.id, *frame, kernel_side, functional_side, tol))
}
