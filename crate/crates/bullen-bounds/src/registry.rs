//! Curated catalog of test functions with certified convexity-class metadata,
//! plus sampling-based falsification checkers for the membership claims.
//!
//! Certification lives in the provenance text (closed-form arguments); the
//! sampled checkers can only falsify, never certify.

use std::sync::{Arc, LazyLock};

use crate::quadrature::gk15_panel;
use crate::types::{Error, F2Shape, Interval, RealFn, SExponent, TestFunction};

/// A test function plus the justification for its claimed memberships.
#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub function: TestFunction,
    pub provenance: String,
    pub tags: Vec<&'static str>,
}

const E: f64 = std::f64::consts::E;

/// The built-in catalog.
#[allow(clippy::vec_init_then_push)]
pub fn builtin_registry() -> Vec<RegistryEntry> {
    let mut entries = Vec::new();

    entries.push(RegistryEntry {
        function: TestFunction {
            id: "constant".into(),
            f: Arc::new(|_| 3.0),
            f1: Arc::new(|_| 0.0),
            f2: Arc::new(|_| 0.0),
            antiderivative: Some(Arc::new(|t| 3.0 * t)),
            s_membership: Some(SExponent::new(1.0).unwrap()),
            log_convex_f2: false,
            m2: Some(0.0),
            m1: Some(0.0),
            domain: Interval::new(0.0, 3.0).unwrap(),
            convex: true,
            f2_shape: F2Shape::Zero,
        },
        provenance: "f'' = 0: the zero function lies in K_s^2 for every s in (0,1]; \
                     excluded from the log-convex route (kappa undefined at zero magnitude)."
            .into(),
        tags: vec!["affine", "zero-curvature"],
    });

    entries.push(RegistryEntry {
        function: TestFunction {
            id: "linear".into(),
            f: Arc::new(|t| 2.0 * t + 1.0),
            f1: Arc::new(|_| 2.0),
            f2: Arc::new(|_| 0.0),
            antiderivative: Some(Arc::new(|t| t * t + t)),
            s_membership: Some(SExponent::new(1.0).unwrap()),
            log_convex_f2: false,
            m2: Some(0.0),
            m1: Some(2.0),
            domain: Interval::new(0.0, 3.0).unwrap(),
            convex: true,
            f2_shape: F2Shape::Zero,
        },
        provenance: "f = 2t + 1, f'' = 0: zero curvature, equality witness for \
                     exactness-on-linears checks."
            .into(),
        tags: vec!["affine", "zero-curvature"],
    });

    entries.push(RegistryEntry {
        function: TestFunction {
            id: "quadratic".into(),
            f: Arc::new(|t| t * t),
            f1: Arc::new(|t| 2.0 * t),
            f2: Arc::new(|_| 2.0),
            antiderivative: Some(Arc::new(|t| t * t * t / 3.0)),
            s_membership: Some(SExponent::new(1.0).unwrap()),
            log_convex_f2: true,
            m2: Some(2.0),
            m1: Some(6.0),
            domain: Interval::new(0.0, 3.0).unwrap(),
            convex: true,
            f2_shape: F2Shape::NonnegConvex,
        },
        provenance: "f'' = 2: positive constant, hence log-convex with degenerate \
                     kappa = tau = 1, and nonnegative convex, hence in K_s^2 for every s <= 1. \
                     Sharp witness: the s = 1 bounds attain equality on every frame."
            .into(),
        tags: vec!["polynomial", "smooth", "equality-witness"],
    });

    entries.push(RegistryEntry {
        function: TestFunction {
            id: "quartic".into(),
            f: Arc::new(|t| t.powi(4)),
            f1: Arc::new(|t| 4.0 * t.powi(3)),
            f2: Arc::new(|t| 12.0 * t * t),
            antiderivative: Some(Arc::new(|t| t.powi(5) / 5.0)),
            s_membership: Some(SExponent::new(1.0).unwrap()),
            log_convex_f2: false,
            m2: Some(108.0),
            m1: Some(108.0),
            domain: Interval::new(0.0, 3.0).unwrap(),
            convex: true,
            f2_shape: F2Shape::NonnegConvex,
        },
        provenance: "f'' = 12 t^2: nonnegative and convex, hence in K_s^2 for every s <= 1 \
                     (and so is every power q >= 1); not log-convex (f''(0) = 0)."
            .into(),
        tags: vec!["polynomial", "smooth"],
    });

    for (label, sigma) in [("power_s(1/4)", 0.25), ("power_s(1/2)", 0.5), ("power_s(3/4)", 0.75)] {
        let s0 = sigma;
        let c2 = (s0 + 1.0) * (s0 + 2.0);
        let c3 = c2 * (s0 + 3.0);
        entries.push(RegistryEntry {
            function: TestFunction {
                id: label.into(),
                f: Arc::new(move |t: f64| t.powf(s0 + 2.0) / c2),
                f1: Arc::new(move |t: f64| t.powf(s0 + 1.0) / (s0 + 1.0)),
                f2: Arc::new(move |t: f64| t.powf(s0)),
                antiderivative: Some(Arc::new(move |t: f64| t.powf(s0 + 3.0) / c3)),
                s_membership: Some(SExponent::new(sigma).unwrap()),
                log_convex_f2: false,
                m2: Some(3.0f64.powf(sigma)),
                m1: Some(3.0f64.powf(sigma + 1.0) / (sigma + 1.0)),
                domain: Interval::new(0.0, 3.0).unwrap(),
                convex: true,
                f2_shape: F2Shape::PowerLaw { sigma },
            },
            provenance: format!(
                "f''(t) = t^{sigma}: in K_s^2 for s <= {sigma} by subadditivity of \
                 u -> u^{sigma} ((u+v)^s <= u^s + v^s), and nonnegative members of K_s^2 \
                 descend to every smaller exponent; |f''|^q = t^({sigma} q) follows the \
                 power-law rule. Not log-convex (f''(0) = 0, ln t^s concave)."
            ),
            tags: vec!["power", "sconvex-witness"],
        });
    }

    for (label, c, domain_hi) in
        [("exp1", 1.0f64, 1.0f64), ("exp2", 2.0, 3.0), ("expneg1", -1.0, 3.0)]
    {
        let cc = c;
        let m1 = if cc > 0.0 {
            (cc * domain_hi).exp() / cc.abs()
        } else {
            1.0 / cc.abs() // |f'| = e^{ct}/|c| decreasing, sup at t = 0
        };
        entries.push(RegistryEntry {
            function: TestFunction {
                id: label.into(),
                f: Arc::new(move |t: f64| (cc * t).exp() / (cc * cc)),
                f1: Arc::new(move |t: f64| (cc * t).exp() / cc),
                f2: Arc::new(move |t: f64| (cc * t).exp()),
                antiderivative: Some(Arc::new(move |t: f64| (cc * t).exp() / (cc * cc * cc))),
                s_membership: Some(SExponent::new(1.0).unwrap()),
                log_convex_f2: true,
                m2: Some(if cc > 0.0 { (cc * domain_hi).exp() } else { 1.0 }),
                m1: Some(m1),
                domain: Interval::new(0.0, domain_hi).unwrap(),
                convex: true,
                f2_shape: F2Shape::NonnegConvex,
            },
            provenance: format!(
                "f = e^({c} t)/{}: f'' = e^({c} t) > 0 with ln f'' linear, so |f''| and all \
                 its powers are exactly log-linear (log-convex with equality); equality \
                 witness for the log-convex bounds. Also nonnegative convex, hence in \
                 K_s^2 for every s.",
                c * c
            ),
            tags: vec!["exponential", "smooth", "log-linear", "equality-witness"],
        });
    }

    entries.push(expsq_entry());

    entries
}

/// Find one entry by id.
pub fn find_function(registry: &[RegistryEntry], id: &str) -> Result<TestFunction, Error> {
    registry
        .iter()
        .find(|e| e.function.id == id)
        .map(|e| e.function.clone())
        .ok_or_else(|| Error::UnknownFunction { id: id.to_string() })
}

// ---------------------------------------------------------------------------
// Tabulated entry: f'' = e^{t^2} on [0, 1], strictly log-convex with nonlinear
// logarithm. f' and f are built once by cumulative Gauss-Kronrod integration
// of f'' on a 1001-node grid and evaluated by two-point cubic Hermite with
// exact node derivatives (interpolation error ~ h^4 max|f''''|/384 ~ 4e-14).
// ---------------------------------------------------------------------------

const EXPSQ_CELLS: usize = 1000;

struct ExpSqTable {
    h: f64,
    f: Vec<f64>,
    f1: Vec<f64>,
}

static EXPSQ: LazyLock<Arc<ExpSqTable>> = LazyLock::new(|| Arc::new(build_expsq_table()));

fn expsq_f2(t: f64) -> f64 {
    (t * t).exp()
}

fn build_expsq_table() -> ExpSqTable {
    let n = EXPSQ_CELLS;
    let h = 1.0 / n as f64;
    let mut f1 = vec![0.0f64; n + 1];
    let mut f = vec![0.0f64; n + 1];
    for i in 0..n {
        let lo = i as f64 * h;
        let hi = lo + h;
        let f1_lo = f1[i];
        // f'(u) inside the cell, needed at the Kronrod nodes of the f-integral.
        let fprime = |u: f64| {
            if u <= lo {
                f1_lo
            } else {
                f1_lo + gk15_panel(&expsq_f2, lo, u).0
            }
        };
        f[i + 1] = f[i] + gk15_panel(&fprime, lo, hi).0;
        f1[i + 1] = f1_lo + gk15_panel(&expsq_f2, lo, hi).0;
    }
    ExpSqTable { h, f, f1 }
}

impl ExpSqTable {
    fn cell(&self, t: f64) -> (usize, f64) {
        let pos = t / self.h;
        let i = (pos.floor() as usize).min(EXPSQ_CELLS - 1);
        (i, pos - i as f64)
    }

    // Two-point cubic Hermite with node values `vals` and node derivatives `ders`.
    fn hermite(&self, vals: &[f64], d0: f64, d1: f64, i: usize, u: f64) -> f64 {
        let (p0, p1) = (vals[i], vals[i + 1]);
        let (m0, m1) = (d0 * self.h, d1 * self.h);
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * p0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * p1
            + (u3 - u2) * m1
    }

    fn eval_f(&self, t: f64) -> f64 {
        let (i, u) = self.cell(t);
        self.hermite(&self.f, self.f1[i], self.f1[i + 1], i, u)
    }

    fn eval_f1(&self, t: f64) -> f64 {
        let (i, u) = self.cell(t);
        let lo = i as f64 * self.h;
        self.hermite(&self.f1, expsq_f2(lo), expsq_f2(lo + self.h), i, u)
    }
}

fn expsq_entry() -> RegistryEntry {
    let table = EXPSQ.clone();
    let t_f = table.clone();
    let t_f1 = table.clone();
    let m1 = table.f1[EXPSQ_CELLS];
    RegistryEntry {
        function: TestFunction {
            id: "expsq".into(),
            f: Arc::new(move |t: f64| t_f.eval_f(t)),
            f1: Arc::new(move |t: f64| t_f1.eval_f1(t)),
            f2: Arc::new(expsq_f2),
            antiderivative: None,
            s_membership: Some(SExponent::new(1.0).unwrap()),
            log_convex_f2: true,
            m2: Some(E),
            m1: Some(m1),
            domain: Interval::new(0.0, 1.0).unwrap(),
            convex: true,
            f2_shape: F2Shape::NonnegConvex,
        },
        provenance: "f'' = e^{t^2} > 0 with ln f'' = t^2 strictly convex: strictly \
                     log-convex with nonlinear logarithm (slack witness for the \
                     log-convex bounds); also convex and nonnegative, hence in K_s^2 \
                     for every s. f' and f tabulated by cumulative quadrature of f''."
            .into(),
        tags: vec!["exponential", "smooth", "strictly-log-convex", "tabulated"],
    }
}

// ---------------------------------------------------------------------------
// Sampled membership falsifiers.
// ---------------------------------------------------------------------------

/// Verdict of a lattice search. NO_COUNTEREXAMPLE is not a proof.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipVerdict {
    NoCounterexample,
    Counterexample { x: f64, y: f64, lambda: f64 },
    NotPositive { t: f64 },
}

const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Search a grid_n^3 lattice of (x, y, lambda) for a violation of
/// g(lambda x + (1-lambda) y) <= lambda^s g(x) + (1-lambda)^s g(y).
pub fn check_s_convex_sampled(
    g: &dyn Fn(f64) -> f64,
    interval: Interval,
    s: SExponent,
    grid_n: usize,
) -> MembershipVerdict {
    let n = grid_n.max(3);
    let pts: Vec<f64> = (0..n)
        .map(|i| interval.a() + interval.length() * i as f64 / (n - 1) as f64)
        .collect();
    let s = s.get();
    for &x in &pts {
        let gx = g(x);
        for &y in &pts {
            let gy = g(y);
            for k in 0..n {
                let lambda = k as f64 / (n - 1) as f64;
                let lhs = g(lambda * x + (1.0 - lambda) * y);
                let rhs = lambda.powf(s) * gx + (1.0 - lambda).powf(s) * gy;
                if lhs > rhs + MEMBERSHIP_SLACK {
                    return MembershipVerdict::Counterexample { x, y, lambda };
                }
            }
        }
    }
    MembershipVerdict::NoCounterexample
}

/// Lattice falsifier for g(lambda x + (1-lambda) y) <= g(x)^lambda g(y)^(1-lambda).
/// Any nonpositive sample short-circuits to NotPositive.
pub fn check_log_convex_sampled(
    g: &dyn Fn(f64) -> f64,
    interval: Interval,
    grid_n: usize,
) -> MembershipVerdict {
    let n = grid_n.max(3);
    let pts: Vec<f64> = (0..n)
        .map(|i| interval.a() + interval.length() * i as f64 / (n - 1) as f64)
        .collect();
    for &t in &pts {
        if g(t) <= 0.0 || g(t).is_nan() {
            return MembershipVerdict::NotPositive { t };
        }
    }
    for &x in &pts {
        let gx = g(x);
        for &y in &pts {
            let gy = g(y);
            for k in 0..n {
                let lambda = k as f64 / (n - 1) as f64;
                let lhs = g(lambda * x + (1.0 - lambda) * y);
                let rhs = gx.powf(lambda) * gy.powf(1.0 - lambda);
                if lhs > rhs + MEMBERSHIP_SLACK {
                    return MembershipVerdict::Counterexample { x, y, lambda };
                }
            }
        }
    }
    MembershipVerdict::NoCounterexample
}

/// First sampled point where g goes negative, if any. Members of K_s^2 with
/// s < 1 must be nonnegative.
pub fn check_nonnegative_sampled(
    g: &dyn Fn(f64) -> f64,
    interval: Interval,
    grid_n: usize,
) -> Option<f64> {
    let n = grid_n.max(3);
    (0..n)
        .map(|i| interval.a() + interval.length() * i as f64 / (n - 1) as f64)
        .find(|&t| g(t) < 0.0)
}

// ---------------------------------------------------------------------------
// Membership-only targets (piecewise family from the s-convexity literature):
// g(0) = a0, g(t) = b t^s + c for t > 0. Members iff b >= 0 and 0 <= c <= a0;
// not integrands (g'' is singular at 0).
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub struct MembershipTarget {
    pub id: String,
    pub g: RealFn,
    pub s: SExponent,
    pub expected_member: bool,
    pub provenance: String,
}

impl std::fmt::Debug for MembershipTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MembershipTarget")
            .field("id", &self.id)
            .field("s", &self.s)
            .field("expected_member", &self.expected_member)
            .finish()
    }
}

pub fn piecewise_power(a0: f64, b: f64, c: f64, s: f64) -> RealFn {
    Arc::new(move |t: f64| if t == 0.0 { a0 } else { b * t.powf(s) + c })
}

pub fn membership_targets() -> Vec<MembershipTarget> {
    let s_half = SExponent::new(0.5).unwrap();
    vec![
        MembershipTarget {
            id: "piecewise_member(s=1/2)".into(),
            g: piecewise_power(1.0, 1.0, 0.5, 0.5),
            s: s_half,
            expected_member: true,
            provenance: "b = 1 >= 0 and 0 <= c = 1/2 <= a0 = 1: member of K_{1/2}^2."
                .into(),
        },
        MembershipTarget {
            id: "piecewise_nonmember(s=1/2)".into(),
            g: piecewise_power(0.0, 1.0, -0.5, 0.5),
            s: s_half,
            expected_member: false,
            provenance: "b = 1 > 0 and c = -1/2 < 0: not in K_{1/2}^2 (negative values \
                         violate lambda = 1/2 self-combination)."
                .into(),
        },
        MembershipTarget {
            id: "sqrt(s=1/2)".into(),
            g: Arc::new(|t: f64| t.sqrt()),
            s: s_half,
            expected_member: true,
            provenance: "t^{1/2} is 1/2-convex by subadditivity of the square root.".into(),
        },
    ]
}

// ---------------------------------------------------------------------------
// Per-entry certification suite: runnable standalone, returns the list of
// failed checks (empty = all claims survived sampling).
// ---------------------------------------------------------------------------

pub fn certification_failures(fun: &TestFunction) -> Vec<String> {
    let mut failures = Vec::new();
    let dom = fun.domain;
    let grid = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| dom.a() + dom.length() * i as f64 / (n - 1) as f64)
            .collect()
    };

    if let Some(m2) = fun.m2 {
        if let Some(t) = grid(1001).iter().find(|&&t| fun.abs_f2_at(t) > m2 + 1e-12) {
            failures.push(format!("M2 = {m2} violated at t = {t}"));
        }
    }
    if let Some(m1) = fun.m1 {
        if let Some(t) = grid(1001).iter().find(|&&t| fun.f1_at(t).abs() > m1 + 1e-10) {
            failures.push(format!("M1 = {m1} violated at t = {t}"));
        }
    }

    if fun.log_convex_f2 {
        if let Some(t) = grid(1001)
            .iter()
            .find(|&&t| fun.f2_at(t) <= 0.0 || fun.f2_at(t).is_nan())
        {
            failures.push(format!("log-convex claim but f''({t}) is not positive"));
        }
        match check_log_convex_sampled(&|t| fun.abs_f2_at(t), dom, 25) {
            MembershipVerdict::NoCounterexample => {}
            MembershipVerdict::Counterexample { x, y, lambda } => failures.push(format!(
                "log-convexity of |f''| falsified at x = {x}, y = {y}, lambda = {lambda}"
            )),
            MembershipVerdict::NotPositive { t } => {
                failures.push(format!("|f''| not positive at t = {t}"))
            }
        }
    }

    if let Some(s) = fun.s_membership {
        if let MembershipVerdict::Counterexample { x, y, lambda } =
            check_s_convex_sampled(&|t| fun.abs_f2_at(t), dom, s, 25)
        {
            failures.push(format!(
                "s-convexity (s = {}) of |f''| falsified at x = {x}, y = {y}, lambda = {lambda}",
                s.get()
            ));
        }
        if s.get() < 1.0 {
            if let Some(t) = check_nonnegative_sampled(&|t| fun.abs_f2_at(t), dom, 101) {
                failures.push(format!("claimed K_s^2 with s < 1 but |f''|({t}) < 0"));
            }
        }
    }

    // Central-difference consistency at h = 1e-5.
    let h = 1e-5;
    let interior: Vec<f64> = (1..100)
        .map(|i| dom.a() + h + (dom.length() - 2.0 * h) * i as f64 / 100.0)
        .collect();
    if let Some(anti) = &fun.antiderivative {
        let m2 = fun.m2.unwrap_or(0.0);
        for &t in &interior {
            let cd = (anti(t + h) - anti(t - h)) / (2.0 * h);
            let fv = fun.f_at(t);
            let budget = 1e-8 * (1.0 + fv.abs()) + h * h * (1.0 + m2);
            if (cd - fv).abs() > budget {
                failures.push(format!(
                    "antiderivative inconsistent with f at t = {t}: |cd - f| = {:e}",
                    (cd - fv).abs()
                ));
                break;
            }
        }
    } else {
        // Tabulated entry: f' must reproduce f'' by central differences.
        for &t in &interior {
            let cd = (fun.f1_at(t + h) - fun.f1_at(t - h)) / (2.0 * h);
            if (cd - fun.f2_at(t)).abs() > 1e-6 {
                failures.push(format!(
                    "tabulated f' inconsistent with f'' at t = {t}: |cd - f''| = {:e}",
                    (cd - fun.f2_at(t)).abs()
                ));
                break;
            }
        }
    }

    failures
}
