//! Shared domain vocabulary: intervals, evaluation frames, exponents, the
//! test-function model, tolerances, and the report record every check emits.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidInterval { a: f64, b: f64 },
    XNotInterior { x: f64, a: f64, b: f64 },
    InvalidWeights { alpha: f64, beta: f64 },
    InvalidSExponent { s: f64 },
    InvalidHolderExponent { p: f64 },
    InvalidPowerMeanExponent { q: f64 },
    NegativeMagnitude { value: f64 },
    NonpositiveBetaArgument { u: f64, v: f64 },
    NonpositiveBase { base: f64 },
    /// Log-convex machinery needs |f''| > 0 at the nodes it touches.
    NonpositiveSecondDerivative { at: f64, value: f64 },
    OutsideDomain { t: f64, a: f64, b: f64 },
    IntegrationDidNotConverge { best: f64, err_estimate: f64 },
    MissingCertification { fn_id: String, needed: String },
    DegenerateKappaTau { ln_kappa: f64, ln_tau: f64 },
    InvalidPartition { reason: String },
    InvalidTolerance { field: &'static str },
    InvalidGrid { reason: String },
    UnknownFunction { id: String },
    IncompatibleTheorem { theorem: String, reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInterval { a, b } => {
                write!(f, "invalid interval: need finite a < b, got [{a}, {b}]")
            }
            Error::XNotInterior { x, a, b } => {
                write!(f, "evaluation point x = {x} must lie strictly inside ({a}, {b})")
            }
            Error::InvalidWeights { alpha, beta } => write!(
                f,
                "weights must be nonnegative and not both zero, got alpha = {alpha}, beta = {beta}"
            ),
            Error::InvalidSExponent { s } => {
                write!(f, "s-exponent must satisfy 0 < s <= 1, got {s}")
            }
            Error::InvalidHolderExponent { p } => {
                write!(f, "Holder exponent must satisfy p > 1, got {p}")
            }
            Error::InvalidPowerMeanExponent { q } => {
                write!(f, "power-mean exponent must satisfy q >= 1, got {q}")
            }
            Error::NegativeMagnitude { value } => {
                write!(f, "second-derivative magnitudes must be nonnegative, got {value}")
            }
            Error::NonpositiveBetaArgument { u, v } => {
                write!(f, "Euler Beta arguments must be positive, got ({u}, {v})")
            }
            Error::NonpositiveBase { base } => {
                write!(f, "exponential moment base must be positive, got {base}")
            }
            Error::NonpositiveSecondDerivative { at, value } => write!(
                f,
                "log-convex bounds need |f''| > 0; |f''({at})| = {value}"
            ),
            Error::OutsideDomain { t, a, b } => {
                write!(f, "point {t} outside the valid range [{a}, {b}]")
            }
            Error::IntegrationDidNotConverge { best, err_estimate } => write!(
                f,
                "reference integration did not converge (best estimate {best}, residual estimate {err_estimate})"
            ),
            Error::MissingCertification { fn_id, needed } => {
                write!(f, "function '{fn_id}' is not certified for {needed}")
            }
            Error::DegenerateKappaTau { ln_kappa, ln_tau } => write!(
                f,
                "requires a strictly positive log-convex certification path with kappa != 1 and tau != 1 \
                 (|ln kappa| = {:.3e}, |ln tau| = {:.3e}); degenerate frames are evaluated by the \
                 verification suite via the documented limit formulas",
                ln_kappa.abs(),
                ln_tau.abs()
            ),
            Error::InvalidPartition { reason } => write!(f, "invalid partition: {reason}"),
            Error::InvalidTolerance { field } => {
                write!(f, "tolerance '{field}' must be strictly positive")
            }
            Error::InvalidGrid { reason } => write!(f, "invalid grid: {reason}"),
            Error::UnknownFunction { id } => write!(f, "no registry function with id '{id}'"),
            Error::IncompatibleTheorem { theorem, reason } => {
                write!(f, "{theorem}: {reason}")
            }
        }
    }
}

impl std::error::Error for Error {}

/// Closed interval [a, b] with a < b, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, Error> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a <= t && t <= self.b
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }
}

/// Evaluation frame shared by every bound: interval [a, b], interior point x,
/// and the nonnegative weight pair (alpha, beta), alpha + beta > 0.
///
/// x is kept strictly interior because the formulas divide by x - a and b - x;
/// boundary placements are reachable only through the corollaries' limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemFrame {
    interval: Interval,
    x: f64,
    alpha: f64,
    beta: f64,
}

impl ProblemFrame {
    pub fn new(a: f64, b: f64, x: f64, alpha: f64, beta: f64) -> Result<Self, Error> {
        let interval = Interval::new(a, b)?;
        if !x.is_finite() || x <= a || x >= b {
            return Err(Error::XNotInterior { x, a, b });
        }
        if !alpha.is_finite() || !beta.is_finite() || alpha < 0.0 || beta < 0.0 || alpha + beta <= 0.0
        {
            return Err(Error::InvalidWeights { alpha, beta });
        }
        Ok(ProblemFrame { interval, x, alpha, beta })
    }

    pub fn from_interval(interval: Interval, x: f64, alpha: f64, beta: f64) -> Result<Self, Error> {
        Self::new(interval.a(), interval.b(), x, alpha, beta)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn a(&self) -> f64 {
        self.interval.a()
    }

    pub fn b(&self) -> f64 {
        self.interval.b()
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// alpha / (alpha + beta)
    pub fn weight_left(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// beta / (alpha + beta)
    pub fn weight_right(&self) -> f64 {
        self.beta / (self.alpha + self.beta)
    }

    /// x - a
    pub fn dx_left(&self) -> f64 {
        self.x - self.interval.a()
    }

    /// b - x
    pub fn dx_right(&self) -> f64 {
        self.interval.b() - self.x
    }
}

impl Serialize for ProblemFrame {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ProblemFrame", 5)?;
        st.serialize_field("a", &self.a())?;
        st.serialize_field("b", &self.b())?;
        st.serialize_field("x", &self.x)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("beta", &self.beta)?;
        st.end()
    }
}

/// Exponent of s-convexity in the second sense, s in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SExponent(f64);

impl SExponent {
    pub fn new(s: f64) -> Result<Self, Error> {
        if !s.is_finite() || s <= 0.0 || s > 1.0 {
            return Err(Error::InvalidSExponent { s });
        }
        Ok(SExponent(s))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Conjugate Holder pair: p > 1, q = p / (p - 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderPair {
    p: f64,
    q: f64,
}

impl HolderPair {
    pub fn new(p: f64) -> Result<Self, Error> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidHolderExponent { p });
        }
        Ok(HolderPair { p, q: p / (p - 1.0) })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Power-mean exponent q >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerMeanExponent(f64);

impl PowerMeanExponent {
    pub fn new(q: f64) -> Result<Self, Error> {
        if !q.is_finite() || q < 1.0 {
            return Err(Error::InvalidPowerMeanExponent { q });
        }
        Ok(PowerMeanExponent(q))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Numerical tolerances, all strictly positive. One place for every threshold
/// the suites use, so closed-form-vs-oracle comparisons stay reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Absolute budget for the kernel identity residual.
    pub identity_abs: f64,
    /// Relative grace when asserting |LHS| <= RHS.
    pub bound_slack_rel: f64,
    /// Relative tolerance for equality-attainment checks.
    pub equality_rel: f64,
    /// Absolute target for the reference integrator.
    pub oracle_abs: f64,
    /// Threshold on |ln kappa| below which a ratio counts as degenerate.
    pub kappa_degenerate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity_abs: 1e-9,
            bound_slack_rel: 1e-12,
            equality_rel: 1e-10,
            oracle_abs: 1e-12,
            kappa_degenerate: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), Error> {
        let fields = [
            ("identity_abs", self.identity_abs),
            ("bound_slack_rel", self.bound_slack_rel),
            ("equality_rel", self.equality_rel),
            ("oracle_abs", self.oracle_abs),
            ("kappa_degenerate", self.kappa_degenerate),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidTolerance {
                    field: match name {
                        "identity_abs" => "identity_abs",
                        "bound_slack_rel" => "bound_slack_rel",
                        "equality_rel" => "equality_rel",
                        "oracle_abs" => "oracle_abs",
                        _ => "kappa_degenerate",
                    },
                })
            }
        }
        Ok(())
    }
}

/// Which inequality a report row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    Lemma21,
    Thm21,
    Cor21,
    Cor22,
    Cor23,
    Thm22Stated,
    Thm22Derived,
    Thm23Stated,
    Thm23Derived,
    Thm24,
    Thm31,
    Cor31,
    Cor32,
    Thm32,
    Thm33,
    Ostrowski,
    BullenClassic,
    Prop1,
    Prop2,
}

impl TheoremId {
    pub const ALL: [TheoremId; 19] = [
        TheoremId::Lemma21,
        TheoremId::Thm21,
        TheoremId::Cor21,
        TheoremId::Cor22,
        TheoremId::Cor23,
        TheoremId::Thm22Stated,
        TheoremId::Thm22Derived,
        TheoremId::Thm23Stated,
        TheoremId::Thm23Derived,
        TheoremId::Thm24,
        TheoremId::Thm31,
        TheoremId::Cor31,
        TheoremId::Cor32,
        TheoremId::Thm32,
        TheoremId::Thm33,
        TheoremId::Ostrowski,
        TheoremId::BullenClassic,
        TheoremId::Prop1,
        TheoremId::Prop2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Lemma21 => "LEMMA21",
            TheoremId::Thm21 => "THM21",
            TheoremId::Cor21 => "COR21",
            TheoremId::Cor22 => "COR22",
            TheoremId::Cor23 => "COR23",
            TheoremId::Thm22Stated => "THM22_STATED",
            TheoremId::Thm22Derived => "THM22_DERIVED",
            TheoremId::Thm23Stated => "THM23_STATED",
            TheoremId::Thm23Derived => "THM23_DERIVED",
            TheoremId::Thm24 => "THM24",
            TheoremId::Thm31 => "THM31",
            TheoremId::Cor31 => "COR31",
            TheoremId::Cor32 => "COR32",
            TheoremId::Thm32 => "THM32",
            TheoremId::Thm33 => "THM33",
            TheoremId::Ostrowski => "OSTROWSKI",
            TheoremId::BullenClassic => "BULLEN_CLASSIC",
            TheoremId::Prop1 => "PROP1",
            TheoremId::Prop2 => "PROP2",
        }
    }

    /// STATED variants are findings, not assertions; only the rest gate the
    /// suite exit code.
    pub fn is_asserted(&self) -> bool {
        !matches!(self, TheoremId::Thm22Stated | TheoremId::Thm23Stated)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::IncompatibleTheorem {
                theorem: s.to_string(),
                reason: "unknown theorem id".to_string(),
            })
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
    DegenerateSkipped,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Holds => "HOLDS",
            Status::Violated => "VIOLATED",
            Status::DegenerateSkipped => "DEGENERATE_SKIPPED",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Optional per-row parameters. n is the subinterval count for proposition rows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BoundParams {
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub n: Option<usize>,
}

impl BoundParams {
    pub fn none() -> Self {
        BoundParams::default()
    }

    pub fn with_s(s: f64) -> Self {
        BoundParams { s: Some(s), ..Default::default() }
    }
}

/// One theorem applied to one frame: LHS value, RHS bound, slack, verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub fn_id: String,
    #[serde(flatten)]
    pub frame: ProblemFrame,
    #[serde(flatten)]
    pub params: BoundParams,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub status: Status,
}

impl BoundReport {
    /// |lhs| <= rhs * (1 + bound_slack_rel) + bound_slack_rel decides HOLDS.
    pub fn absolute(
        theorem_id: TheoremId,
        fn_id: &str,
        frame: ProblemFrame,
        params: BoundParams,
        lhs: f64,
        rhs: f64,
        tol: &Tolerances,
    ) -> Self {
        let holds = bound_holds_abs(lhs, rhs, tol);
        BoundReport {
            theorem_id,
            fn_id: fn_id.to_string(),
            frame,
            params,
            lhs,
            rhs,
            slack: rhs - lhs.abs(),
            status: if holds { Status::Holds } else { Status::Violated },
        }
    }

    /// Signed variant for checks that bound the LHS itself, not its modulus.
    pub fn signed(
        theorem_id: TheoremId,
        fn_id: &str,
        frame: ProblemFrame,
        params: BoundParams,
        lhs: f64,
        rhs: f64,
        tol: &Tolerances,
    ) -> Self {
        let holds = lhs <= rhs * (1.0 + tol.bound_slack_rel) + tol.bound_slack_rel;
        BoundReport {
            theorem_id,
            fn_id: fn_id.to_string(),
            frame,
            params,
            lhs,
            rhs,
            slack: rhs - lhs,
            status: if holds { Status::Holds } else { Status::Violated },
        }
    }

    /// Identity rows: HOLDS iff |lhs - rhs| <= identity_abs; slack is the
    /// remaining budget.
    pub fn identity(
        fn_id: &str,
        frame: ProblemFrame,
        kernel_side: f64,
        functional_side: f64,
        tol: &Tolerances,
    ) -> Self {
        let residual = (kernel_side - functional_side).abs();
        BoundReport {
            theorem_id: TheoremId::Lemma21,
            fn_id: fn_id.to_string(),
            frame,
            params: BoundParams::none(),
            lhs: kernel_side,
            rhs: functional_side,
            slack: tol.identity_abs - residual,
            status: if residual <= tol.identity_abs { Status::Holds } else { Status::Violated },
        }
    }
}

pub(crate) fn bound_holds_abs(lhs: f64, rhs: f64, tol: &Tolerances) -> bool {
    lhs.abs() <= rhs * (1.0 + tol.bound_slack_rel) + tol.bound_slack_rel
}

/// Shared real-function representation.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Structural shape of |f''|, used to decide which (s, q) hypothesis cells a
/// function certifies. Nonnegative convex functions lie in K_s^2 for every
/// s <= 1 and keep that under powers q >= 1; t^sigma lies in K_s^2 iff s <= sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum F2Shape {
    /// f'' identically zero.
    Zero,
    /// |f''| nonnegative and convex on the domain.
    NonnegConvex,
    /// |f''|(t) = t^sigma with 0 < sigma < 1.
    PowerLaw { sigma: f64 },
}

/// Evaluable test function with certified convexity-class metadata.
#[derive(Clone)]
pub struct TestFunction {
    pub id: String,
    pub f: RealFn,
    pub f1: RealFn,
    pub f2: RealFn,
    /// Exact F with F' = f, preferred over the oracle when present.
    pub antiderivative: Option<RealFn>,
    /// Largest certified exponent: |f''| in K_s^2 for every s <= this value.
    pub s_membership: Option<SExponent>,
    /// Certified: |f''| is log-convex (hence strictly positive) on the domain.
    pub log_convex_f2: bool,
    /// Uniform bound on |f''| over the domain.
    pub m2: Option<f64>,
    /// Uniform bound on |f'| over the domain.
    pub m1: Option<f64>,
    pub domain: Interval,
    /// f itself convex on the domain (classic Bullen hypothesis).
    pub convex: bool,
    pub f2_shape: F2Shape,
}

impl TestFunction {
    pub fn f_at(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn f1_at(&self, t: f64) -> f64 {
        (self.f1)(t)
    }

    pub fn f2_at(&self, t: f64) -> f64 {
        (self.f2)(t)
    }

    pub fn abs_f2_at(&self, t: f64) -> f64 {
        (self.f2)(t).abs()
    }

    /// Does |f''|^q lie in K_s^2 on the domain (q >= 1)?
    pub fn certifies_s_power(&self, s: SExponent, q: f64) -> bool {
        match self.f2_shape {
            F2Shape::Zero => true,
            F2Shape::NonnegConvex => self.s_membership.is_some(),
            F2Shape::PowerLaw { sigma } => {
                let cap = (sigma * q).min(1.0);
                self.s_membership.is_some() && s.get() <= cap + 1e-15
            }
        }
    }

    /// Does |f''| lie in K_s^2 on the domain?
    pub fn certifies_s(&self, s: SExponent) -> bool {
        self.certifies_s_power(s, 1.0)
    }
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("s_membership", &self.s_membership)
            .field("log_convex_f2", &self.log_convex_f2)
            .field("m1", &self.m1)
            .field("m2", &self.m2)
            .field("convex", &self.convex)
            .field("f2_shape", &self.f2_shape)
            .finish()
    }
}
