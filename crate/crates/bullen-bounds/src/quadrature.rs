//! Reference integrator (globally adaptive Gauss-Kronrod 7-15), partitions,
//! the composite averaged midpoint-trapezoid rule A_MT, and its a-priori
//! error bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::logconvex;
use crate::sconvex;
use crate::types::{Error, Interval, SExponent, TestFunction, Tolerances};

/// Kahan-Neumaier compensated accumulator. Keeps the equality-attainment
/// checks at 1e-10 relative free of summation noise.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        NeumaierSum::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK dqk15).
// Even 1-based positions of XGK are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
];
const WGK: [f64; 8] = [
    0.02293532201052922,
    0.06309209262997855,
    0.1047900103222502,
    0.1406532597155259,
    0.1690047266392679,
    0.1903505780647854,
    0.2044329400752989,
    0.2094821410847278,
];
const WG: [f64; 4] = [
    0.1294849661688697,
    0.2797053914892767,
    0.3818300505051189,
    0.4179591836734694,
];

/// One Kronrod-15 panel. Returns (integral, |K15 - G7| error estimate, sum of
/// |w_i f_i| for the rounding floor).
pub(crate) fn gk15_panel<F: Fn(f64) -> f64 + ?Sized>(f: &F, lo: f64, hi: f64) -> (f64, f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    for i in 0..7 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    (kron * h, (kron - gauss).abs() * h, resabs * h.abs())
}

struct Panel {
    err: f64,
    lo: f64,
    hi: f64,
    val: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.lo == other.lo
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Worst error first; deterministic tie-break on the left endpoint.
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

const MAX_PANELS: usize = 4096;

/// Brute-force reference integral of `f` over `interval`.
///
/// Globally adaptive: the panel with the largest embedded-pair error estimate
/// is bisected until the summed estimate drops below `tol.oracle_abs` (or the
/// rounding floor of the evaluated sums, whichever is larger). Returns the
/// integral and the final error estimate.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fall through to the error path
pub fn oracle_integrate<F: Fn(f64) -> f64>(
    f: F,
    interval: Interval,
    tol: &Tolerances,
) -> Result<(f64, f64), Error> {
    let target = tol.oracle_abs;
    let (val, err, resabs) = gk15_panel(&f, interval.a(), interval.b());
    let mut heap = BinaryHeap::with_capacity(64);
    heap.push(Panel { err, lo: interval.a(), hi: interval.b(), val, resabs });
    let mut total_err = err;
    let mut total_resabs = resabs;
    // NaN estimates (e.g. inf - inf near a singularity) must keep refining
    // and fall through to the non-convergence error, never fake success.
    while !(total_err <= target.max(4.0 * f64::EPSILON * total_resabs)) && heap.len() < MAX_PANELS
    {
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            // Float resolution exhausted on this panel.
            heap.push(worst);
            break;
        }
        let (v1, e1, r1) = gk15_panel(&f, worst.lo, mid);
        let (v2, e2, r2) = gk15_panel(&f, mid, worst.hi);
        total_err += e1 + e2 - worst.err;
        total_resabs += r1 + r2 - worst.resabs;
        heap.push(Panel { err: e1, lo: worst.lo, hi: mid, val: v1, resabs: r1 });
        heap.push(Panel { err: e2, lo: mid, hi: worst.hi, val: v2, resabs: r2 });
    }

    // Deterministic left-to-right compensated reduction.
    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut sum = NeumaierSum::new();
    let mut err_sum = NeumaierSum::new();
    let mut resabs_sum = NeumaierSum::new();
    for p in &panels {
        sum.add(p.val);
        err_sum.add(p.err);
        resabs_sum.add(p.resabs);
    }
    let value = sum.total();
    let err_estimate = err_sum.total();
    if value.is_nan() || !(err_estimate <= target.max(4.0 * f64::EPSILON * resabs_sum.total())) {
        return Err(Error::IntegrationDidNotConverge { best: value, err_estimate });
    }
    Ok((value, err_estimate))
}

/// Ordered subdivision a = x_0 < x_1 < ... < x_n = b.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    nodes: Vec<f64>,
}

impl Partition {
    pub fn new(nodes: Vec<f64>) -> Result<Self, Error> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPartition {
                reason: format!("need at least 2 nodes, got {}", nodes.len()),
            });
        }
        for w in nodes.windows(2) {
            if !w[0].is_finite() || !w[1].is_finite() || w[0] >= w[1] {
                return Err(Error::InvalidPartition {
                    reason: format!("nodes must be finite and strictly increasing near {:?}", w),
                });
            }
        }
        Ok(Partition { nodes })
    }

    pub fn uniform(interval: Interval, n: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidPartition { reason: "n must be >= 1".into() });
        }
        let (a, b) = (interval.a(), interval.b());
        let nodes = (0..=n)
            .map(|i| a + (b - a) * (i as f64) / (n as f64))
            .collect();
        Partition::new(nodes)
    }

    /// Seeded random partition with minimum gap 1e-3 * (b - a); keeps the
    /// conditioning of per-interval bounds sane.
    pub fn random(interval: Interval, n: usize, seed: u64) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidPartition { reason: "n must be >= 1".into() });
        }
        if n == 1 {
            return Partition::new(vec![interval.a(), interval.b()]);
        }
        let (a, b) = (interval.a(), interval.b());
        let len = b - a;
        let min_gap = 1e-3 * len;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let mut nodes: Vec<f64> = (0..n - 1).map(|_| a + len * rng.random::<f64>()).collect();
            nodes.push(a);
            nodes.push(b);
            nodes.sort_by(f64::total_cmp);
            if nodes.windows(2).all(|w| w[1] - w[0] >= min_gap) {
                return Partition::new(nodes);
            }
        }
        Err(Error::InvalidPartition {
            reason: format!("could not draw a random partition with n = {n} and the minimum gap"),
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn segments(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Composite averaged midpoint-trapezoid rule
/// A_MT = (1/4) sum h_i [f(x_i) + 2 f(m_i) + f(x_{i+1})].
pub fn amt_rule(fun: &TestFunction, d: &Partition) -> f64 {
    let mut sum = NeumaierSum::new();
    for (lo, hi) in d.segments() {
        let h = hi - lo;
        let m = 0.5 * (lo + hi);
        sum.add(0.25 * h * (fun.f_at(lo) + 2.0 * fun.f_at(m) + fun.f_at(hi)));
    }
    sum.total()
}

/// A-priori |R_MT| bound for s-convex |f''|: the per-subinterval Bullen-type
/// bound, converted from mean-value to integral form by the factor h_i and
/// summed.
pub fn amt_bound_sconvex(fun: &TestFunction, d: &Partition, s: SExponent) -> Result<f64, Error> {
    if !fun.certifies_s(s) {
        return Err(Error::MissingCertification {
            fn_id: fun.id.clone(),
            needed: format!("s-convex |f''| with s = {}", s.get()),
        });
    }
    let mut sum = NeumaierSum::new();
    for (lo, hi) in d.segments() {
        let seg = Interval::new(lo, hi)?;
        let triple = sconvex::SecondDerivTriple::new(
            fun.abs_f2_at(lo),
            fun.abs_f2_at(seg.midpoint()),
            fun.abs_f2_at(hi),
        )?;
        sum.add((hi - lo) * sconvex::bound_cor23_bullen(&triple, seg, s));
    }
    Ok(sum.total())
}

/// A-priori |R_MT| bound for log-convex |f''|: per-subinterval instantiation
/// of the log-convex Bullen-type bound, times h_i, summed.
pub fn amt_bound_logconvex(fun: &TestFunction, d: &Partition, tol: &Tolerances) -> Result<f64, Error> {
    if !fun.log_convex_f2 {
        return Err(Error::MissingCertification {
            fn_id: fun.id.clone(),
            needed: "log-convex |f''|".to_string(),
        });
    }
    let mut sum = NeumaierSum::new();
    for (lo, hi) in d.segments() {
        let seg = Interval::new(lo, hi)?;
        let triple = sconvex::SecondDerivTriple::new(
            fun.abs_f2_at(lo),
            fun.abs_f2_at(seg.midpoint()),
            fun.abs_f2_at(hi),
        )?;
        sum.add((hi - lo) * logconvex::bound_cor32_bullen(&triple, seg, tol)?);
    }
    Ok(sum.total())
}

/// Which a-priori bound certifies a quadrature run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Prop1LogConvex,
    Prop2SConvex,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Prop1LogConvex => "PROP1_LOGCONVEX",
            BoundKind::Prop2SConvex => "PROP2_SCONVEX",
        }
    }
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for BoundKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PROP1" | "PROP1_LOGCONVEX" => Ok(BoundKind::Prop1LogConvex),
            "PROP2" | "PROP2_SCONVEX" => Ok(BoundKind::Prop2SConvex),
            other => Err(Error::IncompatibleTheorem {
                theorem: other.to_string(),
                reason: "expected PROP1 or PROP2".to_string(),
            }),
        }
    }
}

/// A_MT value, oracle reference, actual error, and the selected a-priori bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub amt_value: f64,
    pub reference_value: f64,
    pub actual_error: f64,
    pub apriori_bound: f64,
    pub bound_kind: BoundKind,
}

impl QuadratureResult {
    pub fn within_bound(&self, tol: &Tolerances) -> bool {
        self.actual_error <= self.apriori_bound * (1.0 + tol.bound_slack_rel) + tol.bound_slack_rel
    }
}

/// Run A_MT on a partition, compare against the oracle, and attach the
/// a-priori bound matching the function's certification.
pub fn integrate_with_bound(
    fun: &TestFunction,
    d: &Partition,
    kind: BoundKind,
    s: Option<SExponent>,
    tol: &Tolerances,
) -> Result<QuadratureResult, Error> {
    let (lo, hi) = d.range();
    if !fun.domain.contains(lo) || !fun.domain.contains(hi) {
        return Err(Error::OutsideDomain { t: lo, a: fun.domain.a(), b: fun.domain.b() });
    }
    let apriori_bound = match kind {
        BoundKind::Prop2SConvex => {
            let s = s.ok_or_else(|| Error::IncompatibleTheorem {
                theorem: "PROP2".to_string(),
                reason: "an s exponent is required".to_string(),
            })?;
            amt_bound_sconvex(fun, d, s)?
        }
        BoundKind::Prop1LogConvex => amt_bound_logconvex(fun, d, tol)?,
    };
    let amt_value = amt_rule(fun, d);
    let (reference_value, _) =
        oracle_integrate(|t| fun.f_at(t), Interval::new(lo, hi)?, tol)?;
    Ok(QuadratureResult {
        amt_value,
        reference_value,
        actual_error: (amt_value - reference_value).abs(),
        apriori_bound,
        bound_kind: kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::builtin_registry;
    use std::cell::Cell;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn get(id: &str) -> TestFunction {
        builtin_registry()
            .into_iter()
            .find(|e| e.function.id == id)
            .unwrap()
            .function
    }

    #[test]
    fn kronrod_weights_integrate_constants_exactly() {
        let (v, e, _) = gk15_panel(&|_| 1.0, 0.0, 1.0);
        assert!((v - 1.0).abs() < 1e-14, "v = {v}");
        assert!(e < 1e-14);
    }

    #[test]
    fn oracle_matches_exact_antiderivatives() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let (v, e) = oracle_integrate(|t| t * t, iv, &tol()).unwrap();
        assert!((v - 1.0 / 3.0).abs() <= 1e-12, "v = {v}");
        assert!(e <= 1e-12);
        let (v, _) = oracle_integrate(f64::exp, iv, &tol()).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() <= 1e-12);
        // self-test across every registry entry carrying an antiderivative
        for entry in builtin_registry() {
            let fun = entry.function;
            if let Some(anti) = &fun.antiderivative {
                let exact = anti(1.0) - anti(0.0);
                let (v, _) = oracle_integrate(|t| fun.f_at(t), iv, &tol()).unwrap();
                assert!((v - exact).abs() <= 2e-12, "{}: {v} vs {exact}", fun.id);
            }
        }
    }

    #[test]
    fn oracle_cross_checks_the_parabolic_moment_closed_form() {
        // int_0^1 t(1-t)e^t dt = 3 - e
        let iv = Interval::new(0.0, 1.0).unwrap();
        let (v, _) = oracle_integrate(|t| t * (1.0 - t) * t.exp(), iv, &tol()).unwrap();
        assert!((v - (3.0 - std::f64::consts::E)).abs() <= 1e-12, "v = {v}");
    }

    #[test]
    fn oracle_converges_fast_on_smooth_integrands() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        for f in [
            (|t: f64| t * t) as fn(f64) -> f64,
            |t: f64| t.exp(),
            |t: f64| t * (1.0 - t) * t.exp(),
        ] {
            let evals = Cell::new(0usize);
            let counted = |t: f64| {
                evals.set(evals.get() + 1);
                f(t)
            };
            oracle_integrate(counted, iv, &tol()).unwrap();
            assert!(evals.get() < 200, "used {} evaluations", evals.get());
        }
    }

    #[test]
    fn oracle_reports_nonconvergence() {
        // Divergent integral; finite at every sampled node (0 is never a node).
        let iv = Interval::new(0.0, 1.0).unwrap();
        let r = oracle_integrate(|t| 1.0 / t, iv, &tol());
        assert!(matches!(r, Err(Error::IntegrationDidNotConverge { .. })));
    }

    #[test]
    fn uniform_partition_nodes() {
        let d = Partition::uniform(Interval::new(0.0, 1.0).unwrap(), 4).unwrap();
        assert_eq!(d.n(), 4);
        assert_eq!(d.nodes()[2], 0.5);
        assert!(Partition::uniform(Interval::new(0.0, 1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn partition_rejects_unsorted_nodes() {
        assert!(Partition::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Partition::new(vec![0.0]).is_err());
    }

    #[test]
    fn random_partition_is_seeded_and_gapped() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let d1 = Partition::random(iv, 8, 42).unwrap();
        let d2 = Partition::random(iv, 8, 42).unwrap();
        assert_eq!(d1, d2);
        let d3 = Partition::random(iv, 8, 43).unwrap();
        assert_ne!(d1, d3);
        assert!(d1.segments().all(|(lo, hi)| hi - lo >= 1e-3));
        assert_eq!(d1.range(), (0.0, 1.0));
    }

    #[test]
    fn amt_is_exact_on_linear_functions() {
        let linear = get("linear");
        for n in [1usize, 2, 5, 16] {
            let d = Partition::uniform(Interval::new(0.0, 1.0).unwrap(), n).unwrap();
            // linear is 2t + 1, integral over [0,1] is 2.
            assert!((amt_rule(&linear, &d) - 2.0).abs() <= 1e-14);
        }
        let d = Partition::random(Interval::new(0.0, 1.0).unwrap(), 7, 1).unwrap();
        assert!((amt_rule(&linear, &d) - 2.0).abs() <= 1e-14);
    }

    #[test]
    fn amt_hand_values_for_the_quadratic() {
        let quad = get("quadratic");
        let iv = Interval::new(0.0, 1.0).unwrap();
        let d1 = Partition::uniform(iv, 1).unwrap();
        assert_eq!(amt_rule(&quad, &d1), 0.375); // (1/4)(0 + 2/4·2 + 1)
        let d2 = Partition::uniform(iv, 2).unwrap();
        let first = Partition::new(vec![0.0, 0.5]).unwrap();
        assert!((amt_rule(&quad, &first) - 3.0 / 64.0).abs() <= 1e-16);
        assert!((amt_rule(&quad, &d2) - 11.0 / 32.0).abs() <= 1e-16);
    }

    #[test]
    fn prop2_equality_for_the_quadratic() {
        let quad = get("quadratic");
        let iv = Interval::new(0.0, 1.0).unwrap();
        let s1 = SExponent::new(1.0).unwrap();
        for (n, expected) in [(1usize, 1.0 / 24.0), (2, 1.0 / 96.0)] {
            let d = Partition::uniform(iv, n).unwrap();
            let r = integrate_with_bound(&quad, &d, BoundKind::Prop2SConvex, Some(s1), &tol()).unwrap();
            assert!((r.apriori_bound - expected).abs() <= 1e-14 * expected.max(1.0));
            assert!((r.actual_error - expected).abs() <= 1e-12);
            assert!(r.within_bound(&tol()));
        }
    }

    #[test]
    fn prop1_equality_for_exp() {
        let exp1 = get("exp1");
        let d = Partition::uniform(Interval::new(0.0, 1.0).unwrap(), 1).unwrap();
        let r = integrate_with_bound(&exp1, &d, BoundKind::Prop1LogConvex, None, &tol()).unwrap();
        let rel = (r.actual_error - r.apriori_bound).abs() / r.apriori_bound;
        assert!(rel <= 1e-10, "rel = {rel:e}");
        assert!(r.within_bound(&tol()));
    }

    #[test]
    fn prop1_handles_the_degenerate_constant_curvature() {
        // quadratic: |f''| = 2 > 0 but kappa = tau = 1 on every subinterval.
        let quad = get("quadratic");
        let iv = Interval::new(0.0, 1.0).unwrap();
        for n in [1usize, 2, 4] {
            let d = Partition::uniform(iv, n).unwrap();
            let bound = amt_bound_logconvex(&quad, &d, &tol()).unwrap();
            // degenerate limit per subinterval: h * h^2 c / 48 with c = 2
            let h = 1.0 / n as f64;
            let expected = (n as f64) * h * h * h * 2.0 / 48.0;
            assert!((bound - expected).abs() <= 1e-14, "n = {n}: {bound} vs {expected}");
            let r = integrate_with_bound(&quad, &d, BoundKind::Prop1LogConvex, None, &tol()).unwrap();
            assert!(r.within_bound(&tol()));
        }
    }

    #[test]
    fn prop_bounds_reject_missing_certification() {
        let quartic = get("quartic"); // f''(0) = 0, not log-convex
        let d = Partition::uniform(Interval::new(0.0, 1.0).unwrap(), 2).unwrap();
        assert!(matches!(
            amt_bound_logconvex(&quartic, &d, &tol()),
            Err(Error::MissingCertification { .. })
        ));
        let power = get("power_s(1/2)");
        let s1 = SExponent::new(1.0).unwrap();
        assert!(matches!(
            amt_bound_sconvex(&power, &d, s1),
            Err(Error::MissingCertification { .. })
        ));
    }

    #[test]
    fn linear_has_zero_error_and_zero_bound() {
        let linear = get("linear");
        let d = Partition::uniform(Interval::new(0.0, 1.0).unwrap(), 8).unwrap();
        let r = integrate_with_bound(
            &linear,
            &d,
            BoundKind::Prop2SConvex,
            Some(SExponent::new(1.0).unwrap()),
            &tol(),
        )
        .unwrap();
        assert!(r.actual_error <= 1e-14);
        assert_eq!(r.apriori_bound, 0.0);
        assert!(r.within_bound(&tol()));
    }
}
