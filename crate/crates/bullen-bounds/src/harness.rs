//! Grid-driven execution of every inequality over registry x parameter space:
//! suite runs, discrepancy aggregation, JSON/CSV serialization, and the
//! single-cell evaluator behind the CLI `bound` command.

use rayon::prelude::*;
use serde::Serialize;

use crate::kernel::{kernel_integral, lhs_functional, partial_integral, verify_identity};
use crate::logconvex::{
    bound_cor31, bound_cor32_bullen, bound_cor32_display, bound_thm31, bound_thm32, bound_thm33,
    kappa_tau,
};
use crate::quadrature::{integrate_with_bound, BoundKind, Partition};
use crate::registry::RegistryEntry;
use crate::sconvex::{
    bound_cor21, bound_cor22, bound_cor23_bullen, bound_ostrowski, bound_thm21, bound_thm22,
    bound_thm23, bound_thm24, check_bullen_classic, BoundVariant, SecondDerivTriple,
};
use crate::types::{
    bound_holds_abs, BoundParams, BoundReport, Error, HolderPair, Interval, PowerMeanExponent,
    ProblemFrame, SExponent, Status, TestFunction, TheoremId, Tolerances,
};

/// Parameter grid: frames are (interval, x_frac, weight pair) cells, bounds
/// additionally sweep the s/p/q lists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_fracs: Vec<f64>,
    pub weight_pairs: Vec<(f64, f64)>,
    pub s_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub q_values: Vec<f64>,
    pub intervals: Vec<Interval>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_fracs: (1..=9).map(|i| i as f64 / 10.0).collect(),
            weight_pairs: vec![(1.0, 1.0), (0.5, 0.5), (1.0, 2.0), (5.0, 1.0), (0.0, 1.0)],
            s_values: vec![0.25, 0.5, 0.75, 1.0],
            p_values: vec![1.5, 2.0, 3.0],
            q_values: vec![1.0, 1.5, 2.0, 3.0],
            intervals: vec![
                Interval::new(0.0, 1.0).unwrap(),
                Interval::new(1.0, 3.0).unwrap(),
            ],
        }
    }
}

impl GridSpec {
    pub fn default_grid() -> Self {
        Self::default()
    }

    /// Denser frame grid for the identity suite: 19 x-fracs x 6 weight pairs
    /// x 2 intervals = 228 frames per function.
    pub fn identity_grid() -> Self {
        GridSpec {
            x_fracs: (1..=19).map(|i| i as f64 / 20.0).collect(),
            weight_pairs: vec![
                (1.0, 1.0),
                (0.5, 0.5),
                (1.0, 2.0),
                (5.0, 1.0),
                (0.0, 1.0),
                (2.0, 3.0),
            ],
            ..Self::default()
        }
    }

    pub fn frame_count(&self) -> usize {
        self.x_fracs.len() * self.weight_pairs.len() * self.intervals.len()
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.x_fracs.is_empty()
            || self.weight_pairs.is_empty()
            || self.s_values.is_empty()
            || self.p_values.is_empty()
            || self.q_values.is_empty()
            || self.intervals.is_empty()
        {
            return Err(Error::InvalidGrid { reason: "all grid lists must be nonempty".into() });
        }
        if let Some(f) = self.x_fracs.iter().find(|f| !(0.0 < **f && **f < 1.0)) {
            return Err(Error::InvalidGrid { reason: format!("x_frac {f} outside open (0,1)") });
        }
        for s in &self.s_values {
            SExponent::new(*s)?;
        }
        for p in &self.p_values {
            HolderPair::new(*p)?;
        }
        for q in &self.q_values {
            PowerMeanExponent::new(*q)?;
        }
        for (a, b) in &self.weight_pairs {
            if !a.is_finite() || !b.is_finite() || *a < 0.0 || *b < 0.0 || a + b <= 0.0 {
                return Err(Error::InvalidWeights { alpha: *a, beta: *b });
            }
        }
        Ok(())
    }
}

/// Uniform subinterval counts the suite exercises for the propositions.
pub const SUITE_PARTITION_SIZES: [usize; 5] = [1, 2, 4, 8, 16];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum DiscKind {
    Thm22,
    Thm23,
    Thm32,
    Cor32,
    Prop1,
    Prop2,
}

#[derive(Debug, Clone)]
struct Sample {
    kind: DiscKind,
    /// stated (or printed / displayed) value over the asserted value
    ratio: f64,
    /// stated value minus |LHS|: negative means the stated form fails to bound
    margin: f64,
    violated: bool,
    label: String,
}

/// One aggregated display-vs-derivation comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub id: String,
    pub description: String,
    pub cells: usize,
    pub stated_violations: usize,
    pub ratio_min: f64,
    pub ratio_median: f64,
    pub ratio_max: f64,
    pub worst_example: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteCounts {
    pub reports: usize,
    pub holds: usize,
    pub violated: usize,
    pub degenerate_skipped: usize,
    pub asserted_violations: usize,
    pub stated_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteMeta {
    pub version: &'static str,
    pub function_ids: Vec<String>,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub counts: SuiteCounts,
    pub cell_errors: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub meta: SuiteMeta,
    pub reports: Vec<BoundReport>,
    pub violations: Vec<BoundReport>,
    pub discrepancies: Vec<Discrepancy>,
}

impl SuiteResult {
    /// Exit-code contract: STATED-variant findings do not fail the suite.
    pub fn asserted_ok(&self) -> bool {
        self.meta.counts.asserted_violations == 0 && self.meta.cell_errors.is_empty()
    }
}

#[derive(Default)]
struct CellOut {
    reports: Vec<BoundReport>,
    samples: Vec<Sample>,
    errors: Vec<String>,
}

fn cell_label(fn_id: &str, frame: &ProblemFrame, extra: &str) -> String {
    format!(
        "fn={} a={} b={} x={} alpha={} beta={}{}",
        fn_id,
        frame.a(),
        frame.b(),
        frame.x(),
        frame.alpha(),
        frame.beta(),
        extra
    )
}

/// Evaluate the whole theorem family on one frame. The functional LHS is
/// computed once and shared by every comparison in the cell.
#[allow(clippy::too_many_arguments)]
fn eval_frame_cell(
    entry: &RegistryEntry,
    iv: Interval,
    frac: f64,
    weights: (f64, f64),
    s_list: &[SExponent],
    p_list: &[HolderPair],
    q_list: &[PowerMeanExponent],
    tol: &Tolerances,
) -> CellOut {
    let mut out = CellOut::default();
    let fun = &entry.function;
    let x = iv.a() + frac * iv.length();
    let frame = match ProblemFrame::from_interval(iv, x, weights.0, weights.1) {
        Ok(fr) => fr,
        Err(e) => {
            out.errors.push(format!("fn={} frame construction: {e}", fun.id));
            return out;
        }
    };
    let label = cell_label(&fun.id, &frame, "");
    let result: Result<(), Error> = (|| {
        let lhs = lhs_functional(fun, &frame, tol)?;
        let kernel_side = kernel_integral(fun, &frame, tol)?;
        out.reports
            .push(BoundReport::identity(&fun.id, frame, kernel_side, lhs, tol));

        if let Some(m1) = fun.m1 {
            let mean = partial_integral(fun, iv.a(), iv.b(), tol)? / iv.length();
            let ost_lhs = fun.f_at(x) - mean;
            let rhs = bound_ostrowski(m1, iv, x)?;
            out.reports.push(BoundReport::absolute(
                TheoremId::Ostrowski,
                &fun.id,
                frame,
                BoundParams::none(),
                ost_lhs,
                rhs,
                tol,
            ));
        }

        let d = SecondDerivTriple::from_function(fun, &frame);
        for &s in s_list {
            if fun.certifies_s(s) {
                let params = BoundParams::with_s(s.get());
                out.reports.push(BoundReport::absolute(
                    TheoremId::Thm21,
                    &fun.id,
                    frame,
                    params,
                    lhs,
                    bound_thm21(&d, &frame, s),
                    tol,
                ));
                if let Some(m2) = fun.m2 {
                    out.reports.push(BoundReport::absolute(
                        TheoremId::Cor21,
                        &fun.id,
                        frame,
                        params,
                        lhs,
                        bound_cor21(m2, &frame, s)?,
                        tol,
                    ));
                }
                if frame.alpha() == frame.beta() {
                    out.reports.push(BoundReport::absolute(
                        TheoremId::Cor22,
                        &fun.id,
                        frame,
                        params,
                        lhs,
                        bound_cor22(&d, iv, x, s)?,
                        tol,
                    ));
                }
            }
            for h in p_list {
                if !fun.certifies_s_power(s, h.q()) {
                    continue;
                }
                let params = BoundParams {
                    s: Some(s.get()),
                    p: Some(h.p()),
                    q: Some(h.q()),
                    n: None,
                };
                let stated22 = bound_thm22(&d, &frame, s, h, BoundVariant::Stated)?;
                let derived22 = bound_thm22(&d, &frame, s, h, BoundVariant::Derived)?;
                out.reports.push(BoundReport::absolute(
                    TheoremId::Thm22Stated,
                    &fun.id,
                    frame,
                    params,
                    lhs,
                    stated22,
                    tol,
                ));
                out.reports.push(BoundReport::absolute(
                    TheoremId::Thm22Derived,
                    &fun.id,
                    frame,
                    params,
                    lhs,
                    derived22,
                    tol,
                ));
                if derived22 > 0.0 {
                    out.samples.push(Sample {
                        kind: DiscKind::Thm22,
                        ratio: stated22 / derived22,
                        margin: stated22 - lhs.abs(),
                        violated: !bound_holds_abs(lhs, stated22, tol),
                        label: format!("{label} s={} p={}", s.get(), h.p()),
                    });
                }
                let stated23 = bound_thm23(&d, &frame, s, h, BoundVariant::Stated)?;
                let derived23 = bound_thm23(&d, &frame, s, h, BoundVariant::Derived)?;
                out.reports.push(BoundReport::absolute(
                    TheoremId::Thm23Stated,
                    &fun.id,
                    frame,
                    params,
                    lhs,
                    stated23,
                    tol,
                ));
                out.reports.push(BoundReport::absolute(
                    TheoremId::Thm23Derived,
                    &fun.id,
                    frame,
                    params,
                    lhs,
                    derived23,
                    tol,
                ));
                if derived23 > 0.0 {
                    out.samples.push(Sample {
                        kind: DiscKind::Thm23,
                        ratio: stated23 / derived23,
                        margin: stated23 - lhs.abs(),
                        violated: !bound_holds_abs(lhs, stated23, tol),
                        label: format!("{label} s={} p={}", s.get(), h.p()),
                    });
                }
            }
            for q in q_list {
                if fun.certifies_s_power(s, q.get()) {
                    let params = BoundParams {
                        s: Some(s.get()),
                        p: None,
                        q: Some(q.get()),
                        n: None,
                    };
                    out.reports.push(BoundReport::absolute(
                        TheoremId::Thm24,
                        &fun.id,
                        frame,
                        params,
                        lhs,
                        bound_thm24(&d, &frame, s, *q),
                        tol,
                    ));
                }
            }
        }

        if fun.log_convex_f2 {
            out.reports.push(BoundReport::absolute(
                TheoremId::Thm31,
                &fun.id,
                frame,
                BoundParams::none(),
                lhs,
                bound_thm31(&d, &frame, tol)?,
                tol,
            ));
            if frame.alpha() == frame.beta() {
                out.reports.push(BoundReport::absolute(
                    TheoremId::Cor31,
                    &fun.id,
                    frame,
                    BoundParams::none(),
                    lhs,
                    bound_cor31(&d, iv, x, tol)?,
                    tol,
                ));
            }
            for h in p_list {
                let params = BoundParams {
                    s: None,
                    p: Some(h.p()),
                    q: Some(h.q()),
                    n: None,
                };
                let derived = bound_thm32(&d, &frame, h, BoundVariant::Derived, tol)?;
                out.reports.push(BoundReport::absolute(
                    TheoremId::Thm32,
                    &fun.id,
                    frame,
                    params,
                    lhs,
                    derived,
                    tol,
                ));
                let stated = bound_thm32(&d, &frame, h, BoundVariant::Stated, tol)?;
                if derived > 0.0 {
                    out.samples.push(Sample {
                        kind: DiscKind::Thm32,
                        ratio: stated / derived,
                        margin: stated - lhs.abs(),
                        violated: !bound_holds_abs(lhs, stated, tol),
                        label: format!("{label} p={}", h.p()),
                    });
                }
            }
            for q in q_list {
                let params = BoundParams { s: None, p: None, q: Some(q.get()), n: None };
                out.reports.push(BoundReport::absolute(
                    TheoremId::Thm33,
                    &fun.id,
                    frame,
                    params,
                    lhs,
                    bound_thm33(&d, &frame, *q, tol)?,
                    tol,
                ));
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        out.errors.push(format!("{label}: {e}"));
    }
    out
}

/// Per-(function, interval) rows: the Bullen-type corollaries, the classic
/// Bullen check, and the composite-rule propositions.
fn eval_interval_cell(
    entry: &RegistryEntry,
    iv: Interval,
    s_list: &[SExponent],
    tol: &Tolerances,
) -> CellOut {
    let mut out = CellOut::default();
    let fun = &entry.function;
    let result: Result<(), Error> = (|| {
        let m = iv.midpoint();
        let frame_m = ProblemFrame::from_interval(iv, m, 0.5, 0.5)?;
        let label = cell_label(&fun.id, &frame_m, "");
        let integral = partial_integral(fun, iv.a(), iv.b(), tol)?;
        let mean = integral / iv.length();
        let bullen_lhs =
            0.5 * (fun.f_at(m) + (fun.f_at(iv.a()) + fun.f_at(iv.b())) / 2.0) - mean;
        let d = SecondDerivTriple::from_midpoint(fun, iv);

        for &s in s_list {
            if fun.certifies_s(s) {
                out.reports.push(BoundReport::absolute(
                    TheoremId::Cor23,
                    &fun.id,
                    frame_m,
                    BoundParams::with_s(s.get()),
                    bullen_lhs,
                    bound_cor23_bullen(&d, iv, s),
                    tol,
                ));
            }
        }

        if fun.log_convex_f2 {
            let inst = bound_cor32_bullen(&d, iv, tol)?;
            out.reports.push(BoundReport::absolute(
                TheoremId::Cor32,
                &fun.id,
                frame_m,
                BoundParams::none(),
                bullen_lhs,
                inst,
                tol,
            ));
            if let Ok(display) = bound_cor32_display(&d, iv, tol) {
                if inst > 0.0 {
                    out.samples.push(Sample {
                        kind: DiscKind::Cor32,
                        ratio: display / inst,
                        margin: display - bullen_lhs.abs(),
                        violated: !bound_holds_abs(bullen_lhs, display, tol),
                        label: label.clone(),
                    });
                }
            }
        }

        if fun.convex {
            out.reports.push(check_bullen_classic(fun, iv, tol)?);
        }

        for &n in &SUITE_PARTITION_SIZES {
            let part = Partition::uniform(iv, n)?;
            let (x0, x1) = part.segments().next().unwrap();
            let seg0 = Interval::new(x0, x1)?;
            let d0 = SecondDerivTriple::from_midpoint(fun, seg0);
            for &s in s_list {
                if !fun.certifies_s(s) {
                    continue;
                }
                let r = integrate_with_bound(fun, &part, BoundKind::Prop2SConvex, Some(s), tol)?;
                let remainder = r.reference_value - r.amt_value;
                out.reports.push(BoundReport::absolute(
                    TheoremId::Prop2,
                    &fun.id,
                    frame_m,
                    BoundParams { s: Some(s.get()), p: None, q: None, n: Some(n) },
                    remainder,
                    r.apriori_bound,
                    tol,
                ));
                // Printed display: first-subinterval term, h_i^2 scaling, no sum.
                let printed = bound_cor23_bullen(&d0, seg0, s);
                if r.apriori_bound > 0.0 {
                    out.samples.push(Sample {
                        kind: DiscKind::Prop2,
                        ratio: printed / r.apriori_bound,
                        margin: printed - remainder.abs(),
                        violated: printed < remainder.abs(),
                        label: format!("{label} s={} n={n}", s.get()),
                    });
                }
            }
            if fun.log_convex_f2 {
                let r = integrate_with_bound(fun, &part, BoundKind::Prop1LogConvex, None, tol)?;
                let remainder = r.reference_value - r.amt_value;
                out.reports.push(BoundReport::absolute(
                    TheoremId::Prop1,
                    &fun.id,
                    frame_m,
                    BoundParams { s: None, p: None, q: None, n: Some(n) },
                    remainder,
                    r.apriori_bound,
                    tol,
                ));
                // Printed display: first-subinterval mean-value term, no h_i, no sum.
                let printed = bound_cor32_bullen(&d0, seg0, tol)?;
                if r.apriori_bound > 0.0 {
                    out.samples.push(Sample {
                        kind: DiscKind::Prop1,
                        ratio: printed / r.apriori_bound,
                        margin: printed - remainder.abs(),
                        violated: printed < remainder.abs(),
                        label: format!("{label} n={n}"),
                    });
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        out.errors.push(format!("fn={} interval [{}, {}]: {e}", fun.id, iv.a(), iv.b()));
    }
    out
}

/// Run every compatible (function, frame, params) cell of the grid.
/// Deterministic: cells are evaluated in a fixed order (parallelism only
/// changes scheduling, never ordering of the assembled result).
pub fn run_suite(
    grid: &GridSpec,
    registry: &[RegistryEntry],
    tol: &Tolerances,
) -> Result<SuiteResult, Error> {
    grid.validate()?;
    tol.validate()?;
    let s_list: Vec<SExponent> =
        grid.s_values.iter().map(|&s| SExponent::new(s)).collect::<Result<_, _>>()?;
    let p_list: Vec<HolderPair> =
        grid.p_values.iter().map(|&p| HolderPair::new(p)).collect::<Result<_, _>>()?;
    let q_list: Vec<PowerMeanExponent> =
        grid.q_values.iter().map(|&q| PowerMeanExponent::new(q)).collect::<Result<_, _>>()?;

    enum Task {
        Frame { entry: usize, iv: Interval, frac: f64, weights: (f64, f64) },
        IntervalRows { entry: usize, iv: Interval },
    }

    let mut tasks = Vec::new();
    for (ei, entry) in registry.iter().enumerate() {
        for &iv in &grid.intervals {
            if !entry.function.domain.contains_interval(&iv) {
                continue;
            }
            for &frac in &grid.x_fracs {
                for &weights in &grid.weight_pairs {
                    tasks.push(Task::Frame { entry: ei, iv, frac, weights });
                }
            }
            tasks.push(Task::IntervalRows { entry: ei, iv });
        }
    }

    let outputs: Vec<CellOut> = tasks
        .par_iter()
        .map(|task| match *task {
            Task::Frame { entry, iv, frac, weights } => eval_frame_cell(
                &registry[entry],
                iv,
                frac,
                weights,
                &s_list,
                &p_list,
                &q_list,
                tol,
            ),
            Task::IntervalRows { entry, iv } => {
                eval_interval_cell(&registry[entry], iv, &s_list, tol)
            }
        })
        .collect();

    let mut reports = Vec::new();
    let mut samples = Vec::new();
    let mut cell_errors = Vec::new();
    for out in outputs {
        reports.extend(out.reports);
        samples.extend(out.samples);
        cell_errors.extend(out.errors);
    }

    let mut counts = SuiteCounts { reports: reports.len(), ..Default::default() };
    let mut violations = Vec::new();
    for r in &reports {
        match r.status {
            Status::Holds => counts.holds += 1,
            Status::DegenerateSkipped => counts.degenerate_skipped += 1,
            Status::Violated => {
                counts.violated += 1;
                if r.theorem_id.is_asserted() {
                    counts.asserted_violations += 1;
                } else {
                    counts.stated_violations += 1;
                }
                violations.push(r.clone());
            }
        }
    }

    let discrepancies = aggregate_discrepancies(samples);
    Ok(SuiteResult {
        meta: SuiteMeta {
            version: env!("CARGO_PKG_VERSION"),
            function_ids: registry.iter().map(|e| e.function.id.clone()).collect(),
            grid: grid.clone(),
            tolerances: *tol,
            counts,
            cell_errors,
        },
        reports,
        violations,
        discrepancies,
    })
}

fn aggregate_discrepancies(samples: Vec<Sample>) -> Vec<Discrepancy> {
    let specs: [(DiscKind, &str, &str); 6] = [
        (
            DiscKind::Thm22,
            "THM22_STATED_VS_DERIVED",
            "Displayed bound carries weight^p and length^(1+1/q) where the proof's Holder \
             factors give weight^1 and length^2; ratio = stated/derived.",
        ),
        (
            DiscKind::Thm23,
            "THM23_STATED_VS_DERIVED",
            "Displayed bracket uses length^p where the kernel integral gives length^(p+1); \
             ratio = stated/derived.",
        ),
        (
            DiscKind::Thm32,
            "THM32_STATED_VS_DERIVED",
            "Displayed bracket exponents divide by the subinterval length and the first \
             factor drops length^(1/p); the asserted form follows the proof; ratio = \
             stated/derived.",
        ),
        (
            DiscKind::Cor32,
            "COR32_DISPLAY_VS_INSTANTIATION",
            "Displayed Bullen-type bound compared against direct instantiation of the \
             log-convex theorem at x = midpoint, equal half weights; ratio = display/instantiation.",
        ),
        (
            DiscKind::Prop1,
            "PROP1_PRINTED_VS_CORRECTED",
            "Printed proposition shows one subinterval's mean-value term with no summation \
             and no h_i scaling; compared as its first-subinterval instantiation against \
             the corrected summed bound; ratio = printed/corrected.",
        ),
        (
            DiscKind::Prop2,
            "PROP2_PRINTED_VS_CORRECTED",
            "Printed proposition scales as h_i^2 with no summation where the derivation \
             gives sum of h_i^3 terms; compared as its first-subinterval instantiation \
             against the corrected summed bound; ratio = printed/corrected.",
        ),
    ];
    let mut out = Vec::new();
    for (kind, id, description) in specs {
        let mut group: Vec<&Sample> = samples.iter().filter(|s| s.kind == kind).collect();
        if group.is_empty() {
            continue;
        }
        let mut ratios: Vec<f64> = group.iter().map(|s| s.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let median = ratios[ratios.len() / 2];
        group.sort_by(|a, b| a.margin.total_cmp(&b.margin));
        let worst = group.first().map(|s| {
            format!("{} (stated-form margin over |LHS|: {:.6e})", s.label, s.margin)
        });
        out.push(Discrepancy {
            id: id.to_string(),
            description: description.to_string(),
            cells: ratios.len(),
            stated_violations: group.iter().filter(|s| s.violated).count(),
            ratio_min: ratios[0],
            ratio_median: median,
            ratio_max: *ratios.last().unwrap(),
            worst_example: worst,
        });
    }
    out
}

/// Compact deterministic JSON for the whole suite.
pub fn suite_to_json(result: &SuiteResult) -> String {
    serde_json::to_string(result).expect("suite serialization cannot fail: no NaN by contract")
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// One CSV row per report: theorem_id, fn_id, a, b, x, alpha, beta, s, p, q,
/// lhs, rhs, slack, status.
pub fn suite_to_csv(result: &SuiteResult) -> String {
    let mut out = String::from("theorem_id,fn_id,a,b,x,alpha,beta,s,p,q,lhs,rhs,slack,status\n");
    for r in &result.reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.theorem_id,
            r.fn_id,
            r.frame.a(),
            r.frame.b(),
            r.frame.x(),
            r.frame.alpha(),
            r.frame.beta(),
            csv_opt(r.params.s),
            csv_opt(r.params.p),
            csv_opt(r.params.q),
            r.lhs,
            r.rhs,
            r.slack,
            r.status,
        ));
    }
    out
}

/// 15 significant digits, the text-output precision.
pub fn fmt_sig15(x: f64) -> String {
    format!("{x:.14e}")
}

/// Per-theorem slack table plus the display-vs-derivation comparisons,
/// rendered as a text document.
pub fn discrepancy_report(result: &SuiteResult) -> String {
    let tol = &result.meta.tolerances;
    let mut doc = String::new();
    doc.push_str("DISCREPANCY REPORT\n==================\n\n");
    doc.push_str(&format!(
        "functions: {}\nframes per function-interval: {} x-fracs x {} weight pairs\n\n",
        result.meta.function_ids.join(", "),
        result.meta.grid.x_fracs.len(),
        result.meta.grid.weight_pairs.len(),
    ));

    doc.push_str("Per-theorem slack summary (slack = RHS - |LHS|):\n");
    doc.push_str(&format!(
        "{:<16} {:>8} {:>10} {:>8} {:>14} {:>14}\n",
        "theorem", "cells", "violations", "sharp", "min slack", "median slack"
    ));
    for id in TheoremId::ALL {
        let rows: Vec<&BoundReport> =
            result.reports.iter().filter(|r| r.theorem_id == id).collect();
        if rows.is_empty() {
            continue;
        }
        let mut slacks: Vec<f64> = rows.iter().map(|r| r.slack).collect();
        slacks.sort_by(f64::total_cmp);
        let violations = rows.iter().filter(|r| r.status == Status::Violated).count();
        let sharp = rows
            .iter()
            .filter(|r| {
                r.status == Status::Holds && r.slack <= tol.equality_rel * r.rhs.abs() + 1e-30
            })
            .count();
        let sharp_txt = if sharp > 0 { format!("{sharp} sharp") } else { "-".to_string() };
        doc.push_str(&format!(
            "{:<16} {:>8} {:>10} {:>8} {:>14.4e} {:>14.4e}\n",
            id.as_str(),
            rows.len(),
            violations,
            sharp_txt,
            slacks[0],
            slacks[slacks.len() / 2],
        ));
    }

    doc.push_str("\nDisplay-vs-derivation comparisons:\n");
    for d in &result.discrepancies {
        doc.push_str(&format!(
            "\n[{}] cells: {}, stated-form domination failures: {}\n  ratio stated/asserted: min {:.6e}, median {:.6e}, max {:.6e}\n  {}\n",
            d.id, d.cells, d.stated_violations, d.ratio_min, d.ratio_median, d.ratio_max, d.description
        ));
        if let Some(w) = &d.worst_example {
            doc.push_str(&format!("  worst cell: {w}\n"));
        }
    }

    if result.meta.counts.violated == 0 {
        doc.push_str("\nNo violations anywhere on the grid.\n");
    } else {
        doc.push_str(&format!(
            "\nViolations: {} total ({} asserted, {} stated-variant findings).\n",
            result.meta.counts.violated,
            result.meta.counts.asserted_violations,
            result.meta.counts.stated_violations
        ));
    }
    doc
}

/// Evaluate one theorem on one frame, with the LHS the theorem actually
/// controls. This is the engine behind the CLI `bound` command.
pub fn single_bound(
    fun: &TestFunction,
    theorem: TheoremId,
    frame: &ProblemFrame,
    s: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    tol: &Tolerances,
) -> Result<BoundReport, Error> {
    let iv = frame.interval();
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::IncompatibleTheorem {
            theorem: theorem.to_string(),
            reason: format!("parameter --{name} is required"),
        })
    };
    let require_s_cert = |s: SExponent, qexp: f64| -> Result<(), Error> {
        if fun.certifies_s_power(s, qexp) {
            Ok(())
        } else {
            Err(Error::MissingCertification {
                fn_id: fun.id.clone(),
                needed: format!(
                    "s-convexity of |f''|^{qexp} with s = {} on its domain",
                    s.get()
                ),
            })
        }
    };
    let require_log = || -> Result<(), Error> {
        if fun.log_convex_f2 {
            Ok(())
        } else {
            Err(Error::MissingCertification {
                fn_id: fun.id.clone(),
                needed: "a strictly positive log-convex |f''| certification".to_string(),
            })
        }
    };
    // The single-cell command follows the theorem hypotheses literally:
    // degenerate ratios are rejected with a routing note (the suite evaluates
    // those cells through the documented limits instead).
    let require_nondegenerate = |d: &SecondDerivTriple| -> Result<(), Error> {
        let kt = kappa_tau(d, frame, tol)?;
        if kt.kappa_degenerate || kt.tau_degenerate {
            Err(Error::DegenerateKappaTau { ln_kappa: kt.ln_kappa, ln_tau: kt.ln_tau })
        } else {
            Ok(())
        }
    };

    let d = SecondDerivTriple::from_function(fun, frame);
    match theorem {
        TheoremId::Lemma21 => verify_identity(fun, frame, tol),
        TheoremId::Ostrowski => {
            let m1 = fun.m1.ok_or_else(|| Error::MissingCertification {
                fn_id: fun.id.clone(),
                needed: "a uniform bound M1 on |f'|".to_string(),
            })?;
            let mean = partial_integral(fun, iv.a(), iv.b(), tol)? / iv.length();
            let lhs = fun.f_at(frame.x()) - mean;
            let rhs = bound_ostrowski(m1, iv, frame.x())?;
            Ok(BoundReport::absolute(theorem, &fun.id, *frame, BoundParams::none(), lhs, rhs, tol))
        }
        TheoremId::BullenClassic => check_bullen_classic(fun, iv, tol),
        TheoremId::Cor23 => {
            let s = SExponent::new(need(s, "s")?)?;
            require_s_cert(s, 1.0)?;
            let dm = SecondDerivTriple::from_midpoint(fun, iv);
            let lhs = bullen_lhs(fun, iv, tol)?;
            let frame_m = ProblemFrame::from_interval(iv, iv.midpoint(), 0.5, 0.5)?;
            Ok(BoundReport::absolute(
                theorem,
                &fun.id,
                frame_m,
                BoundParams::with_s(s.get()),
                lhs,
                bound_cor23_bullen(&dm, iv, s),
                tol,
            ))
        }
        TheoremId::Cor32 => {
            require_log()?;
            let dm = SecondDerivTriple::from_midpoint(fun, iv);
            let frame_m = ProblemFrame::from_interval(iv, iv.midpoint(), 0.5, 0.5)?;
            let kt = kappa_tau(&dm, &frame_m, tol)?;
            if kt.kappa_degenerate || kt.tau_degenerate {
                return Err(Error::DegenerateKappaTau {
                    ln_kappa: kt.ln_kappa,
                    ln_tau: kt.ln_tau,
                });
            }
            let lhs = bullen_lhs(fun, iv, tol)?;
            Ok(BoundReport::absolute(
                theorem,
                &fun.id,
                frame_m,
                BoundParams::none(),
                lhs,
                bound_cor32_bullen(&dm, iv, tol)?,
                tol,
            ))
        }
        TheoremId::Thm21 | TheoremId::Cor21 | TheoremId::Cor22 => {
            let s = SExponent::new(need(s, "s")?)?;
            require_s_cert(s, 1.0)?;
            let lhs = lhs_functional(fun, frame, tol)?;
            let rhs = match theorem {
                TheoremId::Thm21 => bound_thm21(&d, frame, s),
                TheoremId::Cor21 => {
                    let m2 = fun.m2.ok_or_else(|| Error::MissingCertification {
                        fn_id: fun.id.clone(),
                        needed: "a uniform bound M2 on |f''|".to_string(),
                    })?;
                    bound_cor21(m2, frame, s)?
                }
                _ => {
                    if frame.alpha() != frame.beta() {
                        return Err(Error::IncompatibleTheorem {
                            theorem: theorem.to_string(),
                            reason: "this corollary is the alpha = beta instance".to_string(),
                        });
                    }
                    bound_cor22(&d, iv, frame.x(), s)?
                }
            };
            Ok(BoundReport::absolute(
                theorem,
                &fun.id,
                *frame,
                BoundParams::with_s(s.get()),
                lhs,
                rhs,
                tol,
            ))
        }
        TheoremId::Thm22Stated | TheoremId::Thm22Derived | TheoremId::Thm23Stated
        | TheoremId::Thm23Derived => {
            let s = SExponent::new(need(s, "s")?)?;
            let h = HolderPair::new(need(p, "p")?)?;
            require_s_cert(s, h.q())?;
            let lhs = lhs_functional(fun, frame, tol)?;
            let (variant, rhs) = match theorem {
                TheoremId::Thm22Stated => (
                    BoundVariant::Stated,
                    bound_thm22(&d, frame, s, &h, BoundVariant::Stated)?,
                ),
                TheoremId::Thm22Derived => (
                    BoundVariant::Derived,
                    bound_thm22(&d, frame, s, &h, BoundVariant::Derived)?,
                ),
                TheoremId::Thm23Stated => (
                    BoundVariant::Stated,
                    bound_thm23(&d, frame, s, &h, BoundVariant::Stated)?,
                ),
                _ => (
                    BoundVariant::Derived,
                    bound_thm23(&d, frame, s, &h, BoundVariant::Derived)?,
                ),
            };
            let _ = variant;
            Ok(BoundReport::absolute(
                theorem,
                &fun.id,
                *frame,
                BoundParams { s: Some(s.get()), p: Some(h.p()), q: Some(h.q()), n: None },
                lhs,
                rhs,
                tol,
            ))
        }
        TheoremId::Thm24 => {
            let s = SExponent::new(need(s, "s")?)?;
            let qe = PowerMeanExponent::new(need(q, "q")?)?;
            require_s_cert(s, qe.get())?;
            let lhs = lhs_functional(fun, frame, tol)?;
            Ok(BoundReport::absolute(
                theorem,
                &fun.id,
                *frame,
                BoundParams { s: Some(s.get()), p: None, q: Some(qe.get()), n: None },
                lhs,
                bound_thm24(&d, frame, s, qe),
                tol,
            ))
        }
        TheoremId::Thm31 | TheoremId::Cor31 => {
            require_log()?;
            require_nondegenerate(&d)?;
            if theorem == TheoremId::Cor31 && frame.alpha() != frame.beta() {
                return Err(Error::IncompatibleTheorem {
                    theorem: theorem.to_string(),
                    reason: "this corollary is the alpha = beta instance".to_string(),
                });
            }
            let lhs = lhs_functional(fun, frame, tol)?;
            let rhs = if theorem == TheoremId::Thm31 {
                bound_thm31(&d, frame, tol)?
            } else {
                bound_cor31(&d, iv, frame.x(), tol)?
            };
            Ok(BoundReport::absolute(theorem, &fun.id, *frame, BoundParams::none(), lhs, rhs, tol))
        }
        TheoremId::Thm32 => {
            require_log()?;
            require_nondegenerate(&d)?;
            let h = HolderPair::new(need(p, "p")?)?;
            let lhs = lhs_functional(fun, frame, tol)?;
            Ok(BoundReport::absolute(
                theorem,
                &fun.id,
                *frame,
                BoundParams { s: None, p: Some(h.p()), q: Some(h.q()), n: None },
                lhs,
                bound_thm32(&d, frame, &h, BoundVariant::Derived, tol)?,
                tol,
            ))
        }
        TheoremId::Thm33 => {
            require_log()?;
            require_nondegenerate(&d)?;
            let qe = PowerMeanExponent::new(need(q, "q")?)?;
            let lhs = lhs_functional(fun, frame, tol)?;
            Ok(BoundReport::absolute(
                theorem,
                &fun.id,
                *frame,
                BoundParams { s: None, p: None, q: Some(qe.get()), n: None },
                lhs,
                bound_thm33(&d, frame, qe, tol)?,
                tol,
            ))
        }
        TheoremId::Prop1 | TheoremId::Prop2 => Err(Error::IncompatibleTheorem {
            theorem: theorem.to_string(),
            reason: "composite-rule propositions are handled by the integrate command".to_string(),
        }),
    }
}

fn bullen_lhs(fun: &TestFunction, iv: Interval, tol: &Tolerances) -> Result<f64, Error> {
    let mean = partial_integral(fun, iv.a(), iv.b(), tol)? / iv.length();
    Ok(0.5 * (fun.f_at(iv.midpoint()) + (fun.f_at(iv.a()) + fun.f_at(iv.b())) / 2.0) - mean)
}
