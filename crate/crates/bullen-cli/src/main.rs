//! Command-line front end: run verification suites, compute single bounds,
//! integrate with a certified error bound, list the registry, emit the
//! discrepancy report.
//!
//! Exit codes: 0 success / all asserted checks hold; 1 violations or a
//! failed bound; 2 usage or configuration errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bullen_bounds::{
    builtin_registry, discrepancy_report, find_function, fmt_sig15, integrate_with_bound,
    membership_targets, run_suite, single_bound, suite_to_csv, suite_to_json, BoundKind,
    GridSpec, Interval, Partition, ProblemFrame, SExponent, Status, SuiteResult, TheoremId,
    Tolerances,
};

#[derive(Parser)]
#[command(
    name = "bullen-bounds",
    version,
    about = "Certified Ostrowski/Bullen-type error bounds with brute-force verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite over the registry and parameter grid.
    Verify(VerifyArgs),
    /// Evaluate one theorem on one frame and print LHS, RHS, slack.
    Bound(BoundArgs),
    /// Integrate with the composite averaged midpoint-trapezoid rule and a
    /// certified a-priori error bound.
    Integrate(IntegrateArgs),
    /// List registry functions and membership-test targets.
    #[command(name = "list-functions")]
    ListFunctions(ListArgs),
    /// Run the suite and emit the discrepancy report.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct GridArgs {
    /// Comma-separated registry ids to include (default: all).
    #[arg(long)]
    functions: Option<String>,
    /// Comma-separated s values, e.g. 0.5 or 0.25,0.5,1.
    #[arg(long)]
    s: Option<String>,
    /// Comma-separated Holder p values.
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated power-mean q values.
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated x fractions in (0,1).
    #[arg(long = "x-fracs")]
    x_fracs: Option<String>,
    /// Comma-separated weight pairs a:b, e.g. 1:1,0:1.
    #[arg(long)]
    weights: Option<String>,
    /// Comma-separated intervals a:b, e.g. 0:1,1:3.
    #[arg(long)]
    intervals: Option<String>,
    #[command(flatten)]
    tols: TolArgs,
}

#[derive(Args)]
struct TolArgs {
    /// Absolute budget for the kernel identity residual.
    #[arg(long = "tol-identity")]
    tol_identity: Option<f64>,
    /// Relative grace when asserting |LHS| <= RHS.
    #[arg(long = "tol-slack")]
    tol_slack: Option<f64>,
    /// Relative tolerance for equality-attainment checks.
    #[arg(long = "tol-equality")]
    tol_equality: Option<f64>,
    /// Absolute target for the reference integrator.
    #[arg(long = "tol-oracle")]
    tol_oracle: Option<f64>,
    /// Degeneracy threshold on |ln kappa|.
    #[arg(long = "tol-kappa")]
    tol_kappa: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Write the output here instead of stdout.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Seed for any randomized inputs (reserved; the default suite is
    /// deterministic).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BoundArgs {
    /// Theorem id, e.g. THM21, THM22_DERIVED, THM31, OSTROWSKI.
    #[arg(long = "thm")]
    theorem: String,
    /// Registry function id.
    #[arg(long = "fn")]
    fn_id: String,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Interior evaluation point (defaults to the midpoint).
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[command(flatten)]
    tols: TolArgs,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Registry function id.
    #[arg(long = "fn")]
    fn_id: String,
    /// Uniform partition with this many subintervals.
    #[arg(long, conflicts_with = "random")]
    uniform: Option<usize>,
    /// Seeded random partition with this many subintervals.
    #[arg(long)]
    random: Option<usize>,
    /// Bound kind: PROP1 (log-convex) or PROP2 (s-convex).
    #[arg(long)]
    kind: String,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[command(flatten)]
    tols: TolArgs,
}

#[derive(Args)]
struct ListArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Bound(args) => cmd_bound(args),
        Command::Integrate(args) => cmd_integrate(args),
        Command::ListFunctions(args) => cmd_list(args),
        Command::Report(args) => cmd_report(args),
    };
    match code {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Worker count from BULLEN_BOUNDS_THREADS (default: logical cores). Results
/// are byte-identical for every worker count.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("BULLEN_BOUNDS_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn parse_list(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|e| format!("bad number '{tok}': {e}")))
        .collect()
}

fn parse_pairs(raw: &str) -> Result<Vec<(f64, f64)>, String> {
    raw.split(',')
        .map(|tok| {
            let (a, b) = tok
                .split_once(':')
                .ok_or_else(|| format!("bad pair '{tok}': expected a:b"))?;
            Ok((
                a.trim().parse::<f64>().map_err(|e| format!("bad pair '{tok}': {e}"))?,
                b.trim().parse::<f64>().map_err(|e| format!("bad pair '{tok}': {e}"))?,
            ))
        })
        .collect()
}

fn build_tolerances(args: &TolArgs) -> Result<Tolerances, String> {
    let mut tol = Tolerances::default();
    if let Some(v) = args.tol_identity {
        tol.identity_abs = v;
    }
    if let Some(v) = args.tol_slack {
        tol.bound_slack_rel = v;
    }
    if let Some(v) = args.tol_equality {
        tol.equality_rel = v;
    }
    if let Some(v) = args.tol_oracle {
        tol.oracle_abs = v;
    }
    if let Some(v) = args.tol_kappa {
        tol.kappa_degenerate = v;
    }
    tol.validate().map_err(|e| e.to_string())?;
    Ok(tol)
}

fn build_grid(args: &GridArgs) -> Result<GridSpec, String> {
    let mut grid = GridSpec::default_grid();
    if let Some(raw) = &args.s {
        grid.s_values = parse_list(raw)?;
    }
    if let Some(raw) = &args.p {
        grid.p_values = parse_list(raw)?;
    }
    if let Some(raw) = &args.q {
        grid.q_values = parse_list(raw)?;
    }
    if let Some(raw) = &args.x_fracs {
        grid.x_fracs = parse_list(raw)?;
    }
    if let Some(raw) = &args.weights {
        grid.weight_pairs = parse_pairs(raw)?;
    }
    if let Some(raw) = &args.intervals {
        grid.intervals = parse_pairs(raw)?
            .into_iter()
            .map(|(a, b)| Interval::new(a, b).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
    }
    grid.validate().map_err(|e| e.to_string())?;
    Ok(grid)
}

fn select_registry(filter: &Option<String>) -> Result<Vec<bullen_bounds::RegistryEntry>, String> {
    let registry = builtin_registry();
    match filter {
        None => Ok(registry),
        Some(raw) => {
            let wanted: Vec<&str> = raw.split(',').map(str::trim).collect();
            let mut selected = Vec::new();
            for id in wanted {
                let entry = registry
                    .iter()
                    .find(|e| e.function.id == id)
                    .ok_or_else(|| format!("no registry function with id '{id}'"))?;
                selected.push(entry.clone());
            }
            Ok(selected)
        }
    }
}

fn emit(text: String, output: &Option<PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| format!("writing {path:?}: {e}")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn verify_summary(result: &SuiteResult) -> String {
    let c = &result.meta.counts;
    let mut out = String::new();
    out.push_str(&format!(
        "suite: {} reports over {} functions ({} frames per function-interval)\n",
        c.reports,
        result.meta.function_ids.len(),
        result.meta.grid.x_fracs.len() * result.meta.grid.weight_pairs.len(),
    ));
    out.push_str(&format!(
        "holds: {}  violations: {} (asserted: {}, stated-variant findings: {})  degenerate-skipped: {}\n",
        c.holds, c.violated, c.asserted_violations, c.stated_violations, c.degenerate_skipped
    ));
    if !result.meta.cell_errors.is_empty() {
        out.push_str(&format!("cell errors: {}\n", result.meta.cell_errors.len()));
        for e in &result.meta.cell_errors {
            out.push_str(&format!("  {e}\n"));
        }
    }
    for v in result.violations.iter().filter(|v| v.theorem_id.is_asserted()).take(20) {
        out.push_str(&format!(
            "VIOLATED {} fn={} a={} b={} x={} lhs={} rhs={}\n",
            v.theorem_id,
            v.fn_id,
            v.frame.a(),
            v.frame.b(),
            v.frame.x(),
            fmt_sig15(v.lhs),
            fmt_sig15(v.rhs)
        ));
    }
    out.push_str(if result.asserted_ok() {
        "asserted checks: all hold\n"
    } else {
        "asserted checks: FAILURES PRESENT\n"
    });
    out
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let tol = build_tolerances(&args.grid.tols)?;
    let grid = build_grid(&args.grid)?;
    let registry = select_registry(&args.grid.functions)?;
    let result = run_suite(&grid, &registry, &tol).map_err(|e| e.to_string())?;
    let _ = args.seed;
    let rendered = match args.format {
        OutputFormat::Json => suite_to_json(&result),
        OutputFormat::Csv => suite_to_csv(&result),
        OutputFormat::Text => verify_summary(&result),
    };
    emit(rendered, &args.output)?;
    Ok(if result.asserted_ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_bound(args: BoundArgs) -> Result<ExitCode, String> {
    let tol = build_tolerances(&args.tols)?;
    let theorem: TheoremId = args.theorem.parse().map_err(|e: bullen_bounds::Error| e.to_string())?;
    let fun = find_function(&builtin_registry(), &args.fn_id).map_err(|e| e.to_string())?;
    let x = args.x.unwrap_or(0.5 * (args.a + args.b));
    let frame = ProblemFrame::new(args.a, args.b, x, args.alpha, args.beta)
        .map_err(|e| e.to_string())?;
    let report = single_bound(&fun, theorem, &frame, args.s, args.p, args.q, &tol)
        .map_err(|e| e.to_string())?;
    match args.format {
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
        ),
        _ => {
            println!("theorem: {}", report.theorem_id);
            println!("function: {}", report.fn_id);
            println!(
                "frame: a={} b={} x={} alpha={} beta={}",
                report.frame.a(),
                report.frame.b(),
                report.frame.x(),
                report.frame.alpha(),
                report.frame.beta()
            );
            let mut params = Vec::new();
            if let Some(s) = report.params.s {
                params.push(format!("s={s}"));
            }
            if let Some(p) = report.params.p {
                params.push(format!("p={p}"));
            }
            if let Some(q) = report.params.q {
                params.push(format!("q={q}"));
            }
            if !params.is_empty() {
                println!("params: {}", params.join(" "));
            }
            println!("lhs = {}", fmt_sig15(report.lhs));
            println!("rhs = {}", fmt_sig15(report.rhs));
            println!("slack = {}", fmt_sig15(report.slack));
            println!("status = {}", report.status);
        }
    }
    Ok(if report.status == Status::Holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_integrate(args: IntegrateArgs) -> Result<ExitCode, String> {
    let tol = build_tolerances(&args.tols)?;
    let fun = find_function(&builtin_registry(), &args.fn_id).map_err(|e| e.to_string())?;
    let kind: BoundKind = args.kind.parse().map_err(|e: bullen_bounds::Error| e.to_string())?;
    let interval = Interval::new(args.a, args.b).map_err(|e| e.to_string())?;
    let partition = match (args.uniform, args.random) {
        (Some(n), None) => Partition::uniform(interval, n).map_err(|e| e.to_string())?,
        (None, Some(n)) => Partition::random(interval, n, args.seed).map_err(|e| e.to_string())?,
        _ => return Err("exactly one of --uniform N or --random N is required".to_string()),
    };
    let s = args.s.map(SExponent::new).transpose().map_err(|e| e.to_string())?;
    let result =
        integrate_with_bound(&fun, &partition, kind, s, &tol).map_err(|e| e.to_string())?;
    let ok = result.within_bound(&tol);
    match args.format {
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&result).map_err(|e| e.to_string())?
        ),
        _ => {
            println!("function: {}", fun.id);
            println!("partition: {} subintervals on [{}, {}]", partition.n(), args.a, args.b);
            println!("bound kind: {}", result.bound_kind);
            println!("amt_value = {}", fmt_sig15(result.amt_value));
            println!("reference_value = {}", fmt_sig15(result.reference_value));
            println!("actual_error = {}", fmt_sig15(result.actual_error));
            println!("apriori_bound = {}", fmt_sig15(result.apriori_bound));
            println!("status = {}", if ok { "HOLDS" } else { "VIOLATED" });
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_list(args: ListArgs) -> Result<ExitCode, String> {
    let registry = builtin_registry();
    let targets = membership_targets();
    match args.format {
        OutputFormat::Json => {
            let functions: Vec<serde_json::Value> = registry
                .iter()
                .map(|e| {
                    let f = &e.function;
                    serde_json::json!({
                        "id": f.id,
                        "tags": e.tags,
                        "certifications": {
                            "s_membership": f.s_membership.map(|s| s.get()),
                            "log_convex_f2": f.log_convex_f2,
                            "convex": f.convex,
                            "m1": f.m1,
                            "m2": f.m2,
                        },
                        "domain": { "a": f.domain.a(), "b": f.domain.b() },
                        "has_antiderivative": f.antiderivative.is_some(),
                        "provenance": e.provenance,
                    })
                })
                .collect();
            let memberships: Vec<serde_json::Value> = targets
                .iter()
                .map(|t| {
                    serde_json::json!({
                        "id": t.id,
                        "s": t.s.get(),
                        "expected_member": t.expected_member,
                        "provenance": t.provenance,
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "functions": functions,
                "membership_targets": memberships,
            });
            println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?);
        }
        _ => {
            println!("{:<14} {:<12} {:>6} {:>6} {:>10} {:>10}  tags", "id", "domain", "s", "logcx", "M1", "M2");
            for e in &registry {
                let f = &e.function;
                println!(
                    "{:<14} [{}, {}]{:>6} {:>6} {:>10.4} {:>10.4}  {}",
                    f.id,
                    f.domain.a(),
                    f.domain.b(),
                    f.s_membership.map(|s| s.get().to_string()).unwrap_or_else(|| "-".into()),
                    if f.log_convex_f2 { "yes" } else { "no" },
                    f.m1.unwrap_or(f64::NAN),
                    f.m2.unwrap_or(f64::NAN),
                    e.tags.join(","),
                );
            }
            println!("\nmembership-only targets:");
            for t in &targets {
                println!(
                    "  {:<26} s={:<5} expected member: {}",
                    t.id,
                    t.s.get(),
                    t.expected_member
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(args: ReportArgs) -> Result<ExitCode, String> {
    let tol = build_tolerances(&args.grid.tols)?;
    let grid = build_grid(&args.grid)?;
    let registry = select_registry(&args.grid.functions)?;
    let result = run_suite(&grid, &registry, &tol).map_err(|e| e.to_string())?;
    let rendered = match args.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "discrepancies": result.discrepancies,
            "counts": result.meta.counts,
        }))
        .map_err(|e| e.to_string())?,
        _ => discrepancy_report(&result),
    };
    emit(rendered, &args.output)?;
    Ok(if result.asserted_ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
