//! Certified error bounds for Ostrowski/Bullen-type integral approximations
//! of functions whose second-derivative magnitude is s-convex or log-convex,
//! verified end to end against a brute-force integration oracle, with an
//! application to composite averaged midpoint-trapezoid quadrature.
//!
//! Layout:
//! - [`types`]: frames, exponents, the test-function model, tolerances, reports
//! - [`kernel`]: the piecewise-parabolic kernel and its integral identity
//! - [`sconvex`]: closed-form bounds under s-convex |f''| hypotheses
//! - [`logconvex`]: kappa/tau ratios, exponential moments, log-convex bounds
//! - [`quadrature`]: the reference integrator, partitions, the composite rule
//! - [`registry`]: curated test functions with certified class metadata
//! - [`harness`]: grid-driven suites, serialization, discrepancy report

pub mod harness;
pub mod kernel;
pub mod logconvex;
pub mod quadrature;
pub mod registry;
pub mod sconvex;
pub mod types;

pub use harness::{
    discrepancy_report, fmt_sig15, run_suite, single_bound, suite_to_csv, suite_to_json,
    Discrepancy, GridSpec, SuiteCounts, SuiteMeta, SuiteResult,
};
pub use kernel::{eval_kernel, kernel_integral, lhs_functional, verify_identity, KernelBranch, KernelValue};
pub use logconvex::{
    bound_cor31, bound_cor32_bullen, bound_thm31, bound_thm32, bound_thm33, kappa_tau,
    parabolic_exp_moment, KappaTau,
};
pub use quadrature::{
    amt_bound_logconvex, amt_bound_sconvex, amt_rule, integrate_with_bound, oracle_integrate,
    BoundKind, NeumaierSum, Partition, QuadratureResult,
};
pub use registry::{
    builtin_registry, certification_failures, check_log_convex_sampled, check_nonnegative_sampled,
    check_s_convex_sampled, find_function, membership_targets, MembershipTarget,
    MembershipVerdict, RegistryEntry,
};
pub use sconvex::{
    bound_cor21, bound_cor22, bound_cor23_bullen, bound_ostrowski, bound_thm21, bound_thm22,
    bound_thm23, bound_thm24, check_bullen_classic, euler_beta, BoundVariant, SecondDerivTriple,
};
pub use types::{
    BoundParams, BoundReport, Error, F2Shape, HolderPair, Interval, PowerMeanExponent,
    ProblemFrame, RealFn, SExponent, Status, TestFunction, TheoremId, Tolerances,
};
