//! Numerical verification of the coherence diagrams.
//!
//! A check composes the matrices along both paths of a diagram and reports
//! the operator norm of their difference. The tolerance scales with the
//! product of the operator norms of the factors on the longer path:
//! `max(tol · Π‖f_i‖, 1e-12)`.

mod checks;
mod context;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bimodule::{Bimodule, Morphism};
use crate::error::Result;
use crate::instance::{Instance, InstanceSpec};
use crate::linalg::{self, Mat};
use crate::tensor::TensorKind;

pub use checks::*;
pub use context::{CVariant, Context, Family, Mutation};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const TOL_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Both composites have a zero-dimensional source or target.
    DegeneratePass,
    /// A construction failed; the message says which.
    Error,
}

impl Status {
    pub fn passed(self) -> bool {
        matches!(self, Status::Pass | Status::DegeneratePass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub pass: bool,
    /// `None` when the check could not be evaluated.
    pub defect: Option<f64>,
    pub tolerance: f64,
    /// Dimensions of the bimodules the check is about.
    pub dims: Vec<usize>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub max_defect: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    /// Sorts by name and recomputes the summary.
    pub fn from_checks(mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let mut summary = Summary { total: checks.len(), ..Summary::default() };
        for c in &checks {
            match c.status {
                Status::Pass | Status::DegeneratePass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Error => summary.errors += 1,
            }
            if let Some(d) = c.defect.filter(|d| d.is_finite()) {
                summary.max_defect = summary.max_defect.max(d);
            }
        }
        Self { checks, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    /// `0` when every check passed, `1` otherwise. Checks that could not be
    /// evaluated count as failures.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub tol: f64,
    /// Worker threads; `None` uses every core, `Some(1)` runs sequentially.
    pub jobs: Option<usize>,
    /// Keep only checks whose name starts with one of these prefixes.
    pub filter: Vec<String>,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, jobs: None, filter: Vec::new(), mutation: None }
    }
}

/// Composite of factors given in application order.
fn compose(factors: &[Mat]) -> std::result::Result<Mat, String> {
    let mut iter = factors.iter();
    let mut acc = iter.next().ok_or("empty path")?.clone();
    for (k, f) in iter.enumerate() {
        if f.ncols() != acc.nrows() {
            return Err(format!(
                "factor {} has shape {}x{} but receives dimension {}",
                k + 1,
                f.nrows(),
                f.ncols(),
                acc.nrows()
            ));
        }
        acc = f * acc;
    }
    Ok(acc)
}

fn path_scale(factors: &[Mat]) -> f64 {
    factors.iter().map(linalg::op_norm).product()
}

/// Turns an outcome into a result under the scale-aware tolerance.
pub fn judge(name: String, dims: Vec<usize>, seed: u64, tol: f64, outcome: Result<Outcome>) -> CheckResult {
    let mut result = CheckResult {
        name,
        status: Status::Error,
        pass: false,
        defect: None,
        tolerance: tol.max(TOL_FLOOR),
        dims,
        seed,
        message: None,
    };
    let (defect, scale, degenerate) = match outcome {
        Err(e) => {
            result.message = Some(e.to_string());
            return result;
        }
        Ok(Outcome::Defect { defect, scale, degenerate }) => (defect, scale, degenerate),
        Ok(Outcome::Paths(p)) => {
            let (a, b) = match (compose(&p.first), compose(&p.second)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    result.message = Some(e);
                    return result;
                }
            };
            if a.shape() != b.shape() {
                result.message = Some(format!("paths end in shapes {:?} and {:?}", a.shape(), b.shape()));
                return result;
            }
            let degenerate = a.nrows() == 0 || a.ncols() == 0;
            let (s1, s2) = (path_scale(&p.first), path_scale(&p.second));
            let scale = match p.first.len().cmp(&p.second.len()) {
                std::cmp::Ordering::Greater => s1,
                std::cmp::Ordering::Less => s2,
                std::cmp::Ordering::Equal => s1.max(s2),
            };
            (linalg::op_norm(&(a - b)), scale, degenerate)
        }
    };
    result.tolerance = (tol * scale).max(TOL_FLOOR);
    result.defect = Some(defect);
    result.status = if degenerate {
        Status::DegeneratePass
    } else if defect <= result.tolerance {
        Status::Pass
    } else {
        Status::Fail
    };
    result.pass = result.status.passed();
    result
}

type Runner<'a> = Box<dyn Fn(&Context) -> Result<Outcome> + Send + Sync + 'a>;

struct Planned<'a> {
    name: String,
    dims: Vec<usize>,
    run: Runner<'a>,
}

fn kinds() -> [TensorKind; 2] {
    [TensorKind::Left, TensorKind::Right]
}

fn labels(inst: &Instance, idx: &[usize]) -> String {
    idx.iter().map(|&i| inst.label(i)).collect::<Vec<_>>().join(",")
}

/// Every check that applies to the instance, in no particular order.
fn plan(inst: &Instance) -> Vec<Planned<'_>> {
    let mut out: Vec<Planned<'_>> = Vec::new();
    let mut push = |name: String, dims: Vec<usize>, run: Runner<'static>| out.push(Planned { name, dims, run });

    for (i, b) in inst.bimodules.iter().enumerate() {
        let b = b.clone();
        push(format!("bimodule/{}", inst.label(i)), vec![b.dim()], Box::new(move |_| Ok(bimodule_axioms(&b))));
    }
    for (k, f) in inst.morphisms.iter().enumerate() {
        let dims = vec![f.source().dim(), f.target().dim()];
        let g = f.clone();
        push(format!("morphism/{k:03}"), dims.clone(), Box::new(move |_| morphism_intertwines(&g)));
        let g = f.clone();
        push(
            format!("duality/transpose-adjoint/{k:03}"),
            dims,
            Box::new(move |_| Ok(Outcome::Paths(transpose_adjoint(&g)))),
        );
    }

    let chain = &inst.chain;
    let x: Vec<Arc<Bimodule>> = inst.chain_bimodules();
    let dims = |r: std::ops::Range<usize>| -> Vec<usize> { x[r].iter().map(|b| b.dim()).collect() };
    let name_of = |r: std::ops::Range<usize>| labels(inst, &chain[r]);

    // Morphism sets: the k-th declared morphism out of each chain member,
    // or its identity.
    let sets: Vec<Vec<Morphism>> = (0..2)
        .map(|k| {
            inst.chain_morphisms(k)
                .into_iter()
                .zip(&x)
                .map(|(m, b)| m.cloned().unwrap_or_else(|| Morphism::identity(b)))
                .collect()
        })
        .collect();

    for i in 0..x.len() {
        let xi = x[i].clone();
        let label = name_of(i..i + 1);
        let d = dims(i..i + 1);
        let a = xi.clone();
        push(format!("m_unit/left/{label}"), d.clone(), Box::new(move |c| m_unit_left(c, &a).map(Outcome::Paths)));
        let a = xi.clone();
        push(format!("m_unit/right/{label}"), d.clone(), Box::new(move |c| m_unit_right(c, &a).map(Outcome::Paths)));
        let a = xi.clone();
        push(format!("duality/transpose-d/{label}"), d.clone(), Box::new(move |c| transpose_d(c, &a).map(Outcome::Paths)));
        let a = xi.clone();
        push(
            format!("m_assoc/reduced/{label}"),
            d.clone(),
            Box::new(move |c| {
                let lb = c.standard(a.left_algebra());
                let lc = c.standard(a.right_algebra());
                m_assoc(c, &lb, &a, &lc).map(Outcome::Paths)
            }),
        );
        for kind in kinds() {
            for (k, set) in sets.iter().enumerate() {
                let f = set[i].clone();
                push(
                    format!("naturality/l-{}/{label}/f{k}", kind.as_str()),
                    d.clone(),
                    Box::new(move |c| naturality_l(c, kind, &f).map(Outcome::Paths)),
                );
                let f = set[i].clone();
                push(
                    format!("naturality/r-{}/{label}/f{k}", kind.as_str()),
                    d.clone(),
                    Box::new(move |c| naturality_r(c, kind, &f).map(Outcome::Paths)),
                );
            }
        }
    }

    for i in 0..x.len().saturating_sub(1) {
        let label = name_of(i..i + 2);
        let d = dims(i..i + 2);
        let (a, b) = (x[i].clone(), x[i + 1].clone());
        for kind in kinds() {
            let (p, q) = (a.clone(), b.clone());
            push(
                format!("triangle/{}/{label}", kind.as_str()),
                d.clone(),
                Box::new(move |c| triangle(c, kind, &p, &q).map(Outcome::Paths)),
            );
            let (p, q) = (a.clone(), b.clone());
            push(
                format!("duality/{}/{label}", kind.as_str()),
                d.clone(),
                Box::new(move |c| duality_square(c, kind, &p, &q).map(Outcome::Paths)),
            );
        }
        let (p, q) = (a.clone(), b.clone());
        push(
            format!("involution/equivalence/{label}"),
            d.clone(),
            Box::new(move |c| involution_equivalence(c, &p, &q).map(Outcome::Paths)),
        );
        for (k, set) in sets.iter().enumerate() {
            let (f, g) = (set[i].clone(), set[i + 1].clone());
            push(
                format!("naturality/m/{label}/f{k}"),
                d.clone(),
                Box::new(move |c| naturality_m(c, &f, &g).map(Outcome::Paths)),
            );
            for variant in CVariant::ALL {
                let (f, g) = (set[i].clone(), set[i + 1].clone());
                push(
                    format!("naturality/c-{}/{label}/f{k}", variant.as_str()),
                    d.clone(),
                    Box::new(move |c| naturality_c(c, variant, &f, &g).map(Outcome::Paths)),
                );
            }
        }
    }

    for i in 0..x.len().saturating_sub(2) {
        let label = name_of(i..i + 3);
        let d = dims(i..i + 3);
        let (a, b, e) = (x[i].clone(), x[i + 1].clone(), x[i + 2].clone());
        let (p, q, r) = (a.clone(), b.clone(), e.clone());
        push(format!("m_assoc/chain/{label}"), d.clone(), Box::new(move |c| m_assoc(c, &p, &q, &r).map(Outcome::Paths)));
        for variant in CVariant::ALL {
            let (p, q, r) = (a.clone(), b.clone(), e.clone());
            push(
                format!("hexagon/{}/{label}", variant.as_str()),
                d.clone(),
                Box::new(move |c| hexagon(c, variant, &p, &q, &r).map(Outcome::Paths)),
            );
        }
        for kind in kinds() {
            for (k, set) in sets.iter().enumerate() {
                let (f, g, h) = (set[i].clone(), set[i + 1].clone(), set[i + 2].clone());
                push(
                    format!("naturality/a-{}/{label}/f{k}", kind.as_str()),
                    d.clone(),
                    Box::new(move |c| naturality_a(c, kind, &f, &g, &h).map(Outcome::Paths)),
                );
            }
        }
    }

    for i in 0..x.len().saturating_sub(3) {
        let label = name_of(i..i + 4);
        let d = dims(i..i + 4);
        for kind in kinds() {
            let (w, a, b, e) = (x[i].clone(), x[i + 1].clone(), x[i + 2].clone(), x[i + 3].clone());
            push(
                format!("pentagon/{}/{label}", kind.as_str()),
                d.clone(),
                Box::new(move |c| pentagon(c, kind, &w, &a, &b, &e).map(Outcome::Paths)),
            );
        }
    }
    out
}

fn evaluate(p: &Planned<'_>, ctx: &Context, seed: u64, tol: f64) -> CheckResult {
    let outcome = catch_unwind(AssertUnwindSafe(|| (p.run)(ctx))).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "check panicked".into());
        Err(crate::Error::Instance(msg))
    });
    judge(p.name.clone(), p.dims.clone(), seed, tol, outcome)
}

#[cfg(feature = "parallel")]
fn run_planned(planned: &[Planned<'_>], ctx: &Context, seed: u64, cfg: &SuiteConfig) -> Vec<CheckResult> {
    use rayon::prelude::*;
    if cfg.jobs == Some(1) {
        return planned.iter().map(|p| evaluate(p, ctx, seed, cfg.tol)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.unwrap_or(0)).build();
    match pool {
        Ok(pool) => pool.install(|| planned.par_iter().map(|p| evaluate(p, ctx, seed, cfg.tol)).collect()),
        Err(_) => planned.iter().map(|p| evaluate(p, ctx, seed, cfg.tol)).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_planned(planned: &[Planned<'_>], ctx: &Context, seed: u64, cfg: &SuiteConfig) -> Vec<CheckResult> {
    planned.iter().map(|p| evaluate(p, ctx, seed, cfg.tol)).collect()
}

/// Names of the checks `run_suite` would run on the instance.
pub fn check_names(inst: &Instance) -> Vec<String> {
    let mut names: Vec<String> = plan(inst).into_iter().map(|p| p.name).collect();
    names.sort();
    names
}

/// Runs every applicable check. Construction failures are reported per
/// check and never abort the suite.
pub fn run_suite(inst: &Instance, cfg: &SuiteConfig) -> Report {
    let planned: Vec<Planned<'_>> = plan(inst)
        .into_iter()
        .filter(|p| cfg.filter.is_empty() || cfg.filter.iter().any(|f| p.name.starts_with(f.as_str())))
        .collect();
    let ctx = Context::new(cfg.mutation);
    Report::from_checks(run_planned(&planned, &ctx, inst.spec.seed, cfg))
}

/// Builds the instance from its description and runs the suite.
pub fn run_spec(spec: InstanceSpec, cfg: &SuiteConfig) -> Result<Report> {
    Ok(run_suite(&Instance::from_spec(spec)?, cfg))
}

/// Runs a single diagram outside a suite.
pub fn check(name: &str, tol: f64, run: impl FnOnce(&Context) -> Result<Paths>) -> CheckResult {
    let ctx = Context::default();
    judge(name.to_string(), Vec::new(), 0, tol, run(&ctx).map(Outcome::Paths))
}
