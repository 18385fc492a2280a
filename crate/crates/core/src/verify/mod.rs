//! Pass/fail numerical checks of the integral-geometric identities behind the
//! estimators.
//!
//! A [`CheckReport`] compares two values under a [`ToleranceRule`]. Checks
//! that bundle many comparisons report the comparison with the worst
//! normalised score, so `passed` is always determined by the reported
//! `lhs`, `rhs` and `rule`.

mod checks;
mod impossibility;

use std::fmt;

use rayon::prelude::*;

pub use checks::{
    check_bp_affine, check_bp_linear, check_classical_crofton, check_constant_identities, check_haar_invariance,
    check_lemma_d, check_projection_factor, check_sphere_identities, check_uniqueness_q, check_uniqueness_q_affine,
};
pub use impossibility::{impossibility_demo, SegmentPrism};

use crate::bodies::ConvexBody;
use crate::error::Result;
use crate::estimators::Estimate;
use crate::geometry::RngStream;

/// Relative floor added to statistical tolerances so that two values equal
/// up to rounding never fail on a zero standard error.
pub const ROUNDING_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Exact(f64),
    Estimated(Estimate),
}

impl Value {
    pub fn value(&self) -> f64 {
        match self {
            Value::Exact(v) => *v,
            Value::Estimated(e) => e.mean,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            Value::Exact(_) => 0.0,
            Value::Estimated(e) => e.stderr,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{v:.10e}"),
            Value::Estimated(e) => write!(f, "{:.6e} ± {:.2e} (N={})", e.mean, e.stderr, e.count),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ToleranceRule {
    /// `|a - b| <= k · sqrt(se_a² + se_b²)`.
    Sigma(f64),
    /// `|a - b| <= tol · max(|a|, |b|)`.
    Relative(f64),
    /// `|a - b| <= tol`.
    Absolute(f64),
    /// `a - b > k · sqrt(se_a² + se_b²)`: `a` significantly exceeds `b`.
    Exceeds(f64),
}

impl ToleranceRule {
    /// Normalised discrepancy; the comparison passes iff the score is `<= 1`
    /// (strictly `< 1` for [`ToleranceRule::Exceeds`]).
    pub fn score(&self, lhs: &Value, rhs: &Value) -> f64 {
        let (a, b) = (lhs.value(), rhs.value());
        let diff = (a - b).abs();
        let se = lhs.stderr().hypot(rhs.stderr());
        let scale = a.abs().max(b.abs());
        let ratio = |num: f64, den: f64| {
            if num == 0.0 {
                0.0
            } else if den > 0.0 {
                num / den
            } else {
                f64::INFINITY
            }
        };
        if a.is_nan() || b.is_nan() {
            return f64::INFINITY;
        }
        match *self {
            ToleranceRule::Sigma(k) => ratio(diff, k * se + ROUNDING_FLOOR * scale),
            ToleranceRule::Relative(tol) => ratio(diff, tol * scale),
            ToleranceRule::Absolute(tol) => ratio(diff, tol),
            ToleranceRule::Exceeds(k) => {
                if a > b {
                    // 0 when the separation is noiseless
                    (k * se) / (a - b)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn passes(&self, lhs: &Value, rhs: &Value) -> bool {
        let s = self.score(lhs, rhs);
        match self {
            ToleranceRule::Exceeds(_) => s < 1.0,
            _ => s <= 1.0,
        }
    }
}

impl fmt::Display for ToleranceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToleranceRule::Sigma(k) => write!(f, "|lhs-rhs| <= {k} combined stderr"),
            ToleranceRule::Relative(t) => write!(f, "relative error <= {t:e}"),
            ToleranceRule::Absolute(t) => write!(f, "absolute error <= {t:e}"),
            ToleranceRule::Exceeds(k) => write!(f, "lhs - rhs > {k} combined stderr"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub rule: ToleranceRule,
    pub passed: bool,
    pub details: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, lhs: Value, rhs: Value, rule: ToleranceRule, details: impl Into<String>) -> Self {
        let passed = rule.passes(&lhs, &rhs);
        CheckReport { name: name.into(), lhs, rhs, rule, passed, details: details.into() }
    }

    pub fn score(&self) -> f64 {
        self.rule.score(&self.lhs, &self.rhs)
    }

    /// Folds several comparisons into one report carrying the worst one.
    /// Failing parts always outrank passing ones.
    pub fn worst_of(name: impl Into<String>, parts: Vec<CheckReport>) -> CheckReport {
        let name = name.into();
        let total = parts.len();
        let failed = parts.iter().filter(|p| !p.passed).count();
        let worst = parts
            .into_iter()
            .max_by(|a, b| {
                (!a.passed, a.score())
                    .partial_cmp(&(!b.passed, b.score()))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("worst_of needs at least one part");
        let mut details = format!("{failed}/{total} comparisons failed; worst: {}", worst.name);
        if !worst.details.is_empty() {
            details.push_str(&format!(" ({})", worst.details));
        }
        CheckReport { name, details, ..worst }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: lhs {} vs rhs {}; {}; {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.lhs,
            self.rhs,
            self.rule,
            self.details
        )
    }
}

/// Default sample budget of the statistical battery checks.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

type Job = Box<dyn Fn(u64) -> Result<CheckReport> + Send + Sync>;

fn battery_jobs(budget: u64) -> Vec<Job> {
    let ball = |n: usize| ConvexBody::unit_ball(n);
    let cube4 = ConvexBody::cube(4, -1.0, 1.0).expect("valid cube");
    let small = (budget / 10).max(1000);
    vec![
        Box::new(|_| check_constant_identities(10)),
        Box::new(|s| check_lemma_d(5, 2, 1, 200, s)),
        Box::new(|s| check_lemma_d(4, 1, 1, 200, s)),
        Box::new(|s| check_lemma_d(5, 1, 2, 200, s)),
        Box::new(move |s| check_sphere_identities(3, s, small)),
        Box::new(move |s| check_sphere_identities(4, s, small)),
        Box::new(move |s| check_sphere_identities(5, s, small)),
        Box::new(move |s| check_projection_factor(4, 2, s, small)),
        Box::new(move |s| check_haar_invariance(4, 1, 2, s, small)),
        Box::new(move |s| check_classical_crofton(3, 2, 0, &ball(3), small, s)),
        Box::new(move |s| check_classical_crofton(3, 2, 2, &ball(3), small, s)),
        Box::new(move |s| check_classical_crofton(3, 0, 0, &ball(3), small, s)),
        Box::new(move |s| check_bp_linear(4, 1, 1, 3, s, budget)),
        Box::new(move |s| check_bp_linear(3, 0, 1, 2, s, budget)),
        Box::new(move |s| check_bp_linear(4, 1, 1, 4, s, budget)),
        Box::new(move |s| check_bp_affine(3, 1, 1, 2, s, budget)),
        Box::new(move |s| check_bp_affine(4, 2, 1, 3, s, budget)),
        Box::new(move |s| check_bp_affine(3, 1, 1, 3, s, budget)),
        Box::new(move |s| check_uniqueness_q(4, 3, 0, 0, &ball(4), 10, 4000, s)),
        Box::new(move |s| check_uniqueness_q(4, 3, 0, 1, &cube4, 10, 4000, s)),
        Box::new(move |s| check_uniqueness_q(5, 4, 1, 0, &ball(5), 10, 4000, s)),
        Box::new(move |s| check_uniqueness_q_affine(3, 2, 1, 0, &ball(3), 10, 4000, s)),
        Box::new(move |s| check_uniqueness_q_affine(4, 3, 1, 0, &ball(4), 10, 4000, s)),
        Box::new(move |s| check_uniqueness_q_affine(4, 3, 1, 1, &ball(4), 10, 4000, s)),
        Box::new(|s| impossibility_demo(3, 2, 1, 0, s, 1000)),
        Box::new(|s| impossibility_demo(3, 2, 1, 2, s, 1000)),
        Box::new(|s| impossibility_demo(4, 3, 1, 1, s, 1000)),
    ]
}

/// Runs every check concurrently; job `i` uses seed substream `i` of `seed`.
/// `budget` scales the statistical checks.
pub fn default_battery(seed: u64, budget: u64) -> Result<Vec<CheckReport>> {
    let root = RngStream::new(seed);
    let jobs = battery_jobs(budget);
    jobs.par_iter()
        .enumerate()
        .map(|(i, job)| {
            let s = derived_seed(&root, i as u64);
            job(s)
        })
        .collect()
}

/// A child seed for job `index`, stable in the job index.
pub fn derived_seed(root: &RngStream, index: u64) -> u64 {
    use rand::RngCore;
    root.substream(index).next_u64()
}
