//! Acceptance criteria A1 to A10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Seeds and tolerances are fixed below.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use crofton::bodies::ConvexBody;
use crofton::constants::kappa;
use crofton::estimators::{
    default_l0, measurement_phi_radial, rotational_crofton_estimate, vertical_sections_estimate, Estimate,
    EstimatorSpec, Indices,
};
use crofton::geometry::{sample_grassmannian_containing, RngStream, Vector};
use crofton::verify::{
    check_bp_affine, check_bp_linear, check_constant_identities, check_lemma_d, check_sphere_identities,
    check_uniqueness_q, impossibility_demo, CheckReport,
};
use crofton::Result;

const Z_MAX: f64 = 4.0;
const OUTER: u64 = 100_000;
const BP_SAMPLES: u64 = 1_000_000;
const A1_TIME_LIMIT: Duration = Duration::from_secs(60);

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn ball_spec(n: usize, k: usize, r: usize, j: usize, q: usize, seed: u64) -> EstimatorSpec {
    EstimatorSpec::new(Indices::new(n, k, r, j, q), ConvexBody::unit_ball(n), default_l0(n, r))
        .with_outer(OUTER)
        .with_seed(seed)
}

fn against(label: &str, e: &Estimate, exact: f64) -> (bool, String) {
    let z = e.z(exact);
    (z.abs() <= Z_MAX, format!("{label}: {:.6} ± {:.2e} vs {exact:.6}, z = {z:+.2}", e.mean, e.stderr))
}

fn combine(parts: Vec<(bool, String)>) -> Outcome {
    Outcome { passed: parts.iter().all(|p| p.0), detail: parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("; ") }
}

fn reports(reps: Vec<CheckReport>) -> Outcome {
    combine(reps.into_iter().map(|r| (r.passed, r.to_string())).collect())
}

fn a1() -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    let start = Instant::now();
    let e = pool.install(|| rotational_crofton_estimate(&ball_spec(3, 2, 1, 0, 0, 101)))?;
    let elapsed = start.elapsed();
    let (ok, text) = against("V_3(B^3)", &e, 4.0 * PI / 3.0);
    Ok(Outcome {
        passed: ok && elapsed < A1_TIME_LIMIT,
        detail: format!("{text}, {:.1}s on one thread (limit {}s)", elapsed.as_secs_f64(), A1_TIME_LIMIT.as_secs()),
    })
}

fn a2() -> Result<Outcome> {
    let mut parts = Vec::new();
    for (n, k, r) in [(3, 2, 1), (4, 3, 1), (5, 3, 2)] {
        let spec = ball_spec(n, k, r, 0, 0, 102).with_inner(1000);
        let root = RngStream::new(102).substream(n as u64 * 100 + k as u64 * 10 + r as u64);
        let mut worst: f64 = 0.0;
        let mut all = true;
        for d in 0..50 {
            let mut rng = root.substream(d);
            let l = sample_grassmannian_containing(&spec.l0, k, &mut rng)?;
            let e = measurement_phi_radial(&spec, &l, &mut rng)?;
            let z = e.z(kappa(n));
            worst = worst.max(z.abs());
            all &= z.abs() <= Z_MAX;
        }
        parts.push((all, format!("(n,k,r)=({n},{k},{r}) 50 draws, worst |z| = {worst:.2}")));
    }
    Ok(combine(parts))
}

fn a3() -> Result<Outcome> {
    let nucleator = rotational_crofton_estimate(&ball_spec(3, 1, 0, 0, 0, 103))?;
    let surfactor = rotational_crofton_estimate(&ball_spec(3, 2, 0, 1, 1, 103))?;
    Ok(combine(vec![against("nucleator V_3", &nucleator, kappa(3)), against("surfactor V_2", &surfactor, 2.0 * PI)]))
}

fn a4() -> Result<Outcome> {
    let e = rotational_crofton_estimate(&ball_spec(4, 3, 1, 1, 1, 104))?;
    Ok(combine(vec![against("V_3(B^4)", &e, PI * PI)]))
}

fn a5() -> Result<Outcome> {
    let lower = Vector::from_column_slice(&[-0.3, -0.45, -0.6]);
    let upper = lower.add_scalar(1.0);
    let spec = EstimatorSpec::new(Indices::new(3, 2, 1, 0, 0), ConvexBody::cuboid(lower, upper)?, default_l0(3, 1))
        .with_outer(OUTER)
        .with_seed(105);
    let e = rotational_crofton_estimate(&spec)?;
    Ok(combine(vec![against("V_3(cube)", &e, 1.0)]))
}

fn a6() -> Result<Outcome> {
    Ok(reports(vec![
        check_bp_linear(4, 1, 1, 3, 106, BP_SAMPLES)?,
        check_bp_linear(3, 0, 1, 2, 106, BP_SAMPLES)?,
        check_bp_affine(3, 1, 1, 2, 106, BP_SAMPLES)?,
        check_bp_affine(4, 2, 1, 3, 106, BP_SAMPLES)?,
    ]))
}

fn a7() -> Result<Outcome> {
    let v2 = vertical_sections_estimate(&ball_spec(3, 2, 1, 1, 1, 107))?;
    let q0 = vertical_sections_estimate(&ball_spec(3, 2, 1, 0, 0, 107))?;
    let q1 = vertical_sections_estimate(&ball_spec(3, 2, 1, 0, 1, 107))?;
    Ok(combine(vec![
        against("V_2 (j=q=1)", &v2, 2.0 * PI),
        against("V_3 (q=0)", &q0, kappa(3)),
        against("V_3 (q=1)", &q1, kappa(3)),
    ]))
}

fn a8() -> Result<Outcome> {
    Ok(reports(vec![
        check_uniqueness_q(4, 3, 0, 0, &ConvexBody::unit_ball(4), 10, 4000, 108)?,
        check_uniqueness_q(5, 4, 1, 0, &ConvexBody::unit_ball(5), 10, 4000, 108)?,
    ]))
}

fn a9() -> Result<Outcome> {
    Ok(reports(vec![
        impossibility_demo(3, 2, 1, 2, 109, 1000)?,
        impossibility_demo(4, 3, 1, 1, 109, 1000)?,
        impossibility_demo(3, 2, 1, 0, 109, 1000)?,
    ]))
}

fn a10() -> Result<Outcome> {
    Ok(reports(vec![
        check_lemma_d(5, 2, 1, 200, 110)?,
        check_lemma_d(4, 1, 1, 200, 110)?,
        check_lemma_d(5, 1, 2, 200, 110)?,
        check_constant_identities(10)?,
        check_sphere_identities(3, 110, 100_000)?,
        check_sphere_identities(4, 110, 100_000)?,
        check_sphere_identities(5, 110, 100_000)?,
    ]))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("A1 vertical rotator on the unit ball", a1),
        ("A2 radial form equals kappa_n per section", a2),
        ("A3 nucleator and surfactor", a3),
        ("A4 V_3 of the 4-ball", a4),
        ("A5 unit cube volume", a5),
        ("A6 decomposition identities", a6),
        ("A7 vertical sections", a7),
        ("A8 independence of q", a8),
        ("A9 sections cannot determine low-order volumes", a9),
        ("A10 deterministic kernels", a10),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        if !outcome.passed {
            failed += 1;
        }
        println!(
            "{} {name} [{:.1}s]: {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
