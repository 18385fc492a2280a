//! Experiment configs, execution and CSV tables.
//!
//! A config is a flat TOML document. Keys:
//!
//! | key | type | used by |
//! |-----|------|---------|
//! | `mode` | `"estimate"`, `"verify"` or `"convergence"` | all |
//! | `id` | string, default `"experiment"` | all |
//! | `seed` | integer, default 0 | all |
//! | `out` | path of the CSV table | all |
//! | `budget` | samples per statistical check, default 10^6 | verify |
//! | `design` | `"rotational"` (default) or `"vertical"` | estimate, convergence |
//! | `route` | `"generic"` (default), `"volume"`, `"projection"`, `"radial"` | estimate, convergence |
//! | `n`, `k`, `r`, `j`, `q` | integers | estimate, convergence |
//! | `body` | `"ball"`, `"box"` or `"polytope"` | estimate, convergence |
//! | `center`, `radius` | vector, number (ball; default origin and 1) | |
//! | `lower`, `upper` | vectors (box) | |
//! | `normals`, `offsets` | list of vectors, vector (polytope `<u_i, x> <= b_i`) | |
//! | `l0` | list of `r` basis vectors, default the last `r` axes | |
//! | `outer_samples`, `inner_samples` | integers | |
//! | `reference_radius` | number, at least the circumradius | |
//!
//! In convergence mode `outer_samples` is the largest budget; rows are
//! emitted at 10^3, 10^4, ... and at the budget itself.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Deserialize;

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::estimators::{
    check_route, default_l0, default_reference_radius, merge_accumulators, outer_accumulators, Design, EstimatorSpec,
    Indices, Route, CHUNK,
};
use crate::geometry::{Subspace, Vector};
use crate::verify::{default_battery, Value, DEFAULT_BUDGET};

/// Estimates with a closed-form reference fail beyond this `|z|`.
pub const Z_THRESHOLD: f64 = 4.0;

pub const CSV_HEADER: [&str; 14] = [
    "experiment_id",
    "mode",
    "n",
    "k",
    "r",
    "j",
    "q",
    "body",
    "mean",
    "stderr",
    "exact",
    "z",
    "samples",
    "seconds",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Estimate,
    Verify,
    Convergence,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "estimate" => Ok(Mode::Estimate),
            "verify" => Ok(Mode::Verify),
            "convergence" => Ok(Mode::Convergence),
            other => Err(format!("unknown mode `{other}` (expected estimate, verify or convergence)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Estimate => "estimate",
            Mode::Verify => "verify",
            Mode::Convergence => "convergence",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Job {
    Sections { design: Design, route: Route, spec: Box<EstimatorSpec>, body: String },
    Battery { budget: u64 },
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub id: String,
    pub mode: Mode,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub job: Job,
}

impl ExperimentConfig {
    /// The verification battery with default settings.
    pub fn battery(seed: u64, budget: u64) -> Self {
        ExperimentConfig {
            id: "battery".into(),
            mode: Mode::Verify,
            seed,
            out: None,
            job: Job::Battery { budget },
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let Job::Sections { spec, .. } = &mut self.job {
            spec.seed = seed;
        }
        self
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<String>,
    id: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    budget: Option<u64>,
    design: Option<String>,
    route: Option<String>,
    n: Option<usize>,
    k: Option<usize>,
    r: Option<usize>,
    j: Option<usize>,
    q: Option<usize>,
    body: Option<String>,
    center: Option<Vec<f64>>,
    radius: Option<f64>,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
    normals: Option<Vec<Vec<f64>>>,
    offsets: Option<Vec<f64>>,
    l0: Option<Vec<Vec<f64>>>,
    outer_samples: Option<u64>,
    inner_samples: Option<u64>,
    reference_radius: Option<f64>,
}

fn required<T>(value: Option<T>, key: &str, mode: Mode) -> Result<T> {
    value.ok_or_else(|| Error::config(key, format!("required for mode = {mode}")))
}

fn vector(values: Vec<f64>, key: &str, n: usize) -> Result<Vector> {
    if values.len() != n {
        return Err(Error::config(key, format!("expected {n} coordinates, got {}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::config(key, "coordinates must be finite"));
    }
    Ok(Vector::from_vec(values))
}

/// Key whose value breaks the index ranges of `design`, in the order the
/// ranges are checked.
fn offending_index(ix: &Indices, design: Design) -> &'static str {
    let Indices { n, k, r, j, q } = *ix;
    if !(3..=16).contains(&n) {
        return "n";
    }
    if k < r + 1 || k > n {
        return "k";
    }
    let top = match design {
        Design::Rotational => k - (r + 1),
        Design::Vertical => k - r,
    };
    if j > top {
        return "j";
    }
    if q < j || q > top {
        return "q";
    }
    "n"
}

fn parse_body(raw: &mut RawConfig, mode: Mode, n: usize) -> Result<(ConvexBody, String)> {
    let tag = required(raw.body.take(), "body", mode)?;
    let stray = |present: bool, key: &str| -> Result<()> {
        if present {
            Err(Error::config(key, format!("not used with body = \"{tag}\"")))
        } else {
            Ok(())
        }
    };
    let body = match tag.as_str() {
        "ball" => {
            stray(raw.lower.is_some(), "lower")?;
            stray(raw.upper.is_some(), "upper")?;
            stray(raw.normals.is_some(), "normals")?;
            stray(raw.offsets.is_some(), "offsets")?;
            let center = match raw.center.take() {
                Some(c) => vector(c, "center", n)?,
                None => Vector::zeros(n),
            };
            let radius = raw.radius.unwrap_or(1.0);
            ConvexBody::ball(center, radius).map_err(|e| Error::config("radius", e.to_string()))?
        }
        "box" => {
            stray(raw.center.is_some(), "center")?;
            stray(raw.radius.is_some(), "radius")?;
            stray(raw.normals.is_some(), "normals")?;
            stray(raw.offsets.is_some(), "offsets")?;
            let lower = vector(required(raw.lower.take(), "lower", mode)?, "lower", n)?;
            let upper = vector(required(raw.upper.take(), "upper", mode)?, "upper", n)?;
            ConvexBody::cuboid(lower, upper).map_err(|e| Error::config("upper", e.to_string()))?
        }
        "polytope" => {
            stray(raw.center.is_some(), "center")?;
            stray(raw.radius.is_some(), "radius")?;
            stray(raw.lower.is_some(), "lower")?;
            stray(raw.upper.is_some(), "upper")?;
            let normals = required(raw.normals.take(), "normals", mode)?
                .into_iter()
                .map(|u| vector(u, "normals", n))
                .collect::<Result<Vec<_>>>()?;
            let offsets = required(raw.offsets.take(), "offsets", mode)?;
            if offsets.len() != normals.len() {
                return Err(Error::config(
                    "offsets",
                    format!("expected one offset per normal ({}), got {}", normals.len(), offsets.len()),
                ));
            }
            ConvexBody::polytope(normals, offsets).map_err(|e| Error::config("normals", e.to_string()))?
        }
        other => {
            return Err(Error::config("body", format!("unknown body `{other}` (expected ball, box or polytope)")));
        }
    };
    Ok((body, tag))
}

fn parse_l0(raw: Option<Vec<Vec<f64>>>, n: usize, r: usize) -> Result<Subspace> {
    let Some(rows) = raw else {
        return Ok(default_l0(n, r));
    };
    if rows.len() != r {
        return Err(Error::config("l0", format!("expected r = {r} basis vectors, got {}", rows.len())));
    }
    let vectors = rows.into_iter().map(|v| vector(v, "l0", n)).collect::<Result<Vec<_>>>()?;
    let l0 = Subspace::span(n, &vectors);
    if l0.dim() != r {
        return Err(Error::config("l0", "basis vectors must be linearly independent"));
    }
    Ok(l0)
}

/// Parses and validates a config document; `mode` is the key's value.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_as(text, None)
}

/// Like [`parse_config`], with the mode fixed by the caller. A `mode` key
/// in the document must then agree with it.
pub fn parse_config_as(text: &str, mode: Option<Mode>) -> Result<ExperimentConfig> {
    let mut raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let declared = raw
        .mode
        .take()
        .map(|m| m.parse::<Mode>().map_err(|e| Error::config("mode", e)))
        .transpose()?;
    let mode = match (declared, mode) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::config("mode", format!("config declares mode = {a} but {b} was requested")));
        }
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => return Err(Error::config("mode", "missing")),
    };
    let id = raw.id.take().unwrap_or_else(|| "experiment".into());
    if id.is_empty() {
        return Err(Error::config("id", "must be nonempty"));
    }
    let seed = raw.seed.unwrap_or(0);
    let out = raw.out.take();

    if mode == Mode::Verify {
        let used = [
            ("design", raw.design.is_some()),
            ("route", raw.route.is_some()),
            ("n", raw.n.is_some()),
            ("k", raw.k.is_some()),
            ("r", raw.r.is_some()),
            ("j", raw.j.is_some()),
            ("q", raw.q.is_some()),
            ("body", raw.body.is_some()),
            ("l0", raw.l0.is_some()),
            ("outer_samples", raw.outer_samples.is_some()),
            ("inner_samples", raw.inner_samples.is_some()),
            ("reference_radius", raw.reference_radius.is_some()),
        ];
        if let Some((key, _)) = used.iter().find(|(_, present)| *present) {
            return Err(Error::config(*key, "not used with mode = verify"));
        }
        let budget = raw.budget.unwrap_or(DEFAULT_BUDGET);
        if budget == 0 {
            return Err(Error::config("budget", "must be positive"));
        }
        return Ok(ExperimentConfig { id, mode, seed, out, job: Job::Battery { budget } });
    }

    if raw.budget.is_some() {
        return Err(Error::config("budget", format!("not used with mode = {mode}; set outer_samples")));
    }
    let design = match raw.design.take() {
        Some(d) => d.parse::<Design>().map_err(|e| Error::config("design", e))?,
        None => Design::Rotational,
    };
    let route = match raw.route.take() {
        Some(r) => r.parse::<Route>().map_err(|e| Error::config("route", e))?,
        None => Route::Generic,
    };
    let indices = Indices::new(
        required(raw.n, "n", mode)?,
        required(raw.k, "k", mode)?,
        required(raw.r, "r", mode)?,
        required(raw.j, "j", mode)?,
        required(raw.q, "q", mode)?,
    );
    if let Err(e) = indices.validate(design) {
        let message = match e {
            Error::Domain(m) => format!("{m} (mode = {mode}, design = {design})"),
            other => other.to_string(),
        };
        return Err(Error::config(offending_index(&indices, design), message));
    }
    let n = indices.n;
    let (body, tag) = parse_body(&mut raw, mode, n)?;
    let l0 = parse_l0(raw.l0.take(), n, indices.r)?;
    let mut spec = EstimatorSpec::new(indices, body, l0).with_seed(seed);
    if let Some(outer) = raw.outer_samples {
        if outer == 0 {
            return Err(Error::config("outer_samples", "must be positive"));
        }
        spec = spec.with_outer(outer);
    }
    if let Some(inner) = raw.inner_samples {
        if inner == 0 {
            return Err(Error::config("inner_samples", "must be positive"));
        }
        spec = spec.with_inner(inner);
    }
    if let Some(radius) = raw.reference_radius {
        let least = default_reference_radius(&spec.body);
        if !(radius.is_finite() && radius >= spec.body.circumradius()) {
            return Err(Error::config(
                "reference_radius",
                format!("must be a finite number at least the circumradius, e.g. {least}"),
            ));
        }
        spec = spec.with_reference_radius(radius);
    }
    check_route(&spec, design, route).map_err(|e| Error::config("route", e.to_string()))?;
    Ok(ExperimentConfig { id, mode, seed, out, job: Job::Sections { design, route, spec: Box::new(spec), body: tag } })
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// One output line. Verify rows put the check name in `experiment_id` and
/// leave the index columns empty.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment_id: String,
    pub mode: Mode,
    pub indices: Option<Indices>,
    pub body: String,
    pub mean: f64,
    pub stderr: f64,
    pub exact: Option<f64>,
    pub z: Option<f64>,
    pub samples: u64,
    pub seconds: f64,
    /// Not written to CSV; decides the exit status.
    pub passed: bool,
}

fn section_rows(config: &ExperimentConfig, design: Design, route: Route, spec: &EstimatorSpec, body: &str) -> Result<Vec<ResultRow>> {
    let start = Instant::now();
    let parts = outer_accumulators(spec, design, route)?;
    let seconds = start.elapsed().as_secs_f64();
    let exact = spec.body.exact_intrinsic_volume(spec.indices.target_order()).ok();
    let total = spec.outer_samples;
    let checkpoints: Vec<u64> = match config.mode {
        Mode::Convergence => {
            let mut points: Vec<u64> =
                std::iter::successors(Some(1000u64), |p| p.checked_mul(10)).take_while(|&p| p < total).collect();
            points.push(total);
            points
        }
        _ => vec![total],
    };
    Ok(checkpoints
        .into_iter()
        .map(|samples| {
            let chunks = samples.div_ceil(CHUNK) as usize;
            let e = merge_accumulators(&parts[..chunks]).estimate(spec.seed);
            let z = exact.map(|x| e.z(x));
            ResultRow {
                experiment_id: config.id.clone(),
                mode: config.mode,
                indices: Some(spec.indices),
                body: body.to_string(),
                mean: e.mean,
                stderr: e.stderr,
                exact,
                z,
                samples: e.count,
                seconds,
                passed: z.is_none_or(|z| z.abs() <= Z_THRESHOLD),
            }
        })
        .collect())
}

fn battery_rows(config: &ExperimentConfig, budget: u64) -> Result<Vec<ResultRow>> {
    let start = Instant::now();
    let reports = default_battery(config.seed, budget)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(reports
        .into_iter()
        .map(|rep| {
            let se = rep.lhs.stderr().hypot(rep.rhs.stderr());
            let (a, b) = (rep.lhs.value(), rep.rhs.value());
            let samples = [rep.lhs, rep.rhs]
                .iter()
                .map(|v| match v {
                    Value::Estimated(e) => e.count,
                    Value::Exact(_) => 0,
                })
                .sum();
            ResultRow {
                experiment_id: format!("{}:{}", config.id, rep.name),
                mode: Mode::Verify,
                indices: None,
                body: String::new(),
                mean: a,
                stderr: se,
                exact: Some(b),
                z: (se > 0.0).then(|| (a - b) / se),
                samples,
                seconds,
                passed: rep.passed,
            }
        })
        .collect())
}

/// Runs the experiment on a pool of `jobs` threads. Output is identical for
/// every `jobs` apart from the `seconds` column.
pub fn run(config: &ExperimentConfig, jobs: usize) -> Result<Vec<ResultRow>> {
    if jobs == 0 {
        return Err(Error::config("jobs", "must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))?;
    pool.install(|| match &config.job {
        Job::Sections { design, route, spec, body } => section_rows(config, *design, *route, spec, body),
        Job::Battery { budget } => battery_rows(config, *budget),
    })
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn record(row: &ResultRow) -> Vec<String> {
    let ix = |f: fn(&Indices) -> usize| row.indices.as_ref().map(|i| f(i).to_string()).unwrap_or_default();
    vec![
        row.experiment_id.clone(),
        row.mode.to_string(),
        ix(|i| i.n),
        ix(|i| i.k),
        ix(|i| i.r),
        ix(|i| i.j),
        ix(|i| i.q),
        row.body.clone(),
        float(row.mean),
        float(row.stderr),
        row.exact.map(float).unwrap_or_default(),
        row.z.map(float).unwrap_or_default(),
        row.samples.to_string(),
        float(row.seconds),
    ]
}

/// Writes the rows under [`CSV_HEADER`]. Floats carry 17 significant digits
/// and parse back to the same bits.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::domain("no rows to write"));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize) -> Result<Option<T>> {
    let s = rec.get(i).unwrap_or("");
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<T>()
        .map(Some)
        .map_err(|_| Error::Parse(format!("column `{}`: cannot parse `{s}`", CSV_HEADER[i])))
}

fn present<T>(value: Option<T>, i: usize) -> Result<T> {
    value.ok_or_else(|| Error::Parse(format!("column `{}` is empty", CSV_HEADER[i])))
}

/// Reads a table written by [`emit_csv`]. `passed` is recomputed from `z`.
pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Parse("unexpected header".into()));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            let mode: Mode = rec.get(1).unwrap_or("").parse().map_err(Error::Parse)?;
            let n: Option<usize> = field(&rec, 2)?;
            let indices = match n {
                Some(n) => Some(Indices::new(
                    n,
                    present(field(&rec, 3)?, 3)?,
                    present(field(&rec, 4)?, 4)?,
                    present(field(&rec, 5)?, 5)?,
                    present(field(&rec, 6)?, 6)?,
                )),
                None => None,
            };
            let z: Option<f64> = field(&rec, 11)?;
            Ok(ResultRow {
                experiment_id: rec.get(0).unwrap_or("").to_string(),
                mode,
                indices,
                body: rec.get(7).unwrap_or("").to_string(),
                mean: present(field(&rec, 8)?, 8)?,
                stderr: present(field(&rec, 9)?, 9)?,
                exact: field(&rec, 10)?,
                z,
                samples: present(field(&rec, 12)?, 12)?,
                seconds: present(field(&rec, 13)?, 13)?,
                passed: z.is_none_or(|z| z.abs() <= Z_THRESHOLD),
            })
        })
        .collect()
}

/// Human-readable table of the rows.
pub fn summary(rows: &[ResultRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let ix = row
            .indices
            .map(|i| format!(" (n,k,r,j,q)=({},{},{},{},{}) {}", i.n, i.k, i.r, i.j, i.q, row.body))
            .unwrap_or_default();
        let exact = row.exact.map(|x| format!(" exact {x:.10}")).unwrap_or_default();
        let z = row.z.map(|z| format!(" z {z:+.2}")).unwrap_or_default();
        out.push_str(&format!(
            "{} {}{}: {:.10} ± {:.3e}{}{} N={} {:.2}s\n",
            if row.passed { "PASS" } else { "FAIL" },
            row.experiment_id,
            ix,
            row.mean,
            row.stderr,
            exact,
            z,
            row.samples,
            row.seconds
        ));
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} rows, {failed} failed\n", rows.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROTATOR: &str = r#"
mode = "estimate"
n = 3
k = 2
r = 1
j = 0
q = 0
body = "ball"
outer_samples = 2000
"#;

    #[test]
    fn parses_rotator() {
        let c = parse_config(ROTATOR).unwrap();
        assert_eq!(c.mode, Mode::Estimate);
        match c.job {
            Job::Sections { design, spec, .. } => {
                assert_eq!(design, Design::Rotational);
                assert_eq!(spec.outer_samples, 2000);
                assert_eq!(spec.l0.dim(), 1);
            }
            Job::Battery { .. } => panic!("expected a sections job"),
        }
    }

    #[test]
    fn names_offending_key() {
        let text = ROTATOR.replace("j = 0", "j = 1").replace("q = 0", "q = 1");
        match parse_config(&text) {
            Err(Error::Config { key, message }) => {
                assert_eq!(key, "j");
                assert!(message.contains("j <= k-(r+1) = 0"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let vertical = format!("{text}design = \"vertical\"\n");
        assert!(parse_config(&vertical).is_ok());
    }

    #[test]
    fn rejects_unknown_and_stray_keys() {
        assert!(matches!(parse_config(&format!("{ROTATOR}colour = 1\n")), Err(Error::Parse(_))));
        match parse_config(&format!("{ROTATOR}lower = [0.0, 0.0, 0.0]\n")) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "lower"),
            other => panic!("unexpected {other:?}"),
        }
        match parse_config(&format!("{ROTATOR}l0 = [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]\n")) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "l0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dependent_l0_rejected() {
        let text = ROTATOR.replace("r = 1", "r = 2").replace("k = 2", "k = 3");
        let bad = format!("{text}l0 = [[1.0, 1.0, 0.0], [2.0, 2.0, 0.0]]\n");
        match parse_config(&bad) {
            Err(Error::Config { key, message }) => {
                assert_eq!(key, "l0");
                assert!(message.contains("independent"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mode_must_agree() {
        assert!(parse_config_as(ROTATOR, Some(Mode::Convergence)).is_err());
        let bare = ROTATOR.replace("mode = \"estimate\"", "");
        assert!(parse_config(&bare).is_err());
        assert_eq!(parse_config_as(&bare, Some(Mode::Convergence)).unwrap().mode, Mode::Convergence);
    }
}
