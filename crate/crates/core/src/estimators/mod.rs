//! Unbiased nested Monte Carlo estimators of intrinsic volumes from sections
//! through (rotational design) or parallel to (vertical design) a fixed
//! subspace `L0`.
//!
//! One outer replicate draws `L` from the invariant measure on `G(L0, k)`
//! (and, in the vertical design, a translation `x ∈ L⊥`) and averages
//! `inner_samples` draws of the measurement function on `K ∩ L`. Reported
//! standard errors come from outer replicates only.

mod stats;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use stats::{merge_estimates, Accumulator, Estimate};

use crate::bodies::{section_intrinsic_volume, ConvexBody};
use crate::constants::{c0_const, d_const, kappa, omega, sphere_projection_moment};
use crate::error::{Error, Result};
use crate::geometry::{
    d_weight, sample_grassmannian_containing, sample_grassmannian_within, sample_hitting_flat,
    sample_translate_in_complement, subspace_det, uniform_in_ball, uniform_on_sphere, Flat, RngStream, Subspace,
    Vector,
};

/// Outer samples per parallel chunk. Chunk `i` always draws from substream `i`
/// of the root stream, so results do not depend on the thread count.
pub const CHUNK: u64 = 1000;
/// Default inner sample count per outer replicate.
pub const DEFAULT_INNER: u64 = 64;
pub const DEFAULT_OUTER: u64 = 10_000;
/// Absolute tolerance of the radial-function bisection.
pub const RADIAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Design {
    /// Sections by linear `k`-subspaces containing `L0`.
    Rotational,
    /// Sections by affine `k`-flats parallel to some `L ⊇ L0`.
    Vertical,
}

impl FromStr for Design {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rotational" => Ok(Design::Rotational),
            "vertical" => Ok(Design::Vertical),
            other => Err(format!("unknown design `{other}` (expected rotational or vertical)")),
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Design::Rotational => "rotational",
            Design::Vertical => "vertical",
        })
    }
}

/// Which representation of the rotational measurement function to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Flats `E ⊂ L` with weight `D(E, L0)^{n-k}`.
    Generic,
    /// `j = 0`: weighted volume of `K ∩ L`.
    Volume,
    /// `q = j`: weighted projections onto `M⊥ ∩ L`.
    Projection,
    /// `j = 0`, `o ∈ K`: radial function on the unit sphere of `L`.
    Radial,
}

impl FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "generic" => Ok(Route::Generic),
            "volume" => Ok(Route::Volume),
            "projection" => Ok(Route::Projection),
            "radial" => Ok(Route::Radial),
            other => Err(format!("unknown route `{other}` (expected generic, volume, projection or radial)")),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Generic => "generic",
            Route::Volume => "volume",
            Route::Projection => "projection",
            Route::Radial => "radial",
        })
    }
}

/// Ambient dimension `n`, section dimension `k`, `dim L0 = r`, target
/// `V_{n-j}` and flat dimension `q` of the inner integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Indices {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub j: usize,
    pub q: usize,
}

impl Indices {
    pub fn new(n: usize, k: usize, r: usize, j: usize, q: usize) -> Self {
        Indices { n, k, r, j, q }
    }

    /// Checks the admissible index ranges of the design. The error names the
    /// violated inequality.
    pub fn validate(&self, design: Design) -> Result<()> {
        let Indices { n, k, r, j, q } = *self;
        if n < 3 {
            return Err(Error::domain(format!("ambient dimension must satisfy n >= 3, got n = {n}")));
        }
        if n > 16 {
            return Err(Error::domain(format!("ambient dimension must satisfy n <= 16, got n = {n}")));
        }
        if k < r + 1 || k > n {
            return Err(Error::domain(format!(
                "section dimension must satisfy r+1 <= k <= n, got k = {k}, r = {r}, n = {n}"
            )));
        }
        let top = match design {
            Design::Rotational => k - (r + 1),
            Design::Vertical => k - r,
        };
        let bound = match design {
            Design::Rotational => "k-(r+1)",
            Design::Vertical => "k-r",
        };
        if j > top {
            return Err(Error::domain(format!(
                "{design} design requires j <= {bound} = {top}, got j = {j}"
            )));
        }
        if q < j || q > top {
            return Err(Error::domain(format!(
                "{design} design requires j <= q <= {bound}, got j = {j}, q = {q}, {bound} = {top}"
            )));
        }
        Ok(())
    }

    /// Order `n - j` of the estimated intrinsic volume.
    pub fn target_order(&self) -> usize {
        self.n - self.j
    }
}

/// The last `r` coordinate axes of `R^n`.
pub fn default_l0(n: usize, r: usize) -> Subspace {
    let axes: Vec<usize> = (n.saturating_sub(r)..n).collect();
    Subspace::coordinate(n, &axes)
}

#[derive(Clone, Debug)]
pub struct EstimatorSpec {
    pub indices: Indices,
    pub body: ConvexBody,
    pub l0: Subspace,
    pub outer_samples: u64,
    pub inner_samples: u64,
    pub reference_radius: f64,
    pub seed: u64,
}

impl EstimatorSpec {
    /// Spec with default budgets and reference radius `circumradius·(1+1e-9)`.
    pub fn new(indices: Indices, body: ConvexBody, l0: Subspace) -> Self {
        let reference_radius = default_reference_radius(&body);
        EstimatorSpec {
            indices,
            body,
            l0,
            outer_samples: DEFAULT_OUTER,
            inner_samples: DEFAULT_INNER,
            reference_radius,
            seed: 0,
        }
    }

    pub fn with_outer(mut self, outer: u64) -> Self {
        self.outer_samples = outer;
        self
    }

    pub fn with_inner(mut self, inner: u64) -> Self {
        self.inner_samples = inner;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_reference_radius(mut self, radius: f64) -> Self {
        self.reference_radius = radius;
        self
    }

    pub fn validate(&self, design: Design) -> Result<()> {
        self.indices.validate(design)?;
        let Indices { n, r, .. } = self.indices;
        if self.l0.ambient_dim() != n || self.l0.dim() != r {
            return Err(Error::domain(format!(
                "fixed subspace must have dim L0 = r = {r} in R^{n}, got dim {} in R^{}",
                self.l0.dim(),
                self.l0.ambient_dim()
            )));
        }
        if self.body.dim() != n {
            return Err(Error::domain(format!("body lives in R^{} but n = {n}", self.body.dim())));
        }
        if self.outer_samples == 0 || self.inner_samples == 0 {
            return Err(Error::domain("sample counts must be positive"));
        }
        if !(self.reference_radius >= self.body.circumradius()) {
            return Err(Error::domain(format!(
                "reference radius {} is below the circumradius {}",
                self.reference_radius,
                self.body.circumradius()
            )));
        }
        Ok(())
    }
}

pub fn default_reference_radius(body: &ConvexBody) -> f64 {
    body.circumradius() * (1.0 + 1e-9)
}

fn check_section_space(spec: &EstimatorSpec, l: &Subspace) -> Result<()> {
    if l.dim() != spec.indices.k || l.ambient_dim() != spec.indices.n || !l.contains_subspace(&spec.l0) {
        return Err(Error::domain("section space must be a k-subspace containing L0"));
    }
    Ok(())
}

/// `x^{n-k}`, never evaluating `x` when the exponent vanishes.
fn weight_power(n: usize, k: usize, x: impl FnOnce() -> Result<f64>) -> Result<f64> {
    if n == k {
        Ok(1.0)
    } else {
        Ok(x()?.powi((n - k) as i32))
    }
}

fn inner_loop(spec: &EstimatorSpec, rng: &mut RngStream, mut f: impl FnMut(&mut RngStream) -> Result<f64>) -> Result<Estimate> {
    let mut acc = Accumulator::new();
    for _ in 0..spec.inner_samples {
        acc.push(f(rng)?);
    }
    Ok(acc.estimate(spec.seed))
}

/// Inner integral of the rotational measurement function over flats
/// `E ∈ A(L, q)` hitting the reference ball:
/// `c0 · V_{q-j}(K ∩ E) · D(E, L0)^{n-k}` times the hitting weight.
pub fn measurement_phi(spec: &EstimatorSpec, l: &Subspace, rng: &mut RngStream) -> Result<Estimate> {
    spec.indices.validate(Design::Rotational)?;
    check_section_space(spec, l)?;
    let Indices { n, k, r, j, q } = spec.indices;
    let c0 = c0_const(n, k, q, r, j)?;
    inner_loop(spec, rng, |rng| {
        let (e, w) = sample_hitting_flat(l, q, spec.reference_radius, rng)?;
        let section = spec.body.section(&e);
        if section.is_none() {
            return Ok(0.0);
        }
        let v = section_intrinsic_volume(section.as_ref(), q - j, rng)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(c0 * v * weight_power(n, k, || d_weight(&e, &spec.l0))? * w)
    })
}

/// Bounding box of `K ∩ L` in the frame coordinates of `L`, from support
/// values in the `2k` frame directions.
fn bounding_box_in(body: &ConvexBody, l: &Subspace) -> Result<Vec<(f64, f64)>> {
    l.basis()
        .iter()
        .map(|f| Ok((-body.support(&-f)?, body.support(f)?)))
        .collect()
}

/// `j = 0` form: `(ω_{n-r}/ω_{k-r}) ∫_{K∩L} d(x, L0)^{n-k} dx` by uniform
/// sampling in a bounding box of `K ∩ L`.
pub fn measurement_phi_volume(spec: &EstimatorSpec, l: &Subspace, rng: &mut RngStream) -> Result<Estimate> {
    spec.indices.validate(Design::Rotational)?;
    check_section_space(spec, l)?;
    let Indices { n, k, r, j, .. } = spec.indices;
    if j != 0 {
        return Err(Error::domain(format!("volume form requires j = 0, got j = {j}")));
    }
    let prefactor = omega(n - r)? / omega(k - r)?;
    let bbox = bounding_box_in(&spec.body, l)?;
    let box_volume: f64 = bbox.iter().map(|(lo, hi)| (hi - lo).max(0.0)).product();
    if box_volume == 0.0 {
        return Ok(Estimate { mean: 0.0, stderr: 0.0, count: spec.inner_samples, seed: spec.seed });
    }
    inner_loop(spec, rng, |rng| {
        let t = Vector::from_iterator(k, bbox.iter().map(|(lo, hi)| rng.uniform_range(*lo, *hi)));
        let x = l.embed(&t);
        if !spec.body.membership(&x) {
            return Ok(0.0);
        }
        Ok(prefactor * weight_power(n, k, || Ok(spec.l0.distance(&x)))? * box_volume)
    })
}

/// `q = j` form: `M ~ ν_j^L`, `z` uniform in a disk of `M⊥ ∩ L` covering the
/// projection of `K ∩ L`, integrand
/// `c0 · [M, L0]^{n-k} · 1{K ∩ (M+z) ≠ ∅} · d(z, M+L0)^{n-k}`.
pub fn measurement_phi_projection(spec: &EstimatorSpec, l: &Subspace, rng: &mut RngStream) -> Result<Estimate> {
    spec.indices.validate(Design::Rotational)?;
    check_section_space(spec, l)?;
    let Indices { n, k, r, j, q } = spec.indices;
    if q != j {
        return Err(Error::domain(format!("projection form requires q = j, got q = {q}, j = {j}")));
    }
    let c0 = c0_const(n, k, j, r, j)?;
    let (center, radius) = spec.body.bounding_ball();
    let disk_weight = kappa(k - j) * radius.powi((k - j) as i32);
    inner_loop(spec, rng, |rng| {
        let m = sample_grassmannian_within(l, j, rng)?;
        let w = m.complement_within(l);
        let z = w.project(&center) + uniform_in_ball(&w, radius, rng);
        let flat = Flat::new(m.clone(), &z);
        if spec.body.section(&flat).is_none() {
            return Ok(0.0);
        }
        let weight = weight_power(n, k, || Ok(subspace_det(&m, &spec.l0)? * m.sum(&spec.l0).distance(&z)))?;
        Ok(c0 * weight * disk_weight)
    })
}

/// Radial function `ρ_K(u)` by bisection on the membership oracle.
pub fn radial_function(body: &ConvexBody, u: &Vector) -> f64 {
    let mut lo = 0.0;
    let mut hi = body.circumradius() * (1.0 + 1e-9) + 1e-12;
    while hi - lo > RADIAL_TOL {
        let mid = 0.5 * (lo + hi);
        if body.membership(&(u * mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Radial form for `j = 0`, `o ∈ K`:
/// `(ω_{n-r}/(n ω_{k-r})) ω_k E_u[d(u, L0)^{n-k} ρ_K(u)^n]` with `u` uniform on
/// the unit sphere of `L`.
pub fn measurement_phi_radial(spec: &EstimatorSpec, l: &Subspace, rng: &mut RngStream) -> Result<Estimate> {
    spec.indices.validate(Design::Rotational)?;
    check_section_space(spec, l)?;
    let Indices { n, k, r, j, .. } = spec.indices;
    if j != 0 {
        return Err(Error::domain(format!("radial form requires j = 0, got j = {j}")));
    }
    if !spec.body.membership(&Vector::zeros(n)) {
        return Err(Error::Precondition("radial form requires the origin to lie in K".into()));
    }
    let prefactor = omega(n - r)? / (n as f64 * omega(k - r)?) * omega(k)?;
    inner_loop(spec, rng, |rng| {
        let u = uniform_on_sphere(l, rng);
        let rho = radial_function(&spec.body, &u);
        Ok(prefactor * weight_power(n, k, || Ok(spec.l0.distance(&u)))? * rho.powi(n as i32))
    })
}

/// Radial form evaluated in closed form for a ball of the given radius
/// centred at the origin, through the sphere projection moment.
pub fn radial_phi_ball(n: usize, k: usize, r: usize, radius: f64) -> Result<f64> {
    Indices::new(n, k, r, 0, 0).validate(Design::Rotational)?;
    let prefactor = omega(n - r)? / (n as f64 * omega(k - r)?);
    Ok(prefactor * sphere_projection_moment(k, n - k, k - r)? * radius.powi(n as i32))
}

/// Inner integral of the vertical-sections measurement function on the flat
/// `L + x`, weighting flats by `[lin E, L0]^{n-k}`.
pub fn vertical_measurement_tilde(
    spec: &EstimatorSpec,
    l: &Subspace,
    x: &Vector,
    rng: &mut RngStream,
) -> Result<Estimate> {
    spec.indices.validate(Design::Vertical)?;
    check_section_space(spec, l)?;
    let Indices { n, k, r, j, q } = spec.indices;
    if l.project(x).norm() > 1e-9 * x.norm().max(1.0) {
        return Err(Error::domain("translation must lie in the orthogonal complement of L"));
    }
    let d = d_const(n, k, r, j, q)?;
    let big_r = spec.reference_radius;
    // Flats in L + x meet the reference ball iff their trace in L meets the
    // ball of radius sqrt(R^2 - |x|^2).
    let rx2 = big_r * big_r - x.norm_squared();
    if rx2 <= 0.0 {
        return Ok(Estimate { mean: 0.0, stderr: 0.0, count: spec.inner_samples, seed: spec.seed });
    }
    let rx = rx2.sqrt();
    inner_loop(spec, rng, |rng| {
        let (e0, w) = sample_hitting_flat(l, q, rx, rng)?;
        let e = Flat::new(e0.direction().clone(), &(e0.offset() + x));
        let section = spec.body.section(&e);
        if section.is_none() {
            return Ok(0.0);
        }
        let v = section_intrinsic_volume(section.as_ref(), q - j, rng)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(d * v * weight_power(n, k, || subspace_det(e.direction(), &spec.l0))? * w)
    })
}

/// Rejects route/design/index combinations the route cannot sample.
pub fn check_route(spec: &EstimatorSpec, design: Design, route: Route) -> Result<()> {
    spec.validate(design)?;
    let Indices { j, q, .. } = spec.indices;
    match (design, route) {
        (Design::Vertical, Route::Generic) | (Design::Rotational, Route::Generic) => Ok(()),
        (Design::Vertical, other) => Err(Error::domain(format!("route `{other}` exists only for the rotational design"))),
        (_, Route::Volume) | (_, Route::Radial) if j != 0 => {
            Err(Error::domain(format!("route `{route}` requires j = 0, got j = {j}")))
        }
        (_, Route::Projection) if q != j => {
            Err(Error::domain(format!("route `projection` requires q = j, got q = {q}, j = {j}")))
        }
        (_, Route::Radial) if !spec.body.membership(&Vector::zeros(spec.indices.n)) => {
            Err(Error::Precondition("radial form requires the origin to lie in K".into()))
        }
        _ => Ok(()),
    }
}

/// One outer replicate: draw the section space and average the inner
/// measurement.
pub fn outer_sample(spec: &EstimatorSpec, design: Design, route: Route, rng: &mut RngStream) -> Result<f64> {
    let Indices { n, k, .. } = spec.indices;
    let l = sample_grassmannian_containing(&spec.l0, k, rng)?;
    match design {
        Design::Rotational => {
            let est = match route {
                Route::Generic => measurement_phi(spec, &l, rng)?,
                Route::Volume => measurement_phi_volume(spec, &l, rng)?,
                Route::Projection => measurement_phi_projection(spec, &l, rng)?,
                Route::Radial => measurement_phi_radial(spec, &l, rng)?,
            };
            Ok(est.mean)
        }
        Design::Vertical => {
            let (x, wx) = if k == n {
                (Vector::zeros(n), 1.0)
            } else {
                sample_translate_in_complement(&l, spec.reference_radius, rng)?
            };
            Ok(vertical_measurement_tilde(spec, &l, &x, rng)?.mean * wx)
        }
    }
}

/// Runs `total` draws of `f` in chunks of [`CHUNK`], chunk `i` on substream
/// `i` of `root`, and returns the per-chunk accumulators in chunk order.
pub fn chunked<F>(total: u64, root: &RngStream, f: F) -> Result<Vec<Accumulator>>
where
    F: Fn(&mut RngStream) -> Result<f64> + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = root.substream(i);
            let len = CHUNK.min(total - i * CHUNK);
            let mut acc = Accumulator::new();
            for _ in 0..len {
                acc.push(f(&mut rng)?);
            }
            Ok(acc)
        })
        .collect()
}

/// Merges accumulators in order.
pub fn merge_accumulators(parts: &[Accumulator]) -> Accumulator {
    parts.iter().fold(Accumulator::new(), |mut acc, p| {
        acc.merge(p);
        acc
    })
}

/// Per-chunk accumulators of the outer replicates; prefixes of the list are
/// estimates at smaller budgets.
pub fn outer_accumulators(spec: &EstimatorSpec, design: Design, route: Route) -> Result<Vec<Accumulator>> {
    check_route(spec, design, route)?;
    let root = RngStream::new(spec.seed);
    chunked(spec.outer_samples, &root, |rng| outer_sample(spec, design, route, rng))
}

pub fn estimate(spec: &EstimatorSpec, design: Design, route: Route) -> Result<Estimate> {
    let parts = outer_accumulators(spec, design, route)?;
    Ok(merge_accumulators(&parts).estimate(spec.seed))
}

/// Estimate of `V_{n-j}(K)` from sections by `k`-subspaces containing `L0`.
pub fn rotational_crofton_estimate(spec: &EstimatorSpec) -> Result<Estimate> {
    estimate(spec, Design::Rotational, Route::Generic)
}

/// Estimate of `V_{n-j}(K)` from sections by `k`-flats parallel to `L ⊇ L0`.
pub fn vertical_sections_estimate(spec: &EstimatorSpec) -> Result<Estimate> {
    estimate(spec, Design::Vertical, Route::Generic)
}
