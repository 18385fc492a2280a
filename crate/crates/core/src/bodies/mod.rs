//! Reference convex bodies: balls, boxes, H-polytopes and oracle-defined
//! bodies, with exact sectioning by flats.

mod polytope;

use std::fmt;
use std::sync::Arc;

pub use polytope::{HPolytope, FEAS_TOL, MAX_EXACT_DIM, MERGE_TOL};

use crate::constants::{ball_intrinsic_volume, kappa};
use crate::error::{Error, Result};
use crate::geometry::{uniform_on_sphere, Flat, Matrix, RngStream, Subspace, Vector};

/// Slack on constraint residuals in membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// Direction samples for the Cauchy–Kubota mean width estimate.
pub const KUBOTA_SAMPLES: usize = 256;
/// Hit-or-miss samples for volumes of oracle-defined sections.
pub const HIT_OR_MISS_SAMPLES: usize = 4096;
/// Probe points used to decide emptiness of an oracle-defined section.
pub const EMPTINESS_PROBES: usize = 2048;

pub type SupportFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
pub type MembershipFn = Arc<dyn Fn(&Vector) -> bool + Send + Sync>;

/// A convex body known through oracles. Sections keep the membership oracle
/// only, since the support function of a section is not determined by the
/// support function of the body in closed form.
#[derive(Clone)]
pub struct SupportBody {
    dim: usize,
    support: Option<SupportFn>,
    membership: MembershipFn,
    center: Vector,
    radius: f64,
}

impl fmt::Debug for SupportBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportBody")
            .field("dim", &self.dim)
            .field("has_support", &self.support.is_some())
            .field("center", &self.center)
            .field("radius", &self.radius)
            .finish()
    }
}

impl SupportBody {
    /// Body with support and membership oracles contained in the ball of
    /// radius `circumradius` about the origin. The support oracle is spot
    /// checked for positive homogeneity and subadditivity.
    pub fn new(
        dim: usize,
        support: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
        membership: impl Fn(&Vector) -> bool + Send + Sync + 'static,
        circumradius: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("oracle body needs dimension >= 1"));
        }
        if !(circumradius > 0.0) || !circumradius.is_finite() {
            return Err(Error::domain("circumradius bound must be positive"));
        }
        let mut rng = RngStream::new(0x5eed_0b0d);
        for i in 0..64 {
            let u = rng.normal_vector(dim);
            let v = rng.normal_vector(dim);
            let (hu, hv, huv) = (support(&u), support(&v), support(&(&u + &v)));
            let scale = 1.0 + hu.abs() + hv.abs();
            if huv > hu + hv + 1e-9 * scale {
                return Err(Error::domain(format!("support oracle is not subadditive on probe pair {i}")));
            }
            if (support(&(&u * 2.5)) - 2.5 * hu).abs() > 1e-9 * scale {
                return Err(Error::domain(format!("support oracle is not positively homogeneous on probe {i}")));
            }
            if hu.abs() > circumradius * u.norm() * (1.0 + 1e-9) {
                return Err(Error::domain("support oracle exceeds the circumradius bound"));
            }
        }
        Ok(SupportBody {
            dim,
            support: Some(Arc::new(support)),
            membership: Arc::new(membership),
            center: Vector::zeros(dim),
            radius: circumradius,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ball `(center, radius)` containing the body.
    pub fn bounding_ball(&self) -> (&Vector, f64) {
        (&self.center, self.radius)
    }

    pub fn has_support(&self) -> bool {
        self.support.is_some()
    }
}

#[derive(Clone, Debug)]
pub enum ConvexBody {
    Ball { center: Vector, radius: f64 },
    Box { lower: Vector, upper: Vector },
    HPolytope(HPolytope),
    Support(SupportBody),
}

/// `K ∩ E` in the orthonormal coordinates of the flat `E`.
#[derive(Clone, Debug)]
pub struct SectionBody {
    pub flat: Flat,
    pub body: ConvexBody,
}

impl SectionBody {
    pub fn dim(&self) -> usize {
        self.flat.dim()
    }
}

impl ConvexBody {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    /// Unit ball centred at the origin of `R^n`.
    pub fn unit_ball(n: usize) -> Self {
        ConvexBody::Ball { center: Vector::zeros(n), radius: 1.0 }
    }

    pub fn cuboid(lower: Vector, upper: Vector) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::domain("box bounds have different lengths"));
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::domain("box needs finite bounds with lower <= upper"));
        }
        Ok(ConvexBody::Box { lower, upper })
    }

    /// `[a, b]^n`.
    pub fn cube(n: usize, a: f64, b: f64) -> Result<Self> {
        Self::cuboid(Vector::from_element(n, a), Vector::from_element(n, b))
    }

    pub fn polytope(normals: Vec<Vector>, offsets: Vec<f64>) -> Result<Self> {
        Ok(ConvexBody::HPolytope(HPolytope::new(normals, offsets)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexBody::Ball { .. } => "ball",
            ConvexBody::Box { .. } => "box",
            ConvexBody::HPolytope(_) => "hpolytope",
            ConvexBody::Support(_) => "support",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Box { lower, .. } => lower.len(),
            ConvexBody::HPolytope(p) => p.dim(),
            ConvexBody::Support(s) => s.dim,
        }
    }

    pub fn membership(&self, x: &Vector) -> bool {
        match self {
            ConvexBody::Ball { center, radius } => (x - center).norm() <= radius + MEMBERSHIP_TOL,
            ConvexBody::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(xi, (l, u))| *xi >= l - MEMBERSHIP_TOL && *xi <= u + MEMBERSHIP_TOL),
            ConvexBody::HPolytope(p) => p.contains(x, MEMBERSHIP_TOL),
            ConvexBody::Support(s) => (s.membership)(x),
        }
    }

    /// Support function `h(K, u) = max_{x∈K} <x, u>`.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        Ok(match self {
            ConvexBody::Ball { center, radius } => center.dot(u) + radius * u.norm(),
            ConvexBody::Box { lower, upper } => u
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .map(|(ui, (l, h))| if *ui >= 0.0 { ui * h } else { ui * l })
                .sum(),
            ConvexBody::HPolytope(p) => p.support(u),
            ConvexBody::Support(s) => match &s.support {
                Some(h) => h(u),
                None => return Err(Error::NotAvailable("support oracle of an oracle-body section".into())),
            },
        })
    }

    /// Upper bound on `max_{x∈K} |x|`.
    pub fn circumradius(&self) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => center.norm() + radius,
            ConvexBody::Box { lower, upper } => lower
                .iter()
                .zip(upper.iter())
                .map(|(l, u)| l.abs().max(u.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
            ConvexBody::HPolytope(p) => p.circumradius(),
            ConvexBody::Support(s) => s.center.norm() + s.radius,
        }
    }

    /// Ball `(center, radius)` containing the body.
    pub fn bounding_ball(&self) -> (Vector, f64) {
        match self {
            ConvexBody::Ball { center, radius } => (center.clone(), *radius),
            ConvexBody::Box { lower, upper } => ((lower + upper) / 2.0, (upper - lower).norm() / 2.0),
            ConvexBody::HPolytope(p) => {
                let c = p.centroid();
                let r = p.vertices().iter().map(|v| (v - &c).norm()).fold(0.0, f64::max);
                (c, r)
            }
            ConvexBody::Support(s) => (s.center.clone(), s.radius),
        }
    }

    /// Image under `x ↦ map·x + shift` for an orthogonal `map`.
    pub fn transformed(&self, map: &Matrix, shift: &Vector) -> Result<ConvexBody> {
        let n = self.dim();
        if map.nrows() != n || map.ncols() != n || shift.len() != n {
            return Err(Error::domain("transformation has the wrong dimensions"));
        }
        Ok(match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball { center: map * center + shift, radius: *radius },
            ConvexBody::Box { lower, upper } => {
                let p = HPolytope::from_box(lower, upper);
                ConvexBody::HPolytope(transform_polytope(&p, map, shift)?)
            }
            ConvexBody::HPolytope(p) => ConvexBody::HPolytope(transform_polytope(p, map, shift)?),
            ConvexBody::Support(s) => {
                let inv = map.transpose();
                let (inv_m, sh) = (inv.clone(), shift.clone());
                let member = s.membership.clone();
                let support = s.support.clone().map(|h| {
                    let (inv_s, sh) = (inv.clone(), shift.clone());
                    Arc::new(move |u: &Vector| h(&(&inv_s * u)) + sh.dot(u)) as SupportFn
                });
                ConvexBody::Support(SupportBody {
                    dim: n,
                    support,
                    membership: Arc::new(move |x: &Vector| member(&(&inv_m * (x - &sh)))),
                    center: map * &s.center + shift,
                    radius: s.radius,
                })
            }
        })
    }

    /// `factor · K` for `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<ConvexBody> {
        if !(factor > 0.0) {
            return Err(Error::domain("scale factor must be positive"));
        }
        Ok(match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball { center: center * factor, radius: radius * factor },
            ConvexBody::Box { lower, upper } => ConvexBody::Box { lower: lower * factor, upper: upper * factor },
            ConvexBody::HPolytope(p) => ConvexBody::HPolytope(HPolytope::new(
                p.normals().to_vec(),
                p.offsets().iter().map(|b| b * factor).collect(),
            )?),
            ConvexBody::Support(s) => {
                let member = s.membership.clone();
                let support = s
                    .support
                    .clone()
                    .map(|h| Arc::new(move |u: &Vector| factor * h(u)) as SupportFn);
                ConvexBody::Support(SupportBody {
                    dim: s.dim,
                    support,
                    membership: Arc::new(move |x: &Vector| member(&(x / factor))),
                    center: &s.center * factor,
                    radius: s.radius * factor,
                })
            }
        })
    }

    /// Closed-form `V_m` for balls and boxes.
    pub fn exact_intrinsic_volume(&self, m: usize) -> Result<f64> {
        let n = self.dim();
        if m > n {
            return Err(Error::domain(format!("V_m needs m <= n, got m = {m}, n = {n}")));
        }
        match self {
            ConvexBody::Ball { radius, .. } => Ok(ball_intrinsic_volume(n, m, *radius)),
            ConvexBody::Box { lower, upper } => {
                let sides: Vec<f64> = upper.iter().zip(lower.iter()).map(|(u, l)| u - l).collect();
                Ok(elementary_symmetric(&sides, m))
            }
            other => Err(Error::NotAvailable(format!("no closed-form V_m for a {} body", other.kind()))),
        }
    }

    /// `K ∩ E`, or `None` when the intersection is empty.
    pub fn section(&self, e: &Flat) -> Option<SectionBody> {
        let d = e.dim();
        let dir = e.direction();
        let body = match self {
            ConvexBody::Ball { center, radius } => {
                let rel = center - e.offset();
                let t = dir.coords(&rel);
                let perp2 = dir.reject(&rel).norm_squared();
                let r2 = radius * radius;
                if perp2 > r2 + MEMBERSHIP_TOL * radius.max(1.0) {
                    return None;
                }
                ConvexBody::Ball { center: t, radius: (r2 - perp2).max(0.0).sqrt() }
            }
            ConvexBody::Box { lower, upper } => {
                section_of_constraints(&HPolytope::from_box(lower, upper), e).map(ConvexBody::HPolytope)?
            }
            ConvexBody::HPolytope(p) => section_of_constraints(p, e).map(ConvexBody::HPolytope)?,
            ConvexBody::Support(s) => {
                let rel = &s.center - e.offset();
                let perp = dir.reject(&rel).norm();
                if perp > s.radius {
                    return None;
                }
                let center = dir.coords(&rel);
                let radius = (s.radius * s.radius - perp * perp).max(0.0).sqrt();
                let member = s.membership.clone();
                let flat = e.clone();
                let sb = SupportBody {
                    dim: d,
                    support: None,
                    membership: Arc::new(move |t: &Vector| member(&flat.param(t))),
                    center,
                    radius,
                };
                if !probe_nonempty(&sb) {
                    return None;
                }
                ConvexBody::Support(sb)
            }
        };
        Some(SectionBody { flat: e.clone(), body })
    }
}

fn elementary_symmetric(xs: &[f64], m: usize) -> f64 {
    let mut e = vec![0.0; m + 1];
    e[0] = 1.0;
    for &x in xs {
        for i in (1..=m).rev() {
            e[i] += e[i - 1] * x;
        }
    }
    e[m]
}

fn transform_polytope(p: &HPolytope, map: &Matrix, shift: &Vector) -> Result<HPolytope> {
    // <a, x> <= b  becomes  <map a, y> <= b + <map a, shift>
    let normals: Vec<Vector> = p.normals().iter().map(|a| map * a).collect();
    let offsets = p.offsets().iter().zip(&normals).map(|(b, a)| b + a.dot(shift)).collect();
    HPolytope::new(normals, offsets)
}

/// Substitutes `x = offset + F t` into the constraints.
fn section_of_constraints(p: &HPolytope, e: &Flat) -> Option<HPolytope> {
    let d = e.dim();
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for (a, b) in p.normals().iter().zip(p.offsets()) {
        let a_loc = e.direction().coords(a);
        let b_loc = b - a.dot(e.offset());
        if a_loc.norm() <= 1e-12 {
            if b_loc < -FEAS_TOL {
                return None;
            }
            continue;
        }
        normals.push(a_loc);
        offsets.push(b_loc);
    }
    if d > 0 && normals.is_empty() {
        // cannot happen for bounded p; keep the guard for safety
        return None;
    }
    HPolytope::from_bounded(d, normals, offsets)
}

/// Deterministic probing for a point of an oracle-defined body.
fn probe_nonempty(s: &SupportBody) -> bool {
    if (s.membership)(&s.center) {
        return true;
    }
    if s.dim == 0 {
        return false;
    }
    let mut rng = RngStream::new(0x9e37_79b9);
    let full = Subspace::full(s.dim);
    (0..EMPTINESS_PROBES).any(|_| {
        let x = &s.center + crate::geometry::uniform_in_ball(&full, s.radius, &mut rng);
        (s.membership)(&x)
    })
}

/// Cauchy–Kubota estimate of `V_1` from the mean width.
fn kubota_v1(body: &ConvexBody, d: usize, rng: &mut RngStream) -> Result<f64> {
    let full = Subspace::full(d);
    let mut acc = 0.0;
    for _ in 0..KUBOTA_SAMPLES {
        let u = uniform_on_sphere(&full, rng);
        acc += body.support(&u)? + body.support(&-u)?;
    }
    let width = acc / KUBOTA_SAMPLES as f64;
    Ok(d as f64 * kappa(d) / (2.0 * kappa(d - 1)) * width)
}

/// Hit-or-miss volume in the bounding cube.
fn hit_or_miss_volume(s: &SupportBody, rng: &mut RngStream) -> f64 {
    let d = s.dim;
    let side = 2.0 * s.radius;
    let hits = (0..HIT_OR_MISS_SAMPLES)
        .filter(|_| {
            let x = Vector::from_fn(d, |i, _| s.center[i] + s.radius * (2.0 * rng.uniform() - 1.0));
            (s.membership)(&x)
        })
        .count();
    side.powi(d as i32) * hits as f64 / HIT_OR_MISS_SAMPLES as f64
}

/// `V_m` of a (possibly empty) section. Supported orders are `0`, `1`, `d−1`
/// and `d`; orders above `d` give 0.
pub fn section_intrinsic_volume(s: Option<&SectionBody>, m: usize, rng: &mut RngStream) -> Result<f64> {
    let Some(s) = s else { return Ok(0.0) };
    let d = s.dim();
    if m > d {
        return Ok(0.0);
    }
    if m == 0 {
        return Ok(1.0);
    }
    match &s.body {
        ConvexBody::Ball { radius, .. } => Ok(ball_intrinsic_volume(d, m, *radius)),
        ConvexBody::Box { .. } => s.body.exact_intrinsic_volume(m),
        ConvexBody::HPolytope(p) => {
            if m == d {
                p.volume()
            } else if m + 1 == d {
                Ok(p.boundary_measure()? / 2.0)
            } else if m == 1 {
                kubota_v1(&s.body, d, rng)
            } else {
                Err(Error::NotAvailable(format!("V_{m} of a {d}-dimensional polytope section")))
            }
        }
        ConvexBody::Support(sb) => {
            if m == d {
                Ok(hit_or_miss_volume(sb, rng))
            } else {
                Err(Error::NotAvailable(format!("V_{m} of a {d}-dimensional oracle-body section")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn simplex3() -> ConvexBody {
        ConvexBody::polytope(
            vec![v(&[-1.0, 0.0, 0.0]), v(&[0.0, -1.0, 0.0]), v(&[0.0, 0.0, -1.0]), v(&[1.0, 1.0, 1.0])],
            vec![0.0, 0.0, 0.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(ConvexBody::unit_ball(3).membership(&Vector::zeros(3)));
        assert!(!ConvexBody::cube(3, 0.0, 1.0).unwrap().membership(&v(&[1.5, 0.0, 0.0])));
        assert!(simplex3().membership(&v(&[0.2, 0.2, 0.2])));
    }

    #[test]
    fn circumradius_examples() {
        let b = ConvexBody::ball(Vector::zeros(3), 2.0).unwrap();
        assert_eq!(b.circumradius(), 2.0);
        assert_relative_eq!(ConvexBody::cube(3, -1.0, 1.0).unwrap().circumradius(), 3f64.sqrt());
        assert_relative_eq!(simplex3().circumradius(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ball_section_pythagoras() {
        let plane = Subspace::coordinate(3, &[0, 1]);
        for t in [0.0, 0.3, 0.99] {
            let e = Flat::new(plane.clone(), &v(&[0.0, 0.0, t]));
            let s = ConvexBody::unit_ball(3).section(&e).unwrap();
            match s.body {
                ConvexBody::Ball { radius, .. } => assert_relative_eq!(radius, (1.0 - t * t).sqrt(), epsilon = 1e-14),
                _ => panic!("ball section must be a ball"),
            }
            let mut rng = RngStream::new(1);
            let area = section_intrinsic_volume(Some(&s), 2, &mut rng).unwrap();
            assert_relative_eq!(area, PI * (1.0 - t * t), epsilon = 1e-12);
        }
        let far = Flat::new(plane, &v(&[0.0, 0.0, 1.2]));
        assert!(ConvexBody::unit_ball(3).section(&far).is_none());
    }

    #[test]
    fn box_section_is_unit_square() {
        let cube = ConvexBody::cube(3, 0.0, 1.0).unwrap();
        let e = Flat::new(Subspace::coordinate(3, &[0, 1]), &v(&[0.0, 0.0, 0.5]));
        let s = cube.section(&e).unwrap();
        let ConvexBody::HPolytope(p) = &s.body else { panic!("box section must be a polytope") };
        assert_eq!(p.vertices().len(), 4);
        assert_relative_eq!(p.volume().unwrap(), 1.0, epsilon = 1e-12);
        let mut rng = RngStream::new(2);
        assert_relative_eq!(section_intrinsic_volume(Some(&s), 1, &mut rng).unwrap(), 2.0, epsilon = 1e-12);
        let miss = Flat::new(Subspace::coordinate(3, &[0, 1]), &v(&[0.0, 0.0, 2.0]));
        assert!(cube.section(&miss).is_none());
        assert_eq!(section_intrinsic_volume(None, 0, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn exact_values() {
        assert_relative_eq!(ConvexBody::unit_ball(3).exact_intrinsic_volume(3).unwrap(), 4.0 * PI / 3.0, epsilon = 1e-12);
        assert_relative_eq!(ConvexBody::unit_ball(3).exact_intrinsic_volume(2).unwrap(), 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(ConvexBody::cube(4, 0.0, 1.0).unwrap().exact_intrinsic_volume(2).unwrap(), 6.0);
        assert!(matches!(simplex3().exact_intrinsic_volume(1), Err(Error::NotAvailable(_))));
        assert_relative_eq!(ConvexBody::unit_ball(4).exact_intrinsic_volume(3).unwrap(), PI * PI, epsilon = 1e-12);
    }

    #[test]
    fn kubota_on_a_polygon_section() {
        // a square section has V_1 = half perimeter; Kubota is unbiased for it
        let cube = ConvexBody::cube(4, -1.0, 1.0).unwrap();
        let e = Flat::new(Subspace::coordinate(4, &[0, 1, 2]), &Vector::zeros(4));
        let s = cube.section(&e).unwrap();
        let mut rng = RngStream::new(3);
        let est: f64 = (0..200).map(|_| section_intrinsic_volume(Some(&s), 1, &mut rng).unwrap()).sum::<f64>() / 200.0;
        assert_relative_eq!(est, 6.0, max_relative = 0.02);
    }

    #[test]
    fn transformed_and_scaled_bodies() {
        let mut rng = RngStream::new(4);
        let rot = crate::geometry::sample_rotation_fixing(&Subspace::trivial(3), &mut rng).unwrap();
        let shift = v(&[0.1, -0.2, 0.3]);
        let cube = ConvexBody::cube(3, 0.0, 1.0).unwrap();
        let moved = cube.transformed(&rot, &shift).unwrap();
        for _ in 0..200 {
            let x = v(&[rng.uniform_range(-0.5, 1.5), rng.uniform_range(-0.5, 1.5), rng.uniform_range(-0.5, 1.5)]);
            let y = &rot * &x + &shift;
            let inside = cube.membership(&x);
            // skip points within rounding distance of the boundary
            let margin = x.iter().map(|c| c.abs().min((c - 1.0).abs())).fold(f64::INFINITY, f64::min);
            if margin > 1e-9 {
                assert_eq!(moved.membership(&y), inside);
            }
        }
        let big = cube.scaled(2.0).unwrap();
        assert_relative_eq!(big.exact_intrinsic_volume(3).unwrap(), 8.0);
    }

    #[test]
    fn oracle_body_section() {
        let body = ConvexBody::Support(
            SupportBody::new(3, |u: &Vector| u.norm(), |x: &Vector| x.norm() <= 1.0 + MEMBERSHIP_TOL, 1.0).unwrap(),
        );
        let e = Flat::new(Subspace::coordinate(3, &[0, 1]), &v(&[0.0, 0.0, 0.5]));
        let s = body.section(&e).unwrap();
        assert!(s.body.membership(&v(&[0.5, 0.5])));
        assert!(!s.body.membership(&v(&[0.9, 0.0])));
        let mut rng = RngStream::new(5);
        let est = section_intrinsic_volume(Some(&s), 2, &mut rng).unwrap();
        assert_relative_eq!(est, PI * 0.75, max_relative = 0.1);
        assert!(matches!(section_intrinsic_volume(Some(&s), 1, &mut rng), Err(Error::NotAvailable(_))));
        let far = Flat::new(Subspace::coordinate(3, &[0, 1]), &v(&[0.0, 0.0, 1.5]));
        assert!(body.section(&far).is_none());
    }

    #[test]
    fn non_sublinear_oracle_is_rejected() {
        let r = SupportBody::new(2, |u: &Vector| u.norm().powi(2), |_| true, 10.0);
        assert!(r.is_err());
    }
}
