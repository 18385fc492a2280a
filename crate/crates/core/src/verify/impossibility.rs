use nalgebra::SVD;

use crate::bodies::{ConvexBody, SupportBody};
use crate::constants::kappa;
use crate::error::{Error, Result};
use crate::estimators::{chunked, default_l0, merge_accumulators};
use crate::geometry::{
    orthonormalize, sample_grassmannian_containing, uniform_in_ball, uniform_on_sphere, Matrix, RngStream, Subspace,
    Vector,
};

use super::{CheckReport, ToleranceRule, Value};

/// Membership slack of the constructed bodies.
const TOL: f64 = 1e-9;
/// Membership probes per sampled section space.
pub const PROBES_PER_SECTION: usize = 10_000;
/// Hit-or-miss samples for the volume in the affine hull.
const HULL_SAMPLES: u64 = 20_000;
/// Directions used to collect support points.
const SUPPORT_DIRECTIONS: usize = 64;

/// The pair `K1 = (B^n ∩ L') + conv{o, u}` and `K2 = B^n ∩ L'` with `u` a
/// unit vector orthogonal to `L'`. Every subspace containing `L'` but not `u`
/// cuts both bodies in the same set, while `dim K1 = dim K2 + 1`.
#[derive(Clone, Debug)]
pub struct SegmentPrism {
    pub l_prime: Subspace,
    pub u: Vector,
}

impl SegmentPrism {
    pub fn new(l_prime: Subspace, u: Vector) -> Result<Self> {
        if (u.norm() - 1.0).abs() > 1e-12 || l_prime.project(&u).norm() > 1e-12 {
            return Err(Error::domain("segment direction must be a unit vector orthogonal to L'"));
        }
        Ok(SegmentPrism { l_prime, u })
    }

    fn n(&self) -> usize {
        self.u.len()
    }

    /// `K1`, with support function `h(v) = |p(v|L')| + max(0, <v, u>)`.
    pub fn with_segment(&self) -> Result<ConvexBody> {
        let (lp, u) = (self.l_prime.clone(), self.u.clone());
        let (lp2, u2) = (self.l_prime.clone(), self.u.clone());
        let radius = if lp.dim() == 0 { 1.0 } else { 2f64.sqrt() };
        Ok(ConvexBody::Support(SupportBody::new(
            self.n(),
            move |v: &Vector| lp.project(v).norm() + v.dot(&u).max(0.0),
            move |x: &Vector| {
                let t = x.dot(&u2);
                let a = x - &u2 * t;
                (-TOL..=1.0 + TOL).contains(&t) && lp2.distance(&a) <= TOL && a.norm() <= 1.0 + TOL
            },
            radius,
        )?))
    }

    /// `K2 = B^n ∩ L'`.
    pub fn base(&self) -> Result<ConvexBody> {
        let (lp, lp2) = (self.l_prime.clone(), self.l_prime.clone());
        Ok(ConvexBody::Support(SupportBody::new(
            self.n(),
            move |v: &Vector| lp.project(v).norm(),
            move |x: &Vector| lp2.distance(x) <= TOL && x.norm() <= 1.0 + TOL,
            1.0,
        )?))
    }
}

/// Support point `∇h(v)` by central differences.
fn support_point(body: &ConvexBody, v: &Vector) -> Result<Vector> {
    let n = v.len();
    let h = 1e-6;
    let mut g = Vector::zeros(n);
    for i in 0..n {
        let mut plus = v.clone();
        plus[i] += h;
        let mut minus = v.clone();
        minus[i] -= h;
        g[i] = (body.support(&plus)? - body.support(&minus)?) / (2.0 * h);
    }
    Ok(g)
}

/// Affine hull `c + S` of a body spanned by its support points.
fn affine_hull(body: &ConvexBody, rng: &mut RngStream) -> Result<(Vector, Subspace)> {
    let n = body.dim();
    let full = Subspace::full(n);
    let points: Vec<Vector> = (0..SUPPORT_DIRECTIONS)
        .map(|_| support_point(body, &uniform_on_sphere(&full, rng)))
        .collect::<Result<_>>()?;
    let center = points.iter().fold(Vector::zeros(n), |acc, p| acc + p) / points.len() as f64;
    let diffs = Matrix::from_columns(&points.iter().map(|p| p - &center).collect::<Vec<_>>());
    let svd = SVD::new(diffs, true, false);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let basis: Vec<Vector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 1e-6 * sigma_max.max(1.0))
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    let hull = if basis.is_empty() { Subspace::trivial(n) } else { orthonormalize(&basis)? };
    Ok((center, hull))
}

/// `V_m` of a body whose affine dimension is at most `m`: zero below `m`,
/// hit-or-miss volume inside the hull at `m`.
fn dimension_volume(body: &ConvexBody, m: usize, seed: u64, stream: u64) -> Result<(usize, Value)> {
    let mut rng = RngStream::new(seed).substream(stream);
    let (center, hull) = affine_hull(body, &mut rng)?;
    let d = hull.dim();
    if d < m {
        return Ok((d, Value::Exact(0.0)));
    }
    if d > m {
        return Err(Error::NotAvailable(format!("V_{m} of a body of dimension {d}")));
    }
    if m == 0 {
        return Ok((0, Value::Exact(1.0)));
    }
    let half = 2.0 * body.circumradius();
    let cube = (2.0 * half).powi(m as i32);
    let root = rng.substream(1);
    let parts = chunked(HULL_SAMPLES, &root, |rng| {
        let t = Vector::from_fn(m, |_, _| rng.uniform_range(-half, half));
        let x = &center + hull.embed(&t);
        Ok(if body.membership(&x) { cube } else { 0.0 })
    })?;
    Ok((d, Value::Estimated(merge_accumulators(&parts).estimate(seed))))
}

/// Draws a point of `K2 ∩ L`, or a point of `L` when `K2` is empty.
type BaseSampler = dyn Fn(&Subspace, &mut RngStream) -> Vector + Sync;

/// Demonstrates that no measurement function on sections through `L0` can
/// recover `V_m` for `m <= r + 1` when `k <= n - 1`: builds two bodies whose
/// sections agree for almost every `L ∈ G(L0, k)` but whose `V_m` differ.
/// `draws` section spaces are probed with [`PROBES_PER_SECTION`] points each.
pub fn impossibility_demo(n: usize, k: usize, r: usize, m: usize, seed: u64, draws: u64) -> Result<CheckReport> {
    if k < r + 1 || k + 1 > n {
        return Err(Error::domain(format!("the construction needs r+1 <= k <= n-1, got n = {n}, k = {k}, r = {r}")));
    }
    if m > r + 1 {
        return Err(Error::domain(format!("the construction needs m <= r+1, got m = {m}, r = {r}")));
    }
    let l0 = default_l0(n, r);
    let mut u = Vector::zeros(n);
    u[0] = 1.0;
    let name = format!("sections cannot determine V_{m} (n,k,r)=({n},{k},{r})");

    // K2 = None stands for the empty set.
    let (k1, k2, base_sampler): (ConvexBody, Option<ConvexBody>, Box<BaseSampler>) =
        if m == 0 {
            let x = u.clone();
            let (x1, x2) = (x.clone(), x.clone());
            let single = ConvexBody::Support(SupportBody::new(
                n,
                move |v: &Vector| v.dot(&x1),
                move |p: &Vector| (p - &x2).norm() <= TOL,
                1.0,
            )?);
            (single, None, Box::new(move |l: &Subspace, _: &mut RngStream| l.project(&x)))
        } else {
            let axes = l0.basis();
            let lp = Subspace::span(n, &axes[..m - 1]);
            let prism = SegmentPrism::new(lp.clone(), u.clone())?;
            (
                prism.with_segment()?,
                Some(prism.base()?),
                Box::new(move |_: &Subspace, rng: &mut RngStream| uniform_in_ball(&lp, 1.0, rng)),
            )
        };
    let member2 = |p: &Vector| k2.as_ref().is_some_and(|b| b.membership(p));

    let root = RngStream::new(seed).substream(0);
    let counts = chunked(draws, &root, |rng| {
        let l = sample_grassmannian_containing(&l0, k, rng)?;
        let pu = l.project(&u);
        let mut mismatches = 0u64;
        for i in 0..PROBES_PER_SECTION {
            let p = match i % 3 {
                0 => base_sampler(&l, rng),
                1 => uniform_in_ball(&l, 1.5, rng),
                _ => base_sampler(&l, rng) + &pu * rng.uniform(),
            };
            if k1.membership(&p) != member2(&p) {
                mismatches += 1;
            }
        }
        Ok(mismatches as f64)
    })?;
    let total = merge_accumulators(&counts);
    let mismatches = (total.mean() * total.count() as f64).round();

    let (dim1, v1) = dimension_volume(&k1, m, seed, 1)?;
    let (dim2, v2) = match &k2 {
        Some(b) => {
            let (d, v) = dimension_volume(b, m, seed, 2)?;
            (Some(d), v)
        }
        None => (None, Value::Exact(0.0)),
    };
    let expected = if m == 0 { 1.0 } else { kappa(m - 1) };
    let mut parts = vec![
        CheckReport::new(
            "sections of K1 and K2 agree",
            Value::Exact(mismatches),
            Value::Exact(0.0),
            ToleranceRule::Absolute(0.0),
            format!("{draws} section spaces, {PROBES_PER_SECTION} probes each"),
        ),
        CheckReport::new(
            format!("V_{m}(K1) > V_{m}(K2)"),
            v1,
            v2,
            ToleranceRule::Exceeds(4.0),
            format!("dim K1 = {dim1}, dim K2 = {}, V_{m}(K1) = {expected:.6} in closed form", match dim2 {
                Some(d) => d.to_string(),
                None => "empty".into(),
            }),
        ),
        CheckReport::new(
            "dim K1 = m",
            Value::Exact(dim1 as f64),
            Value::Exact(m as f64),
            ToleranceRule::Absolute(0.0),
            "",
        ),
    ];
    if let Some(d) = dim2 {
        parts.push(CheckReport::new(
            "dim K2 = m - 1",
            Value::Exact(d as f64),
            Value::Exact(m as f64 - 1.0),
            ToleranceRule::Absolute(0.0),
            "",
        ));
    }
    if let Value::Estimated(e) = v1 {
        parts.push(CheckReport::new(
            format!("V_{m}(K1) against its closed form"),
            Value::Estimated(e),
            Value::Exact(expected),
            ToleranceRule::Sigma(4.0),
            "",
        ));
    }
    Ok(CheckReport::worst_of(name, parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prism_membership() {
        let mut u = Vector::zeros(3);
        u[0] = 1.0;
        let p = SegmentPrism::new(Subspace::coordinate(3, &[2]), u).unwrap();
        let k1 = p.with_segment().unwrap();
        let k2 = p.base().unwrap();
        let x = Vector::from_column_slice(&[0.5, 0.0, 0.5]);
        assert!(k1.membership(&x) && !k2.membership(&x));
        let y = Vector::from_column_slice(&[0.0, 0.0, -0.9]);
        assert!(k1.membership(&y) && k2.membership(&y));
        assert!(SegmentPrism::new(Subspace::coordinate(3, &[0]), Vector::from_column_slice(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn hull_dimensions() {
        let mut u = Vector::zeros(4);
        u[0] = 1.0;
        let p = SegmentPrism::new(Subspace::coordinate(4, &[3]), u).unwrap();
        let mut rng = RngStream::new(1);
        assert_eq!(affine_hull(&p.with_segment().unwrap(), &mut rng).unwrap().1.dim(), 2);
        assert_eq!(affine_hull(&p.base().unwrap(), &mut rng).unwrap().1.dim(), 1);
    }

    #[test]
    fn small_demo() {
        let r = impossibility_demo(3, 2, 1, 2, 5, 20).unwrap();
        assert!(r.passed, "{r}");
    }
}
