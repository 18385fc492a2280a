use crate::bodies::{section_intrinsic_volume, ConvexBody};
use crate::constants::{
    alpha_const, b_coeff, c0_const, crofton_const, d_const, kappa, omega, sphere_projection_moment,
};
use crate::error::{Error, Result};
use crate::estimators::{
    chunked, measurement_phi, merge_accumulators, vertical_measurement_tilde, Design, Estimate, EstimatorSpec,
    Indices,
};
use crate::geometry::{
    d_weight, d_weight_definitional, d_weight_from_points, sample_grassmannian, sample_grassmannian_containing,
    sample_hitting_flat, sample_rotation_fixing, sample_translate_in_complement, subspace_det, uniform_on_sphere, Flat,
    RngStream, Subspace, Vector,
};

use super::{CheckReport, ToleranceRule, Value};

const SIGMA: ToleranceRule = ToleranceRule::Sigma(4.0);

fn mc(total: u64, seed: u64, stream: u64, f: impl Fn(&mut RngStream) -> Result<f64> + Sync) -> Result<Estimate> {
    let root = RngStream::new(seed).substream(stream);
    let parts = chunked(total, &root, f)?;
    Ok(merge_accumulators(&parts).estimate(seed))
}

fn relative_part(name: String, a: f64, b: f64, tol: f64) -> CheckReport {
    CheckReport::new(name, Value::Exact(a), Value::Exact(b), ToleranceRule::Relative(tol), "")
}

/// `∫_{A(n,q)} V_{q-j}(K ∩ E) μ_q(dE) = c^{n-j,q}_{q-j,n} V_{n-j}(K)` with the
/// left side sampled by hitting flats and the right side in closed form.
pub fn check_classical_crofton(n: usize, q: usize, j: usize, body: &ConvexBody, budget: u64, seed: u64) -> Result<CheckReport> {
    if j > q || q > n || body.dim() != n {
        return Err(Error::domain(format!("classical Crofton check needs 0 <= j <= q <= n, got n = {n}, q = {q}, j = {j}")));
    }
    let exact = body.exact_intrinsic_volume(n - j)?;
    let rhs = crofton_const(q - j, n, n - j, q) * exact;
    let radius = body.circumradius();
    let full = Subspace::full(n);
    let lhs = mc(budget, seed, 0, |rng| {
        let (e, w) = sample_hitting_flat(&full, q, radius, rng)?;
        let section = body.section(&e);
        Ok(w * section_intrinsic_volume(section.as_ref(), q - j, rng)?)
    })?;
    Ok(CheckReport::new(
        format!("classical Crofton n={n} q={q} j={j} on {}", body.kind()),
        Value::Estimated(lhs),
        Value::Exact(rhs),
        SIGMA,
        "hitting-flat Monte Carlo against the closed-form intrinsic volume",
    ))
}

/// Smooth positive test integrand supported on flats meeting the unit ball.
fn test_integrand(e: &Flat) -> f64 {
    let d = e.offset().norm();
    if d <= 1.0 {
        (-d * d).exp()
    } else {
        0.0
    }
}

/// Right side `∫_{A(n,q)} f dμ_q` by full-space hitting flats.
fn full_space_integral(n: usize, q: usize, budget: u64, seed: u64) -> Result<Estimate> {
    let full = Subspace::full(n);
    mc(budget, seed, 1, |rng| {
        let (e, w) = sample_hitting_flat(&full, q, 1.0, rng)?;
        Ok(w * test_integrand(&e))
    })
}

fn scale(e: Estimate, c: f64) -> Estimate {
    Estimate { mean: e.mean * c, stderr: e.stderr * c, ..e }
}

/// Two-route check of the linear Blaschke–Petkantschin formula with a fixed
/// subspace: flats inside random `L ⊇ L0` weighted by `D(E, L0)^{n-k}`
/// against `α_{n,k,q,r} ∫ f dμ_q`.
pub fn check_bp_linear(n: usize, q: usize, r: usize, k: usize, seed: u64, budget: u64) -> Result<CheckReport> {
    if q + r + 1 > k || k > n {
        return Err(Error::domain(format!(
            "linear decomposition needs q+r+1 <= k <= n, got n = {n}, q = {q}, r = {r}, k = {k}"
        )));
    }
    let alpha = alpha_const(n, k, q, r)?;
    let l0 = crate::estimators::default_l0(n, r);
    let lhs = mc(budget, seed, 0, |rng| {
        let l = sample_grassmannian_containing(&l0, k, rng)?;
        let (e, w) = sample_hitting_flat(&l, q, 1.0, rng)?;
        let f = test_integrand(&e);
        let weight = if k == n { 1.0 } else { d_weight(&e, &l0)?.powi((n - k) as i32) };
        Ok(w * f * weight)
    })?;
    let rhs = scale(full_space_integral(n, q, budget, seed)?, alpha);
    let mut parts = vec![CheckReport::new(
        format!("linear decomposition (n,q,r,k)=({n},{q},{r},{k})"),
        Value::Estimated(lhs),
        Value::Estimated(rhs),
        SIGMA,
        format!("alpha = {alpha:.12e}"),
    )];
    if k == n {
        parts.push(relative_part(format!("alpha_{{{n},{n},{q},{r}}} = 1"), alpha, 1.0, 1e-12));
    }
    Ok(CheckReport::worst_of(format!("linear decomposition (n,q,r,k)=({n},{q},{r},{k})"), parts))
}

/// Two-route check of the affine (vertical) decomposition: flats inside
/// `L + x` weighted by `[lin E, L0]^{n-k}` against the `b`-ratio constant
/// times `∫ f dμ_q`.
pub fn check_bp_affine(n: usize, q: usize, r: usize, k: usize, seed: u64, budget: u64) -> Result<CheckReport> {
    if q + r > k || k > n || r + 1 > k {
        return Err(Error::domain(format!(
            "affine decomposition needs q+r <= k <= n and r+1 <= k, got n = {n}, q = {q}, r = {r}, k = {k}"
        )));
    }
    let c = b_coeff(k - r, q)? / b_coeff(n - r, q)? * (b_coeff(n, q)? / b_coeff(k, q)?);
    let l0 = crate::estimators::default_l0(n, r);
    let lhs = mc(budget, seed, 0, |rng| {
        let l = sample_grassmannian_containing(&l0, k, rng)?;
        let (x, wx) = if k == n { (Vector::zeros(n), 1.0) } else { sample_translate_in_complement(&l, 1.0, rng)? };
        let rx2 = 1.0 - x.norm_squared();
        if rx2 <= 0.0 {
            return Ok(0.0);
        }
        let (e0, w) = sample_hitting_flat(&l, q, rx2.sqrt(), rng)?;
        let e = Flat::new(e0.direction().clone(), &(e0.offset() + &x));
        let weight = if k == n { 1.0 } else { subspace_det(e.direction(), &l0)?.powi((n - k) as i32) };
        Ok(wx * w * test_integrand(&e) * weight)
    })?;
    let rhs = scale(full_space_integral(n, q, budget, seed)?, c);
    let mut parts = vec![CheckReport::new(
        format!("affine decomposition (n,q,r,k)=({n},{q},{r},{k})"),
        Value::Estimated(lhs),
        Value::Estimated(rhs),
        SIGMA,
        format!("constant = {c:.12e}"),
    )];
    if q + r < k {
        let reduced = alpha_const(n, k, q, r)? * omega(n - r - q)? / omega(k - r - q)?;
        parts.push(relative_part(format!("b-ratio reduction at (n,k,q,r)=({n},{k},{q},{r})"), c, reduced, 1e-12));
    }
    if k == n {
        parts.push(relative_part("constant at k = n".into(), c, 1.0, 1e-12));
    }
    Ok(CheckReport::worst_of(format!("affine decomposition (n,q,r,k)=({n},{q},{r},{k})"), parts))
}

/// For `draws` random `L ∈ G(L0, k)`, the measurement function at every
/// admissible `q` must give the same value.
#[allow(clippy::too_many_arguments)]
pub fn check_uniqueness_q(
    n: usize,
    k: usize,
    r: usize,
    j: usize,
    body: &ConvexBody,
    draws: usize,
    budget: u64,
    seed: u64,
) -> Result<CheckReport> {
    Indices::new(n, k, r, j, j).validate(Design::Rotational)?;
    let top = k - (r + 1);
    let name = format!("independence of q (n,k,r,j)=({n},{k},{r},{j}) on {}", body.kind());
    if j >= top {
        return Ok(CheckReport::new(
            name,
            Value::Exact(0.0),
            Value::Exact(0.0),
            ToleranceRule::Absolute(0.0),
            "skipped: only one admissible q",
        ));
    }
    let l0 = crate::estimators::default_l0(n, r);
    let root = RngStream::new(seed);
    let mut parts = Vec::new();
    for d in 0..draws {
        let mut rng = root.substream(d as u64);
        let l = sample_grassmannian_containing(&l0, k, &mut rng)?;
        let estimates: Vec<(usize, Estimate)> = (j..=top)
            .map(|q| {
                let spec = EstimatorSpec::new(Indices::new(n, k, r, j, q), body.clone(), l0.clone())
                    .with_inner(budget)
                    .with_seed(seed);
                let mut qrng = rng.substream(q as u64);
                Ok((q, measurement_phi(&spec, &l, &mut qrng)?))
            })
            .collect::<Result<_>>()?;
        for (a, (qa, ea)) in estimates.iter().enumerate() {
            for (qb, eb) in &estimates[a + 1..] {
                parts.push(CheckReport::new(
                    format!("draw {d}: q={qa} vs q={qb}"),
                    Value::Estimated(*ea),
                    Value::Estimated(*eb),
                    SIGMA,
                    "",
                ));
            }
        }
    }
    Ok(CheckReport::worst_of(name, parts))
}

/// Same as [`check_uniqueness_q`] for the vertical measurement function at
/// random `(L, x)`.
#[allow(clippy::too_many_arguments)]
pub fn check_uniqueness_q_affine(
    n: usize,
    k: usize,
    r: usize,
    j: usize,
    body: &ConvexBody,
    draws: usize,
    budget: u64,
    seed: u64,
) -> Result<CheckReport> {
    Indices::new(n, k, r, j, j).validate(Design::Vertical)?;
    let top = k - r;
    let name = format!("independence of q, vertical (n,k,r,j)=({n},{k},{r},{j}) on {}", body.kind());
    if j >= top {
        return Ok(CheckReport::new(
            name,
            Value::Exact(0.0),
            Value::Exact(0.0),
            ToleranceRule::Absolute(0.0),
            "skipped: only one admissible q",
        ));
    }
    let l0 = crate::estimators::default_l0(n, r);
    let radius = body.circumradius() * (1.0 + 1e-9);
    let root = RngStream::new(seed);
    let mut parts = Vec::new();
    for d in 0..draws {
        let mut rng = root.substream(d as u64);
        let l = sample_grassmannian_containing(&l0, k, &mut rng)?;
        // keep x inside the inner half of the reference ball so the section is rarely empty
        let x = if k == n {
            Vector::zeros(n)
        } else {
            sample_translate_in_complement(&l, 0.5 * radius, &mut rng)?.0
        };
        let estimates: Vec<(usize, Estimate)> = (j..=top)
            .map(|q| {
                let spec = EstimatorSpec::new(Indices::new(n, k, r, j, q), body.clone(), l0.clone())
                    .with_inner(budget)
                    .with_seed(seed);
                let mut qrng = rng.substream(q as u64);
                Ok((q, vertical_measurement_tilde(&spec, &l, &x, &mut qrng)?))
            })
            .collect::<Result<_>>()?;
        for (a, (qa, ea)) in estimates.iter().enumerate() {
            for (qb, eb) in &estimates[a + 1..] {
                parts.push(CheckReport::new(
                    format!("draw {d}: q={qa} vs q={qb}"),
                    Value::Estimated(*ea),
                    Value::Estimated(*eb),
                    SIGMA,
                    "",
                ));
            }
        }
    }
    Ok(CheckReport::worst_of(name, parts))
}

fn random_flat(n: usize, q: usize, rng: &mut RngStream) -> Result<Flat> {
    let m = sample_grassmannian(n, q, rng)?;
    Ok(Flat::new(m, &rng.normal_vector(n)))
}

/// Three evaluations of `D(E, L0)`: definition against product form, point
/// form for `E = aff{x_0..x_q}`, and the one-dimension extension identity.
pub fn check_lemma_d(n: usize, q: usize, r: usize, trials: usize, seed: u64) -> Result<CheckReport> {
    if q + r + 1 > n {
        return Err(Error::domain(format!("D(E, L0) needs q + r <= n - 1, got n = {n}, q = {q}, r = {r}")));
    }
    let mut rng = RngStream::new(seed);
    let mut parts = Vec::with_capacity(3 * trials);
    for t in 0..trials {
        let l0 = sample_grassmannian(n, r, &mut rng)?;
        let e = random_flat(n, q, &mut rng)?;
        parts.push(relative_part(
            format!("trial {t}: definition vs product form"),
            d_weight_definitional(&e, &l0)?,
            d_weight(&e, &l0)?,
            1e-10,
        ));

        let points: Vec<Vector> = (0..=q).map(|_| rng.normal_vector(n)).collect();
        let diffs: Vec<Vector> = points[1..].iter().map(|x| x - &points[0]).collect();
        let through = Flat::new(Subspace::span(n, &diffs), &points[0]);
        parts.push(relative_part(
            format!("trial {t}: point form vs product form"),
            d_weight_from_points(&points, &l0)?,
            d_weight(&through, &l0)?,
            1e-8,
        ));

        if q + r + 2 <= n {
            let u = uniform_on_sphere(&e.direction().complement(), &mut rng);
            let mut vs = l0.basis();
            vs.extend(e.direction().basis());
            vs.push(e.offset().clone());
            let factor = Subspace::span(n, &vs).reject(&u).norm();
            parts.push(relative_part(
                format!("trial {t}: extension by a direction"),
                d_weight(&e.extend(&u), &l0)?,
                d_weight(&e, &l0)? * factor,
                1e-8,
            ));
        }
    }
    Ok(CheckReport::worst_of(format!("D(E, L0) three routes (n,q,r)=({n},{q},{r})"), parts))
}

/// Cylindrical decomposition of the sphere integral, the inner `t`-integral
/// for `f ≡ 1`, and the projection moments on the sphere.
pub fn check_sphere_identities(n: usize, seed: u64, budget: u64) -> Result<CheckReport> {
    if n < 3 {
        return Err(Error::domain(format!("sphere identities are checked for n >= 3, got n = {n}")));
    }
    let full = Subspace::full(n);
    let a = Vector::from_fn(n, |i, _| 0.7 - 0.35 * i as f64);
    let f = |u: &Vector| u.dot(&a).exp();
    let direct = mc(budget, seed, 0, |rng| Ok(omega(n)? * f(&uniform_on_sphere(&full, rng))))?;
    let v = Subspace::coordinate(n, &[0]);
    let v_perp = v.complement();
    let e1 = v.basis()[0].clone();
    let expo = (n as f64 - 3.0) / 2.0;
    let nested = mc(budget, seed, 1, |rng| {
        let w = uniform_on_sphere(&v_perp, rng);
        let t = rng.uniform_range(-1.0, 1.0);
        let u = &e1 * t + w * (1.0 - t * t).sqrt();
        Ok(omega(n - 1)? * 2.0 * f(&u) * (1.0 - t * t).powf(expo))
    })?;
    let t_integral = mc(budget, seed, 2, |rng| {
        let t = rng.uniform_range(-1.0, 1.0);
        Ok(2.0 * (1.0 - t * t).powf(expo))
    })?;
    let mut parts = vec![
        CheckReport::new("cylindrical coordinates, f = exp<u,a>", Value::Estimated(direct), Value::Estimated(nested), SIGMA, ""),
        CheckReport::new(
            "inner t-integral for f = 1",
            Value::Estimated(t_integral),
            Value::Exact(omega(n)? / omega(n - 1)?),
            SIGMA,
            "",
        ),
    ];
    let mut moments = vec![(3, 0, 1), (3, 1, 1), (4, 2, 2), (5, 1, 3)];
    moments.retain(|&(d, _, _)| d == n);
    for (s, (d, j, p)) in moments.into_iter().enumerate() {
        let lp = Subspace::coordinate(d, &(0..p).collect::<Vec<_>>());
        let sphere = Subspace::full(d);
        let est = mc(budget, seed, 10 + s as u64, |rng| {
            let u = uniform_on_sphere(&sphere, rng);
            Ok(omega(d)? * lp.project(&u).norm().powi(j as i32))
        })?;
        parts.push(CheckReport::new(
            format!("projection moment (d,j,p)=({d},{j},{p})"),
            Value::Estimated(est),
            Value::Exact(sphere_projection_moment(d, j, p)?),
            SIGMA,
            "",
        ));
    }
    Ok(CheckReport::worst_of(format!("sphere identities n={n}"), parts))
}

/// `∫_{R^n} f = [L, M] ∫_L ∫_M f(x + y)` for random complementary `L`, `M`
/// and a Gaussian `f`, with Gaussian importance sampling on `L × M`.
pub fn check_projection_factor(n: usize, p: usize, seed: u64, budget: u64) -> Result<CheckReport> {
    if p == 0 || p >= n {
        return Err(Error::domain("projection factor check needs 0 < dim L < n"));
    }
    let mut rng = RngStream::new(seed);
    let l = sample_grassmannian(n, p, &mut rng)?;
    let m = sample_grassmannian(n, n - p, &mut rng)?;
    // [L, M] for complementary dimensions: Gram volume of the joint frame
    let mut joint = l.basis();
    joint.extend(m.basis());
    let factor = crate::geometry::nabla(&joint);
    let c = Vector::from_fn(n, |i, _| 0.3 * i as f64 - 0.2);
    let sigma = 1.3;
    let gauss_norm = |d: usize| (2.0 * std::f64::consts::PI * sigma * sigma).powf(d as f64 / 2.0);
    let est = mc(budget, seed, 1, |rng| {
        let ty = rng.normal_vector(p) * sigma;
        let tx = rng.normal_vector(n - p) * sigma;
        let y = l.embed(&ty);
        let x = m.embed(&tx);
        let z = &x + &y - &c;
        let f = (-0.5 * z.norm_squared()).exp();
        let pdf = (-0.5 * (ty.norm_squared() + tx.norm_squared()) / (sigma * sigma)).exp() / (gauss_norm(p) * gauss_norm(n - p));
        Ok(factor * f / pdf)
    })?;
    let exact = (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0);
    Ok(CheckReport::new(
        format!("projection Jacobian n={n} dim L={p}"),
        Value::Estimated(est),
        Value::Exact(exact),
        SIGMA,
        format!("[L,M] = {factor:.6e}"),
    ))
}

/// Mean of a fixed bounded functional of `L ~ ν_k^{L0}` is unchanged by a
/// random rotation fixing `L0`.
pub fn check_haar_invariance(n: usize, r: usize, k: usize, seed: u64, budget: u64) -> Result<CheckReport> {
    let l0 = crate::estimators::default_l0(n, r);
    let a = Vector::from_fn(n, |i, _| 1.0 + i as f64);
    let b = Vector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -0.5 });
    let g = |l: &Subspace| l.project(&a).norm_squared() / a.norm_squared() + l.project(&b).norm().powi(4) / b.norm().powi(4);
    let plain = mc(budget, seed, 0, |rng| Ok(g(&sample_grassmannian_containing(&l0, k, rng)?)))?;
    let rotated = mc(budget, seed, 1, |rng| {
        let l = sample_grassmannian_containing(&l0, k, rng)?;
        let rho = sample_rotation_fixing(&l0, rng)?;
        Ok(g(&l.transformed(&rho)))
    })?;
    Ok(CheckReport::new(
        format!("invariance of G(L0,k) sampling (n,r,k)=({n},{r},{k})"),
        Value::Estimated(plain),
        Value::Estimated(rotated),
        SIGMA,
        "",
    ))
}

/// Deterministic identities between the dimensional constants for all
/// admissible indices with `n <= max_n`.
pub fn check_constant_identities(max_n: usize) -> Result<CheckReport> {
    let mut parts = Vec::new();
    for n in 1..=max_n {
        for k in 1..=n {
            for q in 0..k {
                parts.push(relative_part(
                    format!("alpha r=0 at (n,k,q)=({n},{k},{q})"),
                    alpha_const(n, k, q, 0)?,
                    omega(k - q)? / omega(n - q)?,
                    1e-12,
                ));
                for r in 0..k {
                    if q + r < k {
                        let lhs = b_coeff(k - r, q)? / b_coeff(n - r, q)? * (b_coeff(n, q)? / b_coeff(k, q)?);
                        parts.push(relative_part(
                            format!("b-ratio reduction at (n,k,q,r)=({n},{k},{q},{r})"),
                            lhs,
                            alpha_const(n, k, q, r)? * omega(n - r - q)? / omega(k - r - q)?,
                            1e-12,
                        ));
                    }
                }
            }
            for j in 0..=k {
                parts.push(relative_part(
                    format!("vertical constant r=0 at (n,k,j)=({n},{k},{j})"),
                    d_const(n, k, 0, j, k)?,
                    crofton_const(n - j, k, k - j, n),
                    1e-12,
                ));
            }
        }
    }
    parts.push(relative_part("c0(3,2,0,1,0) = pi".into(), c0_const(3, 2, 0, 1, 0)?, std::f64::consts::PI, 1e-12));
    parts.push(relative_part("kappa_3 = 4pi/3".into(), kappa(3), 4.0 * std::f64::consts::PI / 3.0, 1e-12));
    Ok(CheckReport::worst_of(format!("constant identities n <= {max_n}"), parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_d_small() {
        let r = check_lemma_d(5, 2, 1, 50, 3).unwrap();
        assert!(r.passed, "{r}");
    }

    #[test]
    fn constants() {
        let r = check_constant_identities(10).unwrap();
        assert!(r.passed, "{r}");
    }

    #[test]
    fn uniqueness_skips_singleton_range() {
        let r = check_uniqueness_q(3, 2, 1, 0, &ConvexBody::unit_ball(3), 2, 100, 1).unwrap();
        assert!(r.passed && r.details.contains("skipped"));
    }
}
