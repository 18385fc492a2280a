use crate::constants::kappa;
use crate::error::{Error, Result};

use super::{orthonormalize, Flat, Matrix, RngStream, Subspace, Vector};

/// Orthonormalised Gaussian frame of `k` vectors in `R^m`, resampled on the
/// (probability zero) event of numerical rank deficiency.
fn gaussian_frame(m: usize, k: usize, rng: &mut RngStream) -> Subspace {
    if k == 0 {
        return Subspace::trivial(m);
    }
    loop {
        let vs: Vec<Vector> = (0..k).map(|_| rng.normal_vector(m)).collect();
        if let Ok(s) = orthonormalize(&vs) {
            return s;
        }
    }
}

/// Uniform unit vector in the subspace `s` (ambient coordinates).
pub fn uniform_on_sphere(s: &Subspace, rng: &mut RngStream) -> Vector {
    loop {
        let g = rng.normal_vector(s.dim());
        let norm = g.norm();
        if norm > 1e-12 {
            return s.embed(&(g / norm));
        }
    }
}

/// Uniform point in the radius-`radius` ball of the subspace `s`.
pub fn uniform_in_ball(s: &Subspace, radius: f64, rng: &mut RngStream) -> Vector {
    let d = s.dim();
    if d == 0 {
        return Vector::zeros(s.ambient_dim());
    }
    let dir = uniform_on_sphere(s, rng);
    dir * (radius * rng.uniform().powf(1.0 / d as f64))
}

/// Draw from the invariant probability measure on `G(n, k)`.
pub fn sample_grassmannian(n: usize, k: usize, rng: &mut RngStream) -> Result<Subspace> {
    if k > n {
        return Err(Error::domain(format!("G(n, k) needs k <= n, got n = {n}, k = {k}")));
    }
    Ok(gaussian_frame(n, k, rng))
}

/// Draw from the invariant probability measure on `G(L, q)` for `q ≤ dim L`,
/// by sampling in `L`'s frame coordinates.
pub fn sample_grassmannian_within(l: &Subspace, q: usize, rng: &mut RngStream) -> Result<Subspace> {
    let k = l.dim();
    if q > k {
        return Err(Error::domain(format!("G(L, q) needs q <= dim L, got q = {q}, dim L = {k}")));
    }
    if q == k {
        return Ok(l.clone());
    }
    let local = gaussian_frame(k, q, rng);
    Ok(Subspace::from_frame_unchecked(l.frame() * local.frame()))
}

/// Draw from the invariant probability measure on `G(L0, k)`: `L0 ⊕ W` with `W`
/// spanned by Gaussian vectors projected onto `L0⊥`.
pub fn sample_grassmannian_containing(l0: &Subspace, k: usize, rng: &mut RngStream) -> Result<Subspace> {
    let n = l0.ambient_dim();
    let r = l0.dim();
    if k < r || k > n {
        return Err(Error::domain(format!(
            "G(L0, k) needs dim L0 <= k <= n, got dim L0 = {r}, k = {k}, n = {n}"
        )));
    }
    if k == r {
        return Ok(l0.clone());
    }
    loop {
        let mut vs = l0.basis();
        vs.extend((0..k - r).map(|_| l0.reject(&rng.normal_vector(n))));
        if let Ok(s) = orthonormalize(&vs) {
            return Ok(s);
        }
    }
}

/// Haar-distributed orthogonal map that acts on `L0⊥` and is the identity on `L0`.
pub fn sample_rotation_fixing(l0: &Subspace, rng: &mut RngStream) -> Result<Matrix> {
    let n = l0.ambient_dim();
    let r = l0.dim();
    if r >= n {
        return Err(Error::domain("rotation fixing L0 needs dim L0 < n"));
    }
    let m = n - r;
    let g = Matrix::from_fn(m, m, |_, _| rng.normal());
    let qr = g.qr();
    let mut q = qr.q();
    let rdiag = qr.r().diagonal();
    for (i, d) in rdiag.iter().enumerate() {
        if *d < 0.0 {
            q.column_mut(i).neg_mut();
        }
    }
    let c = l0.complement();
    let p = l0.frame() * l0.frame().transpose();
    Ok(p + c.frame() * q * c.frame().transpose())
}

/// Draws a `q`-flat in `L` from the invariant measure `μ_q^L` restricted to
/// flats meeting the radius-`radius` ball, and returns it with the total mass
/// `κ_{k-q} radius^{k-q}` of that restriction as importance weight.
pub fn sample_hitting_flat(l: &Subspace, q: usize, radius: f64, rng: &mut RngStream) -> Result<(Flat, f64)> {
    let k = l.dim();
    if q > k {
        return Err(Error::domain(format!("A(L, q) needs q <= dim L, got q = {q}, dim L = {k}")));
    }
    if !(radius > 0.0) {
        return Err(Error::domain("reference radius must be positive"));
    }
    let codim = k - q;
    if codim == 0 {
        return Ok((Flat::linear(l.clone()), 1.0));
    }
    let local_m = gaussian_frame(k, q, rng);
    let m = Subspace::from_frame_unchecked(l.frame() * local_m.frame());
    // Gaussian in L's coordinates, projected off M: isotropic in M⊥ ∩ L.
    let z = loop {
        let g = local_m.reject(&rng.normal_vector(k));
        let norm = g.norm();
        if norm > 1e-12 {
            let rad = radius * rng.uniform().powf(1.0 / codim as f64);
            break l.embed(&(g * (rad / norm)));
        }
    };
    let weight = kappa(codim) * radius.powi(codim as i32);
    Ok((Flat::new(m, &z), weight))
}

/// Uniform translation vector in the radius-`radius` ball of `L⊥`, with weight
/// `κ_{n-k} radius^{n-k}`.
pub fn sample_translate_in_complement(l: &Subspace, radius: f64, rng: &mut RngStream) -> Result<(Vector, f64)> {
    let n = l.ambient_dim();
    let k = l.dim();
    if k >= n {
        return Err(Error::domain("translation in L⊥ needs dim L < n"));
    }
    if !(radius > 0.0) {
        return Err(Error::domain("reference radius must be positive"));
    }
    let codim = n - k;
    let x = loop {
        let g = l.reject(&rng.normal_vector(n));
        let norm = g.norm();
        if norm > 1e-12 {
            break g * (radius * rng.uniform().powf(1.0 / codim as f64) / norm);
        }
    };
    Ok((x, kappa(codim) * radius.powi(codim as i32)))
}
