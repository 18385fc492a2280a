use crate::constants::factorial;
use crate::error::{Error, Result};

use super::{Flat, Matrix, Subspace, Vector};

/// Volume of the parallelepiped spanned by the columns of `m`, via a
/// column-pivoted QR factorisation: `∏ |R_ii|`.
fn gram_root(m: &Matrix) -> f64 {
    let (n, q) = m.shape();
    if q == 0 {
        return 1.0;
    }
    if q > n {
        return 0.0;
    }
    let r = m.clone().col_piv_qr().r();
    let mut vol = 1.0;
    for i in 0..q {
        vol *= r[(i, i)].abs();
    }
    if vol < 1e-14 {
        0.0
    } else {
        vol
    }
}

fn stack(vectors: &[Vector], extra: Option<&Subspace>) -> Option<Matrix> {
    let n = vectors
        .first()
        .map(|v| v.len())
        .or_else(|| extra.map(|s| s.ambient_dim()))?;
    let mut cols: Vec<Vector> = vectors.to_vec();
    if let Some(s) = extra {
        cols.extend(s.basis());
    }
    if cols.is_empty() {
        return Some(Matrix::zeros(n, 0));
    }
    Some(Matrix::from_columns(&cols))
}

/// `∇_q(x_1..x_q)`: q-volume of the parallelepiped spanned by the vectors.
pub fn nabla(vectors: &[Vector]) -> f64 {
    match stack(vectors, None) {
        Some(m) => gram_root(&m),
        None => 1.0,
    }
}

/// `Δ_q(x_0..x_q)`: q-volume of the simplex `conv{x_0..x_q}`.
pub fn delta(points: &[Vector]) -> f64 {
    let Some((first, rest)) = points.split_first() else {
        return 0.0;
    };
    let diffs: Vec<Vector> = rest.iter().map(|x| x - first).collect();
    nabla(&diffs) / factorial(diffs.len())
}

/// `∇_{q,r}(x, M) = ∇_{q+r}(x_1..x_q, u_1..u_r)` for an orthonormal basis of `M`.
pub fn nabla_mixed(vectors: &[Vector], m: &Subspace) -> f64 {
    match stack(vectors, Some(m)) {
        Some(mat) => gram_root(&mat),
        None => 1.0,
    }
}

/// Subspace determinant `[L, M]`; equals 1 when either argument is `{o}`.
pub fn subspace_det(l: &Subspace, m: &Subspace) -> Result<f64> {
    let n = l.ambient_dim();
    if l.dim() + m.dim() > n {
        return Err(Error::domain(format!(
            "subspace determinant needs dim L + dim M <= n, got {} + {} > {n}",
            l.dim(),
            m.dim()
        )));
    }
    if l.dim() == 0 || m.dim() == 0 {
        return Ok(1.0);
    }
    Ok(nabla_mixed(&l.basis(), m))
}

/// Distance from `x` to the flat `E`.
pub fn dist_point_flat(x: &Vector, e: &Flat) -> f64 {
    e.direction().distance(&(x - e.offset()))
}

/// Euclidean distance between the flat `E = M + z` and the subspace `L`:
/// the residual of `z` against `M + L`.
pub fn dist_flat_subspace(e: &Flat, l: &Subspace) -> f64 {
    e.direction().sum(l).distance(e.offset())
}

fn check_d_dims(e: &Flat, l0: &Subspace) -> Result<()> {
    let n = e.ambient_dim();
    if e.dim() + l0.dim() + 1 > n {
        return Err(Error::domain(format!(
            "D(E, L0) needs dim E + dim L0 <= n - 1, got {} + {} with n = {n}",
            e.dim(),
            l0.dim()
        )));
    }
    Ok(())
}

/// `D(E, L0) = d(E, L0) [lin E, L0]`, the product form used by the estimators.
pub fn d_weight(e: &Flat, l0: &Subspace) -> Result<f64> {
    check_d_dims(e, l0)?;
    Ok(dist_flat_subspace(e, l0) * subspace_det(e.direction(), l0)?)
}

/// `D(E, L0) = d(o, E) [span E, L0]`, straight from the definition.
pub fn d_weight_definitional(e: &Flat, l0: &Subspace) -> Result<f64> {
    check_d_dims(e, l0)?;
    let dist = e.offset().norm();
    if dist <= 1e-300 {
        return Ok(0.0);
    }
    let span = e.linear_span();
    if span.dim() + l0.dim() > e.ambient_dim() {
        return Ok(0.0);
    }
    Ok(dist * subspace_det(&span, l0)?)
}

/// `D(aff{x_0..x_q}, L0) = (1/q!) ∇_{q+1,r}(x, L0) / Δ_q(x)`.
pub fn d_weight_from_points(points: &[Vector], l0: &Subspace) -> Result<f64> {
    let q = points.len().saturating_sub(1);
    let n = l0.ambient_dim();
    if points.is_empty() || q + l0.dim() + 1 > n {
        return Err(Error::domain("point form of D(E, L0) needs 1 <= q + 1 and q + r <= n - 1"));
    }
    let simplex = delta(points);
    if simplex == 0.0 {
        return Err(Error::Degenerate("points are affinely dependent".into()));
    }
    Ok(nabla_mixed(points, l0) / (factorial(q) * simplex))
}
