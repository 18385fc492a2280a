use crate::error::{Error, Result};

use super::{Matrix, Vector};

/// Orthonormality tolerance for frames, and the relative residual below which
/// a vector counts as linearly dependent.
pub const ORTHO_TOL: f64 = 1e-10;

/// One Gram–Schmidt step with a re-orthogonalisation pass. Returns the
/// residual of `v` against the (orthonormal) columns collected so far.
fn residual(columns: &[Vector], v: &Vector) -> Vector {
    let mut w = v.clone();
    for _ in 0..2 {
        for c in columns {
            let coef = c.dot(&w);
            w.axpy(-coef, c, 1.0);
        }
    }
    w
}

fn frame_from_columns(n: usize, columns: &[Vector]) -> Matrix {
    if columns.is_empty() {
        Matrix::zeros(n, 0)
    } else {
        Matrix::from_columns(columns)
    }
}

/// Orthonormalises linearly independent vectors into a [`Subspace`].
///
/// Fails with [`Error::Degenerate`] when some vector's residual against the
/// previous ones is below [`ORTHO_TOL`] relative to its norm.
pub fn orthonormalize(vectors: &[Vector]) -> Result<Subspace> {
    let n = match vectors.first() {
        Some(v) => v.len(),
        None => return Err(Error::Degenerate("no vectors to orthonormalize".into())),
    };
    let mut columns: Vec<Vector> = Vec::with_capacity(vectors.len());
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::domain(format!(
                "vector {i} has length {}, expected {n}",
                v.len()
            )));
        }
        let scale = v.norm();
        let w = residual(&columns, v);
        let rn = w.norm();
        if scale == 0.0 || rn < ORTHO_TOL * scale.max(1.0) {
            return Err(Error::Degenerate(format!(
                "vector {i} is linearly dependent on its predecessors (residual {rn:.3e})"
            )));
        }
        columns.push(w / rn);
    }
    Ok(Subspace {
        frame: frame_from_columns(n, &columns),
    })
}

/// A linear subspace of `R^n` stored as an orthonormal frame (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    frame: Matrix,
}

impl Subspace {
    /// The trivial subspace `{o}` of `R^n`.
    pub fn trivial(n: usize) -> Self {
        Subspace { frame: Matrix::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Subspace { frame: Matrix::identity(n, n) }
    }

    /// Span of the listed coordinate axes.
    pub fn coordinate(n: usize, axes: &[usize]) -> Self {
        let cols: Vec<Vector> = axes
            .iter()
            .map(|&a| {
                let mut e = Vector::zeros(n);
                e[a] = 1.0;
                e
            })
            .collect();
        Subspace { frame: frame_from_columns(n, &cols) }
    }

    /// Wraps a frame that is already orthonormal, checking the invariant.
    pub fn from_orthonormal_frame(frame: Matrix) -> Result<Self> {
        let gram = frame.transpose() * &frame;
        let k = frame.ncols();
        let err = (gram - Matrix::identity(k, k)).abs().max();
        if k > 0 && err > ORTHO_TOL {
            return Err(Error::Degenerate(format!("frame is not orthonormal (error {err:.3e})")));
        }
        Ok(Subspace { frame })
    }

    pub(crate) fn from_frame_unchecked(frame: Matrix) -> Self {
        Subspace { frame }
    }

    /// Span of arbitrary vectors; dependent vectors are dropped.
    pub fn span(n: usize, vectors: &[Vector]) -> Self {
        let mut columns: Vec<Vector> = Vec::new();
        for v in vectors {
            let scale = v.norm();
            if scale == 0.0 {
                continue;
            }
            let w = residual(&columns, v);
            let rn = w.norm();
            if rn > ORTHO_TOL * scale.max(1.0) {
                columns.push(w / rn);
            }
        }
        Subspace { frame: frame_from_columns(n, &columns) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    pub fn basis(&self) -> Vec<Vector> {
        self.frame.column_iter().map(|c| c.into_owned()).collect()
    }

    /// Frame coordinates `F^T x`.
    pub fn coords(&self, x: &Vector) -> Vector {
        self.frame.tr_mul(x)
    }

    /// Embeds frame coordinates, `F t`.
    pub fn embed(&self, t: &Vector) -> Vector {
        &self.frame * t
    }

    /// Orthogonal projection `p(x | self)`.
    pub fn project(&self, x: &Vector) -> Vector {
        if self.dim() == 0 {
            return Vector::zeros(x.len());
        }
        self.embed(&self.coords(x))
    }

    /// Projection onto the orthogonal complement.
    pub fn reject(&self, x: &Vector) -> Vector {
        x - self.project(x)
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        self.reject(x).norm()
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.distance(x) <= tol * x.norm().max(1.0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.frame.column_iter().all(|c| self.contains(&c.into_owned(), 1e-9))
    }

    /// `self + other`.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis();
        vs.extend(other.basis());
        Subspace::span(self.ambient_dim(), &vs)
    }

    /// Orthogonal complement in `R^n`.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient_dim();
        let mut vs = self.basis();
        vs.extend((0..n).map(|i| {
            let mut e = Vector::zeros(n);
            e[i] = 1.0;
            e
        }));
        let all = Subspace::span(n, &vs);
        let k = self.dim();
        Subspace { frame: all.frame.columns(k, n - k).into_owned() }
    }

    /// Orthogonal complement of `self` inside `outer` (assumes `self ⊆ outer`).
    pub fn complement_within(&self, outer: &Subspace) -> Subspace {
        let mut vs = self.basis();
        vs.extend(outer.basis());
        let all = Subspace::span(self.ambient_dim(), &vs);
        let k = self.dim();
        let m = all.dim();
        Subspace { frame: all.frame.columns(k, m - k).into_owned() }
    }

    /// Image under a linear map (assumed orthogonal).
    pub fn transformed(&self, map: &Matrix) -> Subspace {
        Subspace::span(self.ambient_dim(), &(map * &self.frame).column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
    }
}

/// An affine flat `E = direction + offset` with `offset ⟂ direction`.
#[derive(Clone, Debug, PartialEq)]
pub struct Flat {
    direction: Subspace,
    offset: Vector,
}

impl Flat {
    /// The flat through `point` with the given direction space.
    pub fn new(direction: Subspace, point: &Vector) -> Self {
        let offset = direction.reject(point);
        Flat { direction, offset }
    }

    /// The 0-flat `{x}`.
    pub fn point(x: &Vector) -> Self {
        Flat { direction: Subspace::trivial(x.len()), offset: x.clone() }
    }

    /// The linear subspace `L` viewed as a flat.
    pub fn linear(direction: Subspace) -> Self {
        let n = direction.ambient_dim();
        Flat { direction, offset: Vector::zeros(n) }
    }

    pub fn direction(&self) -> &Subspace {
        &self.direction
    }

    /// `p(o | E)`, the foot of the perpendicular from the origin.
    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.offset.len()
    }

    /// Point with flat coordinates `t`.
    pub fn param(&self, t: &Vector) -> Vector {
        &self.offset + self.direction.embed(t)
    }

    /// Flat coordinates of the projection of `x` onto the flat.
    pub fn coords(&self, x: &Vector) -> Vector {
        self.direction.coords(&(x - &self.offset))
    }

    /// `E + span{u}`.
    pub fn extend(&self, u: &Vector) -> Flat {
        let mut vs = self.direction.basis();
        vs.push(u.clone());
        let dir = Subspace::span(self.ambient_dim(), &vs);
        Flat::new(dir, &self.offset)
    }

    /// `span E = lin(E) + span{p(o|E)}`.
    pub fn linear_span(&self) -> Subspace {
        let mut vs = self.direction.basis();
        vs.push(self.offset.clone());
        Subspace::span(self.ambient_dim(), &vs)
    }
}
