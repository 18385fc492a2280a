use itertools::Itertools;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{Subspace, Vector};

/// Slack allowed on constraint residuals.
pub const FEAS_TOL: f64 = 1e-9;
/// Vertices closer than this are merged.
pub const MERGE_TOL: f64 = 1e-8;
/// Highest dimension for which volumes and boundary measures are exact.
pub const MAX_EXACT_DIM: usize = 3;

/// Bounded, nonempty polytope `{x : <a_i, x> <= b_i}` with unit normals.
/// Vertices are enumerated once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<Vector>,
    offsets: Vec<f64>,
    vertices: Vec<Vector>,
}

fn normalize_rows(normals: Vec<Vector>, offsets: Vec<f64>) -> Result<(Vec<Vector>, Vec<f64>)> {
    if normals.len() != offsets.len() {
        return Err(Error::domain(format!(
            "{} normals but {} offsets",
            normals.len(),
            offsets.len()
        )));
    }
    let mut ns = Vec::with_capacity(normals.len());
    let mut bs = Vec::with_capacity(offsets.len());
    for (i, (a, b)) in normals.into_iter().zip(offsets).enumerate() {
        let norm = a.norm();
        if !(norm > 0.0) || !b.is_finite() {
            return Err(Error::domain(format!("constraint {i} has a zero normal or a non-finite offset")));
        }
        ns.push(a / norm);
        bs.push(b / norm);
    }
    Ok((ns, bs))
}

/// Brute-force vertex enumeration over `d`-subsets of the constraints.
fn enumerate_vertices(dim: usize, normals: &[Vector], offsets: &[f64]) -> Vec<Vector> {
    let feasible = |x: &Vector| normals.iter().zip(offsets).all(|(a, b)| a.dot(x) <= b + FEAS_TOL);
    if dim == 0 {
        let o = Vector::zeros(0);
        return if offsets.iter().all(|&b| b >= -FEAS_TOL) { vec![o] } else { vec![] };
    }
    let mut vertices: Vec<Vector> = Vec::new();
    for subset in (0..normals.len()).combinations(dim) {
        let a = DMatrix::from_fn(dim, dim, |r, c| normals[subset[r]][c]);
        let b = Vector::from_iterator(dim, subset.iter().map(|&i| offsets[i]));
        let lu = a.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        if !feasible(&x) {
            continue;
        }
        if vertices.iter().all(|v| (v - &x).norm() > MERGE_TOL) {
            vertices.push(x);
        }
    }
    vertices
}

/// True when the recession cone `{d : A d <= 0}` is `{0}`.
fn recession_cone_trivial(dim: usize, normals: &[Vector]) -> bool {
    let all = Subspace::span(dim, normals);
    if all.dim() < dim {
        return false;
    }
    // A pointed nonzero cone has an extreme ray with dim - 1 independent active rows.
    for subset in (0..normals.len()).combinations(dim - 1) {
        let rows: Vec<Vector> = subset.iter().map(|&i| normals[i].clone()).collect();
        let s = Subspace::span(dim, &rows);
        if s.dim() != dim - 1 {
            continue;
        }
        let ray = s.complement().basis()[0].clone();
        for d in [ray.clone(), -ray] {
            if normals.iter().all(|a| a.dot(&d) <= 1e-12) {
                return false;
            }
        }
    }
    true
}

/// Area of a planar convex polygon given by (unordered) 2-d points.
fn convex_polygon_area(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let cx = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.partial_cmp(&tb).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut twice = 0.0;
    for i in 0..sorted.len() {
        let (x0, y0) = sorted[i];
        let (x1, y1) = sorted[(i + 1) % sorted.len()];
        twice += x0 * y1 - x1 * y0;
    }
    twice.abs() / 2.0
}

impl HPolytope {
    /// Builds a polytope, rejecting empty or unbounded constraint systems.
    pub fn new(normals: Vec<Vector>, offsets: Vec<f64>) -> Result<Self> {
        let dim = match normals.first() {
            Some(a) => a.len(),
            None => return Err(Error::domain("an H-polytope needs at least one constraint")),
        };
        if normals.iter().any(|a| a.len() != dim) {
            return Err(Error::domain("all normals must have the same length"));
        }
        let (normals, offsets) = normalize_rows(normals, offsets)?;
        if !recession_cone_trivial(dim, &normals) {
            return Err(Error::domain("H-polytope is unbounded"));
        }
        let vertices = enumerate_vertices(dim, &normals, &offsets);
        if vertices.is_empty() {
            return Err(Error::domain("H-polytope is empty"));
        }
        Ok(HPolytope { dim, normals, offsets, vertices })
    }

    /// Constraint system known to be bounded (e.g. a section of a bounded
    /// polytope). Rows with vanishing normals must already be removed.
    /// Returns `None` when the system is infeasible.
    pub(crate) fn from_bounded(dim: usize, normals: Vec<Vector>, offsets: Vec<f64>) -> Option<Self> {
        let (normals, offsets) = normalize_rows(normals, offsets).ok()?;
        let vertices = enumerate_vertices(dim, &normals, &offsets);
        if vertices.is_empty() {
            return None;
        }
        Some(HPolytope { dim, normals, offsets, vertices })
    }

    /// The box `[lower, upper]` as a polytope.
    pub fn from_box(lower: &Vector, upper: &Vector) -> Self {
        let n = lower.len();
        let mut normals = Vec::with_capacity(2 * n);
        let mut offsets = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = Vector::zeros(n);
            e[i] = 1.0;
            normals.push(e.clone());
            offsets.push(upper[i]);
            normals.push(-e);
            offsets.push(-lower[i]);
        }
        let vertices = (0..1usize << n)
            .map(|mask| Vector::from_fn(n, |i, _| if mask >> i & 1 == 1 { upper[i] } else { lower[i] }))
            .collect();
        HPolytope { dim: n, normals, offsets, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(a, b)| a.dot(x) <= b + tol)
    }

    pub fn support(&self, u: &Vector) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn centroid(&self) -> Vector {
        let mut c = Vector::zeros(self.dim);
        for v in &self.vertices {
            c += v;
        }
        c / self.vertices.len() as f64
    }

    fn check_exact_dim(&self) -> Result<()> {
        if self.dim > MAX_EXACT_DIM {
            return Err(Error::NotAvailable(format!(
                "exact polytope measures are implemented for dimension <= {MAX_EXACT_DIM}, got {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// Indices of distinct facet hyperplanes.
    fn distinct_facets(&self) -> Vec<usize> {
        let mut kept: Vec<usize> = Vec::new();
        for i in 0..self.normals.len() {
            let dup = kept.iter().any(|&j| {
                (&self.normals[i] - &self.normals[j]).norm() < 1e-9 && (self.offsets[i] - self.offsets[j]).abs() < 1e-9
            });
            if !dup {
                kept.push(i);
            }
        }
        kept
    }

    /// (d-1)-volume of the facet lying in constraint hyperplane `i`.
    fn facet_measure(&self, i: usize) -> f64 {
        let a = &self.normals[i];
        let b = self.offsets[i];
        let on: Vec<&Vector> = self
            .vertices
            .iter()
            .filter(|v| (a.dot(v) - b).abs() <= MERGE_TOL)
            .collect();
        if on.is_empty() {
            return 0.0;
        }
        match self.dim {
            1 => 1.0,
            2 => {
                let t = Vector::from_column_slice(&[-a[1], a[0]]);
                let (lo, hi) = on
                    .iter()
                    .map(|v| v.dot(&t))
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
                hi - lo
            }
            3 => {
                let plane = Subspace::span(3, std::slice::from_ref(a)).complement();
                let basis = plane.basis();
                let pts: Vec<(f64, f64)> = on.iter().map(|v| (v.dot(&basis[0]), v.dot(&basis[1]))).collect();
                convex_polygon_area(&pts)
            }
            _ => unreachable!("facet_measure called above the exact dimension"),
        }
    }

    /// d-dimensional volume.
    pub fn volume(&self) -> Result<f64> {
        self.check_exact_dim()?;
        Ok(match self.dim {
            0 => 1.0,
            1 => {
                let (lo, hi) = self
                    .vertices
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[0]), hi.max(v[0])));
                hi - lo
            }
            2 => convex_polygon_area(&self.vertices.iter().map(|v| (v[0], v[1])).collect::<Vec<_>>()),
            _ => {
                // Cone decomposition from the vertex centroid.
                let c = self.centroid();
                self.distinct_facets()
                    .into_iter()
                    .map(|i| {
                        let height = self.offsets[i] - self.normals[i].dot(&c);
                        height.max(0.0) * self.facet_measure(i) / self.dim as f64
                    })
                    .sum()
            }
        })
    }

    /// Total (d-1)-measure of the boundary.
    pub fn boundary_measure(&self) -> Result<f64> {
        self.check_exact_dim()?;
        if self.dim == 0 {
            return Ok(0.0);
        }
        if self.dim == 1 {
            // Two endpoints, or one if degenerate.
            return Ok(if self.vertices.len() >= 2 { 2.0 } else { 1.0 });
        }
        Ok(self.distinct_facets().into_iter().map(|i| self.facet_measure(i)).sum())
    }
}
