//! Simplex geometry.
//!
//! A [`Simplex`] is the convex hull of `n + 1` affinely independent points in
//! `R^n`. Every point of it is addressed by a [`BarycentricPoint`], the weights
//! `(xi_0, ..., xi_n)` of its convex combination of the vertices. The cyclic
//! group generated by `i -> (i + 1) mod (n + 1)` acts on those weights through
//! [`CyclicPermutation`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when validating barycentric coordinates.
pub const BARY_TOLERANCE: f64 = 1e-12;

/// Coordinates below `-OUTSIDE_TOLERANCE` flag a point as outside the simplex.
pub const OUTSIDE_TOLERANCE: f64 = 1e-9;

/// Relative degeneracy threshold: a simplex is rejected when its volume is
/// below `DEGENERACY_TOLERANCE * (max edge length)^n`.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// A nondegenerate n-simplex with cached volume and barycenter.
#[derive(Debug, Clone)]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
    volume: f64,
    barycenter: Vec<f64>,
    // LU factors of the (n+1)x(n+1) system [v_0 .. v_n; 1 .. 1].
    affine_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

/// JSON form of a simplex: `{"vertices": [[x..], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexDoc {
    pub vertices: Vec<Vec<f64>>,
}

impl Simplex {
    /// Builds a simplex from `n + 1` vertices of length `n`.
    ///
    /// ```
    /// use hermite_simplex::Simplex;
    /// let t = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    /// assert!((t.volume() - 0.5).abs() < 1e-15);
    /// ```
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let count = vertices.len();
        if count < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: count });
        }
        let dim = count - 1;
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("vertex coordinates must be finite".into()));
            }
        }

        let edges = DMatrix::from_fn(dim, dim, |row, col| vertices[col + 1][row] - vertices[0][row]);
        let volume = edges.determinant().abs() / factorial(dim);

        let mut max_edge = 0.0_f64;
        for i in 0..count {
            for j in (i + 1)..count {
                max_edge = max_edge.max(distance(&vertices[i], &vertices[j]));
            }
        }
        let threshold = DEGENERACY_TOLERANCE * max_edge.powi(dim as i32);
        if volume.is_nan() || volume < threshold || volume == 0.0 {
            return Err(Error::DegenerateSimplex { volume, threshold });
        }

        let barycenter = (0..dim)
            .map(|k| vertices.iter().map(|v| v[k]).sum::<f64>() / count as f64)
            .collect();

        let affine = DMatrix::from_fn(count, count, |row, col| {
            if row < dim {
                vertices[col][row]
            } else {
                1.0
            }
        });

        Ok(Self { vertices, volume, barycenter, affine_lu: affine.lu() })
    }

    /// The standard simplex `conv{0, e_1, ..., e_n}` with volume `1/n!`.
    pub fn unit(dim: usize) -> Result<Self> {
        let mut vertices = vec![vec![0.0; dim]];
        for i in 0..dim {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            vertices.push(v);
        }
        Self::new(vertices)
    }

    /// The 1-simplex `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![vec![a], vec![b]])
    }

    pub fn from_doc(doc: SimplexDoc) -> Result<Self> {
        Self::new(doc.vertices)
    }

    pub fn to_doc(&self) -> SimplexDoc {
        SimplexDoc { vertices: self.vertices.clone() }
    }

    /// The dimension `n`.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn barycenter(&self) -> &[f64] {
        &self.barycenter
    }

    /// Barycentric coordinates of the barycenter, `(1/(n+1), ..., 1/(n+1))`.
    pub fn barycenter_point(&self) -> BarycentricPoint {
        BarycentricPoint::barycenter(self.dim())
    }

    /// Barycentric coordinates of vertex `i`.
    pub fn vertex_point(&self, i: usize) -> BarycentricPoint {
        BarycentricPoint::vertex(self.dim(), i)
    }

    /// Solves `p = sum xi_i v_i`, `sum xi_i = 1` for the barycentric coordinates of `p`.
    pub fn to_barycentric(&self, p: &[f64]) -> Result<Located> {
        let dim = self.dim();
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        let mut rhs = DVector::from_iterator(dim + 1, p.iter().copied().chain(std::iter::once(1.0)));
        if !self.affine_lu.solve_mut(&mut rhs) {
            // Unreachable for a validated simplex.
            return Err(Error::DegenerateSimplex { volume: self.volume, threshold: 0.0 });
        }
        let coords: Vec<f64> = rhs.iter().copied().collect();
        let outside = coords.iter().any(|&c| c < -OUTSIDE_TOLERANCE);
        Ok(Located { point: BarycentricPoint { coords }, outside })
    }

    /// Returns `sum xi_i v_i`.
    pub fn to_cartesian(&self, x: &BarycentricPoint) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.to_cartesian_into(x.coords(), &mut out);
        out
    }

    pub(crate) fn to_cartesian_into(&self, coords: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|c| *c = 0.0);
        for (w, v) in coords.iter().zip(&self.vertices) {
            for (o, c) in out.iter_mut().zip(v) {
                *o += w * c;
            }
        }
    }

    /// Splits the simplex into `n + 1` children through its barycenter; child
    /// `i` has vertex `v_i` replaced by the barycenter.
    pub fn subdivide_barycentric(&self) -> Result<Vec<Simplex>> {
        (0..=self.dim())
            .map(|i| {
                let mut vertices = self.vertices.clone();
                vertices[i] = self.barycenter.clone();
                Simplex::new(vertices)
            })
            .collect()
    }

    /// Applies `x -> A x + c` to every vertex.
    pub fn map_affine(&self, matrix: &[Vec<f64>], offset: &[f64]) -> Result<Simplex> {
        let dim = self.dim();
        if matrix.len() != dim || offset.len() != dim || matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.len() });
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                (0..dim)
                    .map(|r| offset[r] + matrix[r].iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
                    .collect()
            })
            .collect();
        Simplex::new(vertices)
    }
}

/// Result of [`Simplex::to_barycentric`]; `outside` is set when some
/// coordinate is below `-1e-9`, in which case `point` lies outside `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    pub point: BarycentricPoint,
    pub outside: bool,
}

/// Barycentric coordinates `(xi_0, ..., xi_n)` of a point of a simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BarycentricPoint {
    coords: Vec<f64>,
}

impl BarycentricPoint {
    /// Validates that the coordinates sum to one and are nonnegative, both to
    /// within `1e-12`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidPoint("need at least two coordinates".into()));
        }
        let sum: f64 = coords.iter().sum();
        if sum.is_nan() || (sum - 1.0).abs() > BARY_TOLERANCE {
            return Err(Error::InvalidPoint(format!("coordinates sum to {sum}")));
        }
        if let Some(c) = coords.iter().find(|&&c| c.is_nan() || c < -BARY_TOLERANCE) {
            return Err(Error::InvalidPoint(format!("negative coordinate {c}")));
        }
        Ok(Self { coords })
    }

    /// Wraps coordinates that are known to be a convex combination.
    pub(crate) fn new_unchecked(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn barycenter(dim: usize) -> Self {
        Self { coords: vec![1.0 / (dim + 1) as f64; dim + 1] }
    }

    pub fn vertex(dim: usize, i: usize) -> Self {
        let mut coords = vec![0.0; dim + 1];
        coords[i] = 1.0;
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of coordinates, `n + 1`.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn min_coord(&self) -> f64 {
        min_coord(&self.coords)
    }

    /// `t x + (1 - t) y`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        Self { coords }
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl TryFrom<Vec<f64>> for BarycentricPoint {
    type Error = Error;
    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<BarycentricPoint> for Vec<f64> {
    fn from(p: BarycentricPoint) -> Self {
        p.coords
    }
}

/// The power `sigma^shift` of the canonical cycle `0 -> 1 -> ... -> n -> 0`,
/// acting by `output_i = input_{(i + shift) mod (n + 1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicPermutation {
    order: usize,
    shift: usize,
}

impl CyclicPermutation {
    pub fn new(order: usize, shift: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter(format!("cycle order {order} must be at least 2")));
        }
        Ok(Self { order, shift: shift % order })
    }

    /// All `n + 1` elements of the cyclic group of order `n + 1`, identity first.
    pub fn group(order: usize) -> Result<Vec<Self>> {
        (0..order).map(|k| Self::new(order, k)).collect()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { order: self.order, len: other.order });
        }
        Self::new(self.order, self.shift + other.shift)
    }

    /// Index of the input coordinate that lands in output slot `i`.
    pub fn source_index(&self, i: usize) -> usize {
        (i + self.shift) % self.order
    }

    pub fn apply(&self, x: &BarycentricPoint) -> Result<BarycentricPoint> {
        if x.len() != self.order {
            return Err(Error::OrderMismatch { order: self.order, len: x.len() });
        }
        let mut coords = vec![0.0; self.order];
        permute_into(self.shift, x.coords(), &mut coords);
        Ok(BarycentricPoint { coords })
    }
}

/// Free-function form of [`CyclicPermutation::apply`].
pub fn apply_permutation(sigma: &CyclicPermutation, x: &BarycentricPoint) -> Result<BarycentricPoint> {
    sigma.apply(x)
}

pub(crate) fn permute_into(shift: usize, input: &[f64], out: &mut [f64]) {
    let order = input.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = input[(i + shift) % order];
    }
}

pub(crate) fn min_coord(coords: &[f64]) -> f64 {
    coords.iter().copied().fold(f64::INFINITY, f64::min)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn unit_triangle() {
        let t = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((t.volume() - 0.5).abs() < 1e-15);
        assert!(close(t.barycenter(), &[1.0 / 3.0, 1.0 / 3.0], 1e-15));
    }

    #[test]
    fn interval_volume() {
        let t = Simplex::interval(-1.0, 1.0).unwrap();
        assert_eq!(t.volume(), 2.0);
        assert_eq!(t.barycenter(), &[0.0]);
    }

    #[test]
    fn collinear_is_degenerate() {
        let err = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateSimplex { .. }));
    }

    #[test]
    fn nearly_flat_is_degenerate_at_any_scale() {
        for scale in [1e-6, 1.0, 1e6] {
            let v = vec![vec![0.0, 0.0], vec![scale, 0.0], vec![0.5 * scale, 1e-14 * scale]];
            assert!(matches!(Simplex::new(v), Err(Error::DegenerateSimplex { .. })));
        }
    }

    #[test]
    fn ragged_vertices_rejected() {
        let err = Simplex::new(vec![vec![0.0, 0.0], vec![1.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn barycentric_of_barycenter_and_vertex() {
        let t = Simplex::unit(2).unwrap();
        let b = t.to_barycentric(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(!b.outside);
        assert!(close(b.point.coords(), &[1.0 / 3.0; 3], 1e-14));
        let v = t.to_barycentric(&[1.0, 0.0]).unwrap();
        assert!(close(v.point.coords(), &[0.0, 1.0, 0.0], 1e-14));
    }

    #[test]
    fn outside_point_is_flagged_not_rejected() {
        let t = Simplex::unit(2).unwrap();
        let loc = t.to_barycentric(&[1.0, 1.0]).unwrap();
        assert!(loc.outside);
        assert!(close(loc.point.coords(), &[-1.0, 1.0, 1.0], 1e-14));
    }

    #[test]
    fn known_combination_in_3d() {
        let t = Simplex::new(vec![
            vec![0.3, -1.2, 0.5],
            vec![2.0, 0.1, -0.4],
            vec![-0.7, 1.5, 0.9],
            vec![0.4, 0.2, 2.2],
        ])
        .unwrap();
        let w = [0.2, 0.3, 0.4, 0.1];
        let p: Vec<f64> =
            (0..3).map(|k| (0..4).map(|i| w[i] * t.vertex(i)[k]).sum()).collect();
        let loc = t.to_barycentric(&p).unwrap();
        assert!(close(loc.point.coords(), &w, 1e-12));
    }

    #[test]
    fn to_cartesian_examples() {
        let t = Simplex::unit(2).unwrap();
        assert_eq!(t.to_cartesian(&t.vertex_point(0)), vec![0.0, 0.0]);
        assert!(close(&t.to_cartesian(&t.barycenter_point()), &[1.0 / 3.0, 1.0 / 3.0], 1e-15));
    }

    #[test]
    fn barycentric_point_validation() {
        assert!(BarycentricPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(BarycentricPoint::new(vec![0.5, 0.6]).is_err());
        assert!(BarycentricPoint::new(vec![1.1, -0.1]).is_err());
        assert!(BarycentricPoint::new(vec![1.0 + 5e-13, -5e-13]).is_ok());
    }

    #[test]
    fn permutation_examples() {
        let x = BarycentricPoint::new(vec![0.5, 0.3, 0.2]).unwrap();
        let id = CyclicPermutation::new(3, 0).unwrap();
        assert_eq!(id.apply(&x).unwrap(), x);

        let one = CyclicPermutation::new(3, 1).unwrap();
        let v0 = BarycentricPoint::vertex(2, 0);
        assert_eq!(one.apply(&v0).unwrap().coords(), &[0.0, 0.0, 1.0]);

        let thrice = one.apply(&one.apply(&one.apply(&x).unwrap()).unwrap()).unwrap();
        assert_eq!(thrice, x);
    }

    #[test]
    fn permutation_order_mismatch() {
        let sigma = CyclicPermutation::new(4, 1).unwrap();
        let x = BarycentricPoint::barycenter(2);
        assert!(matches!(sigma.apply(&x), Err(Error::OrderMismatch { order: 4, len: 3 })));
    }

    #[test]
    fn barycenter_is_fixed() {
        for n in 1..8 {
            let b = BarycentricPoint::barycenter(n);
            for sigma in CyclicPermutation::group(n + 1).unwrap() {
                assert_eq!(sigma.apply(&b).unwrap(), b);
            }
        }
    }

    #[test]
    fn subdivision_of_interval_and_triangle() {
        let t = Simplex::interval(2.0, 5.0).unwrap();
        let kids = t.subdivide_barycentric().unwrap();
        assert_eq!(kids[0].vertices(), &[vec![3.5], vec![5.0]]);
        assert_eq!(kids[1].vertices(), &[vec![2.0], vec![3.5]]);

        let tri = Simplex::unit(2).unwrap();
        for kid in tri.subdivide_barycentric().unwrap() {
            assert!((kid.volume() - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn subdivision_in_4d_preserves_volume() {
        let t = Simplex::new(vec![
            vec![0.1, 0.0, 0.3, -0.2],
            vec![1.3, 0.2, -0.1, 0.4],
            vec![-0.2, 1.1, 0.5, 0.0],
            vec![0.4, -0.3, 1.2, 0.6],
            vec![0.0, 0.5, 0.1, 1.4],
        ])
        .unwrap();
        let kids = t.subdivide_barycentric().unwrap();
        assert_eq!(kids.len(), 5);
        let total: f64 = kids.iter().map(Simplex::volume).sum();
        assert!((total - t.volume()).abs() <= 1e-10 * t.volume());
        for kid in &kids {
            assert!((kid.volume() - t.volume() / 5.0).abs() <= 1e-10 * t.volume());
        }
    }
}
