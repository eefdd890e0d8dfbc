//! Small dense linear algebra: one-sided Jacobi SVD and null spaces.
//!
//! Matrices here are at most a few dozen rows by `n ≤ 8` columns, so a
//! Hestenes sweep is both accurate (singular values are computed from the
//! matrix itself, not from `AᵀA`) and fast enough.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(&self.data)
    }
}

/// Singular values and right singular vectors (columns of `v`).
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// `v[j]` is the right singular vector paired with `singular_values[j]`.
    pub v: Vec<Vec<f64>>,
}

impl Svd {
    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.iter().fold(0.0_f64, |m, s| m.max(*s))
    }
}

const MAX_SWEEPS: usize = 60;

/// One-sided Jacobi SVD of `a` (any shape).
pub fn svd(a: &Matrix) -> Svd {
    let (m, n) = (a.rows, a.cols);
    // Work on columns.
    let mut u: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| a.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = math::dot(&u[p], &u[p]);
                let beta = math::dot(&u[q], &u[q]);
                let gamma = math::dot(&u[p], &u[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + math::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    Svd {
        singular_values: u.iter().map(|col| math::norm(col)).collect(),
        v,
    }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Zero threshold for singular values: `tol · max(1, σ_max)`.
pub fn null_threshold(sigma_max: f64, tol: f64) -> f64 {
    tol * sigma_max.max(1.0)
}

/// Orthonormal basis of `{v : a·v ≈ 0}`.
///
/// Singular values at or below [`null_threshold`] count as zero. The basis
/// is canonicalised by projecting the coordinate axes `e1, e2, ...` onto
/// the null space and orthonormalising them in order, so the first vector
/// is the normalised projection of the earliest axis not orthogonal to the
/// null space. A zero matrix therefore yields `e1, ..., en`.
pub fn null_space(a: &Matrix, tol: f64) -> Vec<Vec<f64>> {
    let n = a.cols;
    let dec = svd(a);
    let thr = null_threshold(dec.max_singular_value(), tol);
    let raw: Vec<&Vec<f64>> = dec
        .singular_values
        .iter()
        .zip(&dec.v)
        .filter(|(s, _)| **s <= thr)
        .map(|(_, v)| v)
        .collect();
    let dim = raw.len();
    if dim == 0 {
        return Vec::new();
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for axis in 0..n {
        if basis.len() == dim {
            break;
        }
        // P e_axis = Σ_j v_j (v_j)_axis
        let mut w = vec![0.0; n];
        for v in &raw {
            let c = v[axis];
            for (wi, vi) in w.iter_mut().zip(v.iter()) {
                *wi += c * vi;
            }
        }
        for b in &basis {
            let c = math::dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        let norm = math::norm(&w);
        if norm > 1e-6 {
            basis.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Ratio of smallest to largest singular value of the matrix whose rows
/// are `vectors` (0 when all vanish).
pub fn relative_min_singular(vectors: &[Vec<f64>]) -> f64 {
    if vectors.is_empty() {
        return 1.0;
    }
    // Columns = vectors, so the singular values describe their span.
    let n = vectors[0].len();
    let mut m = Matrix::zeros(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            m.set(i, j, *x);
        }
    }
    let s = svd(&m).singular_values;
    let max = s.iter().fold(0.0_f64, |a, b| a.max(*b));
    if max == 0.0 {
        return 0.0;
    }
    s.iter().fold(f64::INFINITY, |a, b| a.min(*b)) / max
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut rows: Vec<Vec<f64>>) -> f64 {
    let n = rows.len();
    let mut det = 1.0;
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&i, &j| rows[i][c].abs().total_cmp(&rows[j][c].abs()))
            .unwrap_or(c);
        if rows[pivot][c] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            rows.swap(pivot, c);
            det = -det;
        }
        det *= rows[c][c];
        for r in (c + 1)..n {
            let f = rows[r][c] / rows[c][c];
            for k in c..n {
                rows[r][k] -= f * rows[c][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew(n: usize, entries: &[(usize, usize, f64)]) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for &(i, j, v) in entries {
            m.set(i, j, v);
            m.set(j, i, -v);
        }
        m
    }

    #[test]
    fn skew_3x3_null_direction_is_axis() {
        let k = skew(3, &[(0, 1, 1.0)]);
        let ns = null_space(&k, 1e-9);
        assert_eq!(ns.len(), 1);
        assert!((ns[0][2].abs() - 1.0).abs() < 1e-15);
        assert!(ns[0][0].abs() < 1e-15 && ns[0][1].abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_gives_coordinate_axes() {
        let ns = null_space(&Matrix::zeros(3, 3), 1e-9);
        assert_eq!(
            ns,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0]
            ]
        );
    }

    #[test]
    fn nonsingular_skew_2x2_has_empty_null_space() {
        assert!(null_space(&skew(2, &[(0, 1, 1.0)]), 1e-9).is_empty());
    }

    #[test]
    fn generic_skew_3x3_null_is_axial_vector() {
        // K = [[0, c, -b], [-c, 0, a], [b, -a, 0]] has null vector (a, b, c).
        let (a, b, c) = (0.3, -1.2, 2.0);
        let k = skew(3, &[(0, 1, c), (0, 2, -b), (1, 2, a)]);
        let ns = null_space(&k, 1e-9);
        assert_eq!(ns.len(), 1);
        let norm = libm::sqrt(a * a + b * b + c * c);
        let cross = [
            ns[0][1] * c / norm - ns[0][2] * b / norm,
            ns[0][2] * a / norm - ns[0][0] * c / norm,
            ns[0][0] * b / norm - ns[0][1] * a / norm,
        ];
        assert!(math::max_abs(&cross) < 1e-12);
        assert!(math::max_abs(&k.mul_vec(&ns[0])) < 1e-12);
    }

    #[test]
    fn svd_recovers_singular_values() {
        let m = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -4.0], vec![0.0, 0.0]]);
        let mut s = svd(&m).singular_values;
        s.sort_by(f64::total_cmp);
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn determinant_of_permutation() {
        let d = determinant(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(d, -1.0);
    }
}
