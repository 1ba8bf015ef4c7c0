use std::fmt;

use super::TensorError;

/// Dense square matrix of dimension 2 or 3, stored in a fixed 3×3 block.
///
/// Entries outside the leading `dim × dim` block are always zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    m: [[f64; 3]; 3],
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(dim) {
            row[i] = 1.0;
        }
        Self { dim, m }
    }

    /// Builds a matrix from rows; the row count fixes the dimension.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, TensorError> {
        let dim = rows.len();
        if !(dim == 2 || dim == 3) || rows.iter().any(|r| r.len() != dim) {
            return Err(TensorError::Shape(dim));
        }
        let mut m = [[0.0; 3]; 3];
        for (i, r) in rows.iter().enumerate() {
            m[i][..dim].copy_from_slice(r);
        }
        Ok(Self { dim, m })
    }

    pub(crate) fn from_block(dim: usize, m: [[f64; 3]; 3]) -> Self {
        Self { dim, m }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in self.m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t[j][i] = *v;
            }
        }
        Self { dim: self.dim, m: t }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = [[0.0; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                out[i][j] = (0..n).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Matrix { dim: n, m: out }
    }

    pub fn mul_vec(&self, v: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = (0..self.dim).map(|k| self.m[i][k] * v[k]).sum();
        }
        out
    }

    pub fn det(&self) -> f64 {
        det_block(self.dim, &self.m)
    }

    /// Largest absolute entry of `self · selfᵀ − I`.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.mul(&self.transpose());
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.m[i][j] - target).abs());
            }
        }
        worst
    }
}

fn det_block(dim: usize, m: &[[f64; 3]; 3]) -> f64 {
    if dim == 2 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    } else {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Symmetric positive-definite diffusion tensor in two or three dimensions.
#[derive(Clone, Copy, PartialEq)]
pub struct SymTensor {
    dim: usize,
    m: [[f64; 3]; 3],
}

impl SymTensor {
    /// Checked constructor from a full row-major block.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, TensorError> {
        let mat = Matrix::from_rows(rows)?;
        Self::from_matrix(&mat)
    }

    pub fn from_matrix(mat: &Matrix) -> Result<Self, TensorError> {
        let n = mat.dim;
        for i in 0..n {
            for j in 0..i {
                if mat.m[i][j] != mat.m[j][i] {
                    return Err(TensorError::NotSymmetric { i, j });
                }
            }
        }
        let t = Self { dim: n, m: mat.m };
        t.check_positive()?;
        Ok(t)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self, TensorError> {
        let dim = values.len();
        if !(dim == 2 || dim == 3) {
            return Err(TensorError::Shape(dim));
        }
        let mut m = [[0.0; 3]; 3];
        for (i, v) in values.iter().enumerate() {
            m[i][i] = *v;
        }
        let t = Self { dim, m };
        t.check_positive()?;
        Ok(t)
    }

    pub fn isotropic(dim: usize, d: f64) -> Result<Self, TensorError> {
        Self::diagonal(&vec![d; dim])
    }

    /// Sylvester's criterion on leading principal minors.
    fn check_positive(&self) -> Result<(), TensorError> {
        let m = &self.m;
        let finite = (0..self.dim).all(|i| (0..self.dim).all(|j| m[i][j].is_finite()));
        let m1 = m[0][0];
        let m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let ok = finite
            && m1 > 0.0
            && m2 > 0.0
            && (self.dim == 2 || det_block(3, m) > 0.0);
        if ok {
            Ok(())
        } else {
            Err(TensorError::NotPositiveDefinite)
        }
    }

    /// Symmetrizes `(a + aᵀ)/2` and validates positivity.
    pub(crate) fn symmetrized(mat: &Matrix) -> Result<Self, TensorError> {
        let n = mat.dim;
        let mut m = [[0.0; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = if i == j {
                    mat.m[i][i]
                } else {
                    0.5 * (mat.m[i][j] + mat.m[j][i])
                };
            }
        }
        let t = Self { dim: n, m };
        t.check_positive()?;
        Ok(t)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_block(self.dim, self.m)
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.m[i][i]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.m[i][j] == 0.0))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    pub fn det(&self) -> f64 {
        det_block(self.dim, &self.m)
    }

    /// Multiplies every entry by a positive factor.
    pub fn scaled(&self, factor: f64) -> Result<Self, TensorError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(TensorError::NonPositiveScale(factor));
        }
        let mut m = self.m;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v *= factor;
            }
        }
        Ok(Self { dim: self.dim, m })
    }

    pub(crate) fn block(&self) -> &[[f64; 3]; 3] {
        &self.m
    }
}

impl fmt::Debug for SymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.dim).map(|i| &self.m[i][..self.dim]).collect();
        f.debug_tuple("SymTensor").field(&rows).finish()
    }
}

impl fmt::Display for SymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.6e}", self.m[i][j])?;
            }
        }
        write!(f, "]")
    }
}

/// Returns `T · Q · Tᵀ` for an orthogonal `T`.
///
/// The product is symmetrized entrywise so the result is exactly symmetric.
pub fn rotate_tensor(t: &Matrix, q: &SymTensor) -> Result<SymTensor, TensorError> {
    if t.dim() != q.dim() {
        return Err(TensorError::DimensionMismatch {
            left: t.dim(),
            right: q.dim(),
        });
    }
    let prod = t.mul(&q.as_matrix()).mul(&t.transpose());
    SymTensor::symmetrized(&prod)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        assert!(matches!(
            SymTensor::from_rows(&[&[1.0, 0.5], &[0.4, 1.0]]),
            Err(TensorError::NotSymmetric { .. })
        ));
        assert!(matches!(
            SymTensor::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]),
            Err(TensorError::NotPositiveDefinite)
        ));
        assert!(SymTensor::diagonal(&[1.0, 0.0, 1.0]).is_err());
        assert!(SymTensor::diagonal(&[1.0]).is_err());
    }

    #[test]
    fn identity_rotation_keeps_tensor() {
        let q = SymTensor::diagonal(&[9.0, 25.0, 1.0]).unwrap();
        let r = rotate_tensor(&Matrix::identity(3), &q).unwrap();
        assert_eq!(r, q);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let q = SymTensor::diagonal(&[1.0, 10.0]).unwrap();
        assert!(matches!(
            rotate_tensor(&Matrix::identity(3), &q),
            Err(TensorError::DimensionMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn invariants_of_3x3() {
        let q = SymTensor::from_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 0.5], &[0.0, 0.5, 2.0]]).unwrap();
        assert_eq!(q.trace(), 9.0);
        // 4(6 - 0.25) - 1(2 - 0) = 21
        assert!((q.det() - 21.0).abs() < 1e-12);
        assert!(!q.is_diagonal());
    }
}
