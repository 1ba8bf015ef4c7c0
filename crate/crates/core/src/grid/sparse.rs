//! Compressed sparse row storage and a Jacobi-preconditioned conjugate
//! gradient solver for the symmetric positive (semi-)definite systems produced
//! by the assembly routines.

use super::{SolveError, SolverConfig, StructuredGrid};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the nearest-neighbour stencil of a structured grid:
    /// every node couples to the nodes within one step along each axis.
    pub fn grid_pattern(grid: &StructuredGrid, periodic: bool) -> Self {
        let shape = grid.node_shape(periodic);
        let n = grid.node_count(periodic);
        let dim = grid.dim();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(n * 3usize.pow(dim as u32));
        row_ptr.push(0);
        let mut row = Vec::with_capacity(27);
        for node in 0..n {
            let c = grid.node_coords(node, periodic);
            row.clear();
            let offsets = 3usize.pow(dim as u32);
            'outer: for o in 0..offsets {
                let mut nc = [0usize; 3];
                let mut code = o;
                for axis in 0..dim {
                    let step = (code % 3) as isize - 1;
                    code /= 3;
                    let mut v = c[axis] as isize + step;
                    if periodic {
                        v = v.rem_euclid(shape[axis] as isize);
                    } else if v < 0 || v >= shape[axis] as isize {
                        continue 'outer;
                    }
                    nc[axis] = v as usize;
                }
                row.push(grid.node_index(nc, periodic));
            }
            row.sort_unstable();
            row.dedup();
            cols.extend_from_slice(&row);
            row_ptr.push(cols.len());
        }
        let nnz = cols.len();
        Self { n, row_ptr, cols, vals: vec![0.0; nnz] }
    }

    /// Dense matrix converted to CSR, keeping explicit zeros out.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in rows {
            for (j, v) in r.iter().enumerate() {
                if *v != 0.0 {
                    cols.push(j);
                    vals.push(*v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    fn position(&self, row: usize, col: usize) -> usize {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.cols[lo..hi].binary_search(&col) {
            Ok(p) => lo + p,
            Err(_) => panic!("entry ({row},{col}) outside the sparsity pattern"),
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, v: f64) {
        let p = self.position(row, col);
        self.vals[p] += v;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        self.cols[lo..hi]
            .binary_search(&col)
            .map_or(0.0, |p| self.vals[lo + p])
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        self.cols[lo..hi].iter().copied().zip(self.vals[lo..hi].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut s = 0.0;
            for p in lo..hi {
                s += self.vals[p] * x[self.cols[p]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// Largest `|a_ij − a_ji|` over the stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Imposes `x_d = g_d` on the listed rows while keeping the matrix
    /// symmetric: rows and columns of constrained unknowns are cleared except
    /// for the diagonal, which keeps its value so that the constrained rows
    /// stay on the scale of the others. The right-hand side of row `d` must be
    /// `a_dd · g_d`. Returns the lifting vector `A[:, D]·g` that must be
    /// subtracted from every other right-hand side entry before solving.
    pub fn constrain(&mut self, fixed: &[Option<f64>]) -> Vec<f64> {
        debug_assert_eq!(fixed.len(), self.n);
        let mut lift = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            if fixed[i].is_some() {
                for p in lo..hi {
                    if self.cols[p] != i {
                        self.vals[p] = 0.0;
                    } else if !(self.vals[p] > 0.0) {
                        self.vals[p] = 1.0;
                    }
                }
                continue;
            }
            for p in lo..hi {
                if let Some(g) = fixed[self.cols[p]] {
                    lift[i] += self.vals[p] * g;
                    self.vals[p] = 0.0;
                }
            }
        }
        lift
    }
}

/// Iteration count and final relative residual of a converged solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Preconditioned conjugate gradients with a Jacobi preconditioner.
///
/// Stops once `‖b − Ax‖₂ ≤ rel_tol · ‖b‖₂`. With `project_mean` the system is
/// treated as singular with constant null space: the right-hand side, the
/// preconditioned residual and the iterate are kept at zero nodal mean.
pub(crate) fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    config: &SolverConfig,
    dim: usize,
    project_mean: bool,
) -> Result<(Vec<f64>, SolveStats), SolveError> {
    let n = a.size();
    let max_iter = config.max_iterations(n, dim);
    let mut rhs = b.to_vec();
    if project_mean {
        remove_mean(&mut rhs);
    }
    let b_norm = norm(&rhs);
    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok((x, SolveStats { iterations: 0, relative_residual: 0.0 }));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut r = vec![0.0; n];
    a.mul_vec_into(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(&rhs) {
        *ri = bi - *ri;
    }
    let target = config.rel_tol * b_norm;
    let mut res = norm(&r);
    if res <= target {
        return Ok((x, SolveStats { iterations: 0, relative_residual: res / b_norm }));
    }

    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    if project_mean {
        remove_mean(&mut z);
    }
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for iter in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(SolveError::NotPositiveDefinite { iteration: iter });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if project_mean {
            remove_mean(&mut x);
        }
        res = norm(&r);
        if res <= target {
            if project_mean {
                check_drift(&x)?;
            }
            return Ok((x, SolveStats { iterations: iter, relative_residual: res / b_norm }));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        if project_mean {
            remove_mean(&mut z);
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolveError::NotConverged {
        iterations: max_iter,
        relative_residual: res / b_norm,
    })
}

fn check_drift(x: &[f64]) -> Result<(), SolveError> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if mean.abs() > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(SolveError::MeanDrift { mean });
    }
    Ok(())
}

pub(crate) fn remove_mean(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_direct_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [5usize, 60, 300] {
            // banded random SPD: B Bᵀ + n I restricted to a band
            let b = DMatrix::<f64>::from_fn(n, n, |i, j| {
                if i.abs_diff(j) <= 3 { rng.random_range(-1.0..1.0) } else { 0.0 }
            });
            let spd = &b * b.transpose() + DMatrix::<f64>::identity(n, n) * 0.5;
            let rows: Vec<Vec<f64>> = (0..n).map(|i| spd.row(i).iter().copied().collect()).collect();
            let csr = CsrMatrix::from_dense(&rows);
            let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let cfg = SolverConfig { rel_tol: 1e-13, max_iter: Some(10 * n) };
            let (x, _) = pcg(&csr, &rhs, None, &cfg, 2, false).unwrap();
            let exact = spd.clone().lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
            let scale = exact.amax();
            for i in 0..n {
                assert!((x[i] - exact[i]).abs() <= 1e-9 * scale, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn reports_non_convergence() {
        let rows = vec![vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]];
        let csr = CsrMatrix::from_dense(&rows);
        let cfg = SolverConfig { rel_tol: 1e-30, max_iter: Some(1) };
        let err = pcg(&csr, &[1.0, 2.0, 3.0], None, &cfg, 2, false).unwrap_err();
        assert!(matches!(err, SolveError::NotConverged { iterations: 1, .. }));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let csr = CsrMatrix::from_dense(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let (x, stats) = pcg(&csr, &[0.0, 0.0], Some(&[3.0, 4.0]), &SolverConfig::default(), 2, false).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn constrain_keeps_symmetry() {
        let rows = vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]];
        let mut csr = CsrMatrix::from_dense(&rows);
        let lift = csr.constrain(&[Some(1.0), None, None]);
        assert_eq!(lift, vec![0.0, -1.0, 0.0]);
        assert_eq!(csr.asymmetry(), 0.0);
        assert_eq!(csr.get(0, 0), 2.0);
    }
}
