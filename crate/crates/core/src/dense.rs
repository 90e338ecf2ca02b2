//! Small dense symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Only used as an oracle for the factorization-based counts, so the code
//! favours plainness over speed.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix rows must form a square".into()));
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let upper: f64 = self
            .data
            .chunks_exact(self.n)
            .enumerate()
            .map(|(i, row)| row[i + 1..].iter().map(|v| v * v).sum::<f64>())
            .sum();
        (2.0 * upper).sqrt()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations. Stops once the off-diagonal norm is at most `1e-12 ‖A‖_F`.
pub fn jacobi_eigenvalues(matrix: &DenseMatrix) -> Result<Vec<f64>> {
    if !matrix.is_symmetric() {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    let n = matrix.dim();
    let mut a = matrix.clone();
    let target = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let off = a.off_diagonal_norm();
        if off <= target {
            converged = true;
            break;
        }
        let threshold = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                if sweep > 3 && 100.0 * apq.abs() <= f64::EPSILON * app.abs().min(aqq.abs()) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                if apq == 0.0 || apq.abs() < threshold {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let (head, tail) = a.data.split_at_mut(q * n);
                let row_p = &mut head[p * n..(p + 1) * n];
                let row_q = &mut tail[..n];
                for (g, h) in row_p.iter_mut().zip(row_q.iter_mut()) {
                    let (gv, hv) = (*g, *h);
                    *g = gv - s * (hv + gv * tau);
                    *h = hv + s * (gv - hv * tau);
                }
                row_p[p] = app - t * apq;
                row_q[q] = aqq + t * apq;
                row_p[q] = 0.0;
                row_q[p] = 0.0;
                for r in 0..n {
                    a.data[r * n + p] = a.data[p * n + r];
                    a.data[r * n + q] = a.data[q * n + r];
                }
            }
        }
    }
    if !converged && a.off_diagonal_norm() > target {
        return Err(Error::Convergence {
            iterations: MAX_SWEEPS,
            residual: a.off_diagonal_norm(),
        });
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_by_two() {
        let m = DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let e = jacobi_eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(e[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_is_sorted() {
        let mut m = DenseMatrix::zeros(4);
        for (i, v) in [3.0, -1.0, 7.0, 0.5].into_iter().enumerate() {
            m[(i, i)] = v;
        }
        assert_eq!(jacobi_eigenvalues(&m).unwrap(), vec![-1.0, 0.5, 3.0, 7.0]);
    }

    #[test]
    fn trace_and_frobenius_preserved() {
        let n = 12;
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = ((i * 7 + j * 13) % 11) as f64 - 5.0;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let e = jacobi_eigenvalues(&m).unwrap();
        let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
        assert_abs_diff_eq!(e.iter().sum::<f64>(), trace, epsilon = 1e-10);
        let fro2: f64 = e.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(fro2, m.frobenius_norm().powi(2), epsilon = 1e-9);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(jacobi_eigenvalues(&m).is_err());
    }
}
