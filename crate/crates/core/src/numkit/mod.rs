//! Dense numerical kernels: vectors, matrices, Jacobi SVD, Cholesky solves
//! and spectral-norm estimation.

mod matrix;
mod vector;

pub use matrix::DenseMatrix;
pub use vector::RealVector;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("empty vector or matrix")]
    Empty,
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("jacobi svd did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    SvdNoConvergence { sweeps: usize, residual: f64 },
}

pub const SVD_MAX_SWEEPS: usize = 60;
pub const POWER_MAX_ITERS: usize = 1000;
pub const POWER_TOL: f64 = 1e-12;

/// Thin singular value decomposition `M = U diag(S) Vᵀ`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DenseMatrix,
    pub s: RealVector,
    pub v: DenseMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for j in 0..us.cols() {
                us.set(i, j, us.get(i, j) * self.s[j]);
            }
        }
        us.matmul(&self.v.transpose())
            .expect("svd factors have matching shapes")
    }
}

/// One-sided Jacobi SVD with a fixed cyclic sweep order.
pub fn svd(m: &DenseMatrix) -> Result<Svd, NumError> {
    if let Some(index) = m.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(NumError::NonFinite { index });
    }
    if m.rows() < m.cols() {
        let t = svd(&m.transpose())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j).into_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..cols).map(|j| RealVector::basis(cols, j).into_vec()).collect();
    let tol = (f64::EPSILON * rows as f64).max(1e-15);

    let mut converged = false;
    let mut residual = 0.0;
    for _ in 0..SVD_MAX_SWEEPS {
        residual = 0.0_f64;
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a[p].iter().map(|x| x * x).sum();
                let beta: f64 = a[q].iter().map(|x| x * x).sum();
                let gamma: f64 = a[p].iter().zip(&a[q]).map(|(x, y)| x * y).sum();
                let scale = (alpha * beta).sqrt();
                if gamma == 0.0 || gamma.abs() <= tol * scale {
                    continue;
                }
                residual = residual.max(gamma.abs() / scale);
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NumError::SvdNoConvergence {
            sweeps: SVD_MAX_SWEEPS,
            residual,
        });
    }

    let norms: Vec<f64> = a.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut pending = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > f64::MIN_POSITIVE {
            u_cols.push(a[j].iter().map(|x| x / norms[j]).collect());
        } else {
            u_cols.push(vec![0.0; rows]);
            pending.push(slot);
        }
    }
    for slot in pending {
        u_cols[slot] = orthonormal_completion(&u_cols, slot, rows);
    }

    let mut u = DenseMatrix::zeros(rows, cols);
    let mut vm = DenseMatrix::zeros(cols, cols);
    let mut s = RealVector::zeros(cols);
    for (slot, &j) in order.iter().enumerate() {
        s[slot] = norms[j];
        for (i, &x) in u_cols[slot].iter().enumerate() {
            u.set(i, slot, x);
        }
        for (i, &x) in v[j].iter().enumerate() {
            vm.set(i, slot, x);
        }
    }
    Ok(Svd { u, s, v: vm })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
        let (a, b) = (*xp, *xq);
        *xp = c * a - s * b;
        *xq = s * a + c * b;
    }
}

/// Unit vector orthogonal to every nonzero column in `cols` except `skip`.
fn orthonormal_completion(cols: &[Vec<f64>], skip: usize, rows: usize) -> Vec<f64> {
    for e in 0..rows {
        let mut cand = RealVector::basis(rows, e).into_vec();
        for _ in 0..2 {
            for (k, c) in cols.iter().enumerate() {
                if k == skip {
                    continue;
                }
                let d: f64 = c.iter().zip(&cand).map(|(x, y)| x * y).sum();
                for (y, x) in cand.iter_mut().zip(c) {
                    *y -= d * x;
                }
            }
        }
        let n = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.5 {
            return cand.into_iter().map(|x| x / n).collect();
        }
    }
    vec![0.0; rows]
}

/// Smallest and largest eigenvalue of a symmetric positive semidefinite
/// matrix, read off its singular values.
pub fn psd_eigen_range(p: &DenseMatrix) -> (f64, f64) {
    match svd(p) {
        Ok(f) => (f.s[f.s.dim() - 1], f.s[0]),
        Err(_) => (0.0, f64::INFINITY),
    }
}

/// Cholesky factor `M = L Lᵀ` of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
    source: DenseMatrix,
}

impl Cholesky {
    pub fn factor(m: &DenseMatrix) -> Result<Self, NumError> {
        if !m.is_square() {
            return Err(NumError::DimensionMismatch {
                context: "cholesky of non-square matrix",
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = m.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(NumError::NotPositiveDefinite { pivot: j, value: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self {
            n,
            lower: l,
            source: m.clone(),
        })
    }

    fn substitute(&self, b: &RealVector) -> RealVector {
        let n = self.n;
        let l = &self.lower;
        let mut y = b.clone();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        y
    }

    /// Solves `M x = b` with one step of iterative refinement.
    pub fn solve(&self, b: &RealVector) -> Result<RealVector, NumError> {
        if b.dim() != self.n {
            return Err(NumError::DimensionMismatch {
                context: "spd solve right-hand side",
                expected: self.n,
                found: b.dim(),
            });
        }
        let mut x = self.substitute(b);
        let r = b - &self.source.mul_vec(&x)?;
        x += &self.substitute(&r);
        Ok(x)
    }
}

pub fn solve_spd(m: &DenseMatrix, b: &RealVector) -> Result<RealVector, NumError> {
    Cholesky::factor(m)?.solve(b)
}

/// Largest singular value by power iteration on `LᵀL`.
pub fn op_norm(l: &DenseMatrix) -> f64 {
    if l.is_zero() {
        return 0.0;
    }
    let gram_apply = |x: &RealVector| l.tr_mul_vec(&l.mul_vec(x).expect("shape fixed")).expect("shape fixed");
    let n = l.cols();
    let mut x = RealVector::filled(n, 1.0 / (n as f64).sqrt());
    let mut y = gram_apply(&x);
    if y.norm() <= f64::MIN_POSITIVE {
        let j = (0..n)
            .max_by(|&a, &b| l.column(a).norm().total_cmp(&l.column(b).norm()))
            .unwrap_or(0);
        x = RealVector::basis(n, j);
        y = gram_apply(&x);
    }
    let mut rq = x.dot(&y);
    for _ in 0..POWER_MAX_ITERS {
        let ny = y.norm();
        if ny <= f64::MIN_POSITIVE {
            break;
        }
        x = &y * (1.0 / ny);
        y = gram_apply(&x);
        let next = x.dot(&y);
        let settled = (next - rq).abs() < POWER_TOL * next.abs().max(f64::MIN_POSITIVE);
        rq = next;
        if settled {
            break;
        }
    }
    rq.max(0.0).sqrt().max(l.max_column_norm())
}
