use crate::error::SolveError;
use crate::numkit::{svd, DenseMatrix, RealVector};
use crate::operators::{prox_nuclear, ForwardOperator, OpError, ProxOperator};
use crate::splitting::Objective;

use super::ThreeObjective;

/// Shape of a `rows × cols × channels` tensor stored channel by channel,
/// each channel a row-major `rows × cols` slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorShape {
    pub rows: usize,
    pub cols: usize,
    pub channels: usize,
}

/// One known entry `(row, col, channel, value)`.
pub type TensorEntry = (usize, usize, usize, f64);

impl TensorShape {
    pub fn len(&self) -> usize {
        self.rows * self.cols * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, row: usize, col: usize, channel: usize) -> usize {
        (channel * self.rows + row) * self.cols + col
    }

    /// `[X₁ X₂ ⋯]` (`rows × channels·cols`), row-major flattened.
    pub fn unfold_wide(&self, x: &RealVector) -> RealVector {
        let mut out = RealVector::zeros(self.len());
        let width = self.channels * self.cols;
        for c in 0..self.channels {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    out[i * width + c * self.cols + j] = x[self.index(i, j, c)];
                }
            }
        }
        out
    }

    pub fn fold_wide(&self, w: &RealVector) -> RealVector {
        let mut out = RealVector::zeros(self.len());
        let width = self.channels * self.cols;
        for c in 0..self.channels {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    out[self.index(i, j, c)] = w[i * width + c * self.cols + j];
                }
            }
        }
        out
    }

    // The tall unfolding [X₁; X₂; ⋯] is the storage order itself.
}

fn nuclear_norm(rows: usize, cols: usize, x: &RealVector) -> f64 {
    let m = DenseMatrix::from_vector(rows, cols, x).expect("shape");
    svd(&m).map(|f| f.s.iter().sum()).unwrap_or(f64::NAN)
}

/// `minimize ‖X_wide‖_* + ‖X_tall‖_* + (ω/2)‖mask ⊙ (X − Y)‖²` as a
/// three-objective instance with `L = I`.
pub fn texture_inpainting(shape: TensorShape, known: &[TensorEntry], omega: f64) -> Result<ThreeObjective, SolveError> {
    if shape.is_empty() {
        return Err(SolveError::invalid("shape", "tensor must be nonempty"));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(SolveError::invalid("omega", "must be positive"));
    }
    let mut data = Vec::with_capacity(known.len());
    for &(i, j, c, v) in known {
        if i >= shape.rows || j >= shape.cols || c >= shape.channels {
            return Err(SolveError::invalid(
                "known",
                format!("entry ({i}, {j}, {c}) outside the tensor"),
            ));
        }
        data.push((shape.index(i, j, c), v));
    }
    let n = shape.len();
    let (wide_rows, wide_cols) = (shape.rows, shape.channels * shape.cols);
    let (tall_rows, tall_cols) = (shape.channels * shape.rows, shape.cols);

    let wide = prox_nuclear(1.0, wide_rows, wide_cols)?;
    let prox_f = ProxOperator::new("nuclear_wide", 0.0, f64::INFINITY, move |gamma, z| {
        if z.dim() != n {
            return Err(OpError::Dimension {
                context: "wide unfolding input",
                expected: n,
                found: z.dim(),
            });
        }
        Ok(shape.fold_wide(&wide.resolve(gamma, &shape.unfold_wide(z))?))
    });
    let prox_g = prox_nuclear(1.0, tall_rows, tall_cols)?;

    let grad_data = data.clone();
    let grad_h = ForwardOperator::new("masked_residual", 1.0 / omega, move |x| {
        let mut g = RealVector::zeros(x.dim());
        for &(idx, v) in &grad_data {
            g[idx] = omega * (x[idx] - v);
        }
        Ok(g)
    })
    .with_lipschitz(omega);

    let objective = Objective::new(
        move |x| nuclear_norm(wide_rows, wide_cols, &shape.unfold_wide(x)),
        move |x| nuclear_norm(tall_rows, tall_cols, x),
        move |x| 0.5 * omega * data.iter().map(|&(idx, v)| (x[idx] - v).powi(2)).sum::<f64>(),
    );
    Ok(ThreeObjective::new(prox_f, prox_g, DenseMatrix::identity(n), grad_h).with_objective(objective))
}
