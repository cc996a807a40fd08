use crate::numkit::{op_norm, DenseMatrix, RealVector};

use super::{check_dim, ForwardOperator, OpError, ProxOperator};

/// `x ↦ Lᵀ(Lx − P_{C₃}(Lx))`, the gradient of `½ d²(Lx, C₃)`.
pub fn grad_feasibility(l: DenseMatrix, project_c3: ProxOperator) -> ForwardOperator {
    let norm = op_norm(&l);
    let beta = 1.0 / (norm * norm);
    ForwardOperator::new("feasibility_gradient", beta, move |x| {
        let lx = l.mul_vec(x)?;
        let p = project_c3.resolve(1.0, &lx)?;
        Ok(l.tr_mul_vec(&(&lx - &p))?)
    })
}

/// `x ↦ Lᵀ ∇h(Lx)`, cocoercive with modulus `β_h/‖L‖²`.
pub fn compose_gradient(l: DenseMatrix, grad_h: ForwardOperator) -> ForwardOperator {
    let norm = op_norm(&l);
    let beta = grad_h.beta() / (norm * norm);
    let l_c = grad_h.l_c() * norm * norm;
    ForwardOperator::new("composed_gradient", beta, move |x| {
        let lx = l.mul_vec(x)?;
        Ok(l.tr_mul_vec(&grad_h.apply(&lx)?)?)
    })
    .with_lipschitz(l_c)
}

/// `x ↦ Qx + c` for symmetric positive semidefinite `Q`; `mu_c` is its
/// smallest eigenvalue if known.
pub fn grad_quadratic(q: DenseMatrix, c: RealVector, mu_c: f64) -> Result<ForwardOperator, OpError> {
    if !q.is_symmetric(1e-12 * q.frobenius_norm().max(1.0)) {
        return Err(OpError::NotSymmetric);
    }
    check_dim("quadratic gradient linear term", q.rows(), c.dim())?;
    let norm = op_norm(&q);
    Ok(ForwardOperator::new("quadratic_gradient", 1.0 / norm, move |x| {
        let mut y = q.mul_vec(x)?;
        y += &c;
        Ok(y)
    })
    .with_strong_monotonicity(mu_c)
    .with_lipschitz(norm))
}
