use crate::numkit::{solve_spd, svd, DenseMatrix, RealVector};

use super::{check_dim, OpError, ProxOperator, ResolventKind};

/// Resolvent of `∂(½xᵀPx + cᵀx)`: solves `(I + γP)x = z − γc`.
pub fn make_quadratic_prox(p: DenseMatrix, c: RealVector, mu: f64, lipschitz: f64) -> Result<ProxOperator, OpError> {
    if !p.is_square() {
        return Err(OpError::Dimension {
            context: "quadratic prox matrix",
            expected: p.rows(),
            found: p.cols(),
        });
    }
    if !p.is_symmetric(1e-12 * p.frobenius_norm().max(1.0)) {
        return Err(OpError::NotSymmetric);
    }
    check_dim("quadratic prox linear term", p.rows(), c.dim())?;
    let n = p.rows();
    Ok(ProxOperator::new("quadratic", mu, lipschitz, move |gamma, z| {
        check_dim("quadratic prox input", n, z.dim())?;
        let m = DenseMatrix::identity(n).lincomb(1.0, &p, gamma)?;
        let rhs = z.lincomb(1.0, &c, -gamma);
        Ok(solve_spd(&m, &rhs)?)
    }))
}

/// Resolvent of `∂(μ/2‖x‖²)`: `z/(1 + γμ)`.
pub fn prox_scaled_sq(mu: f64) -> ProxOperator {
    ProxOperator::new("scaled_sq", mu, mu, move |gamma, z| Ok(z * (1.0 / (1.0 + gamma * mu))))
}

/// Projection onto `{l ≤ x ≤ u}`; bounds of length one broadcast. Infinite
/// bounds are allowed.
pub fn project_box(lower: RealVector, upper: RealVector) -> Result<ProxOperator, OpError> {
    check_dim("box bounds", lower.dim(), upper.dim())?;
    if let Some(index) = lower
        .iter()
        .zip(upper.iter())
        .position(|(l, u)| !(l <= u) || l.is_nan() || u.is_nan())
    {
        return Err(OpError::InvalidBounds { index });
    }
    Ok(ProxOperator::new("box", 0.0, f64::INFINITY, move |_, z| {
        let bound = |v: &RealVector, i: usize| if v.dim() == 1 { v[0] } else { v[i] };
        if lower.dim() != 1 {
            check_dim("box projection input", lower.dim(), z.dim())?;
        }
        Ok((0..z.dim())
            .map(|i| z[i].clamp(bound(&lower, i), bound(&upper, i)))
            .collect())
    })
    .with_kind(ResolventKind::Projection))
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}` by sort-and-threshold.
pub fn project_simplex() -> ProxOperator {
    ProxOperator::new("simplex", 0.0, f64::INFINITY, |_, z| {
        if z.dim() == 0 {
            return Err(OpError::Dimension {
                context: "simplex projection input",
                expected: 1,
                found: 0,
            });
        }
        let mut sorted = z.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut prefix = 0.0;
        let mut theta = 0.0;
        for (j, u) in sorted.iter().enumerate() {
            prefix += u;
            let t = (prefix - 1.0) / (j + 1) as f64;
            if u - t > 0.0 {
                theta = t;
            }
        }
        Ok(z.map(|x| (x - theta).max(0.0)))
    })
    .with_kind(ResolventKind::Projection)
}

/// Projection onto `{x : ⟨m, x⟩ ≥ r}`.
pub fn project_halfspace(normal: RealVector, offset: f64) -> Result<ProxOperator, OpError> {
    let nsq = normal.norm_sq();
    if nsq == 0.0 {
        return Err(OpError::ZeroNormal);
    }
    Ok(ProxOperator::new("halfspace", 0.0, f64::INFINITY, move |_, z| {
        check_dim("halfspace projection input", normal.dim(), z.dim())?;
        let s = normal.dot(z);
        if s >= offset {
            return Ok(z.clone());
        }
        let mut x = z.clone();
        x.axpy((offset - s) / nsq, &normal);
        Ok(x)
    })
    .with_kind(ResolventKind::Projection))
}

/// Projection onto `{x : ⟨m, x⟩ = r}`; linear when `r = 0`.
pub fn project_hyperplane(normal: RealVector, offset: f64) -> Result<ProxOperator, OpError> {
    let nsq = normal.norm_sq();
    if nsq == 0.0 {
        return Err(OpError::ZeroNormal);
    }
    let kind = if offset == 0.0 {
        ResolventKind::LinearProjection
    } else {
        ResolventKind::Projection
    };
    Ok(ProxOperator::new("hyperplane", 0.0, f64::INFINITY, move |_, z| {
        check_dim("hyperplane projection input", normal.dim(), z.dim())?;
        let mut x = z.clone();
        x.axpy((offset - normal.dot(z)) / nsq, &normal);
        Ok(x)
    })
    .with_kind(kind))
}

/// Orthogonal projection onto a subspace given by its (symmetric, idempotent)
/// projector matrix.
pub fn project_subspace(projector: DenseMatrix) -> Result<ProxOperator, OpError> {
    if !projector.is_symmetric(1e-10) {
        return Err(OpError::NotSymmetric);
    }
    Ok(
        ProxOperator::new("subspace", 0.0, f64::INFINITY, move |_, z| Ok(projector.mul_vec(z)?))
            .with_kind(ResolventKind::LinearProjection),
    )
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x.abs() <= t {
        0.0
    } else {
        x - t.copysign(x)
    }
}

/// Prox of `weight·‖x‖₁`.
pub fn prox_l1(weight: f64) -> Result<ProxOperator, OpError> {
    if !(weight > 0.0 && weight.is_finite()) {
        return Err(OpError::NonPositiveWeight(weight));
    }
    Ok(ProxOperator::new("l1", 0.0, f64::INFINITY, move |gamma, z| {
        let t = gamma * weight;
        Ok(z.map(|x| soft_threshold(x, t)))
    }))
}

/// Prox of `weight·‖X‖_*` on row-major flattened `rows × cols` matrices.
pub fn prox_nuclear(weight: f64, rows: usize, cols: usize) -> Result<ProxOperator, OpError> {
    if !(weight > 0.0 && weight.is_finite()) {
        return Err(OpError::NonPositiveWeight(weight));
    }
    Ok(ProxOperator::new("nuclear", 0.0, f64::INFINITY, move |gamma, z| {
        check_dim("nuclear prox input", rows * cols, z.dim())?;
        let m = DenseMatrix::from_vector(rows, cols, z)?;
        let mut f = svd(&m)?;
        let t = gamma * weight;
        for s in f.s.iter_mut() {
            *s = (*s - t).max(0.0);
        }
        Ok(f.reconstruct().to_vector())
    }))
}
