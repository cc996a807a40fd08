//! Post-processing that turns convergence-rate statements into checkable
//! numbers: κ sequences and their bounds, log-log slope fits, linear
//! contraction factors, best-iterate tracking and the slow-convergence
//! construction.

mod slow;

use crate::error::SolveError;
use crate::numkit::RealVector;
use crate::operators::ForwardOperator;
use crate::splitting::SolverState;

pub use slow::{
    build_slow_example, eig2x2, slow_rate_eigenvalues, truncation_tail, RotatingSubspaceExample, ThetaSpec,
};

/// `κ` terms of one step `z^k → z^{k+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaRecord {
    pub k: usize,
    /// `κ₁^k(λ, x)` for the reference point passed in.
    pub kappa1: f64,
    /// `κ₂^k(λ, x*)`, when a fixed point and `Cx*` are supplied.
    pub kappa2: Option<f64>,
    pub lambda_k: f64,
    /// `2γ⟨z^k − z^{k+1}, Cx_B^k⟩`.
    pub cross1: f64,
    /// `2γ⟨z^k − z^{k+1}, Cx_B^k − Cx*⟩`.
    pub cross2: Option<f64>,
}

/// `‖z − x‖² − ‖z⁺ − x‖² + (1 − 2/λ)‖z − z⁺‖² + 2γ⟨z − z⁺, g⟩`.
pub fn kappa(z: &RealVector, z_next: &RealVector, x: &RealVector, gamma: f64, lambda: f64, g: &RealVector) -> f64 {
    let step = z - z_next;
    z.dist_sq(x) - z_next.dist_sq(x) + (1.0 - 2.0 / lambda) * step.norm_sq() + 2.0 * gamma * step.dot(g)
}

/// Reference data for the `κ₂` sequence.
#[derive(Clone, Copy, Debug)]
pub struct FixedPointRef<'a> {
    pub z_star: &'a RealVector,
    pub c_x_star: &'a RealVector,
}

/// `κ` records for consecutive pairs of `states` (evaluations of `T` at
/// `z^0, z^1, …`) with `lambdas[k]` the relaxation used from `z^k`.
pub fn kappa_series(
    states: &[SolverState],
    lambdas: &[f64],
    c: &ForwardOperator,
    gamma: f64,
    x: &RealVector,
    star: Option<FixedPointRef<'_>>,
) -> Result<Vec<KappaRecord>, SolveError> {
    if states.len() < 2 {
        return Err(SolveError::Missing("at least two consecutive states"));
    }
    if lambdas.len() + 1 < states.len() {
        return Err(SolveError::Missing("a relaxation parameter for every step"));
    }
    states
        .windows(2)
        .zip(lambdas)
        .map(|(pair, &lambda)| {
            let (now, next) = (&pair[0], &pair[1]);
            let c_xb = c.apply(&now.x_b)?;
            let step = &now.z - &next.z;
            let cross1 = 2.0 * gamma * step.dot(&c_xb);
            let kappa1 = kappa(&now.z, &next.z, x, gamma, lambda, &c_xb);
            let (kappa2, cross2) = match star {
                Some(r) => {
                    let g = &c_xb - r.c_x_star;
                    (
                        Some(kappa(&now.z, &next.z, r.z_star, gamma, lambda, &g)),
                        Some(2.0 * gamma * step.dot(&g)),
                    )
                }
                None => (None, None),
            };
            let record = KappaRecord {
                k: now.k,
                kappa1,
                kappa2,
                lambda_k: lambda,
                cross1,
                cross2,
            };
            if !(kappa1.is_finite() && kappa2.is_none_or(f64::is_finite)) {
                return Err(SolveError::NonFinite { k: now.k });
            }
            Ok(record)
        })
        .collect()
}

fn ratio(gamma: f64, beta: f64) -> f64 {
    if beta.is_finite() {
        gamma / beta
    } else {
        0.0
    }
}

/// Upper bound on `κ₁^k(1, x)`:
/// `2(‖z*−x‖ + (1+γ/β)‖z⁰−z*‖ + γ‖Cx*‖)‖z⁰−z*‖/√(τ̲(k+1))`.
pub fn kappa1_bound(
    dist_zstar_x: f64,
    initial_dist: f64,
    c_x_star_norm: f64,
    gamma: f64,
    beta: f64,
    tau_min: f64,
    k: usize,
) -> f64 {
    2.0 * (dist_zstar_x + (1.0 + ratio(gamma, beta)) * initial_dist + gamma * c_x_star_norm) * initial_dist
        / (tau_min * (k + 1) as f64).sqrt()
}

/// Upper bound on `κ₂^k(1, x*)`: `2(1+γ/β)‖z⁰−z*‖²/√(τ̲(k+1))`.
pub fn kappa2_bound(initial_dist: f64, gamma: f64, beta: f64, tau_min: f64, k: usize) -> f64 {
    2.0 * (1.0 + ratio(gamma, beta)) * initial_dist * initial_dist / (tau_min * (k + 1) as f64).sqrt()
}

/// Lower bound on `⟨x_B^k − x_A^k, u_B* + Cx*⟩`:
/// `−‖z⁰−z*‖·‖u_B* + Cx*‖/√(τ̲(k+1))`.
pub fn feasibility_lower_bound(initial_dist: f64, dual_norm: f64, tau_min: f64, k: usize) -> f64 {
    -initial_dist * dual_norm / (tau_min * (k + 1) as f64).sqrt()
}

/// Least-squares slope of `log(value)` against `log(k + 1)` over the points
/// with `k_min ≤ k ≤ k_max`.
pub fn rate_fit(points: &[(usize, f64)], k_min: usize, k_max: usize) -> Result<f64, SolveError> {
    let selected: Vec<(f64, f64)> = points
        .iter()
        .filter(|(k, _)| (k_min..=k_max).contains(k))
        .map(|&(k, v)| {
            if v > 0.0 && v.is_finite() {
                Ok((((k + 1) as f64).ln(), v.ln()))
            } else {
                Err(SolveError::invalid(
                    "points",
                    format!("value at k = {k} is not positive"),
                ))
            }
        })
        .collect::<Result<_, _>>()?;
    if selected.len() < 10 {
        return Err(SolveError::invalid(
            "points",
            format!("need at least 10 points in [{k_min}, {k_max}], got {}", selected.len()),
        ));
    }
    let n = selected.len() as f64;
    let mx = selected.iter().map(|p| p.0).sum::<f64>() / n;
    let my = selected.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = selected.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = selected.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SolveError::invalid("points", "all points share one abscissa"));
    }
    Ok(sxy / sxx)
}

/// Prefix minimum.
pub fn running_min(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(f64::INFINITY, |m, &v| {
            *m = m.min(v);
            Some(*m)
        })
        .collect()
}

/// Regularity pattern under which a linear rate holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearCase {
    /// `B` strongly monotone and Lipschitz.
    StrongB = 1,
    /// `A` strongly monotone and Lipschitz.
    StrongA = 2,
    /// `A` strongly monotone, `B` Lipschitz.
    StrongALipschitzB = 3,
    /// `B` strongly monotone, `A` Lipschitz.
    StrongBLipschitzA = 4,
    /// `C` strongly monotone, `A` Lipschitz.
    StrongCLipschitzA = 5,
    /// `C` strongly monotone, `B` Lipschitz.
    StrongCLipschitzB = 6,
}

impl LinearCase {
    pub fn from_index(case: u8) -> Result<Self, SolveError> {
        use LinearCase::*;
        match case {
            1 => Ok(StrongB),
            2 => Ok(StrongA),
            3 => Ok(StrongALipschitzB),
            4 => Ok(StrongBLipschitzA),
            5 => Ok(StrongCLipschitzA),
            6 => Ok(StrongCLipschitzB),
            _ => Err(SolveError::invalid("case", format!("expected 1..=6, got {case}"))),
        }
    }
}

/// Constants entering the contraction factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionParams {
    pub gamma: f64,
    pub lambda: f64,
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_c: f64,
    pub l_a: f64,
    pub l_b: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub alpha: f64,
}

fn finite_nonneg(name: &'static str, v: f64) -> Result<f64, SolveError> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(SolveError::invalid(
            name,
            format!("this case needs a finite nonnegative value, got {v}"),
        ))
    }
}

fn min3(a: f64, b: f64, c: f64) -> f64 {
    a.min(b).min(c)
}

/// `C(λ)` with `‖z⁺ − z*‖² ≤ (1 − C(λ))‖z − z*‖²`, clamped to `[0, 1]`.
pub fn contraction_factor(case: LinearCase, p: &ContractionParams) -> Result<f64, SolveError> {
    let ContractionParams {
        gamma: g,
        lambda: lam,
        eta,
        alpha,
        epsilon,
        beta,
        ..
    } = *p;
    if !(g > 0.0 && lam > 0.0) {
        return Err(SolveError::invalid("gamma/lambda", "must be positive"));
    }
    let mu_a = finite_nonneg("mu_a", p.mu_a)?;
    let mu_b = finite_nonneg("mu_b", p.mu_b)?;
    let mu_c = finite_nonneg("mu_c", p.mu_c)?;
    let relax = 1.0 / (alpha * lam) - 1.0;
    let coco = |b: f64| (2.0 * b - g / epsilon) / g;
    let value = match case {
        LinearCase::StrongB => {
            let l_b = finite_nonneg("l_b", p.l_b)?;
            2.0 * g * lam * mu_b / (1.0 + g * l_b).powi(2)
        }
        LinearCase::StrongA => {
            let l_a = finite_nonneg("l_a", p.l_a)?;
            lam / 3.0 * min3(2.0 * mu_a * g / (1.0 + g * l_a).powi(2), lam / 4.0 * relax, coco(beta))
        }
        LinearCase::StrongALipschitzB => {
            let l_b = finite_nonneg("l_b", p.l_b)?;
            lam / (3.0 * (1.0 + 2.0 * g * g * l_b * l_b)) * (2.0 * g * mu_a).min(lam * relax)
        }
        LinearCase::StrongBLipschitzA => {
            let l_a = finite_nonneg("l_a", p.l_a)?;
            let s = 1.0 + 2.0 * g * g * l_a * l_a;
            lam / 4.0 * min3(2.0 * g * mu_b / s, coco(beta), lam / s * relax)
        }
        LinearCase::StrongCLipschitzA => {
            let l_a = finite_nonneg("l_a", p.l_a)?;
            if !(eta > 0.0 && eta < 1.0) {
                return Err(SolveError::invalid("eta", "must lie in (0, 1)"));
            }
            let s = 1.0 + 2.0 * g * g * l_a * l_a;
            lam / 4.0 * min3(2.0 * g * mu_c * (1.0 - eta) / s, coco(eta * beta), lam / s * relax)
        }
        LinearCase::StrongCLipschitzB => {
            let l_b = finite_nonneg("l_b", p.l_b)?;
            if !(eta > 0.0 && eta < 1.0) {
                return Err(SolveError::invalid("eta", "must lie in (0, 1)"));
            }
            2.0 * g * lam * mu_c * (1.0 - eta) / (1.0 + g * l_b).powi(2)
        }
    };
    if value.is_nan() {
        return Err(SolveError::invalid(
            "params",
            "contraction factor is undefined for these constants",
        ));
    }
    Ok(value.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> RealVector {
        RealVector::from(xs)
    }

    #[test]
    fn kappa_examples() {
        let z = v(&[0.7, -1.0]);
        assert_eq!(kappa(&z, &z, &v(&[3.0, 1.0]), 0.5, 1.0, &v(&[1.0, 2.0])), 0.0);
        assert_eq!(kappa(&v(&[1.0]), &v(&[0.0]), &v(&[0.0]), 1.0, 1.0, &v(&[1.0])), 2.0);
    }

    #[test]
    fn kappa_series_needs_pairs() {
        let err = kappa_series(&[], &[], &ForwardOperator::zero(), 1.0, &v(&[0.0]), None);
        assert!(matches!(err, Err(SolveError::Missing(_))));
    }

    #[test]
    fn rate_fit_power_laws() {
        let pts: Vec<_> = (0..200).map(|k| (k, 7.0 / (k + 1) as f64)).collect();
        assert_relative_eq!(rate_fit(&pts, 0, 199).unwrap(), -1.0, epsilon = 1e-6);
        let pts: Vec<_> = (0..200).map(|k| (k, 3.0 / ((k + 1) as f64).powi(2))).collect();
        assert_relative_eq!(rate_fit(&pts, 10, 150).unwrap(), -2.0, epsilon = 1e-6);
        assert!(rate_fit(&pts[..5], 0, 100).is_err());
        assert!(rate_fit(&[(1, 0.0); 20], 0, 100).is_err());
    }

    #[test]
    fn running_min_examples() {
        assert_eq!(running_min(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 1.0]);
        assert_eq!(running_min(&[5.0, 4.0, 1.0]), vec![5.0, 4.0, 1.0]);
        assert!(running_min(&[]).is_empty());
    }

    fn base() -> ContractionParams {
        ContractionParams {
            gamma: 1.0,
            lambda: 1.0,
            mu_a: 0.0,
            mu_b: 0.0,
            mu_c: 0.0,
            l_a: 1.0,
            l_b: 1.0,
            beta: 1.0,
            epsilon: 0.99,
            eta: 0.5,
            alpha: 2.0 / 3.0,
        }
    }

    #[test]
    fn contraction_examples() {
        let p = ContractionParams { mu_b: 1.0, ..base() };
        assert_relative_eq!(
            contraction_factor(LinearCase::StrongB, &p).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        for i in 1..=6 {
            assert_eq!(
                contraction_factor(LinearCase::from_index(i).unwrap(), &base()).unwrap(),
                0.0
            );
        }
        let p = ContractionParams { mu_a: 1.0, ..base() };
        let branches = [2.0 / 4.0, 0.25 * (1.5 - 1.0), 2.0 - 1.0 / 0.99];
        let want = branches.iter().cloned().fold(f64::INFINITY, f64::min) / 3.0;
        assert_relative_eq!(
            contraction_factor(LinearCase::StrongA, &p).unwrap(),
            want,
            epsilon = 1e-15
        );
    }

    #[test]
    fn contraction_rejects_mismatched_constants() {
        let p = ContractionParams {
            mu_b: 1.0,
            l_b: f64::INFINITY,
            ..base()
        };
        assert!(contraction_factor(LinearCase::StrongB, &p).is_err());
        assert!(LinearCase::from_index(7).is_err());
        let p = ContractionParams {
            mu_c: 1.0,
            eta: 1.0,
            ..base()
        };
        assert!(contraction_factor(LinearCase::StrongCLipschitzB, &p).is_err());
    }
}
