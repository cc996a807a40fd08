use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use crate::error::SolveError;
use crate::numkit::RealVector;
use crate::operators::{ForwardOperator, ProxOperator};
use crate::splitting::{apply_t, Objective, ThreeOperatorProblem};

pub type RateFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// How the block angles are chosen.
#[derive(Clone)]
pub enum ThetaSpec {
    Constant(f64),
    Explicit(Vec<f64>),
    /// Angles whose block eigenvalues make `‖z^k‖ ≥ e⁻¹·rate(k)` up to
    /// `horizon`; `rate` must decrease to 0 with `rate(0) ≤ 1`.
    SlowRate {
        rate: RateFn,
        horizon: usize,
    },
}

impl fmt::Debug for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(t) => f.debug_tuple("Constant").field(t).finish(),
            Self::Explicit(ts) => f.debug_tuple("Explicit").field(ts).finish(),
            Self::SlowRate { horizon, .. } => f
                .debug_struct("SlowRate")
                .field("horizon", horizon)
                .finish_non_exhaustive(),
        }
    }
}

/// Eigenvalues of a real 2×2 matrix, or `None` when they are complex.
pub fn eig2x2(m: [[f64; 2]; 2]) -> Option<(f64, f64)> {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some((tr / 2.0 + r, tr / 2.0 - r))
}

/// `(Σ_{i ≥ n} 1/(i+1)²)^{1/2}`.
pub fn truncation_tail(n: usize) -> f64 {
    let head: f64 = (1..=n).map(|i| 1.0 / (i * i) as f64).sum();
    (std::f64::consts::PI.powi(2) / 6.0 - head).max(0.0).sqrt()
}

/// Block eigenvalues `b_0, …, b_{n−1}` for a rate `F`: with
/// `n_k = max(0, ⌊1/F(k)⌋ − 1)` and `K_n` the last `k ≤ horizon` with
/// `n_k = n` (or `horizon` if there is none), `b_n = 1 − 1/(K_n + 2)`,
/// raised to at least `(a + ½)/(a + 1)` and made nondecreasing in `n`.
pub fn slow_rate_eigenvalues(a: f64, rate: &dyn Fn(usize) -> f64, horizon: usize, n_blocks: usize) -> Vec<f64> {
    let mut last_k = vec![None; n_blocks];
    for k in 0..=horizon {
        let inv = 1.0 / rate(k);
        let n = (inv.floor() as i64 - 1).max(0) as usize;
        if n < n_blocks {
            last_k[n] = Some(k);
        }
    }
    let floor = (a + 0.5) / (a + 1.0);
    let mut prev = floor;
    last_k
        .into_iter()
        .map(|k| {
            let k = k.unwrap_or(horizon);
            let b = (1.0 - 1.0 / (k as f64 + 2.0)).max(prev);
            prev = b;
            b
        })
        .collect()
}

/// Product of `n` planar blocks: `f = ι_U + (a/2)‖·‖²`, `g = ι_V`,
/// `h = ½‖·‖²` with `U` spanned blockwise by `(cos θ_i, sin θ_i)` and `V` by
/// the first coordinate, run with `γ = λ = 1`. The map `T` then acts on block
/// `i` as `T_i = [[0, −cs/(1+a)], [0, 1 − s²/(1+a)]]`.
#[derive(Clone, Debug)]
pub struct RotatingSubspaceExample {
    pub a: f64,
    pub thetas: Vec<f64>,
    pub blocks: Vec<[[f64; 2]; 2]>,
    pub eigenvalues: Vec<f64>,
    /// Block `i` is the unit eigenvector of `T_i` scaled by `1/(i+1)`.
    pub z0: RealVector,
}

impl RotatingSubspaceExample {
    pub fn n_blocks(&self) -> usize {
        self.thetas.len()
    }

    pub fn problem(&self) -> ThreeOperatorProblem {
        let thetas = self.thetas.clone();
        let a = self.a;
        let dim = 2 * thetas.len();
        let resolvent_a = ProxOperator::new("rotating_subspace", a, f64::INFINITY, move |_, z| {
            crate::operators::check_dim("rotating subspace input", 2 * thetas.len(), z.dim())?;
            let mut out = RealVector::zeros(z.dim());
            for (i, t) in thetas.iter().enumerate() {
                let (s, c) = t.sin_cos();
                let proj = (c * z[2 * i] + s * z[2 * i + 1]) / (1.0 + a);
                out[2 * i] = c * proj;
                out[2 * i + 1] = s * proj;
            }
            Ok(out)
        });
        let resolvent_b = ProxOperator::new("first_coordinates", 0.0, f64::INFINITY, move |_, z| {
            Ok(z.iter()
                .enumerate()
                .map(|(j, &v)| if j % 2 == 0 { v } else { 0.0 })
                .collect())
        })
        .with_kind(crate::operators::ResolventKind::LinearProjection);
        let h = |x: &RealVector| 0.5 * x.norm_sq();
        let f = move |x: &RealVector| 0.5 * a * x.norm_sq();
        ThreeOperatorProblem::new(dim, resolvent_a, resolvent_b, ForwardOperator::identity())
            .with_objective(Objective::new(f, |_| 0.0, h))
            .with_reference(RealVector::zeros(dim))
    }

    /// `T z` computed blockwise from the stored matrices.
    pub fn apply_blocks(&self, z: &RealVector) -> RealVector {
        let mut out = RealVector::zeros(z.dim());
        for (i, m) in self.blocks.iter().enumerate() {
            let (p, q) = (z[2 * i], z[2 * i + 1]);
            out[2 * i] = m[0][0] * p + m[0][1] * q;
            out[2 * i + 1] = m[1][0] * p + m[1][1] * q;
        }
        out
    }

    /// Largest deviation between the stored blocks and the generic map `T`
    /// over the coordinate basis and `z0`.
    pub fn validate_blocks(&self) -> Result<f64, SolveError> {
        let problem = self.problem();
        let dim = problem.dim();
        let probes = (0..dim)
            .map(|j| RealVector::basis(dim, j))
            .chain(std::iter::once(self.z0.clone()));
        let mut worst: f64 = 0.0;
        for z in probes {
            let t = apply_t(&problem, 1.0, &z)?.t_z();
            worst = worst.max((&t - &self.apply_blocks(&z)).max_abs());
        }
        Ok(worst)
    }
}

fn block_matrix(a: f64, theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[0.0, -c * s / (1.0 + a)], [0.0, 1.0 - s * s / (1.0 + a)]]
}

pub fn build_slow_example(
    a: f64,
    theta_spec: &ThetaSpec,
    n_blocks: usize,
) -> Result<RotatingSubspaceExample, SolveError> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(SolveError::invalid("a", "must be finite and nonnegative"));
    }
    if n_blocks == 0 {
        return Err(SolveError::invalid("n_blocks", "must be positive"));
    }
    let thetas = match theta_spec {
        ThetaSpec::Constant(t) => vec![*t; n_blocks],
        ThetaSpec::Explicit(ts) => {
            if ts.len() != n_blocks {
                return Err(SolveError::Dimension {
                    context: "explicit angles",
                    expected: n_blocks,
                    found: ts.len(),
                });
            }
            ts.clone()
        }
        ThetaSpec::SlowRate { rate, horizon } => slow_rate_eigenvalues(a, rate.as_ref(), *horizon, n_blocks)
            .into_iter()
            .map(|b| ((a + 1.0) * b - a).clamp(0.0, 1.0).sqrt().acos())
            .collect(),
    };
    if let Some(bad) = thetas.iter().position(|t| !(*t > 0.0 && *t <= FRAC_PI_2)) {
        return Err(SolveError::invalid(
            "theta",
            format!("angle {bad} = {} outside (0, pi/2]", thetas[bad]),
        ));
    }
    let blocks: Vec<_> = thetas.iter().map(|&t| block_matrix(a, t)).collect();
    let mut eigenvalues = Vec::with_capacity(n_blocks);
    let mut z0 = RealVector::zeros(2 * n_blocks);
    for (i, (m, &t)) in blocks.iter().zip(&thetas).enumerate() {
        let (e1, e2) = eig2x2(*m).ok_or(SolveError::invalid("theta", "block has complex eigenvalues"))?;
        let b = if e1.abs() >= e2.abs() { e1 } else { e2 };
        eigenvalues.push(b);
        let c = t.cos();
        let denom = a + c * c;
        let v = if denom > 0.0 {
            [-c * t.sin() / denom, 1.0]
        } else {
            [0.0, 1.0]
        };
        let norm = v[0].hypot(v[1]) * (i + 1) as f64;
        z0[2 * i] = v[0] / norm;
        z0[2 * i + 1] = v[1] / norm;
    }
    Ok(RotatingSubspaceExample {
        a,
        thetas,
        blocks,
        eigenvalues,
        z0,
    })
}
