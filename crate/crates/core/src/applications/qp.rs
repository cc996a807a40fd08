use crate::error::SolveError;
use crate::numkit::{psd_eigen_range, DenseMatrix, RealVector};
use crate::operators::{grad_quadratic, ProxOperator, ResolventKind};
use crate::splitting::{solve_basic, Objective, RelaxationSchedule, SolveOutcome, StopRule, ThreeOperatorProblem};

/// `minimize ½⟨Qx, x⟩ + ⟨c, x⟩  subject to  x ∈ C₁ ∩ C₂`.
#[derive(Clone, Debug)]
pub struct QpSpec {
    pub q: DenseMatrix,
    pub c: RealVector,
    pub c1: ProxOperator,
    pub c2: ProxOperator,
    /// Replace `Q` by `P_{C₂} Q P_{C₂}`; only allowed when `C₂` is a linear
    /// subspace.
    pub precondition: bool,
}

impl QpSpec {
    pub fn new(q: DenseMatrix, c: RealVector, c1: ProxOperator, c2: ProxOperator) -> Self {
        Self {
            q,
            c,
            c1,
            c2,
            precondition: false,
        }
    }

    pub fn preconditioned(mut self) -> Self {
        self.precondition = true;
        self
    }

    /// The matrix actually used by the forward step.
    pub fn effective_q(&self) -> Result<DenseMatrix, SolveError> {
        let n = self.c.dim();
        if !(self.q.rows() == n && self.q.cols() == n) {
            return Err(SolveError::Dimension {
                context: "qp matrix",
                expected: n,
                found: self.q.rows(),
            });
        }
        if !self.q.is_symmetric(1e-12 * self.q.frobenius_norm().max(1.0)) {
            return Err(SolveError::invalid("q", "must be symmetric"));
        }
        if !self.precondition {
            return Ok(self.q.clone());
        }
        if self.c2.kind() != ResolventKind::LinearProjection {
            return Err(SolveError::invalid(
                "precondition",
                format!("requires a linear-subspace projection for C2, got {}", self.c2.label()),
            ));
        }
        // P Q P, applying P to columns then to rows.
        let mut pq = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.c2.resolve(1.0, &self.q.column(j))?;
            for i in 0..n {
                pq.set(i, j, col[i]);
            }
        }
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let row = self.c2.resolve(1.0, &RealVector::from(pq.row(i)))?;
            for j in 0..n {
                out.set(i, j, row[j]);
            }
        }
        // Restore exact symmetry lost to rounding.
        Ok(out.lincomb(0.5, &out.transpose(), 0.5)?)
    }

    /// `A = N_{C₂}`, `B = N_{C₁}`, `C = Qx + c`.
    pub fn problem(&self) -> Result<ThreeOperatorProblem, SolveError> {
        let q = self.effective_q()?;
        let (mu, _) = psd_eigen_range(&q);
        let (qv, cv) = (q.clone(), self.c.clone());
        let h = move |x: &RealVector| 0.5 * x.dot(&qv.mul_vec(x).expect("shape")) + cv.dot(x);
        let c = grad_quadratic(q, self.c.clone(), mu)?;
        Ok(
            ThreeOperatorProblem::new(self.c.dim(), self.c2.clone(), self.c1.clone(), c)
                .with_objective(Objective::new(|_| 0.0, |_| 0.0, h)),
        )
    }
}

pub fn solve_constrained_qp(
    spec: &QpSpec,
    schedule: &RelaxationSchedule,
    z0: &RealVector,
    stop: StopRule,
) -> Result<SolveOutcome, SolveError> {
    solve_basic(&spec.problem()?, schedule, z0, stop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{project_box, project_halfspace, project_hyperplane, project_simplex};
    use crate::splitting::Lambdas;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> RealVector {
        RealVector::from(xs)
    }

    fn whole(n: usize) -> ProxOperator {
        project_box(
            RealVector::filled(n, f64::NEG_INFINITY),
            RealVector::filled(n, f64::INFINITY),
        )
        .unwrap()
    }

    fn schedule(gamma: f64, beta: f64) -> RelaxationSchedule {
        RelaxationSchedule::with_default_epsilon(gamma, beta, Lambdas::default()).unwrap()
    }

    #[test]
    fn simplex_and_halfspace() {
        let spec = QpSpec::new(
            DenseMatrix::identity(2),
            v(&[-1.0, -1.0]),
            project_simplex(),
            project_halfspace(v(&[1.0, 1.0]), 1.0).unwrap(),
        );
        let out = solve_constrained_qp(&spec, &schedule(1.0, 1.0), &v(&[0.0, 0.0]), StopRule::default()).unwrap();
        assert!(out.solution().dist(&v(&[0.5, 0.5])) < 1e-9);
    }

    #[test]
    fn clamped_scalar() {
        let spec = QpSpec::new(
            DenseMatrix::identity(1),
            v(&[-1.0]),
            project_box(v(&[0.0]), v(&[0.5])).unwrap(),
            whole(1),
        );
        let out = solve_constrained_qp(&spec, &schedule(1.0, 1.0), &v(&[3.0]), StopRule::default()).unwrap();
        assert_relative_eq!(out.solution()[0], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn unconstrained_matches_linear_solve() {
        let q = DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let c = v(&[1.0, -1.0]);
        let want = &crate::numkit::solve_spd(&q, &c).unwrap() * -1.0;
        let beta = 1.0 / crate::numkit::op_norm(&q);
        let spec = QpSpec::new(q, c, whole(2), whole(2));
        let out = solve_constrained_qp(&spec, &schedule(beta, beta), &v(&[0.0, 0.0]), StopRule::default()).unwrap();
        assert!(out.solution().dist(&want) < 1e-8);
    }

    #[test]
    fn preconditioning_rules() {
        let q = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let c = v(&[-1.0, 0.5]);
        let plane = project_hyperplane(v(&[1.0, -1.0]), 0.0).unwrap();
        let plain = QpSpec::new(q.clone(), c.clone(), whole(2), plane.clone());
        let pre = plain.clone().preconditioned();
        let pq = pre.effective_q().unwrap();
        // On span{(1,1)} the quadratic form is unchanged.
        let d = v(&[1.0, 1.0]);
        assert_relative_eq!(
            d.dot(&pq.mul_vec(&d).unwrap()),
            d.dot(&q.mul_vec(&d).unwrap()),
            epsilon = 1e-12
        );
        let b1 = 1.0 / crate::numkit::op_norm(&q);
        let b2 = 1.0 / crate::numkit::op_norm(&pq);
        let x1 = solve_constrained_qp(&plain, &schedule(b1, b1), &v(&[0.0, 0.0]), StopRule::default()).unwrap();
        let x2 = solve_constrained_qp(&pre, &schedule(b2, b2), &v(&[0.0, 0.0]), StopRule::default()).unwrap();
        assert!(x1.solution().dist(x2.solution()) < 1e-6);

        let bad = QpSpec::new(q, c, whole(2), project_halfspace(v(&[1.0, 1.0]), 1.0).unwrap()).preconditioned();
        assert!(bad.problem().is_err());
    }
}
