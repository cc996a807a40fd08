use std::time::Instant;

use crate::error::SolveError;
use crate::numkit::RealVector;
use crate::splitting::{Status, StopRule, ThreeOperatorProblem, TraceRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimalDualVariant {
    /// Forward-backward primal-dual iteration with free `τ, σ`.
    FbsPd,
    /// `τ = γ`, `σ = 1/γ` and the extra `Cx^{k−1} − Cx^k` term in the dual
    /// step; its primal sequence is the `x_B` sequence of the basic iteration.
    EquivalentForm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimalDualConfig {
    pub tau: f64,
    pub sigma: f64,
    pub variant: PrimalDualVariant,
    /// Drop the correction term of the equivalent form.
    pub zero_correction: bool,
}

impl PrimalDualConfig {
    pub fn fbs_pd(tau: f64, sigma: f64) -> Self {
        Self {
            tau,
            sigma,
            variant: PrimalDualVariant::FbsPd,
            zero_correction: false,
        }
    }

    pub fn equivalent_form(gamma: f64) -> Self {
        Self {
            tau: gamma,
            sigma: 1.0 / gamma,
            variant: PrimalDualVariant::EquivalentForm,
            zero_correction: false,
        }
    }

    fn validate(&self) -> Result<(), SolveError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(SolveError::invalid("tau", "must be positive"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(SolveError::invalid("sigma", "must be positive"));
        }
        if self.variant == PrimalDualVariant::EquivalentForm && (self.tau * self.sigma - 1.0).abs() > 1e-12 {
            return Err(SolveError::invalid(
                "sigma",
                "the equivalent form needs sigma = 1/gamma",
            ));
        }
        Ok(())
    }
}

/// Primal point `x` (in the domain of `B`) and dual point `y` (in the range
/// of `A`).
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalDualState {
    pub x: RealVector,
    pub y: RealVector,
    pub tau: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug)]
pub struct PrimalDualOutcome {
    /// States from the starting pair onwards.
    pub history: Vec<PrimalDualState>,
    pub trace: Vec<TraceRecord>,
    pub status: Status,
}

impl PrimalDualOutcome {
    pub fn last(&self) -> &PrimalDualState {
        self.history.last().expect("history holds the starting pair")
    }
}

/// `J_{σA⁻¹}(v) = v − σ J_{σ⁻¹A}(v/σ)`.
fn dual_resolvent(problem: &ThreeOperatorProblem, sigma: f64, v: &RealVector) -> Result<RealVector, SolveError> {
    let inner = problem.a.resolve(1.0 / sigma, &(v * (1.0 / sigma)))?;
    Ok(v.lincomb(1.0, &inner, -sigma))
}

/// Runs
/// `x^k = J_{τB}(x^{k−1} − τCx^{k−1} − τy^{k−1})`,
/// `y^k = J_{σA⁻¹}(y^{k−1} + σ(2x^k − x^{k−1}) [+ Cx^{k−1} − Cx^k])`
/// until `‖x^k − x^{k−1}‖² + τ²‖y^k − y^{k−1}‖² ≤ tol²`.
pub fn solve_primal_dual(
    problem: &ThreeOperatorProblem,
    config: PrimalDualConfig,
    x0: &RealVector,
    y0: &RealVector,
    stop: StopRule,
) -> Result<PrimalDualOutcome, SolveError> {
    config.validate()?;
    stop.validate()?;
    SolveError::check_dim("primal start", problem.dim(), x0.dim())?;
    SolveError::check_dim("dual start", problem.dim(), y0.dim())?;
    let PrimalDualConfig { tau, sigma, .. } = config;
    let corrected = config.variant == PrimalDualVariant::EquivalentForm && !config.zero_correction;
    let start = Instant::now();
    let mut x = x0.clone();
    let mut y = y0.clone();
    let mut cx = problem.c.apply(&x)?;
    let mut history = vec![PrimalDualState {
        x: x.clone(),
        y: y.clone(),
        tau,
        sigma,
    }];
    let mut trace = Vec::new();
    let tol_sq = stop.tol_sq();
    for k in 1..=stop.max_iter {
        let mut arg = x.clone();
        arg.axpy(-tau, &cx);
        arg.axpy(-tau, &y);
        let x_next = problem.b.resolve(tau, &arg)?;
        let cx_next = problem.c.apply(&x_next)?;
        let mut dual_arg = y.clone();
        dual_arg.axpy(sigma, &x_next.lincomb(2.0, &x, -1.0));
        if corrected {
            dual_arg += &cx;
            dual_arg -= &cx_next;
        }
        let y_next = dual_resolvent(problem, sigma, &dual_arg)?;
        if !(x_next.is_finite() && y_next.is_finite()) {
            return Err(SolveError::NonFinite { k });
        }
        let change = x_next.dist_sq(&x) + tau * tau * y_next.dist_sq(&y);
        x = x_next;
        y = y_next;
        cx = cx_next;
        trace.push(TraceRecord {
            k,
            fpr_sq: change,
            objective: problem.objective.as_ref().map(|o| o.value(&x)),
            dist_ref: problem.reference_solution.as_ref().map(|r| r.dist(&x)),
            gamma_k: tau,
            lambda_k: 1.0,
            elapsed_s: start.elapsed().as_secs_f64(),
        });
        history.push(PrimalDualState {
            x: x.clone(),
            y: y.clone(),
            tau,
            sigma,
        });
        if change <= tol_sq {
            return Ok(PrimalDualOutcome {
                history,
                trace,
                status: Status::Converged,
            });
        }
    }
    Ok(PrimalDualOutcome {
        history,
        trace,
        status: Status::MaxIterations,
    })
}
