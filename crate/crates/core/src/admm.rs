//! ADMM obtained by running the three-operator iteration on the dual of a
//! linearly coupled separable program
//!
//! ```text
//! minimize Σ f_i(x_i)  subject to  Σ L_i x_i = b.
//! ```
//!
//! Sign convention, fixed in one place: the Lagrangian is
//! `Σ f_i(x_i) − ⟨w, Σ L_i x_i − b⟩`, so the dual terms are
//! `d_i(w) = f_i*(L_iᵀw)` and `d_m(w) = f_m*(L_mᵀw) − ⟨w, b⟩`, the unpenalized
//! step minimizes `f_1 − ⟨w, L_1 x_1⟩`, and the multiplier update is
//! `w⁺ = w − γ(Σ L_i x_i − b)`. Under this convention the primal ADMM and the
//! dual splitting iteration produce the same `w^k`.

use std::fmt;
use std::sync::Arc;

use crate::batch;
use crate::error::SolveError;
use crate::numkit::{op_norm, psd_eigen_range, solve_spd, DenseMatrix, RealVector};
use crate::splitting::{Status, StopRule, ValueFn};

pub type LinearArgminFn = dyn Fn(&RealVector) -> Result<RealVector, SolveError> + Send + Sync;
pub type PenalizedArgminFn = dyn Fn(f64, &RealVector) -> Result<RealVector, SolveError> + Send + Sync;

/// Subproblem oracle for one block `f(x)` with coupling map `L`.
#[derive(Clone)]
pub struct ArgminOracle {
    linear: Arc<LinearArgminFn>,
    penalized: Arc<PenalizedArgminFn>,
    map: DenseMatrix,
    value: ValueFn,
    mu: f64,
}

impl ArgminOracle {
    /// `linear(w) = argmin f(x) + ⟨w, Lx⟩`,
    /// `penalized(γ, v) = argmin f(x) + (γ/2)‖Lx − v‖²`; `mu` is the strong
    /// convexity modulus of `f` (0 if unknown).
    pub fn new<V, F, G>(map: DenseMatrix, mu: f64, value: V, linear: F, penalized: G) -> Self
    where
        V: Fn(&RealVector) -> f64 + Send + Sync + 'static,
        F: Fn(&RealVector) -> Result<RealVector, SolveError> + Send + Sync + 'static,
        G: Fn(f64, &RealVector) -> Result<RealVector, SolveError> + Send + Sync + 'static,
    {
        Self {
            linear: Arc::new(linear),
            penalized: Arc::new(penalized),
            map,
            value: Arc::new(value),
            mu,
        }
    }

    /// Block `f(x) = ½xᵀPx + qᵀx`. The linear oracle needs `P` positive
    /// definite; the penalized one needs `P + γLᵀL` positive definite.
    pub fn quadratic(p: DenseMatrix, q: RealVector, map: DenseMatrix) -> Result<Self, SolveError> {
        SolveError::check_dim("block matrix", q.dim(), p.rows())?;
        SolveError::check_dim("block map columns", q.dim(), map.cols())?;
        let (mu, _) = psd_eigen_range(&p);
        let gram = map.gram();
        let (p1, q1, l1) = (p.clone(), q.clone(), map.clone());
        let (p2, q2, l2) = (p.clone(), q.clone(), map.clone());
        Ok(Self::new(
            map,
            mu,
            move |x| 0.5 * x.dot(&p.mul_vec(x).expect("shape")) + q.dot(x),
            move |w| {
                let mut rhs = l1.tr_mul_vec(w)?;
                rhs += &q1;
                Ok(&solve_spd(&p1, &rhs)? * -1.0)
            },
            move |gamma, v| {
                let m = p2.lincomb(1.0, &gram, gamma)?;
                let rhs = l2.tr_mul_vec(v)?.lincomb(gamma, &q2, -1.0);
                Ok(solve_spd(&m, &rhs)?)
            },
        ))
    }

    /// `f = 0`, `L = 0`: the block drops out of the problem.
    pub fn vanished(dim_x: usize, dim_b: usize) -> Self {
        Self::new(
            DenseMatrix::zeros(dim_b, dim_x),
            0.0,
            |_| 0.0,
            move |_| Ok(RealVector::zeros(dim_x)),
            move |_, _| Ok(RealVector::zeros(dim_x)),
        )
    }

    pub fn linear_argmin(&self, w: &RealVector) -> Result<RealVector, SolveError> {
        SolveError::check_dim("linear argmin input", self.map.rows(), w.dim())?;
        (self.linear)(w)
    }

    pub fn penalized_argmin(&self, gamma: f64, v: &RealVector) -> Result<RealVector, SolveError> {
        SolveError::check_dim("penalized argmin input", self.map.rows(), v.dim())?;
        (self.penalized)(gamma, v)
    }

    pub fn map(&self) -> &DenseMatrix {
        &self.map
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn value(&self, x: &RealVector) -> f64 {
        (self.value)(x)
    }

    pub fn apply_map(&self, x: &RealVector) -> Result<RealVector, SolveError> {
        Ok(self.map.mul_vec(x)?)
    }
}

impl fmt::Debug for ArgminOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArgminOracle")
            .field("map_shape", &(self.map.rows(), self.map.cols()))
            .field("mu", &self.mu)
            .finish()
    }
}

/// Blocks, right-hand side and stepsize of a separable program.
#[derive(Clone, Debug)]
pub struct AdmmProblem {
    pub blocks: Vec<ArgminOracle>,
    pub b: RealVector,
    pub gamma: f64,
}

impl AdmmProblem {
    pub fn new(blocks: Vec<ArgminOracle>, b: RealVector, gamma: f64) -> Self {
        Self { blocks, b, gamma }
    }

    /// Largest admissible stepsize `2/Σ_{i ≤ m−2} ‖L_i‖²/μ_i`; for three
    /// blocks this is `2μ₁/‖L₁‖²`.
    pub fn stepsize_bound(&self) -> Result<f64, SolveError> {
        let m = self.blocks.len();
        if m < 3 {
            return Err(SolveError::invalid(
                "blocks",
                format!("need at least 3 blocks, got {m}"),
            ));
        }
        let mut rho = 0.0;
        for block in &self.blocks[..m - 2] {
            if !(block.mu() > 0.0) {
                return Err(SolveError::Missing("strong convexity modulus of a leading block"));
            }
            let n = op_norm(block.map());
            rho += n * n / block.mu();
        }
        Ok(if rho > 0.0 { 2.0 / rho } else { f64::INFINITY })
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        for block in &self.blocks {
            SolveError::check_dim("block map rows", self.b.dim(), block.map().rows())?;
        }
        let bound = self.stepsize_bound()?;
        if !(self.gamma > 0.0 && self.gamma < bound) {
            return Err(SolveError::StepsizeBound {
                gamma: self.gamma,
                bound,
            });
        }
        Ok(())
    }

    /// `Σ L_i x_i − b`.
    pub fn constraint_residual(&self, xs: &[RealVector]) -> Result<RealVector, SolveError> {
        let mut r = -&self.b;
        for (block, x) in self.blocks.iter().zip(xs) {
            r += &block.apply_map(x)?;
        }
        Ok(r)
    }

    pub fn objective(&self, xs: &[RealVector]) -> f64 {
        self.blocks.iter().zip(xs).map(|(b, x)| b.value(x)).sum()
    }

    /// The block-`m` point consistent with `w⁰`: `argmin f_m − ⟨w⁰, L_m x⟩`.
    pub fn consistent_last_block(&self, w0: &RealVector) -> Result<RealVector, SolveError> {
        let last = self.blocks.last().ok_or(SolveError::Missing("blocks"))?;
        last.linear_argmin(&-w0)
    }

    /// Dual starting point `z⁰ = w⁰ + γ(L_m x_m⁰ − b)`.
    pub fn dual_start(&self, w0: &RealVector, xm_0: &RealVector) -> Result<RealVector, SolveError> {
        let last = self.blocks.last().ok_or(SolveError::Missing("blocks"))?;
        let mut z = w0.clone();
        z.axpy(self.gamma, &(&last.apply_map(xm_0)? - &self.b));
        Ok(z)
    }
}

/// `prox_{γd}(y)` for `d(w) = f*(Lᵀw) − ⟨w, c⟩`, together with the primal
/// point `x'' = argmin f(x) + (γ/2)‖Lx − c − y/γ‖²` that realizes it:
/// `prox = y − γ(Lx'' − c)`.
pub fn prox_dual(
    oracle: &ArgminOracle,
    c: &RealVector,
    gamma: f64,
    y: &RealVector,
) -> Result<(RealVector, RealVector), SolveError> {
    if !(gamma > 0.0) {
        return Err(SolveError::invalid("gamma", "must be positive"));
    }
    let target = c.lincomb(1.0, y, 1.0 / gamma);
    let x_pp = oracle.penalized_argmin(gamma, &target)?;
    let mut prox = y.clone();
    prox.axpy(-gamma, &(&oracle.apply_map(&x_pp)? - c));
    Ok((prox, x_pp))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmmRecord {
    pub k: usize,
    pub constraint_residual: f64,
    pub dual_change: f64,
    pub objective: f64,
}

#[derive(Clone, Debug)]
pub struct AdmmOutcome {
    pub w: RealVector,
    pub blocks: Vec<RealVector>,
    /// `w⁰, w¹, …`
    pub w_history: Vec<RealVector>,
    pub trace: Vec<AdmmRecord>,
    pub status: Status,
}

fn validate_start(problem: &AdmmProblem, w0: &RealVector, last: &RealVector) -> Result<(), SolveError> {
    problem.validate()?;
    SolveError::check_dim("initial multiplier", problem.b.dim(), w0.dim())?;
    SolveError::check_dim(
        "initial last block",
        problem.blocks.last().map_or(0, |b| b.map().cols()),
        last.dim(),
    )
}

struct Progress {
    w_history: Vec<RealVector>,
    trace: Vec<AdmmRecord>,
    tol: f64,
}

impl Progress {
    /// Records iteration `k` and reports whether the joint residual is small:
    /// constraint residual, multiplier change and change of every `L_i x_i`
    /// (scaled by `γ`) all at most `tol`.
    fn push(
        &mut self,
        problem: &AdmmProblem,
        prev_maps: &[RealVector],
        xs: &[RealVector],
        w_next: RealVector,
    ) -> Result<(bool, Vec<RealVector>), SolveError> {
        let residual = problem.constraint_residual(xs)?.norm();
        let w_prev = self.w_history.last().expect("history starts with w0");
        let dual_change = w_prev.dist(&w_next);
        let maps: Vec<RealVector> = problem
            .blocks
            .iter()
            .zip(xs)
            .map(|(b, x)| b.apply_map(x))
            .collect::<Result<_, _>>()?;
        let block_change = maps
            .iter()
            .zip(prev_maps)
            .map(|(a, b)| problem.gamma * a.dist(b))
            .fold(0.0, f64::max);
        if !w_next.is_finite() {
            return Err(SolveError::NonFinite {
                k: self.trace.len() + 1,
            });
        }
        self.trace.push(AdmmRecord {
            k: self.trace.len() + 1,
            constraint_residual: residual,
            dual_change,
            objective: problem.objective(xs),
        });
        self.w_history.push(w_next);
        Ok((
            residual <= self.tol && dual_change <= self.tol && block_change <= self.tol,
            maps,
        ))
    }
}

/// Three-block ADMM:
/// 1. `x₁ = argmin f₁ − ⟨w, L₁x₁⟩`
/// 2. `x₂ = argmin f₂ + (γ/2)‖L₁x₁ + L₂x₂ + L₃x₃ − b − w/γ‖²`
/// 3. `x₃ = argmin f₃ + (γ/2)‖L₁x₁ + L₂x₂ + L₃x₃ − b − w/γ‖²`
/// 4. `w⁺ = w − γ(L₁x₁ + L₂x₂ + L₃x₃ − b)`
pub fn solve_admm3(
    problem: &AdmmProblem,
    w0: &RealVector,
    x3_0: &RealVector,
    stop: StopRule,
) -> Result<AdmmOutcome, SolveError> {
    if problem.blocks.len() != 3 {
        return Err(SolveError::invalid("blocks", "three-block ADMM needs exactly 3 blocks"));
    }
    stop.validate()?;
    validate_start(problem, w0, x3_0)?;
    let [f1, f2, f3] = [&problem.blocks[0], &problem.blocks[1], &problem.blocks[2]];
    let gamma = problem.gamma;
    let b = &problem.b;
    let mut w = w0.clone();
    let mut x3 = x3_0.clone();
    let mut xs = vec![
        RealVector::zeros(f1.map().cols()),
        RealVector::zeros(f2.map().cols()),
        x3.clone(),
    ];
    let mut maps: Vec<RealVector> = problem
        .blocks
        .iter()
        .zip(&xs)
        .map(|(bl, x)| bl.apply_map(x))
        .collect::<Result<_, _>>()?;
    let mut progress = Progress {
        w_history: vec![w.clone()],
        trace: Vec::new(),
        tol: stop.tol,
    };
    for _ in 0..stop.max_iter {
        let x1 = f1.linear_argmin(&-&w)?;
        let l1x1 = f1.apply_map(&x1)?;
        let mut v2 = b - &l1x1;
        v2 -= &f3.apply_map(&x3)?;
        v2.axpy(1.0 / gamma, &w);
        let x2 = f2.penalized_argmin(gamma, &v2)?;
        let l2x2 = f2.apply_map(&x2)?;
        let mut v3 = b - &l1x1;
        v3 -= &l2x2;
        v3.axpy(1.0 / gamma, &w);
        x3 = f3.penalized_argmin(gamma, &v3)?;
        let mut r = -b;
        r += &l1x1;
        r += &l2x2;
        r += &f3.apply_map(&x3)?;
        let mut w_next = w.clone();
        w_next.axpy(-gamma, &r);
        xs = vec![x1, x2, x3.clone()];
        let (done, next_maps) = progress.push(problem, &maps, &xs, w_next.clone())?;
        maps = next_maps;
        w = w_next;
        if done {
            return Ok(finish(w, xs, progress, Status::Converged));
        }
    }
    Ok(finish(w, xs, progress, Status::MaxIterations))
}

fn finish(w: RealVector, blocks: Vec<RealVector>, p: Progress, status: Status) -> AdmmOutcome {
    AdmmOutcome {
        w,
        blocks,
        w_history: p.w_history,
        trace: p.trace,
        status,
    }
}

/// `m`-block ADMM: blocks `1..m−2` take independent unpenalized steps (run
/// through [`batch::try_map`]), then blocks `m−1` and `m` take sequential
/// penalized steps, then the multiplier update.
pub fn solve_admm_m(
    problem: &AdmmProblem,
    w0: &RealVector,
    xm_0: &RealVector,
    stop: StopRule,
) -> Result<AdmmOutcome, SolveError> {
    stop.validate()?;
    validate_start(problem, w0, xm_0)?;
    let m = problem.blocks.len();
    let gamma = problem.gamma;
    let b = &problem.b;
    let leading = &problem.blocks[..m - 2];
    let (fp, fm) = (&problem.blocks[m - 2], &problem.blocks[m - 1]);
    let mut w = w0.clone();
    let mut xm = xm_0.clone();
    let mut xs: Vec<RealVector> = problem
        .blocks
        .iter()
        .map(|bl| RealVector::zeros(bl.map().cols()))
        .collect();
    xs[m - 1] = xm.clone();
    let mut maps: Vec<RealVector> = problem
        .blocks
        .iter()
        .zip(&xs)
        .map(|(bl, x)| bl.apply_map(x))
        .collect::<Result<_, _>>()?;
    let mut progress = Progress {
        w_history: vec![w.clone()],
        trace: Vec::new(),
        tol: stop.tol,
    };
    for _ in 0..stop.max_iter {
        let neg_w = -&w;
        let firsts = batch::try_map(leading, |bl| {
            let x = bl.linear_argmin(&neg_w)?;
            let lx = bl.apply_map(&x)?;
            Ok::<_, SolveError>((x, lx))
        })?;
        let mut v = b.clone();
        for (_, lx) in &firsts {
            v -= lx;
        }
        let mut vp = v.clone();
        vp -= &fm.apply_map(&xm)?;
        vp.axpy(1.0 / gamma, &w);
        let xp = fp.penalized_argmin(gamma, &vp)?;
        let lxp = fp.apply_map(&xp)?;
        let mut vm = v;
        vm -= &lxp;
        vm.axpy(1.0 / gamma, &w);
        xm = fm.penalized_argmin(gamma, &vm)?;
        let mut r = -b;
        for (_, lx) in &firsts {
            r += lx;
        }
        r += &lxp;
        r += &fm.apply_map(&xm)?;
        let mut w_next = w.clone();
        w_next.axpy(-gamma, &r);
        xs = firsts.into_iter().map(|(x, _)| x).collect();
        xs.push(xp);
        xs.push(xm.clone());
        let (done, next_maps) = progress.push(problem, &maps, &xs, w_next.clone())?;
        maps = next_maps;
        w = w_next;
        if done {
            return Ok(finish(w, xs, progress, Status::Converged));
        }
    }
    Ok(finish(w, xs, progress, Status::MaxIterations))
}

#[derive(Clone, Debug)]
pub struct DualOutcome {
    /// `w⁰, w¹, …` with `w^k = prox_{γd₃}(z^k)`.
    pub w_history: Vec<RealVector>,
    pub z: RealVector,
    pub status: Status,
}

/// The splitting iteration on the dual `d₁ + d₂ + d₃`:
/// `w^k = prox_{γd₃}(z^k)`, `z^{k+½} = 2w^k − z^k − γ∇d₁(w^k)`,
/// `z^{k+1} = z^k + prox_{γd₂}(z^{k+½}) − w^k`, where
/// `∇d₁(w) = L₁ argmin(f₁ − ⟨w, L₁·⟩)`.
pub fn solve_admm_dual(problem: &AdmmProblem, z0: &RealVector, stop: StopRule) -> Result<DualOutcome, SolveError> {
    if problem.blocks.len() != 3 {
        return Err(SolveError::invalid(
            "blocks",
            "the dual iteration needs exactly 3 blocks",
        ));
    }
    problem.validate()?;
    stop.validate()?;
    SolveError::check_dim("dual starting point", problem.b.dim(), z0.dim())?;
    let [f1, f2, f3] = [&problem.blocks[0], &problem.blocks[1], &problem.blocks[2]];
    let gamma = problem.gamma;
    let zero = RealVector::zeros(problem.b.dim());
    let mut z = z0.clone();
    let mut w_history = Vec::new();
    for k in 0..=stop.max_iter {
        let (w, _) = prox_dual(f3, &problem.b, gamma, &z)?;
        w_history.push(w.clone());
        if k == stop.max_iter {
            break;
        }
        let grad = f1.apply_map(&f1.linear_argmin(&-&w)?)?;
        let mut half = w.lincomb(2.0, &z, -1.0);
        half.axpy(-gamma, &grad);
        let (p2, _) = prox_dual(f2, &zero, gamma, &half)?;
        let mut z_next = z.clone();
        z_next += &p2;
        z_next -= &w;
        if !z_next.is_finite() {
            return Err(SolveError::NonFinite { k: k + 1 });
        }
        let change = z_next.dist(&z);
        z = z_next;
        if change <= stop.tol {
            let (w, _) = prox_dual(f3, &problem.b, gamma, &z)?;
            w_history.push(w);
            return Ok(DualOutcome {
                w_history,
                z,
                status: Status::Converged,
            });
        }
    }
    Ok(DualOutcome {
        w_history,
        z,
        status: Status::MaxIterations,
    })
}
