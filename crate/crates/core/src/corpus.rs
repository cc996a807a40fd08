//! Seeded problem generators. Every random draw flows from one 64-bit seed
//! through a ChaCha stream, so corpora are bit-reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numkit::{psd_eigen_range, DenseMatrix, RealVector};
use crate::operators::{
    grad_quadratic, make_quadratic_prox, project_box, project_halfspace, ForwardOperator, ProxOperator,
};
use crate::splitting::{Objective, ThreeOperatorProblem};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> CorpusRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn random_vector(rng: &mut CorpusRng, dim: usize, scale: f64) -> RealVector {
    (0..dim).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_matrix(rng: &mut CorpusRng, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DenseMatrix::new(rows, cols, data).expect("shape is consistent")
}

/// `GᵀG/n + shift·I` with uniform entries in `G`.
pub fn random_spd(rng: &mut CorpusRng, dim: usize, shift: f64) -> DenseMatrix {
    let g = random_matrix(rng, dim, dim);
    g.gram()
        .scaled(1.0 / dim as f64)
        .lincomb(1.0, &DenseMatrix::identity(dim), shift)
        .expect("square shapes agree")
}

/// `f, g, h` all of the form `½xᵀPx + cᵀx`.
#[derive(Clone, Debug)]
pub struct QuadraticTriple {
    pub p_f: DenseMatrix,
    pub c_f: RealVector,
    pub p_g: DenseMatrix,
    pub c_g: RealVector,
    pub p_h: DenseMatrix,
    pub c_h: RealVector,
}

fn quad_value(p: &DenseMatrix, c: &RealVector, x: &RealVector) -> f64 {
    0.5 * x.dot(&p.mul_vec(x).expect("shape")) + c.dot(x)
}

impl QuadraticTriple {
    /// Each block gets a positive definite matrix with eigenvalues at least
    /// `shift`.
    pub fn random(rng: &mut CorpusRng, dim: usize, shift: f64) -> Self {
        Self {
            p_f: random_spd(rng, dim, shift),
            c_f: random_vector(rng, dim, 1.0),
            p_g: random_spd(rng, dim, shift),
            c_g: random_vector(rng, dim, 1.0),
            p_h: random_spd(rng, dim, shift),
            c_h: random_vector(rng, dim, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.c_f.dim()
    }

    pub fn problem(&self) -> ThreeOperatorProblem {
        let (mu_f, l_f) = psd_eigen_range(&self.p_f);
        let (mu_g, l_g) = psd_eigen_range(&self.p_g);
        let (mu_h, _) = psd_eigen_range(&self.p_h);
        let a = make_quadratic_prox(self.p_f.clone(), self.c_f.clone(), mu_f, l_f).expect("valid block");
        let b = make_quadratic_prox(self.p_g.clone(), self.c_g.clone(), mu_g, l_g).expect("valid block");
        let c = grad_quadratic(self.p_h.clone(), self.c_h.clone(), mu_h).expect("valid block");
        let (pf, cf, pg, cg, ph, ch) = (
            self.p_f.clone(),
            self.c_f.clone(),
            self.p_g.clone(),
            self.c_g.clone(),
            self.p_h.clone(),
            self.c_h.clone(),
        );
        let objective = Objective::new(
            move |x| quad_value(&pf, &cf, x),
            move |x| quad_value(&pg, &cg, x),
            move |x| quad_value(&ph, &ch, x),
        );
        ThreeOperatorProblem::new(self.dim(), a, b, c).with_objective(objective)
    }
}

/// Root of `y + γy³ = v` by Newton's method from `y = v`, which approaches
/// the root monotonically.
fn quartic_root(gamma: f64, v: f64) -> f64 {
    let mut y = v;
    for _ in 0..100 {
        let next = y - (y + gamma * y * y * y - v) / (1.0 + 3.0 * gamma * y * y);
        if next == y {
            break;
        }
        y = next;
    }
    y
}

/// `f = ¼Σx_i⁴`, `g = ι_{[−1,1]^d}`, `h = ½d²(x, {x₁ ≤ 0})`. The minimizer
/// is `0` with value `0` and the bottom is flat, so the iterates converge
/// sublinearly. `∇f` is 3-Lipschitz on the box.
pub fn quartic_bowl(dim: usize) -> ThreeOperatorProblem {
    let a = ProxOperator::new("quartic", 0.0, 3.0, |gamma, z| Ok(z.map(|v| quartic_root(gamma, v))));
    let b = project_box(RealVector::filled(dim, -1.0), RealVector::filled(dim, 1.0)).expect("valid box");
    let mut normal = RealVector::zeros(dim);
    normal[0] = -1.0;
    let half = project_halfspace(normal, 0.0).expect("nonzero normal");
    let half_c = half.clone();
    let c =
        ForwardOperator::new("halfspace_distance", 1.0, move |x| Ok(x - &half_c.resolve(1.0, x)?)).with_lipschitz(1.0);
    let objective = Objective::new(
        |x| x.iter().map(|v| v.powi(4) / 4.0).sum(),
        |x| if x.max_abs() <= 1.0 { 0.0 } else { f64::INFINITY },
        move |x| 0.5 * x.dist_sq(&half.resolve(1.0, x).expect("projection")),
    );
    ThreeOperatorProblem::new(dim, a, b, c)
        .with_objective(objective)
        .with_reference(RealVector::zeros(dim))
}
