//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use splitkit::corpus::QuadraticTriple;
use splitkit::numkit::{solve_spd, DenseMatrix, RealVector};

/// Minimizer of `f + g + h` for a quadratic triple: solves
/// `(P_f + P_g + P_h)x = −(c_f + c_g + c_h)`.
pub fn kkt_solution(t: &QuadraticTriple) -> RealVector {
    let p = t
        .p_f
        .lincomb(1.0, &t.p_g, 1.0)
        .unwrap()
        .lincomb(1.0, &t.p_h, 1.0)
        .unwrap();
    let mut c = t.c_f.clone();
    c += &t.c_g;
    c += &t.c_h;
    &solve_spd(&p, &c).unwrap() * -1.0
}

pub fn affine(p: &DenseMatrix, c: &RealVector, x: &RealVector) -> RealVector {
    let mut y = p.mul_vec(x).unwrap();
    y += c;
    y
}

/// `z* = x* + γ∇g(x*)`.
pub fn fixed_point(t: &QuadraticTriple, gamma: f64) -> (RealVector, RealVector) {
    let x = kkt_solution(t);
    let mut z = x.clone();
    z.axpy(gamma, &affine(&t.p_g, &t.c_g, &x));
    (x, z)
}

/// `(I + γP)⁻¹(v − γc)`, solved directly.
pub fn quad_prox(p: &DenseMatrix, c: &RealVector, gamma: f64, v: &RealVector) -> RealVector {
    let m = DenseMatrix::identity(p.rows()).lincomb(1.0, p, gamma).unwrap();
    solve_spd(&m, &v.lincomb(1.0, c, -gamma)).unwrap()
}

/// Relaxed forward-backward on `f + h`, coded from scratch:
/// `x⁺ = x + λ(prox_{γf}(x − γ∇h(x)) − x)`.
pub fn fbs_reference(t: &QuadraticTriple, gamma: f64, lambda: f64, x0: &RealVector, steps: usize) -> Vec<RealVector> {
    let mut xs = vec![x0.clone()];
    for _ in 0..steps {
        let x = xs.last().unwrap();
        let g = affine(&t.p_h, &t.c_h, x);
        let p = quad_prox(&t.p_f, &t.c_f, gamma, &x.lincomb(1.0, &g, -gamma));
        xs.push(x.lincomb(1.0 - lambda, &p, lambda));
    }
    xs
}

/// Relaxed Douglas–Rachford on `f + g`, coded from scratch; returns the
/// `z` sequence.
pub fn drs_reference(t: &QuadraticTriple, gamma: f64, lambda: f64, z0: &RealVector, steps: usize) -> Vec<RealVector> {
    let mut zs = vec![z0.clone()];
    for _ in 0..steps {
        let z = zs.last().unwrap();
        let xg = quad_prox(&t.p_g, &t.c_g, gamma, z);
        let xf = quad_prox(&t.p_f, &t.c_f, gamma, &xg.lincomb(2.0, z, -1.0));
        let step = &xf - &xg;
        let mut next = z.clone();
        next.axpy(lambda, &step);
        zs.push(next);
    }
    zs
}
