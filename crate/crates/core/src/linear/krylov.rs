//! Right-preconditioned BiCGStab for nonsymmetric systems given only as
//! matrix-vector products.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrylovOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrylovReport {
    pub iterations: usize,
    pub rel_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b` starting from `x = 0`, with `precond` approximating
/// `A^{-1}`. Sums run in a fixed order so results are reproducible.
pub fn bicgstab(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    opts: KrylovOptions,
) -> Result<(Vec<f64>, KrylovReport)> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, KrylovReport { iterations: 0, rel_residual: 0.0 }));
    }
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut rel = 1.0;
    for it in 1..=opts.max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(Error::SolverDiverged { iterations: it, residual: rel });
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        let p_hat = precond(&p);
        v = apply(&p_hat);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 {
            return Err(Error::SolverDiverged { iterations: it, residual: rel });
        }
        alpha = rho / denom;
        let s: Vec<f64> = r.iter().zip(&v).map(|(a, b)| a - alpha * b).collect();
        let snorm = norm(&s);
        if snorm <= opts.rel_tol * bnorm {
            for k in 0..n {
                x[k] += alpha * p_hat[k];
            }
            return Ok((x, KrylovReport { iterations: it, rel_residual: snorm / bnorm }));
        }
        let s_hat = precond(&s);
        let t = apply(&s_hat);
        let tt = dot(&t, &t);
        omega = if tt == 0.0 { 0.0 } else { dot(&t, &s) / tt };
        for k in 0..n {
            x[k] += alpha * p_hat[k] + omega * s_hat[k];
            r[k] = s[k] - omega * t[k];
        }
        rel = norm(&r) / bnorm;
        if !rel.is_finite() {
            return Err(Error::SolverDiverged { iterations: it, residual: rel });
        }
        if rel <= opts.rel_tol {
            return Ok((x, KrylovReport { iterations: it, rel_residual: rel }));
        }
    }
    Err(Error::SolverDiverged { iterations: opts.max_iter, residual: rel })
}
