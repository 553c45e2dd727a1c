//! Residual of the maximal-slice equation for a height graph `t = u(x)`
//! and its derivative.
//!
//! In ball coordinates the equation reads
//! `tau^n div_0(tau^{2-n} W grad_0 u) + 2 tau / (1 - tau) W x.grad_0 u = 0`
//! with `q = (1 - tau)^2 |grad_0 u|^2` and `W = (1 - q)^{-1/2}`. Expanded,
//! `R = W L u + tau^2 W^3 / 2 grad q . grad u`, which is how it is evaluated.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::ops::{gradient, gradient_from, project};
use crate::field::{Grid, ScalarField, Spectrum, VectorField};
use crate::linear::operator::l_spectrum;

/// `Maximal` is the maximal-slice equation; `Rescaled { eps }` the rescaled family
/// solved by `u / sqrt(eps)`, where `q` is replaced by `eps q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Form {
    Maximal,
    Rescaled { eps: f64 },
}

impl Form {
    pub fn factor(&self) -> f64 {
        match self {
            Form::Maximal => 1.0,
            Form::Rescaled { eps } => *eps,
        }
    }
}

fn dot_at(a: &VectorField, b: &VectorField, flat: usize) -> f64 {
    a.components.iter().zip(&b.components).map(|(x, y)| x.values()[flat] * y.values()[flat]).sum()
}

/// `q` at every node, including the boundary ring.
pub fn spacelike_q(u: &ScalarField, form: Form) -> ScalarField {
    q_from_gradient(u.grid(), &gradient(u), form.factor())
}

fn q_from_gradient(grid: &Arc<Grid>, g: &VectorField, eps: f64) -> ScalarField {
    let na = grid.n_angular();
    let values = (0..grid.n_nodes())
        .map(|flat| {
            let s = 1.0 - grid.tau(flat / na);
            eps * s * s * dot_at(g, g, flat)
        })
        .collect();
    ScalarField::new(grid.clone(), values).expect("finite q")
}

/// Largest `q` over interior nodes.
pub fn max_q(q: &ScalarField) -> f64 {
    q.interior().iter().copied().fold(0.0, f64::max)
}

/// The residual and everything needed to apply its derivative at `u`.
#[derive(Clone, Debug)]
pub struct Linearization {
    grid: Arc<Grid>,
    eps: f64,
    w: Vec<f64>,
    lu: ScalarField,
    grad_u: VectorField,
    grad_q: VectorField,
    /// `grad q . grad u`.
    qu: Vec<f64>,
    max_q: f64,
    residual: ScalarField,
}

impl Linearization {
    /// Fails with `NonSpacelikeField` when `q >= 1 - margin` somewhere in
    /// the interior.
    pub fn new(u: &ScalarField, form: Form, margin: f64) -> Result<Self> {
        let grid = u.grid().clone();
        let eps = form.factor();
        let spec = Spectrum::analyze(u);
        let grad_u = gradient_from(&spec);
        let q = q_from_gradient(&grid, &grad_u, eps);
        let max_q = max_q(&q);
        if !(max_q < 1.0 - margin) {
            return Err(Error::NonSpacelikeField { max_q, margin });
        }
        let lu = l_spectrum(&spec).synthesize();
        let grad_q = gradient(&q);
        let n = grid.n_nodes();
        let w: Vec<f64> = q.values().iter().map(|q| 1.0 / (1.0 - q.min(1.0 - 1e-300)).sqrt()).collect();
        let qu: Vec<f64> = (0..n).map(|k| dot_at(&grad_q, &grad_u, k)).collect();
        let mut lin = Self { grid, eps, w, lu, grad_u, grad_q, qu, max_q, residual: ScalarField::zeros(u.grid()) };
        lin.residual = lin.assemble(|k, tau2| {
            let w = lin.w[k];
            w * lin.lu.values()[k] + 0.5 * tau2 * w * w * w * lin.qu[k]
        });
        Ok(lin)
    }

    /// Evaluate `f(flat, tau^2)` at interior nodes, zero on the boundary,
    /// then project.
    fn assemble(&self, f: impl Fn(usize, f64) -> f64) -> ScalarField {
        let grid = &self.grid;
        let na = grid.n_angular();
        let mut values = vec![0.0; grid.n_nodes()];
        for (k, v) in values.iter_mut().enumerate().take(grid.n_interior_nodes()) {
            let tau = grid.tau(k / na);
            *v = f(k, tau * tau);
        }
        project(&ScalarField::new(grid.clone(), values).expect("finite residual"))
    }

    pub fn residual(&self) -> &ScalarField {
        &self.residual
    }

    pub fn max_q(&self) -> f64 {
        self.max_q
    }

    pub fn margin(&self) -> f64 {
        1.0 - self.max_q
    }

    /// Directional derivative of the residual in direction `v`.
    pub fn apply(&self, v: &ScalarField) -> ScalarField {
        let grid = &self.grid;
        let na = grid.n_angular();
        let spec = Spectrum::analyze(v);
        let grad_v = gradient_from(&spec);
        let lv = l_spectrum(&spec).synthesize();
        let dq_vals = (0..grid.n_nodes())
            .map(|k| {
                let s = 1.0 - grid.tau(k / na);
                2.0 * self.eps * s * s * dot_at(&self.grad_u, &grad_v, k)
            })
            .collect();
        let dq = ScalarField::new(grid.clone(), dq_vals).expect("finite");
        let grad_dq = gradient(&dq);
        self.assemble(|k, tau2| {
            let w = self.w[k];
            let w3 = w * w * w;
            let dw = 0.5 * w3 * dq.values()[k];
            let inner = 3.0 * w * w * dw * self.qu[k] + w3 * (dot_at(&grad_dq, &self.grad_u, k) + dot_at(&self.grad_q, &grad_v, k));
            dw * self.lu.values()[k] + w * lv.values()[k] + 0.5 * tau2 * inner
        })
    }
}

pub fn residual(u: &ScalarField, form: Form, margin: f64) -> Result<ScalarField> {
    Ok(Linearization::new(u, form, margin)?.residual)
}

pub fn jacobian_vector(u: &ScalarField, v: &ScalarField, margin: f64) -> Result<ScalarField> {
    v.same_grid(u)?;
    Ok(Linearization::new(u, Form::Maximal, margin)?.apply(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{geodesic_field, GeodesicSliceSpec};
    use crate::field::GridSpec;
    use crate::linear::apply_l;

    fn smooth(g: &Arc<Grid>, a: f64, b: f64) -> ScalarField {
        ScalarField::from_fn(g, |n| a * n.x[2] + b * (n.x[0] * n.x[2] + n.r * n.r) + 0.1 * a * b * n.x[1])
    }

    fn sup_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn constants_have_zero_residual() {
        let g = Grid::new(GridSpec::ball(12, 6, 8)).unwrap();
        let r = residual(&ScalarField::constant(&g, 0.8), Form::Maximal, 0.05).unwrap();
        assert!(r.sup_norm() < 1e-13);
    }

    #[test]
    fn scaling_identity() {
        for spec in [GridSpec::axisymmetric(16, 8), GridSpec::ball(12, 6, 8), GridSpec::disk(16, 16)] {
            let g = Grid::new(spec).unwrap();
            let u = smooth(&g, 0.6, -0.4);
            let r1 = residual(&u.scaled(0.5), Form::Maximal, 0.05).unwrap();
            let r2 = residual(&u, Form::Rescaled { eps: 0.25 }, 0.05).unwrap();
            assert!(sup_diff(&r1, &r2.scaled(0.5)) < 1e-13, "{spec}");
        }
    }

    #[test]
    fn jacobian_at_zero_is_l() {
        let g = Grid::new(GridSpec::ball(12, 6, 8)).unwrap();
        let v = smooth(&g, 1.0, 2.0);
        let j = jacobian_vector(&ScalarField::zeros(&g), &v, 0.05).unwrap();
        assert!(sup_diff(&j, &apply_l(&v)) < 1e-11 * v.sup_norm());
        assert!(jacobian_vector(&v.scaled(0.1), &ScalarField::zeros(&g), 0.05).unwrap().sup_norm() == 0.0);
    }

    #[test]
    fn jacobian_matches_central_difference() {
        for spec in [GridSpec::axisymmetric(16, 8), GridSpec::ball(10, 6, 8)] {
            let g = Grid::new(spec).unwrap();
            let u = smooth(&g, 0.3, 0.15);
            let v = smooth(&g, -0.7, 0.9);
            let j = jacobian_vector(&u, &v, 0.05).unwrap();
            let h = 1e-5;
            let rp = residual(&u.axpy(h, &v).unwrap(), Form::Maximal, 0.05).unwrap();
            let rm = residual(&u.axpy(-h, &v).unwrap(), Form::Maximal, 0.05).unwrap();
            let fd = rp.axpy(-1.0, &rm).unwrap().scaled(0.5 / h);
            assert!(sup_diff(&j, &fd) < 1e-6 * j.sup_norm(), "{spec}");
        }
    }

    #[test]
    fn timelike_field_is_rejected() {
        let g = Grid::new(GridSpec::axisymmetric(16, 8)).unwrap();
        let u = ScalarField::from_fn(&g, |n| 3.0 * n.x[2]);
        assert!(matches!(residual(&u, Form::Maximal, 0.05), Err(Error::NonSpacelikeField { .. })));
        assert!(residual(&u, Form::Rescaled { eps: 0.01 }, 0.05).is_ok());
    }

    #[test]
    fn geodesic_residual_converges() {
        let s = GeodesicSliceSpec::new(0.0, 0.0, 0.3, 0.0).unwrap();
        let mut errs = Vec::new();
        for n_r in [16, 32, 64] {
            let g = Grid::new(GridSpec::axisymmetric(n_r, 16)).unwrap();
            let u = geodesic_field(&s, &g).unwrap();
            errs.push(residual(&u, Form::Maximal, 0.05).unwrap().sup_norm());
        }
        assert!(errs[0] / errs[1] >= 3.5 && errs[1] / errs[2] >= 3.5, "{errs:?}");
    }
}
