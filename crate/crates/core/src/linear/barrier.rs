//! The barrier `tau^s`: `L(tau^s) <= -delta tau^s` for `0 < s < n + 1`, and
//! the weighted bound it implies for solutions of `L u = eta`.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::operator::{apply_l, l_of_tau_power};
use crate::field::{Grid, ScalarField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierReport {
    pub s: f64,
    /// `min -L(tau^s) / tau^s` over interior nodes, discrete operator.
    pub delta: f64,
    /// The same minimum from the closed form.
    pub delta_analytic: f64,
    /// `s` outside `(0, n + 1)` or `delta <= 0`.
    pub flagged: bool,
}

pub fn barrier_check(s: f64, grid: &Arc<Grid>) -> BarrierReport {
    let phi = ScalarField::from_fn(grid, |n| n.tau.powf(s));
    let l = apply_l(&phi);
    let mut delta = f64::INFINITY;
    let mut delta_analytic = f64::INFINITY;
    for i in 0..grid.n_r() {
        let tau = grid.tau(i);
        let ts = tau.powf(s);
        for v in l.ring(i) {
            delta = delta.min(-v / ts);
        }
        delta_analytic = delta_analytic.min(-l_of_tau_power(grid.dim(), s, tau) / ts);
    }
    let n = grid.dim() as f64;
    let flagged = !(s > 0.0 && s < n + 1.0) || delta <= 0.0;
    BarrierReport { s, delta, delta_analytic, flagged }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedBound {
    /// `sup tau^{-s} |u|` over interior nodes.
    pub weighted_sup: f64,
    /// `M / delta * (1 + tol)`.
    pub bound: f64,
    pub holds: bool,
}

/// Compare a solution of `L u = eta`, `|eta| <= M tau^s`, zero boundary
/// data, with the maximum-principle bound `M / delta`.
pub fn weighted_bound(u: &ScalarField, report: &BarrierReport, m: f64, tol: f64) -> WeightedBound {
    let grid = u.grid();
    let mut sup = 0.0f64;
    for i in 0..grid.n_r() {
        let w = grid.tau(i).powf(-report.s);
        for v in u.ring(i) {
            sup = sup.max(w * v.abs());
        }
    }
    let bound = m / report.delta * (1.0 + tol);
    WeightedBound { weighted_sup: sup, bound, holds: report.delta > 0.0 && sup <= bound }
}
