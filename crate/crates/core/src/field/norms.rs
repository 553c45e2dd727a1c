//! Discrete weighted sup norms, a divided-difference Hölder surrogate and
//! power-law decay fits toward the boundary.

use serde::{Deserialize, Serialize};

use super::grid::{Grid, Node};
use super::ops;
use super::scalar::ScalarField;
use crate::error::{Error, Result};

/// Upper end of the default decay-fit window in `tau`.
pub const DECAY_WINDOW_TOP: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub r_squared: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormReport {
    pub s: f64,
    pub k: usize,
    /// `sup tau^{-s+l} |d^l f|` for `l = 0..=k`.
    pub sups: Vec<f64>,
    pub decay: Option<DecayFit>,
}

impl WeightedNormReport {
    pub fn total(&self) -> f64 {
        self.sups.iter().sum()
    }
}

/// `[2 dr, 0.1]`.
pub fn default_window(grid: &Grid) -> (f64, f64) {
    (2.0 * grid.dr(), DECAY_WINDOW_TOP)
}

/// Derivative magnitudes of order `l`: the largest Cartesian component at
/// each node.
fn derivative_sizes(f: &ScalarField, k: usize) -> Vec<Vec<f64>> {
    let mut out = vec![f.values().iter().map(|v| v.abs()).collect::<Vec<_>>()];
    if k >= 1 {
        let g = ops::gradient(f);
        out.push(max_abs(g.components.iter().map(|c| c.values())));
    }
    if k >= 2 {
        let h = ops::hessian(f);
        out.push(max_abs(h.iter().map(|c| c.values())));
    }
    out
}

fn max_abs<'a>(fields: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in fields {
        if out.is_empty() {
            out = vec![0.0; v.len()];
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o = o.max(x.abs());
        }
    }
    out
}

pub fn weighted_norm(f: &ScalarField, s: f64, k: usize) -> Result<WeightedNormReport> {
    weighted_norm_on(f, s, k, |_| true)
}

/// Weighted norm restricted to interior nodes accepted by `mask`.
pub fn weighted_norm_on(f: &ScalarField, s: f64, k: usize, mask: impl Fn(&Node) -> bool) -> Result<WeightedNormReport> {
    if k > 2 {
        return Err(Error::InvalidInput(format!("derivative order {k} > 2")));
    }
    let grid = f.grid();
    let sizes = derivative_sizes(f, k);
    let sups = sizes
        .iter()
        .enumerate()
        .map(|(l, vals)| {
            let mut m = 0.0f64;
            for flat in 0..grid.n_interior_nodes() {
                let n = grid.node_at(flat);
                if mask(&n) {
                    m = m.max(n.tau.powf(-s + l as f64) * vals[flat]);
                }
            }
            m
        })
        .collect();
    let decay = decay_exponent(f, None).ok();
    Ok(WeightedNormReport { s, k, sups, decay })
}

/// Divided-difference surrogate of the weighted Hölder seminorm of the
/// order-`k` derivatives, over neighbouring node pairs that share a covering
/// ball `|x - y| < tau(x)/3`.
pub fn holder_surrogate(f: &ScalarField, s: f64, k: usize, alpha: f64) -> Result<f64> {
    if k > 2 || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidInput("need k <= 2 and 0 <= alpha <= 1".into()));
    }
    let grid = f.grid();
    let comps: Vec<Vec<f64>> = match k {
        0 => vec![f.values().to_vec()],
        1 => ops::gradient(f).components.into_iter().map(|c| c.into_values()).collect(),
        _ => ops::hessian(f).into_iter().map(|c| c.into_values()).collect(),
    };
    let na = grid.n_angular();
    let mut best = 0.0f64;
    for i in 0..grid.n_r() {
        for a in 0..na {
            let p = grid.node(i, a);
            let neighbours = [grid.node(i + 1, a), grid.node(i, (a + 1) % na)];
            for q in neighbours.iter().filter(|q| q.ring < grid.n_r()) {
                let dx = dist(&p.x, &q.x);
                if dx == 0.0 || dx >= p.tau / 3.0 {
                    continue;
                }
                let w = p.tau.min(q.tau).powf(-s + k as f64 + alpha);
                let (fp, fq) = (i * na + a, q.ring * na + q.angle);
                for c in &comps {
                    best = best.max(w * (c[fp] - c[fq]).abs() / dx.powf(alpha));
                }
            }
        }
    }
    Ok(best)
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Least-squares slope of `log max_ring |f|` against `log tau` over the
/// interior rings whose `tau` lies in the window (default `[2 dr, 0.1]`).
pub fn decay_exponent(f: &ScalarField, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let grid = f.grid();
    let (lo, hi) = window.unwrap_or_else(|| default_window(grid));
    if !(lo > 0.0 && lo < hi && hi <= 0.5) {
        return Err(Error::InvalidInput(format!("fit window [{lo}, {hi}] not inside (0, 1/2]")));
    }
    let maxima = f.ring_maxima();
    let pts: Vec<(f64, f64)> = (0..grid.n_r())
        .filter(|&i| (lo..=hi).contains(&grid.tau(i)) && maxima[i] > 0.0)
        .map(|i| (grid.tau(i).ln(), maxima[i].ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit);
    }
    let (slope, r2) = linear_fit(&pts);
    Ok(DecayFit { exponent: slope, r_squared: r2, tau_lo: lo, tau_hi: hi, points: pts.len() })
}

/// Slope and coefficient of determination of a least-squares line.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::grid::GridSpec;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn grid() -> Arc<Grid> {
        Grid::new(GridSpec::axisymmetric(64, 8)).unwrap()
    }

    #[test]
    fn tau_squared_has_unit_norm() {
        let g = grid();
        let f = ScalarField::from_fn(&g, |n| n.tau * n.tau);
        let rep = weighted_norm(&f, 2.0, 0).unwrap();
        assert!((rep.sups[0] - 1.0).abs() < 1e-14);
        assert_eq!(weighted_norm(&ScalarField::zeros(&g), 2.0, 2).unwrap().total(), 0.0);
    }

    #[test]
    fn tau_is_not_in_lambda_two() {
        let a = grid();
        let b = Grid::new(GridSpec::axisymmetric(128, 8)).unwrap();
        let na = weighted_norm(&ScalarField::from_fn(&a, |n| n.tau), 2.0, 0).unwrap().sups[0];
        let nb = weighted_norm(&ScalarField::from_fn(&b, |n| n.tau), 2.0, 0).unwrap().sups[0];
        assert!((na - 1.0 / a.tau(a.n_r() - 1)).abs() < 1e-9 * na);
        assert!(nb > 1.9 * na);
    }

    #[test]
    fn power_law_exponents() {
        let g = grid();
        for p in [2.0, 4.0] {
            let f = ScalarField::from_fn(&g, |n| n.tau.powf(p) * (1.0 + 0.1 * n.theta.cos()));
            let fit = decay_exponent(&f, None).unwrap();
            assert!((fit.exponent - p).abs() < 0.05, "{p}: {}", fit.exponent);
            assert!(fit.r_squared > 0.999);
        }
        let c = decay_exponent(&ScalarField::constant(&g, 2.0), None).unwrap();
        assert!(c.exponent.abs() < 0.05);
        assert!(matches!(decay_exponent(&ScalarField::zeros(&g), None), Err(Error::DegenerateFit)));
    }

    #[test]
    fn holder_surrogate_is_finite_for_smooth_decay() {
        let g = grid();
        let f = ScalarField::from_fn(&g, |n| n.tau.powi(3) * n.theta.cos());
        let h = holder_surrogate(&f, 2.0, 0, 0.5).unwrap();
        assert!(h.is_finite() && h > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn restriction_never_increases(cut in 0.05..0.95f64, s in 0.0..3.0f64, k in 0usize..3) {
            let g = Grid::new(GridSpec::axisymmetric(16, 8)).unwrap();
            let f = ScalarField::from_fn(&g, |n| (n.x[2] * 3.0).sin() * n.tau + n.r * n.r);
            let all = weighted_norm(&f, s, k).unwrap();
            let sub = weighted_norm_on(&f, s, k, |n| n.r < cut).unwrap();
            for l in 0..=k {
                prop_assert!(sub.sups[l] <= all.sups[l]);
            }
        }
    }
}
