//! Damped Newton iteration with a spacelike line search, and amplitude
//! continuation from the time slice.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::residual::{Form, Linearization};
use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField};
use crate::linear::corrector::boundary_corrector_values;
use crate::linear::krylov::bicgstab;
use crate::linear::{BoundaryDatum, KrylovOptions, LinearOperator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Continuation ladder `lambda_k = 2^(k - steps)`, `k = 1..=steps`.
    pub steps: usize,
    /// Target for the interior residual sup norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping_floor: f64,
    /// Iterates must keep `q <= 1 - margin`.
    pub margin: f64,
    pub krylov_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { steps: 8, tolerance: 1e-10, max_iterations: 50, damping_floor: 1.0 / 1024.0, margin: 0.05, krylov_max_iter: 200 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidInput("continuation needs at least one step".into()));
        }
        if !(self.tolerance > 0.0) || !(self.damping_floor > 0.0 && self.damping_floor < 1.0) {
            return Err(Error::InvalidInput("tolerance and damping floor must be positive".into()));
        }
        if !(self.margin > 0.0 && self.margin <= 0.5) {
            return Err(Error::InvalidInput(format!("spacelike margin {} outside (0, 0.5]", self.margin)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Continuation amplitude fraction of this Newton run.
    pub lambda: f64,
    pub iteration: usize,
    /// Interior residual sup norm after the step.
    pub residual: f64,
    /// Boundary mismatch sup norm after the step.
    pub boundary_error: f64,
    pub damping: f64,
    pub krylov_iterations: usize,
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct SliceSolution {
    pub u: ScalarField,
    pub datum: BoundaryDatum,
    pub eps: f64,
    pub residual: f64,
    /// `1 - max q` over interior nodes.
    pub margin: f64,
    pub log: Vec<IterationRecord>,
}

impl SliceSolution {
    pub fn iterations(&self) -> usize {
        self.log.len()
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn boundary_error(u: &ScalarField, target: &[f64]) -> f64 {
    u.boundary().iter().zip(target).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

struct Outcome {
    u: ScalarField,
    residual: f64,
    margin: f64,
}

/// Newton on the interior unknowns; the boundary ring is driven to
/// `target` by the first full step.
fn newton(
    op: &LinearOperator,
    target: &[f64],
    u0: &ScalarField,
    cfg: &SolverConfig,
    lambda: f64,
    log: &mut Vec<IterationRecord>,
) -> Result<Outcome> {
    let grid = op.grid().clone();
    let m = grid.n_interior_nodes();
    let mut u = u0.clone();
    let mut lin = Linearization::new(&u, Form::Maximal, cfg.margin)?;
    let mut res = sup(lin.residual().interior());
    let mut berr = boundary_error(&u, target);
    for it in 1..=cfg.max_iterations + 1 {
        if res <= cfg.tolerance && berr == 0.0 {
            return Ok(Outcome { u, residual: res, margin: lin.margin() });
        }
        if it > cfg.max_iterations {
            break;
        }
        let boundary_step: Vec<f64> = target.iter().zip(u.boundary()).map(|(t, b)| t - b).collect();
        let bstep = ScalarField::zeros(&grid).with_boundary(&boundary_step)?;
        let mut rhs = lin.residual().clone();
        if berr > 0.0 {
            rhs = rhs.axpy(1.0, &lin.apply(&bstep))?;
        }
        let embed = |x: &[f64]| {
            let mut v = x.to_vec();
            v.resize(grid.n_nodes(), 0.0);
            ScalarField::new(grid.clone(), v).expect("finite Krylov vector")
        };
        let b: Vec<f64> = rhs.interior().iter().map(|v| -v).collect();
        let opts = KrylovOptions { rel_tol: (1e-3 * res).clamp(1e-13, 1e-6), max_iter: cfg.krylov_max_iter };
        let (x, krep) =
            bicgstab(|x| lin.apply(&embed(x)).interior().to_vec(), |x| op.solve_spectral(&embed(x)).interior().to_vec(), &b, opts)?;
        let mut step = x;
        step.extend_from_slice(&boundary_step);
        let step = ScalarField::new(grid.clone(), step)?;
        debug_assert_eq!(step.values().len(), m + grid.n_angular());

        let merit = res + berr;
        let mut alpha = 1.0;
        let accepted = loop {
            let trial = u.axpy(alpha, &step)?;
            match Linearization::new(&trial, Form::Maximal, cfg.margin) {
                Ok(l) => {
                    let r = sup(l.residual().interior());
                    let be = if alpha == 1.0 { 0.0 } else { boundary_error(&trial, target) };
                    if r + be < merit || alpha <= cfg.damping_floor {
                        break (trial, l, r, be);
                    }
                }
                Err(Error::NonSpacelikeField { .. }) if alpha > cfg.damping_floor => {}
                Err(Error::NonSpacelikeField { .. }) => {
                    return Err(Error::NonSpacelikeStep { iteration: it, damping: alpha });
                }
                Err(e) => return Err(e),
            }
            alpha *= 0.5;
        };
        let (trial, l, r, be) = accepted;
        u = if be == 0.0 { trial.with_boundary(target)? } else { trial };
        lin = l;
        res = r;
        berr = be;
        log.push(IterationRecord {
            lambda,
            iteration: it,
            residual: res,
            boundary_error: berr,
            damping: alpha,
            krylov_iterations: krep.iterations,
            margin: lin.margin(),
        });
    }
    Err(Error::MaxIterations { iterations: cfg.max_iterations, residual: res })
}

/// Solve the maximal-slice equation with boundary data `datum`, starting
/// from `u0`.
pub fn newton_solve(datum: &BoundaryDatum, u0: &ScalarField, cfg: &SolverConfig) -> Result<SliceSolution> {
    cfg.validate()?;
    let grid = u0.grid().clone();
    let op = LinearOperator::new(&grid)?;
    let target = datum.sample(&grid)?;
    let mut log = Vec::new();
    let out = newton(&op, &target, u0, cfg, 1.0, &mut log)?;
    Ok(SliceSolution { u: out.u, datum: datum.clone(), eps: 1.0, residual: out.residual, margin: out.margin, log })
}

/// Solve with boundary data `sqrt(eps) g` by stepping the amplitude up the
/// ladder `lambda_k = 2^(k - K)`.
pub fn continuation_solve(grid: &Arc<Grid>, g: &BoundaryDatum, eps: f64, cfg: &SolverConfig) -> Result<SliceSolution> {
    cfg.validate()?;
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("eps = {eps} must be a finite nonnegative number")));
    }
    let datum = g.scaled(eps.sqrt());
    let base = g.sample(grid)?;
    if eps == 0.0 {
        return Ok(SliceSolution { u: ScalarField::zeros(grid), datum, eps, residual: 0.0, margin: 1.0, log: Vec::new() });
    }
    let op = LinearOperator::new(grid)?;
    let amp = eps.sqrt();
    let corrector = boundary_corrector_values(grid, &base);
    let mut log = Vec::new();
    let mut reached = 0.0;
    let mut prev: Option<Outcome> = None;
    for k in 1..=cfg.steps {
        let lambda = 2f64.powi(k as i32 - cfg.steps as i32);
        let target: Vec<f64> = base.iter().map(|v| lambda * amp * v).collect();
        let seed = match &prev {
            None => corrector.scaled(lambda * amp),
            Some(p) => p.u.scaled(2.0).with_boundary(&target)?,
        };
        match newton(&op, &target, &seed, cfg, lambda, &mut log) {
            Ok(o) => {
                reached = lambda;
                prev = Some(o);
            }
            Err(e) => return Err(Error::Continuation { lambda, reached, source: Box::new(e) }),
        }
    }
    let out = prev.expect("at least one continuation step");
    Ok(SliceSolution { u: out.u, datum, eps, residual: out.residual, margin: out.margin, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{geodesic_field, GeodesicSliceSpec};
    use crate::field::GridSpec;

    fn max_err(a: &ScalarField, b: &ScalarField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_datum_is_immediate() {
        let g = Grid::new(GridSpec::axisymmetric(16, 8)).unwrap();
        let s = newton_solve(&BoundaryDatum::constant(0.0), &ScalarField::zeros(&g), &SolverConfig::default()).unwrap();
        assert_eq!(s.iterations(), 0);
        assert_eq!(s.u.sup_norm(), 0.0);
    }

    #[test]
    fn geodesic_datum_from_corrector_seed() {
        let spec = GeodesicSliceSpec::new(0.0, 0.0, 0.3, 0.0).unwrap();
        let d = BoundaryDatum::geodesic(spec);
        let mut errs = Vec::new();
        for n_r in [16, 32] {
            let g = Grid::new(GridSpec::axisymmetric(n_r, 16)).unwrap();
            let seed = crate::linear::boundary_corrector(&g, &d).unwrap();
            let s = newton_solve(&d, &seed, &SolverConfig::default()).unwrap();
            assert!(s.residual <= 1e-10 && s.margin > 0.05);
            errs.push(max_err(&s.u, &geodesic_field(&spec, &g).unwrap()));
        }
        assert!(errs[1] < 1e-4 && errs[0] / errs[1] >= 3.5, "{errs:?}");
    }

    #[test]
    fn continuation_reaches_full_amplitude() {
        let g = Grid::new(GridSpec::axisymmetric(24, 12)).unwrap();
        let d = BoundaryDatum::harmonic(&[(2, 0, 1.0)]);
        let s = continuation_solve(&g, &d, 0.0025, &SolverConfig::default()).unwrap();
        assert!(s.residual <= 1e-10 && s.margin > 0.9);
        let target = d.scaled(0.05).sample(&g).unwrap();
        assert_eq!(s.u.boundary(), &target[..]);
        assert!(s.log.iter().any(|r| r.lambda == 1.0));
    }

    #[test]
    fn zero_eps_is_time_slice() {
        let g = Grid::new(GridSpec::axisymmetric(16, 8)).unwrap();
        let s = continuation_solve(&g, &BoundaryDatum::harmonic(&[(2, 0, 1.0)]), 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(s.u.sup_norm(), 0.0);
    }

    #[test]
    fn huge_oscillatory_datum_leaves_spacelike_set() {
        let g = Grid::new(GridSpec::axisymmetric(24, 16)).unwrap();
        let d = BoundaryDatum::harmonic(&[(6, 0, 10.0)]);
        let r = newton_solve(&d, &ScalarField::zeros(&g), &SolverConfig::default());
        assert!(matches!(r, Err(Error::NonSpacelikeStep { .. })), "{r:?}");
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SolverConfig { margin: 0.7, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(SolverConfig { steps: 0, ..Default::default() }.validate().is_err());
    }
}
