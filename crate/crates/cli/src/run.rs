use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;

use adsslice::exact::{boundary_trace, fit_geodesic_trace, geodesic_field, trace_constancy_check, GeodesicSliceSpec};
use adsslice::field::csv::{read_boundary_samples, read_field};
use adsslice::geometry::{gauss_check, GeometryReport};
use adsslice::linear::operator::l_of_tau_power;
use adsslice::linear::{apply_l, barrier_check, weighted_bound, BoundaryDatum, KrylovOptions, LinearOperator};
use adsslice::samples::{random_polynomial, random_spacelike_field, rng};
use adsslice::slice::{continuation_solve, jacobian_vector, max_q, residual, spacelike_q, Form, SolverConfig};
use adsslice::{Error, Grid, GridSpec, ScalarField};

use crate::args::*;
use crate::output::{config_err, Failure, Manifest, RunDir};

/// Refinement ratios at or below this level count as rounding.
const ROUNDING_FLOOR: f64 = 1e-12;
const SCALING_TOLERANCE: f64 = 1e-12;
const JACOBIAN_TOLERANCE: f64 = 1e-11;

pub struct Ctx {
    out: PathBuf,
    dir: Option<RunDir>,
    pub m: Manifest,
}

impl Ctx {
    pub fn new(out: PathBuf, m: Manifest) -> Self {
        Self { out, dir: None, m }
    }

    /// Created on first use, so rejected configurations leave no files.
    fn dir(&mut self) -> Result<&RunDir, Failure> {
        if self.dir.is_none() {
            let d = RunDir::create(&self.out).map_err(|e| Failure::solver(e.into()))?;
            self.dir = Some(d);
        }
        Ok(self.dir.as_ref().expect("just created"))
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    pub fn write_manifest(&mut self) -> Result<(), Failure> {
        self.dir()?;
        let d = self.dir.as_ref().expect("created");
        d.manifest(&self.m).map_err(|e| Failure::solver(e.into()))
    }

    fn solution(&mut self, u: &ScalarField) -> Result<(), Failure> {
        self.dir()?;
        let d = self.dir.as_ref().expect("created");
        d.solution(&mut self.m, u).map_err(Failure::solver)
    }

    fn boundary(&mut self, grid: &Grid, values: &[f64]) -> Result<(), Failure> {
        self.dir()?;
        let d = self.dir.as_ref().expect("created");
        d.boundary(&mut self.m, grid, values).map_err(Failure::solver)
    }

    fn geometry(&mut self, r: &GeometryReport) -> Result<(), Failure> {
        self.dir()?;
        let d = self.dir.as_ref().expect("created");
        d.geometry(&mut self.m, r).map_err(Failure::solver)
    }

    fn table(&mut self, header: &[&str], rows: &[Vec<f64>]) -> Result<(), Failure> {
        self.dir()?;
        let d = self.dir.as_ref().expect("created");
        d.table(&mut self.m, header, rows).map_err(|e| Failure::solver(e.into()))
    }
}

fn grid_of(args: &GridArgs) -> Result<(GridSpec, Arc<Grid>), Failure> {
    let spec = args.spec().map_err(Failure::config)?;
    let grid = Grid::new(spec).map_err(config_err)?;
    Ok((spec, grid))
}

fn solver(e: Error) -> Failure {
    Failure::solver(e)
}

fn margin_of(u: &ScalarField) -> f64 {
    1.0 - max_q(&spacelike_q(u, Form::Maximal))
}

/// Geometry files and summary for a spacelike height field.
fn report_geometry(ctx: &mut Ctx, u: &ScalarField) -> Result<(), Failure> {
    let r = GeometryReport::compute(u).map_err(solver)?;
    ctx.geometry(&r)?;
    let s = r.summary();
    ctx.m.norm("max_h2", s.max_h2);
    ctx.m.norm("max_gauss_residual", s.max_gauss);
    ctx.m.norm("max_mean_curvature", s.max_h_div);
    ctx.m.norm("mean_curvature_consistency", s.h_consistency);
    ctx.m.result("h_decay", &s.h_decay);
    ctx.m.result("geometry", &s);
    Ok(())
}

pub fn oracle(a: &OracleArgs, ctx: &mut Ctx) -> Result<(), Failure> {
    let spec = GeodesicSliceSpec::new(a.a, a.b, a.c, a.w0).map_err(config_err)?;
    let (gs, g) = grid_of(&a.grid)?;
    if g.dim() == 2 && a.b != 0.0 {
        return Err(Failure::config("B must vanish for n = 2"));
    }
    ctx.m.grid = Some(gs);
    let u = geodesic_field(&spec, &g).map_err(solver)?;
    ctx.solution(&u)?;
    ctx.boundary(&g, u.boundary())?;
    let res = residual(&u, Form::Maximal, 0.0).map_err(solver)?;
    ctx.m.norm("residual_sup", res.sup_norm());
    ctx.m.spacelike_margin = Some(margin_of(&u));
    report_geometry(ctx, &u)?;
    ctx.m.result("slice", spec);
    ctx.m.verdict = "spacelike".into();
    Ok(())
}

enum Eta {
    Zero,
    Power { s: f64, m: f64 },
    Manufactured { s: f64 },
}

fn parse_eta(s: &str) -> Result<Eta, Failure> {
    let bad = || Failure::config(format!("bad eta '{s}': expected zero, tau:S[:M] or manufactured:S"));
    let num = |x: &str| x.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["zero"] => Ok(Eta::Zero),
        ["tau", p] => Ok(Eta::Power { s: num(p)?, m: 1.0 }),
        ["tau", p, m] => Ok(Eta::Power { s: num(p)?, m: num(m)? }),
        ["manufactured", p] => Ok(Eta::Manufactured { s: num(p)? }),
        _ => Err(bad()),
    }
}

#[derive(Serialize)]
struct LinearResult {
    krylov_iterations: usize,
    relative_residual: f64,
    manufactured_error: Option<f64>,
}

pub fn solve_linear(a: &SolveLinearArgs, ctx: &mut Ctx) -> Result<(), Failure> {
    let eta_kind = parse_eta(&a.eta)?;
    let (gs, g) = grid_of(&a.grid)?;
    let datum = match &a.bdata {
        Some(s) => Some(s.parse::<BoundaryDatum>().map_err(config_err)?),
        None => None,
    };
    let boundary = match &datum {
        Some(d) => d.sample(&g).map_err(config_err)?,
        None => vec![0.0; g.n_angular()],
    };
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Failure::config(format!("tolerance {} outside (0, 1)", a.tol)));
    }
    ctx.m.grid = Some(gs);
    let dim = g.dim();
    let eta = match eta_kind {
        Eta::Zero => ScalarField::zeros(&g),
        Eta::Power { s, m } => ScalarField::from_fn(&g, |n| m * n.tau.powf(s)),
        Eta::Manufactured { s } => ScalarField::from_fn(&g, |n| l_of_tau_power(dim, s, n.tau)),
    };
    let op = LinearOperator::new(&g).map_err(solver)?;
    let (u, rep) = op.solve(&eta, &boundary, KrylovOptions { rel_tol: a.tol, max_iter: 500 }).map_err(solver)?;
    ctx.solution(&u)?;
    ctx.boundary(&g, u.boundary())?;
    let manufactured_error = match eta_kind {
        Eta::Manufactured { s } if boundary.iter().all(|v| *v == 0.0) => {
            let exact = ScalarField::from_fn(&g, |n| n.tau.powf(s));
            let e = u.axpy(-1.0, &exact).map_err(solver)?.sup_norm();
            ctx.m.norm("manufactured_error", e);
            Some(e)
        }
        _ => None,
    };
    ctx.m.norm("relative_residual", rep.rel_residual);
    let barrier = barrier_check(a.barrier_s, &g);
    let weight = |i: usize| g.tau(i).powf(-a.barrier_s);
    let m_eta = (0..g.n_r()).flat_map(|i| eta.ring(i).iter().map(move |v| v.abs() * weight(i))).fold(0.0, f64::max);
    let bound = weighted_bound(&u, &barrier, m_eta, 0.05);
    ctx.m.norm("weighted_sup", bound.weighted_sup);
    ctx.m.result("barrier", &barrier);
    ctx.m.result("weighted_bound", &bound);
    ctx.m.result("solve", LinearResult { krylov_iterations: rep.iterations, relative_residual: rep.rel_residual, manufactured_error });
    ctx.m.verdict = "solved".into();
    Ok(())
}

fn solver_config(a: &SolverArgs) -> Result<SolverConfig, Failure> {
    let cfg = SolverConfig {
        steps: a.steps,
        tolerance: a.tol,
        max_iterations: a.max_iter,
        damping_floor: a.damping_floor,
        margin: a.margin,
        ..Default::default()
    };
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

pub fn solve(a: &SolveArgs, ctx: &mut Ctx) -> Result<(), Failure> {
    if !(a.eps >= 0.0 && a.eps.is_finite()) {
        return Err(Failure::config(format!("eps = {} must be a finite nonnegative number", a.eps)));
    }
    let cfg = solver_config(&a.solver)?;
    let (gs, g) = grid_of(&a.grid)?;
    let datum: BoundaryDatum = a.bdata.parse().map_err(config_err)?;
    datum.sample(&g).map_err(config_err)?;
    ctx.m.grid = Some(gs);
    let sol = continuation_solve(&g, &datum, a.eps, &cfg).map_err(solver)?;
    ctx.solution(&sol.u)?;
    ctx.boundary(&g, sol.u.boundary())?;
    let rows: Vec<Vec<f64>> = sol
        .log
        .iter()
        .map(|r| vec![r.lambda, r.iteration as f64, r.residual, r.boundary_error, r.damping, r.krylov_iterations as f64, r.margin])
        .collect();
    ctx.table(&["lambda", "iteration", "residual", "boundary_error", "damping", "krylov_iterations", "margin"], &rows)?;
    ctx.m.norm("residual_sup", sol.residual);
    ctx.m.spacelike_margin = Some(sol.margin);
    ctx.m.result("newton_iterations", sol.iterations());
    ctx.m.result("final_step_iterations", sol.log.iter().filter(|r| r.lambda == 1.0).count());
    report_geometry(ctx, &sol.u)?;
    ctx.m.verdict = "spacelike".into();
    Ok(())
}

pub fn diagnose(a: &DiagnoseArgs, ctx: &mut Ctx) -> Result<(), Failure> {
    let file = File::open(&a.input).map_err(|e| Failure::config(format!("{}: {e}", a.input.display())))?;
    let u = read_field(BufReader::new(file), a.n).map_err(config_err)?;
    ctx.m.grid = Some(u.grid().spec());
    ctx.m.spacelike_margin = Some(margin_of(&u));
    let res = residual(&u, Form::Maximal, 0.0).map_err(solver)?;
    ctx.m.norm("residual_sup", res.sup_norm());
    report_geometry(ctx, &u)?;
    ctx.m.verdict = "spacelike".into();
    Ok(())
}

#[derive(Serialize)]
struct IdentityResult {
    samples: usize,
    max_scaling_deviation: f64,
    max_jacobian_deviation: f64,
    scaling_tolerance: f64,
    jacobian_tolerance: f64,
}

pub fn identity(a: &IdentityArgs, ctx: &mut Ctx) -> Result<(), Failure> {
    if !(a.eps > 0.0 && a.eps.is_finite()) {
        return Err(Failure::config(format!("eps = {} must be positive", a.eps)));
    }
    if a.samples == 0 {
        return Err(Failure::config("at least one sample is required"));
    }
    let (gs, g) = grid_of(&a.grid)?;
    ctx.m.grid = Some(gs);
    let mut r = rng(a.seed);
    let root = a.eps.sqrt();
    let mut scaling = 0.0f64;
    let mut jacobian = 0.0f64;
    let mut margin = 1.0f64;
    for k in 0..a.samples {
        // Both sides need a spacelike argument: q(sqrt(eps) u) = eps q(u).
        let target = (0.2 + 0.6 * k as f64 / a.samples as f64) / a.eps.max(1.0);
        let u = random_spacelike_field(&g, &mut r, target).map_err(solver)?;
        margin = margin.min(margin_of(&u));
        let lhs = residual(&u.scaled(root), Form::Maximal, 0.0).map_err(solver)?;
        let rhs = residual(&u, Form::Rescaled { eps: a.eps }, 0.0).map_err(solver)?.scaled(root);
        scaling = scaling.max(lhs.axpy(-1.0, &rhs).map_err(solver)?.sup_norm());
        let v = random_polynomial(&g, &mut r);
        let lv = apply_l(&v);
        let j = jacobian_vector(&ScalarField::zeros(&g), &v, 0.0).map_err(solver)?;
        jacobian = jacobian.max(j.axpy(-1.0, &lv).map_err(solver)?.sup_norm() / lv.sup_norm().max(v.sup_norm()));
    }
    ctx.m.spacelike_margin = Some(margin);
    ctx.m.norm("max_scaling_deviation", scaling);
    ctx.m.norm("max_jacobian_deviation", jacobian);
    ctx.m.result(
        "identity",
        IdentityResult {
            samples: a.samples,
            max_scaling_deviation: scaling,
            max_jacobian_deviation: jacobian,
            scaling_tolerance: SCALING_TOLERANCE,
            jacobian_tolerance: JACOBIAN_TOLERANCE,
        },
    );
    let pass = scaling < SCALING_TOLERANCE && jacobian < JACOBIAN_TOLERANCE;
    ctx.m.verdict = if pass { "pass" } else { "fail" }.into();
    Ok(())
}

#[derive(Serialize)]
struct SweepLevel {
    grid: GridSpec,
    dr: f64,
    error: f64,
    ratio: Option<f64>,
}

pub fn sweep(a: &SweepArgs, ctx: &mut Ctx) -> Result<(), Failure> {
    if !(2..=5).contains(&a.levels) {
        return Err(Failure::config(format!("levels = {} outside 2..=5", a.levels)));
    }
    let (mut gs, _) = grid_of(&a.grid)?;
    let spec = GeodesicSliceSpec::new(0.0, 0.0, a.c, 0.0).map_err(config_err)?;
    ctx.m.grid = Some(gs);
    let mut levels: Vec<SweepLevel> = Vec::new();
    let mut margin = 1.0f64;
    for _ in 0..a.levels {
        let g = Grid::new(gs).map_err(config_err)?;
        let error = match a.case {
            SweepCase::Oracle => {
                let u = geodesic_field(&spec, &g).map_err(solver)?;
                margin = margin.min(margin_of(&u));
                residual(&u, Form::Maximal, 0.0).map_err(solver)?.sup_norm()
            }
            SweepCase::Linear => {
                let eta = ScalarField::from_fn(&g, |n| l_of_tau_power(g.dim(), 2.0, n.tau));
                let op = LinearOperator::new(&g).map_err(solver)?;
                let opts = KrylovOptions { rel_tol: 1e-13, max_iter: 500 };
                let (u, _) = op.solve(&eta, &vec![0.0; g.n_angular()], opts).map_err(solver)?;
                let exact = ScalarField::from_fn(&g, |n| n.tau * n.tau);
                u.axpy(-1.0, &exact).map_err(solver)?.sup_norm()
            }
            SweepCase::Gauss => {
                let u = geodesic_field(&spec, &g).map_err(solver)?;
                margin = margin.min(margin_of(&u));
                gauss_check(&u).map_err(solver)?.sup_norm()
            }
        };
        let ratio = levels.last().map(|l| l.error / error);
        levels.push(SweepLevel { grid: gs, dr: g.dr(), error, ratio });
        gs = gs.refined();
    }
    let rows: Vec<Vec<f64>> =
        levels.iter().map(|l| vec![l.grid.n_r as f64, l.grid.n_theta as f64, l.dr, l.error, l.ratio.unwrap_or(f64::NAN)]).collect();
    ctx.table(&["n_r", "n_theta", "dr", "error", "ratio"], &rows)?;
    let at_floor = levels.iter().all(|l| l.error <= ROUNDING_FLOOR);
    let second_order = at_floor || levels.iter().filter_map(|l| l.ratio).all(|r| r >= 3.5);
    if a.case != SweepCase::Linear {
        ctx.m.spacelike_margin = Some(margin);
    }
    ctx.m.norm("finest_error", levels.last().expect("levels >= 2").error);
    ctx.m.result("levels", &levels);
    ctx.m.result("rounding_floor", ROUNDING_FLOOR);
    ctx.m.verdict = if second_order { "second-order" } else { "below-second-order" }.into();
    Ok(())
}

pub fn fit_boundary(a: &FitBoundaryArgs, ctx: &mut Ctx) -> Result<(), Failure> {
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Failure::config("tolerance must be positive"));
    }
    let file = File::open(&a.input).map_err(|e| Failure::config(format!("{}: {e}", a.input.display())))?;
    let (g, w) = read_boundary_samples(BufReader::new(file), a.n).map_err(config_err)?;
    let fit = fit_geodesic_trace(g.angular(), &w, a.tol);
    ctx.m.norm("fit_residual", fit.residual);
    if fit.totally_geodesic {
        let c = trace_constancy_check(g.angular(), &w);
        ctx.m.norm("constancy_deviation", c.max_deviation);
        ctx.m.norm("constant_minus_norm", (c.mean - fit.norm_sq()).abs());
        let (trace, _) = boundary_trace(&fit.spec(), &g);
        ctx.boundary(&g, &trace)?;
        ctx.m.result("constancy", &c);
    }
    ctx.m.verdict = if fit.totally_geodesic { "totally-geodesic" } else { "not-totally-geodesic" }.into();
    ctx.m.result("fit", &fit);
    Ok(())
}
