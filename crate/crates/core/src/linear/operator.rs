//! The linearization of the maximal-slice equation at `u = 0`,
//! `L = tau^2 Lap_0 + tau (n - 2 + 2 / (1 - tau)) r d/dr`, which is
//! `Delta_H - 2 tanh(rho) d/drho` in Euclidean ball coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::banded::{BandedLu, BandedMatrix};
use super::datum::BoundaryDatum;
use super::krylov::{bicgstab, KrylovOptions, KrylovReport};
use crate::error::{Error, Result};
use crate::field::ops::{project, RadialOp};
use crate::field::{Grid, ScalarField, Spectrum};

/// Coefficient of `r d/dr` in `L` at a given `tau`.
pub fn drift_coefficient(dim: usize, tau: f64) -> f64 {
    tau * (dim as f64 - 2.0 + 2.0 / (1.0 - tau))
}

/// `L` applied degree by degree to a spectrum; the boundary ring is zero.
pub fn l_spectrum(spec: &Spectrum) -> Spectrum {
    let grid = spec.grid().clone();
    let lap = spec.radial(RadialOp::Laplacian);
    let d1 = spec.radial(RadialOp::D1);
    let mut out = Spectrum::zeros(&grid);
    let n = grid.n_r();
    for i in 0..n {
        let tau = grid.tau(i);
        let (a, b) = (tau * tau, drift_coefficient(grid.dim(), tau) * grid.r(i));
        let (l, d) = (lap.ring(i), d1.ring(i));
        for (k, o) in out.ring_mut(i).iter_mut().enumerate() {
            *o = a * l[k] + b * d[k];
        }
    }
    out
}

/// `L f` on the interior rings, zero on the boundary ring.
pub fn apply_l(f: &ScalarField) -> ScalarField {
    l_spectrum(&Spectrum::analyze(f)).synthesize()
}

/// Analytic `L(tau^s)` for comparison with the discrete operator.
pub fn l_of_tau_power(dim: usize, s: f64, tau: f64) -> f64 {
    let n = dim as f64;
    -s * (2.0 * s - n + 2.0) * tau.powf(s + 1.0) + s * (s - n - 1.0) * tau.powf(s) + 2.0 * s * tau.powf(s + 1.0) / (1.0 - tau)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSolveReport {
    pub iterations: usize,
    pub rel_residual: f64,
}

impl From<KrylovReport> for LinearSolveReport {
    fn from(r: KrylovReport) -> Self {
        Self { iterations: r.iterations, rel_residual: r.rel_residual }
    }
}

/// Per-degree banded factorizations of `L` with homogeneous boundary rows.
#[derive(Clone, Debug)]
pub struct LinearOperator {
    grid: Arc<Grid>,
    lu: Vec<BandedLu>,
}

impl LinearOperator {
    pub fn new(grid: &Arc<Grid>) -> Result<Self> {
        let lmax = grid.angular().max_degree();
        let lu = (0..=lmax).into_par_iter().map(|l| degree_matrix(grid, l).factor()).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: grid.clone(), lu })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Invert `L` mode by mode with zero boundary data. Only interior values
    /// of `rhs` are read.
    pub fn solve_spectral(&self, rhs: &ScalarField) -> ScalarField {
        let grid = &self.grid;
        let mut rhs = rhs.clone();
        rhs.boundary_mut().fill(0.0);
        let spec = Spectrum::analyze(&rhs);
        let nc = spec.n_coeffs();
        let n = grid.n_r();
        let harm = grid.angular().harmonics();
        let cols: Vec<Vec<f64>> = (0..nc)
            .into_par_iter()
            .map(|k| {
                let mut col: Vec<f64> = (0..n).map(|i| if grid.keeps(k, i) { spec.coeff(i, k) } else { 0.0 }).collect();
                self.lu[harm[k].degree].solve_in_place(&mut col);
                col
            })
            .collect();
        let mut out = Spectrum::zeros(grid);
        for (k, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                out.coeffs_mut()[i * nc + k] = *v;
            }
        }
        out.synthesize()
    }

    /// Solve `L v = eta` in the interior with `v = boundary` on the
    /// boundary ring, by BiCGStab preconditioned with [`Self::solve_spectral`].
    pub fn solve(&self, eta: &ScalarField, boundary: &[f64], opts: KrylovOptions) -> Result<(ScalarField, LinearSolveReport)> {
        let grid = &self.grid;
        if !Arc::ptr_eq(eta.grid(), grid) && eta.grid().spec() != grid.spec() {
            return Err(Error::GridMismatch);
        }
        if boundary.len() != grid.n_angular() {
            return Err(Error::GridMismatch);
        }
        let lift = ScalarField::zeros(grid).with_boundary(boundary)?;
        let eta = ScalarField::new(grid.clone(), eta.values().to_vec())?;
        let rhs_field = project(&eta).axpy(-1.0, &apply_l(&lift))?;
        let m = grid.n_interior_nodes();
        let embed = |x: &[f64]| {
            let mut v = x.to_vec();
            v.resize(grid.n_nodes(), 0.0);
            ScalarField::new(grid.clone(), v).expect("finite Krylov vector")
        };
        let apply = |x: &[f64]| apply_l(&embed(x)).interior().to_vec();
        let precond = |x: &[f64]| self.solve_spectral(&embed(x)).interior().to_vec();
        let (w, rep) = bicgstab(apply, precond, &rhs_field.values()[..m], opts)?;
        let mut v = w;
        v.extend_from_slice(boundary);
        Ok((ScalarField::new(grid.clone(), v)?, rep.into()))
    }

    pub fn solve_datum(&self, eta: &ScalarField, datum: &BoundaryDatum, opts: KrylovOptions) -> Result<(ScalarField, LinearSolveReport)> {
        self.solve(eta, &datum.sample(&self.grid)?, opts)
    }
}

fn degree_matrix(grid: &Grid, l: usize) -> BandedMatrix {
    let n = grid.n_r();
    let st = grid.radial();
    let mut m = BandedMatrix::zeros(n, 4, 2);
    for i in 0..n {
        if !st.keeps(l, i) {
            m.set_identity_row(i);
            continue;
        }
        let tau = grid.tau(i);
        let (a, b) = (tau * tau, drift_coefficient(grid.dim(), tau) * grid.r(i));
        for (row, c) in [(st.laplacian(l, i), a), (st.d1(l, i), b)] {
            for (k, w) in row.w.iter().enumerate() {
                let j = row.start + k;
                // Column n is the boundary ring, which is known data.
                if j < n {
                    m.add(i, j, c * w);
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    fn tau_sq(g: &Arc<Grid>) -> ScalarField {
        ScalarField::from_fn(g, |n| n.tau * n.tau)
    }

    #[test]
    fn tau_squared_at_half() {
        assert!((l_of_tau_power(3, 2.0, 0.5) + 0.75).abs() < 1e-15);
    }

    #[test]
    fn discrete_matches_analytic_on_tau_squared() {
        for spec in [GridSpec::axisymmetric(16, 8), GridSpec::disk(16, 8), GridSpec::ball(12, 6, 8)] {
            let g = Grid::new(spec).unwrap();
            let lf = apply_l(&tau_sq(&g));
            for i in 0..g.n_r() {
                let e = l_of_tau_power(g.dim(), 2.0, g.tau(i));
                for v in lf.ring(i) {
                    assert!((v - e).abs() < 1e-11, "{spec} ring {i}: {v} vs {e}");
                }
            }
            assert!(lf.boundary().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn hyperbolic_form_of_operator() {
        // Delta_H f - 2 tanh(rho) f_rho for f = x_3 r^2, computed by hand.
        let g = Grid::new(GridSpec::ball(32, 8, 8)).unwrap();
        let f = ScalarField::from_fn(&g, |n| n.x[2] * n.r * n.r);
        let lf = apply_l(&f);
        for i in 0..g.n_r() {
            for a in 0..g.n_angular() {
                let n = g.node(i, a);
                let tau = n.tau;
                // Lap_0 (z r^2) = 10 z, r d/dr (z r^2) = 3 z r^2
                let lap_h = tau * tau * 10.0 * n.x[2] + tau * 3.0 * n.x[2] * n.r * n.r;
                let tanh_rho = tau / (1.0 - tau);
                let f_rho = -3.0 * n.x[2] * n.r * n.r;
                let e = lap_h - 2.0 * tanh_rho * f_rho;
                assert!((lf.ring(i)[a] - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spectral_inverse_is_exact() {
        let g = Grid::new(GridSpec::axisymmetric(20, 8)).unwrap();
        let op = LinearOperator::new(&g).unwrap();
        let v = ScalarField::from_fn(&g, |n| n.tau * (1.0 + n.x[2] + n.x[2] * n.x[2]));
        let back = op.solve_spectral(&apply_l(&v));
        let err = back.values().iter().zip(v.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-11, "{err}");
    }

    #[test]
    fn manufactured_tau_squared() {
        let mut prev = f64::INFINITY;
        for n_r in [8, 16, 32] {
            let g = Grid::new(GridSpec::axisymmetric(n_r, 8)).unwrap();
            let op = LinearOperator::new(&g).unwrap();
            let eta = ScalarField::from_fn(&g, |n| l_of_tau_power(3, 2.0, n.tau));
            let (v, rep) = op.solve(&eta, &vec![0.0; g.n_angular()], KrylovOptions::default()).unwrap();
            assert!(rep.rel_residual < 1e-12);
            let err = v.values().iter().zip(tau_sq(&g).values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10 && err <= prev.max(1e-13), "n_r={n_r}: {err}");
            prev = err;
        }
    }

    #[test]
    fn boundary_data_is_attained() {
        let g = Grid::new(GridSpec::axisymmetric(16, 8)).unwrap();
        let op = LinearOperator::new(&g).unwrap();
        let b: Vec<f64> = (0..8).map(|a| g.angular().theta(a).cos()).collect();
        let (v, _) = op.solve(&ScalarField::zeros(&g), &b, KrylovOptions::default()).unwrap();
        assert_eq!(v.boundary(), &b[..]);
        let lv = apply_l(&v);
        assert!(lv.interior_sup_norm() < 1e-10);
    }

    #[test]
    fn constant_data_give_constants() {
        let g = Grid::new(GridSpec::ball(10, 6, 8)).unwrap();
        let op = LinearOperator::new(&g).unwrap();
        let (u, _) = op.solve_datum(&ScalarField::zeros(&g), &BoundaryDatum::constant(1.3), KrylovOptions::default()).unwrap();
        assert!(u.values().iter().all(|v| (v - 1.3).abs() < 1e-12));
    }

    #[test]
    fn cosine_datum_attains_max_on_boundary() {
        let g = Grid::new(GridSpec::axisymmetric(24, 12)).unwrap();
        let op = LinearOperator::new(&g).unwrap();
        let d = BoundaryDatum::harmonic(&[(1, 0, 1.0)]);
        let (u, _) = op.solve_datum(&ScalarField::zeros(&g), &d, KrylovOptions::default()).unwrap();
        let bmax = u.boundary().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(u.interior_sup_norm() <= bmax && bmax <= 1.0);
    }

    #[test]
    fn maximum_principle() {
        // L v = -1 < 0 with zero boundary data gives v > 0.
        let g = Grid::new(GridSpec::ball(12, 8, 8)).unwrap();
        let op = LinearOperator::new(&g).unwrap();
        let eta = ScalarField::constant(&g, -1.0);
        let (v, _) = op.solve(&eta, &vec![0.0; g.n_angular()], KrylovOptions::default()).unwrap();
        assert!(v.interior().iter().all(|x| *x > 0.0));
    }
}
