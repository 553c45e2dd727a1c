//! Euclidean differential operators on polar grids.
//!
//! Every operator works per ring in harmonic coefficients: angular
//! derivatives are exact on the transform, radial derivatives use the
//! per-degree stencils of [`super::radial`].

use rayon::prelude::*;
use std::sync::Arc;

use super::angular::{AngularBasis, AngularKind};
use super::grid::Grid;
use super::scalar::{ScalarField, VectorField};
use crate::error::{Error, Result};

/// Harmonic coefficients ring by ring (boundary ring last).
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Arc<Grid>,
    c: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialOp {
    D1,
    Laplacian,
}

/// Map `f` over rings `0..n` in parallel, keeping ring order.
pub(crate) fn per_ring<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

impl Spectrum {
    pub fn analyze(f: &ScalarField) -> Self {
        let grid = f.grid().clone();
        let nc = grid.angular().n_coeffs();
        let rings = per_ring(grid.n_r() + 1, |i| {
            let mut c = vec![0.0; nc];
            grid.angular().analyze(f.ring(i), &mut c);
            for (k, v) in c.iter_mut().enumerate() {
                if !grid.keeps(k, i) {
                    *v = 0.0;
                }
            }
            c
        });
        Self { c: rings.concat(), grid }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { c: vec![0.0; (grid.n_r() + 1) * grid.angular().n_coeffs()], grid: grid.clone() }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn n_coeffs(&self) -> usize {
        self.grid.angular().n_coeffs()
    }

    pub fn ring(&self, i: usize) -> &[f64] {
        let nc = self.n_coeffs();
        &self.c[i * nc..(i + 1) * nc]
    }

    pub fn ring_mut(&mut self, i: usize) -> &mut [f64] {
        let nc = self.n_coeffs();
        &mut self.c[i * nc..(i + 1) * nc]
    }

    pub fn coeff(&self, ring: usize, k: usize) -> f64 {
        self.c[ring * self.n_coeffs() + k]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.c
    }

    /// Apply a radial operator degree by degree on every ring.
    pub fn radial(&self, op: RadialOp) -> Spectrum {
        let grid = &self.grid;
        let nc = self.n_coeffs();
        let harm = grid.angular().harmonics();
        let st = grid.radial();
        let rings = per_ring(grid.n_r() + 1, |i| {
            (0..nc)
                .map(|k| {
                    if !grid.keeps(k, i) {
                        return 0.0;
                    }
                    let l = harm[k].degree;
                    let row = match op {
                        RadialOp::D1 => st.d1(l, i),
                        RadialOp::Laplacian => st.laplacian(l, i),
                    };
                    row.apply(|j| self.c[j * nc + k])
                })
                .collect::<Vec<f64>>()
        });
        Spectrum { c: rings.concat(), grid: grid.clone() }
    }

    pub fn synthesize(&self) -> ScalarField {
        self.synth_with(|a, c, o| a.synthesize(c, o))
    }

    pub fn synthesize_dtheta(&self) -> ScalarField {
        self.synth_with(|a, c, o| a.synthesize_dtheta(c, o))
    }

    pub fn synthesize_dphi_over_sin(&self) -> ScalarField {
        self.synth_with(|a, c, o| a.synthesize_dphi_over_sin(c, o))
    }

    fn synth_with(&self, f: impl Fn(&AngularBasis, &[f64], &mut [f64]) + Sync + Send) -> ScalarField {
        let grid = &self.grid;
        let na = grid.n_angular();
        let rings = per_ring(grid.n_r() + 1, |i| {
            let mut out = vec![0.0; na];
            f(grid.angular(), self.ring(i), &mut out);
            out
        });
        ScalarField::new(grid.clone(), rings.concat()).expect("synthesized values are finite")
    }
}

/// Transform and back: removes the components the grid cannot represent.
pub fn project(f: &ScalarField) -> ScalarField {
    Spectrum::analyze(f).synthesize()
}

/// Cartesian gradient from a spectrum of `f`.
pub fn gradient_from(spec: &Spectrum) -> VectorField {
    let grid = spec.grid().clone();
    let fr = spec.radial(RadialOp::D1).synthesize();
    let ft = spec.synthesize_dtheta();
    let fp = spec.synthesize_dphi_over_sin();
    let dim = grid.dim();
    let mut comps = vec![ScalarField::zeros(&grid); dim];
    for flat in 0..grid.n_nodes() {
        let n = grid.node_at(flat);
        let (a, b, c) = (fr.values()[flat], ft.values()[flat] / n.r, fp.values()[flat] / n.r);
        let g = if dim == 2 {
            let (s, co) = n.theta.sin_cos();
            [a * co - b * s, a * s + b * co, 0.0]
        } else {
            let (st, ct) = n.theta.sin_cos();
            let (sp, cp) = n.phi.sin_cos();
            [a * st * cp + b * ct * cp - c * sp, a * st * sp + b * ct * sp + c * cp, a * ct - b * st]
        };
        for d in 0..dim {
            comps[d].values_mut()[flat] = g[d];
        }
    }
    VectorField { components: comps }
}

pub fn gradient(f: &ScalarField) -> VectorField {
    gradient_from(&Spectrum::analyze(f))
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    Spectrum::analyze(f).radial(RadialOp::Laplacian).synthesize()
}

/// `x . grad f = r df/dr`.
pub fn radial_derivative(f: &ScalarField) -> ScalarField {
    Spectrum::analyze(f).radial(RadialOp::D1).synthesize()
}

/// Divergence of a Cartesian vector field.
pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    let grid = v.grid().clone();
    check_components(v)?;
    if grid.kind() == AngularKind::Meridian {
        let lifted = lift_vector(v);
        return Ok(restrict(&divergence(&lifted)?, &grid));
    }
    let mut out = ScalarField::zeros(&grid);
    for (d, comp) in v.components.iter().enumerate() {
        let g = gradient(comp);
        for (o, x) in out.values_mut().iter_mut().zip(g.components[d].values()) {
            *o += x;
        }
    }
    Ok(out)
}

/// Symmetrized nested Cartesian Hessian, row-major `dim x dim`.
pub fn hessian(f: &ScalarField) -> Vec<ScalarField> {
    let grid = f.grid().clone();
    if grid.kind() == AngularKind::Meridian {
        return hessian(&lift(f)).iter().map(|h| restrict(h, &grid)).collect();
    }
    let dim = grid.dim();
    let g = gradient(f);
    let gg: Vec<VectorField> = g.components.iter().map(gradient).collect();
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let a = gg[i].components[j].values();
            let b = gg[j].components[i].values();
            let v = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
            out.push(ScalarField::new(grid.clone(), v).expect("finite"));
        }
    }
    out
}

/// Cartesian gradient of each component; `out[a][d] = d_d v_a`.
pub fn jacobian_matrix(v: &VectorField) -> Vec<VectorField> {
    let grid = v.grid().clone();
    if grid.kind() == AngularKind::Meridian {
        let lifted = lift_vector(v);
        return jacobian_matrix(&lifted)
            .iter()
            .map(|row| VectorField { components: row.components.iter().map(|c| restrict(c, &grid)).collect() })
            .collect();
    }
    v.components.iter().map(gradient).collect()
}

fn check_components(v: &VectorField) -> Result<()> {
    let grid = v.grid();
    if v.len() != grid.dim() {
        return Err(Error::InvalidInput(format!("expected {} components, got {}", grid.dim(), v.len())));
    }
    for c in &v.components {
        c.same_grid(&v.components[0])?;
    }
    Ok(())
}

/// Extend an axisymmetric field to the full-sphere companion grid.
pub fn lift(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let big = grid.lifted();
    let np = big.angular().n_phi();
    let values = f.values().iter().flat_map(|&v| std::iter::repeat_n(v, np)).collect();
    ScalarField::new(big, values).expect("finite")
}

/// Extend an axisymmetric Cartesian vector field (given in the plane
/// `phi = 0`) by rotation about the axis.
pub fn lift_vector(v: &VectorField) -> VectorField {
    let grid = v.grid();
    let big = grid.lifted();
    let ang = big.angular();
    let np = ang.n_phi();
    let nt = ang.n_theta();
    let na = grid.n_angular();
    let mut comps = vec![ScalarField::zeros(&big); 3];
    for i in 0..=grid.n_r() {
        for j in 0..nt {
            let src = i * na + j;
            let (x, y, z) = (v.components[0].values()[src], v.components[1].values()[src], v.components[2].values()[src]);
            for k in 0..np {
                let (s, c) = ang.phi(j * np + k).sin_cos();
                let dst = i * big.n_angular() + j * np + k;
                comps[0].values_mut()[dst] = c * x - s * y;
                comps[1].values_mut()[dst] = s * x + c * y;
                comps[2].values_mut()[dst] = z;
            }
        }
    }
    VectorField { components: comps }
}

/// Values of a lifted field in the plane `phi = 0`.
pub fn restrict(f: &ScalarField, target: &Arc<Grid>) -> ScalarField {
    let big = f.grid();
    let np = big.angular().n_phi();
    let values = (0..target.n_nodes())
        .map(|flat| {
            let (i, j) = (flat / target.n_angular(), flat % target.n_angular());
            f.values()[i * big.n_angular() + j * np]
        })
        .collect();
    ScalarField::new(target.clone(), values).expect("finite")
}

/// Laplace–Beltrami operator of `S^{n-1}` on samples at the ring nodes.
pub fn sphere_laplacian(basis: &AngularBasis, g: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; basis.n_coeffs()];
    basis.analyze(g, &mut c);
    for (k, v) in c.iter_mut().enumerate() {
        *v *= basis.eigenvalue(k);
    }
    let mut out = vec![0.0; basis.n_nodes()];
    basis.synthesize(&c, &mut out);
    out
}

/// `|grad_{S^{n-1}} g|^2` on samples at the ring nodes.
pub fn sphere_gradient_sq(basis: &AngularBasis, g: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; basis.n_coeffs()];
    basis.analyze(g, &mut c);
    let mut dt = vec![0.0; basis.n_nodes()];
    let mut dp = vec![0.0; basis.n_nodes()];
    basis.synthesize_dtheta(&c, &mut dt);
    basis.synthesize_dphi_over_sin(&c, &mut dp);
    dt.iter().zip(&dp).map(|(a, b)| a * a + b * b).collect()
}
