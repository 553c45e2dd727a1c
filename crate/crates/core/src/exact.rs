//! Totally geodesic slices: sections of the quadric by hyperplanes
//! `<X, a> = 0`, their boundary traces, and the inverse problem of deciding
//! whether a boundary trace comes from one.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::ball::{tau_of_r, AmbientVector, BallPoint};
use crate::error::{Error, Result};
use crate::field::angular::{AngularBasis, AngularKind};
use crate::field::ops::sphere_gradient_sq;
use crate::field::{Grid, ScalarField};

/// Default threshold on the RMS projection residual for the verdict.
pub const FIT_TOLERANCE: f64 = 1e-8;

/// `t = -w0 + arccos(lambda(r) (A x1 + B x2 + C x3) / r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSliceSpec {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub w0: f64,
}

impl GeodesicSliceSpec {
    pub fn new(a: f64, b: f64, c: f64, w0: f64) -> Result<Self> {
        let s = Self { a, b, c, w0 };
        s.validate()?;
        Ok(s)
    }

    pub fn norm_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c
    }

    pub fn validate(&self) -> Result<()> {
        let norm_sq = self.norm_sq();
        if !(norm_sq < 1.0) || !self.w0.is_finite() {
            return Err(Error::NotSpacelikeHyperplane { norm_sq });
        }
        Ok(())
    }

    /// Hyperplane normal with `a4^2 + a5^2 = 1`.
    pub fn hyperplane(&self) -> AmbientVector {
        AmbientVector([self.a, self.b, self.c, self.w0.cos(), -self.w0.sin()])
    }

    /// `A x1 + B x2 + C x3` for a padded Cartesian vector.
    fn linear(&self, x: &[f64; 3]) -> f64 {
        self.a * x[0] + self.b * x[1] + self.c * x[2]
    }

    /// Sign-flipped representation with `w0` reduced to `[0, pi)`.
    pub fn canonical(&self) -> Self {
        let w = self.w0.rem_euclid(2.0 * PI);
        if w >= PI {
            Self { a: -self.a, b: -self.b, c: -self.c, w0: w - PI }
        } else {
            Self { w0: w, ..*self }
        }
    }
}

pub fn geodesic_height(spec: &GeodesicSliceSpec, p: &BallPoint) -> Result<f64> {
    spec.validate()?;
    // lambda(r) g = 2 (A,B,C).x / (1 + r^2)
    let x = p.padded();
    let r2 = x.iter().map(|v| v * v).sum::<f64>();
    let arg = 2.0 * spec.linear(&x) / (1.0 + r2);
    Ok(-spec.w0 + arg.clamp(-1.0, 1.0).acos())
}

pub fn geodesic_field(spec: &GeodesicSliceSpec, grid: &Arc<Grid>) -> Result<ScalarField> {
    spec.validate()?;
    Ok(ScalarField::from_fn(grid, |n| {
        let r2 = n.r * n.r;
        (-spec.w0) + (2.0 * spec.linear(&n.x) / (1.0 + r2)).acos()
    }))
}

/// `cos(t + w0) = 2 (A,B,C).x / (1 + r^2)` solved by the sausage height;
/// exposed so tests can compare against `tau`-based forms.
pub fn hyperplane_argument(spec: &GeodesicSliceSpec, p: &BallPoint) -> f64 {
    let tau = tau_of_r(p.r());
    spec.linear(&p.padded()) / (1.0 - tau)
}

/// Boundary limit `w = -w0 + arccos(g)` and `f = cos(w + w0)` at the
/// boundary nodes.
pub fn boundary_trace(spec: &GeodesicSliceSpec, grid: &Grid) -> (Vec<f64>, Vec<f64>) {
    let b = grid.angular();
    let w: Vec<f64> = (0..b.n_nodes()).map(|a| -spec.w0 + spec.linear(&b.direction(a)).acos()).collect();
    let f = w.iter().map(|v| (v + spec.w0).cos()).collect();
    (w, f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicFit {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub w0: f64,
    /// RMS over the sphere of the part of `cos(w + w0)` outside degree one.
    pub residual: f64,
    pub totally_geodesic: bool,
}

impl GeodesicFit {
    pub fn spec(&self) -> GeodesicSliceSpec {
        GeodesicSliceSpec { a: self.a, b: self.b, c: self.c, w0: self.w0 }
    }

    pub fn norm_sq(&self) -> f64 {
        self.spec().norm_sq()
    }
}

/// Degree-one functions on the boundary nodes: the Cartesian components
/// of the direction that the basis can represent.
fn degree_one(basis: &AngularBasis) -> Vec<(usize, Vec<f64>)> {
    let axes: &[usize] = match basis.kind() {
        AngularKind::Circle => &[0, 1],
        AngularKind::Meridian => &[2],
        AngularKind::Sphere => &[0, 1, 2],
    };
    axes.iter().map(|&d| (d, (0..basis.n_nodes()).map(|a| basis.direction(a)[d]).collect())).collect()
}

fn wdot(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
}

/// Coefficients on the degree-one functions and the remainder.
fn split_degree_one(basis: &AngularBasis, f: &[f64]) -> ([f64; 3], Vec<f64>) {
    let w = basis.weights();
    let mut coef = [0.0; 3];
    let mut rest = f.to_vec();
    for (d, e) in degree_one(basis) {
        let c = wdot(w, f, &e) / wdot(w, &e, &e);
        coef[d] = c;
        for (r, x) in rest.iter_mut().zip(&e) {
            *r -= c * x;
        }
    }
    (coef, rest)
}

/// Decide whether boundary samples `w` are the trace of a totally geodesic
/// slice. The objective `|(I - P1) cos(w + w0)|^2` is a quadratic form in
/// `(cos w0, sin w0)`, so the optimal `w0` is an eigenvector of a 2x2 Gram
/// matrix; it is reported in `[0, pi)`.
pub fn fit_geodesic_trace(basis: &AngularBasis, w: &[f64], tol: f64) -> GeodesicFit {
    let weights = basis.weights();
    let area = basis.area();
    let alpha: Vec<f64> = w.iter().map(|v| v.cos()).collect();
    let beta: Vec<f64> = w.iter().map(|v| -v.sin()).collect();
    let (_, ra) = split_degree_one(basis, &alpha);
    let (_, rb) = split_degree_one(basis, &beta);
    let (gaa, gab, gbb) = (wdot(weights, &ra, &ra), wdot(weights, &ra, &rb), wdot(weights, &rb, &rb));
    // Major axis at angle phi; the minimizer is perpendicular to it.
    let phi = 0.5 * (2.0 * gab).atan2(gaa - gbb);
    let w0 = (phi + FRAC_PI_2).rem_euclid(PI);
    let w0 = if w0 >= PI { 0.0 } else { w0 };
    let f: Vec<f64> = w.iter().map(|v| (v + w0).cos()).collect();
    let (coef, rest) = split_degree_one(basis, &f);
    let residual = (wdot(weights, &rest, &rest).max(0.0) / area).sqrt();
    let norm_sq = coef.iter().map(|c| c * c).sum::<f64>();
    GeodesicFit { a: coef[0], b: coef[1], c: coef[2], w0, residual, totally_geodesic: residual < tol && norm_sq < 1.0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub w0: f64,
    pub mean: f64,
    pub max_deviation: f64,
    /// `f^2 + |grad f|^2` at each boundary node.
    pub values: Vec<f64>,
}

/// `f^2 + |grad_{S} f|^2` for `f = cos(w + w0)` at the fitted `w0`; constant
/// (and equal to `A^2 + B^2 + C^2`) exactly when the trace is geodesic.
pub fn trace_constancy_check(basis: &AngularBasis, w: &[f64]) -> ConstancyReport {
    let fit = fit_geodesic_trace(basis, w, FIT_TOLERANCE);
    let f: Vec<f64> = w.iter().map(|v| (v + fit.w0).cos()).collect();
    let g2 = sphere_gradient_sq(basis, &f);
    let values: Vec<f64> = f.iter().zip(&g2).map(|(a, b)| a * a + b).collect();
    let mean = basis.mean(&values);
    let max_deviation = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    ConstancyReport { w0: fit.w0, mean, max_deviation, values }
}
