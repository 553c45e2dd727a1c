//! Ball-model coordinates of hyperbolic space and the sausage embedding of
//! anti-de Sitter space into the flat space R^5_2.
//!
//! Hyperbolic space is the unit ball with metric `tau^-2 |dx|^2`, where
//! `tau = (1 - |x|^2) / 2`. The radial coordinate `rho` used by the warped
//! product form of the metric satisfies `sinh(rho) = tau / r`, so `rho -> 0`
//! on the ideal boundary and `rho -> infinity` at the center.
//!
//! Every quantity here is evaluated through rational identities in `r` so
//! nothing loses precision near `r = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius of the Euclidean covering balls `B(x)`, in units of `tau(x)`.
pub const COVERING_RADIUS: f64 = 1.0 / 3.0;

/// A point of the closed unit ball in dimension 2 or 3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    dim: usize,
    x: [f64; 3],
}

impl BallPoint {
    pub fn new(cartesian: &[f64]) -> Result<Self> {
        let dim = cartesian.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!("ball dimension {dim} not in {{2, 3}}")));
        }
        let mut x = [0.0; 3];
        x[..dim].copy_from_slice(cartesian);
        let p = Self { dim, x };
        if p.r() > 1.0 + 1e-14 {
            return Err(Error::InvalidInput(format!("|x| = {} exceeds 1", p.r())));
        }
        Ok(p)
    }

    /// Point at polar coordinates `(r, theta)` of the disk.
    pub fn polar2(r: f64, theta: f64) -> Self {
        Self { dim: 2, x: [r * theta.cos(), r * theta.sin(), 0.0] }
    }

    /// Point at spherical coordinates `(r, colatitude, azimuth)`.
    pub fn spherical(r: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { dim: 3, x: [r * st * cp, r * st * sp, r * ct] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cartesian(&self) -> &[f64] {
        &self.x[..self.dim]
    }

    /// Cartesian coordinates padded to three slots.
    pub fn padded(&self) -> [f64; 3] {
        self.x
    }

    pub fn r(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Disk angle for n = 2, colatitude for n = 3.
    pub fn theta(&self) -> f64 {
        match self.dim {
            2 => self.x[1].atan2(self.x[0]).rem_euclid(std::f64::consts::TAU),
            _ => {
                let rho = self.x[0].hypot(self.x[1]);
                rho.atan2(self.x[2])
            }
        }
    }

    /// Azimuth (n = 3 only; zero for n = 2).
    pub fn phi(&self) -> f64 {
        match self.dim {
            2 => 0.0,
            _ => self.x[1].atan2(self.x[0]).rem_euclid(std::f64::consts::TAU),
        }
    }

    pub fn tau(&self) -> f64 {
        tau_of_r(self.r())
    }

    pub fn is_interior(&self) -> bool {
        self.r() < 1.0
    }

    /// Unit direction of the point; the zero vector at the origin.
    pub fn direction(&self) -> [f64; 3] {
        let r = self.r();
        if r == 0.0 {
            return [0.0; 3];
        }
        [self.x[0] / r, self.x[1] / r, self.x[2] / r]
    }
}

/// `tau = (1 - r^2) / 2`.
pub fn tau_of_r(r: f64) -> f64 {
    0.5 * (1.0 - r) * (1.0 + r)
}

/// Per-point bundle of the ball-model factors consumed by the PDE kernels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateFactors {
    pub tau: f64,
    /// `f64::INFINITY` at the origin, `0` on the ideal boundary.
    pub rho: f64,
    pub sinh_rho: f64,
    pub cosh_rho: f64,
    pub tanh_rho: f64,
    pub coth_rho: f64,
    /// `lambda = 2r / (1 + r^2)`.
    pub lambda: f64,
    /// Set when the `rho`-fields are limits rather than values (r = 0 or r = 1).
    pub limiting: bool,
}

pub fn coordinate_factors(p: &BallPoint) -> CoordinateFactors {
    factors_at_radius(p.r())
}

pub fn factors_at_radius(r: f64) -> CoordinateFactors {
    let r = r.min(1.0);
    let tau = tau_of_r(r);
    let one_minus_tau = 0.5 * (1.0 + r * r);
    let lambda = 2.0 * r / (1.0 + r * r);
    if r == 0.0 {
        return CoordinateFactors {
            tau,
            rho: f64::INFINITY,
            sinh_rho: f64::INFINITY,
            cosh_rho: f64::INFINITY,
            tanh_rho: 1.0,
            coth_rho: 1.0,
            lambda,
            limiting: true,
        };
    }
    if r >= 1.0 {
        return CoordinateFactors {
            tau: 0.0,
            rho: 0.0,
            sinh_rho: 0.0,
            cosh_rho: 1.0,
            tanh_rho: 0.0,
            coth_rho: f64::INFINITY,
            lambda: 1.0,
            limiting: true,
        };
    }
    let sinh_rho = tau / r;
    CoordinateFactors {
        tau,
        rho: sinh_rho.asinh(),
        sinh_rho,
        cosh_rho: one_minus_tau / r,
        tanh_rho: tau / one_minus_tau,
        coth_rho: one_minus_tau / tau,
        lambda,
        limiting: false,
    }
}

/// Element of R^5_2 with signature (+, +, +, -, -). The two-dimensional
/// analogue lives in R^4_2 and is stored with slot 3 set to zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientVector(pub [f64; 5]);

impl AmbientVector {
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 5];
        v[i] = 1.0;
        Self(v)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|v| v * s))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.0;
        for (a, b) in v.iter_mut().zip(other.0) {
            *a += b;
        }
        Self(v)
    }
}

pub fn minkowski_inner(x: &AmbientVector, y: &AmbientVector) -> f64 {
    let (a, b) = (&x.0, &y.0);
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3] - a[4] * b[4]
}

/// Sausage coordinates: `(2r/(1-r^2)) * direction` in the spatial slots and
/// `((1+r^2)/(1-r^2)) * (cos t, sin t)` in the timelike slots.
pub fn ambient_embed(p: &BallPoint, t: f64) -> Result<AmbientVector> {
    let r = p.r();
    if r >= 1.0 {
        return Err(Error::DegenerateEmbedding { r });
    }
    let tau = tau_of_r(r);
    // 2x / (1 - r^2) = x / tau, so the spatial slots never divide by r.
    let x = p.padded();
    let b = (1.0 - tau) / tau;
    let (s, c) = t.sin_cos();
    Ok(AmbientVector([x[0] / tau, x[1] / tau, x[2] / tau, b * c, b * s]))
}

/// Inverse of [`ambient_embed`] on the quadric `<X, X> = -1`.
pub fn recover_coordinates(v: &AmbientVector, dim: usize) -> Result<(BallPoint, f64)> {
    let x = &v.0;
    let b = x[3].hypot(x[4]);
    if b < 1.0 {
        return Err(Error::InvalidInput(format!("timelike radius {b} < 1 is off the quadric")));
    }
    // b = (1 + r^2) / (1 - r^2)  =>  r^2 = (b - 1) / (b + 1), tau = 1 / (b + 1).
    let tau = 1.0 / (b + 1.0);
    let cart: Vec<f64> = x[..dim].iter().map(|v| v * tau).collect();
    let t = x[4].atan2(x[3]);
    Ok((BallPoint::new(&cart)?, t))
}

/// Covering map `y = x + tau(x) z` from the ball of radius 1/3 onto `B(x)`.
pub fn rescale_map(x: &BallPoint, z: &[f64]) -> Result<BallPoint> {
    if z.len() != x.dim() {
        return Err(Error::InvalidInput("offset dimension does not match point".into()));
    }
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm >= COVERING_RADIUS {
        return Err(Error::OutsideCoveringBall { norm });
    }
    if !x.is_interior() {
        return Err(Error::InvalidInput("covering maps are centered at interior points".into()));
    }
    let t = x.tau();
    let y: Vec<f64> = x.cartesian().iter().zip(z).map(|(a, b)| a + t * b).collect();
    let y = BallPoint::new(&y)?;
    let ratio = tau_ratio(x, &y);
    debug_assert!((0.1..=40.0).contains(&ratio), "tau ratio {ratio} escapes [1/10, 40]");
    Ok(y)
}

/// `tau(y) / tau(x)`; lies in `[1/10, 40]` whenever `y` is in `B(x)`.
pub fn tau_ratio(x: &BallPoint, y: &BallPoint) -> f64 {
    y.tau() / x.tau()
}
