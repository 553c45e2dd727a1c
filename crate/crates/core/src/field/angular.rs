//! Angular transforms on one ring: real Fourier series on the circle and
//! spherical harmonics on `S^2` (full or axisymmetric).

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2, TAU};

use super::quadrature::{normalized_legendre, normalized_legendre_dtheta, GaussLegendre};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngularKind {
    /// Equispaced nodes on `S^1` (n = 2).
    Circle,
    /// Gauss–Legendre colatitudes only; fields independent of azimuth.
    Meridian,
    /// Gauss–Legendre colatitudes times equispaced azimuths.
    Sphere,
}

/// One harmonic: `degree` sets the radial parity and the eigenvalue,
/// `order >= 0` is a cosine in azimuth (or in the circle angle), `order < 0`
/// a sine of `|order|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Harmonic {
    pub degree: usize,
    pub order: i64,
}

#[derive(Clone, Debug)]
struct LegendreBlock {
    m: usize,
    /// `[l - m][j]`
    p: Vec<Vec<f64>>,
    dp: Vec<Vec<f64>>,
    /// `m * Pbar / sin(theta)`
    mp_sin: Vec<Vec<f64>>,
    cos_offset: usize,
    sin_offset: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct AngularBasis {
    kind: AngularKind,
    n_theta: usize,
    n_phi: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
    dirs: Vec<[f64; 3]>,
    weights: Vec<f64>,
    harmonics: Vec<Harmonic>,
    const_coeff: f64,
    gl_weights: Vec<f64>,
    circle_cos: Vec<Vec<f64>>,
    circle_sin: Vec<Vec<f64>>,
    fourier_cos: Vec<Vec<f64>>,
    fourier_sin: Vec<Vec<f64>>,
    blocks: Vec<LegendreBlock>,
}

impl AngularBasis {
    pub fn circle(n: usize) -> Self {
        assert!(n >= 4 && n.is_power_of_two(), "circle node count must be a power of two >= 4");
        let theta: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
        let dirs = theta.iter().map(|t| [t.cos(), t.sin(), 0.0]).collect();
        let weights = vec![TAU / n as f64; n];
        let half = n / 2;
        let mut harmonics = vec![Harmonic { degree: 0, order: 0 }];
        for m in 1..half {
            harmonics.push(Harmonic { degree: m, order: m as i64 });
            harmonics.push(Harmonic { degree: m, order: -(m as i64) });
        }
        harmonics.push(Harmonic { degree: half, order: half as i64 });
        let circle_cos = (0..=half).map(|m| theta.iter().map(|t| (m as f64 * t).cos()).collect()).collect();
        let circle_sin = (0..=half).map(|m| theta.iter().map(|t| (m as f64 * t).sin()).collect()).collect();
        Self {
            kind: AngularKind::Circle,
            n_theta: n,
            n_phi: 1,
            phi: vec![0.0; n],
            theta,
            dirs,
            weights,
            harmonics,
            const_coeff: 1.0,
            gl_weights: Vec::new(),
            circle_cos,
            circle_sin,
            fourier_cos: Vec::new(),
            fourier_sin: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn meridian(n_theta: usize) -> Self {
        Self::spherical(AngularKind::Meridian, n_theta, 1)
    }

    pub fn sphere(n_theta: usize, n_phi: usize) -> Self {
        assert!(n_phi >= 4 && n_phi.is_multiple_of(4), "azimuth count must be a multiple of four");
        Self::spherical(AngularKind::Sphere, n_theta, n_phi)
    }

    fn spherical(kind: AngularKind, n_theta: usize, n_phi: usize) -> Self {
        assert!(n_theta >= 2, "need at least two colatitudes");
        let gl = GaussLegendre::new(n_theta);
        let m_max = match kind {
            AngularKind::Meridian => 0,
            _ => (n_theta - 1).min(n_phi / 2 - 1),
        };
        let phis: Vec<f64> = (0..n_phi).map(|k| TAU * k as f64 / n_phi as f64).collect();
        let mut theta = Vec::with_capacity(n_theta * n_phi);
        let mut phi = Vec::with_capacity(n_theta * n_phi);
        let mut dirs = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for j in 0..n_theta {
            let (st, ct) = gl.theta[j].sin_cos();
            for &p in &phis {
                theta.push(gl.theta[j]);
                phi.push(p);
                dirs.push([st * p.cos(), st * p.sin(), ct]);
                weights.push(gl.weights[j] * TAU / n_phi as f64);
            }
        }
        let mut harmonics = Vec::new();
        let mut blocks = Vec::new();
        for m in 0..=m_max {
            let mut p = vec![Vec::new(); n_theta - m];
            let mut dp = vec![Vec::new(); n_theta - m];
            let mut mp_sin = vec![Vec::new(); n_theta - m];
            for j in 0..n_theta {
                let (st, ct) = gl.theta[j].sin_cos();
                let vals = normalized_legendre(m, n_theta - 1, ct, st);
                let ders = normalized_legendre_dtheta(m, n_theta - 1, ct, st);
                for k in 0..(n_theta - m) {
                    p[k].push(vals[k]);
                    dp[k].push(ders[k]);
                    mp_sin[k].push(m as f64 * vals[k] / st);
                }
            }
            let cos_offset = harmonics.len();
            harmonics.extend((m..n_theta).map(|l| Harmonic { degree: l, order: m as i64 }));
            let sin_offset = if m > 0 {
                let o = harmonics.len();
                harmonics.extend((m..n_theta).map(|l| Harmonic { degree: l, order: -(m as i64) }));
                Some(o)
            } else {
                None
            };
            blocks.push(LegendreBlock { m, p, dp, mp_sin, cos_offset, sin_offset });
        }
        let fourier_cos = (0..=m_max).map(|m| phis.iter().map(|p| (m as f64 * p).cos()).collect()).collect();
        let fourier_sin = (0..=m_max).map(|m| phis.iter().map(|p| (m as f64 * p).sin()).collect()).collect();
        Self {
            kind,
            n_theta,
            n_phi,
            theta,
            phi,
            dirs,
            weights,
            harmonics,
            const_coeff: SQRT_2,
            gl_weights: gl.weights,
            circle_cos: Vec::new(),
            circle_sin: Vec::new(),
            fourier_cos,
            fourier_sin,
            blocks,
        }
    }

    pub fn kind(&self) -> AngularKind {
        self.kind
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn n_nodes(&self) -> usize {
        self.theta.len()
    }

    pub fn n_coeffs(&self) -> usize {
        self.harmonics.len()
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn max_degree(&self) -> usize {
        self.harmonics.iter().map(|h| h.degree).max().unwrap_or(0)
    }

    pub fn theta(&self, a: usize) -> f64 {
        self.theta[a]
    }

    pub fn phi(&self, a: usize) -> f64 {
        self.phi[a]
    }

    /// Unit direction of node `a`, padded to three components. Meridian
    /// nodes lie in the half plane `phi = 0`.
    pub fn direction(&self, a: usize) -> [f64; 3] {
        self.dirs[a]
    }

    /// Quadrature weights integrating over the whole `S^{n-1}`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total measure of `S^{n-1}`.
    pub fn area(&self) -> f64 {
        match self.kind {
            AngularKind::Circle => TAU,
            _ => 4.0 * PI,
        }
    }

    /// Eigenvalue of the Laplace–Beltrami operator on harmonic `k`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let l = self.harmonics[k].degree as f64;
        match self.kind {
            AngularKind::Circle => -l * l,
            _ => -l * (l + 1.0),
        }
    }

    /// Quadrature mean over the sphere.
    pub fn mean(&self, values: &[f64]) -> f64 {
        let s: f64 = values.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        s / self.area()
    }

    /// Coefficients of `values`. The mean is split off first so large
    /// constants do not leak rounding into the higher harmonics.
    pub fn analyze(&self, values: &[f64], coeffs: &mut [f64]) {
        debug_assert_eq!(values.len(), self.n_nodes());
        let mu = self.mean(values);
        let centered: Vec<f64> = values.iter().map(|v| v - mu).collect();
        match self.kind {
            AngularKind::Circle => self.analyze_circle(&centered, coeffs),
            _ => self.analyze_spherical(&centered, coeffs),
        }
        coeffs[0] += mu * self.const_coeff;
    }

    fn analyze_circle(&self, v: &[f64], c: &mut [f64]) {
        let n = self.n_theta;
        let half = n / 2;
        let nf = n as f64;
        c[0] = v.iter().sum::<f64>() / nf;
        for m in 1..half {
            let (cs, sn) = (&self.circle_cos[m], &self.circle_sin[m]);
            c[2 * m - 1] = 2.0 / nf * v.iter().zip(cs).map(|(a, b)| a * b).sum::<f64>();
            c[2 * m] = 2.0 / nf * v.iter().zip(sn).map(|(a, b)| a * b).sum::<f64>();
        }
        c[n - 1] = v.iter().zip(&self.circle_cos[half]).map(|(a, b)| a * b).sum::<f64>() / nf;
    }

    fn analyze_spherical(&self, v: &[f64], c: &mut [f64]) {
        let (nt, np) = (self.n_theta, self.n_phi);
        let npf = np as f64;
        for b in &self.blocks {
            let scale = if b.m == 0 { 1.0 / npf } else { 2.0 / npf };
            let mut a_m = vec![0.0; nt];
            let mut b_m = vec![0.0; nt];
            for j in 0..nt {
                let row = &v[j * np..(j + 1) * np];
                a_m[j] = scale * row.iter().zip(&self.fourier_cos[b.m]).map(|(x, y)| x * y).sum::<f64>();
                if b.m > 0 {
                    b_m[j] = scale * row.iter().zip(&self.fourier_sin[b.m]).map(|(x, y)| x * y).sum::<f64>();
                }
            }
            for (k, pl) in b.p.iter().enumerate() {
                let mut s = 0.0;
                for j in 0..nt {
                    s += self.gl_weights[j] * pl[j] * a_m[j];
                }
                c[b.cos_offset + k] = s;
                if let Some(o) = b.sin_offset {
                    let mut s = 0.0;
                    for j in 0..nt {
                        s += self.gl_weights[j] * pl[j] * b_m[j];
                    }
                    c[o + k] = s;
                }
            }
        }
    }

    pub fn synthesize(&self, coeffs: &[f64], out: &mut [f64]) {
        self.synth(coeffs, out, Deriv::Value)
    }

    /// Derivative in the circle angle, or in colatitude on the sphere.
    pub fn synthesize_dtheta(&self, coeffs: &[f64], out: &mut [f64]) {
        self.synth(coeffs, out, Deriv::Theta)
    }

    /// `(1/sin theta) d/dphi`; identically zero except on the full sphere.
    pub fn synthesize_dphi_over_sin(&self, coeffs: &[f64], out: &mut [f64]) {
        self.synth(coeffs, out, Deriv::PhiOverSin)
    }

    fn synth(&self, c: &[f64], out: &mut [f64], d: Deriv) {
        debug_assert_eq!(out.len(), self.n_nodes());
        match self.kind {
            AngularKind::Circle => self.synth_circle(c, out, d),
            _ => self.synth_spherical(c, out, d),
        }
    }

    fn synth_circle(&self, c: &[f64], out: &mut [f64], d: Deriv) {
        let n = self.n_theta;
        let half = n / 2;
        match d {
            Deriv::PhiOverSin => out.fill(0.0),
            Deriv::Value => {
                for (k, o) in out.iter_mut().enumerate() {
                    let mut s = c[0] + c[n - 1] * self.circle_cos[half][k];
                    for m in 1..half {
                        s += c[2 * m - 1] * self.circle_cos[m][k] + c[2 * m] * self.circle_sin[m][k];
                    }
                    *o = s;
                }
            }
            Deriv::Theta => {
                for (k, o) in out.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for m in 1..half {
                        let mf = m as f64;
                        s += mf * (c[2 * m] * self.circle_cos[m][k] - c[2 * m - 1] * self.circle_sin[m][k]);
                    }
                    *o = s;
                }
            }
        }
    }

    fn synth_spherical(&self, c: &[f64], out: &mut [f64], d: Deriv) {
        let (nt, np) = (self.n_theta, self.n_phi);
        out.fill(0.0);
        for b in &self.blocks {
            if d == Deriv::PhiOverSin && b.m == 0 {
                continue;
            }
            let table = match d {
                Deriv::Value => &b.p,
                Deriv::Theta => &b.dp,
                Deriv::PhiOverSin => &b.mp_sin,
            };
            for j in 0..nt {
                let mut a = 0.0;
                let mut s = 0.0;
                for (k, t) in table.iter().enumerate() {
                    a += c[b.cos_offset + k] * t[j];
                    if let Some(o) = b.sin_offset {
                        s += c[o + k] * t[j];
                    }
                }
                let row = &mut out[j * np..(j + 1) * np];
                let (fc, fs) = (&self.fourier_cos[b.m], &self.fourier_sin[b.m]);
                if d == Deriv::PhiOverSin {
                    // d/dphi (a cos + s sin) = m (s cos - a sin); m is in the table.
                    for k in 0..np {
                        row[k] += s * fc[k] - a * fs[k];
                    }
                } else if b.m == 0 {
                    for x in row.iter_mut() {
                        *x += a;
                    }
                } else {
                    for k in 0..np {
                        row[k] += a * fc[k] + s * fs[k];
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Deriv {
    Value,
    Theta,
    PhiOverSin,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(b: &AngularBasis, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..b.n_nodes()).map(|a| f(b.theta(a), b.phi(a))).collect()
    }

    fn round_trip(b: &AngularBasis, f: impl Fn(f64, f64) -> f64) -> f64 {
        let v = sample(b, f);
        let mut c = vec![0.0; b.n_coeffs()];
        b.analyze(&v, &mut c);
        let mut w = vec![0.0; b.n_nodes()];
        b.synthesize(&c, &mut w);
        v.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn circle_is_exact_transform() {
        let b = AngularBasis::circle(16);
        assert_eq!(b.n_coeffs(), 16);
        assert!(round_trip(&b, |t, _| (3.0 * t).sin() + 0.2 * (8.0 * t).cos() + 1.5) < 1e-14);
    }

    #[test]
    fn circle_derivative() {
        let b = AngularBasis::circle(32);
        let v = sample(&b, |t, _| (3.0 * t).cos() + 2.0 * t.sin());
        let mut c = vec![0.0; b.n_coeffs()];
        b.analyze(&v, &mut c);
        let mut d = vec![0.0; b.n_nodes()];
        b.synthesize_dtheta(&c, &mut d);
        for a in 0..b.n_nodes() {
            let t = b.theta(a);
            let e = (d[a] - (-3.0 * (3.0 * t).sin() + 2.0 * t.cos())).abs();
            assert!(e < 1e-12, "{a}: {e}");
        }
    }

    #[test]
    fn meridian_exact_and_derivative() {
        let b = AngularBasis::meridian(12);
        assert!(round_trip(&b, |t, _| t.cos().powi(7) + 0.3) < 1e-14);
        let v = sample(&b, |t, _| 0.5 * (3.0 * t.cos().powi(2) - 1.0));
        let mut c = vec![0.0; b.n_coeffs()];
        b.analyze(&v, &mut c);
        let mut d = vec![0.0; b.n_nodes()];
        b.synthesize_dtheta(&c, &mut d);
        for a in 0..b.n_nodes() {
            let t = b.theta(a);
            assert!((d[a] + 3.0 * t.cos() * t.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn sphere_band_limited_round_trip() {
        let b = AngularBasis::sphere(10, 16);
        let f = |t: f64, p: f64| t.sin().powi(3) * (3.0 * p).sin() * t.cos() + t.sin() * p.cos() + 2.0;
        assert!(round_trip(&b, f) < 1e-13);
    }

    #[test]
    fn sphere_azimuth_derivative() {
        let b = AngularBasis::sphere(8, 16);
        let v = sample(&b, |t, p| t.sin().powi(2) * (2.0 * p).cos());
        let mut c = vec![0.0; b.n_coeffs()];
        b.analyze(&v, &mut c);
        let mut d = vec![0.0; b.n_nodes()];
        b.synthesize_dphi_over_sin(&c, &mut d);
        for a in 0..b.n_nodes() {
            let (t, p) = (b.theta(a), b.phi(a));
            assert!((d[a] + 2.0 * t.sin() * (2.0 * p).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvalues_follow_degree() {
        let b = AngularBasis::meridian(6);
        assert_eq!(b.eigenvalue(2), -6.0);
        let c = AngularBasis::circle(8);
        assert_eq!(c.eigenvalue(3), -4.0);
    }
}
