//! Gauss–Legendre quadrature and orthonormal associated Legendre functions.

use std::f64::consts::PI;

/// Gauss–Legendre nodes `cos(theta_j)` (descending, so colatitude ascends)
/// together with their colatitudes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let mut x = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for j in 0..n {
            // Tricomi's initial guess, then Newton on P_n.
            let mut z = (PI * (j as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            dp = if d != 0.0 { d } else { dp };
            x[j] = z;
            weights[j] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        let theta = x.iter().map(|v| v.acos()).collect();
        Self { x, theta, weights }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Values of `Pbar_l^m(cos theta)` for `l = m..=lmax`, normalized so that
/// `int_{-1}^{1} Pbar^2 dx = 1`. No Condon–Shortley phase.
pub fn normalized_legendre(m: usize, lmax: usize, cos_t: f64, sin_t: f64) -> Vec<f64> {
    if lmax < m {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(lmax - m + 1);
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..=m {
        let kf = k as f64;
        pmm *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * sin_t;
    }
    out.push(pmm);
    if lmax == m {
        return out;
    }
    let mf = m as f64;
    let mut prev = pmm;
    let mut cur = (2.0 * mf + 3.0).sqrt() * cos_t * pmm;
    out.push(cur);
    for l in (m + 2)..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let a_prev = ((4.0 * (lf - 1.0) * (lf - 1.0) - 1.0) / ((lf - 1.0) * (lf - 1.0) - mf * mf)).sqrt();
        let next = a * (cos_t * cur - prev / a_prev);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Colatitude derivatives of [`normalized_legendre`]; `sin_t` must be nonzero.
pub fn normalized_legendre_dtheta(m: usize, lmax: usize, cos_t: f64, sin_t: f64) -> Vec<f64> {
    let p = normalized_legendre(m, lmax, cos_t, sin_t);
    let mf = m as f64;
    p.iter()
        .enumerate()
        .map(|(k, &pl)| {
            let l = (m + k) as f64;
            let below = if k == 0 { 0.0 } else { p[k - 1] };
            let c = ((2.0 * l + 1.0) * (l - mf) * (l + mf) / (2.0 * l - 1.0)).sqrt();
            let c = if k == 0 { 0.0 } else { c };
            (l * cos_t * pl - c * below) / sin_t
        })
        .collect()
}

/// Factor turning the orthonormal function into the classical
/// `P_l^m = (1 - x^2)^{m/2} d^m P_l / dx^m`.
pub fn legendre_norm(l: usize, m: usize) -> f64 {
    // sqrt((2l + 1)/2 * (l - m)! / (l + m)!)
    let mut ratio = 1.0;
    for k in (l - m + 1)..=(l + m) {
        ratio /= k as f64;
    }
    ((2.0 * l as f64 + 1.0) / 2.0 * ratio).sqrt()
}

/// Classical unnormalized associated Legendre function (no phase factor).
pub fn associated_legendre(l: usize, m: usize, cos_t: f64, sin_t: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    normalized_legendre(m, l, cos_t, sin_t)[l - m] / legendre_norm(l, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 64, 128] {
            let q = GaussLegendre::new(n);
            let s: f64 = q.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: {s}");
            assert!(q.theta.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let q = GaussLegendre::new(8);
        for k in 0..=15 {
            let num: f64 = q.x.iter().zip(&q.weights).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((num - exact).abs() < 1e-14, "x^{k}");
        }
    }

    #[test]
    fn orthonormal_under_quadrature() {
        let n = 24;
        let q = GaussLegendre::new(n);
        for m in [0, 1, 3, 7] {
            let tables: Vec<Vec<f64>> = q.theta.iter().map(|t| normalized_legendre(m, n - 1, t.cos(), t.sin())).collect();
            for a in 0..(n - m) {
                for b in 0..(n - m) {
                    let s: f64 = (0..n).map(|j| q.weights[j] * tables[j][a] * tables[j][b]).sum();
                    let e = if a == b { 1.0 } else { 0.0 };
                    assert!((s - e).abs() < 1e-12, "m={m} a={a} b={b}: {s}");
                }
            }
        }
    }

    #[test]
    fn classical_low_degrees() {
        let t: f64 = 0.7;
        let (c, s) = (t.cos(), t.sin());
        assert!((associated_legendre(2, 0, c, s) - 0.5 * (3.0 * c * c - 1.0)).abs() < 1e-14);
        assert!((associated_legendre(1, 1, c, s) - s).abs() < 1e-14);
        assert!((associated_legendre(2, 1, c, s) - 3.0 * c * s).abs() < 1e-14);
        assert!((associated_legendre(2, 2, c, s) - 3.0 * s * s).abs() < 1e-14);
        assert!((associated_legendre(3, 0, c, s) - 0.5 * (5.0 * c * c * c - 3.0 * c)).abs() < 1e-14);
    }

    #[test]
    fn dtheta_matches_central_difference() {
        let dt = 1e-5;
        for m in [0, 1, 2, 5] {
            for &t in &[0.2f64, 1.1, 2.9] {
                let d = normalized_legendre_dtheta(m, 12, t.cos(), t.sin());
                let p = normalized_legendre(m, 12, (t + dt).cos(), (t + dt).sin());
                let q = normalized_legendre(m, 12, (t - dt).cos(), (t - dt).sin());
                for k in 0..d.len() {
                    let fd = (p[k] - q[k]) / (2.0 * dt);
                    assert!((fd - d[k]).abs() < 1e-7 * (1.0 + d[k].abs()), "m={m} k={k} t={t}");
                }
            }
        }
    }
}
