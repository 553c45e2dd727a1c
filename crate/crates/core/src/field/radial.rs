//! Fourth-order radial finite differences acting on one angular degree at a
//! time.
//!
//! Rings sit at `r_i = (i + 1/2) h` for `i = 0..=N`, with `h = 1/(N + 1/2)`
//! so that ring `N` is the boundary `r = 1`. Stencils that reach across the
//! pole use ghost rings `r_{-k} = -r_{k-1}`; a degree-`l` profile has parity
//! `(-1)^l` there. For low degrees the profile is written as `F = r^l g`
//! with `g` even, which keeps the pole rows accurate for odd `l`.

/// Degrees up to this value use the `F = r^l g` form.
pub const POLE_FORM_MAX_DEGREE: usize = 4;

/// A degree is dropped on ring `i` once `r_i^l < exp(-POLAR_CUTOFF)`.
pub const POLAR_CUTOFF: f64 = 36.0;

/// Finite-difference weights for derivatives `0..=order` at `x0` on the
/// nodes `xs` (Fornberg's recursion). Result is indexed `[derivative][node]`.
pub fn fornberg(x0: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Weights on a contiguous run of real rings `start..start + w.len()`.
#[derive(Clone, Debug, Default)]
pub struct RadialRow {
    pub start: usize,
    pub w: Vec<f64>,
}

impl RadialRow {
    fn from_pairs(pairs: &[(usize, f64)]) -> Self {
        let lo = pairs.iter().map(|p| p.0).min().unwrap_or(0);
        let hi = pairs.iter().map(|p| p.0).max().unwrap_or(0);
        let mut w = vec![0.0; hi - lo + 1];
        for &(k, v) in pairs {
            w[k - lo] += v;
        }
        Self { start: lo, w }
    }

    #[inline]
    pub fn apply(&self, column: impl Fn(usize) -> f64) -> f64 {
        self.w.iter().enumerate().map(|(k, w)| w * column(self.start + k)).sum()
    }

    pub fn end(&self) -> usize {
        self.start + self.w.len()
    }
}

/// Radial first-derivative and Laplacian rows for every degree and ring.
#[derive(Clone, Debug)]
pub struct RadialStencils {
    n_interior: usize,
    h: f64,
    r: Vec<f64>,
    d1: Vec<Vec<RadialRow>>,
    lap: Vec<Vec<RadialRow>>,
}

impl RadialStencils {
    /// `n_interior` interior rings plus the boundary ring; `dim` is the ball
    /// dimension; degrees `0..=max_degree`.
    pub fn new(n_interior: usize, dim: usize, max_degree: usize) -> Self {
        assert!(n_interior >= 6, "need at least six interior rings");
        let h = 1.0 / (n_interior as f64 + 0.5);
        let mut r: Vec<f64> = (0..=n_interior).map(|i| (i as f64 + 0.5) * h).collect();
        r[n_interior] = 1.0;
        let mut d1 = Vec::with_capacity(max_degree + 1);
        let mut lap = Vec::with_capacity(max_degree + 1);
        for l in 0..=max_degree {
            let mut d1_l = Vec::with_capacity(n_interior + 1);
            let mut lap_l = Vec::with_capacity(n_interior + 1);
            for i in 0..=n_interior {
                let (a, b) = build_rows(i, l, n_interior, dim, h, &r);
                d1_l.push(a);
                lap_l.push(b);
            }
            d1.push(d1_l);
            lap.push(lap_l);
        }
        Self { n_interior, h, r, d1, lap }
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn max_degree(&self) -> usize {
        self.d1.len() - 1
    }

    pub fn d1(&self, l: usize, i: usize) -> &RadialRow {
        &self.d1[l][i]
    }

    pub fn laplacian(&self, l: usize, i: usize) -> &RadialRow {
        &self.lap[l][i]
    }

    /// Whether degree `l` carries information on ring `i`.
    pub fn keeps(&self, l: usize, i: usize) -> bool {
        l <= POLE_FORM_MAX_DEGREE || (l as f64) * (1.0 / self.r[i]).ln() <= POLAR_CUTOFF
    }
}

fn offsets(i: usize, n: usize) -> std::ops::RangeInclusive<i64> {
    if i == n {
        -5..=0
    } else if i == n - 1 {
        -4..=1
    } else {
        -2..=2
    }
}

fn build_rows(i: usize, l: usize, n: usize, dim: usize, h: f64, r: &[f64]) -> (RadialRow, RadialRow) {
    let ri = r[i];
    let positions: Vec<i64> = offsets(i, n).map(|o| i as i64 + o).collect();
    let xs: Vec<f64> = positions.iter().map(|&p| (p as f64 + 0.5) * h).collect();
    let c = fornberg(ri, &xs, 2);
    let lf = l as f64;
    let nf = dim as f64;
    let real = |p: i64| if p < 0 { (-p - 1) as usize } else { p as usize };
    let mut d1 = Vec::new();
    let mut lap = Vec::new();
    if l <= POLE_FORM_MAX_DEGREE {
        for (k, &p) in positions.iter().enumerate() {
            let j = real(p);
            let rho = (ri / r[j]).powi(l as i32);
            d1.push((j, c[1][k] * rho));
            lap.push((j, (c[2][k] + (2.0 * lf + nf - 1.0) / ri * c[1][k]) * rho));
        }
        d1.push((i, lf / ri));
    } else {
        let parity = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
        for (k, &p) in positions.iter().enumerate() {
            let j = real(p);
            let s = if p < 0 { parity } else { 1.0 };
            d1.push((j, s * c[1][k]));
            lap.push((j, s * (c[2][k] + (nf - 1.0) / ri * c[1][k])));
        }
        lap.push((i, -lf * (lf + nf - 2.0) / (ri * ri)));
    }
    (RadialRow::from_pairs(&d1), RadialRow::from_pairs(&lap))
}
