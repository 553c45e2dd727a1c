//! Geometry of the slice `t = u(x)`: unit normal, second fundamental form,
//! mean curvature by two routes, and the Gauss equation as a residual.
//!
//! The induced metric is `g = tau^{-2} gh` with
//! `gh_ij = delta_ij - (1 - tau)^2 u_i u_j`; curvature is computed for
//! `gh` and rescaled conformally, which keeps every quantity bounded up to
//! the boundary. Second derivatives of the embedding are taken by the chain
//! rule from the exact derivatives of the sausage map, so only `grad u` and
//! `Hess u` are differentiated numerically.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::ball::{minkowski_inner, AmbientVector};
use crate::error::{Error, Result};
use crate::field::angular::AngularKind;
use crate::field::norms::{decay_exponent, DecayFit};
use crate::field::ops::{divergence, gradient, hessian, lift, restrict};
use crate::field::{Grid, ScalarField, VectorField};

/// Orientation of `h`: with it, `trace_g h` equals the divergence-form mean
/// curvature.
pub const SIGMA: f64 = -1.0;

/// `max |h|` below this on the fit window counts as identically zero.
pub const H_FLOOR: f64 = 1e-7;

type Mat = [[f64; 3]; 3];

fn inverse(m: &Mat, d: usize) -> Mat {
    let mut out = [[0.0; 3]; 3];
    if d == 2 {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        out[0][0] = m[1][1] / det;
        out[1][1] = m[0][0] / det;
        out[0][1] = -m[0][1] / det;
        out[1][0] = -m[1][0] / det;
        return out;
    }
    let c = |i: usize, j: usize| {
        let (a, b) = ((i + 1) % 3, (i + 2) % 3);
        let (p, q) = ((j + 1) % 3, (j + 2) % 3);
        m[a][p] * m[b][q] - m[a][q] * m[b][p]
    };
    let det = m[0][0] * c(0, 0) + m[0][1] * c(0, 1) + m[0][2] * c(0, 2);
    for i in 0..3 {
        for j in 0..3 {
            out[j][i] = c(i, j) / det;
        }
    }
    out
}

fn determinant(m: &Mat, d: usize) -> f64 {
    if d == 2 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    } else {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Per-node input: position, `u` and its first two derivatives.
#[derive(Clone, Copy, Debug)]
struct Jet {
    d: usize,
    x: [f64; 3],
    tau: f64,
    t: f64,
    du: [f64; 3],
    ddu: Mat,
}

impl Jet {
    fn b(&self) -> f64 {
        (1.0 - self.tau) / self.tau
    }

    fn grad_sq(&self) -> f64 {
        self.du.iter().map(|v| v * v).sum()
    }

    fn q(&self) -> f64 {
        (1.0 - self.tau).powi(2) * self.grad_sq()
    }

    fn w(&self) -> f64 {
        1.0 / (1.0 - self.q()).sqrt()
    }

    fn x_i(&self, i: usize) -> AmbientVector {
        let (tau, x) = (self.tau, self.x);
        let mut v = [0.0; 5];
        for k in 0..self.d {
            v[k] = if i == k { 1.0 / tau } else { 0.0 } + x[k] * x[i] / (tau * tau);
        }
        let s = x[i] / (tau * tau);
        v[3] = s * self.t.cos();
        v[4] = s * self.t.sin();
        AmbientVector(v)
    }

    fn x_t(&self) -> AmbientVector {
        let b = self.b();
        AmbientVector([0.0, 0.0, 0.0, -b * self.t.sin(), b * self.t.cos()])
    }

    fn x_ij(&self, i: usize, j: usize) -> AmbientVector {
        let (tau, x) = (self.tau, self.x);
        let (t2, t3) = (tau * tau, tau * tau * tau);
        let dl = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut v = [0.0; 5];
        for k in 0..self.d {
            v[k] = (dl(i, k) * x[j] + dl(k, j) * x[i] + dl(i, j) * x[k]) / t2 + 2.0 * x[i] * x[j] * x[k] / t3;
        }
        let s = dl(i, j) / t2 + 2.0 * x[i] * x[j] / t3;
        v[3] = s * self.t.cos();
        v[4] = s * self.t.sin();
        AmbientVector(v)
    }

    fn x_it(&self, i: usize) -> AmbientVector {
        let s = self.x[i] / (self.tau * self.tau);
        AmbientVector([0.0, 0.0, 0.0, -s * self.t.sin(), s * self.t.cos()])
    }

    fn x_tt(&self) -> AmbientVector {
        let b = self.b();
        AmbientVector([0.0, 0.0, 0.0, -b * self.t.cos(), -b * self.t.sin()])
    }

    fn tangent(&self, i: usize) -> AmbientVector {
        self.x_i(i).add(&self.x_t().scaled(self.du[i]))
    }

    /// Future-directed unit normal in the ambient space.
    fn normal(&self) -> AmbientVector {
        let (b, w) = (self.b(), self.w());
        let mut n = self.x_t().scaled(1.0 / b);
        for i in 0..self.d {
            n = n.add(&self.x_i(i).scaled(b * self.tau * self.tau * self.du[i]));
        }
        n.scaled(w)
    }

    /// `gh_ij = tau^2 g_ij`.
    fn metric_hat(&self) -> Mat {
        let s = (1.0 - self.tau).powi(2);
        let mut g = [[0.0; 3]; 3];
        for i in 0..self.d {
            for j in 0..self.d {
                g[i][j] = if i == j { 1.0 } else { 0.0 } - s * self.du[i] * self.du[j];
            }
        }
        g
    }

    /// `tau^2 h_ij`.
    fn h_tilde(&self) -> Mat {
        let n = self.normal();
        let (xt, xtt) = (self.x_t(), self.x_tt());
        let t2 = self.tau * self.tau;
        let mut h = [[0.0; 3]; 3];
        for i in 0..self.d {
            for j in i..self.d {
                let s = self
                    .x_ij(i, j)
                    .add(&self.x_it(i).scaled(self.du[j]))
                    .add(&self.x_it(j).scaled(self.du[i]))
                    .add(&xtt.scaled(self.du[i] * self.du[j]))
                    .add(&xt.scaled(self.ddu[i][j]));
                h[i][j] = SIGMA * t2 * minkowski_inner(&s, &n);
                h[j][i] = h[i][j];
            }
        }
        h
    }

    /// `d_k gh_ij`.
    fn metric_hat_derivative(&self) -> [Mat; 3] {
        let s = (1.0 - self.tau).powi(2);
        let mut out = [[[0.0; 3]; 3]; 3];
        for (k, dk) in out.iter_mut().enumerate().take(self.d) {
            for i in 0..self.d {
                for j in 0..self.d {
                    dk[i][j] = -2.0 * (1.0 - self.tau) * self.x[k] * self.du[i] * self.du[j]
                        - s * (self.ddu[i][k] * self.du[j] + self.du[i] * self.ddu[j][k]);
                }
            }
        }
        out
    }

    /// Christoffel symbols of `gh`, `gamma[a][i][j]`.
    fn christoffel(&self) -> [Mat; 3] {
        let d = self.d;
        let gi = inverse(&self.metric_hat(), d);
        let dg = self.metric_hat_derivative();
        let mut out = [[[0.0; 3]; 3]; 3];
        for a in 0..d {
            for i in 0..d {
                for j in 0..d {
                    out[a][i][j] = (0..d).map(|c| 0.5 * gi[a][c] * (dg[i][c][j] + dg[j][c][i] - dg[c][i][j])).sum();
                }
            }
        }
        out
    }
}

fn jets(u: &ScalarField) -> Vec<Jet> {
    let grid = u.grid();
    let d = grid.dim();
    let g = gradient(u);
    let h = hessian(u);
    grid.nodes()
        .enumerate()
        .map(|(k, n)| {
            let mut du = [0.0; 3];
            let mut ddu = [[0.0; 3]; 3];
            for i in 0..d {
                du[i] = g.components[i].values()[k];
                for j in 0..d {
                    ddu[i][j] = h[i * d + j].values()[k];
                }
            }
            Jet { d, x: n.x, tau: n.tau, t: u.values()[k], du, ddu }
        })
        .collect()
}

fn check_spacelike(u: &ScalarField) -> Result<()> {
    let q = crate::slice::residual::spacelike_q(u, crate::slice::Form::Maximal);
    let max_q = crate::slice::residual::max_q(&q);
    if max_q >= 1.0 {
        return Err(Error::NonSpacelikeField { max_q, margin: 0.0 });
    }
    Ok(())
}

/// Full-layout grid on which tensor components can be differentiated.
fn working(u: &ScalarField) -> ScalarField {
    if u.grid().kind() == AngularKind::Meridian {
        lift(u)
    } else {
        u.clone()
    }
}

fn back(f: ScalarField, target: &Arc<Grid>) -> ScalarField {
    if Arc::ptr_eq(f.grid(), target) {
        f
    } else {
        restrict(&f, target)
    }
}

fn field_from(grid: &Arc<Grid>, rings: usize, f: impl Fn(usize) -> f64) -> ScalarField {
    let na = grid.n_angular();
    let values = (0..grid.n_nodes()).map(|k| if k / na < rings { f(k) } else { 0.0 }).collect();
    ScalarField::new(grid.clone(), values).expect("finite geometry field")
}

/// Unit normal `N = W (coth(rho) grad_H u + tanh(rho) d_t)` in the
/// coordinate basis `(d_x, d_t)`.
#[derive(Clone, Debug)]
pub struct UnitNormal {
    pub spatial: VectorField,
    pub time: ScalarField,
}

impl UnitNormal {
    /// `<N, N>` in the anti-de Sitter metric at interior nodes.
    pub fn norm_sq(&self) -> Vec<f64> {
        let grid = self.time.grid();
        (0..grid.n_interior_nodes())
            .map(|k| {
                let tau = grid.tau(k / grid.n_angular());
                let coth = (1.0 - tau) / tau;
                let s: f64 = self.spatial.components.iter().map(|c| c.values()[k].powi(2)).sum();
                -(coth * self.time.values()[k]).powi(2) + s / (tau * tau)
            })
            .collect()
    }
}

pub fn unit_normal(u: &ScalarField) -> Result<UnitNormal> {
    check_spacelike(u)?;
    let grid = u.grid();
    let g = gradient(u);
    let na = grid.n_angular();
    let w: Vec<f64> = (0..grid.n_nodes())
        .map(|k| {
            let s = 1.0 - grid.tau(k / na);
            let q = s * s * g.components.iter().map(|c| c.values()[k].powi(2)).sum::<f64>();
            1.0 / (1.0 - q).sqrt()
        })
        .collect();
    // coth(rho) tau^2 = tau (1 - tau), tanh(rho) = tau / (1 - tau)
    let spatial = VectorField {
        components: g
            .components
            .iter()
            .map(|c| {
                let v = (0..grid.n_nodes())
                    .map(|k| {
                        let tau = grid.tau(k / na);
                        w[k] * tau * (1.0 - tau) * c.values()[k]
                    })
                    .collect();
                ScalarField::new(grid.clone(), v).expect("finite")
            })
            .collect(),
    };
    let time = field_from(grid, grid.n_r() + 1, |k| {
        let tau = grid.tau(k / na);
        w[k] * tau / (1.0 - tau)
    });
    Ok(UnitNormal { spatial, time })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureMethod {
    Divergence,
    Embedding,
}

/// `tau (1 - tau) div_0(W grad u) + (n (1 - tau) + 2 tau) W x.grad u`, the
/// hyperbolic divergence form written in ball coordinates.
fn mean_curvature_div(u: &ScalarField) -> Result<ScalarField> {
    let grid = u.grid();
    let d = grid.dim() as f64;
    let g = gradient(u);
    let na = grid.n_angular();
    let w: Vec<f64> = (0..grid.n_nodes())
        .map(|k| {
            let s = 1.0 - grid.tau(k / na);
            1.0 / (1.0 - s * s * g.components.iter().map(|c| c.values()[k].powi(2)).sum::<f64>()).sqrt()
        })
        .collect();
    let wg = VectorField {
        components: g
            .components
            .iter()
            .map(|c| ScalarField::new(grid.clone(), c.values().iter().zip(&w).map(|(a, b)| a * b).collect()).expect("finite"))
            .collect(),
    };
    let div = divergence(&wg)?;
    Ok(field_from(grid, grid.n_r(), |k| {
        let n = grid.node_at(k);
        let xg: f64 = (0..grid.dim()).map(|i| n.x[i] * g.components[i].values()[k]).sum();
        n.tau * (1.0 - n.tau) * div.values()[k] + (d * (1.0 - n.tau) + 2.0 * n.tau) * w[k] * xg
    }))
}

pub fn mean_curvature(u: &ScalarField, method: CurvatureMethod) -> Result<ScalarField> {
    check_spacelike(u)?;
    match method {
        CurvatureMethod::Divergence => mean_curvature_div(u),
        CurvatureMethod::Embedding => Ok(second_fundamental_form(u)?.mean_curvature),
    }
}

/// Second fundamental form, induced metric and derived scalars on the
/// interior rings (the boundary ring is zero-filled).
#[derive(Clone, Debug)]
pub struct SecondFundamentalForm {
    /// `h_ij`, row-major `n x n`.
    pub h: Vec<ScalarField>,
    /// `g_ij`, row-major `n x n`.
    pub metric: Vec<ScalarField>,
    pub metric_positive: bool,
    /// `trace_g h`.
    pub mean_curvature: ScalarField,
    /// `g^ik g^jl h_ij h_kl`.
    pub h2: ScalarField,
    /// Largest `|<N, X>|`, `|<N, X_i + u_i X_t>|` and `|<N, N> + 1|`,
    /// each scaled by the sizes of the vectors involved.
    pub orthogonality: f64,
}

pub fn second_fundamental_form(u: &ScalarField) -> Result<SecondFundamentalForm> {
    check_spacelike(u)?;
    let target = u.grid().clone();
    let work = working(u);
    let grid = work.grid().clone();
    let d = grid.dim();
    let rings = grid.n_r();
    let na = grid.n_angular();
    let js = jets(&work);
    let mut h = vec![vec![0.0; grid.n_nodes()]; d * d];
    let mut metric = vec![vec![0.0; grid.n_nodes()]; d * d];
    let mut hmean = vec![0.0; grid.n_nodes()];
    let mut h2 = vec![0.0; grid.n_nodes()];
    let mut positive = true;
    let mut orth = 0.0f64;
    for (k, j) in js.iter().enumerate().take(rings * na) {
        let gh = metric_hat_checked(j, &mut positive);
        let gi = inverse(&gh, d);
        let ht = j.h_tilde();
        let t2 = j.tau * j.tau;
        let mut tr = 0.0;
        let mut sq = 0.0;
        for a in 0..d {
            for b in 0..d {
                h[a * d + b][k] = ht[a][b] / t2;
                metric[a * d + b][k] = gh[a][b] / t2;
                tr += gi[a][b] * ht[a][b];
                for c in 0..d {
                    for e in 0..d {
                        sq += gi[a][c] * gi[b][e] * ht[a][b] * ht[c][e];
                    }
                }
            }
        }
        hmean[k] = tr;
        h2[k] = sq;
        let n = j.normal();
        let xv = crate::ball::ambient_embed(&grid.ball_point(k / na, k % na), j.t)?;
        let scale = 1.0 / t2;
        orth = orth.max(minkowski_inner(&n, &xv).abs() / scale).max((minkowski_inner(&n, &n) + 1.0).abs());
        for i in 0..d {
            orth = orth.max(minkowski_inner(&n, &j.tangent(i)).abs() / scale);
        }
    }
    let wrap = |v: Vec<f64>| back(ScalarField::new(grid.clone(), v).expect("finite geometry field"), &target);
    Ok(SecondFundamentalForm {
        h: h.into_iter().map(wrap).collect(),
        metric: metric.into_iter().map(wrap).collect(),
        metric_positive: positive,
        mean_curvature: wrap(hmean),
        h2: wrap(h2),
        orthogonality: orth,
    })
}

fn metric_hat_checked(j: &Jet, positive: &mut bool) -> Mat {
    let g = j.metric_hat();
    let d = j.d;
    let ok = g[0][0] > 0.0 && determinant(&g, d) > 0.0 && (d == 2 || g[0][0] * g[1][1] - g[0][1] * g[1][0] > 0.0);
    *positive &= ok;
    g
}

/// Norm in the induced metric of `R - K + h h - h h`, where `R` is the
/// curvature of the induced metric and `K = -(g g - g g)` that of the
/// ambient space.
pub fn gauss_check(u: &ScalarField) -> Result<ScalarField> {
    check_spacelike(u)?;
    let target = u.grid().clone();
    let work = working(u);
    let grid = work.grid().clone();
    let d = grid.dim();
    let js = jets(&work);
    let gam: Vec<[Mat; 3]> = js.iter().map(|j| j.christoffel()).collect();
    // d_k Gamma^a_ij by differentiating each symbol as a field.
    let mut dgam = vec![[[[[0.0; 3]; 3]; 3]; 3]; grid.n_nodes()];
    for a in 0..d {
        for i in 0..d {
            for j in i..d {
                let f = ScalarField::new(grid.clone(), gam.iter().map(|g| g[a][i][j]).collect()).expect("finite");
                let gr = gradient(&f);
                for (k, dg) in dgam.iter_mut().enumerate() {
                    for c in 0..d {
                        let v = gr.components[c].values()[k];
                        dg[c][a][i][j] = v;
                        dg[c][a][j][i] = v;
                    }
                }
            }
        }
    }
    let res = field_from(&grid, grid.n_r(), |k| {
        let jt = &js[k];
        let gh = jt.metric_hat();
        let gi = inverse(&gh, d);
        let g = &gam[k];
        let dg = &dgam[k];
        let ht = jt.h_tilde();
        let tau = jt.tau;
        let xx: f64 = (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).map(|(a, b)| gi[a][b] * jt.x[a] * jt.x[b]).sum();
        let mut at = [[0.0; 3]; 3];
        for i in 0..d {
            for j in 0..d {
                let gx: f64 = (0..d).map(|c| g[c][i][j] * jt.x[c]).sum();
                at[i][j] = if i == j { tau } else { 0.0 } - tau * gx + 0.5 * xx * gh[i][j];
            }
        }
        let mut rt = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..d {
            for j in 0..d {
                for kk in 0..d {
                    for l in 0..d {
                        let mut r = 0.0;
                        for a in 0..d {
                            let mut s = dg[i][a][j][l] - dg[j][a][i][l];
                            for e in 0..d {
                                s += g[a][i][e] * g[e][j][l] - g[a][j][e] * g[e][i][l];
                            }
                            r += gh[kk][a] * s;
                        }
                        let kn = at[i][kk] * gh[j][l] + at[j][l] * gh[i][kk] - at[i][l] * gh[j][kk] - at[j][kk] * gh[i][l];
                        rt[i][j][kk][l] = tau * tau * r - kn
                            + (gh[i][kk] * gh[j][l] - gh[i][l] * gh[j][kk])
                            + (ht[i][kk] * ht[j][l] - ht[i][l] * ht[j][kk]);
                    }
                }
            }
        }
        // |R~|_gh: raise all four indices with gh^{-1}.
        let mut up = rt;
        for _pass in 0..4 {
            let src = up;
            for i in 0..d {
                for j in 0..d {
                    for kk in 0..d {
                        for l in 0..d {
                            up[i][j][kk][l] = (0..d).map(|a| gi[l][a] * src[a][i][j][kk]).sum();
                        }
                    }
                }
            }
        }
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                for kk in 0..d {
                    for l in 0..d {
                        s += rt[i][j][kk][l] * up[i][j][kk][l];
                    }
                }
            }
        }
        s.max(0.0).sqrt()
    });
    Ok(back(res, &target))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HDecay {
    IdenticallyZero {
        max_h: f64,
    },
    Exponent(DecayFit),
    /// Fewer than two rings inside the fit window.
    Unresolved,
}

/// Decay exponent of `|h|` toward the boundary, or the sentinel when `|h|`
/// is at the noise floor on the fit window.
pub fn h_decay(h2: &ScalarField) -> Result<HDecay> {
    let grid = h2.grid();
    let abs_h = h2.map(|v| v.max(0.0).sqrt());
    let (lo, hi) = crate::field::norms::default_window(grid);
    let max_h = (0..grid.n_r()).filter(|&i| (lo..=hi).contains(&grid.tau(i))).flat_map(|i| abs_h.ring(i).to_vec()).fold(0.0, f64::max);
    let rings = (0..grid.n_r()).filter(|&i| (lo..=hi).contains(&grid.tau(i))).count();
    if rings < 2 {
        return Ok(HDecay::Unresolved);
    }
    if max_h < H_FLOOR {
        return Ok(HDecay::IdenticallyZero { max_h });
    }
    Ok(HDecay::Exponent(decay_exponent(&abs_h, None)?))
}

/// Everything the diagnostics report for one slice.
#[derive(Clone, Debug)]
pub struct GeometryReport {
    pub h_div: ScalarField,
    pub sff: SecondFundamentalForm,
    pub gauss: ScalarField,
    pub h_decay: HDecay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub max_h_div: f64,
    pub max_h_emb: f64,
    pub h_consistency: f64,
    pub max_h2: f64,
    pub max_gauss: f64,
    pub metric_positive: bool,
    pub orthogonality: f64,
    pub h_decay: HDecay,
}

impl GeometryReport {
    pub fn compute(u: &ScalarField) -> Result<Self> {
        let h_div = mean_curvature(u, CurvatureMethod::Divergence)?;
        let sff = second_fundamental_form(u)?;
        let gauss = gauss_check(u)?;
        let h_decay = h_decay(&sff.h2)?;
        Ok(Self { h_div, sff, gauss, h_decay })
    }

    pub fn summary(&self) -> GeometrySummary {
        let diff = self.h_div.axpy(-1.0, &self.sff.mean_curvature).expect("same grid");
        GeometrySummary {
            max_h_div: self.h_div.sup_norm(),
            max_h_emb: self.sff.mean_curvature.sup_norm(),
            h_consistency: diff.sup_norm(),
            max_h2: self.sff.h2.sup_norm(),
            max_gauss: self.gauss.sup_norm(),
            metric_positive: self.sff.metric_positive,
            orthogonality: self.sff.orthogonality,
            h_decay: self.h_decay.clone(),
        }
    }
}
