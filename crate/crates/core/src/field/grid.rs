use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::angular::{AngularBasis, AngularKind};
use super::radial::RadialStencils;
use crate::ball::{tau_of_r, BallPoint};
use crate::error::{Error, Result};

pub const LIFT_AZIMUTHS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    Full,
    Axisymmetric,
}

/// Size description of a polar grid. `n_r` counts interior rings; the
/// boundary ring `r = 1` comes on top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub mode: GridMode,
    pub n_r: usize,
    pub n_theta: usize,
    /// Azimuth count; only meaningful for `dim = 3`, `mode = full`.
    pub n_phi: usize,
}

impl GridSpec {
    pub fn axisymmetric(n_r: usize, n_theta: usize) -> Self {
        Self { dim: 3, mode: GridMode::Axisymmetric, n_r, n_theta, n_phi: 1 }
    }

    pub fn disk(n_r: usize, n_theta: usize) -> Self {
        Self { dim: 2, mode: GridMode::Full, n_r, n_theta, n_phi: 1 }
    }

    pub fn ball(n_r: usize, n_theta: usize, n_phi: usize) -> Self {
        Self { dim: 3, mode: GridMode::Full, n_r, n_theta, n_phi }
    }

    /// Same grid with the radial and angular resolutions doubled.
    pub fn refined(&self) -> Self {
        let n_phi = if self.dim == 3 && self.mode == GridMode::Full { 2 * self.n_phi } else { self.n_phi };
        Self { n_r: 2 * self.n_r, n_theta: 2 * self.n_theta, n_phi, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidGrid(m.to_string()));
        if !(2..=3).contains(&self.dim) {
            return bad("dimension must be 2 or 3");
        }
        if self.n_r < 8 {
            return bad("at least 8 interior rings are required");
        }
        match (self.dim, self.mode) {
            (2, GridMode::Axisymmetric) => bad("axisymmetric mode is only defined for n = 3"),
            (2, GridMode::Full) if !(self.n_theta >= 4 && self.n_theta.is_power_of_two()) => {
                bad("circle node count must be a power of two >= 4")
            }
            (3, _) if self.n_theta < 4 => bad("at least 4 colatitudes are required"),
            (3, GridMode::Full) if !(self.n_phi >= 4 && self.n_phi.is_multiple_of(4)) => {
                bad("azimuth count must be a multiple of four >= 4")
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.dim, self.mode) {
            (3, GridMode::Full) => write!(f, "{}x{}x{}", self.n_r, self.n_theta, self.n_phi),
            _ => write!(f, "{}x{}", self.n_r, self.n_theta),
        }
    }
}

/// A polar grid over the closed unit ball together with its transform and
/// stencil tables.
#[derive(Debug)]
pub struct Grid {
    spec: GridSpec,
    angular: AngularBasis,
    radial: RadialStencils,
    tau: Vec<f64>,
    lifted: OnceLock<Arc<Grid>>,
}

/// Location of one node.
#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub ring: usize,
    pub angle: usize,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub tau: f64,
    pub x: [f64; 3],
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Arc<Self>> {
        spec.validate()?;
        let angular = match (spec.dim, spec.mode) {
            (2, _) => AngularBasis::circle(spec.n_theta),
            (_, GridMode::Axisymmetric) => AngularBasis::meridian(spec.n_theta),
            _ => AngularBasis::sphere(spec.n_theta, spec.n_phi),
        };
        let radial = RadialStencils::new(spec.n_r, spec.dim, angular.max_degree());
        let tau = radial.radii().iter().map(|&r| tau_of_r(r)).collect();
        Ok(Arc::new(Self { spec, angular, radial, tau, lifted: OnceLock::new() }))
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn kind(&self) -> AngularKind {
        self.angular.kind()
    }

    pub fn angular(&self) -> &AngularBasis {
        &self.angular
    }

    pub fn radial(&self) -> &RadialStencils {
        &self.radial
    }

    /// Number of interior rings.
    pub fn n_r(&self) -> usize {
        self.spec.n_r
    }

    /// Nodes per ring.
    pub fn n_angular(&self) -> usize {
        self.angular.n_nodes()
    }

    pub fn n_nodes(&self) -> usize {
        (self.spec.n_r + 1) * self.n_angular()
    }

    pub fn n_interior_nodes(&self) -> usize {
        self.spec.n_r * self.n_angular()
    }

    pub fn dr(&self) -> f64 {
        self.radial.h()
    }

    pub fn r(&self, ring: usize) -> f64 {
        self.radial.radii()[ring]
    }

    pub fn radii(&self) -> &[f64] {
        self.radial.radii()
    }

    pub fn tau(&self, ring: usize) -> f64 {
        self.tau[ring]
    }

    pub fn node(&self, ring: usize, angle: usize) -> Node {
        let r = self.r(ring);
        let d = self.angular.direction(angle);
        Node {
            ring,
            angle,
            r,
            theta: self.angular.theta(angle),
            phi: self.angular.phi(angle),
            tau: self.tau[ring],
            x: [r * d[0], r * d[1], r * d[2]],
        }
    }

    pub fn node_at(&self, flat: usize) -> Node {
        let na = self.n_angular();
        self.node(flat / na, flat % na)
    }

    pub fn ball_point(&self, ring: usize, angle: usize) -> BallPoint {
        let n = self.node(ring, angle);
        BallPoint::new(&n.x[..self.dim()]).expect("grid nodes lie in the closed ball")
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..=self.spec.n_r).flat_map(move |i| (0..self.n_angular()).map(move |a| self.node(i, a)))
    }

    /// Full-sphere grid with the same rings and colatitudes that carries
    /// non-axisymmetric intermediates (Cartesian components) of axisymmetric
    /// fields. Twelve azimuths resolve every azimuthal order up to five.
    pub fn lifted(&self) -> Arc<Grid> {
        self.lifted
            .get_or_init(|| Grid::new(GridSpec::ball(self.spec.n_r, self.spec.n_theta, LIFT_AZIMUTHS)).expect("lifted grid is valid"))
            .clone()
    }

    /// Whether harmonic `k` survives the polar filter on ring `i`.
    pub fn keeps(&self, k: usize, ring: usize) -> bool {
        self.radial.keeps(self.angular.harmonics()[k].degree, ring)
    }
}
