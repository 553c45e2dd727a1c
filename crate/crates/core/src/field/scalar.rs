use std::sync::Arc;

use super::grid::{Grid, Node};
use crate::error::{Error, Result};

/// Node values of a function on the closed ball, stored ring by ring with
/// the boundary ring last.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::GridMismatch);
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite field value {v}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { values: vec![0.0; grid.n_nodes()], grid: grid.clone() }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        Self { values: vec![c; grid.n_nodes()], grid: grid.clone() }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&Node) -> f64) -> Self {
        let values = grid.nodes().map(|n| f(&n)).collect();
        Self { values, grid: grid.clone() }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn ring(&self, i: usize) -> &[f64] {
        let na = self.grid.n_angular();
        &self.values[i * na..(i + 1) * na]
    }

    pub fn ring_mut(&mut self, i: usize) -> &mut [f64] {
        let na = self.grid.n_angular();
        &mut self.values[i * na..(i + 1) * na]
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[..self.grid.n_interior_nodes()]
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        let n = self.grid.n_interior_nodes();
        &mut self.values[..n]
    }

    pub fn boundary(&self) -> &[f64] {
        self.ring(self.grid.n_r())
    }

    pub fn boundary_mut(&mut self) -> &mut [f64] {
        let n = self.grid.n_r();
        self.ring_mut(n)
    }

    pub fn with_boundary(mut self, values: &[f64]) -> Result<Self> {
        if values.len() != self.grid.n_angular() {
            return Err(Error::GridMismatch);
        }
        self.boundary_mut().copy_from_slice(values);
        Ok(self)
    }

    pub fn same_grid(&self, other: &ScalarField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.spec() == other.grid.spec() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect(), grid: self.grid.clone() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &ScalarField) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect();
        Ok(Self { values, grid: self.grid.clone() })
    }

    pub fn sup_norm(&self) -> f64 {
        sup(&self.values)
    }

    pub fn interior_sup_norm(&self) -> f64 {
        sup(self.interior())
    }

    /// Largest absolute value on each ring.
    pub fn ring_maxima(&self) -> Vec<f64> {
        (0..=self.grid.n_r()).map(|i| sup(self.ring(i))).collect()
    }
}

pub(crate) fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Cartesian components of a vector field, each a [`ScalarField`]. Fields on
/// axisymmetric grids carry three components evaluated in the plane `phi = 0`.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub components: Vec<ScalarField>,
}

impl VectorField {
    pub fn grid(&self) -> &Arc<Grid> {
        self.components[0].grid()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Pointwise Euclidean length.
    pub fn magnitude(&self) -> ScalarField {
        let n = self.components[0].values().len();
        let values = (0..n).map(|k| self.components.iter().map(|c| c.values()[k].powi(2)).sum::<f64>().sqrt()).collect();
        ScalarField { grid: self.grid().clone(), values }
    }
}
