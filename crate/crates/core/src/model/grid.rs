use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// Uniform grid on `Ω = [0, L]` with `N` cells and `N + 1` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialGrid {
    length: f64,
    cells: usize,
}

impl SpatialGrid {
    pub fn new(length: f64, cells: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid("length", length, "must be positive"));
        }
        if cells < 2 {
            return Err(Error::invalid("cells", cells as f64, "need at least 2 cells"));
        }
        Ok(Self { length, cells })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn node_count(&self) -> usize {
        self.cells + 1
    }

    pub fn dx(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.cells {
            self.length
        } else {
            i as f64 * self.dx()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.cells).map(move |i| self.node(i))
    }
}

/// Nodal values of `u(·, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field(values)
    }

    pub fn constant(grid: &SpatialGrid, value: f64) -> Self {
        Field(vec![value; grid.node_count()])
    }

    pub fn from_fn(grid: &SpatialGrid, f: impl Fn(f64) -> f64) -> Self {
        Field(grid.nodes().map(f).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoidal average over `[0, L]`; conserved exactly by Neumann diffusion.
    pub fn mean(&self) -> f64 {
        let n = self.0.len();
        if n == 1 {
            return self.0[0];
        }
        let inner: f64 = self.0[1..n - 1].iter().sum();
        (inner + 0.5 * (self.0[0] + self.0[n - 1])) / (n - 1) as f64
    }

    /// Index and value of the first non-finite entry.
    pub fn first_non_finite(&self) -> Option<(usize, f64)> {
        self.0.iter().position(|v| !v.is_finite()).map(|i| (i, self.0[i]))
    }

    /// `‖u - c‖_∞`.
    pub fn distance_to(&self, c: f64) -> f64 {
        self.0.iter().map(|v| (v - c).abs()).fold(0.0, f64::max)
    }
}

impl Deref for Field {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_nodes() {
        let g = SpatialGrid::new(2.0, 4).unwrap();
        let nodes: Vec<f64> = g.nodes().collect();
        assert_eq!(nodes, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(SpatialGrid::new(1.0, 1).is_err());
        assert!(SpatialGrid::new(0.0, 4).is_err());
    }

    #[test]
    fn field_stats() {
        let f = Field::new(vec![1.0, 2.0, 4.0]);
        assert_eq!(f.min(), 1.0);
        assert_eq!(f.max(), 4.0);
        assert!((f.mean() - 2.25).abs() < 1e-15);
        assert_eq!(f.distance_to(2.0), 2.0);
        assert!(Field::new(vec![1.0, f64::NAN]).first_non_finite().is_some());
    }
}
