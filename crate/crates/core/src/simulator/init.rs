use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Field, SpatialGrid};
use crate::table::{lerp_table, parse_numeric_table};

/// Initial history `φ(x, t)` on `[0, L] × [-τ, 0]`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialHistory {
    Constant(f64),
    /// `c0 + c1 cos(πx/L)`, constant in time.
    Cosine {
        c0: f64,
        c1: f64,
    },
    /// `c0 + c1 cos(πx/L) (1 + t/τ)`: the perturbation grows from 0 at `-τ`.
    CosineRamp {
        c0: f64,
        c1: f64,
    },
    Table(HistoryTable),
}

impl InitialHistory {
    pub fn kind_name(&self) -> &'static str {
        match self {
            InitialHistory::Constant(_) => "constant",
            InitialHistory::Cosine { .. } => "cosine",
            InitialHistory::CosineRamp { .. } => "cosine_ramp",
            InitialHistory::Table(_) => "table",
        }
    }

    pub fn eval(&self, x: f64, t: f64, length: f64, tau: f64) -> f64 {
        match self {
            InitialHistory::Constant(c) => *c,
            InitialHistory::Cosine { c0, c1 } => c0 + c1 * (PI * x / length).cos(),
            InitialHistory::CosineRamp { c0, c1 } => {
                let ramp = if tau > 0.0 { 1.0 + t / tau } else { 1.0 };
                c0 + c1 * (PI * x / length).cos() * ramp
            }
            InitialHistory::Table(t_) => t_.eval(x, t),
        }
    }

    /// Fields at `t = -k·dt` for `k = 0..lags`, indexed by `k`. Rejects
    /// negative or non-finite samples.
    pub fn sample(&self, grid: &SpatialGrid, lags: usize, dt: f64) -> Result<Vec<Field>> {
        let tau = (lags.saturating_sub(1)) as f64 * dt;
        let mut out = Vec::with_capacity(lags);
        for k in 0..lags {
            let t = -(k as f64) * dt;
            let field = Field::from_fn(grid, |x| self.eval(x, t, grid.length(), tau));
            if let Some((i, v)) = field.first_non_finite() {
                return Err(Error::invalid("init", v, format!("non-finite at node {i}, t = {t}")));
            }
            let min = field.min();
            if min < 0.0 {
                return Err(Error::invalid(
                    "init",
                    min,
                    format!("negative initial history at t = {t}"),
                ));
            }
            out.push(field);
        }
        Ok(out)
    }

    /// `min_x φ(x, t)` (or max) on the lag grid, indexed by lag.
    pub fn spatial_extreme(&self, grid: &SpatialGrid, lags: usize, dt: f64, max: bool) -> Result<Vec<f64>> {
        Ok(self
            .sample(grid, lags, dt)?
            .iter()
            .map(|f| if max { f.max() } else { f.min() })
            .collect())
    }
}

/// Tabulated history: rows `x u` (time independent) or `t x u`.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryTable {
    /// `(t, xs, us)` profiles sorted by time.
    profiles: Vec<(f64, Vec<f64>, Vec<f64>)>,
}

impl HistoryTable {
    pub fn parse(text: &str) -> Result<Self> {
        let rows = parse_numeric_table(text, None)?;
        let width = rows[0].len();
        if width != 2 && width != 3 {
            return Err(Error::Table {
                line: 1,
                message: format!("expected 2 (x u) or 3 (t x u) columns, found {width}"),
            });
        }
        let mut profiles: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
        for r in &rows {
            let (t, x, u) = if width == 2 {
                (0.0, r[0], r[1])
            } else {
                (r[0], r[1], r[2])
            };
            match profiles.iter_mut().find(|p| p.0 == t) {
                Some(p) => {
                    p.1.push(x);
                    p.2.push(u);
                }
                None => profiles.push((t, vec![x], vec![u])),
            }
        }
        for (t, xs, us) in &mut profiles {
            let mut idx: Vec<usize> = (0..xs.len()).collect();
            idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
            let sx: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
            if sx.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Table {
                    line: 1,
                    message: format!("repeated x in the profile at t = {t}"),
                });
            }
            let su: Vec<f64> = idx.iter().map(|&i| us[i]).collect();
            *xs = sx;
            *us = su;
        }
        profiles.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { profiles })
    }

    /// Linear in `x` within a profile and in `t` between profiles; flat
    /// outside the tabulated ranges.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let at = |p: &(f64, Vec<f64>, Vec<f64>)| lerp_table(&p.1, &p.2, x);
        let n = self.profiles.len();
        if t <= self.profiles[0].0 {
            return at(&self.profiles[0]);
        }
        if t >= self.profiles[n - 1].0 {
            return at(&self.profiles[n - 1]);
        }
        let j = self.profiles.partition_point(|p| p.0 <= t);
        let (a, b) = (&self.profiles[j - 1], &self.profiles[j]);
        let w = (t - a.0) / (b.0 - a.0);
        at(a) * (1.0 - w) + at(b) * w
    }
}
