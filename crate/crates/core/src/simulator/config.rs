use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// 1 for backward Euler diffusion, 0.5 for Crank–Nicolson.
    pub theta: f64,
    pub diffusivity: f64,
    /// Steps between full-field snapshots.
    pub output_stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 100.0,
            theta: 1.0,
            diffusivity: 1.0,
            output_stride: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", self.dt, "must be positive"));
        }
        if !(self.t_end.is_finite() && self.t_end > self.dt) {
            return Err(Error::invalid("t_end", self.t_end, "must exceed dt"));
        }
        if self.theta != 1.0 && self.theta != 0.5 {
            return Err(Error::invalid("theta", self.theta, "must be 1 or 0.5"));
        }
        if !(self.diffusivity.is_finite() && self.diffusivity > 0.0) {
            return Err(Error::invalid("diffusivity", self.diffusivity, "must be positive"));
        }
        if self.output_stride == 0 {
            return Err(Error::invalid("output_stride", 0.0, "must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps to reach `t_end`, rounding to the nearest step.
    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }
}
