use super::config::SolverConfig;
use super::init::InitialHistory;
use super::tridiag::Tridiagonal;
use crate::error::{Error, Result};
use crate::model::{DelayKernel, Field, HistoryState, KernelWeights, ReactionPair, SpatialGrid};

/// Nodal values below this abort the run.
pub const POSITIVITY_FLOOR: f64 = -1e-10;
/// Largest admissible `dt · (Lip f + Lip g)`.
pub const STEP_LIPSCHITZ_LIMIT: f64 = 0.5;
/// Samples used to estimate Lipschitz constants.
const LIPSCHITZ_SAMPLES: usize = 1000;

/// θ-implicit diffusion, explicit reaction and delay, on a Neumann grid.
#[derive(Clone, Debug)]
pub struct Simulator<'a> {
    rp: &'a ReactionPair,
    weights: KernelWeights,
    grid: SpatialGrid,
    config: SolverConfig,
    matrix: Tridiagonal,
    /// `D dt / dx²`.
    r: f64,
    u: HistoryState<Field>,
    /// `g(u)` on the same lag ring as `u`.
    gu: HistoryState<Vec<f64>>,
    rhs: Vec<f64>,
    delay: Vec<f64>,
}

impl<'a> Simulator<'a> {
    pub fn new(
        rp: &'a ReactionPair,
        kernel: &DelayKernel,
        grid: SpatialGrid,
        config: SolverConfig,
        init: &InitialHistory,
    ) -> Result<Self> {
        config.validate()?;
        let weights = kernel.discretize(config.dt)?;
        let fields = init.sample(&grid, weights.len(), config.dt)?;
        Self::from_fields(rp, weights, grid, config, fields)
    }

    /// `by_lag[k]` is the field at `t = -k·dt`; one entry per kernel weight.
    pub fn from_fields(
        rp: &'a ReactionPair,
        weights: KernelWeights,
        grid: SpatialGrid,
        config: SolverConfig,
        by_lag: Vec<Field>,
    ) -> Result<Self> {
        config.validate()?;
        if (weights.dt() - config.dt).abs() > 1e-12 * config.dt {
            return Err(Error::invalid(
                "dt",
                config.dt,
                "differs from the kernel quadrature step",
            ));
        }
        if by_lag.len() != weights.len() {
            return Err(Error::Structural(format!(
                "history has {} fields, the kernel needs {}",
                by_lag.len(),
                weights.len()
            )));
        }
        if let Some(f) = by_lag.iter().find(|f| f.len() != grid.node_count()) {
            return Err(Error::Structural(format!(
                "history field has {} nodes, the grid has {}",
                f.len(),
                grid.node_count()
            )));
        }
        let (lf, lg) = rp.lipschitz_estimate(LIPSCHITZ_SAMPLES);
        if config.dt * (lf + lg) > STEP_LIPSCHITZ_LIMIT {
            return Err(Error::invalid(
                "dt",
                config.dt,
                format!(
                    "dt * (Lip f + Lip g) = {} exceeds {STEP_LIPSCHITZ_LIMIT}",
                    config.dt * (lf + lg)
                ),
            ));
        }

        let n = grid.node_count();
        let r = config.diffusivity * config.dt / (grid.dx() * grid.dx());
        let tr = config.theta * r;
        let mut lower = vec![-tr; n];
        let mut upper = vec![-tr; n];
        upper[0] = -2.0 * tr;
        lower[n - 1] = -2.0 * tr;
        let diag = vec![1.0 + 2.0 * tr; n];
        let matrix = Tridiagonal::new(lower, diag, upper);

        let g_lagged: Vec<Vec<f64>> = by_lag.iter().map(|f| f.iter().map(|&v| rp.g(v)).collect()).collect();
        let u = HistoryState::from_lagged(by_lag, 0.0, config.dt)?;
        let gu = HistoryState::from_lagged(g_lagged, 0.0, config.dt)?;
        Ok(Self {
            rp,
            weights,
            grid,
            config,
            matrix,
            r,
            u,
            gu,
            rhs: vec![0.0; n],
            delay: vec![0.0; n],
        })
    }

    pub fn time(&self) -> f64 {
        self.u.time()
    }

    pub fn current(&self) -> &Field {
        self.u.current()
    }

    pub fn history(&self) -> &HistoryState<Field> {
        &self.u
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn weights(&self) -> &KernelWeights {
        &self.weights
    }

    /// Advances one step and returns the new field.
    pub fn step(&mut self) -> Result<&Field> {
        let n = self.grid.node_count();
        let dt = self.config.dt;
        let explicit = (1.0 - self.config.theta) * self.r;

        self.delay.iter_mut().for_each(|v| *v = 0.0);
        for (k, &w) in self.weights.as_slice().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (acc, &g) in self.delay.iter_mut().zip(self.gu.lag(k)) {
                *acc += w * g;
            }
        }

        let u = self.u.current();
        for i in 0..n {
            let lap = if explicit == 0.0 {
                0.0
            } else if i == 0 {
                2.0 * (u[1] - u[0])
            } else if i == n - 1 {
                2.0 * (u[n - 2] - u[n - 1])
            } else {
                u[i - 1] - 2.0 * u[i] + u[i + 1]
            };
            self.rhs[i] = u[i] + explicit * lap + dt * (self.delay[i] - self.rp.f(u[i]));
        }
        self.matrix.solve_in_place(&mut self.rhs);

        let t = self.time() + dt;
        let next = Field::new(std::mem::take(&mut self.rhs));
        if let Some((node, value)) = next.first_non_finite() {
            return Err(Error::BlowUp { time: t, node, value });
        }
        if let Some(node) = next.iter().position(|&v| v < POSITIVITY_FLOOR) {
            return Err(Error::Positivity {
                time: t,
                node,
                value: next[node],
            });
        }
        let mut g_next = std::mem::take(&mut self.delay);
        for (gv, &v) in g_next.iter_mut().zip(next.iter()) {
            *gv = self.rp.g(v);
        }
        self.delay = self.gu.push(g_next);
        self.rhs = self.u.push(next).into_inner();
        Ok(self.u.current())
    }
}

/// Options of [`simulate`] beyond the solver configuration.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RunOptions {
    pub snapshots: bool,
    /// Target `u*` and `ε` of the convergence criterion.
    pub convergence: Option<(f64, f64)>,
    pub stop_when_converged: bool,
}

/// Default `ε` of the convergence criterion.
pub const CONVERGENCE_EPS: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<f64>,
}

/// Spatial extrema and mean at every step, optional snapshots.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    pub u_mean: Vec<f64>,
    pub nodes: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Delay span `τ` of the kernel that produced the record.
    pub tau: f64,
    /// First time at which the convergence criterion held over a delay span.
    pub converged_at: Option<f64>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn span(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// `max(|u⁺ - c|, |u⁻ - c|)` at every recorded time.
    pub fn sup_distance(&self, c: f64) -> Vec<f64> {
        self.u_min
            .iter()
            .zip(&self.u_max)
            .map(|(lo, hi)| (hi - c).abs().max((lo - c).abs()))
            .collect()
    }

    fn push(&mut self, t: f64, field: &Field) {
        self.times.push(t);
        self.u_min.push(field.min());
        self.u_max.push(field.max());
        self.u_mean.push(field.mean());
    }
}

/// Runs from the history to `t_end`, recording every step.
pub fn simulate(sim: &mut Simulator<'_>, opts: &RunOptions) -> Result<TrajectoryRecord> {
    let stride = sim.config.output_stride as u64;
    let steps = sim.config.steps();
    let window = sim.weights.len();
    let mut rec = TrajectoryRecord {
        nodes: sim.grid.nodes().collect(),
        tau: sim.weights.tau(),
        ..Default::default()
    };
    let mut streak = 0usize;
    let mut observe = |rec: &mut TrajectoryRecord, t: f64, field: &Field, step: u64| {
        rec.push(t, field);
        if opts.snapshots && step.is_multiple_of(stride) {
            rec.snapshots.push(Snapshot {
                t,
                values: field.to_vec(),
            });
        }
        if let (Some((target, eps)), None) = (opts.convergence, rec.converged_at) {
            let ok = field.max() - field.min() < eps && (field.mean() - target).abs() < eps;
            streak = if ok { streak + 1 } else { 0 };
            if streak >= window {
                rec.converged_at = Some(t);
            }
        }
    };
    observe(&mut rec, sim.time(), &sim.current().clone(), 0);
    for step in 1..=steps {
        let field = sim.step()?.clone();
        let t = sim.time();
        observe(&mut rec, t, &field, step);
        if opts.stop_when_converged && rec.converged_at.is_some() {
            break;
        }
    }
    Ok(rec)
}

/// Builds a simulator and runs it.
pub fn run(
    rp: &ReactionPair,
    kernel: &DelayKernel,
    grid: SpatialGrid,
    config: SolverConfig,
    init: &InitialHistory,
    opts: &RunOptions,
) -> Result<TrajectoryRecord> {
    let mut sim = Simulator::new(rp, kernel, grid, config, init)?;
    simulate(&mut sim, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(cells: usize) -> (SpatialGrid, SolverConfig) {
        let grid = SpatialGrid::new(1.0, cells).unwrap();
        let config = SolverConfig {
            dt: 0.01,
            t_end: 1.0,
            ..SolverConfig::default()
        };
        (grid, config)
    }

    #[test]
    fn equilibrium_stays_put() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let kernel = DelayKernel::uniform(1.0).unwrap();
        let (grid, config) = setup(20);
        let u = 5f64.ln();
        let rec = run(
            &rp,
            &kernel,
            grid,
            config,
            &InitialHistory::Constant(u),
            &RunOptions::default(),
        )
        .unwrap();
        for (lo, hi) in rec.u_min.iter().zip(&rec.u_max) {
            assert!((lo - u).abs() < 1e-12 && (hi - u).abs() < 1e-12);
        }
        assert_eq!(rec.len(), 101);
    }

    #[test]
    fn rejects_large_steps() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let kernel = DelayKernel::uniform(1.0).unwrap();
        let grid = SpatialGrid::new(1.0, 10).unwrap();
        let config = SolverConfig {
            dt: 0.5,
            t_end: 10.0,
            ..SolverConfig::default()
        };
        let err = Simulator::new(&rp, &kernel, grid, config, &InitialHistory::Constant(1.0)).unwrap_err();
        assert!(err.to_string().contains("Lip"));
    }

    #[test]
    fn extrema_bracket_mean() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let kernel = DelayKernel::uniform(1.0).unwrap();
        let (grid, config) = setup(16);
        let init = InitialHistory::Cosine { c0: 0.5, c1: 0.3 };
        let opts = RunOptions {
            snapshots: true,
            ..RunOptions::default()
        };
        let rec = run(&rp, &kernel, grid, config, &init, &opts).unwrap();
        for i in 0..rec.len() {
            assert!(rec.u_min[i] <= rec.u_mean[i] && rec.u_mean[i] <= rec.u_max[i]);
        }
        assert_eq!(rec.snapshots.len(), rec.len());
        assert_eq!(rec.snapshots[0].values.len(), 17);
    }
}
