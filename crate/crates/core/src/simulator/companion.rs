use super::config::SolverConfig;
use super::init::InitialHistory;
use crate::analysis::Envelope;
use crate::error::{Error, Result};
use crate::model::{HistoryState, KernelWeights, ReactionPair, SpatialGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompanionKind {
    /// Started from `min_x φ`, bounds `u⁻` from below.
    Sub,
    /// Started from `max_x φ`, bounds `u⁺` from above.
    Super,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalarTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// `v' = -f(v) + Σ_k w_k h(v(t - kΔt))` with the explicit step of the PDE.
/// `psi_by_lag[k]` is the history at `t = -k·dt`.
pub fn simulate_scalar(
    psi_by_lag: &[f64],
    nonlinearity: impl Fn(f64) -> f64,
    rp: &ReactionPair,
    weights: &KernelWeights,
    config: &SolverConfig,
) -> Result<ScalarTrajectory> {
    config.validate()?;
    if psi_by_lag.len() != weights.len() {
        return Err(Error::Structural(format!(
            "scalar history has {} entries, the kernel needs {}",
            psi_by_lag.len(),
            weights.len()
        )));
    }
    let dt = config.dt;
    let lagged: Vec<f64> = psi_by_lag.iter().map(|&v| nonlinearity(v)).collect();
    let mut hist = HistoryState::from_lagged(lagged, 0.0, dt)?;
    let mut v = psi_by_lag[0];
    let steps = config.steps();
    let mut out = ScalarTrajectory {
        times: Vec::with_capacity(steps as usize + 1),
        values: Vec::with_capacity(steps as usize + 1),
    };
    out.times.push(0.0);
    out.values.push(v);
    for _ in 0..steps {
        let delay: f64 = weights
            .as_slice()
            .iter()
            .enumerate()
            .map(|(k, w)| w * hist.lag(k))
            .sum();
        v += dt * (delay - rp.f(v));
        let t = hist.time() + dt;
        if !v.is_finite() {
            return Err(Error::BlowUp {
                time: t,
                node: 0,
                value: v,
            });
        }
        hist.push(nonlinearity(v));
        out.times.push(t);
        out.values.push(v);
    }
    Ok(out)
}

/// Companion comparison ODE driven by a monotone envelope, started from the
/// spatial minimum (sub) or maximum (super) of the PDE history.
pub fn simulate_companion(
    kind: CompanionKind,
    init: &InitialHistory,
    grid: &SpatialGrid,
    envelope: &Envelope,
    rp: &ReactionPair,
    weights: &KernelWeights,
    config: &SolverConfig,
) -> Result<ScalarTrajectory> {
    if envelope.values().windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Structural(format!("{} is not nondecreasing", envelope.tag())));
    }
    let psi = init.spatial_extreme(grid, weights.len(), config.dt, kind == CompanionKind::Super)?;
    simulate_scalar(&psi, |v| envelope.eval(v), rp, weights, config)
}
