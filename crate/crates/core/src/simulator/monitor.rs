use super::companion::ScalarTrajectory;
use super::pde::TrajectoryRecord;
use crate::error::{Error, Result};

/// Allowance for the comparison monitor: `1e-6 + 10·dt²`.
pub fn comparison_tolerance(dt: f64) -> f64 {
    1e-6 + 10.0 * dt * dt
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `u⁻` fell below the sub-solution.
    Lower,
    /// `u⁺` rose above the super-solution.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub time: f64,
    pub side: Side,
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonVerdict {
    pub holds: bool,
    pub first_violation: Option<Violation>,
    /// Largest overshoot seen (negative when the sandwich is strict).
    pub worst_excess: f64,
    pub checked: usize,
}

/// Checks `sub - tol ≤ u⁻` and `u⁺ ≤ super + tol` at every common time.
pub fn comparison_monitor(
    pde: &TrajectoryRecord,
    sub: &ScalarTrajectory,
    sup: &ScalarTrajectory,
    tol: f64,
) -> ComparisonVerdict {
    let n = pde.len().min(sub.values.len()).min(sup.values.len());
    let mut verdict = ComparisonVerdict {
        holds: true,
        first_violation: None,
        worst_excess: f64::NEG_INFINITY,
        checked: n,
    };
    for i in 0..n {
        debug_assert!((pde.times[i] - sub.times[i]).abs() < 1e-9);
        let lower = sub.values[i] - pde.u_min[i];
        let upper = pde.u_max[i] - sup.values[i];
        for (excess, side) in [(lower, Side::Lower), (upper, Side::Upper)] {
            verdict.worst_excess = verdict.worst_excess.max(excess);
            if excess > tol && verdict.first_violation.is_none() {
                verdict.holds = false;
                verdict.first_violation = Some(Violation {
                    time: pde.times[i],
                    side,
                    excess,
                });
            }
        }
    }
    verdict
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluctuationEstimate {
    /// `max u⁺` over the tail, estimating `limsup u⁺`.
    pub u_sup_inf: f64,
    /// `min u⁻` over the tail, estimating `liminf u⁻`.
    pub u_inf_inf: f64,
    pub tail_window: (f64, f64),
}

impl FluctuationEstimate {
    pub fn amplitude(&self) -> f64 {
        self.u_sup_inf - self.u_inf_inf
    }
}

/// Minimum record span, in delay spans.
pub const MIN_SPANS: f64 = 10.0;

pub fn fluctuation_diagnostics(record: &TrajectoryRecord, tail_fraction: f64) -> Result<FluctuationEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::invalid("tail_fraction", tail_fraction, "must lie in (0, 1)"));
    }
    let required = MIN_SPANS * record.tau;
    let span = record.span();
    if record.len() < 2 || span < required {
        return Err(Error::RecordTooShort { span, required });
    }
    let t_end = *record.times.last().unwrap();
    let t0 = t_end - tail_fraction * span;
    let start = record.times.partition_point(|&t| t < t0);
    let hi = record.u_max[start..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = record.u_min[start..].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FluctuationEstimate {
        u_sup_inf: hi,
        u_inf_inf: lo,
        tail_window: (record.times[start], t_end),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(values: &[(f64, f64)]) -> TrajectoryRecord {
        TrajectoryRecord {
            times: (0..values.len()).map(|i| i as f64).collect(),
            u_min: values.iter().map(|v| v.0).collect(),
            u_max: values.iter().map(|v| v.1).collect(),
            u_mean: values.iter().map(|v| 0.5 * (v.0 + v.1)).collect(),
            tau: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn sandwich_violation_is_located() {
        let rec = record(&[(1.0, 2.0), (1.0, 2.5), (0.5, 2.0)]);
        let sub = ScalarTrajectory {
            times: vec![0.0, 1.0, 2.0],
            values: vec![0.9, 0.9, 0.9],
        };
        let sup = ScalarTrajectory {
            times: vec![0.0, 1.0, 2.0],
            values: vec![2.0, 2.0, 2.0],
        };
        let v = comparison_monitor(&rec, &sub, &sup, 1e-6);
        assert!(!v.holds);
        let first = v.first_violation.unwrap();
        assert_eq!((first.time, first.side), (1.0, Side::Upper));
        assert!((v.worst_excess - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fluctuation_needs_ten_spans() {
        let short = record(&[(1.0, 1.0); 5]);
        assert!(matches!(
            fluctuation_diagnostics(&short, 0.2),
            Err(Error::RecordTooShort { .. })
        ));
        let mut vals = vec![(0.0, 3.0); 8];
        vals.extend([(1.0, 1.2); 12]);
        let est = fluctuation_diagnostics(&record(&vals), 0.5).unwrap();
        assert!((est.amplitude() - 0.2).abs() < 1e-15);
    }
}
