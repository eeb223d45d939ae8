//! Decay-rate certificates and the closed-form stability regions of the
//! presets.

use crate::analysis::roots::bisect;
use crate::analysis::{derivative_bounds, Analysis, AnalysisOptions, StabilityClass};
use crate::error::{Error, Result};
use crate::model::{KernelWeights, ReactionKind, ReactionPair};
use crate::simulator::TrajectoryRecord;

/// Residual required of `F(γ) - α`.
pub const RATE_TOLERANCE: f64 = 1e-12;
/// Decay window of the log-linear fit.
pub const FIT_WINDOW: (f64, f64) = (1e-8, 1e-2);
/// Fewest samples accepted by the fit.
pub const MIN_FIT_SAMPLES: usize = 10;

/// `F(γ) = β Σ_k w_k e^{γ k Δt} + γ`.
pub fn rate_function(beta: f64, weights: &KernelWeights, gamma: f64) -> f64 {
    beta * weights.exp_moment(gamma) + gamma
}

/// Root of `F(γ) = α` in `(0, α - β)`.
pub fn solve_rate(alpha: f64, beta: f64, weights: &KernelWeights) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", beta, "must be positive"));
    }
    if !(alpha > beta) {
        return Err(Error::NoCertificate { alpha, beta });
    }
    let hi = alpha - beta;
    let (f_lo, f_hi) = (rate_function(beta, weights, 0.0), rate_function(beta, weights, hi));
    if !(f_lo < alpha && alpha < f_hi) {
        return Err(Error::Structural(format!(
            "F(0) = {f_lo} < alpha = {alpha} < F(alpha - beta) = {f_hi} does not hold"
        )));
    }
    bisect(|g| rate_function(beta, weights, g) - alpha, 0.0, hi, RATE_TOLERANCE)
        .ok_or_else(|| Error::Structural("rate bisection lost its bracket".into()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalRate {
    pub gamma: f64,
    /// `C` of `‖u - u*‖ ≤ C e^{-γt}`, from the intercept.
    pub c: f64,
    pub samples: usize,
    pub window: (f64, f64),
}

/// Least-squares slope of `ln ‖u - u*‖_∞` over samples inside [`FIT_WINDOW`].
pub fn fit_empirical_rate(record: &TrajectoryRecord, u_star: f64) -> Result<EmpiricalRate> {
    let (lo, hi) = FIT_WINDOW;
    let err = record.sup_distance(u_star);
    let pts: Vec<(f64, f64)> = record
        .times
        .iter()
        .zip(&err)
        .filter(|(_, e)| **e >= lo && **e <= hi)
        .map(|(t, e)| (*t, e.ln()))
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientDecay { lo, hi });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientDecay { lo, hi });
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(EmpiricalRate {
        gamma: -slope,
        c: (my - slope * mt).exp(),
        samples: pts.len(),
        window: (pts[0].0, pts[pts.len() - 1].0),
    })
}

/// Closed-form region of the preset's application theorem.
pub fn closed_form_verdict(rp: &ReactionPair) -> Result<StabilityClass> {
    use StabilityClass::*;
    match *rp.kind() {
        ReactionKind::Nicholson { delta } => {
            let x = 1.0 / delta;
            let e = std::f64::consts::E;
            Ok(if e < x && x < e * e {
                ExpStable
            } else if 1.0 < x && x <= e * e {
                AttractiveOnly
            } else {
                OutsideTheory
            })
        }
        ReactionKind::MackeyGlass { delta, n } => {
            if delta >= 1.0 {
                return Ok(OutsideTheory);
            }
            let x = 1.0 / delta;
            let exp = n > 1.0 && n / (n - 1.0) < x && x < 4.0 * n / ((n - 1.0) * (n - 1.0));
            let attractive = n <= 2.0 || x < n / (n - 2.0);
            Ok(if exp {
                ExpStable
            } else if attractive {
                AttractiveOnly
            } else {
                OutsideTheory
            })
        }
        ReactionKind::Custom(_) => Err(Error::NotApplicable(
            "closed-form verdicts exist for presets only".into(),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PresetVerdict {
    pub theory: StabilityClass,
    pub machinery: StabilityClass,
}

pub fn preset_verdict(rp: &ReactionPair, opts: &AnalysisOptions) -> Result<PresetVerdict> {
    let theory = closed_form_verdict(rp)?;
    let machinery = match crate::analysis::analyze(rp, opts) {
        Ok(a) => a.machinery,
        Err(_) => StabilityClass::OutsideTheory,
    };
    Ok(PresetVerdict { theory, machinery })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateCertificate {
    pub alpha: f64,
    pub beta: f64,
    /// Interval on which `α` and `β` were taken.
    pub interval: (f64, f64),
    pub gamma_theoretical: Option<f64>,
    pub gamma_empirical: Option<f64>,
    pub c_empirical: Option<f64>,
    pub verdict: StabilityClass,
}

impl RateCertificate {
    /// `α`, `β` on `[M, A]` (`[M, B]` without `A`; the attracting interval
    /// when `u* ≤ M`) and `γ` when `α > β`.
    pub fn theoretical(
        rp: &ReactionPair,
        analysis: &Analysis,
        weights: &KernelWeights,
        opts: &AnalysisOptions,
    ) -> Self {
        let s = &analysis.structure;
        let interval = if s.above_peak(opts.tol) {
            (s.peak, s.a.unwrap_or(s.b))
        } else {
            s.attracting_interval
        };
        let (alpha, beta) = derivative_bounds(rp, interval.0, interval.1, opts);
        RateCertificate {
            alpha,
            beta,
            interval,
            gamma_theoretical: solve_rate(alpha, beta, weights).ok(),
            gamma_empirical: None,
            c_empirical: None,
            verdict: analysis.machinery,
        }
    }

    pub fn with_empirical(mut self, fit: &EmpiricalRate) -> Self {
        self.gamma_empirical = Some(fit.gamma);
        self.c_empirical = Some(fit.c);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DelayKernel;

    fn uniform(dt: f64) -> KernelWeights {
        DelayKernel::uniform(1.0).unwrap().discretize(dt).unwrap()
    }

    #[test]
    fn rate_for_unit_uniform_kernel() {
        let g = solve_rate(2.0, 1.0, &uniform(0.01)).unwrap();
        assert!((g - 0.6169527981894963).abs() < 1e-10);
        assert!((rate_function(1.0, &uniform(0.01), g) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn nicholson_rate() {
        let g = solve_rate(0.2, (-2f64).exp(), &uniform(0.01)).unwrap();
        assert!((g - 0.060487851987814256).abs() < 1e-10);
    }

    #[test]
    fn tiny_beta_leaves_alpha() {
        let g = solve_rate(0.5, 1e-8, &uniform(0.01)).unwrap();
        assert!(g < 0.5 && 0.5 - g < 1e-7);
    }

    #[test]
    fn no_certificate_when_beta_dominates() {
        assert!(matches!(
            solve_rate(0.1, 0.2, &uniform(0.1)),
            Err(Error::NoCertificate { .. })
        ));
        assert!(matches!(
            solve_rate(0.1, 0.1, &uniform(0.1)),
            Err(Error::NoCertificate { .. })
        ));
    }

    #[test]
    fn preset_regions() {
        use StabilityClass::*;
        let n = |d| closed_form_verdict(&ReactionPair::nicholson(d, None).unwrap()).unwrap();
        assert_eq!(n(0.2), ExpStable);
        assert_eq!(n(0.5), AttractiveOnly);
        assert_eq!(n(0.1), OutsideTheory);
        let mg = |d, k| closed_form_verdict(&ReactionPair::mackey_glass(d, k, None).unwrap()).unwrap();
        assert!(mg(0.6, 4.0).is_attractive());
        assert_eq!(mg(0.55, 4.0), AttractiveOnly);
        assert_eq!(mg(0.5, 3.0), ExpStable);
        assert_eq!(mg(0.5, 5.0), OutsideTheory);
    }

    #[test]
    fn equilibrium_record_has_no_decay() {
        let rec = TrajectoryRecord {
            times: vec![0.0, 1.0, 2.0],
            u_min: vec![1.0; 3],
            u_max: vec![1.0; 3],
            u_mean: vec![1.0; 3],
            ..Default::default()
        };
        assert!(matches!(
            fit_empirical_rate(&rec, 1.0),
            Err(Error::InsufficientDecay { .. })
        ));
    }

    #[test]
    fn fit_recovers_exponential() {
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let err: Vec<f64> = times.iter().map(|t| 3e-3 * (-0.7 * t).exp()).collect();
        let rec = TrajectoryRecord {
            u_min: err.iter().map(|e| 1.0 - e).collect(),
            u_max: err.iter().map(|e| 1.0 + e).collect(),
            u_mean: vec![1.0; 200],
            times,
            ..Default::default()
        };
        let fit = fit_empirical_rate(&rec, 1.0).unwrap();
        assert!((fit.gamma - 0.7).abs() < 1e-6);
        assert!((fit.c - 3e-3).abs() < 1e-6);
    }
}
