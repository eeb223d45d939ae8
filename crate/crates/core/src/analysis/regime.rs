use std::fmt;

use super::hypotheses::{Hypothesis, HypothesisReport};
use super::structure::StructuralReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `u* ≤ M`: `[0, M]` attracts.
    BelowPeak,
    /// `u* > M` and `g > f(M)` on all of `(M, B]`: `[M, B]` attracts.
    DEmpty,
    /// `A` exists with (cond) and (Hypsupl): `[M, A]` attracts.
    BoundedByA,
    /// No attracting-interval lemma applies.
    Unclassified,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::BelowPeak => "below_peak",
            Regime::DEmpty => "d_empty",
            Regime::BoundedByA => "bounded_by_A",
            Regime::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Regime and attracting interval; also stored into `report`.
pub fn classify_regime(report: &mut StructuralReport, hyps: &HypothesisReport) -> (Regime, (f64, f64)) {
    let (regime, interval) = if !report.above_peak(hyps.tol) {
        (Regime::BelowPeak, (0.0, report.peak))
    } else {
        match report.a {
            None => (Regime::DEmpty, (report.peak, report.b)),
            Some(a) if hyps.passed(Hypothesis::Cond) && hyps.passed(Hypothesis::Hypsupl) => {
                (Regime::BoundedByA, (report.peak, a))
            }
            Some(_) => (Regime::Unclassified, (0.0, report.b)),
        }
    };
    report.regime = regime;
    report.attracting_interval = interval;
    (regime, interval)
}

/// Stability verdict, shared by the closed-form preset conditions and the
/// general machinery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabilityClass {
    ExpStable,
    AttractiveOnly,
    OutsideTheory,
}

impl StabilityClass {
    pub fn name(self) -> &'static str {
        match self {
            StabilityClass::ExpStable => "exp_stable",
            StabilityClass::AttractiveOnly => "attractive_only",
            StabilityClass::OutsideTheory => "outside_theory",
        }
    }

    pub fn is_attractive(self) -> bool {
        self != StabilityClass::OutsideTheory
    }
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What the general theorems conclude from the computed verdicts.
pub fn machinery_verdict(report: &StructuralReport, hyps: &HypothesisReport) -> StabilityClass {
    if !(hyps.passed(Hypothesis::Hyp0) && hyps.passed(Hypothesis::Hyp000)) {
        return StabilityClass::OutsideTheory;
    }
    match report.regime {
        Regime::BelowPeak => StabilityClass::AttractiveOnly,
        Regime::BoundedByA if hyps.passed(Hypothesis::Hyp2) && !hyps.attractivity_passes().is_empty() => {
            if hyps.passed(Hypothesis::ExpCondition) {
                StabilityClass::ExpStable
            } else {
                StabilityClass::AttractiveOnly
            }
        }
        _ => StabilityClass::OutsideTheory,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, AnalysisOptions};
    use crate::model::ReactionPair;

    #[test]
    fn regimes_of_presets() {
        let opts = AnalysisOptions::default();
        let a = analyze(&ReactionPair::mackey_glass(0.5, 2.0, None).unwrap(), &opts).unwrap();
        assert_eq!(a.structure.regime, Regime::BelowPeak);
        let (lo, hi) = a.structure.attracting_interval;
        assert_eq!(lo, 0.0);
        assert!((hi - 1.0).abs() < 1e-9);
        assert_eq!(a.machinery, StabilityClass::AttractiveOnly);

        let a = analyze(&ReactionPair::nicholson(0.2, None).unwrap(), &opts).unwrap();
        assert_eq!(a.structure.regime, Regime::BoundedByA);
        assert_eq!(a.machinery, StabilityClass::ExpStable);
        let (lo, hi) = a.structure.attracting_interval;
        assert!((lo - 1.0).abs() < 1e-9 && (hi - 2.5426).abs() < 1e-3);
    }
}
