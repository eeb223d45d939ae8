//! Structural constants, envelopes, hypothesis verdicts and regimes of a
//! reaction pair.

mod envelope;
mod hypotheses;
mod regime;
pub mod roots;
mod structure;

pub use envelope::{build_envelope, envelope_violations, Envelope, EnvelopeTag, CROSSING_EXCLUSION};
pub use hypotheses::{check_hypotheses, GMap, Hypothesis, HypothesisReport, Status, Verdict, INVERSE_TOLERANCE};
pub use regime::{classify_regime, machinery_verdict, Regime, StabilityClass};
pub use structure::{
    compute_structure, derivative_bounds, find_a, find_b_min, find_equilibria, find_m, find_m_bar, find_m_bar_m,
    find_peak, global_peak, positive_equilibrium, MBar, Peak, StructuralReport, PEAK_SLOPE_TOLERANCE, ROOT_TOLERANCE,
};

use crate::error::Result;
use crate::model::ReactionPair;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisOptions {
    /// Points of every verification grid.
    pub grid_points: usize,
    /// Margin separating strict inequalities from equality.
    pub tol: f64,
    /// Extra samples between the neighbours of the worst grid point.
    pub refine_points: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            grid_points: 10_000,
            tol: 1e-9,
            refine_points: 64,
        }
    }
}

/// Structural report with its regime set, plus the hypothesis verdicts.
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub structure: StructuralReport,
    pub hypotheses: HypothesisReport,
    pub machinery: StabilityClass,
}

pub fn analyze(rp: &ReactionPair, opts: &AnalysisOptions) -> Result<Analysis> {
    let mut structure = compute_structure(rp, opts)?;
    let hypotheses = check_hypotheses(rp, &structure, opts);
    classify_regime(&mut structure, &hypotheses);
    let machinery = machinery_verdict(&structure, &hypotheses);
    Ok(Analysis {
        structure,
        hypotheses,
        machinery,
    })
}
