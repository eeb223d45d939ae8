//! Monotone deformations of `g` used as nonlinearities of the comparison
//! equations.

use std::fmt;

use super::roots::grid_with_breakpoints;
use super::structure::StructuralReport;
use super::AnalysisOptions;
use crate::error::{Error, Result};
use crate::model::ReactionPair;
use crate::table::lerp_table;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnvelopeTag {
    /// `max_{[0,s]} g`.
    RunningMax,
    /// `g` below `m̄ₘ`, then flat at `f(m)`.
    GmB,
    /// Suffix minimum of `g` on `[s, M]` below `m̄`, then flat at `f(M)`.
    GMB,
    /// Dominates `g` up to `A`, flat at or above `f(A)` beyond.
    GPlus,
}

impl EnvelopeTag {
    pub const ALL: [EnvelopeTag; 4] = [Self::RunningMax, Self::GmB, Self::GMB, Self::GPlus];

    pub fn name(self) -> &'static str {
        match self {
            Self::RunningMax => "running_max",
            Self::GmB => "g_m_B",
            Self::GMB => "g_M_B",
            Self::GPlus => "g_plus",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    /// Lower envelopes sit below `g`; upper ones above.
    pub fn is_lower(self) -> bool {
        matches!(self, Self::GmB | Self::GMB)
    }
}

impl fmt::Display for EnvelopeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    tag: EnvelopeTag,
    xs: Vec<f64>,
    values: Vec<f64>,
    range: (f64, f64),
    crossing: Option<f64>,
}

impl Envelope {
    pub fn tag(&self) -> EnvelopeTag {
        self.tag
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interval on which monotonicity and the side condition against `g` hold.
    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    /// Positive equilibrium of `v' = -f(v) + envelope(v)`: `m` for `g_m_B`,
    /// `M` for `g_M_B`, `A` for `g_plus`.
    pub fn crossing(&self) -> Option<f64> {
        self.crossing
    }

    /// Linear interpolation, flat outside the tabulated range.
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        lerp_table(&self.xs, &self.values, s)
    }
}

fn missing(name: &str, tag: EnvelopeTag) -> Error {
    Error::Structural(format!("{tag} needs {name}, which is not available"))
}

/// Tabulates the envelope `tag` on `[0, B]`.
pub fn build_envelope(
    rp: &ReactionPair,
    report: &StructuralReport,
    tag: EnvelopeTag,
    opts: &AnalysisOptions,
) -> Result<Envelope> {
    let b = report.b;
    let mut breaks = vec![report.peak, report.u_star];
    breaks.extend([report.a, report.m, report.m_bar, report.m_bar_m].into_iter().flatten());
    let xs = grid_with_breakpoints(0.0, b, opts.grid_points, &breaks);
    let gs: Vec<f64> = xs.iter().map(|&s| rp.g(s)).collect();
    let n = xs.len();

    let (values, range, crossing) = match tag {
        EnvelopeTag::RunningMax => {
            let mut v = gs.clone();
            for i in 1..n {
                v[i] = v[i].max(v[i - 1]);
            }
            (v, (0.0, b), None)
        }
        EnvelopeTag::GmB => {
            let m = report.m.ok_or_else(|| missing("m", tag))?;
            let mbm = report.m_bar_m.ok_or_else(|| missing("m̄ₘ", tag))?;
            let level = rp.f(m);
            let v = xs
                .iter()
                .zip(&gs)
                .map(|(&s, &g)| if s < mbm { g.min(level) } else { level })
                .collect();
            (v, (0.0, b), Some(m))
        }
        EnvelopeTag::GMB => {
            let m_bar = report.m_bar.ok_or_else(|| missing("m̄", tag))?;
            let peak = report.peak;
            let level = rp.f(peak);
            let peak_idx = xs.partition_point(|&s| s <= peak) - 1;
            let mut suffix = gs.clone();
            for i in (0..peak_idx).rev() {
                suffix[i] = suffix[i].min(suffix[i + 1]);
            }
            let v = xs
                .iter()
                .enumerate()
                .map(|(i, &s)| if s < m_bar { suffix[i].min(level) } else { level })
                .collect();
            let hi = report.a.unwrap_or(b);
            (v, (0.0, hi), Some(peak))
        }
        EnvelopeTag::GPlus => {
            let a = report.a.ok_or_else(|| missing("A", tag))?;
            let fa = rp.f(a);
            let mut v = Vec::with_capacity(n);
            let (mut max_g, mut max_f) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            let mut at_a = f64::NEG_INFINITY;
            for (i, &s) in xs.iter().enumerate() {
                if s <= a {
                    max_g = max_g.max(gs[i]);
                    max_f = max_f.max(rp.f(s));
                    at_a = max_g.max(0.5 * (max_f + fa));
                    v.push(at_a);
                } else {
                    v.push(at_a.max(fa));
                }
            }
            (v, (0.0, b), Some(a))
        }
    };
    Ok(Envelope {
        tag,
        xs,
        values,
        range,
        crossing,
    })
}

/// Distance from the crossing inside which strict comparisons with `f` are
/// not required.
pub const CROSSING_EXCLUSION: f64 = 1e-9;

/// Monotonicity, the side condition against `g`, and the sign pattern against
/// `f` on either side of the crossing. Empty when all hold.
pub fn envelope_violations(env: &Envelope, rp: &ReactionPair, tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    let (lo, hi) = env.range();
    let inside: Vec<usize> = (0..env.xs.len())
        .filter(|&i| env.xs[i] >= lo && env.xs[i] <= hi)
        .collect();
    for w in inside.windows(2) {
        if env.values[w[1]] < env.values[w[0]] {
            out.push(format!("{} decreases at s = {}", env.tag, env.xs[w[0]]));
            break;
        }
    }
    for &i in &inside {
        let s = env.xs[i];
        let (e, g) = (env.values[i], rp.g(s));
        let bad = if env.tag.is_lower() { e > g + tol } else { e < g - tol };
        if bad {
            out.push(format!("{} crosses g at s = {s} ({e} vs {g})", env.tag));
            break;
        }
    }
    if let Some(c) = env.crossing {
        for &i in &inside {
            let s = env.xs[i];
            if s == 0.0 || (s - c).abs() <= CROSSING_EXCLUSION {
                continue;
            }
            let d = env.values[i] - rp.f(s);
            if (s < c && !(d > 0.0)) || (s > c && !(d < 0.0)) {
                out.push(format!("{} has the wrong sign against f at s = {s} ({d})", env.tag));
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::structure::compute_structure;

    fn nicholson(delta: f64) -> (ReactionPair, StructuralReport) {
        let rp = ReactionPair::nicholson(delta, None).unwrap();
        let rep = compute_structure(&rp, &AnalysisOptions::default()).unwrap();
        (rp, rep)
    }

    #[test]
    fn running_max_saturates_at_peak() {
        let (rp, rep) = nicholson(0.2);
        let env = build_envelope(&rp, &rep, EnvelopeTag::RunningMax, &AnalysisOptions::default()).unwrap();
        assert!((env.eval(0.5) - 0.5 * (-0.5f64).exp()).abs() < 1e-7);
        assert_eq!(env.eval(3.0), (-1f64).exp());
        assert!(envelope_violations(&env, &rp, 1e-9).is_empty());
    }

    #[test]
    fn g_m_b_for_nicholson() {
        let (rp, rep) = nicholson(0.2);
        let env = build_envelope(&rp, &rep, EnvelopeTag::GMB, &AnalysisOptions::default()).unwrap();
        assert!((env.eval(0.1) - 0.1 * (-0.1f64).exp()).abs() < 1e-7);
        assert!((env.eval(0.3) - 0.2).abs() < 1e-12);
        assert!((env.eval(2.0) - 0.2).abs() < 1e-12);
        assert_eq!(env.range().1, rep.a.unwrap());
        assert!(
            envelope_violations(&env, &rp, 1e-9).is_empty(),
            "{:?}",
            envelope_violations(&env, &rp, 1e-9)
        );
    }

    #[test]
    fn all_envelopes_pass_for_nicholson() {
        let (rp, rep) = nicholson(0.25);
        for tag in EnvelopeTag::ALL {
            let env = build_envelope(&rp, &rep, tag, &AnalysisOptions::default()).unwrap();
            let v = envelope_violations(&env, &rp, 1e-9);
            assert!(v.is_empty(), "{tag}: {v:?}");
        }
    }

    #[test]
    fn missing_constant_is_named() {
        let rp = ReactionPair::mackey_glass(0.5, 2.0, None).unwrap();
        let rep = compute_structure(&rp, &AnalysisOptions::default()).unwrap();
        let err = build_envelope(&rp, &rep, EnvelopeTag::GPlus, &AnalysisOptions::default()).unwrap_err();
        assert!(err.to_string().contains('A'));
    }

    #[test]
    fn tag_names_round_trip() {
        for tag in EnvelopeTag::ALL {
            assert_eq!(EnvelopeTag::parse(tag.name()), Some(tag));
        }
    }
}
