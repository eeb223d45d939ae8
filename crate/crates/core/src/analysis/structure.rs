//! Structural constants: equilibria, the peak `M`, the bounds `B` and `A`,
//! and the persistence constants `m`, `m̄`.

use super::regime::Regime;
use super::roots::{bisect, golden_max, grid_with_breakpoints, linspace};
use super::AnalysisOptions;
use crate::error::{Error, Result};
use crate::model::ReactionPair;

/// Residual accepted for roots of `K` and of `g - level`.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Residual accepted for `g'(M)` when an analytic derivative exists.
pub const PEAK_SLOPE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StructuralReport {
    /// All roots of `K` on `[0, s_max]`, ascending, starting with 0.
    pub equilibria: Vec<f64>,
    pub u_star: f64,
    /// `M`, the maximiser of `g`.
    pub peak: f64,
    pub peak_value: f64,
    /// `g` kept increasing up to `s_max`.
    pub peak_at_boundary: bool,
    /// Two strict local maxima of `g`, when `g` is not unimodal.
    pub peak_witnesses: Option<(f64, f64)>,
    /// Working bound used by every scan (the search bound `s_max`).
    pub b: f64,
    /// Smallest grid point past which `max_{[0,s]} g < f`; `None` if there is
    /// none inside the search window.
    pub b_min: Option<f64>,
    pub a: Option<f64>,
    pub m: Option<f64>,
    /// `m̄ = max{s ∈ [0, M] : g(s) = f(M)}`.
    pub m_bar: Option<f64>,
    /// `f(M) ≥ g(M)`: `m̄` collapsed onto `M`.
    pub m_bar_degenerate: bool,
    /// Root of `g = f(m)` below `m`, the breakpoint of `g_m^B`.
    pub m_bar_m: Option<f64>,
    pub regime: Regime,
    pub attracting_interval: (f64, f64),
    pub grid_points: usize,
    pub notes: Vec<String>,
}

impl StructuralReport {
    /// `u* > M`, the non-monotone case.
    pub fn above_peak(&self, tol: f64) -> bool {
        self.u_star > self.peak + tol
    }
}

/// Roots of `K = g - f` on `[0, s_max]`; 0 is always the first entry.
pub fn find_equilibria(rp: &ReactionPair, opts: &AnalysisOptions) -> Vec<f64> {
    let xs = linspace(0.0, rp.s_max(), opts.grid_points);
    let ks: Vec<f64> = xs.iter().map(|&s| rp.k(s)).collect();
    let mut roots = vec![0.0];
    for i in 1..xs.len() {
        if ks[i] == 0.0 {
            roots.push(xs[i]);
        } else if i > 1 && ks[i - 1] != 0.0 && ks[i - 1].signum() != ks[i].signum() {
            if let Some(r) = bisect(|s| rp.k(s), xs[i - 1], xs[i], ROOT_TOLERANCE) {
                roots.push(r);
            }
        }
    }
    roots
}

/// The unique positive root of `K`.
pub fn positive_equilibrium(rp: &ReactionPair, roots: &[f64]) -> Result<f64> {
    let positive: Vec<f64> = roots.iter().copied().filter(|r| *r > 0.0).collect();
    match positive.len() {
        0 => Err(Error::NoPositiveEquilibrium { s_max: rp.s_max() }),
        1 => Ok(positive[0]),
        _ => Err(Error::MultiplePositiveEquilibria { roots: positive }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub location: f64,
    pub value: f64,
    pub at_boundary: bool,
}

/// Indices of strict local maxima of a sampled sequence (plateaus count once).
fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut maxima = Vec::new();
    let mut rising_from: Option<usize> = None;
    let mut last_rise_end = 0;
    for i in 0..values.len() - 1 {
        let d = values[i + 1] - values[i];
        if d > 0.0 {
            rising_from = Some(i);
            last_rise_end = i + 1;
        } else if d < 0.0 && rising_from.is_some() {
            maxima.push(last_rise_end);
            rising_from = None;
        }
    }
    if rising_from.is_some() {
        maxima.push(values.len() - 1);
    }
    maxima
}

fn refine_peak(rp: &ReactionPair, xs: &[f64], i: usize) -> f64 {
    if i == 0 {
        return xs[0];
    }
    if i + 1 >= xs.len() {
        return xs[xs.len() - 1];
    }
    let (lo, hi) = (xs[i - 1], xs[i + 1]);
    let (blo, bhi, best) = golden_max(|s| rp.g(s), lo, hi, 1e-13);
    if rp.has_analytic_derivatives() {
        // polish on g' where golden section stalls at sqrt(eps)
        let (a, b) = if rp.dg(blo) > 0.0 && rp.dg(bhi) < 0.0 {
            (blo, bhi)
        } else {
            (lo, hi)
        };
        if let Some(r) = bisect(|s| rp.dg(s), a, b, PEAK_SLOPE_TOLERANCE) {
            if rp.dg(r).abs() < PEAK_SLOPE_TOLERANCE || rp.g(r) >= rp.g(best) {
                return r;
            }
        }
    }
    best
}

/// Maximiser `M` of `g`; errors when `g` has two strict local maxima.
pub fn find_peak(rp: &ReactionPair, opts: &AnalysisOptions) -> Result<Peak> {
    let xs = linspace(0.0, rp.s_max(), opts.grid_points);
    let gs: Vec<f64> = xs.iter().map(|&s| rp.g(s)).collect();
    let maxima = local_maxima(&gs);
    if maxima.len() > 1 {
        return Err(Error::Hyp44Violated {
            first: xs[maxima[0]],
            second: xs[maxima[1]],
        });
    }
    Ok(global_peak_on(rp, &xs, &gs))
}

/// Largest sample of `g`, refined, without any unimodality requirement.
pub fn global_peak(rp: &ReactionPair, opts: &AnalysisOptions) -> Peak {
    let xs = linspace(0.0, rp.s_max(), opts.grid_points);
    let gs: Vec<f64> = xs.iter().map(|&s| rp.g(s)).collect();
    global_peak_on(rp, &xs, &gs)
}

fn global_peak_on(rp: &ReactionPair, xs: &[f64], gs: &[f64]) -> Peak {
    let i = gs
        .iter()
        .enumerate()
        .fold(0, |best, (j, v)| if *v > gs[best] { j } else { best });
    let at_boundary = i + 1 == xs.len();
    let location = refine_peak(rp, xs, i);
    Peak {
        location,
        value: rp.g(location),
        at_boundary,
    }
}

/// Smallest grid point past which the running maximum of `g` stays below `f`.
pub fn find_b_min(rp: &ReactionPair, opts: &AnalysisOptions) -> Option<f64> {
    let xs = linspace(0.0, rp.s_max(), opts.grid_points);
    let mut running = f64::NEG_INFINITY;
    let mut last_violation = 0;
    for (i, &s) in xs.iter().enumerate() {
        running = running.max(rp.g(s));
        if running >= rp.f(s) {
            last_violation = i;
        }
    }
    if last_violation + 1 == xs.len() {
        None
    } else {
        Some(xs[last_violation.max(1)])
    }
}

/// Least root of `g = f(M)` in `(M, b]`; `None` when `g > f(M)` throughout.
pub fn find_a(rp: &ReactionPair, peak: f64, b: f64, opts: &AnalysisOptions) -> Result<Option<f64>> {
    let level = rp.f(peak);
    if !(rp.g(peak) > level) {
        return Err(Error::Structural(format!(
            "g(M) = {} does not exceed f(M) = {level}",
            rp.g(peak)
        )));
    }
    let xs = linspace(peak, b, opts.grid_points);
    for i in 1..xs.len() {
        let v = rp.g(xs[i]) - level;
        if v <= 0.0 {
            let r = bisect(|s| rp.g(s) - level, xs[i - 1], xs[i], ROOT_TOLERANCE).unwrap_or(xs[i]);
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MBar {
    pub value: f64,
    pub degenerate: bool,
}

/// Largest root of `g = level` in `[0, M]`, by backward scan from `M`.
pub fn find_m_bar(rp: &ReactionPair, peak: f64, level: f64, opts: &AnalysisOptions) -> Result<MBar> {
    if level >= rp.g(peak) - opts.tol {
        return Ok(MBar {
            value: peak,
            degenerate: true,
        });
    }
    if level <= rp.g(0.0) {
        return Err(Error::Structural(format!(
            "level {level} is not above g(0) = {}",
            rp.g(0.0)
        )));
    }
    let xs = linspace(0.0, peak, opts.grid_points);
    for i in (0..xs.len() - 1).rev() {
        if rp.g(xs[i]) - level <= 0.0 {
            let r = bisect(|s| rp.g(s) - level, xs[i], xs[i + 1], ROOT_TOLERANCE).unwrap_or(xs[i]);
            return Ok(MBar {
                value: r,
                degenerate: false,
            });
        }
    }
    Err(Error::Structural(format!("g never falls to {level} on [0, M]")))
}

/// Persistence floor `m`: the largest grid point of `(0, u*)` satisfying the
/// persistence block on `[0, b]`, then one bisection level towards `u*`.
pub fn find_m(rp: &ReactionPair, u_star: f64, b: f64, opts: &AnalysisOptions) -> Result<f64> {
    let tol = opts.tol;
    let xs = grid_with_breakpoints(0.0, b, opts.grid_points, &[u_star]);
    let n = xs.len();
    let fs: Vec<f64> = xs.iter().map(|&s| rp.f(s)).collect();
    let gs: Vec<f64> = xs.iter().map(|&s| rp.g(s)).collect();

    let mut suffix_min_g = gs.clone();
    for i in (0..n - 1).rev() {
        suffix_min_g[i] = suffix_min_g[i].min(suffix_min_g[i + 1]);
    }
    // min of f over indices strictly after i
    let mut after_min_f = vec![f64::INFINITY; n];
    for i in (0..n - 1).rev() {
        after_min_f[i] = after_min_f[i + 1].min(fs[i + 1]);
    }
    // max of f over indices up to and including i
    let mut upto_max_f = fs.clone();
    for i in 1..n {
        upto_max_f[i] = upto_max_f[i].max(upto_max_f[i - 1]);
    }
    // f, g strictly increasing on xs[0..=increasing_until]
    let increasing_until = (0..n - 1)
        .find(|&i| !(fs[i + 1] > fs[i] && gs[i + 1] > gs[i]))
        .unwrap_or(n - 1);

    let passes_at_grid = |i: usize| {
        let fm = fs[i];
        let before = if i == 0 { f64::NEG_INFINITY } else { upto_max_f[i - 1] };
        suffix_min_g[i] - fm > tol && fm - before > tol && after_min_f[i] - fm > tol && i <= increasing_until
    };

    let top = xs.partition_point(|&s| s < u_star);
    for i in (1..top).rev() {
        if !passes_at_grid(i) {
            continue;
        }
        let mid = 0.5 * (xs[i] + xs[i + 1]);
        if mid < u_star && i < increasing_until {
            let fm = rp.f(mid);
            let ok =
                rp.g(mid).min(suffix_min_g[i + 1]) - fm > tol && fm - upto_max_f[i] > tol && after_min_f[i] - fm > tol;
            if ok {
                return Ok(mid);
            }
        }
        return Ok(xs[i]);
    }
    Err(Error::PersistenceFloor(format!(
        "no m in (0, {u_star}) satisfies the persistence block on [0, {b}]"
    )))
}

/// Root of `g = f(m)` below `m` (`g` is increasing on `[0, m]`).
pub fn find_m_bar_m(rp: &ReactionPair, m: f64) -> Option<f64> {
    let level = rp.f(m);
    bisect(|s| rp.g(s) - level, 0.0, m, ROOT_TOLERANCE)
}

/// `(inf f', sup |g'|)` on `[lo, hi]`.
pub fn derivative_bounds(rp: &ReactionPair, lo: f64, hi: f64, opts: &AnalysisOptions) -> (f64, f64) {
    let xs = linspace(lo, hi, opts.grid_points);
    let mut alpha = f64::INFINITY;
    let mut beta: f64 = 0.0;
    let mut beta_at = 0;
    for (i, &s) in xs.iter().enumerate() {
        alpha = alpha.min(rp.df(s));
        let d = rp.dg(s).abs();
        if d > beta {
            beta = d;
            beta_at = i;
        }
    }
    if beta_at > 0 && beta_at + 1 < xs.len() {
        let (_, _, s) = golden_max(|s| rp.dg(s).abs(), xs[beta_at - 1], xs[beta_at + 1], 1e-12);
        beta = beta.max(rp.dg(s).abs());
    }
    (alpha, beta)
}

/// Every constant of the structural report; the regime is left
/// [`Regime::Unclassified`] until hypotheses are checked.
pub fn compute_structure(rp: &ReactionPair, opts: &AnalysisOptions) -> Result<StructuralReport> {
    let equilibria = find_equilibria(rp, opts);
    let u_star = positive_equilibrium(rp, &equilibria)?;
    let mut notes = Vec::new();

    let (peak, peak_witnesses) = match find_peak(rp, opts) {
        Ok(p) => (p, None),
        Err(Error::Hyp44Violated { first, second }) => {
            notes.push(format!("g has several local maxima ({first}, {second})"));
            (global_peak(rp, opts), Some((first, second)))
        }
        Err(e) => return Err(e),
    };
    if peak.at_boundary {
        notes.push("g increases up to s_max; M taken at the search bound".into());
    }

    let b = rp.s_max();
    let b_min = find_b_min(rp, opts);
    if b_min.is_none() {
        notes.push("running max of g never falls below f inside [0, s_max]; B = s_max flagged".into());
    }

    let m = match find_m(rp, u_star, b, opts) {
        Ok(m) => Some(m),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    let m_bar_m = m.and_then(|m| find_m_bar_m(rp, m));

    let mut report = StructuralReport {
        equilibria,
        u_star,
        peak: peak.location,
        peak_value: peak.value,
        peak_at_boundary: peak.at_boundary,
        peak_witnesses,
        b,
        b_min,
        a: None,
        m,
        m_bar: None,
        m_bar_degenerate: false,
        m_bar_m,
        regime: Regime::Unclassified,
        attracting_interval: (0.0, b),
        grid_points: opts.grid_points,
        notes,
    };

    if report.above_peak(opts.tol) {
        match find_a(rp, report.peak, b, opts) {
            Ok(a) => report.a = a,
            Err(e) => report.notes.push(e.to_string()),
        }
        match find_m_bar(rp, report.peak, rp.f(report.peak), opts) {
            Ok(mb) => {
                report.m_bar = Some(mb.value);
                report.m_bar_degenerate = mb.degenerate;
            }
            Err(e) => report.notes.push(e.to_string()),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> AnalysisOptions {
        AnalysisOptions::default()
    }

    #[test]
    fn nicholson_equilibria() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let roots = find_equilibria(&rp, &opts());
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0], 0.0);
        assert!((roots[1] - 5f64.ln()).abs() < 1e-12);
        assert!(rp.k(roots[1]).abs() < 1e-12);
    }

    #[test]
    fn nicholson_delta_one_has_only_zero() {
        let rp = ReactionPair::nicholson(1.0, None).unwrap();
        let roots = find_equilibria(&rp, &opts());
        assert_eq!(roots, vec![0.0]);
        assert!(matches!(
            positive_equilibrium(&rp, &roots),
            Err(Error::NoPositiveEquilibrium { .. })
        ));
    }

    #[test]
    fn mackey_glass_equilibria() {
        let rp = ReactionPair::mackey_glass(0.5, 2.0, None).unwrap();
        let roots = find_equilibria(&rp, &opts());
        assert_eq!(roots.len(), 2);
        assert!((roots[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn peaks() {
        let p = find_peak(&ReactionPair::nicholson(0.3, None).unwrap(), &opts()).unwrap();
        assert!((p.location - 1.0).abs() < 1e-10);
        assert!((p.value - (-1f64).exp()).abs() < 1e-15);
        let rp = ReactionPair::mackey_glass(0.5, 3.0, None).unwrap();
        let p = find_peak(&rp, &opts()).unwrap();
        assert!((p.location - 2f64.powf(-1.0 / 3.0)).abs() < 1e-10);
        assert!(rp.dg(p.location).abs() < PEAK_SLOPE_TOLERANCE);
        let p = find_peak(&ReactionPair::mackey_glass(0.5, 2.0, None).unwrap(), &opts()).unwrap();
        assert!((p.location - 1.0).abs() < 1e-10);
    }

    #[test]
    fn local_maxima_handles_plateaus() {
        assert_eq!(local_maxima(&[0.0, 1.0, 1.0, 0.0]), vec![1]);
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 2.0, 1.0]), vec![1, 3]);
        assert_eq!(local_maxima(&[0.0, 1.0, 2.0]), vec![2]);
    }

    #[test]
    fn two_humps_violate_hyp44() {
        use crate::model::TabulatedPair;
        let t = TabulatedPair::parse("0 0 0\n1 1 2\n2 2 0.5\n3 3 2\n4 4 0.5\n").unwrap();
        let rp = ReactionPair::custom(t, None).unwrap();
        match find_peak(&rp, &opts()) {
            Err(Error::Hyp44Violated { first, second }) => {
                assert!((first - 1.0).abs() < 1e-3 && (second - 3.0).abs() < 1e-3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn m_bar_degenerate_at_peak_level() {
        let rp = ReactionPair::nicholson((-1f64).exp(), None).unwrap();
        let mb = find_m_bar(&rp, 1.0, rp.f(1.0), &opts()).unwrap();
        assert!(mb.degenerate);
        assert_eq!(mb.value, 1.0);
        assert!(find_m_bar(&rp, 1.0, -1.0, &opts()).is_err());
    }

    #[test]
    fn find_a_requires_growth_at_peak() {
        let rp = ReactionPair::nicholson(0.5, None).unwrap();
        assert!(find_a(&rp, 1.0, rp.s_max(), &opts()).is_err());
    }

    #[test]
    fn b_min_for_nicholson() {
        // running max is e^{-1} past 1, so B_min ≈ e^{-1}/δ
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let b = find_b_min(&rp, &opts()).unwrap();
        let h = rp.s_max() / (opts().grid_points - 1) as f64;
        assert!((b - (-1f64).exp() / 0.2).abs() <= h);
    }

    #[test]
    fn derivative_bounds_nicholson() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let (alpha, beta) = derivative_bounds(&rp, 1.0, 2.5426, &opts());
        assert!((alpha - 0.2).abs() < 1e-15);
        assert!((beta - (-2f64).exp()).abs() < 1e-12);
    }
}
