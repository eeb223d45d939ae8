//! Grid verification of every standing hypothesis and of the conditions
//! (H1)–(H5).

use std::fmt;

use super::roots::{bisect, linspace};
use super::structure::StructuralReport;
use super::AnalysisOptions;
use crate::error::{Error, Result};
use crate::model::{ReactionPair, ORIGIN_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    T1,
    T2,
    Hyp0,
    Hyp000,
    Hyp2,
    Hypsupl,
    Cond,
    Hyp44,
    H1,
    H2,
    H3,
    H4,
    H5,
    ExpCondition,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 14] = [
        Self::T1,
        Self::T2,
        Self::Hyp0,
        Self::Hyp000,
        Self::Hyp2,
        Self::Hypsupl,
        Self::Cond,
        Self::Hyp44,
        Self::H1,
        Self::H2,
        Self::H3,
        Self::H4,
        Self::H5,
        Self::ExpCondition,
    ];

    pub const ATTRACTIVITY: [Hypothesis; 5] = [Self::H1, Self::H2, Self::H3, Self::H4, Self::H5];

    pub fn label(self) -> &'static str {
        match self {
            Self::T1 => "T1",
            Self::T2 => "T2",
            Self::Hyp0 => "hyp0",
            Self::Hyp000 => "hyp000",
            Self::Hyp2 => "hyp2",
            Self::Hypsupl => "Hypsupl",
            Self::Cond => "cond",
            Self::Hyp44 => "hyp44",
            Self::H1 => "H1",
            Self::H2 => "H2",
            Self::H3 => "H3",
            Self::H4 => "H4",
            Self::H5 => "H5",
            Self::ExpCondition => "exp_condition",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Margin within tolerance of zero where strictness was required.
    Degenerate,
    NotApplicable,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Degenerate => "degenerate",
            Status::NotApplicable => "n/a",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub hypothesis: Hypothesis,
    pub status: Status,
    /// Point of the worst margin; always set on failure.
    pub witness: Option<f64>,
    /// Smallest margin seen (positive means satisfied).
    pub margin: Option<f64>,
    pub grid_points: usize,
    pub note: Option<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn not_applicable(h: Hypothesis, why: impl Into<String>) -> Self {
        Verdict {
            hypothesis: h,
            status: Status::NotApplicable,
            witness: None,
            margin: None,
            grid_points: 0,
            note: Some(why.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub verdicts: Vec<Verdict>,
    pub grid_points: usize,
    pub tol: f64,
}

impl HypothesisReport {
    pub fn get(&self, h: Hypothesis) -> &Verdict {
        self.verdicts
            .iter()
            .find(|v| v.hypothesis == h)
            .expect("every hypothesis has a verdict")
    }

    pub fn passed(&self, h: Hypothesis) -> bool {
        self.get(h).passed()
    }

    /// Labels of the passing conditions among (H1)–(H5).
    pub fn attractivity_passes(&self) -> Vec<Hypothesis> {
        Hypothesis::ATTRACTIVITY
            .into_iter()
            .filter(|h| self.passed(*h))
            .collect()
    }
}

/// Worst point of a scan: smallest margin and where it occurred.
#[derive(Clone, Copy, Debug)]
struct Scan {
    margin: f64,
    witness: f64,
    points: usize,
}

impl Scan {
    fn merge(self, other: Scan) -> Scan {
        let points = self.points + other.points;
        let worst = if other.margin < self.margin { other } else { self };
        Scan { points, ..worst }
    }

    fn into_verdict(self, h: Hypothesis, tol: f64, strict: bool) -> Verdict {
        let status = if self.margin > tol || (!strict && self.margin >= -tol) {
            Status::Pass
        } else if self.margin < -tol {
            Status::Fail
        } else {
            Status::Degenerate
        };
        Verdict {
            hypothesis: h,
            status,
            witness: Some(self.witness),
            margin: Some(self.margin),
            grid_points: self.points,
            note: None,
        }
    }
}

/// Grid on `[lo, hi]` with open ends dropped.
fn open_grid(lo: f64, hi: f64, points: usize, lo_open: bool, hi_open: bool) -> Vec<f64> {
    let mut xs = linspace(lo, hi, points);
    if hi_open {
        xs.pop();
    }
    if lo_open && !xs.is_empty() {
        xs.remove(0);
    }
    xs
}

/// Pointwise margin scan, then one refinement pass between the neighbours
/// of the worst grid point.
fn scan_pointwise(xs: &[f64], margin: impl Fn(f64) -> f64, refine_points: usize) -> Option<Scan> {
    if xs.is_empty() {
        return None;
    }
    let mut worst = (0, f64::INFINITY);
    for (i, &s) in xs.iter().enumerate() {
        let m = margin(s);
        if m < worst.1 || m.is_nan() {
            worst = (i, m);
        }
    }
    let mut scan = Scan {
        margin: worst.1,
        witness: xs[worst.0],
        points: xs.len(),
    };
    let lo = xs[worst.0.saturating_sub(1)];
    let hi = xs[(worst.0 + 1).min(xs.len() - 1)];
    if hi > lo && refine_points > 0 {
        for s in open_grid(lo, hi, refine_points + 2, true, true) {
            let m = margin(s);
            scan.points += 1;
            if m < scan.margin {
                scan.margin = m;
                scan.witness = s;
            }
        }
    }
    Some(scan)
}

/// Margin of `v` nondecreasing along `xs`: smallest consecutive increment.
fn scan_nondecreasing(xs: &[f64], v: impl Fn(f64) -> f64) -> Scan {
    let mut scan = Scan {
        margin: f64::INFINITY,
        witness: xs[0],
        points: xs.len(),
    };
    let mut prev = v(xs[0]);
    for w in xs.windows(2) {
        let next = v(w[1]);
        let d = next - prev;
        if d < scan.margin || d.is_nan() {
            scan.margin = d;
            scan.witness = w[0];
        }
        prev = next;
    }
    scan
}

/// `G = f̂⁻¹ ∘ g` on `[M, A]`, with `f̂` the restriction of `f`.
#[derive(Clone, Copy, Debug)]
pub struct GMap<'a> {
    rp: &'a ReactionPair,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

/// Bisection tolerance for `f̂⁻¹`.
pub const INVERSE_TOLERANCE: f64 = 1e-12;

impl<'a> GMap<'a> {
    /// Errors with the offending point unless `f` is strictly increasing on
    /// a `points`-grid of `[lo, hi]`.
    pub fn new(rp: &'a ReactionPair, lo: f64, hi: f64, points: usize) -> Result<Self> {
        let xs = linspace(lo, hi, points);
        for w in xs.windows(2) {
            if !(rp.f(w[1]) > rp.f(w[0])) {
                return Err(Error::Structural(format!(
                    "f is not strictly increasing on [{lo}, {hi}] near s = {}",
                    w[0]
                )));
            }
        }
        Ok(Self {
            rp,
            lo,
            hi,
            f_lo: rp.f(lo),
            f_hi: rp.f(hi),
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `f̂⁻¹(y)`; `None` when `y` is outside `[f(lo), f(hi)]`.
    pub fn inverse_f(&self, y: f64) -> Option<f64> {
        if y < self.f_lo - INVERSE_TOLERANCE || y > self.f_hi + INVERSE_TOLERANCE {
            return None;
        }
        let y = y.clamp(self.f_lo, self.f_hi);
        bisect(|x| self.rp.f(x) - y, self.lo, self.hi, INVERSE_TOLERANCE)
    }

    pub fn apply(&self, s: f64) -> Option<f64> {
        self.inverse_f(self.rp.g(s))
    }

    /// `(G∘G)(s) / s`.
    pub fn ratio(&self, s: f64) -> Option<f64> {
        self.apply(s).and_then(|x| self.apply(x)).map(|y| y / s)
    }
}

fn in_theory_interval(report: &StructuralReport, tol: f64) -> std::result::Result<f64, String> {
    if !report.above_peak(tol) {
        return Err("u* <= M".into());
    }
    report.a.ok_or_else(|| "A does not exist".to_string())
}

fn check_t2(rp: &ReactionPair, report: &StructuralReport, opts: &AnalysisOptions) -> Verdict {
    let g0 = rp.g(0.0);
    let xs = open_grid(0.0, report.b, opts.grid_points, true, false);
    let scan = scan_pointwise(&xs, |s| rp.g(s) - g0, opts.refine_points).unwrap();
    let mut v = scan.into_verdict(Hypothesis::T2, opts.tol, true);
    if report.b_min.is_none() && v.status != Status::Fail {
        v.status = Status::Fail;
        v.witness = Some(report.b);
        v.note = Some("running max of g does not fall below f inside [0, s_max]".into());
    }
    v
}

fn check_hyp0(rp: &ReactionPair, report: &StructuralReport, opts: &AnalysisOptions) -> Verdict {
    let u = report.u_star;
    let b = report.b;
    // min of g over [s, u*]
    let left = linspace(0.0, u, opts.grid_points);
    let mut suffix: Vec<f64> = left.iter().map(|&s| rp.g(s)).collect();
    for i in (0..suffix.len() - 1).rev() {
        suffix[i] = suffix[i].min(suffix[i + 1]);
    }
    let mut scan = Scan {
        margin: f64::INFINITY,
        witness: u,
        points: 0,
    };
    for i in 1..left.len() - 1 {
        let m = suffix[i] - rp.f(left[i]);
        scan.points += 1;
        if m < scan.margin {
            scan.margin = m;
            scan.witness = left[i];
        }
    }
    // max of g over [u*, s]
    let right = linspace(u, b, opts.grid_points);
    let mut running = rp.g(u);
    let mut right_scan = Scan {
        margin: f64::INFINITY,
        witness: b,
        points: 0,
    };
    for &s in &right[1..] {
        running = running.max(rp.g(s));
        let m = rp.f(s) - running;
        right_scan.points += 1;
        if m < right_scan.margin {
            right_scan.margin = m;
            right_scan.witness = s;
        }
    }
    scan.merge(right_scan).into_verdict(Hypothesis::Hyp0, opts.tol, true)
}

fn check_hyp000(rp: &ReactionPair, report: &StructuralReport, opts: &AnalysisOptions) -> Verdict {
    let (df0, dg0) = (rp.df(0.0), rp.dg(0.0));
    let slopes = Scan {
        margin: (dg0 - df0).min(df0),
        witness: 0.0,
        points: 1,
    };
    let f0 = rp.f(0.0);
    let xs = open_grid(0.0, report.b, opts.grid_points, true, false);
    let scan = scan_pointwise(&xs, |s| rp.f(s) - f0, opts.refine_points).unwrap();
    slopes.merge(scan).into_verdict(Hypothesis::Hyp000, opts.tol, true)
}

/// `f < f(c)` on `[lo, c)` and `f > f(c)` on `(c, hi]`.
fn check_split(rp: &ReactionPair, h: Hypothesis, lo: f64, c: f64, hi: f64, opts: &AnalysisOptions) -> Verdict {
    let fc = rp.f(c);
    let left = open_grid(lo, c, opts.grid_points, false, true);
    let right = open_grid(c, hi, opts.grid_points, true, false);
    let a = scan_pointwise(&left, |s| fc - rp.f(s), opts.refine_points);
    let b = scan_pointwise(&right, |s| rp.f(s) - fc, opts.refine_points);
    match (a, b) {
        (Some(a), Some(b)) => a.merge(b),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return Verdict::not_applicable(h, "empty interval"),
    }
    .into_verdict(h, opts.tol, true)
}

fn check_hyp44(rp: &ReactionPair, report: &StructuralReport, opts: &AnalysisOptions) -> Verdict {
    if let Some((first, second)) = report.peak_witnesses {
        return Verdict {
            hypothesis: Hypothesis::Hyp44,
            status: Status::Fail,
            witness: Some(second),
            margin: None,
            grid_points: opts.grid_points,
            note: Some(format!("strict local maxima at {first} and {second}")),
        };
    }
    let up = scan_nondecreasing(&linspace(0.0, report.peak, opts.grid_points), |s| rp.g(s));
    let down = scan_nondecreasing(&linspace(report.peak, report.b, opts.grid_points), |s| -rp.g(s));
    up.merge(down).into_verdict(Hypothesis::Hyp44, opts.tol, false)
}

fn check_monotone_on_theory(
    report: &StructuralReport,
    h: Hypothesis,
    opts: &AnalysisOptions,
    expr: impl Fn(f64) -> f64,
) -> Verdict {
    match in_theory_interval(report, opts.tol) {
        Err(why) => Verdict::not_applicable(h, why),
        Ok(a) => scan_nondecreasing(&linspace(report.peak, a, opts.grid_points), expr).into_verdict(h, opts.tol, false),
    }
}

fn check_composite(
    rp: &ReactionPair,
    report: &StructuralReport,
    h: Hypothesis,
    lo: f64,
    hi: f64,
    cond_ok: bool,
    opts: &AnalysisOptions,
) -> Verdict {
    if !cond_ok {
        return Verdict::not_applicable(h, "cond fails: g leaves [f(M), f(A)] on [M, A]");
    }
    let a = match report.a {
        Some(a) => a,
        None => return Verdict::not_applicable(h, "A does not exist"),
    };
    let map = match GMap::new(rp, report.peak, a, opts.grid_points) {
        Ok(m) => m,
        Err(e) => {
            return Verdict {
                hypothesis: h,
                status: Status::Fail,
                witness: Some(report.peak),
                margin: None,
                grid_points: opts.grid_points,
                note: Some(e.to_string()),
            }
        }
    };
    let xs = linspace(lo, hi, opts.grid_points);
    let mut ratios = Vec::with_capacity(xs.len());
    for &s in &xs {
        match map.ratio(s) {
            Some(r) => ratios.push(r),
            None => {
                return Verdict {
                    hypothesis: h,
                    status: Status::Fail,
                    witness: Some(s),
                    margin: None,
                    grid_points: xs.len(),
                    note: Some("G leaves [M, A]".into()),
                }
            }
        }
    }
    // nonincreasing: margin is the smallest decrement
    let mut scan = Scan {
        margin: f64::INFINITY,
        witness: lo,
        points: xs.len(),
    };
    for i in 0..xs.len() - 1 {
        let d = ratios[i] - ratios[i + 1];
        if d < scan.margin {
            scan.margin = d;
            scan.witness = xs[i];
        }
    }
    scan.into_verdict(h, opts.tol, false)
}

fn check_exp(rp: &ReactionPair, report: &StructuralReport, opts: &AnalysisOptions) -> Verdict {
    let h = Hypothesis::ExpCondition;
    if !report.above_peak(opts.tol) {
        return Verdict::not_applicable(h, "u* <= M");
    }
    let hi = report.a.unwrap_or(report.b);
    let xs = linspace(report.peak, hi, opts.grid_points);
    let mut alpha = (f64::INFINITY, report.peak);
    let mut beta = (0.0f64, report.peak);
    for &s in &xs {
        let d = rp.df(s);
        if d < alpha.0 {
            alpha = (d, s);
        }
        let e = rp.dg(s).abs();
        if e > beta.0 {
            beta = (e, s);
        }
    }
    Scan {
        margin: alpha.0 - beta.0,
        witness: beta.1,
        points: xs.len(),
    }
    .into_verdict(h, opts.tol, true)
}

/// Verdicts for every hypothesis, in [`Hypothesis::ALL`] order.
pub fn check_hypotheses(rp: &ReactionPair, report: &StructuralReport, opts: &AnalysisOptions) -> HypothesisReport {
    let tol = opts.tol;
    let mut out = Vec::with_capacity(Hypothesis::ALL.len());

    let gap = rp.f(0.0) - rp.g(0.0);
    out.push(Verdict {
        hypothesis: Hypothesis::T1,
        status: if gap.abs() <= ORIGIN_TOLERANCE {
            Status::Pass
        } else {
            Status::Fail
        },
        witness: Some(0.0),
        margin: Some(ORIGIN_TOLERANCE - gap.abs()),
        grid_points: 1,
        note: None,
    });
    out.push(check_t2(rp, report, opts));
    out.push(check_hyp0(rp, report, opts));
    out.push(check_hyp000(rp, report, opts));

    out.push(if report.above_peak(tol) {
        check_split(rp, Hypothesis::Hyp2, 0.0, report.peak, report.b, opts)
    } else {
        Verdict::not_applicable(Hypothesis::Hyp2, "u* <= M")
    });

    let theory = in_theory_interval(report, tol);
    out.push(match theory {
        Ok(a) => check_split(rp, Hypothesis::Hypsupl, report.u_star, a, report.b, opts),
        Err(ref why) => Verdict::not_applicable(Hypothesis::Hypsupl, why.clone()),
    });
    let cond = match theory {
        Ok(a) => Scan {
            margin: rp.f(a) - report.peak_value,
            witness: a,
            points: 1,
        }
        .into_verdict(Hypothesis::Cond, tol, false),
        Err(ref why) => Verdict::not_applicable(Hypothesis::Cond, why.clone()),
    };
    let cond_ok = cond.passed();
    out.push(cond);
    out.push(check_hyp44(rp, report, opts));

    let (f0, g0) = (rp.f(0.0), rp.g(0.0));
    out.push(check_monotone_on_theory(report, Hypothesis::H1, opts, |s| {
        (rp.f(s) - f0) * (rp.g(s) - g0)
    }));
    out.push(check_monotone_on_theory(report, Hypothesis::H2, opts, |s| {
        rp.f(s) + rp.g(s)
    }));
    out.push(check_monotone_on_theory(report, Hypothesis::H3, opts, |s| {
        (rp.f(s) - f0) * (rp.g(s) - g0) + rp.f(s) + rp.g(s)
    }));
    match theory {
        Ok(a) => {
            out.push(check_composite(
                rp,
                report,
                Hypothesis::H4,
                report.peak,
                report.u_star,
                cond_ok,
                opts,
            ));
            out.push(check_composite(
                rp,
                report,
                Hypothesis::H5,
                report.u_star,
                a,
                cond_ok,
                opts,
            ));
        }
        Err(why) => {
            out.push(Verdict::not_applicable(Hypothesis::H4, why.clone()));
            out.push(Verdict::not_applicable(Hypothesis::H5, why));
        }
    }
    out.push(check_exp(rp, report, opts));

    HypothesisReport {
        verdicts: out,
        grid_points: opts.grid_points,
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::structure::compute_structure;

    fn hyps(rp: &ReactionPair) -> (StructuralReport, HypothesisReport) {
        let opts = AnalysisOptions::default();
        let rep = compute_structure(rp, &opts).unwrap();
        let h = check_hypotheses(rp, &rep, &opts);
        (rep, h)
    }

    #[test]
    fn nicholson_standard_case() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let (_, h) = hyps(&rp);
        for hy in [
            Hypothesis::T1,
            Hypothesis::T2,
            Hypothesis::Hyp0,
            Hypothesis::Hyp000,
            Hypothesis::Hyp2,
            Hypothesis::Hypsupl,
            Hypothesis::Cond,
            Hypothesis::Hyp44,
            Hypothesis::H4,
            Hypothesis::ExpCondition,
        ] {
            assert!(h.passed(hy), "{hy}: {:?}", h.get(hy));
        }
        let exp = h.get(Hypothesis::ExpCondition);
        assert!((exp.margin.unwrap() - (0.2 - (-2f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn nicholson_h4_fails_past_e_squared() {
        let rp = ReactionPair::nicholson(1.0 / 8.0, None).unwrap();
        let (_, h) = hyps(&rp);
        let v = h.get(Hypothesis::H4);
        assert_eq!(v.status, Status::Fail);
        assert!(v.witness.is_some());
    }

    #[test]
    fn below_peak_marks_theory_conditions_not_applicable() {
        let rp = ReactionPair::mackey_glass(0.5, 2.0, None).unwrap();
        let (_, h) = hyps(&rp);
        assert_eq!(h.get(Hypothesis::H1).status, Status::NotApplicable);
        assert_eq!(h.get(Hypothesis::ExpCondition).status, Status::NotApplicable);
        assert!(h.passed(Hypothesis::Hyp0));
        assert!(h.passed(Hypothesis::Hyp000));
    }

    #[test]
    fn g_map_fixes_equilibrium() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let (rep, _) = hyps(&rp);
        let g = GMap::new(&rp, rep.peak, rep.a.unwrap(), 1000).unwrap();
        assert!((g.apply(rep.u_star).unwrap() - rep.u_star).abs() < 1e-8);
        assert!(g.inverse_f(10.0).is_none());
    }

    #[test]
    fn nondecreasing_scan_reports_drop() {
        let s = scan_nondecreasing(&[0.0, 1.0, 2.0, 3.0], |x| if x < 2.0 { x } else { 0.5 });
        assert_eq!(s.witness, 1.0);
        assert!(s.margin < 0.0);
    }
}
