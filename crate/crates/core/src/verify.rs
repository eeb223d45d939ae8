//! The golden verification suite: structural constants, preset regions,
//! desk-scale convergence, rates, comparison sandwiches and solver
//! invariants.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{
    analyze, build_envelope, envelope_violations, AnalysisOptions, EnvelopeTag, Hypothesis, Regime, StabilityClass,
    Status,
};
use crate::config::parse_config_str;
use crate::error::Result;
use crate::model::{DelayKernel, Field, KernelShape, KernelWeights, ReactionPair, SpatialGrid, TabulatedPair};
use crate::rates::{closed_form_verdict, fit_empirical_rate, rate_function, solve_rate, RateCertificate};
use crate::simulator::{
    comparison_monitor, comparison_tolerance, fluctuation_diagnostics, run, simulate_companion, simulate_scalar,
    CompanionKind, InitialHistory, RunOptions, Simulator, SolverConfig, TrajectoryRecord,
};
use crate::sweep::run_sweep;

/// Seed of every randomized criterion.
pub const SEED: u64 = 0x00de_1a4d;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: &'static str,
    pub group: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub injected: bool,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// `PASS c1 structure ... (0.12 s)` plus one line per failed check.
    pub fn render(&self) -> String {
        let mut s = format!(
            "{} {:<3} {:<12} {} ({:.2} s){}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.group,
            self.title,
            self.elapsed.as_secs_f64(),
            if self.injected { " [tolerance injected]" } else { "" }
        );
        for c in self.failures() {
            let _ = write!(s, "\n     {}: {}", c.name, c.detail);
        }
        s
    }

    /// Every check, passed or not.
    pub fn render_verbose(&self) -> String {
        let mut s = self.render();
        for c in self.checks.iter().filter(|c| c.passed) {
            let _ = write!(s, "\n  ok {}: {}", c.name, c.detail);
        }
        s
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Criterion id or group to run; all when `None`.
    pub filter: Option<String>,
    /// Criterion id whose tolerances are perturbed so that it must fail.
    pub inject: Option<String>,
}

/// Collects checks. Tolerance checks require an infinite margin when the
/// criterion is injected.
struct Ctx {
    checks: Vec<Check>,
    injected: bool,
}

impl Ctx {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    /// `|value - expected| ≤ tol`.
    fn within(&mut self, name: &str, value: f64, expected: f64, tol: f64) {
        let err = (value - expected).abs();
        let tol_eff = if self.injected { -tol } else { tol };
        self.push(
            name,
            err <= tol_eff,
            format!("{value} vs {expected}, error {err:.3e}, tolerance {tol_eff:e}"),
        );
    }

    /// `value ≤ limit`.
    fn at_most(&mut self, name: &str, value: f64, limit: f64) {
        let margin = limit - value;
        let need = if self.injected { f64::INFINITY } else { 0.0 };
        self.push(name, margin >= need, format!("{value:e} against limit {limit:e}"));
    }

    /// `value ≥ limit`.
    fn at_least(&mut self, name: &str, value: f64, limit: f64) {
        let margin = value - limit;
        let need = if self.injected { f64::INFINITY } else { 0.0 };
        self.push(name, margin >= need, format!("{value:e} against floor {limit:e}"));
    }

    fn holds(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.push(name, ok, detail.into());
    }

    /// Records an error as a failed check.
    fn ok<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(name, false, e.to_string());
                None
            }
        }
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub group: &'static str,
    pub title: &'static str,
    run: fn(&mut Ctx),
}

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        id: "c1",
        group: "structure",
        title: "structural constants of Nicholson delta = 0.2",
        run: c1_structure,
    },
    Criterion {
        id: "c2",
        group: "presets",
        title: "preset region boundaries",
        run: c2_presets,
    },
    Criterion {
        id: "c3",
        group: "attractivity",
        title: "desk-scale convergence from three histories",
        run: c3_convergence,
    },
    Criterion {
        id: "c4",
        group: "rates",
        title: "exponential decay certificate",
        run: c4_certificate,
    },
    Criterion {
        id: "c5",
        group: "comparison",
        title: "sub/super-solution sandwich",
        run: c5_sandwich,
    },
    Criterion {
        id: "c6",
        group: "invariants",
        title: "solver and envelope invariants",
        run: c6_invariants,
    },
    Criterion {
        id: "c7",
        group: "rates",
        title: "rate-equation bracketing",
        run: c7_bracketing,
    },
    Criterion {
        id: "c8",
        group: "attractivity",
        title: "attracting-interval capture for Mackey-Glass",
        run: c8_interval,
    },
];

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        self.id == filter || self.group == filter
    }

    pub fn run(&self, injected: bool) -> CriterionReport {
        let mut ctx = Ctx {
            checks: Vec::new(),
            injected,
        };
        let start = Instant::now();
        (self.run)(&mut ctx);
        CriterionReport {
            id: self.id,
            group: self.group,
            title: self.title,
            checks: ctx.checks,
            elapsed: start.elapsed(),
            injected,
        }
    }
}

/// Criteria selected by `opts.filter`, in suite order.
pub fn select(opts: &VerifyOptions) -> Vec<&'static Criterion> {
    CRITERIA
        .iter()
        .filter(|c| opts.filter.as_deref().is_none_or(|f| c.matches(f)))
        .collect()
}

pub fn run_verify(opts: &VerifyOptions) -> Vec<CriterionReport> {
    select(opts)
        .into_iter()
        .map(|c| c.run(opts.inject.as_deref() == Some(c.id)))
        .collect()
}

fn desk_config(t_end: f64) -> SolverConfig {
    SolverConfig {
        dt: 0.01,
        t_end,
        ..SolverConfig::default()
    }
}

fn desk_grid() -> SpatialGrid {
    SpatialGrid::new(1.0, 100).expect("valid grid")
}

fn unit_uniform() -> DelayKernel {
    DelayKernel::uniform(1.0).expect("valid kernel")
}

fn nicholson(delta: f64) -> ReactionPair {
    ReactionPair::nicholson(delta, None).expect("valid delta")
}

fn mackey_glass(delta: f64, n: f64) -> ReactionPair {
    ReactionPair::mackey_glass(delta, n, None).expect("valid parameters")
}

fn final_distance(rec: &TrajectoryRecord, u: f64) -> f64 {
    *rec.sup_distance(u).last().unwrap_or(&f64::INFINITY)
}

fn c1_structure(ctx: &mut Ctx) {
    let rp = nicholson(0.2);
    let Some(a) = ctx.ok("analyze", analyze(&rp, &AnalysisOptions::default())) else {
        return;
    };
    let s = &a.structure;
    ctx.within("u*", s.u_star, 5f64.ln(), 1e-8);
    ctx.within("M", s.peak, 1.0, 1e-8);
    match s.a {
        Some(big_a) => {
            ctx.within("A", big_a, 2.5426, 1e-3);
            ctx.at_least("f(A) >= g(M)", rp.f(big_a), rp.g(s.peak));
        }
        None => ctx.holds("A", false, "A was not found"),
    }
    ctx.holds("regime", s.regime == Regime::BoundedByA, s.regime.name());
    ctx.holds(
        "cond verdict",
        a.hypotheses.passed(Hypothesis::Cond),
        a.hypotheses.get(Hypothesis::Cond).status.name(),
    );
}

fn sweep_text(model: &str, param: &str, min: f64, max: f64) -> String {
    format!(
        "[model]\n{model}\n[kernel]\ntau = 1\n[solver]\ndt = 0.01\nt_end = 10\n\
         [sweep]\nparam = {param}\nmin = {min}\nmax = {max}\nsteps = 50\nsimulate = false\n"
    )
}

/// Machinery reaches at least the closed-form class wherever the closed form
/// certifies something.
fn covers(theory: StabilityClass, machinery: StabilityClass) -> bool {
    match theory {
        StabilityClass::ExpStable => machinery == StabilityClass::ExpStable,
        StabilityClass::AttractiveOnly => machinery.is_attractive(),
        StabilityClass::OutsideTheory => true,
    }
}

fn c2_presets(ctx: &mut Ctx) {
    let opts = AnalysisOptions::default();
    let text = sweep_text("kind = nicholson\ndelta = 0.2", "delta", 0.05, 0.9);
    let cfg = parse_config_str(&text, "<nicholson sweep>", Path::new(".")).expect("built-in config");
    let Some(rows) = ctx.ok("nicholson sweep", run_sweep(&cfg, None)) else {
        return;
    };
    ctx.holds("nicholson rows", rows.len() == 50, format!("{} rows", rows.len()));
    let deltas: Vec<f64> = rows.iter().map(|r| r.param1.unwrap_or(f64::NAN)).collect();
    let theory: Vec<Option<StabilityClass>> = rows.iter().map(|r| r.theory.ok()).collect();
    let flips: Vec<usize> = (0..rows.len() - 1).filter(|&i| theory[i] != theory[i + 1]).collect();
    ctx.holds(
        "nicholson flip count",
        flips.len() == 2,
        format!("flips after cells {flips:?}"),
    );
    let half_cell = 0.5 * (0.9 - 0.05) / 49.0;
    for (k, (bound, name)) in [(E.powi(-2), "1/delta = e^2"), (E.recip(), "1/delta = e")]
        .into_iter()
        .enumerate()
    {
        match flips.get(k) {
            Some(&i) => {
                ctx.holds(
                    &format!("flip at {name} bracketed"),
                    deltas[i] < bound && bound <= deltas[i + 1],
                    format!("cells {} and {}", deltas[i], deltas[i + 1]),
                );
                ctx.within(
                    &format!("flip at {name}"),
                    0.5 * (deltas[i] + deltas[i + 1]),
                    bound,
                    half_cell,
                );
            }
            None => ctx.holds(&format!("flip at {name}"), false, "missing"),
        }
    }
    let disagree: Vec<f64> = rows
        .iter()
        .filter(|r| match (r.theory, r.machinery) {
            (Ok(t), Ok(m)) => !covers(t, m),
            _ => true,
        })
        .map(|r| r.param1.unwrap_or(f64::NAN))
        .collect();
    ctx.holds(
        "nicholson machinery covers theory",
        disagree.is_empty(),
        format!("disagreeing cells {disagree:?}"),
    );
    // Directly on either side of both boundaries.
    let expected = [
        (E * (1.0 - 1e-3), StabilityClass::AttractiveOnly),
        (E * (1.0 + 1e-3), StabilityClass::ExpStable),
        (E * E * (1.0 - 1e-3), StabilityClass::ExpStable),
        (E * E * (1.0 + 1e-3), StabilityClass::OutsideTheory),
    ];
    for (inv, class) in expected {
        let rp = nicholson(1.0 / inv);
        let got = closed_form_verdict(&rp).ok();
        ctx.holds(
            &format!("theory at 1/delta = {inv:.5}"),
            got == Some(class),
            format!("{got:?}"),
        );
        if class != StabilityClass::OutsideTheory {
            let m = analyze(&rp, &opts).map(|a| a.machinery).ok();
            ctx.holds(
                &format!("machinery at 1/delta = {inv:.5}"),
                m == Some(class),
                format!("{m:?}"),
            );
        }
    }

    let text = sweep_text("kind = mackey_glass\ndelta = 0.5\nn = 3", "n", 1.1, 6.0);
    let cfg = parse_config_str(&text, "<mackey-glass sweep>", Path::new(".")).expect("built-in config");
    let Some(rows) = ctx.ok("mackey-glass sweep", run_sweep(&cfg, None)) else {
        return;
    };
    let mut mismatched = Vec::new();
    let mut uncovered = Vec::new();
    let mut attractive_cells = 0;
    let mut worst_boundary: f64 = 0.0;
    for r in &rows {
        let n = r.param1.unwrap_or(f64::NAN);
        // 1/δ = 2: n/(n-1) < 2 iff n > 2, 2 < 4n/(n-1)² iff n² - 4n + 1 < 0.
        let exp = n > 2.0 && n * n - 4.0 * n + 1.0 < 0.0;
        let attr = n <= 2.0 || 2.0 * (n - 2.0) < n;
        let independent = if exp {
            StabilityClass::ExpStable
        } else if attr {
            StabilityClass::AttractiveOnly
        } else {
            StabilityClass::OutsideTheory
        };
        if r.theory != Ok(independent) {
            mismatched.push(n);
        }
        match (r.theory, r.machinery) {
            (Ok(t), Ok(m)) if covers(t, m) => {}
            _ => uncovered.push(n),
        }
        if r.theory.is_ok_and(|t| t.is_attractive()) {
            attractive_cells += 1;
            worst_boundary = worst_boundary.max(n);
        }
    }
    ctx.holds(
        "mackey-glass theory matches closed forms",
        mismatched.is_empty(),
        format!("mismatched cells {mismatched:?}"),
    );
    ctx.holds(
        "mackey-glass machinery covers theory",
        uncovered.is_empty(),
        format!("uncovered cells {uncovered:?}"),
    );
    let expected_cells = rows.iter().filter(|r| r.param1.is_some_and(|n| n < 4.0)).count();
    ctx.holds(
        "mackey-glass attractive cells",
        attractive_cells == expected_cells,
        format!("{attractive_cells} attractive cells, {expected_cells} with n < 4"),
    );
    ctx.at_most("mackey-glass largest attractive n", worst_boundary, 4.0);

    for (inv, want) in [(7.38, Status::Pass), (7.40, Status::Fail)] {
        match analyze(&nicholson(1.0 / inv), &opts) {
            Ok(a) => {
                let v = a.hypotheses.get(Hypothesis::H4);
                ctx.holds(
                    &format!("H4 at 1/delta = {inv}"),
                    v.status == want,
                    format!("{} with margin {:?}", v.status, v.margin),
                );
            }
            Err(e) => ctx.holds(&format!("H4 at 1/delta = {inv}"), false, e.to_string()),
        }
    }
}

fn c3_convergence(ctx: &mut Ctx) {
    let rp = nicholson(0.2);
    let u_star = 5f64.ln();
    let histories = [
        ("constant 0.5", InitialHistory::Constant(0.5)),
        ("constant 3.0", InitialHistory::Constant(3.0)),
        ("cosine", InitialHistory::Cosine { c0: 0.5, c1: 0.3 }),
    ];
    let kernel = unit_uniform();
    let results: Vec<_> = histories
        .par_iter()
        .map(|(_, init)| {
            run(
                &rp,
                &kernel,
                desk_grid(),
                desk_config(300.0),
                init,
                &RunOptions::default(),
            )
        })
        .collect();
    for ((name, _), r) in histories.iter().zip(results) {
        if let Some(rec) = ctx.ok(name, r) {
            let t_last = rec.times.last().copied().unwrap_or(0.0);
            ctx.holds(
                &format!("{name} reaches t = 300"),
                (t_last - 300.0).abs() < 1e-6,
                format!("ends at {t_last}"),
            );
            ctx.at_most(
                &format!("{name}: |u - u*| at t = 300"),
                final_distance(&rec, u_star),
                1e-4,
            );
        }
    }
}

fn c4_certificate(ctx: &mut Ctx) {
    let rp = nicholson(0.2);
    let opts = AnalysisOptions::default();
    let Some(a) = ctx.ok("analyze", analyze(&rp, &opts)) else {
        return;
    };
    let kernel = unit_uniform();
    let weights = kernel.discretize(0.01).expect("dt divides tau");
    let cert = RateCertificate::theoretical(&rp, &a, &weights, &opts);
    ctx.within("alpha", cert.alpha, 0.2, 1e-9);
    ctx.within("beta", cert.beta, E.powi(-2), 1e-9);
    let Some(gamma) = cert.gamma_theoretical else {
        ctx.holds("gamma_theoretical", false, "no certificate");
        return;
    };
    ctx.within("gamma_theoretical", gamma, 0.0605, 1e-4);
    let run_ = run(
        &rp,
        &kernel,
        desk_grid(),
        desk_config(300.0),
        &InitialHistory::Constant(0.5),
        &RunOptions::default(),
    );
    let Some(rec) = ctx.ok("simulate", run_) else {
        return;
    };
    if let Some(fit) = ctx.ok("fit", fit_empirical_rate(&rec, a.structure.u_star)) {
        ctx.at_least("gamma_empirical >= 0.9 gamma_theoretical", fit.gamma, 0.9 * gamma);
    }
}

fn random_history(rng: &mut ChaCha8Rng) -> InitialHistory {
    let c0: f64 = rng.random_range(0.2..2.0);
    let room = (2.5 - c0).min(c0 - 0.05);
    let c1 = rng.random_range(-room..room);
    if rng.random_bool(0.5) {
        InitialHistory::Cosine { c0, c1 }
    } else {
        InitialHistory::CosineRamp { c0, c1 }
    }
}

fn c5_sandwich(ctx: &mut Ctx) {
    let rp = nicholson(0.2);
    let opts = AnalysisOptions::default();
    let Some(a) = ctx.ok("analyze", analyze(&rp, &opts)) else {
        return;
    };
    let (Some(lower), Some(upper)) = (
        ctx.ok("g_M_B", build_envelope(&rp, &a.structure, EnvelopeTag::GMB, &opts)),
        ctx.ok(
            "running_max",
            build_envelope(&rp, &a.structure, EnvelopeTag::RunningMax, &opts),
        ),
    ) else {
        return;
    };
    let config = desk_config(200.0);
    let grid = desk_grid();
    let kernel = unit_uniform();
    let weights = kernel.discretize(config.dt).expect("dt divides tau");
    let tol = comparison_tolerance(config.dt);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let histories: Vec<InitialHistory> = (0..10).map(|_| random_history(&mut rng)).collect();
    let outcomes: Vec<_> = histories
        .par_iter()
        .map(|init| -> Result<_> {
            let rec = run(&rp, &kernel, grid, config, init, &RunOptions::default())?;
            let companion = |kind, env| simulate_companion(kind, init, &grid, env, &rp, &weights, &config);
            let sub = companion(CompanionKind::Sub, &lower)?;
            let sup = companion(CompanionKind::Super, &upper)?;
            let good = comparison_monitor(&rec, &sub, &sup, tol);
            let swapped_sub = companion(CompanionKind::Sub, &upper)?;
            let swapped_sup = companion(CompanionKind::Super, &lower)?;
            let swapped = comparison_monitor(&rec, &swapped_sub, &swapped_sup, tol);
            Ok((good, swapped))
        })
        .collect();
    let mut controls = 0;
    for (i, (init, out)) in histories.iter().zip(outcomes).enumerate() {
        let Some((good, swapped)) = ctx.ok(&format!("history {i}"), out) else {
            continue;
        };
        ctx.at_most(&format!("history {i} ({init:?}) worst excess"), good.worst_excess, tol);
        ctx.holds(
            &format!("history {i} checked every output time"),
            good.checked == config.steps() as usize + 1,
            format!("{} samples", good.checked),
        );
        if !swapped.holds {
            controls += 1;
        }
    }
    ctx.holds(
        "swapped envelopes are caught",
        controls > 0,
        format!("{controls} of 10 controls violated"),
    );
}

fn zero_pair() -> ReactionPair {
    let table = TabulatedPair::new(vec![0.0, 10.0], vec![0.0, 0.0], vec![0.0, 0.0]).expect("valid table");
    ReactionPair::custom(table, None).expect("valid pair")
}

/// Steps `sim` and returns the largest per-step change of the spatial mean.
fn mean_drift(sim: &mut Simulator<'_>, steps: usize) -> Result<f64> {
    let mut prev = sim.current().mean();
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        let m = sim.step()?.mean();
        worst = worst.max((m - prev).abs());
        prev = m;
    }
    Ok(worst)
}

fn diffusion_error(cells: usize) -> Result<f64> {
    let length = 10.0;
    let rp = zero_pair();
    let grid = SpatialGrid::new(length, cells)?;
    let config = SolverConfig {
        dt: 0.01,
        t_end: 10.0,
        theta: 0.5,
        ..SolverConfig::default()
    };
    let weights = KernelWeights::from_raw(config.dt, vec![1.0])?;
    let init = Field::from_fn(&grid, |x| 1.0 + (PI * x / length).cos());
    let mut sim = Simulator::from_fields(&rp, weights, grid, config, vec![init])?;
    for _ in 0..config.steps() {
        sim.step()?;
    }
    let decay = (-PI * PI * config.t_end / (length * length)).exp();
    let exact = Field::from_fn(&grid, |x| 1.0 + decay * (PI * x / length).cos());
    Ok(sim
        .current()
        .iter()
        .zip(exact.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn c6_invariants(ctx: &mut Ctx) {
    let kernel = unit_uniform();
    for (name, rp, u_star) in [
        ("nicholson", nicholson(0.2), 5f64.ln()),
        ("mackey-glass", mackey_glass(0.5, 3.0), 1.0),
    ] {
        let config = desk_config(1000.0);
        let r = run(
            &rp,
            &kernel,
            desk_grid(),
            config,
            &InitialHistory::Constant(u_star),
            &RunOptions::default(),
        );
        if let Some(rec) = ctx.ok(name, r) {
            ctx.holds(
                &format!("{name} step count"),
                rec.len() == 100_001,
                format!("{} samples", rec.len()),
            );
            let drift = rec.sup_distance(u_star).into_iter().fold(0.0, f64::max);
            ctx.at_most(&format!("{name} equilibrium drift over 1e5 steps"), drift, 1e-8);
        }
    }

    let rp = zero_pair();
    let grid = desk_grid();
    let config = desk_config(10.0);
    let init = InitialHistory::Cosine { c0: 1.0, c1: 0.5 };
    let drift = Simulator::new(&rp, &kernel, grid, config, &init).and_then(|mut s| mean_drift(&mut s, 1000));
    if let Some(d) = ctx.ok("pure diffusion", drift) {
        ctx.at_most("pure diffusion mean change per step", d, 1e-12);
    }

    let rp = nicholson(0.2);
    let config = desk_config(50.0);
    let weights = kernel.discretize(config.dt).expect("dt divides tau");
    let pde = run(
        &rp,
        &kernel,
        grid,
        config,
        &InitialHistory::Constant(0.5),
        &RunOptions::default(),
    );
    let ode = simulate_scalar(&vec![0.5; weights.len()], |v| rp.g(v), &rp, &weights, &config);
    if let (Some(pde), Some(ode)) = (ctx.ok("constant run", pde), ctx.ok("scalar run", ode)) {
        let n = pde.len().min(ode.values.len());
        ctx.holds(
            "constant run length",
            pde.len() == ode.values.len(),
            format!("{} vs {}", pde.len(), ode.values.len()),
        );
        let worst = (0..n)
            .map(|i| {
                (pde.u_max[i] - ode.values[i])
                    .abs()
                    .max((pde.u_min[i] - ode.values[i]).abs())
            })
            .fold(0.0, f64::max);
        ctx.at_most("constant run vs scalar equation", worst, 1e-12);
    }

    let errors: Vec<Option<f64>> = [10, 20, 40]
        .into_iter()
        .map(|n| ctx.ok(&format!("diffusion N = {n}"), diffusion_error(n)))
        .collect();
    if let [Some(e10), Some(e20), Some(e40)] = errors[..] {
        ctx.at_least("spatial order 10 -> 20", (e10 / e20).log2(), 1.8);
        ctx.at_least("spatial order 20 -> 40", (e20 / e40).log2(), 1.8);
    }

    let opts = AnalysisOptions::default();
    let settings: Vec<(String, ReactionPair)> = [0.15, 0.2, 0.25, 0.3, 0.35]
        .into_iter()
        .map(|d| (format!("nicholson delta = {d}"), nicholson(d)))
        .chain(
            [(0.5, 3.0), (0.4, 3.0), (0.6, 4.0), (0.5, 2.5), (0.7, 5.0)]
                .into_iter()
                .map(|(d, n)| (format!("mackey-glass delta = {d}, n = {n}"), mackey_glass(d, n))),
        )
        .collect();
    for (name, rp) in &settings {
        let Some(a) = ctx.ok(name, analyze(rp, &opts)) else {
            continue;
        };
        let mut built = Vec::new();
        for tag in EnvelopeTag::ALL {
            if let Ok(env) = build_envelope(rp, &a.structure, tag, &opts) {
                let v = envelope_violations(&env, rp, opts.tol);
                ctx.holds(&format!("{name}: {tag}"), v.is_empty(), v.join("; "));
                built.push(tag);
            }
        }
        ctx.holds(
            &format!("{name}: envelopes built"),
            built.contains(&EnvelopeTag::RunningMax) && built.contains(&EnvelopeTag::GMB),
            format!("{built:?}"),
        );
    }
}

fn random_kernel(rng: &mut ChaCha8Rng) -> (DelayKernel, f64) {
    let tau = [0.5, 1.0, 2.0][rng.random_range(0..3)];
    let dt = [0.01, 0.05, 0.1][rng.random_range(0..3)];
    let shape = match rng.random_range(0..4) {
        0 => KernelShape::Uniform,
        1 => KernelShape::TruncExponential {
            rate: rng.random_range(-3.0..5.0),
        },
        2 => KernelShape::PointMass,
        _ => {
            let lags: Vec<f64> = (0..=8).map(|i| tau * i as f64 / 8.0).collect();
            let density = lags.iter().map(|_| rng.random_range(0.0..1.0)).collect();
            KernelShape::Tabulated { lags, density }
        }
    };
    (DelayKernel::new(shape, tau).expect("valid kernel"), dt)
}

fn c7_bracketing(ctx: &mut Ctx) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x7);
    let mut worst: f64 = 0.0;
    let mut bracket_failures = Vec::new();
    let mut range_failures = Vec::new();
    for i in 0..100 {
        let alpha = rng.random_range(0.01..5.0);
        let beta = alpha * rng.random_range(0.01..0.99);
        let (kernel, dt) = random_kernel(&mut rng);
        let Some(weights) = ctx.ok(&format!("triple {i} kernel"), kernel.discretize(dt)) else {
            continue;
        };
        let (f0, f1) = (
            rate_function(beta, &weights, 0.0),
            rate_function(beta, &weights, alpha - beta),
        );
        if !(f0 < alpha && alpha < f1) {
            bracket_failures.push(i);
        }
        match solve_rate(alpha, beta, &weights) {
            Ok(g) => {
                worst = worst.max((rate_function(beta, &weights, g) - alpha).abs());
                if !(g > 0.0 && g < alpha - beta) {
                    range_failures.push(i);
                }
            }
            Err(e) => ctx.holds(&format!("triple {i}"), false, e.to_string()),
        }
    }
    ctx.holds(
        "F(0) < alpha < F(alpha - beta)",
        bracket_failures.is_empty(),
        format!("{bracket_failures:?}"),
    );
    ctx.holds(
        "gamma in (0, alpha - beta)",
        range_failures.is_empty(),
        format!("{range_failures:?}"),
    );
    ctx.at_most("worst |F(gamma) - alpha|", worst, 1e-10);
}

fn c8_interval(ctx: &mut Ctx) {
    let rp = mackey_glass(0.5, 3.0);
    let Some(a) = ctx.ok("analyze", analyze(&rp, &AnalysisOptions::default())) else {
        return;
    };
    let s = &a.structure;
    ctx.holds("regime", s.regime == Regime::BoundedByA, s.regime.name());
    let Some(big_a) = s.a else {
        ctx.holds("A", false, "A was not found");
        return;
    };
    let kernel = unit_uniform();
    let histories = [
        InitialHistory::Constant(0.3),
        InitialHistory::Cosine { c0: 1.2, c1: 0.8 },
    ];
    let results: Vec<_> = histories
        .par_iter()
        .map(|init| {
            run(
                &rp,
                &kernel,
                desk_grid(),
                desk_config(300.0),
                init,
                &RunOptions::default(),
            )
        })
        .collect();
    for (init, r) in histories.iter().zip(results) {
        let name = format!("{init:?}");
        let Some(rec) = ctx.ok(&name, r) else { continue };
        if let Some(fl) = ctx.ok(&name, fluctuation_diagnostics(&rec, 0.2)) {
            ctx.at_least(&format!("{name}: tail minimum"), fl.u_inf_inf, s.peak - 1e-3);
            ctx.at_most(&format!("{name}: tail maximum"), fl.u_sup_inf, big_a + 1e-3);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_groups_and_ids() {
        let ids = |f: &str| {
            select(&VerifyOptions {
                filter: Some(f.into()),
                inject: None,
            })
            .iter()
            .map(|c| c.id)
            .collect::<Vec<_>>()
        };
        assert_eq!(ids("rates"), ["c4", "c7"]);
        assert_eq!(ids("c1"), ["c1"]);
        assert!(ids("nothing").is_empty());
        assert_eq!(select(&VerifyOptions::default()).len(), 8);
    }

    #[test]
    fn injection_fails_the_named_criterion() {
        let opts = VerifyOptions {
            filter: Some("c7".into()),
            inject: Some("c7".into()),
        };
        let reports = run_verify(&opts);
        assert_eq!(reports.len(), 1);
        assert!(!reports[0].passed());
        assert!(reports[0].render().starts_with("FAIL c7"));
    }

    #[test]
    fn structure_criterion_passes() {
        let r = CRITERIA[0].run(false);
        assert!(r.passed(), "{}", r.render());
    }
}
