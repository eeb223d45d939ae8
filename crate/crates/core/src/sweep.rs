//! Parameter sweeps producing stability-region tables.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::analysis::{analyze, find_equilibria, positive_equilibrium, StabilityClass};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::rates::{closed_form_verdict, fit_empirical_rate, solve_rate, RateCertificate};
use crate::simulator::{fluctuation_diagnostics, run, RunOptions, CONVERGENCE_EPS};

/// Environment variable capping the number of sweep threads.
pub const THREADS_ENV: &str = "DELAYRD_THREADS";

/// Fixed header of the region CSV.
pub const REGION_COLUMNS: [&str; 7] = [
    "param1",
    "param2",
    "theory",
    "machinery",
    "sim",
    "gamma_th",
    "gamma_emp",
];

/// Tail of the record used for the oscillation amplitude.
pub const TAIL_FRACTION: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub enum SimVerdict {
    Converged {
        at: f64,
    },
    /// Residual oscillation amplitude over the record tail.
    Oscillating {
        amplitude: f64,
    },
    Skipped,
    Failed(&'static str),
}

impl fmt::Display for SimVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimVerdict::Converged { at } => write!(f, "converged@{at}"),
            SimVerdict::Oscillating { amplitude } => write!(f, "oscillating:{amplitude:e}"),
            SimVerdict::Skipped => f.write_str("skipped"),
            SimVerdict::Failed(code) => write!(f, "error:{code}"),
        }
    }
}

/// A verdict or the code of the error that prevented it.
pub type Outcome<T> = std::result::Result<T, &'static str>;

fn outcome_str(v: &Outcome<StabilityClass>) -> String {
    match v {
        Ok(c) => c.name().to_string(),
        Err("not_applicable") => "n/a".to_string(),
        Err(code) => format!("error:{code}"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionRow {
    /// Empty when the configuration has no `[sweep]` section.
    pub param1: Option<f64>,
    pub param2: Option<f64>,
    pub theory: Outcome<StabilityClass>,
    pub machinery: Outcome<StabilityClass>,
    pub sim: SimVerdict,
    pub gamma_th: Option<f64>,
    pub gamma_emp: Option<f64>,
}

impl RegionRow {
    pub fn csv_record(&self) -> [String; 7] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            opt(self.param1),
            opt(self.param2),
            outcome_str(&self.theory),
            outcome_str(&self.machinery),
            self.sim.to_string(),
            opt(self.gamma_th),
            opt(self.gamma_emp),
        ]
    }
}

/// Analysis, optional simulation and rates of one configuration. Failures
/// land in the row.
pub fn run_cell(cfg: &RunConfig, param1: Option<f64>, param2: Option<f64>, simulate: bool) -> RegionRow {
    let mut row = RegionRow {
        param1,
        param2,
        theory: Err("not_applicable"),
        machinery: Err("not_applicable"),
        sim: SimVerdict::Skipped,
        gamma_th: None,
        gamma_emp: None,
    };
    let rp = match cfg.reaction_pair() {
        Ok(rp) => rp,
        Err(e) => {
            row.theory = Err(e.code());
            row.machinery = Err(e.code());
            row.sim = SimVerdict::Failed(e.code());
            return row;
        }
    };
    row.theory = closed_form_verdict(&rp).map_err(|e| e.code());
    let analysis = analyze(&rp, &cfg.analysis);
    row.machinery = analysis.as_ref().map(|a| a.machinery).map_err(|e| e.code());
    let weights = cfg.kernel.discretize(cfg.solver.dt);
    if let (Ok(a), Ok(w)) = (&analysis, &weights) {
        let cert = RateCertificate::theoretical(&rp, a, w, &cfg.analysis);
        row.gamma_th = solve_rate(cert.alpha, cert.beta, w).ok();
    }
    if !simulate {
        return row;
    }
    let u_star = match &analysis {
        Ok(a) => Ok(a.structure.u_star),
        Err(_) => positive_equilibrium(&rp, &find_equilibria(&rp, &cfg.analysis)),
    };
    let opts = RunOptions {
        snapshots: false,
        convergence: u_star.as_ref().ok().map(|&u| (u, CONVERGENCE_EPS)),
        stop_when_converged: false,
    };
    let record = match run(&rp, &cfg.kernel, cfg.grid, cfg.solver, &cfg.init, &opts) {
        Ok(r) => r,
        Err(e) => {
            row.sim = SimVerdict::Failed(e.code());
            return row;
        }
    };
    row.sim = match (record.converged_at, fluctuation_diagnostics(&record, TAIL_FRACTION)) {
        (Some(at), _) => SimVerdict::Converged { at },
        (None, Ok(fl)) => SimVerdict::Oscillating {
            amplitude: fl.amplitude(),
        },
        (None, Err(e)) => SimVerdict::Failed(e.code()),
    };
    if let Ok(u) = u_star {
        row.gamma_emp = fit_empirical_rate(&record, u).ok().map(|f| f.gamma);
    }
    row
}

/// Number of threads from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config {
                file: format!("${THREADS_ENV}"),
                line: 0,
                key: THREADS_ENV.to_string(),
                message: format!("`{v}` is not a positive integer"),
            }),
        },
    }
}

/// One row per sweep cell, in cell order. Without a `[sweep]` section the
/// configuration itself is the single cell.
pub fn run_sweep(cfg: &RunConfig, threads: Option<usize>) -> Result<Vec<RegionRow>> {
    let (cells, simulate) = match &cfg.sweep {
        None => (vec![(cfg.clone(), None, None)], true),
        Some(s) => {
            let configs = cfg.sweep_configs()?;
            let cells = configs
                .into_iter()
                .zip(s.cells())
                .map(|(c, (a, b))| (c, Some(a), b))
                .collect::<Vec<_>>();
            (cells, s.simulate)
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Structural(format!("cannot start the sweep thread pool: {e}")))?;
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|(c, a, b)| run_cell(c, *a, *b, simulate))
            .collect()
    }))
}

pub fn write_region_csv<W: Write>(rows: &[RegionRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Structural(format!("cannot write CSV: {e}"));
    w.write_record(REGION_COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record(r.csv_record()).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Structural(format!("cannot write CSV: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;
    use std::path::Path;

    fn cfg(extra: &str) -> RunConfig {
        let text = format!(
            "[model]\nkind = nicholson\ndelta = 0.2\n[kernel]\ntau = 1\n[grid]\ncells = 10\n[solver]\ndt = 0.05\nt_end = 20\n{extra}"
        );
        parse_config_str(&text, "t.cfg", Path::new(".")).unwrap()
    }

    #[test]
    fn rows_follow_cell_order() {
        let c = cfg("[sweep]\nparam = delta\nmin = 0.05\nmax = 0.9\nsteps = 12\nsimulate = false\n");
        let rows = run_sweep(&c, Some(3)).unwrap();
        assert_eq!(rows.len(), 12);
        for w in rows.windows(2) {
            assert!(w[0].param1 < w[1].param1);
        }
        assert_eq!(rows[0].theory, Ok(StabilityClass::OutsideTheory));
        assert_eq!(rows[11].theory, Ok(StabilityClass::AttractiveOnly));
        assert!(rows.iter().all(|r| r.sim == SimVerdict::Skipped));
    }

    #[test]
    fn deterministic_csv() {
        let c = cfg("[sweep]\nparam = delta\nmin = 0.15\nmax = 0.35\nsteps = 3\n");
        let render = |threads| {
            let mut buf = Vec::new();
            write_region_csv(&run_sweep(&c, Some(threads)).unwrap(), &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = render(1);
        assert_eq!(a, render(3));
        assert!(a.starts_with("param1,param2,theory,machinery,sim,gamma_th,gamma_emp\n"));
        assert_eq!(a.lines().count(), 4);
    }

    #[test]
    fn failing_cell_stays_in_table() {
        let c = cfg("[sweep]\nparam = delta\nmin = -0.5\nmax = 1.5\nsteps = 3\nsimulate = false\n");
        let rows = run_sweep(&c, None).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].theory, Err("invalid_parameter"));
        assert_eq!(rows[2].machinery, Err("no_positive_equilibrium"));
        assert_eq!(rows[0].csv_record()[2], "error:invalid_parameter");
    }

    #[test]
    fn single_cell_without_sweep() {
        let rows = run_sweep(&cfg(""), Some(1)).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(matches!(
            rows[0].sim,
            SimVerdict::Converged { .. } | SimVerdict::Oscillating { .. }
        ));
        assert!(rows[0].gamma_th.is_some());
    }
}
