use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use delayrd_core::analysis::{analyze, StabilityClass};
use delayrd_core::config::{parse_config, RunConfig};
use delayrd_core::rates::{fit_empirical_rate, RateCertificate};
use delayrd_core::report::{
    analysis_summary, write_analysis_csv, write_rate_csv, write_snapshots_csv, write_trace_csv,
};
use delayrd_core::simulator::{run, RunOptions, CONVERGENCE_EPS};
use delayrd_core::sweep::{run_sweep, threads_from_env, write_region_csv};
use delayrd_core::verify::{run_verify, select, VerifyOptions};
use delayrd_core::Error;

const CONFIG_HELP: &str = "\
Configuration files hold `[section]` headers and `key = value` lines; `#` starts a comment.

  [model]     kind = nicholson | mackey_glass | custom; delta; n (mackey_glass);
              s_max (default 4 u*); table = file of `s f g` rows (custom)
  [kernel]    shape = uniform (default) | trunc_exponential | point_mass | tabulated;
              tau; rate (trunc_exponential); table = file of `a h` rows (tabulated)
  [grid]      length = 1; cells = 100
  [solver]    dt; t_end; theta = 1 (or 0.5); diffusivity = 1; output_stride = 1
  [init]      kind = constant (default) | cosine | cosine_ramp | table; c0 = 0.5; c1 = 0;
              file = table of `x u` or `t x u` rows
  [sweep]     param, min, max, steps; optional param2, min2, max2, steps2;
              simulate = true. Parameters: delta, n, s_max
  [analysis]  grid_points = 10000; tol = 1e-9; refine_points = 64

[model], [kernel] and [solver] are required; tau must be an integer multiple of dt.
Table paths are relative to the configuration file.

Exit codes: 0 success, 1 verdict or criterion failure, 2 configuration error.
DELAYRD_THREADS caps the number of sweep threads.";

#[derive(Parser)]
#[command(name = "delayrd", version, about = "Delayed reaction-diffusion laboratory", after_long_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural constants, hypotheses and regime of the configured model.
    ///
    /// Exits 1 when the verdict is outside_theory.
    Analyze {
        config: PathBuf,
        /// Also write `name,value,status,witness` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Integrate the equation and write trace.csv.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Also write snapshots.csv every `output_stride` steps.
        #[arg(long)]
        snapshots: bool,
    },
    /// Theoretical and empirical decay rates.
    ///
    /// Exits 1 when no certificate exists.
    Rate {
        config: PathBuf,
        /// Output file; stdout by default.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every cell of the `[sweep]` section and write the region table.
    Sweep {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the acceptance suite.
    Verify {
        /// Criterion id (c1..c8) or group (structure, presets, attractivity,
        /// rates, comparison, invariants).
        #[arg(long)]
        filter: Option<String>,
        /// Perturb the tolerances of one criterion so that it fails.
        #[arg(long, value_name = "ID")]
        inject: Option<String>,
        /// Print every check, not only failures.
        #[arg(short, long)]
        verbose: bool,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_configuration() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn verdict(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn cmd_analyze(cfg: &RunConfig, csv: Option<&Path>) -> Outcome {
    let rp = cfg.reaction_pair()?;
    let a = analyze(&rp, &cfg.analysis)?;
    print!("{}", analysis_summary(&rp, &a));
    if let Some(path) = csv {
        write_analysis_csv(&a, create(path)?)?;
    }
    if a.machinery == StabilityClass::OutsideTheory {
        return Err(Failure::verdict("verdict: outside_theory"));
    }
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig, out_dir: &Path, snapshots: bool) -> Outcome {
    let rp = cfg.reaction_pair()?;
    let target = analyze(&rp, &cfg.analysis).ok().map(|a| a.structure.u_star);
    let opts = RunOptions {
        snapshots,
        convergence: target.map(|u| (u, CONVERGENCE_EPS)),
        stop_when_converged: false,
    };
    let rec = run(&rp, &cfg.kernel, cfg.grid, cfg.solver, &cfg.init, &opts)?;
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    write_trace_csv(&rec, create(&out_dir.join("trace.csv"))?)?;
    if snapshots {
        write_snapshots_csv(&rec, create(&out_dir.join("snapshots.csv"))?)?;
    }
    let last = rec.len() - 1;
    println!(
        "t = {}: u in [{}, {}], mean {}",
        rec.times[last], rec.u_min[last], rec.u_max[last], rec.u_mean[last]
    );
    match (target, rec.converged_at) {
        (Some(u), Some(t)) => println!("converged to u* = {u} at t = {t}"),
        (Some(u), None) => println!("not converged to u* = {u} within eps = {CONVERGENCE_EPS}"),
        (None, _) => {}
    }
    Ok(())
}

fn cmd_rate(cfg: &RunConfig, output: Option<&Path>) -> Outcome {
    let rp = cfg.reaction_pair()?;
    let a = analyze(&rp, &cfg.analysis)?;
    let weights = cfg.kernel.discretize(cfg.solver.dt)?;
    let mut cert = RateCertificate::theoretical(&rp, &a, &weights, &cfg.analysis);
    let rec = run(
        &rp,
        &cfg.kernel,
        cfg.grid,
        cfg.solver,
        &cfg.init,
        &RunOptions::default(),
    )?;
    match fit_empirical_rate(&rec, a.structure.u_star) {
        Ok(fit) => cert = cert.with_empirical(&fit),
        Err(e) => eprintln!("empirical rate: {e}"),
    }
    match output {
        Some(path) => write_rate_csv(&cert, create(path)?)?,
        None => write_rate_csv(&cert, io::stdout().lock())?,
    }
    if cert.gamma_theoretical.is_none() {
        return Err(Failure::verdict(format!(
            "no certificate: alpha = {} does not exceed beta = {}",
            cert.alpha, cert.beta
        )));
    }
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, output: &Path) -> Outcome {
    let threads = threads_from_env()?;
    let rows = run_sweep(cfg, threads)?;
    let mut w = create(output)?;
    write_region_csv(&rows, &mut w)?;
    w.flush().map_err(|source| Error::Io {
        path: output.to_path_buf(),
        source,
    })?;
    println!("{} rows written to {}", rows.len(), output.display());
    Ok(())
}

fn cmd_verify(opts: VerifyOptions, verbose: bool) -> Outcome {
    if select(&opts).is_empty() {
        return Err(Failure::usage(format!(
            "no criterion matches `{}`",
            opts.filter.unwrap_or_default()
        )));
    }
    let reports = run_verify(&opts);
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    for r in &reports {
        println!("{}", if verbose { r.render_verbose() } else { r.render() });
    }
    println!("{} passed, {} failed", reports.len() - failed.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::verdict(format!("failed: {}", failed.join(", "))))
    }
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Analyze { config, csv } => cmd_analyze(&parse_config(&config)?, csv.as_deref()),
        Command::Simulate {
            config,
            out_dir,
            snapshots,
        } => cmd_simulate(&parse_config(&config)?, &out_dir, snapshots),
        Command::Rate { config, output } => cmd_rate(&parse_config(&config)?, output.as_deref()),
        Command::Sweep { config, output } => cmd_sweep(&parse_config(&config)?, &output),
        Command::Verify {
            filter,
            inject,
            verbose,
        } => cmd_verify(VerifyOptions { filter, inject }, verbose),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("delayrd: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
