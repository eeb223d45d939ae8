//! Text summaries and CSV tables of analyses, trajectories and rates.

use std::fmt::Write as _;
use std::io::Write;

use crate::analysis::Analysis;
use crate::error::{Error, Result};
use crate::model::ReactionPair;
use crate::rates::RateCertificate;
use crate::simulator::TrajectoryRecord;

fn csv_err(e: csv::Error) -> Error {
    Error::Structural(format!("cannot write CSV: {e}"))
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Human-readable report of an analysis.
pub fn analysis_summary(rp: &ReactionPair, a: &Analysis) -> String {
    let s = &a.structure;
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.10}"));
    let mut out = String::new();
    let params = match (rp.delta(), rp.exponent()) {
        (Some(d), Some(n)) => format!(" (delta = {d}, n = {n})"),
        (Some(d), None) => format!(" (delta = {d})"),
        _ => String::new(),
    };
    let _ = writeln!(out, "model        {}{params}", rp.kind_name());
    let _ = writeln!(out, "u*           {:.10}", s.u_star);
    let _ = writeln!(
        out,
        "M            {:.10}{}",
        s.peak,
        if s.peak_at_boundary { " (search bound)" } else { "" }
    );
    let _ = writeln!(out, "g(M)         {:.10}", s.peak_value);
    let _ = writeln!(out, "B            {:.10}", s.b);
    let _ = writeln!(out, "B_min        {}", opt(s.b_min));
    let _ = writeln!(out, "A            {}", opt(s.a));
    let _ = writeln!(out, "m            {}", opt(s.m));
    let _ = writeln!(
        out,
        "m_bar        {}{}",
        opt(s.m_bar),
        if s.m_bar_degenerate { " (degenerate)" } else { "" }
    );
    let _ = writeln!(out, "m_bar_m      {}", opt(s.m_bar_m));
    let _ = writeln!(out, "regime       {}", s.regime.name());
    let (lo, hi) = s.attracting_interval;
    let _ = writeln!(out, "interval     [{lo:.10}, {hi:.10}]");
    let _ = writeln!(out, "verdict      {}", a.machinery.name());
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<14} {:<11} {:>16} {:>16}",
        "hypothesis", "status", "margin", "witness"
    );
    for v in &a.hypotheses.verdicts {
        let _ = write!(
            out,
            "{:<14} {:<11} {:>16} {:>16}",
            v.hypothesis.label(),
            v.status.name(),
            v.margin.map_or("-".into(), |m| format!("{m:.3e}")),
            v.witness.map_or("-".into(), |w| format!("{w:.8}")),
        );
        if let Some(note) = &v.note {
            let _ = write!(out, "  {note}");
        }
        let _ = writeln!(out);
    }
    for n in s.notes.iter().chain(rp.warnings()) {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

/// `name,value,status,witness` rows: constants first, then hypotheses.
pub fn write_analysis_csv<W: Write>(a: &Analysis, out: W) -> Result<()> {
    let s = &a.structure;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "value", "status", "witness"])
        .map_err(csv_err)?;
    let constants = [
        ("u_star", Some(s.u_star)),
        ("M", Some(s.peak)),
        ("g_M", Some(s.peak_value)),
        ("B", Some(s.b)),
        ("B_min", s.b_min),
        ("A", s.a),
        ("m", s.m),
        ("m_bar", s.m_bar),
        ("m_bar_m", s.m_bar_m),
        ("interval_lo", Some(s.attracting_interval.0)),
        ("interval_hi", Some(s.attracting_interval.1)),
    ];
    for (name, v) in constants {
        let status = if v.is_some() { "ok" } else { "absent" };
        w.write_record([name, &num(v), status, ""]).map_err(csv_err)?;
    }
    w.write_record(["regime", s.regime.name(), "ok", ""]).map_err(csv_err)?;
    w.write_record(["verdict", a.machinery.name(), "ok", ""])
        .map_err(csv_err)?;
    for v in &a.hypotheses.verdicts {
        w.write_record([v.hypothesis.label(), &num(v.margin), v.status.name(), &num(v.witness)])
            .map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::Structural(format!("cannot write CSV: {e}")))
}

/// `t,u_min,u_max,u_mean`, one row per recorded step.
pub fn write_trace_csv<W: Write>(rec: &TrajectoryRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "u_min", "u_max", "u_mean"]).map_err(csv_err)?;
    for i in 0..rec.len() {
        w.write_record([
            rec.times[i].to_string(),
            rec.u_min[i].to_string(),
            rec.u_max[i].to_string(),
            rec.u_mean[i].to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::Structural(format!("cannot write CSV: {e}")))
}

/// `t,x,u`, long format.
pub fn write_snapshots_csv<W: Write>(rec: &TrajectoryRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "u"]).map_err(csv_err)?;
    for snap in &rec.snapshots {
        let t = snap.t.to_string();
        for (x, u) in rec.nodes.iter().zip(&snap.values) {
            w.write_record([t.clone(), x.to_string(), u.to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush()
        .map_err(|e| Error::Structural(format!("cannot write CSV: {e}")))
}

pub const RATE_COLUMNS: [&str; 8] = [
    "alpha",
    "beta",
    "interval_lo",
    "interval_hi",
    "gamma_th",
    "gamma_emp",
    "c_emp",
    "verdict",
];

pub fn write_rate_csv<W: Write>(cert: &RateCertificate, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATE_COLUMNS).map_err(csv_err)?;
    w.write_record([
        cert.alpha.to_string(),
        cert.beta.to_string(),
        cert.interval.0.to_string(),
        cert.interval.1.to_string(),
        num(cert.gamma_theoretical),
        num(cert.gamma_empirical),
        num(cert.c_empirical),
        cert.verdict.name().to_string(),
    ])
    .map_err(csv_err)?;
    w.flush()
        .map_err(|e| Error::Structural(format!("cannot write CSV: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, AnalysisOptions};
    use crate::model::{DelayKernel, SpatialGrid};
    use crate::simulator::{run, InitialHistory, RunOptions, SolverConfig};

    #[test]
    fn analysis_outputs() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let a = analyze(&rp, &AnalysisOptions::default()).unwrap();
        let text = analysis_summary(&rp, &a);
        assert!(text.contains("bounded_by_A"));
        assert!(text.contains("1.6094379124"));
        let mut buf = Vec::new();
        write_analysis_csv(&a, &mut buf).unwrap();
        let csv = String::from_utf8(buf).unwrap();
        assert!(csv.starts_with("name,value,status,witness\nu_star,1.609437912434"));
        assert!(csv.lines().any(|l| l.starts_with("H4,") && l.contains(",pass,")));
    }

    #[test]
    fn trace_and_snapshots() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        let config = SolverConfig {
            dt: 0.1,
            t_end: 1.0,
            output_stride: 5,
            ..SolverConfig::default()
        };
        let opts = RunOptions {
            snapshots: true,
            ..RunOptions::default()
        };
        let grid = SpatialGrid::new(1.0, 4).unwrap();
        let rec = run(
            &rp,
            &DelayKernel::uniform(1.0).unwrap(),
            grid,
            config,
            &InitialHistory::Constant(0.5),
            &opts,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&rec, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 12);
        let mut buf = Vec::new();
        write_snapshots_csv(&rec, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 3 * 5);
    }
}
