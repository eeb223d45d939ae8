//! Run configuration files: `[section]` headers, `key = value` lines, `#`
//! comments.
//!
//! ```text
//! [model]
//! kind = nicholson        # nicholson | mackey_glass | custom
//! delta = 0.2
//!
//! [kernel]
//! shape = uniform         # uniform | trunc_exponential | point_mass | tabulated
//! tau = 1
//!
//! [solver]
//! dt = 0.01
//! t_end = 300
//! ```
//!
//! Defaults: `grid.length = 1`, `grid.cells = 100`, `solver.theta = 1`,
//! `solver.diffusivity = 1`, `solver.output_stride = 1`, `init.kind =
//! constant`, `init.c0 = 0.5`, `init.c1 = 0`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::analysis::roots::linspace;
use crate::analysis::AnalysisOptions;
use crate::error::{Error, Result};
use crate::model::{DelayKernel, KernelShape, ReactionPair, SpatialGrid, TabulatedPair};
use crate::simulator::{HistoryTable, InitialHistory, SolverConfig};

const SECTIONS: &[(&str, &[&str])] = &[
    ("model", &["kind", "delta", "n", "s_max", "table"]),
    ("kernel", &["shape", "tau", "rate", "table"]),
    ("grid", &["length", "cells"]),
    ("solver", &["dt", "t_end", "theta", "diffusivity", "output_stride"]),
    ("init", &["kind", "c0", "c1", "file"]),
    (
        "sweep",
        &[
            "param", "min", "max", "steps", "param2", "min2", "max2", "steps2", "simulate",
        ],
    ),
    ("analysis", &["grid_points", "tol", "refine_points"]),
];

const REQUIRED: &[&str] = &["model", "kernel", "solver"];

/// Parameters a sweep may vary.
pub const SWEEPABLE: &[&str] = &["delta", "n", "s_max"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Nicholson,
    MackeyGlass,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub delta: Option<f64>,
    pub n: Option<f64>,
    pub s_max: Option<f64>,
    pub table: Option<TabulatedPair>,
}

impl ModelSection {
    pub fn build(&self) -> Result<ReactionPair> {
        let need = |v: Option<f64>, name: &'static str| v.ok_or_else(|| Error::invalid(name, f64::NAN, "is required"));
        match self.kind {
            ModelKind::Nicholson => ReactionPair::nicholson(need(self.delta, "delta")?, self.s_max),
            ModelKind::MackeyGlass => {
                ReactionPair::mackey_glass(need(self.delta, "delta")?, need(self.n, "n")?, self.s_max)
            }
            ModelKind::Custom => {
                let t = self
                    .table
                    .clone()
                    .ok_or_else(|| Error::Structural("custom model needs a table".into()))?;
                ReactionPair::custom(t, self.s_max)
            }
        }
    }

    fn set(&mut self, param: &str, value: f64) {
        match param {
            "delta" => self.delta = Some(value),
            "n" => self.n = Some(value),
            "s_max" => self.s_max = Some(value),
            _ => unreachable!("unsweepable parameter {param}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSection {
    pub first: SweepAxis,
    pub second: Option<SweepAxis>,
    pub simulate: bool,
}

impl SweepSection {
    /// Cell parameter values in row-major order (second axis fastest).
    pub fn cells(&self) -> Vec<(f64, Option<f64>)> {
        let mut out = Vec::new();
        for a in self.first.values() {
            match &self.second {
                None => out.push((a, None)),
                Some(ax) => out.extend(ax.values().into_iter().map(|b| (a, Some(b)))),
            }
        }
        out
    }

    pub fn cell_count(&self) -> usize {
        self.first.steps * self.second.as_ref().map_or(1, |s| s.steps)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Name used in error messages.
    pub file: String,
    pub model: ModelSection,
    pub kernel: DelayKernel,
    pub grid: SpatialGrid,
    pub solver: SolverConfig,
    pub init: InitialHistory,
    pub sweep: Option<SweepSection>,
    pub analysis: AnalysisOptions,
}

impl RunConfig {
    pub fn reaction_pair(&self) -> Result<ReactionPair> {
        self.model.build()
    }

    /// Copy with one model parameter replaced.
    pub fn with_param(&self, param: &str, value: f64) -> Result<RunConfig> {
        if !SWEEPABLE.contains(&param) {
            return Err(Error::invalid("param", value, format!("`{param}` cannot be swept")));
        }
        let mut c = self.clone();
        c.model.set(param, value);
        c.sweep = None;
        Ok(c)
    }

    /// One configuration per sweep cell, in [`SweepSection::cells`] order.
    pub fn sweep_configs(&self) -> Result<Vec<RunConfig>> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Structural("configuration has no [sweep] section".into()))?;
        sweep
            .cells()
            .into_iter()
            .map(|(a, b)| {
                let c = self.with_param(&sweep.first.param, a)?;
                match (b, &sweep.second) {
                    (Some(b), Some(ax)) => c.with_param(&ax.param, b),
                    _ => Ok(c),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    line: usize,
}

struct Section<'a> {
    name: &'static str,
    header_line: usize,
    entries: BTreeMap<String, Entry>,
    file: &'a str,
}

impl Section<'_> {
    fn err(&self, key: &str, message: impl Into<String>) -> Error {
        let line = self.entries.get(key).map_or(self.header_line, |e| e.line);
        Error::Config {
            file: self.file.to_string(),
            line,
            key: format!("{}.{key}", self.name),
            message: message.into(),
        }
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.str(key) {
            None => Ok(None),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(self.err(key, format!("`{v}` is not a finite number"))),
            },
        }
    }

    fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| self.err(key, "is required"))
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.str(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| self.err(key, format!("`{v}` is not a nonnegative integer"))),
        }
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.str(key) {
            None => Ok(None),
            Some("true" | "yes" | "1") => Ok(Some(true)),
            Some("false" | "no" | "0") => Ok(Some(false)),
            Some(v) => Err(self.err(key, format!("`{v}` is not a boolean"))),
        }
    }

    /// Maps a parameter error onto the line of `key`.
    fn wrap<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            e @ Error::Config { .. } => e,
            e => self.err(key, e.to_string()),
        })
    }
}

fn strip_quotes(v: &str) -> &str {
    let v = v.trim();
    if v.len() >= 2 && ((v.starts_with('"') && v.ends_with('"')) || (v.starts_with('\'') && v.ends_with('\''))) {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

fn tokenize<'a>(text: &str, file: &'a str) -> Result<BTreeMap<&'static str, Section<'a>>> {
    let mut sections: BTreeMap<&'static str, Section<'a>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    let cfg_err = |line: usize, key: &str, message: String| Error::Config {
        file: file.to_string(),
        line,
        key: key.to_string(),
        message,
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| cfg_err(line, content, "unterminated section header".into()))?
                .trim();
            let (known, _) = SECTIONS
                .iter()
                .find(|(s, _)| *s == name)
                .ok_or_else(|| cfg_err(line, name, "unknown section".into()))?;
            if sections.contains_key(known) {
                return Err(cfg_err(line, name, "section appears twice".into()));
            }
            sections.insert(
                known,
                Section {
                    name: known,
                    header_line: line,
                    entries: BTreeMap::new(),
                    file,
                },
            );
            current = Some(known);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| cfg_err(line, content, "expected `key = value`".into()))?;
        let key = key.trim();
        let section = current.ok_or_else(|| cfg_err(line, key, "key outside any section".into()))?;
        let allowed = SECTIONS.iter().find(|(s, _)| *s == section).unwrap().1;
        if !allowed.contains(&key) {
            return Err(cfg_err(line, &format!("{section}.{key}"), "unknown key".into()));
        }
        let sec = sections.get_mut(section).unwrap();
        if sec.entries.contains_key(key) {
            return Err(cfg_err(line, &format!("{section}.{key}"), "key appears twice".into()));
        }
        sec.entries.insert(
            key.to_string(),
            Entry {
                value: strip_quotes(value).to_string(),
                line,
            },
        );
    }
    for req in REQUIRED {
        if !sections.contains_key(req) {
            return Err(cfg_err(0, &format!("[{req}]"), "missing required section".into()));
        }
    }
    Ok(sections)
}

fn read_relative(sec: &Section<'_>, key: &str, base: &Path) -> Result<String> {
    let rel = sec.str(key).unwrap();
    let path = base.join(rel);
    std::fs::read_to_string(&path).map_err(|e| sec.err(key, format!("cannot read {}: {e}", path.display())))
}

fn parse_model(sec: &Section<'_>, base: &Path) -> Result<ModelSection> {
    let kind = match sec.str("kind") {
        Some("nicholson") => ModelKind::Nicholson,
        Some("mackey_glass") => ModelKind::MackeyGlass,
        Some("custom") => ModelKind::Custom,
        Some(other) => return Err(sec.err("kind", format!("unknown model `{other}`"))),
        None => return Err(sec.err("kind", "is required")),
    };
    let mut model = ModelSection {
        kind,
        delta: sec.f64("delta")?,
        n: sec.f64("n")?,
        s_max: sec.f64("s_max")?,
        table: None,
    };
    match kind {
        ModelKind::Nicholson | ModelKind::MackeyGlass => {
            sec.require_f64("delta")?;
            if kind == ModelKind::MackeyGlass {
                sec.require_f64("n")?;
            } else if model.n.is_some() {
                return Err(sec.err("n", "only mackey_glass takes an exponent"));
            }
            if sec.str("table").is_some() {
                return Err(sec.err("table", "only custom models take a table"));
            }
        }
        ModelKind::Custom => {
            if sec.str("table").is_none() {
                return Err(sec.err("table", "is required for custom models"));
            }
            for k in ["delta", "n"] {
                if sec.str(k).is_some() {
                    return Err(sec.err(k, "custom models take their functions from the table"));
                }
            }
            let text = read_relative(sec, "table", base)?;
            model.table = Some(sec.wrap("table", TabulatedPair::parse(&text))?);
        }
    }
    let key = if sec.str("delta").is_some() { "delta" } else { "kind" };
    sec.wrap(key, model.build())?;
    Ok(model)
}

fn parse_kernel(sec: &Section<'_>, base: &Path) -> Result<DelayKernel> {
    let shape = match sec.str("shape").unwrap_or("uniform") {
        "uniform" => KernelShape::Uniform,
        "trunc_exponential" => KernelShape::TruncExponential {
            rate: sec
                .f64("rate")?
                .ok_or_else(|| sec.err("rate", "is required for trunc_exponential"))?,
        },
        "point_mass" => KernelShape::PointMass,
        "tabulated" => {
            if sec.str("table").is_none() {
                return Err(sec.err("table", "is required for tabulated kernels"));
            }
            let text = read_relative(sec, "table", base)?;
            sec.wrap("table", KernelShape::parse_tabulated(&text))?
        }
        other => return Err(sec.err("shape", format!("unknown kernel shape `{other}`"))),
    };
    if sec.str("rate").is_some() && !matches!(shape, KernelShape::TruncExponential { .. }) {
        return Err(sec.err("rate", "only trunc_exponential takes a rate"));
    }
    let tau = sec.require_f64("tau")?;
    sec.wrap("tau", DelayKernel::new(shape, tau))
}

fn parse_solver(sec: &Section<'_>, kernel: &DelayKernel) -> Result<SolverConfig> {
    let d = SolverConfig::default();
    let c = SolverConfig {
        dt: sec.require_f64("dt")?,
        t_end: sec.require_f64("t_end")?,
        theta: sec.f64("theta")?.unwrap_or(d.theta),
        diffusivity: sec.f64("diffusivity")?.unwrap_or(d.diffusivity),
        output_stride: sec.usize("output_stride")?.unwrap_or(d.output_stride),
    };
    let key = match c.validate() {
        Err(Error::InvalidParameter { name, .. }) => name,
        _ => "dt",
    };
    sec.wrap(key, c.validate())?;
    sec.wrap("dt", kernel.lag_steps(c.dt))?;
    Ok(c)
}

fn parse_init(sec: Option<&Section<'_>>, base: &Path) -> Result<InitialHistory> {
    let Some(sec) = sec else {
        return Ok(InitialHistory::Constant(0.5));
    };
    let c0 = sec.f64("c0")?.unwrap_or(0.5);
    let c1 = sec.f64("c1")?.unwrap_or(0.0);
    let init = match sec.str("kind").unwrap_or("constant") {
        "constant" => InitialHistory::Constant(c0),
        "cosine" => InitialHistory::Cosine { c0, c1 },
        "cosine_ramp" => InitialHistory::CosineRamp { c0, c1 },
        "table" => {
            if sec.str("file").is_none() {
                return Err(sec.err("file", "is required for tabulated histories"));
            }
            let text = read_relative(sec, "file", base)?;
            InitialHistory::Table(sec.wrap("file", HistoryTable::parse(&text))?)
        }
        other => return Err(sec.err("kind", format!("unknown initial history `{other}`"))),
    };
    Ok(init)
}

fn parse_axis(sec: &Section<'_>, model: &ModelSection, suffix: &str) -> Result<Option<SweepAxis>> {
    let pk = format!("param{suffix}");
    let Some(param) = sec.str(&pk) else {
        for k in ["min", "max", "steps"] {
            if sec.str(&format!("{k}{suffix}")).is_some() {
                return Err(sec.err(&format!("{k}{suffix}"), format!("given without {pk}")));
            }
        }
        return Ok(None);
    };
    if !SWEEPABLE.contains(&param) {
        return Err(sec.err(&pk, format!("`{param}` cannot be swept (use one of {SWEEPABLE:?})")));
    }
    let present = match param {
        "delta" => model.kind != ModelKind::Custom,
        "n" => model.kind == ModelKind::MackeyGlass,
        _ => true,
    };
    if !present {
        return Err(sec.err(&pk, format!("the model has no parameter `{param}`")));
    }
    let min = sec.require_f64(&format!("min{suffix}"))?;
    let max = sec.require_f64(&format!("max{suffix}"))?;
    let sk = format!("steps{suffix}");
    let steps = sec.usize(&sk)?.ok_or_else(|| sec.err(&sk, "is required"))?;
    if steps == 0 {
        return Err(sec.err(&sk, "must be at least 1"));
    }
    if max < min {
        return Err(sec.err(&format!("max{suffix}"), "is below min"));
    }
    Ok(Some(SweepAxis {
        param: param.to_string(),
        min,
        max,
        steps,
    }))
}

fn parse_sweep(sec: &Section<'_>, model: &ModelSection) -> Result<SweepSection> {
    let first = parse_axis(sec, model, "")?.ok_or_else(|| sec.err("param", "is required"))?;
    let second = parse_axis(sec, model, "2")?;
    if second.as_ref().is_some_and(|s| s.param == first.param) {
        return Err(sec.err("param2", "repeats param"));
    }
    Ok(SweepSection {
        first,
        second,
        simulate: sec.bool("simulate")?.unwrap_or(true),
    })
}

fn parse_analysis(sec: Option<&Section<'_>>) -> Result<AnalysisOptions> {
    let d = AnalysisOptions::default();
    let Some(sec) = sec else { return Ok(d) };
    let o = AnalysisOptions {
        grid_points: sec.usize("grid_points")?.unwrap_or(d.grid_points),
        tol: sec.f64("tol")?.unwrap_or(d.tol),
        refine_points: sec.usize("refine_points")?.unwrap_or(d.refine_points),
    };
    if o.grid_points < 3 {
        return Err(sec.err("grid_points", "must be at least 3"));
    }
    if !(o.tol >= 0.0) {
        return Err(sec.err("tol", "must be nonnegative"));
    }
    Ok(o)
}

/// Parses configuration text; relative table paths resolve against `base`.
pub fn parse_config_str(text: &str, file: &str, base: &Path) -> Result<RunConfig> {
    let sections = tokenize(text, file)?;
    let model = parse_model(&sections["model"], base)?;
    let kernel = parse_kernel(&sections["kernel"], base)?;
    let grid = match sections.get("grid") {
        None => SpatialGrid::new(1.0, 100)?,
        Some(sec) => {
            let length = sec.f64("length")?.unwrap_or(1.0);
            let cells = sec.usize("cells")?.unwrap_or(100);
            let key = if SpatialGrid::new(length, 100).is_err() {
                "length"
            } else {
                "cells"
            };
            sec.wrap(key, SpatialGrid::new(length, cells))?
        }
    };
    let solver = parse_solver(&sections["solver"], &kernel)?;
    let init = parse_init(sections.get("init"), base)?;
    let sweep = sections.get("sweep").map(|s| parse_sweep(s, &model)).transpose()?;
    let analysis = parse_analysis(sections.get("analysis"))?;
    Ok(RunConfig {
        file: file.to_string(),
        model,
        kernel,
        grid,
        solver,
        init,
        sweep,
        analysis,
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, &path.display().to_string(), &base)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "[model]\nkind = nicholson\ndelta = 0.2\n[kernel]\ntau = 1\n[solver]\ndt = 0.01\nt_end = 10\n";

    fn parse(text: &str) -> Result<RunConfig> {
        parse_config_str(text, "test.cfg", Path::new("."))
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.grid.cells(), 100);
        assert_eq!(c.grid.length(), 1.0);
        assert_eq!(c.solver.theta, 1.0);
        assert_eq!(c.init, InitialHistory::Constant(0.5));
        assert_eq!(c.kernel.tau(), 1.0);
        assert!(c.sweep.is_none());
    }

    #[test]
    fn lag_mismatch_names_both_values() {
        let text = MINIMAL.replace("dt = 0.01", "dt = 0.3");
        let msg = parse(&text).unwrap_err().to_string();
        assert!(msg.contains("0.3") && msg.contains("tau = 1"), "{msg}");
        assert!(msg.starts_with("test.cfg:7:"), "{msg}");
    }

    #[test]
    fn unknown_key_and_section() {
        let e = parse(&format!("{MINIMAL}colour = red\n")).unwrap_err();
        match e {
            Error::Config { line, key, .. } => {
                assert_eq!(line, 9);
                assert_eq!(key, "solver.colour");
            }
            other => panic!("{other:?}"),
        }
        assert!(parse(&format!("{MINIMAL}[plot]\n")).is_err());
        let e = parse("[model]\nkind = nicholson\ndelta = 0.2\n[kernel]\ntau = 1\n").unwrap_err();
        assert!(e.to_string().contains("[solver]"));
    }

    #[test]
    fn bad_values_point_at_their_line() {
        let e = parse(&MINIMAL.replace("delta = 0.2", "delta = -1")).unwrap_err();
        assert!(e.to_string().starts_with("test.cfg:3: key `model.delta`"), "{e}");
        let e = parse(&MINIMAL.replace("delta = 0.2", "delta = abc")).unwrap_err();
        assert!(e.is_configuration());
    }

    #[test]
    fn sweep_expansion() {
        let text = format!("{MINIMAL}[sweep]\nparam = delta\nmin = 0.05\nmax = 0.9\nsteps = 50\n");
        let c = parse(&text).unwrap();
        let cells = c.sweep_configs().unwrap();
        assert_eq!(cells.len(), 50);
        assert_eq!(cells[0].model.delta, Some(0.05));
        assert_eq!(cells[49].model.delta, Some(0.9));
        assert!(parse(&format!("{MINIMAL}[sweep]\nparam = n\nmin = 1\nmax = 2\nsteps = 3\n")).is_err());
    }

    #[test]
    fn two_axis_sweep() {
        let text = "[model]\nkind = mackey_glass\ndelta = 0.5\nn = 3\n[kernel]\ntau = 1\n[solver]\ndt = 0.01\nt_end = 5\n\
                    [sweep]\nparam = delta\nmin = 0.4\nmax = 0.6\nsteps = 3\nparam2 = n\nmin2 = 2\nmax2 = 4\nsteps2 = 2\nsimulate = no\n";
        let c = parse(text).unwrap();
        let s = c.sweep.as_ref().unwrap();
        assert_eq!(s.cell_count(), 6);
        assert!(!s.simulate);
        let cells = s.cells();
        assert_eq!(cells[1], (0.4, Some(4.0)));
    }

    #[test]
    fn init_kinds() {
        let c = parse(&format!("{MINIMAL}[init]\nkind = cosine\nc0 = 0.5\nc1 = 0.3\n")).unwrap();
        assert_eq!(c.init, InitialHistory::Cosine { c0: 0.5, c1: 0.3 });
        assert!(parse(&format!("{MINIMAL}[init]\nkind = spiral\n")).is_err());
    }
}
