use crate::error::{Error, Result};
use crate::table::{parse_numeric_table, MonotoneCubic};

/// Tolerance on `|f(0) - g(0)|` accepted at construction.
pub const ORIGIN_TOLERANCE: f64 = 1e-12;

/// Points sampled on `(0, s_max]` when checking `g(s) > g(0)` for presets.
const GROWTH_SAMPLES: usize = 1000;

/// Custom `(s, f, g)` data interpolated with monotone cubics.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedPair {
    f: MonotoneCubic,
    g: MonotoneCubic,
}

impl TabulatedPair {
    pub fn new(s: Vec<f64>, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if s.first().copied() != Some(0.0) {
            return Err(Error::Table {
                line: 1,
                message: "reaction table must start at s = 0".into(),
            });
        }
        Ok(Self {
            f: MonotoneCubic::new(s.clone(), f)?,
            g: MonotoneCubic::new(s, g)?,
        })
    }

    /// Parses rows of `s f g`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = parse_numeric_table(text, Some(3))?;
        let (mut s, mut f, mut g) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            s.push(r[0]);
            f.push(r[1]);
            g.push(r[2]);
        }
        Self::new(s, f, g)
    }

    pub fn s_end(&self) -> f64 {
        *self.f.knots().last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReactionKind {
    /// `f(u) = δu`, `g(u) = u e^{-u}`.
    Nicholson {
        delta: f64,
    },
    /// `f(u) = δu`, `g(u) = u / (1 + uⁿ)`.
    MackeyGlass {
        delta: f64,
        n: f64,
    },
    Custom(TabulatedPair),
}

/// The instantaneous loss `f` and the delayed production `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReactionPair {
    kind: ReactionKind,
    s_max: f64,
    warnings: Vec<String>,
}

impl ReactionPair {
    /// Nicholson blowflies pair. `s_max` defaults to `4 ln(1/δ)`, or 4 when
    /// `δ ≥ 1` leaves no positive steady state.
    pub fn nicholson(delta: f64, s_max: Option<f64>) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid("delta", delta, "must be positive"));
        }
        let kind = ReactionKind::Nicholson { delta };
        Self::preset(kind, s_max)
    }

    /// Mackey-Glass hematopoiesis pair. `δ ≥ 1` is accepted with a warning.
    pub fn mackey_glass(delta: f64, n: f64, s_max: Option<f64>) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid("delta", delta, "must be positive"));
        }
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::invalid("n", n, "must be positive"));
        }
        Self::preset(ReactionKind::MackeyGlass { delta, n }, s_max)
    }

    pub fn custom(table: TabulatedPair, s_max: Option<f64>) -> Result<Self> {
        let end = table.s_end();
        let s_max = s_max.unwrap_or(end);
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(Error::invalid("s_max", s_max, "must be positive"));
        }
        if s_max > end {
            return Err(Error::invalid(
                "s_max",
                s_max,
                format!("exceeds the last tabulated abscissa {end}"),
            ));
        }
        let rp = Self {
            kind: ReactionKind::Custom(table),
            s_max,
            warnings: Vec::new(),
        };
        rp.check_origin()?;
        Ok(rp)
    }

    fn preset(kind: ReactionKind, s_max: Option<f64>) -> Result<Self> {
        let mut rp = Self {
            kind,
            s_max: 1.0,
            warnings: Vec::new(),
        };
        let u_star = rp.closed_form_equilibrium();
        rp.s_max = match s_max {
            Some(s) => s,
            None => match u_star {
                Some(u) => 4.0 * u,
                None => 4.0 * rp.closed_form_peak().unwrap_or(1.0).max(1.0),
            },
        };
        if !(rp.s_max.is_finite() && rp.s_max > 0.0) {
            return Err(Error::invalid("s_max", rp.s_max, "must be positive"));
        }
        match u_star {
            Some(u) if rp.s_max <= u => {
                return Err(Error::invalid(
                    "s_max",
                    rp.s_max,
                    format!("must exceed the positive equilibrium {u}"),
                ))
            }
            None => rp
                .warnings
                .push("delta >= 1: no positive steady state is guaranteed".into()),
            _ => {}
        }
        rp.check_origin()?;
        let g0 = rp.g(0.0);
        for i in 1..=GROWTH_SAMPLES {
            let s = rp.s_max * i as f64 / GROWTH_SAMPLES as f64;
            if !(rp.g(s) > g0) {
                return Err(Error::invalid(
                    "s_max",
                    rp.s_max,
                    format!("g({s}) = {} does not exceed g(0) (factor underflow)", rp.g(s)),
                ));
            }
        }
        Ok(rp)
    }

    fn check_origin(&self) -> Result<()> {
        let gap = (self.f(0.0) - self.g(0.0)).abs();
        if gap > ORIGIN_TOLERANCE {
            return Err(Error::Structural(format!(
                "f(0) = {} differs from g(0) = {}",
                self.f(0.0),
                self.g(0.0)
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> &ReactionKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ReactionKind::Nicholson { .. } => "nicholson",
            ReactionKind::MackeyGlass { .. } => "mackey_glass",
            ReactionKind::Custom(_) => "custom",
        }
    }

    pub fn is_preset(&self) -> bool {
        !matches!(self.kind, ReactionKind::Custom(_))
    }

    pub fn delta(&self) -> Option<f64> {
        match self.kind {
            ReactionKind::Nicholson { delta } | ReactionKind::MackeyGlass { delta, .. } => Some(delta),
            ReactionKind::Custom(_) => None,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match self.kind {
            ReactionKind::MackeyGlass { n, .. } => Some(n),
            _ => None,
        }
    }

    /// Upper limit of every root or extremum search.
    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    #[inline]
    pub fn f(&self, s: f64) -> f64 {
        match &self.kind {
            ReactionKind::Nicholson { delta } | ReactionKind::MackeyGlass { delta, .. } => delta * s,
            ReactionKind::Custom(t) => t.f.eval(s),
        }
    }

    #[inline]
    pub fn g(&self, s: f64) -> f64 {
        match &self.kind {
            ReactionKind::Nicholson { .. } => s * (-s).exp(),
            // |s|ⁿ keeps tiny negative excursions finite for fractional n.
            ReactionKind::MackeyGlass { n, .. } => s / (1.0 + s.abs().powf(*n)),
            ReactionKind::Custom(t) => t.g.eval(s),
        }
    }

    /// `K(s) = g(s) - f(s)`.
    #[inline]
    pub fn k(&self, s: f64) -> f64 {
        self.g(s) - self.f(s)
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.is_preset()
    }

    pub fn df(&self, s: f64) -> f64 {
        match &self.kind {
            ReactionKind::Nicholson { delta } | ReactionKind::MackeyGlass { delta, .. } => *delta,
            ReactionKind::Custom(_) => central_difference(|x| self.f(x), s),
        }
    }

    pub fn dg(&self, s: f64) -> f64 {
        match &self.kind {
            ReactionKind::Nicholson { .. } => (1.0 - s) * (-s).exp(),
            ReactionKind::MackeyGlass { n, .. } => {
                let p = s.abs().powf(*n);
                (1.0 + (1.0 - n) * p) / ((1.0 + p) * (1.0 + p))
            }
            ReactionKind::Custom(_) => central_difference(|x| self.g(x), s),
        }
    }

    /// Positive equilibrium from the closed form, presets only.
    pub fn closed_form_equilibrium(&self) -> Option<f64> {
        match self.kind {
            ReactionKind::Nicholson { delta } if delta < 1.0 => Some((1.0 / delta).ln()),
            ReactionKind::MackeyGlass { delta, n } if delta < 1.0 => Some(((1.0 - delta) / delta).powf(1.0 / n)),
            _ => None,
        }
    }

    /// Interior maximiser of `g` from the closed form, presets only.
    pub fn closed_form_peak(&self) -> Option<f64> {
        match self.kind {
            ReactionKind::Nicholson { .. } => Some(1.0),
            ReactionKind::MackeyGlass { n, .. } if n > 1.0 => Some((1.0 / (n - 1.0)).powf(1.0 / n)),
            _ => None,
        }
    }

    /// Lipschitz estimates `(max |f'|, max |g'|)` sampled on `[0, s_max]`.
    pub fn lipschitz_estimate(&self, samples: usize) -> (f64, f64) {
        let samples = samples.max(2);
        let mut lf: f64 = 0.0;
        let mut lg: f64 = 0.0;
        for i in 0..=samples {
            let s = self.s_max * i as f64 / samples as f64;
            lf = lf.max(self.df(s).abs());
            lg = lg.max(self.dg(s).abs());
        }
        (lf, lg)
    }
}

/// Central difference with step `max(1e-6, 1e-6·s)`; one-sided near 0.
pub fn central_difference(func: impl Fn(f64) -> f64, s: f64) -> f64 {
    let h = (1e-6 * s.abs()).max(1e-6);
    if s < h {
        (func(s + h) - func(s)) / h
    } else {
        (func(s + h) - func(s - h)) / (2.0 * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nicholson_values() {
        let rp = ReactionPair::nicholson(0.2, None).unwrap();
        assert!((rp.f(1.0) - 0.2).abs() < 1e-15);
        assert!((rp.g(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((rp.g(1.0) - 0.367879).abs() < 1e-6);
        assert_eq!(rp.k(0.0), 0.0);
        assert_eq!(rp.dg(1.0), 0.0);
        assert!((rp.s_max() - 4.0 * 5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn nicholson_rejects_nonpositive_delta() {
        assert!(matches!(
            ReactionPair::nicholson(0.0, None),
            Err(Error::InvalidParameter { name: "delta", .. })
        ));
        assert!(ReactionPair::nicholson(-1.0, None).is_err());
    }

    #[test]
    fn nicholson_search_bound_must_cover_equilibrium() {
        assert!(ReactionPair::nicholson(0.2, Some(1.5)).is_err());
        assert!(ReactionPair::nicholson(0.2, Some(1.7)).is_ok());
    }

    #[test]
    fn nicholson_without_equilibrium_warns() {
        let rp = ReactionPair::nicholson(1.0, None).unwrap();
        assert_eq!(rp.s_max(), 4.0);
        assert_eq!(rp.warnings().len(), 1);
    }

    #[test]
    fn mackey_glass_values() {
        let rp = ReactionPair::mackey_glass(0.5, 2.0, None).unwrap();
        assert!((rp.k(1.0)).abs() < 1e-15);
        let rp3 = ReactionPair::mackey_glass(0.5, 3.0, None).unwrap();
        assert!((rp3.g(2.0) - 2.0 / 9.0).abs() < 1e-15);
        let rp4 = ReactionPair::mackey_glass(0.6, 4.0, None).unwrap();
        let u = rp4.closed_form_equilibrium().unwrap();
        assert!((u - (2.0f64 / 3.0).powf(0.25)).abs() < 1e-15);
        assert!((u - 0.9036).abs() < 1e-4);
    }

    #[test]
    fn mackey_glass_large_delta_warns_but_builds() {
        let rp = ReactionPair::mackey_glass(1.2, 3.0, None).unwrap();
        assert!(!rp.warnings().is_empty());
        assert!(rp.closed_form_equilibrium().is_none());
        assert!(ReactionPair::mackey_glass(0.5, 0.0, None).is_err());
    }

    #[test]
    fn mackey_glass_peak_closed_form() {
        let rp = ReactionPair::mackey_glass(0.5, 3.0, None).unwrap();
        assert!((rp.closed_form_peak().unwrap() - 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!(rp.dg(rp.closed_form_peak().unwrap()).abs() < 1e-15);
    }

    #[test]
    fn custom_table_requires_origin_identity() {
        let t = TabulatedPair::parse("0 0 0.1\n1 1 1\n").unwrap();
        assert!(matches!(ReactionPair::custom(t, None), Err(Error::Structural(_))));
        let t = TabulatedPair::parse("0 0 0\n1 0.5 0.8\n2 1 0.6\n").unwrap();
        let rp = ReactionPair::custom(t, None).unwrap();
        assert_eq!(rp.s_max(), 2.0);
        assert!(!rp.has_analytic_derivatives());
        assert!((rp.df(1.0) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn custom_table_bound_inside_table() {
        let t = TabulatedPair::parse("0 0 0\n1 0.5 0.8\n").unwrap();
        assert!(ReactionPair::custom(t.clone(), Some(3.0)).is_err());
        assert!(ReactionPair::custom(t, Some(0.5)).is_ok());
        assert!(TabulatedPair::parse("0.5 0 0\n1 1 1\n").is_err());
    }

    #[test]
    fn central_difference_step() {
        let d = central_difference(|x| x * x, 3.0);
        assert!((d - 6.0).abs() < 1e-8);
        let d0 = central_difference(|x| x * x * x + x, 0.0);
        assert!((d0 - 1.0).abs() < 1e-6);
    }
}
