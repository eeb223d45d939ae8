use crate::error::{Error, Result};
use crate::table::{lerp_table, parse_numeric_table};

/// Relative slack when deciding whether `tau / dt` is an integer.
const LAG_RATIO_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum KernelShape {
    Uniform,
    /// Density proportional to `e^{-rate·a}` on `[0, τ]`.
    TruncExponential {
        rate: f64,
    },
    /// All mass at lag τ (a discrete delay).
    PointMass,
    /// Piecewise-linear density through `(a, h)` knots, renormalised.
    Tabulated {
        lags: Vec<f64>,
        density: Vec<f64>,
    },
}

impl KernelShape {
    pub fn name(&self) -> &'static str {
        match self {
            KernelShape::Uniform => "uniform",
            KernelShape::TruncExponential { .. } => "trunc_exponential",
            KernelShape::PointMass => "point_mass",
            KernelShape::Tabulated { .. } => "tabulated",
        }
    }

    /// Parses rows of `a h`.
    pub fn parse_tabulated(text: &str) -> Result<Self> {
        let rows = parse_numeric_table(text, Some(2))?;
        let lags: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let density: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        Ok(KernelShape::Tabulated { lags, density })
    }
}

/// Delay density `h` on `[0, τ]` with unit mass.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayKernel {
    shape: KernelShape,
    tau: f64,
    /// Normaliser for tabulated densities.
    scale: f64,
}

impl DelayKernel {
    pub fn new(shape: KernelShape, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid("tau", tau, "must be positive"));
        }
        let mut scale = 1.0;
        match &shape {
            KernelShape::TruncExponential { rate } if !rate.is_finite() => {
                return Err(Error::invalid("rate", *rate, "must be finite"));
            }
            KernelShape::Tabulated { lags, density } => {
                if lags.len() < 2 || lags.len() != density.len() {
                    return Err(Error::Structural(
                        "tabulated kernel needs at least two (a, h) rows".into(),
                    ));
                }
                if lags.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Structural(
                        "tabulated kernel lags must be strictly increasing".into(),
                    ));
                }
                if lags[0] > 0.0 || *lags.last().unwrap() < tau {
                    return Err(Error::Structural(format!(
                        "tabulated kernel covers [{}, {}], needs [0, {tau}]",
                        lags[0],
                        lags.last().unwrap()
                    )));
                }
                if density.iter().any(|&h| h < 0.0) {
                    return Err(Error::Structural("tabulated kernel density must be nonnegative".into()));
                }
                let mass = trapezoid_on_knots(lags, density, tau);
                if !(mass > 0.0) {
                    return Err(Error::Structural("tabulated kernel has zero mass on [0, tau]".into()));
                }
                scale = 1.0 / mass;
            }
            _ => {}
        }
        Ok(Self { shape, tau, scale })
    }

    pub fn uniform(tau: f64) -> Result<Self> {
        Self::new(KernelShape::Uniform, tau)
    }

    pub fn shape(&self) -> &KernelShape {
        &self.shape
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// A point mass is outside the density setting of the theory.
    pub fn is_extension(&self) -> bool {
        matches!(self.shape, KernelShape::PointMass)
    }

    /// `h(a)` for `a ∈ [0, τ]`; `None` for the point mass.
    pub fn density(&self, a: f64) -> Option<f64> {
        if !(0.0..=self.tau).contains(&a) {
            return Some(0.0);
        }
        match &self.shape {
            KernelShape::Uniform => Some(1.0 / self.tau),
            KernelShape::TruncExponential { rate } => {
                let rate = *rate;
                if rate.abs() < 1e-12 {
                    Some(1.0 / self.tau)
                } else {
                    Some(rate * (-rate * a).exp() / -(-rate * self.tau).exp_m1())
                }
            }
            KernelShape::PointMass => None,
            KernelShape::Tabulated { lags, density } => Some(self.scale * lerp_table(lags, density, a)),
        }
    }

    /// `Nτ = τ / dt`, rejected unless it is an integer ≥ 1.
    pub fn lag_steps(&self, dt: f64) -> Result<usize> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", dt, "must be positive"));
        }
        let ratio = self.tau / dt;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > LAG_RATIO_SLACK * rounded.max(1.0) {
            return Err(Error::LagGrid { tau: self.tau, dt });
        }
        Ok(rounded as usize)
    }

    /// Trapezoidal quadrature weights on lags `0, dt, …, Nτ·dt`, renormalised
    /// to unit sum.
    pub fn discretize(&self, dt: f64) -> Result<KernelWeights> {
        let steps = self.lag_steps(dt)?;
        let mut weights = vec![0.0; steps + 1];
        match self.shape {
            KernelShape::PointMass => weights[steps] = 1.0,
            _ => {
                for (k, w) in weights.iter_mut().enumerate() {
                    let end = if k == 0 || k == steps { 0.5 } else { 1.0 };
                    let a = if k == steps { self.tau } else { k as f64 * dt };
                    *w = self.density(a).unwrap_or(0.0) * end * dt;
                }
                let total: f64 = weights.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::Structural("kernel quadrature has zero mass".into()));
                }
                weights.iter_mut().for_each(|w| *w /= total);
            }
        }
        Ok(KernelWeights { dt, weights })
    }
}

fn trapezoid_on_knots(xs: &[f64], ys: &[f64], upper: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..xs.len() - 1 {
        let (a, b) = (xs[i].max(0.0), xs[i + 1].min(upper));
        if b > a {
            total += 0.5 * (lerp_table(xs, ys, a) + lerp_table(xs, ys, b)) * (b - a);
        }
    }
    total
}

/// Quadrature weights `w_k` attached to lag `k·dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelWeights {
    dt: f64,
    weights: Vec<f64>,
}

impl KernelWeights {
    /// Builds weights directly; they must be nonnegative with positive sum
    /// and are renormalised.
    pub fn from_raw(dt: f64, mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Structural("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Structural("weights have zero mass".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { dt, weights })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// Number of lags, `Nτ + 1`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn lag_steps(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn tau(&self) -> f64 {
        self.lag_steps() as f64 * self.dt
    }

    /// `Σ_k w_k e^{γ k dt}`, the discrete `∫ h(a) e^{γa} da`.
    pub fn exp_moment(&self, gamma: f64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * (gamma * k as f64 * self.dt).exp())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_trapezoid_weights() {
        let w = DelayKernel::uniform(1.0).unwrap().discretize(0.25).unwrap();
        let expect = [0.125, 0.25, 0.25, 0.25, 0.125];
        assert_eq!(w.len(), 5);
        for (a, b) in w.as_slice().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn point_mass_weights() {
        let w = DelayKernel::new(KernelShape::PointMass, 1.0)
            .unwrap()
            .discretize(0.5)
            .unwrap();
        assert_eq!(w.as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn trunc_exponential_normalised() {
        let k = DelayKernel::new(KernelShape::TruncExponential { rate: 1.0 }, 1.0).unwrap();
        let w = k.discretize(0.01).unwrap();
        assert_eq!(w.len(), 101);
        let total: f64 = w.as_slice().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(w.as_slice().windows(2).skip(1).take(98).all(|p| p[1] < p[0]));
        // continuous density integrates to one
        let h = |a: f64| k.density(a).unwrap();
        let n = 100_000;
        let q: f64 = (0..n).map(|i| h((i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
        assert!((q - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_multiple_dt() {
        let err = DelayKernel::uniform(1.0).unwrap().discretize(0.3).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("tau = 1") && msg.contains("dt = 0.3"), "{msg}");
        assert!(DelayKernel::uniform(1.0).unwrap().discretize(2.0).is_err());
    }

    #[test]
    fn tabulated_kernel_is_renormalised() {
        let shape = KernelShape::parse_tabulated("a h\n0 2\n1 2\n2 0\n").unwrap();
        let k = DelayKernel::new(shape, 2.0).unwrap();
        // mass of the raw table is 2 + 1 = 3
        assert!((k.density(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let w = k.discretize(0.1).unwrap();
        assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(DelayKernel::new(KernelShape::parse_tabulated("0 1\n1 1\n").unwrap(), 2.0).is_err());
    }

    #[test]
    fn exp_moment_of_point_mass() {
        let w = DelayKernel::new(KernelShape::PointMass, 2.0)
            .unwrap()
            .discretize(0.5)
            .unwrap();
        assert!((w.exp_moment(0.3) - (0.6f64).exp()).abs() < 1e-14);
        assert!((w.tau() - 2.0).abs() < 1e-15);
    }
}
