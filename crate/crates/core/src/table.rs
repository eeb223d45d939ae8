//! Plain-text numeric tables and monotone cubic interpolation.
//!
//! Tables are one row per line, values separated by commas, semicolons or
//! whitespace. `#` starts a comment. A single leading header row made only of
//! non-numeric tokens is skipped.

use crate::error::{Error, Result};

/// Parses a rectangular table of finite numbers.
///
/// `columns`, when given, is the exact column count every row must have.
pub fn parse_numeric_table(text: &str, columns: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = columns;
    let mut seen_data = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();

        if !seen_data && tokens.iter().all(|t| t.parse::<f64>().is_err()) {
            // header row
            seen_data = true;
            continue;
        }
        seen_data = true;

        let mut row = Vec::with_capacity(tokens.len());
        for tok in &tokens {
            let v: f64 = tok.parse().map_err(|_| Error::Table {
                line: line_no,
                message: format!("`{tok}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Table {
                    line: line_no,
                    message: format!("non-finite value `{tok}`"),
                });
            }
            row.push(v);
        }
        match width {
            Some(w) if w != row.len() => {
                return Err(Error::Table {
                    line: line_no,
                    message: format!("expected {w} columns, found {}", row.len()),
                })
            }
            None => width = Some(row.len()),
            _ => {}
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::Table {
            line: 0,
            message: "table has no data rows".into(),
        });
    }
    Ok(rows)
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson).
///
/// Monotone data stays monotone between knots. Outside the knot range the
/// end values are held constant.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Table {
                line: 0,
                message: "interpolation needs at least two (x, y) pairs".into(),
            });
        }
        if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Table {
                line: i + 2,
                message: format!("abscissae must be strictly increasing ({} then {})", xs[i], xs[i + 1]),
            });
        }
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();

        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            slopes[i] = if a * b <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean (Fritsch–Butland)
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                (w1 + w2) / (w1 / a + w2 / b)
            };
        }
        // Fritsch–Carlson limiter on the end slopes.
        for (end, sec) in [(0usize, secants[0]), (n - 1, secants[n - 2])] {
            if slopes[end] * sec <= 0.0 {
                slopes[end] = 0.0;
            } else if slopes[end].abs() > 3.0 * sec.abs() {
                slopes[end] = 3.0 * sec;
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&k| k <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Piecewise-linear interpolation on sorted knots, clamped at both ends.
pub(crate) fn lerp_table(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&k| k <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_separators_and_header() {
        let rows = parse_numeric_table("s, f, g\n0 0 0 # origin\n\n1;0.5, 0.7\n", Some(3)).unwrap();
        assert_eq!(rows, vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.5, 0.7]]);
    }

    #[test]
    fn reports_line_of_bad_token() {
        let err = parse_numeric_table("0 1\n2 x\n", None).unwrap_err();
        assert!(matches!(err, Error::Table { line: 2, .. }), "{err}");
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = parse_numeric_table("0 1\n2 3 4\n", None).unwrap_err();
        assert!(matches!(err, Error::Table { line: 2, .. }));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(parse_numeric_table("0 inf\n", None).is_err());
        assert!(parse_numeric_table("# nothing\n", None).is_err());
    }

    #[test]
    fn pchip_reproduces_knots_and_keeps_monotone() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 0.9, 1.0, 1.0];
        let p = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((p.eval(*x) - y).abs() < 1e-15);
        }
        let mut prev = p.eval(0.0);
        for i in 1..=4000 {
            let v = p.eval(i as f64 * 1e-3);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        assert_eq!(p.eval(-1.0), 0.0);
        assert_eq!(p.eval(9.0), 1.0);
    }

    #[test]
    fn pchip_exact_on_lines() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let p = MonotoneCubic::new(xs, ys).unwrap();
        assert!((p.eval(1.234) - 3.468).abs() < 1e-12);
    }

    #[test]
    fn pchip_rejects_unsorted() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }
}
