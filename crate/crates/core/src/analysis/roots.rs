//! Bracketing root finders and grid helpers.

const MAX_ITER: usize = 200;

/// Bisection on a sign-changing bracket. Stops once `|f| < ftol` and the
/// bracket can no longer shrink, returning the midpoint with smallest `|f|`.
/// `None` when `f(lo)` and `f(hi)` share a strict sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, ftol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return None;
    }
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if best.1.abs() < ftol && (hi - lo) <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Some(best.0)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximiser of a unimodal `f` on `[lo, hi]`.
/// Returns the final bracket and its better interior point.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..MAX_ITER {
        if hi - lo <= xtol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let best = if f1 >= f2 { x1 } else { x2 };
    (lo, hi, best)
}

/// `points` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Sorted grid on `[lo, hi]` with extra breakpoints merged in.
pub fn grid_with_breakpoints(lo: f64, hi: f64, points: usize, extra: &[f64]) -> Vec<f64> {
    let mut xs = linspace(lo, hi, points);
    xs.extend(extra.iter().copied().filter(|x| *x >= lo && *x <= hi && x.is_finite()));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
        assert_eq!(bisect(|x| x, 0.0, 1.0, 1e-12), Some(0.0));
    }

    #[test]
    fn golden_finds_peak() {
        let (lo, hi, best) = golden_max(|x| x * (-x).exp(), 0.0, 5.0, 1e-10);
        assert!(hi - lo <= 1e-10);
        assert!((best - 1.0).abs() < 1e-7);
    }

    #[test]
    fn linspace_endpoints() {
        let xs = linspace(0.0, 1.0, 5);
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        let g = grid_with_breakpoints(0.0, 1.0, 3, &[0.3, 0.5, 2.0]);
        assert_eq!(g, vec![0.0, 0.3, 0.5, 1.0]);
    }
}
