/// Pre-factored tridiagonal system, solved by the Thomas algorithm.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    /// Modified superdiagonal `c'`.
    upper: Vec<f64>,
    /// Reciprocal pivots.
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    /// `lower[i]` multiplies `x[i-1]`, `upper[i]` multiplies `x[i+1]`;
    /// `lower[0]` and `upper[n-1]` are ignored. Panics on a zero pivot.
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Self {
        let n = diag.len();
        assert!(lower.len() == n && upper.len() == n && n > 0);
        let mut c = vec![0.0; n];
        let mut inv = vec![0.0; n];
        let mut prev_c = 0.0;
        for i in 0..n {
            let l = if i == 0 { 0.0 } else { lower[i] };
            let pivot = diag[i] - l * prev_c;
            assert!(pivot != 0.0, "zero pivot at row {i}");
            inv[i] = 1.0 / pivot;
            c[i] = if i + 1 < n { upper[i] * inv[i] } else { 0.0 };
            prev_c = c[i];
        }
        Self {
            lower,
            upper: c,
            inv_pivot: inv,
        }
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}
