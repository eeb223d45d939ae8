use crate::error::{Error, Result};

/// Ring buffer holding the segment `u_t` on the lag grid `t - kΔt`,
/// `k = 0..=Nτ`.
#[derive(Clone, Debug)]
pub struct HistoryState<T> {
    ring: Vec<T>,
    /// Slot of lag 0.
    head: usize,
    t0: f64,
    dt: f64,
    steps: u64,
}

impl<T> HistoryState<T> {
    /// `by_lag[k]` is the state at `t0 - k·dt`.
    pub fn from_lagged(mut by_lag: Vec<T>, t0: f64, dt: f64) -> Result<Self> {
        if by_lag.is_empty() {
            return Err(Error::Structural("history needs at least one entry".into()));
        }
        by_lag.reverse();
        let head = by_lag.len() - 1;
        Ok(Self {
            ring: by_lag,
            head,
            t0,
            dt,
            steps: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    /// Time of lag 0.
    pub fn time(&self) -> f64 {
        self.t0 + self.steps as f64 * self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// State recorded at `time() - k·dt`.
    #[inline]
    pub fn lag(&self, k: usize) -> &T {
        assert!(
            k < self.ring.len(),
            "lag {k} outside history of length {}",
            self.ring.len()
        );
        let n = self.ring.len();
        &self.ring[(self.head + n - k) % n]
    }

    pub fn current(&self) -> &T {
        self.lag(0)
    }

    /// Appends the state at `time() + dt`, evicting and returning the oldest.
    pub fn push(&mut self, value: T) -> T {
        let n = self.ring.len();
        self.head = (self.head + 1) % n;
        self.steps += 1;
        std::mem::replace(&mut self.ring[self.head], value)
    }

    /// Entries from lag 0 to the oldest.
    pub fn iter_lags(&self) -> impl Iterator<Item = &T> + '_ {
        (0..self.ring.len()).map(move |k| self.lag(k))
    }
}
