/// Running mean of a slow module's inputs between two of its updates.
///
/// A window whose samples are all identical flushes to that value bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accumulator<const N: usize> {
    sum: [f64; N],
    first: [f64; N],
    constant: [bool; N],
    count: usize,
    dt_sum: f64,
}

/// Result of flushing an [`Accumulator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flushed<const N: usize> {
    pub mean: [f64; N],
    /// Sum of the master steps in the window.
    pub dt_eff: f64,
    pub count: usize,
}

impl<const N: usize> Default for Accumulator<N> {
    fn default() -> Self {
        Self {
            sum: [0.0; N],
            first: [0.0; N],
            constant: [true; N],
            count: 0,
            dt_sum: 0.0,
        }
    }
}

impl<const N: usize> Accumulator<N> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, dt: f64, values: [f64; N]) {
        for (k, v) in values.into_iter().enumerate() {
            if self.count == 0 {
                self.first[k] = v;
            } else if v != self.first[k] {
                self.constant[k] = false;
            }
            self.sum[k] += v;
        }
        self.count += 1;
        self.dt_sum += dt;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Returns the window mean and resets, or `None` if nothing was pushed.
    pub fn flush(&mut self) -> Option<Flushed<N>> {
        if self.count == 0 {
            return None;
        }
        let n = self.count as f64;
        let mean = std::array::from_fn(|k| {
            if self.constant[k] {
                self.first[k]
            } else {
                self.sum[k] / n
            }
        });
        let out = Flushed {
            mean,
            dt_eff: self.dt_sum,
            count: self.count,
        };
        *self = Self::default();
        Some(out)
    }
}
