//! Compensated (Neumaier) summation.
//!
//! Population averages and Monte Carlo means run over up to 10^6 terms; plain
//! left-to-right summation would make results depend on chunking. Every
//! reduction in this crate accumulates through [`NeumaierSum`] in a fixed
//! order, so totals are reproducible to the last bit regardless of thread
//! count.

/// Running sum with a first-order error compensation term.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one. Associativity is only
    /// approximate, so callers must combine in a fixed order.
    #[inline]
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.compensation += other.compensation;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
