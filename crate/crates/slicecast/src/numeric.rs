//! Compensated accumulation for long metric sweeps.
//!
//! A day of 1 s samples is 86 400 terms per stream; naive summation of
//! O(1e6) bit-rate magnitudes drifts enough to show up in frozen golden
//! values, so every metric accumulator in this crate goes through
//! [`KahanSum`] (Neumaier variant, which also handles terms larger than
//! the running sum).

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_exact_integers() {
        assert_eq!(kahan_sum([1.0, 2.0, 3.0]), 6.0);
    }

    #[test]
    fn recovers_cancellation_that_defeats_naive_summation() {
        // 1.0 vanishes from a naive accumulator next to 1e100.
        assert_eq!(kahan_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(KahanSum::new().value(), 0.0);
    }
}
