//! Compensated (Kahan-Neumaier) summation.
//!
//! Every reduction that feeds a reported number runs through this
//! accumulator in a fixed order, so results are bit-identical across runs
//! and thread counts.

/// Neumaier variant of Kahan summation: the compensation also captures the
/// case where the incoming term is larger than the running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
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

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_that_naive_sum_loses() {
        // 1 + 1e100 - 1e100 - 1 = 0 exactly under Neumaier
        let v = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = v.iter().sum();
        let kahan = KahanSum::sum_iter(v.iter().copied());
        assert_ne!(naive, 2.0);
        assert_eq!(kahan, 2.0);
    }

    #[test]
    fn harmonic_series_accuracy() {
        let n = 1_000_000u64;
        let kahan = KahanSum::sum_iter((1..=n).map(|k| 1.0 / k as f64));
        // reference computed in reverse order (ascending terms), which is
        // already accurate to ~1e-13 here
        let mut rev = 0.0f64;
        for k in (1..=n).rev() {
            rev += 1.0 / k as f64;
        }
        assert!((kahan - rev).abs() < 1e-11);
    }
}
