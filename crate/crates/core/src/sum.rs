//! Compensated summation and order-fixed parallel reductions.
//!
//! Every reduction over samples goes through [`chunked_sum`] so that the
//! result depends only on the data, never on how many worker threads rayon
//! happens to use.

use std::ops::AddAssign;

use rayon::prelude::*;

/// Chunk length for parallel reductions. Fixed so that partial sums are
/// formed over the same index ranges regardless of thread count.
pub const REDUCE_CHUNK: usize = 4096;

/// Kahan-Babuska-Neumaier accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Fold another accumulator into this one.
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<NeumaierSum>().value()
}

/// Sum of `f(i)` for `i in 0..len`, evaluated in parallel over fixed chunks
/// whose partial sums are then combined in index order.
pub fn chunked_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials: Vec<NeumaierSum> = (0..len.div_ceil(REDUCE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(len);
            (lo..hi).map(&f).collect()
        })
        .collect();
    partials
        .into_iter()
        .fold(NeumaierSum::new(), |mut acc, p| {
            acc.merge(&p);
            acc
        })
        .value()
}

/// Vector-valued version of [`chunked_sum`]: `f(i, acc)` adds sample `i`'s
/// contribution into a per-chunk accumulator of length `width`.
pub fn chunked_vec_sum<F>(len: usize, width: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [NeumaierSum]) + Sync,
{
    let partials: Vec<Vec<NeumaierSum>> = (0..len.div_ceil(REDUCE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(len);
            let mut acc = vec![NeumaierSum::new(); width];
            for i in lo..hi {
                f(i, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![NeumaierSum::new(); width];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(&p);
        }
    }
    total.iter().map(NeumaierSum::value).collect()
}

/// Mean and standard error of the mean of `f(i)` over `0..len`.
pub fn mean_and_stderr<F>(len: usize, f: F) -> (f64, f64)
where
    F: Fn(usize) -> f64 + Sync,
{
    let sums = chunked_vec_sum(len, 2, |i, acc| {
        let v = f(i);
        acc[0].add(v);
        acc[1].add(v * v);
    });
    moments_to_mean_stderr(sums[0], sums[1], len)
}

pub(crate) fn moments_to_mean_stderr(s1: f64, s2: f64, len: usize) -> (f64, f64) {
    let n = len as f64;
    let mean = s1 / n;
    if len < 2 {
        return (mean, f64::NAN);
    }
    let var = ((s2 - s1 * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(&xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn chunked_sum_independent_of_thread_count() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| chunked_sum(100_003, f));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(7)
            .build()
            .unwrap()
            .install(|| chunked_sum(100_003, f));
        assert_eq!(one.to_bits(), many.to_bits());
    }

    #[test]
    fn mean_stderr_of_constant() {
        let (m, s) = mean_and_stderr(1000, |_| 2.5);
        assert_eq!(m, 2.5);
        assert_eq!(s, 0.0);
    }
}
