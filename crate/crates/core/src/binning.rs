//! The binned estimator `P̃_n`: the fraction of samples with
//! `n ≤ |α|² < n + 1`, and the boxcar Wigner function it implicitly uses.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::distribution::{Method, NumberDistribution};
use crate::phase_space::{GaussianWignerState, PhaseAmplitude, StateKind, TrajectoryEnsemble};
use crate::quadrature::{angular_density, GaussLegendre};
use crate::sum::{compensated_sum, REDUCE_CHUNK};
use crate::{rng, Error, Result};

/// Bins `[n, n+1)` in `|α|²` for `n = 0..=n_max`; anything at or above
/// `n_max + 1` is counted as overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinSpec {
    pub n_max: usize,
}

impl BinSpec {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    /// Bin index of `|α|²`, or `None` for overflow.
    #[inline]
    pub fn index(&self, abs_sq: f64) -> Option<usize> {
        // floor of a non-negative double; half-open by construction
        let k = abs_sq.floor();
        if k <= self.n_max as f64 {
            Some(k as usize)
        } else {
            None
        }
    }
}

/// Integer bin counts plus overflow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinCounts {
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl BinCounts {
    fn new(n_max: usize) -> Self {
        Self {
            counts: vec![0; n_max + 1],
            overflow: 0,
        }
    }

    fn push(&mut self, spec: &BinSpec, abs_sq: f64) {
        match spec.index(abs_sq) {
            Some(k) => self.counts[k] += 1,
            None => self.overflow += 1,
        }
    }

    fn merge(mut self, other: &Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        self
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    /// Normalized distribution with multinomial standard errors.
    pub fn to_distribution(&self) -> Result<NumberDistribution> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyEnsemble);
        }
        let nf = total as f64;
        let probs: Vec<f64> = self.counts.iter().map(|&c| c as f64 / nf).collect();
        let stderr = probs.iter().map(|p| (p * (1.0 - p) / nf).sqrt()).collect();
        Ok(NumberDistribution::stochastic(probs, stderr, Method::Binned, total)?
            .with_overflow(self.overflow as f64 / nf))
    }
}

/// Count `|α|²` of one mode into unit bins.
pub fn bin_counts(samples: &[PhaseAmplitude], spec: BinSpec) -> BinCounts {
    samples
        .par_chunks(REDUCE_CHUNK)
        .map(|chunk| {
            let mut c = BinCounts::new(spec.n_max);
            for a in chunk {
                c.push(&spec, a.norm_sqr());
            }
            c
        })
        .reduce(|| BinCounts::new(spec.n_max), |a, b| a.merge(&b))
}

/// `P̃_n` for one mode of an ensemble.
pub fn bin_ensemble(ensemble: &TrajectoryEnsemble, mode: usize, spec: BinSpec) -> Result<NumberDistribution> {
    let samples = ensemble.mode(mode)?;
    Ok(bin_counts(samples, spec)
        .to_distribution()?
        .with_metadata("seed", ensemble.seed())
        .with_metadata("mode", mode))
}

/// Draw and bin without materializing the ensemble. Identical to
/// `bin_ensemble(&state.sample(count, seed)?, 0, spec)`.
pub fn sample_and_bin(
    state: &GaussianWignerState,
    count: usize,
    seed: u64,
    spec: BinSpec,
) -> Result<NumberDistribution> {
    Ok(sample_and_count(state, count, seed, spec)?
        .to_distribution()?
        .with_metadata("seed", seed))
}

/// Streaming counterpart of [`bin_counts`] for a Gaussian state.
pub fn sample_and_count(state: &GaussianWignerState, count: usize, seed: u64, spec: BinSpec) -> Result<BinCounts> {
    if count == 0 {
        return Err(Error::domain("sample count must be >= 1"));
    }
    let counts = (0..rng::stream_count(count))
        .into_par_iter()
        .map_init(Vec::new, |buf, b| {
            let range = rng::block_range(b, count);
            state.sample_block(seed, b, buf, range.len());
            let mut c = BinCounts::new(spec.n_max);
            for a in buf.iter() {
                c.push(&spec, a.norm_sqr());
            }
            c
        })
        .reduce(|| BinCounts::new(spec.n_max), |a, b| a.merge(&b));
    Ok(counts)
}

/// Like [`sample_and_count`], with stream block `b` counted into group
/// `b mod groups`. The groups sum to the single-run counts.
pub fn sample_and_count_groups(
    state: &GaussianWignerState,
    count: usize,
    seed: u64,
    spec: BinSpec,
    groups: usize,
) -> Result<Vec<BinCounts>> {
    if count == 0 || groups == 0 {
        return Err(Error::domain("sample count and group count must be >= 1"));
    }
    let per_block: Vec<BinCounts> = (0..rng::stream_count(count))
        .into_par_iter()
        .map_init(Vec::new, |buf, b| {
            state.sample_block(seed, b, buf, rng::block_range(b, count).len());
            let mut c = BinCounts::new(spec.n_max);
            for a in buf.iter() {
                c.push(&spec, a.norm_sqr());
            }
            c
        })
        .collect();
    let mut out = vec![BinCounts::new(spec.n_max); groups];
    for (b, c) in per_block.iter().enumerate() {
        let g = &mut out[b % groups];
        *g = std::mem::replace(g, BinCounts::new(0)).merge(c);
    }
    Ok(out)
}

/// `W̃_n(α) = 1/π` on the annulus `n ≤ |α|² < n + 1`, else zero.
pub fn boxcar_wigner(n: usize, alpha: PhaseAmplitude) -> f64 {
    if BinSpec::new(n).index(alpha.norm_sqr()) == Some(n) {
        1.0 / PI
    } else {
        0.0
    }
}

fn isotropic_occupation(state: &GaussianWignerState) -> Result<f64> {
    match state.kind {
        StateKind::Thermal | StateKind::Vacuum if state.beta.norm_sqr() == 0.0 && state.is_isotropic() => {
            Ok(2.0 * state.sigma_s * state.sigma_s - 0.5)
        }
        _ => Err(Error::Unsupported(format!(
            "closed-form binned distribution needs a thermal or vacuum state, got {:?}",
            state.kind
        ))),
    }
}

/// Closed form of `P̃_n` for thermal and vacuum states:
/// `qⁿ(1 − q)` with `q = e^{−1/(n̄ + 1/2)}`.
pub fn pn_binned_analytic(state: &GaussianWignerState, n_max: usize) -> Result<NumberDistribution> {
    let nbar = isotropic_occupation(state)?;
    let a = 1.0 / (nbar + 0.5);
    let one_minus_q = -(-a).exp_m1();
    let probs = (0..=n_max).map(|n| (-a * n as f64).exp() * one_minus_q).collect();
    Ok(NumberDistribution::exact(probs, Method::Analytic)?
        .with_metadata("estimator", "binned")
        .with_metadata("state", serde_json::to_string(state)?))
}

/// `Σ n P̃_n = 1/(e^{1/(n̄ + 1/2)} − 1)` for a thermal state.
pub fn binned_mean_analytic(nbar: f64) -> f64 {
    1.0 / (1.0 / (nbar + 0.5)).exp_m1()
}

const BOXCAR_ORDER: usize = 24;
const BOXCAR_TOL: f64 = 1e-12;

/// `P̃_n = π ∫ d²α W̃_n W` by quadrature: `½ ∫_n^{n+1} du A(u)` with `A` the
/// angular integral of the density. Each unit interval is split until two
/// successive splittings agree.
pub fn pn_boxcar_quadrature(state: &GaussianWignerState, n_max: usize) -> Result<NumberDistribution> {
    let gl = GaussLegendre::new(BOXCAR_ORDER);
    let interval = |a: f64, b: f64, pieces: usize| -> f64 {
        let h = (b - a) / pieces as f64;
        let parts: Vec<f64> = (0..pieces)
            .map(|k| {
                let lo = a + k as f64 * h;
                gl.integrate(lo, lo + h, |u| 0.5 * angular_density(state, u.sqrt()))
            })
            .collect();
        compensated_sum(&parts)
    };
    let probs: Vec<f64> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let (a, b) = (n as f64, n as f64 + 1.0);
            let mut pieces = 1;
            let mut prev = interval(a, b, pieces);
            loop {
                pieces *= 2;
                let next = interval(a, b, pieces);
                if (next - prev).abs() < BOXCAR_TOL || pieces >= 256 {
                    return next.max(0.0);
                }
                prev = next;
            }
        })
        .collect();
    Ok(NumberDistribution::exact(probs, Method::Quadrature)?
        .with_metadata("estimator", "binned")
        .with_metadata("state", serde_json::to_string(state)?))
}
