//! Fock-state Wigner functions and the exact number distribution.
//!
//! `P_n = π ∫ d²α W_ψ(α) W_n(α)` is evaluated two ways: by quadrature over
//! the plane for analytic Gaussian states ([`pn_quadrature`]) and by
//! averaging `π W_n` over samples of `W_ψ` ([`pn_wigner_average`]).

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rayon::prelude::*;

use crate::distribution::{Method, NumberDistribution};
use crate::phase_space::{GaussianWignerState, PhaseAmplitude, TrajectoryEnsemble};
use crate::quadrature::{angular_density, GaussLegendre};
use crate::special::{laguerre_scaled, LaguerreSeries};
use crate::sum::{chunked_vec_sum, moments_to_mean_stderr, NeumaierSum};
use crate::{rng, Error, Result};

/// Hard cap on automatically chosen `n_max`.
pub const AUTO_N_MAX_CAP: usize = 5000;

/// `W_n(α) = (2/π)(−1)ⁿ e^{−2|α|²} Lₙ(4|α|²)`, evaluated through the scaled
/// Laguerre recurrence at `x = 4|α|²`.
pub fn fock_wigner(n: usize, alpha: PhaseAmplitude) -> Result<f64> {
    alpha.check_finite()?;
    let v = laguerre_scaled(n, 4.0 * alpha.norm_sqr())?.value();
    Ok(parity(n) * 2.0 / PI * v)
}

#[inline]
fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `out[n] = W_n(α)` for every `n < out.len()`, given `|α|²`.
pub fn fock_wigner_table(abs_sq: f64, out: &mut [f64]) -> Result<()> {
    let mut it = LaguerreSeries::new(4.0 * abs_sq)?;
    for (n, slot) in out.iter_mut().enumerate() {
        *slot = parity(n) * 2.0 / PI * it.value();
        it.advance();
    }
    Ok(())
}

/// Default `n_max`: mean plus ten standard deviations of the number
/// distribution, capped at [`AUTO_N_MAX_CAP`].
pub fn auto_n_max(state: &GaussianWignerState) -> usize {
    let mean = state.mean_occupation().max(0.0);
    let std = state.number_variance().sqrt();
    ((mean + 10.0 * std).ceil() as usize + 10).min(AUTO_N_MAX_CAP)
}

/// Positive Gaussian-ring stand-in for a Fock Wigner function,
/// `A exp[−2(|α|² − n − 1/2)²]`, with its inverse-CDF sampler.
#[derive(Debug)]
pub struct GaussianRing {
    n: usize,
    norm: f64,
    u_lo: f64,
    du: f64,
    cdf: Vec<f64>,
}

/// Half-width of the tabulated `|α|²` window; `e^{−2·6.5²}` is below 1e-36.
const RING_HALF_WIDTH: f64 = 6.5;
const RING_CELLS: usize = 8192;

impl GaussianRing {
    pub fn new(n: usize) -> Self {
        let center = n as f64 + 0.5;
        let u_lo = (center - RING_HALF_WIDTH).max(0.0);
        let u_hi = center + RING_HALF_WIDTH;
        let du = (u_hi - u_lo) / RING_CELLS as f64;
        let gl = GaussLegendre::new(8);
        let profile = |u: f64| (-2.0 * (u - center) * (u - center)).exp();
        let mut cdf = Vec::with_capacity(RING_CELLS + 1);
        let mut acc = NeumaierSum::new();
        cdf.push(0.0);
        for c in 0..RING_CELLS {
            let a = u_lo + c as f64 * du;
            acc.add(gl.integrate(a, a + du, profile));
            cdf.push(acc.value());
        }
        let mass = acc.value();
        for v in &mut cdf {
            *v /= mass;
        }
        // ∫d²α = π ∫du, so the 2-D normalization is 1/(π·mass)
        Self {
            n,
            norm: 1.0 / (PI * mass),
            u_lo,
            du,
            cdf,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Normalization constant `A`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn density(&self, alpha: PhaseAmplitude) -> f64 {
        let d = alpha.norm_sqr() - self.n as f64 - 0.5;
        self.norm * (-2.0 * d * d).exp()
    }

    /// `|α|²` at cumulative probability `p`, linear within a tabulated cell.
    fn inverse_cdf(&self, p: f64) -> f64 {
        let cell = self.cdf.partition_point(|&c| c <= p).clamp(1, RING_CELLS) - 1;
        let (c0, c1) = (self.cdf[cell], self.cdf[cell + 1]);
        let t = if c1 > c0 { (p - c0) / (c1 - c0) } else { 0.5 };
        self.u_lo + (cell as f64 + t) * self.du
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<TrajectoryEnsemble> {
        if count == 0 {
            return Err(Error::domain("sample count must be >= 1"));
        }
        let streams = rng::stream_count(count);
        let blocks: Vec<Vec<PhaseAmplitude>> = (0..streams)
            .into_par_iter()
            .map(|b| {
                let mut g = rng::stream_rng(seed, b as u64);
                rng::block_range(b, count)
                    .map(|_| {
                        let u = self.inverse_cdf(g.gen::<f64>());
                        let phi = TAU * g.gen::<f64>();
                        PhaseAmplitude::from_polar(u.sqrt(), phi)
                    })
                    .collect()
            })
            .collect();
        TrajectoryEnsemble::new(vec![blocks.concat()], seed, streams)
    }
}

fn ring_cache() -> &'static Mutex<HashMap<usize, Arc<GaussianRing>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussianRing>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached [`GaussianRing`] for `n`.
pub fn gaussian_ring(n: usize) -> Arc<GaussianRing> {
    let mut cache = ring_cache().lock().unwrap_or_else(|e| e.into_inner());
    cache.entry(n).or_insert_with(|| Arc::new(GaussianRing::new(n))).clone()
}

pub fn fock_gaussian_ring_density(n: usize, alpha: PhaseAmplitude) -> f64 {
    gaussian_ring(n).density(alpha)
}

pub fn sample_fock_gaussian_ring(n: usize, count: usize, seed: u64) -> Result<TrajectoryEnsemble> {
    gaussian_ring(n).sample(count, seed)
}

/// Convergence target between successive refinements of [`pn_quadrature`].
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Entries whose final change exceeds this are reported as failures.
pub const QUADRATURE_FAIL: f64 = 1e-9;
const QUADRATURE_ORDER: usize = 20;
const MAX_REFINEMENTS: usize = 8;

/// Panels in `u = |α|²` sized to the local oscillation length of `W_{n_max}`.
fn radial_panels(u_max: f64, n_max: usize, scale: f64) -> Vec<(f64, f64)> {
    let nu = 4.0 * n_max as f64 + 2.0;
    let h_max = 0.5 * scale;
    let u_floor = (4.0 * PI * PI / nu).min(0.25);
    let mut panels = Vec::new();
    let mut u = 0.0;
    while u < u_max {
        // local wavelength 2π√(u/(ν − 4u)) of e^{−2u}Lₙ(4u) inside the ring
        let inside = nu - 4.0 * u;
        let h = if inside > 1.0 {
            let lambda = TAU * (u.max(u_floor) / inside).sqrt();
            (scale * lambda).min(h_max)
        } else {
            h_max
        };
        let h = h.max(1e-6);
        let next = (u + h).min(u_max);
        panels.push((u, next));
        u = next;
    }
    panels
}

/// Nodes `u_j` with weights `w_j·A(u_j)/2` for `∫ d²α W(α) f(|α|²) = Σ_j ω_j f(u_j)`.
fn radial_rule(state: &GaussianWignerState, u_max: f64, n_max: usize, scale: f64) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(QUADRATURE_ORDER);
    let nodes: Vec<(f64, f64)> = radial_panels(u_max, n_max, scale)
        .into_iter()
        .flat_map(|(a, b)| gl.nodes_on(a, b).collect::<Vec<_>>())
        .collect();
    nodes
        .into_par_iter()
        .map(|(u, w)| (u, 0.5 * w * angular_density(state, u.sqrt())))
        .collect()
}

fn overlap_pass(state: &GaussianWignerState, n_max: usize, u_max: f64, scale: f64) -> Result<Vec<f64>> {
    let rule = radial_rule(state, u_max, n_max, scale);
    let width = n_max + 1;
    let sums = chunked_vec_sum(rule.len(), width, |j, acc| {
        let (u, weight) = rule[j];
        if weight == 0.0 {
            return;
        }
        // π·W_n = 2(−1)ⁿ e^{−2u} Lₙ(4u)
        let mut it = LaguerreSeries::new(4.0 * u).expect("u >= 0");
        for (n, slot) in acc.iter_mut().enumerate() {
            slot.add(weight * 2.0 * parity(n) * it.value());
            it.advance();
        }
    });
    Ok(sums)
}

/// Exact `P_n` for `n ≤ n_max` by quadrature of the overlap integral.
///
/// Gauss-Legendre panels in `u = r²` (sized to the oscillation length of the
/// highest Fock function) times an adaptive periodic trapezoid in `φ`. All
/// panels are halved until two successive passes agree within
/// [`QUADRATURE_TOL`] for every `n`.
pub fn pn_quadrature(state: &GaussianWignerState, n_max: usize) -> Result<NumberDistribution> {
    let r_max = ((n_max + 1) as f64)
        .sqrt()
        .max(state.beta.abs() + 8.0 * state.sigma_a.max(state.sigma_s))
        + 3.0;
    let u_max = r_max * r_max;
    let mut scale = 1.0;
    let mut prev = overlap_pass(state, n_max, u_max, scale)?;
    let mut last_change = vec![f64::INFINITY; n_max + 1];
    for _ in 0..MAX_REFINEMENTS {
        scale *= 0.5;
        let next = overlap_pass(state, n_max, u_max, scale)?;
        for ((c, a), b) in last_change.iter_mut().zip(&prev).zip(&next) {
            *c = (a - b).abs();
        }
        prev = next;
        if last_change.iter().all(|&c| c < QUADRATURE_TOL) {
            break;
        }
    }
    let failed: Vec<usize> = last_change
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > QUADRATURE_FAIL)
        .map(|(n, _)| n)
        .collect();
    if !failed.is_empty() {
        let estimate = failed.iter().map(|&n| last_change[n]).fold(0.0, f64::max);
        return Err(Error::Quadrature {
            entries: failed,
            estimate,
        });
    }
    Ok(NumberDistribution::exact(prev, Method::Quadrature)?.with_metadata("state", serde_json::to_string(state)?))
}

/// `P_n = π⟨W_n(α)⟩_W` over the samples of one mode, with the standard
/// error of each mean.
pub fn pn_wigner_average(ensemble: &TrajectoryEnsemble, mode: usize, n_max: usize) -> Result<NumberDistribution> {
    let samples = ensemble.mode(mode)?;
    let width = n_max + 1;
    // per n: Σ πW_n and Σ (πW_n)²
    let sums = chunked_vec_sum(samples.len(), 2 * width, |i, acc| {
        let mut it = LaguerreSeries::new(4.0 * samples[i].norm_sqr()).expect("finite sample");
        for n in 0..width {
            let v = 2.0 * parity(n) * it.value();
            acc[n].add(v);
            acc[width + n].add(v * v);
            it.advance();
        }
    });
    let (probs, stderr): (Vec<f64>, Vec<f64>) = (0..width)
        .map(|n| moments_to_mean_stderr(sums[n], sums[width + n], samples.len()))
        .map(|(m, s)| (m, if s.is_nan() { 0.0 } else { s }))
        .unzip();
    Ok(
        NumberDistribution::stochastic(probs, stderr, Method::WignerAverage, samples.len() as u64)?
            .with_metadata("seed", ensemble.seed())
            .with_metadata("mode", mode),
    )
}

/// Per-sample `π Σ_{n ≤ n_max} W_n(α)`: mean and standard error. This is the
/// normalization of [`pn_wigner_average`] with correlations between the
/// entries accounted for.
pub fn wigner_average_total(ensemble: &TrajectoryEnsemble, mode: usize, n_max: usize) -> Result<(f64, f64)> {
    let samples = ensemble.mode(mode)?;
    let sums = chunked_vec_sum(samples.len(), 2, |i, acc| {
        let mut it = LaguerreSeries::new(4.0 * samples[i].norm_sqr()).expect("finite sample");
        let mut s = NeumaierSum::new();
        for n in 0..=n_max {
            s.add(2.0 * parity(n) * it.value());
            it.advance();
        }
        let v = s.value();
        acc[0].add(v);
        acc[1].add(v * v);
    });
    Ok(moments_to_mean_stderr(sums[0], sums[1], samples.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_wigner_examples() {
        let w = fock_wigner(7, PhaseAmplitude::ZERO).unwrap();
        assert!((w + 2.0 / PI).abs() < 1e-15);
        let w = fock_wigner(0, PhaseAmplitude::new(1.0, 0.0)).unwrap();
        assert!((w - 2.0 / PI * (-2.0f64).exp()).abs() < 1e-16);
        assert!((w - 0.086157).abs() < 1e-6);
        assert!(fock_wigner(3, PhaseAmplitude::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn table_agrees_with_pointwise() {
        let a = PhaseAmplitude::new(1.2, -0.7);
        let mut t = vec![0.0; 30];
        fock_wigner_table(a.norm_sqr(), &mut t).unwrap();
        for (n, v) in t.iter().enumerate() {
            assert_eq!(*v, fock_wigner(n, a).unwrap());
        }
    }

    #[test]
    fn gaussian_ring_peaks_on_classical_ring() {
        let ring = GaussianRing::new(7);
        let on = ring.density(PhaseAmplitude::from_polar(7.5f64.sqrt(), 0.3));
        for u in [6.9, 7.3, 7.7, 8.2] {
            assert!(ring.density(PhaseAmplitude::from_polar(f64::sqrt(u), 1.0)) < on);
        }
        assert!((on - ring.norm()).abs() < 1e-15);
    }

    #[test]
    fn vacuum_quadrature() {
        let p = pn_quadrature(&GaussianWignerState::vacuum(), 12).unwrap();
        assert!((p.get(0) - 1.0).abs() < 1e-9);
        for n in 1..=12 {
            assert!(p.get(n).abs() < 1e-9, "P_{n} = {}", p.get(n));
        }
    }

    #[test]
    fn auto_n_max_covers_distribution() {
        let th = GaussianWignerState::thermal(10.0).unwrap();
        // 10 + 10·√110 + 10
        assert_eq!(auto_n_max(&th), 125);
        let huge = GaussianWignerState::thermal(1e6).unwrap();
        assert_eq!(auto_n_max(&huge), AUTO_N_MAX_CAP);
    }
}
