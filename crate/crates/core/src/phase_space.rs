//! Phase-space amplitudes, Gaussian Wigner states and their samplers.
//!
//! Angle convention: the squeezed axis of a state with squeezing angle `θ`
//! points along `(cos θ/2, sin θ/2)`. The rotated-frame coordinates are
//!
//! ```text
//! γx =  (αx − βx) cos(θ/2) + (αy − βy) sin(θ/2)
//! γy = −(αx − βx) sin(θ/2) + (αy − βy) cos(θ/2)
//! ```
//!
//! and the density is a normalized Gaussian with rms widths `σs` along `γx`
//! and `σa` along `γy`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::sum;
use crate::{Error, Result};

/// One complex mode amplitude `α = re + i·im`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseAmplitude {
    pub re: f64,
    pub im: f64,
}

impl PhaseAmplitude {
    pub const ZERO: PhaseAmplitude = PhaseAmplitude { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// Like [`PhaseAmplitude::new`] but rejects NaN and infinite components.
    pub fn try_new(re: f64, im: f64) -> Result<Self> {
        let a = Self { re, im };
        a.check_finite()?;
        Ok(a)
    }

    pub fn from_polar(r: f64, phi: f64) -> Self {
        Self::new(r * phi.cos(), r * phi.sin())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("non-finite amplitude {self:?}")))
        }
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Argument folded into `[0, 2π)`.
    pub fn arg(&self) -> f64 {
        let phi = self.im.atan2(self.re);
        if phi < 0.0 {
            // atan2 can return -0.0 or tiny negatives that round up to 2π
            let wrapped = phi + TAU;
            if wrapped >= TAU {
                0.0
            } else {
                wrapped
            }
        } else {
            phi
        }
    }

    pub fn to_polar(&self) -> (f64, f64) {
        (self.abs(), self.arg())
    }
}

impl From<Complex64> for PhaseAmplitude {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

impl From<PhaseAmplitude> for Complex64 {
    fn from(a: PhaseAmplitude) -> Self {
        Complex64::new(a.re, a.im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Vacuum,
    Coherent,
    Thermal,
    SqueezedCoherent,
}

/// Analytic Gaussian Wigner function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianWignerState {
    pub beta: PhaseAmplitude,
    pub sigma_s: f64,
    pub sigma_a: f64,
    pub theta: f64,
    pub kind: StateKind,
}

impl GaussianWignerState {
    pub fn vacuum() -> Self {
        Self {
            beta: PhaseAmplitude::ZERO,
            sigma_s: 0.5,
            sigma_a: 0.5,
            theta: 0.0,
            kind: StateKind::Vacuum,
        }
    }

    pub fn coherent(beta: PhaseAmplitude) -> Result<Self> {
        beta.check_finite()?;
        Ok(Self {
            beta,
            kind: StateKind::Coherent,
            ..Self::vacuum()
        })
    }

    /// Thermal state of mean occupation `nbar`; isotropic with rms width
    /// `√((n̄ + 1/2)/2)`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar > 0.0 && nbar.is_finite()) {
            return Err(Error::domain(format!("thermal occupation must be > 0, got {nbar}")));
        }
        let sigma = ((nbar + 0.5) / 2.0).sqrt();
        Ok(Self {
            beta: PhaseAmplitude::ZERO,
            sigma_s: sigma,
            sigma_a: sigma,
            theta: 0.0,
            kind: StateKind::Thermal,
        })
    }

    /// `D(β)S(η)|0⟩` with `η = s·e^{iθ}`.
    pub fn squeezed_coherent(beta: PhaseAmplitude, s: f64, theta: f64) -> Result<Self> {
        beta.check_finite()?;
        if !(s >= 0.0 && s.is_finite()) || !theta.is_finite() {
            return Err(Error::domain(format!(
                "squeezing needs finite s >= 0 and finite θ, got s={s}, θ={theta}"
            )));
        }
        Ok(Self {
            beta,
            sigma_s: (-s).exp() / 2.0,
            sigma_a: s.exp() / 2.0,
            theta,
            kind: StateKind::SqueezedCoherent,
        })
    }

    /// Mean thermal occupation; only meaningful for isotropic states
    /// centred at the origin.
    pub fn thermal_occupation(&self) -> Option<f64> {
        match self.kind {
            StateKind::Thermal | StateKind::Vacuum => Some(2.0 * self.sigma_s * self.sigma_s - 0.5),
            _ => None,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.sigma_s == self.sigma_a
    }

    /// Squeezing magnitude `s` recovered from the widths.
    pub fn squeezing(&self) -> f64 {
        0.5 * (self.sigma_a / self.sigma_s).ln()
    }

    /// `(γx, γy)` for `α`.
    #[inline]
    pub fn rotated_frame(&self, re: f64, im: f64) -> (f64, f64) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let dx = re - self.beta.re;
        let dy = im - self.beta.im;
        (dx * c + dy * s, -dx * s + dy * c)
    }

    #[inline]
    pub(crate) fn density_at(&self, re: f64, im: f64) -> f64 {
        let (gx, gy) = self.rotated_frame(re, im);
        let ss = self.sigma_s * self.sigma_s;
        let sa = self.sigma_a * self.sigma_a;
        (-(gx * gx) / (2.0 * ss) - (gy * gy) / (2.0 * sa)).exp() / (TAU * self.sigma_s * self.sigma_a)
    }

    /// Derivative of the density along the radial direction `α/|α|`.
    #[inline]
    pub(crate) fn radial_derivative_at(&self, r: f64, phi: f64) -> f64 {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = (0.5 * self.theta).sin_cos();
        let (gx, gy) = self.rotated_frame(r * cp, r * sp);
        let ss = self.sigma_s * self.sigma_s;
        let sa = self.sigma_a * self.sigma_a;
        // ∂γx/∂r and ∂γy/∂r along (cos φ, sin φ)
        let dgx = cp * ct + sp * st;
        let dgy = -cp * st + sp * ct;
        -self.density_at(r * cp, r * sp) * (gx * dgx / ss + gy * dgy / sa)
    }

    /// Wigner density `W(α)`.
    pub fn density(&self, alpha: PhaseAmplitude) -> Result<f64> {
        alpha.check_finite()?;
        Ok(self.density_at(alpha.re, alpha.im))
    }

    /// Symmetric-ordered moment `⟨|α|²⟩_W`.
    pub fn mean_abs_sq(&self) -> f64 {
        self.beta.norm_sqr() + self.sigma_s * self.sigma_s + self.sigma_a * self.sigma_a
    }

    /// `⟨n̂⟩ = ⟨|α|²⟩_W − 1/2`.
    pub fn mean_occupation(&self) -> f64 {
        self.mean_abs_sq() - 0.5
    }

    /// Exact number variance of a Gaussian state,
    /// `Var_W(|α|²) − 1/4 = 2 tr(V²) + 4 βᵀVβ − 1/4`.
    pub fn number_variance(&self) -> f64 {
        let ss = self.sigma_s * self.sigma_s;
        let sa = self.sigma_a * self.sigma_a;
        let (bx, by) = self.rotated_frame(0.0, 0.0);
        let tr_v2 = ss * ss + sa * sa;
        let quad = bx * bx * ss + by * by * sa;
        (2.0 * tr_v2 + 4.0 * quad - 0.25).max(0.0)
    }

    /// Map a pair of standard normals to a sample of the density.
    #[inline]
    fn transform(&self, z1: f64, z2: f64) -> PhaseAmplitude {
        let gx = self.sigma_s * z1;
        let gy = self.sigma_a * z2;
        let (s, c) = (0.5 * self.theta).sin_cos();
        PhaseAmplitude::new(self.beta.re + gx * c - gy * s, self.beta.im + gx * s + gy * c)
    }

    /// Fill `out` with the samples of one stream block.
    pub(crate) fn sample_block(&self, seed: u64, stream: usize, out: &mut Vec<PhaseAmplitude>, len: usize) {
        let mut rng = rng::stream_rng(seed, stream as u64);
        out.clear();
        out.extend((0..len).map(|_| {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            self.transform(z1, z2)
        }));
    }

    /// Draw `count` samples with the stream layout of [`crate::rng`].
    pub fn sample(&self, count: usize, seed: u64) -> Result<TrajectoryEnsemble> {
        if count == 0 {
            return Err(Error::domain("sample count must be >= 1"));
        }
        let streams = rng::stream_count(count);
        let blocks: Vec<Vec<PhaseAmplitude>> = (0..streams)
            .into_par_iter()
            .map(|b| {
                let range = rng::block_range(b, count);
                let mut out = Vec::with_capacity(range.len());
                self.sample_block(seed, b, &mut out, range.len());
                out
            })
            .collect();
        let samples = blocks.concat();
        Ok(TrajectoryEnsemble {
            modes: vec![samples],
            seed,
            stream_count: streams,
            count,
        })
    }
}

/// Sampled amplitudes for one or two modes.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryEnsemble {
    modes: Vec<Vec<PhaseAmplitude>>,
    seed: u64,
    stream_count: usize,
    count: usize,
}

impl TrajectoryEnsemble {
    /// Validates that every mode has the same non-zero length and that all
    /// amplitudes are finite.
    pub fn new(modes: Vec<Vec<PhaseAmplitude>>, seed: u64, stream_count: usize) -> Result<Self> {
        let count = modes.first().map_or(0, Vec::len);
        if modes.is_empty() || count == 0 {
            return Err(Error::EmptyEnsemble);
        }
        if !(1..=2).contains(&modes.len()) {
            return Err(Error::domain(format!(
                "ensembles carry 1 or 2 modes, got {}",
                modes.len()
            )));
        }
        if modes.iter().any(|m| m.len() != count) {
            return Err(Error::domain("modes have different sample counts"));
        }
        if let Some(bad) = modes.iter().flatten().find(|a| !a.is_finite()) {
            return Err(Error::domain(format!("non-finite amplitude {bad:?} in ensemble")));
        }
        Ok(Self {
            modes,
            seed,
            stream_count,
            count,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_count(&self) -> usize {
        self.stream_count
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, mode: usize) -> Result<&[PhaseAmplitude]> {
        self.modes
            .get(mode)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::domain(format!("mode {mode} out of range (have {})", self.modes.len())))
    }

    pub fn modes(&self) -> &[Vec<PhaseAmplitude>] {
        &self.modes
    }

    /// `(r, φ)` per sample of `mode`, with `φ ∈ [0, 2π)`.
    pub fn to_polar(&self, mode: usize) -> Result<Vec<(f64, f64)>> {
        Ok(self.mode(mode)?.iter().map(PhaseAmplitude::to_polar).collect())
    }

    /// Sample mean of `|α|²` and its standard error.
    pub fn mean_abs_sq(&self, mode: usize) -> Result<(f64, f64)> {
        let xs = self.mode(mode)?;
        Ok(sum::mean_and_stderr(xs.len(), |i| xs[i].norm_sqr()))
    }

    /// Sample mean of `α` with per-component standard errors.
    pub fn mean_amplitude(&self, mode: usize) -> Result<(PhaseAmplitude, PhaseAmplitude)> {
        let xs = self.mode(mode)?;
        let (mr, sr) = sum::mean_and_stderr(xs.len(), |i| xs[i].re);
        let (mi, si) = sum::mean_and_stderr(xs.len(), |i| xs[i].im);
        Ok((PhaseAmplitude::new(mr, mi), PhaseAmplitude::new(sr, si)))
    }
}

/// Wrap an angle into `[0, 2π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}
