//! Closed-form number distributions of thermal and squeezed coherent states.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distribution::{Method, NumberDistribution};
use crate::phase_space::{GaussianWignerState, PhaseAmplitude};
use crate::special::ScaledComplexSeries;
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// `D(β)S(η)|0⟩` with `β = |β|e^{iφ}` and `η = s·e^{iθ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezedCoherentParams {
    pub beta_mag: f64,
    pub varphi: f64,
    pub s: f64,
    pub theta: f64,
}

impl SqueezedCoherentParams {
    pub fn new(beta_mag: f64, varphi: f64, s: f64, theta: f64) -> Result<Self> {
        let p = Self {
            beta_mag,
            varphi,
            s,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.beta_mag, self.varphi, self.s, self.theta]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.beta_mag < 0.0 || self.s < 0.0 {
            return Err(Error::domain(format!("invalid squeezed coherent parameters {self:?}")));
        }
        Ok(())
    }

    pub fn beta(&self) -> PhaseAmplitude {
        PhaseAmplitude::from_polar(self.beta_mag, self.varphi)
    }

    pub fn to_state(&self) -> Result<GaussianWignerState> {
        self.validate()?;
        GaussianWignerState::squeezed_coherent(self.beta(), self.s, self.theta)
    }

    /// `⟨n̂⟩ = |β|² + sinh² s`.
    pub fn mean_occupation(&self) -> f64 {
        self.beta_mag * self.beta_mag + self.s.sinh().powi(2)
    }
}

/// `P_n = n̄ⁿ/(n̄ + 1)^{n+1}`.
pub fn pn_thermal(nbar: f64, n_max: usize) -> Result<NumberDistribution> {
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(Error::domain(format!("thermal occupation must be > 0, got {nbar}")));
    }
    let ln_ratio = (-1.0 / (nbar + 1.0)).ln_1p();
    let probs = (0..=n_max)
        .map(|n| (n as f64 * ln_ratio).exp() / (nbar + 1.0))
        .collect();
    Ok(NumberDistribution::exact(probs, Method::Analytic)?.with_metadata("nbar", nbar))
}

/// Poisson law of mean `mean`, built in log space so large means do not
/// underflow `e^{−mean}`.
pub fn poisson(mean: f64, n_max: usize) -> Result<NumberDistribution> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::domain(format!(
            "Poisson mean must be finite and >= 0, got {mean}"
        )));
    }
    let mut probs = Vec::with_capacity(n_max + 1);
    if mean == 0.0 {
        probs.push(1.0);
        probs.resize(n_max + 1, 0.0);
    } else {
        let ln_mean = mean.ln();
        let mut ln_p = -mean;
        for n in 0..=n_max {
            if n > 0 {
                ln_p += ln_mean - (n as f64).ln();
            }
            probs.push(ln_p.exp());
        }
    }
    Ok(NumberDistribution::exact(probs, Method::Analytic)?.with_metadata("mean", mean))
}

/// `|β|²[e^{−2s}cos²(φ − θ/2) + e^{2s}sin²(φ − θ/2)]`, the large-`|β|`
/// number variance.
pub fn variance_formula(p: &SqueezedCoherentParams) -> f64 {
    let (sn, cs) = (p.varphi - 0.5 * p.theta).sin_cos();
    p.beta_mag * p.beta_mag * ((-2.0 * p.s).exp() * cs * cs + (2.0 * p.s).exp() * sn * sn)
}

/// Width of the Wigner function along the direction of `β`.
pub fn sigma_eff(p: &SqueezedCoherentParams) -> f64 {
    let (sn, cs) = (p.varphi - 0.5 * p.theta).sin_cos();
    let ss = (-p.s).exp() / 2.0;
    let sa = p.s.exp() / 2.0;
    (ss * ss * cs * cs + sa * sa * sn * sn).sqrt()
}

/// Gaussian approximation `exp[−(n − |β|²)²/2Δ²n]/√(2πΔ²n)`.
pub fn gaussian_approximation(p: &SqueezedCoherentParams, n: usize) -> f64 {
    let var = variance_formula(p);
    let d = n as f64 - p.beta_mag * p.beta_mag;
    (-d * d / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Default `n_max`: `|β|² + 10·√Var(n) + 20` with the exact variance.
pub fn auto_n_max(p: &SqueezedCoherentParams) -> usize {
    let var = p.to_state().map(|s| s.number_variance()).unwrap_or(0.0);
    (p.beta_mag * p.beta_mag + 10.0 * var.sqrt() + 20.0).ceil() as usize
}

/// Stop extending an automatic range once this much mass remains.
const AUTO_TAIL: f64 = 1e-12;
const AUTO_CAP: usize = 50_000;

/// Squeezed coherent `P_n` from the complex Hermite recurrence.
///
/// With `t = tanh s`, the normalized sequence `g_n = (t/2)^{n/2} H_n(z)/√n!`
/// obeys `g_{n+1} = (a g_n − t√n g_{n−1})/√(n+1)` where
/// `a = β e^{−iθ/2} + β* e^{iθ/2} t`, and
/// `P_n = |g_n|² exp[−|β|² − Re(β*² e^{iθ}) t]/cosh s`.
/// Without an explicit `n_max` the range is extended past [`auto_n_max`]
/// until the remaining mass is below `1e-12`, which matters for strongly
/// squeezed states whose tails are far from Gaussian.
pub fn pn_squeezed_coherent(p: &SqueezedCoherentParams, n_max: Option<usize>) -> Result<NumberDistribution> {
    p.validate()?;
    let beta: Complex64 = p.beta().into();
    if p.s == 0.0 {
        let n = n_max.unwrap_or_else(|| auto_n_max(p));
        return Ok(poisson(beta.norm_sqr(), n)?.with_metadata("params", serde_json::to_string(p)?));
    }
    let t = p.s.tanh();
    let half = Complex64::from_polar(1.0, 0.5 * p.theta);
    let a = beta * half.conj() + beta.conj() * half * t;
    let ln_pref = -beta.norm_sqr() - (beta.conj() * beta.conj() * half * half).re * t - p.s.cosh().ln();
    let mut g = ScaledComplexSeries::new(a, t, ln_pref / LN_2);
    let mut probs = Vec::new();
    let mut mass = NeumaierSum::new();
    let floor = auto_n_max(p);
    loop {
        let n = probs.len();
        match n_max {
            Some(m) if n > m => break,
            None if (n > floor && 1.0 - mass.value() < AUTO_TAIL) || n > AUTO_CAP => break,
            _ => {}
        }
        let v = g.norm_sqr();
        probs.push(v);
        mass.add(v);
        g.advance();
    }
    Ok(NumberDistribution::exact(probs, Method::Analytic)?.with_metadata("params", serde_json::to_string(p)?))
}

/// Closed-form Bhattacharyya distance between thermal `P_n` and its binned
/// counterpart `P̃_n`.
pub fn db_thermal(nbar: f64) -> Result<f64> {
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(Error::domain(format!("thermal occupation must be > 0, got {nbar}")));
    }
    let k = 1.0 / (2.0 * nbar + 1.0);
    // −½ ln(1 − e^{−2k}) + ln(√(n̄+1) − √n̄ e^{−k})
    Ok(-0.5 * (-(-2.0 * k).exp_m1()).ln() + ((nbar + 1.0).sqrt() - nbar.sqrt() * (-k).exp()).ln())
}
