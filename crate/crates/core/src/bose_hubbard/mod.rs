//! Two-site Bose-Hubbard dynamics,
//! `H = −Ω(a₂†a₁ + a₁†a₂) + (U/2) Σᵢ aᵢ†aᵢ†aᵢaᵢ` with `ħ = 1`.
//!
//! Mode 1 starts in a coherent state and mode 2 in vacuum. [`twa`] evolves
//! truncated-Wigner trajectories, [`exact`] solves the Schrödinger equation
//! sector by sector in total number, and [`compare`] sets the binned,
//! Wigner-average and exact single-mode distributions side by side.

pub mod compare;
pub mod exact;
pub mod twa;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use compare::{compare_distributions, CompareOptions, ComparisonReport};
pub use exact::{exact_evolve, sector_cutoff, ExactEvolution, FockStateVector};
pub use twa::{twa_evolve, TwaEvolution};

/// Largest allowed `dt·max(|Ω|, |U|·n₁)`.
pub const STEP_BOUND: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BHParams {
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub n1_initial: f64,
    pub t_final: f64,
    pub dt: f64,
    pub n_traj: usize,
    pub seed: u64,
}

impl BHParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.u, self.omega, self.n1_initial, self.t_final, self.dt]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("Bose-Hubbard parameters must be finite".into()));
        }
        if self.n1_initial < 0.0 || self.t_final < 0.0 || self.dt <= 0.0 || self.n_traj == 0 {
            return Err(Error::Config(format!(
                "need n1_initial >= 0, t_final >= 0, dt > 0 and n_traj >= 1, got {self:?}"
            )));
        }
        let rate = self.omega.abs().max(self.u.abs() * self.n1_initial);
        if self.dt * rate > STEP_BOUND {
            return Err(Error::Config(format!(
                "dt·max(Ω, U·n1) = {:.3e} exceeds {STEP_BOUND}",
                self.dt * rate
            )));
        }
        Ok(())
    }
}

/// A run: parameters plus the times at which to record the state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BHConfig {
    #[serde(flatten)]
    pub params: BHParams,
    pub times: Vec<f64>,
}

impl BHConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.times.is_empty() {
            return Err(Error::Config("at least one output time is required".into()));
        }
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("output times must be non-decreasing".into()));
        }
        if self.times.iter().any(|&t| !(0.0..=self.params.t_final).contains(&t)) {
            return Err(Error::Config(format!(
                "output times must lie in [0, t_final = {}]",
                self.params.t_final
            )));
        }
        Ok(())
    }
}
