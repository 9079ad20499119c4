//! Truncated-Wigner trajectories with fixed-step RK4.
//!
//! The Weyl symbol of `H` gives `dα₁/dt = iΩα₂ − iU(|α₁|² − 1)α₁` and the
//! mirror equation for `α₂`; `N_W = |α₁|² + |α₂|²` and
//! `H_W = −Ω(α₂*α₁ + c.c.) + (U/2)Σ(|αᵢ|⁴ − 2|αᵢ|²)` are conserved along
//! each trajectory.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{BHConfig, BHParams};
use crate::phase_space::{PhaseAmplitude, TrajectoryEnsemble};
use crate::{rng, Error, Result};

/// Relative drift of `N_W` or `H_W` that flags a trajectory.
pub const DRIFT_FLAG: f64 = 1e-6;
/// Fraction of flagged trajectories that fails the run.
pub const FLAGGED_LIMIT: f64 = 1e-3;

/// `(Re α₁, Im α₁, Re α₂, Im α₂)`.
pub type State = [f64; 4];

#[inline]
fn drift(p: &BHParams, s: &State) -> State {
    let [x1, y1, x2, y2] = *s;
    let k1 = p.u * (x1 * x1 + y1 * y1 - 1.0);
    let k2 = p.u * (x2 * x2 + y2 * y2 - 1.0);
    // g = Ωα_other − k α_self, dα/dt = i g
    let (g1r, g1i) = (p.omega * x2 - k1 * x1, p.omega * y2 - k1 * y1);
    let (g2r, g2i) = (p.omega * x1 - k2 * x2, p.omega * y1 - k2 * y2);
    [-g1i, g1r, -g2i, g2r]
}

#[inline]
fn rk4_step(p: &BHParams, s: &State, h: f64) -> State {
    let add = |a: &State, k: &State, c: f64| [a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2], a[3] + c * k[3]];
    let k1 = drift(p, s);
    let k2 = drift(p, &add(s, &k1, 0.5 * h));
    let k3 = drift(p, &add(s, &k2, 0.5 * h));
    let k4 = drift(p, &add(s, &k3, h));
    let mut out = *s;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

pub fn number_symbol(s: &State) -> f64 {
    s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]
}

pub fn energy_symbol(p: &BHParams, s: &State) -> f64 {
    let n1 = s[0] * s[0] + s[1] * s[1];
    let n2 = s[2] * s[2] + s[3] * s[3];
    let hop = 2.0 * (s[2] * s[0] + s[3] * s[1]);
    -p.omega * hop + 0.5 * p.u * (n1 * n1 - 2.0 * n1 + n2 * n2 - 2.0 * n2)
}

/// Scale against which energy drift is measured; `H_W` itself can pass
/// through zero.
fn energy_scale(p: &BHParams, s: &State) -> f64 {
    let n1 = s[0] * s[0] + s[1] * s[1];
    let n2 = s[2] * s[2] + s[3] * s[3];
    (p.omega.abs() * (n1 + n2) + 0.5 * p.u.abs() * (n1 * n1 + 2.0 * n1 + n2 * n2 + 2.0 * n2)).max(f64::MIN_POSITIVE)
}

/// Advance `s` from `t0` to `t1` in equal steps no longer than `dt`.
pub fn integrate(p: &BHParams, s: &State, t0: f64, t1: f64) -> State {
    let span = t1 - t0;
    if span <= 0.0 {
        return *s;
    }
    let steps = (span / p.dt - 1e-9).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut out = *s;
    for _ in 0..steps {
        out = rk4_step(p, &out, h);
    }
    out
}

#[derive(Clone, Debug)]
pub struct TwaEvolution {
    pub times: Vec<f64>,
    /// Two-mode ensemble at each output time.
    pub ensembles: Vec<TrajectoryEnsemble>,
    pub flagged: usize,
    pub max_number_drift: f64,
    pub max_energy_drift: f64,
}

impl TwaEvolution {
    /// `mean |αᵢ|² − 1/2` and its standard error at output `k`.
    pub fn occupation(&self, k: usize, mode: usize) -> Result<(f64, f64)> {
        let (m, se) = self.ensembles[k].mean_abs_sq(mode)?;
        Ok((m - 0.5, se))
    }
}

fn initial_state(p: &BHParams, g: &mut impl rand::Rng) -> State {
    let mut z = [0.0f64; 4];
    for v in &mut z {
        *v = StandardNormal.sample(g);
    }
    [p.n1_initial.sqrt() + 0.5 * z[0], 0.5 * z[1], 0.5 * z[2], 0.5 * z[3]]
}

struct BlockResult {
    /// `[time][trajectory]` pairs for this block.
    modes: Vec<(Vec<PhaseAmplitude>, Vec<PhaseAmplitude>)>,
    flagged: usize,
    number_drift: f64,
    energy_drift: f64,
}

/// Sample the initial coherent ⊗ vacuum Wigner function and integrate
/// every trajectory to the configured times.
pub fn twa_evolve(cfg: &BHConfig) -> Result<TwaEvolution> {
    cfg.validate()?;
    let p = cfg.params;
    let count = p.n_traj;
    let streams = rng::stream_count(count);
    let blocks: Vec<BlockResult> = (0..streams)
        .into_par_iter()
        .map(|b| {
            let range = rng::block_range(b, count);
            let mut g = rng::stream_rng(p.seed, b as u64);
            let mut modes: Vec<(Vec<PhaseAmplitude>, Vec<PhaseAmplitude>)> = cfg
                .times
                .iter()
                .map(|_| (Vec::with_capacity(range.len()), Vec::with_capacity(range.len())))
                .collect();
            let (mut flagged, mut nd, mut ed) = (0, 0.0f64, 0.0f64);
            for _ in range {
                let start = initial_state(&p, &mut g);
                let (n0, e0, scale) = (
                    number_symbol(&start),
                    energy_symbol(&p, &start),
                    energy_scale(&p, &start),
                );
                let mut s = start;
                let mut t = 0.0;
                let mut worst = (0.0f64, 0.0f64);
                for (k, &tk) in cfg.times.iter().enumerate() {
                    s = integrate(&p, &s, t, tk);
                    t = tk;
                    modes[k].0.push(PhaseAmplitude::new(s[0], s[1]));
                    modes[k].1.push(PhaseAmplitude::new(s[2], s[3]));
                    worst.0 = worst.0.max((number_symbol(&s) - n0).abs() / n0.max(f64::MIN_POSITIVE));
                    worst.1 = worst.1.max((energy_symbol(&p, &s) - e0).abs() / scale);
                }
                if worst.0 > DRIFT_FLAG || worst.1 > DRIFT_FLAG || !s.iter().all(|v| v.is_finite()) {
                    flagged += 1;
                }
                nd = nd.max(worst.0);
                ed = ed.max(worst.1);
            }
            BlockResult {
                modes,
                flagged,
                number_drift: nd,
                energy_drift: ed,
            }
        })
        .collect();

    let flagged: usize = blocks.iter().map(|b| b.flagged).sum();
    if flagged as f64 > FLAGGED_LIMIT * count as f64 {
        return Err(Error::TrajectoryDrift { flagged, total: count });
    }
    let max_number_drift = blocks.iter().map(|b| b.number_drift).fold(0.0, f64::max);
    let max_energy_drift = blocks.iter().map(|b| b.energy_drift).fold(0.0, f64::max);
    let ensembles = (0..cfg.times.len())
        .map(|k| {
            let m1 = blocks.iter().flat_map(|b| b.modes[k].0.iter().copied()).collect();
            let m2 = blocks.iter().flat_map(|b| b.modes[k].1.iter().copied()).collect();
            TrajectoryEnsemble::new(vec![m1, m2], p.seed, streams)
        })
        .collect::<Result<_>>()?;
    Ok(TwaEvolution {
        times: cfg.times.clone(),
        ensembles,
        flagged,
        max_number_drift,
        max_energy_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(u: f64, omega: f64) -> BHParams {
        BHParams {
            u,
            omega,
            n1_initial: 100.0,
            t_final: 1.6,
            dt: 1e-3,
            n_traj: 4,
            seed: 3,
        }
    }

    #[test]
    fn linear_beam_splitter() {
        let p = params(0.0, 1.0);
        let s0: State = [9.8, 0.3, -0.2, 0.4];
        for t in [0.3, std::f64::consts::FRAC_PI_2] {
            let s = integrate(&p, &s0, 0.0, t);
            let (c, sn) = (t.cos(), t.sin());
            // α₁(t) = cos t α₁ + i sin t α₂
            let e = [
                c * s0[0] - sn * s0[3],
                c * s0[1] + sn * s0[2],
                c * s0[2] - sn * s0[1],
                c * s0[3] + sn * s0[0],
            ];
            for i in 0..4 {
                assert!((s[i] - e[i]).abs() < 1e-8, "t={t}");
            }
        }
    }

    #[test]
    fn pure_phase_evolution_without_tunnelling() {
        let mut p = params(0.5, 0.0);
        p.dt = 1e-4;
        let s0: State = [9.8, 0.3, -0.2, 0.4];
        let s = integrate(&p, &s0, 0.0, 0.5);
        let r = |a: f64, b: f64| (a * a + b * b).sqrt();
        assert!((r(s[0], s[1]) - r(s0[0], s0[1])).abs() < 1e-10);
        assert!((r(s[2], s[3]) - r(s0[2], s0[3])).abs() < 1e-10);
    }

    #[test]
    fn rk4_drift_is_fourth_order() {
        let mut p = params(0.25, 1.0);
        let s0: State = [10.1, -0.4, 0.3, 0.2];
        let e0 = energy_symbol(&p, &s0);
        p.dt = 4e-4;
        let a = (energy_symbol(&p, &integrate(&p, &s0, 0.0, 0.5)) - e0).abs();
        p.dt = 2e-4;
        let b = (energy_symbol(&p, &integrate(&p, &s0, 0.0, 0.5)) - e0).abs();
        assert!(a / b > 10.0, "ratio {}", a / b);
    }
}
