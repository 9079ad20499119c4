//! Binned, Wigner-average and exact single-mode distributions at one time,
//! with the smoothness test applied to the reconstructed marginal Wigner
//! function.

use serde::{Deserialize, Serialize};

use super::{ExactEvolution, TwaEvolution};
use crate::binning::{bin_ensemble, BinSpec};
use crate::diagnostics::{
    bhattacharyya, radial_profile_from_histogram2d, smoothness_check, Histogram2d, RadialGrid, RadialProfile,
    SmoothnessOptions, SmoothnessVerdict, DEFAULT_SMOOTHING,
};
use crate::distribution::NumberDistribution;
use crate::fock::pn_wigner_average;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    /// Cell width of the 2-D histogram in each quadrature.
    pub histogram_width: f64,
    /// Radial grid spacing for the profile derived from the histogram.
    pub radial_step: f64,
    pub smoothing: usize,
    pub smoothness: SmoothnessOptions,
    /// Central probability mass of the exact distribution whose `n` are
    /// tested.
    pub relevant_mass: f64,
    /// Standard errors beyond which `P̃_n` counts as deviating.
    pub deviation_sigmas: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            histogram_width: 0.2,
            radial_step: 0.05,
            smoothing: DEFAULT_SMOOTHING,
            smoothness: SmoothnessOptions::default(),
            relevant_mass: 0.99,
            deviation_sigmas: 5.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    pub binned_exact: f64,
    pub wigner_exact: f64,
    pub binned_wigner: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub time: f64,
    pub mode: usize,
    /// `[lo, hi]` holding the central mass of the exact distribution.
    pub relevant_range: (usize, usize),
    pub binned: NumberDistribution,
    pub wigner_average: NumberDistribution,
    pub exact: NumberDistribution,
    pub distances: Distances,
    /// Verdicts over the relevant range, extended to every deviating `n`.
    pub smoothness: Vec<SmoothnessVerdict>,
    /// `n` where `|P̃_n − P_n|` exceeds the deviation threshold.
    pub deviations: Vec<usize>,
    #[serde(skip)]
    pub profile: Option<RadialProfile>,
    #[serde(skip)]
    pub histogram: Option<Histogram2d>,
}

impl ComparisonReport {
    /// All verdicts in the relevant range pass.
    pub fn smooth(&self) -> bool {
        self.smoothness.iter().all(|v| v.pass)
    }
}

/// Compare the three distributions of `mode` at output `index`.
pub fn compare_distributions(
    twa: &TwaEvolution,
    exact: &ExactEvolution,
    index: usize,
    mode: usize,
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    let ens = twa
        .ensembles
        .get(index)
        .ok_or_else(|| Error::domain(format!("no TWA output at index {index}")))?;
    let state = exact
        .states
        .get(index)
        .ok_or_else(|| Error::domain(format!("no exact output at index {index}")))?;
    let time = twa.times[index];
    if (state.time - time).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "TWA time {time} and exact time {} differ",
            state.time
        )));
    }
    let exact_p = state.marginal(mode)?;
    let n_max = exact_p.n_max();
    let binned = bin_ensemble(ens, mode, BinSpec::new(n_max))?.with_metadata("time", time);
    let wigner = pn_wigner_average(ens, mode, n_max)?.with_metadata("time", time);

    let distances = Distances {
        binned_exact: bhattacharyya(&binned, &exact_p).distance,
        wigner_exact: bhattacharyya(&wigner, &exact_p).distance,
        binned_wigner: bhattacharyya(&binned, &wigner).distance,
    };

    let (lo, hi) = exact_p.central_range(opts.relevant_mass);
    let total = binned.samples().unwrap_or(1) as f64;
    let deviations: Vec<usize> = (0..=n_max)
        .filter(|&n| {
            let (pt, p) = (binned.get(n), exact_p.get(n));
            let q = pt.max(p);
            let se = (q * (1.0 - q) / total).sqrt();
            (pt - p).abs() > opts.deviation_sigmas * se && (pt - p).abs() > 0.0
        })
        .collect();

    let dev_lo = deviations.first().copied().unwrap_or(lo);
    let dev_hi = deviations.last().copied().unwrap_or(hi);
    let samples = ens.mode(mode)?;
    let hist = Histogram2d::from_samples(samples, opts.histogram_width)?;
    let reach = samples.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let r_max = reach.max(((hi.max(dev_hi) + 1) as f64).sqrt()) + 2.0 * opts.histogram_width;
    let points = ((r_max / opts.radial_step).ceil() as usize + 1).max(crate::diagnostics::MIN_GRID_POINTS);
    let profile = radial_profile_from_histogram2d(&hist, RadialGrid::new(r_max, points)?, opts.smoothing);
    let smoothness = (lo.min(dev_lo)..=hi.max(dev_hi))
        .map(|n| smoothness_check(&profile, n, opts.smoothness))
        .collect::<Result<Vec<_>>>()?;

    Ok(ComparisonReport {
        time,
        mode,
        relevant_range: (lo, hi),
        binned,
        wigner_average: wigner,
        exact: exact_p,
        distances,
        smoothness,
        deviations,
        profile: Some(profile),
        histogram: Some(hist),
    })
}
