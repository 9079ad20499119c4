//! Validity diagnostics for the binned estimator: radial profiles and the
//! inhomogeneity length, the `√n·l_inh` smoothness test, Bhattacharyya
//! distances and power-law fits.
//!
//! Two radial functions are kept apart. `angular(r) = ∫dφ W(r, φ)` is the
//! Wigner function averaged over a circle, and `l_inh = angular/|∂angular/∂r|`
//! is computed from it; for a thermal state this gives `(n̄ + 1/2)/(2r)`.
//! `w(r) = r·angular(r)` is the radial probability density (`∫w dr = 1`) and
//! is what decides where the state is appreciable.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::binning::BinCounts;
use crate::distribution::NumberDistribution;
use crate::phase_space::{GaussianWignerState, PhaseAmplitude, TrajectoryEnsemble};
use crate::quadrature::{angular_density, angular_radial_derivative};
use crate::sum::{compensated_sum, NeumaierSum};
use crate::{Error, Result};

pub const MIN_GRID_POINTS: usize = 200;

/// Uniform grid `r_i = i·r_max/(points − 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub points: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, points: usize) -> Result<Self> {
        if points < MIN_GRID_POINTS {
            return Err(Error::domain(format!(
                "radial grid needs >= {MIN_GRID_POINTS} points, got {points}"
            )));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::domain(format!("radial grid needs r_max > 0, got {r_max}")));
        }
        Ok(Self { r_max, points })
    }

    /// Grid reaching past both the state and the Fock functions up to `n_max`.
    pub fn covering(state: &GaussianWignerState, n_max: usize, points: usize) -> Result<Self> {
        let widest = state.sigma_a.max(state.sigma_s);
        let r = (state.beta.abs() + 8.0 * widest).max(((n_max + 1) as f64).sqrt()) + 0.5;
        Self::new(r, points)
    }

    pub fn step(&self) -> f64 {
        self.r_max / (self.points - 1) as f64
    }

    pub fn radii(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| i as f64 * h).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    Analytic,
    Histogram,
}

/// Radial profile of a Wigner function on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    /// Radial probability density, `r·angular`.
    pub w: Vec<f64>,
    /// `∫dφ W(r, φ)`.
    pub angular: Vec<f64>,
    /// `angular/|∂angular/∂r|`; `+∞` where the slope vanishes.
    pub l_inh: Vec<f64>,
    /// Standard error of `w` for histogram profiles.
    pub w_stderr: Option<Vec<f64>>,
    pub source: ProfileSource,
}

impl RadialProfile {
    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap_or(&0.0)
    }

    /// `∫ w dr` by the trapezoid rule.
    pub fn total(&self) -> f64 {
        let h = self.r.get(1).copied().unwrap_or(0.0);
        let mut s = NeumaierSum::new();
        for (i, w) in self.w.iter().enumerate() {
            let edge = i == 0 || i + 1 == self.w.len();
            s.add(if edge { 0.5 * w } else { *w });
        }
        s.value() * h
    }
}

fn inhomogeneity(value: f64, slope: f64) -> f64 {
    if slope == 0.0 {
        f64::INFINITY
    } else {
        value / slope.abs()
    }
}

/// Profile of an analytic Gaussian state by angular quadrature; the slope is
/// integrated from the exact radial derivative.
pub fn radial_profile_analytic(state: &GaussianWignerState, grid: RadialGrid) -> RadialProfile {
    use rayon::prelude::*;
    let r = grid.radii();
    let (angular, slope): (Vec<f64>, Vec<f64>) = r
        .par_iter()
        .map(|&ri| (angular_density(state, ri), angular_radial_derivative(state, ri)))
        .unzip();
    let w = r.iter().zip(&angular).map(|(ri, a)| ri * a).collect();
    let l_inh = angular.iter().zip(&slope).map(|(a, d)| inhomogeneity(*a, *d)).collect();
    RadialProfile {
        r,
        w,
        angular,
        l_inh,
        w_stderr: None,
        source: ProfileSource::Analytic,
    }
}

/// Centered moving average over `window` points, shrinking at the ends.
fn boxcar_smooth(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            compensated_sum(&values[lo..hi]) / (hi - lo) as f64
        })
        .collect()
}

/// Central differences; the slope at `r = 0` is zero by symmetry and the
/// outer end is one-sided.
fn radial_slope(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| match i {
            0 => 0.0,
            i if i + 1 == n => (values[i] - values[i - 1]) / h,
            i => (values[i + 1] - values[i - 1]) / (2.0 * h),
        })
        .collect()
}

fn smoothed_profile(
    r: Vec<f64>,
    angular: Vec<f64>,
    w: Vec<f64>,
    w_stderr: Vec<f64>,
    h: f64,
    window: usize,
) -> RadialProfile {
    let smooth = boxcar_smooth(&angular, window.max(1));
    let slope = radial_slope(&smooth, h);
    let l_inh = smooth.iter().zip(&slope).map(|(a, d)| inhomogeneity(*a, *d)).collect();
    RadialProfile {
        r,
        w,
        angular,
        l_inh,
        w_stderr: Some(w_stderr),
        source: ProfileSource::Histogram,
    }
}

/// Default boxcar width, in grid cells, applied before differentiating.
pub const DEFAULT_SMOOTHING: usize = 3;

/// Profile from a radial histogram of one ensemble mode. Cell `i` covers
/// `[r_i − h/2, r_i + h/2)` (`[0, h/2)` for the first); its probability
/// over the annulus area gives `angular`, over the width gives `w`.
pub fn radial_profile_histogram(
    ensemble: &TrajectoryEnsemble,
    mode: usize,
    grid: RadialGrid,
    smoothing: usize,
) -> Result<RadialProfile> {
    let samples = ensemble.mode(mode)?;
    let h = grid.step();
    let r = grid.radii();
    let mut counts = vec![0u64; grid.points];
    for a in samples {
        let k = (a.abs() / h + 0.5).floor();
        if k < grid.points as f64 {
            counts[k as usize] += 1;
        }
    }
    let total = samples.len() as f64;
    let mut angular = Vec::with_capacity(grid.points);
    let mut w = Vec::with_capacity(grid.points);
    let mut w_stderr = Vec::with_capacity(grid.points);
    for (i, &c) in counts.iter().enumerate() {
        let lo = (r[i] - 0.5 * h).max(0.0);
        let hi = r[i] + 0.5 * h;
        let p = c as f64 / total;
        angular.push(2.0 * p / (hi * hi - lo * lo));
        w.push(p / (hi - lo));
        w_stderr.push((p * (1.0 - p) / total).sqrt() / (hi - lo));
    }
    Ok(smoothed_profile(r, angular, w, w_stderr, h, smoothing))
}

/// Square 2-D histogram of one mode over `(Re α, Im α)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram2d {
    /// Lower edge of the first cell on both axes.
    pub origin: f64,
    pub width: f64,
    pub cells: usize,
    /// Row-major, `counts[iy·cells + ix]`.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram2d {
    /// Cells of `width` on a square centred at the origin that holds every
    /// sample.
    pub fn from_samples(samples: &[PhaseAmplitude], width: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if width.is_nan() || width <= 0.0 {
            return Err(Error::domain("histogram cell width must be > 0"));
        }
        let reach = samples.iter().map(|a| a.re.abs().max(a.im.abs())).fold(0.0, f64::max);
        let half_cells = (reach / width).floor() as usize + 1;
        let cells = 2 * half_cells;
        let origin = -(half_cells as f64) * width;
        let mut counts = vec![0u64; cells * cells];
        for a in samples {
            let ix = (((a.re - origin) / width).floor() as usize).min(cells - 1);
            let iy = (((a.im - origin) / width).floor() as usize).min(cells - 1);
            counts[iy * cells + ix] += 1;
        }
        Ok(Self {
            origin,
            width,
            cells,
            counts,
            total: samples.len() as u64,
        })
    }

    /// Estimated density in the cell containing `(x, y)`.
    pub fn cell_density(&self, ix: usize, iy: usize) -> f64 {
        self.counts[iy * self.cells + ix] as f64 / (self.total as f64 * self.width * self.width)
    }

    /// Bilinear interpolation between cell centres, zero outside.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        let fx = (x - self.origin) / self.width - 0.5;
        let fy = (y - self.origin) / self.width - 0.5;
        let (x0, y0) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - x0, fy - y0);
        let at = |ix: f64, iy: f64| {
            if ix < 0.0 || iy < 0.0 || ix >= self.cells as f64 || iy >= self.cells as f64 {
                0.0
            } else {
                self.cell_density(ix as usize, iy as usize)
            }
        };
        (1.0 - tx) * (1.0 - ty) * at(x0, y0)
            + tx * (1.0 - ty) * at(x0 + 1.0, y0)
            + (1.0 - tx) * ty * at(x0, y0 + 1.0)
            + tx * ty * at(x0 + 1.0, y0 + 1.0)
    }

    /// Cell centres and densities, row by row.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.cells).flat_map(move |iy| {
            (0..self.cells).map(move |ix| {
                let x = self.origin + (ix as f64 + 0.5) * self.width;
                let y = self.origin + (iy as f64 + 0.5) * self.width;
                (x, y, self.cell_density(ix, iy))
            })
        })
    }
}

/// Profile from a 2-D histogram: the interpolated density averaged around
/// circles of each grid radius.
pub fn radial_profile_from_histogram2d(hist: &Histogram2d, grid: RadialGrid, smoothing: usize) -> RadialProfile {
    let h = grid.step();
    let r = grid.radii();
    let angular: Vec<f64> = r
        .iter()
        .map(|&ri| {
            if ri == 0.0 {
                return TAU * hist.density(0.0, 0.0);
            }
            let m = ((TAU * ri / (0.25 * hist.width)).ceil() as usize).max(64);
            let s: NeumaierSum = (0..m)
                .map(|k| {
                    let phi = TAU * k as f64 / m as f64;
                    hist.density(ri * phi.cos(), ri * phi.sin())
                })
                .collect();
            s.value() * TAU / m as f64
        })
        .collect();
    let w: Vec<f64> = r.iter().zip(&angular).map(|(ri, a)| ri * a).collect();
    // Poisson error of a circle average is not tracked cell by cell; report
    // the count-based error of an annulus of one grid step instead.
    let n = hist.total as f64;
    let w_stderr = w.iter().map(|wi| (wi * h / n).sqrt() / h).collect();
    smoothed_profile(r, angular, w, w_stderr, h, smoothing)
}

/// Threshold and support cut for [`smoothness_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessOptions {
    /// The test passes when `min √n·l_inh ≥ threshold`.
    pub threshold: f64,
    /// Points with `w < eps·max(w)` are outside the state's support.
    pub support_eps: f64,
}

impl Default for SmoothnessOptions {
    fn default() -> Self {
        Self {
            threshold: 1.0,
            support_eps: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessVerdict {
    pub n: usize,
    pub pass: bool,
    pub min_value: f64,
    pub r_at_min: f64,
    /// The state's support starts beyond `√(n+1)`; the minimum is then taken
    /// at the inner edge of the support, where the Fock function's tail
    /// first meets the state.
    pub overlap_empty: bool,
}

/// Minimum of `√n·l_inh(r)` over `r ≤ √(n+1)` where `w` is appreciable.
pub fn smoothness_check(profile: &RadialProfile, n: usize, opts: SmoothnessOptions) -> Result<SmoothnessVerdict> {
    let reach = ((n + 1) as f64).sqrt();
    let peak = profile.w.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::EmptyEnsemble);
    }
    let cut = opts.support_eps * peak;
    let last_w = *profile.w.last().unwrap_or(&0.0);
    if profile.r_max() < reach && last_w >= cut {
        return Err(Error::InsufficientCoverage {
            r_max: profile.r_max(),
            required: reach,
        });
    }
    let root_n = (n as f64).sqrt();
    let mut best = (f64::INFINITY, f64::NAN);
    let mut any = false;
    for i in 0..profile.r.len() {
        if profile.r[i] > reach {
            break;
        }
        if profile.w[i] >= cut {
            any = true;
            let v = root_n * profile.l_inh[i];
            if v < best.0 {
                best = (v, profile.r[i]);
            }
        }
    }
    let overlap_empty = !any;
    if overlap_empty {
        let i = profile.w.iter().position(|&w| w >= cut).expect("peak is above the cut");
        best = (root_n * profile.l_inh[i], profile.r[i]);
    }
    Ok(SmoothnessVerdict {
        n,
        pass: best.0 >= opts.threshold,
        min_value: best.0,
        r_at_min: best.1,
        overlap_empty,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bhattacharyya {
    pub coefficient: f64,
    /// `−ln B`; `+∞` when `B = 0`.
    pub distance: f64,
    pub warning: Option<String>,
}

const NORMALIZATION_SLACK: f64 = 0.01;

fn normalization_warning(p: &NumberDistribution, q: &NumberDistribution) -> Option<String> {
    let bad: Vec<String> = [("first", p), ("second", q)]
        .iter()
        .filter(|(_, d)| (d.total() - 1.0).abs() > NORMALIZATION_SLACK)
        .map(|(name, d)| format!("{name} distribution sums to {:.6}", d.total()))
        .collect();
    (!bad.is_empty()).then(|| bad.join("; "))
}

/// `B = Σ √(P_n Q_n)` over the common range (the shorter input is padded
/// with zeros) and `D_B = −ln B`. Negative stochastic entries contribute
/// nothing.
pub fn bhattacharyya(p: &NumberDistribution, q: &NumberDistribution) -> Bhattacharyya {
    let len = p.len().min(q.len());
    let terms: Vec<f64> = (0..len).map(|n| (p.get(n) * q.get(n)).max(0.0).sqrt()).collect();
    let coefficient = compensated_sum(&terms);
    let distance = if coefficient == 0.0 {
        f64::INFINITY
    } else {
        (-coefficient.ln()).max(0.0)
    };
    Bhattacharyya {
        coefficient,
        distance,
        warning: normalization_warning(p, q),
    }
}

/// First-order bias-corrected `D_B` between an exact distribution and a
/// binned estimate from `N` samples.
///
/// The plug-in `√p̂` underestimates `√p` by about `√p·(1 − p)/(8Np)`, which
/// at `10⁷` samples is as large as the distances of well-resolved states.
/// Each term is scaled by `1 + (1 − p̂)/(8N p̂)`. The result is not clamped,
/// so it can be slightly negative when the true distance is below the noise.
pub fn bhattacharyya_debiased(exact: &NumberDistribution, counts: &BinCounts) -> Result<f64> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let nf = total as f64;
    let terms: Vec<f64> = counts
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(n, &c)| {
            let p = c as f64 / nf;
            (exact.get(n).max(0.0) * p).sqrt() * (1.0 + (1.0 - p) / (8.0 * nf * p))
        })
        .collect();
    let b = compensated_sum(&terms);
    if b <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-b.ln())
}

/// Debiased distance of the pooled counts with a delete-one-group jackknife
/// standard error. Empty groups (fewer sample blocks than groups) are
/// skipped; with fewer than two left the error is NaN.
pub fn bhattacharyya_debiased_jackknife(exact: &NumberDistribution, groups: &[BinCounts]) -> Result<(f64, f64)> {
    let pooled = pool(groups.iter())?;
    let full = bhattacharyya_debiased(exact, &pooled)?;
    let groups: Vec<&BinCounts> = groups.iter().filter(|c| c.total() > 0).collect();
    let g = groups.len();
    if g < 2 {
        return Ok((full, f64::NAN));
    }
    let leave_out: Vec<f64> = (0..g)
        .map(|k| {
            let rest = pool(groups.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, c)| *c))?;
            bhattacharyya_debiased(exact, &rest)
        })
        .collect::<Result<_>>()?;
    let mean = compensated_sum(&leave_out) / g as f64;
    let ss: Vec<f64> = leave_out.iter().map(|v| (v - mean) * (v - mean)).collect();
    let stderr = ((g as f64 - 1.0) / g as f64 * compensated_sum(&ss)).sqrt();
    Ok((full, stderr))
}

fn pool<'a>(mut groups: impl Iterator<Item = &'a BinCounts>) -> Result<BinCounts> {
    let first = groups.next().ok_or(Error::EmptyEnsemble)?.clone();
    Ok(groups.fold(first, |mut acc, c| {
        for (a, b) in acc.counts.iter_mut().zip(&c.counts) {
            *a += b;
        }
        acc.overflow += c.overflow;
        acc
    }))
}

/// One `(x, D_B)` point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub x: f64,
    pub d_b: f64,
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: Vec<ScalingPoint>,
}

/// Least-squares slope of `ln D_B` against `ln x`, requiring at least four
/// points whose `x` spans `min_decades`.
pub fn fit_scaling_exponent_with(points: &[ScalingPoint], min_decades: f64) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::domain(format!(
            "scaling fit needs >= 4 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| !(p.x > 0.0 && p.d_b > 0.0 && p.d_b.is_finite())) {
        return Err(Error::domain(format!(
            "scaling fit needs positive values, got x={}, D_B={}",
            p.x, p.d_b
        )));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.x.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.d_b.ln()).collect();
    let span = (lx.iter().copied().fold(f64::MIN, f64::max) - lx.iter().copied().fold(f64::MAX, f64::min))
        / std::f64::consts::LN_10;
    if span + 1e-12 < min_decades {
        return Err(Error::domain(format!("x spans {span:.2} decades, need {min_decades}")));
    }
    let k = points.len() as f64;
    let mx = compensated_sum(&lx) / k;
    let my = compensated_sum(&ly) / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (rss / (k - 2.0) / sxx).sqrt();
    Ok(ScalingFit {
        exponent: slope,
        stderr,
        intercept,
        points: points.to_vec(),
    })
}

/// [`fit_scaling_exponent_with`] at one decade.
pub fn fit_scaling_exponent(points: &[ScalingPoint]) -> Result<ScalingFit> {
    fit_scaling_exponent_with(points, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::pn_thermal;
    use crate::binning::pn_binned_analytic;
    use crate::Method;

    #[test]
    fn jackknife_skips_empty_groups() {
        let st = GaussianWignerState::coherent(PhaseAmplitude::new(2.0, 0.0)).unwrap();
        let exact = crate::analytic::poisson(4.0, 40).unwrap();
        let spec = crate::binning::BinSpec::new(40);
        // three blocks spread over sixteen groups
        let groups = crate::binning::sample_and_count_groups(&st, 20_000, 5, spec, 16).unwrap();
        let (d, se) = bhattacharyya_debiased_jackknife(&exact, &groups).unwrap();
        assert!(d.is_finite() && se.is_finite() && se > 0.0);
        let one = crate::binning::sample_and_count_groups(&st, 1_000, 5, spec, 16).unwrap();
        let (d, se) = bhattacharyya_debiased_jackknife(&exact, &one).unwrap();
        assert!(d.is_finite() && se.is_nan());
    }

    #[test]
    fn thermal_inhomogeneity_length() {
        let st = GaussianWignerState::thermal(10.0).unwrap();
        let prof = radial_profile_analytic(&st, RadialGrid::new(12.0, 241).unwrap());
        for (r, l) in prof.r.iter().zip(&prof.l_inh).skip(1) {
            let expect = 10.5 / (2.0 * r);
            assert!((l - expect).abs() < 1e-6 * expect, "r={r}");
        }
        assert!(prof.l_inh[0].is_infinite());
        // trapezoid error plus the tail beyond r = 12
        assert!((prof.total() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn vacuum_radial_peak() {
        let grid = RadialGrid::new(3.0, 301).unwrap();
        let prof = radial_profile_analytic(&GaussianWignerState::vacuum(), grid);
        let imax = (0..prof.w.len())
            .max_by(|&a, &b| prof.w[a].total_cmp(&prof.w[b]))
            .unwrap();
        assert!((prof.r[imax] - 0.5).abs() <= grid.step());
    }

    #[test]
    fn thermal_smoothness_example() {
        let st = GaussianWignerState::thermal(10.0).unwrap();
        let prof = radial_profile_analytic(&st, RadialGrid::new(15.0, 3001).unwrap());
        let strict = SmoothnessOptions {
            threshold: 10.0,
            ..Default::default()
        };
        let v = smoothness_check(&prof, 5, strict).unwrap();
        let expect = 5f64.sqrt() * 10.5 / (2.0 * 6f64.sqrt());
        assert!(!v.pass);
        assert!((v.min_value - expect).abs() < 0.01, "{}", v.min_value);
        assert!(smoothness_check(&prof, 5, SmoothnessOptions::default()).unwrap().pass);
    }

    #[test]
    fn coverage_error() {
        let st = GaussianWignerState::thermal(10.0).unwrap();
        let prof = radial_profile_analytic(&st, RadialGrid::new(3.0, 200).unwrap());
        assert!(matches!(
            smoothness_check(&prof, 50, SmoothnessOptions::default()),
            Err(Error::InsufficientCoverage { .. })
        ));
    }

    #[test]
    fn bhattacharyya_edge_cases() {
        let p = NumberDistribution::exact(vec![0.2, 0.8], Method::Analytic).unwrap();
        let q = NumberDistribution::exact(vec![0.0, 0.0, 1.0], Method::Analytic).unwrap();
        assert_eq!(bhattacharyya(&p, &p).distance, 0.0);
        let d = bhattacharyya(&p, &q);
        assert_eq!(d.coefficient, 0.0);
        assert!(d.distance.is_infinite());
        let half = NumberDistribution::exact(vec![0.5], Method::Analytic).unwrap();
        assert!(bhattacharyya(&p, &half).warning.is_some());
    }

    #[test]
    fn thermal_distance_matches_closed_form() {
        let p = pn_thermal(10.0, 2000).unwrap();
        let q = pn_binned_analytic(&GaussianWignerState::thermal(10.0).unwrap(), 2000).unwrap();
        let d = bhattacharyya(&p, &q).distance;
        assert!((d - crate::analytic::db_thermal(10.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<ScalingPoint> = [10.0, 20.0, 50.0, 100.0, 200.0]
            .iter()
            .map(|&x: &f64| ScalingPoint {
                x,
                d_b: 3.0 * x.powf(-4.0),
                stderr: None,
            })
            .collect();
        let fit = fit_scaling_exponent(&pts).unwrap();
        assert!((fit.exponent + 4.0).abs() < 1e-12);
        assert!(fit_scaling_exponent(&pts[..3]).is_err());
        assert!(fit_scaling_exponent(&pts[..4]).is_ok());
        assert!(fit_scaling_exponent(&pts[1..4]).is_err());
        let narrow: Vec<ScalingPoint> = pts.iter().map(|p| ScalingPoint { x: p.x.sqrt(), ..*p }).collect();
        assert!(fit_scaling_exponent(&narrow[..4]).is_err());
    }
}
