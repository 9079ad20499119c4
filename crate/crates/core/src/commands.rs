//! Implementations behind the `phasebin` subcommands. Each writes its
//! outputs and a `manifest.json` into the output directory and returns the
//! manifest.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic::{db_thermal, pn_squeezed_coherent, pn_thermal, poisson, SqueezedCoherentParams};
use crate::binning::{pn_binned_analytic, sample_and_bin, sample_and_count_groups, BinSpec};
use crate::bose_hubbard::{compare_distributions, exact_evolve, twa_evolve, BHConfig, CompareOptions};
use crate::diagnostics::{
    bhattacharyya, bhattacharyya_debiased_jackknife, fit_scaling_exponent_with, radial_profile_analytic,
    radial_profile_histogram, smoothness_check, RadialGrid, ScalingFit, ScalingPoint, SmoothnessOptions,
    SmoothnessVerdict, DEFAULT_SMOOTHING,
};
use crate::distribution::{Method, NumberDistribution};
use crate::fock::{auto_n_max, pn_quadrature, pn_wigner_average};
use crate::io::{self, Manifest, Metadata};
use crate::phase_space::{GaussianWignerState, PhaseAmplitude};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Options shared by every command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Global {
    pub seed: u64,
    pub ntraj: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StateName {
    Vacuum,
    Coherent,
    Thermal,
    Squeezed,
}

/// A Gaussian state from command-line flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
pub struct StateSpec {
    #[arg(long = "state", value_enum)]
    pub kind: StateName,
    /// Thermal occupation.
    #[arg(long, default_value_t = 10.0)]
    pub nbar: f64,
    /// Displacement magnitude |β|.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Displacement phase φ.
    #[arg(long, default_value_t = 0.0)]
    pub phase: f64,
    /// Squeezing magnitude s.
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    /// Squeezing angle θ.
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
}

impl StateSpec {
    pub fn state(&self) -> Result<GaussianWignerState> {
        match self.kind {
            StateName::Vacuum => Ok(GaussianWignerState::vacuum()),
            StateName::Thermal => GaussianWignerState::thermal(self.nbar),
            StateName::Coherent => GaussianWignerState::coherent(PhaseAmplitude::from_polar(self.beta, self.phase)),
            StateName::Squeezed => self.params()?.to_state(),
        }
    }

    fn params(&self) -> Result<SqueezedCoherentParams> {
        let s = if self.kind == StateName::Squeezed { self.s } else { 0.0 };
        SqueezedCoherentParams::new(self.beta, self.phase, s, self.theta)
    }

    /// Closed-form `P_n` where one exists.
    pub fn analytic(&self, n_max: usize) -> Result<NumberDistribution> {
        match self.kind {
            StateName::Thermal => pn_thermal(self.nbar, n_max),
            StateName::Vacuum => poisson(0.0, n_max),
            _ => pn_squeezed_coherent(&self.params()?, Some(n_max)),
        }
    }
}

fn finish(global: &Global, mut manifest: Manifest) -> Result<Manifest> {
    let path = global.out.join("manifest.json");
    manifest.outputs.push(path.clone());
    io::write_json(&path, &manifest)?;
    Ok(manifest)
}

fn write_distribution(global: &Global, stem: &str, d: &NumberDistribution, manifest: &mut Manifest) -> Result<()> {
    let path = match global.format {
        OutputFormat::Csv => {
            let p = global.out.join(format!("{stem}.csv"));
            io::write_distribution_csv(&p, d)?;
            p
        }
        OutputFormat::Json => {
            let p = global.out.join(format!("{stem}.json"));
            io::write_json(&p, d)?;
            p
        }
    };
    manifest.outputs.push(path);
    Ok(())
}

fn write_rows(
    global: &Global,
    stem: &str,
    header: &[&str],
    rows: Vec<Vec<String>>,
    manifest: &mut Manifest,
) -> Result<()> {
    let path = match global.format {
        OutputFormat::Csv => {
            let p = global.out.join(format!("{stem}.csv"));
            io::write_table_csv(&p, header, &rows, &Metadata::new())?;
            p
        }
        OutputFormat::Json => {
            let p = global.out.join(format!("{stem}.json"));
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| {
                    header
                        .iter()
                        .map(|h| h.to_string())
                        .zip(r.iter().map(|v| serde_json::Value::String(v.clone())))
                        .collect()
                })
                .collect();
            io::write_json(&p, &objs)?;
            p
        }
    };
    manifest.outputs.push(path);
    Ok(())
}

fn warn_on(manifest: &mut Manifest, label: &str, d: &crate::diagnostics::Bhattacharyya) {
    if let Some(w) = &d.warning {
        manifest.warnings.push(format!("{label}: {w}"));
    }
}

/// `P_n` of one state by the requested methods, plus pairwise distances.
pub fn cmd_pn(global: &Global, spec: &StateSpec, methods: &[Method], n_max: Option<usize>) -> Result<Manifest> {
    let state = spec.state()?;
    let n_max = n_max.unwrap_or_else(|| auto_n_max(&state));
    let config = serde_json::json!({ "state": spec, "methods": methods, "n_max": n_max, "global": global });
    let mut manifest = Manifest::new("pn", Some(global.seed), config);
    let mut results: Vec<(String, NumberDistribution)> = Vec::new();
    for &m in methods {
        let d = match m {
            Method::Analytic => spec.analytic(n_max)?,
            Method::Quadrature => pn_quadrature(&state, n_max)?,
            Method::Binned => sample_and_bin(&state, global.ntraj, global.seed, BinSpec::new(n_max))?,
            Method::WignerAverage => pn_wigner_average(&state.sample(global.ntraj, global.seed)?, 0, n_max)?,
        };
        results.push((m.as_str().to_string(), d));
        if m == Method::Analytic && matches!(spec.kind, StateName::Thermal | StateName::Vacuum) {
            results.push(("binned-analytic".into(), pn_binned_analytic(&state, n_max)?));
        }
    }
    for (name, d) in &results {
        write_distribution(global, &format!("pn_{name}"), d, &mut manifest)?;
    }
    let mut rows = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let b = bhattacharyya(&results[i].1, &results[j].1);
            warn_on(&mut manifest, &format!("{} vs {}", results[i].0, results[j].0), &b);
            rows.push(vec![
                results[i].0.clone(),
                results[j].0.clone(),
                b.coefficient.to_string(),
                b.distance.to_string(),
            ]);
        }
    }
    write_rows(
        global,
        "distances",
        &["p", "q", "coefficient", "distance"],
        rows,
        &mut manifest,
    )?;
    finish(global, manifest)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    /// Closed-form thermal distance against `n̄`.
    ThermalNbar,
    /// Sampled coherent states against `|β|²`.
    CoherentBeta,
    /// Sampled squeezed coherent states at `|β|² = 50` against `σ_eff`.
    SigmaEff,
}

/// Independent sample groups per stochastic point, for jackknife errors.
pub const SWEEP_GROUPS: usize = 16;
/// Sweeps below a decade in `x` are accepted down to this span.
pub const SWEEP_MIN_DECADES: f64 = 0.5;

pub fn default_sweep_points(sweep: Sweep) -> Vec<f64> {
    match sweep {
        Sweep::ThermalNbar => vec![10.0, 20.0, 50.0, 100.0, 200.0],
        Sweep::CoherentBeta => vec![25.0, 50.0, 100.0, 200.0],
        Sweep::SigmaEff => {
            let (lo, hi, k) = (0.25f64, 1.1f64, 12);
            (0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).collect()
        }
    }
}

/// Squeezed coherent state of effective radial width `σ_eff` at `φ = 0`:
/// amplitude squeezing (`θ = 0`) below `1/2`, phase squeezing (`θ = π`)
/// above.
pub fn sigma_eff_params(beta_sq: f64, sigma: f64) -> Result<SqueezedCoherentParams> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::domain(format!("σ_eff must be > 0, got {sigma}")));
    }
    let s = (2.0 * sigma).ln();
    if s <= 0.0 {
        SqueezedCoherentParams::new(beta_sq.sqrt(), 0.0, -s, 0.0)
    } else {
        SqueezedCoherentParams::new(beta_sq.sqrt(), 0.0, s, PI)
    }
}

/// Debiased `D_B` between exact `P_n` and `P̃_n` from `count` samples, with
/// a jackknife standard error.
pub fn sampled_distance(
    state: &GaussianWignerState,
    exact: &NumberDistribution,
    count: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let groups = sample_and_count_groups(state, count, seed, BinSpec::new(exact.n_max()), SWEEP_GROUPS)?;
    bhattacharyya_debiased_jackknife(exact, &groups)
}

/// Distance against the sweep variable; stochastic sweeps use `count`
/// samples per point and seed `seed + i` for point `i`.
pub fn scaling_sweep(sweep: Sweep, xs: &[f64], count: usize, seed: u64) -> Result<ScalingFit> {
    let points = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let point_seed = seed.wrapping_add(i as u64);
            let (d_b, stderr) = match sweep {
                Sweep::ThermalNbar => (db_thermal(x)?, None),
                Sweep::CoherentBeta => {
                    let p = SqueezedCoherentParams::new(x.sqrt(), 0.0, 0.0, 0.0)?;
                    let exact = pn_squeezed_coherent(&p, None)?;
                    let (d, se) = sampled_distance(&p.to_state()?, &exact, count, point_seed)?;
                    (d, Some(se))
                }
                Sweep::SigmaEff => {
                    let p = sigma_eff_params(50.0, x)?;
                    let exact = pn_squeezed_coherent(&p, None)?;
                    let (d, se) = sampled_distance(&p.to_state()?, &exact, count, point_seed)?;
                    (d, Some(se))
                }
            };
            Ok(ScalingPoint { x, d_b, stderr })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_decades = match sweep {
        Sweep::ThermalNbar => 1.0,
        _ => SWEEP_MIN_DECADES,
    };
    fit_scaling_exponent_with(&points, min_decades)
}

pub fn cmd_scaling(global: &Global, sweep: Sweep, xs: Option<Vec<f64>>) -> Result<Manifest> {
    let xs = xs.unwrap_or_else(|| default_sweep_points(sweep));
    let config = serde_json::json!({ "sweep": sweep, "points": xs, "global": global });
    let mut manifest = Manifest::new("scaling", Some(global.seed), config);
    let fit = scaling_sweep(sweep, &xs, global.ntraj, global.seed)?;
    let rows = fit
        .points
        .iter()
        .map(|p| {
            vec![
                p.x.to_string(),
                p.d_b.to_string(),
                p.stderr.map(|s| s.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    write_rows(global, "scaling", &["x", "d_b", "stderr"], rows, &mut manifest)?;
    let path = global.out.join("fit.json");
    io::write_json(&path, &fit)?;
    manifest.outputs.push(path);
    finish(global, manifest)
}

/// Source of a radial profile for `diagnose`.
pub enum DiagnoseSource<'a> {
    State(&'a StateSpec),
    Ensemble { path: &'a Path, mode: usize },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DiagnoseOptions {
    pub points: usize,
    pub smoothing: usize,
    pub smoothness: SmoothnessOptions,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            points: 2001,
            smoothing: DEFAULT_SMOOTHING,
            smoothness: SmoothnessOptions::default(),
        }
    }
}

pub fn cmd_diagnose(
    global: &Global,
    source: DiagnoseSource<'_>,
    ns: &[usize],
    opts: DiagnoseOptions,
) -> Result<Manifest> {
    let n_top = ns.iter().copied().max().unwrap_or(0);
    let (profile, config) = match source {
        DiagnoseSource::State(spec) => {
            let state = spec.state()?;
            let grid = RadialGrid::covering(&state, n_top, opts.points)?;
            (
                radial_profile_analytic(&state, grid),
                serde_json::json!({ "state": spec }),
            )
        }
        DiagnoseSource::Ensemble { path, mode } => {
            let (ens, _) = io::read_ensemble_csv(path)?;
            let reach = ens.mode(mode)?.iter().map(|a| a.abs()).fold(0.0, f64::max);
            let grid = RadialGrid::new(reach.max(((n_top + 1) as f64).sqrt()) + 0.1, opts.points)?;
            let prof = radial_profile_histogram(&ens, mode, grid, opts.smoothing)?;
            (prof, serde_json::json!({ "ensemble": path, "mode": mode }))
        }
    };
    let config = serde_json::json!({ "source": config, "n": ns, "options": opts, "global": global });
    let mut manifest = Manifest::new("diagnose", None, config);
    let path = global.out.join("profile.csv");
    io::write_profile_csv(&path, &profile, &Metadata::new())?;
    manifest.outputs.push(path);
    let verdicts: Vec<SmoothnessVerdict> = ns
        .iter()
        .map(|&n| smoothness_check(&profile, n, opts.smoothness))
        .collect::<Result<_>>()?;
    let rows = verdicts
        .iter()
        .map(|v| {
            vec![
                v.n.to_string(),
                if v.pass { "pass" } else { "fail" }.to_string(),
                v.min_value.to_string(),
                v.r_at_min.to_string(),
                v.overlap_empty.to_string(),
            ]
        })
        .collect();
    write_rows(
        global,
        "verdicts",
        &["n", "verdict", "min_sqrt_n_l_inh", "r_at_min", "overlap_empty"],
        rows,
        &mut manifest,
    )?;
    finish(global, manifest)
}

pub fn cmd_bose_hubbard(global: &Global, config_path: &Path) -> Result<Manifest> {
    let cfg: BHConfig = io::read_json(config_path)?;
    let config = serde_json::to_value(&cfg)?;
    let mut manifest = Manifest::new("bose-hubbard", Some(cfg.params.seed), config);
    let twa = twa_evolve(&cfg)?;
    let exact = exact_evolve(&cfg, None)?;
    if twa.flagged > 0 {
        manifest
            .warnings
            .push(format!("{} trajectories exceeded the drift bound", twa.flagged));
    }
    let mut pop_rows = Vec::new();
    let mut reports = Vec::new();
    let opts = CompareOptions::default();
    for (k, &t) in cfg.times.iter().enumerate() {
        let (n1, _) = twa.occupation(k, 0)?;
        let (n2, _) = twa.occupation(k, 1)?;
        pop_rows.push(vec![t.to_string(), n1.to_string(), n2.to_string(), "twa".into()]);
        let e1 = exact.states[k].mean_occupation(0)?;
        let e2 = exact.states[k].mean_occupation(1)?;
        pop_rows.push(vec![t.to_string(), e1.to_string(), e2.to_string(), "exact".into()]);
        for mode in 0..2 {
            let report = compare_distributions(&twa, &exact, k, mode, &opts)?;
            let stem = format!("t{k}_mode{}", mode + 1);
            write_distribution(global, &format!("pn_{stem}_binned"), &report.binned, &mut manifest)?;
            write_distribution(
                global,
                &format!("pn_{stem}_wigner-average"),
                &report.wigner_average,
                &mut manifest,
            )?;
            write_distribution(global, &format!("pn_{stem}_exact"), &report.exact, &mut manifest)?;
            if let Some(h) = &report.histogram {
                let p = global.out.join(format!("wigner2d_{stem}.csv"));
                io::write_histogram_csv(&p, h, &Metadata::from([("time".to_string(), t.to_string())]))?;
                manifest.outputs.push(p);
            }
            if let Some(prof) = &report.profile {
                let p = global.out.join(format!("profile_{stem}.csv"));
                io::write_profile_csv(&p, prof, &Metadata::from([("time".to_string(), t.to_string())]))?;
                manifest.outputs.push(p);
            }
            reports.push(report);
        }
    }
    write_rows(
        global,
        "populations",
        &["t", "n1", "n2", "method"],
        pop_rows,
        &mut manifest,
    )?;
    let path = global.out.join("report.json");
    io::write_json(&path, &reports)?;
    manifest.outputs.push(path);
    finish(global, manifest)
}

pub fn cmd_sample(global: &Global, spec: &StateSpec) -> Result<Manifest> {
    let state = spec.state()?;
    let ens = state.sample(global.ntraj, global.seed)?;
    let config = serde_json::json!({ "state": spec, "global": global });
    let mut manifest = Manifest::new("sample", Some(global.seed), config);
    let path = global.out.join("ensemble.csv");
    let meta = Metadata::from([("state".to_string(), serde_json::to_string(&state)?)]);
    io::write_ensemble_csv(&path, &ens, &meta)?;
    manifest.outputs.push(path);
    finish(global, manifest)
}
