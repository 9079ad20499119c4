//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! for its criterion before asserting.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use phasebin::analytic::{db_thermal, pn_squeezed_coherent, pn_thermal, poisson, SqueezedCoherentParams};
use phasebin::binning::{pn_binned_analytic, pn_boxcar_quadrature, sample_and_bin, sample_and_count_groups, BinSpec};
use phasebin::bose_hubbard::twa::{energy_symbol, integrate, number_symbol, State};
use phasebin::bose_hubbard::{compare_distributions, exact_evolve, twa_evolve, BHConfig, BHParams, CompareOptions};
use phasebin::commands::{
    self, default_sweep_points, scaling_sweep, Global, OutputFormat, StateName, StateSpec, Sweep,
};
use phasebin::diagnostics::{radial_profile_analytic, smoothness_check, RadialGrid, SmoothnessOptions};
use phasebin::fock::{fock_wigner, fock_wigner_table, pn_quadrature, pn_wigner_average, wigner_average_total};
use phasebin::io::Manifest;
use phasebin::{GaussianWignerState, Method, NumberDistribution, PhaseAmplitude};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id} ({name}): {} | {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

const SAMPLES: usize = 10_000_000;

#[test]
fn criterion_1_thermal_closed_form() {
    let mut worst: f64 = 0.0;
    for nbar in [0.1f64, 1.0, 10.0, 100.0] {
        let q = (-1.0 / (nbar + 0.5)).exp();
        let ratio = nbar / (nbar + 1.0);
        let mut direct = 0.0;
        let mut n = 0usize;
        loop {
            let p = (n as f64 * ratio.ln()).exp() / (nbar + 1.0);
            let pt = (n as f64 * q.ln()).exp() * (1.0 - q);
            direct += (p * pt).sqrt();
            if p < 1e-300 || n > 200_000 {
                break;
            }
            n += 1;
        }
        worst = worst.max((db_thermal(nbar).unwrap() - -f64::ln(direct)).abs());
    }
    let fit = scaling_sweep(Sweep::ThermalNbar, &default_sweep_points(Sweep::ThermalNbar), 0, 0).unwrap();
    let pass = worst < 1e-10 && (fit.exponent + 4.0).abs() <= 0.1;
    report(
        1,
        "thermal closed form",
        pass,
        &format!(
            "max |closed form - direct sum| = {worst:.2e}, exponent = {:.4}",
            fit.exponent
        ),
    );
}

#[test]
fn criterion_2_thermal_discrepancy() {
    let gap = |nbar: f64| {
        let exact = pn_thermal(nbar, 10).unwrap().get(0);
        let binned = pn_binned_analytic(&GaussianWignerState::thermal(nbar).unwrap(), 10)
            .unwrap()
            .get(0);
        (binned - exact).abs()
    };
    let (g10, g1) = (gap(10.0), gap(1.0));
    let pass = (5e-5..=1e-4).contains(&g10) && (5e-3..=2e-2).contains(&g1);
    report(
        2,
        "thermal discrepancy",
        pass,
        &format!("|P~0 - P0| = {g10:.4e} (nbar=10), {g1:.4e} (nbar=1)"),
    );
}

#[test]
fn criterion_3_coherent_scaling() {
    let fit = scaling_sweep(
        Sweep::CoherentBeta,
        &default_sweep_points(Sweep::CoherentBeta),
        SAMPLES,
        31,
    )
    .unwrap();
    let pts: Vec<String> = fit.points.iter().map(|p| format!("{}:{:.3e}", p.x, p.d_b)).collect();
    let pass = (fit.exponent + 1.0).abs() <= 0.15;
    report(
        3,
        "coherent scaling",
        pass,
        &format!(
            "exponent = {:.3} +- {:.3}, D_B = [{}]",
            fit.exponent,
            fit.stderr,
            pts.join(", ")
        ),
    );
}

#[test]
fn criterion_4_sigma_eff_scaling() {
    let fit = scaling_sweep(Sweep::SigmaEff, &default_sweep_points(Sweep::SigmaEff), SAMPLES, 41).unwrap();
    let pts: Vec<String> = fit.points.iter().map(|p| format!("{:.3}:{:.2e}", p.x, p.d_b)).collect();
    let pass = (fit.exponent + 6.0).abs() <= 0.5;
    report(
        4,
        "sigma_eff scaling",
        pass,
        &format!(
            "exponent = {:.3} +- {:.3}, D_B = [{}]",
            fit.exponent,
            fit.stderr,
            pts.join(", ")
        ),
    );
}

#[test]
fn criterion_5_breakdown() {
    let opts = SmoothnessOptions::default();

    // amplitude squeezed: oscillating P_n, smooth P~_n
    let p = SqueezedCoherentParams::new(20f64.sqrt(), 0.0, 1.5, 0.0).unwrap();
    let state = p.to_state().unwrap();
    let exact = pn_squeezed_coherent(&p, None).unwrap();
    let n_max = exact.n_max();
    let quad = pn_quadrature(&state, n_max).unwrap();
    let cross = (0..=n_max)
        .map(|n| (exact.get(n) - quad.get(n)).abs())
        .fold(0.0, f64::max);
    let binned = pn_boxcar_quadrature(&state, n_max).unwrap();
    let sampled = sample_and_bin(&state, SAMPLES, 51, BinSpec::new(n_max)).unwrap();
    let maxima_exact = exact.local_maxima(81).len();
    let maxima_binned = binned.local_maxima(81).len();
    let maxima_sampled = sampled.local_maxima(81).len();
    let prof = radial_profile_analytic(&state, RadialGrid::covering(&state, 100, 4001).unwrap());
    let fails_all = (0..=100).all(|n| !smoothness_check(&prof, n, opts).unwrap().pass);
    let amplitude_ok = cross <= 1e-7 && maxima_exact >= 8 && maxima_binned <= 2 && fails_all;

    // phase squeezed: breakdown confined to small n
    let p = SqueezedCoherentParams::new(20f64.sqrt(), 0.0, 1.5, PI).unwrap();
    let state = p.to_state().unwrap();
    let exact_pi = pn_squeezed_coherent(&p, None).unwrap();
    let n_max = exact_pi.n_max();
    let binned_pi = pn_boxcar_quadrature(&state, n_max).unwrap();
    let prof = radial_profile_analytic(&state, RadialGrid::covering(&state, n_max, 4001).unwrap());
    let verdicts: Vec<_> = (0..=n_max).map(|n| smoothness_check(&prof, n, opts).unwrap()).collect();
    let last_fail = verdicts.iter().filter(|v| !v.pass).map(|v| v.n).max();
    let small_fail = verdicts.iter().take(10).all(|v| !v.pass);
    let h = common::hellinger_terms(exact_pi.probs(), binned_pi.probs());
    let share = h.iter().take(26).sum::<f64>() / h.iter().sum::<f64>();
    let phase_ok = small_fail && last_fail.is_some_and(|n| n <= 30) && share > 0.5;

    report(
        5,
        "breakdown",
        amplitude_ok && phase_ok,
        &format!(
            "theta=0: quad cross-check {cross:.1e}, maxima exact {maxima_exact} / binned {maxima_binned} \
             (sampled {maxima_sampled}), fails for all n<=100: {fails_all}; theta=pi: last failing n = {last_fail:?}, \
             D_B share from n<=25 = {share:.3}"
        ),
    );
}

#[test]
fn criterion_6_laguerre_stability() {
    let mut worst: f64 = 0.0;
    let mut finite = true;
    // amplitudes with integer |α|², so both entry points see the same x
    for (n, re, im) in [(330u64, 6u64, 18u64), (1000, 25, 25), (2000, 40, 0), (2000, 40, 20)] {
        let abs_sq = re * re + im * im;
        let (sign, ln) = common::laguerre_scaled_exact(n, 4 * abs_sq);
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        let exact_ln = ln + (2.0 / PI).ln();
        let mut table = vec![0.0; n as usize + 1];
        fock_wigner_table(abs_sq as f64, &mut table).unwrap();
        let direct = fock_wigner(n as usize, PhaseAmplitude::new(re as f64, im as f64)).unwrap();
        finite &= table[n as usize].is_finite() && direct.is_finite();
        worst = worst.max(common::rel_err(table[n as usize], parity * sign, exact_ln));
        worst = worst.max(common::rel_err(direct, parity * sign, exact_ln));
    }
    let state = GaussianWignerState::coherent(PhaseAmplitude::new(20.0, 0.0)).unwrap();
    let ens = state.sample(1_000_000, 61).unwrap();
    let (total, se) = wigner_average_total(&ens, 0, phasebin::fock::auto_n_max(&state)).unwrap();
    let pass = finite && worst <= 1e-10 && (total - 1.0).abs() <= 5.0 * se;
    report(
        6,
        "Laguerre stability",
        pass,
        &format!("max relative error {worst:.2e}, sum of Wigner-average P_n = {total:.6} +- {se:.2e}"),
    );
}

fn triangle_states() -> Vec<(&'static str, GaussianWignerState, Option<NumberDistribution>)> {
    let sq = SqueezedCoherentParams::new(2.0, 0.4, 0.5, 0.7).unwrap();
    let coh = SqueezedCoherentParams::new(3.0, 1.1, 0.0, 0.0).unwrap();
    vec![
        ("vacuum", GaussianWignerState::vacuum(), Some(poisson(0.0, 40).unwrap())),
        (
            "coherent",
            coh.to_state().unwrap(),
            Some(pn_squeezed_coherent(&coh, Some(60)).unwrap()),
        ),
        (
            "thermal",
            GaussianWignerState::thermal(2.0).unwrap(),
            Some(pn_thermal(2.0, 80).unwrap()),
        ),
        (
            "squeezed",
            sq.to_state().unwrap(),
            Some(pn_squeezed_coherent(&sq, Some(60)).unwrap()),
        ),
        (
            "squeezed-vacuum",
            GaussianWignerState::squeezed_coherent(PhaseAmplitude::new(0.0, 0.0), 0.8, 0.3).unwrap(),
            None,
        ),
    ]
}

/// Largest `|est − ref|` in units of `se(n)`, and whether all are within `k`.
fn max_sigmas(
    est: &NumberDistribution,
    reference: &NumberDistribution,
    se: impl Fn(usize) -> f64,
    k: f64,
) -> (bool, f64) {
    let worst = (0..=reference.n_max())
        .map(|n| {
            let d = (est.get(n) - reference.get(n)).abs();
            if d < 1e-12 {
                0.0
            } else {
                d / se(n)
            }
        })
        .fold(0.0, f64::max);
    (worst <= k, worst)
}

#[test]
fn criterion_7_oracle_triangle() {
    let mut lines = Vec::new();
    let mut pass = true;
    for (i, (name, state, analytic)) in triangle_states().into_iter().enumerate() {
        let n_max = analytic.as_ref().map_or(40, |a| a.n_max());
        let quad = pn_quadrature(&state, n_max).unwrap();
        let boxcar = pn_boxcar_quadrature(&state, n_max).unwrap();
        let count = 1_000_000;
        let binned = sample_and_bin(&state, count, 70 + i as u64, BinSpec::new(n_max)).unwrap();
        let ens = state.sample(200_000, 80 + i as u64).unwrap();
        let wigner = pn_wigner_average(&ens, 0, n_max).unwrap();
        // multinomial error of the reference probability, so empty bins count
        let binomial = |n: usize| (boxcar.get(n) * (1.0 - boxcar.get(n)) / count as f64).sqrt();
        let (b_ok, b_z) = max_sigmas(&binned, &boxcar, binomial, 5.0);
        let wse = wigner.stderr().unwrap().to_vec();
        let (w_ok, w_z) = max_sigmas(&wigner, &quad, |n| wse[n], 5.0);
        let a_err = analytic.as_ref().map_or(0.0, |a| {
            (0..=n_max).map(|n| (a.get(n) - quad.get(n)).abs()).fold(0.0, f64::max)
        });
        pass &= b_ok && w_ok && a_err <= 1e-7;
        lines.push(format!(
            "{name}: binned {b_z:.1} sigma, wigner {w_z:.1} sigma, analytic {a_err:.1e}"
        ));
    }
    report(7, "oracle triangle", pass, &lines.join("; "));
}

fn bh_config(u: f64, n_traj: usize, times: Vec<f64>) -> BHConfig {
    BHConfig {
        params: BHParams {
            u,
            omega: 1.0,
            n1_initial: 100.0,
            t_final: *times.last().unwrap(),
            dt: 0.002 / (u.max(0.01) * 100.0),
            n_traj,
            seed: 2024,
        },
        times,
    }
}

#[test]
fn criterion_8_bose_hubbard() {
    let mut lines = Vec::new();
    let mut pass = true;

    // U = 0: the trajectories are a beam splitter
    let lin = BHParams {
        u: 0.0,
        dt: 1e-3,
        ..bh_config(0.25, 1, vec![1.0]).params
    };
    let s0: State = [10.2, -0.3, 0.4, 0.1];
    let mut lin_err: f64 = 0.0;
    for t in [0.4, FRAC_PI_2, 2.5] {
        let s = integrate(&lin, &s0, 0.0, t);
        let (c, sn) = (f64::cos(t), f64::sin(t));
        let e = [
            c * s0[0] - sn * s0[3],
            c * s0[1] + sn * s0[2],
            c * s0[2] - sn * s0[1],
            c * s0[3] + sn * s0[0],
        ];
        lin_err = lin_err.max((0..4).map(|i| (s[i] - e[i]).abs()).fold(0.0, f64::max));
    }
    let exact_lin = exact_evolve(&bh_config(0.0, 1, vec![0.0, FRAC_PI_2]), None).unwrap();
    let m0 = exact_lin.states[0].mean_occupation(0).unwrap();
    let transfer = (exact_lin.states[1].mean_occupation(1).unwrap() - m0).abs();
    pass &= lin_err <= 1e-8 && transfer <= 1e-8;
    lines.push(format!(
        "U=0: trajectory error {lin_err:.1e}, exact transfer error {transfer:.1e}"
    ));

    for u in [0.25, 0.5] {
        let cfg = bh_config(u, 100_000, vec![0.05, 0.1]);
        let twa = twa_evolve(&cfg).unwrap();
        let exact = exact_evolve(&cfg, None).unwrap();
        let conserve = twa.max_number_drift.max(twa.max_energy_drift);
        pass &= conserve <= 1e-8 && twa.flagged == 0;
        lines.push(format!("U={u}: N_max={} drift {conserve:.1e}", exact.n_max));
        for k in 0..cfg.times.len() {
            let m1 = compare_distributions(&twa, &exact, k, 0, &CompareOptions::default()).unwrap();
            let m2 = compare_distributions(&twa, &exact, k, 1, &CompareOptions::default()).unwrap();
            let failing: Vec<usize> = m2.smoothness.iter().filter(|v| !v.pass).map(|v| v.n).collect();
            let dev = &m2.deviations;
            // the test fails at small n exactly where the binned estimate deviates
            let mode2_ok = !dev.is_empty() && *dev == failing;
            let ok = m1.distances.binned_exact <= 1e-2 && m1.smooth() && mode2_ok;
            pass &= ok;
            lines.push(format!(
                "t={}: mode1 D_B {:.2e} smooth {} range {:?}; mode2 failing {:?} deviating {:?}",
                cfg.times[k],
                m1.distances.binned_exact,
                m1.smooth(),
                m1.relevant_range,
                failing,
                dev
            ));
        }
    }
    // conservation of the phase-space symbols along a single long trajectory
    let p = bh_config(0.5, 1, vec![0.5]).params;
    let s = integrate(&p, &s0, 0.0, 0.5);
    let dn = (number_symbol(&s) - number_symbol(&s0)).abs() / number_symbol(&s0);
    let de = (energy_symbol(&p, &s) - energy_symbol(&p, &s0)).abs() / energy_symbol(&p, &s0).abs();
    pass &= dn <= 1e-8 && de <= 1e-8;
    lines.push(format!("single trajectory drift N {dn:.1e} H {de:.1e}"));
    report(8, "Bose-Hubbard", pass, &lines.join("; "));
}

fn read_dir_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn criterion_9_determinism() {
    let mut pass = true;
    let mut lines = Vec::new();

    // rerun a command from its manifest on a different worker count
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let spec = StateSpec {
        kind: StateName::Squeezed,
        nbar: 0.0,
        beta: 4.0,
        phase: 0.3,
        s: 0.5,
        theta: 1.0,
    };
    let global = Global {
        seed: 99,
        ntraj: 100_000,
        out: first.path().to_path_buf(),
        format: OutputFormat::Csv,
    };
    let methods = [Method::Binned, Method::WignerAverage];
    let manifest = pool(1)
        .install(|| commands::cmd_pn(&global, &spec, &methods, Some(60)))
        .unwrap();
    let written: Manifest = phasebin::io::read_json(&first.path().join("manifest.json")).unwrap();
    assert_eq!(written, manifest);
    let spec2: StateSpec = serde_json::from_value(written.config["state"].clone()).unwrap();
    let mut global2: Global = serde_json::from_value(written.config["global"].clone()).unwrap();
    let methods2: Vec<Method> = serde_json::from_value(written.config["methods"].clone()).unwrap();
    let n_max2: usize = serde_json::from_value(written.config["n_max"].clone()).unwrap();
    global2.out = second.path().to_path_buf();
    pool(4)
        .install(|| commands::cmd_pn(&global2, &spec2, &methods2, Some(n_max2)))
        .unwrap();
    let same_files = read_dir_bytes(first.path()) == read_dir_bytes(second.path());
    pass &= same_files;
    lines.push(format!("pn outputs identical after replay: {same_files}"));

    // sampling, grouped counts and TWA on 1 and 4 workers
    let state = GaussianWignerState::thermal(3.0).unwrap();
    let groups = |t| pool(t).install(|| sample_and_count_groups(&state, 50_000, 5, BinSpec::new(60), 4).unwrap());
    let same_groups = groups(1) == groups(4);
    let cfg = bh_config(0.5, 20_000, vec![0.02]);
    let twa = |t| pool(t).install(|| twa_evolve(&cfg).unwrap().ensembles[0].modes().to_vec());
    let same_twa = twa(1) == twa(4);
    let ens = state.sample(30_000, 8).unwrap();
    let wa = |t| pool(t).install(|| pn_wigner_average(&ens, 0, 40).unwrap());
    let same_wa = wa(1) == wa(4);
    pass &= same_groups && same_twa && same_wa;
    lines.push(format!(
        "grouped counts {same_groups}, TWA {same_twa}, Wigner average {same_wa}"
    ));
    report(9, "determinism", pass, &lines.join("; "));
}
