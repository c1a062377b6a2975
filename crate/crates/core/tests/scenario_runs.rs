//! End-to-end scenario behavior: the slippage verdict across the non-CP
//! parameter family, emission round trips, and sweep determinism.

mod common;

use common::rng;
use quasifree::io::{trajectory_from_json, trajectory_to_json, to_json_string};
use quasifree::scenarios::{
    emit_timeseries, run_cp_sweep, run_single_mode_scan, run_slippage_demo, sample_interior_state,
    sample_noncp_params, BlockSpec, InitialStateSpec, OutputFormat, ParamsSpec, ScenarioConfig,
    SweepLaw, Verdict,
};
use rand::Rng;

fn base_config() -> ScenarioConfig {
    ScenarioConfig {
        params: ParamsSpec::Single { omega: 0.0, eta: 1.0, sigma: 0.0, lam: [0.8, 0.0] },
        initial_state: None,
        horizon: 5.0,
        dt: 0.01,
        seed: 0,
        n_params: 20,
        n_states: 200,
        law: SweepLaw::Cp,
    }
}

/// The slippage verdict holds across the whole sampled non-CP family with
/// interior blocks, not just the worked example.
#[test]
fn slippage_fails_for_every_sampled_noncp_config() {
    let mut r = rng(0x51AE);
    for i in 0..50 {
        let p = sample_noncp_params(&mut r);
        let g1 = sample_interior_state(&mut r);
        let g2 = sample_interior_state(&mut r);
        let cfg = ScenarioConfig {
            params: ParamsSpec::Two {
                omega1: p.omega,
                omega2: 2.0 * r.gen::<f64>(),
                eta: p.eta,
                sigma: p.sigma,
                lam: [p.lam.re, p.lam.im],
            },
            initial_state: Some(InitialStateSpec::Critical {
                g1: BlockSpec { beta: g1.beta(), alpha: [g1.alpha().re, g1.alpha().im] },
                g2: BlockSpec { beta: g2.beta(), alpha: [g2.alpha().re, g2.alpha().im] },
            }),
            horizon: 5.0,
            dt: 0.01,
            seed: 0,
            n_params: 1,
            n_states: 1,
            law: SweepLaw::Cp,
        };
        let report = run_slippage_demo(&cfg).unwrap();
        assert!(report.entangled_at_t0, "sample {i}: initial state not entangled");
        assert!(report.rate_compound < 0.0, "sample {i}: rate {}", report.rate_compound);
        assert_eq!(report.verdict, Verdict::SlippageFails, "sample {i}: {report:?}");
    }
}

#[test]
fn sweep_summaries_are_bitwise_reproducible() {
    let mut cfg = base_config();
    cfg.horizon = 5.0;
    cfg.dt = 0.02;
    cfg.seed = 0xFEED;
    cfg.n_params = 8;
    cfg.n_states = 40;
    let a = run_cp_sweep(&cfg).unwrap();
    let b = run_cp_sweep(&cfg).unwrap();
    assert_eq!(a.min_min_eig.to_bits(), b.min_min_eig.to_bits());
    assert!(a.min_min_eig >= -1e-8);

    cfg.seed = 0xFEED + 1;
    let c = run_cp_sweep(&cfg).unwrap();
    assert_ne!(a.min_min_eig.to_bits(), c.min_min_eig.to_bits());
}

#[test]
fn csv_round_numbers_and_header() {
    let mut cfg = base_config();
    cfg.initial_state = Some(InitialStateSpec::Thermal { beta: 3.0 });
    cfg.horizon = 0.75;
    cfg.dt = 0.25;
    let tr = run_single_mode_scan(&cfg).unwrap();
    let mut buf = Vec::new();
    emit_timeseries(&tr, OutputFormat::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "t,min_eig_G,re_0_0,im_0_0,re_0_1,im_0_1,re_1_1,im_1_1");
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 8);
    }
    // Every float re-parses exactly.
    let first: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first.to_bits(), 0.0f64.to_bits());
}

#[test]
fn two_mode_csv_has_twenty_four_columns() {
    let cfg = ScenarioConfig {
        params: ParamsSpec::Two { omega1: 0.0, omega2: 0.3, eta: 1.0, sigma: 0.0, lam: [0.8, 0.0] },
        initial_state: Some(InitialStateSpec::Critical {
            g1: BlockSpec { beta: 2.0, alpha: [0.0, 0.0] },
            g2: BlockSpec { beta: 2.0, alpha: [0.0, 0.0] },
        }),
        horizon: 0.5,
        dt: 0.25,
        seed: 0,
        n_params: 1,
        n_states: 1,
        law: SweepLaw::Cp,
    };
    let params = cfg.params.two().unwrap();
    let g1 = match cfg.initial_state {
        Some(InitialStateSpec::Critical { g1, g2 }) => {
            quasifree::states::build_critical_state(&g1.build().unwrap(), &g2.build().unwrap())
                .unwrap()
        }
        _ => unreachable!(),
    };
    let tr = quasifree::semigroup::sample_trajectory(g1.matrix(), &params.drift(), 0.5, 0.25)
        .unwrap();
    let mut buf = Vec::new();
    emit_timeseries(&tr, OutputFormat::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header = text.lines().next().unwrap();
    // 4 metadata columns + 2·10 independent upper-triangle entries.
    assert_eq!(header.split(',').count(), 24);
    assert!(header.starts_with("t,min_eig_G,min_eig_G1,min_eig_G2,"));
}

#[test]
fn trajectory_json_round_trips_bit_for_bit() {
    let mut cfg = base_config();
    cfg.params = ParamsSpec::Single { omega: 0.37, eta: 1.1, sigma: 0.4, lam: [0.31, -0.22] };
    cfg.initial_state = Some(InitialStateSpec::Thermal { beta: 2.5 });
    cfg.horizon = 1.0;
    cfg.dt = 0.125;
    let tr = run_single_mode_scan(&cfg).unwrap();
    let text = to_json_string(&trajectory_to_json(&tr)).unwrap();
    let back = trajectory_from_json(&text).unwrap();
    assert_eq!(tr.times.len(), back.times.len());
    for (a, b) in tr.times.iter().zip(&back.times) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    for (a, b) in tr.min_eig_g.iter().zip(&back.min_eig_g) {
        assert_eq!(a.to_bits(), b.to_bits(), "min_eig {a:e} reparsed as {b:e}");
    }
    for (ga, gb) in tr.states.iter().zip(&back.states) {
        for j in 0..2 {
            for k in 0..2 {
                assert_eq!(ga.get(j, k).re.to_bits(), gb.get(j, k).re.to_bits());
                assert_eq!(ga.get(j, k).im.to_bits(), gb.get(j, k).im.to_bits());
            }
        }
    }
}

#[test]
fn evolve_zero_horizon_echoes_state() {
    let mut cfg = base_config();
    cfg.initial_state = Some(InitialStateSpec::Thermal { beta: 4.2 });
    cfg.horizon = 1.0;
    cfg.dt = 0.5;
    let tr = run_single_mode_scan(&cfg).unwrap();
    let first = &tr.states[0];
    assert_eq!(first.get(0, 0).re, 4.2);
}
