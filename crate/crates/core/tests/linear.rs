use std::f64::consts::PI;

use cornermhd::data::{random_parity_state, standing_wave, standing_wave_setup};
use cornermhd::discrete_calc::energy_functional;
use cornermhd::mhd_linear::{
    boundary_quadratic, integrate, plan_steps, run_linear, wall_divergence, wall_perp_gradient, Background,
    BackgroundFields, PressureKind, RunConfig, SchemeConfig, SourceTerm, State,
};
use cornermhd::mhd_nonlinear::EosModel;
use cornermhd::{make_grid, DomainSpec, Grid, ScalarField};
use proptest::prelude::*;

fn unit(n: usize) -> Grid {
    make_grid(DomainSpec::unit_square(), n, n).unwrap()
}

fn no_dissipation() -> RunConfig {
    RunConfig {
        scheme: SchemeConfig {
            dissipation: 0.0,
            ..Default::default()
        },
        output_every: usize::MAX,
        residuals: false,
        ..Default::default()
    }
}

#[test]
fn standing_wave_converges_at_second_order() {
    let (bg, eos) = standing_wave_setup();
    let t_end = 0.5;
    let mut err = Vec::new();
    for n in [16, 32, 64] {
        let g = unit(n);
        let z0 = State::from_fn(&g, PressureKind::Total, |x| standing_wave(0.0, x));
        let traj = integrate(&z0, &bg, &SourceTerm::Zero, &eos, t_end, &no_dissipation()).unwrap();
        assert_eq!(traj.times, vec![0.0, *traj.times.last().unwrap()]);
        assert!((traj.times[1] - t_end).abs() < 1e-12);
        let exact = State::from_fn(&g, PressureKind::Total, |x| standing_wave(t_end, x));
        err.push(traj.last().diff_l2(&exact));
    }
    for w in err.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.8, "errors {err:?}");
    }
}

#[test]
fn energy_does_not_grow_under_dissipation() {
    let (bg, eos) = standing_wave_setup();
    let g = unit(32);
    let z0 = random_parity_state(&g, 5, 6, 1.0).unwrap();
    let cfg = RunConfig {
        check_compat: false,
        residuals: false,
        output_every: 4,
        ..Default::default()
    };
    let traj = integrate(&z0, &bg, &SourceTerm::Zero, &eos, 0.2, &cfg).unwrap();
    let bgf = BackgroundFields::from_comps(&g, State::zeros(&g, PressureKind::Total).comps());
    let e: Vec<f64> = traj.states.iter().map(|z| energy_functional(z, &bgf, &eos).unwrap()).collect();
    for w in e.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12), "energy {e:?}");
    }
    assert!(e.last().unwrap() < &e[0]);
}

#[test]
fn oversized_snapshot_interval_keeps_the_end_points() {
    let (bg, eos) = standing_wave_setup();
    let g = unit(16);
    let z0 = State::from_fn(&g, PressureKind::Total, |x| standing_wave(0.0, x));
    let cfg = RunConfig {
        output_every: 1_000_000,
        ..no_dissipation()
    };
    let (nsteps, dt) = plan_steps(&g, &bg, &eos, 0.3, &cfg).unwrap();
    let (base, _) = plan_steps(&g, &bg, &eos, 0.3, &RunConfig::default()).unwrap();
    assert_eq!(nsteps, base);
    let traj = integrate(&z0, &bg, &SourceTerm::Zero, &eos, 0.3, &cfg).unwrap();
    assert_eq!(traj.len(), 2);
    assert_eq!(traj.dt, dt);
    assert!((traj.dt_snap - 0.3).abs() < 1e-12);
}

#[test]
fn physical_pressure_is_rejected() {
    let (bg, eos) = standing_wave_setup();
    let g = unit(8);
    let z0 = State::zeros(&g, PressureKind::Physical);
    assert!(run_linear(&z0, &bg, &SourceTerm::Zero, &eos, 0.1, &RunConfig::default()).is_err());
    let sector = make_grid(DomainSpec::sector(PI / 3.0, 1.0).unwrap(), 8, 8).unwrap();
    let zs = State::zeros(&sector, PressureKind::Total);
    assert!(integrate(&zs, &bg, &SourceTerm::Zero, &eos, 0.1, &RunConfig::default()).is_err());
}

#[test]
fn wall_stream_function_fields_are_divergence_free() {
    for n in [8, 33] {
        let g = unit(n);
        let psi = ScalarField::from_fn(&g, |x| (PI * x[0]).sin() * (2.0 * PI * x[1]).sin() * (1.0 + x[0]));
        let b = wall_perp_gradient(&psi).unwrap();
        assert!(wall_divergence(&b).unwrap().max_abs() < 1e-12);
        assert!(b.c[0].max_abs() > 1.0);
    }
}

#[test]
fn random_background_state_runs_with_constant_field() {
    let eos = EosModel::ideal_gas(5.0 / 3.0).unwrap();
    let bg = Background::constant([0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let g = unit(24);
    let z0 = random_parity_state(&g, 9, 4, 0.1).unwrap();
    let cfg = RunConfig {
        check_compat: false,
        ..Default::default()
    };
    let (traj, rep) = run_linear(&z0, &bg, &SourceTerm::Zero, &eos, 0.1, &cfg).unwrap();
    traj.last().check_finite(0.1).unwrap();
    let divb = rep.l2_divb.iter().cloned().fold(0.0, f64::max);
    assert!(divb < 1e-12, "div b {divb:e}");
}

proptest! {
    #[test]
    fn boundary_flux_is_twice_pressure_times_normal_velocity(
        z in proptest::array::uniform6(-3.0f64..3.0),
        tang in proptest::array::uniform2(-2.0f64..2.0),
        p in 0.2f64..4.0,
        s in -0.5f64..0.5,
        theta in 0.0f64..(2.0 * PI),
    ) {
        let nu = [theta.cos(), theta.sin()];
        let tau = [-nu[1], nu[0]];
        // background tangent to the wall
        let zb = [tang[0] * tau[0], tang[0] * tau[1], tang[1] * tau[0], tang[1] * tau[1], p, s];
        for eos in [EosModel::ideal_gas(1.4).unwrap(), EosModel::affine(0.7).unwrap()] {
            let q = boundary_quadratic(&z, zb, &eos, nu).unwrap();
            let want = 2.0 * z[4] * (z[0] * nu[0] + z[1] * nu[1]);
            prop_assert!((q - want).abs() <= 1e-10 * (1.0 + want.abs()), "{} vs {}", q, want);
        }
    }
}
