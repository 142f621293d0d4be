//! Stepping, the run loop and run specifications.

mod common;

use common::{max_dof_difference, periodic_grid, smooth, smooth_solution, GAMMA};
use proptest::prelude::*;
use rtdg_mhd::app::config::{parse, Overrides};
use rtdg_mhd::app::RunSpec;
use rtdg_mhd::dg::{hydro_part, Scheme, SolutionDofs};
use rtdg_mhd::diagnostics::divergence_norm;
use rtdg_mhd::grid::Grid;
use rtdg_mhd::limiters::LimiterConfig;
use rtdg_mhd::physics::{to_conserved, PrimitiveState};
use rtdg_mhd::riemann::FluxKind;
use rtdg_mhd::rt_field::{alpha_index, beta_index, CellMoments, FaceDofs};
use rtdg_mhd::time_integrator::{cfl_dt, integrate, run, step, RKScheme, RunControl};

/// A uniform state built coefficient by coefficient, so every cell and face
/// holds exactly the same numbers.
fn uniform(grid: &Grid, k: usize) -> SolutionDofs {
    let w = PrimitiveState::new(1.3, [0.4, -0.2, 0.1], 0.8, [0.6, -0.35, 0.2]);
    let u = to_conserved(&w, GAMMA).0;
    let nm = (k + 1) * (k + 1);
    let mut hydro = vec![[0.0; 6]; grid.n_cells() * nm];
    for c in 0..grid.n_cells() {
        hydro[c * nm] = hydro_part(&u);
    }
    let mut faces = FaceDofs::zeros(k, grid.n_vfaces(), grid.n_hfaces());
    faces.bx.chunks_mut(k + 1).for_each(|f| f[0] = w.b[0]);
    faces.by.chunks_mut(k + 1).for_each(|f| f[0] = w.b[1]);
    let mut moments = CellMoments::zeros(k, grid.n_cells());
    if k > 0 {
        for c in 0..grid.n_cells() {
            moments.alpha_cell_mut(c)[alpha_index(k, 0, 0)] = w.b[0];
            moments.beta_cell_mut(c)[beta_index(k, 0, 0)] = w.b[1];
        }
    }
    SolutionDofs::from_parts(grid, k, hydro, faces, moments).unwrap()
}

fn all_schemes() -> Vec<(&'static str, RKScheme)> {
    vec![
        ("forward Euler", RKScheme::forward_euler()),
        ("SSPRK2", RKScheme::ssprk2()),
        ("SSPRK3", RKScheme::ssprk3()),
        ("SSPRK(5,4)", RKScheme::ssprk54()),
    ]
}

#[test]
fn zero_residual_leaves_the_state_bit_identical() {
    // At k = 0 every flux difference cancels exactly; higher degrees add
    // quadrature round-off to the volume terms, which the inverse modal
    // masses amplify in the top modes.
    for k in 0..=3 {
        let grid = periodic_grid(5, 4);
        let u = uniform(&grid, k);
        let scheme = Scheme::new(grid.clone(), k, GAMMA, FluxKind::Hllc).unwrap();
        let exact = scheme.assemble(&u).unwrap().max_abs() == 0.0;
        assert_eq!(exact, k == 0);
        let dt = cfl_dt(&u, GAMMA, 0.2, &grid).unwrap();
        for (name, rk) in all_schemes() {
            let (next, _) = step(&scheme, &u, dt, &rk, &LimiterConfig::default()).unwrap();
            let d = max_dof_difference(&u, &next);
            if exact {
                assert_eq!(d, 0.0, "{name} at k = {k}");
            } else {
                assert!(d <= 1e-12, "{name} at k = {k}: {d}");
            }
        }
    }
}

#[test]
fn final_time_is_hit_exactly() {
    let grid = periodic_grid(4, 4);
    let u = uniform(&grid, 1);
    let scheme = Scheme::new(grid.clone(), 1, GAMMA, FluxKind::Hll).unwrap();
    let cfl = 0.3;
    let dt = cfl_dt(&u, GAMMA, cfl, &grid).unwrap();
    let ctl = RunControl::new(3.5 * dt, cfl);
    let r = integrate(&scheme, u, &RKScheme::ssprk2(), &LimiterConfig::default(), &ctl, &mut |_| {}).unwrap();
    assert_eq!(r.steps, 4);
    assert_eq!(r.t, 3.5 * dt);
    assert_eq!(&r.dts[..3], &[dt; 3]);
    assert!((r.dts[3] - 0.5 * dt).abs() <= 1e-15 * dt);
}

#[test]
fn zero_final_time_takes_no_step() {
    let grid = periodic_grid(4, 4);
    let u = uniform(&grid, 2);
    let scheme = Scheme::new(grid.clone(), 2, GAMMA, FluxKind::Hll).unwrap();
    let ctl = RunControl::new(0.0, 0.2);
    let r = integrate(&scheme, u.clone(), &RKScheme::ssprk3(), &LimiterConfig::default(), &ctl, &mut |_| {}).unwrap();
    assert_eq!(r.steps, 0);
    assert_eq!(r.samples.len(), 1);
    assert_eq!(r.solution, u);
}

#[test]
fn observer_sees_every_stage() {
    let grid = periodic_grid(4, 4);
    let u = uniform(&grid, 1);
    let scheme = Scheme::new(grid.clone(), 1, GAMMA, FluxKind::Hll).unwrap();
    let rk = RKScheme::ssprk54();
    let ctl = RunControl {
        max_steps: Some(3),
        ..RunControl::new(1.0, 0.2)
    };
    let mut seen = Vec::new();
    integrate(&scheme, u, &rk, &LimiterConfig::default(), &ctl, &mut |ev| seen.push((ev.step, ev.stage))).unwrap();
    let expect: Vec<(usize, usize)> = (1..=3).flat_map(|s| (1..=5).map(move |st| (s, st))).collect();
    assert_eq!(seen, expect);
}

#[test]
fn negative_final_time_is_a_config_error() {
    let grid = periodic_grid(4, 4);
    let u = uniform(&grid, 0);
    let scheme = Scheme::new(grid.clone(), 0, GAMMA, FluxKind::Hll).unwrap();
    let ctl = RunControl::new(-1.0, 0.5);
    let e = integrate(&scheme, u, &RKScheme::forward_euler(), &LimiterConfig::default(), &ctl, &mut |_| {}).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ssprk3_step_keeps_the_field_divergence_free(
        k in 0usize..=3,
        nx in 3usize..7,
        ny in 3usize..7,
        s in smooth(),
    ) {
        let grid = periodic_grid(nx, ny);
        let u = smooth_solution(&grid, k, &s);
        let scheme = Scheme::new(grid.clone(), k, GAMMA, FluxKind::Hll).unwrap();
        let dt = cfl_dt(&u, GAMMA, 0.2, &grid).unwrap();
        let (next, _) = step(&scheme, &u, dt, &RKScheme::ssprk3(), &LimiterConfig::default()).unwrap();
        for rt in &next.rt {
            prop_assert!(rt.divergence_l2(grid.dx, grid.dy) <= 1e-11);
        }
        prop_assert!(divergence_norm(&next, &grid).l2 <= 1e-11);
    }
}

#[test]
fn runs_are_deterministic() {
    let spec = RunSpec {
        nx: 8,
        ny: 8,
        t_final: Some(0.05),
        ..RunSpec::new("ot", 2)
    };
    let a = run(&spec).unwrap();
    let b = run(&spec).unwrap();
    assert!(a.result.steps > 0);
    assert_eq!(a.result.solution, b.result.solution);
    assert_eq!(a.result.dts, b.result.dts);
}

#[test]
fn run_spec_survives_the_config_format() {
    for problem in ["alfven", "vortex", "briowu", "rstube", "ot", "rotor", "loop", "blast"] {
        for k in 0..=3 {
            let mut spec = RunSpec::new(problem, k);
            spec.cfl = Some(0.123456789);
            spec.t_final = Some(0.1 + k as f64 / 3.0);
            spec.flux = FluxKind::ALL[k % 3];
            spec.max_steps = (k == 2).then_some(17);
            let text = spec.to_config_string();
            assert_eq!(parse(&text, Overrides::default()).unwrap(), spec, "{text}");
        }
    }
}
