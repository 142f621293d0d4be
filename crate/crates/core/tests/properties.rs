//! Randomized invariants of the eigensystem, the Riemann solvers, the RT
//! reconstruction, the residual and the limiter chain.

mod common;

use common::{
    conserved, diagonalization_error, jump_solution, jump_state, lr_error, periodic_grid, smooth, smooth_solution, GAMMA,
};
use proptest::prelude::*;
use rtdg_mhd::dg::{Scheme, SolutionDofs};
use rtdg_mhd::diagnostics::conserved_totals;
use rtdg_mhd::limiters::{limit_cells, mark_cells, LimiterConfig};
use rtdg_mhd::physics::{
    eigensystem_x, eigensystem_y, flux, Direction, PrimitiveState, NVARS,
};
use rtdg_mhd::riemann::{interface_flux, FluxKind};
use rtdg_mhd::rt_field::{n_moments, project_initial, rt_reconstruct, sample_potential, Side};
use rtdg_mhd::time_integrator::{cfl_dt, default_cfl, step, RKScheme};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn left_and_right_eigenvectors_are_inverse(u in conserved()) {
        prop_assert!(lr_error(&eigensystem_x(&u, GAMMA).unwrap()) <= 1e-11);
        prop_assert!(lr_error(&eigensystem_y(&u, GAMMA).unwrap()) <= 1e-11);
    }

    #[test]
    fn eigenvectors_diagonalize_the_flux_jacobian(u in conserved()) {
        let ex = eigensystem_x(&u, GAMMA).unwrap();
        let ey = eigensystem_y(&u, GAMMA).unwrap();
        prop_assert!(diagonalization_error(&u, &ex, Direction::X) <= 1e-6);
        prop_assert!(diagonalization_error(&u, &ey, Direction::Y) <= 1e-6);
    }

    #[test]
    fn numerical_fluxes_are_consistent(u in conserved()) {
        for dir in [Direction::X, Direction::Y] {
            let f = flux(&u, GAMMA, dir).unwrap();
            let scale = f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for kind in FluxKind::ALL {
                let r = interface_flux(kind, &u, &u, GAMMA, dir).unwrap();
                for i in 0..NVARS {
                    prop_assert!((r.flux[i] - f[i]).abs() <= 1e-13 * scale, "{kind} {dir:?} component {i}");
                }
                prop_assert!((r.ez - u.ez()).abs() <= 1e-13 * scale);
            }
        }
    }
}

fn coefficients(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rt_reconstruction_round_trip(
        k in 0usize..=3,
        data in coefficients(4 * 4 + 2 * 12),
    ) {
        let nf = k + 1;
        let nm = n_moments(k);
        let (faces, rest) = data.split_at(4 * nf);
        let (bxm, bxp, bym, byp) = (&faces[..nf], &faces[nf..2 * nf], &faces[2 * nf..3 * nf], &faces[3 * nf..]);
        let (alpha, beta) = (&rest[..nm], &rest[nm..2 * nm]);
        let r = rt_reconstruct(k, bxm, bxp, bym, byp, alpha, beta).unwrap();
        for (side, want) in [(Side::West, bxm), (Side::East, bxp), (Side::South, bym), (Side::North, byp)] {
            let got = r.trace(side);
            for (g, w) in got.iter().zip(want) {
                prop_assert!((g - w).abs() <= 1e-12, "{side:?}: {g} vs {w}");
            }
        }
        let (a2, b2) = r.moments();
        for (g, w) in a2.iter().zip(alpha).chain(b2.iter().zip(beta)) {
            prop_assert!((g - w).abs() <= 1e-12);
        }
    }

    #[test]
    fn potential_fields_are_exactly_divergence_free(
        k in 0usize..=3,
        nx in 2usize..7,
        ny in 2usize..7,
        s in smooth(),
    ) {
        let grid = periodic_grid(nx, ny);
        let samples = sample_potential(&grid, k, |x, y| s.psi(x, y)).unwrap();
        let (faces, moments) = project_initial(&grid, k, &samples).unwrap();
        let u = SolutionDofs::from_parts(&grid, k, vec![[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]; grid.n_cells() * (k + 1) * (k + 1)], faces, moments).unwrap();
        for rt in &u.rt {
            prop_assert!(rt.divergence_l2(grid.dx, grid.dy) <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn periodic_step_conserves_totals(
        k in 0usize..=3,
        nx in 3usize..7,
        ny in 3usize..7,
        flux_kind in prop::sample::select(FluxKind::ALL.to_vec()),
        s in smooth(),
    ) {
        let grid = periodic_grid(nx, ny);
        let u = smooth_solution(&grid, k, &s);
        let scheme = Scheme::new(grid.clone(), k, GAMMA, flux_kind).unwrap();
        let dt = cfl_dt(&u, GAMMA, default_cfl(k), &grid).unwrap();
        let rk = RKScheme::for_degree(k).unwrap();
        let (next, _) = step(&scheme, &u, dt, &rk, &LimiterConfig::default()).unwrap();
        let before = conserved_totals(&u, &grid);
        let after = conserved_totals(&next, &grid);
        for v in 0..NVARS {
            prop_assert!(
                (after[v] - before[v]).abs() <= 1e-12 * before[v].abs().max(1.0),
                "variable {v}: {} -> {}", before[v], after[v]
            );
        }
    }
}

/// Largest change of the hydro data and the reconstructed cell fields.
fn cell_data_difference(a: &SolutionDofs, b: &SolutionDofs) -> f64 {
    let hydro = a.hydro.iter().flatten().zip(b.hydro.iter().flatten()).map(|(x, y)| (x - y).abs());
    let field = a.rt.iter().zip(&b.rt).flat_map(|(p, q)| {
        let d: Vec<f64> = p
            .a_slice()
            .iter()
            .zip(q.a_slice())
            .chain(p.b_slice().iter().zip(q.b_slice()))
            .map(|(x, y)| (x - y).abs())
            .collect();
        d
    });
    hydro.chain(field).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Step 1 applied to its own output, with the same troubled cells,
    /// changes nothing.
    #[test]
    fn cell_limiter_is_idempotent(
        k in 1usize..=3,
        nx in 8usize..16,
        x0 in 0.3f64..0.7,
        left in jump_state(),
        right in jump_state(),
        bx in -1.0f64..1.0,
    ) {
        let left = PrimitiveState { b: [bx, left.b[1], left.b[2]], ..left };
        let right = PrimitiveState { b: [bx, right.b[1], right.b[2]], ..right };
        let (grid, mut u) = jump_solution(k, nx, x0, left, right);
        let cfg = LimiterConfig::tvd();
        let marked = mark_cells(&u, &grid, &cfg);
        limit_cells(&mut u, &grid, GAMMA, &cfg, &marked).unwrap();
        let once = u.clone();
        limit_cells(&mut u, &grid, GAMMA, &cfg, &marked).unwrap();
        let scale = once.hydro.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        let d = cell_data_difference(&once, &u);
        prop_assert!(d <= 1e-13 * scale, "difference {d}");
    }
}
