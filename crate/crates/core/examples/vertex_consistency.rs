//! Brio-Wu data on a square domain: with the consistent vertex solver the
//! normal field B_x stays at 0.75, while the first-term-only electric field
//! lets it drift.

use rtdg_mhd::diagnostics::max_deviation;
use rtdg_mhd::dg::Scheme;
use rtdg_mhd::grid::Domain;
use rtdg_mhd::limiters::LimiterConfig;
use rtdg_mhd::physics::BX;
use rtdg_mhd::problems;
use rtdg_mhd::riemann::{FluxKind, VertexSolver};
use rtdg_mhd::time_integrator::{default_cfl, integrate, RKScheme, RunControl};

fn main() -> rtdg_mhd::Result<()> {
    print!("{}", rtdg_mhd::app::consistency_check()?);
    let n: usize = std::env::args().nth(1).map(|a| a.parse().expect("cells per direction")).unwrap_or(64);
    let problem = problems::make("briowu")?.with_domain(Domain::new(-1.0, 1.0, -1.0, 1.0));
    let grid = problem.grid(n, n)?;
    let k = 1;
    for solver in [VertexSolver::Consistent, VertexSolver::FirstTermOnly] {
        let scheme = Scheme::new(grid.clone(), k, problem.gamma, FluxKind::Hll)?.with_vertex_solver(solver);
        let u0 = problem.initialize(&grid, k)?;
        let ctl = RunControl::new(0.1, default_cfl(k));
        let limiter = LimiterConfig::tvd();
        let out = integrate(&scheme, u0, &RKScheme::for_degree(k)?, &limiter, &ctl, &mut |_| {})?;
        println!(
            "{solver:?}: {} steps, max |Bx - 0.75| = {:.3e}",
            out.steps,
            max_deviation(&out.solution, BX, 0.75)
        );
    }
    Ok(())
}
