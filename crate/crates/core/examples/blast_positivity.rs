//! Low-beta blast wave with the positivity stage. Tracks the smallest
//! density and pressure over the positivity points after every stage.
//!
//! `cargo run --release --example blast_positivity -- [N] [T]`

use rtdg_mhd::app::RunSpec;
use rtdg_mhd::limiters::min_rho_p_on_s;
use rtdg_mhd::time_integrator::prepare;

fn main() -> rtdg_mhd::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|a| a.parse().expect("cells per direction")).unwrap_or(50);
    let t_final: f64 = args.next().map(|a| a.parse().expect("final time")).unwrap_or(0.01);
    let spec = RunSpec {
        nx: n,
        ny: n,
        t_final: Some(t_final),
        ..RunSpec::new("blast", 1)
    };
    let prep = prepare(&spec)?;
    let gamma = prep.problem.gamma;
    let (mut rho_min, mut p_min) = min_rho_p_on_s(&prep.initial, gamma);
    let mut scaled = 0;
    let out = prep.run(&mut |ev| {
        let (r, p) = min_rho_p_on_s(ev.solution, gamma);
        rho_min = rho_min.min(r);
        p_min = p_min.min(p);
        scaled += ev.positivity.scaled_cells;
    })?;
    let totals = &out.result.totals;
    println!("reached t = {} in {} steps", out.result.t, out.result.steps);
    println!("min rho on S = {rho_min:.4e}, min p on S = {p_min:.4e}");
    println!("scaled cells {scaled}, floor events {}, HLLC fallbacks {}", totals.floor_events, totals.hllc_fallbacks);
    Ok(())
}
