//! Convergence study on the smooth Alfvén wave. Prints the L2 error and
//! observed order of ρ and B_x for each degree.
//!
//! `cargo run --release --example alfven_convergence -- [T]`

use rtdg_mhd::diagnostics::{convergence_table, ConvergenceSetup};
use rtdg_mhd::physics::{BX, RHO};
use rtdg_mhd::problems::ErrorNorm;
use rtdg_mhd::riemann::FluxKind;

fn main() -> rtdg_mhd::Result<()> {
    let t_final: f64 = std::env::args().nth(1).map(|a| a.parse().expect("final time")).unwrap_or(0.1);
    for k in 1..=3 {
        let table = convergence_table(&ConvergenceSetup {
            problem: "alfven".into(),
            k,
            flux: FluxKind::Hllc,
            grids: vec![8, 16, 32],
            t_final: Some(t_final),
            norm: ErrorNorm::L2,
            cfl: None,
        })?;
        println!("k = {k}");
        println!("{:>6} {:>12} {:>6} {:>12} {:>6}", "N", "rho", "rate", "Bx", "rate");
        for row in &table.rows {
            let rate = |v: usize| row.rates[v].map_or("-".to_string(), |r| format!("{r:.2}"));
            println!(
                "{:>6} {:>12.4e} {:>6} {:>12.4e} {:>6}",
                row.n,
                row.errors[RHO],
                rate(RHO),
                row.errors[BX],
                rate(BX)
            );
        }
    }
    Ok(())
}
