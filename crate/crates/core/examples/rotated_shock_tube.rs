//! Shock tube rotated by 45°. Prints the field component normal to the
//! discontinuities along the diagonal, which should stay at its initial
//! value.
//!
//! `cargo run --release --example rotated_shock_tube -- [N]`

use rtdg_mhd::app::RunSpec;
use rtdg_mhd::physics::RHO;
use rtdg_mhd::problems::{rstube_components, rstube_field_value};
use rtdg_mhd::riemann::FluxKind;
use rtdg_mhd::time_integrator::prepare;

fn main() -> rtdg_mhd::Result<()> {
    let n: usize = std::env::args().nth(1).map(|a| a.parse().expect("cells per direction")).unwrap_or(64);
    let spec = RunSpec {
        nx: n,
        ny: n,
        flux: FluxKind::Hll,
        ..RunSpec::new("rstube", 1)
    };
    let out = prepare(&spec)?.run(&mut |_| {})?;
    let grid = &out.grid;
    let target = rstube_field_value();
    println!("{:>5} {:>10} {:>12} {:>12} {:>10}", "i", "rho", "B_par", "B_perp", "rel err");
    let mut worst = 0.0f64;
    for i in 0..grid.nx {
        let s = out.result.solution.eval(grid.cell(i, i), 0.0, 0.0);
        let (par, perp) = rstube_components(&s);
        let err = (perp - target).abs() / target;
        worst = worst.max(err);
        println!("{i:>5} {:>10.5} {par:>12.6} {perp:>12.8} {err:>10.2e}", s[RHO]);
    }
    println!("max relative B_perp error {worst:.3e} after {} steps", out.result.steps);
    Ok(())
}
