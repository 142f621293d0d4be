//! Brio-Wu shock tube on a thin strip, compared with the bundled
//! high-resolution reference for each numerical flux.
//!
//! `cargo run --release --example brio_wu_strip -- [NX]`

use rtdg_mhd::app::RunSpec;
use rtdg_mhd::diagnostics::{centre_profile, compare_profile, ReferenceProfile};
use rtdg_mhd::physics::{BY, RHO};
use rtdg_mhd::riemann::FluxKind;
use rtdg_mhd::time_integrator::run;

fn main() -> rtdg_mhd::Result<()> {
    let nx: usize = std::env::args().nth(1).map(|a| a.parse().expect("cells in x")).unwrap_or(400);
    let reference = ReferenceProfile::briowu();
    for flux in FluxKind::ALL {
        let spec = RunSpec {
            nx,
            ny: 4,
            flux,
            ..RunSpec::new("briowu", 1)
        };
        let out = run(&spec)?;
        let grid = &out.grid;
        for (name, var) in [("rho", RHO), ("By", BY)] {
            let (x, v) = centre_profile(&out.result.solution, grid, grid.ny / 2, var);
            let c = compare_profile(&reference, name, &x, &v, grid.dx, 3.0, 4.0)?;
            println!("{:>5} {name:>4}: L1 relative {:.3e}, overshoot {:.3e}", flux.to_string(), c.l1_rel, c.overshoot);
        }
    }
    Ok(())
}
