//! Orszag-Tang vortex with the full limiter chain. Prints the divergence
//! norm, the conserved energy and the limiter activity as the run goes.
//!
//! `cargo run --release --example orszag_tang_divergence -- [N] [T]`

use rtdg_mhd::app::RunSpec;
use rtdg_mhd::limiters::LimiterConfig;
use rtdg_mhd::physics::EN;
use rtdg_mhd::riemann::FluxKind;
use rtdg_mhd::time_integrator::prepare;

fn main() -> rtdg_mhd::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|a| a.parse().expect("cells per direction")).unwrap_or(32);
    let t_final: f64 = args.next().map(|a| a.parse().expect("final time")).unwrap_or(0.5);
    let spec = RunSpec {
        nx: n,
        ny: n,
        flux: FluxKind::Hll,
        limiter: LimiterConfig {
            positivity: true,
            ..LimiterConfig::tvd()
        },
        t_final: Some(t_final),
        output_every: 10,
        ..RunSpec::new("ot", 2)
    };
    let out = prepare(&spec)?.run(&mut |_| {})?;
    println!("{:>6} {:>10} {:>12} {:>16} {:>8}", "step", "t", "div L2", "total energy", "limited");
    for s in &out.result.samples {
        println!("{:>6} {:>10.4} {:>12.3e} {:>16.12} {:>8}", s.step, s.t, s.div_l2, s.totals[EN], s.limited_cells);
    }
    println!("wall time {:.1} s", out.result.wall_time);
    Ok(())
}
