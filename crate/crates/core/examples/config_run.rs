//! Drive a run from a configuration file, as the `mhd` binary does, and
//! write the usual output files.
//!
//! `cargo run --release --example config_run -- [OUTDIR]`

use std::path::PathBuf;

use rtdg_mhd::app::config::{parse, Overrides};
use rtdg_mhd::app::run_command;

const CONFIG: &str = "\
# rotor, short run
problem = rotor
degree = 1
nx = 32
ny = 32
flux = hllc
tfinal = 0.02
output_every = 5
";

fn main() -> rtdg_mhd::Result<()> {
    let outdir: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("mhd-rotor"));
    let overrides = Overrides {
        outdir: Some(outdir.clone()),
        ..Overrides::default()
    };
    let spec = parse(CONFIG, overrides)?;
    print!("{}", spec.to_config_string());
    let out = run_command(&spec)?;
    println!("{} steps to t = {}, output in {}", out.result.steps, out.result.t, outdir.display());
    Ok(())
}
