//! Command-line front end: run specifications, drivers and writers.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse, parse_config_overrides, Overrides, RunSpec};
use output::LineCut;

use crate::diagnostics::{self, ConvergenceSetup};
use crate::error::{MhdError, Result};
use crate::physics::{to_conserved, PrimitiveState};
use crate::problems::{ErrorNorm, ProblemName};
use crate::riemann::{self, FluxKind, VertexSolver};
use crate::time_integrator::{self, RunOutput};

#[derive(Debug, Parser)]
#[command(name = "mhd", version, about = "Divergence-free DG solver for 2-D ideal MHD")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one benchmark and write fields, diagnostics and a summary.
    Run(RunArgs),
    /// Run a problem with an exact solution on several grids and write a
    /// convergence table.
    Converge(ConvergeArgs),
    /// Compare 1-D and vertex electric fields on Brio-Wu data.
    ConsistencyCheck,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Config file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// lxf, hll or hllc.
    #[arg(long)]
    pub flux: Option<String>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub tfinal: Option<f64>,
    /// none or tvd.
    #[arg(long)]
    pub limiter: Option<String>,
    /// yes or no.
    #[arg(long)]
    pub positivity: Option<String>,
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    #[arg(long)]
    pub output_every: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated cells per direction, e.g. 16,32,64.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    pub grids: Vec<usize>,
    /// l1, l2 or linf.
    #[arg(long, default_value = "l2")]
    pub norm: String,
}

impl CommonArgs {
    fn overrides(&self) -> Result<Overrides> {
        let cfg = |m: String| MhdError::Config(m);
        Ok(Overrides {
            problem: self.problem.clone(),
            degree: self.degree,
            nx: self.nx,
            ny: self.ny,
            flux: self.flux.as_deref().map(str::parse::<FluxKind>).transpose()?,
            limiter: self.limiter.as_deref().map(config::parse_limiter).transpose().map_err(cfg)?,
            positivity: self.positivity.as_deref().map(config::parse_bool).transpose().map_err(cfg)?,
            cfl: self.cfl,
            t_final: self.tfinal,
            outdir: self.outdir.clone(),
            output_every: self.output_every,
            ..Default::default()
        })
    }

    /// Config file (if any) with the command-line flags on top.
    pub fn spec(&self) -> Result<RunSpec> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p).map_err(|e| MhdError::io(p, e))?,
            None => String::new(),
        };
        parse(&text, self.overrides()?)
    }
}

/// Entry point of the `mhd` binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let r = match cli.command {
        Command::Run(a) => a.common.spec().and_then(|s| run_command(&s).map(|_| ())),
        Command::Converge(a) => converge_command(&a),
        Command::ConsistencyCheck => consistency_check().map(|report| print!("{report}")),
    };
    match r {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mhd: {e}");
            e.exit_code()
        }
    }
}

/// Run a spec and write everything to its output directory: initial and
/// periodic cell averages (`avg_NNNNNN.vtk`), the final sub-sampled
/// solution (`solution.csv`), the diagnostics series (`diagnostics.csv`),
/// line cuts for the shock tubes and `summary.txt`.
pub fn run_command(spec: &RunSpec) -> Result<RunOutput> {
    let dir = spec.outdir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| MhdError::io(&dir, e))?;
    output::write_text(&dir.join("run.cfg"), &spec.to_config_string())?;
    let prep = time_integrator::prepare(spec)?;
    let gamma = prep.problem.gamma;
    let every = spec.output_every;
    let n_stages = prep.rk.n_stages();
    output::write_vtk_averages(&prep.initial, &prep.scheme.grid, gamma, &dir.join("avg_000000.vtk"))?;
    let mut write_err: Option<MhdError> = None;
    let grid = prep.scheme.grid.clone();
    let out = prep.run(&mut |ev| {
        if ev.stage == n_stages && ev.step % every == 0 {
            let path = dir.join(format!("avg_{:06}.vtk", ev.step));
            if let Err(e) = output::write_vtk_averages(ev.solution, &grid, gamma, &path) {
                write_err.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e);
    }
    let gamma = out.problem.gamma;
    let u = &out.result.solution;
    output::write_vtk_averages(u, &out.grid, gamma, &dir.join("final.vtk"))?;
    output::write_samples_csv(u, &out.grid, gamma, &dir.join("solution.csv"))?;
    output::write_diagnostics(&out.result.samples, &dir.join("diagnostics.csv"))?;
    match out.problem.name {
        ProblemName::BrioWu => {
            let y = 0.5 * (out.grid.ymin + out.grid.ymax);
            output::write_line_cut(u, &out.grid, gamma, LineCut::Horizontal { y }, &dir.join("cut.csv"))?;
        }
        ProblemName::RsTube if out.grid.nx == out.grid.ny => {
            output::write_line_cut(u, &out.grid, gamma, LineCut::Diagonal, &dir.join("cut.csv"))?;
        }
        _ => {}
    }
    let last = out.result.samples.last().expect("at least one sample");
    let summary = [
        ("problem", spec.problem.clone()),
        ("degree", spec.degree.to_string()),
        ("nx", out.grid.nx.to_string()),
        ("ny", out.grid.ny.to_string()),
        ("flux", spec.flux.to_string()),
        ("t", format!("{:.16e}", out.result.t)),
        ("steps", out.result.steps.to_string()),
        ("wall_time_s", format!("{:.3}", out.result.wall_time)),
        ("limited_cells", out.result.totals.limited_cells.to_string()),
        ("positivity_scaled_cells", out.result.totals.scaled_cells.to_string()),
        ("positivity_events", out.result.totals.floor_events.to_string()),
        ("hllc_fallbacks", out.result.totals.hllc_fallbacks.to_string()),
        ("final_div_l2", format!("{:.16e}", last.div_l2)),
        ("final_div_max", format!("{:.16e}", last.div_max)),
    ];
    output::write_summary(&summary, &dir.join("summary.txt"))?;
    for (k, v) in &summary {
        println!("{k} = {v}");
    }
    Ok(out)
}

fn converge_command(a: &ConvergeArgs) -> Result<()> {
    let spec = a.common.spec()?;
    let norm: ErrorNorm = a.norm.parse()?;
    let setup = ConvergenceSetup {
        problem: spec.problem.clone(),
        k: spec.degree,
        flux: spec.flux,
        grids: a.grids.clone(),
        t_final: spec.t_final,
        norm,
        cfl: spec.cfl,
    };
    let table = diagnostics::convergence_table(&setup)?;
    let csv = table.to_csv();
    let path = spec.outdir.join(format!("convergence_{}_k{}.csv", spec.problem, spec.degree));
    output::write_text(&path, &csv)?;
    print!("{csv}");
    println!("written to {}", path.display());
    Ok(())
}

/// Electric fields on Brio-Wu data from the 1-D HLL solver and the vertex
/// solvers with the left state in the west corners and the right state in
/// the east corners.
pub fn consistency_check() -> Result<String> {
    let g = 5.0 / 3.0;
    let l = to_conserved(&PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0]), g);
    let r = to_conserved(&PrimitiveState::new(0.125, [0.0; 3], 0.1, [0.75, -1.0, 0.0]), g);
    let one_d = riemann::hll_flux(&l, &r, g, crate::physics::Direction::X)?.ez;
    let full = riemann::vertex_ez(FluxKind::Hll, VertexSolver::Consistent, &l, &r, &l, &r, g)?;
    let first = riemann::vertex_ez(FluxKind::Hll, VertexSolver::FirstTermOnly, &l, &r, &l, &r, g)?;
    Ok(format!(
        "ez_1d_hll = {one_d:.16e}\nez_vertex_consistent = {full:.16e}\nez_vertex_first_term = {first:.16e}\n|1d - vertex| = {:.3e}\n",
        (one_d - full).abs()
    ))
}
