//! Strong-stability-preserving Runge-Kutta stepping.
//!
//! Every stage is a convex combination of forward Euler steps, written in
//! Shu-Osher form
//!
//! ```text
//! u(i) = Σ_j α_ij u(j) + Δt Σ_j β_ij L(u(j)),   j < i
//! ```
//!
//! and after each stage the field is reconstructed, the TVD chain is applied
//! and finally the positivity scaling.

use std::time::Instant;

use crate::dg::{Residual, Scheme, SolutionDofs};
use crate::diagnostics::{self, DiagnosticSample};
use crate::error::{MhdError, Result};
use crate::grid::Grid;
use crate::limiters::{self, LimiterConfig, LimiterReport, PositivityReport};
use crate::app::RunSpec;
use crate::physics::{self, ConservedState, Direction};
use crate::problems::{self, ProblemSpec};

/// One row of a Shu-Osher table.
#[derive(Debug, Clone, PartialEq)]
pub struct RkStage {
    /// (j, α_ij) pairs.
    pub alpha: Vec<(usize, f64)>,
    /// (j, β_ij) pairs.
    pub beta: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RKScheme {
    pub name: &'static str,
    pub order: usize,
    pub stages: Vec<RkStage>,
}

fn stage(alpha: &[(usize, f64)], beta: &[(usize, f64)]) -> RkStage {
    RkStage {
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
    }
}

impl RKScheme {
    pub fn forward_euler() -> Self {
        RKScheme {
            name: "euler",
            order: 1,
            stages: vec![stage(&[(0, 1.0)], &[(0, 1.0)])],
        }
    }

    pub fn ssprk2() -> Self {
        RKScheme {
            name: "ssprk2",
            order: 2,
            stages: vec![
                stage(&[(0, 1.0)], &[(0, 1.0)]),
                stage(&[(0, 0.5), (1, 0.5)], &[(1, 0.5)]),
            ],
        }
    }

    pub fn ssprk3() -> Self {
        RKScheme {
            name: "ssprk3",
            order: 3,
            stages: vec![
                stage(&[(0, 1.0)], &[(0, 1.0)]),
                stage(&[(0, 0.75), (1, 0.25)], &[(1, 0.25)]),
                stage(&[(0, 1.0 / 3.0), (2, 2.0 / 3.0)], &[(2, 2.0 / 3.0)]),
            ],
        }
    }

    /// Five-stage fourth-order SSP scheme.
    pub fn ssprk54() -> Self {
        RKScheme {
            name: "ssprk54",
            order: 4,
            stages: vec![
                stage(&[(0, 1.0)], &[(0, 0.391752226571890)]),
                stage(&[(0, 0.444370493651235), (1, 0.555629506348765)], &[(1, 0.368410593050371)]),
                stage(&[(0, 0.620101851488403), (2, 0.379898148511597)], &[(2, 0.251891774271694)]),
                stage(&[(0, 0.178079954393132), (3, 0.821920045606868)], &[(3, 0.544974750228521)]),
                stage(
                    &[(2, 0.517231671970585), (3, 0.096059710526147), (4, 0.386708617503269)],
                    &[(3, 0.063692468666290), (4, 0.226007483236906)],
                ),
            ],
        }
    }

    /// The pairing used with degree k: Euler, SSPRK2, SSPRK3, SSPRK(5,4).
    pub fn for_degree(k: usize) -> Result<Self> {
        let rk = match k {
            0 => Self::forward_euler(),
            1 => Self::ssprk2(),
            2 => Self::ssprk3(),
            3 => Self::ssprk54(),
            _ => return Err(MhdError::Domain(format!("no Runge-Kutta pairing for degree {k}"))),
        };
        rk.check_convexity()?;
        Ok(rk)
    }

    pub fn n_stages(&self) -> usize {
        self.stages.len()
    }

    /// Every α in [0, 1], every row of α summing to one (to the precision of
    /// the tabulated decimals), every β non-negative and only previous
    /// stages referenced.
    pub fn check_convexity(&self) -> Result<()> {
        for (i, st) in self.stages.iter().enumerate() {
            let sum: f64 = st.alpha.iter().map(|p| p.1).sum();
            let bad_alpha = st.alpha.iter().any(|&(j, a)| j > i || !(0.0..=1.0).contains(&a));
            let bad_beta = st.beta.iter().any(|&(j, b)| j > i || b < 0.0);
            if bad_alpha || bad_beta || (sum - 1.0).abs() > 1e-14 {
                return Err(MhdError::Domain(format!(
                    "Runge-Kutta table `{}` is not a convex combination at stage {}",
                    self.name,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Integrate the scalar ODE y' = f(y) over `n` steps of size `dt` with
    /// this table. Exists for order checks of the tables themselves.
    pub fn integrate_scalar(&self, y0: f64, dt: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
        let mut y = y0;
        let mut u = vec![0.0; self.stages.len() + 1];
        let mut l = vec![0.0; self.stages.len() + 1];
        for _ in 0..n {
            u[0] = y;
            l[0] = f(y);
            for (i, st) in self.stages.iter().enumerate() {
                let mut v = u[0];
                for &(j, a) in &st.alpha {
                    v += a * (u[j] - u[0]);
                }
                for &(j, b) in &st.beta {
                    v += dt * b * l[j];
                }
                u[i + 1] = v;
                l[i + 1] = f(v);
            }
            y = u[self.stages.len()];
        }
        y
    }
}

/// Time step from cell means:
/// Δt = cfl / max_c[(|v_x| + c_fx)/Δx + (|v_y| + c_fy)/Δy].
pub fn cfl_dt(u: &SolutionDofs, gamma: f64, cfl: f64, grid: &Grid) -> Result<f64> {
    let mut rate = 0.0f64;
    for c in 0..grid.n_cells() {
        let s = ConservedState(u.mean_state(c));
        let sx = physics::max_signal(&s, gamma, Direction::X).map_err(|e| e.at(format!("cell {c} mean")))?;
        let sy = physics::max_signal(&s, gamma, Direction::Y).map_err(|e| e.at(format!("cell {c} mean")))?;
        rate = rate.max(sx / grid.dx + sy / grid.dy);
    }
    let dt = cfl / rate;
    if !dt.is_finite() || dt <= 0.0 {
        return Err(MhdError::Admissibility(format!(
            "time step is not finite and positive (max wave rate {rate})"
        )));
    }
    Ok(dt)
}

/// Default CFL number 0.95 / (2k + 1).
pub fn default_cfl(k: usize) -> f64 {
    0.95 / (2 * k + 1) as f64
}

/// What happened in one stage, handed to stage observers.
pub struct StageEvent<'a> {
    pub step: usize,
    /// 1-based stage number.
    pub stage: usize,
    pub solution: &'a SolutionDofs,
    pub limiter: &'a LimiterReport,
    pub positivity: &'a PositivityReport,
}

/// Totals accumulated over one step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    pub limited_cells: usize,
    pub repaired_cells: usize,
    pub scaled_cells: usize,
    pub floor_events: usize,
    pub hllc_fallbacks: usize,
}

/// `out = base + Σ a_j (u_j - base)` on the stored degrees of freedom.
/// Written relative to `base` so that identical inputs give bit-identical
/// output whatever the weights.
fn combine(out: &mut SolutionDofs, base: &SolutionDofs, terms: &[(f64, &SolutionDofs)]) {
    out.hydro.clone_from(&base.hydro);
    out.faces.bx.clone_from(&base.faces.bx);
    out.faces.by.clone_from(&base.faces.by);
    out.moments.alpha.clone_from(&base.moments.alpha);
    out.moments.beta.clone_from(&base.moments.beta);
    for &(a, u) in terms {
        if std::ptr::eq(u, base) {
            continue;
        }
        for (x, (y, b)) in out.hydro.iter_mut().zip(u.hydro.iter().zip(&base.hydro)) {
            for v in 0..x.len() {
                x[v] += a * (y[v] - b[v]);
            }
        }
        let pairs: [(&mut Vec<f64>, &Vec<f64>, &Vec<f64>); 4] = [
            (&mut out.faces.bx, &u.faces.bx, &base.faces.bx),
            (&mut out.faces.by, &u.faces.by, &base.faces.by),
            (&mut out.moments.alpha, &u.moments.alpha, &base.moments.alpha),
            (&mut out.moments.beta, &u.moments.beta, &base.moments.beta),
        ];
        for (x, y, b) in pairs {
            for (p, (q, r)) in x.iter_mut().zip(y.iter().zip(b)) {
                *p += a * (q - r);
            }
        }
    }
}

/// Advance one step of size `dt`. `observer` sees the state after every
/// stage, once limiting and positivity scaling are done.
pub fn step_observed(
    scheme: &Scheme,
    u: &SolutionDofs,
    dt: f64,
    rk: &RKScheme,
    limiter: &LimiterConfig,
    step_index: usize,
    observer: &mut dyn FnMut(&StageEvent),
) -> Result<(SolutionDofs, StepReport)> {
    let grid = &scheme.grid;
    let ns = rk.n_stages();
    let mut states: Vec<SolutionDofs> = Vec::with_capacity(ns + 1);
    states.push(u.clone());
    let mut residuals: Vec<Option<Residual>> = vec![None; ns + 1];
    let mut report = StepReport::default();
    for (i, st) in rk.stages.iter().enumerate() {
        let ctx = || format!("step {step_index}, stage {}", i + 1);
        for &(j, _) in &st.beta {
            if residuals[j].is_none() {
                let r = scheme.assemble(&states[j]).map_err(|e| e.at(ctx()))?;
                report.hllc_fallbacks += r.hllc_fallbacks;
                residuals[j] = Some(r);
            }
        }
        let mut next = states[0].clone();
        {
            let terms: Vec<(f64, &SolutionDofs)> = st.alpha.iter().map(|&(j, a)| (a, &states[j])).collect();
            combine(&mut next, &states[0], &terms);
        }
        for &(j, b) in &st.beta {
            next.add_residual(b * dt, residuals[j].as_ref().expect("assembled above"));
        }
        next.refresh_rt(grid);
        next.clear_scaling();
        let lrep = limiters::apply_tvd_chain(&mut next, grid, scheme.gamma, limiter).map_err(|e| e.at(ctx()))?;
        let prep = if limiter.positivity {
            limiters::positivity_limit(&mut next, grid, scheme.gamma, limiter)
        } else {
            PositivityReport::default()
        };
        report.limited_cells += lrep.limited_cells.len();
        report.repaired_cells += lrep.repaired_cells.len();
        report.scaled_cells += prep.scaled_cells;
        report.floor_events += prep.floor_events;
        observer(&StageEvent {
            step: step_index,
            stage: i + 1,
            solution: &next,
            limiter: &lrep,
            positivity: &prep,
        });
        states.push(next);
    }
    let out = states.pop().expect("at least one stage");
    Ok((out, report))
}

pub fn step(
    scheme: &Scheme,
    u: &SolutionDofs,
    dt: f64,
    rk: &RKScheme,
    limiter: &LimiterConfig,
) -> Result<(SolutionDofs, StepReport)> {
    step_observed(scheme, u, dt, rk, limiter, 0, &mut |_| {})
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunControl {
    pub t_final: f64,
    pub cfl: f64,
    /// Diagnostics every this many steps, plus the first and last state.
    pub diag_every: usize,
    /// Stop after this many steps even if `t_final` is not reached.
    pub max_steps: Option<usize>,
}

impl RunControl {
    pub fn new(t_final: f64, cfl: f64) -> Self {
        RunControl {
            t_final,
            cfl,
            diag_every: 10,
            max_steps: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub solution: SolutionDofs,
    pub t: f64,
    pub steps: usize,
    /// Sizes of every step taken.
    pub dts: Vec<f64>,
    pub samples: Vec<DiagnosticSample>,
    pub totals: StepReport,
    pub wall_time: f64,
}

/// The time loop: CFL step, clipped so the last one lands on `t_final`.
pub fn integrate(
    scheme: &Scheme,
    u0: SolutionDofs,
    rk: &RKScheme,
    limiter: &LimiterConfig,
    ctl: &RunControl,
    observer: &mut dyn FnMut(&StageEvent),
) -> Result<RunResult> {
    if !(ctl.t_final >= 0.0 && ctl.t_final.is_finite()) {
        return Err(MhdError::Config(format!("final time must be finite and non-negative, got {}", ctl.t_final)));
    }
    if !(ctl.cfl > 0.0 && ctl.cfl.is_finite()) {
        return Err(MhdError::Config(format!("cfl must be positive, got {}", ctl.cfl)));
    }
    rk.check_convexity()?;
    limiter.validate()?;
    let start = Instant::now();
    let grid = &scheme.grid;
    let every = ctl.diag_every.max(1);
    let mut u = u0;
    let mut t = 0.0;
    let mut steps = 0;
    let mut dts = Vec::new();
    let mut totals = StepReport::default();
    let mut samples = vec![diagnostics::sample(&u, grid, t, 0, 0, 0)];
    let mut last_sampled = true;
    while t < ctl.t_final && ctl.max_steps.map_or(true, |m| steps < m) {
        let nominal = cfl_dt(&u, scheme.gamma, ctl.cfl, grid).map_err(|e| e.at(format!("step {}", steps + 1)))?;
        let remaining = ctl.t_final - t;
        let (dt, last) = if nominal >= remaining * (1.0 - 1e-12) {
            (remaining, true)
        } else {
            (nominal, false)
        };
        let (next, rep) = step_observed(scheme, &u, dt, rk, limiter, steps + 1, observer)?;
        u = next;
        t = if last { ctl.t_final } else { t + dt };
        steps += 1;
        dts.push(dt);
        totals.limited_cells += rep.limited_cells;
        totals.repaired_cells += rep.repaired_cells;
        totals.scaled_cells += rep.scaled_cells;
        totals.floor_events += rep.floor_events;
        totals.hllc_fallbacks += rep.hllc_fallbacks;
        last_sampled = steps % every == 0;
        if last_sampled {
            samples.push(diagnostics::sample(&u, grid, t, steps, rep.limited_cells, totals.floor_events));
        }
    }
    if !last_sampled {
        samples.push(diagnostics::sample(&u, grid, t, steps, 0, totals.floor_events));
    }
    Ok(RunResult {
        solution: u,
        t,
        steps,
        dts,
        samples,
        totals,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Everything a run needs, built from a [`RunSpec`].
#[derive(Debug, Clone)]
pub struct Prepared {
    pub problem: ProblemSpec,
    pub scheme: Scheme,
    pub rk: RKScheme,
    pub limiter: LimiterConfig,
    pub control: RunControl,
    /// Projected initial data, positivity-scaled when positivity is on.
    pub initial: SolutionDofs,
}

/// Outcome of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub problem: ProblemSpec,
    pub grid: Grid,
    pub result: RunResult,
}

/// Build the problem, grid, scheme and initial data of a spec.
pub fn prepare(spec: &RunSpec) -> Result<Prepared> {
    spec.validate()?;
    let mut problem = problems::make(&spec.problem)?;
    if spec.outflow {
        problem = problem.with_outflow();
    }
    let grid = problem.grid(spec.nx, spec.ny)?;
    let k = spec.degree;
    let scheme = Scheme::new(grid.clone(), k, problem.gamma, spec.flux)?.with_vertex_solver(spec.vertex_solver);
    let mut initial = problem.initialize(&grid, k)?;
    if spec.limiter.positivity {
        limiters::positivity_limit(&mut initial, &grid, problem.gamma, &spec.limiter);
    }
    let control = RunControl {
        t_final: spec.t_final.unwrap_or(problem.t_final),
        cfl: spec.cfl.unwrap_or(default_cfl(k)),
        diag_every: spec.output_every,
        max_steps: spec.max_steps,
    };
    Ok(Prepared {
        problem,
        scheme,
        rk: RKScheme::for_degree(k)?,
        limiter: spec.limiter,
        control,
        initial,
    })
}

impl Prepared {
    pub fn run(self, observer: &mut dyn FnMut(&StageEvent)) -> Result<RunOutput> {
        let result = integrate(&self.scheme, self.initial, &self.rk, &self.limiter, &self.control, observer)?;
        Ok(RunOutput {
            grid: self.scheme.grid.clone(),
            problem: self.problem,
            result,
        })
    }
}

/// Set up and run a spec to its final time.
pub fn run(spec: &RunSpec) -> Result<RunOutput> {
    prepare(spec)?.run(&mut |_| {})
}
