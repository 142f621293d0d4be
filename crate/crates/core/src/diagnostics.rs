//! Run-time measurements: divergence norms, conserved totals and
//! convergence tables.

use crate::basis::gauss_legendre;
use crate::dg::SolutionDofs;
use crate::error::{MhdError, Result};
use crate::grid::Grid;
use crate::limiters::LimiterConfig;
use crate::physics::{BX, BY, NVARS};
use crate::problems::{self, ErrorNorm};
use crate::riemann::FluxKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceNorm {
    pub l2: f64,
    pub max: f64,
}

/// One row of the diagnostics time series.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSample {
    pub t: f64,
    pub step: usize,
    pub div_l2: f64,
    pub div_max: f64,
    /// Domain integrals of the eight conserved variables.
    pub totals: [f64; NVARS],
    /// Cells limited in Step 1 during the last step (summed over stages).
    pub limited_cells: usize,
    /// Cumulative positivity floor events.
    pub positivity_events: usize,
}

/// L2 = sqrt(Σ_cells Δx Δy Σ_q w_q (∇·B)²) over (k+1)² Gauss points, and
/// the largest |∇·B| at those points. Uses the stored (unscaled) field.
pub fn divergence_norm(u: &SolutionDofs, grid: &Grid) -> DivergenceNorm {
    let q = gauss_legendre(u.k + 1).expect("degree validated on construction");
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for rt in &u.rt {
        for (&x, &wx) in q.nodes.iter().zip(&q.weights) {
            for (&y, &wy) in q.nodes.iter().zip(&q.weights) {
                let d = rt.divergence_at(x, y, grid.dx, grid.dy);
                sum += wx * wy * d * d;
                max = max.max(d.abs());
            }
        }
    }
    DivergenceNorm {
        l2: (sum * grid.dx * grid.dy).sqrt(),
        max,
    }
}

/// Domain integrals of the conserved variables. Hydro totals come from the
/// cell-mean modes; the in-plane field totals from the reconstructed cell
/// means, which equal α₀₀, β₀₀ for k ≥ 1 and the average of the two
/// opposite face values for k = 0.
pub fn conserved_totals(u: &SolutionDofs, grid: &Grid) -> [f64; NVARS] {
    let mut t = [0.0; NVARS];
    for c in 0..grid.n_cells() {
        let m = u.mean_state(c);
        for v in 0..NVARS {
            t[v] += m[v];
        }
    }
    let area = grid.dx * grid.dy;
    t.map(|x| x * area)
}

/// Largest |u_var - value| over the positivity point set of every cell,
/// evaluated as the scheme sees the solution.
pub fn max_deviation(u: &SolutionDofs, var: usize, value: f64) -> f64 {
    let pts = crate::limiters::positivity_points(u.k);
    let mut worst = 0.0f64;
    for c in 0..u.n_cells() {
        for &(x, y) in &pts {
            worst = worst.max((u.eval(c, x, y)[var] - value).abs());
        }
    }
    worst
}

pub fn sample(
    u: &SolutionDofs,
    grid: &Grid,
    t: f64,
    step: usize,
    limited_cells: usize,
    positivity_events: usize,
) -> DiagnosticSample {
    let d = divergence_norm(u, grid);
    DiagnosticSample {
        t,
        step,
        div_l2: d.l2,
        div_max: d.max,
        totals: conserved_totals(u, grid),
        limited_cells,
        positivity_events,
    }
}

/// One grid of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub errors: [f64; NVARS],
    /// Observed order against the previous row, `None` for the first row
    /// or when it cannot be formed.
    pub rates: [Option<f64>; NVARS],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Build rates from (N, errors) pairs in refinement order. The rate is
    /// log(e_prev / e) / log(N / N_prev), which is log2 of the error ratio
    /// for a doubling sequence.
    pub fn from_errors(data: &[(usize, [f64; NVARS])]) -> Self {
        let mut rows = Vec::with_capacity(data.len());
        for (idx, &(n, errors)) in data.iter().enumerate() {
            let rates = if idx == 0 {
                [None; NVARS]
            } else {
                let (np, ep) = data[idx - 1];
                std::array::from_fn(|v| {
                    let ok = n != np && errors[v] > 0.0 && ep[v] > 0.0;
                    ok.then(|| (ep[v] / errors[v]).ln() / (n as f64 / np as f64).ln())
                })
            };
            rows.push(ConvergenceRow { n, errors, rates });
        }
        ConvergenceTable { rows }
    }

    /// Rate of variable `v` between the last two rows.
    pub fn final_rate(&self, v: usize) -> Option<f64> {
        self.rows.last().and_then(|r| r.rates[v])
    }

    /// CSV with columns `n`, one error column per variable and one rate
    /// column per variable (empty where undefined).
    pub fn to_csv(&self) -> String {
        const NAMES: [&str; NVARS] = ["rho", "mx", "my", "mz", "E", "Bx", "By", "Bz"];
        let mut s = String::from("n");
        for n in NAMES {
            s.push_str(&format!(",err_{n}"));
        }
        for n in NAMES {
            s.push_str(&format!(",rate_{n}"));
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.n.to_string());
            for e in r.errors {
                s.push_str(&format!(",{e:.16e}"));
            }
            for q in r.rates {
                match q {
                    Some(q) => s.push_str(&format!(",{q:.6}")),
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Options of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSetup {
    pub problem: String,
    pub k: usize,
    pub flux: FluxKind,
    /// Cells per direction on each grid (nx = ny = n).
    pub grids: Vec<usize>,
    /// Final time; `None` takes the problem default.
    pub t_final: Option<f64>,
    pub norm: ErrorNorm,
    pub cfl: Option<f64>,
}

/// Run `problem` on every grid with limiting and positivity off and
/// collect errors against its exact solution.
pub fn convergence_table(setup: &ConvergenceSetup) -> Result<ConvergenceTable> {
    if setup.grids.is_empty() {
        return Err(MhdError::Config("convergence study needs at least one grid".into()));
    }
    let mut data = Vec::with_capacity(setup.grids.len());
    for &n in &setup.grids {
        let spec = crate::app::RunSpec {
            problem: setup.problem.clone(),
            degree: setup.k,
            nx: n,
            ny: n,
            flux: setup.flux,
            cfl: setup.cfl,
            t_final: setup.t_final,
            limiter: LimiterConfig::default(),
            ..crate::app::RunSpec::new(&setup.problem, setup.k)
        };
        let out = crate::time_integrator::run(&spec)?;
        let errors = problems::exact_error(&out.result.solution, &out.grid, &out.problem, out.result.t, setup.norm)?;
        data.push((n, errors));
    }
    Ok(ConvergenceTable::from_errors(&data))
}

/// Field totals used by tests that only look at the in-plane components.
pub fn field_totals(u: &SolutionDofs, grid: &Grid) -> (f64, f64) {
    let t = conserved_totals(u, grid);
    (t[BX], t[BY])
}

/// A tabulated 1-D solution with strictly increasing x.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceProfile {
    pub x: Vec<f64>,
    pub names: Vec<String>,
    /// One vector per column after `x`.
    pub columns: Vec<Vec<f64>>,
}

const BRIOWU_REFERENCE: &str = include_str!("../data/briowu_reference.csv");

impl ReferenceProfile {
    /// Parse a CSV whose first column is `x`.
    pub fn parse(text: &str) -> Result<Self> {
        let (header, rows) = crate::app::output::read_csv(text)?;
        if header.first().map(String::as_str) != Some("x") || header.len() < 2 {
            return Err(MhdError::Data("reference profile needs an `x` column followed by data".into()));
        }
        let x: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        if x.len() < 2 || x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MhdError::Data("reference x must be strictly increasing with at least two rows".into()));
        }
        let columns = (1..header.len()).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
        Ok(ReferenceProfile {
            x,
            names: header[1..].to_vec(),
            columns,
        })
    }

    /// Brio-Wu at t = 0.2 from a 10000-cell first-order LxF run (cell
    /// centres of the strip): columns rho, vx, vy, p, By.
    pub fn briowu() -> Self {
        Self::parse(BRIOWU_REFERENCE).expect("bundled reference is well formed")
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    /// Piecewise-linear interpolation, constant beyond the ends.
    pub fn interpolate(&self, col: &[f64], x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return col[0];
        }
        if x >= self.x[n - 1] {
            return col[n - 1];
        }
        let i = self.x.partition_point(|&v| v <= x) - 1;
        let t = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        col[i] + t * (col[i + 1] - col[i])
    }

    /// Intervals where |d col / dx| exceeds `grad`, merged when fewer than
    /// five samples apart.
    pub fn steep_zones(&self, col: &[f64], grad: f64) -> Vec<(f64, f64)> {
        let mut zones: Vec<(usize, usize)> = Vec::new();
        for i in 0..self.x.len() - 1 {
            let g = (col[i + 1] - col[i]).abs() / (self.x[i + 1] - self.x[i]);
            if g > grad {
                match zones.last_mut() {
                    Some(z) if i - z.1 <= 5 => z.1 = i + 1,
                    _ => zones.push((i, i + 1)),
                }
            }
        }
        zones.into_iter().map(|(a, b)| (self.x[a], self.x[b])).collect()
    }
}

/// Result of comparing a coarse profile with a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileComparison {
    /// Σ|u - u_ref| / Σ|u_ref| over the samples kept.
    pub l1_rel: f64,
    /// Samples dropped near steep zones.
    pub excluded: usize,
    /// Largest excursion outside the reference's range over ±3 coarse
    /// cells, relative to the reference's total range.
    pub overshoot: f64,
}

/// Compare samples (x, u) on a uniform coarse grid of spacing `dx` with a
/// reference column. Samples within `margin` coarse cells of a steep zone
/// (|du/dx| > `grad` in the reference) are left out of the L1 measure; the
/// overshoot check uses every sample.
pub fn compare_profile(
    reference: &ReferenceProfile,
    col: &str,
    x: &[f64],
    u: &[f64],
    dx: f64,
    grad: f64,
    margin: f64,
) -> Result<ProfileComparison> {
    let r = reference
        .column(col)
        .ok_or_else(|| MhdError::Data(format!("reference has no column `{col}`")))?;
    if x.len() != u.len() || x.is_empty() {
        return Err(MhdError::Data("profile sample arrays must be non-empty and of equal length".into()));
    }
    let zones = reference.steep_zones(r, grad);
    let near = |xx: f64| zones.iter().any(|&(a, b)| xx > a - margin * dx && xx < b + margin * dx);
    let (mut num, mut den, mut excluded) = (0.0, 0.0, 0);
    let range = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - r.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut overshoot = 0.0f64;
    for (&xx, &v) in x.iter().zip(u) {
        let lo_i = reference.x.partition_point(|&p| p <= xx - 3.0 * dx);
        let hi_i = reference.x.partition_point(|&p| p < xx + 3.0 * dx);
        let window = &r[lo_i.min(r.len() - 1)..hi_i.max(lo_i + 1).min(r.len())];
        let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        overshoot = overshoot.max((v - hi).max(lo - v) / range);
        if near(xx) {
            excluded += 1;
            continue;
        }
        let rv = reference.interpolate(r, xx);
        num += (v - rv).abs();
        den += rv.abs();
    }
    Ok(ProfileComparison {
        l1_rel: num / den,
        excluded,
        overshoot,
    })
}

/// Cell-centre values of conserved variable `var` along row `j`.
pub fn centre_profile(u: &SolutionDofs, grid: &Grid, j: usize, var: usize) -> (Vec<f64>, Vec<f64>) {
    (0..grid.nx)
        .map(|i| (grid.cell_center(i, j).0, u.eval(grid.cell(i, j), 0.0, 0.0)[var]))
        .unzip()
}
