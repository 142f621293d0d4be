//! Benchmark initial and boundary data.

use std::f64::consts::PI;

use crate::basis::{gauss_legendre, gauss_lobatto};
use crate::dg::{hydro_part, project_hydro, SolutionDofs};
use crate::error::{MhdError, Result};
use crate::grid::{Boundary, Domain, Grid};
use crate::limiters::{Indicator, LimiterConfig};
use crate::physics::{to_conserved, PrimitiveState, BX, BY, NVARS};
use crate::rt_field::{project_field, project_initial, sample_potential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemName {
    Alfven,
    Vortex,
    BrioWu,
    RsTube,
    Ot,
    Rotor,
    Loop,
    Blast,
}

impl ProblemName {
    pub const ALL: [ProblemName; 8] = [
        ProblemName::Alfven,
        ProblemName::Vortex,
        ProblemName::BrioWu,
        ProblemName::RsTube,
        ProblemName::Ot,
        ProblemName::Rotor,
        ProblemName::Loop,
        ProblemName::Blast,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemName::Alfven => "alfven",
            ProblemName::Vortex => "vortex",
            ProblemName::BrioWu => "briowu",
            ProblemName::RsTube => "rstube",
            ProblemName::Ot => "ot",
            ProblemName::Rotor => "rotor",
            ProblemName::Loop => "loop",
            ProblemName::Blast => "blast",
        }
    }
}

impl std::str::FromStr for ProblemName {
    type Err = MhdError;

    fn from_str(s: &str) -> Result<Self> {
        ProblemName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                MhdError::Config(format!(
                    "unknown problem `{s}` (valid: alfven, vortex, briowu, rstube, ot, rotor, loop, blast)"
                ))
            })
    }
}

impl std::fmt::Display for ProblemName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the in-plane field is initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagneticInit {
    /// From a continuous potential ψ with B = (∂ψ/∂y, -∂ψ/∂x).
    Potential,
    /// Direct projection of a field that is piecewise constant with jumps
    /// only along mesh lines.
    Field,
}

/// Norm used by [`exact_error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorNorm {
    L1,
    #[default]
    L2,
    Linf,
}

impl std::str::FromStr for ErrorNorm {
    type Err = MhdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "L1" => Ok(ErrorNorm::L1),
            "l2" | "L2" => Ok(ErrorNorm::L2),
            "linf" | "Linf" => Ok(ErrorNorm::Linf),
            other => Err(MhdError::Config(format!("unknown norm `{other}` (valid: l1, l2, linf)"))),
        }
    }
}

const ALFVEN_ANGLE: f64 = PI / 6.0;
const ALFVEN_AMP: f64 = 0.1;
const VORTEX_KAPPA: f64 = 1.0;
const VORTEX_MU: f64 = 1.0;
const RSTUBE_ANGLE: f64 = PI / 4.0;
const ROTOR_R0: f64 = 0.1;
const ROTOR_R1: f64 = 0.115;
const ROTOR_U0: f64 = 2.0;
const LOOP_A0: f64 = 1e-3;
const LOOP_R0: f64 = 0.3;

/// Everything needed to set up and judge one benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: ProblemName,
    pub domain: Domain,
    pub gamma: f64,
    pub t_final: f64,
    pub bc_x: Boundary,
    pub bc_y: Boundary,
    pub magnetic: MagneticInit,
    /// Limiter settings the benchmark is normally run with.
    pub recommended: LimiterConfig,
    /// Suggested ny as a function of nx, e.g. the 4-cell Brio-Wu strip.
    pub strip_rows: Option<usize>,
}

/// Construct a benchmark by name.
pub fn make(name: &str) -> Result<ProblemSpec> {
    Ok(make_named(name.parse()?))
}

pub fn make_named(name: ProblemName) -> ProblemSpec {
    let periodic = Boundary::Periodic;
    let outflow = Boundary::Outflow;
    let tvd = LimiterConfig {
        enabled: true,
        indicator: Indicator::ModalDecay,
        ..LimiterConfig::default()
    };
    let off = LimiterConfig::default();
    let base = ProblemSpec {
        name,
        domain: Domain::new(0.0, 1.0, 0.0, 1.0),
        gamma: 5.0 / 3.0,
        t_final: 1.0,
        bc_x: periodic,
        bc_y: periodic,
        magnetic: MagneticInit::Potential,
        recommended: off,
        strip_rows: None,
    };
    match name {
        ProblemName::Alfven => ProblemSpec {
            domain: Domain::new(0.0, 1.0 / ALFVEN_ANGLE.cos(), 0.0, 1.0 / ALFVEN_ANGLE.sin()),
            ..base
        },
        ProblemName::Vortex => ProblemSpec {
            domain: Domain::new(-10.0, 10.0, -10.0, 10.0),
            t_final: 20.0,
            ..base
        },
        ProblemName::BrioWu => ProblemSpec {
            // A thin y-periodic strip; 4 rows of square cells at 800 columns.
            domain: Domain::new(-1.0, 1.0, 0.0, 0.01),
            t_final: 0.2,
            bc_x: outflow,
            magnetic: MagneticInit::Field,
            recommended: tvd,
            strip_rows: Some(4),
            ..base
        },
        ProblemName::RsTube => ProblemSpec {
            domain: Domain::new(-1.0, 1.0, -1.0, 1.0),
            t_final: 0.08 / RSTUBE_ANGLE.cos(),
            bc_x: outflow,
            bc_y: outflow,
            magnetic: MagneticInit::Field,
            // The projected jump overshoots at the corners of the cells cut by
            // x + y = 0, so the initial data needs the positivity stage.
            recommended: LimiterConfig { positivity: true, ..tvd },
            ..base
        },
        ProblemName::Ot => ProblemSpec {
            t_final: 0.5,
            recommended: LimiterConfig { positivity: true, ..tvd },
            ..base
        },
        ProblemName::Rotor => ProblemSpec {
            gamma: 1.4,
            t_final: 0.15,
            magnetic: MagneticInit::Field,
            recommended: LimiterConfig { positivity: true, ..tvd },
            ..base
        },
        ProblemName::Loop => ProblemSpec {
            domain: Domain::new(-1.0, 1.0, -0.5, 0.5),
            t_final: 1.0,
            recommended: tvd,
            ..base
        },
        ProblemName::Blast => ProblemSpec {
            gamma: 1.4,
            t_final: 0.01,
            magnetic: MagneticInit::Field,
            recommended: LimiterConfig { positivity: true, ..tvd },
            ..base
        },
    }
}

fn alfven_frame(x: f64, y: f64) -> (f64, f64) {
    let (s, c) = ALFVEN_ANGLE.sin_cos();
    (x * c + y * s, -x * s + y * c)
}

impl ProblemSpec {
    /// Replace both boundary conditions by outflow (used for the rotor,
    /// which is periodic by default).
    pub fn with_outflow(mut self) -> Self {
        self.bc_x = Boundary::Outflow;
        self.bc_y = Boundary::Outflow;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn grid(&self, nx: usize, ny: usize) -> Result<Grid> {
        Grid::build(self.domain, nx, ny, self.bc_x, self.bc_y)
    }

    /// Pointwise initial primitive state, including the analytic field.
    pub fn primitive(&self, x: f64, y: f64) -> PrimitiveState {
        match self.name {
            ProblemName::Alfven => {
                let (zeta, _) = alfven_frame(x, y);
                let (s, c) = ALFVEN_ANGLE.sin_cos();
                let phase = 2.0 * PI * zeta;
                let perp = ALFVEN_AMP * phase.sin();
                let vz = ALFVEN_AMP * phase.cos();
                let bpar = 1.0;
                PrimitiveState::new(
                    1.0,
                    [-perp * s, perp * c, vz],
                    0.1,
                    [bpar * c - perp * s, bpar * s + perp * c, vz],
                )
            }
            ProblemName::Vortex => {
                let r2 = x * x + y * y;
                let e = (0.5 * (1.0 - r2)).exp();
                let kv = VORTEX_KAPPA / (2.0 * PI);
                let mb = VORTEX_MU / (2.0 * PI);
                let dp = (0.5 * mb * mb * (1.0 - r2) - 0.5 * kv * kv) * (1.0 - r2).exp();
                PrimitiveState::new(
                    1.0,
                    [1.0 - kv * y * e, 1.0 + kv * x * e, 0.0],
                    1.0 + dp,
                    [-mb * y * e, mb * x * e, 0.0],
                )
            }
            ProblemName::BrioWu => {
                if x < 0.0 {
                    PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0])
                } else {
                    PrimitiveState::new(0.125, [0.0; 3], 0.1, [0.75, -1.0, 0.0])
                }
            }
            ProblemName::RsTube => {
                let (s, c) = RSTUBE_ANGLE.sin_cos();
                let b0 = 5.0 / (4.0 * PI).sqrt();
                let (bpar, bperp) = (b0, b0);
                let b = [bperp * c - bpar * s, bperp * s + bpar * c, 0.0];
                if x + y < 0.0 {
                    PrimitiveState::new(1.0, [10.0 * c, 10.0 * s, 0.0], 20.0, b)
                } else {
                    PrimitiveState::new(1.0, [-10.0 * c, -10.0 * s, 0.0], 1.0, b)
                }
            }
            ProblemName::Ot => {
                let tp = 2.0 * PI;
                let b0 = 1.0 / (4.0 * PI).sqrt();
                PrimitiveState::new(
                    25.0 / (36.0 * PI),
                    [-(tp * y).sin(), (tp * x).sin(), 0.0],
                    5.0 / (12.0 * PI),
                    [-b0 * (tp * y).sin(), b0 * (2.0 * tp * x).sin(), 0.0],
                )
            }
            ProblemName::Rotor => {
                let (dx, dy) = (x - 0.5, y - 0.5);
                let r = (dx * dx + dy * dy).sqrt();
                let b = [5.0 / (4.0 * PI).sqrt(), 0.0, 0.0];
                let (rho, v) = if r < ROTOR_R0 {
                    (10.0, [-ROTOR_U0 / ROTOR_R0 * dy, ROTOR_U0 / ROTOR_R0 * dx, 0.0])
                } else if r < ROTOR_R1 {
                    let f = (ROTOR_R1 - r) / (ROTOR_R1 - ROTOR_R0);
                    (1.0 + 9.0 * f, [-f * ROTOR_U0 / r * dy, f * ROTOR_U0 / r * dx, 0.0])
                } else {
                    (1.0, [0.0; 3])
                };
                PrimitiveState::new(rho, v, 1.0, b)
            }
            ProblemName::Loop => {
                let r = (x * x + y * y).sqrt();
                let b = if r < LOOP_R0 && r > 0.0 {
                    [-LOOP_A0 * y / r, LOOP_A0 * x / r, 0.0]
                } else {
                    [0.0; 3]
                };
                PrimitiveState::new(1.0, [2.0, 1.0, 0.0], 1.0, b)
            }
            ProblemName::Blast => {
                let r2 = (x - 0.5).powi(2) + (y - 0.5).powi(2);
                let p = if r2 < 0.01 { 1000.0 } else { 0.1 };
                PrimitiveState::new(1.0, [0.0; 3], p, [100.0 / (4.0 * PI).sqrt(), 0.0, 0.0])
            }
        }
    }

    /// Magnetic potential ψ with B_x = ∂ψ/∂y, B_y = -∂ψ/∂x, for the
    /// potential-initialized cases.
    pub fn psi(&self, x: f64, y: f64) -> Option<f64> {
        match self.name {
            ProblemName::Alfven => {
                let (zeta, eta) = alfven_frame(x, y);
                Some(eta + ALFVEN_AMP / (2.0 * PI) * (2.0 * PI * zeta).cos())
            }
            ProblemName::Vortex => {
                Some(VORTEX_MU / (2.0 * PI) * (0.5 * (1.0 - x * x - y * y)).exp())
            }
            ProblemName::Ot => {
                let b0 = 1.0 / (4.0 * PI).sqrt();
                Some(b0 * ((2.0 * PI * y).cos() / (2.0 * PI) + (4.0 * PI * x).cos() / (4.0 * PI)))
            }
            ProblemName::Loop => {
                let r = (x * x + y * y).sqrt();
                Some(LOOP_A0 * (LOOP_R0 - r).max(0.0))
            }
            _ => None,
        }
    }

    /// Analytic gradient (∂ψ/∂x, ∂ψ/∂y), used to check the potential
    /// against the field of [`ProblemSpec::primitive`].
    pub fn psi_gradient(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        match self.name {
            ProblemName::Alfven => {
                let (zeta, _) = alfven_frame(x, y);
                let (s, c) = ALFVEN_ANGLE.sin_cos();
                let g = -ALFVEN_AMP * (2.0 * PI * zeta).sin();
                Some((-s + g * c, c + g * s))
            }
            ProblemName::Vortex => {
                let e = VORTEX_MU / (2.0 * PI) * (0.5 * (1.0 - x * x - y * y)).exp();
                Some((-x * e, -y * e))
            }
            ProblemName::Ot => {
                let b0 = 1.0 / (4.0 * PI).sqrt();
                Some((-b0 * (4.0 * PI * x).sin(), -b0 * (2.0 * PI * y).sin()))
            }
            ProblemName::Loop => {
                let r = (x * x + y * y).sqrt();
                if r < LOOP_R0 && r > 0.0 {
                    Some((-LOOP_A0 * x / r, -LOOP_A0 * y / r))
                } else {
                    Some((0.0, 0.0))
                }
            }
            _ => None,
        }
    }

    pub fn has_exact_solution(&self) -> bool {
        matches!(self.name, ProblemName::Alfven | ProblemName::Vortex | ProblemName::Loop)
    }

    /// Exact conserved state at (x, y, t) where one is known: the Alfvén
    /// wave travels along -ζ at unit speed, the vortex and the loop are
    /// advected with the background flow.
    pub fn exact(&self, x: f64, y: f64, t: f64) -> Option<[f64; NVARS]> {
        let d = self.domain;
        let wrap = |v: f64, lo: f64, hi: f64| lo + (v - lo).rem_euclid(hi - lo);
        let w = match self.name {
            ProblemName::Alfven => {
                let (s, c) = ALFVEN_ANGLE.sin_cos();
                // Shift by t along the propagation direction (cos α, sin α).
                let (xs, ys) = (x + t * c, y + t * s);
                self.primitive(wrap(xs, d.xmin, d.xmax), wrap(ys, d.ymin, d.ymax))
            }
            ProblemName::Vortex => self.primitive(wrap(x - t, d.xmin, d.xmax), wrap(y - t, d.ymin, d.ymax)),
            ProblemName::Loop => self.primitive(wrap(x - 2.0 * t, d.xmin, d.xmax), wrap(y - t, d.ymin, d.ymax)),
            _ => return None,
        };
        Some(to_conserved(&w, self.gamma).0)
    }

    /// Projected initial state on `grid` at degree `k`. Potential-based
    /// fields are checked against the analytic field before projection and
    /// every initial field is checked for zero divergence afterwards.
    pub fn initialize(&self, grid: &Grid, k: usize) -> Result<SolutionDofs> {
        let gamma = self.gamma;
        let hydro = project_hydro(grid, k, |x, y| hydro_part(&to_conserved(&self.primitive(x, y), gamma).0))?;
        let (faces, moments) = match self.magnetic {
            MagneticInit::Potential => {
                self.check_potential(grid, k)?;
                let samples = sample_potential(grid, k, |x, y| self.psi(x, y).expect("potential case"))?;
                project_initial(grid, k, &samples)?
            }
            MagneticInit::Field => project_field(grid, k, |x, y| {
                let b = self.primitive(x, y).b;
                (b[0], b[1])
            })?,
        };
        let u = SolutionDofs::from_parts(grid, k, hydro, faces, moments)?;
        let scale = field_scale(&u);
        for (c, rt) in u.rt.iter().enumerate() {
            let d = rt.divergence_l2(grid.dx, grid.dy) * grid.dx.min(grid.dy);
            if d > 1e-12 * scale {
                return Err(MhdError::Data(format!(
                    "{}: initial field is not divergence-free in cell {c} (residual {d:e})",
                    self.name
                )));
            }
        }
        Ok(u)
    }

    /// Compare (∂ψ/∂y, -∂ψ/∂x) with the field of `primitive` at the GLL
    /// nodes of every cell.
    pub fn check_potential(&self, grid: &Grid, k: usize) -> Result<()> {
        let q = gauss_lobatto(k + 2)?;
        for c in 0..grid.n_cells() {
            let (i, j) = grid.cell_ij(c);
            for &xi in &q.nodes {
                for &eta in &q.nodes {
                    let (x, y) = grid.to_physical(i, j, xi, eta);
                    let Some((px, py)) = self.psi_gradient(x, y) else {
                        return Err(MhdError::Data(format!("{} has no magnetic potential", self.name)));
                    };
                    let b = self.primitive(x, y).b;
                    let err = (py - b[0]).abs().max((-px - b[1]).abs());
                    if err > 1e-12 * (1.0 + b[0].abs().max(b[1].abs())) {
                        return Err(MhdError::Data(format!(
                            "{}: potential does not reproduce the field at ({x}, {y}), error {err:e}",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Largest |cell-mean B| (at least 1), for relative tolerances.
fn field_scale(u: &SolutionDofs) -> f64 {
    u.rt.iter()
        .map(|rt| rt.a(0, 0).abs().max(rt.b(0, 0).abs()))
        .fold(1.0f64, f64::max)
}

/// Error of `u` against the exact solution at time `t`, per conserved
/// variable, using (k+2)² Gauss points per cell.
pub fn exact_error(u: &SolutionDofs, grid: &Grid, spec: &ProblemSpec, t: f64, norm: ErrorNorm) -> Result<[f64; NVARS]> {
    if !spec.has_exact_solution() {
        return Err(MhdError::NoExactSolution(spec.name.to_string()));
    }
    error_against(u, grid, norm, |x, y| spec.exact(x, y, t).expect("checked above"))
}

/// Error of `u` against an arbitrary pointwise reference.
pub fn error_against(
    u: &SolutionDofs,
    grid: &Grid,
    norm: ErrorNorm,
    reference: impl Fn(f64, f64) -> [f64; NVARS],
) -> Result<[f64; NVARS]> {
    let q = gauss_legendre(u.k + 2)?;
    let mut acc = [0.0; NVARS];
    let area = grid.dx * grid.dy;
    for c in 0..grid.n_cells() {
        let (i, j) = grid.cell_ij(c);
        for (&xi, &wx) in q.nodes.iter().zip(&q.weights) {
            for (&eta, &wy) in q.nodes.iter().zip(&q.weights) {
                let (x, y) = grid.to_physical(i, j, xi, eta);
                let num = u.eval(c, xi, eta);
                let ex = reference(x, y);
                for v in 0..NVARS {
                    let e = (num[v] - ex[v]).abs();
                    match norm {
                        ErrorNorm::L1 => acc[v] += wx * wy * area * e,
                        ErrorNorm::L2 => acc[v] += wx * wy * area * e * e,
                        ErrorNorm::Linf => acc[v] = acc[v].max(e),
                    }
                }
            }
        }
    }
    if norm == ErrorNorm::L2 {
        acc = acc.map(f64::sqrt);
    }
    Ok(acc)
}

/// Parallel and perpendicular field along the rotated shock tube's
/// normal, (B_∥, B_⊥) = (-B_x sin α + B_y cos α, B_x cos α + B_y sin α).
pub fn rstube_components(u: &[f64; NVARS]) -> (f64, f64) {
    let (s, c) = RSTUBE_ANGLE.sin_cos();
    (-u[BX] * s + u[BY] * c, u[BX] * c + u[BY] * s)
}

/// Exact value of both rotated components in the rotated shock tube.
pub fn rstube_field_value() -> f64 {
    5.0 / (4.0 * PI).sqrt()
}
