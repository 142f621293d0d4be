//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use proptest::prelude::*;
use rtdg_mhd::dg::{hydro_part, Scheme, SolutionDofs};
use rtdg_mhd::grid::{Boundary, Domain, Grid};
use rtdg_mhd::physics::{flux, to_conserved, ConservedState, Direction, EigenSystem, PrimitiveState, NVARS};
use rtdg_mhd::riemann::FluxKind;
use rtdg_mhd::rt_field::{project_initial, sample_potential};

pub const GAMMA: f64 = 5.0 / 3.0;

/// A physically admissible primitive state with moderate ratios.
pub fn primitive() -> impl Strategy<Value = PrimitiveState> {
    (
        0.1f64..10.0,
        prop::array::uniform3(-3.0f64..3.0),
        0.1f64..10.0,
        prop::array::uniform3(-3.0f64..3.0),
    )
        .prop_map(|(rho, v, p, b)| PrimitiveState::new(rho, v, p, b))
}

pub fn conserved() -> impl Strategy<Value = ConservedState> {
    primitive().prop_map(|w| to_conserved(&w, GAMMA))
}

/// Coefficients of a smooth periodic perturbation on the unit square.
#[derive(Debug, Clone, Copy)]
pub struct Smooth {
    pub amp: [f64; 8],
    pub phase: [f64; 8],
}

pub fn smooth() -> impl Strategy<Value = Smooth> {
    (prop::array::uniform8(-1.0f64..1.0), prop::array::uniform8(0.0f64..2.0 * PI))
        .prop_map(|(amp, phase)| Smooth { amp, phase })
}

impl Smooth {
    fn mode(v: usize) -> (f64, f64) {
        [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)][v % 4]
    }

    fn wave(&self, v: usize, x: f64, y: f64) -> f64 {
        let (mx, my) = Self::mode(v);
        self.amp[v] * (2.0 * PI * (mx * x + my * y) + self.phase[v]).sin()
    }

    /// Gradient of [`Smooth::wave`].
    fn wave_gradient(&self, v: usize, x: f64, y: f64) -> (f64, f64) {
        let (mx, my) = Self::mode(v);
        let d = self.amp[v] * 2.0 * PI * (2.0 * PI * (mx * x + my * y) + self.phase[v]).cos();
        (d * mx, d * my)
    }

    /// Admissible primitive state at (x, y).
    pub fn state(&self, x: f64, y: f64) -> [f64; 8] {
        let rho = 1.0 + 0.3 * self.wave(0, x, y);
        let v = [0.5 * self.wave(1, x, y), 0.5 * self.wave(2, x, y), 0.3 * self.wave(3, x, y)];
        let p = 1.0 + 0.3 * self.wave(4, x, y);
        let (bx, by) = self.field(x, y);
        let bz = 0.4 * self.wave(5, x, y);
        to_conserved(&PrimitiveState::new(rho, v, p, [bx, by, bz]), GAMMA).0
    }

    /// In-plane field (∂ψ/∂y, −∂ψ/∂x).
    pub fn field(&self, x: f64, y: f64) -> (f64, f64) {
        let (ax, ay) = self.wave_gradient(6, x, y);
        let (bx, by) = self.wave_gradient(7, x, y);
        (0.05 * (ay + by), -0.05 * (ax + bx))
    }

    /// Periodic magnetic potential.
    pub fn psi(&self, x: f64, y: f64) -> f64 {
        0.05 * (self.wave(6, x, y) + self.wave(7, x, y))
    }
}

pub fn periodic_grid(nx: usize, ny: usize) -> Grid {
    Grid::build(Domain::new(0.0, 1.0, 0.0, 1.0), nx, ny, Boundary::Periodic, Boundary::Periodic).unwrap()
}

/// Smooth data projected on a periodic grid. The in-plane field comes from
/// the potential, so it is divergence-free.
pub fn smooth_solution(grid: &Grid, k: usize, s: &Smooth) -> SolutionDofs {
    let scheme = Scheme::new(grid.clone(), k, GAMMA, FluxKind::Hll).unwrap();
    let hydro = scheme.project_hydro(|x, y| hydro_part(&s.state(x, y))).unwrap();
    let samples = sample_potential(grid, k, |x, y| s.psi(x, y)).unwrap();
    let (faces, moments) = project_initial(grid, k, &samples).unwrap();
    SolutionDofs::from_parts(grid, k, hydro, faces, moments).unwrap()
}

/// Largest absolute difference between two solutions' stored data.
pub fn max_dof_difference(a: &SolutionDofs, b: &SolutionDofs) -> f64 {
    let hydro = a
        .hydro
        .iter()
        .flatten()
        .zip(b.hydro.iter().flatten())
        .map(|(x, y)| (x - y).abs());
    let field = [
        (&a.faces.bx, &b.faces.bx),
        (&a.faces.by, &b.faces.by),
        (&a.moments.alpha, &b.moments.alpha),
        (&a.moments.beta, &b.moments.beta),
    ]
    .into_iter()
    .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).abs()));
    hydro.chain(field).fold(0.0, f64::max)
}

pub fn lr_error(e: &EigenSystem) -> f64 {
    let mut worst = 0.0f64;
    for w in 0..NVARS {
        for j in 0..NVARS {
            let v: f64 = (0..NVARS).map(|m| e.l[w][m] * e.r[m][j]).sum();
            worst = worst.max((v - if w == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

/// Central-difference flux Jacobian, `a[i][m] = ∂f_i/∂u_m`.
pub fn fd_jacobian(u: &ConservedState, dir: Direction) -> [[f64; NVARS]; NVARS] {
    let mut a = [[0.0; NVARS]; NVARS];
    for m in 0..NVARS {
        let h = 1e-6 * u.0[m].abs().max(1.0);
        let mut up = u.0;
        let mut dn = u.0;
        up[m] += h;
        dn[m] -= h;
        let fp = flux(&ConservedState(up), GAMMA, dir).unwrap();
        let fm = flux(&ConservedState(dn), GAMMA, dir).unwrap();
        for i in 0..NVARS {
            a[i][m] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    a
}

/// Worst relative residual of A r_w = λ_w r_w over every wave except the
/// divergence mode (the fifth), which the conservative flux does not carry.
pub fn diagonalization_error(u: &ConservedState, e: &EigenSystem, dir: Direction) -> f64 {
    let a = fd_jacobian(u, dir);
    let lmax = e.lambda.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let mut worst = 0.0f64;
    for w in (0..NVARS).filter(|&w| w != 4) {
        let rmax = (0..NVARS).fold(0.0f64, |m, i| m.max(e.r[i][w].abs()));
        for i in 0..NVARS {
            let ar: f64 = (0..NVARS).map(|m| a[i][m] * e.r[m][w]).sum();
            worst = worst.max((ar - e.lambda[w] * e.r[i][w]).abs() / (lmax * rmax.max(1.0)));
        }
    }
    worst
}

/// A steep but smooth two-state profile across x = x0 on an outflow grid,
/// with the in-plane field from the matching potential.
pub fn jump_solution(k: usize, nx: usize, x0: f64, left: PrimitiveState, right: PrimitiveState) -> (Grid, SolutionDofs) {
    let grid = Grid::build(Domain::new(0.0, 1.0, 0.0, 0.25), nx, 4, Boundary::Outflow, Boundary::Periodic).unwrap();
    let width = 0.02;
    let h = |x: f64| 0.5 * (1.0 + ((x - x0) / width).tanh());
    // ∫ h dx, written to stay finite far from x0.
    let int_h = |x: f64| {
        let z = (x - x0) / width;
        0.5 * (x - x0) + 0.5 * width * (z.abs() + (-2.0 * z.abs()).exp().ln_1p() - std::f64::consts::LN_2)
    };
    let bx = left.b[0];
    let (byl, byr) = (left.b[1], right.b[1]);
    let mix = |a: f64, b: f64, x: f64| a + (b - a) * h(x);
    let state = move |x: f64, _y: f64| {
        let w = PrimitiveState::new(
            mix(left.rho, right.rho, x),
            std::array::from_fn(|i| mix(left.v[i], right.v[i], x)),
            mix(left.p, right.p, x),
            [bx, mix(byl, byr, x), mix(left.b[2], right.b[2], x)],
        );
        hydro_part(&to_conserved(&w, GAMMA).0)
    };
    let scheme = Scheme::new(grid.clone(), k, GAMMA, FluxKind::Hll).unwrap();
    let hydro = scheme.project_hydro(state).unwrap();
    let psi = |x: f64, y: f64| bx * y - (byl * (x - x0) + (byr - byl) * int_h(x));
    let samples = sample_potential(&grid, k, psi).unwrap();
    let (faces, moments) = project_initial(&grid, k, &samples).unwrap();
    let u = SolutionDofs::from_parts(&grid, k, hydro, faces, moments).unwrap();
    (grid, u)
}

pub fn jump_state() -> impl Strategy<Value = PrimitiveState> {
    (0.2f64..2.0, prop::array::uniform3(-0.5f64..0.5), 0.2f64..2.0, prop::array::uniform3(-1.0f64..1.0))
        .prop_map(|(rho, v, p, b)| PrimitiveState::new(rho, v, p, b))
}
