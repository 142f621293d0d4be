//! Post-processing applied after every Runge-Kutta stage.
//!
//! The chain is:
//!
//! 1. characteristic TVB limiting of the linear modes of marked cells, which
//!    also flattens their reconstructed magnetic field;
//! 2. minmod limiting of the higher modes of face polynomials touching
//!    limited cells, against the traces of the limited cell fields;
//! 3. divergence-free reconstruction of the cell moments from the (limited)
//!    face polynomials in every cell whose field is no longer consistent;
//!
//! followed by the positivity scaling of [`positivity_limit`].

use crate::basis::{gauss_legendre, MASS};
use crate::dg::{scale_b, SolutionDofs, HYDRO_COMPONENTS, NHYDRO};
use crate::error::{MhdError, Result};
use crate::grid::Grid;
use crate::physics::{self, pressure, ConservedState, BX, BY, EN, MX, MY, MZ, NVARS, RHO};
use crate::rt_field::{self, alpha_index, beta_index, n_moments, Side};

/// Which cells Step 1 examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Indicator {
    /// Every cell.
    AllCells,
    /// Cells whose density or energy polynomial carries a large share of its
    /// energy in the top-degree modes, or which sit next to a large jump in
    /// cell means.
    #[default]
    ModalDecay,
}

impl std::str::FromStr for Indicator {
    type Err = MhdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-cells" => Ok(Indicator::AllCells),
            "modal-decay" => Ok(Indicator::ModalDecay),
            other => Err(MhdError::Config(format!(
                "unknown indicator `{other}` (valid: all-cells, modal-decay)"
            ))),
        }
    }
}

impl std::fmt::Display for Indicator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Indicator::AllCells => "all-cells",
            Indicator::ModalDecay => "modal-decay",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    /// Run Steps 1-3.
    pub enabled: bool,
    /// Slope amplification β ∈ [1, 2].
    pub beta: f64,
    /// TVB constants; the minmod threshold is M Δ².
    pub m_x: f64,
    pub m_y: f64,
    pub indicator: Indicator,
    pub positivity: bool,
    pub pressure_floor: f64,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        LimiterConfig {
            enabled: false,
            beta: 1.0,
            m_x: 0.0,
            m_y: 0.0,
            indicator: Indicator::ModalDecay,
            positivity: false,
            pressure_floor: 1e-12,
        }
    }
}

impl LimiterConfig {
    /// TVD chain on, positivity off.
    pub fn tvd() -> Self {
        LimiterConfig {
            enabled: true,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1.0..=2.0).contains(&self.beta) {
            return Err(MhdError::Config(format!("limiter beta must lie in [1, 2], got {}", self.beta)));
        }
        if !(self.m_x >= 0.0 && self.m_y >= 0.0) {
            return Err(MhdError::Config("TVB constants must be non-negative".into()));
        }
        if !(self.pressure_floor > 0.0 && self.pressure_floor.is_finite()) {
            return Err(MhdError::Config(format!(
                "pressure floor must be positive, got {}",
                self.pressure_floor
            )));
        }
        Ok(())
    }
}

/// The fourth-order repair needs one piece of interior information, a curl
/// estimate ω = b₁₀ − a₀₁ taken from the limited cell field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurlDatum {
    pub omega: f64,
}

/// What the chain did in one application.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LimiterReport {
    pub marked: usize,
    /// Cells changed by Step 1.
    pub limited_cells: Vec<usize>,
    /// Faces changed by Step 2 (vertical, horizontal).
    pub changed_vfaces: usize,
    pub changed_hfaces: usize,
    /// Cells whose moments were rebuilt by Step 3.
    pub repaired_cells: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PositivityReport {
    /// Cells whose polynomials were scaled.
    pub scaled_cells: usize,
    /// Cell means whose pressure (or density) had to be reset.
    pub floor_events: usize,
}

/// `minmod(a, b, c, δ)`: `a` when |a| < δ, the smallest magnitude when all
/// three signs agree, zero otherwise.
#[inline]
pub fn minmod(a: f64, b: f64, c: f64, delta: f64) -> f64 {
    if a.abs() < delta {
        return a;
    }
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Threshold on the top-mode energy fraction.
pub fn indicator_threshold(k: usize) -> f64 {
    1e-3 / ((k + 1) as f64).powi(4)
}

/// Relative jump in a cell mean that always marks both cells.
const JUMP_FRACTION: f64 = 0.1;

fn top_mode_fraction(u: &SolutionDofs, c: usize, comp: usize) -> f64 {
    let k = u.k;
    let h = u.hydro_cell(c);
    let mut total = 0.0;
    let mut top = 0.0;
    for i in 0..=k {
        for j in 0..=k {
            let e = MASS[i] * MASS[j] * h[i * (k + 1) + j][comp].powi(2);
            total += e;
            if i.max(j) == k {
                top += e;
            }
        }
    }
    if total > 0.0 {
        top / total
    } else {
        0.0
    }
}

/// Troubled-cell flag for one cell.
pub fn indicator(u: &SolutionDofs, grid: &Grid, cfg: &LimiterConfig, c: usize) -> bool {
    match cfg.indicator {
        Indicator::AllCells => true,
        Indicator::ModalDecay => {
            if u.k == 0 {
                return false;
            }
            let tau = indicator_threshold(u.k);
            // Density and energy live at hydro slots 0 and 4.
            for comp in [0, 4] {
                if top_mode_fraction(u, c, comp) > tau {
                    return true;
                }
            }
            let (i, j) = grid.cell_ij(c);
            let (w, e) = grid.neighbors_x(i, j);
            let (s, n) = grid.neighbors_y(i, j);
            let nm = u.n_modes();
            let own = u.hydro[c * nm];
            for nb in [w, e, s, n] {
                let other = u.hydro[nb * nm];
                for comp in [0, 4] {
                    let scale = own[comp].abs().max(other[comp].abs());
                    if (own[comp] - other[comp]).abs() > JUMP_FRACTION * scale {
                        return true;
                    }
                }
            }
            false
        }
    }
}

pub fn mark_cells(u: &SolutionDofs, grid: &Grid, cfg: &LimiterConfig) -> Vec<bool> {
    (0..grid.n_cells()).map(|c| indicator(u, grid, cfg, c)).collect()
}

/// Slope vector in canonical ordering: hydro mode `mode` plus the given
/// in-plane field coefficients.
#[inline]
fn slope_vector(h: &[f64; NHYDRO], bx: f64, by: f64) -> [f64; NVARS] {
    let mut s = [0.0; NVARS];
    for (v, &comp) in HYDRO_COMPONENTS.iter().enumerate() {
        s[comp] = h[v];
    }
    s[BX] = bx;
    s[BY] = by;
    s
}

fn mean_vector(u: &SolutionDofs, c: usize) -> [f64; NVARS] {
    u.mean_state(c)
}

/// Step 1. Limits the linear part of each marked cell in characteristic
/// variables. Changed cells keep their means, get the limited slopes and
/// lose every higher mode of ŵ and of the reconstructed field. Only
/// `u.hydro` and `u.rt` are touched. Returns per-cell activity flags.
pub fn limit_cells(
    u: &mut SolutionDofs,
    grid: &Grid,
    gamma: f64,
    cfg: &LimiterConfig,
    marked: &[bool],
) -> Result<Vec<bool>> {
    let k = u.k;
    let n = grid.n_cells();
    let mut active = vec![false; n];
    if k == 0 {
        return Ok(active);
    }
    let means: Vec<[f64; NVARS]> = (0..n).map(|c| mean_vector(u, c)).collect();
    let nm = u.n_modes();
    let dx_delta = cfg.m_x * grid.dx * grid.dx;
    let dy_delta = cfg.m_y * grid.dy * grid.dy;
    let mut updates = Vec::new();
    for c in 0..n {
        if !marked[c] {
            continue;
        }
        let (i, j) = grid.cell_ij(c);
        let (cw, ce) = grid.neighbors_x(i, j);
        let (cs, cn) = grid.neighbors_y(i, j);
        let m = &means[c];
        let rt = &u.rt[c];
        let ux = slope_vector(&u.hydro[c * nm + k + 1], rt.a(1, 0), rt.b(1, 0));
        let uy = slope_vector(&u.hydro[c * nm + 1], rt.a(0, 1), rt.b(0, 1));
        let state = ConservedState(*m);
        if !physics::is_admissible(m, gamma) {
            // No eigenvectors exist; the cell drops to its mean and the
            // positivity stage deals with the mean itself.
            updates.push((c, [0.0; NVARS], [0.0; NVARS]));
            continue;
        }
        let ex = physics::eigensystem_x(&state, gamma).map_err(|e| e.at(format!("limiter, cell {c}")))?;
        let ey = physics::eigensystem_y(&state, gamma).map_err(|e| e.at(format!("limiter, cell {c}")))?;
        let diff = |a: &[f64; NVARS], b: &[f64; NVARS]| -> [f64; NVARS] { std::array::from_fn(|v| a[v] - b[v]) };
        let limit = |eig: &physics::EigenSystem,
                     s: &[f64; NVARS],
                     minus: [f64; NVARS],
                     plus: [f64; NVARS],
                     delta: f64|
         -> Option<[f64; NVARS]> {
            let w = eig.to_characteristic(s);
            let wm = eig.to_characteristic(&minus);
            let wp = eig.to_characteristic(&plus);
            let lim: [f64; NVARS] =
                std::array::from_fn(|v| minmod(w[v], cfg.beta * wm[v], cfg.beta * wp[v], delta));
            if lim == w {
                None
            } else {
                Some(eig.from_characteristic(&lim))
            }
        };
        let lx = limit(&ex, &ux, diff(m, &means[cw]), diff(&means[ce], m), dx_delta);
        let ly = limit(&ey, &uy, diff(m, &means[cs]), diff(&means[cn], m), dy_delta);
        if lx.is_none() && ly.is_none() {
            continue;
        }
        updates.push((c, lx.unwrap_or(ux), ly.unwrap_or(uy)));
    }
    for (c, sx, sy) in updates {
        active[c] = true;
        let h = u.hydro_cell_mut(c);
        for (mode, slot) in h.iter_mut().enumerate().skip(1) {
            if mode == k + 1 {
                *slot = HYDRO_COMPONENTS.map(|comp| sx[comp]);
            } else if mode == 1 {
                *slot = HYDRO_COMPONENTS.map(|comp| sy[comp]);
            } else {
                *slot = [0.0; NHYDRO];
            }
        }
        let rt = &mut u.rt[c];
        let (a00, b00) = (rt.a(0, 0), rt.b(0, 0));
        rt.a_slice_mut().fill(0.0);
        rt.b_slice_mut().fill(0.0);
        *rt.a_mut(0, 0) = a00;
        *rt.b_mut(0, 0) = b00;
        *rt.a_mut(1, 0) = sx[BX];
        *rt.b_mut(1, 0) = sx[BY];
        *rt.a_mut(0, 1) = sy[BX];
        *rt.b_mut(0, 1) = sy[BY];
    }
    Ok(active)
}

/// Step 2. Minmod-limits modes 1..k of the faces bordering an active cell
/// against the traces of the (limited) cell fields on both sides. A side
/// whose cell is inactive contributes the face polynomial itself. Returns
/// (changed vertical faces, changed horizontal faces).
pub fn limit_faces(u: &mut SolutionDofs, grid: &Grid, cfg: &LimiterConfig, active: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let k = u.k;
    let mut vchanged = vec![false; grid.n_vfaces()];
    let mut hchanged = vec![false; grid.n_hfaces()];
    if k == 0 {
        return (vchanged, hchanged);
    }
    for fj in 0..grid.ny {
        for fi in 0..grid.vcols() {
            let [l, r] = grid.vface_cells(fi, fj);
            if !active[l.cell] && !active[r.cell] {
                continue;
            }
            let f = grid.vface(fi, fj);
            let side = |cp: crate::grid::CellPoint| if cp.xi > 0.0 { Side::East } else { Side::West };
            let face: Vec<f64> = u.faces.bx_face(f).to_vec();
            let tl = if active[l.cell] { u.rt[l.cell].trace(side(l)) } else { to4(&face) };
            let tr = if active[r.cell] { u.rt[r.cell].trace(side(r)) } else { to4(&face) };
            for jm in 1..=k {
                let new = minmod(face[jm], cfg.beta * tl[jm], cfg.beta * tr[jm], 0.0);
                if new != face[jm] {
                    u.faces.bx[f * (k + 1) + jm] = new;
                    vchanged[f] = true;
                }
            }
        }
    }
    for fj in 0..grid.hrows() {
        for fi in 0..grid.nx {
            let [b, t] = grid.hface_cells(fi, fj);
            if !active[b.cell] && !active[t.cell] {
                continue;
            }
            let f = grid.hface(fi, fj);
            let side = |cp: crate::grid::CellPoint| if cp.eta > 0.0 { Side::North } else { Side::South };
            let face: Vec<f64> = u.faces.by_face(f).to_vec();
            let tb = if active[b.cell] { u.rt[b.cell].trace(side(b)) } else { to4(&face) };
            let tt = if active[t.cell] { u.rt[t.cell].trace(side(t)) } else { to4(&face) };
            for im in 1..=k {
                let new = minmod(face[im], cfg.beta * tb[im], cfg.beta * tt[im], 0.0);
                if new != face[im] {
                    u.faces.by[f * (k + 1) + im] = new;
                    hchanged[f] = true;
                }
            }
        }
    }
    (vchanged, hchanged)
}

fn to4(v: &[f64]) -> [f64; 4] {
    let mut out = [0.0; 4];
    out[..v.len()].copy_from_slice(v);
    out
}

/// Divergence-free cell moments from the face polynomials of one cell
/// (west/east `bxm`/`bxp`, south/north `bym`/`byp`) and, at k = 3, the
/// curl datum. Returns (α, β) in the layout of [`rt_field::alpha_index`].
pub fn divfree_repair(
    k: usize,
    bxm: &[f64],
    bxp: &[f64],
    bym: &[f64],
    byp: &[f64],
    omega: CurlDatum,
    dx: f64,
    dy: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(1..=3).contains(&k) {
        return Err(MhdError::Domain(format!(
            "divergence-free repair is defined for k = 1, 2, 3, got {k}"
        )));
    }
    for f in [bxm, bxp, bym, byp] {
        if f.len() != k + 1 {
            return Err(MhdError::Domain(format!("face polynomial length must be {}", k + 1)));
        }
    }
    let nmom = n_moments(k);
    let mut alpha = vec![0.0; nmom];
    let mut beta = vec![0.0; nmom];
    let (am, ap, bm, bp) = (bxm, bxp, bym, byp);
    let rxy = dx / dy;
    let ryx = dy / dx;
    let mut set_a = |i: usize, j: usize, v: f64| alpha[alpha_index(k, i, j)] = v;
    let mut set_b_fns: Vec<(usize, usize, f64)> = Vec::new();

    // Linear terms.
    set_a(0, 0, 0.5 * (am[0] + ap[0]) + (bp[1] - bm[1]) * rxy / 12.0);
    set_b_fns.push((0, 0, 0.5 * (bm[0] + bp[0]) + (ap[1] - am[1]) * ryx / 12.0));
    match k {
        1 => {
            set_a(0, 1, 0.5 * (am[1] + ap[1]));
            set_b_fns.push((1, 0, 0.5 * (bm[1] + bp[1])));
        }
        2 => {
            set_a(1, 0, ap[0] - am[0] + (bp[2] - bm[2]) * rxy / 30.0);
            set_b_fns.push((0, 1, bp[0] - bm[0] + (ap[2] - am[2]) * ryx / 30.0));
            set_a(0, 1, 0.5 * (am[1] + ap[1]));
            set_b_fns.push((1, 0, 0.5 * (bm[1] + bp[1])));
            set_a(0, 2, 0.5 * (am[2] + ap[2]));
            set_a(1, 1, ap[1] - am[1]);
            set_b_fns.push((2, 0, 0.5 * (bm[2] + bp[2])));
            set_b_fns.push((1, 1, bp[1] - bm[1]));
            set_a(1, 2, ap[2] - am[2]);
            set_b_fns.push((2, 1, bp[2] - bm[2]));
        }
        3 => {
            let w = omega.omega;
            set_a(1, 0, ap[0] - am[0] + (bp[2] - bm[2]) * rxy / 30.0);
            set_b_fns.push((0, 1, bp[0] - bm[0] + (ap[2] - am[2]) * ryx / 30.0));
            let r1 = 0.5 * (am[1] + ap[1]);
            let r2 = 0.5 * (bm[1] + bp[1]);
            let a01 = (r2 - w + r1 * ryx) / (1.0 + ryx);
            let b10 = w + a01;
            set_a(0, 1, a01);
            set_b_fns.push((1, 0, b10));
            set_a(2, 0, -0.5 * (bp[1] - bm[1]) * rxy + 3.0 / 140.0 * (bp[3] - bm[3]) * rxy);
            set_b_fns.push((0, 2, -0.5 * (ap[1] - am[1]) * ryx + 3.0 / 140.0 * (ap[3] - am[3]) * ryx));
            set_a(0, 2, 0.5 * (am[2] + ap[2]));
            set_a(1, 1, ap[1] - am[1]);
            set_b_fns.push((2, 0, 0.5 * (bm[2] + bp[2])));
            set_b_fns.push((1, 1, bp[1] - bm[1]));
            set_a(1, 2, ap[2] - am[2]);
            set_a(0, 3, 0.5 * (ap[3] + am[3]));
            set_a(2, 1, 6.0 * (r1 - a01));
            set_a(1, 3, ap[3] - am[3]);
            set_a(2, 2, 0.0);
            set_a(2, 3, 0.0);
            set_b_fns.push((2, 1, bp[2] - bm[2]));
            set_b_fns.push((1, 2, 6.0 * (r2 - b10)));
            set_b_fns.push((3, 0, 0.5 * (bp[3] + bm[3])));
            set_b_fns.push((2, 2, 0.0));
            set_b_fns.push((3, 1, bp[3] - bm[3]));
            set_b_fns.push((3, 2, 0.0));
        }
        _ => unreachable!(),
    }
    for (i, j, v) in set_b_fns {
        beta[beta_index(k, i, j)] = v;
    }
    Ok((alpha, beta))
}

/// Step 3 on a set of cells: rebuild moments and the RT cache.
pub fn repair_cells(u: &mut SolutionDofs, grid: &Grid, cells: &[usize]) -> Result<()> {
    let k = u.k;
    if k == 0 {
        return Ok(());
    }
    for &c in cells {
        let (i, j) = grid.cell_ij(c);
        let cf = grid.cell_faces(i, j);
        let rt = &u.rt[c];
        let omega = CurlDatum {
            omega: rt.b(1, 0) - rt.a(0, 1),
        };
        let (alpha, beta) = divfree_repair(
            k,
            u.faces.bx_face(cf.west),
            u.faces.bx_face(cf.east),
            u.faces.by_face(cf.south),
            u.faces.by_face(cf.north),
            omega,
            grid.dx,
            grid.dy,
        )?;
        u.moments.alpha_cell_mut(c).copy_from_slice(&alpha);
        u.moments.beta_cell_mut(c).copy_from_slice(&beta);
        u.rt[c] = rt_field::reconstruct_cell(grid, &u.faces, &u.moments, c);
    }
    Ok(())
}

/// Steps 1-3. Cells touching a face changed in Step 2 are repaired too,
/// since their reconstruction would otherwise see new face data with old
/// moments.
pub fn apply_tvd_chain(u: &mut SolutionDofs, grid: &Grid, gamma: f64, cfg: &LimiterConfig) -> Result<LimiterReport> {
    let mut report = LimiterReport::default();
    if !cfg.enabled || u.k == 0 {
        return Ok(report);
    }
    let marked = mark_cells(u, grid, cfg);
    report.marked = marked.iter().filter(|&&m| m).count();
    let active = limit_cells(u, grid, gamma, cfg, &marked)?;
    let (vch, hch) = limit_faces(u, grid, cfg, &active);
    let mut repair = active.clone();
    for fj in 0..grid.ny {
        for fi in 0..grid.vcols() {
            if vch[grid.vface(fi, fj)] {
                for cp in grid.vface_cells(fi, fj) {
                    repair[cp.cell] = true;
                }
            }
        }
    }
    for fj in 0..grid.hrows() {
        for fi in 0..grid.nx {
            if hch[grid.hface(fi, fj)] {
                for cp in grid.hface_cells(fi, fj) {
                    repair[cp.cell] = true;
                }
            }
        }
    }
    let cells: Vec<usize> = (0..grid.n_cells()).filter(|&c| repair[c]).collect();
    repair_cells(u, grid, &cells)?;
    report.limited_cells = (0..grid.n_cells()).filter(|&c| active[c]).collect();
    report.changed_vfaces = vch.iter().filter(|&&b| b).count();
    report.changed_hfaces = hch.iter().filter(|&&b| b).count();
    report.repaired_cells = cells;
    Ok(report)
}

/// Reference coordinates of the positivity point set S of one cell:
/// (k+1)² interior Gauss points, k+1 Gauss points on each side and the four
/// corners.
pub fn positivity_points(k: usize) -> Vec<(f64, f64)> {
    let q = gauss_legendre(k + 1).expect("degree checked by caller");
    let mut pts = Vec::with_capacity((k + 1) * (k + 1) + 4 * (k + 1) + 4);
    for &x in &q.nodes {
        for &y in &q.nodes {
            pts.push((x, y));
        }
    }
    for &s in &q.nodes {
        pts.push((-0.5, s));
        pts.push((0.5, s));
        pts.push((s, -0.5));
        pts.push((s, 0.5));
    }
    for (x, y) in [(-0.5, -0.5), (0.5, -0.5), (-0.5, 0.5), (0.5, 0.5)] {
        pts.push((x, y));
    }
    pts
}

/// Largest t ∈ [0, 1] with p(ū + t (u - ū)) ≥ eps; p is concave along the
/// segment and p(ū) > eps, so bisection on the sign is enough.
fn pressure_theta(mean: &[f64; NVARS], u: &[f64; NVARS], gamma: f64, eps: f64) -> f64 {
    let at = |t: f64| -> f64 {
        let s: [f64; NVARS] = std::array::from_fn(|v| mean[v] + t * (u[v] - mean[v]));
        if s[RHO] <= 0.0 {
            return f64::NEG_INFINITY;
        }
        pressure(&s, gamma)
    };
    if at(1.0) >= eps {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if at(mid) >= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Scale each cell toward its mean so that density and pressure are at
/// least ε at every point of S. Hydro coefficients are scaled in place;
/// the in-plane field only gets an evaluation factor in `u.b_scale`, the
/// stored face and moment data are left alone. A cell mean with pressure
/// below the floor has its energy raised to the floor and counts as an
/// event.
pub fn positivity_limit(u: &mut SolutionDofs, grid: &Grid, gamma: f64, cfg: &LimiterConfig) -> PositivityReport {
    let mut report = PositivityReport::default();
    u.clear_scaling();
    let k = u.k;
    let pts = positivity_points(k);
    let px: Vec<[f64; 5]> = pts.iter().map(|p| crate::basis::Basis1D::default().values(p.0)).collect();
    let py: Vec<[f64; 5]> = pts.iter().map(|p| crate::basis::Basis1D::default().values(p.1)).collect();
    let floor = cfg.pressure_floor;
    for c in 0..grid.n_cells() {
        let mut mean = u.mean_state(c);
        let nm = u.n_modes();
        if mean[RHO] < floor {
            u.hydro[c * nm][0] = floor;
            mean[RHO] = floor;
            report.floor_events += 1;
        }
        let p_mean = pressure(&mean, gamma);
        if !(p_mean >= floor) {
            let kin = 0.5 * (mean[MX].powi(2) + mean[MY].powi(2) + mean[MZ].powi(2)) / mean[RHO];
            let mag = 0.5 * (mean[BX].powi(2) + mean[BY].powi(2) + mean[crate::physics::BZ].powi(2));
            let e = floor / (gamma - 1.0) + kin + mag;
            u.hydro[c * nm][4] = e;
            mean[EN] = e;
            report.floor_events += 1;
        }
        let eps_rho = 1e-13 * mean[RHO];
        // Pressure is a difference of energies, so its round-off scales with
        // the total energy rather than with p itself.
        let p_bar = pressure(&mean, gamma);
        let eps_p = (1e-13 * p_bar).max(1e-12 * mean[EN].abs()).min(0.5 * p_bar);
        if k == 0 {
            continue;
        }
        let vals: Vec<[f64; NVARS]> = (0..pts.len()).map(|n| u.eval_with(c, &px[n], &py[n])).collect();
        let rho_min = vals.iter().map(|v| v[RHO]).fold(f64::INFINITY, f64::min);
        let theta_rho = if rho_min < eps_rho {
            ((mean[RHO] - eps_rho) / (mean[RHO] - rho_min)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let mut theta: f64 = 1.0;
        for v in &vals {
            let mut s = *v;
            s[RHO] = mean[RHO] + theta_rho * (s[RHO] - mean[RHO]);
            theta = theta.min(pressure_theta(&mean, &s, gamma, eps_p));
        }
        if theta_rho == 1.0 && theta == 1.0 {
            continue;
        }
        report.scaled_cells += 1;
        let h = u.hydro_cell_mut(c);
        for slot in h.iter_mut().skip(1) {
            slot[0] *= theta_rho * theta;
            for v in 1..NHYDRO {
                slot[v] *= theta;
            }
        }
        u.b_scale[c] = theta;
    }
    report
}

/// Smallest density and pressure over S across all cells, as the scheme
/// sees the solution (with the field scaling applied).
pub fn min_rho_p_on_s(u: &SolutionDofs, gamma: f64) -> (f64, f64) {
    let pts = positivity_points(u.k);
    let mut rmin = f64::INFINITY;
    let mut pmin = f64::INFINITY;
    for c in 0..u.n_cells() {
        for &(x, y) in &pts {
            let mut s = u.eval_raw(c, x, y);
            if u.b_scale[c] != 1.0 {
                scale_b(&mut s, &u.rt[c], u.b_scale[c]);
            }
            rmin = rmin.min(s[RHO]);
            pmin = pmin.min(pressure(&s, gamma));
        }
    }
    (rmin, pmin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Boundary, Domain};

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(0.5, 1.0, 0.8, 0.0), 0.5);
        assert_eq!(minmod(0.5, -1.0, 0.8, 0.0), 0.0);
        assert_eq!(minmod(0.5, -1.0, 0.8, 0.6), 0.5);
        assert_eq!(minmod(-2.0, -1.0, -1.5, 0.0), -1.0);
    }

    #[test]
    fn repair_k1_example() {
        let (a, b) = divfree_repair(1, &[0.0, 0.0], &[0.0, 0.0], &[0.0, -1.0], &[0.0, 1.0], CurlDatum { omega: 0.0 }, 1.0, 1.0).unwrap();
        assert!((a[alpha_index(1, 0, 0)] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn repair_k3_symmetric_example() {
        let f = [0.3, 0.7, -0.1, 0.05];
        let (a, b) = divfree_repair(3, &f, &f, &f, &f, CurlDatum { omega: 0.0 }, 1.0, 1.0).unwrap();
        assert!((a[alpha_index(3, 0, 1)] - 0.7).abs() < 1e-15);
        assert!((b[beta_index(3, 1, 0)] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn repaired_field_is_divergence_free() {
        // Arbitrary face data with zero net flux.
        let (dx, dy) = (0.3, 0.2);
        for k in 1..=3 {
            let mut bxm: Vec<f64> = (0..=k).map(|j| 0.3 + 0.11 * j as f64).collect();
            let bxp: Vec<f64> = (0..=k).map(|j| -0.2 + 0.07 * (j * j) as f64).collect();
            let bym: Vec<f64> = (0..=k).map(|j| 0.5 - 0.13 * j as f64).collect();
            let byp: Vec<f64> = (0..=k).map(|j| 0.1 + 0.05 * j as f64).collect();
            // Enforce (bxp0 - bxm0) dy + (byp0 - bym0) dx = 0.
            bxm[0] = bxp[0] + (byp[0] - bym[0]) * dx / dy;
            let (a, b) = divfree_repair(k, &bxm, &bxp, &bym, &byp, CurlDatum { omega: 0.37 }, dx, dy).unwrap();
            let rt = rt_field::rt_reconstruct(k, &bxm, &bxp, &bym, &byp, &a, &b).unwrap();
            let d = rt.divergence_coeffs(dx, dy);
            assert!(d.iter().all(|v| v.abs() < 1e-12), "k={k}: {d:?}");
            if k == 3 {
                assert!((rt.b(1, 0) - rt.a(0, 1) - 0.37).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn face_limiter_examples() {
        let g = Grid::build(Domain::new(0.0, 1.0, 0.0, 1.0), 2, 2, Boundary::Periodic, Boundary::Periodic).unwrap();
        let mut u = SolutionDofs::zeros(&g, 1).unwrap();
        u.faces.bx[g.vface(1, 0) * 2 + 1] = 2.0;
        // Both adjacent cells active with traces giving a1 = 1 on that face.
        let [l, r] = g.vface_cells(1, 0);
        *u.rt[l.cell].a_mut(0, 1) = 1.0;
        *u.rt[r.cell].a_mut(0, 1) = 1.0;
        let mut active = vec![false; 4];
        active[l.cell] = true;
        active[r.cell] = true;
        let cfg = LimiterConfig {
            beta: 1.5,
            ..LimiterConfig::tvd()
        };
        limit_faces(&mut u, &g, &cfg, &active);
        assert_eq!(u.faces.bx[g.vface(1, 0) * 2 + 1], 1.5);
    }

    #[test]
    fn positivity_points_count() {
        for k in 0..=3 {
            assert_eq!(positivity_points(k).len(), (k + 1) * (k + 1) + 4 * (k + 1) + 4);
        }
    }
}
