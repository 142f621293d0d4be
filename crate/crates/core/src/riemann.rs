//! Approximate Riemann solvers.
//!
//! Interface solvers return the full 8-component numerical flux together
//! with the electric field read off from it: `ez = -F_x[B_y]` on x-faces and
//! `ez = F_y[B_x]` on y-faces. Vertex solvers return only the corner electric
//! field. All y-direction solves go through the x-solver on states with x and
//! y exchanged.

use crate::error::{MhdError, Result};
use crate::physics::{
    self, check_admissible, flux_x_raw, pressure, speeds_raw, swap_xy, Direction, BX, BY, BZ, EN,
    MX, MY, MZ, NVARS, RHO,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluxKind {
    Lxf,
    Hll,
    Hllc,
}

impl FluxKind {
    pub const ALL: [FluxKind; 3] = [FluxKind::Lxf, FluxKind::Hll, FluxKind::Hllc];
}

impl std::str::FromStr for FluxKind {
    type Err = MhdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lxf" => Ok(FluxKind::Lxf),
            "hll" => Ok(FluxKind::Hll),
            "hllc" => Ok(FluxKind::Hllc),
            other => Err(MhdError::Config(format!(
                "unknown flux `{other}` (valid: lxf, hll, hllc)"
            ))),
        }
    }
}

impl std::fmt::Display for FluxKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FluxKind::Lxf => "lxf",
            FluxKind::Hll => "hll",
            FluxKind::Hllc => "hllc",
        })
    }
}

/// Which corner electric-field formula the HLL-family vertex solver uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum VertexSolver {
    /// The full strongly-interacting-state estimate, consistent with the 1-D
    /// solver.
    #[default]
    Consistent,
    /// Only the average of the four 1-D electric fields. Inconsistent with
    /// the 1-D solver; kept to demonstrate what the extra jump terms buy.
    FirstTermOnly,
}

impl std::str::FromStr for VertexSolver {
    type Err = MhdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "consistent" => Ok(VertexSolver::Consistent),
            "first-term" => Ok(VertexSolver::FirstTermOnly),
            other => Err(MhdError::Config(format!(
                "unknown vertex solver `{other}` (valid: consistent, first-term)"
            ))),
        }
    }
}

impl std::fmt::Display for VertexSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VertexSolver::Consistent => "consistent",
            VertexSolver::FirstTermOnly => "first-term",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannResult {
    pub flux: [f64; NVARS],
    pub ez: f64,
    /// Set when HLLC could not place its contact wave and returned HLL.
    pub hllc_fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveEstimate {
    pub sl: f64,
    pub sr: f64,
}

/// Bounding speeds of a two-dimensional Riemann fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveEstimate2d {
    pub sw: f64,
    pub se: f64,
    pub ss: f64,
    pub sn: f64,
}

/// HLL solution including the intermediate state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HllSolution {
    pub result: RiemannResult,
    pub ustar: [f64; NVARS],
    pub estimate: WaveEstimate,
}

#[inline]
fn oriented(u: &[f64; NVARS], dir: Direction) -> [f64; NVARS] {
    match dir {
        Direction::X => *u,
        Direction::Y => swap_xy(u),
    }
}

/// Map an x-frame flux back to the requested direction and attach ez.
#[inline]
fn finish(flux_x: [f64; NVARS], dir: Direction, fallback: bool) -> RiemannResult {
    match dir {
        Direction::X => RiemannResult {
            ez: -flux_x[BY],
            flux: flux_x,
            hllc_fallback: fallback,
        },
        Direction::Y => {
            let flux = swap_xy(&flux_x);
            RiemannResult {
                ez: flux[BX],
                flux,
                hllc_fallback: fallback,
            }
        }
    }
}

#[inline]
fn signal_x(u: &[f64; NVARS], gamma: f64) -> (f64, f64) {
    let r = u[RHO];
    let s = speeds_raw(r, pressure(u, gamma), [u[BX], u[BY], u[BZ]], u[BX], gamma);
    (u[MX] / r, s.cf)
}

/// x-frame estimate, states assumed admissible.
#[inline]
fn estimate_x(ul: &[f64; NVARS], ur: &[f64; NVARS], gamma: f64) -> WaveEstimate {
    let (vl, cl) = signal_x(ul, gamma);
    let (vr, cr) = signal_x(ur, gamma);
    let (rl, rr) = (ul[RHO], ur[RHO]);
    let (pl, pr) = (pressure(ul, gamma), pressure(ur, gamma));
    let rho = 0.5 * (rl + rr);
    let p = 0.5 * (pl + pr);
    let b = [
        0.5 * (ul[BX] + ur[BX]),
        0.5 * (ul[BY] + ur[BY]),
        0.5 * (ul[BZ] + ur[BZ]),
    ];
    let (sl_w, sr_w) = (rl.sqrt(), rr.sqrt());
    let weighted_v = (sl_w * vl + sr_w * vr) / (sl_w + sr_w);
    let (vbar, cbar) = if rho > 0.0 && p > 0.0 && weighted_v.is_finite() {
        (weighted_v, speeds_raw(rho, p, b, b[0], gamma).cf)
    } else {
        // Plain primitive average.
        let v = 0.5 * (vl + vr);
        let rho_a = rho.max(f64::MIN_POSITIVE);
        let p_a = p.max(f64::MIN_POSITIVE);
        (v, speeds_raw(rho_a, p_a, b, b[0], gamma).cf)
    };
    WaveEstimate {
        sl: (vl - cl).min(vbar - cbar),
        sr: (vr + cr).max(vbar + cbar),
    }
}

pub fn wave_estimates_1d(
    ul: &physics::ConservedState,
    ur: &physics::ConservedState,
    gamma: f64,
    dir: Direction,
) -> Result<WaveEstimate> {
    check_admissible(&ul.0, gamma)?;
    check_admissible(&ur.0, gamma)?;
    Ok(estimate_x(&oriented(&ul.0, dir), &oriented(&ur.0, dir), gamma))
}

#[inline]
fn degenerate(e: &WaveEstimate) -> bool {
    (e.sr - e.sl).abs() < 1e-12 * e.sl.abs().max(e.sr.abs()).max(1.0)
}

/// HLL in the x-frame. Returns (flux, U*, estimate).
#[inline]
fn hll_x(ul: &[f64; NVARS], ur: &[f64; NVARS], gamma: f64) -> ([f64; NVARS], [f64; NVARS], WaveEstimate) {
    let est = estimate_x(ul, ur, gamma);
    let fl = flux_x_raw(ul, gamma);
    let fr = flux_x_raw(ur, gamma);
    let WaveEstimate { sl, sr } = est;
    if degenerate(&est) {
        let (u, f) = if sl >= 0.0 { (*ul, fl) } else { (*ur, fr) };
        return (f, u, est);
    }
    let inv = 1.0 / (sr - sl);
    let ustar: [f64; NVARS] = std::array::from_fn(|i| (sr * ur[i] - sl * ul[i] - (fr[i] - fl[i])) * inv);
    let flux = if sl > 0.0 {
        fl
    } else if sr < 0.0 {
        fr
    } else {
        std::array::from_fn(|i| (sr * fl[i] - sl * fr[i] + sl * sr * (ur[i] - ul[i])) * inv)
    };
    (flux, ustar, est)
}

/// Rusanov flux in the x-frame; also returns the dissipation speed α.
#[inline]
fn lxf_x(ul: &[f64; NVARS], ur: &[f64; NVARS], gamma: f64) -> [f64; NVARS] {
    let (vl, cl) = signal_x(ul, gamma);
    let (vr, cr) = signal_x(ur, gamma);
    let alpha = (vl.abs() + cl).max(vr.abs() + cr);
    let fl = flux_x_raw(ul, gamma);
    let fr = flux_x_raw(ur, gamma);
    std::array::from_fn(|i| 0.5 * (fl[i] + fr[i]) - 0.5 * alpha * (ur[i] - ul[i]))
}

/// HLLC in the x-frame. The magnetic components of the flux are the HLL
/// ones, so the electric field coincides with HLL exactly.
fn hllc_x(ul: &[f64; NVARS], ur: &[f64; NVARS], gamma: f64) -> ([f64; NVARS], bool) {
    let (fhll, ustar, est) = hll_x(ul, ur, gamma);
    let WaveEstimate { sl, sr } = est;
    if degenerate(&est) || sl > 0.0 || sr < 0.0 {
        return (fhll, false);
    }
    let sm = ustar[MX] / ustar[RHO];
    let scale = sl.abs().max(sr.abs()).max(1.0);
    if !(sm > sl && sm < sr) || (sm - sl).abs() < 1e-12 * scale || (sr - sm).abs() < 1e-12 * scale {
        return (fhll, true);
    }
    let bxs = ustar[BX];
    let bys = ustar[BY];
    let bzs = ustar[BZ];
    let vbs = (ustar[MX] * bxs + ustar[MY] * bys + ustar[MZ] * bzs) / ustar[RHO];
    let b2 = |u: &[f64; NVARS]| u[BX] * u[BX] + u[BY] * u[BY] + u[BZ] * u[BZ];
    let ptot = |u: &[f64; NVARS]| pressure(u, gamma) + 0.5 * b2(u);
    let ul_u = ul[MX] / ul[RHO];
    let pstar = ptot(ul) + ul[RHO] * (sl - ul_u) * (sm - ul_u) - ul[BX] * ul[BX] + bxs * bxs;

    let star = |u: &[f64; NVARS], s: f64| -> Option<[f64; NVARS]> {
        let r = u[RHO];
        let vx = u[MX] / r;
        let vy = u[MY] / r;
        let vz = u[MZ] / r;
        let den = r * (s - vx);
        if den.abs() < 1e-300 {
            return None;
        }
        let rs = den / (s - sm);
        let vys = vy + (u[BX] * u[BY] - bxs * bys) / den;
        let vzs = vz + (u[BX] * u[BZ] - bxs * bzs) / den;
        let vb = vx * u[BX] + vy * u[BY] + vz * u[BZ];
        let es = ((s - vx) * u[EN] - ptot(u) * vx + pstar * sm + u[BX] * vb - bxs * vbs) / (s - sm);
        Some([rs, rs * sm, rs * vys, rs * vzs, es, bxs, bys, bzs])
    };

    let (u, f_side, s) = if sm >= 0.0 {
        (ul, flux_x_raw(ul, gamma), sl)
    } else {
        (ur, flux_x_raw(ur, gamma), sr)
    };
    let Some(us) = star(u, s) else {
        return (fhll, true);
    };
    let mut flux: [f64; NVARS] = std::array::from_fn(|i| f_side[i] + s * (us[i] - u[i]));
    flux[BX] = fhll[BX];
    flux[BY] = fhll[BY];
    flux[BZ] = fhll[BZ];
    if flux.iter().any(|v| !v.is_finite()) {
        return (fhll, true);
    }
    (flux, false)
}

fn checked_pair(ul: &physics::ConservedState, ur: &physics::ConservedState, gamma: f64) -> Result<()> {
    check_admissible(&ul.0, gamma).map_err(|e| e.at("left state"))?;
    check_admissible(&ur.0, gamma).map_err(|e| e.at("right state"))
}

pub fn lxf_flux(
    ul: &physics::ConservedState,
    ur: &physics::ConservedState,
    gamma: f64,
    dir: Direction,
) -> Result<RiemannResult> {
    checked_pair(ul, ur, gamma)?;
    Ok(finish(lxf_x(&oriented(&ul.0, dir), &oriented(&ur.0, dir), gamma), dir, false))
}

pub fn hll_flux(
    ul: &physics::ConservedState,
    ur: &physics::ConservedState,
    gamma: f64,
    dir: Direction,
) -> Result<RiemannResult> {
    Ok(hll_solve(ul, ur, gamma, dir)?.result)
}

/// HLL flux plus its intermediate state (returned in the caller's frame).
pub fn hll_solve(
    ul: &physics::ConservedState,
    ur: &physics::ConservedState,
    gamma: f64,
    dir: Direction,
) -> Result<HllSolution> {
    checked_pair(ul, ur, gamma)?;
    let (f, ustar, estimate) = hll_x(&oriented(&ul.0, dir), &oriented(&ur.0, dir), gamma);
    Ok(HllSolution {
        result: finish(f, dir, false),
        ustar: oriented(&ustar, dir),
        estimate,
    })
}

pub fn hllc_flux(
    ul: &physics::ConservedState,
    ur: &physics::ConservedState,
    gamma: f64,
    dir: Direction,
) -> Result<RiemannResult> {
    checked_pair(ul, ur, gamma)?;
    let (f, fb) = hllc_x(&oriented(&ul.0, dir), &oriented(&ur.0, dir), gamma);
    Ok(finish(f, dir, fb))
}

/// Dispatch on the flux kind.
pub fn interface_flux(
    kind: FluxKind,
    ul: &physics::ConservedState,
    ur: &physics::ConservedState,
    gamma: f64,
    dir: Direction,
) -> Result<RiemannResult> {
    match kind {
        FluxKind::Lxf => lxf_flux(ul, ur, gamma, dir),
        FluxKind::Hll => hll_flux(ul, ur, gamma, dir),
        FluxKind::Hllc => hllc_flux(ul, ur, gamma, dir),
    }
}

/// Unchecked interface flux on raw arrays, for the assembly loops which
/// validate states once up front.
#[inline]
pub(crate) fn interface_flux_raw(
    kind: FluxKind,
    ul: &[f64; NVARS],
    ur: &[f64; NVARS],
    gamma: f64,
    dir: Direction,
) -> RiemannResult {
    let (l, r) = (oriented(ul, dir), oriented(ur, dir));
    match kind {
        FluxKind::Lxf => finish(lxf_x(&l, &r, gamma), dir, false),
        FluxKind::Hll => finish(hll_x(&l, &r, gamma).0, dir, false),
        FluxKind::Hllc => {
            let (f, fb) = hllc_x(&l, &r, gamma);
            finish(f, dir, fb)
        }
    }
}

fn check_four(u: [&physics::ConservedState; 4], gamma: f64) -> Result<()> {
    const NAMES: [&str; 4] = ["sw", "se", "nw", "ne"];
    for (s, name) in u.iter().zip(NAMES) {
        check_admissible(&s.0, gamma).map_err(|e| e.at(format!("{name} corner state")))?;
    }
    Ok(())
}

#[inline]
pub(crate) fn vertex_ez_lxf_raw(u: [&[f64; NVARS]; 4], gamma: f64) -> f64 {
    let [sw, se, nw, ne] = u;
    let mut ax: f64 = 0.0;
    let mut ay: f64 = 0.0;
    for s in u {
        let (v, c) = signal_x(s, gamma);
        ax = ax.max(v.abs() + c);
        let (v, c) = signal_x(&swap_xy(s), gamma);
        ay = ay.max(v.abs() + c);
    }
    let e = |s: &[f64; NVARS]| physics::ez(s);
    0.25 * (e(sw) + e(se) + e(nw) + e(ne))
        - 0.5 * ay * (0.5 * (nw[BX] + ne[BX]) - 0.5 * (sw[BX] + se[BX]))
        + 0.5 * ax * (0.5 * (ne[BY] + se[BY]) - 0.5 * (nw[BY] + sw[BY]))
}

/// Corner electric field with local Lax-Friedrichs dissipation.
pub fn vertex_ez_lxf(
    usw: &physics::ConservedState,
    use_: &physics::ConservedState,
    unw: &physics::ConservedState,
    une: &physics::ConservedState,
    gamma: f64,
) -> Result<f64> {
    check_four([usw, use_, unw, une], gamma)?;
    Ok(vertex_ez_lxf_raw([&usw.0, &use_.0, &unw.0, &une.0], gamma))
}

#[inline]
pub(crate) fn vertex_ez_hll_raw(u: [&[f64; NVARS]; 4], gamma: f64, mode: VertexSolver) -> f64 {
    let [sw, se, nw, ne] = u;
    // South and north problems run in x, west and east in y.
    let (fs, us, es) = hll_x(sw, se, gamma);
    let (fn_, un, en) = hll_x(nw, ne, gamma);
    let (sw_y, se_y, nw_y, ne_y) = (swap_xy(sw), swap_xy(se), swap_xy(nw), swap_xy(ne));
    let (fw, uw, ew) = hll_x(&sw_y, &nw_y, gamma);
    let (fe, ue, ee) = hll_x(&se_y, &ne_y, gamma);

    let ez_s = -fs[BY];
    let ez_n = -fn_[BY];
    // In the swapped frame -F'[B_y] is the swapped E_z, which is -E_z.
    let ez_w = fw[BY];
    let ez_e = fe[BY];

    let s_w = es.sl.min(en.sl);
    let s_e = es.sr.max(en.sr);
    let s_s = ew.sl.min(ee.sl);
    let s_n = ew.sr.max(ee.sr);

    if s_w > 0.0 {
        return ez_w;
    }
    if s_e < 0.0 {
        return ez_e;
    }
    if s_s > 0.0 {
        return ez_s;
    }
    if s_n < 0.0 {
        return ez_n;
    }

    let first = 0.25 * (ez_n + ez_s + ez_e + ez_w);
    if mode == VertexSolver::FirstTermOnly {
        return first;
    }

    let e = |s: &[f64; NVARS]| physics::ez(s);
    let (e_sw, e_se, e_nw, e_ne) = (e(sw), e(se), e(nw), e(ne));
    let den = 2.0 * (s_e - s_w) * (s_n - s_s);
    let bx_ss = (2.0 * s_e * s_n * ne[BX] - 2.0 * s_n * s_w * nw[BX] + 2.0 * s_s * s_w * sw[BX]
        - 2.0 * s_s * s_e * se[BX]
        - s_e * (e_ne - e_se)
        + s_w * (e_nw - e_sw)
        - (s_e - s_w) * (ez_n - ez_s))
        / den;
    let by_ss = (2.0 * s_e * s_n * ne[BY] - 2.0 * s_n * s_w * nw[BY] + 2.0 * s_s * s_w * sw[BY]
        - 2.0 * s_s * s_e * se[BY]
        + s_n * (e_ne - e_nw)
        - s_s * (e_se - e_sw)
        + (s_n - s_s) * (ez_e - ez_w))
        / den;
    let bx_n = un[BX];
    let bx_s = us[BX];
    // B_y of the y-problems sits in the B_x slot of the swapped frame.
    let by_e = ue[BX];
    let by_w = uw[BX];
    first - 0.25 * s_n * (bx_n - bx_ss) - 0.25 * s_s * (bx_s - bx_ss)
        + 0.25 * s_e * (by_e - by_ss)
        + 0.25 * s_w * (by_w - by_ss)
}

/// Corner electric field from the two-dimensional HLL fan. Shared by HLLC.
pub fn vertex_ez_hll(
    usw: &physics::ConservedState,
    use_: &physics::ConservedState,
    unw: &physics::ConservedState,
    une: &physics::ConservedState,
    gamma: f64,
) -> Result<f64> {
    check_four([usw, use_, unw, une], gamma)?;
    Ok(vertex_ez_hll_raw([&usw.0, &use_.0, &unw.0, &une.0], gamma, VertexSolver::Consistent))
}

/// The same fan with the electric field truncated to the average of the
/// four 1-D values.
pub fn vertex_ez_hll_first_term(
    usw: &physics::ConservedState,
    use_: &physics::ConservedState,
    unw: &physics::ConservedState,
    une: &physics::ConservedState,
    gamma: f64,
) -> Result<f64> {
    check_four([usw, use_, unw, une], gamma)?;
    Ok(vertex_ez_hll_raw([&usw.0, &use_.0, &unw.0, &une.0], gamma, VertexSolver::FirstTermOnly))
}

/// Bounding speeds of the fan at a vertex.
pub fn wave_estimates_2d(
    usw: &physics::ConservedState,
    use_: &physics::ConservedState,
    unw: &physics::ConservedState,
    une: &physics::ConservedState,
    gamma: f64,
) -> Result<WaveEstimate2d> {
    check_four([usw, use_, unw, une], gamma)?;
    let es = estimate_x(&usw.0, &use_.0, gamma);
    let en = estimate_x(&unw.0, &une.0, gamma);
    let ew = estimate_x(&swap_xy(&usw.0), &swap_xy(&unw.0), gamma);
    let ee = estimate_x(&swap_xy(&use_.0), &swap_xy(&une.0), gamma);
    Ok(WaveEstimate2d {
        sw: es.sl.min(en.sl),
        se: es.sr.max(en.sr),
        ss: ew.sl.min(ee.sl),
        sn: ew.sr.max(ee.sr),
    })
}

#[inline]
pub(crate) fn vertex_ez_raw(kind: FluxKind, mode: VertexSolver, u: [&[f64; NVARS]; 4], gamma: f64) -> f64 {
    match kind {
        FluxKind::Lxf => vertex_ez_lxf_raw(u, gamma),
        FluxKind::Hll | FluxKind::Hllc => vertex_ez_hll_raw(u, gamma, mode),
    }
}

/// Dispatch on the flux kind; HLLC uses the HLL vertex solver.
pub fn vertex_ez(
    kind: FluxKind,
    mode: VertexSolver,
    usw: &physics::ConservedState,
    use_: &physics::ConservedState,
    unw: &physics::ConservedState,
    une: &physics::ConservedState,
    gamma: f64,
) -> Result<f64> {
    check_four([usw, use_, unw, une], gamma)?;
    Ok(vertex_ez_raw(kind, mode, [&usw.0, &use_.0, &unw.0, &une.0], gamma))
}
