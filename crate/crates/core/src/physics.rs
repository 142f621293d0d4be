//! Ideal MHD state algebra.
//!
//! Conserved states use the ordering `[ρ, ρv_x, ρv_y, ρv_z, E, B_x, B_y, B_z]`
//! everywhere in the crate.

use crate::error::{MhdError, Result};

pub const RHO: usize = 0;
pub const MX: usize = 1;
pub const MY: usize = 2;
pub const MZ: usize = 3;
pub const EN: usize = 4;
pub const BX: usize = 5;
pub const BY: usize = 6;
pub const BZ: usize = 7;

pub const NVARS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState(pub [f64; NVARS]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub v: [f64; 3],
    pub p: f64,
    pub b: [f64; 3],
}

impl PrimitiveState {
    pub fn new(rho: f64, v: [f64; 3], p: f64, b: [f64; 3]) -> Self {
        PrimitiveState { rho, v, p, b }
    }
}

impl ConservedState {
    #[inline]
    pub fn rho(&self) -> f64 {
        self.0[RHO]
    }

    #[inline]
    pub fn velocity(&self) -> [f64; 3] {
        let r = self.0[RHO];
        [self.0[MX] / r, self.0[MY] / r, self.0[MZ] / r]
    }

    #[inline]
    pub fn b(&self) -> [f64; 3] {
        [self.0[BX], self.0[BY], self.0[BZ]]
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        self.0[EN]
    }

    /// Thermal pressure p = (γ-1)(E - ½ρ|v|² - ½|B|²).
    #[inline]
    pub fn pressure(&self, gamma: f64) -> f64 {
        pressure(&self.0, gamma)
    }

    /// Total pressure P = p + ½|B|².
    #[inline]
    pub fn total_pressure(&self, gamma: f64) -> f64 {
        let u = &self.0;
        self.pressure(gamma) + 0.5 * (u[BX] * u[BX] + u[BY] * u[BY] + u[BZ] * u[BZ])
    }

    /// E_z = v_y B_x - v_x B_y.
    #[inline]
    pub fn ez(&self) -> f64 {
        ez(&self.0)
    }

    #[inline]
    pub fn is_admissible(&self, gamma: f64) -> bool {
        is_admissible(&self.0, gamma)
    }
}

#[inline]
pub(crate) fn pressure(u: &[f64; NVARS], gamma: f64) -> f64 {
    let kin = 0.5 * (u[MX] * u[MX] + u[MY] * u[MY] + u[MZ] * u[MZ]) / u[RHO];
    let mag = 0.5 * (u[BX] * u[BX] + u[BY] * u[BY] + u[BZ] * u[BZ]);
    (gamma - 1.0) * (u[EN] - kin - mag)
}

#[inline]
pub(crate) fn ez(u: &[f64; NVARS]) -> f64 {
    (u[MY] * u[BX] - u[MX] * u[BY]) / u[RHO]
}

#[inline]
pub(crate) fn is_admissible(u: &[f64; NVARS], gamma: f64) -> bool {
    u[RHO] > 0.0 && pressure(u, gamma) > 0.0 && u.iter().all(|x| x.is_finite())
}

pub(crate) fn check_admissible(u: &[f64; NVARS], gamma: f64) -> Result<()> {
    if is_admissible(u, gamma) {
        Ok(())
    } else {
        Err(MhdError::Admissibility(format!(
            "rho = {:.6e}, p = {:.3e}",
            u[RHO],
            pressure(u, gamma)
        )))
    }
}

pub fn to_primitive(u: &ConservedState, gamma: f64) -> PrimitiveState {
    PrimitiveState {
        rho: u.rho(),
        v: u.velocity(),
        p: u.pressure(gamma),
        b: u.b(),
    }
}

pub fn to_conserved(w: &PrimitiveState, gamma: f64) -> ConservedState {
    let [vx, vy, vz] = w.v;
    let [bx, by, bz] = w.b;
    let e = w.p / (gamma - 1.0)
        + 0.5 * w.rho * (vx * vx + vy * vy + vz * vz)
        + 0.5 * (bx * bx + by * by + bz * bz);
    ConservedState([
        w.rho,
        w.rho * vx,
        w.rho * vy,
        w.rho * vz,
        e,
        bx,
        by,
        bz,
    ])
}

/// Exchange the roles of x and y: swaps (ρv_x, ρv_y) and (B_x, B_y).
#[inline]
pub fn swap_xy(u: &[f64; NVARS]) -> [f64; NVARS] {
    [u[RHO], u[MY], u[MX], u[MZ], u[EN], u[BY], u[BX], u[BZ]]
}

/// x-flux without admissibility checks. The caller guarantees ρ ≠ 0.
#[inline]
pub(crate) fn flux_x_raw(u: &[f64; NVARS], gamma: f64) -> [f64; NVARS] {
    let r = u[RHO];
    let vx = u[MX] / r;
    let vy = u[MY] / r;
    let vz = u[MZ] / r;
    let (bx, by, bz) = (u[BX], u[BY], u[BZ]);
    let b2 = bx * bx + by * by + bz * bz;
    let p = (gamma - 1.0) * (u[EN] - 0.5 * (u[MX] * vx + u[MY] * vy + u[MZ] * vz) - 0.5 * b2);
    let ptot = p + 0.5 * b2;
    let vb = vx * bx + vy * by + vz * bz;
    [
        u[MX],
        u[MX] * vx + ptot - bx * bx,
        u[MX] * vy - bx * by,
        u[MX] * vz - bx * bz,
        (u[EN] + ptot) * vx - bx * vb,
        0.0,
        vx * by - vy * bx,
        vx * bz - vz * bx,
    ]
}

/// Flux in direction `dir`, no admissibility checks.
#[inline]
pub(crate) fn flux_raw(u: &[f64; NVARS], gamma: f64, dir: Direction) -> [f64; NVARS] {
    match dir {
        Direction::X => flux_x_raw(u, gamma),
        Direction::Y => swap_xy(&flux_x_raw(&swap_xy(u), gamma)),
    }
}

/// Physical flux f_x or f_y.
pub fn flux(u: &ConservedState, gamma: f64, dir: Direction) -> Result<[f64; NVARS]> {
    check_admissible(&u.0, gamma)?;
    Ok(flux_raw(&u.0, gamma, dir))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeeds {
    pub a: f64,
    pub ca: f64,
    pub cs: f64,
    pub cf: f64,
}

/// Speeds for the normal direction `bn` (the normal field component).
#[inline]
pub(crate) fn speeds_raw(rho: f64, p: f64, b: [f64; 3], bn: f64, gamma: f64) -> WaveSpeeds {
    let a2 = gamma * p / rho;
    let b2 = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) / rho;
    let bn2 = bn * bn / rho;
    let sum = a2 + b2;
    let disc = (sum * sum - 4.0 * a2 * bn2).max(0.0).sqrt();
    let cf2 = 0.5 * (sum + disc);
    // c_s² via the product identity c_s² c_f² = a² b_n² avoids cancellation.
    let cs2 = if cf2 > 0.0 { (a2 * bn2 / cf2).min(cf2) } else { 0.0 };
    WaveSpeeds {
        a: a2.sqrt(),
        ca: bn2.sqrt(),
        cs: cs2.max(0.0).sqrt(),
        cf: cf2.sqrt(),
    }
}

pub fn wave_speeds(u: &ConservedState, gamma: f64, dir: Direction) -> Result<WaveSpeeds> {
    check_admissible(&u.0, gamma)?;
    let bn = match dir {
        Direction::X => u.0[BX],
        Direction::Y => u.0[BY],
    };
    Ok(speeds_raw(u.rho(), u.pressure(gamma), u.b(), bn, gamma))
}

/// |v_d| + c_fd.
pub fn max_signal(u: &ConservedState, gamma: f64, dir: Direction) -> Result<f64> {
    let s = wave_speeds(u, gamma, dir)?;
    let v = match dir {
        Direction::X => u.0[MX] / u.0[RHO],
        Direction::Y => u.0[MY] / u.0[RHO],
    };
    Ok(v.abs() + s.cf)
}

/// Right/left eigenvectors of the flux Jacobian in canonical variable order.
///
/// `r[i][w]` is component `i` of the right eigenvector of wave `w`;
/// `l[w][i]` is component `i` of the left eigenvector of wave `w`. Waves are
/// ordered `[v-c_f, v-c_a, v-c_s, v, 0, v+c_s, v+c_a, v+c_f]` where the fifth
/// is the divergence mode carried by the normal field.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub r: [[f64; NVARS]; NVARS],
    pub l: [[f64; NVARS]; NVARS],
    pub lambda: [f64; NVARS],
}

impl EigenSystem {
    /// Characteristic variables L·u.
    pub fn to_characteristic(&self, u: &[f64; NVARS]) -> [f64; NVARS] {
        std::array::from_fn(|w| (0..NVARS).map(|i| self.l[w][i] * u[i]).sum())
    }

    /// Conserved variables R·w.
    pub fn from_characteristic(&self, w: &[f64; NVARS]) -> [f64; NVARS] {
        std::array::from_fn(|i| (0..NVARS).map(|m| self.r[i][m] * w[m]).sum())
    }
}

// Position of each appendix-ordered variable [ρ, mx, my, mz, Bx, By, Bz, E]
// in the canonical ordering.
const APPENDIX_TO_CANONICAL: [usize; NVARS] = [RHO, MX, MY, MZ, BX, BY, BZ, EN];

pub fn eigensystem_x(u: &ConservedState, gamma: f64) -> Result<EigenSystem> {
    check_admissible(&u.0, gamma)?;
    Ok(eigensystem_x_raw(&u.0, gamma))
}

pub fn eigensystem_y(u: &ConservedState, gamma: f64) -> Result<EigenSystem> {
    check_admissible(&u.0, gamma)?;
    let ex = eigensystem_x_raw(&swap_xy(&u.0), gamma);
    // A_y(U) = P A_x(PU) P with P the x/y swap, so R_y = P R_x, L_y = L_x P.
    let perm = swap_xy(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).map(|v| v as usize);
    let mut r = [[0.0; NVARS]; NVARS];
    let mut l = [[0.0; NVARS]; NVARS];
    for i in 0..NVARS {
        for w in 0..NVARS {
            r[i][w] = ex.r[perm[i]][w];
            l[w][i] = ex.l[w][perm[i]];
        }
    }
    Ok(EigenSystem {
        r,
        l,
        lambda: ex.lambda,
    })
}

fn eigensystem_x_raw(u: &[f64; NVARS], g: f64) -> EigenSystem {
    let r = u[RHO];
    let (vx, vy, vz) = (u[MX] / r, u[MY] / r, u[MZ] / r);
    let (bx, by, bz) = (u[BX], u[BY], u[BZ]);
    let p = pressure(u, g);
    let WaveSpeeds { a, ca, cs, cf } = speeds_raw(r, p, [bx, by, bz], bx, g);
    let a2 = a * a;
    let bt = (by * by + bz * bz).sqrt();
    let (bey, bez) = if bt > 0.0 {
        (by / bt, bz / bt)
    } else {
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
    };
    let dc = cf * cf - cs * cs;
    let degenerate = (bt == 0.0 && g * p == bx * bx) || dc <= 1e-14 * (cf * cf);
    let (af, als) = if degenerate {
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
    } else {
        let af = ((a2 - cs * cs).max(0.0) / dc).sqrt().min(1.0);
        let als = ((cf * cf - a2).max(0.0) / dc).sqrt().min(1.0);
        (af, als)
    };
    let s = if bx >= 0.0 { 1.0 } else { -1.0 };
    let sr = r.sqrt();
    let v2 = vx * vx + vy * vy + vz * vz;
    let g1 = 0.5 * (g - 1.0);
    let g2 = (g - 2.0) / (g - 1.0);
    let tau = (g - 1.0) / a2;
    let gf = af * cf * vx - als * cs * s * (bey * vy + bez * vz);
    let ga = s * (bez * vy - bey * vz);
    let gs = als * cs * vx + af * cf * s * (bey * vy + bez * vz);

    // Appendix ordering: rows [ρ, mx, my, mz, Bx, By, Bz, E].
    let cols: [[f64; NVARS]; NVARS] = [
        [
            af,
            af * (vx - cf),
            af * vy + als * cs * bey * s,
            af * vz + als * cs * bez * s,
            0.0,
            a * als * bey / sr,
            a * als * bez / sr,
            af * (0.5 * v2 + cf * cf - g2 * a2) - gf,
        ],
        [
            0.0,
            0.0,
            -bez * s,
            bey * s,
            0.0,
            -bez / sr,
            bey / sr,
            -ga,
        ],
        [
            als,
            als * (vx - cs),
            als * vy - af * cf * bey * s,
            als * vz - af * cf * bez * s,
            0.0,
            -a * af * bey / sr,
            -a * af * bez / sr,
            als * (0.5 * v2 + cs * cs - g2 * a2) - gs,
        ],
        [1.0, vx, vy, vz, 0.0, 0.0, 0.0, 0.5 * v2],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, bx],
        [
            als,
            als * (vx + cs),
            als * vy + af * cf * bey * s,
            als * vz + af * cf * bez * s,
            0.0,
            -a * af * bey / sr,
            -a * af * bez / sr,
            als * (0.5 * v2 + cs * cs - g2 * a2) + gs,
        ],
        [
            0.0,
            0.0,
            -bez * s,
            bey * s,
            0.0,
            bez / sr,
            -bey / sr,
            -ga,
        ],
        [
            af,
            af * (vx + cf),
            af * vy - als * cs * bey * s,
            af * vz - als * cs * bez * s,
            0.0,
            a * als * bey / sr,
            a * als * bez / sr,
            af * (0.5 * v2 + cf * cf - g2 * a2) + gf,
        ],
    ];

    let h = 1.0 / (2.0 * a2);
    let gm = 1.0 - g;
    let rows: [[f64; NVARS]; NVARS] = [
        [
            h * (g1 * af * v2 + gf),
            h * (gm * af * vx - af * cf),
            h * (gm * af * vy + cs * als * bey * s),
            h * (gm * af * vz + cs * als * bez * s),
            h * (gm * af * bx),
            h * (gm * af * by + a * als * sr * bey),
            h * (gm * af * bz + a * als * sr * bez),
            h * ((g - 1.0) * af),
        ],
        [
            0.5 * ga,
            0.0,
            -0.5 * bez * s,
            0.5 * bey * s,
            0.0,
            -0.5 * sr * bez,
            0.5 * sr * bey,
            0.0,
        ],
        [
            h * (g1 * als * v2 + gs),
            h * (gm * als * vx - als * cs),
            h * (gm * als * vy - cf * af * bey * s),
            h * (gm * als * vz - cf * af * bez * s),
            h * (gm * als * bx),
            h * (gm * als * by - a * af * sr * bey),
            h * (gm * als * bz - a * af * sr * bez),
            h * ((g - 1.0) * als),
        ],
        [
            1.0 - 0.5 * tau * v2,
            tau * vx,
            tau * vy,
            tau * vz,
            tau * bx,
            tau * by,
            tau * bz,
            -tau,
        ],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [
            h * (g1 * als * v2 - gs),
            h * (gm * als * vx + als * cs),
            h * (gm * als * vy + cf * af * bey * s),
            h * (gm * als * vz + cf * af * bez * s),
            h * (gm * als * bx),
            h * (gm * als * by - a * af * sr * bey),
            h * (gm * als * bz - a * af * sr * bez),
            h * ((g - 1.0) * als),
        ],
        [
            0.5 * ga,
            0.0,
            -0.5 * bez * s,
            0.5 * bey * s,
            0.0,
            0.5 * sr * bez,
            -0.5 * sr * bey,
            0.0,
        ],
        [
            h * (g1 * af * v2 - gf),
            h * (gm * af * vx + af * cf),
            h * (gm * af * vy - cs * als * bey * s),
            h * (gm * af * vz - cs * als * bez * s),
            h * (gm * af * bx),
            h * (gm * af * by + a * als * sr * bey),
            h * (gm * af * bz + a * als * sr * bez),
            h * ((g - 1.0) * af),
        ],
    ];

    let mut rm = [[0.0; NVARS]; NVARS];
    let mut lm = [[0.0; NVARS]; NVARS];
    for w in 0..NVARS {
        for i in 0..NVARS {
            rm[APPENDIX_TO_CANONICAL[i]][w] = cols[w][i];
            lm[w][APPENDIX_TO_CANONICAL[i]] = rows[w][i];
        }
    }
    EigenSystem {
        r: rm,
        l: lm,
        lambda: [vx - cf, vx - ca, vx - cs, vx, 0.0, vx + cs, vx + ca, vx + cf],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: f64 = 5.0 / 3.0;

    fn prim(rho: f64, v: [f64; 3], p: f64, b: [f64; 3]) -> ConservedState {
        to_conserved(&PrimitiveState::new(rho, v, p, b), G)
    }

    #[test]
    fn energy_examples() {
        assert!((prim(1.0, [0.0; 3], 1.0, [0.0; 3]).energy() - 1.5).abs() < 1e-15);
        let u = prim(1.0, [1.0, 0.0, 0.0], 1.0, [1.0, 0.0, 0.0]);
        assert!((u.energy() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn brio_wu_round_trip() {
        let w = PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0]);
        let back = to_primitive(&to_conserved(&w, G), G);
        assert!((back.p - 1.0).abs() < 1e-14);
        assert_eq!(back.b, w.b);
        assert_eq!(back.rho, 1.0);
    }

    #[test]
    fn flux_examples() {
        // E = 1.5 + 2 = 3.5, P = 1: f = [2, ρv²+P, 0, 0, (E+P)v, 0, 0, 0].
        let u = prim(1.0, [2.0, 0.0, 0.0], 1.0, [0.0; 3]);
        let f = flux(&u, G, Direction::X).unwrap();
        let expect = [2.0, 5.0, 0.0, 0.0, 9.0, 0.0, 0.0, 0.0];
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let u = prim(0.7, [0.0; 3], 0.3, [0.0; 3]);
        let f = flux(&u, G, Direction::X).unwrap();
        assert!((f[MX] - 0.3).abs() < 1e-15);
        assert!(f.iter().enumerate().all(|(i, v)| i == MX || *v == 0.0));
    }

    #[test]
    fn electric_field_entries() {
        let u = prim(1.3, [0.2, -0.7, 0.1], 0.9, [0.4, 1.1, -0.3]);
        let fx = flux(&u, G, Direction::X).unwrap();
        let fy = flux(&u, G, Direction::Y).unwrap();
        assert_eq!(fx[BX], 0.0);
        assert_eq!(fy[BY], 0.0);
        assert!((fx[BY] + u.ez()).abs() < 1e-15);
        assert!((fy[BX] - u.ez()).abs() < 1e-15);
    }

    #[test]
    fn inadmissible_flux_is_error() {
        let u = ConservedState([1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            flux(&u, G, Direction::X),
            Err(MhdError::Admissibility(_))
        ));
        assert!(wave_speeds(&u, G, Direction::X).is_err());
    }

    #[test]
    fn wave_speed_examples() {
        let s = wave_speeds(&prim(1.0, [0.0; 3], 2.0, [0.0; 3]), G, Direction::X).unwrap();
        assert!((s.cf - (G * 2.0f64).sqrt()).abs() < 1e-15);
        assert_eq!(s.cs, 0.0);
        assert_eq!(s.ca, 0.0);

        let u = prim(1.0, [0.0; 3], 1.0, [1.0, 0.0, 0.0]);
        let s = wave_speeds(&u, G, Direction::X).unwrap();
        assert!((s.a * s.a - 5.0 / 3.0).abs() < 1e-14);
        assert!((s.cf - (5.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((s.cs - 1.0).abs() < 1e-14);
        assert!((s.ca - 1.0).abs() < 1e-14);

        let s = wave_speeds(&u, G, Direction::Y).unwrap();
        assert_eq!(s.cs, 0.0);
        assert!((s.cf - (5.0f64 / 3.0 + 1.0).sqrt()).abs() < 1e-14);
        assert!((max_signal(&u, G, Direction::Y).unwrap() - s.cf).abs() < 1e-15);
    }

    fn lr_error(e: &EigenSystem) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..NVARS {
            for j in 0..NVARS {
                let v: f64 = (0..NVARS).map(|m| e.l[i][m] * e.r[m][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    #[test]
    fn brio_wu_left_eigensystem() {
        let u = prim(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0]);
        let e = eigensystem_x(&u, G).unwrap();
        assert!(lr_error(&e) < 1e-11);
        let s = wave_speeds(&u, G, Direction::X).unwrap();
        let mut got = e.lambda.to_vec();
        let mut expect = vec![-s.cf, -s.cs, -s.ca, 0.0, 0.0, s.ca, s.cs, s.cf];
        got.sort_by(f64::total_cmp);
        expect.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let ey = eigensystem_y(&u, G).unwrap();
        assert!(lr_error(&ey) < 1e-11);
    }

    #[test]
    fn degenerate_triple_point() {
        // B_y = B_z = 0 and γp = B_x²: fast, slow and Alfvén speeds coincide.
        let bx = (G * 0.6f64).sqrt();
        let u = prim(1.0, [0.1, 0.0, 0.0], 0.6, [bx, 0.0, 0.0]);
        let e = eigensystem_x(&u, G).unwrap();
        assert!(e.r.iter().flatten().all(|v| v.is_finite()));
        assert!(e.l.iter().flatten().all(|v| v.is_finite()));
        assert!(lr_error(&e) < 1e-11);
    }

    #[test]
    fn product_identity() {
        let u = prim(0.8, [0.3, 0.1, 0.0], 0.4, [0.6, -0.2, 0.9]);
        let s = wave_speeds(&u, G, Direction::X).unwrap();
        assert!((s.cs * s.cf - s.a * s.ca).abs() < 1e-12);
    }
}
