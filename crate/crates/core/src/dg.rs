//! Semi-discrete residual assembly.
//!
//! One call to [`Scheme::assemble`] runs three passes over the mesh:
//!
//! 1. vertices: corner states from the four surrounding cells, electric field
//!    from the 2-D vertex solver;
//! 2. faces: 1-D Riemann problems at the Gauss points of every face, which
//!    give the hydrodynamic flux and the face electric field, then the
//!    residual of the face polynomials;
//! 3. cells: the hydrodynamic volume and surface integrals and the residual
//!    of the interior magnetic moments.
//!
//! All residual slots are divided by their mass-matrix entries, so they are
//! plain time derivatives of the stored coefficients.

use crate::basis::{self, Quadrature1D, EDGE_VALUE, MASS};
use crate::error::{MhdError, Result};
use crate::grid::Grid;
use crate::physics::{
    self, flux_raw, is_admissible, Direction, BX, BY, BZ, EN, MX, MY, MZ, NVARS, RHO,
};
use crate::riemann::{self, FluxKind, VertexSolver};
use crate::rt_field::{
    self, alpha_index, beta_index, check_degree, n_moments, CellMoments, FaceDofs, RtCoefficients,
};

/// Number of cell-polynomial (hydrodynamic) components.
pub const NHYDRO: usize = 6;

/// Position of each hydro component in the full 8-vector.
pub const HYDRO_COMPONENTS: [usize; NHYDRO] = [RHO, MX, MY, MZ, EN, BZ];

/// Complete discrete state.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionDofs {
    pub k: usize,
    /// `hydro[c * (k+1)² + i * (k+1) + j]` holds the coefficient of
    /// φ_i(ξ) φ_j(η) for [ρ, ρv_x, ρv_y, ρv_z, E, B_z].
    pub hydro: Vec<[f64; NHYDRO]>,
    pub faces: FaceDofs,
    pub moments: CellMoments,
    /// Reconstructed cell fields; refreshed by [`SolutionDofs::refresh_rt`].
    pub rt: Vec<RtCoefficients>,
    /// Per-cell factor θ ≤ 1 set by the positivity limiter: the scheme
    /// evaluates the in-plane field as `B̄ + θ (B - B̄)`. The stored face and
    /// moment data are never scaled.
    pub b_scale: Vec<f64>,
}

impl SolutionDofs {
    pub fn zeros(grid: &Grid, k: usize) -> Result<Self> {
        check_degree(k)?;
        let nm = (k + 1) * (k + 1);
        Ok(SolutionDofs {
            k,
            hydro: vec![[0.0; NHYDRO]; grid.n_cells() * nm],
            faces: FaceDofs::zeros(k, grid.n_vfaces(), grid.n_hfaces()),
            moments: CellMoments::zeros(k, grid.n_cells()),
            rt: vec![RtCoefficients::zeros(k); grid.n_cells()],
            b_scale: vec![1.0; grid.n_cells()],
        })
    }

    /// Assemble from parts and build the RT cache.
    pub fn from_parts(
        grid: &Grid,
        k: usize,
        hydro: Vec<[f64; NHYDRO]>,
        faces: FaceDofs,
        moments: CellMoments,
    ) -> Result<Self> {
        check_degree(k)?;
        let nm = (k + 1) * (k + 1);
        if hydro.len() != grid.n_cells() * nm
            || faces.k != k
            || moments.k != k
            || faces.bx.len() != grid.n_vfaces() * (k + 1)
            || faces.by.len() != grid.n_hfaces() * (k + 1)
            || moments.alpha.len() != grid.n_cells() * n_moments(k)
        {
            return Err(MhdError::Data(format!(
                "solution parts do not match a {}x{} grid at degree {k}",
                grid.nx, grid.ny
            )));
        }
        let mut u = SolutionDofs {
            k,
            hydro,
            faces,
            moments,
            rt: vec![RtCoefficients::zeros(k); grid.n_cells()],
            b_scale: vec![1.0; grid.n_cells()],
        };
        u.refresh_rt(grid);
        Ok(u)
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        (self.k + 1) * (self.k + 1)
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.rt.len()
    }

    #[inline]
    pub fn hydro_cell(&self, c: usize) -> &[[f64; NHYDRO]] {
        let nm = self.n_modes();
        &self.hydro[c * nm..(c + 1) * nm]
    }

    #[inline]
    pub fn hydro_cell_mut(&mut self, c: usize) -> &mut [[f64; NHYDRO]] {
        let nm = self.n_modes();
        &mut self.hydro[c * nm..(c + 1) * nm]
    }

    #[inline]
    pub fn mode_index(&self, i: usize, j: usize) -> usize {
        i * (self.k + 1) + j
    }

    /// Rebuild every cell's RT coefficients from faces and moments.
    pub fn refresh_rt(&mut self, grid: &Grid) {
        for c in 0..grid.n_cells() {
            self.rt[c] = rt_field::reconstruct_cell(grid, &self.faces, &self.moments, c);
        }
    }

    /// Drop all positivity scalings.
    pub fn clear_scaling(&mut self) {
        self.b_scale.fill(1.0);
    }

    /// Cell-mean conserved state.
    #[inline]
    pub fn mean_state(&self, c: usize) -> [f64; NVARS] {
        let h = self.hydro[c * self.n_modes()];
        let rt = &self.rt[c];
        [h[0], h[1], h[2], h[3], h[4], rt.a(0, 0), rt.b(0, 0), h[5]]
    }

    /// Unscaled polynomial state with precomputed basis values.
    #[inline]
    pub(crate) fn eval_with(&self, c: usize, px: &[f64; 5], py: &[f64; 5]) -> [f64; NVARS] {
        let k = self.k;
        let h = self.hydro_cell(c);
        let mut acc = [0.0; NHYDRO];
        for i in 0..=k {
            let mut row = [0.0; NHYDRO];
            for j in 0..=k {
                let w = &h[i * (k + 1) + j];
                for v in 0..NHYDRO {
                    row[v] += w[v] * py[j];
                }
            }
            for v in 0..NHYDRO {
                acc[v] += row[v] * px[i];
            }
        }
        let (bx, by) = self.rt[c].eval_with(px, py);
        [acc[0], acc[1], acc[2], acc[3], acc[4], bx, by, acc[5]]
    }

    /// Polynomial state of cell `c` at (ξ, η), ignoring positivity scaling.
    pub fn eval_raw(&self, c: usize, xi: f64, eta: f64) -> [f64; NVARS] {
        let px = basis::Basis1D::default().values(xi);
        let py = basis::Basis1D::default().values(eta);
        self.eval_with(c, &px, &py)
    }

    /// State of cell `c` at (ξ, η) as seen by the scheme, i.e. with the
    /// positivity scaling of the in-plane field applied.
    pub fn eval(&self, c: usize, xi: f64, eta: f64) -> [f64; NVARS] {
        let mut u = self.eval_raw(c, xi, eta);
        let t = self.b_scale[c];
        if t != 1.0 {
            scale_b(&mut u, &self.rt[c], t);
        }
        u
    }

    /// `self = a * self + b * other` on every degree of freedom. The RT
    /// cache is combined the same way, which keeps it coherent because the
    /// reconstruction is linear. Positivity scalings are dropped.
    pub fn lincomb(&mut self, a: f64, other: &SolutionDofs, b: f64) {
        for (x, y) in self.hydro.iter_mut().zip(&other.hydro) {
            for v in 0..NHYDRO {
                x[v] = a * x[v] + b * y[v];
            }
        }
        lincomb_slice(&mut self.faces.bx, a, &other.faces.bx, b);
        lincomb_slice(&mut self.faces.by, a, &other.faces.by, b);
        lincomb_slice(&mut self.moments.alpha, a, &other.moments.alpha, b);
        lincomb_slice(&mut self.moments.beta, a, &other.moments.beta, b);
        for (x, y) in self.rt.iter_mut().zip(&other.rt) {
            lincomb_slice(x.a_slice_mut(), a, y.a_slice(), b);
            lincomb_slice(x.b_slice_mut(), a, y.b_slice(), b);
        }
        self.clear_scaling();
    }

    /// `self += dt * r`. The RT cache is *not* updated; call
    /// [`SolutionDofs::refresh_rt`] afterwards.
    pub fn add_residual(&mut self, dt: f64, r: &Residual) {
        for (x, y) in self.hydro.iter_mut().zip(&r.hydro) {
            for v in 0..NHYDRO {
                x[v] += dt * y[v];
            }
        }
        lincomb_slice(&mut self.faces.bx, 1.0, &r.faces.bx, dt);
        lincomb_slice(&mut self.faces.by, 1.0, &r.faces.by, dt);
        lincomb_slice(&mut self.moments.alpha, 1.0, &r.moments.alpha, dt);
        lincomb_slice(&mut self.moments.beta, 1.0, &r.moments.beta, dt);
        self.clear_scaling();
    }
}

/// Pull the in-plane field of `u` toward the cell mean of `rt` by θ.
#[inline]
pub(crate) fn scale_b(u: &mut [f64; NVARS], rt: &RtCoefficients, theta: f64) {
    let (mx, my) = (rt.a(0, 0), rt.b(0, 0));
    u[BX] = mx + theta * (u[BX] - mx);
    u[BY] = my + theta * (u[BY] - my);
}

#[inline]
fn lincomb_slice(x: &mut [f64], a: f64, y: &[f64], b: f64) {
    for (p, q) in x.iter_mut().zip(y) {
        *p = a * *p + b * q;
    }
}

/// Time derivatives of every degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub k: usize,
    pub hydro: Vec<[f64; NHYDRO]>,
    pub faces: FaceDofs,
    pub moments: CellMoments,
    /// Face quadrature points where HLLC fell back to HLL.
    pub hllc_fallbacks: usize,
}

impl Residual {
    pub fn zeros(grid: &Grid, k: usize) -> Self {
        Residual {
            k,
            hydro: vec![[0.0; NHYDRO]; grid.n_cells() * (k + 1) * (k + 1)],
            faces: FaceDofs::zeros(k, grid.n_vfaces(), grid.n_hfaces()),
            moments: CellMoments::zeros(k, grid.n_cells()),
            hllc_fallbacks: 0,
        }
    }

    /// Largest absolute entry over all slots.
    pub fn max_abs(&self) -> f64 {
        let h = self.hydro.iter().flatten();
        h.chain(&self.faces.bx)
            .chain(&self.faces.by)
            .chain(&self.moments.alpha)
            .chain(&self.moments.beta)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest slot weighted by the square root of its mass entry, i.e. the
    /// largest contribution to the L2 norm of the residual polynomials on
    /// the reference cell. High modes carry tiny masses, so raw coefficients
    /// amplify round-off by up to 1/m; this measure does not.
    pub fn max_weighted(&self) -> f64 {
        let k = self.k;
        let mut m = 0.0f64;
        for (n, slot) in self.hydro.iter().enumerate() {
            let mode = n % ((k + 1) * (k + 1));
            let w = (MASS[mode / (k + 1)] * MASS[mode % (k + 1)]).sqrt();
            for v in slot {
                m = m.max(w * v.abs());
            }
        }
        for (n, v) in self.faces.bx.iter().chain(&self.faces.by).enumerate() {
            m = m.max(MASS[n % (k + 1)].sqrt() * v.abs());
        }
        if k > 0 {
            let nm = n_moments(k);
            for (n, v) in self.moments.alpha.iter().enumerate() {
                let l = n % nm;
                m = m.max((MASS[l / (k + 1)] * MASS[l % (k + 1)]).sqrt() * v.abs());
            }
            for (n, v) in self.moments.beta.iter().enumerate() {
                let l = n % nm;
                m = m.max((MASS[l / k] * MASS[l % k]).sqrt() * v.abs());
            }
        }
        m
    }
}

/// Basis values at a quadrature rule's nodes.
#[derive(Debug, Clone)]
struct Tabulated {
    q: Quadrature1D,
    phi: Vec<[f64; 5]>,
    dphi: Vec<[f64; 5]>,
}

impl Tabulated {
    fn new(n: usize) -> Result<Self> {
        let q = basis::gauss_legendre(n)?;
        let b = basis::Basis1D::default();
        let phi = q.nodes.iter().map(|&x| b.values(x)).collect();
        let dphi = q.nodes.iter().map(|&x| b.derivatives(x)).collect();
        Ok(Tabulated { q, phi, dphi })
    }

    #[inline]
    fn len(&self) -> usize {
        self.q.nodes.len()
    }
}

const SIDE_WEST: usize = 0;
const SIDE_EAST: usize = 1;
const SIDE_SOUTH: usize = 2;
const SIDE_NORTH: usize = 3;

/// Discretisation context: mesh, degree, gas constant and solver choices.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub grid: Grid,
    pub k: usize,
    pub gamma: f64,
    pub flux: FluxKind,
    pub vertex_solver: VertexSolver,
    over_integrate: bool,
    face: Tabulated,
    vol: Tabulated,
    edge_m: [f64; 5],
    edge_p: [f64; 5],
}

/// States of every cell at the points the scheme needs.
struct Traces {
    stride: usize,
    nv: usize,
    nq: usize,
    data: Vec<[f64; NVARS]>,
}

impl Traces {
    #[inline]
    fn vol(&self, c: usize, m: usize, n: usize) -> &[f64; NVARS] {
        &self.data[c * self.stride + m * self.nv + n]
    }

    #[inline]
    fn side(&self, c: usize, side: usize, q: usize) -> &[f64; NVARS] {
        &self.data[c * self.stride + self.nv * self.nv + side * self.nq + q]
    }

    /// Corner 0..4 in (sw, se, nw, ne) order of the cell's own corners.
    #[inline]
    fn corner(&self, c: usize, corner: usize) -> &[f64; NVARS] {
        &self.data[c * self.stride + self.nv * self.nv + 4 * self.nq + corner]
    }
}

/// Riemann data at face quadrature points.
struct FaceData {
    nq: usize,
    vflux: Vec<[f64; NVARS]>,
    vez: Vec<f64>,
    hflux: Vec<[f64; NVARS]>,
    hez: Vec<f64>,
    fallbacks: usize,
}

#[inline]
fn corner_index(xi: f64, eta: f64) -> usize {
    (xi > 0.0) as usize + 2 * (eta > 0.0) as usize
}

impl Scheme {
    pub fn new(grid: Grid, k: usize, gamma: f64, flux: FluxKind) -> Result<Self> {
        check_degree(k)?;
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(MhdError::Config(format!("gamma must exceed 1, got {gamma}")));
        }
        let edge_p: [f64; 5] = EDGE_VALUE;
        let edge_m: [f64; 5] = std::array::from_fn(|i| basis::edge_value(i, -1));
        Ok(Scheme {
            grid,
            k,
            gamma,
            flux,
            vertex_solver: VertexSolver::Consistent,
            over_integrate: false,
            face: Tabulated::new(k + 1)?,
            vol: Tabulated::new(k + 1)?,
            edge_m,
            edge_p,
        })
    }

    pub fn with_vertex_solver(mut self, v: VertexSolver) -> Self {
        self.vertex_solver = v;
        self
    }

    /// Use (k+2)² Gauss points for the volume integrals instead of (k+1)².
    pub fn with_over_integration(mut self, on: bool) -> Result<Self> {
        self.over_integrate = on;
        self.vol = Tabulated::new(if on { self.k + 2 } else { self.k + 1 })?;
        Ok(self)
    }

    pub fn over_integration(&self) -> bool {
        self.over_integrate
    }

    pub fn zero_solution(&self) -> Result<SolutionDofs> {
        SolutionDofs::zeros(&self.grid, self.k)
    }

    fn check_shape(&self, u: &SolutionDofs) -> Result<()> {
        let g = &self.grid;
        if u.k != self.k
            || u.rt.len() != g.n_cells()
            || u.hydro.len() != g.n_cells() * (self.k + 1) * (self.k + 1)
            || u.faces.bx.len() != g.n_vfaces() * (self.k + 1)
            || u.faces.by.len() != g.n_hfaces() * (self.k + 1)
        {
            return Err(MhdError::Data(format!(
                "solution (degree {}) does not match the scheme (degree {}, {}x{})",
                u.k, self.k, g.nx, g.ny
            )));
        }
        Ok(())
    }

    fn traces(&self, u: &SolutionDofs) -> Result<Traces> {
        let g = &self.grid;
        let k = self.k;
        let nv = self.vol.len();
        let nq = self.face.len();
        let stride = nv * nv + 4 * nq + 4;
        let mut data = vec![[0.0; NVARS]; g.n_cells() * stride];
        let face_poly = |coef: &[f64], p: &[f64; 5]| -> f64 { (0..=k).map(|j| coef[j] * p[j]).sum() };
        for c in 0..g.n_cells() {
            let (ci, cj) = g.cell_ij(c);
            let cf = g.cell_faces(ci, cj);
            let theta = u.b_scale[c];
            let scaled = theta != 1.0;
            let rt = &u.rt[c];
            let out = &mut data[c * stride..(c + 1) * stride];
            let finish = |mut st: [f64; NVARS]| {
                if scaled {
                    scale_b(&mut st, rt, theta);
                }
                st
            };
            for m in 0..nv {
                for n in 0..nv {
                    out[m * nv + n] = finish(u.eval_with(c, &self.vol.phi[m], &self.vol.phi[n]));
                }
            }
            let base = nv * nv;
            let bxw = u.faces.bx_face(cf.west);
            let bxe = u.faces.bx_face(cf.east);
            let bys = u.faces.by_face(cf.south);
            let byn = u.faces.by_face(cf.north);
            for q in 0..nq {
                let p = &self.face.phi[q];
                let mut w = u.eval_with(c, &self.edge_m, p);
                let mut e = u.eval_with(c, &self.edge_p, p);
                let mut so = u.eval_with(c, p, &self.edge_m);
                let mut no = u.eval_with(c, p, &self.edge_p);
                if !scaled {
                    w[BX] = face_poly(bxw, p);
                    e[BX] = face_poly(bxe, p);
                    so[BY] = face_poly(bys, p);
                    no[BY] = face_poly(byn, p);
                }
                out[base + SIDE_WEST * nq + q] = finish(w);
                out[base + SIDE_EAST * nq + q] = finish(e);
                out[base + SIDE_SOUTH * nq + q] = finish(so);
                out[base + SIDE_NORTH * nq + q] = finish(no);
            }
            let base = base + 4 * nq;
            for corner in 0..4 {
                let px = if corner & 1 == 1 { &self.edge_p } else { &self.edge_m };
                let py = if corner & 2 == 2 { &self.edge_p } else { &self.edge_m };
                let mut st = u.eval_with(c, px, py);
                if !scaled {
                    st[BX] = face_poly(if corner & 1 == 1 { bxe } else { bxw }, py);
                    st[BY] = face_poly(if corner & 2 == 2 { byn } else { bys }, px);
                }
                out[base + corner] = finish(st);
            }
            for (idx, st) in out[nv * nv..].iter().enumerate() {
                if !is_admissible(st, self.gamma) {
                    let p = physics::pressure(st, self.gamma);
                    let what = if idx < 4 * nq { "face trace" } else { "corner" };
                    return Err(MhdError::Admissibility(format!(
                        "cell {c} ({ci}, {cj}): inadmissible {what} state (rho = {:.6e}, p = {:.6e})",
                        st[RHO], p
                    )));
                }
            }
        }
        Ok(Traces {
            stride,
            nv,
            nq,
            data,
        })
    }

    fn vertex_pass(&self, tr: &Traces) -> Vec<f64> {
        let g = &self.grid;
        let mut ez = vec![0.0; g.n_vertices()];
        for vj in 0..g.hrows() {
            for vi in 0..g.vcols() {
                let cells = g.vertex_cells(vi, vj);
                let st: [&[f64; NVARS]; 4] =
                    std::array::from_fn(|n| tr.corner(cells[n].cell, corner_index(cells[n].xi, cells[n].eta)));
                ez[g.vertex(vi, vj)] = riemann::vertex_ez_raw(self.flux, self.vertex_solver, st, self.gamma);
            }
        }
        ez
    }

    fn face_pass(&self, tr: &Traces) -> FaceData {
        let g = &self.grid;
        let nq = self.face.len();
        let mut fd = FaceData {
            nq,
            vflux: vec![[0.0; NVARS]; g.n_vfaces() * nq],
            vez: vec![0.0; g.n_vfaces() * nq],
            hflux: vec![[0.0; NVARS]; g.n_hfaces() * nq],
            hez: vec![0.0; g.n_hfaces() * nq],
            fallbacks: 0,
        };
        for fj in 0..g.ny {
            for fi in 0..g.vcols() {
                let f = g.vface(fi, fj);
                let [l, r] = g.vface_cells(fi, fj);
                let ls = if l.xi > 0.0 { SIDE_EAST } else { SIDE_WEST };
                let rs = if r.xi > 0.0 { SIDE_EAST } else { SIDE_WEST };
                for q in 0..nq {
                    let res = riemann::interface_flux_raw(
                        self.flux,
                        tr.side(l.cell, ls, q),
                        tr.side(r.cell, rs, q),
                        self.gamma,
                        Direction::X,
                    );
                    fd.vflux[f * nq + q] = res.flux;
                    fd.vez[f * nq + q] = res.ez;
                    fd.fallbacks += res.hllc_fallback as usize;
                }
            }
        }
        for fj in 0..g.hrows() {
            for fi in 0..g.nx {
                let f = g.hface(fi, fj);
                let [b, t] = g.hface_cells(fi, fj);
                let bs = if b.eta > 0.0 { SIDE_NORTH } else { SIDE_SOUTH };
                let ts = if t.eta > 0.0 { SIDE_NORTH } else { SIDE_SOUTH };
                for q in 0..nq {
                    let res = riemann::interface_flux_raw(
                        self.flux,
                        tr.side(b.cell, bs, q),
                        tr.side(t.cell, ts, q),
                        self.gamma,
                        Direction::Y,
                    );
                    fd.hflux[f * nq + q] = res.flux;
                    fd.hez[f * nq + q] = res.ez;
                    fd.fallbacks += res.hllc_fallback as usize;
                }
            }
        }
        fd
    }

    fn face_residual_into(&self, vez: &[f64], fd: &FaceData, out: &mut FaceDofs) {
        let g = &self.grid;
        let k = self.k;
        let nq = fd.nq;
        for fj in 0..g.ny {
            for fi in 0..g.vcols() {
                let f = g.vface(fi, fj);
                let (bot, top) = g.vface_vertices(fi, fj);
                for i in 0..=k {
                    let mut vol = 0.0;
                    for q in 0..nq {
                        vol += self.face.q.weights[q] * fd.vez[f * nq + q] * self.face.dphi[q][i];
                    }
                    let ends = vez[top] * self.edge_p[i] - vez[bot] * self.edge_m[i];
                    out.bx[f * (k + 1) + i] = (vol - ends) / (g.dy * MASS[i]);
                }
            }
        }
        for fj in 0..g.hrows() {
            for fi in 0..g.nx {
                let f = g.hface(fi, fj);
                let (left, right) = g.hface_vertices(fi, fj);
                for i in 0..=k {
                    let mut vol = 0.0;
                    for q in 0..nq {
                        vol += self.face.q.weights[q] * fd.hez[f * nq + q] * self.face.dphi[q][i];
                    }
                    let ends = vez[right] * self.edge_p[i] - vez[left] * self.edge_m[i];
                    out.by[f * (k + 1) + i] = (ends - vol) / (g.dx * MASS[i]);
                }
            }
        }
    }

    fn moment_residual_into(&self, tr: &Traces, fd: &FaceData, out: &mut CellMoments) {
        let k = self.k;
        if k == 0 {
            return;
        }
        let g = &self.grid;
        let nq = fd.nq;
        let nv = self.vol.len();
        let fw = &self.face.q.weights;
        let vw = &self.vol.q.weights;
        let mut ezv = vec![0.0; nv * nv];
        for c in 0..g.n_cells() {
            let (ci, cj) = g.cell_ij(c);
            let cf = g.cell_faces(ci, cj);
            for m in 0..nv {
                for n in 0..nv {
                    ezv[m * nv + n] = physics::ez(tr.vol(c, m, n));
                }
            }
            let alpha = out.alpha_cell_mut(c);
            for i in 0..k {
                for j in 0..=k {
                    let mut north = 0.0;
                    let mut south = 0.0;
                    for q in 0..nq {
                        north += fw[q] * fd.hez[cf.north * nq + q] * self.face.phi[q][i];
                        south += fw[q] * fd.hez[cf.south * nq + q] * self.face.phi[q][i];
                    }
                    let surf = north * self.edge_p[j] - south * self.edge_m[j];
                    let mut vol = 0.0;
                    for m in 0..nv {
                        for n in 0..nv {
                            vol += vw[m] * vw[n] * ezv[m * nv + n] * self.vol.phi[m][i] * self.vol.dphi[n][j];
                        }
                    }
                    alpha[alpha_index(k, i, j)] = (vol - surf) / (g.dy * MASS[i] * MASS[j]);
                }
            }
            let beta = out.beta_cell_mut(c);
            for i in 0..=k {
                for j in 0..k {
                    let mut east = 0.0;
                    let mut west = 0.0;
                    for q in 0..nq {
                        east += fw[q] * fd.vez[cf.east * nq + q] * self.face.phi[q][j];
                        west += fw[q] * fd.vez[cf.west * nq + q] * self.face.phi[q][j];
                    }
                    let surf = east * self.edge_p[i] - west * self.edge_m[i];
                    let mut vol = 0.0;
                    for m in 0..nv {
                        for n in 0..nv {
                            vol += vw[m] * vw[n] * ezv[m * nv + n] * self.vol.dphi[m][i] * self.vol.phi[n][j];
                        }
                    }
                    beta[beta_index(k, i, j)] = (surf - vol) / (g.dx * MASS[i] * MASS[j]);
                }
            }
        }
    }

    fn hydro_residual_into(&self, tr: &Traces, fd: &FaceData, out: &mut [[f64; NHYDRO]]) {
        let g = &self.grid;
        let k = self.k;
        let nm = (k + 1) * (k + 1);
        let nq = fd.nq;
        let nv = self.vol.len();
        let fw = &self.face.q.weights;
        let vw = &self.vol.q.weights;
        let (idx, idy) = (1.0 / g.dx, 1.0 / g.dy);
        // Volume fluxes pre-weighted: fx * w_m w_n / dx and fy * w_m w_n / dy.
        let mut fxv = vec![[0.0; NHYDRO]; nv * nv];
        let mut fyv = vec![[0.0; NHYDRO]; nv * nv];
        for c in 0..g.n_cells() {
            let (ci, cj) = g.cell_ij(c);
            let cf = g.cell_faces(ci, cj);
            for m in 0..nv {
                for n in 0..nv {
                    let st = tr.vol(c, m, n);
                    let fx = flux_raw(st, self.gamma, Direction::X);
                    let fy = flux_raw(st, self.gamma, Direction::Y);
                    let w = vw[m] * vw[n];
                    for (v, &comp) in HYDRO_COMPONENTS.iter().enumerate() {
                        fxv[m * nv + n][v] = fx[comp] * w * idx;
                        fyv[m * nv + n][v] = fy[comp] * w * idy;
                    }
                }
            }
            let res = &mut out[c * nm..(c + 1) * nm];
            for p in 0..=k {
                for q in 0..=k {
                    let mut acc = [0.0; NHYDRO];
                    if k > 0 {
                        for m in 0..nv {
                            for n in 0..nv {
                                let a = self.vol.dphi[m][p] * self.vol.phi[n][q];
                                let b = self.vol.phi[m][p] * self.vol.dphi[n][q];
                                let fx = &fxv[m * nv + n];
                                let fy = &fyv[m * nv + n];
                                for v in 0..NHYDRO {
                                    acc[v] += a * fx[v] + b * fy[v];
                                }
                            }
                        }
                    }
                    for s in 0..nq {
                        let ew = fw[s] * self.face.phi[s][q] * idx;
                        let ns = fw[s] * self.face.phi[s][p] * idy;
                        let fe = &fd.vflux[cf.east * nq + s];
                        let fwst = &fd.vflux[cf.west * nq + s];
                        let fnn = &fd.hflux[cf.north * nq + s];
                        let fs = &fd.hflux[cf.south * nq + s];
                        for (v, &comp) in HYDRO_COMPONENTS.iter().enumerate() {
                            acc[v] -= ew * (fe[comp] * self.edge_p[p] - fwst[comp] * self.edge_m[p]);
                            acc[v] -= ns * (fnn[comp] * self.edge_p[q] - fs[comp] * self.edge_m[q]);
                        }
                    }
                    let inv = 1.0 / (MASS[p] * MASS[q]);
                    let slot = &mut res[p * (k + 1) + q];
                    for v in 0..NHYDRO {
                        slot[v] = acc[v] * inv;
                    }
                }
            }
        }
    }

    /// Electric field at every vertex, indexed like [`Grid::vertex`].
    pub fn compute_vertex_ez(&self, u: &SolutionDofs) -> Result<Vec<f64>> {
        self.check_shape(u)?;
        let tr = self.traces(u)?;
        Ok(self.vertex_pass(&tr))
    }

    /// Time derivatives of the face polynomials given vertex fields.
    pub fn face_residual_b(&self, u: &SolutionDofs, vertex_ez: &[f64]) -> Result<FaceDofs> {
        self.check_shape(u)?;
        if vertex_ez.len() != self.grid.n_vertices() {
            return Err(MhdError::Data(format!(
                "expected {} vertex values, got {}",
                self.grid.n_vertices(),
                vertex_ez.len()
            )));
        }
        let tr = self.traces(u)?;
        let fd = self.face_pass(&tr);
        let mut out = FaceDofs::zeros(self.k, self.grid.n_vfaces(), self.grid.n_hfaces());
        self.face_residual_into(vertex_ez, &fd, &mut out);
        Ok(out)
    }

    /// Time derivatives of the cell moments α, β.
    pub fn moment_residual(&self, u: &SolutionDofs) -> Result<CellMoments> {
        self.check_shape(u)?;
        let tr = self.traces(u)?;
        let fd = self.face_pass(&tr);
        let mut out = CellMoments::zeros(self.k, self.grid.n_cells());
        self.moment_residual_into(&tr, &fd, &mut out);
        Ok(out)
    }

    /// Time derivatives of the hydrodynamic modes.
    pub fn hydro_residual(&self, u: &SolutionDofs) -> Result<Vec<[f64; NHYDRO]>> {
        self.check_shape(u)?;
        let tr = self.traces(u)?;
        let fd = self.face_pass(&tr);
        let mut out = vec![[0.0; NHYDRO]; u.hydro.len()];
        self.hydro_residual_into(&tr, &fd, &mut out);
        Ok(out)
    }

    /// Full residual: vertices, then faces, then cells.
    pub fn assemble(&self, u: &SolutionDofs) -> Result<Residual> {
        self.check_shape(u)?;
        let tr = self.traces(u)?;
        let vez = self.vertex_pass(&tr);
        let fd = self.face_pass(&tr);
        let mut r = Residual::zeros(&self.grid, self.k);
        self.face_residual_into(&vez, &fd, &mut r.faces);
        self.moment_residual_into(&tr, &fd, &mut r.moments);
        self.hydro_residual_into(&tr, &fd, &mut r.hydro);
        r.hllc_fallbacks = fd.fallbacks;
        Ok(r)
    }

    /// L2 projection of pointwise conserved hydro data [ρ, m, E, B_z] with
    /// (k+2)² Gauss points per cell.
    pub fn project_hydro(&self, f: impl Fn(f64, f64) -> [f64; NHYDRO]) -> Result<Vec<[f64; NHYDRO]>> {
        project_hydro(&self.grid, self.k, f)
    }
}

/// L2 projection of pointwise hydro data onto Q_k, (k+2)² Gauss points.
pub fn project_hydro(
    grid: &Grid,
    k: usize,
    f: impl Fn(f64, f64) -> [f64; NHYDRO],
) -> Result<Vec<[f64; NHYDRO]>> {
    check_degree(k)?;
    let t = Tabulated::new(k + 2)?;
    let n = t.len();
    let nm = (k + 1) * (k + 1);
    let mut out = vec![[0.0; NHYDRO]; grid.n_cells() * nm];
    let mut vals = vec![[0.0; NHYDRO]; n * n];
    for c in 0..grid.n_cells() {
        let (ci, cj) = grid.cell_ij(c);
        for m in 0..n {
            for l in 0..n {
                let (x, y) = grid.to_physical(ci, cj, t.q.nodes[m], t.q.nodes[l]);
                vals[m * n + l] = f(x, y);
            }
        }
        for i in 0..=k {
            for j in 0..=k {
                let mut acc = [0.0; NHYDRO];
                for m in 0..n {
                    for l in 0..n {
                        let w = t.q.weights[m] * t.q.weights[l] * t.phi[m][i] * t.phi[l][j];
                        for v in 0..NHYDRO {
                            acc[v] += w * vals[m * n + l][v];
                        }
                    }
                }
                let inv = 1.0 / (MASS[i] * MASS[j]);
                out[c * nm + i * (k + 1) + j] = acc.map(|a| a * inv);
            }
        }
    }
    Ok(out)
}

/// The six hydro components of a full conserved state.
#[inline]
pub fn hydro_part(u: &[f64; NVARS]) -> [f64; NHYDRO] {
    [u[RHO], u[MX], u[MY], u[MZ], u[EN], u[BZ]]
}
