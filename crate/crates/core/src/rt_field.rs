//! Magnetic-field unknowns and the Raviart-Thomas reconstruction.
//!
//! A vertical face carries `b_x(η) = Σ_j a_j φ_j(η)` and a horizontal face
//! `b_y(ξ) = Σ_j b_j φ_j(ξ)`, both oriented with increasing global coordinate.
//! Each cell additionally stores the moments `α_ij` (i < k, j ≤ k) and
//! `β_ij` (i ≤ k, j < k). Together they determine a unique field
//! `B_x ∈ Q_{k+1,k}`, `B_y ∈ Q_{k,k+1}` in each cell.

use crate::basis::{self, edge_value, DERIV, MASS};
use crate::error::{MhdError, Result};
use crate::grid::{Boundary, Grid};

pub const MAX_DEGREE: usize = 3;

pub(crate) fn check_degree(k: usize) -> Result<()> {
    if k > MAX_DEGREE {
        return Err(MhdError::Domain(format!(
            "polynomial degree {k} not supported (0..={MAX_DEGREE})"
        )));
    }
    Ok(())
}

/// Number of α (or β) moments per cell.
#[inline]
pub fn n_moments(k: usize) -> usize {
    k * (k + 1)
}

/// Normal-component polynomials on all faces.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceDofs {
    pub k: usize,
    /// `bx[f * (k + 1) + j]` = a_j on vertical face f.
    pub bx: Vec<f64>,
    /// `by[f * (k + 1) + j]` = b_j on horizontal face f.
    pub by: Vec<f64>,
}

impl FaceDofs {
    pub fn zeros(k: usize, n_vfaces: usize, n_hfaces: usize) -> Self {
        FaceDofs {
            k,
            bx: vec![0.0; n_vfaces * (k + 1)],
            by: vec![0.0; n_hfaces * (k + 1)],
        }
    }

    #[inline]
    pub fn bx_face(&self, f: usize) -> &[f64] {
        &self.bx[f * (self.k + 1)..(f + 1) * (self.k + 1)]
    }

    #[inline]
    pub fn by_face(&self, f: usize) -> &[f64] {
        &self.by[f * (self.k + 1)..(f + 1) * (self.k + 1)]
    }

    /// Evaluate b_x on vertical face f at tangential coordinate s.
    #[inline]
    pub fn eval_bx(&self, f: usize, s: f64) -> f64 {
        eval_1d(self.bx_face(f), s)
    }

    #[inline]
    pub fn eval_by(&self, f: usize, s: f64) -> f64 {
        eval_1d(self.by_face(f), s)
    }
}

#[inline]
pub(crate) fn eval_1d(c: &[f64], s: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(j, &v)| v * basis::phi_raw(j, s))
        .sum()
}

/// Interior moments α, β of all cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMoments {
    pub k: usize,
    /// `alpha[c * k(k+1) + i * (k + 1) + j]`, i < k, j ≤ k.
    pub alpha: Vec<f64>,
    /// `beta[c * k(k+1) + i * k + j]`, i ≤ k, j < k.
    pub beta: Vec<f64>,
}

impl CellMoments {
    pub fn zeros(k: usize, n_cells: usize) -> Self {
        CellMoments {
            k,
            alpha: vec![0.0; n_cells * n_moments(k)],
            beta: vec![0.0; n_cells * n_moments(k)],
        }
    }

    #[inline]
    pub fn alpha_cell(&self, c: usize) -> &[f64] {
        let n = n_moments(self.k);
        &self.alpha[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn beta_cell(&self, c: usize) -> &[f64] {
        let n = n_moments(self.k);
        &self.beta[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn alpha_cell_mut(&mut self, c: usize) -> &mut [f64] {
        let n = n_moments(self.k);
        &mut self.alpha[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn beta_cell_mut(&mut self, c: usize) -> &mut [f64] {
        let n = n_moments(self.k);
        &mut self.beta[c * n..(c + 1) * n]
    }
}

#[inline]
pub fn alpha_index(k: usize, i: usize, j: usize) -> usize {
    i * (k + 1) + j
}

#[inline]
pub fn beta_index(k: usize, i: usize, j: usize) -> usize {
    i * k + j
}

/// Side of the reference cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    West,
    East,
    South,
    North,
}

/// Tensor-product coefficients of the reconstructed cell field:
/// `B_x = Σ a_ij φ_i(ξ) φ_j(η)` with i ≤ k+1, j ≤ k and
/// `B_y = Σ b_ij φ_i(ξ) φ_j(η)` with i ≤ k, j ≤ k+1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtCoefficients {
    pub k: usize,
    a: [f64; 20],
    b: [f64; 20],
}

impl RtCoefficients {
    pub fn zeros(k: usize) -> Self {
        RtCoefficients {
            k,
            a: [0.0; 20],
            b: [0.0; 20],
        }
    }

    /// Uniform field (c, d).
    pub fn constant(k: usize, c: f64, d: f64) -> Self {
        let mut r = Self::zeros(k);
        *r.a_mut(0, 0) = c;
        *r.b_mut(0, 0) = d;
        r
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.k + 1) + j]
    }

    #[inline]
    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.b[i * (self.k + 2) + j]
    }

    #[inline]
    pub fn a_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * (self.k + 1) + j]
    }

    #[inline]
    pub fn b_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.b[i * (self.k + 2) + j]
    }

    /// Used coefficient slots of a and b.
    #[inline]
    pub fn a_slice(&self) -> &[f64] {
        &self.a[..(self.k + 2) * (self.k + 1)]
    }

    #[inline]
    pub fn b_slice(&self) -> &[f64] {
        &self.b[..(self.k + 1) * (self.k + 2)]
    }

    #[inline]
    pub fn a_slice_mut(&mut self) -> &mut [f64] {
        let n = (self.k + 2) * (self.k + 1);
        &mut self.a[..n]
    }

    #[inline]
    pub fn b_slice_mut(&mut self) -> &mut [f64] {
        let n = (self.k + 1) * (self.k + 2);
        &mut self.b[..n]
    }

    /// (B_x, B_y) at reference point (ξ, η).
    pub fn eval(&self, xi: f64, eta: f64) -> (f64, f64) {
        let k = self.k;
        let px: [f64; 5] = std::array::from_fn(|i| if i <= k + 1 { basis::phi_raw(i, xi) } else { 0.0 });
        let py: [f64; 5] = std::array::from_fn(|j| if j <= k + 1 { basis::phi_raw(j, eta) } else { 0.0 });
        self.eval_with(&px, &py)
    }

    /// Evaluation with precomputed basis values φ_i(ξ), φ_j(η), i, j ≤ k+1.
    #[inline]
    pub fn eval_with(&self, px: &[f64], py: &[f64]) -> (f64, f64) {
        let k = self.k;
        let mut bx = 0.0;
        for i in 0..=k + 1 {
            let mut row = 0.0;
            for j in 0..=k {
                row += self.a[i * (k + 1) + j] * py[j];
            }
            bx += row * px[i];
        }
        let mut by = 0.0;
        for i in 0..=k {
            let mut row = 0.0;
            for j in 0..=k + 1 {
                row += self.b[i * (k + 2) + j] * py[j];
            }
            by += row * px[i];
        }
        (bx, by)
    }

    /// Modal coefficients (k + 1 of them) of the normal component restricted
    /// to a side: B_x on west/east, B_y on south/north.
    pub fn trace(&self, side: Side) -> [f64; 4] {
        let k = self.k;
        let mut out = [0.0; 4];
        match side {
            Side::West | Side::East => {
                let s = if side == Side::East { 1 } else { -1 };
                for (j, o) in out.iter_mut().enumerate().take(k + 1) {
                    *o = (0..=k + 1).map(|i| self.a(i, j) * edge_value(i, s)).sum();
                }
            }
            Side::South | Side::North => {
                let s = if side == Side::North { 1 } else { -1 };
                for (i, o) in out.iter_mut().enumerate().take(k + 1) {
                    *o = (0..=k + 1).map(|j| self.b(i, j) * edge_value(j, s)).sum();
                }
            }
        }
        out
    }

    /// Modal coefficients (k + 2 of them) of the tangential component on a
    /// side: B_y on west/east (in η), B_x on south/north (in ξ).
    pub fn tangential_trace(&self, side: Side) -> [f64; 5] {
        let k = self.k;
        let mut out = [0.0; 5];
        match side {
            Side::West | Side::East => {
                let s = if side == Side::East { 1 } else { -1 };
                for (j, o) in out.iter_mut().enumerate().take(k + 2) {
                    *o = (0..=k).map(|i| self.b(i, j) * edge_value(i, s)).sum();
                }
            }
            Side::South | Side::North => {
                let s = if side == Side::North { 1 } else { -1 };
                for (i, o) in out.iter_mut().enumerate().take(k + 2) {
                    *o = (0..=k).map(|j| self.a(i, j) * edge_value(j, s)).sum();
                }
            }
        }
        out
    }

    /// The moments α, β this field induces (orthogonality makes them plain
    /// coefficient reads).
    pub fn moments(&self) -> (Vec<f64>, Vec<f64>) {
        let k = self.k;
        let mut alpha = vec![0.0; n_moments(k)];
        let mut beta = vec![0.0; n_moments(k)];
        for i in 0..k {
            for j in 0..=k {
                alpha[alpha_index(k, i, j)] = self.a(i, j);
            }
        }
        for i in 0..=k {
            for j in 0..k {
                beta[beta_index(k, i, j)] = self.b(i, j);
            }
        }
        (alpha, beta)
    }

    /// Coefficients of ∇·B in Q_{k,k}; entry `p * (k + 1) + q` multiplies
    /// φ_p(ξ) φ_q(η). Physical derivatives, so dx and dy enter.
    pub fn divergence_coeffs(&self, dx: f64, dy: f64) -> Vec<f64> {
        let k = self.k;
        let mut out = vec![0.0; (k + 1) * (k + 1)];
        for p in 0..=k {
            for q in 0..=k {
                let mut dxb = 0.0;
                for i in p + 1..=k + 1 {
                    dxb += self.a(i, q) * DERIV[i][p];
                }
                let mut dyb = 0.0;
                for j in q + 1..=k + 1 {
                    dyb += self.b(p, j) * DERIV[j][q];
                }
                out[p * (k + 1) + q] = dxb / dx + dyb / dy;
            }
        }
        out
    }

    /// L2 norm of ∇·B over the reference cell, `sqrt(Σ m_p m_q d_pq²)`.
    /// Less sensitive to round-off than the raw coefficients, whose top
    /// modes are scaled up by the inverse basis masses.
    pub fn divergence_l2(&self, dx: f64, dy: f64) -> f64 {
        let k = self.k;
        let c = self.divergence_coeffs(dx, dy);
        let mut s = 0.0;
        for p in 0..=k {
            for q in 0..=k {
                s += MASS[p] * MASS[q] * c[p * (k + 1) + q].powi(2);
            }
        }
        s.sqrt()
    }

    /// Pointwise divergence at (ξ, η).
    pub fn divergence_at(&self, xi: f64, eta: f64, dx: f64, dy: f64) -> f64 {
        let k = self.k;
        let c = self.divergence_coeffs(dx, dy);
        let mut s = 0.0;
        for p in 0..=k {
            for q in 0..=k {
                s += c[p * (k + 1) + q] * basis::phi_raw(p, xi) * basis::phi_raw(q, eta);
            }
        }
        s
    }
}

/// Solve the two-point trace conditions for the two unknown rows of a 1-D
/// modal expansion of degree k+1 whose lowest k coefficients are given.
/// `known[i]` for i < k, returns coefficients k and k+1.
#[inline]
fn complete_rows(k: usize, known: &[f64], minus: f64, plus: f64) -> (f64, f64) {
    let half_sum = 0.5 * (plus + minus);
    let half_diff = 0.5 * (plus - minus);
    let mut even = half_sum;
    let mut odd = half_diff;
    for (i, &v) in known.iter().enumerate().take(k) {
        if i % 2 == 0 {
            even -= v * edge_value(i, 1);
        } else {
            odd -= v * edge_value(i, 1);
        }
    }
    let (row_k, row_k1) = if k % 2 == 0 {
        (even / edge_value(k, 1), odd / edge_value(k + 1, 1))
    } else {
        (odd / edge_value(k, 1), even / edge_value(k + 1, 1))
    };
    (row_k, row_k1)
}

/// RT reconstruction from face polynomials and cell moments.
///
/// `bxm`/`bxp` are the west/east face coefficients, `bym`/`byp` the
/// south/north ones (k + 1 each), `alpha`/`beta` the cell moments
/// (k(k+1) each, layout of [`alpha_index`] / [`beta_index`]).
pub fn rt_reconstruct(
    k: usize,
    bxm: &[f64],
    bxp: &[f64],
    bym: &[f64],
    byp: &[f64],
    alpha: &[f64],
    beta: &[f64],
) -> Result<RtCoefficients> {
    check_degree(k)?;
    let nf = k + 1;
    let nm = n_moments(k);
    if bxm.len() != nf || bxp.len() != nf || bym.len() != nf || byp.len() != nf {
        return Err(MhdError::Domain(format!(
            "face polynomial length must be {nf} for degree {k}"
        )));
    }
    if alpha.len() != nm || beta.len() != nm {
        return Err(MhdError::Domain(format!(
            "moment count must be {nm} for degree {k}"
        )));
    }
    Ok(rt_reconstruct_raw(k, bxm, bxp, bym, byp, alpha, beta))
}

#[inline]
pub(crate) fn rt_reconstruct_raw(
    k: usize,
    bxm: &[f64],
    bxp: &[f64],
    bym: &[f64],
    byp: &[f64],
    alpha: &[f64],
    beta: &[f64],
) -> RtCoefficients {
    let mut r = RtCoefficients::zeros(k);
    let mut col = [0.0; 4];
    for j in 0..=k {
        for i in 0..k {
            col[i] = alpha[alpha_index(k, i, j)];
            *r.a_mut(i, j) = col[i];
        }
        let (rk, rk1) = complete_rows(k, &col, bxm[j], bxp[j]);
        *r.a_mut(k, j) = rk;
        *r.a_mut(k + 1, j) = rk1;
    }
    for i in 0..=k {
        for j in 0..k {
            col[j] = beta[beta_index(k, i, j)];
            *r.b_mut(i, j) = col[j];
        }
        let (rk, rk1) = complete_rows(k, &col, bym[i], byp[i]);
        *r.b_mut(i, k) = rk;
        *r.b_mut(i, k + 1) = rk1;
    }
    r
}

/// Reconstruct the field of cell `c` from the global containers.
#[inline]
pub fn reconstruct_cell(grid: &Grid, faces: &FaceDofs, moments: &CellMoments, c: usize) -> RtCoefficients {
    let (i, j) = grid.cell_ij(c);
    let cf = grid.cell_faces(i, j);
    rt_reconstruct_raw(
        faces.k,
        faces.bx_face(cf.west),
        faces.bx_face(cf.east),
        faces.by_face(cf.south),
        faces.by_face(cf.north),
        moments.alpha_cell(c),
        moments.beta_cell(c),
    )
}

/// Samples of a potential ψ at the (k+2)×(k+2) GLL nodes of every cell, laid
/// out as `samples[c * (k+2)² + m * (k+2) + n]` with m the ξ index and n the
/// η index.
pub fn sample_potential(grid: &Grid, k: usize, psi: impl Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
    check_degree(k)?;
    let q = basis::gauss_lobatto(k + 2)?;
    let np = k + 2;
    let mut out = vec![0.0; grid.n_cells() * np * np];
    for c in 0..grid.n_cells() {
        let (i, j) = grid.cell_ij(c);
        for m in 0..np {
            for n in 0..np {
                let (x, y) = grid.to_physical(i, j, q.nodes[m], q.nodes[n]);
                out[c * np * np + m * np + n] = psi(x, y);
            }
        }
    }
    Ok(out)
}

/// Divergence-free face and moment data from a continuous piecewise Q_{k+1}
/// potential given by its GLL samples (see [`sample_potential`]).
///
/// `B_x = ∂ψ/∂y` and `B_y = -∂ψ/∂x` are differentiated exactly through the
/// GLL differentiation matrix. Shared edge samples must agree up to an
/// additive constant per edge, which lets linear potentials wrap around
/// periodic boundaries.
pub fn project_initial(grid: &Grid, k: usize, samples: &[f64]) -> Result<(FaceDofs, CellMoments)> {
    check_degree(k)?;
    let np = k + 2;
    let q = basis::gauss_lobatto(np)?;
    let d = basis::diff_matrix(&q.nodes)?;
    if samples.len() != grid.n_cells() * np * np {
        return Err(MhdError::Data(format!(
            "expected {} potential samples, got {}",
            grid.n_cells() * np * np,
            samples.len()
        )));
    }
    let s = |c: usize, m: usize, n: usize| samples[c * np * np + m * np + n];
    let scale = samples.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);

    // Edge consistency check.
    let check_edge = |a: &[f64], b: &[f64], what: &str| -> Result<()> {
        let off = a[0] - b[0];
        for (x, y) in a.iter().zip(b) {
            if ((x - y) - off).abs() > 1e-11 * scale {
                return Err(MhdError::Data(format!(
                    "potential samples disagree along {what}: {x} vs {y}"
                )));
            }
        }
        Ok(())
    };

    let mut faces = FaceDofs::zeros(k, grid.n_vfaces(), grid.n_hfaces());
    let mut moments = CellMoments::zeros(k, grid.n_cells());
    let mut col = vec![0.0; np];
    let mut other = vec![0.0; np];

    // Vertical faces: derivative along η of the edge column.
    for fj in 0..grid.ny {
        for fi in 0..grid.vcols() {
            let [left, right] = grid.vface_cells(fi, fj);
            let boundary = grid.bc_x == Boundary::Outflow && (fi == 0 || fi == grid.nx);
            for n in 0..np {
                col[n] = if fi == grid.nx {
                    s(left.cell, np - 1, n)
                } else {
                    s(right.cell, 0, n)
                };
            }
            if !boundary {
                for n in 0..np {
                    other[n] = s(left.cell, np - 1, n);
                }
                check_edge(&col, &other, "a vertical face")?;
            }
            let deriv = d.apply(&col);
            let f = grid.vface(fi, fj);
            for jm in 0..=k {
                let mut acc = 0.0;
                for n in 0..np {
                    acc += q.weights[n] * deriv[n] / grid.dy * basis::phi_raw(jm, q.nodes[n]);
                }
                faces.bx[f * (k + 1) + jm] = acc / MASS[jm];
            }
        }
    }

    // Horizontal faces: B_y = -∂ψ/∂x along the edge row.
    let mut row = vec![0.0; np];
    for fj in 0..grid.hrows() {
        for fi in 0..grid.nx {
            let [below, above] = grid.hface_cells(fi, fj);
            let donor_is_below = fj == grid.ny;
            for m in 0..np {
                row[m] = if donor_is_below {
                    s(below.cell, m, np - 1)
                } else {
                    s(above.cell, m, 0)
                };
            }
            let interior = !(grid.bc_y == Boundary::Outflow && (fj == 0 || fj == grid.ny));
            if interior {
                for m in 0..np {
                    other[m] = s(below.cell, m, np - 1);
                    col[m] = s(above.cell, m, 0);
                }
                check_edge(&col, &other, "a horizontal face")?;
            }
            let deriv = d.apply(&row);
            let f = grid.hface(fi, fj);
            for im in 0..=k {
                let mut acc = 0.0;
                for m in 0..np {
                    acc += -q.weights[m] * deriv[m] / grid.dx * basis::phi_raw(im, q.nodes[m]);
                }
                faces.by[f * (k + 1) + im] = acc / MASS[im];
            }
        }
    }

    // Moments with (k+2)² GLL quadrature.
    if k > 0 {
        let mut bx = vec![0.0; np * np];
        let mut by = vec![0.0; np * np];
        for c in 0..grid.n_cells() {
            for m in 0..np {
                for n in 0..np {
                    let mut dy_psi = 0.0;
                    let mut dx_psi = 0.0;
                    for l in 0..np {
                        dy_psi += d.get(n, l) * s(c, m, l);
                        dx_psi += d.get(m, l) * s(c, l, n);
                    }
                    bx[m * np + n] = dy_psi / grid.dy;
                    by[m * np + n] = -dx_psi / grid.dx;
                }
            }
            let alpha = moments.alpha_cell_mut(c);
            for i in 0..k {
                for j in 0..=k {
                    let mut acc = 0.0;
                    for m in 0..np {
                        for n in 0..np {
                            acc += q.weights[m]
                                * q.weights[n]
                                * bx[m * np + n]
                                * basis::phi_raw(i, q.nodes[m])
                                * basis::phi_raw(j, q.nodes[n]);
                        }
                    }
                    alpha[alpha_index(k, i, j)] = acc / (MASS[i] * MASS[j]);
                }
            }
            let beta = moments.beta_cell_mut(c);
            for i in 0..=k {
                for j in 0..k {
                    let mut acc = 0.0;
                    for m in 0..np {
                        for n in 0..np {
                            acc += q.weights[m]
                                * q.weights[n]
                                * by[m * np + n]
                                * basis::phi_raw(i, q.nodes[m])
                                * basis::phi_raw(j, q.nodes[n]);
                        }
                    }
                    beta[beta_index(k, i, j)] = acc / (MASS[i] * MASS[j]);
                }
            }
        }
    }
    Ok((faces, moments))
}

/// Face and moment data by direct L2 projection of a pointwise field. Exact
/// (and divergence-free) when the field is divergence-free and lies in the
/// RT space cell by cell, e.g. piecewise constants with jumps only in the
/// tangential component across mesh lines.
pub fn project_field(
    grid: &Grid,
    k: usize,
    field: impl Fn(f64, f64) -> (f64, f64),
) -> Result<(FaceDofs, CellMoments)> {
    check_degree(k)?;
    let q = basis::gauss_legendre(k + 2)?;
    let mut faces = FaceDofs::zeros(k, grid.n_vfaces(), grid.n_hfaces());
    let mut moments = CellMoments::zeros(k, grid.n_cells());
    for fj in 0..grid.ny {
        for fi in 0..grid.vcols() {
            let f = grid.vface(fi, fj);
            let x = grid.xmin + fi as f64 * grid.dx;
            for jm in 0..=k {
                let mut acc = 0.0;
                for (&s, &w) in q.nodes.iter().zip(&q.weights) {
                    let y = grid.ymin + (fj as f64 + 0.5 + s) * grid.dy;
                    acc += w * field(x, y).0 * basis::phi_raw(jm, s);
                }
                faces.bx[f * (k + 1) + jm] = acc / MASS[jm];
            }
        }
    }
    for fj in 0..grid.hrows() {
        for fi in 0..grid.nx {
            let f = grid.hface(fi, fj);
            let y = grid.ymin + fj as f64 * grid.dy;
            for im in 0..=k {
                let mut acc = 0.0;
                for (&s, &w) in q.nodes.iter().zip(&q.weights) {
                    let x = grid.xmin + (fi as f64 + 0.5 + s) * grid.dx;
                    acc += w * field(x, y).1 * basis::phi_raw(im, s);
                }
                faces.by[f * (k + 1) + im] = acc / MASS[im];
            }
        }
    }
    if k > 0 {
        for c in 0..grid.n_cells() {
            let (ci, cj) = grid.cell_ij(c);
            let mut vals = Vec::with_capacity(q.len() * q.len());
            for &xi in &q.nodes {
                for &eta in &q.nodes {
                    let (x, y) = grid.to_physical(ci, cj, xi, eta);
                    vals.push(field(x, y));
                }
            }
            let n = q.len();
            let integ = |comp: usize, i: usize, j: usize| {
                let mut acc = 0.0;
                for m in 0..n {
                    for l in 0..n {
                        let v = if comp == 0 { vals[m * n + l].0 } else { vals[m * n + l].1 };
                        acc += q.weights[m]
                            * q.weights[l]
                            * v
                            * basis::phi_raw(i, q.nodes[m])
                            * basis::phi_raw(j, q.nodes[l]);
                    }
                }
                acc / (MASS[i] * MASS[j])
            };
            for i in 0..k {
                for j in 0..=k {
                    moments.alpha_cell_mut(c)[alpha_index(k, i, j)] = integ(0, i, j);
                }
            }
            for i in 0..=k {
                for j in 0..k {
                    moments.beta_cell_mut(c)[beta_index(k, i, j)] = integ(1, i, j);
                }
            }
        }
    }
    Ok((faces, moments))
}
