//! Output writers. All floating-point values are printed with 17
//! significant digits so they read back exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dg::SolutionDofs;
use crate::diagnostics::DiagnosticSample;
use crate::error::{MhdError, Result};
use crate::grid::Grid;
use crate::physics::{to_primitive, ConservedState};
use crate::problems::rstube_components;

/// Column names of the primitive output.
pub const FIELD_NAMES: [&str; 9] = ["rho", "vx", "vy", "vz", "p", "Bx", "By", "Bz", "divB"];

#[inline]
fn g17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| MhdError::io(dir, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| MhdError::io(path, e))
}

/// [ρ, v, p, B, ∇·B] from a conserved state and a divergence value.
fn primitive_row(u: &[f64; 8], gamma: f64, div: f64) -> [f64; 9] {
    let w = to_primitive(&ConservedState(*u), gamma);
    let (v, b) = (w.v, w.b);
    [w.rho, v[0], v[1], v[2], w.p, b[0], b[1], b[2], div]
}

/// Cell averages in VTK legacy ASCII structured-points format: one scalar
/// per variable plus the cell-mean divergence, row-major with x fastest.
pub fn vtk_averages(u: &SolutionDofs, grid: &Grid, gamma: f64) -> String {
    let n = grid.n_cells();
    let rows: Vec<[f64; 9]> = (0..n)
        .map(|c| primitive_row(&u.mean_state(c), gamma, u.rt[c].divergence_coeffs(grid.dx, grid.dy)[0]))
        .collect();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\ncell averages\nASCII\nDATASET STRUCTURED_POINTS\n");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", grid.nx + 1, grid.ny + 1);
    let _ = writeln!(s, "ORIGIN {} {} 0", g17(grid.xmin), g17(grid.ymin));
    let _ = writeln!(s, "SPACING {} {} 1", g17(grid.dx), g17(grid.dy));
    let _ = writeln!(s, "CELL_DATA {n}");
    for (v, name) in FIELD_NAMES.iter().enumerate() {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for r in &rows {
            s.push_str(&g17(r[v]));
            s.push('\n');
        }
    }
    s
}

pub fn write_vtk_averages(u: &SolutionDofs, grid: &Grid, gamma: f64, path: &Path) -> Result<()> {
    write_file(path, &vtk_averages(u, grid, gamma))
}

/// Read back one scalar block of a file written by [`vtk_averages`].
pub fn read_vtk_scalar(text: &str, name: &str) -> Option<Vec<f64>> {
    let header = format!("SCALARS {name} double 1");
    let mut lines = text.lines().skip_while(|l| *l != header).skip(2);
    let count: usize = text.lines().find_map(|l| l.strip_prefix("CELL_DATA "))?.trim().parse().ok()?;
    (0..count).map(|_| lines.next()?.trim().parse().ok()).collect()
}

/// Reference coordinate of lattice point `m` of `n` inside a cell.
fn lattice(m: usize, n: usize) -> f64 {
    -0.5 + (m as f64 + 0.5) / n as f64
}

/// Solution sampled on a (k+2) x (k+2) lattice in every cell.
pub fn samples_csv(u: &SolutionDofs, grid: &Grid, gamma: f64) -> String {
    let np = u.k + 2;
    let mut s = String::from("x,y,rho,vx,vy,vz,p,Bx,By,Bz,divB\n");
    for c in 0..grid.n_cells() {
        let (i, j) = grid.cell_ij(c);
        for n in 0..np {
            for m in 0..np {
                let (xi, eta) = (lattice(m, np), lattice(n, np));
                let (x, y) = grid.to_physical(i, j, xi, eta);
                let st = u.eval(c, xi, eta);
                let row = primitive_row(&st, gamma, u.rt[c].divergence_at(xi, eta, grid.dx, grid.dy));
                s.push_str(&g17(x));
                s.push(',');
                s.push_str(&g17(y));
                for v in row {
                    s.push(',');
                    s.push_str(&g17(v));
                }
                s.push('\n');
            }
        }
    }
    s
}

pub fn write_samples_csv(u: &SolutionDofs, grid: &Grid, gamma: f64, path: &Path) -> Result<()> {
    write_file(path, &samples_csv(u, grid, gamma))
}

/// Parse a numeric CSV with one header line.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| MhdError::Data("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (n, l) in lines.enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = l.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| MhdError::Data(format!("CSV row {}: {e}", n + 2)))?;
        if row.len() != header.len() {
            return Err(MhdError::Data(format!("CSV row {} has {} columns, expected {}", n + 2, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// A straight line through the domain along which cell centres are sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineCut {
    /// The row of cells containing y.
    Horizontal { y: f64 },
    /// The column of cells containing x.
    Vertical { x: f64 },
    /// The cells (i, i) of a square grid, i.e. the line x = y on a square
    /// domain centred on it.
    Diagonal,
}

/// Cell-centre samples along a cut. Diagonal cuts also get the rotated
/// components `Bpar = -Bx sin α + By cos α` and `Bperp = Bx cos α + By sin α`
/// with α = π/4.
pub fn line_cut_csv(u: &SolutionDofs, grid: &Grid, gamma: f64, cut: LineCut) -> Result<String> {
    let cells: Vec<(usize, usize)> = match cut {
        LineCut::Horizontal { y } => {
            if !(grid.ymin..=grid.ymax).contains(&y) {
                return Err(MhdError::Config(format!("cut y = {y} lies outside the domain")));
            }
            let j = (((y - grid.ymin) / grid.dy) as usize).min(grid.ny - 1);
            (0..grid.nx).map(|i| (i, j)).collect()
        }
        LineCut::Vertical { x } => {
            if !(grid.xmin..=grid.xmax).contains(&x) {
                return Err(MhdError::Config(format!("cut x = {x} lies outside the domain")));
            }
            let i = (((x - grid.xmin) / grid.dx) as usize).min(grid.nx - 1);
            (0..grid.ny).map(|j| (i, j)).collect()
        }
        LineCut::Diagonal => {
            if grid.nx != grid.ny {
                return Err(MhdError::Config("diagonal cut needs a square grid".into()));
            }
            (0..grid.nx).map(|i| (i, i)).collect()
        }
    };
    let diag = matches!(cut, LineCut::Diagonal);
    let mut s = String::from("s,x,y,rho,vx,vy,vz,p,Bx,By,Bz");
    if diag {
        s.push_str(",Bpar,Bperp");
    }
    s.push('\n');
    let (x0, y0) = grid.cell_center(cells[0].0, cells[0].1);
    for (i, j) in cells {
        let c = grid.cell(i, j);
        let (x, y) = grid.cell_center(i, j);
        let st = u.eval(c, 0.0, 0.0);
        let row = primitive_row(&st, gamma, 0.0);
        let dist = ((x - x0).powi(2) + (y - y0).powi(2)).sqrt();
        let mut vals = vec![dist, x, y];
        vals.extend_from_slice(&row[..8]);
        if diag {
            let (bp, bn) = rstube_components(&st);
            vals.push(bp);
            vals.push(bn);
        }
        let line: Vec<String> = vals.into_iter().map(g17).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    Ok(s)
}

pub fn write_line_cut(u: &SolutionDofs, grid: &Grid, gamma: f64, cut: LineCut, path: &Path) -> Result<()> {
    write_file(path, &line_cut_csv(u, grid, gamma, cut)?)
}

/// Diagnostics time series as CSV.
pub fn diagnostics_csv(samples: &[DiagnosticSample]) -> String {
    let mut s = String::from(
        "step,t,div_l2,div_max,total_rho,total_mx,total_my,total_mz,total_E,total_Bx,total_By,total_Bz,limited_cells,positivity_events\n",
    );
    for d in samples {
        let _ = write!(s, "{},{},{},{}", d.step, g17(d.t), g17(d.div_l2), g17(d.div_max));
        for t in d.totals {
            let _ = write!(s, ",{}", g17(t));
        }
        let _ = writeln!(s, ",{},{}", d.limited_cells, d.positivity_events);
    }
    s
}

pub fn write_diagnostics(samples: &[DiagnosticSample], path: &Path) -> Result<()> {
    write_file(path, &diagnostics_csv(samples))
}

/// `key = value` lines.
pub fn write_summary(entries: &[(&str, String)], path: &Path) -> Result<()> {
    let mut s = String::new();
    for (k, v) in entries {
        let _ = writeln!(s, "{k} = {v}");
    }
    write_file(path, &s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, text)
}
