//! Uniform Cartesian mesh with boundary-aware index resolution.
//!
//! Cells are numbered row-major, `c = j * nx + i`. Vertical faces sit at
//! `x = xmin + i dx` and are numbered `j * vcols + i`; horizontal faces sit at
//! `y = ymin + j dy` and are numbered `j * nx + i`. Vertices are numbered
//! `j * vcols + i`. On a periodic axis the last face column (row) is
//! identified with the first one and therefore not stored.
//!
//! Outflow boundaries are realised as copy ghosts: a ghost cell is the
//! nearest interior cell seen through a mirror, so every trace taken from the
//! ghost equals the interior trace at the same boundary point.

use crate::error::{MhdError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Outflow,
}

impl std::str::FromStr for Boundary {
    type Err = MhdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "outflow" => Ok(Boundary::Outflow),
            other => Err(MhdError::Config(format!(
                "unknown boundary `{other}` (expected periodic or outflow)"
            ))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Outflow => "outflow",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Domain {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Domain {
            xmin,
            xmax,
            ymin,
            ymax,
        }
    }

    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }
}

/// A cell seen from a face, vertex or neighbour query, together with the
/// reference coordinates of the point of interest inside that cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPoint {
    pub cell: usize,
    pub xi: f64,
    pub eta: f64,
}

/// A face endpoint: face index plus the tangential reference coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacePoint {
    pub face: usize,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellFaces {
    pub west: usize,
    pub east: usize,
    pub south: usize,
    pub north: usize,
}

/// Faces meeting at a vertex: the vertical faces below and above it and the
/// horizontal faces left and right of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexFaces {
    pub south: FacePoint,
    pub north: FacePoint,
    pub west: FacePoint,
    pub east: FacePoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub bc_x: Boundary,
    pub bc_y: Boundary,
}

impl Grid {
    pub fn build(domain: Domain, nx: usize, ny: usize, bc_x: Boundary, bc_y: Boundary) -> Result<Grid> {
        if nx < 2 || ny < 2 {
            return Err(MhdError::Config(format!(
                "grid needs at least 2 cells per direction, got {nx} x {ny}"
            )));
        }
        let Domain {
            xmin,
            xmax,
            ymin,
            ymax,
        } = domain;
        if !(xmax > xmin && ymax > ymin) || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) {
            return Err(MhdError::Config(format!(
                "degenerate domain [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        Ok(Grid {
            xmin,
            xmax,
            ymin,
            ymax,
            nx,
            ny,
            dx: (xmax - xmin) / nx as f64,
            dy: (ymax - ymin) / ny as f64,
            bc_x,
            bc_y,
        })
    }

    pub fn domain(&self) -> Domain {
        Domain::new(self.xmin, self.xmax, self.ymin, self.ymax)
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn cell_ij(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.xmin + (i as f64 + 0.5) * self.dx,
            self.ymin + (j as f64 + 0.5) * self.dy,
        )
    }

    /// Physical coordinates of reference point (ξ, η) in cell (i, j).
    #[inline]
    pub fn to_physical(&self, i: usize, j: usize, xi: f64, eta: f64) -> (f64, f64) {
        (
            self.xmin + (i as f64 + 0.5 + xi) * self.dx,
            self.ymin + (j as f64 + 0.5 + eta) * self.dy,
        )
    }

    /// Number of vertical-face columns (also vertex columns).
    #[inline]
    pub fn vcols(&self) -> usize {
        match self.bc_x {
            Boundary::Periodic => self.nx,
            Boundary::Outflow => self.nx + 1,
        }
    }

    /// Number of horizontal-face rows (also vertex rows).
    #[inline]
    pub fn hrows(&self) -> usize {
        match self.bc_y {
            Boundary::Periodic => self.ny,
            Boundary::Outflow => self.ny + 1,
        }
    }

    #[inline]
    pub fn n_vfaces(&self) -> usize {
        self.vcols() * self.ny
    }

    #[inline]
    pub fn n_hfaces(&self) -> usize {
        self.nx * self.hrows()
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.vcols() * self.hrows()
    }

    #[inline]
    pub fn vface(&self, i: usize, j: usize) -> usize {
        j * self.vcols() + i
    }

    #[inline]
    pub fn vface_ij(&self, f: usize) -> (usize, usize) {
        (f % self.vcols(), f / self.vcols())
    }

    #[inline]
    pub fn hface(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn hface_ij(&self, f: usize) -> (usize, usize) {
        (f % self.nx, f / self.nx)
    }

    #[inline]
    pub fn vertex(&self, i: usize, j: usize) -> usize {
        j * self.vcols() + i
    }

    #[inline]
    pub fn vertex_ij(&self, v: usize) -> (usize, usize) {
        (v % self.vcols(), v / self.vcols())
    }

    /// Resolve a possibly out-of-range column index. Returns the donor column
    /// and whether it is seen through an outflow mirror.
    #[inline]
    fn resolve(idx: isize, n: usize, bc: Boundary) -> (usize, bool) {
        let n_i = n as isize;
        if (0..n_i).contains(&idx) {
            return (idx as usize, false);
        }
        match bc {
            Boundary::Periodic => (idx.rem_euclid(n_i) as usize, false),
            Boundary::Outflow => (idx.clamp(0, n_i - 1) as usize, true),
        }
    }

    #[inline]
    fn resolve_col(&self, i: isize) -> (usize, bool) {
        Self::resolve(i, self.nx, self.bc_x)
    }

    #[inline]
    fn resolve_row(&self, j: isize) -> (usize, bool) {
        Self::resolve(j, self.ny, self.bc_y)
    }

    /// Cell at (i, j) with reference point (ξ, η), resolved through the
    /// boundary conditions. Mirrored axes flip the matching coordinate.
    #[inline]
    pub fn cell_point(&self, i: isize, j: isize, xi: f64, eta: f64) -> CellPoint {
        let (ci, fx) = self.resolve_col(i);
        let (cj, fy) = self.resolve_row(j);
        CellPoint {
            cell: self.cell(ci, cj),
            xi: if fx { -xi } else { xi },
            eta: if fy { -eta } else { eta },
        }
    }

    /// West and east neighbours (as cell indices) of cell (i, j).
    pub fn neighbors_x(&self, i: usize, j: usize) -> (usize, usize) {
        let w = self.cell_point(i as isize - 1, j as isize, 0.0, 0.0).cell;
        let e = self.cell_point(i as isize + 1, j as isize, 0.0, 0.0).cell;
        (w, e)
    }

    /// South and north neighbours of cell (i, j).
    pub fn neighbors_y(&self, i: usize, j: usize) -> (usize, usize) {
        let s = self.cell_point(i as isize, j as isize - 1, 0.0, 0.0).cell;
        let n = self.cell_point(i as isize, j as isize + 1, 0.0, 0.0).cell;
        (s, n)
    }

    pub fn cell_faces(&self, i: usize, j: usize) -> CellFaces {
        let east_col = if i + 1 == self.nx && self.bc_x == Boundary::Periodic {
            0
        } else {
            i + 1
        };
        let north_row = if j + 1 == self.ny && self.bc_y == Boundary::Periodic {
            0
        } else {
            j + 1
        };
        CellFaces {
            west: self.vface(i, j),
            east: self.vface(east_col, j),
            south: self.hface(i, j),
            north: self.hface(i, north_row),
        }
    }

    /// Cells on the left and right of vertical face (i, j), with the ξ
    /// coordinate of the face inside each of them.
    #[inline]
    pub fn vface_cells(&self, i: usize, j: usize) -> [CellPoint; 2] {
        [
            self.cell_point(i as isize - 1, j as isize, 0.5, 0.0),
            self.cell_point(i as isize, j as isize, -0.5, 0.0),
        ]
    }

    /// Cells below and above horizontal face (i, j).
    #[inline]
    pub fn hface_cells(&self, i: usize, j: usize) -> [CellPoint; 2] {
        [
            self.cell_point(i as isize, j as isize - 1, 0.0, 0.5),
            self.cell_point(i as isize, j as isize, 0.0, -0.5),
        ]
    }

    /// The four cells around vertex (i, j) in (sw, se, nw, ne) order with the
    /// corner coordinates of the vertex in each.
    #[inline]
    pub fn vertex_cells(&self, i: usize, j: usize) -> [CellPoint; 4] {
        let (i, j) = (i as isize, j as isize);
        [
            self.cell_point(i - 1, j - 1, 0.5, 0.5),
            self.cell_point(i, j - 1, -0.5, 0.5),
            self.cell_point(i - 1, j, 0.5, -0.5),
            self.cell_point(i, j, -0.5, -0.5),
        ]
    }

    pub fn vertex_faces(&self, i: usize, j: usize) -> VertexFaces {
        let (ii, jj) = (i as isize, j as isize);
        let (rs, fs) = self.resolve_row(jj - 1);
        let (rn, fn_) = self.resolve_row(jj);
        let (cw, fw) = self.resolve_col(ii - 1);
        let (ce, fe) = self.resolve_col(ii);
        let flip = |s: f64, f: bool| if f { -s } else { s };
        // A vertex column index i may equal nx only on an outflow axis, where
        // it is a valid face column.
        VertexFaces {
            south: FacePoint {
                face: self.vface(i, rs),
                s: flip(0.5, fs),
            },
            north: FacePoint {
                face: self.vface(i, rn),
                s: flip(-0.5, fn_),
            },
            west: FacePoint {
                face: self.hface(cw, j),
                s: flip(0.5, fw),
            },
            east: FacePoint {
                face: self.hface(ce, j),
                s: flip(-0.5, fe),
            },
        }
    }

    /// Vertices at the bottom and top of vertical face (i, j).
    #[inline]
    pub fn vface_vertices(&self, i: usize, j: usize) -> (usize, usize) {
        let top = if j + 1 == self.ny && self.bc_y == Boundary::Periodic {
            0
        } else {
            j + 1
        };
        (self.vertex(i, j), self.vertex(i, top))
    }

    /// Vertices at the left and right ends of horizontal face (i, j).
    #[inline]
    pub fn hface_vertices(&self, i: usize, j: usize) -> (usize, usize) {
        let right = if i + 1 == self.nx && self.bc_x == Boundary::Periodic {
            0
        } else {
            i + 1
        };
        (self.vertex(i, j), self.vertex(right, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, bc: Boundary) -> Grid {
        Grid::build(Domain::new(0.0, 1.0, 0.0, 1.0), n, n, bc, bc).unwrap()
    }

    #[test]
    fn counts() {
        let g = unit(4, Boundary::Outflow);
        assert_eq!((g.dx, g.dy), (0.25, 0.25));
        assert_eq!(g.n_vfaces(), 20);
        assert_eq!(g.n_hfaces(), 20);
        assert_eq!(g.n_vertices(), 25);
        let g = unit(4, Boundary::Periodic);
        assert_eq!(g.n_vfaces(), 16);
        assert_eq!(g.n_hfaces(), 16);
        assert_eq!(g.n_vertices(), 16);
        let g = Grid::build(
            Domain::new(-10.0, 10.0, -10.0, 10.0),
            64,
            64,
            Boundary::Periodic,
            Boundary::Periodic,
        )
        .unwrap();
        assert_eq!((g.dx, g.dy), (0.3125, 0.3125));
    }

    #[test]
    fn rejects_bad_input() {
        let d = Domain::new(0.0, 1.0, 0.0, 1.0);
        assert!(Grid::build(d, 1, 4, Boundary::Periodic, Boundary::Periodic).is_err());
        let bad = Domain::new(1.0, 1.0, 0.0, 1.0);
        assert!(Grid::build(bad, 4, 4, Boundary::Periodic, Boundary::Periodic).is_err());
    }

    #[test]
    fn neighbours() {
        let g = unit(4, Boundary::Periodic);
        assert_eq!(g.neighbors_x(3, 0).1, g.cell(0, 0));
        let g = unit(4, Boundary::Outflow);
        assert_eq!(g.neighbors_x(3, 2).1, g.cell(3, 2));
        assert_eq!(g.neighbors_y(1, 0).0, g.cell(1, 0));
        let v = g.vertex_cells(2, 2);
        let cells: Vec<usize> = v.iter().map(|p| p.cell).collect();
        assert_eq!(cells, vec![g.cell(1, 1), g.cell(2, 1), g.cell(1, 2), g.cell(2, 2)]);
    }

    #[test]
    fn face_adjacency_is_involutive() {
        for bc in [Boundary::Periodic, Boundary::Outflow] {
            let g = Grid::build(Domain::new(0.0, 2.0, 0.0, 1.0), 5, 3, bc, bc).unwrap();
            for j in 0..g.ny {
                for i in 0..g.vcols() {
                    let f = g.vface(i, j);
                    for cp in g.vface_cells(i, j) {
                        let (ci, cj) = g.cell_ij(cp.cell);
                        let cf = g.cell_faces(ci, cj);
                        assert!(cf.west == f || cf.east == f, "bc={bc} face=({i},{j})");
                    }
                }
            }
            for j in 0..g.hrows() {
                for i in 0..g.nx {
                    let f = g.hface(i, j);
                    for cp in g.hface_cells(i, j) {
                        let (ci, cj) = g.cell_ij(cp.cell);
                        let cf = g.cell_faces(ci, cj);
                        assert!(cf.south == f || cf.north == f);
                    }
                }
            }
        }
    }

    #[test]
    fn cell_areas_sum_to_domain() {
        let g = Grid::build(Domain::new(-1.0, 1.0, -0.5, 0.5), 8, 4, Boundary::Periodic, Boundary::Periodic)
            .unwrap();
        let total = g.n_cells() as f64 * g.dx * g.dy;
        assert_eq!(total, g.domain().area());
    }

    #[test]
    fn outflow_corner_vertex_sees_one_cell() {
        let g = unit(3, Boundary::Outflow);
        let v = g.vertex_cells(0, 0);
        for p in v {
            assert_eq!(p.cell, 0);
            assert_eq!((p.xi, p.eta), (-0.5, -0.5));
        }
        let vf = g.vertex_faces(0, 0);
        assert_eq!(vf.south, vf.north);
        assert_eq!(vf.west, vf.east);
    }
}
