//! Structured bilinear mesh and compressed sparse row storage for the
//! pressure problem.

use crate::error::{Error, Result};

/// Gauss abscissa of the 2-point rule on [-1, 1] (weights are 1).
pub(crate) const GAUSS: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)

/// Reference-square Gauss points, tensor 2x2, each with weight 1.
pub(crate) const GAUSS_POINTS: [(f64, f64); 4] =
    [(-GAUSS, -GAUSS), (GAUSS, -GAUSS), (-GAUSS, GAUSS), (GAUSS, GAUSS)];

/// Uniform rectangular mesh of bilinear cells on `[0, lx] x [0, ly]`.
///
/// Nodes are numbered `ix + (nx + 1) * iy` (x fastest); cell `(cx, cy)` has
/// corner nodes `[(cx, cy), (cx+1, cy), (cx, cy+1), (cx+1, cy+1)]` in that
/// order, matching the reference-square shape functions.
#[derive(Clone, Copy, Debug)]
pub struct ReynoldsMesh {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
}

impl ReynoldsMesh {
    /// Smallest sensible resolution per direction.
    pub const MIN_CELLS: usize = 4;

    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx > 0.0 && lx.is_finite()) {
            return Err(Error::InvalidParameter { name: "lx", value: lx, constraint: "lx > 0" });
        }
        if !(ly > 0.0 && ly.is_finite()) {
            return Err(Error::InvalidParameter { name: "ly", value: ly, constraint: "ly > 0" });
        }
        if nx < Self::MIN_CELLS || ny < Self::MIN_CELLS {
            return Err(Error::InvalidMesh {
                reason: format!(
                    "need at least {0}x{0} cells, got {nx}x{ny}",
                    Self::MIN_CELLS
                ),
            });
        }
        Ok(Self { lx, ly, nx, ny })
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node_index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix <= self.nx && iy <= self.ny);
        ix + (self.nx + 1) * iy
    }

    pub fn node_xy(&self, i: usize) -> (f64, f64) {
        let ix = i % (self.nx + 1);
        let iy = i / (self.nx + 1);
        (ix as f64 * self.dx(), iy as f64 * self.dy())
    }

    pub fn is_boundary_node(&self, i: usize) -> bool {
        let ix = i % (self.nx + 1);
        let iy = i / (self.nx + 1);
        ix == 0 || ix == self.nx || iy == 0 || iy == self.ny
    }

    /// Corner nodes of cell `(cx, cy)` in shape-function order.
    pub fn cell_nodes(&self, cx: usize, cy: usize) -> [usize; 4] {
        [
            self.node_index(cx, cy),
            self.node_index(cx + 1, cy),
            self.node_index(cx, cy + 1),
            self.node_index(cx + 1, cy + 1),
        ]
    }

    /// Lower-left corner of cell `(cx, cy)`.
    pub fn cell_origin(&self, cx: usize, cy: usize) -> (f64, f64) {
        (cx as f64 * self.dx(), cy as f64 * self.dy())
    }

    /// Physical coordinates of reference point `(xi, eta)` in cell
    /// `(cx, cy)`.
    pub fn cell_point(&self, cx: usize, cy: usize, xi: f64, eta: f64) -> (f64, f64) {
        let (x0, y0) = self.cell_origin(cx, cy);
        (x0 + 0.5 * (xi + 1.0) * self.dx(), y0 + 0.5 * (eta + 1.0) * self.dy())
    }
}

/// Bilinear shape functions at reference point `(xi, eta)`, in cell-node
/// order.
pub(crate) fn shape(xi: f64, eta: f64) -> [f64; 4] {
    [
        0.25 * (1.0 - xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 - eta),
        0.25 * (1.0 - xi) * (1.0 + eta),
        0.25 * (1.0 + xi) * (1.0 + eta),
    ]
}

/// Physical-space shape gradients `(d/dx, d/dy)` at `(xi, eta)` for a cell
/// of size `dx x dy`.
pub(crate) fn shape_grad(xi: f64, eta: f64, dx: f64, dy: f64) -> [[f64; 2]; 4] {
    let jx = 2.0 / dx;
    let jy = 2.0 / dy;
    [
        [-0.25 * (1.0 - eta) * jx, -0.25 * (1.0 - xi) * jy],
        [0.25 * (1.0 - eta) * jx, -0.25 * (1.0 + xi) * jy],
        [-0.25 * (1.0 + eta) * jx, 0.25 * (1.0 - xi) * jy],
        [0.25 * (1.0 + eta) * jx, 0.25 * (1.0 + xi) * jy],
    ]
}

/// Square compressed-sparse-row matrix with sorted column indices.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row sorted maps (assembly scratch form).
    pub(crate) fn from_rows(rows: Vec<std::collections::BTreeMap<usize, f64>>) -> Self {
        let n = rows.len();
        let nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (yi, row) in y.iter_mut().zip(self.row_ptr.windows(2)) {
            let mut acc = 0.0;
            for k in row[0]..row[1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// Main diagonal (zero where a row has no diagonal entry).
    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, (di, row)) in d.iter_mut().zip(self.row_ptr.windows(2)).enumerate() {
            for k in row[0]..row[1] {
                if self.cols[k] == i {
                    *di = self.vals[k];
                }
            }
        }
        d
    }

    /// Checks structural and numerical symmetry to within `tol` (relative
    /// to the largest absolute entry). Used by tests; assembly guarantees
    /// symmetry up to rounding.
    pub fn symmetry_gap(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                let vji = self.entry(j, i);
                worst = worst.max((self.vals[k] - vji).abs());
            }
        }
        worst
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.cols[k] == j {
                return self.vals[k];
            }
        }
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn mesh_indexing_roundtrip() {
        let mesh = ReynoldsMesh::new(2.0, 1.0, 8, 4).unwrap();
        assert_eq!(mesh.node_count(), 45);
        assert_eq!(mesh.cell_count(), 32);
        let i = mesh.node_index(3, 2);
        let (x, y) = mesh.node_xy(i);
        assert!((x - 3.0 * 0.25).abs() < 1e-15);
        assert!((y - 2.0 * 0.25).abs() < 1e-15);
        assert!(mesh.is_boundary_node(mesh.node_index(0, 2)));
        assert!(mesh.is_boundary_node(mesh.node_index(3, 4)));
        assert!(!mesh.is_boundary_node(mesh.node_index(3, 2)));
    }

    #[test]
    fn mesh_validation() {
        assert!(ReynoldsMesh::new(0.0, 1.0, 8, 8).is_err());
        assert!(ReynoldsMesh::new(1.0, 1.0, 3, 8).is_err());
        assert!(ReynoldsMesh::new(1.0, -1.0, 8, 8).is_err());
    }

    #[test]
    fn shape_functions_partition_unity_and_interpolate() {
        for (xi, eta) in [(-0.3, 0.7), (0.0, 0.0), (1.0, -1.0)] {
            let n = shape(xi, eta);
            let sum: f64 = n.iter().sum();
            assert!((sum - 1.0).abs() < 1e-15);
            let g = shape_grad(xi, eta, 0.5, 0.25);
            let (sx, sy): (f64, f64) = g.iter().fold((0.0, 0.0), |acc, gi| {
                (acc.0 + gi[0], acc.1 + gi[1])
            });
            assert!(sx.abs() < 1e-15 && sy.abs() < 1e-15, "gradient partition");
        }
        // Bilinear interpolation reproduces linear functions exactly:
        // values of x + 2y at the corners of a dx x dy cell.
        let (dx, dy) = (0.5, 0.25);
        let corner = [0.0, dx, 2.0 * dy, dx + 2.0 * dy];
        let (xi, eta) = (0.35, -0.6);
        let n = shape(xi, eta);
        let got: f64 = n.iter().zip(&corner).map(|(ni, ci)| ni * ci).sum();
        let x = 0.5 * (xi + 1.0) * dx;
        let y = 0.5 * (eta + 1.0) * dy;
        assert!((got - (x + 2.0 * y)).abs() < 1e-15);
        let g = shape_grad(xi, eta, dx, dy);
        let gx: f64 = g.iter().zip(&corner).map(|(gi, ci)| gi[0] * ci).sum();
        let gy: f64 = g.iter().zip(&corner).map(|(gi, ci)| gi[1] * ci).sum();
        assert!((gx - 1.0).abs() < 1e-14 && (gy - 2.0).abs() < 1e-14);
    }

    #[test]
    fn csr_matvec_and_diag() {
        // [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
        let mut rows = vec![BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
        rows[0].insert(0, 2.0);
        rows[0].insert(1, -1.0);
        rows[1].insert(0, -1.0);
        rows[1].insert(1, 2.0);
        rows[1].insert(2, -1.0);
        rows[2].insert(1, -1.0);
        rows[2].insert(2, 2.0);
        let m = CsrMatrix::from_rows(rows);
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]), vec![0.0, 0.0, 4.0]);
        assert_eq!(m.diag(), vec![2.0, 2.0, 2.0]);
        assert_eq!(m.symmetry_gap(), 0.0);
    }
}
