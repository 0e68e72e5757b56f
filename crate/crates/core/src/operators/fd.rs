//! Seven-point finite-difference Laplacian in compressed sparse rows.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{Apply, OpKind, OperatorHandle};
use crate::operators::grid::Grid3;

/// Complex matrix in compressed sparse rows with sorted column indices.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl Csr {
    pub fn from_rows(rows: Vec<BTreeMap<usize, Complex64>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Csr { n, row_ptr, col_idx, values }
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for i in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Complex64> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi].binary_search(&j).ok().map(|k| self.values[lo + k])
    }

    pub fn row_sum(&self, i: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            acc += self.values[k];
        }
        acc
    }
}

struct CsrApply {
    csr: Arc<Csr>,
}

impl Apply for CsrApply {
    fn dim(&self) -> usize {
        self.csr.n
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.csr.matvec_into(x, y);
    }
}

/// Boundary closure of the stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdClosure {
    /// Homogeneous Dirichlet: missing neighbors contribute nothing. The
    /// sponge layer absorbs the resulting reflections.
    Dirichlet,
    /// Periodic wrap-around; rows sum to zero.
    Periodic,
}

/// Negative discrete Laplacian from the seven-point stencil, scaled by
/// (l_min / 2 pi)^2 so that rho(S) <= 3/pi^2 * l_min^2. Axes of extent 1 are
/// treated as absent (2D/1D analogs).
pub fn build_fd7_laplacian(
    grid: &Grid3,
    closure: FdClosure,
) -> Result<(OperatorHandle, Arc<Csr>)> {
    for n in grid.dims() {
        if n == 2 {
            return Err(Error::InvalidConfig(
                "finite-difference grid needs at least 3 points per active axis".into(),
            ));
        }
    }
    let scale = {
        let r = grid.l_min / (2.0 * std::f64::consts::PI);
        Complex64::new(r * r, 0.0)
    };
    let n = grid.len();
    let mut rows: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); n];
    let dims = grid.dims();
    for idx in 0..n {
        let (i1, i2, i3) = grid.coords(idx);
        let coords = [i1, i2, i3];
        let row = &mut rows[idx];
        for axis in 0..3 {
            let na = dims[axis];
            if na <= 1 {
                continue;
            }
            *row.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += 2.0 * scale;
            for dir in [-1isize, 1] {
                let ia = coords[axis] as isize + dir;
                let neighbor = match closure {
                    FdClosure::Dirichlet => {
                        if ia < 0 || ia >= na as isize {
                            continue;
                        }
                        ia as usize
                    }
                    FdClosure::Periodic => ia.rem_euclid(na as isize) as usize,
                };
                let mut c = coords;
                c[axis] = neighbor;
                let j = grid.index(c[0], c[1], c[2]);
                *row.entry(j).or_insert(Complex64::new(0.0, 0.0)) -= scale;
            }
        }
        // a grid collapsed to a single point has an empty stencil; pin the
        // diagonal so the matrix stays well formed
        row.entry(idx).or_insert(Complex64::new(0.0, 0.0));
    }
    let csr = Arc::new(Csr::from_rows(rows));
    let handle =
        OperatorHandle::new(OpKind::Fd7Laplacian, Arc::new(CsrApply { csr: Arc::clone(&csr) }));
    Ok((handle, csr))
}

/// Analytic eigenvalue of the 1D Dirichlet stencil on `n` interior points:
/// mode k in 1..=n has eigenvalue (l_min/2pi)^2 * 2(1 - cos(k pi / (n+1))).
pub fn fd1d_dirichlet_eigenvalue(n: usize, l_min: f64, k: usize) -> f64 {
    let r = l_min / (2.0 * std::f64::consts::PI);
    r * r * 2.0 * (1.0 - (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
}
