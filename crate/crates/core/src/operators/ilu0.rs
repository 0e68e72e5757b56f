//! ILU(0): incomplete LU factorization on the unmodified sparsity pattern.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{Apply, OpKind, OperatorHandle};
use crate::operators::fd::Csr;

/// Factored L and U sharing the input pattern. L has an implicit unit
/// diagonal below-diagonal entries; U holds the diagonal and above.
pub struct Ilu0 {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
    diag_pos: Vec<usize>,
}

const PIVOT_FLOOR: f64 = 1e-300;

fn factor(csr: &Csr, diag_shift: f64) -> std::result::Result<Ilu0, usize> {
    let n = csr.n;
    let mut values = csr.values.clone();
    let mut diag_pos = vec![usize::MAX; n];
    for i in 0..n {
        for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
            if csr.col_idx[k] == i {
                diag_pos[i] = k;
                if diag_shift != 0.0 {
                    values[k] += Complex64::new(diag_shift, 0.0);
                }
            }
        }
        if diag_pos[i] == usize::MAX {
            return Err(i);
        }
    }
    let find = |row: usize, col: usize| -> Option<usize> {
        let lo = csr.row_ptr[row];
        let hi = csr.row_ptr[row + 1];
        csr.col_idx[lo..hi].binary_search(&col).ok().map(|p| lo + p)
    };
    for i in 0..n {
        for kk in csr.row_ptr[i]..csr.row_ptr[i + 1] {
            let k = csr.col_idx[kk];
            if k >= i {
                break;
            }
            let pivot = values[diag_pos[k]];
            if pivot.norm() < PIVOT_FLOOR {
                return Err(k);
            }
            let lik = values[kk] / pivot;
            values[kk] = lik;
            for jj in (kk + 1)..csr.row_ptr[i + 1] {
                let j = csr.col_idx[jj];
                if let Some(p) = find(k, j) {
                    if j > k {
                        let ukj = values[p];
                        values[jj] -= lik * ukj;
                    }
                }
            }
        }
        if values[diag_pos[i]].norm() < PIVOT_FLOOR {
            return Err(i);
        }
    }
    Ok(Ilu0 {
        n,
        row_ptr: csr.row_ptr.clone(),
        col_idx: csr.col_idx.clone(),
        values,
        diag_pos,
    })
}

impl Ilu0 {
    /// Factors the matrix; on a zero pivot retries once with the diagonal
    /// shifted by 1e-8 * max |diag|, then fails hard.
    pub fn new(csr: &Csr) -> Result<Self> {
        match factor(csr, 0.0) {
            Ok(f) => Ok(f),
            Err(_) => {
                let max_diag =
                    (0..csr.n).filter_map(|i| csr.get(i, i)).map(|v| v.norm()).fold(0.0, f64::max);
                let shift = 1e-8 * max_diag.max(1.0);
                factor(csr, shift).map_err(|row| Error::ZeroPivot { row })
            }
        }
    }

    /// y = U^-1 L^-1 x via forward then backward substitution.
    pub fn solve_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        // forward: L z = x, unit diagonal
        for i in 0..self.n {
            let mut acc = x[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if j >= i {
                    break;
                }
                acc -= self.values[k] * y[j];
            }
            y[i] = acc;
        }
        // backward: U y = z
        for i in (0..self.n).rev() {
            let mut acc = y[i];
            for k in (self.diag_pos[i] + 1)..self.row_ptr[i + 1] {
                acc -= self.values[k] * y[self.col_idx[k]];
            }
            y[i] = acc / self.values[self.diag_pos[i]];
        }
    }

    /// Max |(LU - A)_ij| over the pattern of A; zero (to roundoff) is the
    /// defining property of ILU(0).
    pub fn pattern_product_residual(&self, a: &Csr) -> f64 {
        let find = |row: usize, col: usize| -> Option<Complex64> {
            let lo = self.row_ptr[row];
            let hi = self.row_ptr[row + 1];
            self.col_idx[lo..hi].binary_search(&col).ok().map(|p| self.values[lo + p])
        };
        let mut worst = 0.0f64;
        for i in 0..a.n {
            for kk in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col_idx[kk];
                // (LU)_ij = sum_{k <= min(i,j)} L_ik U_kj with L_ii = 1
                let mut acc = Complex64::new(0.0, 0.0);
                if i <= j {
                    if let Some(u) = find(i, j) {
                        acc += u;
                    }
                }
                for pk in self.row_ptr[i]..self.row_ptr[i + 1] {
                    let k = self.col_idx[pk];
                    if k >= i || k > j {
                        break;
                    }
                    if let Some(u) = find(k, j) {
                        if j >= k {
                            acc += self.values[pk] * u;
                        }
                    }
                }
                worst = worst.max((acc - a.values[kk]).norm());
            }
        }
        worst
    }
}

struct Ilu0Apply {
    f: Ilu0,
}

impl Apply for Ilu0Apply {
    fn dim(&self) -> usize {
        self.f.n
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.f.solve_into(x, y);
    }
}

/// Preconditioner handle applying (LU)^-1 through triangular solves.
pub fn build_ilu0_precond(csr: &Csr) -> Result<OperatorHandle> {
    let f = Ilu0::new(csr)?;
    Ok(OperatorHandle::new(OpKind::Ilu0Precond, Arc::new(Ilu0Apply { f })))
}
