//! Diagonal operators: mass matrix, sponge damping, and general diagonals.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{Apply, OpKind, OperatorHandle};
use crate::operators::grid::{Grid3, WavespeedModel};

pub(crate) struct DiagonalApply {
    pub(crate) diag: Vec<Complex64>,
}

impl Apply for DiagonalApply {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = d * xi;
        }
    }

    fn diagonal(&self) -> Option<&[Complex64]> {
        Some(&self.diag)
    }
}

/// General diagonal operator from explicit entries.
pub fn build_diagonal(diag: Vec<Complex64>) -> OperatorHandle {
    OperatorHandle::new(OpKind::Diagonal, Arc::new(DiagonalApply { diag }))
}

/// Real diagonal operator.
pub fn build_real_diagonal(diag: Vec<f64>) -> OperatorHandle {
    build_diagonal(diag.into_iter().map(|d| Complex64::new(d, 0.0)).collect())
}

/// Exact largest |entry| when the handle wraps a diagonal operator.
pub fn diagonal_max_abs(op: &OperatorHandle) -> Option<f64> {
    op.diagonal_entries().map(|d| d.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Mass matrix M_ii = l_min^2 / l_i^2, entries in (0, 1]. rho(M) <= 1 is what
/// makes A_1 + I positive semi-definite.
pub fn build_mass(model: &WavespeedModel) -> Result<OperatorHandle> {
    let l_min = model.grid.l_min;
    let mut diag = Vec::with_capacity(model.grid.len());
    for &li in model.sampling_rates() {
        if li < l_min * (1.0 - 1e-12) {
            return Err(Error::InvalidModel(format!(
                "sampling rate {li} below minimum {l_min} while building mass matrix"
            )));
        }
        diag.push(Complex64::new((l_min / li) * (l_min / li), 0.0));
    }
    Ok(build_diagonal(diag))
}

/// Sponge damping: positive entries only within `width` points of the
/// boundary, ramping quadratically from `strength` at the boundary face to
/// zero at depth `width`. The spectral radius equals `strength`.
pub fn build_sponge(grid: &Grid3, width: usize, strength: f64) -> Result<OperatorHandle> {
    if !(strength.is_finite() && strength >= 0.0) {
        return Err(Error::InvalidConfig(format!("sponge strength {strength} must be >= 0")));
    }
    if width > 0 && 2 * width >= grid.min_active_dim() {
        return Err(Error::InvalidConfig(format!(
            "sponge width {width} must be below half the smallest grid extent {}",
            grid.min_active_dim()
        )));
    }
    let n = grid.len();
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    if width > 0 && strength > 0.0 {
        for (idx, v) in diag.iter_mut().enumerate() {
            let d = grid.boundary_distance(idx);
            if d < width {
                let ramp = (width - d) as f64 / width as f64;
                *v = Complex64::new(strength * ramp * ramp, 0.0);
            }
        }
    }
    Ok(build_diagonal(diag))
}
