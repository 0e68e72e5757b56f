//! Fourier spectral Laplacian and the regularized inverse-Laplacian
//! preconditioner, both diagonalized by the 3D FFT.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{Apply, OpKind, OperatorHandle};
use crate::operators::fft3::Fft3;
use crate::operators::grid::Grid3;

/// Eigenvalue of the negative spectral Laplacian at a zero-based multi-index:
/// lambda_i = l_min^2 * sum_j (min(i_j, N_j - i_j) / N_j)^2.
pub fn spectral_eigenvalue(grid: &Grid3, i1: usize, i2: usize, i3: usize) -> f64 {
    let axis = |i: usize, n: usize| -> f64 {
        if n <= 1 {
            return 0.0;
        }
        let k = i.min(n - i) as f64;
        let ratio = k / n as f64;
        ratio * ratio
    };
    grid.l_min * grid.l_min
        * (axis(i1, grid.n1) + axis(i2, grid.n2) + axis(i3, grid.n3))
}

/// Largest eigenvalue, at the Nyquist multi-index. Bounded by 3/4 * l_min^2.
pub fn spectral_max_eigenvalue(grid: &Grid3) -> f64 {
    spectral_eigenvalue(grid, grid.n1 / 2, grid.n2 / 2, grid.n3 / 2)
}

fn eigenvalue_table(grid: &Grid3) -> Vec<f64> {
    let mut eigs = vec![0.0f64; grid.len()];
    for i3 in 0..grid.n3 {
        for i2 in 0..grid.n2 {
            for i1 in 0..grid.n1 {
                eigs[grid.index(i1, i2, i3)] = spectral_eigenvalue(grid, i1, i2, i3);
            }
        }
    }
    eigs
}

fn require_even_dims(grid: &Grid3) -> Result<()> {
    for n in grid.dims() {
        if n > 1 && n % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "spectral discretization requires even dimensions (got {n})"
            )));
        }
    }
    Ok(())
}

struct FourierDiagonal {
    fft: Fft3,
    multiplier: Vec<f64>,
}

impl Apply for FourierDiagonal {
    fn dim(&self) -> usize {
        self.multiplier.len()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.copy_from_slice(x);
        self.fft.forward(y);
        for (v, m) in y.iter_mut().zip(&self.multiplier) {
            *v *= *m;
        }
        self.fft.inverse(y);
    }
}

/// Negative discrete Laplacian S = F^H diag(lambda) F. Hermitian positive
/// semi-definite; the constant vector is in its null space.
pub fn build_spectral_laplacian(grid: &Grid3) -> Result<OperatorHandle> {
    require_even_dims(grid)?;
    let inner = FourierDiagonal { fft: Fft3::new(grid.dims()), multiplier: eigenvalue_table(grid) };
    Ok(OperatorHandle::new(OpKind::SpectralLaplacian, Arc::new(inner)))
}

/// Regularized inverse Laplacian: F^H diag(1/max(lambda, 1)) F. Deflates the
/// large Laplacian eigenvalues of the Helmholtz operator; modes with
/// lambda <= 1 pass through unchanged.
pub fn build_invlap_precond(grid: &Grid3) -> Result<OperatorHandle> {
    require_even_dims(grid)?;
    let multiplier = eigenvalue_table(grid).into_iter().map(|l| 1.0 / l.max(1.0)).collect();
    let inner = FourierDiagonal { fft: Fft3::new(grid.dims()), multiplier };
    Ok(OperatorHandle::new(OpKind::InvLapPrecond, Arc::new(inner)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::norm;

    fn grid(n: usize, l_min: f64) -> Grid3 {
        Grid3::new(n, n, n, l_min).unwrap()
    }

    #[test]
    fn constant_vector_maps_to_zero() {
        let g = grid(8, 2.25);
        let s = build_spectral_laplacian(&g).unwrap();
        let x = vec![Complex64::new(3.0, -1.0); g.len()];
        let y = s.apply(&x).unwrap();
        assert!(norm(&y) < 1e-12 * norm(&x));
    }

    #[test]
    fn odd_dims_rejected() {
        let g = Grid3::new(6, 9, 4, 2.25).unwrap();
        assert!(build_spectral_laplacian(&g).is_err());
    }

    #[test]
    fn max_eigenvalue_obeys_three_quarters_bound() {
        // rho(S) <= 3/4 l_min^2, with equality for even cubic grids
        let g = grid(16, 2.25);
        let max = spectral_max_eigenvalue(&g);
        let bound = 0.75 * g.l_min * g.l_min;
        assert!(max <= bound + 1e-12);
        assert!((max - bound).abs() < 1e-12);
    }

    #[test]
    fn fourier_mode_is_an_eigenvector() {
        let g = grid(8, 2.25);
        let s = build_spectral_laplacian(&g).unwrap();
        let (k1, k2, k3) = (2usize, 5usize, 1usize);
        let mut x = vec![Complex64::default(); g.len()];
        for i3 in 0..g.n3 {
            for i2 in 0..g.n2 {
                for i1 in 0..g.n1 {
                    let phase = 2.0
                        * std::f64::consts::PI
                        * (k1 as f64 * i1 as f64 / g.n1 as f64
                            + k2 as f64 * i2 as f64 / g.n2 as f64
                            + k3 as f64 * i3 as f64 / g.n3 as f64);
                    x[g.index(i1, i2, i3)] = Complex64::cis(phase);
                }
            }
        }
        let y = s.apply(&x).unwrap();
        let lambda = spectral_eigenvalue(&g, k1, k2, k3);
        let mut resid = y.clone();
        for (r, xi) in resid.iter_mut().zip(&x) {
            *r -= lambda * xi;
        }
        assert!(norm(&resid) < 1e-12 * norm(&x).max(1.0));
    }

    #[test]
    fn invlap_is_identity_on_low_modes() {
        let g = grid(8, 2.25);
        // mode (1,0,0): lambda = l_min^2 / 64 < 1 so 1/max(lambda,1) = 1
        assert!(spectral_eigenvalue(&g, 1, 0, 0) < 1.0);
        let p = build_invlap_precond(&g).unwrap();
        let mut x = vec![Complex64::default(); g.len()];
        for i3 in 0..g.n3 {
            for i2 in 0..g.n2 {
                for i1 in 0..g.n1 {
                    let phase = 2.0 * std::f64::consts::PI * (i1 as f64 / g.n1 as f64);
                    x[g.index(i1, i2, i3)] = Complex64::cis(phase);
                }
            }
        }
        let y = p.apply(&x).unwrap();
        let mut resid = y.clone();
        for (r, xi) in resid.iter_mut().zip(&x) {
            *r -= xi;
        }
        assert!(norm(&resid) < 1e-12 * norm(&x));
        assert_eq!(p.precond_count(), 1);
        assert_eq!(p.matvec_count(), 0);
    }
}
