//! Spectral radius estimation for Hermitian operators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::operator::OperatorHandle;
use crate::vector::{dot, norm, scale};

/// Power-iteration result. `converged = false` means the value is the best
/// available estimate after the iteration budget.
#[derive(Debug, Clone, Copy)]
pub struct RhoEstimate {
    pub value: f64,
    pub converged: bool,
    pub its: usize,
}

/// Estimates rho(op) for a Hermitian operator by power iteration with a
/// deterministic seeded start. Diagonal operators are answered exactly.
pub fn estimate_rho(op: &OperatorHandle, tol: f64, max_its: usize, seed: u64) -> Result<RhoEstimate> {
    if let Some(d) = op.diagonal_entries() {
        let value = d.iter().map(|v| v.norm()).fold(0.0, f64::max);
        return Ok(RhoEstimate { value, converged: true, its: 0 });
    }
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let nv = norm(&v);
    scale(Complex64::new(1.0 / nv, 0.0), &mut v);

    let mut estimate = 0.0f64;
    for it in 1..=max_its {
        let w = op.apply(&v)?;
        // Rayleigh quotient |v^H A v| converges to the dominant |eigenvalue|
        let rayleigh = dot(&v, &w)?.norm();
        let growth = norm(&w);
        if growth == 0.0 {
            return Ok(RhoEstimate { value: 0.0, converged: true, its: it });
        }
        let change = (rayleigh - estimate).abs();
        estimate = rayleigh;
        if it > 1 && change <= tol * estimate.max(f64::MIN_POSITIVE) {
            return Ok(RhoEstimate { value: estimate, converged: true, its: it });
        }
        v = w;
        scale(Complex64::new(1.0 / growth, 0.0), &mut v);
    }
    Ok(RhoEstimate { value: estimate, converged: false, its: max_its })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::diagonal::build_real_diagonal;
    use crate::operators::grid::Grid3;
    use crate::operators::spectral::{build_spectral_laplacian, spectral_max_eigenvalue};

    #[test]
    fn diagonal_is_exact() {
        let op = build_real_diagonal(vec![1.0, 2.0, 3.0]);
        let est = estimate_rho(&op, 1e-8, 10, 1).unwrap();
        assert_eq!(est.value, 3.0);
        assert!(est.converged);
        assert_eq!(est.its, 0);
    }

    #[test]
    fn sponge_strength_is_exact() {
        let g = Grid3::new(8, 8, 8, 2.25).unwrap();
        let d = crate::operators::diagonal::build_sponge(&g, 3, 1.3).unwrap();
        let est = estimate_rho(&d, 1e-8, 10, 1).unwrap();
        assert_eq!(est.value, 1.3);
    }

    #[test]
    fn spectral_laplacian_radius_matches_analytic_maximum() {
        let g = Grid3::new(16, 16, 16, 2.25).unwrap();
        let s = build_spectral_laplacian(&g).unwrap();
        let est = estimate_rho(&s, 1e-12, 3000, 7).unwrap();
        let exact = spectral_max_eigenvalue(&g);
        assert!(
            (est.value - exact).abs() <= 1e-6 * exact,
            "estimate {} vs exact {exact}",
            est.value
        );
    }

    #[test]
    fn deterministic_across_runs() {
        let g = Grid3::new(8, 8, 8, 2.25).unwrap();
        let s = build_spectral_laplacian(&g).unwrap();
        let a = estimate_rho(&s, 1e-10, 500, 42).unwrap();
        let b = estimate_rho(&s, 1e-10, 500, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
