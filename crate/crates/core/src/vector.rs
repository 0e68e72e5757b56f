//! Complex vector kernels: dot products, norms, axpy.
//!
//! All reductions accumulate in a fixed serial order so that repeated runs
//! produce bitwise-identical results (residual histories are compared
//! byte-for-byte in golden tests).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex vector, x-fastest ordering for 3D fields.
pub type CVector = Vec<Complex64>;

fn check_len(a: &[Complex64], b: &[Complex64], context: &'static str) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len(), context });
    }
    Ok(())
}

/// Inner product, conjugate-linear in the first argument.
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
    check_len(x, y, "dot")?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    Ok(acc)
}

/// Euclidean norm.
pub fn norm(x: &[Complex64]) -> f64 {
    let mut acc = 0.0f64;
    for a in x {
        acc += a.norm_sqr();
    }
    acc.sqrt()
}

/// y <- alpha * x + y.
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
    check_len(x, y, "axpy")?;
    if alpha == Complex64::new(0.0, 0.0) {
        return Ok(());
    }
    for (a, b) in x.iter().zip(y.iter_mut()) {
        *b += alpha * a;
    }
    Ok(())
}

/// x <- alpha * x.
pub fn scale(alpha: Complex64, x: &mut [Complex64]) {
    for a in x.iter_mut() {
        *a *= alpha;
    }
}

/// Returns an error if any entry is NaN or infinite.
pub fn check_finite(x: &[Complex64], context: &'static str) -> Result<()> {
    for a in x {
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::NonFinite { context });
        }
    }
    Ok(())
}

/// All-zero vector of length `n`.
pub fn zeros(n: usize) -> CVector {
    vec![Complex64::new(0.0, 0.0); n]
}
