//! Scalar least-squares step: d = argmin ||f - d*Aw||.

use num_complex::Complex64;

use crate::error::Result;
use crate::vector::dot;

/// Closed-form complex least squares d = <Aw, f> / <Aw, Aw>. The residual
/// f - d*Aw is orthogonal to Aw, so the step never increases the residual.
#[derive(Debug, Clone, Copy)]
pub struct OptimalStep {
    pub d: Complex64,
    /// Aw was zero: the quadrature produced nothing and d = 0 was returned.
    pub degenerate: bool,
}

pub fn optimal_step(aw: &[Complex64], f: &[Complex64]) -> Result<OptimalStep> {
    let denom = dot(aw, aw)?.re;
    if denom == 0.0 {
        return Ok(OptimalStep { d: Complex64::new(0.0, 0.0), degenerate: true });
    }
    let d = dot(aw, f)? / denom;
    Ok(OptimalStep { d, degenerate: false })
}
