//! Residual polynomial of the exponential-Taylor fixed-point iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::SpectralBox;

/// Tuned parameters for one shifted solve: degree q, step delta, Taylor
/// center z0, shift z, and the predicted per-sweep contraction nu.
#[derive(Debug, Clone)]
pub struct PolyScheme {
    pub q: usize,
    pub delta: f64,
    pub z0: Complex64,
    pub z: Complex64,
    /// max over the sampled box boundary of |R(lambda)|; < 1 for a usable
    /// scheme.
    pub nu: f64,
    pub bbox: SpectralBox,
}

impl PolyScheme {
    /// The Taylor center that makes the q = 1 scheme optimal: box midpoint
    /// horizontally, the shift's imaginary part vertically. Higher orders
    /// keep the same center.
    pub fn center_for(bbox: &SpectralBox, z: Complex64) -> Complex64 {
        Complex64::new(0.5 * (bbox.b1 + bbox.b2), z.im)
    }

    /// Predicted matvecs to reduce the residual to `target`: q sweeps per
    /// application block, ceil(ln target / ln nu) sweeps.
    pub fn predicted_matvecs(&self, target: f64) -> u64 {
        predicted_matvecs(self.q, self.nu, target)
    }
}

pub(crate) fn predicted_matvecs(q: usize, nu: f64, target: f64) -> u64 {
    assert!(target > 0.0 && target < 1.0, "target must be in (0,1)");
    assert!(nu > 0.0 && nu < 1.0, "nu must be in (0,1)");
    let sweeps = (target.ln() / nu.ln()).ceil() as u64;
    q as u64 * sweeps.max(1)
}

/// Truncated exponential series sum_{j=0..q} w^j / j!, evaluated by nested
/// multiplication with running factorial terms.
pub fn taylor_exp_sum(w: Complex64, q: usize) -> Complex64 {
    let mut s = Complex64::new(1.0, 0.0);
    for j in (1..=q).rev() {
        s = 1.0 + w * s / j as f64;
    }
    s
}

/// R(lambda) = p(lambda) / p(z) with p the degree-q truncated exponential of
/// -i*delta*(. - z0). Equals 1 at lambda = z by construction.
pub fn residual_poly_eval(scheme: &PolyScheme, lambda: Complex64) -> Result<Complex64> {
    let num = taylor_exp_sum(-Complex64::i() * scheme.delta * (lambda - scheme.z0), scheme.q);
    let den = taylor_exp_sum(-Complex64::i() * scheme.delta * (scheme.z - scheme.z0), scheme.q);
    if den.norm() == 0.0 {
        return Err(Error::DegenerateScheme);
    }
    Ok(num / den)
}

/// max |R| over a boundary sampling; the predicted contraction per sweep.
pub fn max_residual_on(
    samples: &[Complex64],
    q: usize,
    delta: f64,
    z0: Complex64,
    z: Complex64,
) -> Result<f64> {
    let den = taylor_exp_sum(-Complex64::i() * delta * (z - z0), q);
    let den_norm = den.norm();
    if den_norm == 0.0 {
        return Err(Error::DegenerateScheme);
    }
    let mut worst = 0.0f64;
    for &lambda in samples {
        let num = taylor_exp_sum(-Complex64::i() * delta * (lambda - z0), q);
        worst = worst.max(num.norm() / den_norm);
    }
    Ok(worst)
}
