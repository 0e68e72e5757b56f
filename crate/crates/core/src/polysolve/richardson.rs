//! Optimal stationary Richardson iteration for a rectangular spectrum.
//!
//! For a constant polynomial p, |R(lambda)| = |lambda - o| / |z - o| with
//! o = 1/p + z, which is convex, so the boundary maximum sits on a vertex.
//! When the shift is outside the strip and inside the box circumcircle the
//! minimax constant and minimizer are closed-form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::SpectralBox;

#[derive(Debug, Clone, Copy)]
pub struct RichardsonParam {
    pub p_star: Complex64,
    pub rate: f64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    /// True when the closed form did not apply and a grid search supplied
    /// the parameters instead.
    pub fallback: bool,
}

/// max over the four box vertices of |1 - (v - z) p|.
pub fn vertex_rate(bbox: &SpectralBox, z: Complex64, p: Complex64) -> f64 {
    bbox.vertices()
        .into_iter()
        .map(|v| (1.0 - (v - z) * p).norm())
        .fold(0.0, f64::max)
}

fn closed_form(alpha1: Complex64, alpha2: Complex64) -> (Complex64, f64) {
    let n1 = alpha1.norm();
    let n2 = alpha2.norm();
    let p = (alpha1.conj() / n1 + alpha2.conj() / n2) / (n1 + n2);
    let rate = (alpha1 - alpha2).norm() / (n1 + n2);
    (p, rate)
}

fn grid_search(bbox: &SpectralBox, z: Complex64) -> (Complex64, f64) {
    // p near 1/(vertex - z) scales; start from a window covering all of them
    let scale = bbox
        .vertices()
        .into_iter()
        .map(|v| (v - z).norm())
        .fold(f64::INFINITY, f64::min)
        .max(1e-12);
    let mut center = Complex64::new(0.0, 0.0);
    let mut half = 3.0 / scale;
    let mut best = (Complex64::new(0.0, 0.0), vertex_rate(bbox, z, Complex64::new(0.0, 0.0)));
    for _pass in 0..3 {
        let steps = 160;
        for ki in 0..=steps {
            for kr in 0..=steps {
                let p = center
                    + Complex64::new(
                        -half + 2.0 * half * kr as f64 / steps as f64,
                        -half + 2.0 * half * ki as f64 / steps as f64,
                    );
                let rate = vertex_rate(bbox, z, p);
                if rate < best.1 {
                    best = (p, rate);
                }
            }
        }
        center = best.0;
        half = 4.0 * half / steps as f64;
    }
    best
}

/// Optimal complex constant and minimax rate for (A - zI) with spectrum in
/// the box. Outside the theorem's hypotheses the result comes from a grid
/// search and is flagged.
pub fn richardson_optimal(bbox: &SpectralBox, z: Complex64) -> Result<RichardsonParam> {
    let [b1, b2, beta1, beta2] = bbox.vertices();
    if bbox.width() == 0.0 && bbox.depth == 0.0 {
        // single-point spectrum: one step kills the error
        let b = b1;
        if (b - z).norm() == 0.0 {
            return Err(Error::InvalidConfig("shift coincides with the spectrum point".into()));
        }
        return Ok(RichardsonParam {
            p_star: 1.0 / (b - z),
            rate: 0.0,
            alpha1: b - z,
            alpha2: b - z,
            fallback: false,
        });
    }
    let shift_outside_strip = z.im > 0.0 || z.im < -bbox.depth;
    let inside_circumcircle = (z - bbox.center()).norm() <= bbox.circumradius();
    if shift_outside_strip && inside_circumcircle {
        let (alpha1, alpha2) =
            if z.im > 0.0 { (b1 - z, b2 - z) } else { (beta1 - z, beta2 - z) };
        let (p_star, rate) = closed_form(alpha1, alpha2);
        Ok(RichardsonParam { p_star, rate, alpha1, alpha2, fallback: false })
    } else {
        let (p_star, rate) = grid_search(bbox, z);
        Ok(RichardsonParam {
            p_star,
            rate,
            alpha1: b1 - z,
            alpha2: b2 - z,
            fallback: true,
        })
    }
}
