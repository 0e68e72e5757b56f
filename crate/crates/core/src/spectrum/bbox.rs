//! Rectangles containing operator spectra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::HelmholtzComposite;

/// Power iteration approaches the spectral radius from below; estimated
/// extents are inflated by this factor before use.
pub const RADIUS_INFLATION: f64 = 1.02;

/// Closed rectangle [b1, b2] x [-depth, 0] in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBox {
    pub b1: f64,
    pub b2: f64,
    pub depth: f64,
}

impl SpectralBox {
    pub fn new(b1: f64, b2: f64, depth: f64) -> Result<Self> {
        if !(b1.is_finite() && b2.is_finite() && depth.is_finite()) {
            return Err(Error::InvalidConfig("spectral box must be finite".into()));
        }
        if b1 > b2 {
            return Err(Error::InvalidConfig(format!("box ends out of order: {b1} > {b2}")));
        }
        if depth < 0.0 {
            return Err(Error::InvalidConfig(format!("box depth {depth} must be >= 0")));
        }
        Ok(SpectralBox { b1, b2, depth })
    }

    /// Box [-1, rho1 - 1] x [-rho2, 0] for an assembled Helmholtz operator,
    /// with the safety inflation applied to the estimated radii.
    pub fn from_composite(a: &HelmholtzComposite) -> Self {
        let rho1 = RADIUS_INFLATION * a.rho1().value;
        let rho2 = RADIUS_INFLATION * a.rho2();
        SpectralBox { b1: -1.0, b2: rho1 - 1.0, depth: rho2 }
    }

    /// Box for the doubled operator iC - I: centered at -1 with half-width
    /// rho2/2 + sqrt((rho2/2)^2 + rho1), same strip depth.
    pub fn for_doubled(rho1: f64, rho2: f64) -> Self {
        let rho1 = RADIUS_INFLATION * rho1;
        let rho2 = RADIUS_INFLATION * rho2;
        let radius = rho2 / 2.0 + ((rho2 / 2.0) * (rho2 / 2.0) + rho1).sqrt();
        SpectralBox { b1: -1.0 - radius, b2: -1.0 + radius, depth: rho2 }
    }

    pub fn width(&self) -> f64 {
        self.b2 - self.b1
    }

    /// Vertices b1, b2 on the real axis and beta1, beta2 at depth below.
    pub fn vertices(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.b1, 0.0),
            Complex64::new(self.b2, 0.0),
            Complex64::new(self.b1, -self.depth),
            Complex64::new(self.b2, -self.depth),
        ]
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.b1 + self.b2), -0.5 * self.depth)
    }

    pub fn circumradius(&self) -> f64 {
        let dx = 0.5 * self.width();
        let dy = 0.5 * self.depth;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.b1 - margin
            && z.re <= self.b2 + margin
            && z.im >= -self.depth - margin
            && z.im <= margin
    }

    /// Boundary sampling with all four vertices always included. For a
    /// degenerate box (zero depth or width) the samples cover the remaining
    /// segment or point.
    pub fn boundary_samples(&self, min_count: usize) -> Vec<Complex64> {
        let mut pts = Vec::new();
        let n_side = (min_count / 4).max(2);
        let push_segment = |pts: &mut Vec<Complex64>, a: Complex64, b: Complex64| {
            for k in 0..=n_side {
                let s = k as f64 / n_side as f64;
                pts.push(a + (b - a) * s);
            }
        };
        let [v1, v2, w1, w2] = self.vertices();
        push_segment(&mut pts, v1, v2);
        if self.depth > 0.0 {
            push_segment(&mut pts, w1, w2);
            if self.width() > 0.0 {
                push_segment(&mut pts, v1, w1);
                push_segment(&mut pts, v2, w2);
            }
        }
        pts.dedup_by(|a, b| a == b);
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_and_geometry() {
        let b = SpectralBox::new(-1.0, 2.8, 0.65).unwrap();
        assert!((b.width() - 3.8).abs() < 1e-15);
        assert!((b.center() - Complex64::new(0.9, -0.325)).norm() < 1e-15);
        let [v1, v2, w1, w2] = b.vertices();
        assert_eq!(v1, Complex64::new(-1.0, 0.0));
        assert_eq!(v2, Complex64::new(2.8, 0.0));
        assert_eq!(w1, Complex64::new(-1.0, -0.65));
        assert_eq!(w2, Complex64::new(2.8, -0.65));
    }

    #[test]
    fn boundary_samples_include_vertices() {
        let b = SpectralBox::new(-1.0, 2.8, 0.65).unwrap();
        let samples = b.boundary_samples(512);
        assert!(samples.len() >= 512);
        for v in b.vertices() {
            assert!(samples.iter().any(|s| (s - v).norm() < 1e-15));
        }
    }

    #[test]
    fn zero_depth_box_samples_the_segment() {
        let b = SpectralBox::new(-1.0, 8.0, 0.0).unwrap();
        let samples = b.boundary_samples(512);
        assert!(samples.iter().all(|s| s.im == 0.0));
        assert!(samples.iter().any(|s| s.re == -1.0));
        assert!(samples.iter().any(|s| s.re == 8.0));
    }

    #[test]
    fn rejects_disordered_ends() {
        assert!(SpectralBox::new(2.0, 1.0, 0.5).is_err());
        assert!(SpectralBox::new(0.0, 1.0, -0.5).is_err());
    }
}
