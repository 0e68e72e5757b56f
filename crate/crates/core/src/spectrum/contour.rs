//! Elliptic quadrature contours for the resolvent integral.
//!
//! The ellipse {t*r*cos(theta) + i*r*sin(theta)} is flattened horizontally
//! (t < 1 encloses fewer eigenvalues), shifted so no node enters the spectrum
//! strip, and sampled at the J angles theta_j = (2j-1)*pi/J.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::bbox::SpectralBox;

/// Quadrature rule on a shifted ellipse.
#[derive(Debug, Clone, Serialize)]
pub struct Contour {
    /// Horizontal axis ratio in (0, 1].
    pub t: f64,
    /// Vertical semi-axis.
    pub r: f64,
    /// Node count.
    pub j: usize,
    /// Clearance between nodes and the spectrum strip.
    pub eps: f64,
    /// Strip depth the contour was centered against.
    pub rho2: f64,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

fn build(t: f64, r: f64, j: usize, eps: f64, rho2: f64) -> Contour {
    let phi = std::f64::consts::PI / j as f64;
    let mut nodes = Vec::with_capacity(j);
    let mut weights = Vec::with_capacity(j);
    for k in 1..=j {
        let theta = (2 * k - 1) as f64 * phi;
        nodes.push(Complex64::new(
            t * r * (theta.cos() - phi.cos()),
            r * theta.sin() - rho2 / 2.0,
        ));
        // d z / (2 pi i) for the unshifted ellipse; a rigid translation of
        // the contour leaves dz/dtheta unchanged
        weights.push(Complex64::new(r * theta.cos(), t * r * theta.sin()) / j as f64);
    }
    Contour { t, r, j, eps, rho2, nodes, weights }
}

/// Contour for a spectral box: the radius r = (rho2/2 + eps)/sin(pi/J) keeps
/// every node's imaginary part out of (-eps - rho2, eps).
pub fn make_contour(bbox: &SpectralBox, j: usize, t: f64, eps: f64) -> Result<Contour> {
    if j < 2 {
        return Err(Error::InvalidConfig(format!("contour needs at least 2 nodes, got {j}")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidConfig(format!("axis ratio t = {t} must be in (0, 1]")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!("clearance eps = {eps} must be positive")));
    }
    let rho2 = bbox.depth;
    let phi = std::f64::consts::PI / j as f64;
    let r = (rho2 / 2.0 + eps) / phi.sin();
    Ok(build(t, r, j, eps, rho2))
}

/// Contour with an explicitly fixed ellipse (t, r); the clearance follows as
/// eps = r*sin(pi/J) - rho2/2. Increasing J on a fixed ellipse refines the
/// quadrature without moving the curve.
pub fn make_contour_fixed_radius(rho2: f64, r: f64, t: f64, j: usize) -> Result<Contour> {
    if j < 2 {
        return Err(Error::InvalidConfig(format!("contour needs at least 2 nodes, got {j}")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidConfig(format!("axis ratio t = {t} must be in (0, 1]")));
    }
    let phi = std::f64::consts::PI / j as f64;
    let eps = r * phi.sin() - rho2 / 2.0;
    if eps <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "radius {r} leaves no clearance above the strip of depth {rho2}"
        )));
    }
    Ok(build(t, r, j, eps, rho2))
}

impl Contour {
    /// Ellipse center: -t*r*cos(pi/J) - i*rho2/2.
    pub fn center(&self) -> Complex64 {
        let phi = std::f64::consts::PI / self.j as f64;
        Complex64::new(-self.t * self.r * phi.cos(), -self.rho2 / 2.0)
    }

    /// Point on the underlying continuous contour at angle theta.
    pub fn at(&self, theta: f64) -> Complex64 {
        self.center() + Complex64::new(self.t * self.r * theta.cos(), self.r * theta.sin())
    }

    /// Normalized ellipse equation: < 1 inside, = 1 on the curve, > 1 outside.
    pub fn ellipse_equation(&self, z: Complex64) -> f64 {
        let c = self.center();
        let dx = (z.re - c.re) / (self.t * self.r);
        let dy = (z.im - c.im) / self.r;
        dx * dx + dy * dy
    }

    /// Whether z lies strictly inside the ellipse.
    pub fn encloses(&self, z: Complex64) -> bool {
        self.ellipse_equation(z) < 1.0
    }

    /// Whether z is too close to the curve for inside/outside classification
    /// to be meaningful, in units of the normalized equation.
    pub fn grazes(&self, z: Complex64, margin: f64) -> bool {
        (self.ellipse_equation(z) - 1.0).abs() < margin
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_box() -> SpectralBox {
        SpectralBox::new(-1.0, 2.8, 0.9).unwrap()
    }

    #[test]
    fn nodes_stay_left_of_the_imaginary_axis() {
        let c = make_contour(&table_box(), 6, 0.1, 0.8).unwrap();
        for z in &c.nodes {
            assert!(z.re <= 1e-15);
        }
    }

    #[test]
    fn nodes_clear_the_spectrum_strip() {
        for j in [2usize, 3, 6, 9, 16] {
            let c = make_contour(&table_box(), j, 0.1, 0.35).unwrap();
            for z in &c.nodes {
                let dist_from_strip_center = (z.im + c.rho2 / 2.0).abs();
                assert!(dist_from_strip_center >= c.rho2 / 2.0 + c.eps - 1e-12);
                assert!(!(z.im > -c.eps - c.rho2 + 1e-12 && z.im < c.eps - 1e-12));
            }
        }
    }

    #[test]
    fn weights_sum_to_zero() {
        for j in [2usize, 3, 5, 6, 17] {
            let c = make_contour(&table_box(), j, 0.3, 0.5).unwrap();
            let sum: Complex64 = c.weights.iter().sum();
            assert!(sum.norm() < 1e-13 * c.r, "J = {j}: {sum}");
        }
    }

    #[test]
    fn two_node_contour_sits_on_the_shifted_imaginary_axis() {
        // phi = pi/2: cos(theta_j) = cos(phi) = 0, so Re(z_j) = 0
        let c = make_contour(&table_box(), 2, 0.5, 0.4).unwrap();
        assert_eq!(c.nodes.len(), 2);
        for z in &c.nodes {
            assert!(z.re.abs() < 1e-15);
        }
        // nodes at +- r - rho2/2
        assert!((c.nodes[0].im - (c.r - 0.45)).abs() < 1e-12);
        assert!((c.nodes[1].im - (-c.r - 0.45)).abs() < 1e-12);
    }

    #[test]
    fn first_scaling_node_set_is_reproduced() {
        // The published J = 6, t = 0.1 node set for the largest-shift case is
        // generated by rho2 = 0.9 with clearance 0.8 (radius 2.5). Two-decimal
        // agreement, with 0.015 slack for last-digit rounding in the source.
        let bbox = SpectralBox::new(-1.0, 2.8, 0.9).unwrap();
        let c = make_contour(&bbox, 6, 0.1, 0.8).unwrap();
        assert!((c.r - 2.5).abs() < 1e-12);
        let expected = [
            Complex64::new(0.00, 0.80),
            Complex64::new(-0.22, 2.05),
            Complex64::new(-0.43, 0.80),
            Complex64::new(-0.43, -1.70),
            Complex64::new(-0.22, -2.96),
            Complex64::new(0.00, -1.70),
        ];
        for (z, e) in c.nodes.iter().zip(&expected) {
            assert!((z.re - e.re).abs() <= 0.015, "node {z} vs {e}");
            assert!((z.im - e.im).abs() <= 0.015, "node {z} vs {e}");
        }
    }

    #[test]
    fn later_scaling_node_sets_follow_inverse_frequency_clearance() {
        // eps proportional to 1/omega: halving the frequency doubles eps.
        // The second published set (0.4 clearance) and fourth (0.2):
        let bbox = SpectralBox::new(-1.0, 2.8, 0.9).unwrap();
        let sets: [(f64, [[f64; 2]; 6]); 2] = [
            (
                0.4,
                [
                    [0.00, 0.40],
                    [-0.15, 1.25],
                    [-0.30, 0.40],
                    [-0.30, -1.30],
                    [-0.15, -2.16],
                    [0.00, -1.30],
                ],
            ),
            (
                0.2,
                [
                    [0.00, 0.20],
                    [-0.11, 0.85],
                    [-0.23, 0.20],
                    [-0.23, -1.10],
                    [-0.11, -1.76],
                    [0.00, -1.10],
                ],
            ),
        ];
        for (eps, expected) in sets {
            let c = make_contour(&bbox, 6, 0.1, eps).unwrap();
            for (z, e) in c.nodes.iter().zip(&expected) {
                assert!((z.re - e[0]).abs() <= 0.015, "eps {eps}: node {z} vs {e:?}");
                assert!((z.im - e[1]).abs() <= 0.015, "eps {eps}: node {z} vs {e:?}");
            }
        }
    }

    #[test]
    fn fixed_radius_contour_keeps_the_ellipse_as_j_grows() {
        // the strip must stay clear at the largest J: r sin(pi/32) > rho2/2
        let a = make_contour_fixed_radius(0.2, 2.5, 0.3, 8).unwrap();
        let b = make_contour_fixed_radius(0.2, 2.5, 0.3, 32).unwrap();
        assert_eq!(a.r, b.r);
        assert!(b.eps < a.eps);
        // the center drifts only by t*r*(cos(pi/8) - cos(pi/32))
        assert!((a.center() - b.center()).norm() < 0.06 * a.r);
        // too small a radius leaves no clearance and is rejected
        assert!(make_contour_fixed_radius(0.9, 2.5, 0.3, 32).is_err());
    }
}
