//! The assembled Helmholtz operator A = (S - M) -/+ iD and the double-size
//! first-order form iC - I.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Apply, OpKind, OperatorHandle};
use crate::operators::diagonal::diagonal_max_abs;
use crate::operators::rho::{estimate_rho, RhoEstimate};
use crate::vector::zeros;

/// Which half-plane the damping pushes the spectrum into.
///
/// The spectrum box [-1, rho1-1] x [-rho2, 0] assumes A = A1 - i*A2 with
/// A2 >= 0 (lower half-plane). The alternative writes A = (S - M) + iD; the
/// two differ by conjugation. `Lower` is the default and the only convention
/// the doubled form and the contour machinery support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DampingSign {
    #[default]
    Lower,
    Upper,
}

struct CompositeApply {
    s: OperatorHandle,
    m: OperatorHandle,
    d: OperatorHandle,
    damping: Complex64,
}

impl Apply for CompositeApply {
    fn dim(&self) -> usize {
        self.s.dim()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.s.apply_into(x, y).expect("composite: S apply");
        let t = self.m.apply(x).expect("composite: M apply");
        for (yi, ti) in y.iter_mut().zip(&t) {
            *yi -= ti;
        }
        let t = self.d.apply(x).expect("composite: D apply");
        for (yi, ti) in y.iter_mut().zip(&t) {
            *yi += self.damping * ti;
        }
    }
}

/// Hermitian part A1 = S - M.
struct HermitianPartApply {
    s: OperatorHandle,
    m: OperatorHandle,
}

impl Apply for HermitianPartApply {
    fn dim(&self) -> usize {
        self.s.dim()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.s.apply_into(x, y).expect("hermitian part: S apply");
        let t = self.m.apply(x).expect("hermitian part: M apply");
        for (yi, ti) in y.iter_mut().zip(&t) {
            *yi -= ti;
        }
    }
}

/// Assembled Helmholtz operator with cached spectrum-extent estimates.
#[derive(Clone)]
pub struct HelmholtzComposite {
    handle: OperatorHandle,
    a1: OperatorHandle,
    d: OperatorHandle,
    damping_sign: DampingSign,
    rho1: RhoEstimate,
    rho2: f64,
}

impl HelmholtzComposite {
    /// The full operator A.
    pub fn handle(&self) -> &OperatorHandle {
        &self.handle
    }

    /// The Hermitian part A1 = S - M as its own operator.
    pub fn hermitian_part(&self) -> &OperatorHandle {
        &self.a1
    }

    pub fn damping_sign(&self) -> DampingSign {
        self.damping_sign
    }

    pub fn dim(&self) -> usize {
        self.handle.dim()
    }

    /// Estimated spectral radius of A1 + I (horizontal spectrum extent).
    pub fn rho1(&self) -> &RhoEstimate {
        &self.rho1
    }

    /// Spectral radius of the damping diagonal (vertical spectrum extent).
    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    /// The double-size operator iC - I acting on (x; y) pairs, where
    /// C = [[0, I], [-(A1+I), -A2]]. Only the lower-half-plane damping
    /// convention matches this block structure.
    pub fn doubled(&self) -> Result<OperatorHandle> {
        if self.damping_sign != DampingSign::Lower {
            return Err(Error::InvalidConfig(
                "the doubled formulation requires the lower half-plane damping convention".into(),
            ));
        }
        Ok(build_doubled(self.a1.clone(), Some(self.d.clone())))
    }
}

/// Assembles A = (S - M) - iD (or + iD for the upper convention) and caches
/// rho1 = rho(A1 + I) (power iteration, inflated 2%) and rho2 = max D entry.
pub fn assemble_helmholtz(
    s: OperatorHandle,
    m: OperatorHandle,
    d: OperatorHandle,
    damping_sign: DampingSign,
) -> Result<HelmholtzComposite> {
    let n = s.dim();
    for (op, name) in [(&m, "mass"), (&d, "damping")] {
        if op.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: op.dim(),
                context: match name {
                    "mass" => "assemble (mass)",
                    _ => "assemble (damping)",
                },
            });
        }
    }
    let damping = match damping_sign {
        DampingSign::Lower => Complex64::new(0.0, -1.0),
        DampingSign::Upper => Complex64::new(0.0, 1.0),
    };
    let a1 = OperatorHandle::new(
        OpKind::HelmholtzComposite,
        Arc::new(HermitianPartApply { s: s.clone(), m: m.clone() }),
    );
    let a1_plus_i = a1.shifted(Complex64::new(-1.0, 0.0));
    let rho1 = estimate_rho(&a1_plus_i, 1e-10, 2000, 0x5eed)?;
    let rho2 = diagonal_max_abs(&d).ok_or_else(|| {
        Error::InvalidConfig("damping operator must be diagonal".into())
    })?;
    let handle = OperatorHandle::new(
        OpKind::HelmholtzComposite,
        Arc::new(CompositeApply { s, m, d: d.clone(), damping }),
    );
    Ok(HelmholtzComposite { handle, a1, d, damping_sign, rho1, rho2 })
}

struct DoubledApply {
    a1: OperatorHandle,
    a2: Option<OperatorHandle>,
}

impl Apply for DoubledApply {
    fn dim(&self) -> usize {
        2 * self.a1.dim()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.a1.dim();
        let (top, bottom) = (&x[..n], &x[n..]);
        let i = Complex64::new(0.0, 1.0);
        // C (top; bottom) = (bottom; -(A1+I) top - A2 bottom)
        // (iC - I)(top; bottom) = (i*bottom - top; -i(A1+I) top - i A2 bottom - bottom)
        let mut a1_top = zeros(n);
        self.a1.apply_into(top, &mut a1_top).expect("doubled: A1 apply");
        for k in 0..n {
            y[k] = i * bottom[k] - top[k];
            y[n + k] = -i * (a1_top[k] + top[k]) - bottom[k];
        }
        if let Some(a2) = &self.a2 {
            let a2_bottom = a2.apply(bottom).expect("doubled: A2 apply");
            for k in 0..n {
                y[n + k] -= i * a2_bottom[k];
            }
        }
    }
}

/// Builds iC - I from the Hermitian part A1 and optional damping A2.
/// Applying it costs one A1 matvec (plus a diagonal scale), about the same
/// as one application of A.
pub fn build_doubled(a1: OperatorHandle, a2: Option<OperatorHandle>) -> OperatorHandle {
    OperatorHandle::new(OpKind::Doubled, Arc::new(DoubledApply { a1, a2 }))
}

/// Embeds a right-hand side f as (0; f) for the doubled system.
pub fn doubled_rhs(f: &[Complex64]) -> Vec<Complex64> {
    let mut rhs = zeros(2 * f.len());
    rhs[f.len()..].copy_from_slice(f);
    rhs
}

/// The doubled unknown is (i*u; u); the solution of the original system is
/// the second block.
pub fn doubled_solution(xy: &[Complex64]) -> Vec<Complex64> {
    let n = xy.len() / 2;
    xy[n..].to_vec()
}

/// For a Hermitian A and a shift z off the real axis, the equivalent shifted
/// doubled problem uses s with z + 1 = (s + 1)^2; the doubled unknown is
/// (i*y; (s+1)*y).
pub fn equivalent_doubled_shift(z: Complex64) -> Complex64 {
    (z + 1.0).sqrt() - 1.0
}

/// Extracts y from the shifted doubled unknown (i*y; (s+1)*y).
pub fn shifted_doubled_solution(xy: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let n = xy.len() / 2;
    xy[n..].iter().map(|v| v / (s + 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::diagonal::{build_real_diagonal, build_sponge};
    use crate::operators::grid::{Grid3, WavespeedModel};
    use crate::operators::spectral::build_spectral_laplacian;
    use crate::operators::{build_mass, spectral_eigenvalue};
    use crate::vector::norm;

    fn small_composite() -> (Grid3, HelmholtzComposite) {
        let g = Grid3::new(8, 8, 1, 2.25).unwrap();
        let s = build_spectral_laplacian(&g).unwrap();
        let m = build_mass(&WavespeedModel::uniform(g)).unwrap();
        let d = build_sponge(&g, 2, 0.9).unwrap();
        (g, assemble_helmholtz(s, m, d, DampingSign::Lower).unwrap())
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        let (g, a) = small_composite();
        let x = zeros(g.len());
        let y = a.handle().apply(&x).unwrap();
        assert!(norm(&y) == 0.0);
        let dbl = a.doubled().unwrap();
        let y = dbl.apply(&zeros(2 * g.len())).unwrap();
        assert!(norm(&y) == 0.0);
    }

    #[test]
    fn damping_sign_flips_imaginary_part() {
        let g = Grid3::new(8, 8, 1, 2.25).unwrap();
        let s = build_spectral_laplacian(&g).unwrap();
        let m = build_mass(&WavespeedModel::uniform(g)).unwrap();
        let d = build_sponge(&g, 2, 0.9).unwrap();
        let dvals: Vec<Complex64> = d.diagonal_entries().unwrap().to_vec();
        let lower = assemble_helmholtz(s.clone(), m.clone(), d.clone(), DampingSign::Lower).unwrap();
        let upper = assemble_helmholtz(s, m, d, DampingSign::Upper).unwrap();
        let x: Vec<Complex64> =
            (0..g.len()).map(|k| Complex64::new((k % 5) as f64, (k % 3) as f64)).collect();
        let yl = lower.handle().apply(&x).unwrap();
        let yu = upper.handle().apply(&x).unwrap();
        // yu - yl = 2i D x
        for (k, (a, b)) in yl.iter().zip(&yu).enumerate() {
            let expect = 2.0 * Complex64::i() * dvals[k] * x[k];
            assert!((b - a - expect).norm() < 1e-12, "entry {k}");
        }
    }

    #[test]
    fn rho2_is_sponge_strength_and_rho1_near_spectral_radius() {
        let (g, a) = small_composite();
        assert_eq!(a.rho2(), 0.9);
        // uniform mass: A1 + I = S, so rho1 ~ max spectral eigenvalue,
        // power-iteration estimate inflated by the caller
        let max_eig = spectral_eigenvalue(&g, g.n1 / 2, g.n2 / 2, 0);
        assert!((a.rho1().value - max_eig).abs() < 1e-6 * max_eig);
    }

    #[test]
    fn doubled_requires_lower_convention() {
        let g = Grid3::new(8, 8, 1, 2.25).unwrap();
        let s = build_spectral_laplacian(&g).unwrap();
        let m = build_mass(&WavespeedModel::uniform(g)).unwrap();
        let d = build_sponge(&g, 2, 0.9).unwrap();
        let upper = assemble_helmholtz(s, m, d, DampingSign::Upper).unwrap();
        assert!(upper.doubled().is_err());
    }

    #[test]
    fn doubled_block_action_matches_direct_formula() {
        let a1 = build_real_diagonal(vec![0.5, -0.25]);
        let a2 = build_real_diagonal(vec![0.1, 0.0]);
        let dbl = build_doubled(a1, Some(a2));
        let x = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(0.5, 0.5),
        ];
        let y = dbl.apply(&x).unwrap();
        let i = Complex64::new(0.0, 1.0);
        // top block: i*bottom - top
        assert!((y[0] - (i * x[2] - x[0])).norm() < 1e-15);
        assert!((y[1] - (i * x[3] - x[1])).norm() < 1e-15);
        // bottom block: -i(A1+I)top - iA2 bottom - bottom
        let b0 = -i * (1.5 * x[0]) - i * (0.1 * x[2]) - x[2];
        let b1 = -i * (0.75 * x[1]) - x[3];
        assert!((y[2] - b0).norm() < 1e-15);
        assert!((y[3] - b1).norm() < 1e-15);
    }

    #[test]
    fn rhs_embedding_and_extraction() {
        let f = vec![Complex64::new(1.0, 2.0), Complex64::new(3.0, -1.0)];
        let rhs = doubled_rhs(&f);
        assert_eq!(rhs[0], Complex64::new(0.0, 0.0));
        assert_eq!(&rhs[2..], &f[..]);
        let u = doubled_solution(&rhs);
        assert_eq!(u, f);
    }

    #[test]
    fn equivalent_shift_satisfies_quadratic_relation() {
        let z = Complex64::new(0.0, 0.25);
        let s = equivalent_doubled_shift(z);
        assert!(((s + 1.0) * (s + 1.0) - (z + 1.0)).norm() < 1e-14);
    }
}
