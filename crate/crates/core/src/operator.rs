//! The matrix-free linear operator contract.
//!
//! Every operator is applied through an [`OperatorHandle`], which enforces
//! dimension and finiteness checks and keeps matvec tallies. System operators
//! and preconditioners are counted on separate counters. Handles are cheap to
//! clone and share their counters, so a shifted wrapper built on top of a
//! Helmholtz operator reports its applications into the same accounting that
//! the outer solver reads.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vector::{check_finite, zeros, CVector};

/// Matrix-free application. Implementations must be reentrant: all operator
/// state is read-only during `apply_into`, scratch is per invocation.
pub trait Apply: Send + Sync {
    fn dim(&self) -> usize;
    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]);

    /// Entries when the operator is a stored diagonal, letting spectral-radius
    /// queries answer exactly instead of iterating.
    fn diagonal(&self) -> Option<&[Complex64]> {
        None
    }
}

/// Concrete operator species, used for reporting and counter routing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    SpectralLaplacian,
    Fd7Laplacian,
    Diagonal,
    HelmholtzComposite,
    Doubled,
    Shifted,
    Ilu0Precond,
    InvLapPrecond,
    DenseTest,
}

impl OpKind {
    pub fn is_preconditioner(self) -> bool {
        matches!(self, OpKind::Ilu0Precond | OpKind::InvLapPrecond)
    }
}

#[derive(Default)]
struct OpCounters {
    matvecs: AtomicU64,
    precond_applies: AtomicU64,
}

/// Shareable handle around a matrix-free operator.
#[derive(Clone)]
pub struct OperatorHandle {
    inner: Arc<dyn Apply>,
    kind: OpKind,
    counters: Arc<OpCounters>,
}

impl OperatorHandle {
    pub fn new(kind: OpKind, inner: Arc<dyn Apply>) -> Self {
        OperatorHandle { inner, kind, counters: Arc::new(OpCounters::default()) }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    /// Applications of this operator so far (non-preconditioner kinds).
    pub fn matvec_count(&self) -> u64 {
        self.counters.matvecs.load(Ordering::Relaxed)
    }

    /// Applications counted on the separate preconditioner tally.
    pub fn precond_count(&self) -> u64 {
        self.counters.precond_applies.load(Ordering::Relaxed)
    }

    /// Stored entries for diagonal operators, `None` otherwise.
    pub fn diagonal_entries(&self) -> Option<&[Complex64]> {
        self.inner.diagonal()
    }

    /// y = op * x with dimension and finiteness checks.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
                context: "operator apply (input)",
            });
        }
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.len(),
                context: "operator apply (output)",
            });
        }
        check_finite(x, "operator apply (input)")?;
        self.inner.apply_into(x, y);
        check_finite(y, "operator apply (output)")?;
        if self.kind.is_preconditioner() {
            self.counters.precond_applies.fetch_add(1, Ordering::Relaxed);
        } else {
            self.counters.matvecs.fetch_add(1, Ordering::Relaxed);
        }
        Ok(())
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<CVector> {
        let mut y = zeros(self.dim());
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    /// Wrapper applying `self - z I`. Applications tick both the wrapper's
    /// counter and the wrapped operator's counter (one matvec each).
    pub fn shifted(&self, z: Complex64) -> OperatorHandle {
        OperatorHandle::new(
            OpKind::Shifted,
            Arc::new(ShiftedApply { base: self.clone(), shift: z }),
        )
    }
}

struct ShiftedApply {
    base: OperatorHandle,
    shift: Complex64,
}

impl Apply for ShiftedApply {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        // Checks already ran in the outer handle; go through the base handle
        // so its counter advances.
        self.base
            .apply_into(x, y)
            .expect("shifted apply: base operator rejected checked input");
        if self.shift != Complex64::new(0.0, 0.0) {
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi -= self.shift * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct ScaleBy2 {
        n: usize,
    }

    impl Apply for ScaleBy2 {
        fn dim(&self) -> usize {
            self.n
        }
        fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi = 2.0 * xi;
            }
        }
    }

    #[test]
    fn counter_matches_application_count() {
        let op = OperatorHandle::new(OpKind::DenseTest, Arc::new(ScaleBy2 { n: 3 }));
        let x = vec![Complex64::new(1.0, 0.0); 3];
        for _ in 0..7 {
            op.apply(&x).unwrap();
        }
        assert_eq!(op.matvec_count(), 7);
        assert_eq!(op.precond_count(), 0);
    }

    #[test]
    fn zero_shift_wrapper_matches_base() {
        let op = OperatorHandle::new(OpKind::DenseTest, Arc::new(ScaleBy2 { n: 4 }));
        let sh = op.shifted(Complex64::new(0.0, 0.0));
        let x: Vec<Complex64> = (0..4).map(|i| Complex64::new(i as f64, -1.0)).collect();
        assert_eq!(op.apply(&x).unwrap(), sh.apply(&x).unwrap());
        // one base apply direct, one through the wrapper
        assert_eq!(op.matvec_count(), 2);
        assert_eq!(sh.matvec_count(), 1);
    }

    #[test]
    fn shifted_subtracts_z_x() {
        let op = OperatorHandle::new(OpKind::DenseTest, Arc::new(ScaleBy2 { n: 2 }));
        let z = Complex64::new(0.5, -1.0);
        let sh = op.shifted(z);
        let x = vec![Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.0)];
        let y = sh.apply(&x).unwrap();
        for (yi, xi) in y.iter().zip(&x) {
            assert_eq!(*yi, 2.0 * xi - z * xi);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let op = OperatorHandle::new(OpKind::DenseTest, Arc::new(ScaleBy2 { n: 3 }));
        let x = vec![Complex64::new(1.0, 0.0); 4];
        assert!(matches!(op.apply(&x), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn non_finite_input_is_reported() {
        let op = OperatorHandle::new(OpKind::DenseTest, Arc::new(ScaleBy2 { n: 1 }));
        let x = vec![Complex64::new(f64::NAN, 0.0)];
        assert!(matches!(op.apply(&x), Err(Error::NonFinite { .. })));
    }
}
