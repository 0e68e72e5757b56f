//! Dense materialization and eigenvalue oracle for small operators.
//!
//! Containment statements about operator spectra are checked against a
//! standard nonsymmetric eigenvalue routine applied to a densified copy of
//! the operator, independent of any analytic eigenvalue formulas.

use ndarray::Array2;
use ndarray_linalg::{Eig, Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::OperatorHandle;
use crate::vector::zeros;

/// Hard cap for densification; above this the oracle refuses.
pub const DENSE_ORACLE_CAP: usize = 2000;

/// Materializes the operator column by column from applications to unit
/// vectors.
pub fn materialize(op: &OperatorHandle) -> Result<Array2<Complex64>> {
    let n = op.dim();
    if n > DENSE_ORACLE_CAP {
        return Err(Error::InvalidConfig(format!(
            "dense oracle limited to dimension {DENSE_ORACLE_CAP}, operator has {n}"
        )));
    }
    let mut a = Array2::<Complex64>::zeros((n, n));
    let mut e = zeros(n);
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        let col = op.apply(&e)?;
        for i in 0..n {
            a[[i, j]] = col[i];
        }
        e[j] = Complex64::new(0.0, 0.0);
    }
    Ok(a)
}

/// All eigenvalues of a small operator through LAPACK's nonsymmetric solver.
pub fn dense_eigenvalues(op: &OperatorHandle) -> Result<Vec<Complex64>> {
    let a = materialize(op)?;
    let (vals, _) = a
        .eig()
        .map_err(|e| Error::InvalidConfig(format!("dense eigenvalue routine failed: {e}")))?;
    Ok(vals.to_vec())
}

/// Eigenvalues of the Hermitian part (A + A^H)/2 of a small operator.
pub fn dense_hermitian_part_eigenvalues(op: &OperatorHandle) -> Result<Vec<f64>> {
    let a = materialize(op)?;
    let ah = a.t().mapv(|v| v.conj());
    let herm = (&a + &ah).mapv(|v| 0.5 * v);
    let (vals, _) = herm
        .eigh(UPLO::Lower)
        .map_err(|e| Error::InvalidConfig(format!("dense Hermitian routine failed: {e}")))?;
    Ok(vals.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::diagonal::build_diagonal;

    #[test]
    fn diagonal_eigenvalues_recovered() {
        let d = vec![
            Complex64::new(1.0, -0.5),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.5, 0.25),
        ];
        let op = build_diagonal(d.clone());
        let mut vals = dense_eigenvalues(&op).unwrap();
        vals.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let mut expect = d;
        expect.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (v, e) in vals.iter().zip(&expect) {
            assert!((v - e).norm() < 1e-12);
        }
    }
}
