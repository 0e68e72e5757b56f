//! Right-preconditioned restarted GMRES with an optional flexible variant.
//!
//! Arnoldi uses modified Gram-Schmidt with one reorthogonalization pass when
//! the projected column loses more than half its norm. The Hessenberg least
//! squares is updated by Givens rotations, so residual norms are available
//! every step and are non-increasing within a cycle. With right
//! preconditioning they are true residual norms, which keeps the
//! preconditioner accounting honest.

use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::OperatorHandle;
use crate::stats::SolveStats;
use crate::vector::{axpy, dot, norm, scale, zeros, CVector};

/// Preconditioner contract for GMRES: approximate application of an inverse.
/// The flexible variant tolerates implementations that change between calls.
pub trait Preconditioner: Sync {
    fn apply_precond(&self, v: &[Complex64]) -> Result<CVector>;
    /// Applications performed so far, if the implementation counts them.
    fn applications(&self) -> u64 {
        0
    }
}

impl Preconditioner for OperatorHandle {
    fn apply_precond(&self, v: &[Complex64]) -> Result<CVector> {
        self.apply(v)
    }
    fn applications(&self) -> u64 {
        self.precond_count() + self.matvec_count()
    }
}

/// GMRES controls. `restart` is the Arnoldi cycle length m. When
/// `stall_window` is nonzero, the solve stops flagged as stalled if the
/// relative residual improves by less than `stall_improvement` over that many
/// iterations.
#[derive(Debug, Clone)]
pub struct KrylovConfig {
    pub restart: usize,
    pub max_total_its: usize,
    pub tol: f64,
    pub flexible: bool,
    pub stall_window: usize,
    pub stall_improvement: f64,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig {
            restart: 40,
            max_total_its: 2000,
            tol: 1e-8,
            flexible: false,
            stall_window: 0,
            stall_improvement: 0.01,
        }
    }
}

const REORTH_THRESHOLD: f64 = std::f64::consts::FRAC_1_SQRT_2;

struct Givens {
    c: f64,
    s: Complex64,
}

fn make_givens(a: Complex64, b: f64) -> (Givens, Complex64) {
    // b is the real subdiagonal from normalization
    let an = a.norm();
    let r = (an * an + b * b).sqrt();
    if r == 0.0 {
        return (Givens { c: 1.0, s: Complex64::new(0.0, 0.0) }, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (Givens { c: 0.0, s: Complex64::new(1.0, 0.0) }, Complex64::new(b, 0.0));
    }
    let alpha = a / an;
    (Givens { c: an / r, s: alpha * (b / r) }, alpha * r)
}

impl Givens {
    fn rotate(&self, top: Complex64, bottom: Complex64) -> (Complex64, Complex64) {
        (
            self.c * top + self.s * bottom,
            -self.s.conj() * top + self.c * bottom,
        )
    }
}

/// Solves A x = f (right-preconditioned when `precond` is given). Returns the
/// iterate and stats; `stats.converged` reflects the tolerance test on the
/// relative residual.
pub fn gmres(
    a: &OperatorHandle,
    f: &[Complex64],
    x0: Option<&[Complex64]>,
    precond: Option<&dyn Preconditioner>,
    cfg: &KrylovConfig,
) -> Result<(CVector, SolveStats)> {
    let start = Instant::now();
    let n = a.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len(), context: "gmres rhs" });
    }
    if cfg.restart == 0 {
        return Err(Error::InvalidConfig("gmres restart length must be >= 1".into()));
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
        return Err(Error::InvalidConfig(format!("gmres tol {} must be in (0,1)", cfg.tol)));
    }
    let mvs0 = a.matvec_count();
    let mut stats = SolveStats::default();
    let f_norm = norm(f);
    let mut x = match x0 {
        Some(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                    context: "gmres initial guess",
                });
            }
            v.to_vec()
        }
        None => zeros(n),
    };
    if f_norm == 0.0 {
        stats.converged = true;
        stats.residual_history.push((0, 0.0));
        return Ok((zeros(n), stats));
    }
    let mut x_is_zero = x0.is_none();

    'outer: loop {
        // residual of the current iterate
        let mut r = if x_is_zero {
            f.to_vec()
        } else {
            let ax = a.apply(&x)?;
            let mut r = f.to_vec();
            for (ri, ai) in r.iter_mut().zip(&ax) {
                *ri -= ai;
            }
            r
        };
        let beta = norm(&r);
        if stats.residual_history.is_empty() {
            stats.residual_history.push((0, beta / f_norm));
        }
        if beta / f_norm <= cfg.tol {
            stats.converged = true;
            break;
        }
        if stats.its >= cfg.max_total_its {
            break;
        }
        scale(Complex64::new(1.0 / beta, 0.0), &mut r);
        let mut basis: Vec<CVector> = vec![r];
        let mut z_basis: Vec<CVector> = Vec::new(); // flexible storage
        let mut h_cols: Vec<Vec<Complex64>> = Vec::new();
        let mut rotations: Vec<Givens> = Vec::new();
        let mut g: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); cfg.restart + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut k_done = 0usize;
        let mut cycle_converged = false;

        for k in 0..cfg.restart {
            if stats.its >= cfg.max_total_its {
                break;
            }
            let zk: CVector = match precond {
                Some(m) => m.apply_precond(&basis[k])?,
                None => basis[k].clone(),
            };
            let mut w = a.apply(&zk)?;
            if cfg.flexible {
                z_basis.push(zk);
            }
            let w_before = norm(&w);
            let mut h = vec![Complex64::new(0.0, 0.0); k + 2];
            for i in 0..=k {
                let hik = dot(&basis[i], &w)?;
                h[i] = hik;
                axpy(-hik, &basis[i], &mut w)?;
            }
            let mut w_norm = norm(&w);
            if w_norm < REORTH_THRESHOLD * w_before {
                // one corrective pass against loss of orthogonality
                for i in 0..=k {
                    let hik = dot(&basis[i], &w)?;
                    h[i] += hik;
                    axpy(-hik, &basis[i], &mut w)?;
                }
                w_norm = norm(&w);
            }
            if !w_norm.is_finite() {
                return Err(Error::NonFinite { context: "gmres basis" });
            }
            h[k + 1] = Complex64::new(w_norm, 0.0);
            let breakdown = w_norm <= 1e-14 * beta.max(f_norm);
            if !breakdown {
                scale(Complex64::new(1.0 / w_norm, 0.0), &mut w);
                basis.push(w);
            }
            // apply the accumulated rotations, then eliminate the subdiagonal
            for (i, rot) in rotations.iter().enumerate() {
                let (t, b) = rot.rotate(h[i], h[i + 1]);
                h[i] = t;
                h[i + 1] = b;
            }
            let (rot, rr) = make_givens(h[k], w_norm);
            h[k] = rr;
            h[k + 1] = Complex64::new(0.0, 0.0);
            let (gt, gb) = rot.rotate(g[k], g[k + 1]);
            g[k] = gt;
            g[k + 1] = gb;
            rotations.push(rot);
            h_cols.push(h);
            k_done = k + 1;
            stats.its += 1;
            let res = g[k + 1].norm() / f_norm;
            stats.residual_history.push((stats.its, res));
            if cfg.stall_window > 0 && stats.residual_history.len() > cfg.stall_window {
                let prev =
                    stats.residual_history[stats.residual_history.len() - 1 - cfg.stall_window].1;
                if res > (1.0 - cfg.stall_improvement) * prev {
                    stats.stalled = true;
                }
            }
            if res <= cfg.tol || breakdown || stats.stalled {
                cycle_converged = res <= cfg.tol;
                break;
            }
        }
        if k_done == 0 {
            break; // budget exhausted before any step
        }
        // back substitution on the k_done x k_done triangle
        let mut y = vec![Complex64::new(0.0, 0.0); k_done];
        for i in (0..k_done).rev() {
            let mut acc = g[i];
            for j in (i + 1)..k_done {
                acc -= h_cols[j][i] * y[j];
            }
            let hii = h_cols[i][i];
            if hii.norm() == 0.0 {
                return Err(Error::NonFinite { context: "gmres triangular solve" });
            }
            y[i] = acc / hii;
        }
        // assemble the update in the preconditioned variable
        let mut update = zeros(n);
        if cfg.flexible {
            for (yi, zi) in y.iter().zip(&z_basis) {
                axpy(*yi, zi, &mut update)?;
            }
        } else {
            let mut vy = zeros(n);
            for (yi, vi) in y.iter().zip(&basis) {
                axpy(*yi, vi, &mut vy)?;
            }
            update = match precond {
                Some(m) => m.apply_precond(&vy)?,
                None => vy,
            };
        }
        for (xi, ui) in x.iter_mut().zip(&update) {
            *xi += ui;
        }
        x_is_zero = false;
        if cycle_converged {
            stats.converged = true;
            break 'outer;
        }
        if stats.stalled || stats.its >= cfg.max_total_its {
            break;
        }
        stats.cycles += 1;
    }
    stats.mvs = a.matvec_count() - mvs0;
    if let Some(m) = precond {
        stats.precond_applies = m.applications();
    }
    stats.seconds = start.elapsed().as_secs_f64();
    Ok((x, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_diagonal, build_real_diagonal};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = build_real_diagonal(vec![1.0; 12]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = rand_vec(&mut rng, 12);
        let cfg = KrylovConfig { tol: 1e-12, ..Default::default() };
        let (x, stats) = gmres(&a, &f, None, None, &cfg).unwrap();
        assert!(stats.converged);
        assert_eq!(stats.its, 1);
        for (xi, fi) in x.iter().zip(&f) {
            assert!((xi - fi).norm() < 1e-12);
        }
    }

    #[test]
    fn two_distinct_eigenvalues_need_two_iterations() {
        let mut d = vec![2.0; 20];
        for v in d.iter_mut().skip(10) {
            *v = 5.0;
        }
        let a = build_real_diagonal(d);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = rand_vec(&mut rng, 20);
        let cfg = KrylovConfig { tol: 1e-12, ..Default::default() };
        let (_, stats) = gmres(&a, &f, None, None, &cfg).unwrap();
        assert!(stats.converged);
        assert_eq!(stats.its, 2);
        assert!(stats.final_residual() < 1e-12);
    }

    #[test]
    fn residuals_never_increase_across_restarts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d: Vec<Complex64> = (0..60)
            .map(|_| Complex64::new(1.0 + 4.0 * rng.gen::<f64>(), rng.gen::<f64>() - 0.5))
            .collect();
        let a = build_diagonal(d);
        let f = rand_vec(&mut rng, 60);
        let cfg = KrylovConfig { restart: 7, tol: 1e-10, ..Default::default() };
        let (_, stats) = gmres(&a, &f, None, None, &cfg).unwrap();
        assert!(stats.converged);
        for pair in stats.residual_history.windows(2) {
            assert!(pair[1].1 <= pair[0].1 * (1.0 + 1e-10), "{pair:?}");
        }
    }

    #[test]
    fn flexible_with_constant_preconditioner_matches_right_preconditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d: Vec<Complex64> = (0..40)
            .map(|_| Complex64::new(1.0 + 3.0 * rng.gen::<f64>(), 0.3 * rng.gen::<f64>()))
            .collect();
        let a = build_diagonal(d.clone());
        let m = build_diagonal(d.iter().map(|v| 1.0 / (v + 0.3)).collect());
        let f = rand_vec(&mut rng, 40);
        let base = KrylovConfig { restart: 12, tol: 1e-9, ..Default::default() };
        let flex_cfg = KrylovConfig { flexible: true, ..base.clone() };
        let (x_right, s_right) = gmres(&a, &f, None, Some(&m), &base).unwrap();
        let (x_flex, s_flex) = gmres(&a, &f, None, Some(&m), &flex_cfg).unwrap();
        assert_eq!(s_right.its, s_flex.its);
        let diff: f64 =
            x_right.iter().zip(&x_flex).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 1e-10 * norm(&x_right).max(1.0), "iterates diverged by {diff}");
        for (p, q) in s_right.residual_history.iter().zip(&s_flex.residual_history) {
            assert!((p.1 - q.1).abs() <= 1e-10 * (1.0 + p.1));
        }
    }

    #[test]
    fn full_gmres_terminates_within_dimension_steps() {
        for seed in 0..6u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let n = 30;
            // well-conditioned diagonal plus a mild complex spread
            let d: Vec<Complex64> = (0..n)
                .map(|k| {
                    Complex64::new(
                        1.0 + k as f64 / n as f64 + 0.2 * rng.gen::<f64>(),
                        0.2 * (rng.gen::<f64>() - 0.5),
                    )
                })
                .collect();
            let a = build_diagonal(d);
            let f = rand_vec(&mut rng, n);
            let cfg =
                KrylovConfig { restart: n + 5, max_total_its: n + 5, tol: 1e-10, ..Default::default() };
            let (_, stats) = gmres(&a, &f, None, None, &cfg).unwrap();
            assert!(stats.converged, "seed {seed}");
            assert!(stats.its <= n, "seed {seed}: {} its", stats.its);
        }
    }

    #[test]
    fn nan_rhs_is_rejected_before_iterating() {
        let a = build_real_diagonal(vec![1.0; 4]);
        let mut f = vec![Complex64::new(1.0, 0.0); 4];
        f[2] = Complex64::new(f64::NAN, 0.0);
        // the operator handle performs the finiteness check on first apply;
        // norm(f) is NaN so the initial residual test already fails
        let cfg = KrylovConfig::default();
        let res = gmres(&a, &f, None, None, &cfg);
        match res {
            Err(_) => {}
            Ok((_, stats)) => assert!(!stats.converged),
        }
    }
}
