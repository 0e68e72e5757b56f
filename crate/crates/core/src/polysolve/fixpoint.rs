//! The fixed-point iteration for (A - zI) y = f.
//!
//! Each sweep forms k_1 = -i*delta*((A - z0)y - f), then
//! k_j = (-i*delta/j) * ((A - z0) k_{j-1} - c_{j-1} f) with
//! c_m = (-i*delta*(z - z0))^m / m!, and updates
//! y <- (y + sum k_j) / p(z). A sweep costs exactly q applications of A; the
//! running residual is recovered from k_1 without an extra matvec via
//! r = -(i/delta) k_1 - (z0 - z) y.

use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::OperatorHandle;
use crate::polysolve::scheme::{taylor_exp_sum, PolyScheme};
use crate::stats::SolveStats;
use crate::vector::{norm, zeros, CVector};

/// Stopping rule: relative residual target and/or sweep budget.
#[derive(Debug, Clone, Copy)]
pub struct FixpointStop {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for FixpointStop {
    fn default() -> Self {
        FixpointStop { tol: 1e-8, max_sweeps: 10_000 }
    }
}

const DIVERGENCE_SWEEPS: usize = 3;

/// Runs the fixed-point iteration on (A - zI) y = f with z, z0, delta and q
/// from the tuned scheme. Returns the final iterate and its bookkeeping; a
/// residual that grows over three consecutive sweeps aborts with a
/// divergence error (the box estimate was too small).
pub fn fixpoint_solve(
    a: &OperatorHandle,
    f: &[Complex64],
    scheme: &PolyScheme,
    y0: Option<&[Complex64]>,
    stop: &FixpointStop,
) -> Result<(CVector, SolveStats)> {
    let start = Instant::now();
    let n = a.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.len(),
            context: "fixpoint solve rhs",
        });
    }
    if scheme.q < 1 {
        return Err(Error::InvalidConfig("scheme degree q must be >= 1".into()));
    }
    if scheme.delta == 0.0 {
        return Err(Error::DegenerateScheme);
    }
    let f_norm = norm(f);
    if f_norm == 0.0 {
        return Err(Error::InvalidConfig("zero right-hand side".into()));
    }
    let mi_delta = -Complex64::i() * scheme.delta;
    let w_z = mi_delta * (scheme.z - scheme.z0);
    let p_at_z = taylor_exp_sum(w_z, scheme.q);
    if p_at_z.norm() == 0.0 {
        return Err(Error::DegenerateScheme);
    }
    // c[m] = w_z^m / m! for m = 1..q-1 (the f-feedback coefficients)
    let mut coeffs = Vec::with_capacity(scheme.q);
    let mut term = Complex64::new(1.0, 0.0);
    coeffs.push(term);
    for m in 1..scheme.q {
        term = term * w_z / m as f64;
        coeffs.push(term);
    }
    let z0_minus_z = scheme.z0 - scheme.z;

    let mut y = match y0 {
        Some(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                    context: "fixpoint initial guess",
                });
            }
            v.to_vec()
        }
        None => zeros(n),
    };
    let mut y_known_zero = y0.is_none();
    let mvs0 = a.matvec_count();
    let mut stats = SolveStats::default();
    let mut best: Option<(f64, CVector)> = None;
    let mut growth_run = 0usize;
    let mut prev_res = f64::INFINITY;

    let mut u = zeros(n);
    loop {
        // k1 and the residual of the current iterate
        if y_known_zero {
            u.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        } else {
            a.apply_into(&y, &mut u)?;
        }
        let mut k: CVector = (0..n)
            .map(|i| mi_delta * (u[i] - scheme.z0 * y[i] - f[i]))
            .collect();
        let res: f64 = {
            let i_over_delta = Complex64::i() / scheme.delta;
            let mut acc = 0.0f64;
            for i in 0..n {
                let r = -i_over_delta * k[i] - z0_minus_z * y[i];
                acc += r.norm_sqr();
            }
            acc.sqrt() / f_norm
        };
        stats.residual_history.push((stats.its, res));
        if !res.is_finite() {
            return Err(Error::Divergence {
                context: format!("fixpoint solve at shift {}", scheme.z),
                factor: f64::INFINITY,
            });
        }
        if best.as_ref().map_or(true, |(b, _)| res < *b) {
            best = Some((res, y.clone()));
        }
        if res <= stop.tol {
            stats.converged = true;
            break;
        }
        if res > prev_res {
            growth_run += 1;
            if growth_run >= DIVERGENCE_SWEEPS {
                return Err(Error::Divergence {
                    context: format!("fixpoint solve at shift {}", scheme.z),
                    factor: res / stats.residual_history
                        [stats.residual_history.len() - 1 - DIVERGENCE_SWEEPS]
                        .1,
                });
            }
        } else {
            growth_run = 0;
        }
        prev_res = res;
        if stats.its >= stop.max_sweeps {
            stats.converged = false;
            if let Some((_, by)) = &best {
                y = by.clone();
            }
            break;
        }

        // remaining q - 1 stages of this sweep
        let mut acc = k.clone();
        for j in 2..=scheme.q {
            a.apply_into(&k, &mut u)?;
            let cf = coeffs[j - 1];
            let step = mi_delta / j as f64;
            for i in 0..n {
                k[i] = step * (u[i] - scheme.z0 * k[i] - cf * f[i]);
                acc[i] += k[i];
            }
        }
        let inv_p = 1.0 / p_at_z;
        for i in 0..n {
            y[i] = (y[i] + acc[i]) * inv_p;
        }
        y_known_zero = false;
        stats.its += 1;
    }
    stats.mvs = a.matvec_count() - mvs0;
    stats.seconds = start.elapsed().as_secs_f64();
    Ok((y, stats))
}
