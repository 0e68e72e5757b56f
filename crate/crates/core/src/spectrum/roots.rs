//! Phase roots of the interior impedance problem.
//!
//! Separation of variables on the unit hypercube with impedance boundary
//! conditions reduces each 1D factor to the transcendental equation
//! (omega - z)/(omega + z) = +/- exp(-i z). Eigenvalues of the continuous
//! problem are lambda = xi . xi - omega^2 over root tuples xi. Roots live in
//! the closed fourth quadrant; the first quadrant holds none because the
//! left side has modulus <= 1 there while the right side exceeds 1.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which sign of the exponential the root solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// A verified root of the phase equation.
#[derive(Debug, Clone, Copy)]
pub struct PhaseRoot {
    pub z: Complex64,
    pub residual: f64,
    pub branch: Branch,
}

/// Root list; `complete` is false when fewer than the requested number were
/// found.
#[derive(Debug, Clone)]
pub struct PhaseRoots {
    pub roots: Vec<PhaseRoot>,
    pub complete: bool,
}

fn equation(omega: f64, z: Complex64, branch: Branch) -> Complex64 {
    let lhs = (omega - z) / (omega + z);
    let rhs = (-Complex64::i() * z).exp();
    match branch {
        Branch::Plus => lhs - rhs,
        Branch::Minus => lhs + rhs,
    }
}

fn equation_derivative(omega: f64, z: Complex64, branch: Branch) -> Complex64 {
    let d_lhs = -2.0 * omega / ((omega + z) * (omega + z));
    let d_rhs = -Complex64::i() * (-Complex64::i() * z).exp();
    match branch {
        Branch::Plus => d_lhs - d_rhs,
        Branch::Minus => d_lhs + d_rhs,
    }
}

/// Damped Newton iteration on the phase equation from one starting guess.
/// Returns the limit and its residual, or None on stagnation.
pub fn newton_phase_root(
    omega: f64,
    start: Complex64,
    branch: Branch,
    tol: f64,
) -> Option<(Complex64, f64)> {
    let mut z = start;
    let mut g = equation(omega, z, branch);
    for _ in 0..200 {
        if g.norm() < tol {
            return Some((z, g.norm()));
        }
        let dg = equation_derivative(omega, z, branch);
        if dg.norm() < 1e-300 {
            return None;
        }
        let full_step = -g / dg;
        let mut alpha = 1.0f64;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = z + alpha * full_step;
            let gc = equation(omega, cand, branch);
            if gc.norm() < g.norm() {
                z = cand;
                g = gc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    (g.norm() < tol).then_some((z, g.norm()))
}

/// Finds `count` fourth-quadrant roots by damped Newton from the seeds
/// z = k*pi - 0.5i, both branches, deduplicated at 1e-6 spacing and sorted by
/// real part. The trivial root at z = 0 is discarded: the constant mode it
/// would represent fails the impedance boundary condition.
pub fn impedance_phase_roots(omega: f64, count: usize) -> Result<PhaseRoots> {
    if !(omega > 0.0) {
        return Err(Error::InvalidConfig(format!("omega = {omega} must be positive")));
    }
    let tol = 1e-12;
    let mut found: Vec<PhaseRoot> = Vec::new();
    for k in 0..(count + 5) {
        let seed = Complex64::new(k as f64 * std::f64::consts::PI, -0.5);
        for branch in [Branch::Plus, Branch::Minus] {
            let Some((z, residual)) = newton_phase_root(omega, seed, branch, tol) else {
                continue;
            };
            // closed fourth quadrant only
            if z.re < -1e-9 || z.im > 1e-9 {
                continue;
            }
            if z.norm() < 1e-8 * omega.max(1.0) {
                continue;
            }
            if found.iter().any(|r| (r.z - z).norm() < 1e-6) {
                continue;
            }
            found.push(PhaseRoot { z, residual, branch });
        }
    }
    found.sort_by(|a, b| a.z.re.partial_cmp(&b.z.re).unwrap());
    let complete = found.len() >= count;
    found.truncate(count);
    Ok(PhaseRoots { roots: found, complete })
}

/// Residual of the better branch at z, for spot checks.
pub fn phase_residual(omega: f64, z: Complex64) -> f64 {
    equation(omega, z, Branch::Plus).norm().min(equation(omega, z, Branch::Minus).norm())
}
