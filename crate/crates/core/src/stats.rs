//! Solve bookkeeping: iteration counts, matvec totals, residual histories.

use serde::Serialize;

/// Counters and residual trace produced by every solver entry point.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveStats {
    /// Iterations (sweeps for fixed-point solves, Arnoldi steps for GMRES,
    /// outer iterations for the preconditioned driver).
    pub its: usize,
    /// Matrix-vector products with the system operator.
    pub mvs: u64,
    /// Preconditioner applications (counted separately from matvecs).
    pub precond_applies: u64,
    /// Wall time of the solve.
    pub seconds: f64,
    /// (iteration, relative 2-norm residual); first entry is 1.0 for a zero
    /// initial guess.
    pub residual_history: Vec<(usize, f64)>,
    /// False when the solve returned its best iterate without reaching the
    /// requested tolerance.
    pub converged: bool,
    /// Set when a configured stagnation window saw less than the required
    /// relative improvement.
    pub stalled: bool,
    /// Restart-boundary residual recomputations (each costs one matvec).
    pub cycles: usize,
}

impl SolveStats {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().map(|&(_, r)| r).unwrap_or(f64::NAN)
    }

    /// Pearson correlation of log10(residual) against iteration index.
    /// Near -1.0 indicates linear convergence on semilog axes.
    pub fn log_residual_correlation(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .residual_history
            .iter()
            .filter(|&&(_, r)| r > 0.0 && r.is_finite())
            .map(|&(i, r)| (i as f64, r.log10()))
            .collect();
        let n = pts.len() as f64;
        if pts.len() < 3 {
            return f64::NAN;
        }
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for (x, y) in &pts {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
            syy += (y - my) * (y - my);
        }
        if sxx == 0.0 || syy == 0.0 {
            return f64::NAN;
        }
        sxy / (sxx * syy).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_of_geometric_decay_is_minus_one() {
        let mut s = SolveStats::default();
        for k in 0..20 {
            s.residual_history.push((k, 0.5f64.powi(k as i32)));
        }
        assert!((s.log_residual_correlation() + 1.0).abs() < 1e-12);
    }
}
