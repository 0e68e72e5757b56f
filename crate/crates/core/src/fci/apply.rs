//! One application of the contour-integration approximation of A^-1 f:
//! shifted solves at the quadrature nodes, weighted combination, scalar step
//! correction, and an inner GMRES sweep on the remainder.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fci::config::{FciApplyStats, FciConfig};
use crate::krylov::{gmres, optimal_step};
use crate::operator::OperatorHandle;
use crate::polysolve::{fixpoint_solve, FixpointStop};
use crate::stats::SolveStats;
use crate::vector::{zeros, CVector};

fn solve_one_node(
    a: &OperatorHandle,
    f: &[Complex64],
    cfg: &FciConfig,
    node: usize,
    warm: Option<&CVector>,
) -> Result<(CVector, SolveStats)> {
    let scheme = &cfg.schemes[node];
    let stop = FixpointStop {
        tol: 1.0 / cfg.node_reduction,
        max_sweeps: cfg.node_max_sweeps,
    };
    fixpoint_solve(a, f, scheme, warm.map(|v| v.as_slice()), &stop).map_err(|e| match e {
        Error::Divergence { factor, .. } => Error::Divergence {
            context: format!("node {} (shift {})", node, cfg.contour.nodes[node]),
            factor,
        },
        other => other,
    })
}

/// Applies the preconditioner to `f`. `warm` carries the previous node
/// solutions when warm starting is enabled; it is updated in place.
pub fn fci_apply(
    a: &OperatorHandle,
    f: &[Complex64],
    cfg: &FciConfig,
    warm: Option<&mut Vec<Option<CVector>>>,
) -> Result<(CVector, FciApplyStats)> {
    cfg.validate()?;
    let n = a.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.len(),
            context: "fci apply rhs",
        });
    }
    let j = cfg.contour.nodes.len();
    let mut stats = FciApplyStats::default();
    if crate::vector::norm(f) == 0.0 {
        stats.node_factors = vec![0.0; j];
        stats.node_sweeps = vec![0; j];
        return Ok((zeros(n), stats));
    }

    // independent shifted solves, one per node
    let warm_read: Vec<Option<CVector>> = match &warm {
        Some(w) => (**w).clone(),
        None => vec![None; j],
    };
    let mut node_solutions: Vec<Option<(CVector, SolveStats)>> = (0..j).map(|_| None).collect();
    if cfg.threads > 1 {
        let results: Vec<Result<(CVector, SolveStats)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..j)
                .map(|k| {
                    let warm_k = warm_read[k].as_ref();
                    scope.spawn(move || solve_one_node(a, f, cfg, k, warm_k))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("node solve panicked")).collect()
        });
        for (k, res) in results.into_iter().enumerate() {
            node_solutions[k] = Some(res?);
        }
    } else {
        for k in 0..j {
            node_solutions[k] = Some(solve_one_node(a, f, cfg, k, warm_read[k].as_ref())?);
        }
    }

    // w = sum_j (sigma_j / z_j) y_j
    let mut w = zeros(n);
    let mut warm_next: Vec<Option<CVector>> = vec![None; j];
    for (k, slot) in node_solutions.into_iter().enumerate() {
        let (y, node_stats) = slot.expect("node solved");
        let coeff = cfg.contour.weights[k] / cfg.contour.nodes[k];
        for (wi, yi) in w.iter_mut().zip(&y) {
            *wi += coeff * yi;
        }
        stats.node_factors.push(node_stats.final_residual());
        stats.node_sweeps.push(node_stats.its);
        stats.node_mvs += node_stats.mvs;
        if cfg.warm_start {
            warm_next[k] = Some(y);
        }
    }
    if let Some(wslot) = warm {
        *wslot = warm_next;
    }

    // least-squares step d against quadrature error
    let aw = a.apply(&w)?;
    stats.correction_mvs = 1;
    let step = optimal_step(&aw, f)?;
    stats.d_re = step.d.re;
    stats.d_im = step.d.im;

    // inner problem: min ||A v - (f - d A w)||
    let mut inner_rhs = f.to_vec();
    for (ri, ai) in inner_rhs.iter_mut().zip(&aw) {
        *ri -= step.d * ai;
    }
    let mvs_before = a.matvec_count();
    let (v, inner_stats) = gmres(
        a,
        &inner_rhs,
        None,
        cfg.inner_precond.as_ref().map(|p| p as &dyn crate::krylov::Preconditioner),
        &cfg.inner,
    )?;
    stats.inner_its = inner_stats.its;
    stats.inner_mvs = a.matvec_count() - mvs_before;
    stats.inner_residual = inner_stats.final_residual();

    // x = v + d w
    let mut x = v;
    for (xi, wi) in x.iter_mut().zip(&w) {
        *xi += step.d * wi;
    }
    Ok((x, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::KrylovConfig;
    use crate::operators::build_diagonal;
    use crate::spectrum::{make_contour_fixed_radius, SpectralBox};
    use crate::vector::norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Diagonal instance with all eigenvalues outside a small contour.
    fn outside_instance(n: usize) -> (Vec<Complex64>, OperatorHandle) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let diag: Vec<Complex64> = (0..n)
            .map(|_| {
                let re = 2.0 + 6.0 * rng.gen::<f64>();
                let im = -0.4 * rng.gen::<f64>();
                Complex64::new(re, im)
            })
            .collect();
        let op = build_diagonal(diag.clone());
        (diag, op)
    }

    fn config_for(diag_box: SpectralBox, j: usize) -> FciConfig {
        let contour = make_contour_fixed_radius(diag_box.depth, 1.2, 0.4, j).unwrap();
        FciConfig::plan(contour, diag_box, 6, 1e6, 0, None).unwrap()
    }

    #[test]
    fn zero_rhs_returns_zero_without_inner_iterations() {
        let (_, op) = outside_instance(50);
        let bbox = SpectralBox::new(-1.0, 8.5, 0.45).unwrap();
        let mut cfg = config_for(bbox, 6);
        cfg.node_reduction = 5.0;
        let f = zeros(50);
        let (x, stats) = fci_apply(&op, &f, &cfg, None).unwrap();
        assert!(norm(&x) == 0.0);
        assert_eq!(stats.inner_its, 0);
        assert_eq!(stats.total_mvs(), 0);
    }

    #[test]
    fn approximates_full_inverse_when_spectrum_is_outside() {
        // all eigenvalues outside the contour: P A^-1 = A^-1, so with tight
        // node solves and J = 16 the application approximates A^-1 f
        let n = 200;
        let (diag, op) = outside_instance(n);
        let bbox = SpectralBox::new(-1.0, 8.5, 0.45).unwrap();
        let contour = crate::spectrum::make_contour(&bbox, 16, 0.2, 0.3).unwrap();
        // keep the ellipse clear of the spectrum
        for d in &diag {
            assert!(!contour.encloses(*d));
        }
        let mut cfg = FciConfig::plan(contour, bbox, 6, 1e8, 0, None).unwrap();
        cfg.node_max_sweeps = 3000;
        cfg.inner = KrylovConfig { max_total_its: 0, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let (x, stats) = fci_apply(&op, &f, &cfg, None).unwrap();
        let exact: Vec<Complex64> = diag.iter().zip(&f).map(|(d, fi)| fi / d).collect();
        let err: f64 =
            x.iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err / norm(&exact) < 1e-2, "relative error {}", err / norm(&exact));
        assert_eq!(stats.inner_its, 0);
        assert_eq!(stats.correction_mvs, 1);
    }

    #[test]
    fn diverging_node_error_names_the_node() {
        // eigenvalue far outside the tuned box: node solves diverge
        let diag = vec![Complex64::new(60.0, 0.0); 8];
        let op = build_diagonal(diag);
        let bbox = SpectralBox::new(-1.0, 2.8, 0.65).unwrap();
        let mut cfg = config_for(bbox, 4);
        cfg.node_reduction = 5.0;
        let f = vec![Complex64::new(1.0, 0.0); 8];
        match fci_apply(&op, &f, &cfg, None) {
            Err(Error::Divergence { context, .. }) => {
                assert!(context.contains("node"), "context: {context}");
            }
            other => panic!("expected node divergence, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn threaded_node_solves_match_serial() {
        let n = 120;
        let (_, op) = outside_instance(n);
        let bbox = SpectralBox::new(-1.0, 8.5, 0.45).unwrap();
        let mut cfg = config_for(bbox, 6);
        cfg.node_reduction = 100.0;
        cfg.node_max_sweeps = 400;
        cfg.inner = KrylovConfig { max_total_its: 4, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let (x1, s1) = fci_apply(&op, &f, &cfg, None).unwrap();
        cfg.threads = 3;
        let (x2, s2) = fci_apply(&op, &f, &cfg, None).unwrap();
        assert_eq!(s1.node_mvs, s2.node_mvs);
        assert_eq!(s1.node_sweeps, s2.node_sweeps);
        for (a, b) in x1.iter().zip(&x2) {
            assert_eq!(a, b, "threaded result differs bitwise");
        }
    }
}
