//! Configuration for the contour-integration preconditioner.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::krylov::KrylovConfig;
use crate::operator::OperatorHandle;
use crate::polysolve::{tune_scheme, PolyScheme};
use crate::spectrum::{Contour, SpectralBox};

/// Everything one contour-integration application needs: the quadrature rule,
/// one tuned scheme per node, the per-node stopping rule, and the inner GMRES
/// setup.
#[derive(Clone)]
pub struct FciConfig {
    pub contour: Contour,
    pub bbox: SpectralBox,
    /// One tuned scheme per quadrature node, same order as `contour.nodes`.
    pub schemes: Vec<PolyScheme>,
    /// Per-node residual reduction factor (a node solve stops when its
    /// residual has dropped by this factor).
    pub node_reduction: f64,
    pub node_max_sweeps: usize,
    pub inner: KrylovConfig,
    pub inner_precond: Option<OperatorHandle>,
    /// Reuse each node's previous solution as the next warm start.
    pub warm_start: bool,
    /// Worker threads for the mutually independent node solves.
    pub threads: usize,
}

impl FciConfig {
    /// Tunes one scheme per quadrature node on the given spectrum box.
    /// Every node is tuned independently.
    pub fn plan(
        contour: Contour,
        bbox: SpectralBox,
        q_max: usize,
        node_reduction: f64,
        inner_its: usize,
        inner_precond: Option<OperatorHandle>,
    ) -> Result<Self> {
        if node_reduction <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "node reduction factor {node_reduction} must exceed 1"
            )));
        }
        let target = 1.0 / node_reduction;
        let mut schemes = Vec::with_capacity(contour.nodes.len());
        for &z in &contour.nodes {
            let out = tune_scheme(&bbox, z, q_max, target)?;
            schemes.push(out.scheme);
        }
        Ok(FciConfig {
            contour,
            bbox,
            schemes,
            node_reduction,
            node_max_sweeps: 500,
            inner: KrylovConfig {
                restart: 40,
                max_total_its: inner_its,
                tol: 1e-10,
                flexible: false,
                ..Default::default()
            },
            inner_precond,
            warm_start: false,
            threads: 1,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.len() != self.contour.nodes.len() {
            return Err(Error::InvalidConfig(format!(
                "{} schemes for {} quadrature nodes",
                self.schemes.len(),
                self.contour.nodes.len()
            )));
        }
        for (scheme, z) in self.schemes.iter().zip(&self.contour.nodes) {
            if (scheme.z - z).norm() > 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "scheme shift {} does not match its node {z}",
                    scheme.z
                )));
            }
        }
        Ok(())
    }
}

/// Per-application diagnostics, serialized into the run report.
#[derive(Debug, Clone, Serialize, Default)]
pub struct FciApplyStats {
    /// Final residual ratio of each node solve.
    pub node_factors: Vec<f64>,
    pub node_sweeps: Vec<usize>,
    pub node_mvs: u64,
    /// The least-squares step compensating quadrature error.
    pub d_re: f64,
    pub d_im: f64,
    /// Matvec forming A*w for the step (always 1).
    pub correction_mvs: u64,
    pub inner_its: usize,
    pub inner_mvs: u64,
    pub inner_residual: f64,
}

impl FciApplyStats {
    pub fn d(&self) -> Complex64 {
        Complex64::new(self.d_re, self.d_im)
    }

    pub fn total_mvs(&self) -> u64 {
        self.node_mvs + self.correction_mvs + self.inner_mvs
    }
}
