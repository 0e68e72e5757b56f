//! Contour-integration preconditioning: shifted solves at quadrature nodes,
//! quadrature combination with a least-squares step correction, inner GMRES,
//! and the flexible outer driver.

pub mod apply;
pub mod bench;
pub mod config;
pub mod outer;

pub use apply::fci_apply;
pub use bench::{bench_shifted, crossover_matches, BenchCell, BenchConfig};
pub use config::{FciApplyStats, FciConfig};
pub use outer::{
    breakdown_is_exact, solve_helmholtz, Formulation, MatvecBreakdown, OuterDiag, SchemeSummary,
    SolveReport, SolverOptions,
};
