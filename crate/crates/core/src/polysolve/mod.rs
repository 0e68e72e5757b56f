//! Shifted-system solvers: optimal stationary Richardson and the
//! exponential-Taylor polynomial fixed-point iteration with (q, delta)
//! auto-tuning.

pub mod fixpoint;
pub mod richardson;
pub mod scheme;
pub mod tune;

pub use fixpoint::{fixpoint_solve, FixpointStop};
pub use richardson::{richardson_optimal, vertex_rate, RichardsonParam};
pub use scheme::{max_residual_on, residual_poly_eval, taylor_exp_sum, PolyScheme};
pub use tune::{tune_scheme, tune_scheme_with, TuneOutcome, TunedRow, BOUNDARY_SAMPLES};
