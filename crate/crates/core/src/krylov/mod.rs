//! Krylov solvers: restarted and flexible GMRES plus the scalar
//! least-squares step of the contour preconditioner.

pub mod gmres;
pub mod step;

pub use gmres::{gmres, KrylovConfig, Preconditioner};
pub use step::{optimal_step, OptimalStep};
