//! Matrix-free solver library for 3D discretized Helmholtz linear systems.
//!
//! The pieces, bottom up:
//!
//! - [`vector`], [`operator`], [`stats`]: complex vector kernels, the
//!   matrix-free operator contract with matvec accounting, and solve
//!   bookkeeping.
//! - [`operators`]: spectral (FFT) and seven-point finite-difference
//!   Laplacians, mass and sponge diagonals, the assembled Helmholtz operator
//!   A = (S - M) - iD, the doubled first-order form iC - I, and the two
//!   inner preconditioners (regularized inverse Laplacian, ILU(0)).
//! - [`spectrum`]: containment rectangles for the spectrum, elliptic
//!   quadrature contours, the filtered-inverse ground truth, and the
//!   impedance phase-root solver.
//! - [`polysolve`]: shifted-system solvers; optimal stationary Richardson
//!   and the exponential-Taylor polynomial fixed-point iteration with
//!   (q, delta) auto-tuning.
//! - [`krylov`]: restarted/flexible GMRES and the scalar least-squares step.
//! - [`fci`]: the contour-integration preconditioner and the outer flexible
//!   GMRES driver, plus the shifted-formulation cost bench.
//!
//! All scalars are complex double precision; reductions run in a fixed
//! serial order so repeated runs agree bitwise.

pub mod error;
pub mod fci;
pub mod krylov;
pub mod operator;
pub mod operators;
pub mod polysolve;
pub mod spectrum;
pub mod stats;
pub mod vector;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operator::{Apply, OpKind, OperatorHandle};
pub use stats::SolveStats;
pub use vector::CVector;
