//! Discrete Helmholtz operator construction: Laplacians (spectral and
//! finite-difference), mass and sponge diagonals, the assembled composite,
//! the doubled first-order form, and the two inner preconditioners.

pub mod composite;
pub mod dense;
pub mod diagonal;
pub mod fd;
pub mod fft3;
pub mod grid;
pub mod ilu0;
pub mod rho;
pub mod spectral;

pub use composite::{
    assemble_helmholtz, build_doubled, doubled_rhs, doubled_solution, equivalent_doubled_shift,
    shifted_doubled_solution, DampingSign, HelmholtzComposite,
};
pub use dense::{dense_eigenvalues, dense_hermitian_part_eigenvalues, materialize};
pub use diagonal::{build_diagonal, build_mass, build_real_diagonal, build_sponge, diagonal_max_abs};
pub use fd::{build_fd7_laplacian, fd1d_dirichlet_eigenvalue, Csr, FdClosure};
pub use grid::{read_wavespeed_model, write_wavespeed_model, Grid3, WavespeedModel, WavespeedSidecar};
pub use ilu0::{build_ilu0_precond, Ilu0};
pub use rho::{estimate_rho, RhoEstimate};
pub use spectral::{
    build_invlap_precond, build_spectral_laplacian, spectral_eigenvalue, spectral_max_eigenvalue,
};
