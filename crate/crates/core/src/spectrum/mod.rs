//! Spectrum description: containment boxes, elliptic quadrature contours,
//! the filtered-inverse ground truth, and impedance phase roots.

pub mod bbox;
pub mod contour;
pub mod filtered;
pub mod roots;

pub use bbox::{SpectralBox, RADIUS_INFLATION};
pub use contour::{make_contour, make_contour_fixed_radius, Contour};
pub use filtered::{
    filtered_inverse_diagonal, filtered_inverse_oracle, quadrature_filtered_inverse_diagonal,
};
pub use roots::{impedance_phase_roots, newton_phase_root, phase_residual, Branch, PhaseRoot, PhaseRoots};
