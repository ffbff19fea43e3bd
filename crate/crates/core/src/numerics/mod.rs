//! Grids, transforms, quadrature and seeded Monte Carlo shared by the
//! other modules.

pub mod dft;
pub mod grid;
pub mod mc;
pub mod quad;
pub mod special;

pub use dft::{dft_1d, Direction};
pub use grid::{det_sum, Axis, GridFunction, GridSpec};
pub use mc::{mc_integrate, GaussianProposal, McEstimate, Proposal, RngStream};
pub use quad::{gauss_jacobi, gauss_kronrod, gauss_legendre, quad_singular, JacobiRule};
