//! Linearized MHD initial-boundary-value problem on the square.
//!
//! The unknown is `z = (u, b, pvar, s)` with `pvar` the total pressure.
//! Time derivatives come from sequential elimination of the momentum,
//! induction, pressure and entropy rows; space derivatives are centered
//! differences on ghost layers filled by reflection (normal components
//! odd, tangential components, pressure and entropy even).

mod coeffs;
mod diagnostics;
mod scheme;
mod state;

pub use coeffs::*;
pub use diagnostics::*;
pub use scheme::*;
pub use state::*;
