//! Arrival-time operators for Dirac particles, their event-space duals, the
//! energy-shift evolution they generate and a small fermionic Fock space of
//! events.
//!
//! Units are `ħ = c = 1`. One spatial dimension throughout.

pub mod convergence;
pub mod dirac;
pub mod error;
pub mod flow;
pub mod fock;
pub mod grid;
pub mod linalg;
pub mod shift;
pub mod spectral;

pub use error::{Error, Result};

// Book chapters, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spinors.md")]
    mod spinors {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/eigenfunctions.md")]
    mod eigenfunctions {}
    #[doc = include_str!("../../../book/src/energy-shift.md")]
    mod energy_shift {}
    #[doc = include_str!("../../../book/src/dual-flow.md")]
    mod dual_flow {}
    #[doc = include_str!("../../../book/src/fock.md")]
    mod fock {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
