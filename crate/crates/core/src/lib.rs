//! Casimir interaction energies and pressures for stacks of δ-function plates.
//!
//! Each plate carries transverse electric and magnetic couplings and sits at a
//! fixed position in vacuum. The library computes
//!
//! * single-plate optics ([`optics`]),
//! * multiple-scattering parameters, composite coefficients and the chain
//!   expansion ([`scattering`]),
//! * Green's functions for up to three plates ([`greens`]),
//! * energies per area and pressures by semi-infinite quadrature ([`quadrature`]),
//! * JSON/CSV interchange ([`io`]).
//!
//! Units are natural (ħ = c = 1). Lengths use whatever unit the caller picks;
//! energies per area then come out in unit⁻³ and pressures in unit⁻⁴.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod greens;
pub mod io;
pub mod optics;
pub mod quadrature;
pub mod scattering;

mod exec;

pub use error::{Error, Result};
pub use optics::{coefficients, Coefficients, Mode, Plate, PlateKind, PlateResponse, SpectralPoint};
pub use scattering::{CompositeCoefficients, Stack};
