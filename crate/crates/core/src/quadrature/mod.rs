//! Semi-infinite quadrature and the energy, interaction and pressure integrals
//! built on it.

mod energy;
mod integrate;
mod stress;
mod sweep;

pub use energy::{
    default_spec_for, energy_per_area, gap_pressure, interaction_energy, pressure_on_plate,
    EnergyResult, IntegrationPath, PressureResult,
};
pub use integrate::{integrate_semi_infinite, Integral, QuadratureSpec, Substitution};
pub use stress::{pressure_three_plates_stress, pressure_two_plates_stress};
pub use sweep::{sweep_gap, SweepPoint};
