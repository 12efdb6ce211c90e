//! Numerical core for atoms in a vertical optical lattice above a mirror.
//!
//! Energies are in units of the photon recoil energy `E_r` and lengths in
//! lattice periods `λ_l/2` unless a function says otherwise.

pub mod casimir;
pub mod corrections;
pub mod error;
pub mod lattice;
pub mod polarizability;
pub mod potential;
pub mod quadrature;
pub mod regularization;
pub mod surface;
pub mod table;
pub mod tridiag;
pub mod units;
pub mod yukawa;

pub use error::{Error, Result};
pub use potential::{FnPotential, Potential, Scaled, SumPotential};
pub use table::{build_potential_table, GridSpec, PotentialTable};
pub use units::{make_units, to_hz, LatticeUnits, PhysicalConstants, SpeciesData};
pub use casimir::{vcp_finite_temperature, vcp_vdw, vcp_zero_temperature, CasimirPolder};
pub use corrections::{correction_table, energy_correction, CorrectionRow, CorrectionSpec};
pub use lattice::{
    energy_differences, first_band, solve_band, BandSelection, EigenState, LatticeConfig,
    SpectrumTable,
};
pub use polarizability::PolarizabilityModel;
pub use regularization::{axial_weight, regularize, AxialWeight, DensityProfile, ProfileKind};
pub use surface::{PermittivityModel, SurfaceModel};
pub use yukawa::{
    exclusion_curve, isotope_differential, ExclusionCurve, Scenario, YukawaParams,
};
