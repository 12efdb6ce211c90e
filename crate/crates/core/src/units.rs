//! Physical constants, species data and the lattice unit system.
//!
//! Everything downstream works in dimensionless lattice units: energies in
//! recoil energies `E_r = ħ²k_l²/2m` and lengths in lattice periods `λ_l/2`.
//! A [`LatticeUnits`] value is the single place where those scales are fixed.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// CODATA 2018 values; the gravitational acceleration is the local value the
/// reference spectra were computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
    pub g_newton: f64,
    pub epsilon0: f64,
    pub g_earth: f64,
    pub h: f64,
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const NEWTON_G: f64 = 6.674_30e-11;
pub const EPSILON0: f64 = 8.854_187_812_8e-12;
pub const DEFAULT_G_EARTH: f64 = 9.81;

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            c: SPEED_OF_LIGHT,
            k_b: BOLTZMANN,
            g_newton: NEWTON_G,
            epsilon0: EPSILON0,
            g_earth: DEFAULT_G_EARTH,
            h: 2.0 * std::f64::consts::PI * HBAR,
        }
    }
}

impl PhysicalConstants {
    pub fn with_g_earth(mut self, g: f64) -> Self {
        self.g_earth = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.hbar,
            self.c,
            self.k_b,
            self.g_newton,
            self.epsilon0,
            self.g_earth,
            self.h,
        ];
        ensure(all.iter().all(|v| v.is_finite() && *v > 0.0), || {
            "physical constants must be finite and positive".into()
        })?;
        let h_expected = 2.0 * std::f64::consts::PI * self.hbar;
        ensure((self.h - h_expected).abs() <= 4.0 * f64::EPSILON * h_expected, || {
            "h must equal 2π·ħ".into()
        })
    }
}

/// Which polarizability data set a species uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizabilityRef {
    Rubidium,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesData {
    pub name: String,
    /// kg
    pub mass: f64,
    pub polarizability_ref: PolarizabilityRef,
}

impl SpeciesData {
    pub fn rb87() -> Self {
        Self {
            name: "Rb87".into(),
            mass: 1.443_16e-25,
            polarizability_ref: PolarizabilityRef::Rubidium,
        }
    }

    pub fn rb85() -> Self {
        Self {
            name: "Rb85".into(),
            mass: 1.409_99e-25,
            polarizability_ref: PolarizabilityRef::Rubidium,
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "rb87" | "87rb" => Some(Self::rb87()),
            "rb85" | "85rb" => Some(Self::rb85()),
            _ => None,
        }
    }
}

/// Scales of the dimensionless lattice problem for one species and laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeUnits {
    /// Laser wavelength, m.
    pub lambda_l: f64,
    /// Photon recoil energy `E_r`, J.
    pub recoil_energy: f64,
    /// Lattice period `λ_l/2`, m.
    pub length_unit: f64,
    /// Gravitational energy drop per lattice period in units of `E_r`.
    pub gravity_step: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    pub constants: PhysicalConstants,
}

pub fn make_units(
    species: &SpeciesData,
    lambda_l: f64,
    constants: &PhysicalConstants,
) -> Result<LatticeUnits> {
    ensure(lambda_l.is_finite() && lambda_l > 0.0, || {
        format!("laser wavelength must be positive, got {lambda_l}")
    })?;
    ensure(species.mass.is_finite() && species.mass > 0.0, || {
        format!("species mass must be positive, got {}", species.mass)
    })?;
    constants.validate()?;
    let k_l = 2.0 * std::f64::consts::PI / lambda_l;
    let recoil_energy = constants.hbar * constants.hbar * k_l * k_l / (2.0 * species.mass);
    let length_unit = lambda_l / 2.0;
    let gravity_step = species.mass * constants.g_earth * length_unit / recoil_energy;
    Ok(LatticeUnits {
        lambda_l,
        recoil_energy,
        length_unit,
        gravity_step,
        mass: species.mass,
        constants: *constants,
    })
}

impl LatticeUnits {
    /// Energy in recoil units to frequency `E/h` in Hz.
    pub fn to_hz(&self, energy: f64) -> f64 {
        energy * self.recoil_energy / self.constants.h
    }

    pub fn joules_to_recoil(&self, joules: f64) -> f64 {
        joules / self.recoil_energy
    }

    pub fn periods_to_meters(&self, z: f64) -> f64 {
        z * self.length_unit
    }

    pub fn meters_to_periods(&self, z: f64) -> f64 {
        z / self.length_unit
    }
}

/// Free-function form of [`LatticeUnits::to_hz`].
pub fn to_hz(energy: f64, units: &LatticeUnits) -> f64 {
    units.to_hz(energy)
}
