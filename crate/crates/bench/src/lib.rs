//! Shared fixtures for the solver benchmarks.

use surftrap_core::surface::PermittivityModel;
use surftrap_core::{
    make_units, CasimirPolder, LatticeConfig, LatticeUnits, PhysicalConstants, PolarizabilityModel,
    SpeciesData, SurfaceModel,
};

pub fn rb87_units() -> LatticeUnits {
    make_units(&SpeciesData::rb87(), 532e-9, &PhysicalConstants::default()).expect("valid species")
}

/// The U = 3 ladder in a 30-period box.
pub fn ladder_config(mesh_points: usize) -> LatticeConfig {
    LatticeConfig::for_units(3.0, &rb87_units(), 30.0, mesh_points)
}

pub fn perfect_mirror() -> CasimirPolder {
    mirror(SurfaceModel::perfect_conductor())
}

/// Gold-like Drude mirror.
pub fn drude_mirror() -> CasimirPolder {
    mirror(SurfaceModel {
        permittivity: PermittivityModel::Drude {
            plasma_frequency: 1.37e16,
            damping: 5.32e13,
        },
        ..SurfaceModel::perfect_conductor()
    })
}

fn mirror(surface: SurfaceModel) -> CasimirPolder {
    let k = PhysicalConstants::default();
    let atom = PolarizabilityModel::rubidium(&k).expect("bundled data parses");
    CasimirPolder::new(atom, surface, rb87_units()).expect("valid surface")
}
