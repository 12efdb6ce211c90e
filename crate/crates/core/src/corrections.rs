//! First-order energy shifts of ladder states from the regularized
//! atom–mirror potential.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::casimir::{default_grid, CasimirPolder};
use crate::error::{ensure, Error, Result};
use crate::lattice::{first_band, EigenState, LatticeConfig};
use crate::potential::Potential;
use crate::regularization::{axial_weight, regularize_table, DensityProfile, ProfileKind};
use crate::table::PotentialTable;
use crate::units::LatticeUnits;

/// Probability allowed outside a table's range.
pub const OUTSIDE_MASS_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shift {
    pub recoil: f64,
    pub hz: f64,
}

/// `ΔE = ∫ |ψ|² V_reg dz` by the mesh sum (ψ vanishes at both walls).
pub fn energy_correction(
    state: &EigenState,
    v_reg: &PotentialTable,
    units: &LatticeUnits,
) -> Result<Shift> {
    let outside = state
        .psi
        .iter()
        .enumerate()
        .filter(|(i, _)| !v_reg.covers(state.z(*i)))
        .map(|(_, p)| p * p)
        .sum::<f64>()
        * state.spacing;
    if outside > OUTSIDE_MASS_LIMIT {
        return Err(Error::Validation(format!(
            "{outside:.2e} of the probability lies outside the table range [{}, {}]",
            v_reg.z_min(),
            v_reg.z_max()
        )));
    }
    let recoil = state.expectation(|z| if v_reg.covers(z) { v_reg.eval(z) } else { 0.0 });
    Ok(Shift {
        recoil,
        hz: units.to_hz(recoil),
    })
}

/// Point-atom potential at the centre of well `n` (`z = n`), in Hz.
pub fn well_center_estimate<P: Potential + ?Sized>(
    v_point: &P,
    n: usize,
    units: &LatticeUnits,
) -> Result<f64> {
    ensure(n >= 1, || "well index must be >= 1".into())?;
    Ok(units.to_hz(v_point.value(n as f64)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionRow {
    pub well: usize,
    /// Signed shift, Hz.
    pub delta_e: f64,
    pub delta_e_recoil: f64,
    /// Atomic radius, m.
    pub radius: f64,
    pub profile: ProfileKind,
    pub surface: String,
}

/// Well-centre comparison for one well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellCenterRow {
    pub well: usize,
    /// Expectation-value shift, Hz.
    pub delta_e: f64,
    /// Point potential at the well centre, Hz.
    pub center: f64,
    /// `|ΔE_n| / |V(n)|`.
    pub ratio: f64,
}

/// Options for [`correction_table`].
#[derive(Debug, Clone)]
pub struct CorrectionSpec {
    pub wells: usize,
    pub radii: Vec<f64>,
    pub profiles: Vec<ProfileKind>,
    /// Average the trap and gravity terms over the atom as well.
    pub regularize_trap: bool,
}

impl CorrectionSpec {
    pub fn standard() -> Self {
        Self {
            wells: 12,
            radii: vec![
                crate::regularization::RADIUS_SMALL,
                crate::regularization::RADIUS_LARGE,
            ],
            profiles: vec![ProfileKind::Uniform, ProfileKind::Parabolic],
            regularize_trap: false,
        }
    }
}

/// Everything produced by one corrections run.
#[derive(Debug, Clone)]
pub struct CorrectionRun {
    pub rows: Vec<CorrectionRow>,
    pub point_table: PotentialTable,
    pub states: Vec<EigenState>,
}

/// Point-atom table covering the mesh of `config`.
pub fn point_table(config: &LatticeConfig, cp: &CasimirPolder) -> Result<PotentialTable> {
    let mut grid = default_grid(config.z_max);
    grid.z_min = grid.z_min.min(0.5 * config.mesh().spacing);
    cp.table(grid)
}

/// Shifts for every (well, radius, profile), ordered by well, then radius,
/// then profile.
pub fn correction_table(
    config: &LatticeConfig,
    cp: &CasimirPolder,
    spec: &CorrectionSpec,
) -> Result<CorrectionRun> {
    ensure(spec.wells >= 1, || "need at least one well".into())?;
    let states = first_band(config, spec.wells)?;
    correction_table_from_states(config, cp, spec, states)
}

/// As [`correction_table`], reusing first-band states of `config` (for
/// instance from a cache). The states must cover wells `1..=spec.wells`.
pub fn correction_table_from_states(
    config: &LatticeConfig,
    cp: &CasimirPolder,
    spec: &CorrectionSpec,
    mut states: Vec<EigenState>,
) -> Result<CorrectionRun> {
    ensure(spec.wells >= 1, || "need at least one well".into())?;
    ensure(!spec.radii.is_empty() && !spec.profiles.is_empty(), || {
        "need at least one radius and one profile".into()
    })?;
    states.retain(|s| s.well_index <= spec.wells);
    states.sort_by_key(|s| s.well_index);
    ensure(
        states.len() == spec.wells && states.iter().enumerate().all(|(i, s)| s.well_index == i + 1),
        || format!("states do not cover wells 1..={}", spec.wells),
    )?;
    let units = &cp.units;
    let table = point_table(config, cp)?;
    let label = cp.surface.label();
    let combos: Vec<(f64, ProfileKind)> = spec
        .radii
        .iter()
        .flat_map(|r| spec.profiles.iter().map(move |p| (*r, *p)))
        .collect();
    let per_combo: Vec<Result<Vec<CorrectionRow>>> = combos
        .par_iter()
        .map(|&(radius, profile)| {
            let weight = axial_weight(&DensityProfile::new(profile, radius), units)?;
            let reg = regularize_table(&table, &weight)?;
            let smeared;
            let states_here = if spec.regularize_trap {
                let c = config.clone().with_trap_smearing(weight.trap_smearing());
                smeared = first_band(&c, spec.wells)?;
                &smeared
            } else {
                &states
            };
            states_here
                .iter()
                .map(|s| {
                    let shift = energy_correction(s, &reg, units)?;
                    Ok(CorrectionRow {
                        well: s.well_index,
                        delta_e: shift.hz,
                        delta_e_recoil: shift.recoil,
                        radius,
                        profile,
                        surface: label.clone(),
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(combos.len() * spec.wells);
    for r in per_combo {
        rows.extend(r?);
    }
    // (n, R, profile); the combo order already follows (R, profile)
    rows.sort_by_key(|r| r.well);
    Ok(CorrectionRun {
        rows,
        point_table: table,
        states,
    })
}

/// Ratio of expectation-value shifts to the point potential at well centres.
pub fn well_center_comparison(
    rows: &[CorrectionRow],
    point: &PotentialTable,
    units: &LatticeUnits,
) -> Result<Vec<WellCenterRow>> {
    rows.iter()
        .map(|r| {
            let center = well_center_estimate(point, r.well, units)?;
            Ok(WellCenterRow {
                well: r.well,
                delta_e: r.delta_e,
                center,
                ratio: (r.delta_e / center).abs(),
            })
        })
        .collect()
}
