//! Yukawa-type short-range gravity between atom and mirror, the two-isotope
//! differential observable and exclusion curves.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::lattice::{
    energy_differences, first_band, reference_ws_state, solve_band, BandSelection, EigenState,
    LatticeConfig, SpectrumTable,
};
use crate::potential::Potential;
use crate::surface::SurfaceModel;
use crate::units::LatticeUnits;

/// Interaction strength used for the reference differential table.
pub const REFERENCE_ALPHA: f64 = 3e10;
pub const REFERENCE_LAMBDA: f64 = 1e-6;
/// Target frequency resolution, Hz.
pub const DEFAULT_SENSITIVITY: f64 = 1e-4;
/// Exponent `e^{-f z/λ_Y}` factor used unless configured otherwise.
pub const DEFAULT_EXPONENT_FACTOR: f64 = 2.0;

/// `H_Y(z) = 2π α G ρ m λ² exp(-f z/λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YukawaParams {
    pub alpha: f64,
    /// Range, m.
    pub lambda: f64,
    /// `f` in the exponent; 1 for a half-space, 2 as printed for a cylinder.
    pub exponent_factor: f64,
}

impl YukawaParams {
    pub fn new(alpha: f64, lambda: f64, exponent_factor: f64) -> Self {
        Self {
            alpha,
            lambda,
            exponent_factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.alpha.is_finite(), || "α_Y must be finite".into())?;
        ensure(self.lambda.is_finite() && self.lambda > 0.0, || {
            format!("λ_Y must be positive, got {}", self.lambda)
        })?;
        ensure(
            self.exponent_factor == 1.0 || self.exponent_factor == 2.0,
            || format!("exponent factor must be 1 or 2, got {}", self.exponent_factor),
        )
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}

/// `H_Y` in lattice units for one species.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YukawaPotential {
    /// `H_Y(0)` in `E_r`.
    pub amplitude: f64,
    /// Decay rate per lattice period.
    pub rate: f64,
}

impl YukawaPotential {
    pub fn new(params: &YukawaParams, surface: &SurfaceModel, units: &LatticeUnits) -> Result<Self> {
        params.validate()?;
        surface.validate()?;
        let joules = 2.0
            * PI
            * params.alpha
            * units.constants.g_newton
            * surface.mass_density
            * units.mass
            * params.lambda
            * params.lambda;
        Ok(Self {
            amplitude: units.joules_to_recoil(joules),
            rate: params.exponent_factor * units.length_unit / params.lambda,
        })
    }
}

impl Potential for YukawaPotential {
    fn value(&self, z: f64) -> f64 {
        self.amplitude * (-self.rate * z).exp()
    }
}

/// `H_Y(z)` in `E_r` with `z` in periods.
pub fn yukawa_potential(
    z: f64,
    params: &YukawaParams,
    surface: &SurfaceModel,
    units: &LatticeUnits,
) -> Result<f64> {
    ensure(z >= 0.0, || format!("z must be >= 0, got {z}"))?;
    Ok(YukawaPotential::new(params, surface, units)?.value(z))
}

/// Ladder energies with and without the Yukawa term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YukawaSpectrum {
    pub wells: Vec<usize>,
    /// Plain ladder, `E_r`.
    pub base: Vec<f64>,
    /// Re-diagonalized with `H_Y`, `E_r`.
    pub exact: Vec<f64>,
    /// `E_n + ⟨ψ_n|H_Y|ψ_n⟩`, `E_r`.
    pub perturbative: Vec<f64>,
    pub table: SpectrumTable,
}

impl YukawaSpectrum {
    pub fn exact_shift(&self, i: usize) -> f64 {
        self.exact[i] - self.base[i]
    }

    pub fn perturbative_shift(&self, i: usize) -> f64 {
        self.perturbative[i] - self.base[i]
    }
}

/// Re-diagonalizes the trap with `H_Y` added and also forms first-order
/// shifts from the plain states. The table holds the exact spectrum.
pub fn spectrum_with_yukawa(
    config: &LatticeConfig,
    params: &YukawaParams,
    surface: &SurfaceModel,
    units: &LatticeUnits,
    wells: usize,
) -> Result<YukawaSpectrum> {
    let hy = Arc::new(YukawaPotential::new(params, surface, units)?);
    let with = config.clone().with_extra_potential(hy.clone());
    let (plain, yuk) = rayon::join(|| first_band(config, wells + 1), || first_band(&with, wells + 1));
    let (plain, yuk) = (plain?, yuk?);
    check_labels(&plain, &yuk)?;
    let table = energy_differences(&yuk, units)?;
    let plain = &plain[..wells];
    let yuk = &yuk[..wells];
    Ok(YukawaSpectrum {
        wells: plain.iter().map(|s| s.well_index).collect(),
        base: plain.iter().map(|s| s.energy).collect(),
        exact: yuk.iter().map(|s| s.energy).collect(),
        perturbative: plain
            .iter()
            .map(|s| s.energy + s.expectation(|z| hy.value(z)))
            .collect(),
        table,
    })
}

fn check_labels(a: &[EigenState], b: &[EigenState]) -> Result<()> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.well_index != y.well_index) {
        return Err(Error::Labelling(
            "well labels differ between runs on the same mesh".into(),
        ));
    }
    Ok(())
}

/// Shared trap settings for runs over several species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSettings {
    /// Depth in each species' own `E_r`.
    pub depth: f64,
    pub z_max: f64,
    pub mesh_points: usize,
}

impl TrapSettings {
    pub fn config(&self, units: &LatticeUnits) -> LatticeConfig {
        LatticeConfig::for_units(self.depth, units, self.z_max, self.mesh_points)
    }
}

/// Units for the light and heavy isotope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotopePair {
    pub light: LatticeUnits,
    pub heavy: LatticeUnits,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferentialRow {
    pub well: usize,
    /// Hz.
    pub d_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialRun {
    /// From re-diagonalization.
    pub exact: Vec<DifferentialRow>,
    /// From first-order shifts.
    pub perturbative: Vec<DifferentialRow>,
}

/// `𝒟E_n = (E^light_n - E^heavy_n) - (E^{Y,light}_n - E^{Y,heavy}_n)` in Hz.
pub fn isotope_differential(
    params: &YukawaParams,
    surface: &SurfaceModel,
    pair: &IsotopePair,
    trap: &TrapSettings,
    wells: usize,
) -> Result<DifferentialRun> {
    let species = [pair.light, pair.heavy];
    let spectra: Vec<Result<YukawaSpectrum>> = species
        .par_iter()
        .map(|u| spectrum_with_yukawa(&trap.config(u), params, surface, u, wells))
        .collect();
    let mut it = spectra.into_iter();
    let light = it.next().expect("two species")?;
    let heavy = it.next().expect("two species")?;
    if light.wells != heavy.wells {
        return Err(Error::Labelling("well labels differ between isotopes".into()));
    }
    let row = |i: usize, shift: &dyn Fn(&YukawaSpectrum, usize) -> f64| DifferentialRow {
        well: light.wells[i],
        d_e: -(pair.light.to_hz(shift(&light, i)) - pair.heavy.to_hz(shift(&heavy, i))),
    };
    Ok(DifferentialRun {
        exact: (0..wells).map(|i| row(i, &|s, j| s.exact_shift(j))).collect(),
        perturbative: (0..wells)
            .map(|i| row(i, &|s, j| s.perturbative_shift(j)))
            .collect(),
    })
}

/// Last well whose `|𝒟E|` is at or above `sensitivity`.
pub fn detectability_horizon(rows: &[DifferentialRow], sensitivity: f64) -> Option<usize> {
    rows.iter()
        .filter(|r| r.d_e.abs() >= sensitivity)
        .map(|r| r.well)
        .max()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Two-isotope differential between wells 4 and 6.
    Near,
    /// Single-isotope shift of well 40.
    Far40,
    /// Single-isotope shift of well 70.
    Far70,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Near, Scenario::Far40, Scenario::Far70];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Near => "near",
            Self::Far40 => "far40",
            Self::Far70 => "far70",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.label() == s)
    }

    fn far_well(&self) -> Option<usize> {
        match self {
            Self::Near => None,
            Self::Far40 => Some(40),
            Self::Far70 => Some(70),
        }
    }
}

pub const NEAR_WELLS: (usize, usize) = (4, 6);
/// Interior well translated to the far wells.
const SOURCE_WELL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionPoint {
    /// m.
    pub lambda: f64,
    pub alpha_limit: f64,
    /// Exact signal at `alpha_limit` over the sensitivity, where checked.
    pub exact_over_sensitivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionCurve {
    pub scenario: Scenario,
    pub sensitivity: f64,
    pub points: Vec<ExclusionPoint>,
    /// Ranges skipped because the signal vanished numerically.
    pub omitted: Vec<f64>,
}

/// Everything needed to turn `λ_Y` into an `α_Y` limit.
#[derive(Debug, Clone)]
pub struct ExclusionSetup {
    pub pair: IsotopePair,
    pub trap: TrapSettings,
    pub surface: SurfaceModel,
    pub exponent_factor: f64,
    /// Re-diagonalize once per decade of `λ_Y`.
    pub verify: bool,
}

/// Plain-trap states reused across `λ_Y` values.
#[derive(Debug, Clone)]
pub struct ExclusionContext {
    pub setup: ExclusionSetup,
    light: Vec<EigenState>,
    heavy: Vec<EigenState>,
}

impl ExclusionContext {
    pub fn prepare(setup: ExclusionSetup) -> Result<Self> {
        setup.surface.validate()?;
        let wells = SOURCE_WELL;
        let (light, heavy) = rayon::join(
            || first_band(&setup.trap.config(&setup.pair.light), wells),
            || first_band(&setup.trap.config(&setup.pair.heavy), wells),
        );
        let (light, heavy) = (light?, heavy?);
        check_labels(&light, &heavy)?;
        Ok(Self {
            setup,
            light,
            heavy,
        })
    }

    fn params(&self, lambda: f64, alpha: f64) -> YukawaParams {
        YukawaParams::new(alpha, lambda, self.setup.exponent_factor)
    }

    /// First-order signal for `α_Y = 1`, Hz.
    pub fn signal_per_alpha(&self, scenario: Scenario, lambda: f64) -> Result<f64> {
        let p = self.params(lambda, 1.0);
        let s = &self.setup;
        let shift = |states: &[EigenState], units: &LatticeUnits, well: usize| -> Result<f64> {
            let hy = YukawaPotential::new(&p, &s.surface, units)?;
            let st = states
                .iter()
                .find(|x| x.well_index == well)
                .ok_or_else(|| Error::Labelling(format!("well {well} not solved")))?;
            Ok(units.to_hz(st.expectation(|z| hy.value(z))))
        };
        match scenario.far_well() {
            None => {
                let (a, b) = NEAR_WELLS;
                let d = |n| -> Result<f64> {
                    Ok(shift(&self.light, &s.pair.light, n)? - shift(&self.heavy, &s.pair.heavy, n)?)
                };
                Ok((d(a)? - d(b)?).abs())
            }
            Some(n) => {
                let src = &self.heavy[SOURCE_WELL - 1];
                let box_cfg = s.trap.config(&s.pair.heavy).with_z_max(n as f64 + 20.0);
                let moved = reference_ws_state(src, n, &box_cfg)?;
                let hy = YukawaPotential::new(&p, &s.surface, &s.pair.heavy)?;
                Ok(s.pair.heavy.to_hz(moved.expectation(|z| hy.value(z))).abs())
            }
        }
    }

    /// Exact signal at strength `alpha`, Hz.
    pub fn exact_signal(&self, scenario: Scenario, lambda: f64, alpha: f64) -> Result<f64> {
        let p = self.params(lambda, alpha);
        let s = &self.setup;
        match scenario.far_well() {
            None => {
                let (a, b) = NEAR_WELLS;
                let exact = |states: &[EigenState], units: &LatticeUnits| -> Result<(f64, f64)> {
                    let hy = Arc::new(YukawaPotential::new(&p, &s.surface, units)?);
                    let cfg = s.trap.config(units).with_extra_potential(hy);
                    let y = first_band(&cfg, b)?;
                    Ok((
                        units.to_hz(y[a - 1].energy - states[a - 1].energy),
                        units.to_hz(y[b - 1].energy - states[b - 1].energy),
                    ))
                };
                let (l4, l6) = exact(&self.light, &s.pair.light)?;
                let (h4, h6) = exact(&self.heavy, &s.pair.heavy)?;
                Ok(((l4 - h4) - (l6 - h6)).abs())
            }
            Some(n) => {
                let units = &s.pair.heavy;
                let src = &self.heavy[SOURCE_WELL - 1];
                let z_max = n as f64 + 20.0;
                let spacing = s.trap.z_max / (s.trap.mesh_points as f64 + 1.0);
                let mesh = ((z_max / spacing) as usize).max(crate::lattice::MIN_MESH_POINTS);
                let cfg = s.trap.config(units).with_z_max(z_max).with_mesh_points(mesh);
                let guess = src.energy + (n as f64 - src.well_index as f64) * units.gravity_step;
                let half = 0.5 * units.gravity_step;
                let hy = Arc::new(YukawaPotential::new(&p, &s.surface, units)?);
                let with = cfg.clone().with_extra_potential(hy);
                let pick = |c: &LatticeConfig| -> Result<f64> {
                    solve_band(c, BandSelection::Window(guess - half, guess + half))?
                        .into_iter()
                        .filter(|x| x.is_first_band())
                        .min_by(|x, y| {
                            (x.centroid - n as f64).abs().total_cmp(&(y.centroid - n as f64).abs())
                        })
                        .map(|x| x.energy)
                        .ok_or_else(|| Error::Labelling(format!("no first-band state near well {n}")))
                };
                let (e0, e1) = rayon::join(|| pick(&cfg), || pick(&with));
                Ok(units.to_hz(e1? - e0?).abs())
            }
        }
    }

    pub fn curve(&self, scenario: Scenario, lambdas: &[f64], sensitivity: f64) -> Result<ExclusionCurve> {
        ensure(sensitivity > 0.0, || {
            format!("sensitivity must be positive, got {sensitivity}")
        })?;
        ensure(lambdas.iter().all(|l| *l > 0.0), || "λ_Y grid must be positive".into())?;
        let signals: Vec<Result<f64>> = lambdas
            .par_iter()
            .map(|l| self.signal_per_alpha(scenario, *l))
            .collect();
        let mut points = Vec::new();
        let mut omitted = Vec::new();
        let mut last_decade: Option<i32> = None;
        for (&lambda, sig) in lambdas.iter().zip(signals) {
            let sig = sig?;
            let alpha_limit = sensitivity / sig;
            if !(sig > 0.0) || !alpha_limit.is_finite() {
                log::warn!(
                    "{}: signal vanishes at λ_Y = {lambda:e} m, point omitted",
                    scenario.label()
                );
                omitted.push(lambda);
                continue;
            }
            let decade = lambda.log10().floor() as i32;
            let exact_over_sensitivity = if self.setup.verify && last_decade != Some(decade) {
                last_decade = Some(decade);
                Some(self.exact_signal(scenario, lambda, alpha_limit)? / sensitivity)
            } else {
                None
            };
            points.push(ExclusionPoint {
                lambda,
                alpha_limit,
                exact_over_sensitivity,
            });
        }
        Ok(ExclusionCurve {
            scenario,
            sensitivity,
            points,
            omitted,
        })
    }
}

/// One-shot form of [`ExclusionContext::curve`].
pub fn exclusion_curve(
    scenario: Scenario,
    lambdas: &[f64],
    sensitivity: f64,
    setup: ExclusionSetup,
) -> Result<ExclusionCurve> {
    ExclusionContext::prepare(setup)?.curve(scenario, lambdas, sensitivity)
}

/// `n` log-spaced ranges between `lo` and `hi` (m).
pub fn lambda_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

/// Newtonian attraction of a cylindrical mirror (radius `radius`, thickness
/// `thickness`, m) on an atom on its axis at height `z` (m), expressed as the
/// energy change across one lattice period, Hz.
pub fn newtonian_well_shift(
    surface: &SurfaceModel,
    units: &LatticeUnits,
    radius: f64,
    thickness: f64,
    z: f64,
) -> Result<f64> {
    ensure(radius > 0.0 && thickness > 0.0 && z >= 0.0, || {
        "cylinder dimensions must be positive and z >= 0".into()
    })?;
    let g = 2.0 * PI * units.constants.g_newton * surface.mass_density
        * (thickness + (radius * radius + z * z).sqrt()
            - (radius * radius + (z + thickness).powi(2)).sqrt());
    Ok(units.to_hz(units.joules_to_recoil(units.mass * g * units.length_unit)))
}
