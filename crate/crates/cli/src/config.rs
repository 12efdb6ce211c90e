//! Run configuration: one TOML file with sections, plus `section.key=value`
//! overrides from the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use surftrap_core::polarizability::{PolarizabilityModel, RUBIDIUM_DATA};
use surftrap_core::regularization::{ProfileKind, RADIUS_LARGE, RADIUS_SMALL};
use surftrap_core::surface::{LorentzOscillator, PermittivityModel, SurfaceModel, SILICON_DENSITY};
use surftrap_core::units::{make_units, LatticeUnits, PhysicalConstants, SpeciesData, DEFAULT_G_EARTH};
use surftrap_core::yukawa::{
    IsotopePair, Scenario, TrapSettings, DEFAULT_EXPONENT_FACTOR, DEFAULT_SENSITIVITY,
    REFERENCE_ALPHA, REFERENCE_LAMBDA,
};
use surftrap_core::LatticeConfig;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub trap: TrapSection,
    pub species: SpeciesSection,
    pub surface: SurfaceSection,
    pub atom_size: AtomSizeSection,
    pub yukawa: YukawaSection,
    pub potential: PotentialSection,
    pub constants: ConstantsSection,
    pub output: OutputSection,
    pub cache: CacheSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    /// Depth `U` in `E_r`.
    pub depth: f64,
    /// Box height `z_f` in lattice periods.
    pub z_max: f64,
    pub mesh_points: usize,
    /// Ladder states reported by `spectrum`.
    pub wells: usize,
    /// Laser wavelength, m.
    pub laser_wavelength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpeciesSection {
    pub isotope: String,
    /// Light and heavy isotope for differential runs.
    pub pair: [String; 2],
    /// Masses in kg keyed by isotope name.
    pub mass_overrides: BTreeMap<String, f64>,
    /// Transition table replacing the bundled rubidium data.
    pub polarizability_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorConfig {
    pub strength: f64,
    pub resonance: f64,
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSection {
    /// `perfect-conductor`, `drude`, `lorentz` or `tabulated`.
    pub permittivity: String,
    /// rad/s
    pub plasma_frequency: f64,
    /// rad/s
    pub damping: f64,
    pub oscillators: Vec<OscillatorConfig>,
    /// Columnar `ξ, ε(iξ)` file for the tabulated model.
    pub permittivity_file: Option<PathBuf>,
    /// K
    pub temperature: f64,
    /// kg/m³
    pub mass_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtomSizeSection {
    /// m
    pub radii: Vec<f64>,
    pub profiles: Vec<ProfileKind>,
    pub regularize_trap: bool,
    /// Wells in the corrections table.
    pub wells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct YukawaSection {
    pub alpha: f64,
    /// m
    pub lambda: f64,
    pub exponent_factor: f64,
    pub scenarios: Vec<Scenario>,
    /// Hz
    pub sensitivity: f64,
    pub wells: usize,
    /// Box height for Yukawa runs, periods.
    pub z_max: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// Re-diagonalize once per decade at the limit.
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialSection {
    /// Linear grid in periods.
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    /// Log grid for the local exponent, m.
    pub exponent_z_min: f64,
    pub exponent_z_max: f64,
    pub exponent_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsSection {
    /// m/s²
    pub g_earth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Any of `csv`, `json`, `wavefunctions`.
    pub formats: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CacheSection {
    pub directory: PathBuf,
    pub enabled: bool,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            depth: 3.0,
            z_max: 30.0,
            mesh_points: 400_000,
            wells: 13,
            laser_wavelength: 532e-9,
        }
    }
}

impl Default for SpeciesSection {
    fn default() -> Self {
        Self {
            isotope: "rb87".into(),
            pair: ["rb85".into(), "rb87".into()],
            mass_overrides: BTreeMap::new(),
            polarizability_file: None,
        }
    }
}

impl Default for SurfaceSection {
    fn default() -> Self {
        Self {
            permittivity: "perfect-conductor".into(),
            plasma_frequency: 1.37e16,
            damping: 5.32e13,
            oscillators: Vec::new(),
            permittivity_file: None,
            temperature: 0.0,
            mass_density: SILICON_DENSITY,
        }
    }
}

impl Default for AtomSizeSection {
    fn default() -> Self {
        Self {
            radii: vec![RADIUS_SMALL, RADIUS_LARGE],
            profiles: vec![ProfileKind::Uniform, ProfileKind::Parabolic],
            regularize_trap: false,
            wells: 12,
        }
    }
}

impl Default for YukawaSection {
    fn default() -> Self {
        Self {
            alpha: REFERENCE_ALPHA,
            lambda: REFERENCE_LAMBDA,
            exponent_factor: DEFAULT_EXPONENT_FACTOR,
            scenarios: Scenario::ALL.to_vec(),
            sensitivity: DEFAULT_SENSITIVITY,
            wells: 24,
            z_max: 40.0,
            lambda_min: 1e-8,
            lambda_max: 1e-4,
            lambda_points: 17,
            verify: false,
        }
    }
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self {
            z_min: 0.02,
            z_max: 5.0,
            points: 500,
            exponent_z_min: 1e-9,
            exponent_z_max: 1e-4,
            exponent_points: 101,
        }
    }
}

impl Default for ConstantsSection {
    fn default() -> Self {
        Self {
            g_earth: DEFAULT_G_EARTH,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("surftrap-out"),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

impl Default for CacheSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from(".surftrap-cache"),
            enabled: true,
        }
    }
}

/// A named input file and the SHA-256 of its bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataChecksum {
    pub name: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads the config file (if any) and applies overrides in order.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let cfg: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// `section.key=value`; the value is read as a TOML value, or as a bare
/// string when it does not parse as one.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not section.key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| CliError::Config(format!("override key `{path}` is not section.key")))?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(CliError::Config(format!("`{section}` is not a section"))),
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("trap.z_max", self.trap.z_max)?;
        positive("trap.laser_wavelength", self.trap.laser_wavelength)?;
        positive("constants.g_earth", self.constants.g_earth)?;
        positive("yukawa.lambda", self.yukawa.lambda)?;
        positive("yukawa.sensitivity", self.yukawa.sensitivity)?;
        positive("yukawa.z_max", self.yukawa.z_max)?;
        positive("yukawa.lambda_min", self.yukawa.lambda_min)?;
        if !(self.trap.depth.is_finite() && self.trap.depth >= 0.0) {
            return Err(CliError::Config(format!(
                "trap.depth must be >= 0, got {}",
                self.trap.depth
            )));
        }
        if self.trap.wells < 2 {
            return Err(CliError::Config("trap.wells must be >= 2".into()));
        }
        if self.yukawa.lambda_max < self.yukawa.lambda_min || self.yukawa.lambda_points == 0 {
            return Err(CliError::Config("yukawa λ grid is empty".into()));
        }
        if !(self.yukawa.exponent_factor == 1.0 || self.yukawa.exponent_factor == 2.0) {
            return Err(CliError::Config(format!(
                "yukawa.exponent_factor must be 1 or 2, got {}",
                self.yukawa.exponent_factor
            )));
        }
        if self.potential.points < 2
            || self.potential.exponent_points < 2
            || !(self.potential.z_max > self.potential.z_min && self.potential.z_min > 0.0)
            || !(self.potential.exponent_z_max > self.potential.exponent_z_min
                && self.potential.exponent_z_min > 0.0)
        {
            return Err(CliError::Config("potential grids must be increasing and positive".into()));
        }
        for f in &self.output.formats {
            if !matches!(f.as_str(), "csv" | "json" | "wavefunctions") {
                return Err(CliError::Config(format!("unknown output format `{f}`")));
            }
        }
        self.species_data(&self.species.isotope)?;
        for s in &self.species.pair {
            self.species_data(s)?;
        }
        Ok(())
    }

    /// Canonical text of the resolved config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hash of the sections that affect results; where files go and
    /// whether the cache is used do not count.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputSection::default();
        c.cache = CacheSection::default();
        sha256_hex(c.to_toml().as_bytes())
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.iter().any(|f| f == format)
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::default().with_g_earth(self.constants.g_earth)
    }

    pub fn species_data(&self, name: &str) -> Result<SpeciesData, CliError> {
        let s = SpeciesData::by_name(name)
            .ok_or_else(|| CliError::Config(format!("unknown isotope `{name}`")))?;
        Ok(match self.species.mass_overrides.get(name) {
            Some(&m) => s.with_mass(m),
            None => s,
        })
    }

    pub fn units_for(&self, name: &str) -> Result<LatticeUnits, CliError> {
        Ok(make_units(
            &self.species_data(name)?,
            self.trap.laser_wavelength,
            &self.constants(),
        )?)
    }

    pub fn units(&self) -> Result<LatticeUnits, CliError> {
        self.units_for(&self.species.isotope)
    }

    pub fn lattice(&self, units: &LatticeUnits) -> LatticeConfig {
        LatticeConfig::for_units(self.trap.depth, units, self.trap.z_max, self.trap.mesh_points)
    }

    pub fn pair(&self) -> Result<IsotopePair, CliError> {
        Ok(IsotopePair {
            light: self.units_for(&self.species.pair[0])?,
            heavy: self.units_for(&self.species.pair[1])?,
        })
    }

    pub fn yukawa_trap(&self) -> TrapSettings {
        TrapSettings {
            depth: self.trap.depth,
            z_max: self.yukawa.z_max,
            mesh_points: self.trap.mesh_points,
        }
    }

    /// Polarizability model and the checksum of the data it came from.
    pub fn atom(&self) -> Result<(PolarizabilityModel, DataChecksum), CliError> {
        let k = self.constants();
        match &self.species.polarizability_file {
            None => Ok((
                PolarizabilityModel::rubidium(&k)?,
                DataChecksum {
                    name: "rb_transitions.dat".into(),
                    sha256: sha256_hex(RUBIDIUM_DATA.as_bytes()),
                },
            )),
            Some(p) => {
                let text = read_input(p)?;
                Ok((
                    PolarizabilityModel::from_text(&text, &k)?,
                    checksum_of(p, &text),
                ))
            }
        }
    }

    pub fn surface(&self) -> Result<(SurfaceModel, Option<DataChecksum>), CliError> {
        let s = &self.surface;
        let mut checksum = None;
        let permittivity = match s.permittivity.as_str() {
            "perfect-conductor" => PermittivityModel::PerfectConductor,
            "drude" => PermittivityModel::Drude {
                plasma_frequency: s.plasma_frequency,
                damping: s.damping,
            },
            "lorentz" => PermittivityModel::Lorentz(
                s.oscillators
                    .iter()
                    .map(|o| LorentzOscillator {
                        strength: o.strength,
                        resonance: o.resonance,
                        damping: o.damping,
                    })
                    .collect(),
            ),
            "tabulated" => {
                let p = s.permittivity_file.as_ref().ok_or_else(|| {
                    CliError::Config("tabulated permittivity needs surface.permittivity_file".into())
                })?;
                let text = read_input(p)?;
                checksum = Some(checksum_of(p, &text));
                PermittivityModel::tabulated_from_text(&text, self.constants().hbar)?
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown permittivity model `{other}`"
                )))
            }
        };
        let model = SurfaceModel {
            permittivity,
            temperature: s.temperature,
            mass_density: s.mass_density,
        };
        model.validate()?;
        Ok((model, checksum))
    }
}

fn read_input(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))
}

fn checksum_of(p: &Path, text: &str) -> DataChecksum {
    DataChecksum {
        name: p
            .file_name()
            .map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned()),
        sha256: sha256_hex(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn overrides_are_typed() {
        let mut t = toml::Table::new();
        apply_override(&mut t, "trap.depth=10").unwrap();
        apply_override(&mut t, "surface.permittivity=drude").unwrap();
        apply_override(&mut t, "yukawa.scenarios=[\"near\"]").unwrap();
        let c: RunConfig = toml::Value::Table(t).try_into().unwrap();
        assert_eq!(c.trap.depth, 10.0);
        assert_eq!(c.surface.permittivity, "drude");
        assert_eq!(c.yukawa.scenarios, vec![Scenario::Near]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(load(None, &["trap.depht=3".into()]).is_err());
        assert!(load(None, &["traps.depth=3".into()]).is_err());
        assert!(load(None, &["depth".into()]).is_err());
    }

    #[test]
    fn relevant_fields_change_the_hash() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.trap.mesh_points += 1;
        assert_ne!(a.hash(), b.hash());
        let mut c = a.clone();
        c.output.directory = "elsewhere".into();
        c.cache.enabled = false;
        assert_eq!(a.hash(), c.hash());
    }
}
