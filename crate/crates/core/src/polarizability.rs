//! Ground-state dynamic polarizability `α(iξ)` from a sum over transitions.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::units::{
    PhysicalConstants, PolarizabilityRef, BOHR_RADIUS, ELEMENTARY_CHARGE, EPSILON0, HARTREE,
};

/// Bundled transition table for rubidium.
pub const RUBIDIUM_DATA: &str = include_str!("../data/rb_transitions.dat");

/// One dipole transition out of the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Transition energy `E_n0`, J.
    pub energy: f64,
    /// Squared dipole matrix element `μ_n0²`, C²·m².
    pub dipole_sq: f64,
}

/// `α(iξ) = (2/3) Σ E_n0 μ_n0² / (E_n0² + ħ²ξ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizabilityModel {
    pub transitions: Vec<Transition>,
    pub hbar: f64,
}

impl PolarizabilityModel {
    pub fn new(transitions: Vec<Transition>, hbar: f64) -> Result<Self> {
        ensure(!transitions.is_empty(), || {
            "polarizability model needs at least one transition".into()
        })?;
        for t in &transitions {
            ensure(t.energy.is_finite() && t.energy > 0.0, || {
                format!("transition energy must be positive, got {}", t.energy)
            })?;
            ensure(t.dipole_sq.is_finite() && t.dipole_sq >= 0.0, || {
                format!("squared dipole must be non-negative, got {}", t.dipole_sq)
            })?;
        }
        ensure(hbar > 0.0, || "hbar must be positive".into())?;
        Ok(Self { transitions, hbar })
    }

    /// A single two-level oscillator.
    pub fn single(energy: f64, dipole_sq: f64, hbar: f64) -> Result<Self> {
        Self::new(vec![Transition { energy, dipole_sq }], hbar)
    }

    pub fn rubidium(constants: &PhysicalConstants) -> Result<Self> {
        Self::from_text(RUBIDIUM_DATA, constants)
    }

    pub fn bundled(r: PolarizabilityRef, constants: &PhysicalConstants) -> Result<Self> {
        match r {
            PolarizabilityRef::Rubidium => Self::rubidium(constants),
        }
    }

    /// Parses the columnar transition format of the bundled data file.
    ///
    /// A `# units:` header fixes the energy (`cm-1`, `eV`, `hartree`, `J`)
    /// and dipole (`e*a0`, `C*m`) units. Rows are
    /// `line <label> <energy> <reduced dipole>` or
    /// `core <label> <energy> <static alpha>`.
    pub fn from_text(text: &str, constants: &PhysicalConstants) -> Result<Self> {
        let mut energy_unit: Option<f64> = None;
        let mut dipole_unit: Option<f64> = None;
        let mut alpha_unit = 4.0 * std::f64::consts::PI * EPSILON0 * BOHR_RADIUS.powi(3);
        let mut core_unit = HARTREE;
        let mut transitions = Vec::new();
        let joule_per_wavenumber = constants.h * constants.c * 100.0;
        let energy_scale = |s: &str| match s {
            "cm-1" => Some(joule_per_wavenumber),
            "eV" => Some(ELEMENTARY_CHARGE),
            "hartree" => Some(HARTREE),
            "J" => Some(1.0),
            _ => None,
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if let Some(rest) = trimmed.strip_prefix("# units:") {
                for item in rest.split_whitespace() {
                    let (key, val) = item.split_once('=').ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("malformed unit declaration '{item}'"),
                    })?;
                    let bad = || Error::Parse {
                        line,
                        msg: format!("unknown unit '{val}' for {key}"),
                    };
                    match key {
                        "energy" => energy_unit = Some(energy_scale(val).ok_or_else(bad)?),
                        "core_energy" => core_unit = energy_scale(val).ok_or_else(bad)?,
                        "dipole" => {
                            dipole_unit = Some(match val {
                                "e*a0" => ELEMENTARY_CHARGE * BOHR_RADIUS,
                                "C*m" => 1.0,
                                _ => return Err(bad()),
                            })
                        }
                        "alpha" => {
                            alpha_unit = match val {
                                "au" => alpha_unit,
                                "SI" => 1.0,
                                _ => return Err(bad()),
                            }
                        }
                        _ => {
                            return Err(Error::Parse {
                                line,
                                msg: format!("unknown unit key '{key}'"),
                            })
                        }
                    }
                }
                continue;
            }
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = trimmed.split_whitespace().collect();
            if cols.len() != 4 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 4 columns, found {}", cols.len()),
                });
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    msg: format!("'{s}': {e}"),
                })
            };
            let (e_unit, d_unit) = match (energy_unit, dipole_unit) {
                (Some(e), Some(d)) => (e, d),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: "data row before a '# units:' header".into(),
                    })
                }
            };
            let value = num(cols[3])?;
            let t = match cols[0] {
                "line" => {
                    let reduced = value * d_unit;
                    Transition {
                        energy: num(cols[2])? * e_unit,
                        dipole_sq: reduced * reduced / 2.0,
                    }
                }
                "core" => {
                    // static limit of one oscillator: α = (2/3) μ²/E
                    let energy = num(cols[2])? * core_unit;
                    Transition {
                        energy,
                        dipole_sq: 1.5 * value * alpha_unit * energy,
                    }
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown row kind '{other}'"),
                    })
                }
            };
            transitions.push(t);
        }
        Self::new(transitions, constants.hbar)
    }

    /// `α(iξ)` in SI units (C²·m²·J⁻¹).
    pub fn alpha_imaginary(&self, xi: f64) -> f64 {
        let hx = self.hbar * xi;
        let hx2 = hx * hx;
        (2.0 / 3.0)
            * self
                .transitions
                .iter()
                .map(|t| t.energy * t.dipole_sq / (t.energy * t.energy + hx2))
                .sum::<f64>()
    }

    /// `α(iξ)/(4πε₀)`, m³.
    pub fn alpha_volume(&self, xi: f64) -> f64 {
        self.alpha_imaginary(xi) / (4.0 * std::f64::consts::PI * EPSILON0)
    }

    pub fn static_alpha_over_4pieps0(&self) -> f64 {
        self.alpha_volume(0.0)
    }

    /// `∫₀^∞ α(iξ) dξ = (π/3ħ) Σ μ²`, SI.
    pub fn alpha_integral(&self) -> f64 {
        std::f64::consts::PI / (3.0 * self.hbar)
            * self.transitions.iter().map(|t| t.dipole_sq).sum::<f64>()
    }

    /// Lowest transition angular frequency `E/ħ`.
    pub fn lowest_frequency(&self) -> f64 {
        self.transitions
            .iter()
            .map(|t| t.energy)
            .fold(f64::INFINITY, f64::min)
            / self.hbar
    }

    /// Every `μ²` multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.transitions
                .iter()
                .map(|t| Transition {
                    energy: t.energy,
                    dipole_sq: t.dipole_sq * s,
                })
                .collect(),
            self.hbar,
        )
    }
}

/// Free-function form of [`PolarizabilityModel::alpha_imaginary`].
pub fn alpha_imaginary(model: &PolarizabilityModel, xi: f64) -> Result<f64> {
    ensure(xi >= 0.0, || format!("imaginary frequency must be >= 0, got {xi}"))?;
    Ok(model.alpha_imaginary(xi))
}
