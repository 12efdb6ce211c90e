//! Mirror response at imaginary frequency and planar Fresnel coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Bulk density of silicon, kg/m³.
pub const SILICON_DENSITY: f64 = 2.33e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzOscillator {
    /// Oscillator strength (dimensionless).
    pub strength: f64,
    /// Resonance angular frequency, rad/s.
    pub resonance: f64,
    /// Damping rate, rad/s.
    pub damping: f64,
}

/// `ε(iξ)` of the mirror material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PermittivityModel {
    PerfectConductor,
    /// `ε = 1 + ω_p²/(ξ(ξ + γ))`.
    Drude { plasma_frequency: f64, damping: f64 },
    /// `ε = 1 + Σ f_j ω_j²/(ω_j² + ξ² + γ_j ξ)`.
    Lorentz(Vec<LorentzOscillator>),
    /// `ε` sampled on a strictly increasing `ξ` grid, interpolated linearly
    /// in `ln ξ`; constant below the grid and `∝ ξ⁻²` (in `ε - 1`) above it.
    Tabulated { xi: Vec<f64>, eps: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    TE,
    TM,
}

impl PermittivityModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PerfectConductor => Ok(()),
            Self::Drude {
                plasma_frequency,
                damping,
            } => {
                ensure(*plasma_frequency > 0.0 && *damping >= 0.0, || {
                    "Drude model needs ω_p > 0 and γ >= 0".into()
                })
            }
            Self::Lorentz(osc) => {
                ensure(!osc.is_empty(), || "Lorentz model needs oscillators".into())?;
                ensure(
                    osc.iter()
                        .all(|o| o.strength >= 0.0 && o.resonance > 0.0 && o.damping >= 0.0),
                    || "Lorentz oscillators need f >= 0, ω > 0, γ >= 0".into(),
                )
            }
            Self::Tabulated { xi, eps } => {
                ensure(xi.len() == eps.len() && xi.len() >= 2, || {
                    "tabulated permittivity needs matching grids with >= 2 points".into()
                })?;
                ensure(xi[0] > 0.0 && xi.windows(2).all(|w| w[1] > w[0]), || {
                    "tabulated ξ grid must be positive and strictly increasing".into()
                })?;
                if let Some(bad) = eps.iter().find(|e| !(**e >= 1.0)) {
                    return Err(Error::Validation(format!(
                        "tabulated ε(iξ) = {bad} is below 1"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_perfect(&self) -> bool {
        matches!(self, Self::PerfectConductor)
    }

    /// `ε(iξ)`; infinite for the perfect conductor and for Drude at `ξ = 0`.
    pub fn eps(&self, xi: f64) -> f64 {
        match self {
            Self::PerfectConductor => f64::INFINITY,
            Self::Drude {
                plasma_frequency,
                damping,
            } => 1.0 + plasma_frequency * plasma_frequency / (xi * (xi + damping)),
            Self::Lorentz(osc) => {
                1.0 + osc
                    .iter()
                    .map(|o| {
                        let w2 = o.resonance * o.resonance;
                        o.strength * w2 / (w2 + xi * xi + o.damping * xi)
                    })
                    .sum::<f64>()
            }
            Self::Tabulated { xi: grid, eps } => {
                let n = grid.len();
                if xi <= grid[0] {
                    eps[0]
                } else if xi >= grid[n - 1] {
                    1.0 + (eps[n - 1] - 1.0) * (grid[n - 1] / xi).powi(2)
                } else {
                    let j = grid.partition_point(|g| *g <= xi) - 1;
                    let t = (xi.ln() - grid[j].ln()) / (grid[j + 1].ln() - grid[j].ln());
                    eps[j] + t * (eps[j + 1] - eps[j])
                }
            }
        }
    }

    /// `ε(iξ)·ξ²`, finite at `ξ = 0` for the Drude model.
    pub fn eps_xi2(&self, xi: f64) -> f64 {
        match self {
            Self::Drude {
                plasma_frequency,
                damping,
            } => {
                let wp2 = plasma_frequency * plasma_frequency;
                if *damping == 0.0 {
                    xi * xi + wp2
                } else {
                    xi * xi + wp2 * xi / (xi + damping)
                }
            }
            _ => self.eps(xi) * xi * xi,
        }
    }

    /// Static permittivity; `None` when it diverges.
    pub fn static_eps(&self) -> Option<f64> {
        match self {
            Self::PerfectConductor | Self::Drude { .. } => None,
            _ => Some(self.eps(0.0)),
        }
    }

    /// `r_TM` at `ξ = 0`: 1 for conductors, `(ε₀-1)/(ε₀+1)` for dielectrics.
    pub fn static_tm(&self) -> f64 {
        match self.static_eps() {
            None => 1.0,
            Some(e) => (e - 1.0) / (e + 1.0),
        }
    }

    /// `(ε - 1)/(ε + 1)` at `iξ`.
    pub fn nonretarded_factor(&self, xi: f64) -> f64 {
        match self {
            Self::PerfectConductor => 1.0,
            _ => {
                let e = self.eps(xi);
                if e.is_infinite() {
                    1.0
                } else {
                    (e - 1.0) / (e + 1.0)
                }
            }
        }
    }

    /// Parses `xi eps` rows; the header must declare `# units: xi=rad/s`
    /// or `# units: xi=eV`.
    pub fn tabulated_from_text(text: &str, hbar: f64) -> Result<Self> {
        let mut scale: Option<f64> = None;
        let mut xi = Vec::new();
        let mut eps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if let Some(rest) = t.strip_prefix("# units:") {
                scale = match rest.trim() {
                    "xi=rad/s" => Some(1.0),
                    "xi=eV" => Some(crate::units::ELEMENTARY_CHARGE / hbar),
                    other => {
                        return Err(Error::Parse {
                            line,
                            msg: format!("unknown unit declaration '{other}'"),
                        })
                    }
                };
                continue;
            }
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let s = scale.ok_or_else(|| Error::Parse {
                line,
                msg: "data row before a '# units:' header".into(),
            })?;
            let cols: Vec<&str> = t.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|c| !c.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 2 columns, found {}", cols.len()),
                });
            }
            let num = |v: &str| {
                v.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    msg: format!("'{v}': {e}"),
                })
            };
            xi.push(num(cols[0])? * s);
            eps.push(num(cols[1])?);
        }
        let m = Self::Tabulated { xi, eps };
        m.validate()?;
        Ok(m)
    }
}

/// Mirror description shared by the dispersion and gravity modules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub permittivity: PermittivityModel,
    /// Temperature, K.
    pub temperature: f64,
    /// Mass density, kg/m³.
    pub mass_density: f64,
}

impl SurfaceModel {
    pub fn perfect_conductor() -> Self {
        Self {
            permittivity: PermittivityModel::PerfectConductor,
            temperature: 0.0,
            mass_density: SILICON_DENSITY,
        }
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.permittivity.validate()?;
        ensure(self.temperature >= 0.0, || {
            format!("temperature must be >= 0, got {}", self.temperature)
        })?;
        ensure(self.mass_density > 0.0, || {
            format!("mass density must be positive, got {}", self.mass_density)
        })
    }

    pub fn label(&self) -> String {
        match &self.permittivity {
            PermittivityModel::PerfectConductor => "perfect-conductor".into(),
            PermittivityModel::Drude { .. } => "drude".into(),
            PermittivityModel::Lorentz(_) => "lorentz".into(),
            PermittivityModel::Tabulated { .. } => "tabulated".into(),
        }
    }
}

/// Both Fresnel coefficients at transverse wavenumber `k` and imaginary
/// frequency `xi`; `(r_TE, r_TM)`.
pub fn fresnel_pair(k: f64, xi: f64, model: &PermittivityModel, c: f64) -> (f64, f64) {
    if model.is_perfect() {
        return (-1.0, 1.0);
    }
    let q = xi / c;
    let kk = (q * q + k * k).sqrt();
    let exi2 = model.eps_xi2(xi);
    let km = (exi2 / (c * c) + k * k).sqrt();
    let r_te = (kk - km) / (kk + km);
    let r_tm = if xi == 0.0 {
        model.static_tm()
    } else {
        // (ε K - K_m)/(ε K + K_m) multiplied through by ξ²
        let a = exi2 * kk;
        let b = xi * xi * km;
        (a - b) / (a + b)
    };
    (r_te, r_tm)
}

pub fn fresnel(
    polarization: Polarization,
    k: f64,
    xi: f64,
    model: &PermittivityModel,
    c: f64,
) -> Result<f64> {
    ensure(k >= 0.0 && xi >= 0.0 && (k > 0.0 || xi > 0.0), || {
        format!("Fresnel coefficient needs k >= 0, ξ >= 0, not both zero (k={k}, ξ={xi})")
    })?;
    if let PermittivityModel::Tabulated { .. } = model {
        let e = model.eps(xi);
        if e < 1.0 {
            return Err(Error::Validation(format!("ε(iξ) = {e} < 1 at ξ = {xi}")));
        }
    }
    let (te, tm) = fresnel_pair(k, xi, model, c);
    Ok(match polarization {
        Polarization::TE => te,
        Polarization::TM => tm,
    })
}
