//! Atom–mirror dispersion potential at zero and finite temperature.
//!
//! Internally SI; public functions take `z` in lattice periods and return
//! energies in `E_r`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::polarizability::PolarizabilityModel;
use crate::quadrature::{Adaptive, GaussLaguerre, NeumaierSum};
use crate::surface::{fresnel_pair, PermittivityModel, SurfaceModel};
use crate::table::{try_build_potential_table, GridSpec, PotentialTable};
use crate::units::LatticeUnits;

/// Relative accuracy requested from the frequency integral.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Matsubara sum stops after this many consecutive negligible terms.
const MATSUBARA_QUIET_TERMS: usize = 3;
const MATSUBARA_REL_CUTOFF: f64 = 1e-8;
const MATSUBARA_MAX_TERMS: usize = 20_000_000;

fn laguerre(order: usize) -> &'static GaussLaguerre {
    static RULES: [OnceLock<GaussLaguerre>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let slot = match order {
        8 => 0,
        48 => 1,
        96 => 2,
        _ => 3,
    };
    RULES[slot].get_or_init(|| GaussLaguerre::new(order))
}

/// Inner transverse-wavenumber integral at fixed `ξ` (SI, without `α`):
/// `∫dk k e^{-2Kz}/(2K) [ξ² r_TE - (ξ² + 2c²k²) r_TM]`.
///
/// With `t = 2z(K - ξ/c)` this becomes `e^{-2ξz/c}/(4z) ∫e^{-t} F dt`.
fn k_integral(xi: f64, z: f64, eps: &PermittivityModel, c: f64) -> f64 {
    let q = xi / c;
    let inner = |rule: &GaussLaguerre| {
        rule.integrate(|t| {
            let kk = q + t / (2.0 * z);
            let k2 = (kk - q) * (kk + q);
            let (te, tm) = fresnel_pair(k2.max(0.0).sqrt(), xi, eps, c);
            xi * xi * te - (xi * xi + 2.0 * c * c * k2) * tm
        })
    };
    let value = if eps.is_perfect() {
        // polynomial of degree 2 in t: exact with a few nodes
        inner(laguerre(8))
    } else {
        let coarse = inner(laguerre(48));
        let fine = inner(laguerre(96));
        if (fine - coarse).abs() <= 1e-10 * fine.abs() {
            fine
        } else {
            inner(laguerre(192))
        }
    };
    (-2.0 * q * z).exp() / (4.0 * z) * value
}

/// Integrand `G(ξ)` of the frequency integral, SI.
fn spectral_density(xi: f64, z: f64, atom: &PolarizabilityModel, surface: &SurfaceModel, c: f64) -> f64 {
    atom.alpha_volume(xi) * k_integral(xi, z, &surface.permittivity, c)
}

fn check_z(z: f64) -> Result<()> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!(
            "atom-surface distance must be positive, got {z}"
        )));
    }
    Ok(())
}

/// Zero-temperature potential in SI (J) at distance `z_m` in metres.
pub fn vcp_zero_temperature_si(
    z_m: f64,
    atom: &PolarizabilityModel,
    surface: &SurfaceModel,
    c: f64,
    rel_tol: f64,
) -> Result<f64> {
    check_z(z_m)?;
    let hbar = atom.hbar;
    let xi_c = c / (2.0 * z_m);
    let w_max = atom
        .transitions
        .iter()
        .map(|t| t.energy / hbar)
        .fold(0.0, f64::max);
    let lo = (1e-12 * xi_c.min(atom.lowest_frequency())).ln();
    let hi = (80.0 * xi_c).min(1e12 * w_max).ln();
    let mut breaks: Vec<f64> = atom
        .transitions
        .iter()
        .map(|t| (t.energy / hbar).ln())
        .chain(std::iter::once(xi_c.ln()))
        .filter(|b| *b > lo && *b < hi)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let est = Adaptive::new(rel_tol).with_abs_tol(0.0).integrate_with_breaks(
        |s| {
            let xi = s.exp();
            xi * spectral_density(xi, z_m, atom, surface, c)
        },
        lo,
        hi,
        &breaks,
    )?;
    Ok(hbar / (PI * c * c) * est.value)
}

/// Finite-temperature Matsubara sum in SI (J).
pub fn vcp_finite_temperature_si(
    z_m: f64,
    atom: &PolarizabilityModel,
    surface: &SurfaceModel,
    temperature: f64,
    k_b: f64,
    c: f64,
) -> Result<f64> {
    check_z(z_m)?;
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "temperature {temperature} K is not positive; use the zero-temperature potential"
        )));
    }
    let hbar = atom.hbar;
    let kt = k_b * temperature;
    let step = 2.0 * PI * kt / hbar;
    // n = 0 with half weight, taken analytically
    let zeroth = -kt * atom.alpha_volume(0.0) * surface.permittivity.static_tm() / (4.0 * z_m.powi(3));
    let prefactor = 2.0 * kt / (c * c);
    let mut sum = NeumaierSum::default();
    sum.add(zeroth);
    let chunk = 64;
    let mut n = 1usize;
    let mut quiet = 0usize;
    while n < MATSUBARA_MAX_TERMS {
        let terms: Vec<f64> = (n..n + chunk)
            .into_par_iter()
            .map(|j| prefactor * spectral_density(j as f64 * step, z_m, atom, surface, c))
            .collect();
        for t in terms {
            sum.add(t);
            if t.abs() < MATSUBARA_REL_CUTOFF * sum.sum().abs() {
                quiet += 1;
                if quiet >= MATSUBARA_QUIET_TERMS {
                    return Ok(sum.sum());
                }
            } else {
                quiet = 0;
            }
        }
        n += chunk;
    }
    Err(Error::Quadrature {
        estimate: sum.sum(),
        error: f64::NAN,
        requested: MATSUBARA_REL_CUTOFF,
    })
}

/// Non-retarded limit `-(ħ/4πz³) ∫ α/(4πε₀) (ε-1)/(ε+1) dξ`, SI.
pub fn vcp_vdw_si(
    z_m: f64,
    atom: &PolarizabilityModel,
    surface: &SurfaceModel,
    rel_tol: f64,
) -> Result<f64> {
    check_z(z_m)?;
    let hbar = atom.hbar;
    let w_max = atom
        .transitions
        .iter()
        .map(|t| t.energy / hbar)
        .fold(0.0, f64::max);
    let lo = (1e-12 * atom.lowest_frequency()).ln();
    let hi = (1e14 * w_max).ln();
    let eps = &surface.permittivity;
    let est = Adaptive::new(rel_tol).integrate(
        |s| {
            let xi = s.exp();
            xi * atom.alpha_volume(xi) * eps.nonretarded_factor(xi)
        },
        lo,
        hi,
    )?;
    Ok(-hbar / (4.0 * PI * z_m.powi(3)) * est.value)
}

/// Zero-temperature potential, `z` in periods, result in `E_r`.
pub fn vcp_zero_temperature(
    z: f64,
    atom: &PolarizabilityModel,
    surface: &SurfaceModel,
    units: &LatticeUnits,
) -> Result<f64> {
    check_z(z)?;
    let v = vcp_zero_temperature_si(
        units.periods_to_meters(z),
        atom,
        surface,
        units.constants.c,
        DEFAULT_REL_TOL,
    )?;
    Ok(units.joules_to_recoil(v))
}

/// Finite-temperature potential, `z` in periods, result in `E_r`.
pub fn vcp_finite_temperature(
    z: f64,
    atom: &PolarizabilityModel,
    surface: &SurfaceModel,
    temperature: f64,
    units: &LatticeUnits,
) -> Result<f64> {
    check_z(z)?;
    let v = vcp_finite_temperature_si(
        units.periods_to_meters(z),
        atom,
        surface,
        temperature,
        units.constants.k_b,
        units.constants.c,
    )?;
    Ok(units.joules_to_recoil(v))
}

/// Non-retarded potential, `z` in periods, result in `E_r`.
pub fn vcp_vdw(
    z: f64,
    atom: &PolarizabilityModel,
    surface: &SurfaceModel,
    units: &LatticeUnits,
) -> Result<f64> {
    check_z(z)?;
    let v = vcp_vdw_si(units.periods_to_meters(z), atom, surface, DEFAULT_REL_TOL)?;
    Ok(units.joules_to_recoil(v))
}

/// Local exponent `-d ln|V| / d ln z` by a centred difference with
/// relative step `10⁻³`.
pub fn power_law_exponent<F>(potential: F, z: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    check_z(z)?;
    let h = 1e-3;
    let lo = potential(z * (1.0 - h))?;
    let hi = potential(z * (1.0 + h))?;
    if !(lo != 0.0 && hi != 0.0 && lo.signum() == hi.signum()) {
        return Err(Error::Domain(format!(
            "potential changes sign or vanishes around z = {z}"
        )));
    }
    Ok(-(hi.abs().ln() - lo.abs().ln()) / ((1.0 + h).ln() - (1.0 - h).ln()))
}

/// The potential for one atom and one mirror, choosing the zero- or
/// finite-temperature form from the surface temperature.
#[derive(Debug, Clone)]
pub struct CasimirPolder {
    pub atom: PolarizabilityModel,
    pub surface: SurfaceModel,
    pub units: LatticeUnits,
}

impl CasimirPolder {
    pub fn new(atom: PolarizabilityModel, surface: SurfaceModel, units: LatticeUnits) -> Result<Self> {
        surface.validate()?;
        Ok(Self {
            atom,
            surface,
            units,
        })
    }

    /// `V(z)` in `E_r`, `z` in periods.
    pub fn value(&self, z: f64) -> Result<f64> {
        if self.surface.temperature > 0.0 {
            vcp_finite_temperature(z, &self.atom, &self.surface, self.surface.temperature, &self.units)
        } else {
            vcp_zero_temperature(z, &self.atom, &self.surface, &self.units)
        }
    }

    pub fn vdw(&self, z: f64) -> Result<f64> {
        vcp_vdw(z, &self.atom, &self.surface, &self.units)
    }

    pub fn table(&self, spec: GridSpec) -> Result<PotentialTable> {
        ensure(spec.nodes >= 2, || "grid needs nodes".into())?;
        try_build_potential_table(|z| self.value(z), spec, 1e-4)
    }
}

/// Log grid used for point-atom tables: from well below the first mesh node
/// up past the box.
pub fn default_grid(z_max: f64) -> GridSpec {
    GridSpec::new(1e-6, 2.0 * z_max.max(1.0) + 10.0, 400)
}
