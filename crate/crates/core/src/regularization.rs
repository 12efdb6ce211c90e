//! Finite-size atom: the point potential averaged over a spherical density.
//!
//! With the sphere's near point at `z` and its centre at `z + R`, only the
//! axial marginal `w(u)` of the density matters, `u ∈ [0, 2R]` measured from
//! the near point:
//! `V_reg(z) = ∫₀^{2R} w(u) V(z + u) du`.

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::lattice::TrapSmearing;
use crate::potential::Potential;
use crate::quadrature::{Adaptive, GaussLegendre};
use crate::table::{try_build_potential_table, GridSpec, PotentialTable};
use crate::units::LatticeUnits;

/// Radii bracketing the atomic size, m.
pub const RADIUS_SMALL: f64 = 200e-12;
pub const RADIUS_LARGE: f64 = 300e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// Constant density inside the sphere.
    Uniform,
    /// Density `∝ 1 - r²/R²`.
    Parabolic,
}

impl ProfileKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Parabolic => "parabolic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(Self::Uniform),
            "parabolic" => Some(Self::Parabolic),
            _ => None,
        }
    }
}

/// Spherical atomic density of radius `radius` (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub kind: ProfileKind,
    pub radius: f64,
}

impl DensityProfile {
    pub fn new(kind: ProfileKind, radius: f64) -> Self {
        Self { kind, radius }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.radius.is_finite() && self.radius > 0.0, || {
            format!("atomic radius must be positive, got {}", self.radius)
        })
    }
}

/// Axial marginal `w(u)` of a density profile, with `u` in whatever length
/// unit `radius` is given in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxialWeight {
    pub kind: ProfileKind,
    pub radius: f64,
}

impl AxialWeight {
    pub fn new(kind: ProfileKind, radius: f64) -> Result<Self> {
        ensure(radius.is_finite() && radius > 0.0, || {
            format!("weight radius must be positive, got {radius}")
        })?;
        Ok(Self { kind, radius })
    }

    pub fn support(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn value(&self, u: f64) -> f64 {
        let r = self.radius;
        if !(0.0..=2.0 * r).contains(&u) {
            return 0.0;
        }
        // area of the transverse disk at height u: π u (2R - u)
        let disk = u * (2.0 * r - u);
        match self.kind {
            ProfileKind::Uniform => 3.0 * disk / (4.0 * r.powi(3)),
            ProfileKind::Parabolic => 15.0 * disk * disk / (16.0 * r.powi(5)),
        }
    }

    /// `(∫ w cos qu, ∫ w sin qu)`.
    pub fn fourier(&self, q: f64) -> (f64, f64) {
        let rule = GaussLegendre::new(64);
        let c = rule.integrate(|u| self.value(u) * (q * u).cos(), 0.0, self.support());
        let s = rule.integrate(|u| self.value(u) * (q * u).sin(), 0.0, self.support());
        (c, s)
    }

    /// Trap terms averaged over this weight (lengths in periods).
    pub fn trap_smearing(&self) -> TrapSmearing {
        let (c, s) = self.fourier(2.0 * PI);
        TrapSmearing {
            mean_offset: self.radius,
            cos_moment: c,
            sin_moment: s,
        }
    }
}

/// Weight in lattice periods for a profile given in metres.
pub fn axial_weight(profile: &DensityProfile, units: &LatticeUnits) -> Result<AxialWeight> {
    profile.validate()?;
    AxialWeight::new(profile.kind, units.meters_to_periods(profile.radius))
}

/// `∫₀^{2R} w(u) V(z+u) du` for a fallible potential.
///
/// The inner half uses `u = R t²` so the contact region, where `V` is
/// steep, is resolved without a singular integrand.
pub fn try_regularize<F>(potential: F, weight: &AxialWeight, z: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!(
            "regularized potential needs z > 0, got {z}"
        )));
    }
    let r = weight.radius;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let eval = |x: f64| match potential(x) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let q = Adaptive::new(1e-10);
    let inner = q.integrate(
        |t| {
            let u = r * t * t;
            weight.value(u) * eval(z + u) * 2.0 * r * t
        },
        0.0,
        1.0,
    )?;
    let outer = q.integrate(|u| weight.value(u) * eval(z + u), r, 2.0 * r)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(inner.value + outer.value)
}

/// `∫₀^{2R} w(u) V(z+u) du`.
pub fn regularize<P: Potential + ?Sized>(potential: &P, weight: &AxialWeight, z: f64) -> Result<f64> {
    try_regularize(|x| Ok(potential.value(x)), weight, z)
}

/// Regularized version of a tabulated potential on the part of its grid
/// where `z + 2R` stays inside the source table.
pub fn regularize_table(table: &PotentialTable, weight: &AxialWeight) -> Result<PotentialTable> {
    let z_lo = table.z_min();
    let z_hi = table.z_max() - weight.support();
    if !(z_hi > z_lo) {
        return Err(Error::Validation(format!(
            "source table [{}, {}] is too short for a {}-period atom",
            table.z_min(),
            table.z_max(),
            weight.support()
        )));
    }
    let spec = GridSpec::new(z_lo, z_hi, table.grid.len());
    try_build_potential_table(|z| regularize(table, weight, z), spec, 1e-4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::FnPotential;
    use crate::quadrature::Adaptive;

    #[test]
    fn uniform_weight_peaks_at_the_centre_plane() {
        let w = AxialWeight::new(ProfileKind::Uniform, 0.3).unwrap();
        assert!((w.value(0.3) - 3.0 / (4.0 * 0.3)).abs() < 1e-14);
        for kind in [ProfileKind::Uniform, ProfileKind::Parabolic] {
            let w = AxialWeight::new(kind, 0.3).unwrap();
            assert_eq!(w.value(0.0), 0.0);
            assert_eq!(w.value(0.6), 0.0);
        }
    }

    #[test]
    fn weights_are_normalised() {
        for kind in [ProfileKind::Uniform, ProfileKind::Parabolic] {
            let w = AxialWeight::new(kind, 1.7e-3).unwrap();
            let q = Adaptive::new(1e-13)
                .integrate(|u| w.value(u), 0.0, w.support())
                .unwrap();
            assert!((q.value - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_potential_is_unchanged() {
        let p = FnPotential::new("c", |_| -4.25);
        for kind in [ProfileKind::Uniform, ProfileKind::Parabolic] {
            let w = AxialWeight::new(kind, 0.01).unwrap();
            for z in [1e-5, 0.3, 7.0] {
                assert!((regularize(&p, &w, z).unwrap() + 4.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_cube_matches_closed_form() {
        let r: f64 = 0.002;
        let w = AxialWeight::new(ProfileKind::Uniform, r).unwrap();
        let p = FnPotential::new("z^-3", |z: f64| -z.powi(-3));
        for z in [1e-5, 3e-4, 0.01, 1.0] {
            let b = z + 2.0 * r;
            // ∫ u(2R-u)/(z+u)³ du written in s = z + u
            let exact = -(3.0 / (4.0 * r.powi(3)))
                * (-(b / z).ln() + (2.0 * r + 2.0 * z) * (1.0 / z - 1.0 / b)
                    - 0.5 * z * (2.0 * r + z) * (1.0 / (z * z) - 1.0 / (b * b)));
            let got = regularize(&p, &w, z).unwrap();
            assert!((got / exact - 1.0).abs() < 1e-6, "z={z}: {got} vs {exact}");
        }
    }

    #[test]
    fn small_radius_recovers_point_potential() {
        let p = FnPotential::new("z^-4", |z: f64| -z.powi(-4));
        let w = AxialWeight::new(ProfileKind::Parabolic, 1e-9).unwrap();
        let got = regularize(&p, &w, 0.5).unwrap();
        assert!((got / p.value(0.5) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn contact_behaviour_is_inverse_first_power() {
        let r = 1e-3;
        let w = AxialWeight::new(ProfileKind::Uniform, r).unwrap();
        let p = FnPotential::new("z^-3", |z: f64| -z.powi(-3));
        let e = crate::casimir::power_law_exponent(|z| regularize(&p, &w, z), r / 100.0).unwrap();
        assert!((e - 1.0).abs() < 0.15, "exponent {e}");
    }

    #[test]
    fn table_regularization() {
        let p = FnPotential::new("z^-3", |z: f64| -z.powi(-3));
        let t = crate::table::build_potential_table(&p, GridSpec::new(1e-5, 5.0, 300), 1e-6).unwrap();
        let w = AxialWeight::new(ProfileKind::Uniform, 1e-3).unwrap();
        let rt = regularize_table(&t, &w).unwrap();
        assert!(rt.z_max() <= 5.0 - 2e-3 + 1e-12);
        let z = 0.0123;
        assert!((rt.eval(z) / regularize(&p, &w, z).unwrap() - 1.0).abs() < 1e-4);
        let short = crate::table::build_potential_table(&p, GridSpec::new(1e-5, 1e-3, 50), 1e-6).unwrap();
        assert!(regularize_table(&short, &w).is_err());
        let c = PotentialTable::from_samples(vec![1e-3, 1.0, 2.0, 3.0], vec![2.0; 4]).unwrap();
        let rc = regularize_table(&c, &w).unwrap();
        assert!(rc.values.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn trap_moments_of_a_tiny_atom() {
        let w = AxialWeight::new(ProfileKind::Uniform, 1e-6).unwrap();
        let s = w.trap_smearing();
        assert!((s.cos_moment - 1.0).abs() < 1e-9);
        assert!((s.sin_moment - 2.0 * PI * 1e-6).abs() < 1e-9);
    }

    #[test]
    fn rejects_contact() {
        let p = FnPotential::new("z^-3", |z: f64| -z.powi(-3));
        let w = AxialWeight::new(ProfileKind::Uniform, 1e-3).unwrap();
        assert!(matches!(regularize(&p, &w, 0.0), Err(Error::Domain(_))));
        assert!(AxialWeight::new(ProfileKind::Uniform, 0.0).is_err());
    }
}
