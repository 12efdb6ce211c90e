//! Physical and numerical invariants across modules.

use std::sync::OnceLock;

use proptest::prelude::*;
use surftrap_core::casimir::{
    power_law_exponent, vcp_finite_temperature, vcp_vdw, vcp_zero_temperature, CasimirPolder,
};
use surftrap_core::corrections::{correction_table, CorrectionSpec};
use surftrap_core::lattice::{
    energy_differences, first_band, reference_ws_state, residual, solve_band, BandSelection,
    EigenState, LatticeConfig,
};
use surftrap_core::polarizability::PolarizabilityModel;
use surftrap_core::regularization::{regularize, AxialWeight, ProfileKind};
use surftrap_core::surface::{PermittivityModel, SurfaceModel};
use surftrap_core::units::{make_units, LatticeUnits, PhysicalConstants, SpeciesData};
use surftrap_core::yukawa::{
    isotope_differential, newtonian_well_shift, IsotopePair, TrapSettings, YukawaParams,
};

const STEP: f64 = 0.070068;

fn units() -> LatticeUnits {
    make_units(&SpeciesData::rb87(), 532e-9, &PhysicalConstants::default()).unwrap()
}

fn rubidium() -> PolarizabilityModel {
    PolarizabilityModel::rubidium(&PhysicalConstants::default()).unwrap()
}

fn drude(plasma: f64) -> SurfaceModel {
    SurfaceModel {
        permittivity: PermittivityModel::Drude {
            plasma_frequency: plasma,
            damping: 5.32e13,
        },
        ..SurfaceModel::perfect_conductor()
    }
}

fn pc_potential() -> &'static CasimirPolder {
    static CP: OnceLock<CasimirPolder> = OnceLock::new();
    CP.get_or_init(|| {
        CasimirPolder::new(rubidium(), SurfaceModel::perfect_conductor(), units()).unwrap()
    })
}

// ---------------------------------------------------------------- lattice

#[test]
fn states_are_orthonormal_and_accurate() {
    let cfg = LatticeConfig::new(3.0, STEP, 30.0, 200_000);
    let states = solve_band(&cfg, BandSelection::Lowest(16)).unwrap();
    for (a, sa) in states.iter().enumerate() {
        assert!((sa.norm() - 1.0).abs() < 1e-10);
        let r = residual(&cfg, sa);
        assert!(r < 1e-8 * sa.energy.abs().max(1.0), "state {a}: residual {r:e}");
        for (b, sb) in states.iter().enumerate() {
            let o = sa.overlap(sb).unwrap() - if a == b { 1.0 } else { 0.0 };
            assert!(o.abs() < 1e-8, "<{a}|{b}> off by {o:e}");
        }
    }
}

#[test]
fn energies_converge_with_mesh() {
    let coarse = first_band(&LatticeConfig::new(3.0, STEP, 30.0, 200_000), 13).unwrap();
    let fine = first_band(&LatticeConfig::new(3.0, STEP, 30.0, 400_000), 13).unwrap();
    for (a, b) in coarse.iter().zip(&fine) {
        assert!((a.energy / b.energy - 1.0).abs() < 1e-4);
    }
}

#[test]
fn box_height_does_not_matter() {
    let low = first_band(&LatticeConfig::new(3.0, STEP, 30.0, 100_000), 13).unwrap();
    let high = first_band(&LatticeConfig::new(3.0, STEP, 40.0, 133_334), 13).unwrap();
    for (a, b) in low.iter().zip(&high) {
        assert_eq!(a.well_index, b.well_index);
        assert!((a.energy / b.energy - 1.0).abs() < 1e-6, "n={}", a.well_index);
    }
}

fn density_shift_distance(a: &EigenState, b: &EigenState, per_period: usize) -> f64 {
    // |ψ_a(z - 1)|² against |ψ_b(z)|²
    let mut s = 0.0;
    for i in 0..b.psi.len() {
        let pa = if i >= per_period { a.psi[i - per_period].powi(2) } else { 0.0 };
        s += (pa - b.psi[i].powi(2)).powi(2);
    }
    (s * b.spacing).sqrt()
}

#[test]
fn interior_states_are_quasi_periodic() {
    let per_period = 4000;
    let cfg = LatticeConfig::new(3.0, STEP, 30.0, 30 * per_period - 1);
    assert!((cfg.mesh().spacing * per_period as f64 - 1.0).abs() < 1e-12);
    let s = first_band(&cfg, 14).unwrap();
    for n in 10..14 {
        let d = density_shift_distance(&s[n - 1], &s[n], per_period);
        assert!(d < 1e-3, "wells {n}->{}: {d:e}", n + 1);
        let e = s[n].energy - s[n - 1].energy;
        assert!((e / STEP - 1.0).abs() < 1e-4);
    }
}

#[test]
fn deep_lattice_ground_state_is_nearly_harmonic() {
    let depth: f64 = 100.0;
    let cfg = LatticeConfig::new(depth, STEP, 30.0, 100_000);
    let s = solve_band(&cfg, BandSelection::Lowest(1)).unwrap();
    // well 1 bottom at z = 1; zero-point energy √U in recoil units
    let zero_point = s[0].energy - STEP;
    assert!((zero_point / depth.sqrt() - 1.0).abs() < 0.05, "{zero_point}");
}

#[test]
fn second_state_of_deeper_trap_is_localised() {
    let cfg = LatticeConfig::new(10.0, STEP, 30.0, 200_000);
    let s = first_band(&cfg, 12).unwrap();
    assert_eq!(s[1].well_index, 2);
    let p = s[1].probability_in(0.6, 6.0);
    assert!((p - 0.9997).abs() < 2e-4, "P = {p}");
    // the unmodified ladder state leaks past the wall, so it holds less
    let moved = reference_ws_state(&s[11], 2, &cfg).unwrap();
    assert!(moved.probability_in(0.6, 6.0) < p);
}

#[test]
fn constant_offset_leaves_differences_alone() {
    let u = units();
    let cfg = LatticeConfig::new(3.0, STEP, 30.0, 20_000);
    let s = first_band(&cfg, 5).unwrap();
    let shifted: Vec<EigenState> = s
        .iter()
        .cloned()
        .map(|mut x| {
            x.energy += 0.75;
            x
        })
        .collect();
    let a = energy_differences(&s, &u).unwrap();
    let b = energy_differences(&shifted, &u).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x.delta - y.delta).abs() < 1e-14);
        assert!(x.delta > 0.0);
    }
}

// ---------------------------------------------------------------- units

proptest! {
    #[test]
    fn hertz_conversion_is_additive(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        let u = units();
        let lhs = u.to_hz(a + b);
        let rhs = u.to_hz(a) + u.to_hz(b);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (u.to_hz(a).abs() + u.to_hz(b).abs()).max(1e-300));
    }
}

// ---------------------------------------------------------------- casimir

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn potential_is_attractive_and_decays(lz in -9.0f64..3.0) {
        let z = 10f64.powf(lz * 0.5);
        let u = units();
        let a = rubidium();
        for s in [SurfaceModel::perfect_conductor(), drude(1.37e16)] {
            let v1 = vcp_zero_temperature(z, &a, &s, &u).unwrap();
            let v2 = vcp_zero_temperature(z * 1.01, &a, &s, &u).unwrap();
            prop_assert!(v1 < 0.0 && v2 < 0.0);
            prop_assert!(v2.abs() < v1.abs());
        }
    }

    #[test]
    fn potential_is_linear_in_polarizability(s in 0.1f64..10.0, lz in -3.0f64..1.0) {
        let z = 10f64.powf(lz);
        let u = units();
        let a = rubidium();
        let pc = SurfaceModel::perfect_conductor();
        let v = vcp_zero_temperature(z, &a, &pc, &u).unwrap();
        let vs = vcp_zero_temperature(z, &a.scaled(s).unwrap(), &pc, &u).unwrap();
        prop_assert!((vs / (s * v) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn drude_approaches_perfect_conductor() {
    let u = units();
    let a = rubidium();
    let pc = SurfaceModel::perfect_conductor();
    for z in [0.01, 1.0, 10.0] {
        let target = vcp_zero_temperature(z, &a, &pc, &u).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..4 {
            let wp = 1.37e16 * 10f64.powi(k);
            let v = vcp_zero_temperature(z, &a, &drude(wp), &u).unwrap();
            let dev = (v / target - 1.0).abs();
            assert!(dev < last, "z={z}, ωp={wp:e}: {dev:e} !< {last:e}");
            last = dev;
        }
        assert!(last < 1e-2, "z={z}: {last:e}");
    }
}

#[test]
fn thermal_sum_reduces_to_zero_temperature() {
    let u = units();
    let a = rubidium();
    let pc = SurfaceModel::perfect_conductor();
    let cold = vcp_zero_temperature(1.0, &a, &pc, &u).unwrap();
    let warm = vcp_finite_temperature(1.0, &a, &pc, 2.0, &u).unwrap();
    assert!((warm / cold - 1.0).abs() < 1e-3, "{warm} vs {cold}");
    let room = vcp_finite_temperature(1.0, &a, &pc, 300.0, &u).unwrap();
    assert!(room < 0.0 && (room / cold - 1.0).abs() < 0.05);
}

#[test]
fn hot_far_regime_is_the_static_term() {
    let u = units();
    let k = PhysicalConstants::default();
    let a = rubidium();
    let pc = SurfaceModel::perfect_conductor();
    let t = 300.0;
    let z = 100.0; // 26.6 μm, well beyond the thermal wavelength
    let v = vcp_finite_temperature(z, &a, &pc, t, &u).unwrap();
    let zm = u.periods_to_meters(z);
    let static_term = -k.k_b * t * a.alpha_volume(0.0) / (4.0 * zm.powi(3));
    let n0 = u.joules_to_recoil(static_term);
    assert!((v / n0 - 1.0).abs() < 1e-3, "{v} vs {n0}");
    let v2 = vcp_finite_temperature(2.0 * z, &a, &pc, t, &u).unwrap();
    assert!((v / v2 - 8.0).abs() < 0.01);
}

#[test]
fn van_der_waals_overestimates_at_one_period() {
    let u = units();
    let a = rubidium();
    let pc = SurfaceModel::perfect_conductor();
    let full = vcp_zero_temperature(1.0, &a, &pc, &u).unwrap();
    let near = vcp_vdw(1.0, &a, &pc, &u).unwrap();
    assert!(near.abs() > full.abs());
    assert!((vcp_vdw(2.0, &a, &pc, &u).unwrap() * 8.0 / near - 1.0).abs() < 1e-12);
}

#[test]
fn exponent_moves_from_three_to_four() {
    let cp = pc_potential();
    let e_near = power_law_exponent(|z| cp.value(z), 1e-4).unwrap();
    let e_far = power_law_exponent(|z| cp.value(z), 50.0).unwrap();
    assert!((e_near - 3.0).abs() < 0.05, "{e_near}");
    assert!((e_far - 4.0).abs() < 0.02, "{e_far}");
}

// ---------------------------------------------------------------- regularization

#[test]
fn regularized_potential_properties() {
    let u = units();
    let cp = pc_potential();
    let v = |z: f64| cp.value(z).unwrap();
    let p = surftrap_core::potential::FnPotential::new("cp", v);
    let w = |kind, r: f64| AxialWeight::new(kind, u.meters_to_periods(r)).unwrap();
    for z in [0.5, 1.0, 3.0] {
        let a = regularize(&p, &w(ProfileKind::Uniform, 200e-12), z).unwrap();
        let b = regularize(&p, &w(ProfileKind::Parabolic, 200e-12), z).unwrap();
        assert!((a / b - 1.0).abs() < 0.02);
    }
    for kind in [ProfileKind::Uniform, ProfileKind::Parabolic] {
        for z in [1e-4, 1e-2, 0.5] {
            let small = regularize(&p, &w(kind, 200e-12), z).unwrap();
            let large = regularize(&p, &w(kind, 300e-12), z).unwrap();
            assert!(large.abs() < small.abs(), "{kind:?} z={z}");
        }
    }
    let r = w(ProfileKind::Uniform, 200e-12).radius;
    let e = power_law_exponent(|z| regularize(&p, &w(ProfileKind::Uniform, 200e-12), z), r / 100.0)
        .unwrap();
    assert!((e - 1.0).abs() < 0.15, "{e}");
}

// ---------------------------------------------------------------- corrections

#[test]
fn corrections_are_negative_and_decay() {
    let cfg = LatticeConfig::for_units(3.0, &units(), 30.0, 200_000);
    let spec = CorrectionSpec::standard();
    let run = correction_table(&cfg, pc_potential(), &spec).unwrap();
    for radius in &spec.radii {
        for profile in &spec.profiles {
            let col: Vec<f64> = run
                .rows
                .iter()
                .filter(|r| r.radius == *radius && r.profile == *profile)
                .map(|r| r.delta_e)
                .collect();
            assert_eq!(col.len(), 12);
            assert!(col.iter().all(|d| *d < 0.0));
            assert!(col.windows(2).all(|w| w[1].abs() < w[0].abs()));
        }
    }
    let spec1 = CorrectionSpec {
        wells: 1,
        ..CorrectionSpec::standard()
    };
    let fine = correction_table(&cfg.clone().with_mesh_points(400_000), pc_potential(), &spec1)
        .unwrap();
    assert!((fine.rows[0].delta_e / run.rows[0].delta_e - 1.0).abs() < 1e-3);
}

// ---------------------------------------------------------------- yukawa

fn rb_pair() -> IsotopePair {
    let k = PhysicalConstants::default();
    IsotopePair {
        light: make_units(&SpeciesData::rb85(), 532e-9, &k).unwrap(),
        heavy: make_units(&SpeciesData::rb87(), 532e-9, &k).unwrap(),
    }
}

#[test]
fn identical_species_cancel() {
    let heavy = rb_pair().heavy;
    let pair = IsotopePair {
        light: heavy,
        heavy,
    };
    let trap = TrapSettings {
        depth: 3.0,
        z_max: 30.0,
        mesh_points: 50_000,
    };
    let p = YukawaParams::new(3e10, 1e-6, 1.0);
    let run = isotope_differential(&p, &SurfaceModel::perfect_conductor(), &pair, &trap, 8).unwrap();
    for r in run.exact.iter().chain(&run.perturbative) {
        assert!(r.d_e.abs() < 1e-8, "well {}: {}", r.well, r.d_e);
    }
}

#[test]
fn yukawa_shift_is_linear_and_first_order_holds() {
    let trap = TrapSettings {
        depth: 3.0,
        z_max: 40.0,
        mesh_points: 100_000,
    };
    let pair = rb_pair();
    let s = SurfaceModel::perfect_conductor();
    let base = YukawaParams::new(3e10, 1e-6, 1.0);
    let a = isotope_differential(&base, &s, &pair, &trap, 6).unwrap();
    let b = isotope_differential(&base.with_alpha(6e10), &s, &pair, &trap, 6).unwrap();
    for (x, y) in a.perturbative.iter().zip(&b.perturbative) {
        assert!((y.d_e / (2.0 * x.d_e) - 1.0).abs() < 1e-9);
    }
    let cfg = trap.config(&pair.heavy);
    let spec = surftrap_core::yukawa::spectrum_with_yukawa(&cfg, &base, &s, &pair.heavy, 3).unwrap();
    let exact = spec.exact_shift(0);
    let pert = spec.perturbative_shift(0);
    assert!((exact / pert - 1.0).abs() < 0.01, "{exact} vs {pert}");
}

#[test]
fn newtonian_attraction_is_negligible() {
    let u = units();
    let v = newtonian_well_shift(&SurfaceModel::perfect_conductor(), &u, 0.02, 0.01, 2e-6).unwrap();
    assert!(v.abs() < 1e-6, "{v}");
}
