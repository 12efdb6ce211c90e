//! Tilted optical lattice bounded by a mirror at `z = 0`.
//!
//! The Hamiltonian in recoil units is
//! `-(1/π²) d²/dz² + δ_g z + (U/2)(1 - cos 2πz) + V_extra(z)` on `[0, z_max]`
//! with Dirichlet walls, discretised with the 3-point stencil.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::potential::Potential;
use crate::tridiag::{self, InverseIteration, Selection, SymTridiagonal};
use crate::units::LatticeUnits;

/// Smallest admissible number of interior mesh points.
pub const MIN_MESH_POINTS: usize = 100;
/// Mesh used for table reproduction.
pub const DEFAULT_MESH_POINTS: usize = 400_000;
/// Wells at and above this index are expected to sit at their well centre.
pub const INTERIOR_WELL: usize = 7;
/// Probability in the last two periods above which a state is marked as
/// squeezed by the upper box wall.
pub const EDGE_MASS_LIMIT: f64 = 1e-8;

/// Trap terms averaged over a finite atomic extent along `z`.
///
/// For a weight `w(u)` on `u ≥ 0`, the averaged trap is
/// `δ_g (z + mean) + (U/2)(1 - cos(2πz) C + sin(2πz) S)` with
/// `C = ∫w cos 2πu`, `S = ∫w sin 2πu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSmearing {
    pub mean_offset: f64,
    pub cos_moment: f64,
    pub sin_moment: f64,
}

impl TrapSmearing {
    pub fn identity() -> Self {
        Self {
            mean_offset: 0.0,
            cos_moment: 1.0,
            sin_moment: 0.0,
        }
    }
}

/// Everything that defines the discretised eigenproblem.
#[derive(Clone)]
pub struct LatticeConfig {
    /// Trap depth `U` in `E_r`.
    pub depth: f64,
    /// `δ_g`, the gravitational energy drop per period in `E_r`.
    pub gravity_step: f64,
    /// Box height `z_f` in periods.
    pub z_max: f64,
    /// Number of interior mesh points `N`.
    pub mesh_points: usize,
    pub extra_potential: Option<Arc<dyn Potential>>,
    pub trap_smearing: Option<TrapSmearing>,
}

impl fmt::Debug for LatticeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeConfig")
            .field("depth", &self.depth)
            .field("gravity_step", &self.gravity_step)
            .field("z_max", &self.z_max)
            .field("mesh_points", &self.mesh_points)
            .field("extra_potential", &self.extra_potential)
            .field("trap_smearing", &self.trap_smearing)
            .finish()
    }
}

impl LatticeConfig {
    pub fn new(depth: f64, gravity_step: f64, z_max: f64, mesh_points: usize) -> Self {
        Self {
            depth,
            gravity_step,
            z_max,
            mesh_points,
            extra_potential: None,
            trap_smearing: None,
        }
    }

    /// Config for a species: `δ_g` taken from the units.
    pub fn for_units(depth: f64, units: &LatticeUnits, z_max: f64, mesh_points: usize) -> Self {
        Self::new(depth, units.gravity_step, z_max, mesh_points)
    }

    pub fn with_extra_potential(mut self, p: Arc<dyn Potential>) -> Self {
        self.extra_potential = Some(p);
        self
    }

    pub fn with_trap_smearing(mut self, s: TrapSmearing) -> Self {
        self.trap_smearing = Some(s);
        self
    }

    pub fn with_mesh_points(mut self, n: usize) -> Self {
        self.mesh_points = n;
        self
    }

    pub fn with_z_max(mut self, z_max: f64) -> Self {
        self.z_max = z_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.depth.is_finite() && self.depth >= 0.0, || {
            format!("trap depth must be non-negative, got {}", self.depth)
        })?;
        ensure(self.gravity_step.is_finite() && self.gravity_step >= 0.0, || {
            format!("gravity step must be non-negative, got {}", self.gravity_step)
        })?;
        ensure(self.z_max.is_finite() && self.z_max > 0.0, || {
            format!("box height must be positive, got {}", self.z_max)
        })?;
        ensure(self.mesh_points >= MIN_MESH_POINTS, || {
            format!(
                "need at least {MIN_MESH_POINTS} mesh points, got {}",
                self.mesh_points
            )
        })
    }

    pub fn mesh(&self) -> Mesh {
        Mesh::new(self.z_max, self.mesh_points)
    }

    /// Trap plus optional extra term at `z`.
    pub fn potential(&self, z: f64) -> f64 {
        let trap = match self.trap_smearing {
            None => self.gravity_step * z + 0.5 * self.depth * (1.0 - (2.0 * PI * z).cos()),
            Some(s) => {
                let (sn, cs) = (2.0 * PI * z).sin_cos();
                self.gravity_step * (z + s.mean_offset)
                    + 0.5 * self.depth * (1.0 - cs * s.cos_moment + sn * s.sin_moment)
            }
        };
        match &self.extra_potential {
            Some(p) => trap + p.value(z),
            None => trap,
        }
    }
}

/// Uniform interior mesh `z_i = i δz`, `i = 1..=N`, with `δz = z_max/(N+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub z_max: f64,
    pub len: usize,
    pub spacing: f64,
}

impl Mesh {
    pub fn new(z_max: f64, len: usize) -> Self {
        Self {
            z_max,
            len,
            spacing: z_max / (len as f64 + 1.0),
        }
    }

    /// Position of the `i`-th interior point (zero-based).
    pub fn point(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.point(i)).collect()
    }
}

/// Kinetic coupling `1/(π² δz²)`.
pub fn kinetic_coefficient(spacing: f64) -> f64 {
    1.0 / (PI * PI * spacing * spacing)
}

/// The finite-difference Hamiltonian.
pub fn assemble_hamiltonian(config: &LatticeConfig, mesh: &Mesh) -> Result<SymTridiagonal> {
    config.validate()?;
    ensure(
        mesh.len == config.mesh_points && mesh.z_max == config.z_max,
        || "mesh does not belong to this lattice configuration".into(),
    )?;
    let c = kinetic_coefficient(mesh.spacing);
    let potential: Vec<f64> = (0..mesh.len)
        .into_par_iter()
        .map(|i| config.potential(mesh.point(i)))
        .collect();
    SymTridiagonal::stencil(c, potential)
}

/// One bound state sampled on a uniform grid `z_i = origin + i·spacing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenState {
    /// Energy in `E_r`.
    pub energy: f64,
    pub origin: f64,
    pub spacing: f64,
    /// Normalised so that `Σ ψ_i² δz = 1`.
    pub psi: Vec<f64>,
    pub well_index: usize,
    pub band_index: usize,
    /// `∫ z |ψ|²`.
    pub centroid: f64,
    /// Standard deviation of `z` under `|ψ|²`.
    pub spread: f64,
    /// Probability within two periods of the upper wall.
    pub edge_mass: f64,
    pub degenerate: bool,
    /// Probability that fell outside `[0, z_max]` after a translation.
    pub outside_mass: f64,
    pub outside_warning: bool,
}

impl EigenState {
    pub fn z(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|p| p * p).sum::<f64>() * self.spacing
    }

    /// `∫_a^b |ψ|²` by the sample sum.
    pub fn probability_in(&self, a: f64, b: f64) -> f64 {
        self.psi
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let z = self.z(*i);
                z >= a && z <= b
            })
            .map(|(_, p)| p * p)
            .sum::<f64>()
            * self.spacing
    }

    /// `Σ |ψ_i|² f(z_i) δz`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.psi
            .iter()
            .enumerate()
            .map(|(i, p)| p * p * f(self.z(i)))
            .sum::<f64>()
            * self.spacing
    }

    /// Mesh inner product with a state on the same grid.
    pub fn overlap(&self, other: &EigenState) -> Result<f64> {
        ensure(
            self.psi.len() == other.psi.len()
                && self.spacing == other.spacing
                && self.origin == other.origin,
            || "states live on different grids".into(),
        )?;
        Ok(self.psi.iter().zip(&other.psi).map(|(a, b)| a * b).sum::<f64>() * self.spacing)
    }

    pub fn is_first_band(&self) -> bool {
        self.band_index == 1
    }

    pub fn is_box_limited(&self) -> bool {
        self.edge_mass > EDGE_MASS_LIMIT
    }

    fn moments(&mut self, z_max: f64) {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        let mut edge = 0.0;
        for (i, p) in self.psi.iter().enumerate() {
            let z = self.origin + i as f64 * self.spacing;
            let w = p * p;
            m0 += w;
            m1 += w * z;
            m2 += w * z * z;
            if z > z_max - 2.0 {
                edge += w;
            }
        }
        self.centroid = m1 / m0;
        self.spread = (m2 / m0 - self.centroid * self.centroid).max(0.0).sqrt();
        self.edge_mass = edge * self.spacing;
    }
}

/// Which part of the spectrum to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandSelection {
    /// The `k` lowest eigenpairs.
    Lowest(usize),
    /// All eigenpairs with energy in `[lo, hi)`.
    Window(f64, f64),
}

/// Eigenpairs of the discretised Hamiltonian, labelled by well and band.
///
/// First-band states are numbered by their rank in the ladder when the
/// selection starts at the bottom of the spectrum, and by their centroid
/// otherwise.
pub fn solve_band(config: &LatticeConfig, sel: BandSelection) -> Result<Vec<EigenState>> {
    let mesh = config.mesh();
    let h = assemble_hamiltonian(config, &mesh)?;
    let (selection, first_rank) = match sel {
        BandSelection::Lowest(k) => {
            ensure(k >= 1, || "need at least one eigenpair".into())?;
            ensure(k <= mesh.len, || {
                format!("requested {k} eigenpairs from a {}-point mesh", mesh.len)
            })?;
            (Selection::Indices(0, k - 1), 0)
        }
        BandSelection::Window(lo, hi) => {
            ensure(lo < hi, || format!("empty energy window [{lo}, {hi})"))?;
            (Selection::Window(lo, hi), tridiag::sturm_count(&h, lo))
        }
    };
    let values = tridiag::eigenvalues(&h, selection)?;
    let pairs = tridiag::eigenvectors(&h, &values, InverseIteration::default())?;
    let scale = 1.0 / mesh.spacing.sqrt();
    let states: Vec<EigenState> = pairs
        .into_par_iter()
        .map(|p| {
            let mut s = EigenState {
                energy: p.value,
                origin: mesh.spacing,
                spacing: mesh.spacing,
                psi: p.vector.iter().map(|v| v * scale).collect(),
                well_index: 0,
                band_index: 0,
                centroid: 0.0,
                spread: 0.0,
                edge_mass: 0.0,
                degenerate: p.degenerate,
                outside_mass: 0.0,
                outside_warning: false,
            };
            s.moments(mesh.z_max);
            s
        })
        .collect();
    let edges = bloch_band_edges(config.depth, 8)?;
    label_states(states, config, &edges, first_rank)
}

/// The lowest `wells` first-band states, ordered by well index.
pub fn first_band(config: &LatticeConfig, wells: usize) -> Result<Vec<EigenState>> {
    ensure(wells >= 1, || "need at least one well".into())?;
    let mut k = wells + 4;
    loop {
        let k_eff = k.min(config.mesh_points);
        let states = solve_band(config, BandSelection::Lowest(k_eff))?;
        let ladder: Vec<EigenState> = states.into_iter().filter(|s| s.is_first_band()).collect();
        if ladder.len() >= wells {
            return Ok(ladder.into_iter().take(wells).collect());
        }
        if k_eff == config.mesh_points {
            return Err(Error::Labelling(format!(
                "only {} first-band states exist in this box, {wells} requested",
                ladder.len()
            )));
        }
        k *= 2;
    }
}

/// Relabels states as a contiguous bottom-of-spectrum set.
pub fn label_wells(states: Vec<EigenState>, config: &LatticeConfig) -> Result<Vec<EigenState>> {
    let edges = bloch_band_edges(config.depth, 8)?;
    label_states(states, config, &edges, 0)
}

fn label_states(
    mut states: Vec<EigenState>,
    config: &LatticeConfig,
    edges: &[(f64, f64)],
    first_rank: usize,
) -> Result<Vec<EigenState>> {
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut rank = 0;
    for s in states.iter_mut() {
        if !(s.centroid > 0.0 && s.centroid < config.z_max) {
            return Err(Error::Labelling(format!(
                "centroid {} of the state at E = {} lies outside the box",
                s.centroid, s.energy
            )));
        }
        let local = s.energy - config.gravity_step * s.centroid;
        s.band_index = band_of(local, edges);
        if s.band_index == 1 && first_rank > 0 {
            // window above the bottom: the global rank is unknown
            s.well_index = centroid_well(s.centroid)?;
        } else if s.band_index == 1 {
            rank += 1;
            s.well_index = rank;
            if rank >= INTERIOR_WELL
                && !s.is_box_limited()
                && (s.centroid - rank as f64).abs() >= 0.5
            {
                return Err(Error::Labelling(format!(
                    "state ranked as well {rank} has centroid {:.3}",
                    s.centroid
                )));
            }
        } else {
            s.well_index = centroid_well(s.centroid)?;
        }
    }
    Ok(states)
}

/// Band index from the local (gravity-removed) energy.
fn band_of(local: f64, edges: &[(f64, f64)]) -> usize {
    for b in 0..edges.len() - 1 {
        let gap_mid = 0.5 * (edges[b].1 + edges[b + 1].0);
        if local < gap_mid {
            return b + 1;
        }
    }
    edges.len()
}

/// Well whose centre is nearest to `centroid`, ties going to the lower well.
pub fn centroid_well(centroid: f64) -> Result<usize> {
    ensure(centroid.is_finite() && centroid > 0.0, || {
        format!("centroid {centroid} is not inside the box")
    })?;
    let lower = centroid.floor();
    let n = if centroid - lower > 0.5 { lower + 1.0 } else { lower };
    Ok((n as usize).max(1))
}

/// `(min, max)` of the lowest `bands` Bloch bands of `-(1/π²)∂² + (U/2)(1-cos 2πz)`.
pub fn bloch_band_edges(depth: f64, bands: usize) -> Result<Vec<(f64, f64)>> {
    ensure(depth >= 0.0, || "trap depth must be non-negative".into())?;
    ensure(bands >= 2, || "need at least two bands".into())?;
    let m = (bands + 24) as i64;
    let at = |kappa: f64| -> Result<Vec<f64>> {
        let diag: Vec<f64> = (-m..=m)
            .map(|j| {
                let q = j as f64 + kappa;
                4.0 * q * q + 0.5 * depth
            })
            .collect();
        let off = vec![-0.25 * depth; diag.len() - 1];
        let t = SymTridiagonal::new(diag, off)?;
        tridiag::eigenvalues(&t, Selection::Indices(0, bands - 1))
    };
    let centre = at(0.0)?;
    let edge = at(0.5)?;
    Ok(centre
        .iter()
        .zip(&edge)
        .map(|(a, b)| (a.min(*b), a.max(*b)))
        .collect())
}

/// `‖Hψ - Eψ‖/‖ψ‖` with the kinetic term evaluated in differenced form.
pub fn residual(config: &LatticeConfig, state: &EigenState) -> f64 {
    let mesh = config.mesh();
    let c = kinetic_coefficient(mesh.spacing);
    let psi = &state.psi;
    let n = psi.len();
    let mut r2 = 0.0;
    let mut p2 = 0.0;
    for i in 0..n {
        let left = if i > 0 { psi[i - 1] } else { 0.0 };
        let right = if i + 1 < n { psi[i + 1] } else { 0.0 };
        let r = c * ((psi[i] - left) + (psi[i] - right))
            + (config.potential(mesh.point(i)) - state.energy) * psi[i];
        r2 += r * r;
        p2 += psi[i] * psi[i];
    }
    (r2 / p2).sqrt()
}

/// One row of a ladder spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub energy: f64,
    pub delta: f64,
    pub delta_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
}

/// `δE_n = E_{n+1} - E_n` for consecutive wells; one row fewer than states.
pub fn energy_differences(states: &[EigenState], units: &LatticeUnits) -> Result<SpectrumTable> {
    ensure(states.len() >= 2, || "need at least two states".into())?;
    let mut sorted: Vec<&EigenState> = states.iter().collect();
    sorted.sort_by_key(|s| s.well_index);
    let missing: Vec<usize> = sorted
        .windows(2)
        .flat_map(|w| w[0].well_index + 1..w[1].well_index)
        .collect();
    if !missing.is_empty() {
        return Err(Error::Labelling(format!("missing wells {missing:?}")));
    }
    if let Some(w) = sorted.windows(2).find(|w| w[0].well_index == w[1].well_index) {
        return Err(Error::Labelling(format!(
            "well {} appears twice",
            w[0].well_index
        )));
    }
    let rows = sorted
        .windows(2)
        .map(|w| {
            let delta = w[1].energy - w[0].energy;
            SpectrumRow {
                n: w[0].well_index,
                energy: w[0].energy,
                delta,
                delta_hz: units.to_hz(delta),
            }
        })
        .collect();
    Ok(SpectrumTable { rows })
}

/// Translates an interior state by `target - source` wells.
pub fn reference_ws_state(
    interior: &EigenState,
    target_well: usize,
    config: &LatticeConfig,
) -> Result<EigenState> {
    ensure(interior.well_index >= 10, || {
        format!(
            "translation needs an interior state (well >= 10), got well {}",
            interior.well_index
        )
    })?;
    ensure(target_well >= 1, || "target well must be >= 1".into())?;
    let shift = target_well as f64 - interior.well_index as f64;
    let mut out = interior.clone();
    out.origin += shift;
    out.energy += shift * config.gravity_step;
    out.well_index = target_well;
    out.centroid += shift;
    let outside: f64 = out
        .psi
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let z = out.origin + *i as f64 * out.spacing;
            z <= 0.0 || z >= config.z_max
        })
        .map(|(_, p)| p * p)
        .sum::<f64>()
        * out.spacing;
    out.outside_mass = outside;
    out.outside_warning = outside > 1e-6;
    if out.outside_warning {
        log::warn!(
            "translated state for well {target_well} has {outside:.2e} of its norm outside the box"
        );
    }
    out.edge_mass = 0.0;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_box(n: usize) -> LatticeConfig {
        LatticeConfig::new(0.0, 0.0, 30.0, n)
    }

    #[test]
    fn barrier_top_value() {
        let c = LatticeConfig::new(3.0, 0.0, 30.0, 1000);
        assert!((c.potential(0.5) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn free_particle_operator_has_constant_diagonal() {
        let c = free_box(500);
        let h = assemble_hamiltonian(&c, &c.mesh()).unwrap();
        let k = kinetic_coefficient(c.mesh().spacing);
        assert!(h.diag.iter().all(|d| (d - 2.0 * k).abs() < 1e-9 * k));
        assert!(h.off.iter().all(|e| *e == -k));
    }

    #[test]
    fn box_levels_approach_k_squared_over_zf_squared() {
        let c = free_box(20_000);
        let states = solve_band(&c, BandSelection::Lowest(3)).unwrap();
        for (k, s) in states.iter().enumerate() {
            let exact = ((k + 1) as f64 / 30.0).powi(2);
            assert!((s.energy - exact).abs() / exact < 1e-6, "{} vs {exact}", s.energy);
        }
        assert!((states[0].energy - 1.0 / 900.0).abs() < 1e-8);
    }

    #[test]
    fn states_are_normalised_and_orthogonal() {
        let c = LatticeConfig::new(3.0, 0.070068, 30.0, 20_000);
        let s = solve_band(&c, BandSelection::Lowest(6)).unwrap();
        for a in &s {
            assert!((a.norm() - 1.0).abs() < 1e-10);
            for b in &s {
                let o = a.overlap(b).unwrap();
                let want = if a.energy == b.energy { 1.0 } else { 0.0 };
                assert!((o - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn residual_is_small_on_a_moderate_mesh() {
        let c = LatticeConfig::new(3.0, 0.070068, 30.0, 50_000);
        for s in solve_band(&c, BandSelection::Lowest(5)).unwrap() {
            assert!(residual(&c, &s) < 1e-8 * s.energy.abs().max(1.0));
        }
    }

    #[test]
    fn lowest_state_is_well_one_and_ladder_is_ordered() {
        let c = LatticeConfig::new(3.0, 0.070068, 30.0, 20_000);
        let s = first_band(&c, 12).unwrap();
        assert_eq!(s[0].well_index, 1);
        for (i, st) in s.iter().enumerate() {
            assert_eq!(st.well_index, i + 1);
            assert_eq!(st.band_index, 1);
        }
        assert!(s.windows(2).all(|w| w[1].energy > w[0].energy));
    }

    #[test]
    fn window_selection_matches_lowest() {
        let c = LatticeConfig::new(3.0, 0.070068, 30.0, 10_000);
        let low = solve_band(&c, BandSelection::Lowest(10)).unwrap();
        let win = solve_band(&c, BandSelection::Window(low[4].energy - 1e-9, low[9].energy + 1e-9))
            .unwrap();
        assert_eq!(win.len(), 6);
        for (a, b) in win.iter().zip(&low[4..]) {
            assert!((a.energy - b.energy).abs() < 1e-13);
            assert_eq!(a.well_index, b.well_index);
        }
    }

    #[test]
    fn centroid_rounding_breaks_ties_downward() {
        assert_eq!(centroid_well(10.2).unwrap(), 10);
        assert_eq!(centroid_well(9.7).unwrap(), 10);
        assert_eq!(centroid_well(10.5).unwrap(), 10);
        assert_eq!(centroid_well(0.3).unwrap(), 1);
        assert!(centroid_well(-1.0).is_err());
    }

    #[test]
    fn free_bands_touch_at_the_zone_edge() {
        let e = bloch_band_edges(0.0, 3).unwrap();
        assert!((e[0].0 - 0.0).abs() < 1e-12 && (e[0].1 - 1.0).abs() < 1e-12);
        assert!((e[1].0 - 1.0).abs() < 1e-12 && (e[1].1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_spectrum_gives_same_differences() {
        let units = crate::units::make_units(
            &crate::units::SpeciesData::rb87(),
            532e-9,
            &crate::units::PhysicalConstants::default(),
        )
        .unwrap();
        let c = LatticeConfig::new(3.0, 0.070068, 30.0, 5_000);
        let s = first_band(&c, 5).unwrap();
        let mut shifted = s.clone();
        shifted.iter_mut().for_each(|x| x.energy += 3.25);
        let a = energy_differences(&s, &units).unwrap();
        let b = energy_differences(&shifted, &units).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x.delta - y.delta).abs() < 1e-12);
        }
        let mut gap = s.clone();
        gap.remove(2);
        assert!(matches!(energy_differences(&gap, &units), Err(Error::Labelling(_))));
    }

    #[test]
    fn translation_moves_energy_by_gravity_step() {
        let c = LatticeConfig::new(3.0, 0.070068, 30.0, 10_000);
        let s = first_band(&c, 12).unwrap();
        let src = &s[10];
        let same = reference_ws_state(src, src.well_index, &c).unwrap();
        assert_eq!(same.psi, src.psi);
        assert_eq!(same.energy, src.energy);
        let up = reference_ws_state(src, src.well_index + 1, &c).unwrap();
        assert!((up.energy - src.energy - 0.070068).abs() < 1e-14);
        let down = reference_ws_state(src, 1, &c).unwrap();
        assert!(down.outside_warning);
        assert!(reference_ws_state(&s[2], 5, &c).is_err());
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(LatticeConfig::new(-1.0, 0.0, 30.0, 1000).validate().is_err());
        assert!(LatticeConfig::new(1.0, 0.0, 0.0, 1000).validate().is_err());
        assert!(LatticeConfig::new(1.0, 0.0, 30.0, 99).validate().is_err());
        let c = LatticeConfig::new(1.0, 0.0, 30.0, 1000);
        assert!(assemble_hamiltonian(&c, &Mesh::new(30.0, 999)).is_err());
    }
}
