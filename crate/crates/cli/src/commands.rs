//! The five subcommands. Each resolves its inputs from the config, runs the
//! core computation and writes CSV/JSON files plus the resolved config.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use surftrap_core::casimir::power_law_exponent;
use surftrap_core::corrections::{correction_table_from_states, point_table, well_center_comparison};
use surftrap_core::lattice::SpectrumRow;
use surftrap_core::regularization::{axial_weight, regularize, DensityProfile};
use surftrap_core::yukawa::{
    detectability_horizon, isotope_differential, lambda_grid, ExclusionContext, ExclusionSetup,
    YukawaParams, YukawaPotential,
};
use surftrap_core::{
    energy_differences, first_band, CasimirPolder, CorrectionSpec, EigenState, LatticeConfig,
    Potential,
};

use crate::cache::{bits, stage_key, EigenCache};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Provenance, Writer};

/// Bump when the cached representation or the solver output changes.
const SOLVER_REVISION: u32 = 1;

pub struct Context {
    pub cfg: RunConfig,
    pub out_dir: PathBuf,
    pub cache: EigenCache,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Self {
        let cache = if cfg.cache.enabled {
            EigenCache::new(Some(cfg.cache.directory.clone()))
        } else {
            EigenCache::disabled()
        };
        Self {
            out_dir: cfg.output.directory.clone(),
            cfg,
            cache,
        }
    }

    /// First-band states of a plain trap, through the cache.
    fn ladder(&self, config: &LatticeConfig, wells: usize) -> Result<Vec<EigenState>, CliError> {
        debug_assert!(config.extra_potential.is_none() && config.trap_smearing.is_none());
        #[derive(Serialize)]
        struct Stage {
            stage: &'static str,
            revision: u32,
            depth: String,
            gravity_step: String,
            z_max: String,
            mesh_points: usize,
            wells: usize,
        }
        let key = stage_key(&Stage {
            stage: "first_band",
            revision: SOLVER_REVISION,
            depth: bits(config.depth),
            gravity_step: bits(config.gravity_step),
            z_max: bits(config.z_max),
            mesh_points: config.mesh_points,
            wells,
        });
        let (states, _) = self.cache.get_or_compute(&key, || Ok(first_band(config, wells)?))?;
        Ok(states)
    }

    fn writer(&self, command: &str, data: Vec<crate::config::DataChecksum>) -> Result<Writer<'_>, CliError> {
        Writer::new(&self.out_dir, &self.cfg, Provenance::new(command, &self.cfg, data))
    }
}

#[derive(Serialize)]
struct SpectrumResults<'a> {
    recoil_frequency_hz: f64,
    gravity_step: f64,
    rows: &'a [SpectrumRow],
}

pub fn spectrum(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.cfg;
    let units = cfg.units()?;
    let lattice = cfg.lattice(&units);
    let states = ctx.ladder(&lattice, cfg.trap.wells + 1)?;
    let table = energy_differences(&states, &units)?;
    let mut w = ctx.writer("spectrum", Vec::new())?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), num(r.energy), num(r.delta), num(r.delta_hz)])
        .collect();
    w.csv(
        "spectrum.csv",
        &[
            format!("E_r/h = {} Hz, delta_g = {}", num(units.to_hz(1.0)), num(units.gravity_step)),
            "dE_n = E_(n+1) - E_n".into(),
        ],
        &["n", "E_n[E_r]", "dE_n[E_r]", "dE_n[Hz]"],
        &rows,
    )?;
    w.json(
        "spectrum.json",
        &SpectrumResults {
            recoil_frequency_hz: units.to_hz(1.0),
            gravity_step: units.gravity_step,
            rows: &table.rows,
        },
    )?;
    if cfg.wants("wavefunctions") {
        let mut sorted: Vec<&EigenState> = states.iter().collect();
        sorted.sort_by_key(|s| s.well_index);
        let n = sorted.first().map_or(0, |s| s.psi.len());
        let names: Vec<String> = std::iter::once("z[periods]".to_string())
            .chain(sorted.iter().map(|s| format!("psi_{}", s.well_index)))
            .collect();
        let cols: Vec<&str> = names.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = (0..n)
            .map(|i| {
                std::iter::once(num(sorted[0].z(i)))
                    .chain(sorted.iter().map(|s| num(s.psi[i])))
                    .collect()
            })
            .collect();
        w.table(
            "spectrum_states.csv",
            &["psi normalised so that sum psi^2 dz = 1".into()],
            &cols,
            &rows,
        )?;
    }
    w.config()?;
    Ok(w.written)
}

#[derive(Serialize)]
struct PotentialResults {
    surface: String,
    radius: f64,
    profile: String,
    first_well_minimum: bool,
    z: Vec<f64>,
    v_cp: Vec<f64>,
    v_reg: Vec<f64>,
    v_trap_plus_cp: Vec<f64>,
    v_yukawa: Vec<f64>,
    exponent_z_m: Vec<f64>,
    exponent: Vec<f64>,
}

/// True when `v` has an interior local minimum with `z` in `(a, b)`.
fn has_local_minimum(z: &[f64], v: &[f64], a: f64, b: f64) -> bool {
    (1..v.len().saturating_sub(1))
        .any(|i| z[i] > a && z[i] < b && v[i] < v[i - 1] && v[i] <= v[i + 1])
}

pub fn potential(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.cfg;
    let units = cfg.units()?;
    let lattice = cfg.lattice(&units);
    let (atom, atom_sum) = cfg.atom()?;
    let (surface, surf_sum) = cfg.surface()?;
    let cp = CasimirPolder::new(atom, surface.clone(), units)?;
    let (&radius, &profile) = cfg
        .atom_size
        .radii
        .first()
        .zip(cfg.atom_size.profiles.first())
        .ok_or_else(|| CliError::Config("atom_size needs a radius and a profile".into()))?;
    let weight = axial_weight(&DensityProfile::new(profile, radius), &units)?;
    let y = &cfg.yukawa;
    let hy = YukawaPotential::new(&YukawaParams::new(y.alpha, y.lambda, y.exponent_factor), &surface, &units)?;
    let table = point_table(&lattice, &cp)?;
    if cfg.potential.z_max + weight.support() > table.z_max() {
        return Err(CliError::Config(format!(
            "potential.z_max must stay below {}",
            table.z_max() - weight.support()
        )));
    }

    let p = &cfg.potential;
    let z: Vec<f64> = (0..p.points)
        .map(|i| p.z_min + (p.z_max - p.z_min) * i as f64 / (p.points - 1) as f64)
        .collect();
    let cols: Vec<Result<(f64, f64), CliError>> = z
        .par_iter()
        .map(|&zz| Ok((cp.value(zz)?, regularize(&table, &weight, zz)?)))
        .collect();
    let (v_cp, v_reg): (Vec<f64>, Vec<f64>) = cols.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().unzip();
    let v_trap: Vec<f64> = z.iter().map(|&zz| lattice.potential(zz)).collect();
    let v_sum: Vec<f64> = v_trap.iter().zip(&v_cp).map(|(a, b)| a + b).collect();
    let v_y: Vec<f64> = z.iter().map(|&zz| hy.value(zz)).collect();

    let (lo, hi) = (p.exponent_z_min.ln(), p.exponent_z_max.ln());
    let ez: Vec<f64> = (0..p.exponent_points)
        .map(|i| (lo + (hi - lo) * i as f64 / (p.exponent_points - 1) as f64).exp())
        .collect();
    let exps: Vec<Result<f64, CliError>> = ez
        .par_iter()
        .map(|&zm| Ok(power_law_exponent(|zp| cp.value(zp), units.meters_to_periods(zm))?))
        .collect();
    let exps = exps.into_iter().collect::<Result<Vec<_>, _>>()?;

    let first_well_minimum = has_local_minimum(&z, &v_sum, 0.5, 1.5);
    let mut data = vec![atom_sum];
    data.extend(surf_sum);
    let mut w = ctx.writer("potential", data)?;
    let rows: Vec<Vec<String>> = (0..z.len())
        .map(|i| {
            vec![
                num(z[i]),
                num(v_cp[i]),
                num(units.to_hz(v_cp[i])),
                num(v_reg[i]),
                num(units.to_hz(v_reg[i])),
                num(v_trap[i]),
                num(v_sum[i]),
                num(v_y[i]),
            ]
        })
        .collect();
    w.csv(
        "potential.csv",
        &[
            format!(
                "surface {}, atom radius {} m, {} profile",
                surface.label(),
                num(radius),
                profile.label()
            ),
            format!("local minimum of V_trap+V_CP in (0.5, 1.5): {first_well_minimum}"),
        ],
        &[
            "z[periods]",
            "V_CP[E_r]",
            "V_CP[Hz]",
            "V_reg[E_r]",
            "V_reg[Hz]",
            "V_trap[E_r]",
            "V_trap+V_CP[E_r]",
            "V_Y[E_r]",
        ],
        &rows,
    )?;
    let erows: Vec<Vec<String>> = ez
        .iter()
        .zip(&exps)
        .map(|(zm, e)| vec![num(*zm), num(units.meters_to_periods(*zm)), num(*e)])
        .collect();
    w.csv(
        "exponent.csv",
        &["exponent = -d ln|V_CP| / d ln z".into()],
        &["z[m]", "z[periods]", "exponent"],
        &erows,
    )?;
    w.json(
        "potential.json",
        &PotentialResults {
            surface: surface.label(),
            radius,
            profile: profile.label().into(),
            first_well_minimum,
            z,
            v_cp,
            v_reg,
            v_trap_plus_cp: v_sum,
            v_yukawa: v_y,
            exponent_z_m: ez,
            exponent: exps,
        },
    )?;
    w.config()?;
    Ok(w.written)
}

#[derive(Serialize)]
struct Mesh {
    depth: f64,
    z_max: f64,
    mesh_points: usize,
    spacing: f64,
}

#[derive(Serialize)]
struct CorrectionResults<'a> {
    mesh: Mesh,
    rows: &'a [surftrap_core::CorrectionRow],
    well_center: &'a [surftrap_core::corrections::WellCenterRow],
}

pub fn corrections(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.cfg;
    let units = cfg.units()?;
    let lattice = cfg.lattice(&units);
    let (atom, atom_sum) = cfg.atom()?;
    let (surface, surf_sum) = cfg.surface()?;
    let cp = CasimirPolder::new(atom, surface, units)?;
    let a = &cfg.atom_size;
    let spec = CorrectionSpec {
        wells: a.wells,
        radii: a.radii.clone(),
        profiles: a.profiles.clone(),
        regularize_trap: a.regularize_trap,
    };
    let states = ctx.ladder(&lattice, a.wells)?;
    let run = correction_table_from_states(&lattice, &cp, &spec, states)?;
    let center = well_center_comparison(&run.rows, &run.point_table, &units)?;

    let mut data = vec![atom_sum];
    data.extend(surf_sum);
    let mut w = ctx.writer("corrections", data)?;
    let rows: Vec<Vec<String>> = run
        .rows
        .iter()
        .map(|r| {
            vec![
                r.well.to_string(),
                num(r.radius),
                r.profile.label().into(),
                num(r.delta_e),
                num(r.delta_e_recoil),
                r.surface.clone(),
            ]
        })
        .collect();
    let mesh_note = format!(
        "U = {} E_r, z_f = {} periods, N = {}",
        num(lattice.depth),
        num(lattice.z_max),
        lattice.mesh_points
    );
    w.csv(
        "corrections.csv",
        std::slice::from_ref(&mesh_note),
        &["n", "R[m]", "profile", "dE_n[Hz]", "dE_n[E_r]", "surface"],
        &rows,
    )?;
    let crow: Vec<Vec<String>> = run
        .rows
        .iter()
        .zip(&center)
        .map(|(r, c)| {
            vec![
                c.well.to_string(),
                num(r.radius),
                r.profile.label().into(),
                num(c.delta_e),
                num(c.center),
                num(c.ratio),
            ]
        })
        .collect();
    w.csv(
        "well_center.csv",
        &[mesh_note, "ratio = |dE_n| / |V_CP(z = n)|".into()],
        &["n", "R[m]", "profile", "dE_n[Hz]", "V_CP(n)[Hz]", "ratio"],
        &crow,
    )?;
    w.json(
        "corrections.json",
        &CorrectionResults {
            mesh: Mesh {
                depth: lattice.depth,
                z_max: lattice.z_max,
                mesh_points: lattice.mesh_points,
                spacing: lattice.mesh().spacing,
            },
            rows: &run.rows,
            well_center: &center,
        },
    )?;
    w.config()?;
    Ok(w.written)
}

#[derive(Serialize)]
struct YukawaResults<'a> {
    params: YukawaParams,
    horizon: Option<usize>,
    exact: &'a [surftrap_core::yukawa::DifferentialRow],
    first_order: &'a [surftrap_core::yukawa::DifferentialRow],
}

pub fn yukawa(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.cfg;
    let y = &cfg.yukawa;
    let (surface, surf_sum) = cfg.surface()?;
    let params = YukawaParams::new(y.alpha, y.lambda, y.exponent_factor);
    let run = isotope_differential(&params, &surface, &cfg.pair()?, &cfg.yukawa_trap(), y.wells)?;
    let horizon = detectability_horizon(&run.exact, y.sensitivity);
    let mut w = ctx.writer("yukawa", surf_sum.into_iter().collect())?;
    let rows: Vec<Vec<String>> = run
        .exact
        .iter()
        .zip(&run.perturbative)
        .map(|(e, p)| vec![e.well.to_string(), num(e.d_e), num(p.d_e)])
        .collect();
    w.csv(
        "yukawa.csv",
        &[
            format!(
                "alpha_Y = {}, lambda_Y = {} m, exponent factor {}, isotopes {} - {}",
                num(y.alpha),
                num(y.lambda),
                y.exponent_factor,
                cfg.species.pair[0],
                cfg.species.pair[1]
            ),
            format!(
                "last well with |DE_n| >= {} Hz: {}",
                num(y.sensitivity),
                horizon.map_or("none".into(), |h| h.to_string())
            ),
        ],
        &["n", "DE_n_exact[Hz]", "DE_n_first_order[Hz]"],
        &rows,
    )?;
    w.json(
        "yukawa.json",
        &YukawaResults {
            params,
            horizon,
            exact: &run.exact,
            first_order: &run.perturbative,
        },
    )?;
    w.config()?;
    Ok(w.written)
}

pub fn exclusion(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.cfg;
    let y = &cfg.yukawa;
    let (surface, surf_sum) = cfg.surface()?;
    let setup = ExclusionSetup {
        pair: cfg.pair()?,
        trap: cfg.yukawa_trap(),
        surface,
        exponent_factor: y.exponent_factor,
        verify: y.verify,
    };
    let grid = lambda_grid(y.lambda_min, y.lambda_max, y.lambda_points);
    let xc = ExclusionContext::prepare(setup)?;
    let curves = y
        .scenarios
        .iter()
        .map(|s| xc.curve(*s, &grid, y.sensitivity))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = ctx.writer("exclusion", surf_sum.into_iter().collect())?;
    for c in &curves {
        let rows: Vec<Vec<String>> = c
            .points
            .iter()
            .map(|p| vec![num(p.lambda), num(p.alpha_limit)])
            .collect();
        let mut notes = vec![format!(
            "scenario {}, sensitivity {} Hz, exponent factor {}",
            c.scenario.label(),
            num(c.sensitivity),
            y.exponent_factor
        )];
        if !c.omitted.is_empty() {
            notes.push(format!(
                "omitted (vanishing signal): {}",
                c.omitted.iter().map(|l| num(*l)).collect::<Vec<_>>().join(" ")
            ));
        }
        w.csv(
            &format!("exclusion_{}.csv", c.scenario.label()),
            &notes,
            &["lambda_Y[m]", "alpha_Y_limit"],
            &rows,
        )?;
    }
    w.json("exclusion.json", &curves)?;
    w.config()?;
    Ok(w.written)
}
