//! Tabulated potentials with cubic-spline interpolation in log–log space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::potential::Potential;

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the nodes
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        ensure(n >= 2 && y.len() == n, || {
            "spline needs at least two nodes and matching lengths".into()
        })?;
        ensure(x.windows(2).all(|w| w[1] > w[0]), || {
            "spline abscissae must be strictly increasing".into()
        })?;
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the natural-spline moment equations
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().expect("non-empty"))
    }

    /// Evaluates inside the node range (clamped at the ends).
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|v| *v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// How the table interpolates between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    /// Spline of `ln|V|` against `ln z`; requires values of one strict sign.
    LogLog { negative: bool },
    /// Spline of `V` against `ln z`; used when values touch or cross zero.
    LogLinear,
}

/// Tabulated `z ↦ V` on a strictly increasing positive grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialTable {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub interpolation: Interpolation,
    spline: CubicSpline,
}

/// Log-spaced grid description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub z_min: f64,
    pub z_max: f64,
    pub nodes: usize,
}

impl GridSpec {
    pub fn new(z_min: f64, z_max: f64, nodes: usize) -> Self {
        Self {
            z_min,
            z_max,
            nodes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.z_min > 0.0 && self.z_max > self.z_min, || {
            format!("grid range ({}, {}) invalid", self.z_min, self.z_max)
        })?;
        ensure(self.nodes >= 2, || "grid needs at least two nodes".into())
    }

    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.z_min.ln(), self.z_max.ln());
        let n = self.nodes;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.z_max
                } else {
                    (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect()
    }
}

impl PotentialTable {
    pub fn from_samples(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        ensure(grid.len() == values.len() && grid.len() >= 2, || {
            "table needs at least two samples".into()
        })?;
        ensure(grid[0] > 0.0, || "table grid must be positive".into())?;
        ensure(values.iter().all(|v| v.is_finite()), || {
            "table values must be finite".into()
        })?;
        let lx: Vec<f64> = grid.iter().map(|z| z.ln()).collect();
        let all_neg = values.iter().all(|v| *v < 0.0);
        let all_pos = values.iter().all(|v| *v > 0.0);
        let (interpolation, ys) = if all_neg || all_pos {
            (
                Interpolation::LogLog { negative: all_neg },
                values.iter().map(|v| v.abs().ln()).collect(),
            )
        } else {
            (Interpolation::LogLinear, values.clone())
        };
        let spline = CubicSpline::new(lx, ys)?;
        Ok(Self {
            grid,
            values,
            interpolation,
            spline,
        })
    }

    pub fn z_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn z_max(&self) -> f64 {
        *self.grid.last().expect("non-empty")
    }

    pub fn covers(&self, z: f64) -> bool {
        z >= self.z_min() && z <= self.z_max()
    }

    /// Interpolated value; outside the grid the end segments are extended.
    pub fn eval(&self, z: f64) -> f64 {
        let s = self.spline.eval(z.ln());
        match self.interpolation {
            Interpolation::LogLog { negative: true } => -s.exp(),
            Interpolation::LogLog { negative: false } => s.exp(),
            Interpolation::LogLinear => s,
        }
    }

    /// Values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_samples(
            self.grid.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
    }
}

impl Potential for PotentialTable {
    fn value(&self, z: f64) -> f64 {
        self.eval(z)
    }
}

/// Tabulates `potential` on a log grid and checks the interpolation at the
/// midpoints of (a subset of) the intervals against direct evaluation.
pub fn build_potential_table<P: Potential + ?Sized>(
    potential: &P,
    spec: GridSpec,
    rel_tol: f64,
) -> Result<PotentialTable> {
    spec.validate()?;
    let grid = spec.points();
    let values = grid
        .par_iter()
        .map(|z| potential.value(*z))
        .collect::<Vec<_>>();
    let table = PotentialTable::from_samples(grid, values)?;
    verify_table(&table, |z| potential.value(z), rel_tol)?;
    Ok(table)
}

/// Fallible variant of [`build_potential_table`] for potentials whose
/// evaluation can fail (quadrature, domain errors).
pub fn try_build_potential_table<F>(f: F, spec: GridSpec, rel_tol: f64) -> Result<PotentialTable>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    let grid = spec.points();
    let values = grid.par_iter().map(|z| f(*z)).collect::<Result<Vec<_>>>()?;
    let table = PotentialTable::from_samples(grid, values)?;
    let probes = probe_points(&table);
    let direct = probes.par_iter().map(|z| f(*z)).collect::<Result<Vec<_>>>()?;
    check_probes(&table, &probes, &direct, rel_tol)?;
    Ok(table)
}

fn probe_points(table: &PotentialTable) -> Vec<f64> {
    let n = table.grid.len();
    let stride = (n / 40).max(1);
    (0..n - 1)
        .step_by(stride)
        .map(|i| (table.grid[i] * table.grid[i + 1]).sqrt())
        .collect()
}

fn verify_table<F: Fn(f64) -> f64 + Sync>(table: &PotentialTable, f: F, rel_tol: f64) -> Result<()> {
    let probes = probe_points(table);
    let direct: Vec<f64> = probes.par_iter().map(|z| f(*z)).collect();
    check_probes(table, &probes, &direct, rel_tol)
}

fn check_probes(table: &PotentialTable, probes: &[f64], direct: &[f64], rel_tol: f64) -> Result<()> {
    let scale = table.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (z, d) in probes.iter().zip(direct) {
        let t = table.eval(*z);
        let denom = match table.interpolation {
            Interpolation::LogLog { .. } => d.abs(),
            // values near zero: measure against the table scale
            Interpolation::LogLinear => d.abs().max(1e-12 * scale),
        };
        if denom > 0.0 && (t - d).abs() > rel_tol * denom {
            return Err(Error::Table(format!(
                "interpolation error {:.2e} at z = {z:.4e} exceeds {rel_tol:.1e}; use a denser grid",
                (t - d).abs() / denom
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::FnPotential;

    #[test]
    fn spline_reproduces_cubic_free_data() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let s = CubicSpline::new(x, y).unwrap();
        for t in [0.05, 0.77, 1.5, 2.69] {
            assert!((s.eval(t) - (2.0 * t - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_potential_is_exact() {
        let p = FnPotential::new("const", |_| -2.5);
        let t = build_potential_table(&p, GridSpec::new(1e-3, 10.0, 50), 1e-12).unwrap();
        for z in [1.1e-3, 0.37, 9.9] {
            assert_eq!(t.eval(z), -2.5);
        }
    }

    #[test]
    fn power_law_is_exact_in_log_log() {
        let p = FnPotential::new("z^-3", |z: f64| -0.7 * z.powi(-3));
        let t = build_potential_table(&p, GridSpec::new(1e-4, 100.0, 30), 1e-12).unwrap();
        for z in [2.2e-4f64, 0.013, 3.3, 77.0] {
            let exact = -0.7 * z.powi(-3);
            assert!(((t.eval(z) - exact) / exact).abs() < 1e-12);
        }
    }

    #[test]
    fn sparse_grid_fails_probe_check() {
        let p = FnPotential::new("wiggle", |z: f64| -(1.0 + 0.5 * (20.0 * z).sin()) / z);
        let err = build_potential_table(&p, GridSpec::new(0.01, 10.0, 12), 1e-4).unwrap_err();
        assert!(matches!(err, Error::Table(_)));
    }

    #[test]
    fn sign_changing_values_use_linear_mode() {
        let t = PotentialTable::from_samples(vec![1.0, 2.0, 3.0], vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(t.interpolation, Interpolation::LogLinear);
        assert_eq!(t.eval(2.5), 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(0.0, 1.0, 10).validate().is_err());
        assert!(GridSpec::new(2.0, 1.0, 10).validate().is_err());
        assert!(PotentialTable::from_samples(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
    }
}
