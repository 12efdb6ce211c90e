//! Quadrature rules: adaptive Gauss–Kronrod on finite intervals, Gauss–Laguerre
//! for exponentially weighted half-line integrals, and compensated summation.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod 15-point nodes (positive half) and weights; the Gauss 7-point rule
// uses the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration over `[a, b]`.
///
/// The interval is first split at `breaks` (points inside `(a, b)`), then the
/// panel with the largest error estimate is bisected until the total error
/// is below `max(abs_tol, rel_tol·|I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_panels: 2000,
        }
    }
}

impl Adaptive {
    pub fn new(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_with_breaks(f, a, b, &[])
    }

    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<Estimate> {
        if a == b {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
            });
        }
        let mut points = vec![a];
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut inner: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|x| *x > lo && *x < hi)
            .collect();
        inner.sort_by(f64::total_cmp);
        if a > b {
            inner.reverse();
        }
        points.extend(inner);
        points.push(b);

        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            let (value, error) = gk15(&mut f, w[0], w[1]);
            evaluations += 15;
            heap.push(Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
        loop {
            let (total, err) = totals(&heap);
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= tol {
                return Ok(Estimate {
                    value: total,
                    error: err,
                    evaluations,
                });
            }
            if heap.len() >= self.max_panels {
                return Err(Error::Quadrature {
                    estimate: total,
                    error: err,
                    requested: tol,
                });
            }
            let worst = heap.pop().expect("at least one panel");
            let mid = 0.5 * (worst.a + worst.b);
            if mid == worst.a || mid == worst.b {
                // panel at floating-point resolution; accept its estimate
                heap.push(Panel {
                    error: 0.0,
                    ..worst
                });
                continue;
            }
            let (v1, e1) = gk15(&mut f, worst.a, mid);
            let (v2, e2) = gk15(&mut f, mid, worst.b);
            evaluations += 30;
            heap.push(Panel {
                a: worst.a,
                b: mid,
                value: v1,
                error: e1,
            });
            heap.push(Panel {
                a: mid,
                b: worst.b,
                value: v2,
                error: e2,
            });
        }
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut value = NeumaierSum::default();
    let mut error = 0.0;
    for p in heap.iter() {
        value.add(p.value);
        error += p.error;
    }
    (value.sum(), error)
}

/// Compensated (Kahan–Babuška–Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Nodes and weights of the `n`-point Gauss–Laguerre rule,
/// `∫₀^∞ e^{-t} f(t) dt ≈ Σ w_i f(t_i)`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Laguerre rule needs at least one node");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n {
            // initial guesses from the classic asymptotic recipe
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
                }
            };
            let mut dp = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                let (p, d) = laguerre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() <= 1e-13 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            debug_assert!(converged, "Laguerre root {i} of {n} did not converge");
            let (_, d) = laguerre_with_derivative(n, z);
            dp = if converged { d } else { dp };
            // w_i = 1 / (t_i · L_n'(t_i)²)
            nodes.push(z);
            weights.push(1.0 / (z * dp * dp));
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(*t))
            .collect::<NeumaierSum>()
            .sum()
    }
}

/// Laguerre polynomial `L_n(x)` and its derivative.
fn laguerre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 1.0 - x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 - x) * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (p1 - p0) / x)
}

/// Fixed-order Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 1..n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                    p0 = p1;
                    p1 = p2;
                }
                let (p, pm1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
                dp = nf * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}
