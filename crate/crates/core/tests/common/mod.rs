//! Reference computations shared by the oracle and acceptance targets.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use surftrap_core::lattice::{assemble_hamiltonian, LatticeConfig};
use surftrap_core::polarizability::PolarizabilityModel;
use surftrap_core::units::SPEED_OF_LIGHT;

/// Full spectrum of the lattice Hamiltonian from a dense symmetric solver.
pub fn dense_spectrum(cfg: &LatticeConfig) -> Vec<f64> {
    let h = assemble_hamiltonian(cfg, &cfg.mesh()).unwrap();
    let n = h.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = h.diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = h.off[i];
            m[(i + 1, i)] = h.off[i];
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `ε(iξ)` for a Drude metal written out directly.
pub fn drude_eps(xi: f64, wp: f64, gamma: f64) -> f64 {
    1.0 + wp * wp / (xi * (xi + gamma))
}

/// Trapezoid rule in `(ln ξ, ln k)` over the raw wavenumber integral.
pub fn brute_force_vcp(z: f64, atom: &PolarizabilityModel, drude: Option<(f64, f64)>) -> f64 {
    let c = SPEED_OF_LIGHT;
    let hbar = atom.hbar;
    let w_lo = atom.lowest_frequency();
    let w_hi = atom
        .transitions
        .iter()
        .map(|t| t.energy / hbar)
        .fold(0.0, f64::max);
    let xi_c = c / (2.0 * z);
    let s_lo = (1e-10 * w_lo.min(xi_c)).ln();
    let s_hi = (60.0 * xi_c).min(1e8 * w_hi).ln();
    let u_lo = (1e-7 / z).ln();
    let u_hi = (45.0 / z).ln();
    let ns = 6000;
    let nu = 3000;
    let hs = (s_hi - s_lo) / ns as f64;
    let hu = (u_hi - u_lo) / nu as f64;
    let mut total = 0.0;
    for i in 0..=ns {
        let xi = (s_lo + i as f64 * hs).exp();
        let ws = if i == 0 || i == ns { 0.5 } else { 1.0 };
        let alpha = atom.alpha_volume(xi);
        let eps = drude.map(|(wp, g)| drude_eps(xi, wp, g));
        let mut inner = 0.0;
        for j in 0..=nu {
            let k = (u_lo + j as f64 * hu).exp();
            let wu = if j == 0 || j == nu { 0.5 } else { 1.0 };
            let kz = (xi * xi / (c * c) + k * k).sqrt();
            let (rte, rtm) = match eps {
                None => (-1.0, 1.0),
                Some(e) => {
                    let km = (e * xi * xi / (c * c) + k * k).sqrt();
                    ((kz - km) / (kz + km), (e * kz - km) / (e * kz + km))
                }
            };
            let f = k * (-2.0 * kz * z).exp() / (2.0 * kz)
                * (xi * xi * rte - (xi * xi + 2.0 * c * c * k * k) * rtm);
            inner += wu * f * k;
        }
        total += ws * xi * alpha * inner * hu;
    }
    hbar / (PI * c * c) * total * hs
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}
