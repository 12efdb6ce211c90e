//! One-dimensional potentials in lattice units (z in periods, V in `E_r`).

use std::fmt;
use std::sync::Arc;

/// A real potential `z ↦ V(z)` on the half-line, in lattice units.
pub trait Potential: Send + Sync + fmt::Debug {
    fn value(&self, z: f64) -> f64;
}

/// Closure-backed potential, mostly for tests and ad-hoc runs.
pub struct FnPotential<F> {
    label: &'static str,
    f: F,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FnPotential<F> {
    pub fn new(label: &'static str, f: F) -> Self {
        Self { label, f }
    }
}

impl<F> fmt::Debug for FnPotential<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnPotential({})", self.label)
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> Potential for FnPotential<F> {
    fn value(&self, z: f64) -> f64 {
        (self.f)(z)
    }
}

/// Sum of several potentials.
#[derive(Debug, Clone, Default)]
pub struct SumPotential(pub Vec<Arc<dyn Potential>>);

impl Potential for SumPotential {
    fn value(&self, z: f64) -> f64 {
        self.0.iter().map(|p| p.value(z)).sum()
    }
}

/// Multiplies another potential by a constant.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub inner: Arc<dyn Potential>,
    pub factor: f64,
}

impl Potential for Scaled {
    fn value(&self, z: f64) -> f64 {
        self.factor * self.inner.value(z)
    }
}
