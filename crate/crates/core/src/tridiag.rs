//! Selected eigenpairs of real symmetric tridiagonal matrices.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with partial pivoting. Only the requested part of the spectrum
//! is touched, so the cost is O(N) per eigenpair and per bisection step.

use rayon::prelude::*;

use crate::error::{ensure, Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    /// Present when the matrix is `c·(2, -1) + diag(V)`.
    pub stencil: Option<Stencil>,
}

/// Three-point stencil form: diagonal `2c + V_i`, off-diagonal `-c`.
///
/// Keeping `V` apart from the `2c` lets the Sturm count work with the
/// pivot offsets `q_i/c - 1`, whose rounding scales with `|V|` rather than
/// with `c`. For fine meshes `c` is many orders larger than the energies
/// of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub coupling: f64,
    pub potential: Vec<f64>,
}

/// Width of the shift batches used by the Sturm sweeps.
const LANES: usize = 8;

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        ensure(!diag.is_empty(), || "matrix must be non-empty".into())?;
        ensure(off.len() + 1 == diag.len(), || {
            format!(
                "off-diagonal length {} does not match dimension {}",
                off.len(),
                diag.len()
            )
        })?;
        ensure(
            diag.iter().chain(off.iter()).all(|v| v.is_finite()),
            || "matrix entries must be finite".into(),
        )?;
        Ok(Self {
            diag,
            off,
            stencil: None,
        })
    }

    /// `coupling·(2, -1) + diag(potential)`.
    pub fn stencil(coupling: f64, potential: Vec<f64>) -> Result<Self> {
        ensure(coupling.is_finite() && coupling > 0.0, || {
            format!("stencil coupling must be positive, got {coupling}")
        })?;
        let diag = potential.iter().map(|v| 2.0 * coupling + v).collect();
        let off = vec![-coupling; potential.len().saturating_sub(1)];
        let mut t = Self::new(diag, off)?;
        t.stencil = Some(Stencil {
            coupling,
            potential,
        });
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) * n as f64;
        (lo - pad, hi + pad)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
    }
}

/// Number of eigenvalues strictly below `shift`.
pub fn sturm_count(t: &SymTridiagonal, shift: f64) -> usize {
    let mut out = [0usize; 1];
    Counter::new(t).counts(&[shift], &mut out);
    out[0]
}

/// Precomputed data for repeated Sturm counts.
enum Counter<'a> {
    General { diag: &'a [f64], e2: Vec<f64> },
    Stencil { w: Vec<f64>, coupling: f64 },
}

impl<'a> Counter<'a> {
    fn new(t: &'a SymTridiagonal) -> Self {
        match &t.stencil {
            Some(st) => Counter::Stencil {
                w: st.potential.iter().map(|v| v / st.coupling).collect(),
                coupling: st.coupling,
            },
            None => Counter::General {
                diag: &t.diag,
                e2: t.off.iter().map(|e| e * e).collect(),
            },
        }
    }

    fn counts(&self, shifts: &[f64], out: &mut [usize]) {
        match self {
            Counter::General { diag, e2 } => sturm_counts(diag, e2, shifts, out),
            Counter::Stencil { w, coupling } => stencil_counts(w, *coupling, shifts, out),
        }
    }
}

/// Sturm counts for the stencil form.
///
/// With `r_i = q_i/c = 1 + s_i` the LDLᵀ recurrence becomes
/// `s_i = (w_i - σ/c) + s_{i-1}/(1 + s_{i-1})`, `w = V/c`, and a pivot is
/// negative when `s_i < -1`.
fn stencil_counts(w: &[f64], coupling: f64, shifts: &[f64], out: &mut [usize]) {
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    for (chunk, counts) in shifts.chunks(LANES).zip(out.chunks_mut(LANES)) {
        let m = chunk.len();
        let mut sig = [0.0; LANES];
        for l in 0..m {
            sig[l] = chunk[l] / coupling;
        }
        let mut s = [0.0; LANES];
        let mut c = [0usize; LANES];
        for l in 0..LANES {
            // r_0 = ∞, so the carried term is 1
            s[l] = (w[0] - sig[l]) + 1.0;
        }
        let mut prev = s;
        for l in 0..LANES {
            let mut r = 1.0 + prev[l];
            if r.abs() < tiny {
                r = -tiny;
                prev[l] = -1.0 - tiny;
            }
            c[l] = (r < 0.0) as usize;
            s[l] = prev[l] / r;
        }
        for &wi in &w[1..] {
            for l in 0..LANES {
                let v = (wi - sig[l]) + s[l];
                let mut r = 1.0 + v;
                let mut v2 = v;
                if r.abs() < tiny {
                    r = -tiny;
                    v2 = -1.0 - tiny;
                }
                c[l] += (r < 0.0) as usize;
                s[l] = v2 / r;
            }
        }
        counts.copy_from_slice(&c[..m]);
    }
}

/// Sturm counts for several shifts in one pass over the matrix.
///
/// The recurrences for different shifts are independent, so they are
/// interleaved in fixed-width batches.
fn sturm_counts(diag: &[f64], e2: &[f64], shifts: &[f64], out: &mut [usize]) {
    let pivmin = pivot_floor(diag, e2);
    for (chunk, counts) in shifts.chunks(LANES).zip(out.chunks_mut(LANES)) {
        let mut s = [0.0; LANES];
        let m = chunk.len();
        s[..m].copy_from_slice(chunk);
        let mut q = [0.0; LANES];
        let mut c = [0usize; LANES];
        for l in 0..LANES {
            q[l] = diag[0] - s[l];
            if q[l].abs() < pivmin {
                q[l] = -pivmin;
            }
            c[l] = (q[l] < 0.0) as usize;
        }
        for i in 1..diag.len() {
            let d = diag[i];
            let ee = e2[i - 1];
            for l in 0..LANES {
                let mut v = (d - s[l]) - ee / q[l];
                if v.abs() < pivmin {
                    v = -pivmin;
                }
                q[l] = v;
                c[l] += (v < 0.0) as usize;
            }
        }
        counts.copy_from_slice(&c[..m]);
    }
}

fn pivot_floor(diag: &[f64], e2: &[f64]) -> f64 {
    let emax = e2.iter().copied().fold(0.0, f64::max);
    f64::MIN_POSITIVE * emax.max(1.0) / f64::EPSILON
        + f64::MIN_POSITIVE * diag.iter().fold(0.0f64, |m, d| m.max(d.abs()))
}

/// Which eigenvalues to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    /// Zero-based index range `[first, last]` in ascending order.
    Indices(usize, usize),
    /// All eigenvalues in the half-open window `[lo, hi)`.
    Window(f64, f64),
}

/// Eigenvalues selected by `sel`, ascending, each bisected to full precision.
pub fn eigenvalues(t: &SymTridiagonal, sel: Selection) -> Result<Vec<f64>> {
    let counter = Counter::new(t);
    let (glo, ghi) = t.gershgorin();
    let (first, last) = match sel {
        Selection::Indices(a, b) => {
            ensure(a <= b && b < t.dim(), || {
                format!("index range [{a}, {b}] invalid for dimension {}", t.dim())
            })?;
            (a, b)
        }
        Selection::Window(lo, hi) => {
            ensure(lo < hi, || format!("empty energy window [{lo}, {hi})"))?;
            let mut c = [0usize; 2];
            counter.counts(&[lo, hi], &mut c);
            if c[1] == c[0] {
                return Ok(Vec::new());
            }
            (c[0], c[1] - 1)
        }
    };
    let count = last - first + 1;
    let mut lo = vec![glo; count];
    let mut hi = vec![ghi; count];
    if let Selection::Window(a, b) = sel {
        lo.iter_mut().for_each(|v| *v = a);
        hi.iter_mut().for_each(|v| *v = b);
    }

    let mut shifts = Vec::with_capacity(count);
    let mut active = Vec::with_capacity(count);
    let mut counts = Vec::with_capacity(count);
    for _sweep in 0..4096 {
        shifts.clear();
        active.clear();
        for j in 0..count {
            let mid = 0.5 * (lo[j] + hi[j]);
            let tol = 2.0 * f64::EPSILON * lo[j].abs().max(hi[j].abs()) + f64::MIN_POSITIVE;
            if hi[j] - lo[j] > tol && mid > lo[j] && mid < hi[j] {
                shifts.push(mid);
                active.push(j);
            }
        }
        if shifts.is_empty() {
            break;
        }
        counts.clear();
        counts.resize(shifts.len(), 0);
        // Batches run in parallel; each batch is one pass over the matrix.
        let batch = LANES;
        shifts
            .par_chunks(batch)
            .zip(counts.par_chunks_mut(batch))
            .for_each(|(s, c)| counter.counts(s, c));
        // every count constrains every target eigenvalue
        for (&mid, &cnt) in shifts.iter().zip(&counts) {
            for j in 0..count {
                let k = first + j;
                if cnt > k {
                    if mid < hi[j] {
                        hi[j] = mid;
                    }
                } else if mid > lo[j] {
                    lo[j] = mid;
                }
            }
        }
    }
    Ok(lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect())
}

/// Outcome of inverse iteration for one eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Unit Euclidean norm.
    pub vector: Vec<f64>,
    /// Set when the eigenvalue sits in a cluster tighter than the
    /// separation tolerance and the vector was explicitly orthogonalised.
    pub degenerate: bool,
}

/// Options for [`eigenpairs`].
#[derive(Debug, Clone, Copy)]
pub struct InverseIteration {
    pub max_iterations: usize,
    pub max_restarts: usize,
    /// Absolute eigenvalue separation below which vectors are orthogonalised
    /// against their cluster neighbours.
    pub cluster_tol: f64,
}

impl Default for InverseIteration {
    fn default() -> Self {
        Self {
            max_iterations: 8,
            max_restarts: 3,
            cluster_tol: 1e-9,
        }
    }
}

/// Eigenvectors for already-computed eigenvalues (ascending).
pub fn eigenvectors(
    t: &SymTridiagonal,
    values: &[f64],
    opts: InverseIteration,
) -> Result<Vec<Eigenpair>> {
    // Group into clusters; distinct clusters are independent tasks.
    let mut clusters: Vec<std::ops::Range<usize>> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len()
            || (values[i] - values[i - 1]).abs() > opts.cluster_tol * values[i].abs().max(1.0);
        if split {
            clusters.push(start..i);
            start = i;
        }
    }
    let results: Vec<Result<Vec<Eigenpair>>> = clusters
        .par_iter()
        .map(|range| {
            let mut done: Vec<Eigenpair> = Vec::with_capacity(range.len());
            let degenerate = range.len() > 1;
            for (pos, &lambda) in values[range.clone()].iter().enumerate() {
                let mut v = inverse_iterate(t, lambda, &done, pos as u64, opts)?;
                if let (Some(st), false) = (&t.stencil, degenerate) {
                    refine_stencil(t, st, lambda, &mut v);
                }
                done.push(Eigenpair {
                    value: lambda,
                    vector: v,
                    degenerate,
                });
            }
            Ok(done)
        })
        .collect();
    let mut out = Vec::with_capacity(values.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Convenience: eigenvalues then eigenvectors.
pub fn eigenpairs(t: &SymTridiagonal, sel: Selection) -> Result<Vec<Eigenpair>> {
    let values = eigenvalues(t, sel)?;
    eigenvectors(t, &values, InverseIteration::default())
}

fn inverse_iterate(
    t: &SymTridiagonal,
    lambda: f64,
    cluster: &[Eigenpair],
    seed: u64,
    opts: InverseIteration,
) -> Result<Vec<f64>> {
    let n = t.dim();
    let scale = t
        .diag
        .iter()
        .map(|d| d.abs())
        .chain(t.off.iter().map(|e| 2.0 * e.abs()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let lu = TridiagLu::factor(t, lambda, f64::EPSILON * scale);
    let mut rhs = vec![0.0; n];
    for restart in 0..=opts.max_restarts {
        fill_start_vector(&mut rhs, seed.wrapping_mul(7919).wrapping_add(restart as u64));
        orthogonalize(&mut rhs, cluster);
        normalize(&mut rhs);
        let mut prev = rhs.clone();
        for _ in 0..opts.max_iterations {
            let mut x = rhs.clone();
            lu.solve(&mut x);
            orthogonalize(&mut x, cluster);
            let growth = norm(&x);
            if !growth.is_finite() || growth == 0.0 {
                break;
            }
            x.iter_mut().for_each(|v| *v /= growth);
            let sign = if dot(&x, &prev) < 0.0 { -1.0 } else { 1.0 };
            let change = x
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - sign * b).powi(2))
                .sum::<f64>()
                .sqrt();
            prev.clone_from(&x);
            rhs = x;
            // a large growth factor means the start vector had a substantial
            // component along the wanted eigenvector
            if growth > 1e3 && change < 1e-10 {
                fix_sign(&mut rhs);
                return Ok(rhs);
            }
        }
        if opts.max_iterations > 0 && rhs.iter().all(|v| v.is_finite()) {
            let mut r = vec![0.0; n];
            t.matvec(&rhs, &mut r);
            let res = r
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if res <= 1e3 * f64::EPSILON * scale * (n as f64).sqrt() {
                fix_sign(&mut rhs);
                return Ok(rhs);
            }
        }
    }
    Err(Error::InverseIteration {
        eigenvalue: lambda,
        restarts: opts.max_restarts,
    })
}

/// `(T - λ)x` for the stencil form, with the kinetic part differenced so
/// that the `2c` diagonal never swamps `V`.
fn stencil_residual(st: &Stencil, lambda: f64, x: &[f64], r: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let left = if i > 0 { x[i - 1] } else { 0.0 };
        let right = if i + 1 < n { x[i + 1] } else { 0.0 };
        r[i] = st.coupling * ((x[i] - left) + (x[i] - right)) + (st.potential[i] - lambda) * x[i];
    }
}

/// Residual-correction sweeps `x ← x - (T - μ)⁻¹ r` with `μ` just below
/// `λ`. Components along other eigenvectors shrink by roughly
/// `(λ - μ)/gap` per sweep while the wanted direction is left alone. A sweep
/// is kept only if it lowers the residual.
fn refine_stencil(t: &SymTridiagonal, st: &Stencil, lambda: f64, x: &mut Vec<f64>) {
    let n = x.len();
    let scale = 4.0 * st.coupling + st.potential.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let offset = 1e3 * f64::EPSILON * scale;
    let lu = TridiagLu::factor(t, lambda - offset, f64::EPSILON * scale);
    let mut r = vec![0.0; n];
    stencil_residual(st, lambda, x, &mut r);
    let mut best = norm(&r);
    for _ in 0..3 {
        let mut d = r.clone();
        lu.solve(&mut d);
        if !d.iter().all(|v| v.is_finite()) {
            return;
        }
        let mut y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a - b).collect();
        normalize(&mut y);
        stencil_residual(st, lambda, &y, &mut r);
        let res = norm(&r);
        if !(res < 0.5 * best) {
            return;
        }
        best = res;
        fix_sign(&mut y);
        *x = y;
    }
}

/// Deterministic pseudo-random start vector.
fn fill_start_vector(v: &mut [f64], seed: u64) {
    let mut state = seed ^ 0x9E37_79B9_7F4A_7C15;
    for x in v.iter_mut() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        *x = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    }
}

fn orthogonalize(x: &mut [f64], against: &[Eigenpair]) {
    for p in against {
        let c = dot(x, &p.vector);
        x.iter_mut().zip(&p.vector).for_each(|(a, b)| *a -= c * b);
    }
}

/// Largest-magnitude component made positive, so results are reproducible.
fn fix_sign(x: &mut [f64]) {
    let (mut imax, mut vmax) = (0, 0.0);
    for (i, v) in x.iter().enumerate() {
        if v.abs() > vmax {
            vmax = v.abs();
            imax = i;
        }
    }
    if x[imax] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|v| *v /= n);
    }
}

/// LU factorisation of `T − λI` with partial pivoting; U has two
/// superdiagonals.
struct TridiagLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(t: &SymTridiagonal, lambda: f64, tiny: f64) -> Self {
        let n = t.dim();
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        // current row i holds (a, b, c) at columns (i, i+1, i+2)
        let mut a = t.diag[0] - lambda;
        let mut b = if n > 1 { t.off[0] } else { 0.0 };
        let mut c = 0.0;
        for i in 0..n.saturating_sub(1) {
            let sub = t.off[i];
            let next_diag = t.diag[i + 1] - lambda;
            let next_off = if i + 2 < n { t.off[i + 1] } else { 0.0 };
            if sub.abs() > a.abs() {
                // swap rows i and i+1
                swapped[i] = true;
                let m = a / sub;
                mult[i] = m;
                u0[i] = sub;
                u1[i] = next_diag;
                u2[i] = next_off;
                a = b - m * next_diag;
                b = c - m * next_off;
                c = 0.0;
            } else {
                if a == 0.0 {
                    a = tiny;
                }
                let m = sub / a;
                mult[i] = m;
                u0[i] = a;
                u1[i] = b;
                u2[i] = c;
                a = next_diag - m * b;
                b = next_off - m * c;
                c = 0.0;
            }
        }
        if a == 0.0 {
            a = tiny;
        }
        u0[n - 1] = a;
        Self {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.mult[i] * x[i];
        }
        let big = 1e150;
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= self.u2[i] * x[i + 2];
            }
            x[i] = v / self.u0[i];
            if x[i].abs() > big {
                // rescale to keep the iterate finite; only the direction matters
                let s = 1.0 / x[i].abs();
                x[i..].iter_mut().for_each(|y| *y *= s);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn stencil_counts_agree_with_general_counts() {
        let v: Vec<f64> = (0..300).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let st = SymTridiagonal::stencil(40.0, v.clone()).unwrap();
        let mut plain = st.clone();
        plain.stencil = None;
        for k in 0..60 {
            let shift = -5.0 + 3.1 * k as f64;
            assert_eq!(sturm_count(&st, shift), sturm_count(&plain, shift));
        }
        let a = eigenvalues(&st, Selection::Indices(0, 9)).unwrap();
        let b = eigenvalues(&plain, Selection::Indices(0, 9)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10 * x.abs().max(1.0));
        }
    }

    #[test]
    fn stencil_resolves_small_shifts_under_large_coupling() {
        // a constant potential shifts every eigenvalue by exactly that constant
        let n = 1000;
        let c = 1e8;
        let v0 = 1e-4;
        let base = eigenvalues(&SymTridiagonal::stencil(c, vec![0.0; n]).unwrap(), Selection::Indices(0, 2)).unwrap();
        let moved = eigenvalues(&SymTridiagonal::stencil(c, vec![v0; n]).unwrap(), Selection::Indices(0, 2)).unwrap();
        for (k, (a, b)) in base.iter().zip(&moved).enumerate() {
            let theta = (k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64;
            let exact = 4.0 * c * (0.5 * theta).sin().powi(2);
            assert!((a / exact - 1.0).abs() < 1e-12);
            assert!(((b - a) / v0 - 1.0).abs() < 1e-7, "shift {}", b - a);
        }
    }

    #[test]
    fn sturm_count_small_matrix() {
        let t = SymTridiagonal::new(vec![1.0, 3.0], vec![-1.0]).unwrap();
        assert_eq!(sturm_count(&t, 0.0), 0);
        assert_eq!(sturm_count(&t, 1.0), 1);
        assert_eq!(sturm_count(&t, 4.0), 2);
    }

    #[test]
    fn laplacian_eigenvalues_closed_form() {
        let n = 200;
        let t = laplacian(n);
        let vals = eigenvalues(&t, Selection::Indices(0, n - 1)).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0
                - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - exact).abs() < 1e-13, "k={k}: {v} vs {exact}");
        }
    }

    #[test]
    fn window_selection_matches_index_selection() {
        let t = laplacian(100);
        let all = eigenvalues(&t, Selection::Indices(0, 99)).unwrap();
        let win = eigenvalues(&t, Selection::Window(0.5, 1.5)).unwrap();
        let expected: Vec<f64> = all.iter().copied().filter(|v| *v >= 0.5 && *v < 1.5).collect();
        assert_eq!(win.len(), expected.len());
        for (a, b) in win.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(eigenvalues(&t, Selection::Window(10.0, 11.0)).unwrap().is_empty());
        assert!(eigenvalues(&t, Selection::Window(1.0, 1.0)).is_err());
    }

    #[test]
    fn eigenvectors_are_orthonormal_with_small_residual() {
        let n = 300;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.01 * (i as f64).sin()).collect();
        let t = SymTridiagonal::new(diag, vec![-1.0; n - 1]).unwrap();
        let pairs = eigenpairs(&t, Selection::Indices(0, 9)).unwrap();
        let mut y = vec![0.0; n];
        for (a, pa) in pairs.iter().enumerate() {
            t.matvec(&pa.vector, &mut y);
            let res: f64 = y
                .iter()
                .zip(&pa.vector)
                .map(|(u, v)| (u - pa.value * v).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-12, "residual {res}");
            for (b, pb) in pairs.iter().enumerate() {
                let d = dot(&pa.vector, &pb.vector);
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((d - target).abs() < 1e-10, "<{a}|{b}> = {d}");
            }
        }
    }

    #[test]
    fn exact_degeneracy_is_flagged_and_orthogonalised() {
        // direct sum of two identical blocks: every eigenvalue is doubled
        let mut off = vec![-1.0; 9];
        off[4] = 0.0;
        let t = SymTridiagonal::new(vec![2.0; 10], off).unwrap();
        let pairs = eigenpairs(&t, Selection::Indices(0, 1)).unwrap();
        assert!((pairs[0].value - pairs[1].value).abs() < 1e-14);
        assert!(pairs.iter().all(|p| p.degenerate));
        assert!(dot(&pairs[0].vector, &pairs[1].vector).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, f64::NAN], vec![0.0]).is_err());
        assert!(eigenvalues(&laplacian(5), Selection::Indices(3, 5)).is_err());
    }

    #[test]
    fn one_by_one() {
        let t = SymTridiagonal::new(vec![3.5], vec![]).unwrap();
        let p = eigenpairs(&t, Selection::Indices(0, 0)).unwrap();
        assert!((p[0].value - 3.5).abs() < 1e-15);
        assert!((p[0].vector[0].abs() - 1.0).abs() < 1e-15);
    }
}
