//! The N-particle dimer `H = 2εL_z + 2vL_x + 2cL_z²` in the Schwinger
//! representation, `L = N/2`. Basis state `k` is `|n₁ = k, n₂ = N − k⟩` with
//! `L_z = k − N/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::meanfield::{self, IntegrateOptions, ModelParams};
use crate::tridiag::{eigh_tridiagonal, TridiagEigen};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    pub epsilon: f64,
    pub v: f64,
    /// Interaction per pair.
    pub c: f64,
    pub n_particles: usize,
}

impl QuantumParams {
    pub fn new(epsilon: f64, v: f64, c: f64, n_particles: usize) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::domain("need at least one particle"));
        }
        if !(epsilon.is_finite() && v.is_finite() && c.is_finite()) {
            return Err(Error::domain("parameters must be finite"));
        }
        Ok(Self { epsilon, v, c, n_particles })
    }

    /// From the macroscopic interaction `g = cN`.
    pub fn with_g(epsilon: f64, v: f64, g: f64, n_particles: usize) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::domain("need at least one particle"));
        }
        Self::new(epsilon, v, g / n_particles as f64, n_particles)
    }

    pub fn g(&self) -> f64 {
        self.c * self.n_particles as f64
    }

    pub fn dim(&self) -> usize {
        self.n_particles + 1
    }

    /// Mean-field parameters with `g = cN`.
    pub fn mean_field(&self) -> Result<ModelParams> {
        ModelParams::new(self.epsilon, self.v, self.g())
    }
}

/// `m_k = k − N/2`.
fn lz(k: usize, n: usize) -> f64 {
    k as f64 - 0.5 * n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalHamiltonian {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn build(params: &QuantumParams) -> Self {
        let n = params.n_particles;
        let l = 0.5 * n as f64;
        let diag = (0..=n)
            .map(|k| {
                let m = lz(k, n);
                2.0 * params.epsilon * m + 2.0 * params.c * m * m
            })
            .collect();
        let offdiag = (0..n).map(|k| params.v * (l * (l + 1.0) - lz(k, n) * lz(k + 1, n)).sqrt()).collect();
        Self { diag, offdiag }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut y = self.diag[k] * x[k];
                if k > 0 {
                    y += self.offdiag[k - 1] * x[k - 1];
                }
                if k + 1 < n {
                    y += self.offdiag[k] * x[k + 1];
                }
                y
            })
            .collect()
    }

    /// Max absolute row sum, an upper bound on the spectral norm.
    pub fn norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut s = self.diag[k].abs();
                if k > 0 {
                    s += self.offdiag[k - 1].abs();
                }
                if k + 1 < n {
                    s += self.offdiag[k].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }
}

pub fn build_hamiltonian(params: &QuantumParams) -> TridiagonalHamiltonian {
    TridiagonalHamiltonian::build(params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub n_particles: usize,
    /// Ascending.
    pub energies: Vec<f64>,
    eig: TridiagEigen,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn eigenvector(&self, n: usize) -> &[f64] {
        self.eig.vector(n)
    }

    pub fn state(&self, n: usize) -> Vec<Complex64> {
        self.eigenvector(n).iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    pub fn energies_per_particle(&self) -> Vec<f64> {
        let n = self.n_particles as f64;
        self.energies.iter().map(|e| e / n).collect()
    }

    /// `‖Hx − Ex‖` for eigenpair `n`.
    pub fn residual(&self, h: &TridiagonalHamiltonian, n: usize) -> f64 {
        let x = self.eigenvector(n);
        let e = self.energies[n];
        h.matvec(x).iter().zip(x).map(|(hx, xi)| (hx - e * xi).powi(2)).sum::<f64>().sqrt()
    }

    /// Overlap of eigenvector `n` with its image under `k → N − k`; ±1 for a
    /// parity eigenstate.
    pub fn parity(&self, n: usize) -> f64 {
        let x = self.eigenvector(n);
        x.iter().zip(x.iter().rev()).map(|(a, b)| a * b).sum()
    }

    pub fn max_orthonormality_error(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .into_par_iter()
            .map(|i| {
                let vi = self.eigenvector(i);
                (0..=i)
                    .map(|j| {
                        let dot: f64 = vi.iter().zip(self.eigenvector(j)).map(|(a, b)| a * b).sum();
                        (dot - if i == j { 1.0 } else { 0.0 }).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

impl TridiagonalHamiltonian {
    /// True when H commutes with the reflection `k → N − k` (ε = 0).
    pub fn is_reflection_symmetric(&self) -> bool {
        let n = self.dim() - 1;
        let tol = 1e-14 * self.norm().max(1.0);
        (0..=n).all(|k| (self.diag[k] - self.diag[n - k]).abs() <= tol)
            && (0..n).all(|k| (self.offdiag[k] - self.offdiag[n - 1 - k]).abs() <= tol)
    }

    /// Even (+) and odd (−) blocks in the basis `(|k⟩ ± |N − k⟩)/√2`,
    /// `k < N/2`, plus `|N/2⟩` in the even block for even N. Both are
    /// tridiagonal.
    fn parity_blocks(&self) -> [(Vec<f64>, Vec<f64>); 2] {
        let n = self.dim() - 1;
        let half = n.div_ceil(2); // pairs
        let mut blocks = [(Vec::new(), Vec::new()), (Vec::new(), Vec::new())];
        for (b, sign) in [(0, 1.0), (1, -1.0)] {
            let (d, e) = &mut blocks[b];
            d.extend_from_slice(&self.diag[..half]);
            e.extend_from_slice(&self.offdiag[..half.saturating_sub(1)]);
            if n % 2 == 1 {
                // |k⟩ and |N − k⟩ are neighbours in the last pair
                d[half - 1] += sign * self.offdiag[half - 1];
            } else if b == 0 {
                d.push(self.diag[half]);
                e.push(std::f64::consts::SQRT_2 * self.offdiag[half - 1]);
            }
        }
        blocks
    }
}

fn sector_eigensystem(h: &TridiagonalHamiltonian, want_vectors: bool) -> Result<TridiagEigen> {
    let n = h.dim() - 1;
    let d = n + 1;
    let half = n.div_ceil(2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(d);
    for (b, (bd, be)) in h.parity_blocks().into_iter().enumerate() {
        let sign = if b == 0 { 1.0 } else { -1.0 };
        let eig = eigh_tridiagonal(&bd, &be, want_vectors)?;
        for j in 0..eig.dim() {
            let mut full = Vec::new();
            if want_vectors {
                let u = eig.vector(j);
                full = vec![0.0; d];
                for k in 0..half {
                    full[k] = s * u[k];
                    full[n - k] = sign * s * u[k];
                }
                if u.len() > half {
                    full[half] = u[half];
                }
            }
            pairs.push((eig.values[j], full));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = if want_vectors { pairs.into_iter().flat_map(|p| p.1).collect() } else { Vec::new() };
    Ok(TridiagEigen { values, vectors })
}

fn solve(h: &TridiagonalHamiltonian, want_vectors: bool) -> Result<TridiagEigen> {
    if h.dim() > 2 && h.is_reflection_symmetric() {
        sector_eigensystem(h, want_vectors)
    } else {
        eigh_tridiagonal(&h.diag, &h.offdiag, want_vectors)
    }
}

/// Full eigendecomposition. Reflection-symmetric Hamiltonians are split into
/// parity sectors first, so eigenvectors of the near-degenerate self-trapped
/// doublets come out with definite parity even when the splitting is below
/// rounding.
pub fn eigensystem(h: &TridiagonalHamiltonian) -> Result<Spectrum> {
    let eig = solve(h, true)?;
    Ok(Spectrum { n_particles: h.dim() - 1, energies: eig.values.clone(), eig })
}

/// Eigenvalues only (ascending).
pub fn eigenvalues(h: &TridiagonalHamiltonian) -> Result<Vec<f64>> {
    Ok(solve(h, false)?.values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityBin {
    pub e_lo: f64,
    pub e_hi: f64,
    pub e_center: f64,
    pub count: usize,
    /// `count / width`.
    pub rho: f64,
}

/// Histogram of `values` over `[lo, hi]` in `n_bins` equal boxes; the last
/// box is closed on the right.
pub fn histogram(values: &[f64], n_bins: usize, lo: f64, hi: f64) -> Result<Vec<DensityBin>> {
    if n_bins < 2 {
        return Err(Error::domain(format!("need at least 2 bins, got {n_bins}")));
    }
    if !(hi > lo) {
        return Err(Error::domain(format!("empty histogram range [{lo}, {hi}]")));
    }
    let w = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &x in values {
        if x < lo || x > hi {
            continue;
        }
        let b = (((x - lo) / w) as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let e_lo = lo + i as f64 * w;
            DensityBin { e_lo, e_hi: e_lo + w, e_center: e_lo + 0.5 * w, count, rho: count as f64 / w }
        })
        .collect())
}

/// Level density `Δn/Δ(E/N)` over the spectrum's own range.
pub fn level_density(spec: &Spectrum, n_bins: usize) -> Result<Vec<DensityBin>> {
    let e = spec.energies_per_particle();
    let (lo, hi) = (e[0], e[e.len() - 1]);
    histogram(&e, n_bins, lo, hi)
}

/// Index of the fullest bin (first one on ties).
pub fn peak_bin(bins: &[DensityBin]) -> usize {
    let mut best = 0;
    for (i, b) in bins.iter().enumerate() {
        if b.count > bins[best].count {
            best = i;
        }
    }
    best
}

/// Number of levels with `E/N > e_per_n`.
pub fn count_states_above(spec: &Spectrum, e_per_n: f64) -> usize {
    let n = spec.n_particles as f64;
    spec.energies.iter().filter(|&&e| e / n > e_per_n).count()
}

fn log_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

/// `√C(N,k) cos^k(θ/2) sin^{N−k}(θ/2)`, underflowing to 0.
fn binomial_weights(theta: f64, n: usize, lf: &[f64]) -> Vec<f64> {
    let (s, c) = (0.5 * theta).sin_cos();
    let (ls, lc) = (s.abs().ln(), c.abs().ln());
    (0..=n)
        .map(|k| {
            let nk = n - k;
            if (k > 0 && c == 0.0) || (nk > 0 && s == 0.0) {
                return 0.0;
            }
            let mut l = 0.5 * (lf[n] - lf[k] - lf[nk]);
            if k > 0 {
                l += k as f64 * lc;
            }
            if nk > 0 {
                l += nk as f64 * ls;
            }
            let sign = if (c < 0.0 && k % 2 == 1) ^ (s < 0.0 && nk % 2 == 1) { -1.0 } else { 1.0 };
            sign * l.exp()
        })
        .collect()
}

/// Spin coherent state pointing along `(sin θ cos φ, sin θ sin φ, cos θ)`:
/// `⟨k|θ,φ⟩ = √C(N,k) cos^k(θ/2) sin^{N−k}(θ/2) e^{i(N−k)φ}`.
/// θ = 0 is all particles in mode 1, θ = π all in mode 2.
pub fn coherent_state(theta: f64, phi: f64, n: usize) -> Vec<Complex64> {
    let lf = log_factorials(n);
    binomial_weights(theta, n, &lf)
        .into_iter()
        .enumerate()
        .map(|(k, w)| Complex64::from_polar(w, (n - k) as f64 * phi))
        .collect()
}

/// Fock state `|n₁ = k, n₂ = N − k⟩`.
pub fn fock_state(k: usize, n: usize) -> Vec<Complex64> {
    let mut s = vec![Complex64::new(0.0, 0.0); n + 1];
    s[k] = Complex64::new(1.0, 0.0);
    s
}

pub fn norm(state: &[Complex64]) -> f64 {
    state.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `2⟨L_z⟩/N`.
pub fn imbalance(state: &[Complex64]) -> f64 {
    let n = state.len() - 1;
    let lz_mean: f64 = state.iter().enumerate().map(|(k, a)| lz(k, n) * a.norm_sqr()).sum();
    2.0 * lz_mean / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HusimiPeak {
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
}

impl HusimiPeak {
    pub fn direction(&self) -> SpherePoint {
        SpherePoint::from_angles(self.theta, self.phi)
    }
}

/// `|⟨θ,φ|Ψ⟩|²` on a θ-midpoint, φ-periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    pub n_particles: usize,
    /// `θ_i = (i + ½) π / n_θ`.
    pub thetas: Vec<f64>,
    /// `φ_j = −π + 2πj / n_φ`.
    pub phis: Vec<f64>,
    /// Row-major `n_θ × n_φ`.
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.phis.len() + j]
    }

    /// Density normalized by the coherent-state resolution of identity.
    pub fn normalized(&self, i: usize, j: usize) -> f64 {
        self.value(i, j) * self.norm_factor()
    }

    pub fn norm_factor(&self) -> f64 {
        (self.n_particles + 1) as f64 / (4.0 * PI)
    }

    /// `(N+1)/(4π) Σ values sin θ Δθ Δφ`, 1 for a normalized state.
    pub fn total(&self) -> f64 {
        let dth = PI / self.thetas.len() as f64;
        let dph = 2.0 * PI / self.phis.len() as f64;
        let nphi = self.phis.len();
        let s: f64 = self
            .thetas
            .iter()
            .enumerate()
            .map(|(i, th)| th.sin() * self.values[i * nphi..(i + 1) * nphi].iter().sum::<f64>())
            .sum();
        self.norm_factor() * s * dth * dph
    }

    fn peak_in(&self, rows: std::ops::Range<usize>) -> HusimiPeak {
        let nphi = self.phis.len();
        let mut best = HusimiPeak { theta: f64::NAN, phi: f64::NAN, value: f64::NEG_INFINITY };
        for i in rows {
            for j in 0..nphi {
                let v = self.values[i * nphi + j];
                if v > best.value {
                    best = HusimiPeak { theta: self.thetas[i], phi: self.phis[j], value: v };
                }
            }
        }
        best
    }

    pub fn argmax(&self) -> HusimiPeak {
        self.peak_in(0..self.thetas.len())
    }

    /// Largest value in the northern (θ < π/2) and southern half.
    pub fn hemisphere_maxima(&self) -> (HusimiPeak, HusimiPeak) {
        let half = self.thetas.partition_point(|&t| t < 0.5 * PI);
        (self.peak_in(0..half), self.peak_in(half..self.thetas.len()))
    }
}

pub fn husimi(state: &[Complex64], n_theta: usize, n_phi: usize) -> Result<HusimiGrid> {
    if state.len() < 2 {
        return Err(Error::domain("state needs at least two amplitudes"));
    }
    if n_theta == 0 || n_phi == 0 {
        return Err(Error::domain("empty Husimi grid"));
    }
    let nrm = norm(state);
    if (nrm - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!("state is not normalized, |psi| = {nrm}")));
    }
    let n = state.len() - 1;
    let lf = log_factorials(n);
    let thetas: Vec<f64> = (0..n_theta).map(|i| (i as f64 + 0.5) * PI / n_theta as f64).collect();
    let phis: Vec<f64> = (0..n_phi).map(|j| -PI + 2.0 * PI * j as f64 / n_phi as f64).collect();
    let rows: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&th| {
            let coef: Vec<Complex64> = binomial_weights(th, n, &lf).iter().zip(state).map(|(w, a)| *a * *w).collect();
            // ⟨θ,φ|Ψ⟩ = Σ_k coef_k e^{−i(N−k)φ}: Horner in e^{−iφ}
            phis.iter()
                .map(|&ph| {
                    let z = Complex64::from_polar(1.0, -ph);
                    coef.iter().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a).norm_sqr()
                })
                .collect()
        })
        .collect();
    Ok(HusimiGrid { n_particles: n, thetas, phis, values: rows.concat() })
}

/// Exact evolution by spectral decomposition; returns `2⟨L_z⟩/N` at each time.
pub fn evolve_expectation(spec: &Spectrum, state0: &[Complex64], times: &[f64]) -> Result<Vec<f64>> {
    let d = spec.dim();
    if state0.len() != d {
        return Err(Error::domain(format!("state has {} amplitudes, spectrum {d}", state0.len())));
    }
    let nrm = norm(state0);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("initial state is not normalized, |psi| = {nrm}")));
    }
    let coef: Vec<Complex64> =
        (0..d).map(|n| spec.eigenvector(n).iter().zip(state0).map(|(v, a)| *a * *v).sum()).collect();
    Ok(times
        .par_iter()
        .map(|&t| {
            let mut psi = vec![Complex64::new(0.0, 0.0); d];
            for (n, (c, e)) in coef.iter().zip(&spec.energies).enumerate() {
                let w = c * Complex64::from_polar(1.0, -e * t);
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                for (p, v) in psi.iter_mut().zip(spec.eigenvector(n)) {
                    *p += w * *v;
                }
            }
            imbalance(&psi)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMode {
    MeanField,
    ManyParticle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g: f64,
    pub t: f64,
    pub value: f64,
}

/// Imbalance `z(t)` (or `2⟨L_z⟩/N`) from the south pole for each `g`.
pub fn selftrapping_sweep(
    v: f64,
    g_grid: &[f64],
    n_particles: usize,
    times: &[f64],
    mode: SweepMode,
) -> Result<Vec<SweepRow>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::domain("time grid must be ascending and nonnegative"));
    }
    let columns: Vec<Result<Vec<f64>>> = g_grid
        .par_iter()
        .map(|&g| match mode {
            SweepMode::MeanField => {
                let p = ModelParams::symmetric(v, g)?;
                let t_end = times.last().copied().unwrap_or(0.0);
                let opts = IntegrateOptions {
                    detect_period: false,
                    sample_times: Some(times.to_vec()),
                    ..IntegrateOptions::default()
                };
                let tr = meanfield::integrate_with(&p, meanfield::SOUTH_POLE, t_end, &opts)?;
                Ok(tr.states.iter().map(|s| s.z).collect())
            }
            SweepMode::ManyParticle => {
                let qp = QuantumParams::with_g(0.0, v, g, n_particles)?;
                let spec = eigensystem(&build_hamiltonian(&qp))?;
                evolve_expectation(&spec, &fock_state(0, n_particles), times)
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(g_grid.len() * times.len());
    for (&g, col) in g_grid.iter().zip(columns) {
        for (&t, value) in times.iter().zip(col?) {
            rows.push(SweepRow { g, t, value });
        }
    }
    Ok(rows)
}
