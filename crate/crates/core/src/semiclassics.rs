//! Bohr–Sommerfeld quantization with the enclosed spherical area as action.
//!
//! With spin length `L + ½ = (N + 1)/2` the classical limit of
//! `H = 2vL_x + 2cL_z²` is `(N + 1)(v x + g' z²/2)` with `g' = c(N + 1)`;
//! levels follow from `S(E) = 4π(k + ½)/(N + 1)`, counting from the top of
//! the spectrum (S is the area above the energy).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{self, separatrix_area, FULL_SPHERE};
use crate::error::{Error, Result};
use crate::meanfield::{allowed_energy_range, cylinder_from_energy, period_of_energy, ModelParams};
use crate::quantum::{self, QuantumParams};

/// Energy tolerance of the level roots (classical units).
pub const ROOT_TOL: f64 = 1e-10;
const MAX_ROOT_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationRule {
    pub states: usize,
}

impl QuantizationRule {
    pub fn for_particles(n_particles: usize) -> Self {
        Self { states: n_particles + 1 }
    }

    pub fn total_phase_space(&self) -> f64 {
        FULL_SPHERE
    }

    pub fn action_quantum(&self) -> f64 {
        FULL_SPHERE / self.states as f64
    }

    pub fn maslov_offset(&self) -> f64 {
        0.5
    }

    /// Action of the k-th cell counted from `S = 0`.
    pub fn target(&self, k: usize) -> f64 {
        (k as f64 + self.maslov_offset()) * self.action_quantum()
    }

    /// Offset-free count of states in an area `s`, `s (N+1) / 4π`.
    pub fn cells(&self, s: f64) -> f64 {
        s / self.action_quantum()
    }
}

fn require_repulsive(params: &ModelParams) -> Result<()> {
    if params.epsilon != 0.0 {
        return Err(Error::domain("semiclassics requires epsilon = 0"));
    }
    if !(params.g > 0.0) {
        return Err(Error::domain(format!("semiclassics requires g > 0, got {}", params.g)));
    }
    Ok(())
}

/// Area of the region with energy above `e`; 4π at the minimum, 0 at the top.
pub fn action_of_energy(params: &ModelParams, e: f64) -> Result<f64> {
    require_repulsive(params)?;
    Ok(action::area(cylinder_from_energy(params, e)?)?.s_inside)
}

/// As [`action_of_energy`], but saturating outside the allowed band.
pub fn action_clamped(params: &ModelParams, e: f64) -> Result<f64> {
    let (lo, hi) = allowed_energy_range(params);
    if e <= lo {
        Ok(FULL_SPHERE)
    } else if e >= hi {
        Ok(0.0)
    } else {
        action_of_energy(params, e)
    }
}

/// Energy and total enclosed area of the separatrix through `(1, 0, 0)`,
/// present when `g > v`.
pub fn separatrix(params: &ModelParams) -> Option<(f64, f64)> {
    (params.g > params.v).then(|| (params.v, separatrix_area(params.v / params.g).unwrap_or(0.0)))
}

/// Classical parameters whose levels are `E / (N + 1)`.
pub fn semiclassical_model(qp: &QuantumParams) -> Result<ModelParams> {
    ModelParams::new(qp.epsilon, qp.v, qp.c * (qp.n_particles + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelBranch {
    /// Single loop around the minimum.
    SingleLoop,
    /// One of the two self-trapped loops; levels come in degenerate pairs.
    Doublet,
}

impl LevelBranch {
    pub fn name(&self) -> &'static str {
        match self {
            LevelBranch::SingleLoop => "single_loop",
            LevelBranch::Doublet => "doublet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalLevel {
    /// Position in the ascending exact spectrum this level approximates.
    pub index: usize,
    /// Cell number counted from the top (per loop for doublets).
    pub k: usize,
    pub energy: f64,
    pub branch: LevelBranch,
}

/// Illinois-modified regula falsi for a decreasing `f` with `f(lo) > 0 > f(hi)`.
fn decreasing_root(f: impl Fn(f64) -> Result<f64>, level: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::RootNotBracketed { level, lo, hi });
    }
    let mut side = 0i8;
    for _ in 0..MAX_ROOT_ITERATIONS {
        if hi - lo <= ROOT_TOL {
            break;
        }
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx > 0.0 {
            lo = x;
            flo = fx;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            fhi = fx;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Semiclassical levels, ordered by `index`.
///
/// Below the separatrix `S(E_k) = 4π(k + ½)/(N + 1)` gives the level with
/// index `N − k`; above it each loop is quantized separately with area
/// `S/2` and every level is emitted twice (indices `N − 2j`, `N − 2j − 1`).
pub fn semiclassical_spectrum(qp: &QuantumParams) -> Result<Vec<SemiclassicalLevel>> {
    let cl = semiclassical_model(qp)?;
    require_repulsive(&cl)?;
    let n = qp.n_particles;
    let rule = QuantizationRule::for_particles(n);
    let scale = (n + 1) as f64;
    let (e_min, e_max) = allowed_energy_range(&cl);
    let sep = separatrix(&cl);
    let mut jobs: Vec<(LevelBranch, usize)> = Vec::new();
    let s_sep = sep.map_or(0.0, |s| s.1);
    let mut j = 0;
    while sep.is_some() && rule.target(j) < 0.5 * s_sep {
        jobs.push((LevelBranch::Doublet, j));
        j += 1;
    }
    jobs.extend(
        (0..=n)
            .filter(|&k| rule.target(k) > s_sep && rule.target(k) < FULL_SPHERE)
            .map(|k| (LevelBranch::SingleLoop, k)),
    );

    let solved: Vec<Result<(LevelBranch, usize, f64)>> = jobs
        .par_iter()
        .map(|&(branch, k)| {
            let t = rule.target(k);
            let e = match (branch, sep) {
                (LevelBranch::Doublet, Some((e_sep, _))) => {
                    decreasing_root(|e| Ok(0.5 * action_clamped(&cl, e)? - t), k, e_sep, e_max)?
                }
                (_, Some((e_sep, _))) => decreasing_root(|e| Ok(action_clamped(&cl, e)? - t), k, e_min, e_sep)?,
                (_, None) => decreasing_root(|e| Ok(action_clamped(&cl, e)? - t), k, e_min, e_max)?,
            };
            Ok((branch, k, e))
        })
        .collect();
    let mut levels = Vec::with_capacity(n + 2);
    for r in solved {
        let (branch, k, e) = r?;
        match branch {
            LevelBranch::Doublet => {
                for idx in [n.checked_sub(2 * k), n.checked_sub(2 * k + 1)].into_iter().flatten() {
                    levels.push(SemiclassicalLevel { index: idx, k, energy: scale * e, branch });
                }
            }
            LevelBranch::SingleLoop => levels.push(SemiclassicalLevel { index: n - k, k, energy: scale * e, branch }),
        }
    }
    levels.sort_by(|a, b| a.index.cmp(&b.index).then(a.energy.total_cmp(&b.energy)));
    Ok(levels)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelComparison {
    pub level: SemiclassicalLevel,
    pub exact: f64,
    pub abs_error: f64,
}

/// Pairs each semiclassical level with the exact eigenvalue at its index.
pub fn compare_with_exact(qp: &QuantumParams) -> Result<Vec<LevelComparison>> {
    let exact = quantum::eigenvalues(&quantum::build_hamiltonian(qp))?;
    Ok(semiclassical_spectrum(qp)?
        .into_iter()
        .map(|level| {
            let e = exact[level.index];
            LevelComparison { level, exact: e, abs_error: (level.energy - e).abs() }
        })
        .collect())
}

/// Largest `|ΔE|/N` over levels with `|E/N − v| > window` (by exact energy).
pub fn max_error_away_from_separatrix(cmp: &[LevelComparison], qp: &QuantumParams, window: f64) -> f64 {
    let n = qp.n_particles as f64;
    cmp.iter().filter(|c| (c.exact / n - qp.v).abs() > window).map(|c| c.abs_error / n).fold(0.0, f64::max)
}

/// Numerical `dS/dE` (per loop above the separatrix) against the period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionPeriodRelation {
    pub energy: f64,
    pub ds_de: f64,
    pub period: f64,
    /// `−(dS/dE) / T`.
    pub ratio: f64,
}

pub fn action_period_relation(params: &ModelParams, e: f64, h: f64) -> Result<ActionPeriodRelation> {
    let per_loop = if separatrix(params).is_some_and(|(es, _)| e > es) { 0.5 } else { 1.0 };
    let ds_de = per_loop * (action_of_energy(params, e + h)? - action_of_energy(params, e - h)?) / (2.0 * h);
    let period = period_of_energy(params, e)?;
    Ok(ActionPeriodRelation { energy: e, ds_de, period, ratio: -ds_de / period })
}

/// `|dS_loop/dE| = ACTION_PERIOD_RATIO · T(E)`, determined numerically.
pub const ACTION_PERIOD_RATIO: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub e_lo: f64,
    pub e_hi: f64,
    pub e_center: f64,
    /// Exact levels per unit E/N.
    pub rho_quantum: f64,
    /// `(N+1)/4π · ΔS/Δ(E/N)`: the classical phase-space count in the bin.
    pub rho_classical: f64,
    /// `(N+1)/4π · 2T(E)`, doubled above the separatrix; infinite on it.
    pub t_scaled: f64,
}

/// Quantum level density next to the classical density and scaled period,
/// on `n_bins` boxes spanning the exact spectrum (energies per particle,
/// mean-field `g = cN`).
pub fn density_comparison(qp: &QuantumParams, n_bins: usize) -> Result<Vec<DensityRow>> {
    let cl = qp.mean_field()?;
    require_repulsive(&cl)?;
    let spec = quantum::eigenvalues(&quantum::build_hamiltonian(qp))?;
    let n = qp.n_particles as f64;
    let per_n: Vec<f64> = spec.iter().map(|e| e / n).collect();
    let bins = quantum::histogram(&per_n, n_bins, per_n[0], per_n[per_n.len() - 1])?;
    let cells = (qp.n_particles + 1) as f64 / (4.0 * PI);
    let sep = separatrix(&cl);
    let (e_min, e_max) = allowed_energy_range(&cl);
    bins.par_iter()
        .map(|b| {
            let ds = action_clamped(&cl, b.e_lo)? - action_clamped(&cl, b.e_hi)?;
            let e = b.e_center;
            let t_scaled = if e <= e_min || e >= e_max {
                0.0
            } else {
                match period_of_energy(&cl, e) {
                    Ok(t) => {
                        let loops = if sep.is_some_and(|(es, _)| e > es) { 2.0 } else { 1.0 };
                        cells * ACTION_PERIOD_RATIO * t * loops
                    }
                    Err(Error::Separatrix { .. }) => f64::INFINITY,
                    Err(err) => return Err(err),
                }
            };
            Ok(DensityRow {
                e_lo: b.e_lo,
                e_hi: b.e_hi,
                e_center: e,
                rho_quantum: b.rho,
                rho_classical: cells * ds / (b.e_hi - b.e_lo),
                t_scaled,
            })
        })
        .collect()
}
