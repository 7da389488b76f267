//! Diffusion and decoherence times, linear entropy and concurrence.

use crate::error::{Error, Result};
use crate::linalg::{max_abs_c, CMat, CVec, RMat};
use crate::network::Regime;
use crate::phase_space::{Branch, CoherentMixture};
use crate::propagation::{Dynamics, PropagatorBundle};
use crate::timescale::Timescale;
use num_complex::Complex64;
use serde::Serialize;

/// Default step for the forward difference of 𝒟_m at t = 0.
pub const DIRECTIONAL_STEP: f64 = 1e-6;
const FLAT_CHANGE: f64 = 1e-13;
const ROOT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceReport {
    pub tau_diff: Timescale,
    pub tau_dir: Vec<Timescale>,
    pub tau_int: Timescale,
    pub tau_d: Timescale,
    pub regime: Regime,
}

/// τ_diff = N / (2 Tr Υ).
pub fn mean_diffusion_time(upsilon: &RMat) -> Timescale {
    let n = upsilon.nrows() as f64;
    Timescale::from_rate(2.0 * upsilon.trace() / n)
}

/// Inverse forward-difference slopes of 𝒟_m between two bundles.
pub fn directional_diffusion_times(at_zero: &PropagatorBundle, at_h: &PropagatorBundle) -> Vec<Timescale> {
    let h = at_h.t - at_zero.t;
    at_zero
        .dcoef
        .iter()
        .zip(at_h.dcoef.iter())
        .map(|(d0, dh)| {
            let change = dh - d0;
            if change.abs() < FLAT_CHANGE {
                Timescale::Infinite
            } else {
                Timescale::Finite(h / change)
            }
        })
        .collect()
}

/// Exact slopes d𝒟_m/dt at t = 0: the eigenvalues of Υ + Υᵀ, ascending.
pub fn diffusion_rates_at_origin(upsilon: &RMat) -> Vec<f64> {
    let q = upsilon + upsilon.transpose();
    let (vals, _) = crate::linalg::symmetric_eigen(&q);
    vals.iter().copied().collect()
}

pub fn decoherence_time(tau_diff: Timescale, tau_int: Timescale) -> Timescale {
    tau_diff.harmonic(tau_int)
}

/// The estimate obtained by imposing ℘(τ) = e^{−4} on a single-mode cat;
/// it blows up at n̄ = |α|²/(1 − 2|α|²).
pub fn naive_decoherence_time(alpha_sqr: f64, nbar: f64, gamma: f64) -> f64 {
    1.0 / (2.0 * gamma * (alpha_sqr * (1.0 + 2.0 * nbar) - nbar))
}

fn single_branch(state: &CoherentMixture) -> Result<&Branch> {
    match state.branches() {
        [b] => Ok(b),
        _ => Err(Error::Precondition("a pure state (one branch) is required".into())),
    }
}

fn check_pair(branch: &Branch, r: usize, s: usize) -> Result<()> {
    let k = branch.components.len();
    if r == s {
        return Err(Error::Domain("decay function needs two distinct components".into()));
    }
    if r >= k || s >= k {
        return Err(Error::Domain(format!("component index out of range (have {k})")));
    }
    Ok(())
}

/// ln ℘_rs(t) = −2 Σ_m (|Δβ_m|² − |(UᵀΘΔβ)_m|² / 𝒟_m).
pub fn log_decay_function(state: &CoherentMixture, r: usize, s: usize, bundle: &PropagatorBundle) -> Result<f64> {
    let branch = single_branch(state)?;
    check_pair(branch, r, s)?;
    let dbeta = &branch.components[r].beta - &branch.components[s].beta;
    let rotated = bundle.u.transpose() * &bundle.theta * &dbeta;
    let mut acc = 0.0;
    for m in 0..dbeta.len() {
        acc += dbeta[m].norm_sqr() - rotated[m].norm_sqr() / bundle.dcoef[m];
    }
    Ok(-2.0 * acc)
}

pub fn decay_function(state: &CoherentMixture, r: usize, s: usize, bundle: &PropagatorBundle) -> Result<f64> {
    Ok(log_decay_function(state, r, s, bundle)?.exp())
}

/// |⟨β^r|β^s⟩ / ⟨K^r|K^s⟩|⁴, the zero-temperature form of ℘_rs.
pub fn overlap_ratio(state: &CoherentMixture, r: usize, s: usize, bundle: &PropagatorBundle) -> Result<f64> {
    let branch = single_branch(state)?;
    check_pair(branch, r, s)?;
    let dbeta = &branch.components[r].beta - &branch.components[s].beta;
    let dk = &bundle.theta * &dbeta;
    // ln|⟨a|b⟩| = −|a − b|²/2
    Ok((4.0 * (-0.5 * dbeta.norm_squared() + 0.5 * dk.norm_squared())).exp())
}

fn threshold_gap(state: &CoherentMixture, r: usize, s: usize, bundle: &PropagatorBundle) -> Result<f64> {
    let n = bundle.n() as f64;
    Ok(log_decay_function(state, r, s, bundle)? + 4.0 * n / bundle.dcoef_sum())
}

/// Time at which ℘_rs falls to exp(−4N / Σ𝒟_m).
///
/// The grid only locates the first sign change; the root itself is refined
/// by bisection on the continuous dynamics. Without a crossing on the grid
/// the long-time limit decides between `Infinite` and `NoBracket`.
pub fn interference_decay_time(
    state: &CoherentMixture,
    r: usize,
    s: usize,
    dynamics: &Dynamics,
    grid: &[f64],
) -> Result<Timescale> {
    if grid.is_empty() {
        return Err(Error::validation("times", "empty time grid"));
    }
    let branch = single_branch(state)?;
    check_pair(branch, r, s)?;
    let dbeta_sqr = (&branch.components[r].beta - &branch.components[s].beta).norm_squared();
    // a crossing must clear roundoff in the two O(|Δβ|²) terms of the gap
    let floor = 1e-12 * (4.0 + 2.0 * dbeta_sqr);
    let gap = |t: f64| -> Result<f64> { threshold_gap(state, r, s, &dynamics.bundle(t)?) };
    let mut prev_t = 0.0;
    let mut prev = gap(0.0)?;
    let mut values = Vec::with_capacity(grid.len());
    for &t in grid.iter().filter(|&&t| t > 0.0) {
        let g = gap(t)?;
        values.push(g);
        if g < -floor {
            return bisect(&gap, prev_t, t, prev).map(Timescale::Finite);
        }
        prev_t = t;
        prev = g;
    }
    let t_end = prev_t;

    if let Some(pi) = &dynamics.stationary {
        let n = dynamics.n() as f64;
        let limit = -2.0 * dbeta_sqr + 4.0 * n / (n + pi.pi.trace().re);
        return if limit >= -floor {
            Ok(Timescale::Infinite)
        } else {
            Err(Error::NoBracket { t_end })
        };
    }
    let decreasing = values.len() >= 2 && values[values.len() - 1] < values[values.len() - 2] - floor;
    if decreasing {
        Err(Error::NoBracket { t_end })
    } else {
        Ok(Timescale::Infinite)
    }
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    while hi - lo > ROOT_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All decoherence times for the component pair (r, s) of a pure state.
pub fn decoherence_report(
    state: &CoherentMixture,
    r: usize,
    s: usize,
    dynamics: &Dynamics,
    grid: &[f64],
    regime: Regime,
) -> Result<DecoherenceReport> {
    let tau_diff = mean_diffusion_time(&dynamics.upsilon);
    let tau_dir = directional_diffusion_times(&dynamics.bundle(0.0)?, &dynamics.bundle(DIRECTIONAL_STEP)?);
    let tau_int = interference_decay_time(state, r, s, dynamics, grid)?;
    Ok(DecoherenceReport {
        tau_diff,
        tau_dir,
        tau_int,
        tau_d: decoherence_time(tau_diff, tau_int),
        regime,
    })
}

/// Σ over component quadruples of c_rs c_r's' exp(−(K_s−K_s')ᵀ A⁻¹ (K_r−K_r')*) / det A,
/// with A given in its eigenframe (u, d) and K restricted to `modes`.
fn overlap_purity(
    state: &CoherentMixture,
    bundle: &PropagatorBundle,
    modes: &[usize],
    u: &CMat,
    d: &[f64],
) -> f64 {
    let centroids = state.centroids(bundle);
    let restrict = |k: &CVec| CVec::from_iterator(modes.len(), modes.iter().map(|&m| k[m]));
    let log_det: f64 = d.iter().map(|x| x.ln()).sum();
    let u_t = u.transpose();
    let mut total = Complex64::new(0.0, 0.0);
    for (b1, k1) in state.branches().iter().zip(&centroids) {
        for (b2, k2) in state.branches().iter().zip(&centroids) {
            let kk1: Vec<CVec> = k1.iter().map(|k| &u_t * restrict(k)).collect();
            let kk2: Vec<CVec> = k2.iter().map(|k| &u_t * restrict(k)).collect();
            let mut sum = Complex64::new(0.0, 0.0);
            for r in 0..kk1.len() {
                for s in 0..kk1.len() {
                    let c1 = b1.log_coefficient(r, s);
                    for rp in 0..kk2.len() {
                        for sp in 0..kk2.len() {
                            let mut q = Complex64::new(0.0, 0.0);
                            for m in 0..d.len() {
                                q += (kk1[s][m] - kk2[sp][m]) * (kk1[r][m] - kk2[rp][m]).conj() / d[m];
                            }
                            sum += (c1 + b2.log_coefficient(rp, sp) - q - log_det).exp();
                        }
                    }
                }
            }
            total += sum * (b1.weight * b2.weight);
        }
    }
    total.re
}

/// Tr ρ² = π^N ∫ W².
pub fn purity(state: &CoherentMixture, bundle: &PropagatorBundle) -> Result<f64> {
    if state.n() != bundle.n() {
        return Err(Error::DimensionMismatch { expected: state.n(), found: bundle.n() });
    }
    let modes: Vec<usize> = (0..state.n()).collect();
    Ok(overlap_purity(state, bundle, &modes, &bundle.u, bundle.dcoef.as_slice()))
}

/// S = 1 − Tr ρ².
pub fn linear_entropy(state: &CoherentMixture, bundle: &PropagatorBundle) -> Result<f64> {
    Ok(1.0 - purity(state, bundle)?)
}

/// 1 − Tr_A[(Tr_B ρ)²] for a pure state under dissipation-free evolution.
///
/// Both phase-space integrals are Gaussian: integrating W over ξ_B leaves
/// the Wigner function of the reduced state, whose squared integral has the
/// same closed form as the full purity restricted to the modes of A.
pub fn concurrence(state: &CoherentMixture, partition_a: &[usize], bundle: &PropagatorBundle) -> Result<f64> {
    let n = state.n();
    if bundle.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: bundle.n() });
    }
    single_branch(state)?;
    let unitary = max_abs_c(&(bundle.theta.adjoint() * &bundle.theta - CMat::identity(n, n)));
    if max_abs_c(&bundle.j) > 1e-12 || unitary > 1e-10 {
        return Err(Error::Precondition(
            "concurrence needs dissipation-free evolution (Θ unitary, J = 0)".into(),
        ));
    }
    let mut modes: Vec<usize> = partition_a.to_vec();
    modes.sort_unstable();
    modes.dedup();
    if modes.is_empty() || modes.len() >= n || modes.iter().any(|&m| m >= n) {
        return Err(Error::validation("partition", "A must be a nonempty proper subset of the modes"));
    }
    let na = modes.len();
    let ones = vec![1.0; na];
    Ok(1.0 - overlap_purity(state, bundle, &modes, &CMat::identity(na, na), &ones))
}
