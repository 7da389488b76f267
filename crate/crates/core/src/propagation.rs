//! Propagator Θ(t), widths J(t) and J̃(t), centroids K(t) and the rotated
//! frame in which J̃ is diagonal.

use crate::error::{Error, Result};
use crate::linalg::{complexify, conj, hermitian_eigen, CMat, CVec, RMat};
use crate::network::DissipativeMatrix;
use crate::stationary::{solve_pi_eigen, StationaryWidth};
use nalgebra::DVector;
use num_complex::Complex64;

/// Θ(t) = D e^{−Ωt} D⁻¹.
pub fn theta(dm: &DissipativeMatrix, t: f64) -> CMat {
    let decay = dm.omega_big.map(|w| (-w * t).exp());
    &dm.d * CMat::from_diagonal(&decay) * &dm.d_inv
}

/// J(t) = Π − Θ* Π Θᵀ.
pub fn j_matrix(pi: &StationaryWidth, theta: &CMat) -> CMat {
    &pi.pi - conj(theta) * &pi.pi * theta.transpose()
}

/// (1 − e^{−zt})/z, continuous at z = 0.
fn phi(z: Complex64, t: f64) -> Complex64 {
    let w = -z * t;
    if w.norm() == 0.0 {
        return Complex64::new(t, 0.0);
    }
    let ea = w.re.exp();
    let half = (0.5 * w.im).sin();
    let expm1 = Complex64::new(w.re.exp_m1() * w.im.cos() - 2.0 * half * half, ea * w.im.sin());
    -expm1 / z
}

/// J(t) as the accumulated diffusion ∫₀ᵗ Θ*(s)(Υ+Υᵀ)Θᵀ(s) ds.
///
/// Agrees with [`j_matrix`] whenever the stationary width exists, and stays
/// finite when some mode is undamped.
pub fn j_transient(dm: &DissipativeMatrix, upsilon: &RMat, t: f64) -> CMat {
    let n = dm.n();
    let q = complexify(&(upsilon + upsilon.transpose()));
    let w = &dm.omega_big;
    let m = conj(&dm.d_inv) * q * dm.d_inv.transpose();
    let x = CMat::from_fn(n, n, |a, b| m[(a, b)] * phi(w[a].conj() + w[b], t));
    conj(&dm.d) * x * dm.d.transpose()
}

/// K(t) = Θ(t) β.
pub fn k_vector(theta: &CMat, beta: &CVec) -> CVec {
    theta * beta
}

/// Unitary U with U† J̃ U = diag(𝒟), 𝒟 ascending.
pub fn rotate_frame(j_tilde: &CMat) -> (CMat, DVector<f64>) {
    let (d, u) = hermitian_eigen(j_tilde);
    (u, d)
}

/// Everything the phase-space functions need at one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorBundle {
    pub t: f64,
    pub theta: CMat,
    pub j: CMat,
    pub j_tilde: CMat,
    pub u: CMat,
    pub dcoef: DVector<f64>,
}

impl PropagatorBundle {
    pub fn n(&self) -> usize {
        self.theta.nrows()
    }

    fn assemble(t: f64, theta: CMat, j: CMat) -> Self {
        let n = theta.nrows();
        let j = (&j + j.adjoint()) * Complex64::new(0.5, 0.0);
        let j_tilde = &j + CMat::identity(n, n);
        let (u, dcoef) = rotate_frame(&j_tilde);
        PropagatorBundle { t, theta, j, j_tilde, u, dcoef }
    }

    /// Σ 𝒟_m(t) = Tr J̃(t).
    pub fn dcoef_sum(&self) -> f64 {
        self.dcoef.sum()
    }
}

/// Generator, diffusion and (when it exists) the stationary width of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct Dynamics {
    pub dm: DissipativeMatrix,
    pub upsilon: RMat,
    pub stationary: Option<StationaryWidth>,
}

impl Dynamics {
    /// Requires every mode to be damped, so that Π exists.
    pub fn new(dm: DissipativeMatrix, upsilon: RMat) -> Result<Self> {
        let pi = solve_pi_eigen(&dm, &upsilon)?;
        Ok(Dynamics { dm, upsilon, stationary: Some(pi) })
    }

    /// Accepts undamped modes; widths then come from the transient integral.
    pub fn allow_undamped(dm: DissipativeMatrix, upsilon: RMat) -> Result<Self> {
        let n = dm.n();
        if upsilon.nrows() != n || upsilon.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: upsilon.nrows() });
        }
        let stationary = solve_pi_eigen(&dm, &upsilon).ok();
        Ok(Dynamics { dm, upsilon, stationary })
    }

    pub fn n(&self) -> usize {
        self.dm.n()
    }

    pub fn theta(&self, t: f64) -> CMat {
        theta(&self.dm, t)
    }

    pub fn j(&self, t: f64) -> CMat {
        match &self.stationary {
            Some(pi) => j_matrix(pi, &self.theta(t)),
            None => j_transient(&self.dm, &self.upsilon, t),
        }
    }

    pub fn bundle(&self, t: f64) -> Result<PropagatorBundle> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be finite and ≥ 0, got {t}")));
        }
        Ok(PropagatorBundle::assemble(t, self.theta(t), self.j(t)))
    }

    pub fn bundles(&self, times: &[f64]) -> Result<Vec<PropagatorBundle>> {
        times.iter().map(|&t| self.bundle(t)).collect()
    }

    /// True when Γ = 0: evolution is unitary.
    pub fn is_dissipation_free(&self) -> bool {
        self.dm.omega_big.iter().all(|w| w.re.abs() < 1e-14)
    }
}

/// Adjoint-flow of the characteristic-function argument: η(t) = η(0) e^{−(ℋᴰ)* t}.
pub fn eta_flow(dm: &DissipativeMatrix, eta0: &CVec, t: f64) -> CVec {
    (eta0.transpose() * conj(&theta(dm, t))).transpose()
}
