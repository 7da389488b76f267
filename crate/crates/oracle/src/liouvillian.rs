use crate::error::{OracleError, Result};
use crate::space::FockSpace;
use crate::{CMat, RMat};
use num_complex::Complex64;

/// H_S = Σ ℋ_mn a†_m a_n together with the damping and diffusion matrices.
#[derive(Debug, Clone)]
pub struct Generator {
    pub space: FockSpace,
    pub h: RMat,
    pub gamma: RMat,
    pub upsilon: RMat,
}

impl Generator {
    pub fn new(space: FockSpace, h: RMat, gamma: RMat, upsilon: RMat) -> Result<Self> {
        let n = space.modes;
        for m in [&h, &gamma, &upsilon] {
            if m.nrows() != n || m.ncols() != n {
                return Err(OracleError::DimensionMismatch { expected: n, found: m.nrows() });
            }
        }
        Ok(Generator { space, h, gamma, upsilon })
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        liouvillian_apply(&self.space, rho, &self.h, &self.gamma, &self.upsilon)
    }
}

/// dρ/dt = i[ρ, H_S] + Σ_mn (Γ_mn+Υ_mn)/2 ([a_n ρ, a†_m] + [a_m, ρ a†_n])
///                   + Σ_mn Υ_mn/2 ([a†_n ρ, a_m] + [a†_m, ρ a_n])
pub fn liouvillian_apply(space: &FockSpace, rho: &CMat, h: &RMat, gamma: &RMat, upsilon: &RMat) -> CMat {
    let n = space.modes;
    let d = space.dim();
    let a_rho: Vec<CMat> = (0..n).map(|m| space.left_a(m, rho)).collect();
    let ad_rho: Vec<CMat> = (0..n).map(|m| space.left_adag(m, rho)).collect();
    let rho_a: Vec<CMat> = (0..n).map(|m| space.right_a(rho, m)).collect();
    let rho_ad: Vec<CMat> = (0..n).map(|m| space.right_adag(rho, m)).collect();

    let mut out = CMat::zeros(d, d);
    let i = Complex64::new(0.0, 1.0);
    for m in 0..n {
        for k in 0..n {
            let hmk = h[(m, k)];
            if hmk != 0.0 {
                // ρ a†_m a_k − a†_m a_k ρ
                let right = space.right_a(&rho_ad[m], k);
                let left = space.left_adag(m, &a_rho[k]);
                out += (right - left) * (i * hmk);
            }
        }
    }
    for m in 0..n {
        for k in 0..n {
            let loss = 0.5 * (gamma[(m, k)] + upsilon[(m, k)]);
            if loss != 0.0 {
                // a_k ρ a†_m − a†_m a_k ρ + a_m ρ a†_k − ρ a†_k a_m
                let t1 = space.right_adag(&a_rho[k], m);
                let t2 = space.left_adag(m, &a_rho[k]);
                let t3 = space.right_adag(&a_rho[m], k);
                let t4 = space.right_a(&rho_ad[k], m);
                out += (t1 - t2 + t3 - t4) * Complex64::new(loss, 0.0);
            }
            let gain = 0.5 * upsilon[(m, k)];
            if gain != 0.0 {
                // a†_k ρ a_m − a_m a†_k ρ + a†_m ρ a_k − ρ a_k a†_m
                let t1 = space.right_a(&ad_rho[k], m);
                let t2 = space.left_a(m, &ad_rho[k]);
                let t3 = space.right_a(&ad_rho[m], k);
                let t4 = space.right_adag(&rho_a[k], m);
                out += (t1 - t2 + t3 - t4) * Complex64::new(gain, 0.0);
            }
        }
    }
    out
}
