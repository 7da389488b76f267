use crate::error::{OracleError, Result};
use crate::space::FockSpace;
use crate::{CMat, CVec};
use num_complex::Complex64;

const TAIL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct TruncatedDensityMatrix {
    pub space: FockSpace,
    pub rho: CMat,
    pub t: f64,
}

impl TruncatedDensityMatrix {
    pub fn n_max(&self) -> usize {
        self.space.n_max
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Truncated |α⟩; fails when more than 1e-8 of the norm lies above n_max.
pub fn coherent_ket(n_max: usize, alpha: Complex64) -> Result<CVec> {
    let mut ket = CVec::zeros(n_max + 1);
    let mut amp = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for x in 0..=n_max {
        if x > 0 {
            amp *= alpha / (x as f64).sqrt();
        }
        ket[x] = amp;
    }
    let mass = 1.0 - ket.norm_squared();
    if mass > TAIL {
        return Err(OracleError::TailMass { mass });
    }
    Ok(ket)
}

/// |β_1⟩ ⊗ … ⊗ |β_N⟩, mode 0 most significant.
pub fn product_coherent_ket(space: &FockSpace, betas: &[Complex64]) -> Result<CVec> {
    if betas.len() != space.modes {
        return Err(OracleError::DimensionMismatch { expected: space.modes, found: betas.len() });
    }
    let mut ket = CVec::from_element(1, Complex64::new(1.0, 0.0));
    for b in betas {
        ket = ket.kronecker(&coherent_ket(space.n_max, *b)?);
    }
    Ok(ket)
}

/// Σ c_k |ψ_k⟩ normalized.
pub fn superposition(terms: &[(Complex64, CVec)]) -> Result<CVec> {
    let dim = terms.first().map(|t| t.1.len()).ok_or_else(|| OracleError::Invalid("empty superposition".into()))?;
    let mut ket = CVec::zeros(dim);
    for (c, psi) in terms {
        if psi.len() != dim {
            return Err(OracleError::DimensionMismatch { expected: dim, found: psi.len() });
        }
        ket += psi * *c;
    }
    let norm = ket.norm();
    if norm < 1e-13 {
        return Err(OracleError::Invalid("superposition vanishes".into()));
    }
    Ok(ket / Complex64::new(norm, 0.0))
}

pub fn fock_ket(space: &FockSpace, coefficients: &[(Vec<usize>, Complex64)]) -> Result<CVec> {
    let mut ket = CVec::zeros(space.dim());
    for (occ, c) in coefficients {
        if occ.len() != space.modes {
            return Err(OracleError::DimensionMismatch { expected: space.modes, found: occ.len() });
        }
        if occ.iter().any(|&x| x > space.n_max) {
            return Err(OracleError::Invalid(format!("occupation {occ:?} exceeds the cutoff")));
        }
        ket[space.index(occ)] += *c;
    }
    let norm = ket.norm();
    if norm < 1e-13 {
        return Err(OracleError::Invalid("zero Fock state".into()));
    }
    Ok(ket / Complex64::new(norm, 0.0))
}

pub fn ket_density(space: &FockSpace, ket: &CVec, t: f64) -> TruncatedDensityMatrix {
    TruncatedDensityMatrix { space: space.clone(), rho: ket * ket.adjoint(), t }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_ket_tail() {
        assert!(coherent_ket(3, Complex64::new(2.0, 0.0)).is_err());
        let k = coherent_ket(20, Complex64::new(1.0, 1.0)).unwrap();
        assert!((k.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn product_and_fock_layout() {
        let sp = FockSpace::new(2, 3);
        let k = fock_ket(&sp, &[(vec![1, 2], Complex64::new(2.0, 0.0))]).unwrap();
        assert_eq!(k[sp.index(&[1, 2])], Complex64::new(1.0, 0.0));
        let sp = FockSpace::new(2, 12);
        let b = [Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.7)];
        let p = product_coherent_ket(&sp, &b).unwrap();
        let a0 = coherent_ket(12, b[0]).unwrap();
        let a1 = coherent_ket(12, b[1]).unwrap();
        assert!((p[sp.index(&[2, 5])] - a0[2] * a1[5]).norm() < 1e-16);
        let rho = ket_density(&sp, &p, 0.0);
        assert!(rho.hermiticity_defect() < 1e-16);
        assert!(rho.min_eigenvalue() > -1e-12);
    }
}
