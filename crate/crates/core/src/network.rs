//! Network topology, normal modes and the dissipative generator.

use crate::error::{Error, Result};
use crate::linalg::{
    complexify, condition_number, eigen_general, inverse, symmetric_eigen, CMat, CVec, RMat,
};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default threshold θ for [`coupling_regime`].
pub const REGIME_THRESHOLD: f64 = 0.1;

const SYMMETRY_TOL: f64 = 1e-12;
const UNDAMPED_TOL: f64 = 1e-14;
const MAX_CONDITION: f64 = 1e12;

/// Natural frequencies and couplings of an oscillator network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    omega: Vec<f64>,
    lambda: RMat,
}

impl NetworkSpec {
    pub fn new(omega: Vec<f64>, lambda: RMat) -> Result<Self> {
        let n = omega.len();
        if n == 0 {
            return Err(Error::validation("network.omega", "at least one oscillator is required"));
        }
        if lambda.nrows() != n || lambda.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if lambda.nrows() != n { lambda.nrows() } else { lambda.ncols() },
            });
        }
        for (m, w) in omega.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::validation(
                    format!("network.omega[{m}]"),
                    format!("frequency must be positive, got {w}"),
                ));
            }
        }
        for i in 0..n {
            if lambda[(i, i)] != 0.0 {
                return Err(Error::validation(
                    format!("network.lambda[{i}][{i}]"),
                    "diagonal couplings must be zero",
                ));
            }
            for j in 0..i {
                let (a, b) = (lambda[(i, j)], lambda[(j, i)]);
                if !a.is_finite() || (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::validation(
                        format!("network.lambda[{i}][{j}]"),
                        format!("coupling matrix must be symmetric ({a} vs {b})"),
                    ));
                }
            }
        }
        Ok(NetworkSpec { omega, lambda })
    }

    /// Every pair coupled with strength `lambda`, all frequencies `omega`.
    pub fn all_to_all(n: usize, omega: f64, lambda: f64) -> Result<Self> {
        let l = RMat::from_fn(n, n, |i, j| if i == j { 0.0 } else { lambda });
        NetworkSpec::new(vec![omega; n], l)
    }

    /// Open chain with nearest-neighbour coupling `lambda`.
    pub fn chain(n: usize, omega: f64, lambda: f64) -> Result<Self> {
        let l = RMat::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { lambda } else { 0.0 });
        NetworkSpec::new(vec![omega; n], l)
    }

    /// Reads ω from the diagonal and λ from the off-diagonal of `h`.
    pub fn from_matrix(h: &RMat) -> Result<Self> {
        let n = h.nrows();
        if h.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: h.ncols() });
        }
        let omega = (0..n).map(|i| h[(i, i)]).collect();
        let lambda = RMat::from_fn(n, n, |i, j| if i == j { 0.0 } else { h[(i, j)] });
        NetworkSpec::new(omega, lambda)
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn lambda(&self) -> &RMat {
        &self.lambda
    }
}

/// The real symmetric matrix ℋ with ℋ_mm = ω_m and ℋ_mn = λ_mn.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub h: RMat,
}

impl CouplingMatrix {
    pub fn n(&self) -> usize {
        self.h.nrows()
    }
}

pub fn build_hamiltonian(spec: &NetworkSpec) -> CouplingMatrix {
    let mut h = spec.lambda.clone();
    for (m, w) in spec.omega.iter().enumerate() {
        h[(m, m)] = *w;
    }
    CouplingMatrix { h }
}

/// Orthogonal `c` (row ℓ is the ℓ-th eigenvector) and ascending frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalModes {
    pub c: RMat,
    pub varpi: DVector<f64>,
}

impl NormalModes {
    pub fn n(&self) -> usize {
        self.varpi.len()
    }
}

pub fn normal_modes(h: &CouplingMatrix) -> Result<NormalModes> {
    let (varpi, vectors) = symmetric_eigen(&h.h);
    if let Some((index, &value)) = varpi.iter().enumerate().find(|(_, w)| **w <= 0.0) {
        return Err(Error::NonPositiveNormalMode { index, value });
    }
    Ok(NormalModes {
        c: vectors.transpose(),
        varpi,
    })
}

/// ℋᴰ = Γ/2 + iℋ with its eigendecomposition ℋᴰ = D diag(Ω) D⁻¹.
///
/// Eigenvalues are ordered by imaginary part, then real part.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipativeMatrix {
    pub hd: CMat,
    pub d: CMat,
    pub d_inv: CMat,
    pub omega_big: CVec,
}

impl DissipativeMatrix {
    pub fn n(&self) -> usize {
        self.hd.nrows()
    }

    /// Like [`dissipative_matrix`] but accepts modes with Re Ω = 0.
    ///
    /// Needed for dissipation-free evolution and for collective-reservoir
    /// networks whose subradiant modes never see the bath.
    pub fn allow_undamped(h: &CouplingMatrix, gamma: &RMat) -> Result<Self> {
        let n = h.n();
        if gamma.nrows() != n || gamma.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: gamma.nrows() });
        }
        let hd = complexify(gamma) * Complex64::new(0.5, 0.0) + complexify(&h.h) * Complex64::i();
        let (vals, vecs) = eigen_general(&hd)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            vals[a]
                .im
                .total_cmp(&vals[b].im)
                .then(vals[a].re.total_cmp(&vals[b].re))
        });
        let omega_big = CVec::from_iterator(n, order.iter().map(|&i| vals[i]));
        let d = CMat::from_fn(n, n, |r, c| vecs[(r, order[c])]);
        let condition = condition_number(&d);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::DefectiveMatrix { condition });
        }
        let d_inv = inverse(&d)?;
        Ok(DissipativeMatrix {
            hd,
            d,
            d_inv,
            omega_big,
        })
    }

    /// Smallest real part among the eigenvalues.
    pub fn min_damping(&self) -> f64 {
        self.omega_big.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    }
}

pub fn dissipative_matrix(h: &CouplingMatrix, gamma: &RMat) -> Result<DissipativeMatrix> {
    let dm = DissipativeMatrix::allow_undamped(h, gamma)?;
    if let Some((index, z)) = dm
        .omega_big
        .iter()
        .enumerate()
        .find(|(_, z)| z.re <= UNDAMPED_TOL)
    {
        return Err(Error::NonDissipativeMode { index, re: z.re });
    }
    Ok(dm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Weak,
    Strong,
}

/// Strong when N·max|λ| ≥ θ·min ω.
pub fn coupling_regime(spec: &NetworkSpec, theta: f64) -> Regime {
    let n = spec.n() as f64;
    let lmax = spec.lambda.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let wmin = spec.omega.iter().copied().fold(f64::INFINITY, f64::min);
    if n * lmax >= theta * wmin {
        Regime::Strong
    } else {
        Regime::Weak
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_c};
    use proptest::prelude::*;

    #[test]
    fn hamiltonian_transcription() {
        let s = NetworkSpec::all_to_all(2, 1.0, 0.1).unwrap();
        assert_eq!(build_hamiltonian(&s).h, RMat::from_row_slice(2, 2, &[1.0, 0.1, 0.1, 1.0]));
        let s = NetworkSpec::new(vec![2.5], RMat::zeros(1, 1)).unwrap();
        assert_eq!(build_hamiltonian(&s).h, RMat::from_element(1, 1, 2.5));
        let s = NetworkSpec::all_to_all(3, 1.0, 0.2).unwrap();
        let h = build_hamiltonian(&s).h;
        assert!(h.iter().enumerate().all(|(k, x)| if k % 4 == 0 { *x == 1.0 } else { *x == 0.2 }));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let asym = RMat::from_row_slice(2, 2, &[0.0, 0.1, 0.2, 0.0]);
        assert!(matches!(NetworkSpec::new(vec![1.0, 1.0], asym), Err(Error::Validation { .. })));
        assert!(matches!(
            NetworkSpec::new(vec![1.0, -1.0], RMat::zeros(2, 2)),
            Err(Error::Validation { .. })
        ));
        assert!(matches!(
            NetworkSpec::new(vec![1.0, 1.0], RMat::zeros(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn two_by_two_normal_modes() {
        let h = build_hamiltonian(&NetworkSpec::all_to_all(2, 1.0, 0.1).unwrap());
        let nm = normal_modes(&h).unwrap();
        assert!((nm.varpi[0] - 0.9).abs() < 1e-14 && (nm.varpi[1] - 1.1).abs() < 1e-14);
        let s = 0.5_f64.sqrt();
        assert!((nm.c[(0, 0)] - s).abs() < 1e-14 && (nm.c[(0, 1)] + s).abs() < 1e-14);
        assert!((nm.c[(1, 0)] - s).abs() < 1e-14 && (nm.c[(1, 1)] - s).abs() < 1e-14);
    }

    #[test]
    fn degenerate_all_to_all_spectrum() {
        let h = build_hamiltonian(&NetworkSpec::all_to_all(3, 1.0, 0.2).unwrap());
        let nm = normal_modes(&h).unwrap();
        for (got, want) in nm.varpi.iter().zip([0.8, 0.8, 1.4]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn diagonal_hamiltonian_is_its_own_normal_form() {
        let s = NetworkSpec::new(vec![3.0, 1.0, 2.0], RMat::zeros(3, 3)).unwrap();
        let nm = normal_modes(&build_hamiltonian(&s)).unwrap();
        assert_eq!(nm.varpi.as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(nm.c, RMat::from_row_slice(3, 3, &[0., 1., 0., 0., 0., 1., 1., 0., 0.]));
    }

    #[test]
    fn negative_normal_mode_rejected() {
        let h = build_hamiltonian(&NetworkSpec::all_to_all(2, 1.0, 1.5).unwrap());
        assert!(matches!(normal_modes(&h), Err(Error::NonPositiveNormalMode { index: 0, .. })));
    }

    #[test]
    fn scalar_dissipative_matrix() {
        let h = build_hamiltonian(&NetworkSpec::new(vec![2.0], RMat::zeros(1, 1)).unwrap());
        let dm = dissipative_matrix(&h, &RMat::from_element(1, 1, 0.3)).unwrap();
        assert_eq!(dm.omega_big[0], Complex64::new(0.15, 2.0));
        assert_eq!(dm.d[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn zero_damping_is_not_dissipative() {
        let h = build_hamiltonian(&NetworkSpec::all_to_all(2, 1.0, 0.1).unwrap());
        assert!(matches!(
            dissipative_matrix(&h, &RMat::zeros(2, 2)),
            Err(Error::NonDissipativeMode { .. })
        ));
        assert!(DissipativeMatrix::allow_undamped(&h, &RMat::zeros(2, 2)).is_ok());
    }

    #[test]
    fn white_noise_identical_shifts_spectrum() {
        // Γ = Nγ I gives Ω = Nγ/2 + iϖ
        let (n, gamma) = (2usize, 0.05);
        let h = build_hamiltonian(&NetworkSpec::all_to_all(n, 1.0, 0.2).unwrap());
        let dm = dissipative_matrix(&h, &(RMat::identity(n, n) * (n as f64 * gamma))).unwrap();
        assert!((dm.omega_big[0] - Complex64::new(gamma, 0.8)).norm() < 1e-13);
        assert!((dm.omega_big[1] - Complex64::new(gamma, 1.2)).norm() < 1e-13);
    }

    #[test]
    fn regime_classifier() {
        let weak = NetworkSpec::all_to_all(2, 1.0, 0.001).unwrap();
        assert_eq!(coupling_regime(&weak, REGIME_THRESHOLD), Regime::Weak);
        let strong = NetworkSpec::all_to_all(10, 1.0, 0.05).unwrap();
        assert_eq!(coupling_regime(&strong, REGIME_THRESHOLD), Regime::Strong);
        let single = NetworkSpec::new(vec![1.0], RMat::zeros(1, 1)).unwrap();
        assert_eq!(coupling_regime(&single, REGIME_THRESHOLD), Regime::Weak);
    }

    proptest! {
        #[test]
        fn normal_modes_invariants(
            n in 1usize..6,
            seed in proptest::collection::vec(-0.2f64..0.2, 36),
            omega in proptest::collection::vec(1.0f64..2.0, 6),
        ) {
            let lambda = RMat::from_fn(n, n, |i, j| {
                if i == j { 0.0 } else { seed[6 * i.min(j) + i.max(j)] }
            });
            let spec = NetworkSpec::new(omega[..n].to_vec(), lambda).unwrap();
            let h = build_hamiltonian(&spec);
            let nm = normal_modes(&h).unwrap();
            prop_assert!(max_abs(&(&nm.c * nm.c.transpose() - RMat::identity(n, n))) < 1e-12);
            let recon = nm.c.transpose() * RMat::from_diagonal(&nm.varpi) * &nm.c;
            prop_assert!(max_abs(&(recon - &h.h)) < 1e-10);
            for w in nm.varpi.as_slice().windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }

        #[test]
        fn dissipative_reconstruction(
            n in 1usize..6,
            seed in proptest::collection::vec(-0.3f64..0.3, 36),
            rates in proptest::collection::vec(0.01f64..0.5, 6),
        ) {
            let lambda = RMat::from_fn(n, n, |i, j| {
                if i == j { 0.0 } else { seed[6 * i.min(j) + i.max(j)] }
            });
            let spec = NetworkSpec::new(vec![1.5; n], lambda).unwrap();
            let h = build_hamiltonian(&spec);
            let gamma = RMat::from_diagonal(&DVector::from_column_slice(&rates[..n]));
            let dm = dissipative_matrix(&h, &gamma).unwrap();
            let recon = &dm.d * CMat::from_diagonal(&dm.omega_big) * &dm.d_inv;
            prop_assert!(max_abs_c(&(recon - &dm.hd)) < 1e-9);
            prop_assert!(dm.min_damping() > 0.0);
        }
    }
}
