//! Stationary width Π from (ℋᴰ)* Π + Π (ℋᴰ)ᵀ = Υ + Υᵀ.

use crate::error::{Error, Result};
use crate::linalg::{self, complexify, conj, max_abs_c, CMat, CVec, RMat};
use crate::network::DissipativeMatrix;
use nalgebra::SymmetricEigen;

const SINGULAR_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryWidth {
    pub pi: CMat,
    /// Max-norm defect of the stationary equation.
    pub residual: f64,
}

impl StationaryWidth {
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs_c(&(&self.pi - self.pi.adjoint()))
    }

    /// Smallest eigenvalue of the Hermitian part of Π.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.pi + self.pi.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.min()
    }
}

/// `I ⊗ M + N ⊗ I`, the operator of `X ↦ M X + X Nᵀ` under column-stacking vec.
pub fn kron_sum(m: &CMat, n: &CMat) -> Result<CMat> {
    if !m.is_square() || !n.is_square() || m.nrows() != n.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: if n.nrows() != m.nrows() { n.nrows() } else { n.ncols() },
        });
    }
    Ok(linalg::kron_sum(m, n))
}

/// min |Ω_m + Ω_n*| over all pairs.
pub fn min_gap(dm: &DissipativeMatrix) -> f64 {
    let w = &dm.omega_big;
    let mut gap = f64::INFINITY;
    for a in w.iter() {
        for b in w.iter() {
            gap = gap.min((a + b.conj()).norm());
        }
    }
    gap
}

fn check_inputs(dm: &DissipativeMatrix, upsilon: &RMat) -> Result<CMat> {
    let n = dm.n();
    if upsilon.nrows() != n || upsilon.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: upsilon.nrows() });
    }
    let gap = min_gap(dm);
    if gap < SINGULAR_GAP {
        return Err(Error::SingularSystem { min_gap: gap });
    }
    Ok(complexify(&(upsilon + upsilon.transpose())))
}

/// Max-norm of (ℋᴰ)* Π + Π (ℋᴰ)ᵀ − (Υ + Υᵀ).
pub fn residual(hd: &CMat, pi: &CMat, upsilon: &RMat) -> f64 {
    let lhs = conj(hd) * pi + pi * hd.transpose();
    max_abs_c(&(lhs - complexify(&(upsilon + upsilon.transpose()))))
}

/// Dense solve of the N²×N² vectorised system.
pub fn solve_pi_vec(dm: &DissipativeMatrix, upsilon: &RMat) -> Result<StationaryWidth> {
    let q = check_inputs(dm, upsilon)?;
    let n = dm.n();
    let op = kron_sum(&conj(&dm.hd), &dm.hd)?;
    let rhs = CVec::from_column_slice(q.as_slice());
    let sol = op
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem { min_gap: min_gap(dm) })?;
    let pi = CMat::from_column_slice(n, n, sol.as_slice());
    let residual = residual(&dm.hd, &pi, upsilon);
    Ok(StationaryWidth { pi, residual })
}

/// Solve in the eigenbasis of ℋᴰ: Π = D* X Dᵀ with
/// X_mn = [D⁻¹* (Υ+Υᵀ) D⁻¹ᵀ]_mn / (Ω_m* + Ω_n).
pub fn solve_pi_eigen(dm: &DissipativeMatrix, upsilon: &RMat) -> Result<StationaryWidth> {
    let q = check_inputs(dm, upsilon)?;
    let w = &dm.omega_big;
    let m = conj(&dm.d_inv) * q * dm.d_inv.transpose();
    let x = CMat::from_fn(dm.n(), dm.n(), |a, b| m[(a, b)] / (w[a].conj() + w[b]));
    let pi = conj(&dm.d) * x * dm.d.transpose();
    let residual = residual(&dm.hd, &pi, upsilon);
    Ok(StationaryWidth { pi, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigen_general, max_abs};
    use crate::network::{build_hamiltonian, dissipative_matrix, NetworkSpec};
    use crate::reservoirs::{rates_distinct, Bath, Profile, ReservoirSpec};
    use nalgebra::DVector;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn scalar(omega: f64, gamma: f64) -> DissipativeMatrix {
        let h = build_hamiltonian(&NetworkSpec::new(vec![omega], RMat::zeros(1, 1)).unwrap());
        dissipative_matrix(&h, &RMat::from_element(1, 1, gamma)).unwrap()
    }

    #[test]
    fn kron_sum_small_cases() {
        let k = kron_sum(&CMat::from_element(1, 1, c(2.0)), &CMat::from_element(1, 1, c(3.0))).unwrap();
        assert_eq!(k[(0, 0)], c(5.0));
        let m = CMat::from_diagonal(&DVector::from_vec(vec![c(1.0), c(2.0)]));
        let n = CMat::from_diagonal(&DVector::from_vec(vec![c(10.0), c(20.0)]));
        let k = kron_sum(&m, &n).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| k[(i, i)].re).collect();
        assert_eq!(diag, vec![11.0, 12.0, 21.0, 22.0]);
        assert!(max_abs_c(&(&k - CMat::from_diagonal(&k.diagonal()))) == 0.0);
        assert!(kron_sum(&m, &CMat::zeros(3, 3)).is_err());
    }

    #[test]
    fn kron_sum_spectrum_is_pairwise_sums() {
        let m = CMat::from_fn(3, 3, |i, j| Complex64::new((i * 3 + j) as f64 * 0.1 + 0.3, (i as f64 - j as f64) * 0.2));
        let n = CMat::from_fn(3, 3, |i, j| Complex64::new(((i + 2 * j) % 3) as f64 - 0.5, 0.1 * j as f64));
        let (em, _) = eigen_general(&m).unwrap();
        let (en, _) = eigen_general(&n).unwrap();
        let (ek, _) = eigen_general(&kron_sum(&m, &n).unwrap()).unwrap();
        let mut used = vec![false; 9];
        for a in em.iter() {
            for b in en.iter() {
                let s = a + b;
                let hit = (0..9).find(|&k| !used[k] && (ek[k] - s).norm() < 1e-9).expect("missing pair sum");
                used[hit] = true;
            }
        }
    }

    #[test]
    fn scalar_width_is_twice_occupation() {
        let dm = scalar(1.3, 0.2);
        let nbar = 0.7;
        let ups = RMat::from_element(1, 1, 0.2 * nbar);
        for sol in [solve_pi_vec(&dm, &ups).unwrap(), solve_pi_eigen(&dm, &ups).unwrap()] {
            assert!((sol.pi[(0, 0)] - c(2.0 * nbar)).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_diffusion_gives_zero_width() {
        let h = build_hamiltonian(&NetworkSpec::chain(3, 1.0, 0.2).unwrap());
        let dm = dissipative_matrix(&h, &(RMat::identity(3, 3) * 0.1)).unwrap();
        let sol = solve_pi_vec(&dm, &RMat::zeros(3, 3)).unwrap();
        assert_eq!(max_abs_c(&sol.pi), 0.0);
    }

    #[test]
    fn identical_white_noise_equal_occupation() {
        let n = 2;
        let spec = NetworkSpec::all_to_all(n, 1.0, 0.2).unwrap();
        let h = build_hamiltonian(&spec);
        let res = ReservoirSpec::identical(n, Profile::WhiteNoise { gamma: 0.05 }, Bath::Occupation(0.5));
        let modes = crate::network::normal_modes(&h).unwrap();
        let r = rates_distinct(&res, &modes).unwrap();
        let dm = dissipative_matrix(&h, &r.gamma).unwrap();
        let sol = solve_pi_eigen(&dm, &r.upsilon).unwrap();
        assert!(max_abs_c(&(&sol.pi - CMat::identity(n, n) * c(1.0))) < 1e-12);
    }

    #[test]
    fn diagonal_generator_closed_form() {
        let w = [Complex64::new(0.2, 1.0), Complex64::new(0.3, 1.5)];
        let dm = DissipativeMatrix {
            hd: CMat::from_diagonal(&DVector::from_vec(w.to_vec())),
            d: CMat::identity(2, 2),
            d_inv: CMat::identity(2, 2),
            omega_big: DVector::from_vec(w.to_vec()),
        };
        let ups = RMat::from_row_slice(2, 2, &[0.4, 0.1, 0.1, 0.6]);
        let sol = solve_pi_eigen(&dm, &ups).unwrap();
        assert!((sol.pi[(0, 0)] - c(0.8 / 0.4)).norm() < 1e-14);
        assert!((sol.pi[(1, 1)] - c(1.2 / 0.6)).norm() < 1e-14);
        assert!((sol.pi[(0, 1)] - c(0.2) / (w[0].conj() + w[1])).norm() < 1e-14);
    }

    #[test]
    fn undamped_mode_is_singular() {
        let h = build_hamiltonian(&NetworkSpec::all_to_all(2, 1.0, 0.1).unwrap());
        let dm = DissipativeMatrix::allow_undamped(&h, &RMat::zeros(2, 2)).unwrap();
        assert!(matches!(solve_pi_vec(&dm, &RMat::zeros(2, 2)), Err(Error::SingularSystem { .. })));
        assert!(matches!(solve_pi_eigen(&dm, &RMat::zeros(2, 2)), Err(Error::SingularSystem { .. })));
    }

    /// The elementwise formula Π_ℓℓ' = Σ Q_{m'n'}/(Ω_m + Ω_n*) D_ℓ'm D⁻¹_mm' (D_ℓn D⁻¹_nn')*.
    fn literal_sum(dm: &DissipativeMatrix, ups: &RMat) -> CMat {
        let n = dm.n();
        let (d, di, w) = (&dm.d, &dm.d_inv, &dm.omega_big);
        CMat::from_fn(n, n, |l, lp| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                for nn in 0..n {
                    for mp in 0..n {
                        for np in 0..n {
                            let q = ups[(mp, np)] + ups[(np, mp)];
                            acc += c(q) / (w[m] + w[nn].conj()) * d[(lp, m)] * di[(m, mp)] * (d[(l, nn)] * di[(nn, np)]).conj();
                        }
                    }
                }
            }
            acc
        })
    }

    fn random_instance(n: usize, vals: &[f64]) -> (DissipativeMatrix, RMat) {
        let lambda = RMat::from_fn(n, n, |i, j| if i == j { 0.0 } else { 0.3 * vals[6 * i.min(j) + i.max(j)] });
        let omega: Vec<f64> = (0..n).map(|i| 1.5 + 0.5 * vals[36 + i]).collect();
        let h = build_hamiltonian(&NetworkSpec::new(omega, lambda).unwrap());
        let gamma = RMat::from_diagonal(&DVector::from_fn(n, |i, _| 0.05 + 0.2 * vals[42 + i].abs()));
        let a = RMat::from_fn(n, n, |i, j| vals[48 + (i * n + j) % 36]);
        let ups = &a * a.transpose() * 0.1;
        (dissipative_matrix(&h, &gamma).unwrap(), ups)
    }

    #[test]
    fn literal_elementwise_formula_matches() {
        let vals: Vec<f64> = (0..90).map(|k| ((k as f64) * 0.731).sin()).collect();
        let (dm, ups) = random_instance(4, &vals);
        let sol = solve_pi_eigen(&dm, &ups).unwrap();
        assert!(max_abs_c(&(literal_sum(&dm, &ups) - &sol.pi)) < 1e-11);
    }

    #[test]
    fn identical_reservoirs_give_real_symmetric_width() {
        let spec = NetworkSpec::chain(4, 1.0, 0.25).unwrap();
        let h = build_hamiltonian(&spec);
        let modes = crate::network::normal_modes(&h).unwrap();
        let res = ReservoirSpec::identical(4, Profile::WhiteNoise { gamma: 0.05 }, Bath::Temperature(1.5));
        let r = rates_distinct(&res, &modes).unwrap();
        let dm = dissipative_matrix(&h, &r.gamma).unwrap();
        let sol = solve_pi_eigen(&dm, &r.upsilon).unwrap();
        let re = sol.pi.map(|z| z.re);
        assert!(sol.pi.iter().all(|z| z.im.abs() < 1e-10));
        assert!(max_abs(&(&re - re.transpose())) < 1e-10);
    }

    proptest! {
        #[test]
        fn routes_agree(n in 1usize..7, vals in proptest::collection::vec(-1.0f64..1.0, 90)) {
            let (dm, ups) = random_instance(n, &vals);
            let a = solve_pi_vec(&dm, &ups).unwrap();
            let b = solve_pi_eigen(&dm, &ups).unwrap();
            prop_assert!(max_abs_c(&(&a.pi - &b.pi)) < 1e-9);
            prop_assert!(a.residual < 1e-9 && b.residual < 1e-9);
            prop_assert!(b.hermiticity_defect() < 1e-10);
            prop_assert!(b.min_eigenvalue() > -1e-10);
        }
    }
}
