//! Closed-form results against the truncated Fock-space master equation.

use bosonet::linalg::{CVec, RMat};
use bosonet::metrics::{concurrence, linear_entropy};
use bosonet::network::*;
use bosonet::phase_space::*;
use bosonet::propagation::Dynamics;
use bosonet_oracle as oracle;
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single_mode(gamma: f64, nbar: f64) -> (RMat, RMat, RMat, Dynamics) {
    let h = build_hamiltonian(&NetworkSpec::new(vec![1.0], RMat::zeros(1, 1)).unwrap());
    let g = RMat::from_element(1, 1, gamma);
    let u = RMat::from_element(1, 1, gamma * nbar);
    let dm = dissipative_matrix(&h, &g).unwrap();
    (h.h.clone(), g, u.clone(), Dynamics::new(dm, u).unwrap())
}

fn oracle_state(state: &CoherentMixture, n_max: usize) -> oracle::TruncatedDensityMatrix {
    let space = oracle::FockSpace::new(state.n(), n_max);
    let comps = &state.branches()[0].components;
    let terms: Vec<_> = comps
        .iter()
        .map(|cm| (cm.amplitude, oracle::product_coherent_ket(&space, cm.beta.as_slice()).unwrap()))
        .collect();
    oracle::ket_density(&space, &oracle::superposition(&terms).unwrap(), 0.0)
}

#[test]
fn single_mode_cat_char_matches_oracle() {
    let (h, g, u, dy) = single_mode(0.2, 0.5);
    let cat = build_cat_family(1, 1, 0, c(1.0, 0.4), c(0.0, 0.0), 1).unwrap();
    let rho0 = oracle_state(&cat, 20);
    let traj = oracle::evolve_master(&rho0, &h, &g, &u, &[1.5]).unwrap();
    let st = &traj.states[0];
    let b = dy.bundle(1.5).unwrap();
    let axis = [-0.8, -0.4, 0.0, 0.4, 0.8];
    for x in axis {
        for y in axis {
            let analytic = char_function(&cat, &CVec::from_element(1, c(x, y)), &b).unwrap();
            assert!((analytic - oracle::oracle_char(st, &[c(x, y)])).norm() < 1e-6);
        }
    }
}

#[test]
fn single_photon_char_matches_oracle() {
    let gamma = 0.3;
    let (h, g, u, dy) = single_mode(gamma, 0.0);
    let t = 2f64.ln() / gamma;
    let space = oracle::FockSpace::new(1, 6);
    let rho0 = oracle::ket_density(&space, &oracle::fock_ket(&space, &[(vec![1], c(1.0, 0.0))]).unwrap(), 0.0);
    let traj = oracle::evolve_master(&rho0, &h, &g, &u, &[t]).unwrap();
    let fock = FockMixture::number_state(vec![1]);
    let b = dy.bundle(t).unwrap();
    for eta in [c(0.0, 0.0), c(0.5, 0.0), c(-0.3, 0.9), c(1.2, -0.4)] {
        let analytic = char_function_fock(&fock, &CVec::from_element(1, eta), &b).unwrap();
        assert!((analytic - oracle::oracle_char(&traj.states[0], &[eta])).norm() < 1e-8);
    }
}

#[test]
fn cat_linear_entropy_matches_oracle() {
    let gamma = 0.25;
    let (h, g, u, dy) = single_mode(gamma, 0.5);
    let t = 0.5 / gamma;
    let cat = build_cat_family(1, 1, 0, c(1.5, 0.0), c(0.0, 0.0), -1).unwrap();
    let traj = oracle::evolve_master(&oracle_state(&cat, 30), &h, &g, &u, &[t]).unwrap();
    let s = linear_entropy(&cat, &dy.bundle(t).unwrap()).unwrap();
    assert!((s - (1.0 - oracle::oracle_purity(&traj.states[0]))).abs() < 1e-4);
}

#[test]
fn concurrence_matches_partial_trace() {
    let alpha = c(2f64.sqrt(), 0.0);
    let state = CoherentMixture::pure(vec![
        Component { amplitude: c(1.0, 0.0), beta: CVec::from_vec(vec![alpha, alpha]) },
        Component { amplitude: c(1.0, 0.0), beta: CVec::from_vec(vec![-alpha, -alpha]) },
    ])
    .unwrap();
    let h = build_hamiltonian(&NetworkSpec::all_to_all(2, 1.0, 0.2).unwrap());
    let dm = DissipativeMatrix::allow_undamped(&h, &RMat::zeros(2, 2)).unwrap();
    let dy = Dynamics::allow_undamped(dm, RMat::zeros(2, 2)).unwrap();
    let b = dy.bundle(0.0).unwrap();
    let reduced = oracle::oracle_partial_trace(&oracle_state(&state, 22), &[0]);
    let expect = 1.0 - oracle::oracle_purity(&reduced);
    let got = concurrence(&state, &[0], &b).unwrap();
    assert!((got - expect).abs() < 1e-4, "{got} vs {expect}");
    assert!((got - concurrence(&state, &[1], &b).unwrap()).abs() < 1e-12);
}

#[test]
fn theta_quadrature_reproduces_single_photon() {
    // |1⟩ ∝ ∮ e^{−iθ} |r e^{iθ}⟩ dθ, sampled at M points
    let (r, m) = (0.1, 8);
    let comps: Vec<Component> = (0..m)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / m as f64;
            Component { amplitude: Complex64::from_polar(1.0, -th), beta: CVec::from_element(1, Complex64::from_polar(r, th)) }
        })
        .collect();
    let coh = CoherentMixture::pure(comps).unwrap();
    let fock = FockMixture::number_state(vec![1]);
    let (_, _, _, dy) = single_mode(0.2, 0.4);
    for t in [0.0, 0.7, 3.0] {
        let b = dy.bundle(t).unwrap();
        for eta in [c(0.3, 0.1), c(-0.8, 0.5), c(0.0, 1.1)] {
            let e = CVec::from_element(1, eta);
            let a = char_function(&coh, &e, &b).unwrap();
            let f = char_function_fock(&fock, &e, &b).unwrap();
            assert!((a - f).norm() < 1e-8);
        }
    }
}
