//! Randomized consistency checks driven by `--seed`.

use bosonet::linalg::{CVec, RMat};
use bosonet::metrics::{decay_function, purity};
use bosonet::network::{build_hamiltonian, dissipative_matrix, NetworkSpec};
use bosonet::phase_space::{char_function, p_function_with_width, wigner_complex, CoherentMixture, Component};
use bosonet::propagation::Dynamics;
use bosonet::stationary::{solve_pi_eigen, solve_pi_vec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.worst <= self.tolerance
    }
}

fn random_dynamics(rng: &mut ChaCha8Rng, n: usize) -> Dynamics {
    let omega: Vec<f64> = (0..n).map(|_| rng.gen_range(0.8..2.0)).collect();
    let mut lambda = RMat::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = rng.gen_range(-0.6..0.6) / n as f64;
            lambda[(i, j)] = v;
            lambda[(j, i)] = v;
        }
    }
    let h = build_hamiltonian(&NetworkSpec::new(omega, lambda).expect("valid random network"));
    let a = RMat::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3));
    let b = RMat::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3));
    let gamma = &a * a.transpose() + RMat::identity(n, n) * 0.05;
    let upsilon = &b * b.transpose();
    Dynamics::new(dissipative_matrix(&h, &gamma).expect("damped"), upsilon).expect("stationary width")
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> CoherentMixture {
    let mut c = || Complex64::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
    let comps = (0..2).map(|_| Component { amplitude: c(), beta: CVec::from_fn(n, |_, _| c()) }).collect::<Vec<_>>();
    CoherentMixture::pure(comps).expect("random components are never exactly opposite")
}

pub fn selftest(seed: u64, cases: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![
        Check { name: "stationary width routes agree", worst: 0.0, tolerance: 1e-9 },
        Check { name: "chi(0) = 1", worst: 0.0, tolerance: 1e-10 },
        Check { name: "P with J+I equals W", worst: 0.0, tolerance: 1e-12 },
        Check { name: "decay function within (0, 1]", worst: 0.0, tolerance: 1e-12 },
        Check { name: "purity within (0, 1]", worst: 0.0, tolerance: 1e-10 },
    ];
    for k in 0..cases {
        let n = 1 + k % 4;
        let dy = random_dynamics(&mut rng, n);
        let pv = solve_pi_vec(&dy.dm, &dy.upsilon).expect("solvable");
        let pe = solve_pi_eigen(&dy.dm, &dy.upsilon).expect("solvable");
        checks[0].worst = checks[0].worst.max((&pv.pi - &pe.pi).iter().map(|z| z.norm()).fold(0.0, f64::max));

        let state = random_state(&mut rng, n);
        let b = dy.bundle(rng.gen_range(0.0..20.0)).expect("t ≥ 0");
        let chi0 = char_function(&state, &CVec::zeros(n), &b).expect("dims");
        checks[1].worst = checks[1].worst.max((chi0 - Complex64::new(1.0, 0.0)).norm());

        let xi = CVec::from_fn(n, |_, _| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let w = wigner_complex(&state, &xi, &b).expect("dims");
        let p = p_function_with_width(&state, &xi, &b, &b.j_tilde).expect("dims");
        checks[2].worst = checks[2].worst.max((w - p).norm());

        let d = decay_function(&state, 0, 1, &b).expect("two components");
        checks[3].worst = checks[3].worst.max(if d > 0.0 { (d - 1.0).max(0.0) } else { 1.0 });

        let pur = purity(&state, &b).expect("dims");
        checks[4].worst = checks[4].worst.max(if pur > 0.0 { (pur - 1.0).max(0.0) } else { 1.0 });
    }
    checks
}
