use crate::space::{zero, FockSpace};
use crate::states::TruncatedDensityMatrix;
use crate::CMat;
use num_complex::Complex64;

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// ⟨x|e^{ηa†} e^{−η*a}|y⟩ on one mode; exact inside the cutoff since only
/// levels k ≤ min(x, y) contribute.
fn normal_ordered_displacement(n_max: usize, eta: Complex64) -> CMat {
    let f = factorials(n_max);
    let pw = |z: Complex64, p: usize| if p == 0 { Complex64::new(1.0, 0.0) } else { z.powu(p as u32) };
    CMat::from_fn(n_max + 1, n_max + 1, |x, y| {
        let mut acc = zero();
        for k in 0..=x.min(y) {
            let c = (f[x] / f[k]).sqrt() * (f[y] / f[k]).sqrt() / (f[x - k] * f[y - k]);
            acc += pw(eta, x - k) * pw(-eta.conj(), y - k) * c;
        }
        acc
    })
}

/// χ(η) = Tr[ρ e^{ηa†} e^{−η*a}].
pub fn oracle_char(state: &TruncatedDensityMatrix, eta: &[Complex64]) -> Complex64 {
    let sp = &state.space;
    assert_eq!(eta.len(), sp.modes, "η has the wrong number of modes");
    let estimate = char_tail_estimate(state, eta);
    if estimate > 1e-8 {
        log::warn!("oracle χ truncation estimate {estimate:e} at η = {eta:?}");
    }
    let ops: Vec<CMat> = eta.iter().map(|e| normal_ordered_displacement(sp.n_max, *e)).collect();
    let d = sp.dim();
    let occ: Vec<Vec<usize>> = (0..d).map(|i| (0..sp.modes).map(|m| sp.occupation(i, m)).collect()).collect();
    let mut acc = zero();
    for i in 0..d {
        for j in 0..d {
            let r = state.rho[(i, j)];
            if r == zero() {
                continue;
            }
            let mut o = Complex64::new(1.0, 0.0);
            for (m, op) in ops.iter().enumerate() {
                o *= op[(occ[j][m], occ[i][m])];
            }
            acc += r * o;
        }
    }
    acc
}

/// Σ_m |η_m|² n_max p_m(n_max): a rough size for what the cutoff hides from χ.
pub fn char_tail_estimate(state: &TruncatedDensityMatrix, eta: &[Complex64]) -> f64 {
    let sp = &state.space;
    eta.iter()
        .enumerate()
        .map(|(m, e)| e.norm_sqr() * sp.n_max as f64 * sp.top_level_probability(&state.rho, m))
        .sum()
}

/// ⟨a_m⟩
pub fn annihilation_moment(state: &TruncatedDensityMatrix, mode: usize) -> Complex64 {
    state.space.left_a(mode, &state.rho).trace()
}

/// ⟨a†_m a_n⟩
pub fn number_moment(state: &TruncatedDensityMatrix, m: usize, n: usize) -> Complex64 {
    let sp = &state.space;
    sp.left_adag(m, &sp.left_a(n, &state.rho)).trace()
}

pub fn oracle_purity(state: &TruncatedDensityMatrix) -> f64 {
    let r = &state.rho;
    let mut acc = 0.0;
    for i in 0..r.nrows() {
        for j in 0..r.ncols() {
            acc += (r[(i, j)] * r[(j, i)]).re;
        }
    }
    acc
}

/// Reduced state on the modes in `keep` (kept in ascending order).
pub fn oracle_partial_trace(state: &TruncatedDensityMatrix, keep: &[usize]) -> TruncatedDensityMatrix {
    let sp = &state.space;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let reduced = FockSpace::new(keep.len(), sp.n_max);
    let traced: Vec<usize> = (0..sp.modes).filter(|m| !keep.contains(m)).collect();
    let d = sp.dim();
    let sub = |i: usize, modes: &[usize]| -> Vec<usize> { modes.iter().map(|&m| sp.occupation(i, m)).collect() };
    let mut out = CMat::zeros(reduced.dim(), reduced.dim());
    for i in 0..d {
        let ti = sub(i, &traced);
        let ki = reduced.index(&sub(i, &keep));
        for j in 0..d {
            if sub(j, &traced) == ti {
                out[(ki, reduced.index(&sub(j, &keep)))] += state.rho[(i, j)];
            }
        }
    }
    TruncatedDensityMatrix { space: reduced, rho: out, t: state.t }
}
