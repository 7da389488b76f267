//! Initial states and the characteristic, P and Wigner functions at time t.
//!
//! All component sums run in log space: coherent overlaps of well separated
//! components underflow long before the exponentials that multiply them.

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::propagation::{k_vector, PropagatorBundle};
use gauss_quad::GaussHermite;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;
use std::num::NonZeroUsize;

const WEIGHT_TOL: f64 = 1e-12;
const SINGULAR_DET: f64 = 1e-14;

/// ln⟨a|b⟩ for multimode coherent states.
pub fn log_overlap(a: &CVec, b: &CVec) -> Complex64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| -0.5 * x.norm_sqr() - 0.5 * y.norm_sqr() + x.conj() * y)
        .sum()
}

fn ln_c(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        Complex64::new(f64::NEG_INFINITY, 0.0)
    } else {
        z.ln()
    }
}

/// Exponential that maps a −∞ real part to an exact zero.
fn exp_c(z: Complex64) -> Complex64 {
    if z.re == f64::NEG_INFINITY {
        Complex64::new(0.0, 0.0)
    } else {
        z.exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub amplitude: Complex64,
    pub beta: CVec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub components: Vec<Component>,
}

impl Branch {
    /// ln(Λ*_r Λ_s ⟨β^r|β^s⟩).
    pub fn log_coefficient(&self, r: usize, s: usize) -> Complex64 {
        let (a, b) = (&self.components[r], &self.components[s]);
        ln_c(a.amplitude.conj() * b.amplitude) + log_overlap(&a.beta, &b.beta)
    }

    fn norm_sqr(&self) -> f64 {
        let k = self.components.len();
        let mut total = Complex64::new(0.0, 0.0);
        for r in 0..k {
            for s in 0..k {
                total += exp_c(self.log_coefficient(r, s));
            }
        }
        total.re
    }
}

/// Statistical mixture of superpositions of multimode coherent states.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentMixture {
    n: usize,
    branches: Vec<Branch>,
}

impl CoherentMixture {
    /// Checks the weights and normalises each branch.
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let first = branches
            .first()
            .and_then(|b| b.components.first())
            .ok_or_else(|| Error::validation("state", "at least one component is required"))?;
        let n = first.beta.len();
        let total: f64 = branches.iter().map(|b| b.weight).sum();
        if branches.iter().any(|b| !(b.weight >= 0.0)) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::validation("state.weights", format!("weights must be ≥ 0 and sum to 1, got {total}")));
        }
        let mut out = Vec::with_capacity(branches.len());
        for (j, mut branch) in branches.into_iter().enumerate() {
            if branch.components.is_empty() {
                return Err(Error::validation(format!("state.branches[{j}]"), "empty superposition"));
            }
            if let Some(c) = branch.components.iter().find(|c| c.beta.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: c.beta.len() });
            }
            let scale: f64 = branch.components.iter().map(|c| c.amplitude.norm_sqr()).sum();
            let norm = branch.norm_sqr();
            if !(norm > 1e-13 * scale) {
                return Err(Error::NullState);
            }
            let f = Complex64::new(norm.sqrt().recip(), 0.0);
            for c in &mut branch.components {
                c.amplitude *= f;
            }
            out.push(branch);
        }
        Ok(CoherentMixture { n, branches: out })
    }

    pub fn pure(components: Vec<Component>) -> Result<Self> {
        Self::new(vec![Branch { weight: 1.0, components }])
    }

    pub fn coherent(beta: CVec) -> Self {
        let n = beta.len();
        CoherentMixture {
            n,
            branches: vec![Branch {
                weight: 1.0,
                components: vec![Component { amplitude: Complex64::new(1.0, 0.0), beta }],
            }],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Centroids K(r; t) = Θ(t) β^r for every component, branch by branch.
    pub fn centroids(&self, bundle: &PropagatorBundle) -> Vec<Vec<CVec>> {
        self.branches
            .iter()
            .map(|b| b.components.iter().map(|c| k_vector(&bundle.theta, &c.beta)).collect())
            .collect()
    }
}

/// 𝒩(|α..α, −α..−α, β..β⟩ ± |−α..−α, α..α, β..β⟩) with `r` leading α's and
/// `s` following −α's in the first term.
pub fn build_cat_family(
    n: usize,
    r: usize,
    s: usize,
    alpha: Complex64,
    beta: Complex64,
    sign: i8,
) -> Result<CoherentMixture> {
    if n == 0 {
        return Err(Error::validation("state.n", "at least one oscillator is required"));
    }
    if r + s > n {
        return Err(Error::validation("state.r", format!("r + s = {} exceeds n = {n}", r + s)));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::validation("state.sign", "sign must be +1 or -1"));
    }
    let first = CVec::from_fn(n, |m, _| if m < r { alpha } else if m < r + s { -alpha } else { beta });
    let second = CVec::from_fn(n, |m, _| if m < r { -alpha } else if m < r + s { alpha } else { beta });
    CoherentMixture::pure(vec![
        Component { amplitude: Complex64::new(1.0, 0.0), beta: first },
        Component { amplitude: Complex64::new(sign as f64, 0.0), beta: second },
    ])
}

fn quad_form(eta: &CVec, j: &CMat) -> Complex64 {
    // η J η† = Σ η_m J_mn η*_n
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..eta.len() {
        for n in 0..eta.len() {
            acc += eta[m] * j[(m, n)] * eta[n].conj();
        }
    }
    acc
}

fn check_dim(n: usize, found: usize) -> Result<()> {
    if n != found {
        return Err(Error::DimensionMismatch { expected: n, found });
    }
    Ok(())
}

/// Normally ordered characteristic function Tr[ρ(t) e^{η·a†} e^{−η*·a}].
pub fn char_function(state: &CoherentMixture, eta: &CVec, bundle: &PropagatorBundle) -> Result<Complex64> {
    check_dim(state.n, eta.len())?;
    check_dim(state.n, bundle.n())?;
    let width = -0.5 * quad_form(eta, &bundle.j);
    let mut total = Complex64::new(0.0, 0.0);
    for (branch, ks) in state.branches.iter().zip(state.centroids(bundle)) {
        let k = ks.len();
        let mut sum = Complex64::new(0.0, 0.0);
        for r in 0..k {
            let bra: Complex64 = eta.iter().zip(ks[r].iter()).map(|(e, kk)| e * kk.conj()).sum();
            for s in 0..k {
                let ket: Complex64 = eta.iter().zip(ks[s].iter()).map(|(e, kk)| e.conj() * kk).sum();
                sum += exp_c(branch.log_coefficient(r, s) + bra - ket + width);
            }
        }
        total += sum * branch.weight;
    }
    Ok(total)
}

/// Σ c_rs (2/π)^N / det X · exp(−2 (ξ−K_s)ᵀ X⁻¹ (ξ−K_r)*) for a Hermitian width X.
fn gaussian_sum(state: &CoherentMixture, xi: &CVec, bundle: &PropagatorBundle, width: &CMat) -> Result<Complex64> {
    check_dim(state.n, xi.len())?;
    let lu = width.clone().lu();
    let det = lu.determinant();
    if det.norm() < SINGULAR_DET {
        return Err(Error::SingularWidth { det: det.norm() });
    }
    let log_pref = Complex64::new(state.n as f64 * (2.0 / PI).ln(), 0.0) - det.ln();
    let mut total = Complex64::new(0.0, 0.0);
    for (branch, ks) in state.branches.iter().zip(state.centroids(bundle)) {
        let k = ks.len();
        let d: Vec<CVec> = ks.iter().map(|kk| xi - kk).collect();
        let solved: Vec<CVec> = d
            .iter()
            .map(|v| lu.solve(&v.map(|z| z.conj())).expect("determinant checked"))
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        for r in 0..k {
            for s in 0..k {
                let q = d[s].transpose() * &solved[r];
                sum += exp_c(branch.log_coefficient(r, s) + log_pref - 2.0 * q[(0, 0)]);
            }
        }
        total += sum * branch.weight;
    }
    Ok(total)
}

/// Glauber-Sudarshan P-function; needs a nonsingular diffusion width J.
pub fn p_function(state: &CoherentMixture, xi: &CVec, bundle: &PropagatorBundle) -> Result<Complex64> {
    check_dim(state.n, bundle.n())?;
    gaussian_sum(state, xi, bundle, &bundle.j)
}

/// The P-function formula evaluated with an arbitrary width in place of J.
pub fn p_function_with_width(
    state: &CoherentMixture,
    xi: &CVec,
    bundle: &PropagatorBundle,
    width: &CMat,
) -> Result<Complex64> {
    check_dim(state.n, bundle.n())?;
    gaussian_sum(state, xi, bundle, width)
}

/// Wigner element W_rs(ξ) of one branch in the rotated frame, including
/// c_rs but not the branch weight.
pub fn wigner_pair(branch: &Branch, r: usize, s: usize, xi: &CVec, bundle: &PropagatorBundle) -> Complex64 {
    let u_t = bundle.u.transpose();
    let a = &u_t * (xi - k_vector(&bundle.theta, &branch.components[s].beta));
    let b = &u_t * (xi - k_vector(&bundle.theta, &branch.components[r].beta));
    let mut expo = Complex64::new(0.0, 0.0);
    let mut log_det = 0.0;
    for m in 0..bundle.dcoef.len() {
        expo += a[m] * b[m].conj() / bundle.dcoef[m];
        log_det += bundle.dcoef[m].ln();
    }
    let log_pref = bundle.dcoef.len() as f64 * (2.0 / PI).ln() - log_det;
    exp_c(branch.log_coefficient(r, s) + log_pref - 2.0 * expo)
}

/// Wigner function as a complex sum; the imaginary part is round-off.
pub fn wigner_complex(state: &CoherentMixture, xi: &CVec, bundle: &PropagatorBundle) -> Result<Complex64> {
    check_dim(state.n, xi.len())?;
    check_dim(state.n, bundle.n())?;
    let mut total = Complex64::new(0.0, 0.0);
    for branch in &state.branches {
        let k = branch.components.len();
        let mut sum = Complex64::new(0.0, 0.0);
        for r in 0..k {
            for s in 0..k {
                sum += wigner_pair(branch, r, s, xi, bundle);
            }
        }
        total += sum * branch.weight;
    }
    Ok(total)
}

pub fn wigner(state: &CoherentMixture, xi: &CVec, bundle: &PropagatorBundle) -> Result<f64> {
    Ok(wigner_complex(state, xi, bundle)?.re)
}

/// Occupation-number superpositions, one set of coefficients per branch.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBranch {
    pub weight: f64,
    pub coefficients: Vec<(Vec<usize>, Complex64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockMixture {
    n: usize,
    branches: Vec<FockBranch>,
}

impl FockMixture {
    pub fn new(branches: Vec<FockBranch>) -> Result<Self> {
        let n = branches
            .first()
            .and_then(|b| b.coefficients.first())
            .map(|(x, _)| x.len())
            .ok_or_else(|| Error::validation("state", "at least one Fock coefficient is required"))?;
        let total: f64 = branches.iter().map(|b| b.weight).sum();
        if branches.iter().any(|b| !(b.weight >= 0.0)) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::validation("state.weights", format!("weights must be ≥ 0 and sum to 1, got {total}")));
        }
        for (j, b) in branches.iter().enumerate() {
            if let Some((x, _)) = b.coefficients.iter().find(|(x, _)| x.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: x.len() });
            }
            let norm: f64 = b.coefficients.iter().map(|(_, c)| c.norm_sqr()).sum();
            if (norm - 1.0).abs() > WEIGHT_TOL {
                return Err(Error::validation(
                    format!("state.branches[{j}]"),
                    format!("coefficients must have unit norm, got {norm}"),
                ));
            }
            for (a, (x, _)) in b.coefficients.iter().enumerate() {
                if b.coefficients[..a].iter().any(|(y, _)| y == x) {
                    return Err(Error::validation(format!("state.branches[{j}]"), format!("repeated occupation {x:?}")));
                }
            }
        }
        Ok(FockMixture { n, branches })
    }

    /// The single-branch state |x_1, ..., x_N⟩.
    pub fn number_state(x: Vec<usize>) -> Self {
        FockMixture {
            n: x.len(),
            branches: vec![FockBranch { weight: 1.0, coefficients: vec![(x, Complex64::new(1.0, 0.0))] }],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn branches(&self) -> &[FockBranch] {
        &self.branches
    }

    pub fn max_occupation(&self) -> usize {
        self.branches
            .iter()
            .flat_map(|b| b.coefficients.iter().flat_map(|(x, _)| x.iter().copied()))
            .max()
            .unwrap_or(0)
    }
}

fn factorials(max: usize) -> Vec<f64> {
    let mut f = vec![1.0; max + 1];
    for k in 1..=max {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// Σ_j √(x! y!) / (j! (x−j)! (y−x+j)!) u^{y−x+j} v^j for one mode.
fn fock_mode_factor(x: usize, y: usize, u: Complex64, v: Complex64, fact: &[f64]) -> Complex64 {
    let pref = (fact[x] * fact[y]).sqrt();
    let lo = x.saturating_sub(y);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in lo..=x {
        let k = y + j - x;
        acc += u.powu(k as u32) * v.powu(j as u32) * (pref / (fact[j] * fact[x - j] * fact[k]));
    }
    acc
}

/// Characteristic function of an evolved Fock-state mixture.
pub fn char_function_fock(state: &FockMixture, eta: &CVec, bundle: &PropagatorBundle) -> Result<Complex64> {
    check_dim(state.n, eta.len())?;
    check_dim(state.n, bundle.n())?;
    let n = state.n;
    let th = &bundle.theta;
    // u_ℓ = Σ_m η_m Θ*_mℓ, v_ℓ = −Σ_m η*_m Θ_mℓ
    let u: Vec<Complex64> = (0..n).map(|l| (0..n).map(|m| eta[m] * th[(m, l)].conj()).sum()).collect();
    let v: Vec<Complex64> = (0..n).map(|l| -(0..n).map(|m| eta[m].conj() * th[(m, l)]).sum::<Complex64>()).collect();
    let fact = factorials(state.max_occupation());
    let gauss = (-0.5 * quad_form(eta, &bundle.j)).exp();
    let mut total = Complex64::new(0.0, 0.0);
    for branch in &state.branches {
        let mut sum = Complex64::new(0.0, 0.0);
        for (x, cx) in &branch.coefficients {
            for (y, cy) in &branch.coefficients {
                let mut term = cx * cy.conj();
                for l in 0..n {
                    term *= fock_mode_factor(x[l], y[l], u[l], v[l], &fact);
                }
                sum += term;
            }
        }
        total += sum * branch.weight;
    }
    Ok(total * gauss)
}

/// Tensor-product Gauss-Hermite rule for [`wigner_from_char`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub nodes: usize,
    /// Re-evaluate with half the nodes and fail if the results differ by more than this.
    pub tolerance: Option<f64>,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { nodes: 64, tolerance: Some(1e-5) }
    }
}

fn gh_rule(nodes: usize) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(nodes).ok_or_else(|| Error::validation("quadrature.nodes", "must be positive"))?;
    let rule = GaussHermite::new(n);
    // weight e^{−|η|²/2} per real axis: x = √2 u
    Ok(rule
        .as_node_weight_pairs()
        .into_iter()
        .map(|(x, w)| (std::f64::consts::SQRT_2 * x, std::f64::consts::SQRT_2 * w))
        .collect())
}

fn wigner_transform<F>(chi: &F, xi: &CVec, nodes: usize) -> Result<Complex64>
where
    F: Fn(&CVec) -> Complex64 + Sync,
{
    let n = xi.len();
    let rule = gh_rule(nodes)?;
    let dims = 2 * n;
    let inner_count = rule.len().pow(dims as u32 - 1);
    // outer axis in parallel, partial sums collected in order so the total is reproducible
    let partials: Vec<Complex64> = (0..rule.len())
        .into_par_iter()
        .map(|first| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut eta = CVec::zeros(n);
            let mut coords = vec![0.0; dims];
            for rest in 0..inner_count {
                let mut idx = rest;
                let mut weight = rule[first].1;
                coords[0] = rule[first].0;
                for coord in coords.iter_mut().skip(1) {
                    let (x, w) = rule[idx % rule.len()];
                    idx /= rule.len();
                    *coord = x;
                    weight *= w;
                }
                for m in 0..n {
                    eta[m] = Complex64::new(coords[2 * m], coords[2 * m + 1]);
                }
                let phase: Complex64 = (0..n).map(|m| xi[m] * eta[m].conj() - xi[m].conj() * eta[m]).sum();
                acc += chi(&eta) * phase.exp() * weight;
            }
            acc
        })
        .collect();
    let total: Complex64 = partials.iter().sum();
    Ok(total / PI.powi(2 * n as i32))
}

/// W(ξ) = π^{−2N} ∫ χ(η) e^{−|η|²/2} e^{Σ(ξ_m η*_m − ξ*_m η_m)} d²η by
/// Gauss-Hermite quadrature, for N ≤ 2.
pub fn wigner_from_char<F>(chi: F, xi: &CVec, quad: Quadrature) -> Result<f64>
where
    F: Fn(&CVec) -> Complex64 + Sync,
{
    if xi.len() > 2 {
        return Err(Error::Precondition(format!(
            "numerical Wigner transform is limited to N ≤ 2, got N = {}",
            xi.len()
        )));
    }
    let fine = wigner_transform(&chi, xi, quad.nodes)?.re;
    if let Some(tol) = quad.tolerance {
        let coarse = wigner_transform(&chi, xi, (quad.nodes / 2).max(1))?.re;
        if (fine - coarse).abs() > tol {
            return Err(Error::QuadratureNotConverged { coarse, fine });
        }
    }
    Ok(fine)
}

/// Uniform axis `steps` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.min],
            s => (0..s).map(|k| self.min + (self.max - self.min) * k as f64 / (s - 1) as f64).collect(),
        }
    }
}

/// Cartesian grid over (Re ξ_m, Im ξ_m) for every mode.
pub fn grid_points(axes: &[(Axis, Axis)]) -> Vec<CVec> {
    let per_axis: Vec<Vec<f64>> = axes.iter().flat_map(|(re, im)| [re.points(), im.points()]).collect();
    let total: usize = per_axis.iter().map(Vec::len).product();
    let n = axes.len();
    (0..total)
        .map(|mut idx| {
            let mut coords = vec![0.0; per_axis.len()];
            for d in (0..per_axis.len()).rev() {
                let len = per_axis[d].len();
                coords[d] = per_axis[d][idx % len];
                idx /= len;
            }
            CVec::from_fn(n, |m, _| Complex64::new(coords[2 * m], coords[2 * m + 1]))
        })
        .collect()
}

/// Wigner values on a grid, in grid order.
pub fn wigner_grid(state: &CoherentMixture, bundle: &PropagatorBundle, points: &[CVec], serial: bool) -> Result<Vec<f64>> {
    if serial {
        points.iter().map(|xi| wigner(state, xi, bundle)).collect()
    } else {
        points.par_iter().map(|xi| wigner(state, xi, bundle)).collect()
    }
}

/// CSV with columns re_xi1, im_xi1, ..., w.
pub fn write_grid_csv<W: Write>(mut out: W, points: &[CVec], values: &[f64]) -> std::io::Result<()> {
    let n = points.first().map_or(0, |p| p.len());
    let mut header: Vec<String> = (1..=n).flat_map(|m| [format!("re_xi{m}"), format!("im_xi{m}")]).collect();
    header.push("w".into());
    writeln!(out, "{}", header.join(","))?;
    for (p, v) in points.iter().zip(values) {
        let mut row: Vec<String> = p.iter().flat_map(|z| [format!("{:e}", z.re), format!("{:e}", z.im)]).collect();
        row.push(format!("{v:e}"));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RMat;
    use crate::network::{build_hamiltonian, dissipative_matrix, NetworkSpec};
    use crate::propagation::Dynamics;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(gamma: f64, nbar: f64) -> Dynamics {
        let h = build_hamiltonian(&NetworkSpec::new(vec![1.0], RMat::zeros(1, 1)).unwrap());
        let dm = dissipative_matrix(&h, &RMat::from_element(1, 1, gamma)).unwrap();
        Dynamics::new(dm, RMat::from_element(1, 1, gamma * nbar)).unwrap()
    }

    fn pair(gamma: f64, nbar: f64) -> Dynamics {
        let h = build_hamiltonian(&NetworkSpec::all_to_all(2, 1.0, 0.2).unwrap());
        let dm = dissipative_matrix(&h, &(RMat::identity(2, 2) * gamma)).unwrap();
        Dynamics::new(dm, RMat::identity(2, 2) * (gamma * nbar)).unwrap()
    }

    #[test]
    fn cat_normalisation() {
        let a = c(0.8, 0.3);
        let cat = build_cat_family(1, 1, 0, a, c(0.0, 0.0), 1).unwrap();
        let expect = (2.0 * (1.0 + (-2.0 * a.norm_sqr()).exp())).powf(-0.5);
        for comp in &cat.branches()[0].components {
            assert!((comp.amplitude.norm() - expect).abs() < 1e-14);
        }
        let three = build_cat_family(3, 1, 1, a, c(0.5, 0.0), -1).unwrap();
        let comps = &three.branches()[0].components;
        assert_eq!(comps[0].beta.as_slice(), &[a, -a, c(0.5, 0.0)]);
        assert_eq!(comps[1].beta.as_slice(), &[-a, a, c(0.5, 0.0)]);
        assert!(comps[1].amplitude.re < 0.0);
    }

    #[test]
    fn degenerate_cats() {
        let plus = build_cat_family(1, 1, 0, c(0.0, 0.0), c(0.0, 0.0), 1).unwrap();
        assert!((plus.branches()[0].components[0].amplitude.re - 0.5).abs() < 1e-15);
        assert!(matches!(build_cat_family(1, 1, 0, c(0.0, 0.0), c(0.0, 0.0), -1), Err(Error::NullState)));
        assert!(matches!(build_cat_family(2, 2, 1, c(1.0, 0.0), c(0.0, 0.0), 1), Err(Error::Validation { .. })));
    }

    #[test]
    fn large_amplitude_overlap_does_not_underflow() {
        let cat = build_cat_family(1, 1, 0, c(40.0, 0.0), c(0.0, 0.0), 1).unwrap();
        let b = single(0.1, 0.0).bundle(0.0).unwrap();
        let chi = char_function(&cat, &CVec::from_element(1, c(0.0, 0.0)), &b).unwrap();
        assert!((chi - c(1.0, 0.0)).norm() < 1e-13);
        assert!(cat.branches()[0].log_coefficient(0, 1).re < -3000.0);
    }

    #[test]
    fn coherent_char_at_zero_time() {
        let beta = c(0.7, -0.4);
        let st = CoherentMixture::coherent(CVec::from_element(1, beta));
        let b = single(0.1, 0.5).bundle(0.0).unwrap();
        for eta in [c(0.3, 0.1), c(-1.0, 0.5)] {
            let chi = char_function(&st, &CVec::from_element(1, eta), &b).unwrap();
            assert!((chi - (eta * beta.conj() - eta.conj() * beta).exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_temperature_p_function_is_singular() {
        let st = CoherentMixture::coherent(CVec::from_element(1, c(1.0, 0.0)));
        let b = single(0.1, 0.0).bundle(1.0).unwrap();
        assert!(matches!(p_function(&st, &CVec::from_element(1, c(0.0, 0.0)), &b), Err(Error::SingularWidth { .. })));
    }

    #[test]
    fn coherent_p_function_is_centred_gaussian() {
        let beta = c(1.0, 0.5);
        let st = CoherentMixture::coherent(CVec::from_element(1, beta));
        let b = single(0.2, 0.7).bundle(1.5).unwrap();
        let k = b.theta[(0, 0)] * beta;
        let j = b.j[(0, 0)].re;
        for xi in [k, k + c(0.3, -0.2), c(0.0, 0.0)] {
            let p = p_function(&st, &CVec::from_element(1, xi), &b).unwrap();
            let expect = 2.0 / (PI * j) * (-2.0 * (xi - k).norm_sqr() / j).exp();
            assert!((p - c(expect, 0.0)).norm() < 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn zero_temperature_coherent_wigner() {
        let beta = c(-0.6, 0.9);
        let st = CoherentMixture::coherent(CVec::from_element(1, beta));
        let b = single(0.3, 0.0).bundle(2.0).unwrap();
        let k = b.theta[(0, 0)] * beta;
        let xi = c(0.1, 0.2);
        let w = wigner(&st, &CVec::from_element(1, xi), &b).unwrap();
        assert!((w - 2.0 / PI * (-2.0 * (xi - k).norm_sqr()).exp()).abs() < 1e-14);
    }

    #[test]
    fn p_to_wigner_substitution() {
        let cat = build_cat_family(2, 1, 0, c(1.0, 0.4), c(0.2, 0.0), 1).unwrap();
        let b = pair(0.1, 0.5).bundle(0.8).unwrap();
        for xi in [CVec::from_vec(vec![c(0.1, 0.2), c(-0.3, 0.0)]), CVec::from_vec(vec![c(1.0, 0.5), c(0.4, -0.7)])] {
            let p = p_function_with_width(&cat, &xi, &b, &b.j_tilde).unwrap();
            let w = wigner_complex(&cat, &xi, &b).unwrap();
            assert!((p - w).norm() < 1e-12);
        }
    }

    #[test]
    fn fock_char_single_photon() {
        let st = FockMixture::number_state(vec![1]);
        let b = single(0.1, 0.0).bundle(0.0).unwrap();
        for eta in [c(0.0, 0.0), c(0.3, -0.4), c(1.2, 0.1)] {
            let chi = char_function_fock(&st, &CVec::from_element(1, eta), &b).unwrap();
            assert!((chi - c(1.0 - eta.norm_sqr(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn fock_matches_coherent_for_vacuum() {
        let st = FockMixture::number_state(vec![0, 0]);
        let coh = CoherentMixture::coherent(CVec::zeros(2));
        let b = pair(0.1, 0.4).bundle(1.1).unwrap();
        let eta = CVec::from_vec(vec![c(0.2, 0.3), c(-0.5, 0.1)]);
        let a = char_function_fock(&st, &eta, &b).unwrap();
        let z = char_function(&coh, &eta, &b).unwrap();
        assert!((a - z).norm() < 1e-14);
    }

    #[test]
    fn wigner_transform_peaks() {
        let b = single(0.1, 0.0).bundle(0.0).unwrap();
        let origin = CVec::from_element(1, c(0.0, 0.0));
        let vac = FockMixture::number_state(vec![0]);
        let one = FockMixture::number_state(vec![1]);
        let wv = wigner_from_char(|e| char_function_fock(&vac, e, &b).unwrap(), &origin, Quadrature::default()).unwrap();
        let w1 = wigner_from_char(|e| char_function_fock(&one, e, &b).unwrap(), &origin, Quadrature::default()).unwrap();
        assert!((wv - 2.0 / PI).abs() < 1e-12);
        assert!((w1 + 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn wigner_transform_matches_closed_form_for_coherent_state() {
        let beta = c(0.6, -0.3);
        let st = CoherentMixture::coherent(CVec::from_element(1, beta));
        let b = single(0.2, 0.4).bundle(0.7).unwrap();
        for xi in [c(0.0, 0.0), c(0.5, -0.2), c(-0.4, 0.6)] {
            let x = CVec::from_element(1, xi);
            let num = wigner_from_char(|e| char_function(&st, e, &b).unwrap(), &x, Quadrature::default()).unwrap();
            let exact = wigner(&st, &x, &b).unwrap();
            assert!((num - exact).abs() < 1e-6, "{num} vs {exact}");
        }
    }

    #[test]
    fn wigner_transform_matches_closed_form_for_cat() {
        let cat = build_cat_family(1, 1, 0, c(0.9, 0.4), c(0.0, 0.0), -1).unwrap();
        let b = single(0.2, 0.3).bundle(0.9).unwrap();
        for xi in [c(0.0, 0.0), c(0.4, -0.3), c(-0.8, 0.1)] {
            let x = CVec::from_element(1, xi);
            let num = wigner_from_char(|e| char_function(&cat, e, &b).unwrap(), &x, Quadrature::default()).unwrap();
            let exact = wigner(&cat, &x, &b).unwrap();
            assert!((num - exact).abs() < 1e-6, "{num} vs {exact}");
        }
    }

    #[test]
    fn wigner_transform_rejects_three_modes() {
        let r = wigner_from_char(|_| c(1.0, 0.0), &CVec::zeros(3), Quadrature::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn grid_points_and_csv() {
        let ax = Axis { min: -1.0, max: 1.0, steps: 3 };
        let pts = grid_points(&[(ax, Axis { min: 0.0, max: 0.0, steps: 1 })]);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[2][0], c(1.0, 0.0));
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &pts, &[0.1, 0.2, 0.3]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("re_xi1,im_xi1,w\n"));
        assert_eq!(text.lines().count(), 4);
    }

    proptest! {
        #[test]
        fn char_function_invariants(
            a in (-1.5f64..1.5, -1.5f64..1.5),
            e in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
            t in 0.0f64..4.0,
            nbar in 0.0f64..1.0,
        ) {
            let cat = build_cat_family(2, 1, 1, c(a.0, a.1), c(0.0, 0.0), 1).unwrap();
            let b = pair(0.15, nbar).bundle(t).unwrap();
            let eta = CVec::from_vec(vec![c(e.0, e.1), c(e.2, e.3)]);
            let zero = char_function(&cat, &CVec::zeros(2), &b).unwrap();
            prop_assert!((zero - c(1.0, 0.0)).norm() < 1e-12);
            let plus = char_function(&cat, &eta, &b).unwrap();
            let minus = char_function(&cat, &(-&eta), &b).unwrap();
            prop_assert!((minus - plus.conj()).norm() < 1e-12);
        }

        #[test]
        fn wigner_is_real_and_bounded(
            a in (-1.5f64..1.5, -1.5f64..1.5),
            x in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
            t in 0.0f64..4.0,
            sign in prop_oneof![Just(1i8), Just(-1i8)],
        ) {
            prop_assume!(a.0.abs() + a.1.abs() > 0.05);
            let cat = build_cat_family(2, 1, 0, c(a.0, a.1), c(0.3, 0.0), sign).unwrap();
            let b = pair(0.15, 0.5).bundle(t).unwrap();
            let xi = CVec::from_vec(vec![c(x.0, x.1), c(x.2, x.3)]);
            let w = wigner_complex(&cat, &xi, &b).unwrap();
            prop_assert!(w.im.abs() < 1e-10);
            let l1: f64 = cat.branches()[0].components.iter().map(|c| c.amplitude.norm()).sum();
            prop_assert!(w.re.abs() <= (2.0 / PI).powi(2) * l1 * l1 + 1e-12);
        }
    }
}
