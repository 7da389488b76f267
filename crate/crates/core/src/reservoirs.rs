//! Reservoir spectral profiles and the damping/diffusion matrices Γ and Υ.
//!
//! Convention: a profile's `gamma` is the Markov spectral damping function
//! itself, already carrying the 1/N of the coupling normalisation. The
//! matrices below multiply it by N explicitly.

use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::network::{NetworkSpec, NormalModes};
use serde::{Deserialize, Serialize};

/// Spectral damping function γ(ω) of one reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    WhiteNoise { gamma: f64 },
    Lorentzian { gamma: f64, center: f64, width: f64 },
    GaussianBand { gamma: f64, center: f64, width: f64 },
}

impl Profile {
    pub fn rate(&self, w: f64) -> f64 {
        match *self {
            Profile::WhiteNoise { gamma } => gamma,
            Profile::Lorentzian { gamma, center, width } => {
                gamma * width * width / ((w - center).powi(2) + width * width)
            }
            Profile::GaussianBand { gamma, center, width } => {
                gamma * (-(w - center).powi(2) / (2.0 * width * width)).exp()
            }
        }
    }

    pub fn strength(&self) -> f64 {
        match *self {
            Profile::WhiteNoise { gamma }
            | Profile::Lorentzian { gamma, .. }
            | Profile::GaussianBand { gamma, .. } => gamma,
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        let g = self.strength();
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::validation(format!("{field}.gamma"), format!("must be ≥ 0, got {g}")));
        }
        if let Profile::Lorentzian { center, width, .. } | Profile::GaussianBand { center, width, .. } = *self {
            if !(width.is_finite() && width > 0.0) {
                return Err(Error::validation(format!("{field}.width"), format!("must be > 0, got {width}")));
            }
            if !center.is_finite() {
                return Err(Error::validation(format!("{field}.center"), "must be finite"));
            }
        }
        Ok(())
    }

    /// Upper end of the frequency window that holds essentially all of the profile.
    fn support_end(&self) -> f64 {
        match *self {
            Profile::WhiteNoise { .. } => 0.0,
            Profile::Lorentzian { center, width, .. } => center.abs() + 200.0 * width,
            Profile::GaussianBand { center, width, .. } => center.abs() + 10.0 * width,
        }
    }
}

/// Occupation of a reservoir at a given frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bath {
    /// Bose-Einstein occupation at temperature T (ħ = k_B = 1).
    Temperature(f64),
    /// Frequency-independent occupation n̄, handy when comparing with
    /// closed forms that treat n̄ as a single number.
    Occupation(f64),
}

impl Bath {
    pub fn occupation(&self, w: f64) -> Result<f64> {
        match *self {
            Bath::Temperature(t) => mean_occupation(t, w),
            Bath::Occupation(n) => Ok(n),
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        let (name, v) = match *self {
            Bath::Temperature(t) => ("temperature", t),
            Bath::Occupation(n) => ("nbar", n),
        };
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::validation(format!("{field}.{name}"), format!("must be ≥ 0, got {v}")));
        }
        Ok(())
    }
}

/// The reservoir seen by one oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reservoir {
    pub profile: Profile,
    pub bath: Bath,
}

/// Cross-profile overlap factors o_mn for the common-reservoir model.
#[derive(Debug, Clone, PartialEq)]
pub enum Overlap {
    /// Normalised inner product of the profiles over a frequency window.
    FromProfiles,
    Explicit(RMat),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirSpec {
    pub reservoirs: Vec<Reservoir>,
    pub common: bool,
    pub overlap: Overlap,
}

impl ReservoirSpec {
    /// One independent reservoir per oscillator.
    pub fn distinct(reservoirs: Vec<Reservoir>) -> Self {
        ReservoirSpec { reservoirs, common: false, overlap: Overlap::FromProfiles }
    }

    /// The same independent reservoir copied to `n` oscillators.
    pub fn identical(n: usize, profile: Profile, bath: Bath) -> Self {
        Self::distinct(vec![Reservoir { profile, bath }; n])
    }

    /// A single reservoir shared by all oscillators.
    pub fn common(reservoirs: Vec<Reservoir>, overlap: Overlap) -> Self {
        ReservoirSpec { reservoirs, common: true, overlap }
    }

    pub fn n(&self) -> usize {
        self.reservoirs.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.reservoirs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.reservoirs.len() });
        }
        for (m, r) in self.reservoirs.iter().enumerate() {
            r.profile.validate(&format!("reservoirs[{m}].profile"))?;
            r.bath.validate(&format!("reservoirs[{m}]"))?;
        }
        if self.common {
            let first = self.reservoirs[0].bath;
            if self.reservoirs.iter().any(|r| r.bath != first) {
                return Err(Error::Configuration(
                    "a common reservoir has a single temperature; per-oscillator baths differ".into(),
                ));
            }
            if let Overlap::Explicit(o) = &self.overlap {
                if o.nrows() != n || o.ncols() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: o.nrows() });
                }
                for i in 0..n {
                    for j in 0..n {
                        let v = o[(i, j)];
                        if !(0.0..=1.0).contains(&v) || v != o[(j, i)] {
                            return Err(Error::validation(
                                format!("reservoirs.overlap[{i}][{j}]"),
                                "overlap must be symmetric with entries in [0, 1]",
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The overlap matrix in effect: identity for distinct reservoirs.
    pub fn overlap_matrix(&self, modes_hint: f64) -> RMat {
        let n = self.n();
        if !self.common {
            return RMat::identity(n, n);
        }
        match &self.overlap {
            Overlap::Explicit(o) => o.clone(),
            Overlap::FromProfiles => profile_overlap(&self.reservoirs, modes_hint),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrices {
    pub gamma: RMat,
    pub upsilon: RMat,
}

/// Bose-Einstein occupation 1/(e^{ω/T} − 1); zero at T = 0.
pub fn mean_occupation(temperature: f64, w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::Domain(format!("occupation needs a positive frequency, got {w}")));
    }
    if temperature < 0.0 {
        return Err(Error::Domain(format!("negative temperature {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (w / temperature).exp_m1())
}

fn profile_overlap(reservoirs: &[Reservoir], modes_hint: f64) -> RMat {
    let n = reservoirs.len();
    let end = reservoirs
        .iter()
        .map(|r| r.profile.support_end())
        .fold(2.0 * modes_hint.max(1.0), f64::max);
    let points = 20_001;
    let dw = end / (points - 1) as f64;
    let samples: Vec<Vec<f64>> = reservoirs
        .iter()
        .map(|r| (0..points).map(|k| r.profile.rate(k as f64 * dw)).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        let inner: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (inner - 0.5 * (a[0] * b[0] + a[points - 1] * b[points - 1])) * dw
    };
    RMat::from_fn(n, n, |i, j| {
        if i == j {
            return 1.0;
        }
        let norm = (dot(&samples[i], &samples[i]) * dot(&samples[j], &samples[j])).sqrt();
        if norm == 0.0 {
            0.0
        } else {
            (dot(&samples[i], &samples[j]) / norm).clamp(0.0, 1.0)
        }
    })
}

/// Γ_mn = N Σ_{ℓ,n'} C_ℓn γ_{mn'}(ϖ_ℓ) C_ℓn' and Υ likewise with n̄(ϖ_ℓ),
/// where γ_{mn'} = √(γ_m γ_n') o_mn' and γ_mm = γ_m.
fn rates_with_overlap(res: &ReservoirSpec, modes: &NormalModes, overlap: &RMat) -> Result<RateMatrices> {
    let n = modes.n();
    res.validate(n)?;
    let nf = n as f64;
    let c = &modes.c;
    let mut gamma = RMat::zeros(n, n);
    let mut upsilon = RMat::zeros(n, n);
    for l in 0..n {
        let w = modes.varpi[l];
        let rates: Vec<f64> = res.reservoirs.iter().map(|r| r.profile.rate(w)).collect();
        let occ: Vec<f64> = res
            .reservoirs
            .iter()
            .map(|r| r.bath.occupation(w))
            .collect::<Result<_>>()?;
        for m in 0..n {
            for np in 0..n {
                let g = if m == np {
                    rates[m]
                } else if overlap[(m, np)] == 0.0 {
                    continue;
                } else {
                    (rates[m] * rates[np]).sqrt() * overlap[(m, np)]
                };
                // the common reservoir has one occupation; distinct ones only hit m == np
                let gn = g * occ[m];
                for col in 0..n {
                    let weight = c[(l, col)] * c[(l, np)];
                    gamma[(m, col)] += nf * weight * g;
                    upsilon[(m, col)] += nf * weight * gn;
                }
            }
        }
    }
    Ok(RateMatrices { gamma, upsilon })
}

/// Independent reservoirs with rates sampled at the normal-mode frequencies.
pub fn rates_distinct(res: &ReservoirSpec, modes: &NormalModes) -> Result<RateMatrices> {
    let n = modes.n();
    rates_with_overlap(res, modes, &RMat::identity(n, n))
}

/// One reservoir shared by the whole network.
pub fn rates_common(res: &ReservoirSpec, modes: &NormalModes) -> Result<RateMatrices> {
    if !res.common {
        return Err(Error::Configuration("rates_common needs the common-reservoir flag".into()));
    }
    res.validate(modes.n())?;
    let hint = modes.varpi.iter().copied().fold(0.0, f64::max);
    rates_with_overlap(res, modes, &res.overlap_matrix(hint))
}

/// Weak-coupling rates: normal modes replaced by the bare oscillators.
///
/// For a common reservoir the same substitution C → I gives
/// Γ_mn = N γ_mn(ω_n).
pub fn rates_weak(res: &ReservoirSpec, spec: &NetworkSpec) -> Result<RateMatrices> {
    let n = spec.n();
    res.validate(n)?;
    let nf = n as f64;
    let w = spec.omega();
    let overlap = res.overlap_matrix(w.iter().copied().fold(0.0, f64::max));
    let mut gamma = RMat::zeros(n, n);
    let mut upsilon = RMat::zeros(n, n);
    for m in 0..n {
        for col in 0..n {
            let g = if m == col {
                res.reservoirs[m].profile.rate(w[m])
            } else if overlap[(m, col)] == 0.0 {
                continue;
            } else {
                let a = res.reservoirs[m].profile.rate(w[col]);
                let b = res.reservoirs[col].profile.rate(w[col]);
                (a * b).sqrt() * overlap[(m, col)]
            };
            let occ = res.reservoirs[m].bath.occupation(w[col])?;
            gamma[(m, col)] = nf * g;
            upsilon[(m, col)] = nf * g * occ;
        }
    }
    Ok(RateMatrices { gamma, upsilon })
}

/// Rates for the given network in the requested treatment.
pub fn rates(res: &ReservoirSpec, spec: &NetworkSpec, modes: &NormalModes, weak: bool) -> Result<RateMatrices> {
    if weak {
        rates_weak(res, spec)
    } else if res.common {
        rates_common(res, modes)
    } else {
        rates_distinct(res, modes)
    }
}
