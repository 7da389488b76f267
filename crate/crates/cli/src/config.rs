//! Run configuration: a single JSON document.

use bosonet::linalg::{CVec, RMat};
use bosonet::network::{coupling_regime, NetworkSpec, Regime, REGIME_THRESHOLD};
use bosonet::phase_space::{build_cat_family, Axis, Branch, CoherentMixture, Component, FockBranch, FockMixture};
use bosonet::reservoirs::{Overlap, Profile, Reservoir, ReservoirSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Complex numbers are written as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C64(pub [f64; 2]);

impl From<C64> for Complex64 {
    fn from(z: C64) -> Self {
        Complex64::new(z.0[0], z.0[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "topology", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkConfig {
    AllToAll { n: usize, omega: f64, lambda: f64 },
    Chain { n: usize, omega: f64, lambda: f64 },
    Explicit { omega: Vec<f64>, lambda: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirConfig {
    /// One reservoir shared by every oscillator.
    #[serde(default)]
    pub common: bool,
    /// Copied to every oscillator; exclusive with `list`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identical: Option<Reservoir>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list: Option<Vec<Reservoir>>,
    /// Explicit overlap factors; otherwise computed from the profiles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<Vec<Vec<f64>>>,
    /// Divide every profile strength by N, so that the diagonal damping rate
    /// does not change when N is swept.
    #[serde(default)]
    pub fixed_diagonal_rate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    #[default]
    Auto,
    Weak,
    Strong,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub amplitude: C64,
    pub beta: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    pub weight: f64,
    pub components: Vec<ComponentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockCoefficient {
    pub occupation: Vec<usize>,
    pub amplitude: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockBranchConfig {
    pub weight: f64,
    pub coefficients: Vec<FockCoefficient>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Cat { r: usize, s: usize, alpha: C64, #[serde(default = "zero")] beta: C64, #[serde(default = "plus")] sign: i8 },
    Components { branches: Vec<BranchConfig> },
    Fock { branches: Vec<FockBranchConfig> },
}

fn zero() -> C64 {
    C64([0.0, 0.0])
}

fn plus() -> i8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimesConfig {
    Range { t_start: f64, t_end: f64, steps: usize },
    List(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Dcoef,
    TauReport,
    WignerGrid,
    EntropyCurve,
    OracleCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAxes {
    pub re: AxisConfig,
    pub im: AxisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerGridConfig {
    pub t: f64,
    pub axes: Vec<ModeAxes>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Defaults to ⌈|α|² + 6|α| + 6 + 10n̄⌉ with the largest amplitude and occupation in the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Values of η_m; the grid is their N-fold product.
    #[serde(default = "default_eta")]
    pub eta: Vec<C64>,
}

fn default_eta() -> Vec<C64> {
    [[0.0, 0.0], [0.3, 0.0], [-0.25, 0.35], [0.0, 0.5], [-0.6, -0.2]].into_iter().map(C64).collect()
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { n_max: None, eta: default_eta() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkConfig,
    pub reservoirs: ReservoirConfig,
    #[serde(default)]
    pub regime: RegimeChoice,
    pub state: StateConfig,
    pub times: TimesConfig,
    pub outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner_grid: Option<WignerGridConfig>,
    /// Components (r, s) whose interference is tracked by the τ report.
    #[serde(default = "default_pair")]
    pub pair: [usize; 2],
    #[serde(default)]
    pub oracle: OracleConfig,
}

fn default_pair() -> [usize; 2] {
    [0, 1]
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Invalid { field: if path == "." { "config".into() } else { path }, reason: e.into_inner().to_string() }
    })
}

fn invalid(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Invalid { field: field.into(), reason: reason.into() }
}

pub enum InitialState {
    Coherent(CoherentMixture),
    Fock(FockMixture),
}

impl InitialState {
    pub fn n(&self) -> usize {
        match self {
            InitialState::Coherent(s) => s.n(),
            InitialState::Fock(s) => s.n(),
        }
    }
}

/// Everything a run needs, checked against itself.
pub struct Resolved {
    pub network: NetworkSpec,
    pub reservoirs: ReservoirSpec,
    pub regime: Regime,
    pub state: InitialState,
    pub times: Vec<f64>,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let network = match &self.network {
            NetworkConfig::AllToAll { n, omega, lambda } => NetworkSpec::all_to_all(*n, *omega, *lambda)?,
            NetworkConfig::Chain { n, omega, lambda } => NetworkSpec::chain(*n, *omega, *lambda)?,
            NetworkConfig::Explicit { omega, lambda } => {
                let n = omega.len();
                if lambda.len() != n || lambda.iter().any(|row| row.len() != n) {
                    return Err(invalid("network.lambda", format!("must be {n}×{n}")));
                }
                NetworkSpec::new(omega.clone(), RMat::from_fn(n, n, |i, j| lambda[i][j]))?
            }
        };
        let n = network.n();
        if n == 0 {
            return Err(invalid("network.n", "at least one oscillator is required"));
        }
        let reservoirs = self.reservoir_spec(n)?;
        reservoirs.validate(n)?;
        let regime = match self.regime {
            RegimeChoice::Auto => coupling_regime(&network, REGIME_THRESHOLD),
            RegimeChoice::Weak => Regime::Weak,
            RegimeChoice::Strong => Regime::Strong,
        };
        let state = self.initial_state(n)?;
        let times = self.time_grid()?;
        if self.outputs.is_empty() {
            return Err(invalid("outputs", "at least one output is required"));
        }
        if self.outputs.contains(&OutputKind::WignerGrid) {
            let grid = self.wigner_grid.as_ref().ok_or_else(|| invalid("wigner_grid", "required by outputs"))?;
            if grid.axes.len() != n {
                return Err(invalid("wigner_grid.axes", format!("need one entry per mode ({n})")));
            }
            if !(grid.t >= 0.0 && grid.t.is_finite()) {
                return Err(invalid("wigner_grid.t", "must be finite and ≥ 0"));
            }
            if grid.axes.iter().any(|a| a.re.steps == 0 || a.im.steps == 0) {
                return Err(invalid("wigner_grid.axes", "steps must be positive"));
            }
            if matches!(state, InitialState::Fock(_)) && n > 2 {
                return Err(invalid("wigner_grid", "Fock-state Wigner grids are limited to N ≤ 2"));
            }
        }
        if self.outputs.contains(&OutputKind::OracleCompare) && n > 2 {
            return Err(invalid("outputs", "oracle_compare is limited to N ≤ 2"));
        }
        let coherent_only = [OutputKind::TauReport, OutputKind::EntropyCurve];
        if matches!(state, InitialState::Fock(_)) && self.outputs.iter().any(|o| coherent_only.contains(o)) {
            return Err(invalid("outputs", "tau_report and entropy_curve need a coherent-state input"));
        }
        if let InitialState::Coherent(s) = &state {
            if self.outputs.contains(&OutputKind::TauReport) && s.branches().len() == 1 {
                let k = s.branches()[0].components.len();
                let [r, sidx] = self.pair;
                if k > 1 && (r == sidx || r >= k || sidx >= k) {
                    return Err(invalid("pair", format!("need two distinct component indices below {k}")));
                }
            }
        }
        Ok(Resolved { network, reservoirs, regime, state, times })
    }

    fn reservoir_spec(&self, n: usize) -> Result<ReservoirSpec, CliError> {
        let rc = &self.reservoirs;
        let mut list = match (&rc.identical, &rc.list) {
            (Some(r), None) => vec![*r; n],
            (None, Some(l)) => {
                if l.len() != n {
                    return Err(invalid("reservoirs.list", format!("need {n} reservoirs, got {}", l.len())));
                }
                l.clone()
            }
            _ => return Err(invalid("reservoirs", "give exactly one of `identical` or `list`")),
        };
        if rc.fixed_diagonal_rate {
            for r in &mut list {
                r.profile = scale_profile(r.profile, 1.0 / n as f64);
            }
        }
        let overlap = match &rc.overlap {
            None => Overlap::FromProfiles,
            Some(o) => {
                if o.len() != n || o.iter().any(|row| row.len() != n) {
                    return Err(invalid("reservoirs.overlap", format!("must be {n}×{n}")));
                }
                Overlap::Explicit(RMat::from_fn(n, n, |i, j| o[i][j]))
            }
        };
        if !rc.common && rc.overlap.is_some() {
            return Err(invalid("reservoirs.overlap", "only meaningful for a common reservoir"));
        }
        Ok(if rc.common { ReservoirSpec::common(list, overlap) } else { ReservoirSpec::distinct(list) })
    }

    fn initial_state(&self, n: usize) -> Result<InitialState, CliError> {
        Ok(match &self.state {
            StateConfig::Cat { r, s, alpha, beta, sign } => {
                InitialState::Coherent(build_cat_family(n, *r, *s, (*alpha).into(), (*beta).into(), *sign)?)
            }
            StateConfig::Components { branches } => {
                let mut out = Vec::with_capacity(branches.len());
                for (j, b) in branches.iter().enumerate() {
                    let mut comps = Vec::with_capacity(b.components.len());
                    for (k, cmp) in b.components.iter().enumerate() {
                        if cmp.beta.len() != n {
                            return Err(invalid(
                                &format!("state.branches[{j}].components[{k}].beta"),
                                format!("need {n} amplitudes, got {}", cmp.beta.len()),
                            ));
                        }
                        comps.push(Component {
                            amplitude: cmp.amplitude.into(),
                            beta: CVec::from_iterator(n, cmp.beta.iter().map(|&z| z.into())),
                        });
                    }
                    out.push(Branch { weight: b.weight, components: comps });
                }
                InitialState::Coherent(CoherentMixture::new(out)?)
            }
            StateConfig::Fock { branches } => {
                let out: Vec<FockBranch> = branches
                    .iter()
                    .map(|b| FockBranch {
                        weight: b.weight,
                        coefficients: b.coefficients.iter().map(|c| (c.occupation.clone(), c.amplitude.into())).collect(),
                    })
                    .collect();
                let fock = FockMixture::new(out)?;
                if fock.n() != n {
                    return Err(invalid("state.branches", format!("occupations must have {n} entries")));
                }
                InitialState::Fock(fock)
            }
        })
    }

    pub fn time_grid(&self) -> Result<Vec<f64>, CliError> {
        let times = match &self.times {
            TimesConfig::Range { t_start, t_end, steps } => {
                if *steps == 0 {
                    return Err(invalid("times.steps", "must be positive"));
                }
                if !(*t_start >= 0.0 && t_end >= t_start && t_end.is_finite()) {
                    return Err(invalid("times", "need 0 ≤ t_start ≤ t_end < ∞"));
                }
                Axis { min: *t_start, max: *t_end, steps: *steps }.points()
            }
            TimesConfig::List(list) => list.clone(),
        };
        if times.is_empty() {
            return Err(invalid("times", "empty time grid"));
        }
        if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times", "times must be finite, ≥ 0 and strictly increasing"));
        }
        Ok(times)
    }
}

fn scale_profile(p: Profile, f: f64) -> Profile {
    match p {
        Profile::WhiteNoise { gamma } => Profile::WhiteNoise { gamma: gamma * f },
        Profile::Lorentzian { gamma, center, width } => Profile::Lorentzian { gamma: gamma * f, center, width },
        Profile::GaussianBand { gamma, center, width } => Profile::GaussianBand { gamma: gamma * f, center, width },
    }
}

impl AxisConfig {
    pub fn axis(&self) -> Axis {
        Axis { min: self.min, max: self.max, steps: self.steps }
    }
}
