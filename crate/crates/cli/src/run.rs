use bosonet::linalg::CVec;
use bosonet::metrics::{decoherence_report, decoherence_time, linear_entropy, mean_diffusion_time, DecoherenceReport};
use bosonet::network::{build_hamiltonian, normal_modes, CouplingMatrix, DissipativeMatrix, Regime};
use bosonet::phase_space::{
    char_function, char_function_fock, grid_points, wigner_from_char, wigner_grid, write_grid_csv, Quadrature,
};
use bosonet::propagation::{Dynamics, PropagatorBundle};
use bosonet::reservoirs::{rates, RateMatrices};
use bosonet::Timescale;
use bosonet_oracle as oracle;
use num_complex::Complex64;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

use crate::config::{InitialState, OutputKind, Resolved, RunConfig};
use crate::output::{config_hash, csv_header, num, write_atomic, write_json};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub serial: bool,
}

pub struct Model {
    pub resolved: Resolved,
    pub coupling: CouplingMatrix,
    pub rates: RateMatrices,
    pub dynamics: Dynamics,
}

pub fn build_model(cfg: &RunConfig) -> Result<Model, CliError> {
    let resolved = cfg.resolve()?;
    let coupling = build_hamiltonian(&resolved.network);
    let modes = normal_modes(&coupling)?;
    let rates = rates(&resolved.reservoirs, &resolved.network, &modes, resolved.regime == Regime::Weak)?;
    let dm = DissipativeMatrix::allow_undamped(&coupling, &rates.gamma)?;
    let dynamics = if dm.min_damping() > 1e-14 {
        Dynamics::new(dm, rates.upsilon.clone())?
    } else {
        Dynamics::allow_undamped(dm, rates.upsilon.clone())?
    };
    Ok(Model { resolved, coupling, rates, dynamics })
}

/// τ report for the configured component pair; a single-component state
/// has no interference term, so τ_int is infinite.
pub fn tau_report(model: &Model, pair: [usize; 2]) -> Result<DecoherenceReport, CliError> {
    let InitialState::Coherent(state) = &model.resolved.state else {
        return Err(CliError::Invalid { field: "outputs".into(), reason: "tau_report needs a coherent-state input".into() });
    };
    let dy = &model.dynamics;
    let regime = model.resolved.regime;
    let single = state.branches().len() == 1 && state.branches()[0].components.len() == 1;
    if single {
        let tau_diff = mean_diffusion_time(&dy.upsilon);
        let tau_dir = bosonet::metrics::directional_diffusion_times(
            &dy.bundle(0.0)?,
            &dy.bundle(bosonet::metrics::DIRECTIONAL_STEP)?,
        );
        return Ok(DecoherenceReport {
            tau_diff,
            tau_dir,
            tau_int: Timescale::Infinite,
            tau_d: decoherence_time(tau_diff, Timescale::Infinite),
            regime,
        });
    }
    Ok(decoherence_report(state, pair[0], pair[1], dy, &model.resolved.times, regime)?)
}

fn bundles(dy: &Dynamics, times: &[f64], serial: bool) -> Result<Vec<PropagatorBundle>, CliError> {
    let out: Result<Vec<_>, _> =
        if serial { times.iter().map(|&t| dy.bundle(t)).collect() } else { times.par_iter().map(|&t| dy.bundle(t)).collect() };
    Ok(out?)
}

pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub report: Option<DecoherenceReport>,
}

pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let model = build_model(cfg)?;
    let hash = config_hash(cfg);
    let mut summary = RunSummary { files: Vec::new(), report: None };
    for kind in &cfg.outputs {
        let path = match kind {
            OutputKind::Dcoef => write_dcoef(&model, &hash, opts)?,
            OutputKind::TauReport => {
                let report = tau_report(&model, cfg.pair)?;
                let path = opts.out.join("tau_report.json");
                write_json(&path, &hash, &report)?;
                summary.report = Some(report);
                path
            }
            OutputKind::WignerGrid => write_wigner(cfg, &model, &hash, opts)?,
            OutputKind::EntropyCurve => write_entropy(&model, &hash, opts)?,
            OutputKind::OracleCompare => write_oracle(cfg, &model, &hash, opts)?,
        };
        summary.files.push(path);
    }
    Ok(summary)
}

fn write_dcoef(model: &Model, hash: &str, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let n = model.dynamics.n();
    let mut text = csv_header(hash);
    let cols: Vec<String> = (1..=n).map(|m| format!("d{m}")).collect();
    text.push_str(&format!("t,{}\n", cols.join(",")));
    for b in bundles(&model.dynamics, &model.resolved.times, opts.serial)? {
        let vals: Vec<String> = b.dcoef.iter().map(|&d| num(d)).collect();
        text.push_str(&format!("{},{}\n", num(b.t), vals.join(",")));
    }
    let path = opts.out.join("dcoef.csv");
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

fn write_entropy(model: &Model, hash: &str, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let InitialState::Coherent(state) = &model.resolved.state else { unreachable!("checked by resolve") };
    let mut text = csv_header(hash);
    text.push_str("t,linear_entropy\n");
    for b in bundles(&model.dynamics, &model.resolved.times, opts.serial)? {
        text.push_str(&format!("{},{}\n", num(b.t), num(linear_entropy(state, &b)?)));
    }
    let path = opts.out.join("entropy_curve.csv");
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

fn write_wigner(cfg: &RunConfig, model: &Model, hash: &str, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let grid = cfg.wigner_grid.as_ref().expect("checked by resolve");
    let axes: Vec<_> = grid.axes.iter().map(|a| (a.re.axis(), a.im.axis())).collect();
    let points = grid_points(&axes);
    let bundle = model.dynamics.bundle(grid.t)?;
    let values = match &model.resolved.state {
        InitialState::Coherent(state) => wigner_grid(state, &bundle, &points, opts.serial)?,
        InitialState::Fock(state) => {
            let chi = |eta: &CVec| char_function_fock(state, eta, &bundle).expect("dimensions checked");
            points.iter().map(|xi| wigner_from_char(chi, xi, Quadrature::default())).collect::<Result<Vec<_>, _>>()?
        }
    };
    let mut buf = csv_header(hash).into_bytes();
    write_grid_csv(&mut buf, &points, &values)?;
    let path = opts.out.join("wigner_grid.csv");
    write_atomic(&path, &buf)?;
    Ok(path)
}

/// Initial density matrix of the configured state on the truncated space.
pub fn oracle_initial(state: &InitialState, space: &oracle::FockSpace) -> Result<oracle::TruncatedDensityMatrix, CliError> {
    let d = space.dim();
    let mut rho = oracle::CMat::zeros(d, d);
    match state {
        InitialState::Coherent(s) => {
            for b in s.branches() {
                let terms = b
                    .components
                    .iter()
                    .map(|c| Ok((c.amplitude, oracle::product_coherent_ket(space, c.beta.as_slice())?)))
                    .collect::<Result<Vec<_>, oracle::OracleError>>()?;
                let ket = oracle::superposition(&terms)?;
                rho += &ket * ket.adjoint() * Complex64::new(b.weight, 0.0);
            }
        }
        InitialState::Fock(s) => {
            for b in s.branches() {
                let ket = oracle::fock_ket(space, &b.coefficients)?;
                rho += &ket * ket.adjoint() * Complex64::new(b.weight, 0.0);
            }
        }
    }
    Ok(oracle::TruncatedDensityMatrix { space: space.clone(), rho, t: 0.0 })
}

fn default_cutoff(model: &Model) -> Result<usize, CliError> {
    let modes = normal_modes(&model.coupling)?;
    let mut nbar = 0.0_f64;
    for r in &model.resolved.reservoirs.reservoirs {
        for &w in modes.varpi.iter() {
            nbar = nbar.max(r.bath.occupation(w)?);
        }
    }
    Ok(match &model.resolved.state {
        InitialState::Coherent(s) => {
            let amp = s
                .branches()
                .iter()
                .flat_map(|b| b.components.iter().flat_map(|c| c.beta.iter().map(|z| z.norm())))
                .fold(0.0, f64::max);
            oracle::recommended_cutoff(amp, nbar)
        }
        InitialState::Fock(s) => s.max_occupation() + oracle::recommended_cutoff(0.0, nbar),
    })
}

fn write_oracle(cfg: &RunConfig, model: &Model, hash: &str, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let n = model.dynamics.n();
    let n_max = match cfg.oracle.n_max {
        Some(v) => v,
        None => default_cutoff(model)?,
    };
    let space = oracle::FockSpace::new(n, n_max);
    let rho0 = oracle_initial(&model.resolved.state, &space)?;
    let traj = oracle::evolve_master(&rho0, &model.coupling.h, &model.rates.gamma, &model.rates.upsilon, &model.resolved.times)?;
    let etas: Vec<Complex64> = cfg.oracle.eta.iter().map(|&z| z.into()).collect();
    let grid: Vec<Vec<Complex64>> = (0..etas.len().pow(n as u32))
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let e = etas[idx % etas.len()];
                    idx /= etas.len();
                    e
                })
                .collect()
        })
        .collect();
    let mut text = csv_header(hash);
    text.push_str(&format!("# n_max {n_max}; trace drift {:e}\n", traj.trace_drift));
    text.push_str("t,max_abs_chi_diff\n");
    for st in &traj.states {
        let b = model.dynamics.bundle(st.t)?;
        let mut worst = 0.0_f64;
        for eta in &grid {
            let v = CVec::from_column_slice(eta);
            let analytic = match &model.resolved.state {
                InitialState::Coherent(s) => char_function(s, &v, &b)?,
                InitialState::Fock(s) => char_function_fock(s, &v, &b)?,
            };
            worst = worst.max((analytic - oracle::oracle_char(st, eta)).norm());
        }
        text.push_str(&format!("{},{}\n", num(st.t), num(worst)));
    }
    let path = opts.out.join("oracle_compare.csv");
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

pub fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    crate::config::parse(&text)
}
