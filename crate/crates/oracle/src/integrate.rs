use crate::error::{OracleError, Result};
use crate::liouvillian::Generator;
use crate::states::TruncatedDensityMatrix;
use crate::{CMat, RMat};
use num_complex::Complex64;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const OVERFLOW: f64 = 1e-6;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<TruncatedDensityMatrix>,
    /// max |Tr ρ − 1| over accepted steps; reported, not corrected.
    pub trace_drift: f64,
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince 5(4) tableau; the generator is autonomous so the nodes c_i are not needed
const A: [&[f64]; 7] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub fn evolve_master(
    rho0: &TruncatedDensityMatrix,
    h: &RMat,
    gamma: &RMat,
    upsilon: &RMat,
    t_grid: &[f64],
) -> Result<Trajectory> {
    evolve_master_with(rho0, h, gamma, upsilon, t_grid, DEFAULT_TOLERANCE)
}

/// Adaptive DP5(4) integration reporting the state at every grid time.
pub fn evolve_master_with(
    rho0: &TruncatedDensityMatrix,
    h: &RMat,
    gamma: &RMat,
    upsilon: &RMat,
    t_grid: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.first().is_some_and(|&t| t < rho0.t) {
        return Err(OracleError::Invalid("time grid must be sorted and start at or after ρ0.t".into()));
    }
    let gen = Generator::new(rho0.space.clone(), h.clone(), gamma.clone(), upsilon.clone())?;
    let space = &gen.space;
    let mut y = rho0.rho.clone();
    let mut t = rho0.t;
    let mut step = 1e-2;
    let mut k1 = gen.apply(&y);
    let mut out = Trajectory { states: Vec::with_capacity(t_grid.len()), trace_drift: 0.0, accepted: 0, rejected: 0 };

    for &target in t_grid {
        while t < target {
            let last = target - t <= step;
            let hh = if last { target - t } else { step };
            let mut k: Vec<CMat> = Vec::with_capacity(7);
            k.push(k1.clone());
            for stage in 1..7 {
                let mut ys = y.clone();
                for (j, a) in A[stage].iter().enumerate() {
                    if *a != 0.0 {
                        ys += &k[j] * Complex64::new(hh * a, 0.0);
                    }
                }
                k.push(gen.apply(&ys));
            }
            let mut y5 = y.clone();
            let mut err = CMat::zeros(y.nrows(), y.ncols());
            for j in 0..7 {
                if B5[j] != 0.0 {
                    y5 += &k[j] * Complex64::new(hh * B5[j], 0.0);
                }
                err += &k[j] * Complex64::new(hh * (B5[j] - B4[j]), 0.0);
            }
            let ratio = err
                .iter()
                .zip(y.iter().zip(y5.iter()))
                .map(|(e, (a, b))| e.norm() / (tol + tol * a.norm().max(b.norm())))
                .fold(0.0, f64::max);
            if ratio <= 1.0 {
                t = if last { target } else { t + hh };
                y = y5;
                k1 = k.swap_remove(6);
                out.accepted += 1;
                out.trace_drift = out.trace_drift.max((y.trace().re - 1.0).abs());
                for m in 0..space.modes {
                    let p = space.top_level_probability(&y, m);
                    if p > OVERFLOW {
                        return Err(OracleError::CutoffOverflow { mode: m, probability: p });
                    }
                }
            } else {
                out.rejected += 1;
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            // a clipped final step says nothing about the natural step size
            if !(last && ratio <= 1.0) {
                step = hh * factor;
            }
            if step < MIN_STEP {
                return Err(OracleError::StepUnderflow { t });
            }
        }
        out.states.push(TruncatedDensityMatrix { space: space.clone(), rho: y.clone(), t: target });
    }
    Ok(out)
}
