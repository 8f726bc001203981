//! Simulation of the Laplacian flow `ẋ = −Lx`, the pseudoinverse flow
//! `ẋ = −L†x`, and the impedance flow `İ = (1/ℒ_ind)(−L†)I`, with
//! consensus detection and predicted-limit comparison.
//!
//! The paper-level derivation of the pseudoinverse flow goes through the
//! agent dynamics `ẋ_i = −x_i/N_i + ẋ_j` aggregated to `Lẋ = −x`; only the
//! resulting system `ẋ = −L†x` is implemented here (the intermediate
//! aggregation step in the source contains an apparent typo and is not
//! repaired or used).

use std::collections::HashMap;
use std::io::Write;

use thiserror::Error;

use crate::numkernel::{
    self, expm, frobenius_norm, require_square, CMatrix, CVector, KernelError, Scalar,
};
use crate::spectral::{LaplacianBundle, SpectralError, DEFAULT_ZERO_TOL};

/// Default absolute spread tolerance for consensus detection.
pub const DEFAULT_TOL_CONS: f64 = 1e-6;
/// State-norm threshold beyond which a trajectory is declared diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("time grid must be non-empty")]
    EmptyGrid,
    #[error("time grid must be strictly increasing at index {0}")]
    NonIncreasingGrid(usize),
    #[error("time grid must start at or after 0, got {0}")]
    NegativeStart(f64),
    #[error("generator is {rows}x{cols} but the state has {state} entries")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        state: usize,
    },
    #[error("initial state has a non-finite entry")]
    NonFiniteState,
    #[error("no consensus limit exists: {0}")]
    NoConsensusLimit(String),
    #[error("shunt inductance must be positive, got {0}")]
    NonPositiveInductance(f64),
}

/// Integration method. `ExactExpm` computes one matrix exponential per
/// distinct step size, giving the exact linear-system solution to kernel
/// accuracy; `Rk4Crosscheck` is a classical 4th-order integrator with 100
/// substeps per grid interval, used to cross-check the exponential path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactExpm,
    Rk4Crosscheck,
}

/// One flow to simulate: `ẋ = G·x` sampled on `t_grid`, starting from
/// `x0` at time zero.
#[derive(Debug, Clone)]
pub struct FlowSpec {
    pub generator: CMatrix,
    pub x0: CVector,
    pub t_grid: Vec<f64>,
    pub method: Method,
}

/// Sampled states of one flow. When `diverged` is set, `times` and
/// `states` are truncated just before the first overflowing sample.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    pub diverged: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<&CVector> {
        self.states.last()
    }
}

/// Consensus classification of one trajectory.
#[derive(Debug, Clone)]
pub struct ConsensusReport {
    pub achieved: bool,
    /// Mean of the final state, when consensus was achieved.
    pub consensus_value: Option<Scalar>,
    /// First sample time from which the spread stays below tolerance.
    pub settling_time: Option<f64>,
    pub spread_final: f64,
}

fn validate(spec: &FlowSpec) -> Result<usize, FlowError> {
    let n = require_square(&spec.generator)?;
    numkernel::require_finite(&spec.generator)?;
    if spec.x0.len() != n {
        return Err(FlowError::DimensionMismatch {
            rows: n,
            cols: n,
            state: spec.x0.len(),
        });
    }
    if spec.x0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(FlowError::NonFiniteState);
    }
    if spec.t_grid.is_empty() {
        return Err(FlowError::EmptyGrid);
    }
    if spec.t_grid[0] < 0.0 || !spec.t_grid[0].is_finite() {
        return Err(FlowError::NegativeStart(spec.t_grid[0]));
    }
    for k in 1..spec.t_grid.len() {
        if !(spec.t_grid[k] > spec.t_grid[k - 1]) || !spec.t_grid[k].is_finite() {
            return Err(FlowError::NonIncreasingGrid(k));
        }
    }
    Ok(n)
}

/// Simulates the flow. The state at `t_grid[0]` is propagated from `x0`
/// at time zero; for uniform grids the exponential method computes a
/// single propagator and reuses it.
pub fn simulate(spec: &FlowSpec) -> Result<Trajectory, FlowError> {
    validate(spec)?;
    match spec.method {
        Method::ExactExpm => simulate_expm(spec),
        Method::Rk4Crosscheck => simulate_rk4(spec),
    }
}

fn state_ok(state: &CVector) -> bool {
    let norm = numkernel::vector_norm(state);
    norm.is_finite() && norm <= DIVERGENCE_NORM
}

fn simulate_expm(spec: &FlowSpec) -> Result<Trajectory, FlowError> {
    // cache propagators by the bit pattern of the step size
    let mut propagators: HashMap<u64, CMatrix> = HashMap::new();
    let mut propagator = |dt: f64| -> Result<CMatrix, KernelError> {
        if let Some(p) = propagators.get(&dt.to_bits()) {
            return Ok(p.clone());
        }
        let p = expm(&spec.generator.mapv(|z| z * dt))?;
        propagators.insert(dt.to_bits(), p.clone());
        Ok(p)
    };

    let mut times = Vec::with_capacity(spec.t_grid.len());
    let mut states: Vec<CVector> = Vec::with_capacity(spec.t_grid.len());
    let mut diverged = false;

    let mut current = spec.x0.clone();
    let mut prev_t = 0.0f64;
    for &t in &spec.t_grid {
        let dt = t - prev_t;
        if dt > 0.0 {
            let next = match propagator(dt) {
                Ok(p) => p.dot(&current),
                Err(KernelError::ExpmSaturated) => {
                    diverged = true;
                    break;
                }
                Err(e) => return Err(e.into()),
            };
            current = next;
        }
        if !state_ok(&current) {
            diverged = true;
            break;
        }
        times.push(t);
        states.push(current.clone());
        prev_t = t;
    }
    Ok(Trajectory {
        times,
        states,
        diverged,
    })
}

fn simulate_rk4(spec: &FlowSpec) -> Result<Trajectory, FlowError> {
    const SUBSTEPS: usize = 100;
    let g = &spec.generator;
    let deriv = |x: &CVector| -> CVector { g.dot(x) };

    let mut times = Vec::with_capacity(spec.t_grid.len());
    let mut states: Vec<CVector> = Vec::with_capacity(spec.t_grid.len());
    let mut diverged = false;

    let mut current = spec.x0.clone();
    let mut prev_t = 0.0f64;
    'outer: for &t in &spec.t_grid {
        let dt = t - prev_t;
        if dt > 0.0 {
            let h = dt / SUBSTEPS as f64;
            for _ in 0..SUBSTEPS {
                let k1 = deriv(&current);
                let k2 = deriv(&(&current + &k1.mapv(|z| z * (h / 2.0))));
                let k3 = deriv(&(&current + &k2.mapv(|z| z * (h / 2.0))));
                let k4 = deriv(&(&current + &k3.mapv(|z| z * h)));
                let incr = (k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4)
                    .mapv(|z| z * (h / 6.0));
                current = &current + &incr;
                if !state_ok(&current) {
                    diverged = true;
                    break 'outer;
                }
            }
        }
        if !state_ok(&current) {
            diverged = true;
            break;
        }
        times.push(t);
        states.push(current.clone());
        prev_t = t;
    }
    Ok(Trajectory {
        times,
        states,
        diverged,
    })
}

/// Largest pairwise state distance `max_{i,j} |x_i − x_j|`.
pub fn spread(state: &CVector) -> f64 {
    let n = state.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((state[i] - state[j]).norm());
        }
    }
    worst
}

/// Consensus is achieved when the trajectory did not diverge and the
/// spread stays at or below `tol_cons` from the first sample where it
/// drops under the tolerance through the final sample.
pub fn detect_consensus(traj: &Trajectory, tol_cons: f64) -> ConsensusReport {
    let spreads: Vec<f64> = traj.states.iter().map(spread).collect();
    let spread_final = spreads.last().copied().unwrap_or(f64::INFINITY);
    if traj.diverged || traj.states.is_empty() {
        return ConsensusReport {
            achieved: false,
            consensus_value: None,
            settling_time: None,
            spread_final,
        };
    }
    let first_below = spreads.iter().position(|&s| s <= tol_cons);
    let achieved = match first_below {
        Some(k) => spreads[k..].iter().all(|&s| s <= tol_cons),
        None => false,
    };
    if !achieved {
        return ConsensusReport {
            achieved: false,
            consensus_value: None,
            settling_time: None,
            spread_final,
        };
    }
    let last = traj.states.last().expect("non-empty");
    let mean: Scalar = last.iter().sum::<Scalar>() / last.len() as f64;
    ConsensusReport {
        achieved: true,
        consensus_value: Some(mean),
        settling_time: first_below.map(|k| traj.times[k]),
        spread_final,
    }
}

/// Predicted consensus value `(z^H x₀)/(z^H 1)` from the left null vector
/// of the Laplacian.
///
/// Requires corank 1 and every nonzero eigenvalue of `L` in the open right
/// half-plane; for weight-balanced graphs the prediction equals the
/// arithmetic mean of `x₀`.
pub fn predicted_consensus_value(
    bundle: &LaplacianBundle,
    x0: &CVector,
) -> Result<Scalar, FlowError> {
    if bundle.corank != 1 {
        return Err(FlowError::NoConsensusLimit(format!(
            "corank is {}, expected 1",
            bundle.corank
        )));
    }
    let scale = frobenius_norm(&bundle.laplacian);
    let cut = DEFAULT_ZERO_TOL * scale;
    for z in bundle.spectrum.eigenvalues.iter() {
        if z.norm() > cut && z.re <= cut {
            return Err(FlowError::NoConsensusLimit(format!(
                "eigenvalue {z} is not in the open right half-plane"
            )));
        }
    }
    if x0.len() != bundle.n() {
        return Err(FlowError::DimensionMismatch {
            rows: bundle.n(),
            cols: bundle.n(),
            state: x0.len(),
        });
    }
    let z = bundle
        .left_null
        .as_ref()
        .expect("corank 1 bundle has a left null vector");
    let numerator: Scalar = z.iter().zip(x0.iter()).map(|(zi, xi)| zi.conj() * xi).sum();
    let denominator: Scalar = z.iter().map(|zi| zi.conj()).sum();
    if denominator.norm() <= 1e-12 {
        return Err(FlowError::NoConsensusLimit(
            "left null vector is orthogonal to the all-ones direction".into(),
        ));
    }
    Ok(numerator / denominator)
}

/// Impedance flow `İ = (1/ℒ_ind)(−L†)I` in seconds, for a bundle built
/// from an impedance graph.
pub fn impedance_flow(
    bundle: &LaplacianBundle,
    shunt_inductance: f64,
    i0: &CVector,
    t_grid: Vec<f64>,
) -> Result<Trajectory, FlowError> {
    if !(shunt_inductance > 0.0) {
        return Err(FlowError::NonPositiveInductance(shunt_inductance));
    }
    let generator = bundle.pinv.mapv(|z| -z / shunt_inductance);
    simulate(&FlowSpec {
        generator,
        x0: i0.clone(),
        t_grid,
        method: Method::ExactExpm,
    })
}

/// Uniform time grid over `[0, t_max]` with `samples` points.
pub fn uniform_grid(t_max: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n)
        .map(|k| t_max * k as f64 / (n - 1) as f64)
        .collect()
}

/// Writes the trajectory in the column-exact CSV schema
/// `t,re_x0,im_x0,re_x1,im_x1,...` with one row per sample and 12
/// significant digits.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: &mut W) -> std::io::Result<()> {
    let n = traj.states.first().map_or(0, |s| s.len());
    write!(out, "t")?;
    for i in 0..n {
        write!(out, ",re_x{i},im_x{i}")?;
    }
    writeln!(out)?;
    for (t, state) in traj.times.iter().zip(traj.states.iter()) {
        write!(out, "{}", format_sig12(*t))?;
        for z in state.iter() {
            write!(out, ",{},{}", format_sig12(z.re), format_sig12(z.im))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// 12 significant digits in scientific notation.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}
