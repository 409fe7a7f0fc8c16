//! Parameter scans over the two-emitter hinge scenarios: maximal transient
//! concurrence in the dissipative regime and the exchange frequency `J_12`
//! in the closed-box (cavity) regime.
//!
//! Cells are independent trajectories and run in parallel; a failing cell is
//! recorded as a hole instead of aborting the scan.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{extract_j12_trajectory, extract_j12_trajectory_adaptive, J12Estimate, J12_WINDOW};
#[cfg(doc)]
use crate::analysis::extract_j12_adaptive;
use crate::dynamics::{evolve, timescales, EvolveOptions, SystemState, Trajectory};
use crate::error::{Error, Result};
use crate::scenario::HingePair;

/// Observation time for a dissipative hinge run: a few emitter lifetimes
/// `~ 1/g^2`, bounded to keep cells cheap.
pub fn chiral_horizon(g: f64) -> f64 {
    if g > 0.0 {
        (10.0 / (g * g)).clamp(40.0, 400.0)
    } else {
        40.0
    }
}

/// Observation time for a cavity run: about 1.5 exchange periods for the
/// `J_12 ~ 0.02 g^2 / J` observed in closed braid boxes.
pub fn cavity_horizon(g: f64) -> f64 {
    if g > 0.0 {
        24.0 / (g * g)
    } else {
        1.0
    }
}

/// Length of the closed braid path around a box of `n_side` sites per face,
/// in units of `a`.
pub fn braid_path(n_side: usize) -> f64 {
    4.0 * std::f64::consts::SQRT_2 * n_side as f64
}

/// Smallest smoothing window for `J_12` extraction in a box: the round-trip
/// time of the braid path, at least [`J12_WINDOW`]. The window actually used
/// grows to half the exchange period (see [`extract_j12_adaptive`]).
pub fn cavity_window(n_side: usize, g: f64) -> f64 {
    timescales(g, braid_path(n_side), 1.0).round_trip.max(J12_WINDOW)
}

impl HingePair {
    /// Evolve the pair from the first emitter excited to `t_final`, with
    /// `n_samples` uniform observable samples.
    pub fn trajectory(&self, t_final: f64, n_samples: usize) -> Result<Trajectory> {
        let (_, system) = self.build()?;
        let initial = SystemState::single_excited(&system, 0)?;
        let options = EvolveOptions::default().with_samples(0.0, t_final, n_samples);
        evolve(&system, &initial, t_final, &options)
    }
}

/// Maximum of `C(t)` and the time it is reached.
pub fn max_concurrence(traj: &Trajectory) -> Result<(f64, f64)> {
    let c = traj.concurrence()?;
    let (i, v) = c.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    Ok((v, traj.times[i]))
}

/// One `(d, g)` cell of a concurrence scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceCell {
    pub d: usize,
    pub g: f64,
    pub c_max: Option<f64>,
    /// Time of the maximum.
    pub t_peak: Option<f64>,
    pub error: Option<String>,
}

/// `C_max` over a `(d, g)` grid, `cells[i_d * gs.len() + i_g]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceMap {
    pub ds: Vec<usize>,
    pub gs: Vec<f64>,
    pub cells: Vec<ConcurrenceCell>,
}

impl ConcurrenceMap {
    pub fn cell(&self, i_d: usize, i_g: usize) -> &ConcurrenceCell {
        &self.cells[i_d * self.gs.len() + i_g]
    }

    /// Cells that produced a value.
    pub fn values(&self) -> impl Iterator<Item = (&ConcurrenceCell, f64)> {
        self.cells.iter().filter_map(|c| c.c_max.map(|v| (c, v)))
    }
}

/// Samples per unit time used by the scans.
const SAMPLES_PER_TIME: f64 = 5.0;

fn samples_for(t_final: f64) -> usize {
    (t_final * SAMPLES_PER_TIME).ceil() as usize + 1
}

/// Maximal transient concurrence for every `(d, g)` with the other
/// parameters taken from `base`. `horizon` overrides [`chiral_horizon`].
pub fn concurrence_scan(base: &HingePair, ds: &[usize], gs: &[f64], horizon: Option<f64>) -> ConcurrenceMap {
    let grid: Vec<(usize, f64)> = ds.iter().flat_map(|&d| gs.iter().map(move |&g| (d, g))).collect();
    let cells = grid
        .par_iter()
        .map(|&(d, g)| {
            let outcome = if g == 0.0 {
                // nothing couples: the excitation stays put and C = 0
                Ok((0.0, 0.0))
            } else {
                let pair = HingePair { d, g, ..base.clone() };
                let t_final = horizon.unwrap_or_else(|| chiral_horizon(g));
                pair.trajectory(t_final, samples_for(t_final)).and_then(|t| max_concurrence(&t))
            };
            match outcome {
                Ok((c, t)) => {
                    log::info!("concurrence scan d = {d}, g = {g}: C_max = {c:.4} at t = {t:.2}");
                    ConcurrenceCell { d, g, c_max: Some(c), t_peak: Some(t), error: None }
                }
                Err(e) => {
                    log::warn!("concurrence scan d = {d}, g = {g} failed: {e}");
                    ConcurrenceCell { d, g, c_max: None, t_peak: None, error: Some(e.to_string()) }
                }
            }
        })
        .collect();
    ConcurrenceMap { ds: ds.to_vec(), gs: gs.to_vec(), cells }
}

/// Outcome of one closed-box exchange run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRun {
    pub n_side: usize,
    pub d: usize,
    pub estimate: J12Estimate,
    pub c_max: f64,
}

/// Evolve a cavity pair and extract `J_12` and `C_max`. A given `window` is
/// used as is; by default the window adapts to the exchange period with
/// [`cavity_window`] as lower bound. `horizon` defaults to [`cavity_horizon`].
pub fn exchange(pair: &HingePair, horizon: Option<f64>, window: Option<f64>) -> Result<ExchangeRun> {
    if pair.gamma != 0.0 {
        return Err(Error::InvalidParameter("the exchange frequency is defined for closed boxes (gamma = 0)".into()));
    }
    let t_final = horizon.unwrap_or_else(|| cavity_horizon(pair.g));
    let traj = pair.trajectory(t_final, samples_for(t_final))?;
    let estimate = match window {
        Some(w) => extract_j12_trajectory(&traj, w)?,
        None => extract_j12_trajectory_adaptive(&traj, cavity_window(pair.n_side, pair.g))?,
    };
    let (c_max, _) = max_concurrence(&traj)?;
    Ok(ExchangeRun { n_side: pair.n_side, d: pair.d, estimate, c_max })
}

/// One `(size, d)` point of a `J_12` scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct J12Point {
    pub n_side: usize,
    pub d: usize,
    pub run: Option<ExchangeRun>,
    pub error: Option<String>,
}

/// `J_12` over box sizes and hinge distances at fixed `g`. Distances larger
/// than a box face are skipped.
pub fn j12_scan(sizes: &[usize], ds: &[usize], g: f64, horizon: Option<f64>, window: Option<f64>) -> Vec<J12Point> {
    let grid: Vec<(usize, usize)> = sizes.iter().flat_map(|&n| ds.iter().filter(move |&&d| d <= n).map(move |&d| (n, d))).collect();
    grid.par_iter()
        .map(|&(n_side, d)| match exchange(&HingePair::cavity(n_side, d, g), horizon, window) {
            Ok(run) => {
                log::info!("j12 scan L = {n_side}, d = {d}: J12 = {:.6} (spectral {:.6}), C_max = {:.4}", run.estimate.j12, run.estimate.spectral, run.c_max);
                J12Point { n_side, d, run: Some(run), error: None }
            }
            Err(e) => {
                log::warn!("j12 scan L = {n_side}, d = {d} failed: {e}");
                J12Point { n_side, d, run: None, error: Some(e.to_string()) }
            }
        })
        .collect()
}
