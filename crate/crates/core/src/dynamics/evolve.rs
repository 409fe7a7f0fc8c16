//! Fixed-step fourth-order propagation of `i d psi/dt = H psi`.
//!
//! For a time-independent linear operator the classical Runge–Kutta step is
//! exactly the fourth-order Taylor polynomial of `exp(-i H dt)`, which is how
//! it is evaluated here (four matrix–vector products per step, three
//! work vectors).

use serde::{Deserialize, Serialize};

use super::observables::concurrence_of;
use super::system::{CoupledSystem, SystemState};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, C64};

/// Default time step, in units of `1/J`.
pub const DEFAULT_DT: f64 = 0.02;
/// Default number of uniformly spaced observable samples.
pub const DEFAULT_SAMPLES: usize = 200;
/// Largest tolerated change of a reported population when the step is halved.
pub const HALVING_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub dt: f64,
    /// Observable sample times; empty means [`DEFAULT_SAMPLES`] uniform
    /// samples on `[t0, t_final]`.
    pub sample_times: Vec<f64>,
    /// Times at which the full state is kept.
    pub snapshot_times: Vec<f64>,
    /// Re-run with `dt/2` and report the largest population change.
    pub check_halving: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { dt: DEFAULT_DT, sample_times: Vec::new(), snapshot_times: Vec::new(), check_halving: false }
    }
}

impl EvolveOptions {
    pub fn with_samples(mut self, t0: f64, t_final: f64, n: usize) -> Self {
        self.sample_times = uniform_times(t0, t_final, n);
        self
    }
}

/// `n` equally spaced times from `t0` to `t1` inclusive.
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t1],
        _ => (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Observables recorded along one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Emitter amplitudes `C_j(t)` per sample.
    pub emitter_amplitudes: Vec<Vec<C64>>,
    /// `sum_r |C_r|^2` per sample.
    pub photonic: Vec<f64>,
    /// `||psi||^2` per sample.
    pub norm: Vec<f64>,
    /// `Re <psi|H|psi>` per sample.
    pub energy: Vec<f64>,
    /// Full states at the requested snapshot times, in time order.
    pub snapshots: Vec<SystemState>,
    /// Step actually used (the nominal step, shortened to land on events).
    pub dt: f64,
    /// Largest population change under step halving, when checked.
    pub halving_deviation: Option<f64>,
}

impl Trajectory {
    pub fn n_emitters(&self) -> usize {
        self.emitter_amplitudes.first().map_or(0, Vec::len)
    }

    /// `|C_j(t)|^2` per sample.
    pub fn emitter_population(&self, j: usize) -> Vec<f64> {
        self.emitter_amplitudes.iter().map(|c| c[j].norm_sqr()).collect()
    }

    /// `2 |C_1 C_2^*|` per sample; needs exactly two emitters.
    pub fn concurrence(&self) -> Result<Vec<f64>> {
        let n = self.n_emitters();
        if n != 2 {
            return Err(Error::EmitterCount { expected: 2, found: n });
        }
        Ok(self.emitter_amplitudes.iter().map(|c| concurrence_of(c[0], c[1])).collect())
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&SystemState> {
        self.snapshots.iter().find(|s| (s.t - t).abs() < 1e-9)
    }
}

/// Propagator working storage.
struct Stepper<'a> {
    h: &'a CsrMatrix,
    v: Vec<C64>,
    w: Vec<C64>,
}

impl<'a> Stepper<'a> {
    fn new(h: &'a CsrMatrix) -> Self {
        let n = h.dim();
        Stepper { h, v: vec![C64::new(0.0, 0.0); n], w: vec![C64::new(0.0, 0.0); n] }
    }

    /// `psi <- sum_{k<=4} (-i H dt)^k / k! psi`.
    fn step(&mut self, psi: &mut [C64], dt: f64) {
        self.v.copy_from_slice(psi);
        for k in 1..=4 {
            self.h.matvec_into(&self.v, &mut self.w);
            let f = C64::new(0.0, -dt / k as f64);
            for ((v, w), p) in self.v.iter_mut().zip(&self.w).zip(psi.iter_mut()) {
                *v = *w * f;
                *p += *v;
            }
        }
    }
}

fn record(h: &CsrMatrix, state: &SystemState, traj: &mut Trajectory) {
    traj.times.push(state.t);
    traj.emitter_amplitudes.push(state.emitters().to_vec());
    traj.photonic.push(state.photonic_population());
    traj.norm.push(state.norm_sqr());
    traj.energy.push(h.expectation(state.amplitudes()).re);
}

fn run(system: &CoupledSystem, initial: &SystemState, t_final: f64, samples: &[f64], snaps: &[f64], dt: f64) -> Result<Trajectory> {
    let h = system.matrix();
    let mut state = initial.clone();
    let t0 = initial.t;
    let mut events: Vec<f64> = samples.iter().chain(snaps).copied().chain([t_final]).filter(|&t| t >= t0 && t <= t_final).collect();
    events.sort_by(f64::total_cmp);
    events.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let is_in = |list: &[f64], t: f64| list.iter().any(|&s| (s - t).abs() < 1e-12);
    let mut traj = Trajectory {
        times: Vec::with_capacity(samples.len()),
        emitter_amplitudes: Vec::with_capacity(samples.len()),
        photonic: Vec::with_capacity(samples.len()),
        norm: Vec::with_capacity(samples.len()),
        energy: Vec::with_capacity(samples.len()),
        snapshots: Vec::new(),
        dt,
        halving_deviation: None,
    };
    let mut stepper = Stepper::new(h);
    for &t_next in &events {
        let span = t_next - state.t;
        if span > 0.0 {
            let n = (span / dt - 1e-9).ceil().max(1.0) as usize;
            let h_step = span / n as f64;
            for _ in 0..n {
                stepper.step(state.amplitudes_mut(), h_step);
            }
            state.t = t_next;
            let norm = state.norm_sqr();
            if !norm.is_finite() || norm > 1e6 * initial.norm_sqr().max(1.0) {
                return Err(Error::NonFinite(t_next));
            }
        }
        if is_in(samples, t_next) {
            record(h, &state, &mut traj);
        }
        if is_in(snaps, t_next) {
            traj.snapshots.push(state.clone());
        }
    }
    Ok(traj)
}

/// Propagate `initial` to `t_final`, recording observables at the sample
/// times and full states at the snapshot times.
pub fn evolve(system: &CoupledSystem, initial: &SystemState, t_final: f64, options: &EvolveOptions) -> Result<Trajectory> {
    if initial.amplitudes().len() != system.dim() || initial.n_emitters() != system.n_emitters() {
        return Err(Error::InvalidParameter(format!(
            "state of dimension {} does not match the system ({})",
            initial.amplitudes().len(),
            system.dim()
        )));
    }
    if !(t_final > initial.t) {
        return Err(Error::InvalidParameter(format!("t_final = {t_final} must exceed the initial time {}", initial.t)));
    }
    if !(options.dt > 0.0 && options.dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {}", options.dt)));
    }
    if (initial.norm_sqr() - 1.0).abs() > 1e-9 {
        log::warn!("initial state has norm^2 {:.12}", initial.norm_sqr());
    }
    let samples = if options.sample_times.is_empty() {
        uniform_times(initial.t, t_final, DEFAULT_SAMPLES)
    } else {
        let mut s = options.sample_times.clone();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    };
    let mut traj = run(system, initial, t_final, &samples, &options.snapshot_times, options.dt)?;
    if options.check_halving {
        let fine = run(system, initial, t_final, &samples, &[], 0.5 * options.dt)?;
        let mut worst = 0.0f64;
        for (a, b) in traj.emitter_amplitudes.iter().zip(&fine.emitter_amplitudes) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x.norm_sqr() - y.norm_sqr()).abs());
            }
        }
        for (a, b) in traj.photonic.iter().zip(&fine.photonic) {
            worst = worst.max((a - b).abs());
        }
        if worst > HALVING_TOL {
            log::warn!("halving the step changes populations by {worst:.3e} (> {HALVING_TOL:.0e}); reduce dt");
        }
        traj.halving_deviation = Some(worst);
    }
    Ok(traj)
}
