//! Effective exchange frequency `J_12` from two-emitter population dynamics.
//!
//! The primary estimate uses the first maximum of the (smoothed)
//! `|C_2(t)|^2 = sin^2(J_12 t)`, i.e. `J_12 = pi / (2 t_max)`. It is
//! cross-checked against the best-fitting single frequency of
//! `|C_1(t)|^2 - 1/2 = cos(2 J_12 t)/2`, found with a floating-mean
//! least-squares periodogram.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// Default moving-average window, in units of `1/J`.
pub const J12_WINDOW: f64 = 3.0;
/// Relative disagreement above which an estimate is flagged ambiguous.
pub const J12_AGREEMENT: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct J12Estimate {
    /// `pi / (2 t_max)`.
    pub j12: f64,
    pub t_max: f64,
    /// Half the dominant angular frequency of `|C_1|^2`.
    pub spectral: f64,
    /// The two estimates disagree by more than [`J12_AGREEMENT`].
    pub ambiguous: bool,
}

/// Centred moving average over `window` (time units) on uniform samples.
pub fn moving_average(times: &[f64], values: &[f64], window: f64) -> Vec<f64> {
    let n = values.len();
    if n < 2 || window <= 0.0 {
        return values.to_vec();
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    let half = ((0.5 * window / dt).round() as usize).min(n / 2);
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + values[i];
    }
    (0..n)
        .map(|i| {
            // shrink the window symmetrically near the ends
            let h = half.min(i).min(n - 1 - i);
            (prefix[i + h + 1] - prefix[i - h]) / (2 * h + 1) as f64
        })
        .collect()
}

/// Time of the first local maximum of `values` exceeding half the global
/// maximum, refined by a parabola through the neighbouring samples.
pub fn first_maximum(times: &[f64], values: &[f64]) -> Option<f64> {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(top > 0.0) {
        return None;
    }
    let i = (1..values.len().saturating_sub(1)).find(|&i| values[i] >= values[i - 1] && values[i] > values[i + 1] && values[i] > 0.5 * top)?;
    let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom != 0.0 { (0.5 * (a - c) / denom).clamp(-1.0, 1.0) } else { 0.0 };
    let dt = 0.5 * (times[i + 1] - times[i - 1]);
    Some(times[i] + shift * dt)
}

/// Samples between exact re-evaluations of the rotating phasor.
const PHASOR_RESEED: usize = 64;

/// Fraction of the variance of `y` explained by `a cos(w t) + b sin(w t) + c`.
/// The fit is invariant under a shift of the time origin, so phases are
/// measured from `times[0]` and advanced by rotation between reseeds.
fn explained(times: &[f64], y: &[f64], w: f64) -> f64 {
    let (t0, n) = (times[0], times.len());
    let (sd, cd) = if n > 1 { (w * (times[1] - t0)).sin_cos() } else { (0.0, 1.0) };
    let mut m = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    let (mut c, mut s) = (1.0, 0.0);
    for (k, (&t, &v)) in times.iter().zip(y).enumerate() {
        if k % PHASOR_RESEED == 0 {
            (s, c) = (w * (t - t0)).sin_cos();
        }
        let f = [c, s, 1.0];
        for i in 0..3 {
            r[i] += f[i] * v;
            for j in i..3 {
                m[i][j] += f[i] * f[j];
            }
        }
        (c, s) = (c * cd - s * sd, s * cd + c * sd);
    }
    for i in 0..3 {
        for j in 0..i {
            m[i][j] = m[j][i];
        }
    }
    let Some(coef) = nalgebra::Matrix3::from_fn(|i, j| m[i][j]).lu().solve(&nalgebra::Vector3::from(r)) else {
        return 0.0;
    };
    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return 0.0;
    }
    // least squares: |y - X b|^2 = y.y - b.(X^T y)
    let yy: f64 = y.iter().map(|v| v * v).sum();
    let ss_res = (yy - (coef[0] * r[0] + coef[1] * r[1] + coef[2] * r[2])).max(0.0);
    1.0 - ss_res / ss_tot
}

/// Dominant angular frequency of `y(t)` between one cycle per horizon
/// and the Nyquist frequency.
pub fn dominant_frequency(times: &[f64], y: &[f64]) -> Option<f64> {
    let n = times.len();
    if n < 8 {
        return None;
    }
    let span = times[n - 1] - times[0];
    let nyquist = std::f64::consts::PI * (n - 1) as f64 / span;
    let lo = 0.5 * TAU / span;
    let steps = 8 * n;
    let dw = (nyquist - lo) / steps as f64;
    let (mut best, mut best_w) = (f64::NEG_INFINITY, lo);
    for s in 0..=steps {
        let w = lo + s as f64 * dw;
        let p = explained(times, y, w);
        if p > best {
            best = p;
            best_w = w;
        }
    }
    // golden-section refinement inside the bracketing cell
    let (mut a, mut b) = ((best_w - dw).max(lo), best_w + dw);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if explained(times, y, c) > explained(times, y, d) {
            b = d;
        } else {
            a = c;
        }
    }
    Some(0.5 * (a + b))
}

/// `J_12` from `|C_1|^2` and `|C_2|^2` sampled on uniform `times`.
pub fn extract_j12(times: &[f64], p1: &[f64], p2: &[f64], window: f64) -> Result<J12Estimate> {
    if times.len() != p1.len() || times.len() != p2.len() {
        return Err(Error::InvalidParameter("population series must match the sample times".into()));
    }
    let smooth = moving_average(times, p2, window);
    let t_max = first_maximum(times, &smooth).ok_or(Error::NoMaximum)?;
    let t_rel = t_max - times[0];
    if !(t_rel > 0.0) {
        return Err(Error::NoMaximum);
    }
    let j12 = FRAC_PI_2 / t_rel;
    let shifted: Vec<f64> = p1.iter().map(|p| p - 0.5).collect();
    let spectral = dominant_frequency(times, &shifted).map_or(f64::NAN, |w| 0.5 * w);
    let ambiguous = !((spectral - j12).abs() <= J12_AGREEMENT * j12);
    if ambiguous {
        log::warn!("J12 estimates disagree: peak time gives {j12:.5}, spectrum gives {spectral:.5}");
    }
    Ok(J12Estimate { j12, t_max, spectral, ambiguous })
}

/// [`extract_j12`] with the smoothing window tied to the signal itself: half
/// the population-exchange period `pi / (2 J_12)` taken from the spectral
/// estimate, but at least `min_window`. Averaging a symmetric peak
/// symmetrically leaves its position unchanged, so a wide window removes
/// slow ripples (e.g. cavity round trips) without biasing `t_max`.
pub fn extract_j12_adaptive(times: &[f64], p1: &[f64], p2: &[f64], min_window: f64) -> Result<J12Estimate> {
    let shifted: Vec<f64> = p1.iter().map(|p| p - 0.5).collect();
    let window = match dominant_frequency(times, &shifted) {
        Some(w) if w > 0.0 => (PI / w).max(min_window),
        _ => min_window,
    };
    extract_j12(times, p1, p2, window)
}

/// [`extract_j12`] on a two-emitter trajectory.
pub fn extract_j12_trajectory(traj: &Trajectory, window: f64) -> Result<J12Estimate> {
    if traj.n_emitters() != 2 {
        return Err(Error::EmitterCount { expected: 2, found: traj.n_emitters() });
    }
    extract_j12(&traj.times, &traj.emitter_population(0), &traj.emitter_population(1), window)
}

/// [`extract_j12_adaptive`] on a two-emitter trajectory.
pub fn extract_j12_trajectory_adaptive(traj: &Trajectory, min_window: f64) -> Result<J12Estimate> {
    if traj.n_emitters() != 2 {
        return Err(Error::EmitterCount { expected: 2, found: traj.n_emitters() });
    }
    extract_j12_adaptive(&traj.times, &traj.emitter_population(0), &traj.emitter_population(1), min_window)
}
