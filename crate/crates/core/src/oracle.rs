//! Fixed-step RK4 reference solutions of `dV/dT = L e^V − V` and error scans
//! of shifted-gauge series against them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nondim::{NondimState, Trajectory, TrajectorySample};
use crate::series::{time_to_shifted, Domain, PowerSeries};

pub const DEFAULT_T_MAX: f64 = 20.0;
pub const DEFAULT_DT: f64 = 1e-4;

/// Right-hand side written as `S̃₀ e^{V−V₀} − V`, which vanishes exactly at
/// `V = V₀` when `Ĩ₀ = 0`.
fn rate(state: &NondimState, v: f64) -> f64 {
    state.s0_tilde * (v - state.v0).exp() - v
}

/// Number of steps and the step actually taken: `t_max` is always hit
/// exactly, with the step shrunk slightly if `dt` does not divide it.
fn step_plan(t_max: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain {
            name: "t_max",
            value: t_max,
            domain: "(0, inf)",
        });
    }
    if !(dt > 0.0 && dt <= t_max) {
        return Err(Error::Domain {
            name: "dt",
            value: dt,
            domain: "(0, t_max]",
        });
    }
    let steps = (t_max / dt - 1e-9).ceil().max(1.0);
    if steps > 1e9 {
        return Err(Error::InvalidInput(format!("{steps} RK4 steps requested")));
    }
    Ok((steps as usize, t_max / steps))
}

/// Classic RK4 in `T`, sampled at every step (including `T = 0`).
pub fn integrate_v(state: &NondimState, t_max: f64, dt: f64) -> Result<Trajectory> {
    let (steps, h) = step_plan(t_max, dt)?;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut v = state.v0;
    let push = |samples: &mut Vec<TrajectorySample>, t: f64, v: f64| -> Result<()> {
        let p = state.reconstruct(v)?;
        samples.push(TrajectorySample {
            t,
            v,
            s: p.s,
            i: p.i,
            r: p.r,
        });
        Ok(())
    };
    push(&mut samples, 0.0, v)?;
    for k in 0..steps {
        let k1 = rate(state, v);
        let k2 = rate(state, v + 0.5 * h * k1);
        let k3 = rate(state, v + 0.5 * h * k2);
        let k4 = rate(state, v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !v.is_finite() {
            return Err(Error::Overflow("RK4 step"));
        }
        push(&mut samples, (k + 1) as f64 * h, v)?;
    }
    Ok(Trajectory { samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSample {
    pub t: f64,
    pub y: f64,
    pub v_series: f64,
    pub v_rk4: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorScan {
    #[serde(rename = "N")]
    pub n: usize,
    /// `f64::MAX` when the series evaluation overflowed somewhere in the
    /// window (see `overflowed`).
    pub max_abs_error: f64,
    #[serde(rename = "argmax_T")]
    pub argmax_t: f64,
    pub overflowed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<ErrorSample>>,
}

/// Compares the order-`order` truncation of a `y`-series against an
/// existing RK4 trajectory at every trajectory sample.
pub fn error_scan_against(
    state: &NondimState,
    series: &PowerSeries,
    order: usize,
    trajectory: &Trajectory,
    keep_samples: bool,
) -> Result<ErrorScan> {
    if series.domain() != Domain::Y {
        return Err(Error::InvalidInput(format!(
            "error scans need a series in y, got {}",
            series.domain()
        )));
    }
    if !(state.lambda < 0.0) {
        return Err(Error::GaugeDegenerate {
            lambda: state.lambda,
        });
    }
    let truncated = series.truncated(order)?;
    let mut max = 0.0f64;
    let mut argmax = 0.0;
    let mut overflowed = false;
    let mut kept = keep_samples.then(|| Vec::with_capacity(trajectory.samples.len()));
    for s in &trajectory.samples {
        let y = time_to_shifted(s.t, state.lambda)?;
        let v_series = truncated.eval(y);
        let error = (s.v - v_series).abs();
        if !error.is_finite() {
            if !overflowed {
                argmax = s.t;
            }
            overflowed = true;
        } else if !overflowed && error > max {
            max = error;
            argmax = s.t;
        }
        if let Some(k) = kept.as_mut() {
            k.push(ErrorSample {
                t: s.t,
                y,
                v_series,
                v_rk4: s.v,
                error,
            });
        }
    }
    Ok(ErrorScan {
        n: order,
        max_abs_error: if overflowed { f64::MAX } else { max },
        argmax_t: argmax,
        overflowed,
        samples: kept,
    })
}

/// RK4 over `[0, t_max]` followed by [`error_scan_against`].
pub fn error_scan(
    state: &NondimState,
    series: &PowerSeries,
    order: usize,
    t_max: f64,
    dt: f64,
) -> Result<ErrorScan> {
    let traj = integrate_v(state, t_max, dt)?;
    error_scan_against(state, series, order, &traj, false)
}
