//! Truncated power series for `V`, `ξ = e^V` and `S̃ = Lξ`.
//!
//! Three expansion variables are supported, each as a [`SeriesGauge`]:
//!
//! | name       | variable            | maps `T ∈ [0, ∞)` to |
//! |------------|---------------------|----------------------|
//! | `time`     | `T`                 | `[0, ∞)`             |
//! | `shifted`  | `y = 1 − e^{λT}`    | `[0, 1)`             |
//! | `straight` | `g = e^{λT}`        | `(0, 1]`             |
//!
//! All recursions carry the `A` (for `V`) and `C` (for `S̃`) coefficient
//! sequences. The `ξ` coefficients `B = C/L` contain the factor `ξ₀ = e^{V₀}`,
//! which grows quickly with `V₀`, so they are only formed on request.

mod shifted;
mod straight;
mod time;

pub use shifted::shifted_series;
pub use straight::{straight_gauge, StraightGaugeTable};
pub use time::time_series;

use serde::Serialize;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nondim::NondimState;
use crate::registry::{Named, Registry};

/// Which expansion variable a series is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Domain {
    T,
    G,
    Y,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::T => "T",
            Domain::G => "g",
            Domain::Y => "y",
        })
    }
}

/// Coefficients `c₀..c_N` of a truncated series in one expansion variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    domain: Domain,
    coeffs: Vec<f64>,
}

impl PowerSeries {
    pub fn new(domain: Domain, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "a power series needs at least one coefficient".into(),
            ));
        }
        if let Some(order) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::SeriesOverflow { order });
        }
        Ok(PowerSeries { domain, coeffs })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest order present.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The same series cut down to orders `0..=order`.
    pub fn truncated(&self, order: usize) -> Result<PowerSeries> {
        if order >= self.coeffs.len() {
            return Err(Error::OrderOutOfRange {
                order,
                len: self.coeffs.len(),
            });
        }
        Ok(PowerSeries {
            domain: self.domain,
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// `Σ cₙ xⁿ` by Horner's rule.
    pub fn eval(&self, x: f64) -> f64 {
        eval_poly(&self.coeffs, x)
    }

    pub fn scaled(&self, factor: f64) -> Result<PowerSeries> {
        PowerSeries::new(
            self.domain,
            self.coeffs.iter().map(|c| c * factor).collect(),
        )
    }
}

pub(crate) fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients of `exp(a(x))`.
pub fn exp_series(a: &PowerSeries) -> Result<PowerSeries> {
    let domain = a.domain();
    let a = a.coeffs();
    let b0 = a[0].exp();
    if !b0.is_finite() {
        return Err(Error::Overflow("exp of leading coefficient"));
    }
    let weighted: Vec<f64> = a.iter().enumerate().map(|(k, c)| k as f64 * c).collect();
    let mut b = Vec::with_capacity(a.len());
    b.push(b0);
    for n in 0..a.len() - 1 {
        let next = cauchy_step(&weighted, &b, n) / (n + 1) as f64;
        b.push(next);
    }
    PowerSeries::new(domain, b)
}

/// Coefficients of `1/b(x)`; requires `b₀ ≠ 0`.
pub fn reciprocal_series(b: &PowerSeries) -> Result<PowerSeries> {
    let bc = b.coeffs();
    if bc[0] == 0.0 {
        return Err(Error::ZeroCoefficient {
            order: 0,
            nearest_nonzero: bc.iter().position(|&c| c != 0.0),
        });
    }
    let inv = 1.0 / bc[0];
    let mut c = Vec::with_capacity(bc.len());
    c.push(inv);
    for n in 1..bc.len() {
        let s: f64 = (1..=n).map(|j| bc[j] * c[n - j]).sum();
        c.push(-inv * s);
    }
    PowerSeries::new(b.domain(), c)
}

/// `Σ_{j=0}^{n} w_{j+1} b_{n−j}` where `w_k = k·a_k`.
#[inline]
pub(crate) fn cauchy_step(weighted: &[f64], b: &[f64], n: usize) -> f64 {
    weighted[1..=n + 1]
        .iter()
        .zip(b[..=n].iter().rev())
        .map(|(w, x)| w * x)
        .sum()
}

/// Forward gauge map `y = 1 − e^{λT}` for `λ < 0`, `T ≥ 0`.
pub fn time_to_shifted(t: f64, lambda: f64) -> Result<f64> {
    if !(lambda < 0.0) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            domain: "(-inf, 0)",
        });
    }
    if !(t >= 0.0) {
        return Err(Error::Domain {
            name: "T",
            value: t,
            domain: "[0, inf]",
        });
    }
    Ok(-(lambda * t).exp_m1())
}

/// Inverse gauge map `T = ln(1 − y)/λ`; `y = 1` maps to `+∞`.
pub fn shifted_to_time(y: f64, lambda: f64) -> Result<f64> {
    if !(lambda < 0.0) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            domain: "(-inf, 0)",
        });
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain {
            name: "y",
            value: y,
            domain: "[0, 1]",
        });
    }
    if y == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-y).ln_1p() / lambda)
}

/// Coefficients of `V` (the `A` sequence) together with those of `S̃`
/// (the `C` sequence) in a single expansion variable.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTriple {
    pub a: PowerSeries,
    pub c: PowerSeries,
    l: f64,
}

impl SeriesTriple {
    pub(crate) fn new(a: PowerSeries, c: PowerSeries, l: f64) -> Self {
        SeriesTriple { a, c, l }
    }

    /// `ξ` coefficients `Bₙ = Cₙ/L`; absent when `L = 0`.
    pub fn b(&self) -> Option<PowerSeries> {
        if self.l > 0.0 {
            self.c.scaled(1.0 / self.l).ok()
        } else {
            None
        }
    }

    pub fn collapsed_parameter(&self) -> f64 {
        self.l
    }

    pub fn domain(&self) -> Domain {
        self.a.domain()
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }
}

/// Runs the shared `A`/`C` recursion. `next_a(n, Aₙ, Cₙ)` yields `Aₙ₊₁`.
pub(crate) fn run_recursion(
    domain: Domain,
    a0: f64,
    c0: f64,
    order: usize,
    l: f64,
    next_a: impl Fn(usize, f64, f64) -> f64,
) -> Result<SeriesTriple> {
    let mut a = Vec::with_capacity(order + 1);
    let mut c = Vec::with_capacity(order + 1);
    // weighted[k] = k·A_k
    let mut weighted = Vec::with_capacity(order + 1);
    a.push(a0);
    c.push(c0);
    weighted.push(0.0);
    for n in 0..order {
        let an1 = next_a(n, a[n], c[n]);
        a.push(an1);
        weighted.push((n + 1) as f64 * an1);
        let cn1 = cauchy_step(&weighted, &c, n) / (n + 1) as f64;
        if !an1.is_finite() || !cn1.is_finite() {
            return Err(Error::SeriesOverflow { order: n + 1 });
        }
        c.push(cn1);
    }
    Ok(SeriesTriple::new(
        PowerSeries::new(domain, a)?,
        PowerSeries::new(domain, c)?,
        l,
    ))
}

/// One choice of expansion variable for the `V` equation.
pub trait SeriesGauge: Named + Send + Sync {
    fn domain(&self) -> Domain;

    /// Coefficients through order `order`.
    fn expand(&self, state: &NondimState, order: usize) -> Result<SeriesTriple>;

    /// Value of the expansion variable at nondimensional time `t`.
    fn variable_at(&self, state: &NondimState, t: f64) -> Result<f64>;

    /// Whether a radius of at least one means convergence for all `T ≥ 0`.
    fn unit_disk_covers_physical_domain(&self) -> bool;
}

pub struct TimeGauge;
pub struct ShiftedGauge;
pub struct StraightGauge {
    pub root_tol: f64,
}

impl Named for TimeGauge {
    fn name(&self) -> &'static str {
        "time"
    }
}

impl SeriesGauge for TimeGauge {
    fn domain(&self) -> Domain {
        Domain::T
    }
    fn expand(&self, state: &NondimState, order: usize) -> Result<SeriesTriple> {
        time_series(state, order)
    }
    fn variable_at(&self, _state: &NondimState, t: f64) -> Result<f64> {
        Ok(t)
    }
    fn unit_disk_covers_physical_domain(&self) -> bool {
        false
    }
}

impl Named for ShiftedGauge {
    fn name(&self) -> &'static str {
        "shifted"
    }
}

impl SeriesGauge for ShiftedGauge {
    fn domain(&self) -> Domain {
        Domain::Y
    }
    fn expand(&self, state: &NondimState, order: usize) -> Result<SeriesTriple> {
        shifted_series(state, order)
    }
    fn variable_at(&self, state: &NondimState, t: f64) -> Result<f64> {
        time_to_shifted(t, state.lambda)
    }
    fn unit_disk_covers_physical_domain(&self) -> bool {
        true
    }
}

impl Named for StraightGauge {
    fn name(&self) -> &'static str {
        "straight"
    }
}

impl SeriesGauge for StraightGauge {
    fn domain(&self) -> Domain {
        Domain::G
    }
    fn expand(&self, state: &NondimState, order: usize) -> Result<SeriesTriple> {
        straight_gauge(state, order, self.root_tol)?.to_series(state)
    }
    fn variable_at(&self, state: &NondimState, t: f64) -> Result<f64> {
        if !(state.lambda < 0.0) || !(t >= 0.0) {
            return Err(Error::Domain {
                name: "T",
                value: t,
                domain: "[0, inf] with lambda < 0",
            });
        }
        Ok((state.lambda * t).exp())
    }
    fn unit_disk_covers_physical_domain(&self) -> bool {
        true
    }
}

pub const DEFAULT_STRAIGHT_ROOT_TOL: f64 = 1e-10;

/// Registry holding the `time`, `shifted` and `straight` gauges.
pub fn builtin_registry() -> Registry<dyn SeriesGauge> {
    let mut reg: Registry<dyn SeriesGauge> = Registry::new("series gauge");
    reg.register(Arc::new(TimeGauge))
        .register(Arc::new(ShiftedGauge))
        .register(Arc::new(StraightGauge {
            root_tol: DEFAULT_STRAIGHT_ROOT_TOL,
        }));
    reg
}

/// `V` coefficients in the shifted gauge, falling back to the constant
/// solution `V ≡ V₀` when `λ = 0` (only at `S̃₀ = 1, Ĩ₀ = 0`).
pub fn shifted_or_constant(state: &NondimState, order: usize) -> Result<SeriesTriple> {
    if state.is_gauge_degenerate() {
        let mut a = vec![0.0; order + 1];
        let mut c = vec![0.0; order + 1];
        a[0] = state.v0;
        c[0] = state.s0_tilde;
        return Ok(SeriesTriple::new(
            PowerSeries::new(Domain::Y, a)?,
            PowerSeries::new(Domain::Y, c)?,
            state.l,
        ));
    }
    shifted_series(state, order)
}

#[cfg(test)]
mod tests;
