//! Expansion in `g = e^{λT}`. Unlike the shifted gauge, the initial
//! condition sits at `g = 1`, so the first coefficient `a₁` is not fixed by
//! the recursion. It is found as a real root of the truncated boundary
//! polynomial `Σ Eₙ a₁ⁿ = V₀ − V∞` with `Eₙ = aₙ/a₁ⁿ`.

use serde::Serialize;

use super::{eval_poly, Domain, PowerSeries, SeriesTriple};
use crate::error::{Error, Result};
use crate::nondim::NondimState;
use crate::singularity::{self, RootFinder};

/// Relative size within which two candidate roots count as indistinguishable.
const AMBIGUITY_RATIO: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StraightGaugeTable {
    /// `Eₙ = aₙ/a₁ⁿ`, with `E₀` unused (stored as 0) and `E₁ = 1`.
    pub e: Vec<f64>,
    /// `Fₙ = bₙ/a₁ⁿ` for the `S̃` coefficients, `F₀ = S̃∞`.
    pub f: Vec<f64>,
    pub a1: f64,
    /// Every real root of the boundary polynomial that met the tolerance,
    /// ordered by magnitude.
    pub real_roots: Vec<f64>,
    pub residual: f64,
}

impl StraightGaugeTable {
    pub fn a_coeffs(&self, v_inf: f64) -> Vec<f64> {
        let mut pow = 1.0;
        self.e
            .iter()
            .enumerate()
            .map(|(n, &e)| {
                if n == 0 {
                    v_inf
                } else {
                    pow *= self.a1;
                    e * pow
                }
            })
            .collect()
    }

    pub fn b_coeffs(&self) -> Vec<f64> {
        let mut pow = 1.0;
        self.f
            .iter()
            .enumerate()
            .map(|(n, &f)| {
                if n > 0 {
                    pow *= self.a1;
                }
                f * pow
            })
            .collect()
    }

    pub fn to_series(&self, state: &NondimState) -> Result<SeriesTriple> {
        Ok(SeriesTriple::new(
            PowerSeries::new(Domain::G, self.a_coeffs(state.s_inf_tilde))?,
            PowerSeries::new(Domain::G, self.b_coeffs())?,
            state.l,
        ))
    }
}

/// Normalized coefficient tables `E`, `F` through `order`.
pub fn normalized_tables(state: &NondimState, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let lambda = state.lambda;
    if lambda.abs() <= crate::nondim::LAMBDA_ZERO_TOL {
        return Err(Error::GaugeDegenerate { lambda });
    }
    let s_inf = state.s_inf_tilde;
    let mut e = vec![0.0; order + 1];
    let mut f = vec![0.0; order + 1];
    f[0] = s_inf;
    if order >= 1 {
        e[1] = 1.0;
        f[1] = s_inf;
    }
    for n in 1..order {
        let s: f64 = (0..n).map(|j| (j + 1) as f64 * e[j + 1] * f[n - j]).sum();
        let nf = n as f64;
        e[n + 1] = s / (nf * (nf + 1.0) * lambda);
        f[n + 1] = ((nf + 1.0) * lambda + 1.0) * e[n + 1];
    }
    if let Some(order) = e
        .iter()
        .zip(&f)
        .position(|(a, b)| !a.is_finite() || !b.is_finite())
    {
        return Err(Error::SeriesOverflow { order });
    }
    Ok((e, f))
}

/// Builds the straight-gauge tables and solves for `a₁`.
///
/// The smallest-magnitude real root whose residual is below `root_tol` is
/// chosen. When the next candidate is within 20% of it in magnitude the
/// choice is reported as ambiguous instead.
pub fn straight_gauge(
    state: &NondimState,
    order: usize,
    root_tol: f64,
) -> Result<StraightGaugeTable> {
    if order < 2 {
        return Err(Error::InvalidInput(
            "straight gauge needs order >= 2".into(),
        ));
    }
    let (e, f) = normalized_tables(state, order)?;
    let target = state.v0 - state.s_inf_tilde;
    let mut poly = e.clone();
    poly[0] = -target;

    let candidates = if target == 0.0 {
        vec![0.0]
    } else {
        let roots = singularity::AutoRoots.roots(&poly)?;
        let mut real: Vec<f64> = roots
            .iter()
            .filter(|z| z.im.abs() <= 1e-6 * z.norm().max(1.0))
            .map(|z| polish_real(&poly, z.re))
            .filter(|x| eval_poly(&poly, *x).abs() < root_tol)
            .collect();
        real.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        real.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
        real
    };
    let Some(&a1) = candidates.first() else {
        return Err(Error::NoRealRoot { tol: root_tol });
    };
    if let Some(&next) = candidates.get(1) {
        if next.abs() <= AMBIGUITY_RATIO * a1.abs() {
            return Err(Error::AmbiguousRoot { roots: candidates });
        }
    }
    Ok(StraightGaugeTable {
        residual: eval_poly(&poly, a1).abs(),
        e,
        f,
        a1,
        real_roots: candidates,
    })
}

/// A few Newton steps on a real polynomial from a real starting point.
fn polish_real(poly: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (p, dp) = poly
            .iter()
            .rev()
            .fold((0.0, 0.0), |(p, dp), &c| (p * x + c, dp * x + p));
        if dp == 0.0 {
            break;
        }
        let step = p / dp;
        let next = x - step;
        if eval_poly(poly, next).abs() > p.abs() {
            break;
        }
        x = next;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}
