use super::{run_recursion, Domain, SeriesTriple};
use crate::error::{Error, Result};
use crate::nondim::NondimState;

/// Coefficients of `V` and `S̃` in the shifted gauge `y = 1 − e^{λT}`.
///
/// `Aₙ₊₁ = ((nλ + 1)Aₙ − Cₙ) / ((n+1)λ)`. Fails when `λ` vanishes; use
/// [`shifted_or_constant`](super::shifted_or_constant) to get the constant
/// solution in that case.
pub fn shifted_series(state: &NondimState, order: usize) -> Result<SeriesTriple> {
    let lambda = state.lambda;
    if lambda.abs() <= crate::nondim::LAMBDA_ZERO_TOL {
        return Err(Error::GaugeDegenerate { lambda });
    }
    run_recursion(
        Domain::Y,
        state.v0,
        state.s0_tilde,
        order,
        state.l,
        move |n, a, c| ((n as f64 * lambda + 1.0) * a - c) / ((n + 1) as f64 * lambda),
    )
}
