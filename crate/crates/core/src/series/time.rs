use super::{run_recursion, Domain, SeriesTriple};
use crate::error::Result;
use crate::nondim::NondimState;

/// Taylor coefficients of `V` and `S̃` in nondimensional time `T`.
///
/// `A₀ = S̃₀ + Ĩ₀`, `C₀ = S̃₀`, `Aₙ₊₁ = (Cₙ − Aₙ)/(n+1)`, with `C`
/// following from `S̃' = S̃·V'`.
pub fn time_series(state: &NondimState, order: usize) -> Result<SeriesTriple> {
    run_recursion(
        Domain::T,
        state.v0,
        state.s0_tilde,
        order,
        state.l,
        |n, a, c| (c - a) / (n + 1) as f64,
    )
}
