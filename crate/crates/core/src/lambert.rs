//! Real branches of the Lambert W function on `[−1/e, 0]` and stability of
//! the fixed points of `dξ/dT = Lξ² − ξ ln ξ`.

use serde::Serialize;
use std::f64::consts::E;

use crate::error::{Error, Result};

/// `1/e`, the branch point of W is at `−1/e`.
pub const INV_E: f64 = 0.367_879_441_171_442_33;

/// Inputs this far below `−1/e` are treated as round-off and clamped.
pub const BRANCH_CLAMP: f64 = 1e-15;

const MAX_ITER: usize = 50;
const STEP_TOL: f64 = 1e-15;

/// Principal branch `W₀(x)` for `x ∈ [−1/e, 0]`, returning a value in `[−1, 0]`.
pub fn w0(x: f64) -> Result<f64> {
    check_domain(x, "w0")?;
    if x > 0.0 {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[-1/e, 0] for W0",
        });
    }
    if x <= -INV_E {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let p = branch_parameter(x);
    let seed = if p < 0.5 {
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * 43.0 / 540.0)))
    } else {
        // Winitzki's approximation
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };
    Ok(halley(x, seed).clamp(-1.0, 0.0))
}

/// Lower branch `W₋₁(x)` for `x ∈ [−1/e, 0)`, returning a value `≤ −1`.
pub fn wm1(x: f64) -> Result<f64> {
    check_domain(x, "wm1")?;
    if x >= 0.0 {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[-1/e, 0) for W-1",
        });
    }
    if x.abs() < 1e-300 {
        return Err(Error::Overflow("W-1 near 0-"));
    }
    if x <= -INV_E {
        return Ok(-1.0);
    }
    let p = branch_parameter(x);
    let seed = if p < 0.5 {
        -1.0 - p * (1.0 + p * (1.0 / 3.0 + p * (11.0 / 72.0 + p * 43.0 / 540.0)))
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(x, seed).min(-1.0))
}

fn check_domain(x: f64, _op: &'static str) -> Result<()> {
    if !x.is_finite() || x < -INV_E - BRANCH_CLAMP {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[-1/e, 0]",
        });
    }
    Ok(())
}

/// `p = √(2(e·x + 1))`, the natural expansion variable at the branch point.
fn branch_parameter(x: f64) -> f64 {
    (2.0 * (E * x + 1.0)).max(0.0).sqrt()
}

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 || f == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= STEP_TOL * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// The three equilibria of `dξ/dT = Lξ² − ξ ln ξ` and the slope of the
/// right-hand side at the two nonzero ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub xi_zero: f64,
    pub xi_stable: f64,
    pub xi_unstable: f64,
    pub derivative_at_stable: f64,
    pub derivative_at_unstable: f64,
}

/// Locates and classifies the fixed points for `0 < L ≤ 1/e`.
pub fn classify_fixed_points(l: f64) -> Result<FixedPointReport> {
    if !l.is_finite() || l <= 0.0 || l > INV_E + BRANCH_CLAMP {
        return Err(Error::Domain {
            name: "L",
            value: l,
            domain: "(0, 1/e]",
        });
    }
    let w_principal = w0(-l)?;
    let w_lower = wm1(-l)?;
    Ok(FixedPointReport {
        xi_zero: 0.0,
        xi_stable: -w_principal / l,
        xi_unstable: -w_lower / l,
        derivative_at_stable: -w_principal - 1.0,
        derivative_at_unstable: -w_lower - 1.0,
    })
}
