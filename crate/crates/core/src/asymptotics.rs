//! Small-`Ĩ₀` asymptotic components and a toy model of coefficient tails.
//!
//! `H₁`, `H₂` describe `V ≈ S̃₀ + Ĩ₀H₁(y) + Ĩ₀²H₂(y)` away from `S̃₀ = 1`;
//! the `J` terms describe the expansion at `S̃₀ = 1`; `P₀`, `P₁` are the
//! leading terms of the large-`Ĩ₀` side.
//!
//! `P₁(1)` is returned as `e^{−Ĩ₀}`, the limit of the integral term at
//! `y = 1`. Other treatments describe `P₁` as vanishing at `y = 1`; the two
//! are not reconciled here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambert::w0;
use crate::quadrature;
use crate::series::{Domain, PowerSeries};

/// Parameters of the small-`Ĩ₀` expansion about the `Ĩ₀ = 0` state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallI0Expansion {
    pub s0_tilde: f64,
    /// `Θ = (S̃₀ − 1)/λ̃`
    pub theta: f64,
    /// `λ̃ = −W₀(−S̃₀e^{−S̃₀}) − 1`
    pub lambda_tilde: f64,
    /// `L̃ = S̃₀e^{−S̃₀}`
    pub l_tilde: f64,
}

impl SmallI0Expansion {
    pub fn new(s0_tilde: f64) -> Result<Self> {
        if !(s0_tilde > 0.0 && s0_tilde.is_finite()) {
            return Err(Error::Domain {
                name: "s0_tilde",
                value: s0_tilde,
                domain: "(0, inf)",
            });
        }
        if (s0_tilde - 1.0).abs() <= 1e-10 {
            return Err(Error::Domain {
                name: "s0_tilde",
                value: s0_tilde,
                domain: "s0_tilde != 1 (use the J expansion)",
            });
        }
        let l_tilde = s0_tilde * (-s0_tilde).exp();
        // below threshold W₀(−S̃₀e^{−S̃₀}) = −S̃₀ exactly; the Lambert
        // evaluation loses digits near the branch point
        let lambda_tilde = if s0_tilde < 1.0 {
            s0_tilde - 1.0
        } else {
            -w0(-l_tilde)? - 1.0
        };
        Ok(SmallI0Expansion {
            s0_tilde,
            theta: (s0_tilde - 1.0) / lambda_tilde,
            lambda_tilde,
            l_tilde,
        })
    }

    fn check_y(&self, y: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain {
                name: "y",
                value: y,
                domain: "[0, 1]",
            });
        }
        Ok(())
    }

    /// `(1 − y)^Θ`, infinite at `y = 1` when `Θ < 0`.
    fn power(&self, y: f64, scale: f64) -> f64 {
        (1.0 - y).powf(scale * self.theta)
    }
}

/// `H₁ = (S̃₀ − (1−y)^Θ)/(S̃₀ − 1)`. Diverges (returns ±∞) at `y = 1` when
/// `S̃₀ > 1`.
pub fn h1(y: f64, exp: &SmallI0Expansion) -> Result<f64> {
    exp.check_y(y)?;
    if y == 0.0 {
        return Ok(1.0);
    }
    let s = exp.s0_tilde;
    Ok((s - exp.power(y, 1.0)) / (s - 1.0))
}

/// Second-order component `H₂`.
pub fn h2(y: f64, exp: &SmallI0Expansion) -> Result<f64> {
    exp.check_y(y)?;
    if y == 0.0 {
        return Ok(0.0);
    }
    let s = exp.s0_tilde;
    let lt = exp.lambda_tilde;
    let log_coeff = (lt + 1.0) / lt.powi(3) - s / (lt * (s - 1.0).powi(2));
    let p = exp.power(y, 1.0);
    let log_term = if y == 1.0 {
        if exp.theta > 0.0 {
            0.0
        } else {
            -f64::INFINITY * log_coeff.signum()
        }
    } else {
        log_coeff * p * (-y).ln_1p()
    };
    Ok(log_term - s / (2.0 * (s - 1.0).powi(3)) * (1.0 - p * p))
}

/// `H₂` in the form valid for `0 < S̃₀ < 1`, where `Θ = 1` and the
/// logarithmic term vanishes.
pub fn h2_below_threshold(y: f64, s0_tilde: f64) -> Result<f64> {
    if !(s0_tilde > 0.0 && s0_tilde < 1.0) {
        return Err(Error::Domain {
            name: "s0_tilde",
            value: s0_tilde,
            domain: "(0, 1)",
        });
    }
    let q = 1.0 - y;
    Ok(-s0_tilde * (1.0 - q * q) / (2.0 * (s0_tilde - 1.0).powi(3)))
}

/// `V ≈ S̃₀ + Ĩ₀H₁(y)`.
pub fn first_order_v(y: f64, i0_tilde: f64, exp: &SmallI0Expansion) -> Result<f64> {
    Ok(exp.s0_tilde + i0_tilde * h1(y, exp)?)
}

/// `V ≈ S̃₀ + Ĩ₀H₁(y) + Ĩ₀²H₂(y)`.
pub fn second_order_v(y: f64, i0_tilde: f64, exp: &SmallI0Expansion) -> Result<f64> {
    Ok(first_order_v(y, i0_tilde, exp)? + i0_tilde * i0_tilde * h2(y, exp)?)
}

/// Upper estimates of `Ĩ₀` on the convergence boundary for `0 < S̃₀ < 1`:
/// `1/S̃₀ − 1` from `H₁(1)` and `√2(1−S̃₀)^{3/2}S̃₀^{−1/2}` from `H₂(1)`.
pub fn boundary_estimates(s0_tilde: f64) -> Result<(f64, f64)> {
    if !(s0_tilde > 0.0 && s0_tilde < 1.0) {
        return Err(Error::Domain {
            name: "s0_tilde",
            value: s0_tilde,
            domain: "(0, 1)",
        });
    }
    let first = 1.0 / s0_tilde - 1.0;
    let second = 2f64.sqrt() * (1.0 - s0_tilde).powf(1.5) / s0_tilde.sqrt();
    Ok((first, second))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JComponents {
    pub j11: f64,
    pub j23: f64,
    pub j34: f64,
    pub j35: f64,
}

/// Components of the `S̃₀ = 1` expansion, all powers of `ℓ = ln(1−y)`:
/// `J₁₁ = −ℓ`, `J₂₃ = ℓ³/6`, `J₃₄ = −ℓ⁴/24`, `J₃₅ = −ℓ⁵/30`.
/// At `y = 1` every component is infinite.
pub fn j_components(y: f64) -> Result<JComponents> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain {
            name: "y",
            value: y,
            domain: "[0, 1)",
        });
    }
    let l = (-y).ln_1p();
    Ok(JComponents {
        j11: -l,
        j23: l.powi(3) / 6.0,
        j34: -l.powi(4) / 24.0,
        j35: -l.powi(5) / 30.0,
    })
}

/// `V` at `S̃₀ = 1` from the `J` components:
/// `1 + Ĩ₀ + (Ĩ₀/λ)J₁₁ + (Ĩ₀²/λ³)J₂₃ + (Ĩ₀³/λ⁴)J₃₄ + (Ĩ₀³/λ⁵)J₃₅`.
pub fn critical_v(y: f64, i0_tilde: f64, lambda: f64) -> Result<f64> {
    if !(lambda < 0.0) {
        return Err(Error::GaugeDegenerate { lambda });
    }
    let j = j_components(y)?;
    let r = i0_tilde / lambda;
    let i2 = i0_tilde * i0_tilde;
    let i3 = i2 * i0_tilde;
    Ok(1.0
        + i0_tilde
        + r * j.j11
        + i2 / lambda.powi(3) * j.j23
        + i3 / lambda.powi(4) * j.j34
        + i3 / lambda.powi(5) * j.j35)
}

pub const P1_TOL: f64 = 1e-10;

/// `(e^{au} − 1 − au)/u²`, smooth at `u = 0`.
fn regular_part(a: f64, u: f64) -> f64 {
    let x = a * u;
    if x.abs() < 1e-3 {
        a * a * (0.5 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0)
    } else {
        (x.exp_m1() - x) / (u * u)
    }
}

/// `∫₀^y e^{−aY}(1−Y)⁻² dY` for `y < 1`, with the double pole and the
/// logarithm integrated in closed form and the smooth remainder by
/// adaptive quadrature.
pub fn p1_integral(y: f64, a: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::Domain {
            name: "y",
            value: y,
            domain: "[0, 1)",
        });
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let q = 1.0 - y;
    let ea = (-a).exp();
    let tol = (P1_TOL / (q * ea)).min(1e-12);
    let smooth = quadrature::integrate(|u| regular_part(a, u), q, 1.0, tol, 4000)?;
    Ok(ea * (y / q - a * q.ln() + smooth))
}

/// `P₀ = Ĩ₀(1−y)` and
/// `P₁ = 1 − y + Ĩ₀e^{−Ĩ₀}(1−y)ln(1−y) + (1−y)∫₀^y e^{−Ĩ₀Y}(1−Y)⁻² dY`,
/// with the last term replaced by its limit `e^{−Ĩ₀}` at `y = 1`.
pub fn p_components(y: f64, i0_tilde: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain {
            name: "y",
            value: y,
            domain: "[0, 1]",
        });
    }
    if !(i0_tilde > 0.0 && i0_tilde.is_finite()) {
        return Err(Error::Domain {
            name: "i0_tilde",
            value: i0_tilde,
            domain: "(0, inf)",
        });
    }
    let a = i0_tilde;
    let q = 1.0 - y;
    let p0 = a * q;
    if y == 1.0 {
        return Ok((p0, (-a).exp()));
    }
    let p1 = q + a * (-a).exp() * q * q.ln() + q * p1_integral(y, a)?;
    Ok((p0, p1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToyModelParams {
    /// Strength of the fixed pole at `y = 1`.
    pub m: f64,
    /// Strength of the conjugate pair.
    pub n_amp: f64,
    pub rho: f64,
    pub phi: f64,
}

impl ToyModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.m, self.n_amp, self.rho, self.phi]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput(
                "toy model parameters must be finite".into(),
            ));
        }
        if !(self.rho > 0.0) {
            return Err(Error::Domain {
                name: "rho",
                value: self.rho,
                domain: "(0, inf)",
            });
        }
        if !(self.phi > 0.0 && self.phi < std::f64::consts::PI) {
            return Err(Error::Domain {
                name: "phi",
                value: self.phi,
                domain: "(0, pi)",
            });
        }
        if !(self.m > 0.0 && self.n_amp > self.m) {
            return Err(Error::InvalidInput(format!(
                "toy model needs n_amp > m > 0, got m = {}, n_amp = {}",
                self.m, self.n_amp
            )));
        }
        Ok(())
    }
}

/// `Aₙ = M + N sin((n+1)φ)/(ρ^{n+2} sin φ)` for `n = 0..=n_max`.
pub fn toy_coefficients(params: &ToyModelParams, n_max: usize) -> Result<PowerSeries> {
    params.validate()?;
    let ln_rho = params.rho.ln();
    let sin_phi = params.phi.sin();
    let coeffs = (0..=n_max)
        .map(|n| {
            let k = n as f64;
            params.m
                + params.n_amp * ((k + 1.0) * params.phi).sin() * (-(k + 2.0) * ln_rho).exp()
                    / sin_phi
        })
        .collect();
    PowerSeries::new(Domain::Y, coeffs)
}

/// First index from which every coefficient stays within a factor 2 of `M`.
pub fn tail_onset(series: &PowerSeries, m: f64) -> Option<usize> {
    let c = series.coeffs();
    let within = |v: f64| v.abs() <= 2.0 * m && v.abs() >= 0.5 * m;
    let last_bad = c.iter().rposition(|&v| !within(v));
    match last_bad {
        None => Some(0),
        Some(k) if k + 1 < c.len() => Some(k + 1),
        Some(_) => None,
    }
}
