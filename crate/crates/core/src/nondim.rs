//! Collapse of the four dimensional SIR parameters into `(S̃₀, Ĩ₀)` and the
//! constants derived from them.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lambert;

/// `|λ|` at or below this is treated as exactly zero.
pub const LAMBDA_ZERO_TOL: f64 = 1e-14;

/// Dimensional inputs of one outbreak scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    /// Contact rate, 1/(population·time).
    pub r: f64,
    /// Recovery rate, 1/time.
    pub alpha: f64,
    #[serde(rename = "S0")]
    pub s0: f64,
    #[serde(rename = "I0")]
    pub i0: f64,
}

impl EpidemicParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r", self.r),
            ("alpha", self.alpha),
            ("S0", self.s0),
            ("I0", self.i0),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if self.r <= 0.0 || self.alpha <= 0.0 {
            return Err(Error::InvalidInput("r and alpha must be positive".into()));
        }
        if self.s0 < 0.0 || self.i0 < 0.0 {
            return Err(Error::InvalidInput("S0 and I0 must be non-negative".into()));
        }
        if self.s0 + self.i0 <= 0.0 {
            return Err(Error::InvalidInput(
                "S0 = I0 = 0 is a degenerate scenario".into(),
            ));
        }
        Ok(())
    }

    /// `L = (r/α)·e^{β/α}`, the collapsed parameter computed from `β`
    /// instead of from `(S̃₀, Ĩ₀)`.
    pub fn collapsed_parameter_via_beta(&self) -> f64 {
        let beta = self.alpha * self.s0.ln() - self.r * (self.s0 + self.i0);
        self.r / self.alpha * (beta / self.alpha).exp()
    }
}

/// Nondimensional parameter set and the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NondimState {
    pub s0_tilde: f64,
    pub i0_tilde: f64,
    /// `α ln S₀ − r(S₀+I₀)`; only known when built from dimensional inputs
    /// with `S₀ > 0`.
    pub beta: Option<f64>,
    pub xi0: f64,
    pub v0: f64,
    pub l: f64,
    pub lambda: f64,
    pub xi_inf: f64,
    pub v_inf: f64,
    pub s_inf_tilde: f64,
    /// Set when the scenario lies on an axis (`S̃₀ = 0` or `Ĩ₀ = 0`).
    pub degenerate: bool,
}

impl NondimState {
    pub fn from_tilde(s0_tilde: f64, i0_tilde: f64) -> Result<Self> {
        if !s0_tilde.is_finite() || !i0_tilde.is_finite() {
            return Err(Error::InvalidInput(
                "s0_tilde and i0_tilde must be finite".into(),
            ));
        }
        if s0_tilde < 0.0 || i0_tilde < 0.0 {
            return Err(Error::InvalidInput(
                "s0_tilde and i0_tilde must be non-negative".into(),
            ));
        }
        let v0 = s0_tilde + i0_tilde;
        if v0 <= 0.0 {
            return Err(Error::InvalidInput(
                "s0_tilde = i0_tilde = 0 is a degenerate scenario".into(),
            ));
        }
        if v0 > 700.0 {
            return Err(Error::InvalidInput(format!(
                "s0_tilde + i0_tilde = {v0} overflows the initial gauge value"
            )));
        }
        let xi0 = v0.exp();
        let l = s0_tilde * (-v0).exp();
        let w = lambert::w0(-l)?;
        let mut lambda = -w - 1.0;
        if lambda.abs() <= LAMBDA_ZERO_TOL {
            lambda = 0.0;
        }
        let s_inf_tilde = -w;
        // ξ∞ = −W₀(−L)/L → 1 as L → 0
        let xi_inf = if l > 0.0 { -w / l } else { 1.0 };
        Ok(NondimState {
            s0_tilde,
            i0_tilde,
            beta: None,
            xi0,
            v0,
            l,
            lambda,
            xi_inf,
            v_inf: xi_inf.ln(),
            s_inf_tilde,
            degenerate: s0_tilde == 0.0 || i0_tilde == 0.0,
        })
    }

    pub fn is_gauge_degenerate(&self) -> bool {
        self.lambda == 0.0
    }

    /// Populations `(S̃, Ĩ, R̃)` at a given value of `V`.
    pub fn reconstruct(&self, v: f64) -> Result<Populations> {
        reconstruct(v, self)
    }

    /// Right-hand side of `dξ/dT = Lξ² − ξ ln ξ`.
    pub fn xi_rate(&self, xi: f64) -> f64 {
        self.l * xi * xi - xi * xi.ln()
    }
}

/// Builds the collapsed state from dimensional inputs.
pub fn nondimensionalize(p: &EpidemicParams) -> Result<NondimState> {
    p.validate()?;
    let s0_tilde = p.r * p.s0 / p.alpha;
    let i0_tilde = p.r * p.i0 / p.alpha;
    let mut state = NondimState::from_tilde(s0_tilde, i0_tilde)?;
    if p.s0 > 0.0 {
        state.beta = Some(p.alpha * p.s0.ln() - p.r * (p.s0 + p.i0));
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Populations {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

/// `S̃ = L e^V`, `Ĩ = V − S̃`, `R̃ = V₀ − V`.
pub fn reconstruct(v: f64, state: &NondimState) -> Result<Populations> {
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("V must be finite, got {v}")));
    }
    let s = state.l * v.exp();
    if !s.is_finite() {
        return Err(Error::Overflow("L e^V"));
    }
    Ok(Populations {
        s,
        i: v - s,
        r: state.v0 - v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub v: f64,
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

/// A scenario file: dimensional or nondimensional inputs, never both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scenario {
    Dimensional {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        description: Option<String>,
        #[serde(flatten)]
        params: EpidemicParams,
    },
    Nondimensional {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        description: Option<String>,
        s0_tilde: f64,
        i0_tilde: f64,
    },
}

const DIMENSIONAL_KEYS: [&str; 4] = ["r", "alpha", "S0", "I0"];
const NONDIM_KEYS: [&str; 2] = ["s0_tilde", "i0_tilde"];
const META_KEYS: [&str; 2] = ["name", "description"];

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("scenario is not valid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidInput("scenario must be a JSON object".into()))?;
        for key in obj.keys() {
            let known = DIMENSIONAL_KEYS.contains(&key.as_str())
                || NONDIM_KEYS.contains(&key.as_str())
                || META_KEYS.contains(&key.as_str());
            if !known {
                return Err(Error::InvalidInput(format!("unknown scenario key `{key}`")));
            }
        }
        let has_dim = DIMENSIONAL_KEYS.iter().any(|k| obj.contains_key(*k));
        let has_nondim = NONDIM_KEYS.iter().any(|k| obj.contains_key(*k));
        let missing = |keys: &[&str]| -> Vec<String> {
            keys.iter()
                .filter(|k| !obj.contains_key(**k))
                .map(|k| k.to_string())
                .collect()
        };
        match (has_dim, has_nondim) {
            (true, true) => {
                return Err(Error::InvalidInput(
                    "scenario mixes dimensional (r, alpha, S0, I0) and nondimensional \
                     (s0_tilde, i0_tilde) keys"
                        .into(),
                ))
            }
            (false, false) => return Err(Error::InvalidInput("scenario has no parameters".into())),
            (true, false) if !missing(&DIMENSIONAL_KEYS).is_empty() => {
                return Err(Error::InvalidInput(format!(
                    "scenario is missing {}",
                    missing(&DIMENSIONAL_KEYS).join(", ")
                )))
            }
            (false, true) if !missing(&NONDIM_KEYS).is_empty() => {
                return Err(Error::InvalidInput(format!(
                    "scenario is missing {}",
                    missing(&NONDIM_KEYS).join(", ")
                )))
            }
            _ => {}
        }
        let scenario: Scenario = serde_json::from_value(value)
            .map_err(|e| Error::InvalidInput(format!("malformed scenario: {e}")))?;
        scenario.to_state()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// One of the scenario files shipped with the crate.
    pub fn bundled(name: &str) -> Option<Self> {
        let text = match name {
            "bubonic" => include_str!("../../../scenarios/bubonic.json"),
            "ebola" => include_str!("../../../scenarios/ebola.json"),
            "covid_japan" | "covid" => include_str!("../../../scenarios/covid_japan.json"),
            _ => return None,
        };
        Some(Self::from_json_str(text).expect("bundled scenario is valid"))
    }

    pub const BUNDLED: [&'static str; 3] = ["bubonic", "ebola", "covid_japan"];

    pub fn to_state(&self) -> Result<NondimState> {
        match self {
            Scenario::Dimensional { params, .. } => nondimensionalize(params),
            Scenario::Nondimensional {
                s0_tilde, i0_tilde, ..
            } => NondimState::from_tilde(*s0_tilde, *i0_tilde),
        }
    }
}
