//! Complex singularities of truncated series, located as zeros of the
//! truncated reciprocal series, and the maps between the `T` and `y` planes.

mod aberth;
mod companion;

pub use aberth::Aberth;
pub use companion::Companion;

use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::registry::{Named, Registry};
use crate::series::{reciprocal_series, Domain, PowerSeries};

/// Degree above which [`AutoRoots`] switches from companion eigenvalues to
/// Aberth iteration.
pub const COMPANION_MAX_DEGREE: usize = 400;

/// Finds every complex root of a real polynomial.
pub trait RootFinder: Named + Send + Sync {
    /// `coeffs` are in ascending order (`c₀ + c₁x + …`) with a nonzero
    /// leading coefficient and degree ≥ 1.
    fn roots(&self, coeffs: &[f64]) -> Result<Vec<Complex64>>;
}

/// Companion eigenvalues up to degree 400, Aberth iteration beyond.
pub struct AutoRoots;

impl Named for AutoRoots {
    fn name(&self) -> &'static str {
        "auto"
    }
}

impl RootFinder for AutoRoots {
    fn roots(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        let (zeros, trimmed) = trim(coeffs)?;
        let mut roots = if trimmed.len() == 1 {
            Vec::new()
        } else if trimmed.len() - 1 <= COMPANION_MAX_DEGREE {
            Companion
                .roots(trimmed)
                .or_else(|_| Aberth::default().roots(trimmed))?
        } else {
            Aberth::default().roots(trimmed)?
        };
        roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
        Ok(roots)
    }
}

pub fn builtin_registry() -> Registry<dyn RootFinder> {
    let mut reg: Registry<dyn RootFinder> = Registry::new("root finder");
    reg.register(Arc::new(AutoRoots))
        .register(Arc::new(Companion))
        .register(Arc::new(Aberth::default()));
    reg
}

/// Strips high-order zero coefficients and factors out roots at the origin.
/// Returns the number of zero roots and the remaining coefficients.
pub(crate) fn trim(coeffs: &[f64]) -> Result<(usize, &[f64])> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput(
            "polynomial coefficients must be finite".into(),
        ));
    }
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::DegeneratePolynomial);
    }
    let last = coeffs.iter().rposition(|&c| c != 0.0).unwrap();
    let first = coeffs.iter().position(|&c| c != 0.0).unwrap();
    if last == 0 {
        return Err(Error::InvalidInput("polynomial has degree 0".into()));
    }
    Ok((first, &coeffs[first..=last]))
}

/// `p(z)` and `p'(z)` by Horner's rule.
pub(crate) fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |cₙ||z|ⁿ`, the scale against which a root residual is judged.
pub fn abs_poly(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
}

/// Newton refinement of an approximate root; only accepts improving steps.
pub(crate) fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let (mut p, mut dp) = horner(coeffs, z);
    for _ in 0..6 {
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let (pn, dpn) = horner(coeffs, next);
        if !(pn.norm() < p.norm()) {
            break;
        }
        z = next;
        p = pn;
        dp = dpn;
    }
    z
}

/// All roots of a truncated series viewed as a polynomial.
pub fn poly_roots(series: &PowerSeries) -> Result<Vec<Complex64>> {
    AutoRoots.roots(series.coeffs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub domain: Domain,
    pub n_used: usize,
    /// All zeros of the truncated reciprocal, ascending in modulus.
    pub roots: Vec<Complex64>,
    /// Nearest zero with positive (or zero) imaginary part, then its conjugate.
    pub nearest_pair: [Complex64; 2],
    pub radius: f64,
    /// Distance between the nearest zero and the conjugate of its partner
    /// as found by the root finder, before symmetrization.
    pub conjugate_mismatch: f64,
    /// Another pair at the same modulus (within 1e-9), if any.
    pub ambiguous_with: Option<[Complex64; 2]>,
}

const TIE_TOL: f64 = 1e-9;

/// Zeros of the order-`order` reciprocal of `series`, and the conjugate
/// pair nearest the origin.
pub fn nearest_singularities(
    series: &PowerSeries,
    order: usize,
    finder: &dyn RootFinder,
) -> Result<SingularityReport> {
    let truncated = series.truncated(order)?;
    if order < 1 {
        return Err(Error::InvalidInput(
            "singularity search needs order >= 1".into(),
        ));
    }
    let recip = reciprocal_series(&truncated)?;
    let mut roots = finder.roots(recip.coeffs())?;
    if roots.is_empty() {
        return Err(Error::DegeneratePolynomial);
    }
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(b.im.total_cmp(&a.im)));

    let (pair, mismatch, used) = conjugate_pair(&roots, 0);
    let radius = pair[0].norm();

    let mut ambiguous_with = None;
    for k in 0..roots.len() {
        if used.contains(&k) {
            continue;
        }
        if (roots[k].norm() - radius).abs() <= TIE_TOL * radius.max(1.0) {
            let (other, _, _) = conjugate_pair(&roots, k);
            ambiguous_with = Some(other);
            break;
        }
    }

    Ok(SingularityReport {
        domain: series.domain(),
        n_used: order,
        roots,
        nearest_pair: pair,
        radius,
        conjugate_mismatch: mismatch,
        ambiguous_with,
    })
}

/// Symmetrized conjugate pair around `roots[k]`, the raw mismatch, and the
/// indices consumed.
fn conjugate_pair(roots: &[Complex64], k: usize) -> ([Complex64; 2], f64, Vec<usize>) {
    let z = roots[k];
    let scale = z.norm().max(1.0);
    if z.im.abs() <= 1e-12 * scale {
        let real = Complex64::new(z.re, 0.0);
        return ([real, real], z.im.abs(), vec![k]);
    }
    let target = z.conj();
    let (j, partner) = roots
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .min_by(|(_, a), (_, b)| (*a - target).norm().total_cmp(&(*b - target).norm()))
        .map(|(j, w)| (j, *w))
        .unwrap_or((k, target));
    let mismatch = (partner - target).norm();
    let re = 0.5 * (z.re + partner.re);
    let im = 0.5 * (z.im.abs() + partner.im.abs());
    (
        [Complex64::new(re, im), Complex64::new(re, -im)],
        mismatch,
        vec![k, j],
    )
}

/// `y = 1 − e^{λT}` for a complex `T`, and `|y|` from
/// `√(1 + e^{2λτ} − 2e^{λτ} cos λω)`.
pub fn map_t_to_y(t: Complex64, lambda: f64) -> Result<(Complex64, f64)> {
    if !(lambda < 0.0) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            domain: "(-inf, 0)",
        });
    }
    let y = Complex64::new(1.0, 0.0) - (t * lambda).exp();
    let decay = (lambda * t.re).exp();
    let radius = (1.0 + decay * decay - 2.0 * decay * (lambda * t.im).cos())
        .max(0.0)
        .sqrt();
    Ok((y, radius))
}

/// `T = ln(1 − y)/λ` on the principal branch of the logarithm, and `|T|`.
pub fn map_y_to_t(y: Complex64, lambda: f64) -> Result<(Complex64, f64)> {
    if !(lambda < 0.0) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            domain: "(-inf, 0)",
        });
    }
    let one_minus = Complex64::new(1.0, 0.0) - y;
    if one_minus.norm() == 0.0 {
        return Err(Error::Domain {
            name: "y",
            value: 1.0,
            domain: "y != 1",
        });
    }
    let t = one_minus.ln() / lambda;
    Ok((t, t.norm()))
}
