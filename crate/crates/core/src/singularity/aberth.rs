use num_complex::Complex64;

use super::{horner, trim, RootFinder};
use crate::error::{Error, Result};
use crate::registry::Named;

/// Simultaneous Aberth–Ehrlich iteration, Gauss–Seidel style.
#[derive(Debug, Clone, Copy)]
pub struct Aberth {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for Aberth {
    fn default() -> Self {
        Aberth {
            tol: 1e-12,
            max_sweeps: 200,
        }
    }
}

impl Named for Aberth {
    fn name(&self) -> &'static str {
        "aberth"
    }
}

/// Newton correction `p(z)/p'(z)`. Outside the unit disk the reversed
/// polynomial is used so that high degrees do not overflow.
fn newton_ratio(c: &[f64], rev: &[f64], z: Complex64) -> Complex64 {
    if z.norm() <= 1.0 {
        let (p, dp) = horner(c, z);
        p / dp
    } else {
        let w = z.inv();
        let (q, dq) = horner(rev, w);
        let n = (c.len() - 1) as f64;
        z * q / (q * n - w * dq)
    }
}

/// Starting points on a circle at the geometric mean root modulus, with an
/// irrational angular offset to avoid symmetric stalls.
fn initial_guesses(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let ln_r = ((c[0] / c[n]).abs().ln()) / n as f64;
    let r = ln_r.exp();
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(r, theta)
        })
        .collect()
}

impl RootFinder for Aberth {
    fn roots(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        let (zeros, c) = trim(coeffs)?;
        let n = c.len() - 1;
        let mut z = if n == 0 {
            Vec::new()
        } else {
            initial_guesses(c)
        };
        if n > 0 {
            let rev: Vec<f64> = c.iter().rev().copied().collect();
            let mut converged = vec![false; n];
            let mut done = false;
            for _ in 0..self.max_sweeps {
                for i in 0..n {
                    if converged[i] {
                        continue;
                    }
                    let ratio = newton_ratio(c, &rev, z[i]);
                    let sum: Complex64 = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| (z[i] - z[j]).inv())
                        .sum();
                    let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
                    if !(step.re.is_finite() && step.im.is_finite()) {
                        continue;
                    }
                    z[i] -= step;
                    if step.norm() <= self.tol * z[i].norm().max(f64::MIN_POSITIVE) {
                        converged[i] = true;
                    }
                }
                if converged.iter().all(|&b| b) {
                    done = true;
                    break;
                }
            }
            if !done || z.iter().any(|w| !(w.re.is_finite() && w.im.is_finite())) {
                return Err(Error::RootFinderFailed { method: "aberth" });
            }
        }
        z.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
        Ok(z)
    }
}
