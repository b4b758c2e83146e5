use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::{polish, trim, RootFinder};
use crate::error::{Error, Result};
use crate::registry::Named;

/// Eigenvalues of the balanced companion matrix (real Schur form), each
/// refined by a few Newton steps on the original polynomial.
pub struct Companion;

impl Named for Companion {
    fn name(&self) -> &'static str {
        "companion"
    }
}

impl RootFinder for Companion {
    fn roots(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        let (zeros, c) = trim(coeffs)?;
        let n = c.len() - 1;
        let mut roots = Vec::with_capacity(n + zeros);
        if n == 1 {
            roots.push(Complex64::new(-c[0] / c[1], 0.0));
        } else if n > 1 {
            let lead = c[n];
            let mut m = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                m[(0, j)] = -c[n - 1 - j] / lead;
            }
            for i in 1..n {
                m[(i, i - 1)] = 1.0;
            }
            balance_parlett_reinsch(&mut m);
            let schur =
                Schur::try_new(m, f64::EPSILON, 100 * n).ok_or(Error::RootFinderFailed {
                    method: "companion",
                })?;
            for z in schur.complex_eigenvalues().iter() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::RootFinderFailed {
                        method: "companion",
                    });
                }
                roots.push(polish(c, *z));
            }
        }
        roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
        Ok(roots)
    }
}
