//! Power-series solutions of the SIR epidemic model.
//!
//! The SIR system collapses to a single autonomous equation for
//! `V = S̃ + Ĩ`,
//!
//! ```text
//! dV/dT = L e^V − V,    V(0) = S̃₀ + Ĩ₀,    L = S̃₀ e^{−S̃₀−Ĩ₀}
//! ```
//!
//! whose Taylor series in time has a finite radius of convergence. Expanding
//! instead in the shifted exponential gauge `y = 1 − e^{λT}` (with
//! `λ = −W₀(−L) − 1`) maps `T ∈ [0, ∞)` onto `y ∈ [0, 1)`, and the series
//! converges on the whole physical domain whenever its radius exceeds one.
//!
//! Modules:
//!
//! - [`nondim`]: parameter collapse and population reconstruction
//! - [`lambert`]: real Lambert W branches and fixed-point stability
//! - [`series`]: coefficient recursions and truncated series algebra
//! - [`convergence`]: root/ratio tests and parameter-space surveys
//! - [`singularity`]: complex singularities via reciprocal-series roots
//! - [`oracle`]: fixed-step RK4 reference and error scans
//! - [`asymptotics`]: small-parameter expansions and the coefficient toy model
//!
//! Interchangeable algorithms (series gauges, polynomial root finders and
//! survey metrics) sit behind traits and are looked up by name through a
//! [`registry::Registry`].

// `!(x < y)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod convergence;
pub mod error;
pub mod lambert;
pub mod nondim;
pub mod oracle;
pub mod quadrature;
pub mod registry;
pub mod series;
pub mod singularity;

pub use error::{Error, Result};
pub use nondim::{EpidemicParams, NondimState, Scenario};
pub use series::{Domain, PowerSeries};
