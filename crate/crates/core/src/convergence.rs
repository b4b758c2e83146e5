//! Root- and ratio-test radius estimates, convergence classification and
//! parameter-space surveys.

use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nondim::NondimState;
use crate::oracle;
use crate::registry::{Named, Registry};
use crate::series::{shifted_series, time_series, PowerSeries, SeriesTriple};

/// Environment variable capping survey parallelism.
pub const THREADS_ENV: &str = "SIR_GAUGE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceEstimate {
    #[serde(rename = "N")]
    pub n_used: usize,
    pub rho_root: f64,
    pub rho_ratio: Option<f64>,
    pub drift: Option<f64>,
}

fn nearest_nonzero(c: &[f64], order: usize) -> Option<usize> {
    (1..c.len())
        .filter(|&k| c[k] != 0.0)
        .min_by_key(|&k| (k.abs_diff(order), k))
}

fn root_value(c: &[f64], order: usize) -> Result<f64> {
    let a = c[order];
    if a == 0.0 {
        return Err(Error::ZeroCoefficient {
            order,
            nearest_nonzero: nearest_nonzero(c, order),
        });
    }
    Ok(a.abs().powf(-1.0 / order as f64))
}

/// `ρ_N = |A_N|^{−1/N}`, with the ratio test and `|ρ_N − ρ_{N+1}|` when
/// order `N + 1` is available.
pub fn root_test(series: &PowerSeries, order: usize) -> Result<ConvergenceEstimate> {
    let c = series.coeffs();
    if order == 0 || order >= c.len() {
        return Err(Error::OrderOutOfRange {
            order,
            len: c.len(),
        });
    }
    let rho_root = root_value(c, order)?;
    let (rho_ratio, drift) = if order + 1 < c.len() && c[order + 1] != 0.0 {
        let next = root_value(c, order + 1)?;
        (
            Some((c[order] / c[order + 1]).abs()),
            Some((rho_root - next).abs()),
        )
    } else {
        (None, None)
    };
    Ok(ConvergenceEstimate {
        n_used: order,
        rho_root,
        rho_ratio,
        drift,
    })
}

/// `|A_N / A_{N+1}|`.
pub fn ratio_test(series: &PowerSeries, order: usize) -> Result<f64> {
    let c = series.coeffs();
    if order + 1 >= c.len() {
        return Err(Error::OrderOutOfRange {
            order: order + 1,
            len: c.len(),
        });
    }
    if c[order + 1] == 0.0 {
        return Err(Error::ZeroCoefficient {
            order: order + 1,
            nearest_nonzero: nearest_nonzero(c, order + 1),
        });
    }
    Ok((c[order] / c[order + 1]).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HkClass {
    Convergent,
    Divergent,
    Borderline,
}

impl std::fmt::Display for HkClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HkClass::Convergent => "convergent",
            HkClass::Divergent => "divergent",
            HkClass::Borderline => "borderline",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HkClassification {
    pub class: HkClass,
    #[serde(rename = "N")]
    pub n: usize,
    pub rho: f64,
    pub drift: f64,
}

/// Classifies an estimate: convergent when `ρ_N ≥ 1 + drift`, divergent
/// when `ρ_N ≤ 1 − drift`, borderline in between.
pub fn classify_estimate(est: &ConvergenceEstimate) -> HkClassification {
    let drift = est.drift.unwrap_or(0.0);
    let class = if est.rho_root >= 1.0 + drift {
        HkClass::Convergent
    } else if est.rho_root <= 1.0 - drift {
        HkClass::Divergent
    } else {
        HkClass::Borderline
    };
    HkClassification {
        class,
        n: est.n_used,
        rho: est.rho_root,
        drift,
    }
}

/// Convergence of the shifted-gauge series at order `N` on the unit disk.
///
/// States whose series terminates (`Ĩ₀ = 0`, or the `λ = 0` corner) are
/// convergent with infinite radius. A series whose coefficients overflow
/// before order `N` is divergent.
pub fn classify_hk(state: &NondimState, order: usize) -> Result<HkClassification> {
    if order < 100 {
        return Err(Error::Domain {
            name: "N",
            value: order as f64,
            domain: "[100, inf)",
        });
    }
    let entire = HkClassification {
        class: HkClass::Convergent,
        n: order,
        rho: f64::INFINITY,
        drift: 0.0,
    };
    if state.is_gauge_degenerate() || state.i0_tilde == 0.0 {
        return Ok(entire);
    }
    match shifted_series(state, order + 1) {
        Ok(t) => match root_test(&t.a, order) {
            Ok(est) => Ok(classify_estimate(&est)),
            Err(Error::ZeroCoefficient { .. }) if t.a.coeffs()[1..].iter().all(|&c| c == 0.0) => {
                Ok(entire)
            }
            Err(e) => Err(e),
        },
        Err(Error::SeriesOverflow { .. }) => Ok(HkClassification {
            class: HkClass::Divergent,
            n: order,
            rho: 0.0,
            drift: 0.0,
        }),
        Err(e) => Err(e),
    }
}

/// Builds a series to `order`; on coefficient overflow, rebuilds it up to
/// the last finite order instead.
fn expand_or_truncate(
    build: impl Fn(usize) -> Result<SeriesTriple>,
    order: usize,
) -> Result<(SeriesTriple, usize)> {
    match build(order) {
        Ok(t) => Ok((t, order)),
        Err(Error::SeriesOverflow { order: bad }) if bad >= 2 => {
            let last = bad - 1;
            Ok((build(last)?, last))
        }
        Err(e) => Err(e),
    }
}

/// A scalar evaluated at one point of a survey grid.
pub trait SurveyMetric: Named + Send + Sync {
    /// Label stored with the grid, e.g. `log10_rho`.
    fn tag(&self) -> &'static str;
    fn evaluate(&self, state: &NondimState, order: usize) -> Result<f64>;
}

/// `log₁₀ ρ_N` of the shifted-gauge series. If coefficients overflow before
/// order `N`, the last finite order is used.
pub struct RadiusMetric;
/// `log₁₀ ρ_N` of the direct time series, same overflow rule.
pub struct TimeRadiusMetric;
/// `log₁₀` of the maximum deviation from RK4 over `[0, t_max]`.
pub struct MaxErrorMetric {
    pub t_max: f64,
    pub dt: f64,
}

impl Default for MaxErrorMetric {
    fn default() -> Self {
        MaxErrorMetric {
            t_max: oracle::DEFAULT_T_MAX,
            dt: 1e-3,
        }
    }
}

impl Named for RadiusMetric {
    fn name(&self) -> &'static str {
        "radius"
    }
}

impl SurveyMetric for RadiusMetric {
    fn tag(&self) -> &'static str {
        "log10_rho"
    }
    fn evaluate(&self, state: &NondimState, order: usize) -> Result<f64> {
        let (t, n) = expand_or_truncate(|k| shifted_series(state, k), order)?;
        Ok(root_test(&t.a, n)?.rho_root.log10())
    }
}

impl Named for TimeRadiusMetric {
    fn name(&self) -> &'static str {
        "radius-time"
    }
}

impl SurveyMetric for TimeRadiusMetric {
    fn tag(&self) -> &'static str {
        "log10_rho_T"
    }
    fn evaluate(&self, state: &NondimState, order: usize) -> Result<f64> {
        let (t, n) = expand_or_truncate(|k| time_series(state, k), order)?;
        Ok(root_test(&t.a, n)?.rho_root.log10())
    }
}

impl Named for MaxErrorMetric {
    fn name(&self) -> &'static str {
        "max-error"
    }
}

impl SurveyMetric for MaxErrorMetric {
    fn tag(&self) -> &'static str {
        "log10_max_error"
    }
    fn evaluate(&self, state: &NondimState, order: usize) -> Result<f64> {
        let y = match shifted_series(state, order) {
            Ok(t) => t.a,
            Err(Error::SeriesOverflow { .. }) => return Ok(f64::MAX.log10()),
            Err(e) => return Err(e),
        };
        let scan = oracle::error_scan(state, &y, order, self.t_max, self.dt)?;
        Ok(scan.max_abs_error.log10())
    }
}

pub fn builtin_registry() -> Registry<dyn SurveyMetric> {
    let mut reg: Registry<dyn SurveyMetric> = Registry::new("survey metric");
    reg.register(Arc::new(RadiusMetric))
        .register(Arc::new(TimeRadiusMetric))
        .register(Arc::new(MaxErrorMetric::default()));
    reg
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurveySpec {
    pub s0_range: (f64, f64),
    pub i0_range: (f64, f64),
    pub s0_cells: usize,
    pub i0_cells: usize,
    #[serde(rename = "N")]
    pub order: usize,
}

impl Default for SurveySpec {
    fn default() -> Self {
        SurveySpec {
            s0_range: (0.05, 4.0),
            i0_range: (0.05, 2.0),
            s0_cells: 80,
            i0_cells: 60,
            order: 1000,
        }
    }
}

fn axis(name: &'static str, (lo, hi): (f64, f64), cells: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{name} range must satisfy 0 < min < max, got [{lo}, {hi}]"
        )));
    }
    if cells < 2 {
        return Err(Error::InvalidInput(format!(
            "{name} resolution must be at least 2"
        )));
    }
    let step = (hi - lo) / (cells - 1) as f64;
    Ok((0..cells)
        .map(|k| {
            if k + 1 == cells {
                hi
            } else {
                lo + step * k as f64
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyGrid {
    pub s0_axis: Vec<f64>,
    pub i0_axis: Vec<f64>,
    /// `values[i][j]` belongs to `(s0_axis[i], i0_axis[j])`; NaN marks a
    /// cell that could not be evaluated.
    pub values: Vec<Vec<f64>>,
    pub metric_tag: String,
    #[serde(rename = "N")]
    pub order: usize,
}

impl SurveyGrid {
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Number of cells recorded as missing.
    pub fn missing(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_nan()).count()
    }
}

/// Thread cap from `SIR_GAUGE_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidInput(format!(
                "{THREADS_ENV} must be a positive integer, got `{s}`"
            ))),
        },
    }
}

fn cell_value(metric: &dyn SurveyMetric, s0: f64, i0: f64, order: usize) -> f64 {
    NondimState::from_tilde(s0, i0)
        .and_then(|state| {
            if state.degenerate || state.is_gauge_degenerate() {
                Err(Error::GaugeDegenerate {
                    lambda: state.lambda,
                })
            } else {
                metric.evaluate(&state, order)
            }
        })
        .unwrap_or(f64::NAN)
}

/// Evaluates `metric` on every grid point. Cells are independent and run in
/// parallel; `threads` caps the pool (default: all cores, or
/// `SIR_GAUGE_THREADS`).
pub fn survey(
    spec: &SurveySpec,
    metric: &dyn SurveyMetric,
    threads: Option<usize>,
) -> Result<SurveyGrid> {
    if spec.order < 100 {
        return Err(Error::Domain {
            name: "N",
            value: spec.order as f64,
            domain: "[100, inf)",
        });
    }
    let s0_axis = axis("S0 tilde", spec.s0_range, spec.s0_cells)?;
    let i0_axis = axis("I0 tilde", spec.i0_range, spec.i0_cells)?;
    let threads = match threads {
        Some(n) => Some(n),
        None => threads_from_env()?,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let cols = i0_axis.len();
    let flat: Vec<f64> = pool.install(|| {
        (0..s0_axis.len() * cols)
            .into_par_iter()
            .map(|k| cell_value(metric, s0_axis[k / cols], i0_axis[k % cols], spec.order))
            .collect()
    });
    let values = flat.chunks(cols).map(|row| row.to_vec()).collect();
    Ok(SurveyGrid {
        s0_axis,
        i0_axis,
        values,
        metric_tag: metric.tag().to_string(),
        order: spec.order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Domain;

    fn geometric(ratio: f64, len: usize) -> PowerSeries {
        PowerSeries::new(Domain::Y, (0..len).map(|n| ratio.powi(n as i32)).collect()).unwrap()
    }

    #[test]
    fn geometric_series_tests_agree() {
        let s = geometric(0.5, 60);
        for n in 1..59 {
            let est = root_test(&s, n).unwrap();
            assert_eq!(est.rho_root, 2.0);
            assert_eq!(est.rho_ratio, Some(2.0));
            assert_eq!(ratio_test(&s, n).unwrap(), 2.0);
            assert_eq!(est.drift, Some(0.0));
        }
    }

    #[test]
    fn zero_coefficient_reports_neighbour() {
        let s = PowerSeries::new(Domain::Y, vec![1.0, 0.5, 0.0, 0.0, 0.1]).unwrap();
        match root_test(&s, 2) {
            Err(Error::ZeroCoefficient {
                order: 2,
                nearest_nonzero: Some(1),
            }) => {}
            other => panic!("{other:?}"),
        }
        assert!(ratio_test(&s, 1).is_err());
        assert!(root_test(&s, 5).is_err());
        assert!(root_test(&s, 0).is_err());
    }

    #[test]
    fn classification_bands() {
        let mk = |rho, drift| ConvergenceEstimate {
            n_used: 100,
            rho_root: rho,
            rho_ratio: None,
            drift: Some(drift),
        };
        assert_eq!(
            classify_estimate(&mk(1.01, 0.001)).class,
            HkClass::Convergent
        );
        assert_eq!(
            classify_estimate(&mk(0.99, 0.001)).class,
            HkClass::Divergent
        );
        assert_eq!(
            classify_estimate(&mk(1.0005, 0.001)).class,
            HkClass::Borderline
        );
    }

    #[test]
    fn terminating_series_are_convergent() {
        let state = NondimState::from_tilde(1.5, 0.0).unwrap();
        let c = classify_hk(&state, 200).unwrap();
        assert_eq!(c.class, HkClass::Convergent);
        assert!(c.rho.is_infinite());
        assert!(classify_hk(&state, 10).is_err());
    }

    #[test]
    fn axes_validate() {
        assert_eq!(axis("x", (1.0, 2.0), 3).unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(axis("x", (0.0, 2.0), 3).is_err());
        assert!(axis("x", (2.0, 1.0), 3).is_err());
        assert!(axis("x", (1.0, 2.0), 1).is_err());
    }

    #[test]
    fn survey_is_independent_of_thread_count() {
        let spec = SurveySpec {
            s0_range: (0.2, 3.0),
            i0_range: (0.05, 1.0),
            s0_cells: 6,
            i0_cells: 5,
            order: 150,
        };
        let one = survey(&spec, &RadiusMetric, Some(1)).unwrap();
        let many = survey(&spec, &RadiusMetric, Some(4)).unwrap();
        assert_eq!(one.values.len(), 6);
        assert_eq!(one.values[0].len(), 5);
        for (a, b) in one
            .values
            .iter()
            .flatten()
            .zip(many.values.iter().flatten())
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn metric_registry() {
        let reg = builtin_registry();
        assert_eq!(reg.names(), vec!["max-error", "radius", "radius-time"]);
        assert_eq!(reg.get("radius").unwrap().tag(), "log10_rho");
    }
}
