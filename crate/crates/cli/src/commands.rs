use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{json, Value};
use sir_gauge::asymptotics::{self, SmallI0Expansion, ToyModelParams};
use sir_gauge::convergence::{self, classify_estimate, root_test, MaxErrorMetric, SurveySpec};
use sir_gauge::oracle;
use sir_gauge::series::{self, shifted_series, SeriesGauge};
use sir_gauge::singularity::{self, nearest_singularities, SingularityReport};
use sir_gauge::{NondimState, Scenario};

use crate::args::*;
use crate::output::{self, Cell, Output, Record, Table};
use crate::Failure;

/// Scenario file plus flag overrides.
pub struct Inputs {
    scenario: Option<NondimState>,
    s0: Option<f64>,
    i0: Option<f64>,
}

impl Inputs {
    pub fn new(g: &GlobalArgs) -> Result<Self, Failure> {
        let scenario = match g.scenario.as_deref() {
            None => None,
            Some(src) => Some(load_scenario(src)?.to_state()?),
        };
        Ok(Inputs {
            scenario,
            s0: g.s0,
            i0: g.i0,
        })
    }

    fn s0(&self) -> Result<f64, Failure> {
        self.s0
            .or(self.scenario.map(|s| s.s0_tilde))
            .ok_or_else(|| Failure::Validation("no scenario: pass --scenario or --s0".into()))
    }

    fn i0(&self) -> Result<f64, Failure> {
        self.i0
            .or(self.scenario.map(|s| s.i0_tilde))
            .ok_or_else(|| Failure::Validation("no scenario: pass --scenario or --i0".into()))
    }

    fn state(&self) -> Result<NondimState, Failure> {
        match (self.scenario, self.s0, self.i0) {
            // keep β from dimensional inputs when nothing is overridden
            (Some(state), None, None) => Ok(state),
            _ => Ok(NondimState::from_tilde(self.s0()?, self.i0()?)?),
        }
    }
}

fn load_scenario(src: &str) -> Result<Scenario, Failure> {
    let path = Path::new(src);
    if path.exists() {
        return Ok(Scenario::load(path)?);
    }
    Scenario::bundled(src).ok_or_else(|| {
        Failure::Validation(format!(
            "`{src}` is neither a file nor a bundled scenario ({})",
            Scenario::BUNDLED.join(", ")
        ))
    })
}

fn gauge(name: &str) -> Result<Arc<dyn SeriesGauge>, Failure> {
    Ok(series::builtin_registry().get(name)?)
}

pub fn solve(inputs: &Inputs, a: &SolveArgs) -> Result<Output, Failure> {
    let state = inputs.state()?;
    let gauge = gauge(&a.gauge)?;
    if !(a.step > 0.0) {
        return Err(Failure::Validation("--step must be positive".into()));
    }
    let v = gauge.expand(&state, a.n)?.a;
    let traj = oracle::integrate_v(&state, a.tmax, a.dt)?;
    let last = traj.samples.len() - 1;
    let dt = a.tmax / last as f64;
    let stride = ((a.step / dt).round() as usize).max(1);

    let mut table = Table::new(&[
        "T", "y", "V_series", "V_rk4", "S_tilde", "I_tilde", "R_tilde",
    ]);
    for (k, s) in traj.samples.iter().enumerate() {
        if k % stride != 0 && k != last {
            continue;
        }
        let x = gauge.variable_at(&state, s.t)?;
        let vs = v.eval(x);
        let (ps, pi, pr) = match state.reconstruct(vs) {
            Ok(p) => (p.s, p.i, p.r),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        table.push(
            [s.t, x, vs, s.v, ps, pi, pr]
                .into_iter()
                .map(Cell::Num)
                .collect(),
        );
    }
    Ok(Output::Table(table))
}

pub fn coeffs(inputs: &Inputs, a: &CoeffsArgs) -> Result<Output, Failure> {
    let state = inputs.state()?;
    let triple = gauge(&a.gauge)?.expand(&state, a.n)?;
    let b = if a.with_b {
        Some(triple.b().ok_or_else(|| {
            Failure::Validation("B_n = C_n/L is undefined when L = 0 (S̃₀ = 0)".into())
        })?)
    } else {
        None
    };
    let mut cols = vec!["n", "A_n", "C_n"];
    if b.is_some() {
        cols.push("B_n");
    }
    let mut table = Table::new(&cols);
    for n in 0..=a.n {
        let mut row = vec![
            Cell::Int(n),
            Cell::Num(triple.a.coeffs()[n]),
            Cell::Num(triple.c.coeffs()[n]),
        ];
        if let Some(b) = &b {
            row.push(Cell::Num(b.coeffs()[n]));
        }
        table.push(row);
    }
    Ok(Output::Table(table))
}

#[derive(Serialize)]
struct RadiusOut {
    rho_root: f64,
    rho_ratio: Option<f64>,
    drift: Option<f64>,
    #[serde(rename = "N")]
    n: usize,
    classification: String,
}

pub fn radius(inputs: &Inputs, a: &RadiusArgs) -> Result<Output, Failure> {
    let state = inputs.state()?;
    let triple = gauge(&a.gauge)?.expand(&state, a.n + 1)?;
    let est = root_test(&triple.a, a.n)?;
    let out = RadiusOut {
        rho_root: est.rho_root,
        rho_ratio: est.rho_ratio,
        drift: est.drift,
        n: est.n_used,
        classification: classify_estimate(&est).class.to_string(),
    };
    Ok(Output::Record(Record(to_value(&out)?)))
}

#[derive(Serialize)]
struct Point {
    re: f64,
    im: f64,
}

impl From<&num_complex::Complex64> for Point {
    fn from(z: &num_complex::Complex64) -> Self {
        Point { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct SingularitiesOut {
    domain: String,
    #[serde(rename = "N")]
    n: usize,
    nearest: Vec<Point>,
    radius: f64,
    all_roots: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ambiguous_with: Option<Vec<Point>>,
}

impl From<&SingularityReport> for SingularitiesOut {
    fn from(r: &SingularityReport) -> Self {
        SingularitiesOut {
            domain: r.domain.to_string(),
            n: r.n_used,
            nearest: r.nearest_pair.iter().map(Point::from).collect(),
            radius: r.radius,
            all_roots: r.roots.iter().map(Point::from).collect(),
            ambiguous_with: r
                .ambiguous_with
                .map(|p| p.iter().map(Point::from).collect()),
        }
    }
}

pub fn singularities(
    inputs: &Inputs,
    a: &SingularitiesArgs,
    format: Option<Format>,
) -> Result<Output, Failure> {
    let state = inputs.state()?;
    let finder = singularity::builtin_registry().get(&a.finder)?;
    let gauge = gauge(match a.domain {
        DomainArg::Y => "shifted",
        DomainArg::T => "time",
    })?;
    if a.n.is_empty() {
        return Err(Failure::Validation("--n needs at least one order".into()));
    }
    let top = *a.n.iter().max().unwrap();
    let v = gauge.expand(&state, top)?.a;
    let reports =
        a.n.iter()
            .map(|&n| nearest_singularities(&v, n, finder.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;

    if a.table || format == Some(Format::Csv) {
        let mut table = Table::new(&["N", "re", "im", "rho"]);
        for r in &reports {
            let z = r.nearest_pair[0];
            table.push(vec![
                Cell::Int(r.n_used),
                Cell::Num(z.re),
                Cell::Num(z.im),
                Cell::Num(r.radius),
            ]);
        }
        return Ok(Output::Table(table));
    }
    let outs: Vec<SingularitiesOut> = reports.iter().map(SingularitiesOut::from).collect();
    let value = if outs.len() == 1 {
        to_value(&outs[0])?
    } else {
        to_value(&outs)?
    };
    Ok(Output::Record(Record(value)))
}

pub fn error_scan(inputs: &Inputs, a: &ErrorScanArgs) -> Result<Output, Failure> {
    let state = inputs.state()?;
    let y = shifted_series(&state, a.n)?.a;
    let scan = oracle::error_scan(&state, &y, a.n, a.tmax, a.dt)?;
    Ok(Output::Record(Record(to_value(&scan)?)))
}

/// RFC 3339 time, pinned by `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> Result<String, Failure> {
    let now = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(s) => {
            let secs: i64 = s.trim().parse().map_err(|_| {
                Failure::Validation(format!("SOURCE_DATE_EPOCH must be an integer, got `{s}`"))
            })?;
            DateTime::<Utc>::from_timestamp(secs, 0).ok_or_else(|| {
                Failure::Validation(format!("SOURCE_DATE_EPOCH {secs} out of range"))
            })?
        }
        Err(_) => Utc::now(),
    };
    Ok(now.to_rfc3339_opts(SecondsFormat::Secs, true))
}

fn sidecar_path(a: &SurveyArgs, out: Option<&Path>) -> Option<PathBuf> {
    a.meta
        .clone()
        .or_else(|| out.map(|p| p.with_extension("meta.json")))
}

pub fn survey(a: &SurveyArgs, out: Option<&Path>) -> Result<Output, Failure> {
    let mut registry = convergence::builtin_registry();
    if a.tmax.is_some() || a.dt.is_some() {
        let base = MaxErrorMetric::default();
        registry.register(Arc::new(MaxErrorMetric {
            t_max: a.tmax.unwrap_or(base.t_max),
            dt: a.dt.unwrap_or(base.dt),
        }));
    }
    let metric = registry.get(&a.metric)?;
    let spec = SurveySpec {
        s0_range: (a.s0_range[0], a.s0_range[1]),
        i0_range: (a.i0_range[0], a.i0_range[1]),
        s0_cells: a.s0_cells,
        i0_cells: a.i0_cells,
        order: a.n,
    };
    if a.threads == Some(0) {
        return Err(Failure::Validation("--threads must be positive".into()));
    }
    let started = timestamp()?;
    let grid = convergence::survey(&spec, metric.as_ref(), a.threads)?;
    let finished = timestamp()?;

    let mut table = Table::new(&["s0_tilde", "i0_tilde", "value"]);
    for (i, s0) in grid.s0_axis.iter().enumerate() {
        for (j, i0) in grid.i0_axis.iter().enumerate() {
            table.push(vec![
                Cell::Num(*s0),
                Cell::Num(*i0),
                Cell::Num(grid.value_at(i, j)),
            ]);
        }
    }

    if let Some(path) = sidecar_path(a, out) {
        let meta = json!({
            "N": grid.order,
            "metric": metric.name(),
            "value": grid.metric_tag,
            "grid": {
                "s0_tilde": { "min": spec.s0_range.0, "max": spec.s0_range.1, "cells": spec.s0_cells },
                "i0_tilde": { "min": spec.i0_range.0, "max": spec.i0_range.1, "cells": spec.i0_cells },
                "order": "s0_tilde-major",
            },
            "missing": grid.missing(),
            "timestamps": { "started": started, "finished": finished },
        });
        output::write(Some(&path), &output::pretty(&meta)?)?;
    }
    Ok(Output::Table(table))
}

fn y_grid(points: usize) -> Result<Vec<f64>, Failure> {
    if points < 2 {
        return Err(Failure::Validation("--points must be at least 2".into()));
    }
    let last = points - 1;
    Ok((0..points)
        .map(|k| {
            if k == last {
                1.0
            } else {
                k as f64 / last as f64
            }
        })
        .collect())
}

pub fn asymptotics(inputs: &Inputs, a: &AsymptoticsArgs) -> Result<Output, Failure> {
    let ys = y_grid(a.points)?;
    let table = match a.mode {
        Mode::H => {
            let exp = SmallI0Expansion::new(inputs.s0()?)?;
            let mut t = Table::new(&["y", "H1", "H2"]);
            for y in ys {
                let h1 = asymptotics::h1(y, &exp)?;
                let h2 = asymptotics::h2(y, &exp)?;
                t.push(vec![Cell::Num(y), Cell::Num(h1), Cell::Num(h2)]);
            }
            t
        }
        Mode::J => {
            let mut t = Table::new(&["y", "J11", "J23", "J34", "J35"]);
            for y in ys {
                let j = asymptotics::j_components(y)?;
                t.push(
                    [y, j.j11, j.j23, j.j34, j.j35]
                        .into_iter()
                        .map(Cell::Num)
                        .collect(),
                );
            }
            t
        }
        Mode::P => {
            let i0 = inputs.i0()?;
            let mut t = Table::new(&["y", "P0", "P1"]);
            for y in ys {
                let (p0, p1) = asymptotics::p_components(y, i0)?;
                t.push(vec![Cell::Num(y), Cell::Num(p0), Cell::Num(p1)]);
            }
            t
        }
    };
    Ok(Output::Table(table))
}

pub fn toy(a: &ToyArgs) -> Result<Output, Failure> {
    let params = ToyModelParams {
        m: a.m,
        n_amp: a.n_amp,
        rho: a.rho,
        phi: a.phi,
    };
    let series = asymptotics::toy_coefficients(&params, a.n_max)?;
    let mut t = Table::new(&["n", "A_n", "log10_abs"]);
    for (n, &c) in series.coeffs().iter().enumerate() {
        t.push(vec![Cell::Int(n), Cell::Num(c), Cell::Num(c.abs().log10())]);
    }
    Ok(Output::Table(t))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Validation(e.to_string()))
}
