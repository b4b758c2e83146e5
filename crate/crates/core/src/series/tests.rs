use super::*;
use crate::Scenario;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-14)
}

fn bubonic() -> NondimState {
    Scenario::bundled("bubonic").unwrap().to_state().unwrap()
}

fn states() -> impl Strategy<Value = NondimState> {
    (0.01f64..5.0, 0.01f64..3.0)
        .prop_filter_map("valid state", |(s, i)| NondimState::from_tilde(s, i).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn time_series_matches_taylor_derivatives(state in states()) {
        // V' = S̃ − V and S̃' = S̃V' differentiated by hand at T = 0
        let s = state.s0_tilde;
        let i = state.i0_tilde;
        let d1 = -i;
        let d2 = i * (1.0 - s);
        let d3 = i * (-1.0 + 2.0 * s + s * i - s * s);
        let d4 = s * d1.powi(3) + 3.0 * s * d1 * d2 + (s - 1.0) * d3;
        let sd2 = s * (d2 + d1 * d1);
        let sd3 = s * (d1.powi(3) + 3.0 * d1 * d2 + d3);
        let want_a = [d1, d2 / 2.0, d3 / 6.0, d4 / 24.0];
        let want_c = [s * d1, sd2 / 2.0, sd3 / 6.0];
        let t = time_series(&state, 5).unwrap();
        let (a, c) = (t.a.coeffs(), t.c.coeffs());
        let floor = 1e-13 * (1.0 + s + i).powi(4);
        for (k, w) in want_a.iter().enumerate() {
            prop_assert!((a[k + 1] - w).abs() <= 1e-11 * w.abs() + floor, "A{} {} vs {}", k + 1, a[k + 1], w);
        }
        for (k, w) in want_c.iter().enumerate() {
            prop_assert!((c[k + 1] - w).abs() <= 1e-11 * w.abs() + floor, "C{} {} vs {}", k + 1, c[k + 1], w);
        }
    }

    #[test]
    fn shifted_series_first_coefficients(state in states()) {
        prop_assume!(state.lambda < -1e-3);
        let s = state.s0_tilde;
        let i = state.i0_tilde;
        let l = state.lambda;
        let t = shifted_series(&state, 4).unwrap();
        let a = t.a.coeffs();
        let c = t.c.coeffs();
        let want_a = [
            i / l,
            i / (2.0 * l) * (1.0 + 1.0 / l - s / l),
            i / (6.0 * l) * (2.0 + 3.0 / l - 3.0 * s / l + 1.0 / (l * l) - 2.0 * s / (l * l) + s * s / (l * l) - i * s / (l * l)),
        ];
        let want_c = [
            i * s / l,
            i * s / (2.0 * l) * (1.0 + 1.0 / l - s / l + i / l),
        ];
        let scale = 1e-13 * (1.0 + s + i).powi(3) / l.abs().powi(3);
        for (k, w) in want_a.iter().enumerate() {
            prop_assert!((a[k + 1] - w).abs() <= 1e-11 * w.abs() + scale, "A{} {} vs {}", k + 1, a[k + 1], w);
        }
        for (k, w) in want_c.iter().enumerate() {
            prop_assert!((c[k + 1] - w).abs() <= 1e-11 * w.abs() + scale, "C{} {} vs {}", k + 1, c[k + 1], w);
        }
    }

    #[test]
    fn c_is_l_times_exp_of_a(state in states()) {
        for t in [time_series(&state, 40).unwrap(), shifted_or_constant(&state, 40).unwrap()] {
            let b = exp_series(&t.a).unwrap();
            let from_c = t.b().unwrap();
            for (x, y) in b.coeffs().iter().zip(from_c.coeffs()) {
                let floor = 1e-12 * b.coeffs()[0];
                prop_assert!((x - y).abs() <= 1e-10 * y.abs() + floor, "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn reciprocal_convolution_identity(state in states()) {
        let a = shifted_or_constant(&state, 60).unwrap().a;
        let r = reciprocal_series(&a).unwrap();
        let (ac, rc) = (a.coeffs(), r.coeffs());
        for n in 0..ac.len() {
            let conv: f64 = (0..=n).map(|k| ac[k] * rc[n - k]).sum();
            let mag: f64 = (0..=n).map(|k| (ac[k] * rc[n - k]).abs()).sum();
            let want = if n == 0 { 1.0 } else { 0.0 };
            prop_assert!((conv - want).abs() <= 1e-10 * mag.max(1.0));
        }
    }

    #[test]
    fn gauge_maps_round_trip(t in 0.0f64..50.0, lambda in -1.0f64..-1e-3) {
        let y = time_to_shifted(t, lambda).unwrap();
        prop_assert!((0.0..=1.0).contains(&y));
        let back = shifted_to_time(y, lambda).unwrap();
        if y < 1.0 - 1e-6 {
            prop_assert!((back - t).abs() <= 1e-9 * t.max(1.0));
        }
    }
}

#[test]
fn exp_of_identity_is_factorials() {
    let x = PowerSeries::new(Domain::T, [0.0, 1.0].into_iter().chain([0.0; 18]).collect()).unwrap();
    let e = exp_series(&x).unwrap();
    let mut fact = 1.0;
    for (n, c) in e.coeffs().iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        assert!(rel(*c, 1.0 / fact) < 1e-15);
    }
}

#[test]
fn reciprocal_of_geometric() {
    let g = PowerSeries::new(Domain::Y, (0..30).map(|n| 0.5f64.powi(n)).collect()).unwrap();
    let r = reciprocal_series(&g).unwrap();
    assert_eq!(&r.coeffs()[..2], &[1.0, -0.5]);
    assert!(r.coeffs()[2..].iter().all(|c| c.abs() < 1e-15));
    let zero = PowerSeries::new(Domain::Y, vec![0.0, 1.0]).unwrap();
    assert!(matches!(
        reciprocal_series(&zero),
        Err(Error::ZeroCoefficient {
            order: 0,
            nearest_nonzero: Some(1)
        })
    ));
}

#[test]
fn power_series_validation() {
    assert!(PowerSeries::new(Domain::T, vec![]).is_err());
    assert!(matches!(
        PowerSeries::new(Domain::T, vec![1.0, f64::INFINITY]),
        Err(Error::SeriesOverflow { order: 1 })
    ));
    let s = PowerSeries::new(Domain::Y, vec![1.0, 2.0, 3.0]).unwrap();
    assert_eq!(s.eval(2.0), 17.0);
    assert_eq!(s.truncated(1).unwrap().coeffs(), &[1.0, 2.0]);
    assert!(s.truncated(3).is_err());
    assert_eq!(Domain::G.to_string(), "g");
}

#[test]
fn no_infection_gives_constant_series() {
    let state = NondimState::from_tilde(1.7, 0.0).unwrap();
    for t in [
        time_series(&state, 30).unwrap(),
        shifted_series(&state, 30).unwrap(),
    ] {
        assert_eq!(t.a.coeffs()[0], state.v0);
        assert!(t.a.coeffs()[1..].iter().all(|&c| c == 0.0));
    }
}

#[test]
fn degenerate_corner_refuses_gauge() {
    let state = NondimState::from_tilde(1.0, 0.0).unwrap();
    assert!(matches!(
        shifted_series(&state, 5),
        Err(Error::GaugeDegenerate { .. })
    ));
    let t = shifted_or_constant(&state, 5).unwrap();
    assert_eq!(t.a.coeffs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn shifted_and_time_series_agree_inside_time_radius() {
    let state = bubonic();
    let t = time_series(&state, 200).unwrap().a;
    let y = shifted_series(&state, 200).unwrap().a;
    // nearest time-domain singularity is at |T| ≈ 5
    for k in 0..=10 {
        let tt = 0.25 * k as f64;
        let yy = time_to_shifted(tt, state.lambda).unwrap();
        assert!((t.eval(tt) - y.eval(yy)).abs() < 1e-8, "T={tt}");
    }
}

#[test]
fn shifted_series_reaches_final_state() {
    let state = bubonic();
    let y = shifted_series(&state, 35).unwrap().a;
    assert!((y.eval(1.0) - state.v_inf).abs() < 1e-3);
}

#[test]
fn time_series_diverges_past_its_radius() {
    let state = bubonic();
    let t = time_series(&state, 301).unwrap().a;
    let a = t.truncated(300).unwrap().eval(6.0);
    let b = t.eval(6.0);
    assert!((a - b).abs() > 1e-3 || !b.is_finite());
}

#[test]
fn straight_gauge_closed_forms() {
    let state = bubonic();
    let table = straight_gauge(&state, 10, DEFAULT_STRAIGHT_ROOT_TOL).unwrap();
    let l = state.lambda;
    let s_inf = state.s_inf_tilde;
    assert_eq!(table.e[1], 1.0);
    assert_eq!(table.f[0], s_inf);
    assert_eq!(table.f[1], s_inf);
    assert!(rel(table.e[2], s_inf / (2.0 * l)) < 1e-14);
    assert!(rel(table.f[2], (1.0 + 1.0 / (2.0 * l)) * s_inf) < 1e-14);
    assert!(rel(table.e[3], (1.0 / 3.0 + 1.0 / (4.0 * l)) * s_inf / l) < 1e-13);
    let f3 = (1.0 + 13.0 / (12.0 * l) + 1.0 / (4.0 * l * l)) * s_inf;
    assert!(rel(table.f[3], f3) < 1e-13);
}

#[test]
fn straight_gauge_meets_initial_condition() {
    let state = bubonic();
    let gauge = StraightGauge {
        root_tol: DEFAULT_STRAIGHT_ROOT_TOL,
    };
    let t = gauge.expand(&state, 10).unwrap();
    assert!((t.a.eval(1.0) - state.v0).abs() < 1e-9);
    assert!((t.a.eval(0.0) - state.v_inf).abs() < 1e-15);
    assert!((gauge.variable_at(&state, 0.0).unwrap() - 1.0).abs() < 1e-15);
    let table = straight_gauge(&state, 10, DEFAULT_STRAIGHT_ROOT_TOL).unwrap();
    assert!(close(table.a1, 2.5809719947, 1e-9));
}

#[test]
fn straight_gauge_without_real_root() {
    let state = bubonic();
    match straight_gauge(&state, 30, DEFAULT_STRAIGHT_ROOT_TOL) {
        Err(Error::NoRealRoot { .. }) | Err(Error::AmbiguousRoot { .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(straight_gauge(&state, 1, DEFAULT_STRAIGHT_ROOT_TOL).is_err());
}

#[test]
fn gauge_registry() {
    let reg = builtin_registry();
    assert_eq!(reg.names(), vec!["shifted", "straight", "time"]);
    let g = reg.get("shifted").unwrap();
    assert_eq!(g.domain(), Domain::Y);
    assert!(g.unit_disk_covers_physical_domain());
    assert!(!reg.get("time").unwrap().unit_disk_covers_physical_domain());
    assert!(matches!(
        reg.get("bent"),
        Err(Error::UnknownStrategy { .. })
    ));
}

#[test]
fn overflow_is_reported_with_order() {
    let state = NondimState::from_tilde(7.497964, 0.003565).unwrap();
    match shifted_series(&state, 5000) {
        Err(Error::SeriesOverflow { order }) => assert!(order > 1000 && order < 5000),
        other => panic!("{:?}", other.map(|t| t.order())),
    }
}

/// The printed closed forms for the first time-series coefficients, as an
/// independent check. `C₂` onward follow from a `C` recursion without the
/// `(j+1)` weight and disagree with the Taylor expansion of the ODE.
#[test]
#[ignore = "printed C2, A3, C3, A4 disagree with the Taylor expansion of the ODE"]
fn time_series_printed_closed_forms() {
    for (s, i) in [(0.5, 0.3), (1.656117, 0.045641), (2.0, 1.0)] {
        let state = NondimState::from_tilde(s, i).unwrap();
        let t = time_series(&state, 5).unwrap();
        let (a, c) = (t.a.coeffs(), t.c.coeffs());
        let want_a = [
            -i,
            0.5 * i * (1.0 - s),
            i * (-2.0 + 3.0 * s + 2.0 * i * s - s * s) / 12.0,
            i * (2.0 - 5.0 * s - 7.0 * i * s + 8.0 * s * s - 2.0 * i * i * s + 3.0 * i * s * s
                - s * s * s)
                / 48.0,
        ];
        let want_c = [
            -i * s,
            0.25 * i * (2.0 * i + 1.0 - s) * s,
            i * (-2.0 * i * i - 5.0 * i + 3.0 * i * s + 7.0 * s - 2.0 - s * s) * s / 12.0,
        ];
        for (k, w) in want_a.iter().enumerate() {
            assert!(
                rel(a[k + 1], *w) < 1e-11,
                "A{}: {} vs {}",
                k + 1,
                a[k + 1],
                w
            );
        }
        for (k, w) in want_c.iter().enumerate() {
            assert!(
                rel(c[k + 1], *w) < 1e-11,
                "C{}: {} vs {}",
                k + 1,
                c[k + 1],
                w
            );
        }
    }
}

/// Picard iteration `V ← V₀ + ∫(S̃₀e^{V−V₀} − V)` on truncated series,
/// independent of the coefficient recursion.
fn picard_time_series(state: &NondimState, order: usize) -> Vec<f64> {
    let mut v = vec![0.0; order + 1];
    v[0] = state.v0;
    for _ in 0..=order {
        let mut shifted = v.clone();
        shifted[0] = 0.0;
        let e = exp_series(&PowerSeries::new(Domain::T, shifted).unwrap()).unwrap();
        let rhs: Vec<f64> = e
            .coeffs()
            .iter()
            .zip(&v)
            .map(|(x, y)| state.s0_tilde * x - y)
            .collect();
        let mut next = vec![state.v0; 1];
        next.extend((0..order).map(|k| rhs[k] / (k + 1) as f64));
        v = next;
    }
    v
}

#[test]
fn time_series_matches_picard_iteration() {
    for (s, i) in [(0.5, 0.3), (1.656117, 0.045641), (2.0, 1.0), (4.0, 0.01)] {
        let state = NondimState::from_tilde(s, i).unwrap();
        let a = time_series(&state, 12).unwrap().a;
        let p = picard_time_series(&state, 12);
        for (n, (x, y)) in a.coeffs().iter().zip(&p).enumerate() {
            assert!(
                (x - y).abs() <= 1e-12 * y.abs().max(1e-3),
                "({s}, {i}) A{n}: {x} vs {y}"
            );
        }
    }
}
