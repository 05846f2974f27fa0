use memstab::model::{
    map_heat_to_problem, validate_problem, DelayKind, DelaySpec, HeatModelSpec, TimeFunction,
};
use proptest::prelude::*;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 12-point Gauss–Legendre with `panels` equal panels on `[a, b]`.
fn quadrature<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(12);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|j| {
            let mid = a + (j as f64 + 0.5) * h;
            rule.iter()
                .map(|(x, w)| w * f(mid + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

fn exp_poly_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..5.0f64, 0.2..6.0f64), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exp_poly_integral_matches_quadrature(terms in exp_poly_strategy(), wfrac in 0.0..0.9f64) {
        let f = TimeFunction::exp_poly(terms.iter().copied()).unwrap();
        let min_rate = terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        let w = wfrac * min_rate;
        let exact = f.integrate(w).unwrap();
        let gap = min_rate - w;
        let end = 45.0 / gap;
        let g = |t: f64| (w * t).exp() * terms.iter().map(|(c, q)| c * (-q * t).exp()).sum::<f64>();
        let max_rate = terms.iter().map(|t| t.1).fold(0.0, f64::max);
        let quad = quadrature(&g, 0.0, end, (end * max_rate).ceil() as usize + 1);
        prop_assert!((exact - quad).abs() <= 1e-8 * exact.abs().max(1e-300) + 1e-14,
            "exact {exact} quad {quad}");
    }

    #[test]
    fn table_integral_matches_quadrature(
        values in prop::collection::vec(0.0..3.0f64, 2..8),
        h in 0.1..2.0f64,
        w in -1.0..2.0f64,
    ) {
        let times: Vec<f64> = (0..values.len()).map(|i| i as f64 * h).collect();
        let f = TimeFunction::table(times.clone(), values.clone()).unwrap();
        let exact = f.integrate(w).unwrap();
        let mut quad = 0.0;
        for i in 0..times.len() - 1 {
            let (t0, t1, v0, v1) = (times[i], times[i + 1], values[i], values[i + 1]);
            let g = |t: f64| (w * t).exp() * (v0 + (v1 - v0) * (t - t0) / (t1 - t0));
            quad += quadrature(&g, t0, t1, 4);
        }
        prop_assert!((exact - quad).abs() <= 1e-8 * exact.abs() + 1e-13);
    }

    #[test]
    fn exp_poly_is_nonnegative(terms in exp_poly_strategy(), t in 0.0..100.0f64) {
        let f = TimeFunction::exp_poly(terms).unwrap();
        prop_assert!(f.eval(t).unwrap() >= 0.0);
        prop_assert!(f.squared().eval(t).unwrap() >= 0.0);
    }

    #[test]
    fn table_is_nonnegative(values in prop::collection::vec(0.0..3.0f64, 2..8), t in 0.0..20.0f64) {
        let times: Vec<f64> = (0..values.len()).map(|i| i as f64).collect();
        let f = TimeFunction::table(times, values).unwrap();
        prop_assert!(f.eval(t).unwrap() >= 0.0);
    }

    #[test]
    fn heat_mapping_always_validates(
        nu in 0.05..20.0f64,
        b1 in 0.0..3.0f64,
        b2 in 0.0..3.0f64,
        k in 0.05..4.0f64,
        c1 in 0.0..1.0f64,
        q1 in 0.1..3.0f64,
        c2 in 0.0..1.0f64,
        q2 in 0.1..3.0f64,
        p in prop::collection::vec(-1.0..1.0f64, 0..4),
    ) {
        let mut m = HeatModelSpec::new(nu, b1, b2, k, 8);
        m.k1 = TimeFunction::exp(c1, q1).unwrap();
        m.k2 = TimeFunction::exp(c2, q2).unwrap();
        m.p_coeffs = p;
        let prob = map_heat_to_problem(&m).unwrap();
        let report = validate_problem(&prob);
        prop_assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn table_delay_stays_in_range(
        lags in prop::collection::vec(0.0..1.5f64, 2..10),
        step in 0.01..3.0f64,
        t in 0.0..1000.0f64,
    ) {
        let times: Vec<f64> = (0..lags.len()).map(|i| i as f64 * step).collect();
        let d = DelaySpec::new(1.5, DelayKind::Table { times, lags }).unwrap();
        let v = d.eval(t).unwrap();
        prop_assert!((0.0..=1.5).contains(&v));
        prop_assert!(t - v >= -1.5);
    }
}

#[test]
fn builtin_delays_stay_in_range_on_dense_grid() {
    let delays = [
        DelaySpec::inv_one_plus_abs_sin(),
        DelaySpec::inv_one_plus_abs_cos(),
        DelaySpec::new(0.7, DelayKind::Constant(0.7)).unwrap(),
    ];
    for d in &delays {
        let r = d.r();
        for i in 0..=1_000_000u32 {
            let t = f64::from(i) * 1e-3;
            let v = d.eval(t).unwrap();
            assert!(v >= 0.0 && v <= r, "lag {v} at t = {t}");
            assert!(t - v >= -r);
        }
    }
}
