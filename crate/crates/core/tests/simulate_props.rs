use memstab::model::{DelayKind, DelaySpec, HeatModelSpec, InitialSegment, TimeFunction};
use memstab::simulate::{
    brownian_increments, coarsen_increments, em_step, l2_energy, reconstruct_field, simulate_path,
    simulate_path_with_increments, HistoryBuffer, SimConfig,
};
use proptest::prelude::*;

fn cfg(dt: f64, horizon: f64) -> SimConfig {
    SimConfig {
        dt,
        horizon,
        n_paths: 2,
        output_stride: 1,
        ..Default::default()
    }
}

fn feasible_model(n_modes: usize) -> HeatModelSpec {
    let mut m = HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, n_modes);
    m.k1 = TimeFunction::exp(0.1, 1.0).unwrap();
    m.k2 = TimeFunction::exp(0.1, 1.0).unwrap();
    m.p_coeffs = vec![0.1];
    m
}

#[test]
fn pure_heat_matches_analytic_decay() {
    let m = HeatModelSpec::new(1.0, 0.0, 0.0, 1.0, 16);
    let c = cfg(1e-3, 5.0);
    let path = simulate_path(&m, &c, 0).unwrap();
    assert_eq!(path.times.len(), 5001);
    for (t, e) in path.times.iter().zip(&path.energies) {
        let exact = (-2.0 * t).exp();
        assert!((e - exact).abs() <= 0.01 * exact, "t = {t}: {e} vs {exact}");
    }
}

/// Classical RK4 on a dense grid of step `h` for the deterministic delay
/// system, with linearly interpolated history and the exact initial segment.
fn rk4_delay_oracle(
    m: &HeatModelSpec,
    phi: impl Fn(f64, usize) -> f64,
    h: f64,
    horizon: f64,
) -> Vec<f64> {
    let n = m.n_modes;
    let steps = (horizon / h).round() as usize;
    let mut hist: Vec<Vec<f64>> = vec![(0..n).map(|i| phi(0.0, i)).collect()];
    let delayed = |hist: &Vec<Vec<f64>>, s: f64, i: usize| -> f64 {
        if s <= 0.0 {
            return phi(s, i);
        }
        let x = s / h;
        let j = (x.floor() as usize).min(hist.len() - 2);
        let w = x - j as f64;
        (1.0 - w) * hist[j][i] + w * hist[j + 1][i]
    };
    let rhs = |hist: &Vec<Vec<f64>>, t: f64, x: &[f64]| -> Vec<f64> {
        let lag = m.rho.eval(t).unwrap();
        let gain = m.b1 + m.k1.eval(t).unwrap();
        (0..n)
            .map(|i| {
                let n2 = ((i + 1) * (i + 1)) as f64;
                let p = m.p_coeffs.get(i).copied().unwrap_or(0.0);
                -m.nu * n2 * x[i] + gain * delayed(hist, t - lag, i) + (-m.k * t).exp() * p
            })
            .collect()
    };
    for k in 0..steps {
        let t = k as f64 * h;
        let x = hist[k].clone();
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(u, v)| u + s * v).collect()
        };
        let k1 = rhs(&hist, t, &x);
        let k2 = rhs(&hist, t + 0.5 * h, &axpy(&x, 0.5 * h, &k1));
        let k3 = rhs(&hist, t + 0.5 * h, &axpy(&x, 0.5 * h, &k2));
        let k4 = rhs(&hist, t + h, &axpy(&x, h, &k3));
        let next = (0..n)
            .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        hist.push(next);
    }
    hist.pop().unwrap()
}

#[test]
fn deterministic_delay_system_converges_to_dense_oracle() {
    let mut m = feasible_model(3);
    m.b2 = 0.0;
    m.k2 = TimeFunction::zero();
    let start = [0.5, 0.2, 0.0];
    let end = [1.0, -0.3, 0.1];
    m.phi = InitialSegment::Linear {
        at_start: start.to_vec(),
        at_end: end.to_vec(),
    };
    let phi = |s: f64, i: usize| start[i] + (end[i] - start[i]) * (s + 1.0);
    let horizon = 2.0;
    let mut errors = Vec::new();
    for level in [7, 8, 9] {
        let dt = 2f64.powi(-level);
        let mut c = cfg(dt, horizon);
        c.retain_states = true;
        let path = simulate_path(&m, &c, 0).unwrap();
        let trace = path.trace.unwrap();
        let em = trace.state(trace.n_steps());
        let oracle = rk4_delay_oracle(&m, phi, dt / 100.0, horizon);
        let diff: Vec<f64> = em.iter().zip(&oracle).map(|(a, b)| a - b).collect();
        errors.push((l2_energy(&diff) / l2_energy(&oracle)).sqrt());
    }
    assert!(errors[2] < 1e-2, "relative error {errors:?}");
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (1.6..2.6).contains(&ratio),
            "first-order ratio {ratio} in {errors:?}"
        );
    }
}

/// RMS over paths of `|X_dt(T) − X_{dt/2}(T)|` for `dt = 2⁻⁸ … 2⁻¹²`, each
/// level driven by the same Brownian path coarsened from the finest grid.
fn refinement_gaps(n_paths: u64) -> Vec<f64> {
    let m = feasible_model(8);
    let horizon = 2.0;
    let finest = 2f64.powi(-12);
    let levels = [8, 9, 10, 11, 12];
    let mut gaps = vec![0.0; levels.len() - 1];
    for path in 0..n_paths {
        let fine = brownian_increments(77, path, (horizon / finest) as usize, finest);
        let finals: Vec<Vec<f64>> = levels
            .iter()
            .map(|&l| {
                let mut c = cfg(2f64.powi(-l), horizon);
                c.retain_states = true;
                let incs = coarsen_increments(&fine, 1 << (12 - l));
                let tr = simulate_path_with_increments(&m, &c, &incs)
                    .unwrap()
                    .trace
                    .unwrap();
                tr.state(tr.n_steps()).to_vec()
            })
            .collect();
        for (g, w) in gaps.iter_mut().zip(finals.windows(2)) {
            let d: Vec<f64> = w[0].iter().zip(&w[1]).map(|(a, b)| a - b).collect();
            *g += l2_energy(&d) / n_paths as f64;
        }
    }
    gaps.iter().map(|g| g.sqrt()).collect()
}

#[test]
fn strong_self_convergence_trend_over_ten_paths() {
    let gaps = refinement_gaps(10);
    // least-squares slope of log(gap) against refinement level
    let n = gaps.len() as f64;
    let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let slope = ys
        .iter()
        .enumerate()
        .map(|(i, y)| (i as f64 - mx) * (y - my))
        .sum::<f64>()
        / (0..gaps.len())
            .map(|i| (i as f64 - mx).powi(2))
            .sum::<f64>();
    assert!(slope < -0.2, "no decreasing trend: {gaps:?}");
    assert!(gaps[3] < gaps[0], "{gaps:?}");
}

#[test]
fn strong_self_convergence_is_monotone_with_enough_paths() {
    let gaps = refinement_gaps(200);
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "gaps not decreasing: {gaps:?}");
    }
}

#[test]
fn grid_aligned_piecewise_delay_gives_identical_paths() {
    let dt = 1.0 / 256.0;
    let horizon = 3.0;
    let m = feasible_model(6);
    let n = (horizon / dt) as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let rho_lags = times.iter().map(|t| m.rho.eval(*t).unwrap()).collect();
    let tau_lags = times.iter().map(|t| m.tau.eval(*t).unwrap()).collect();
    let mut swapped = m.clone();
    swapped.rho = DelaySpec::new(
        1.0,
        DelayKind::Table {
            times: times.clone(),
            lags: rho_lags,
        },
    )
    .unwrap();
    swapped.tau = DelaySpec::new(
        1.0,
        DelayKind::Table {
            times,
            lags: tau_lags,
        },
    )
    .unwrap();
    let mut c = cfg(dt, horizon);
    c.retain_states = true;
    for path in 0..3 {
        let a = simulate_path(&m, &c, path).unwrap();
        let b = simulate_path(&swapped, &c, path).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn history_lookups_stay_inside_window(
        lags in prop::collection::vec(0.0..1.0f64, 2..12),
        node_step in 0.05..1.0f64,
        level in 4i32..8,
    ) {
        let dt = 2f64.powi(-level);
        let times: Vec<f64> = (0..lags.len()).map(|i| i as f64 * node_step).collect();
        let mut m = HeatModelSpec::new(1.0, 0.5, 0.5, 1.0, 3);
        m.rho = DelaySpec::new(1.0, DelayKind::Table { times: times.clone(), lags: lags.clone() }).unwrap();
        m.tau = DelaySpec::new(1.0, DelayKind::Table { times, lags }).unwrap();
        let mut hist = HistoryBuffer::from_initial_segment(&m, dt);
        let mut state = hist.current().to_vec();
        let incs = brownian_increments(5, 0, (2.0 / dt) as usize, dt);
        for (k, dw) in incs.iter().enumerate() {
            let t = k as f64 * dt;
            let (lo, hi) = hist.window();
            for s in [t - m.rho.eval(t).unwrap(), t - m.tau.eval(t).unwrap()] {
                prop_assert!(s >= lo && s <= hi, "s = {s} outside [{lo}, {hi}]");
            }
            state = em_step(&state, &hist, t, dt, *dw, &m).unwrap();
            hist.push(&state);
        }
    }

    #[test]
    fn linear_history_is_interpolated_exactly(
        start in prop::collection::vec(-2.0..2.0f64, 3),
        end in prop::collection::vec(-2.0..2.0f64, 3),
        s in -1.0..0.0f64,
        level in 3i32..10,
    ) {
        let mut m = HeatModelSpec::new(1.0, 0.0, 0.0, 1.0, 3);
        m.phi = InitialSegment::Linear { at_start: start.clone(), at_end: end.clone() };
        let hist = HistoryBuffer::from_initial_segment(&m, 2f64.powi(-level));
        let got = hist.lookup(s).unwrap();
        for i in 0..3 {
            let exact = start[i] + (end[i] - start[i]) * (s + 1.0);
            prop_assert!((got[i] - exact).abs() <= 1e-13);
        }
    }

    #[test]
    fn parseval_holds_on_spatial_grid(coeffs in prop::collection::vec(-1.0..1.0f64, 1..16)) {
        let n = 512;
        let h = std::f64::consts::PI / n as f64;
        let simpson: f64 = (0..=n)
            .map(|j| {
                let w = if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
                let v = reconstruct_field(&coeffs, j as f64 * h);
                w * v * v
            })
            .sum::<f64>()
            * h
            / 3.0;
        let energy = l2_energy(&coeffs);
        prop_assume!(energy > 1e-6);
        prop_assert!((simpson - energy).abs() <= 1e-6 * energy, "{simpson} vs {energy}");
    }
}
