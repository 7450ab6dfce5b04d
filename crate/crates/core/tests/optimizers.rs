use hamflow::analysis::lyapunov_sc;
use hamflow::hamiltonian::{leapfrog_step, PhasePoint};
use hamflow::optimizers::adaptive::{MAX_STEPSIZE, MIN_STEPSIZE};
use hamflow::optimizers::{
    ada_gd_step, agd_momentum, agd_step, cagd_mixing, cagd_theta, gd_step, rhgd_step, rphd_step, run, run_observed,
    Algorithm, MomentumMode, OptimizerState, RefreshSchedule, RunOptions,
};
use hamflow::problems::{make_quadratic, Objective, Quadratic};
use hamflow::rng::RandomSource;
use hamflow::Vector;

fn unit() -> Quadratic {
    Quadratic::diagonal(&[1.0]).unwrap()
}

fn x0(d: usize, seed: u64) -> Vector {
    RandomSource::new(seed, 0).normal_vector(d)
}

// Never fires in practice: p = γh ≈ 1e-300.
fn no_refresh() -> RefreshSchedule {
    RefreshSchedule::Constant { gamma: 1e-300 }
}

#[test]
fn gd_kills_unit_quadratic_in_one_step() {
    let q = unit();
    let mut s = OptimizerState::at_rest(Vector::from_vec(vec![1.0]), 1.0);
    gd_step(&q, &mut s, 1.0).unwrap();
    assert_eq!(s.x[0], 0.0);
    assert_eq!(s.k, 1);
    assert_eq!(s.grad_evals, 1);
}

#[test]
fn gd_strongly_convex_rate() {
    let q = make_quadratic(20, 0.1, 100.0, 3).unwrap();
    let eta = 1.0 / q.smoothness();
    let x = x0(20, 1);
    let trace = run(&q, &Algorithm::Gd { eta }, &x, 500, &mut RandomSource::new(0, 0)).unwrap();
    let gap0 = trace.records[0].f_gap;
    for r in &trace.records {
        let bound = (1.0 - 0.1 * eta).powi(r.k as i32) * gap0;
        assert!(r.f_gap <= bound * (1.0 + 1e-9) + 1e-15, "k={} {} > {}", r.k, r.f_gap, bound);
        assert!(r.f_gap >= -1e-9);
    }
}

#[test]
fn gd_matches_leapfrog_from_rest() {
    let q = make_quadratic(10, 0.5, 20.0, 8).unwrap();
    let eta = 0.03;
    let mut x = x0(10, 2);
    let mut s = OptimizerState::at_rest(x.clone(), eta);
    for _ in 0..50 {
        let p = leapfrog_step(&q, &PhasePoint::at_rest(x.clone()), (2.0 * eta).sqrt()).unwrap();
        gd_step(&q, &mut s, eta).unwrap();
        assert!((&p.position - &s.x).amax() <= 1e-12);
        x = p.position;
    }
}

#[test]
fn agd_exact_one_step() {
    let q = unit();
    let beta = agd_momentum(1.0, 1.0, 0, MomentumMode::Literal);
    assert_eq!(beta, 0.0);
    let one = Vector::from_vec(vec![1.0]);
    let mut s = OptimizerState::new(one.clone(), one, 1.0);
    agd_step(&q, &mut s, 1.0, beta).unwrap();
    assert_eq!((s.x[0], s.y[0]), (0.0, 0.0));
}

#[test]
fn agd_weakly_convex_first_momentum() {
    assert_eq!(agd_momentum(0.0, 0.1, 0, MomentumMode::Literal), -0.5);
    assert_eq!(agd_momentum(0.0, 0.1, 0, MomentumMode::Clamp), 0.0);
    assert_eq!(agd_momentum(0.0, 0.1, 4, MomentumMode::Literal), 0.5);
}

#[test]
fn agd_strongly_convex_rate() {
    let (alpha, smoothness) = (0.1, 100.0);
    let q = make_quadratic(20, alpha, smoothness, 4).unwrap();
    let eta = 1.0 / smoothness;
    let x = x0(20, 5);
    let algo = Algorithm::Agd { eta, alpha, momentum: MomentumMode::Literal };
    let trace = run(&q, &algo, &x, 400, &mut RandomSource::new(0, 0)).unwrap();
    let initial = trace.records[0].f_gap + 0.5 * alpha * q.dist_sq(&x).unwrap();
    for r in &trace.records {
        let bound = (1.0 - (alpha * eta).sqrt()).powi(r.k as i32) * initial;
        assert!(r.f_gap <= bound * (1.0 + 1e-9), "k={} {} > {}", r.k, r.f_gap, bound);
    }
}

#[test]
fn cagd_weakly_convex_coefficients() {
    // T_0 = 0 gives θ_0 = 1 for any τ.
    assert_eq!(cagd_theta(0.0, 0.01, 0.7, 0.0, 0.7), 1.0);
    for tau in [0.1, 1.0, 3.0] {
        assert_eq!(cagd_mixing(0.0, 0.01, tau, 2.0).0, 0.0);
    }
    let (theta_z, eta_z) = cagd_mixing(0.25, 0.04, 2.0, 0.0);
    assert!((theta_z - 0.2f64.tanh()).abs() < 1e-15);
    assert!((eta_z - 0.4).abs() < 1e-15);
}

#[test]
fn cagd_outpaces_gd_on_strongly_convex_quadratic() {
    let (alpha, smoothness) = (0.1, 100.0);
    let q = make_quadratic(20, alpha, smoothness, 6).unwrap();
    let eta = 1.0 / smoothness;
    let x = x0(20, 7);
    let first_below = |algo: Algorithm| {
        let trace = run(&q, &algo, &x, 5000, &mut RandomSource::new(9, 1)).unwrap();
        trace.records.iter().position(|r| r.f_gap <= 1e-6).expect("reaches 1e-6")
    };
    let cagd = first_below(Algorithm::Cagd { eta, alpha });
    let gd = first_below(Algorithm::Gd { eta });
    assert!(cagd < gd, "cagd {cagd} vs gd {gd}");
}

#[test]
fn rhgd_hand_stepped_iteration() {
    let q = unit();
    let mut s = OptimizerState::at_rest(Vector::from_vec(vec![1.0]), 0.5);
    rhgd_step(&q, &mut s, 0.5, &no_refresh(), &mut RandomSource::new(1, 1)).unwrap();
    assert_eq!(s.midpoint.as_ref().unwrap()[0], 1.0);
    assert_eq!(s.x[0], 0.75);
    assert_eq!(s.velocity_before_refresh.as_ref().unwrap()[0], -0.375);
    assert_eq!(s.y[0], -0.375);
    assert!(!s.refreshed);
    assert_eq!(s.poisson_time, 0.5);
}

#[test]
fn rhgd_matches_scripted_trace() {
    // Plain scalar loop over a diagonal quadratic, drawing the same
    // Bernoulli per step.
    let lambdas = [0.2, 1.0, 3.0, 7.5];
    let q = Quadratic::diagonal(&lambdas).unwrap();
    let (h, gamma) = (0.3, 0.8);
    let schedule = RefreshSchedule::Constant { gamma };
    let start = [1.0, -2.0, 0.5, 0.25];
    let mut s = OptimizerState::at_rest(Vector::from_row_slice(&start), h);
    let mut src = RandomSource::new(42, 3);
    let mut oracle_src = RandomSource::new(42, 3);
    let (mut x, mut y) = (start, [0.0; 4]);
    for _ in 0..60 {
        rhgd_step(&q, &mut s, h, &schedule, &mut src).unwrap();
        let refresh = oracle_src.bernoulli((gamma * h).min(1.0)).unwrap();
        for j in 0..4 {
            let mid = x[j] + h * y[j];
            x[j] = mid - h * h * lambdas[j] * mid;
            y[j] = if refresh { 0.0 } else { y[j] - h * lambdas[j] * x[j] };
        }
        assert_eq!(s.refreshed, refresh);
        for j in 0..4 {
            assert!((s.x[j] - x[j]).abs() <= 1e-12 && (s.y[j] - y[j]).abs() <= 1e-12);
        }
    }
}

#[test]
fn rhgd_forced_refresh_is_gd_with_squared_step() {
    let q = make_quadratic(15, 0.2, 30.0, 11).unwrap();
    let h = 0.15;
    let schedule = RefreshSchedule::Constant { gamma: 2.0 / h };
    let x = x0(15, 3);
    let mut a = OptimizerState::at_rest(x.clone(), h);
    let mut b = OptimizerState::at_rest(x, h * h);
    let mut src = RandomSource::new(5, 5);
    for _ in 0..100 {
        rhgd_step(&q, &mut a, h, &schedule, &mut src).unwrap();
        gd_step(&q, &mut b, h * h).unwrap();
        assert!(a.refreshed);
        assert!((&a.x - &b.x).amax() <= 1e-12);
    }
    // One gradient at x_0, then one per step: the midpoint gradient is the
    // one already paid for at x_{k}.
    assert_eq!(a.grad_evals, 101);
}

#[test]
fn rphd_satisfies_implicit_update() {
    let q = make_quadratic(12, 0.3, 40.0, 13).unwrap();
    let h = 0.2;
    let schedule = RefreshSchedule::Constant { gamma: 1.0 };
    let mut s = OptimizerState::at_rest(x0(12, 4), h);
    let mut src = RandomSource::new(8, 8);
    for _ in 0..80 {
        let (x_prev, y_prev) = (s.x.clone(), s.y.clone());
        rphd_step(&q, &mut s, h, &schedule, &mut src).unwrap();
        let y_tilde = s.velocity_before_refresh.clone().unwrap();
        let g = q.gradient(&s.x).unwrap();
        assert!((&s.x - &x_prev - &y_tilde * h).amax() <= 1e-10);
        assert!((&y_tilde - &y_prev + g * h).amax() <= 1e-10);
    }
}

#[test]
fn rphd_mean_lyapunov_is_non_increasing() {
    let (alpha, smoothness) = (0.5, 50.0);
    let q = make_quadratic(10, alpha, smoothness, 21).unwrap();
    let h = 0.8 / alpha.sqrt();
    let schedule = RefreshSchedule::Constant { gamma: alpha.sqrt() };
    let algo = Algorithm::Rphd { h, schedule };
    let x = x0(10, 9);
    let (seeds, iterations) = (500, 40);
    let mut mean = vec![0.0; iterations + 1];
    for seed in 0..seeds {
        let mut values = Vec::with_capacity(iterations + 1);
        let mut src = RandomSource::new(seed, 77);
        run_observed(&q, &algo, &x, iterations, &mut src, RunOptions::default(), |s| {
            values.push(lyapunov_sc(&q, &s.x, &s.y, alpha).unwrap());
        })
        .unwrap();
        for (m, v) in mean.iter_mut().zip(values) {
            *m += v / seeds as f64;
        }
    }
    for k in 0..iterations {
        assert!(mean[k + 1] <= 1.05 * mean[k], "k={k}: {} > {}", mean[k + 1], mean[k]);
    }
}

#[test]
fn adaptive_accepts_at_stationary_point() {
    let q = make_quadratic(5, 0.5, 5.0, 2).unwrap();
    let mut s = OptimizerState::at_rest(Vector::zeros(5), 1.0);
    ada_gd_step(&q, &mut s).unwrap();
    assert!(s.accepted);
    assert!((s.stepsize - 1.1).abs() < 1e-15);
}

#[test]
fn adaptive_rejects_unstable_first_trial() {
    let q = make_quadratic(10, 1.0, 500.0, 17).unwrap();
    let x = x0(10, 6);
    // Descent condition evaluated directly on the instance.
    let g = q.gradient(&x).unwrap();
    let trial = &x - &g;
    let holds = q.value(&trial).unwrap() <= q.value(&x).unwrap() - 0.5 * g.norm_squared();
    assert!(!holds);
    let mut s = OptimizerState::at_rest(x.clone(), 1.0);
    ada_gd_step(&q, &mut s).unwrap();
    assert!(!s.accepted);
    assert_eq!(s.x, x);
    assert!((s.stepsize - 0.6).abs() < 1e-15);
}

#[test]
fn adaptive_stepsize_stays_within_guard_rails() {
    let q = make_quadratic(5, 0.5, 5.0, 2).unwrap();
    let x = x0(5, 1);
    for algo in [
        Algorithm::AdaGd { eta0: 1.0 },
        Algorithm::AdaAgd { eta0: 1.0, alpha: 0.5, momentum: MomentumMode::Literal },
        Algorithm::AdaCagd { eta0: 1.0, alpha: 0.5 },
        Algorithm::AdaRhgd { h0: 1.0, schedule: RefreshSchedule::Constant { gamma: 0.7 } },
    ] {
        let trace = run(&q, &algo, &x, 100_000, &mut RandomSource::new(3, 3)).unwrap();
        for r in &trace.records {
            assert!(r.stepsize.is_finite() && (MIN_STEPSIZE..=MAX_STEPSIZE).contains(&r.stepsize));
        }
    }
}

#[test]
fn zero_iterations_give_single_record() {
    let q = unit();
    let trace = run(&q, &Algorithm::Gd { eta: 0.1 }, &Vector::from_vec(vec![2.0]), 0, &mut RandomSource::new(0, 0))
        .unwrap();
    assert_eq!(trace.len(), 1);
    assert_eq!(trace.records[0].f_gap, 2.0);
}

#[test]
fn same_seed_same_trace() {
    let q = make_quadratic(8, 0.1, 10.0, 1).unwrap();
    let x = x0(8, 2);
    let algo = Algorithm::Rhgd { h: 0.2, schedule: RefreshSchedule::Constant { gamma: 1.0 } };
    let a = run(&q, &algo, &x, 300, &mut RandomSource::new(7, 1)).unwrap();
    let b = run(&q, &algo, &x, 300, &mut RandomSource::new(7, 1)).unwrap();
    assert_eq!(a, b);
    let c = run(&q, &algo, &x, 300, &mut RandomSource::new(8, 1)).unwrap();
    assert_ne!(a.refresh_iterations(), c.refresh_iterations());
}

#[test]
fn refresh_gaps_are_geometric() {
    let q = make_quadratic(4, 0.5, 2.0, 1).unwrap();
    let (h, gamma) = (0.5, 0.4);
    let algo = Algorithm::Rhgd { h, schedule: RefreshSchedule::Constant { gamma } };
    let trace = run(&q, &algo, &x0(4, 3), 10_000, &mut RandomSource::new(12, 0)).unwrap();
    let events = trace.refresh_iterations();
    let gaps: Vec<f64> = events.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let expected = 1.0 / (gamma * h);
    assert!((mean - expected).abs() <= 0.05 * expected, "{mean} vs {expected}");
}

#[test]
fn gradient_evaluations_per_method() {
    let q = make_quadratic(6, 0.2, 4.0, 5).unwrap();
    let x = x0(6, 8);
    let evals = |algo: Algorithm| {
        run(&q, &algo, &x, 20, &mut RandomSource::new(1, 1)).unwrap().last().unwrap().grad_evals
    };
    assert_eq!(evals(Algorithm::Gd { eta: 0.1 }), 20);
    assert_eq!(evals(Algorithm::Agd { eta: 0.1, alpha: 0.2, momentum: MomentumMode::Literal }), 20);
    assert_eq!(evals(Algorithm::Cagd { eta: 0.1, alpha: 0.2 }), 20);
    // Without refreshes the midpoint moves off x_k, so every step after the
    // first pays for two gradients.
    assert_eq!(evals(Algorithm::Rhgd { h: 0.3, schedule: no_refresh() }), 40);
}
