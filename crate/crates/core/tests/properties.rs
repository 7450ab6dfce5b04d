use hamflow::hamiltonian::{energy, exact_flow_quadratic, leapfrog_step, PhasePoint};
use hamflow::optimizers::{run, Algorithm, MomentumMode, RefreshSchedule};
use hamflow::problems::{make_logistic, make_quadratic, Objective};
use hamflow::rng::RandomSource;
use hamflow::Vector;
use proptest::prelude::*;

fn vector(d: usize, seed: u64, scale: f64) -> Vector {
    RandomSource::new(seed, 99).normal_vector(d) * scale
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flow_conserves_energy(d in 2usize..12, seed: u64, wc: bool, t in 0.0f64..10.0) {
        let alpha = if wc { 0.0 } else { 0.1 };
        let q = make_quadratic(d, alpha, 50.0, seed).unwrap();
        let p = PhasePoint::new(vector(d, seed, 1.0), vector(d, seed ^ 1, 1.0)).unwrap();
        let h0 = energy(&q, &p).unwrap();
        let h1 = energy(&q, &exact_flow_quadratic(q.spectrum_ref(), &p, t).unwrap()).unwrap();
        prop_assert!((h1 - h0).abs() / h0.max(1.0) <= 1e-10);
    }

    #[test]
    fn flow_composes(d in 2usize..10, seed: u64, s in 0.0f64..5.0, t in 0.0f64..5.0) {
        let q = make_quadratic(d, 0.0, 20.0, seed).unwrap();
        let spec = q.spectrum_ref();
        let p = PhasePoint::new(vector(d, seed, 1.0), vector(d, seed ^ 2, 1.0)).unwrap();
        let once = exact_flow_quadratic(spec, &p, s + t).unwrap();
        let twice = exact_flow_quadratic(spec, &exact_flow_quadratic(spec, &p, s).unwrap(), t).unwrap();
        prop_assert!((&once.position - &twice.position).amax() <= 1e-10);
        prop_assert!((&once.velocity - &twice.velocity).amax() <= 1e-10);
    }

    #[test]
    fn flow_is_time_reversible(d in 2usize..10, seed: u64, t in 0.0f64..10.0) {
        let q = make_quadratic(d, 0.05, 20.0, seed).unwrap();
        let spec = q.spectrum_ref();
        let p = PhasePoint::new(vector(d, seed, 1.0), vector(d, seed ^ 3, 1.0)).unwrap();
        let mut mid = exact_flow_quadratic(spec, &p, t).unwrap();
        mid.velocity = -mid.velocity;
        let back = exact_flow_quadratic(spec, &mid, t).unwrap();
        prop_assert!((&back.position - &p.position).amax() <= 1e-10);
        prop_assert!((&back.velocity + &p.velocity).amax() <= 1e-10);
    }

    #[test]
    fn leapfrog_is_reversible(d in 2usize..10, seed: u64, h in 0.01f64..0.2) {
        let q = make_quadratic(d, 0.1, 10.0, seed).unwrap();
        let p = PhasePoint::new(vector(d, seed, 1.0), vector(d, seed ^ 4, 1.0)).unwrap();
        let mut mid = leapfrog_step(&q, &p, h).unwrap();
        mid.velocity = -mid.velocity;
        let back = leapfrog_step(&q, &mid, h).unwrap();
        prop_assert!((&back.position - &p.position).amax() <= 1e-12);
        prop_assert!((&back.velocity + &p.velocity).amax() <= 1e-12);
    }

    #[test]
    fn flow_from_rest_descends_by_kinetic_energy(d in 2usize..10, seed: u64, t in 0.0f64..3.0) {
        let q = make_quadratic(d, 0.1, 30.0, seed).unwrap();
        let x = vector(d, seed, 1.0);
        let end = exact_flow_quadratic(q.spectrum_ref(), &PhasePoint::at_rest(x.clone()), t).unwrap();
        let drop = q.value(&x).unwrap() - q.value(&end.position).unwrap();
        prop_assert!((drop - 0.5 * end.velocity.norm_squared()).abs() <= 1e-10 * q.value(&x).unwrap().max(1.0));
    }

    #[test]
    fn quadratic_respects_declared_curvature(d in 2usize..16, seed: u64, alpha in 0.0f64..1.0) {
        let smoothness = 1.0 + 100.0 * (seed % 7) as f64;
        let q = make_quadratic(d, alpha, smoothness, seed).unwrap();
        let a = q.dense();
        for i in 0..10u64 {
            let x = vector(d, seed.wrapping_add(i), 1.0);
            let curv = x.dot(&(a * &x));
            let n2 = x.norm_squared();
            prop_assert!(curv >= alpha * n2 * (1.0 - 1e-10) - 1e-12);
            prop_assert!(curv <= smoothness * n2 * (1.0 + 1e-10));
            prop_assert!(q.value(&x).unwrap() >= 0.0);
        }
        prop_assert_eq!(q.min_value(), Some(0.0));
        prop_assert_eq!(q.value(q.minimizer().unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_gradient_is_linear(d in 2usize..16, seed: u64) {
        let q = make_quadratic(d, 0.01, 100.0, seed).unwrap();
        let (x, y) = (vector(d, seed, 1.0), vector(d, seed ^ 5, 1.0));
        let lhs = q.gradient(&(&x + &y)).unwrap();
        let rhs = q.gradient(&x).unwrap() + q.gradient(&y).unwrap();
        prop_assert!((lhs - rhs).amax() <= 1e-12 * 100.0);
    }

    #[test]
    fn quadratic_prox_first_order_condition(d in 2usize..12, seed: u64, w in 1e-4f64..10.0) {
        let q = make_quadratic(d, 0.0, 50.0, seed).unwrap();
        let c = vector(d, seed, 3.0);
        let y = q.prox(&c, w).unwrap();
        let r = q.gradient(&y).unwrap() + (&y - &c) / w;
        prop_assert!(r.amax() <= 1e-10 * (1.0 + c.amax() / w));
    }

    #[test]
    fn generation_is_deterministic(d in 2usize..10, seed: u64) {
        let a = make_quadratic(d, 0.1, 10.0, seed).unwrap();
        let b = make_quadratic(d, 0.1, 10.0, seed).unwrap();
        prop_assert_eq!(&a.spectrum_ref().basis, &b.spectrum_ref().basis);
        prop_assert_eq!(&a.spectrum_ref().eigenvalues, &b.spectrum_ref().eigenvalues);
    }

    #[test]
    fn optimizer_runs_are_deterministic(seed: u64, stream: u64, pick in 0usize..5) {
        let q = make_quadratic(6, 0.1, 10.0, 3).unwrap();
        let x = vector(6, 1, 1.0);
        let algo = [
            Algorithm::Gd { eta: 0.1 },
            Algorithm::Agd { eta: 0.1, alpha: 0.1, momentum: MomentumMode::Literal },
            Algorithm::Cagd { eta: 0.1, alpha: 0.1 },
            Algorithm::Rhgd { h: 0.3, schedule: RefreshSchedule::Constant { gamma: 0.5 } },
            Algorithm::AdaRhgd { h0: 1.0, schedule: RefreshSchedule::weakly_convex() },
        ][pick];
        let a = run(&q, &algo, &x, 50, &mut RandomSource::new(seed, stream)).unwrap();
        let b = run(&q, &algo, &x, 50, &mut RandomSource::new(seed, stream)).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn logistic_is_convex_along_segments(seed in 0u64..1000) {
        let l = make_logistic(6, 40, 1e-3, 0.1, seed).unwrap();
        let mut src = RandomSource::new(seed, 5);
        for _ in 0..20 {
            let (a, b) = (src.normal_vector(6) * 3.0, src.normal_vector(6) * 3.0);
            let mid = (&a + &b) * 0.5;
            let avg = 0.5 * (l.value(&a).unwrap() + l.value(&b).unwrap());
            prop_assert!(l.value(&mid).unwrap() <= avg + 1e-12);
        }
    }

    #[test]
    fn logistic_prox_first_order_condition(seed in 0u64..1000, w in 1e-3f64..10.0) {
        let l = make_logistic(6, 40, 1e-3, 0.1, seed).unwrap();
        let c = RandomSource::new(seed, 6).normal_vector(6);
        let y = l.prox(&c, w).unwrap();
        let r = l.gradient(&y).unwrap() + (&y - &c) / w;
        prop_assert!(r.norm() <= 1e-10);
    }

    #[test]
    fn logistic_gradient_matches_differences(seed in 0u64..1000) {
        let l = make_logistic(5, 30, 1e-2, 0.1, seed).unwrap();
        let x = RandomSource::new(seed, 7).normal_vector(5);
        let g = l.gradient(&x).unwrap();
        let step = 1e-6;
        for j in 0..5 {
            let mut e = Vector::zeros(5);
            e[j] = step;
            let fd = (l.value(&(&x + &e)).unwrap() - l.value(&(&x - &e)).unwrap()) / (2.0 * step);
            prop_assert!(rel(fd, g[j]) <= 1e-5, "coordinate {}: {} vs {}", j, fd, g[j]);
        }
    }
}
