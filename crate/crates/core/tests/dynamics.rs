//! Whole-ensemble behavior of the flocking dynamics.

use std::f64::consts::PI;

use proptest::prelude::*;
use so3flock::flock::{
    circle_cs_reference, dissipation_rate, energy, evolve, make_circle_ensemble, rhs, step_lie, step_rk4, Ensemble,
    Exec, Integrator, Particle, WeightFn,
};
use so3flock::so3::{exp_so3, geodesic_distance, Rotation, Vec3};

fn particle() -> impl Strategy<Value = Particle> {
    let v = || (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b, c)| Vec3::new(a, b, c));
    (v(), v()).prop_map(|(x, a)| Particle::new(exp_so3(&(x * 1.2)), a))
}

fn ensemble(n: std::ops::Range<usize>) -> impl Strategy<Value = Ensemble> {
    prop::collection::vec(particle(), n).prop_map(|ps| Ensemble::new(ps, 1.0, WeightFn::CosHalfDist).unwrap())
}

fn fixed_ensemble() -> Ensemble {
    let particles = (0..6)
        .map(|i| {
            let t = i as f64;
            Particle::new(
                exp_so3(&Vec3::new(0.4 * t.sin(), 0.7 * (1.3 * t).cos(), 0.2 * t - 0.5)),
                Vec3::new((0.9 * t).cos(), 0.5 - 0.15 * t, (2.1 * t).sin()),
            )
        })
        .collect();
    Ensemble::new(particles, 1.0, WeightFn::CosHalfDist).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_commutes_with_step((e, perm) in ensemble(2..7).prop_flat_map(|e| {
        let ids: Vec<usize> = (0..e.len()).collect();
        (Just(e), Just(ids).prop_shuffle())
    })) {
        let permuted = e.with_particles(perm.iter().map(|&k| e.particles()[k]).collect()).unwrap();
        let stepped = step_rk4(&e, 1e-2, &Exec::Serial).unwrap();
        let stepped_permuted = step_rk4(&permuted, 1e-2, &Exec::Serial).unwrap();
        for (j, &k) in perm.iter().enumerate() {
            prop_assert_eq!(stepped_permuted.particles()[j], stepped.particles()[k]);
        }
    }

    #[test]
    fn energy_never_increases(e in ensemble(2..6)) {
        let mut cur = e;
        let mut last = energy(&cur);
        for _ in 0..100 {
            cur = step_rk4(&cur, 1e-2, &Exec::Serial).unwrap();
            let now = energy(&cur);
            prop_assert!(now <= last + 1e-10);
            last = now;
        }
    }

    #[test]
    fn thread_count_does_not_change_results(e in ensemble(2..9)) {
        let pool = Exec::with_threads(3).unwrap();
        prop_assert_eq!(rhs(&e, &Exec::Serial).unwrap(), rhs(&e, &pool).unwrap());
        prop_assert_eq!(step_lie(&e, 1e-2, &Exec::Serial).unwrap(), step_lie(&e, 1e-2, &pool).unwrap());
    }
}

#[test]
fn dissipation_is_second_order_derivative_of_energy() {
    let e = fixed_ensemble();
    let d = dissipation_rate(&e).unwrap();
    let errors: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&h| {
            let fwd = energy(&evolve(&e, h, 4, &Exec::Serial).unwrap());
            let bwd = energy(&evolve(&e, -h, 4, &Exec::Serial).unwrap());
            ((fwd - bwd) / (2.0 * h) - d).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((50.0..=200.0).contains(&ratio), "ratio {ratio} from errors {errors:?}");
    }
}

#[test]
fn rk4_and_lie_converge_to_the_same_flow() {
    let e = fixed_ensemble();
    let fine = (0..400).try_fold(e.clone(), |s, _| step_rk4(&s, 2.5e-3, &Exec::Serial)).unwrap();
    let lie = (0..100).try_fold(e.clone(), |s, _| step_lie(&s, 1e-2, &Exec::Serial)).unwrap();
    for (p, q) in fine.particles().iter().zip(lie.particles()) {
        assert!(geodesic_distance(&p.r, &q.r) < 1e-8);
        assert!((p.a - q.a).amax() < 1e-8);
    }
}

#[test]
fn z_rotations_follow_the_circle_model() {
    let thetas = [0.0, 0.9, 2.0, -1.3, 3.0];
    let nus = [0.7, -0.4, 0.1, 1.2, -0.9];
    let weight = WeightFn::CosHalfDist;
    let reference = circle_cs_reference(&thetas, &nus, 1.0, &weight, 1e-3, 1000).unwrap();
    for integrator in [Integrator::Rk4Ambient, Integrator::Lie] {
        let mut e = make_circle_ensemble(&thetas, &nus, 1.0, weight.clone()).unwrap();
        for _ in 0..1000 {
            e = integrator.step(&e, 1e-3, &Exec::Serial).unwrap();
        }
        for (i, p) in e.particles().iter().enumerate() {
            let target = Rotation::about_z(reference.thetas[1000][i]);
            assert!(geodesic_distance(&p.r, &target) < 1e-9, "{integrator:?} particle {i}");
            assert!(p.a.x.abs() < 1e-12 && p.a.y.abs() < 1e-12);
            assert!((p.a.z - reference.nus[1000][i]).abs() < 1e-9);
        }
    }
}

#[test]
fn free_particles_follow_geodesics() {
    let a = Vec3::new(0.3, -0.8, 0.5);
    let r0 = exp_so3(&Vec3::new(0.2, 0.1, -0.4));
    let e = Ensemble::new(vec![Particle::new(r0, a)], 1.0, WeightFn::CosHalfDist).unwrap();
    let steps = 314;
    let dt = PI / 2.0 / steps as f64;
    let mut rk = e.clone();
    let mut lie = e;
    for _ in 0..steps {
        rk = step_rk4(&rk, dt, &Exec::Serial).unwrap();
        lie = step_lie(&lie, dt, &Exec::Serial).unwrap();
    }
    let exact = r0.compose(&exp_so3(&(a * (steps as f64 * dt))));
    assert!(geodesic_distance(&rk.particles()[0].r, &exact) < 1e-10);
    assert!(geodesic_distance(&lie.particles()[0].r, &exact) < 1e-13);
    assert_eq!(lie.particles()[0].a, a);
}
