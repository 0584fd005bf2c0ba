use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::population::column_mean;
use super::*;
use crate::problem::{DecisionSpace, EvalError, FnObjective, ObjectiveTerm};

fn sphere(dim: usize) -> FnObjective<impl FnMut(&[f64]) -> f64> {
    FnObjective::new(
        DecisionSpace::uniform_box(dim, -5.0, 5.0).unwrap(),
        |x: &[f64]| x.iter().map(|v| v * v).sum(),
    )
}

/// Records every evaluated vector and fails on out-of-box points.
struct Recorder<F> {
    space: DecisionSpace,
    f: F,
    seen: Vec<Vec<f64>>,
}

impl<F: FnMut(&[f64]) -> f64> Objective for Recorder<F> {
    fn space(&self) -> &DecisionSpace {
        &self.space
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<Fitness, EvalError> {
        if !self.space.contains(x) {
            return Err(EvalError::OutOfBounds {
                index: 0,
                value: f64::NAN,
            });
        }
        self.seen.push(x.to_vec());
        Ok(Fitness::new(
            vec![ObjectiveTerm::new("f", (self.f)(x), 1.0)],
            Vec::new(),
        ))
    }
}

fn fitness(v: f64) -> Fitness {
    Fitness::new(vec![ObjectiveTerm::new("f", v, 1.0)], Vec::new())
}

#[test]
fn jaya_hand_arithmetic() {
    assert_eq!(jaya(2.0, 1.0, 3.0, 0.5, 0.5), 1.0);
    assert_eq!(rao1(0.3, 1.0, 1.0, 0.9), 0.3);
}

#[test]
fn greedy_is_strict() {
    assert!(greedy_accept(5.0, 4.9));
    assert!(!greedy_accept(5.0, 5.0));
    assert!(!greedy_accept(5.0, f64::NAN));
}

#[test]
fn samp_group_rule() {
    assert_eq!(adapt_subpopulations(2, 4, true), 3);
    assert_eq!(adapt_subpopulations(1, 4, false), 1);
    assert_eq!(adapt_subpopulations(4, 4, true), 4);
    assert_eq!(adapt_subpopulations(3, 4, false), 2);
}

#[test]
fn variant_labels_round_trip() {
    for v in Variant::ALL {
        assert_eq!(v.label().parse::<Variant>().unwrap(), v);
    }
    assert_eq!("samp-jaya".parse::<Variant>().unwrap(), Variant::SampJaya);
    assert!("pso".parse::<Variant>().is_err());
}

#[test]
fn config_validation() {
    assert_eq!(
        SolverConfig::new(Variant::Jaya, 3, 10, 0).validate(),
        Err(ConfigError::Population(3))
    );
    assert_eq!(
        SolverConfig::new(Variant::Jaya, 4, 0, 0).validate(),
        Err(ConfigError::Iterations)
    );
    let mut c = SolverConfig::new(Variant::QoRao, 4, 1, 0);
    c.qo_jump_rate = 1.5;
    assert!(c.validate().is_err());
}

#[test]
fn sphere_smoke_rao1() {
    let mut solved = 0;
    for seed in 0..30 {
        let r = run(
            &mut sphere(10),
            &SolverConfig::new(Variant::Rao1, 30, 300, seed),
        )
        .unwrap();
        if r.best.total < 1e-3 {
            solved += 1;
        }
    }
    assert!(solved >= 28, "only {solved}/30 seeds reached 1e-3");
}

#[test]
fn init_is_uniform_in_box() {
    let pop = 10_000;
    let mut rec = Recorder {
        space: DecisionSpace::uniform_box(3, 0.0, 1.0).unwrap(),
        f: |x: &[f64]| x[0],
        seen: Vec::new(),
    };
    run(&mut rec, &SolverConfig::new(Variant::Jaya, pop, 1, 5)).unwrap();
    let init = &rec.seen[..pop];
    for m in column_mean(init) {
        assert!((m - 0.5).abs() < 0.02, "mean {m}");
    }
}

#[test]
fn single_iteration_curve() {
    let r = run(&mut sphere(2), &SolverConfig::new(Variant::Bmwr, 4, 1, 0)).unwrap();
    assert_eq!(r.curve.len(), 1);
    assert_eq!(r.evaluations, 8);
    assert_eq!(r.wall_ms, None);
}

#[test]
fn qo_without_jumps_costs_nothing_extra() {
    let mut c = SolverConfig::new(Variant::QoRao, 10, 20, 3);
    c.qo_jump_rate = 0.0;
    let r = run(&mut sphere(3), &c).unwrap();
    assert_eq!(r.qo_jumps, 0);
    assert_eq!(r.evaluations, 10 * 21);
    c.qo_jump_rate = 1.0;
    let r = run(&mut sphere(3), &c).unwrap();
    assert_eq!(r.qo_jumps, 20);
    assert_eq!(r.evaluations, 10 * 21 + 10 * 20);
}

#[test]
fn quasi_opposite_of_center_is_center() {
    let space = DecisionSpace::continuous(vec![-1.0, 2.0], vec![3.0, 4.0]).unwrap();
    let mut rng = crate::rng::Stream::new(0, 0);
    assert_eq!(
        quasi_opposite(&[1.0, 3.0], &space, &mut rng),
        vec![1.0, 3.0]
    );
    for _ in 0..100 {
        let q = quasi_opposite(&[3.0, 2.0], &space, &mut rng);
        assert!((-1.0..=1.0).contains(&q[0]) && (3.0..=4.0).contains(&q[1]));
    }
}

#[test]
fn elitist_merge_keeps_size_and_best_members() {
    let mut pop = Population::new(
        (0..5)
            .map(|i| (vec![i as f64], fitness(i as f64 * 2.0)))
            .collect(),
    );
    let before_max = pop.fitness(pop.worst()).total;
    pop.merge_elitist(
        (0..5)
            .map(|i| (vec![10.0 + i as f64], fitness(i as f64 * 2.0 + 1.0)))
            .collect(),
    );
    assert_eq!(pop.len(), 5);
    assert!(pop.fitness(pop.worst()).total <= before_max);
    let mut totals: Vec<f64> = (0..5).map(|i| pop.fitness(i).total).collect();
    totals.sort_by(f64::total_cmp);
    assert_eq!(totals, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
}

#[test]
fn population_tracks_best_worst_and_mean() {
    let mut rng = crate::rng::Stream::new(11, 0);
    let mut pop = Population::new(
        (0..8)
            .map(|_| {
                (
                    vec![rng.uniform(), rng.uniform() * 100.0],
                    fitness(rng.uniform()),
                )
            })
            .collect(),
    );
    for step in 0..500 {
        let i = rng.below(8);
        let x = vec![rng.uniform() * 1e3, rng.uniform() - 0.5];
        let t = if step % 7 == 0 {
            pop.best_total()
        } else {
            rng.uniform()
        };
        pop.replace(i, &x, fitness(t));
        let all: Vec<usize> = (0..8).collect();
        let totals: Vec<f64> = all.iter().map(|&k| pop.fitness(k).total).collect();
        let min = totals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(pop.best(), totals.iter().position(|&t| t == min).unwrap());
        assert_eq!(pop.worst(), totals.iter().position(|&t| t == max).unwrap());
        let xs: Vec<Vec<f64>> = all.iter().map(|&k| pop.x(k).to_vec()).collect();
        for (a, b) in pop.mean().iter().zip(column_mean(&xs)) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}

#[test]
fn evaluation_errors_carry_context() {
    let space = DecisionSpace::uniform_box(1, 0.0, 1.0).unwrap();
    struct Failing(DecisionSpace, u32);
    impl Objective for Failing {
        fn space(&self) -> &DecisionSpace {
            &self.0
        }
        fn evaluate(&mut self, _: &[f64]) -> Result<Fitness, EvalError> {
            self.1 += 1;
            if self.1 > 6 {
                Err(EvalError::Dimension {
                    expected: 0,
                    got: 0,
                })
            } else {
                Ok(fitness(1.0))
            }
        }
    }
    let err = run(
        &mut Failing(space, 0),
        &SolverConfig::new(Variant::Jaya, 4, 5, 0),
    )
    .unwrap_err();
    assert!(matches!(
        err,
        SolverError::Evaluation {
            iteration: 1,
            member: 2,
            ..
        }
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn run_invariants_hold(variant_idx in 0usize..8, seed in any::<u64>(), dim in 1usize..6, pop in 4usize..12, iters in 1usize..25) {
        let variant = Variant::ALL[variant_idx];
        let config = SolverConfig::new(variant, pop, iters, seed);
        let make = || Recorder {
            space: DecisionSpace::continuous(vec![-2.0; dim], (0..dim).map(|j| 1.0 + j as f64).collect()).unwrap(),
            f: |x: &[f64]| x.iter().enumerate().map(|(j, v)| (v - 0.3 * j as f64).powi(2)).sum(),
            seen: Vec::new(),
        };
        let mut a = make();
        let ra = run(&mut a, &config).unwrap();
        let mut b = make();
        let rb = run(&mut b, &config).unwrap();
        prop_assert_eq!(&ra, &rb);
        prop_assert_eq!(ra.curve.len(), iters);
        prop_assert!(ra.curve.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(ra.evaluations, (pop * (1 + iters)) as u64 + pop as u64 * ra.qo_jumps);
        prop_assert_eq!(a.seen.len() as u64, ra.evaluations);
        prop_assert_eq!(*ra.curve.last().unwrap(), ra.best.total);
    }

    #[test]
    fn rao1_fixed_point(point in proptest::collection::vec(-3.0f64..3.0, 1..6), seed in any::<u64>(), pop in 4usize..10) {
        let p = Population::new((0..pop).map(|_| (point.clone(), fitness(1.0))).collect());
        let space = DecisionSpace::uniform_box(point.len(), -3.0, 3.0).unwrap();
        let mut rng = crate::rng::Stream::new(seed, 0);
        let mut out = vec![0.0; point.len()];
        for i in 0..pop {
            let g = Guides { best: p.best(), worst: p.worst() };
            propose(Variant::Rao1, &p, i, &g, &space, &mut rng, &mut out);
            prop_assert_eq!(&out, &point);
        }
    }

    #[test]
    fn reinit_branch_stays_in_box(seed in any::<u64>()) {
        let space = DecisionSpace::continuous(vec![-1.0, 10.0], vec![1.0, 20.0]).unwrap();
        let p = Population::new((0..5).map(|i| (vec![0.1 * i as f64, 15.0], fitness(i as f64))).collect());
        let mut rng = crate::rng::Stream::new(seed, 0);
        let mut out = vec![0.0; 2];
        for _ in 0..50 {
            let mut probe = rng.clone();
            let r4 = probe.uniform();
            propose(Variant::Bmwr, &p, 2, &Guides { best: 0, worst: 4 }, &space, &mut rng, &mut out);
            if r4 <= 0.5 {
                prop_assert!(space.contains(&out));
            }
        }
    }
}
