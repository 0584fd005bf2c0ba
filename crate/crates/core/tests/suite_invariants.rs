use graphopt_core::problem::Objective;
use graphopt_core::rng::Stream;
use graphopt_core::solver::{run, SolverConfig, Variant};
use graphopt_core::suite::{
    generate, inject_disruption, DisruptionSpec, Model, OracleOutcome, ProblemId, Scale,
};

#[test]
fn every_problem_regenerates_identically_at_both_scales() {
    for id in ProblemId::ALL {
        for scale in [Scale::Small, Scale::Medium] {
            let a = generate(id, scale, 21).unwrap();
            let b = generate(id, scale, 21).unwrap();
            assert_eq!(a.spec, b.spec, "{id} {scale}");
            assert_eq!(a.space(), b.space());
            let x: Vec<f64> = a.space().center();
            let fa = a.objective().evaluate(&x).unwrap();
            let fb = b.objective().evaluate(&x).unwrap();
            assert_eq!(fa.total.to_bits(), fb.total.to_bits(), "{id} {scale}");
        }
    }
}

#[test]
fn no_run_beats_a_selection_oracle() {
    for id in [ProblemId::P1, ProblemId::P2, ProblemId::P4, ProblemId::P6] {
        for seed in 0..3 {
            let inst = generate(id, Scale::Small, seed).unwrap();
            let OracleOutcome::Optimum { value, .. } = inst.solve_oracle().unwrap() else {
                panic!("{id} has no oracle");
            };
            for v in [Variant::Bmwr, Variant::Jaya, Variant::Rao1] {
                let r = run(&mut inst.objective(), &SolverConfig::new(v, 20, 40, seed)).unwrap();
                assert!(r.best.total >= value, "{id} {v:?} beat the oracle");
            }
        }
    }
}

#[test]
fn halving_capacity_never_lowers_the_optimum() {
    for seed in 0..20 {
        let inst = generate(ProblemId::P3, Scale::Small, seed).unwrap();
        let base = inst.solve_oracle().unwrap().value().unwrap();
        for d in 0..3 {
            let mut spec = DisruptionSpec::ports(d);
            spec.fraction = [0.3, 0.5, 1.0][d as usize];
            let hit = inject_disruption(&inst, spec).unwrap();
            let after = hit.solve_oracle().unwrap().value().unwrap();
            assert!(after >= base - 1e-9 * base, "seed {seed}: {after} < {base}");
        }
    }
}

#[test]
fn efficacy_is_one_exactly_when_no_gene_confers_resistance() {
    for seed in 0..10 {
        let inst = generate(ProblemId::P6, Scale::Small, seed).unwrap();
        let Some(Model::Coverage(c)) = inst.binding.model() else {
            unreachable!()
        };
        for (s, row) in c.efficacy.iter().enumerate() {
            for &e in row {
                assert!(e > 0.0 && e <= 1.0);
            }
            let ones = row.iter().filter(|&&e| e == 1.0).count();
            let nonzero_burden = c.burden[s] > 0.0;
            assert_eq!(ones < row.len(), nonzero_burden);
        }
    }
}

#[test]
fn medium_instances_bind() {
    let mut rng = Stream::new(3, 0);
    for id in ProblemId::ALL {
        let inst = generate(id, Scale::Medium, 2).unwrap();
        let space = inst.space().clone();
        let x: Vec<f64> = (0..space.dim())
            .map(|d| rng.range(space.lower()[d], space.upper()[d]))
            .collect();
        assert!(inst.objective().evaluate(&x).unwrap().total.is_finite());
        if matches!(id, ProblemId::P1 | ProblemId::P4 | ProblemId::P6) {
            assert!(matches!(
                inst.solve_oracle().unwrap(),
                OracleOutcome::Unavailable(_)
            ));
        }
    }
}
