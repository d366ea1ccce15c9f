mod common;

use num_rational::Rational64;
use proptest::prelude::*;
use teamform_core::dynamics::{
    build_unperturbed_chain, perturbed_transition_matrix, residual, resistance, ss_set,
    stationary_distribution,
};
use teamform_core::{
    check_assumptions, cost_thresholds, cs_set, enumerate_states, mts_set, parse_model, Instance,
    ModelFile, PayoffFn, PerturbationScheme,
};

use common::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn myopic_dynamics_settle_on_maximal_states(seed in any::<u64>()) {
        let model = random_model(seed);
        let space = enumerate_states(&model).unwrap();
        let inst = Instance::new(&model, &space).unwrap();
        prop_assert!(inst.assumptions().v0);
        let chain = build_unperturbed_chain(&inst).unwrap();
        prop_assert_eq!(mts_set(&inst), space.maximal().to_vec());
        prop_assert_eq!(&chain.absorbing, &chain.recurrent);
        prop_assert_eq!(chain.absorbing.as_slice(), space.maximal());
        let ss = ss_set(&inst).unwrap();
        prop_assert!(ss.agree());
    }

    #[test]
    fn resistances_are_consistent(seed in any::<u64>()) {
        let model = random_model(seed);
        let space = enumerate_states(&model).unwrap();
        let inst = Instance::new(&model, &space).unwrap();
        let ss = ss_set(&inst).unwrap();
        let len = |x: usize| space.state(x).len() as i64;
        for &x in &ss.absorbing {
            prop_assert_eq!(resistance(&space, x, x), 0);
            for &y in &ss.absorbing {
                let forward = resistance(&space, x, y) as i64;
                let back = resistance(&space, y, x) as i64;
                prop_assert_eq!(forward - back, len(x) - len(y));
            }
        }
        let shifted: Vec<i64> = ss
            .absorbing
            .iter()
            .map(|&x| ss.potentials.potential_of(x).unwrap() as i64 + len(x))
            .collect();
        prop_assert!(shifted.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn coalitional_stability_grows_with_cost(seed in any::<u64>()) {
        let model = random_model(seed);
        let space = enumerate_states(&model).unwrap();
        let inst = Instance::new(&model, &space).unwrap();
        let mts = mts_set(&inst);
        let mut previous: Vec<usize> = Vec::new();
        for c in [0, 1, 2, 4, 8] {
            let cs = cs_set(&inst, Rational64::new(c, 4)).unwrap();
            prop_assert!(cs.iter().all(|x| mts.contains(x)));
            prop_assert!(previous.iter().all(|x| cs.contains(x)));
            previous = cs;
        }
        let brute = Brute::new(&model);
        prop_assert_eq!(
            cs_set(&inst, Rational64::from_integer(0)).unwrap(),
            brute.to_lib(&space, &brute.cs(0.0))
        );
    }

    #[test]
    fn thresholds_scale_with_utilities(seed in any::<u64>(), k in 1i64..5) {
        let model = random_model(seed);
        let PayoffFn::Linear { v } = model.payoff().clone() else {
            return Ok(());
        };
        let scaled = model.with_payoff(PayoffFn::linear(v * k)).unwrap();
        let space = enumerate_states(&model).unwrap();
        let base = cost_thresholds(&Instance::new(&model, &space).unwrap()).unwrap();
        let times = cost_thresholds(&Instance::new(&scaled, &space).unwrap()).unwrap();
        let k = Rational64::from_integer(k);
        prop_assert_eq!(base.low_exact().map(|l| l * k), times.low_exact());
        prop_assert_eq!(base.high_exact().map(|h| h * k), times.high_exact());
    }

    #[test]
    fn unit_times_and_linear_utility_make_cs_equal_mts(seed in any::<u64>()) {
        let model = random_unit_time_linear_model(seed);
        let space = enumerate_states(&model).unwrap();
        let report = check_assumptions(&model, &space).unwrap();
        prop_assert!(report.t1 && report.holds_v2());
        let inst = Instance::new(&model, &space).unwrap();
        prop_assert_eq!(cs_set(&inst, Rational64::from_integer(0)).unwrap(), mts_set(&inst));
    }

    #[test]
    fn perturbed_chain_has_a_stationary_distribution(seed in any::<u64>(), exp in 1i32..4) {
        let model = random_model(seed);
        let space = enumerate_states(&model).unwrap();
        let inst = Instance::new(&model, &space).unwrap();
        let eps = 10f64.powi(-exp);
        let chain = perturbed_transition_matrix(&inst, eps, PerturbationScheme::UniformDestructive).unwrap();
        for row in &chain.transition {
            let sum: f64 = row.iter().map(|&(_, p)| p).sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
        }
        let pi = stationary_distribution(&chain.transition).unwrap();
        prop_assert!(residual(&chain.transition, &pi) <= 1e-10);
        prop_assert!(pi.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn model_files_round_trip(seed in any::<u64>()) {
        let model = random_model(seed);
        let text = serde_json::to_string(&ModelFile::from_model(&model)).unwrap();
        prop_assert_eq!(parse_model(&text).unwrap(), model);
    }
}
