//! Scenario generation, tampering and containment batches.

mod batch;
mod gen;
mod tamper;

pub use batch::{
    containment_batch, run_scenario, scenario_rng, ContainmentReport, ErrorModel, Failure, Mode,
    ReproBundle, ScenarioVerdict, Source,
};
pub use gen::{
    global_instance, local_instance, random_erm, random_global_erm, random_local_erms,
    random_plant, random_si_state, GenConfig, GlobalInstance, LocalInstance,
};
pub use tamper::{
    sample_run, sample_tampering, tamper_global, tamper_local, EditAction, GlobalTampering,
    LocalTampering, SampledRun, Tampering,
};

impl std::str::FromStr for Mode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "global" => Ok(Mode::Global),
            "local" => Ok(Mode::Local),
            other => Err(crate::error::Error::Invalid(format!(
                "mode must be `global` or `local`, got `{other}`"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erm::{tamper_costs, LocalErmSet};
    use crate::fixtures;
    use crate::global::estimate_global_builder;
    use crate::local::estimate_local_builder;
    use crate::oracle::{oracle_global, oracle_local, OracleCaps};

    #[test]
    fn sampled_runs_are_paths() {
        let p = fixtures::f1();
        let mut rng = scenario_rng(3, 0);
        for _ in 0..50 {
            let run = sample_run(&p, p.initial(), 4, &mut rng);
            assert!(run.events.len() <= 2);
            assert!(run.reached.contains(&run.state));
            assert_eq!(run.truncated, run.events.len() < 4);
        }
    }

    #[test]
    fn tampering_respects_matrix() {
        let p = fixtures::f1();
        let erm = fixtures::e2(&p);
        let a = p.event_id("a").unwrap();
        let mut rng = scenario_rng(11, 0);
        for _ in 0..200 {
            let t = sample_tampering(&[a], &erm, erm.bound(), &mut rng);
            assert!(t.cost <= erm.bound());
            assert!(tamper_costs(&[a], &t.received, &erm).contains(&t.cost));
        }
    }

    #[test]
    fn local_tampering_shares_budget() {
        let p = fixtures::f1();
        let erms = fixtures::l12(&p);
        let a = p.event_id("a").unwrap();
        let u = p.event_id("u").unwrap();
        let mut rng = scenario_rng(5, 2);
        for _ in 0..200 {
            let t = tamper_local(&p, &[u, a], &erms, &mut rng);
            assert!(t.cost <= erms.bound());
        }
    }

    #[test]
    fn fixture_batches_pass() {
        let p = fixtures::f1();
        let global = Source::Fixed {
            plant: p.clone(),
            errors: ErrorModel::Global(fixtures::e2(&p)),
            max_run_length: 4,
        };
        let report = containment_batch(&global, 100, 7).unwrap();
        assert!(report.all_passed(), "{:?}", report.failures);
        let local = Source::Fixed {
            plant: p.clone(),
            errors: ErrorModel::Local(fixtures::l12(&p)),
            max_run_length: 4,
        };
        assert!(containment_batch(&local, 100, 7).unwrap().all_passed());
    }

    #[test]
    fn identity_batches_have_zero_cost() {
        let config = GenConfig {
            identity_errors: true,
            ..GenConfig::default()
        };
        for mode in [Mode::Global, Mode::Local] {
            let source = Source::Generated {
                mode,
                config: config.clone(),
            };
            let report = containment_batch(&source, 100, 1).unwrap();
            assert_eq!(report.passed, 100);
            assert!(report.verdicts.iter().all(|v| v.true_cost == 0));
        }
    }

    #[test]
    fn generated_batches_pass_and_replay() {
        for mode in [Mode::Global, Mode::Local] {
            let source = Source::Generated {
                mode,
                config: GenConfig::default(),
            };
            let report = containment_batch(&source, 60, 42).unwrap();
            assert!(report.all_passed(), "{:?}", report.failures);
            assert_eq!(report, containment_batch(&source, 60, 42).unwrap());
            let (single, _) = run_scenario(&source, 42, 17).unwrap();
            assert_eq!(single, report.verdicts[17]);
        }
    }

    #[test]
    fn generated_instances_match_oracle() {
        let config = GenConfig {
            max_states: 4,
            max_events: 3,
            max_run_length: 3,
            max_component_length: 2,
            ..GenConfig::default()
        };
        let caps = OracleCaps {
            max_run_length: 8,
            ..OracleCaps::default()
        };
        for i in 0..40 {
            let mut rng = scenario_rng(9, i);
            let g = global_instance(&config, &mut rng);
            let expected = oracle_global(&g.plant, &g.erm, &g.tau, &g.q0, &caps).unwrap();
            assert_eq!(estimate_global_builder(&g.plant, &g.erm, &g.tau, &g.q0).unwrap(), expected);
            let l = local_instance(&config, &mut rng);
            let expected = oracle_local(&l.plant, &l.erms, &l.tau, &l.q0, &caps).unwrap();
            assert_eq!(estimate_local_builder(&l.plant, &l.erms, &l.tau, &l.q0).unwrap(), expected);
        }
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::default().validate().is_ok());
        let bad = GenConfig {
            error_probability: 1.5,
            ..GenConfig::default()
        };
        assert!(bad.validate().is_err());
        let empty = GenConfig {
            min_states: 3,
            max_states: 2,
            ..GenConfig::default()
        };
        assert!(empty.validate().is_err());
        let p = fixtures::f1();
        assert_eq!(LocalErmSet::identity(&p, 0).bound(), 0);
        assert!("both".parse::<Mode>().is_err());
    }
}
