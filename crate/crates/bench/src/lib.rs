//! Seeded workloads for the estimator benchmarks.

use detsynth_core::sim::{global_instance, local_instance, scenario_rng, GenConfig, GlobalInstance, LocalInstance};

/// Generator settings for a workload whose SI-state components hold at most
/// `component_length` events.
pub fn config(component_length: usize, bound: u32) -> GenConfig {
    GenConfig {
        min_states: 6,
        max_states: 8,
        min_events: 4,
        max_events: 5,
        min_sites: 3,
        max_sites: 3,
        max_run_length: 3 * component_length,
        max_component_length: component_length,
        max_cost_bound: bound,
        random_si_probability: 0.0,
        ..GenConfig::default()
    }
}

pub fn global_workload(seed: u64, count: usize, cfg: &GenConfig) -> Vec<GlobalInstance> {
    (0..count).map(|i| global_instance(cfg, &mut scenario_rng(seed, i))).collect()
}

pub fn local_workload(seed: u64, count: usize, cfg: &GenConfig) -> Vec<LocalInstance> {
    (0..count).map(|i| local_instance(cfg, &mut scenario_rng(seed, i))).collect()
}
