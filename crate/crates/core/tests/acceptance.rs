//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use detsynth_core::engine::Graph;
use detsynth_core::erm::{DEFAULT_ERRONEOUS_CAP, LocalErmSet};
use detsynth_core::global::{
    build_egt_synchronizer, build_gg, build_system_synchronizer, estimate_error_free,
    estimate_global_builder, estimate_global_system, CostedSiState,
};
use detsynth_core::local::{
    build_elt_synchronizer, build_gl, build_go, build_ms_synchronizer, estimate_local_builder,
    estimate_local_system,
};
use detsynth_core::oracle::{oracle_global, oracle_local, OracleCaps};
use detsynth_core::sim::{
    containment_batch, global_instance, local_instance, scenario_rng, GenConfig, GlobalInstance,
    LocalInstance, Mode, Source,
};
use detsynth_core::{erroneous_set, fixtures, CostedSequence, Erm, Error, SiState};

fn report(n: u32, gating: bool, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let tag = if gating { "" } else { " (non-gating)" };
    let mut err = std::io::stderr();
    writeln!(err, "criterion {n}{tag}: {verdict} - {detail}").unwrap();
    if gating {
        assert!(ok, "criterion {n} failed: {detail}");
    }
}

fn fuzz_config() -> GenConfig {
    GenConfig {
        max_states: 8,
        max_events: 5,
        max_sites: 3,
        shared_event_probability: 0.3,
        max_component_length: 4,
        max_cost_bound: 2,
        ..GenConfig::default()
    }
}

fn global_instances(seed: u64, n: usize, cfg: &GenConfig) -> Vec<GlobalInstance> {
    (0..n).map(|i| global_instance(cfg, &mut scenario_rng(seed, i))).collect()
}

fn local_instances(seed: u64, n: usize, cfg: &GenConfig) -> Vec<LocalInstance> {
    (0..n).map(|i| local_instance(cfg, &mut scenario_rng(seed, i))).collect()
}

#[test]
fn criterion_1_global_methods_agree() {
    let start = Instant::now();
    let (mut mismatches, mut nonempty) = (0, 0);
    let instances = global_instances(1001, 300, &fuzz_config());
    for g in &instances {
        let a = estimate_global_system(&g.plant, &g.erm, &g.tau, &g.q0).unwrap();
        let b = estimate_global_builder(&g.plant, &g.erm, &g.tau, &g.q0).unwrap();
        if a != b {
            mismatches += 1;
        }
        nonempty += !b.is_empty() as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        true,
        mismatches == 0 && secs < 60.0,
        &format!(
            "{} instances ({nonempty} with non-empty estimates), {mismatches} mismatches, {secs:.2}s",
            instances.len()
        ),
    );
}

#[test]
fn criterion_2_local_methods_agree() {
    let start = Instant::now();
    let (mut mismatches, mut nonempty) = (0, 0);
    let instances = local_instances(2002, 300, &fuzz_config());
    for l in &instances {
        let a = estimate_local_system(&l.plant, &l.erms, &l.tau, &l.q0).unwrap();
        let b = estimate_local_builder(&l.plant, &l.erms, &l.tau, &l.q0).unwrap();
        if a != b {
            mismatches += 1;
        }
        nonempty += !b.is_empty() as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        2,
        true,
        mismatches == 0 && secs < 120.0,
        &format!(
            "{} instances ({nonempty} with non-empty estimates), {mismatches} mismatches, {secs:.2}s",
            instances.len()
        ),
    );
}

#[test]
fn criterion_3_oracle_agrees() {
    let cfg = GenConfig {
        max_states: 6,
        max_component_length: 3,
        max_cost_bound: 2,
        ..fuzz_config()
    };
    let caps = OracleCaps {
        max_run_length: 14,
        max_component_length: 3,
        ..OracleCaps::default()
    };
    let target = 100;
    let (mut checked, mut skipped, mut mismatches) = ([0usize; 2], [0usize; 2], 0);
    let mut i = 0;
    while (checked[0] < target || checked[1] < target) && i < 10 * target {
        let mut rng = scenario_rng(3003, i);
        i += 1;
        let g = global_instance(&cfg, &mut rng);
        if checked[0] < target {
            match oracle_global(&g.plant, &g.erm, &g.tau, &g.q0, &caps) {
                Ok(expected) => {
                    checked[0] += 1;
                    let a = estimate_global_system(&g.plant, &g.erm, &g.tau, &g.q0).unwrap();
                    let b = estimate_global_builder(&g.plant, &g.erm, &g.tau, &g.q0).unwrap();
                    if a != expected || b != expected {
                        mismatches += 1;
                    }
                }
                Err(Error::Resource(_)) => skipped[0] += 1,
                Err(e) => panic!("{e}"),
            }
        }
        let l = local_instance(&cfg, &mut rng);
        if checked[1] < target {
            match oracle_local(&l.plant, &l.erms, &l.tau, &l.q0, &caps) {
                Ok(expected) => {
                    checked[1] += 1;
                    let a = estimate_local_system(&l.plant, &l.erms, &l.tau, &l.q0).unwrap();
                    let b = estimate_local_builder(&l.plant, &l.erms, &l.tau, &l.q0).unwrap();
                    if a != expected || b != expected {
                        mismatches += 1;
                    }
                }
                Err(Error::Resource(_)) => skipped[1] += 1,
                Err(e) => panic!("{e}"),
            }
        }
    }
    report(
        3,
        true,
        mismatches == 0 && checked[0] >= target && checked[1] >= target,
        &format!(
            "global {} checked ({} over oracle caps), local {} checked ({} over oracle caps), {mismatches} mismatches",
            checked[0], skipped[0], checked[1], skipped[1]
        ),
    );
}

#[test]
fn criterion_4_example_matrix() {
    let p = fixtures::three_site_plant();
    let erm = fixtures::three_site_erm(&p);
    let seq = |names: &[&str]| names.iter().map(|n| p.event_id(n).unwrap()).collect::<Vec<_>>();
    let w = seq(&["alpha12", "sigma2", "beta13", "beta13", "gamma3"]);
    let set = erroneous_set(&w, &erm, DEFAULT_ERRONEOUS_CAP).unwrap();
    let listed = [
        (seq(&["alpha12", "sigma2", "beta13", "beta13", "gamma3"]), 0),
        (seq(&["alpha12", "sigma2", "beta13", "gamma3"]), 1),
        (seq(&["alpha12", "sigma2", "beta13", "beta13", "beta13"]), 1),
        (seq(&["alpha12", "sigma2", "beta13", "beta13", "gamma3", "alpha12", "alpha12"]), 2),
    ];
    let present = listed
        .iter()
        .filter(|(s, c)| set.contains(&CostedSequence::new(s.clone(), *c)))
        .count();
    let max = set.iter().map(|m| m.cost).max().unwrap_or(0);
    report(
        4,
        true,
        present == 4 && max <= 2,
        &format!("{present}/4 listed members present, {} members, max cost {max}", set.len()),
    );
}

#[test]
fn criterion_5_identity_degenerates() {
    let cfg = GenConfig {
        identity_errors: true,
        ..fuzz_config()
    };
    let mut bad = 0;
    for i in 0..100 {
        let mut rng = scenario_rng(5005, i);
        let g = global_instance(&cfg, &mut rng);
        let plain = estimate_error_free(&g.plant, &g.tau, &g.q0).unwrap();
        let expected: BTreeSet<_> = plain.iter().map(|&q| (q, 0)).collect();
        let erm = Erm::identity(g.plant.observable_events(), 0);
        let erms = LocalErmSet::identity(&g.plant, 0);
        let outputs = [
            estimate_global_system(&g.plant, &erm, &g.tau, &g.q0).unwrap(),
            estimate_global_builder(&g.plant, &erm, &g.tau, &g.q0).unwrap(),
            estimate_local_system(&g.plant, &erms, &g.tau, &g.q0).unwrap(),
            estimate_local_builder(&g.plant, &erms, &g.tau, &g.q0).unwrap(),
        ];
        if outputs.iter().any(|o| o.iter().collect::<BTreeSet<_>>() != expected) {
            bad += 1;
        }
    }
    report(5, true, bad == 0, &format!("100 instances, {bad} differ from the error-free synchronizer"));
}

#[test]
fn criterion_6_containment() {
    let mut lines = Vec::new();
    let mut ok = true;
    for mode in [Mode::Global, Mode::Local] {
        let source = Source::Generated {
            mode,
            config: fuzz_config(),
        };
        let rep = containment_batch(&source, 500, 6006).unwrap();
        ok &= rep.all_passed();
        lines.push(format!("{mode:?} {}/{}", rep.passed, rep.count));
    }
    report(6, true, ok, &lines.join(", "));
}

fn builder_structure_ok(g: &Graph<CostedSiState, impl Sized>, tau: &SiState, bound: u32, m: usize, obs: usize) -> bool {
    let k: u128 = tau.components().iter().map(|c| c.len() as u128 + 1).product();
    let nodes_ok = (g.num_nodes() as u128) <= k * (bound as u128 + 1);
    let degree = m * (obs + 1) + obs;
    nodes_ok && (0..g.num_nodes()).all(|id| g.out_degree(id) <= degree)
}

fn costed_edges_monotone<L>(g: &Graph<CostedSiState, L>) -> bool {
    g.edges().iter().all(|e| {
        let (s, t) = (g.node(e.source), g.node(e.target));
        t.level() <= s.level() && t.cost >= s.cost && (t.level() < s.level() || t.cost > s.cost)
    })
}

fn counted_edges_decrease<L>(g: &Graph<SiState, L>) -> bool {
    g.edges()
        .iter()
        .all(|e| g.node(e.target).count() < g.node(e.source).count())
}

#[test]
fn criterion_7_structural_bounds() {
    let mut checked = 0;
    let mut bad = 0;
    for g in global_instances(7007, 300, &fuzz_config()) {
        let sync = build_egt_synchronizer(&g.plant, &g.erm, &g.tau, &g.q0).unwrap();
        checked += 1;
        if !builder_structure_ok(
            sync.graph(),
            &g.tau,
            g.erm.bound(),
            g.plant.num_sites(),
            g.plant.observable_events().len(),
        ) {
            bad += 1;
        }
    }
    report(7, true, bad == 0, &format!("{checked} E_gT-synchronizers, {bad} over the node or degree bound"));
}

#[test]
fn criterion_8_monotone_edges() {
    let mut graphs = 0;
    let mut bad = 0;
    for g in global_instances(8008, 150, &fuzz_config()) {
        let gg = build_gg(&g.plant, &g.erm).unwrap();
        let system = build_system_synchronizer(&g.plant, &gg, &g.tau, &g.q0).unwrap();
        let builder = build_egt_synchronizer(&g.plant, &g.erm, &g.tau, &g.q0).unwrap();
        graphs += 2;
        bad += !counted_edges_decrease(system.graph()) as usize;
        bad += !costed_edges_monotone(builder.graph()) as usize;
    }
    for l in local_instances(8009, 150, &fuzz_config()) {
        let gl = build_gl(&build_go(&l.plant), &l.erms).unwrap();
        let system = build_ms_synchronizer(&l.plant, &gl, &l.tau, &l.q0).unwrap();
        let builder = build_elt_synchronizer(&l.plant, &l.erms, &l.tau, &l.q0).unwrap();
        graphs += 2;
        bad += !counted_edges_decrease(system.graph()) as usize;
        bad += !costed_edges_monotone(builder.graph()) as usize;
    }
    report(8, true, bad == 0, &format!("{graphs} graphs audited, {bad} with a non-monotone edge"));
}

#[test]
fn criterion_9_five_state_example() {
    let p = fixtures::five_state_plant();
    let (tau_g, tau_l) = fixtures::five_state_observations(&p);
    let q0 = p.initial().clone();
    let global = estimate_global_builder(&p, &fixtures::three_site_erm(&p), &tau_g, &q0).unwrap();
    let local = estimate_local_builder(&p, &fixtures::three_site_local_erms(&p), &tau_l, &q0).unwrap();
    let expect_g = "{(q0, 2), (q1, 2), (q4, 0), (q4, 2)}";
    let expect_l = "{(q2, 0), (q2, 1), (q2, 2), (q3, 2), (q4, 2)}";
    let same = global == estimate_global_system(&p, &fixtures::three_site_erm(&p), &tau_g, &q0).unwrap()
        && local == estimate_local_system(&p, &fixtures::three_site_local_erms(&p), &tau_l, &q0).unwrap();
    let (got_g, got_l) = (global.format(&p), local.format(&p));
    report(
        9,
        false,
        same && got_g == expect_g && got_l == expect_l,
        &format!(
            "fitted reconstruction; global {got_g} vs reference {expect_g}; local {got_l} vs reference {expect_l}"
        ),
    );
}
