//! Estimation under local tampering, by system modification and by builder
//! modification.

mod builder;
mod gl;

pub use builder::{
    build_elt_synchronizer, build_elts_builder, elts_release, elts_successors,
    estimate_local_builder, extract_leto, release_list, LocalBuilderSync, LocalPairLabel,
    ReleaseList,
};
pub use gl::{
    build_gl, build_gl_with_insertions, build_go, build_ms_synchronizer, counting,
    estimate_local_system, is_silent, ms_release, project_tuple, LocalLabel, LocalRule,
    LocalSystemSync, MTuple, ModifiedPlantL, ObservationAutomaton, ObservationLabel,
};

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::erm::{CostedSequence, Erm, LocalErmSet, RawErm};
    use crate::estimate::EstimateSet;
    use crate::fixtures;
    use crate::global::{CostedSiState, CostedState};
    use crate::plant::{EventId, Plant};
    use crate::reach::Automaton;
    use crate::si_state::SiState;

    fn ev(p: &Plant, n: &str) -> EventId {
        p.event_id(n).unwrap()
    }

    fn tau(p: &Plant, comps: &[&[&str]]) -> SiState {
        SiState::new(
            p,
            comps.iter().map(|c| c.iter().map(|n| ev(p, n)).collect()).collect(),
            8,
        )
        .unwrap()
    }

    fn tuple(p: &Plant, comps: &[&str]) -> MTuple {
        comps
            .iter()
            .map(|n| (*n != "eps").then(|| ev(p, n)))
            .collect()
    }

    fn est(p: &Plant, pairs: &[(&str, u32)]) -> EstimateSet {
        pairs.iter().map(|&(q, c)| (p.state_id(q).unwrap(), c)).collect()
    }

    #[test]
    fn observation_automaton() {
        let p = fixtures::three_site_plant();
        assert_eq!(project_tuple(&p, ev(&p, "upsilon")), vec![None; 3]);
        assert_eq!(
            project_tuple(&p, ev(&p, "alpha12")),
            tuple(&p, &["alpha12", "alpha12", "eps"])
        );
        let f1 = fixtures::f1();
        let go = build_go(&f1);
        assert_eq!(go.num_transitions(), f1.num_transitions());
        let silent = go.transitions().filter(|(_, l, _)| go.observation(l).is_none()).count();
        assert_eq!(silent, 1);
    }

    #[test]
    fn gl_identity_is_go_copy() {
        let p = fixtures::f1();
        let go = build_go(&p);
        let gl = build_gl(&go, &LocalErmSet::identity(&p, 0)).unwrap();
        assert_eq!(gl.num_states(), p.num_states());
        let mut copied: Vec<_> = gl
            .transitions()
            .map(|(s, l, t)| (s.state, l.tuple.clone(), t.state, t.cost))
            .collect();
        copied.sort();
        let mut original: Vec<_> = go
            .transitions()
            .map(|(s, l, t)| (s, l.tuple.clone(), t, 0))
            .collect();
        original.sort();
        assert_eq!(copied, original);
    }

    #[test]
    fn gl_f1_moves() {
        let p = fixtures::f1();
        let gl = build_gl(&build_go(&p), &fixtures::l12(&p)).unwrap();
        let (s1, s2) = (p.state_id("s1").unwrap(), p.state_id("s2").unwrap());
        let deleted = gl.successors(CostedState::new(s1, 0)).iter().any(|(l, t)| {
            l.rule == LocalRule::Rewritten && is_silent(&l.tuple) && *t == CostedState::new(s2, 1)
        });
        assert!(deleted);
        for q in p.states() {
            let loop_b = gl.successors(CostedState::new(q, 0)).iter().any(|(l, t)| {
                l.rule == LocalRule::Inserted
                    && l.tuple == tuple(&p, &["eps", "b"])
                    && *t == CostedState::new(q, 1)
            });
            assert!(loop_b);
        }
        for (_, l, _) in gl.transitions() {
            if l.rule == LocalRule::Inserted {
                assert_eq!(l.tuple.iter().filter(|c| c.is_some()).count(), 1);
            }
        }
    }

    #[test]
    fn ms_release_examples() {
        let p = fixtures::f1();
        let t = tau(&p, &[&["a"], &["b"]]);
        assert_eq!(ms_release(&t, &tuple(&p, &["a", "b"])), Some(SiState::ending(2)));
        assert_eq!(ms_release(&t, &tuple(&p, &["eps", "b"])), Some(tau(&p, &[&["a"], &[]])));
        assert_eq!(ms_release(&t, &[Some(ev(&p, "b")), None]), None);
        assert_eq!(ms_release(&t, &[None, None]), None);
    }

    #[test]
    fn counting_examples() {
        let f1 = fixtures::f1();
        assert_eq!(counting(&SiState::ending(2)), 0);
        assert_eq!(counting(&tau(&f1, &[&["a"], &["b"]])), 2);
        let p = fixtures::three_site_plant();
        assert_eq!(counting(&tau(&p, &[&["alpha12", "beta13"], &["alpha12"], &["beta13"]])), 4);
    }

    #[test]
    fn both_methods_on_f1() {
        let p = fixtures::f1();
        let erms = fixtures::l12(&p);
        let q0 = p.initial().clone();
        let t = tau(&p, &[&[], &["b"]]);
        let expected = est(&p, &[("s0", 1), ("s1", 1)]);
        assert_eq!(estimate_local_system(&p, &erms, &t, &q0).unwrap(), expected);
        assert_eq!(estimate_local_builder(&p, &erms, &t, &q0).unwrap(), expected);

        let ur = est(&p, &[("s0", 0), ("s1", 0), ("s2", 1)]);
        let empty = SiState::ending(2);
        assert_eq!(estimate_local_system(&p, &erms, &empty, &q0).unwrap(), ur);
        assert_eq!(estimate_local_builder(&p, &erms, &empty, &q0).unwrap(), ur);
    }

    #[test]
    fn release_list_examples() {
        let f1 = fixtures::f1();
        let identity = LocalErmSet::identity(&f1, 0);
        let a = ev(&f1, "a");
        assert_eq!(release_list(&identity, 0, &[a]), BTreeSet::from([(Some(a), Some(a))]));

        let p = fixtures::three_site_plant();
        let erms = fixtures::three_site_local_erms(&p);
        let (s2, a12) = (ev(&p, "sigma2"), ev(&p, "alpha12"));
        assert_eq!(
            release_list(&erms, 1, &[s2]),
            BTreeSet::from([(Some(s2), Some(s2)), (Some(a12), Some(s2)), (Some(s2), None)])
        );
        assert_eq!(release_list(&erms, 1, &[]), BTreeSet::from([(Some(s2), None)]));
    }

    fn shared_plant() -> (Plant, LocalErmSet) {
        let p = Plant::new(
            2,
            &["x0"],
            &[("c", vec![1, 2]), ("x", vec![2])],
            &[],
            &["x0"],
        )
        .unwrap();
        let (c, x) = (ev(&p, "c"), ev(&p, "x"));
        let site1 = Erm::identity(vec![c], 1);
        let site2 = crate::erm::validate_erm(&RawErm {
            alphabet: vec![c, x],
            bound: 1,
            entries: vec![(Some(c), None, 1)],
        })
        .unwrap();
        let erms = LocalErmSet::new(&p, vec![site1, site2], 1).unwrap();
        (p, erms)
    }

    #[test]
    fn elts_release_examples() {
        let p = fixtures::f1();
        let erms = fixtures::l12(&p);
        let node = CostedSiState::new(tau(&p, &[&[], &["b"]]), 0);
        let label = LocalPairLabel::new(None, tuple(&p, &["eps", "b"]));
        assert_eq!(
            elts_release(&p, &erms, &node, &label),
            Some(CostedSiState::new(SiState::ending(2), 1))
        );

        let node = CostedSiState::new(tau(&p, &[&["a"], &["b"]]), 0);
        let label = LocalPairLabel::new(Some(ev(&p, "a")), tuple(&p, &["a", "eps"]));
        assert_eq!(
            elts_release(&p, &erms, &node, &label),
            Some(CostedSiState::new(tau(&p, &[&[], &["b"]]), 0))
        );

        let (p, erms) = shared_plant();
        let node = CostedSiState::new(tau(&p, &[&["c"], &["x"]]), 0);
        let label = LocalPairLabel::new(Some(ev(&p, "c")), tuple(&p, &["c", "eps"]));
        assert_eq!(
            elts_release(&p, &erms, &node, &label),
            Some(CostedSiState::new(tau(&p, &[&[], &["x"]]), 1))
        );
        let two_insertions = LocalPairLabel::new(None, tuple(&p, &["c", "x"]));
        assert_eq!(elts_release(&p, &erms, &node, &two_insertions), None);
    }

    #[test]
    fn leto_examples() {
        let p = fixtures::f1();
        let (a, b) = (ev(&p, "a"), ev(&p, "b"));
        let identity = LocalErmSet::identity(&p, 0);
        let builder = build_elts_builder(&p, &identity, &tau(&p, &[&["a"], &["b"]])).unwrap();
        assert_eq!(
            extract_leto(&builder, 100).items,
            BTreeSet::from([CostedSequence::new(vec![a, b], 0), CostedSequence::new(vec![b, a], 0)])
        );

        let builder = build_elts_builder(&p, &fixtures::l12(&p), &tau(&p, &[&[], &["b"]])).unwrap();
        let leto = extract_leto(&builder, 100);
        assert!(leto.complete);
        assert_eq!(
            leto.items,
            BTreeSet::from([
                CostedSequence::new(vec![], 1),
                CostedSequence::new(vec![b], 0),
                CostedSequence::new(vec![a, b], 1),
                CostedSequence::new(vec![b, a], 1),
            ])
        );
    }
}
