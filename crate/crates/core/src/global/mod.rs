//! Estimation under global tampering, by system modification and by builder
//! modification.

mod builder;
mod gg;

pub use builder::{
    build_egt_synchronizer, build_egts_builder, egts_release, egts_successors, ending_estimates,
    estimate_global_builder, extract_geto, CostedSiState, GlobalBuilderSync, PairLabel,
};
pub use gg::{
    build_gg, build_plain_synchronizer, build_system_synchronizer, estimate_error_free,
    estimate_global_system, CostedState, GlobalLabel, GlobalRule, GlobalSystemSync,
    ModifiedPlantG, PlainSync,
};

pub(crate) use gg::check_inputs;

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::erm::{tamper_costs, CostedSequence, Erm};
    use crate::estimate::EstimateSet;
    use crate::fixtures;
    use crate::plant::{EventId, Plant, StateSet};
    use crate::reach::Automaton;
    use crate::si_state::{enumerate_to_sequences, SiState};

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

    fn est(p: &Plant, pairs: &[(&str, u32)]) -> EstimateSet {
        pairs.iter().map(|&(q, c)| (p.state_id(q).unwrap(), c)).collect()
    }

    fn q0(p: &Plant) -> StateSet {
        p.initial().clone()
    }

    #[test]
    fn gg_identity_is_plant_copy() {
        let p = fixtures::f1();
        let gg = build_gg(&p, &Erm::identity(p.observable_events(), 0)).unwrap();
        assert_eq!(gg.num_states(), p.num_states());
        let mut copied: Vec<_> = gg
            .transitions()
            .map(|(s, l, t)| (s.state, l.original.unwrap(), t.state, s.cost + t.cost))
            .collect();
        copied.sort();
        let mut original: Vec<_> = p.transitions().map(|(s, e, t)| (s, e, t, 0)).collect();
        original.sort();
        assert_eq!(copied, original);
    }

    #[test]
    fn gg_f1_e2() {
        let p = fixtures::f1();
        let gg = build_gg(&p, &fixtures::e2(&p)).unwrap();
        assert!(gg.num_states() <= 6);
        let s0 = p.state_id("s0").unwrap();
        let insertion = gg.successors(CostedState::new(s0, 0)).iter().any(|(l, t)| {
            l.rule == GlobalRule::Inserted
                && l.received == Some(ev(&p, "a"))
                && *t == CostedState::new(s0, 1)
        });
        assert!(insertion);
        for (s, l, t) in gg.transitions() {
            let delta = match l.rule {
                GlobalRule::Silent => 0,
                GlobalRule::Received => fixtures::e2(&p).cost(l.original, l.received).unwrap(),
                GlobalRule::Inserted => fixtures::e2(&p).cost(None, l.received).unwrap(),
            };
            assert_eq!(t.cost, s.cost + delta);
            assert!(t.cost <= 1);
        }
    }

    #[test]
    fn gg_rejects_alphabet_mismatch() {
        let p = fixtures::f1();
        let erm = Erm::identity(vec![ev(&p, "a")], 0);
        assert!(build_gg(&p, &erm).unwrap_err().is_validation());
    }

    #[test]
    fn both_methods_on_f1() {
        let p = fixtures::f1();
        let erm = fixtures::e2(&p);
        let t = tau(&p, &[&["a"], &[]]);
        let expected = est(&p, &[("s2", 0), ("s0", 1), ("s1", 1)]);
        assert_eq!(estimate_global_system(&p, &erm, &t, &q0(&p)).unwrap(), expected);
        assert_eq!(estimate_global_builder(&p, &erm, &t, &q0(&p)).unwrap(), expected);

        let empty = SiState::ending(2);
        let ur = est(&p, &[("s0", 0), ("s1", 0)]);
        assert_eq!(estimate_global_system(&p, &erm, &empty, &q0(&p)).unwrap(), ur);
        assert_eq!(estimate_global_builder(&p, &erm, &empty, &q0(&p)).unwrap(), ur);

        let unexplained = tau(&p, &[&["a", "a", "a"], &[]]);
        assert!(estimate_global_system(&p, &erm, &unexplained, &q0(&p)).unwrap().is_empty());
        assert!(estimate_global_builder(&p, &erm, &unexplained, &q0(&p)).unwrap().is_empty());
    }

    #[test]
    fn builder_ending_nodes() {
        let p = fixtures::f1();
        let sync = build_egt_synchronizer(&p, &fixtures::e2(&p), &tau(&p, &[&["a"], &[]]), &q0(&p))
            .unwrap();
        let ending = |c| CostedSiState::new(SiState::ending(2), c);
        let states = |names: &[&str]| -> BTreeSet<_> {
            names.iter().map(|n| p.state_id(n).unwrap()).collect()
        };
        assert_eq!(sync.estimate_of(&ending(0)), Some(&states(&["s2"])));
        assert_eq!(sync.estimate_of(&ending(1)), Some(&states(&["s0", "s1"])));
        let ends = sync.graph().nodes().iter().filter(|n| n.tau.is_ending()).count();
        assert_eq!(ends, 2);
    }

    #[test]
    fn release_examples() {
        let p = fixtures::f1();
        let erm = fixtures::e2(&p);
        let (a, b) = (ev(&p, "a"), ev(&p, "b"));
        let node = CostedSiState::new(tau(&p, &[&["a"], &[]]), 0);
        assert_eq!(
            egts_release(&p, &erm, &node, PairLabel::new(Some(a), Some(a))),
            Some(CostedSiState::new(SiState::ending(2), 0))
        );
        assert_eq!(
            egts_release(&p, &erm, &node, PairLabel::new(Some(b), None)),
            Some(CostedSiState::new(node.tau.clone(), 1))
        );
        let spent = CostedSiState::new(node.tau.clone(), 1);
        assert_eq!(egts_release(&p, &erm, &spent, PairLabel::new(Some(b), None)), None);
        assert_eq!(egts_release(&p, &erm, &node, PairLabel::new(None, None)), None);
    }

    #[test]
    fn geto_examples() {
        let p = fixtures::f1();
        let (a, b) = (ev(&p, "a"), ev(&p, "b"));
        let empty = SiState::ending(2);
        let identity = Erm::identity(p.observable_events(), 0);
        let builder = build_egts_builder(&p, &identity, &empty).unwrap();
        let geto = extract_geto(&builder, 100);
        assert!(geto.complete);
        assert_eq!(geto.items, BTreeSet::from([CostedSequence::new(vec![], 0)]));

        let erm = fixtures::e2(&p);
        let t = tau(&p, &[&["a"], &[]]);
        let builder = build_egts_builder(&p, &erm, &t).unwrap();
        let geto = extract_geto(&builder, 100);
        assert_eq!(
            geto.items,
            BTreeSet::from([
                CostedSequence::new(vec![a], 0),
                CostedSequence::new(vec![a, b], 1),
                CostedSequence::new(vec![b, a], 1),
                CostedSequence::new(vec![], 1),
            ])
        );
        let tos = enumerate_to_sequences(&p, &t, 8).unwrap();
        for member in &geto.items {
            assert!(tos
                .iter()
                .any(|wr| tamper_costs(&member.seq, wr, &erm).contains(&member.cost)));
        }
    }

    #[test]
    fn three_site_monotone_builder() {
        let p = fixtures::three_site_plant();
        let erm = fixtures::three_site_erm(&p);
        let t = tau(
            &p,
            &[
                &["alpha12", "beta13", "alpha12", "beta13", "beta13"],
                &["alpha12", "sigma2", "alpha12"],
                &["beta13", "beta13", "beta13"],
            ],
        );
        let builder = build_egts_builder(&p, &erm, &t).unwrap();
        for edge in builder.edges() {
            let (s, d) = (builder.node(edge.source), builder.node(edge.target));
            assert!(d.cost >= s.cost);
            for site in 0..3 {
                assert!(d.tau.component(site).len() <= s.tau.component(site).len());
            }
        }
        let marked = builder.nodes().iter().filter(|n| n.tau.is_ending()).count();
        assert!(marked > 0);
    }
}
