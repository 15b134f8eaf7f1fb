//! File formats and renderings.

mod export;
mod files;

pub use export::{
    gg_file, gl_file, modified_dot, sync_dot, AnySync, CostedStateName, ModifiedFile,
    ModifiedTransition, SyncEdge, SyncEstimate, SyncFile, SyncNode,
};
pub use files::{
    parse, state_set, to_canonical_json, ChainFile, ErmEntry, ErmFile, EstimateEntry,
    EstimateFile, EventDecl, LocalErmFile, PlantFile, SiStateFile, SiteErm, EPS, FORMAT_VERSION,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::fixtures;
    use crate::global::{build_egt_synchronizer, build_system_synchronizer, build_gg};
    use crate::si_state::SiState;

    #[test]
    fn minimal_plant_round_trip() {
        let text = r#"{"format_version":1,"num_sites":1,"states":["x"],"initial":["x"],"events":[],"transitions":[]}"#;
        let doc: PlantFile = parse(text).unwrap();
        let plant = doc.to_plant().unwrap();
        let back = PlantFile::from_plant(&plant);
        assert_eq!(back, doc);
        let again: PlantFile = parse(&to_canonical_json(&back)).unwrap();
        assert_eq!(again, back);
    }

    #[test]
    fn f1_round_trips() {
        let p = fixtures::f1();
        let doc = PlantFile::from_plant(&p);
        let text = to_canonical_json(&doc);
        let parsed: PlantFile = parse(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(to_canonical_json(&parsed), text);
        let erm = ErmFile::from_erm(&p, &fixtures::e2(&p));
        assert_eq!(parse::<ErmFile>(&to_canonical_json(&erm)).unwrap().to_erm(&p).unwrap(), fixtures::e2(&p));
        let local = LocalErmFile::from_erms(&p, &fixtures::l12(&p));
        assert_eq!(
            parse::<LocalErmFile>(&to_canonical_json(&local)).unwrap().to_erms(&p).unwrap(),
            fixtures::l12(&p)
        );
    }

    #[test]
    fn three_site_matrix_file() {
        let p = fixtures::three_site_plant();
        let text = r#"{
            "format_version": 1,
            "cost_bound": 2,
            "alphabet": ["alpha12", "beta13", "sigma2", "gamma3"],
            "entries": [
                {"from": "eps", "to": "alpha12", "cost": 1},
                {"from": "alpha12", "to": "sigma2", "cost": 1},
                {"from": "beta13", "to": "eps", "cost": 1},
                {"from": "gamma3", "to": "beta13", "cost": 1}
            ]
        }"#;
        let erm = parse::<ErmFile>(text).unwrap().to_erm(&p).unwrap();
        assert_eq!(erm.error_actions().len(), 4);
        assert_eq!(erm, fixtures::three_site_erm(&p));
    }

    #[test]
    fn diagnostics() {
        let p = fixtures::f1();
        let bad_site = r#"{"format_version":1,"sequences":[["b"],[]]}"#;
        let err = parse::<SiStateFile>(bad_site).unwrap().to_si_state(&p, 8).unwrap_err();
        assert!(err.to_string().contains("site 1"), "{err}");

        let bad_field = r#"{"format_version":1,"num_sites":1,"states":["x"],"initial":["x"],"events":[{"name":"e","observers":["one"]}],"transitions":[]}"#;
        match parse::<PlantFile>(bad_field) {
            Err(Error::Format { path, .. }) => assert_eq!(path, "events[0].observers[0]"),
            other => panic!("unexpected {other:?}"),
        }

        let version = r#"{"format_version":9,"sequences":[]}"#;
        assert!(matches!(
            parse::<SiStateFile>(version).unwrap().to_si_state(&p, 8),
            Err(Error::Format { .. })
        ));

        let zero = r#"{"format_version":1,"cost_bound":1,"alphabet":["a","b"],"entries":[{"from":"eps","to":"a","cost":0}]}"#;
        let err = parse::<ErmFile>(zero).unwrap().to_erm(&p).unwrap_err();
        assert!(matches!(err, Error::InvalidErm(_)));
        assert!(err.to_string().contains("[eps, a]"), "{err}");

        let dangling = r#"{"format_version":1,"num_sites":1,"states":["x"],"initial":["y"],"events":[],"transitions":[]}"#;
        assert!(matches!(
            parse::<PlantFile>(dangling).unwrap().to_plant(),
            Err(Error::UnknownState(_))
        ));
    }

    #[test]
    fn dot_shapes() {
        let p = fixtures::f1();
        let q0 = p.initial().clone();
        let gg = build_gg(&p, &fixtures::e2(&p)).unwrap();
        let single = build_system_synchronizer(&p, &gg, &SiState::ending(2), &q0).unwrap();
        let dot = AnySync::GlobalSystem(single).to_dot(&p);
        assert_eq!(dot.matches("[label=").count(), 1);

        let t = SiState::new(&p, vec![vec![p.event_id("a").unwrap()], vec![]], 8).unwrap();
        let sync = AnySync::GlobalBuilder(build_egt_synchronizer(&p, &fixtures::e2(&p), &t, &q0).unwrap());
        let doc = sync.to_file(&p);
        let ending: Vec<usize> = doc.nodes.iter().filter(|n| n.ending).map(|n| n.id).collect();
        let dot = sync.to_dot(&p);
        assert_eq!(dot.matches("doublecircle").count(), ending.len());
        for id in ending {
            assert!(dot.contains(&format!("n{id} [label=")));
        }
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("\\n{") && !dot.contains("\\\\n"));
        assert_eq!(dot, sync.to_dot(&p));
        let parsed: SyncFile = parse(&to_canonical_json(&doc)).unwrap();
        assert_eq!(parsed, doc);
    }
}
