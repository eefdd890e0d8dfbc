use evoform_core::classify::{CellStatus, MAX_N, MAX_P};
use evoform_core::{classify, Error, Interaction};

/// (k, column, structure, sources), transcribed by hand from the table.
const CELLS: &[(usize, usize, &str, &[&str])] = &[
    (
        3,
        3,
        "graviton",
        &["electron", "proton", "neutron", "photon"],
    ),
    (2, 2, "photon2", &["electron", "proton", "neutrino"]),
    (2, 3, "photon3", &[]),
    (1, 1, "neutrino1", &["electron", "quanta"]),
    (1, 2, "neutrino2", &[]),
    (1, 3, "neutrino3", &[]),
    (0, 0, "quanta0", &["quarks?"]),
    (0, 1, "quanta1", &[]),
    (0, 2, "quanta2", &[]),
    (0, 3, "quanta3", &[]),
];

const MATERIAL: [&str; 4] = ["electron", "proton", "neutron", "deuteron?"];
const METRIC: [(usize, &str); 4] = [
    (1, "time"),
    (2, "time+1 coord."),
    (3, "time+2 coord."),
    (4, "time+3 coord."),
];

#[test]
fn every_valid_triple_matches_the_transcription() {
    let mut seen = 0;
    for p in 0..=MAX_P {
        for k in 0..=p {
            for n in 0..=MAX_N {
                let r = classify(p, k, n).unwrap();
                let expect = CELLS.iter().find(|c| c.0 == k && c.1 == n);
                assert_eq!(r.interaction, Interaction::from_degree(k).unwrap());
                assert_eq!(r.pseudostructure_dim, n as i64 + 1 - k as i64);
                assert_eq!(r.material_particle.name, MATERIAL[n]);
                assert_eq!(r.material_particle.uncertain, MATERIAL[n].ends_with('?'));
                assert_eq!(
                    (r.metric_dimension.n, r.metric_dimension.label.as_str()),
                    METRIC[n]
                );
                match expect {
                    Some((_, _, name, sources)) => {
                        assert_eq!(r.status, CellStatus::Structure);
                        assert_eq!(r.structure.as_ref().unwrap().name, *name);
                        let got: Vec<&str> = r.sources.iter().map(|s| s.name.as_str()).collect();
                        assert_eq!(&got, sources);
                        for s in &r.sources {
                            assert_eq!(s.uncertain, s.name.ends_with('?'));
                        }
                        assert_eq!(r.uncertain, sources.iter().any(|s| s.ends_with('?')));
                    }
                    None => {
                        assert_eq!(r.status, CellStatus::NoStructure, "({p},{k},{n})");
                        assert!(r.structure.is_none());
                    }
                }
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 40);
}

#[test]
fn interaction_names_follow_degree() {
    let names: Vec<&str> = (0..=3)
        .map(|k| Interaction::from_degree(k).unwrap().name())
        .collect();
    assert_eq!(names, ["strong", "weak", "electromagnetic", "gravitation"]);
    assert!(Interaction::from_degree(4).is_none());
}

#[test]
fn out_of_range_arguments_are_rejected() {
    for (p, k, n) in [(4, 0, 0), (1, 2, 2), (0, 1, 0), (3, 0, 4)] {
        assert!(
            matches!(classify(p, k, n), Err(Error::ClassifyRange(_))),
            "({p},{k},{n})"
        );
    }
}
