use std::collections::BTreeMap;

use gcstar_cli::build::{build_groupoid, build_system};
use gcstar_cli::spec::{
    ActionSpec, BundleDemoSpec, Constructor, GroupoidSpec, SpecDocument, SystemSpec, TableSpec,
};
use gcstar_cli::{parse_spec, parse_spec_str};
use proptest::prelude::*;

fn canonical_round_trip(doc: &SpecDocument) {
    let once = doc.to_canonical_json();
    let back = parse_spec_str(&once).unwrap_or_else(|e| panic!("{e}\n{once}"));
    assert_eq!(&back, doc);
    assert_eq!(back.to_canonical_json(), once);
}

#[test]
fn sample_specs_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        canonical_round_trip(&parse_spec(&path).unwrap());
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn dynamical_system_spec_parses() {
    let text = r#"{
        "kind": "dynamical-system",
        "groupoid": {"kind": "constructor", "name": "pair", "n": 2},
        "fibers": {"(1,1)": 2, "(2,2)": 2},
        "unitaries": {"(1,2)": [[[0,0],[1,0]],[[1,0],[0,0]]], "(2,1)": [[[0,0],[1,0]],[[1,0],[0,0]]]}
    }"#;
    let doc = parse_spec_str(text).unwrap();
    let SpecDocument::DynamicalSystem(s) = &doc else { panic!("{doc:?}") };
    let raw = build_system(s).unwrap();
    assert_eq!(raw.dims, vec![2, 2]);
    assert_eq!(raw.unitaries.len(), 4);
    let sys = raw.into_system().unwrap();
    assert_eq!(sys.crossed_dim(), 16);
    canonical_round_trip(&doc);
}

#[test]
fn table_with_weights_round_trips() {
    let map = |pairs: &[(&str, &str)]| pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let t = TableSpec {
        elements: vec!["e".into()],
        units: vec!["e".into()],
        range: map(&[("e", "e")]),
        source: map(&[("e", "e")]),
        inverse: map(&[("e", "e")]),
        mult: vec![["e".into(), "e".into(), "e".into()]],
        weights: Some(BTreeMap::from([("e".to_string(), 0.5)])),
    };
    let doc = SpecDocument::GroupoidTable(t);
    canonical_round_trip(&doc);
    let g = build_groupoid(&doc.groupoid().unwrap(), "").unwrap();
    assert_eq!(g.weight(0), 0.5);
    canonical_round_trip(&SpecDocument::BundleDemo(BundleDemoSpec::default()));
}

fn group() -> impl Strategy<Value = Constructor> {
    prop_oneof![
        (1usize..7).prop_map(|order| Constructor::Cyclic { order }),
        (1usize..4).prop_map(|n| Constructor::Dihedral { n }),
        (1usize..4).prop_map(|n| Constructor::Symmetric { n }),
        prop::collection::vec(1usize..4, 1..3).prop_map(|factors| Constructor::Abelian { factors }),
    ]
}

fn groupoid() -> impl Strategy<Value = GroupoidSpec> {
    let leaf = prop_oneof![
        group(),
        (1usize..4).prop_map(|n| Constructor::Pair { n }),
        (1usize..4).prop_map(|n| Constructor::Cotrivial { n }),
        (group(), group()).prop_map(|(a, b)| Constructor::GroupBundle {
            base: vec!["p".into(), "q".into()],
            fibers: vec![a, b],
        }),
        (1usize..7, 0usize..7).prop_map(|(order, g)| Constructor::Transformation {
            group: Box::new(Constructor::Cyclic { order }),
            action: ActionSpec::Cosets { generators: vec![g % order] },
        }),
    ]
    .prop_map(GroupoidSpec::Constructor);
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3)
                .prop_map(|parts| GroupoidSpec::Constructor(Constructor::DisjointUnion { parts })),
            (inner.clone(), inner).prop_map(|(l, r)| GroupoidSpec::Constructor(Constructor::Product {
                left: Box::new(l),
                right: Box::new(r),
            })),
        ]
    })
}

fn document(g: GroupoidSpec) -> SpecDocument {
    match g {
        GroupoidSpec::Constructor(c) => SpecDocument::Constructor(c),
        GroupoidSpec::GroupoidTable(t) => SpecDocument::GroupoidTable(t),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn constructor_specs_round_trip(g in groupoid()) {
        let doc = document(g.clone());
        let once = doc.to_canonical_json();
        let back = parse_spec_str(&once).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_canonical_json(), once);
        let built = build_groupoid(&g, "").unwrap();
        let again = build_groupoid(&back.groupoid().unwrap(), "").unwrap();
        prop_assert_eq!(built.digest(), again.digest());
    }

    #[test]
    fn scalar_systems_round_trip(g in groupoid()) {
        let doc = SpecDocument::DynamicalSystem(SystemSpec {
            groupoid: g,
            fibers: BTreeMap::new(),
            unitaries: BTreeMap::new(),
        });
        let once = doc.to_canonical_json();
        prop_assert_eq!(parse_spec_str(&once).unwrap(), doc);
    }
}
