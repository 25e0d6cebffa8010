use std::path::PathBuf;
use std::process::{Command, Output};

fn spec(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).display().to_string()
}

fn gcstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcstar")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn pair_groupoid_spectrum_has_one_block() {
    let o = gcstar(&["spectrum", &spec("pair3.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["pipeline"], "spectrum");
    assert_eq!(r["blocks"], serde_json::json!([{ "orbit": 0, "dim": 3, "multiplicity": 1 }]));
}

#[test]
fn parity_action_main_theorem() {
    let o = gcstar(&["verify-main-theorem", &spec("z4_parity.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = json(&o);
    assert_eq!(r["details"]["dual_orbits"].as_array().unwrap().len(), 2);
    assert_eq!(r["blocks"].as_array().unwrap().len(), 2);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["verdict"] == "pass"));
}

#[test]
fn counterexample_table() {
    let o = gcstar(&["counterexample", "--n-max", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap(), vec!["n", "element", "image", "distance"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    for (k, row) in rows.iter().enumerate() {
        let n: f64 = row[0].parse().unwrap();
        assert_eq!(n as usize, k + 1);
        let d: f64 = row[3].parse().unwrap();
        assert!(d <= 2.0 / n);
    }
    let o = gcstar(&["counterexample", &spec("demo.json"), "--format", "json"]);
    let r = json(&o);
    assert_eq!(r["details"]["n_max"], 10);
    assert_eq!(r["details"]["phi_up_to"], 12);
}

#[test]
fn invalid_product_is_cited() {
    let o = gcstar(&["validate", &spec("bad_mult.json"), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("axiom composability")).unwrap();
    assert!(line.contains("fail") && line.contains("(u, v)"), "{line}");
    // other commands refuse the table as input
    assert_eq!(gcstar(&["spectrum", &spec("bad_mult.json")]).status.code(), Some(3));
}

#[test]
fn csv_report_columns() {
    let o = gcstar(&["stone-von-neumann", &spec("mixed_union.json"), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("check,verdict,witness,value\n"));
}

fn clusters_and_edges(dot: &str) -> (usize, usize) {
    (dot.matches("subgraph cluster_").count(), dot.matches(" -- ").count())
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p.display().to_string()
    };
    let cot = write("cot.json", r#"{"kind":"constructor","name":"cotrivial","n":2}"#);
    let o = gcstar(&["dot", &cot]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(clusters_and_edges(&stdout(&o)), (2, 0));
    let pair = write("pair.json", r#"{"kind":"constructor","name":"pair","n":2}"#);
    let dot = stdout(&gcstar(&["dot", &pair]));
    assert_eq!(clusters_and_edges(&dot), (1, 1));
    assert_eq!(dot.matches("\"(").count(), 4, "{dot}");
    // deterministic
    assert_eq!(dot, stdout(&gcstar(&["dot", &pair])));
}

#[test]
fn dot_clusters_match_orbits() {
    let path = spec("mixed_union.json");
    let doc = gcstar_cli::parse_spec(std::path::Path::new(&path)).unwrap();
    let g = gcstar_cli::build::build_groupoid(&doc.groupoid().unwrap(), "").unwrap();
    // union-find over range and source
    let n = g.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for x in g.elements() {
        let (a, b) = (root(&mut parent, g.range(x)), root(&mut parent, g.source(x)));
        parent[a] = b;
    }
    let mut roots: Vec<usize> = g.units().iter().map(|&u| root(&mut parent, u)).collect();
    roots.sort_unstable();
    roots.dedup();
    let (clusters, _) = clusters_and_edges(&stdout(&gcstar(&["dot", &path])));
    assert_eq!(clusters, roots.len());
    assert_eq!(clusters, 4);
}

#[test]
fn exit_codes() {
    assert_eq!(gcstar(&["spectrum", "/no/such/spec.json"]).status.code(), Some(3));
    assert_eq!(gcstar(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(gcstar(&["spectrum"]).status.code(), Some(2));
    // command and spec kind do not fit
    assert_eq!(gcstar(&["unitary-check", &spec("pair3.json")]).status.code(), Some(2));
    assert_eq!(gcstar(&["verify-main-theorem", &spec("pair2_system.json")]).status.code(), Some(2));
    assert_eq!(gcstar(&["double-dual"]).status.code(), Some(2));
    assert_eq!(gcstar(&["spectrum", &spec("pair3.json"), "--tol", "-1"]).status.code(), Some(2));
    // a failing verdict
    let o = gcstar(&["morita-check", &spec("mixed_union.json")]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    let failed: Vec<_> =
        r["checks"].as_array().unwrap().iter().filter(|c| c["verdict"] == "fail").collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c["witness"].is_string()));
}

#[test]
fn schema_errors_carry_a_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let p = dir.join("bad.json");
    std::fs::write(
        &p,
        r#"{"kind":"dynamical-system","groupoid":{"kind":"constructor","name":"pair","n":2},"fibers":{"(9,9)":2}}"#,
    )
    .unwrap();
    let o = gcstar(&["describe", &p.display().to_string()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("/fibers/(9,9)"), "{err}");
}

#[test]
fn reports_are_deterministic_given_a_seed() {
    for args in [
        vec!["spectrum", "z4_parity_isotropy.json"],
        vec!["verify-crossed", "pair2_system.json"],
        vec!["morita-check", "z4_parity.json"],
        vec!["unitary-check", "z2_bundle_unitary.json"],
    ] {
        let path = spec(args[1]);
        let run = || stdout(&gcstar(&[args[0], &path, "--seed", "17"]));
        assert_eq!(run(), run(), "{args:?}");
    }
    let o = gcstar(&["spectrum", &spec("pair3.json"), "--timing"]);
    assert!(json(&o)["timing_ms"].is_number());
    assert!(json(&gcstar(&["spectrum", &spec("pair3.json")])).get("timing_ms").is_none());
}

#[test]
fn every_sample_command_passes() {
    let cases: &[&[&str]] = &[
        &["validate", "z2_table.json"],
        &["validate", "pair2_system.json"],
        &["describe", "z2_table.json"],
        &["spectrum", "pair2_system.json"],
        &["induce", "z4_parity.json", "--unit", "(0,0)", "--character", "1"],
        &["verify-crossed", "z2_bundle_unitary.json"],
        &["morita-check", "pair3.json", "--elements", "(1,1)"],
        &["stone-von-neumann", "z4_parity_isotropy.json"],
        &["invariant-ideal", "mixed_union.json", "--subset", "(1,1)#0", "(2,2)#0"],
        &["unitary-check", "z2_bundle_unitary.json"],
        &["double-dual", "--order", "16"],
    ];
    for case in cases {
        let mut args: Vec<String> = case.iter().map(|s| s.to_string()).collect();
        if args.len() > 1 && args[1].ends_with(".json") {
            args[1] = spec(&args[1]);
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = gcstar(&refs);
        assert_eq!(o.status.code(), Some(0), "{case:?}: {}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let out = dir.join("report.json");
    let o = gcstar(&["spectrum", &spec("pair3.json"), "--out", &out.display().to_string()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["pipeline"], "spectrum");
}
