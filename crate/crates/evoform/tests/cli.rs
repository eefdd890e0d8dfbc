use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn evoform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evoform"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn docs(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/examples")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn exact_equilibrium_is_identical() {
    let v = json(&evoform(&["analyze", "exact-equilibrium"]));
    assert_eq!(v["verdict"]["verdict"], "IDENTICAL");
    assert_eq!(v["cascade"]["outcome"], "COMPLETED");
}

#[test]
fn shear_is_nonidentical_and_realized_on_e3_lines() {
    let dir = tempfile::tempdir().unwrap();
    let traces = dir.path().join("t.csv");
    let o = evoform(&[
        "analyze",
        "shear-nonidentity",
        "--traces",
        traces.to_str().unwrap(),
    ]);
    let v = json(&o);
    assert_eq!(v["verdict"]["verdict"], "NONIDENTICAL");
    let step = &v["cascade"]["steps"][0];
    assert_eq!(step["k"], 1);
    assert_eq!(step["realized"], true);
    assert_eq!(step["traced_dim"], 1);
    let cls = v["classifications"].as_array().unwrap();
    assert!(cls.iter().any(|c| c["k"] == 1
        && c["interaction"] == "weak"
        && c["structure"]["name"] == "neutrino3"));

    let mut rdr = csv::Reader::from_path(&traces).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["k", "trace", "node", "s", "x1", "x2", "x3"]);
    for rec in rdr.records() {
        let rec = rec.unwrap();
        assert_eq!(&rec[4], "0");
        assert_eq!(&rec[5], "0.25");
    }
}

#[test]
fn torsion_flips_the_verdict() {
    let v = json(&evoform(&["analyze", "torsion-nonclosure"]));
    assert_eq!(v["verdict"]["verdict"], "NONIDENTICAL");
}

#[test]
fn nondegenerate_heat_form_has_no_realization() {
    let v = json(&evoform(&["analyze", "entropy-ideal-gas"]));
    assert_eq!(v["verdict"]["verdict"], "NONIDENTICAL");
    assert_eq!(v["cascade"]["outcome"], "NO-REALIZATION");
    assert_eq!(v["classifications"], serde_json::json!([]));
}

#[test]
fn closure_checks() {
    let v = json(&evoform(&["check-closure", "maxwell-plane-wave"]));
    assert_eq!(v["closure"]["closed"], true);
    assert!(v["closure"]["max_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["closure"]["companion"]["label"], "^*theta^2");
    assert_eq!(v["closure"]["companion"]["closed"], true);

    let v = json(&evoform(&["check-closure", &docs("not-closed.json")]));
    assert_eq!(v["closure"]["closed"], false);
    assert_eq!(
        v["closure"]["components"][0]["indices"],
        serde_json::json!([1, 2, 3])
    );
    assert_eq!(v["closure"]["components"][0]["max_abs"], 1.0);
    assert_eq!(v["closure"]["companion"], Value::Null);

    let v = json(&evoform(&["check-closure", &docs("zero-form.json")]));
    assert_eq!(v["closure"]["closed"], true);
}

#[test]
fn classify_command() {
    let v = json(&evoform(&["classify", "--p", "2", "--k", "1", "--n", "2"]));
    assert_eq!(v["interaction"], "weak");
    assert_eq!(v["structure"]["name"], "neutrino2");

    let v = json(&evoform(&["classify", "--p", "0", "--k", "0", "--n", "0"]));
    assert_eq!(v["interaction"], "strong");
    assert_eq!(v["structure"]["name"], "quanta0");
    assert_eq!(v["sources"][0]["name"], "quarks?");
    assert_eq!(v["sources"][0]["uncertain"], true);

    for args in [
        ["--p", "1", "--k", "2", "--n", "2"],
        ["--p", "-1", "--k", "0", "--n", "0"],
    ] {
        let mut a = vec!["classify"];
        a.extend(args);
        assert_eq!(evoform(&a).status.code(), Some(5));
    }
}

#[test]
fn exit_codes() {
    let o = evoform(&["analyze", "/definitely/missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(
        evoform(&["analyze", "no-such-scenario"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"schema_version":1,"name":"b","kind":"balance","chart":{"dimension":2,"domain":[[0,1],[0,1]]},"balance":{"p":1,"energy":"x1","momentum":[3]}}"#,
    )
    .unwrap();
    let o = evoform(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/balance/momentum/0"));

    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        evoform(&["analyze", bad.to_str().unwrap()]).status.code(),
        Some(3)
    );

    let small = dir.path().join("small.json");
    std::fs::write(
        &small,
        r#"{"schema_version":1,"name":"s","kind":"closure","chart":{"dimension":2,"domain":[[0,1],[0,1]]},
            "form":{"degree":1,"entries":[{"indices":[1],"coeff":"x2"}]},
            "sample_plan":{"random":{"count":5,"seed":0}}}"#,
    )
    .unwrap();
    let o = evoform(&["analyze", small.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exterior"));

    assert_eq!(
        evoform(&["analyze", "shear-nonidentity", "--format", "xml"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(evoform(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn seeds_are_recorded_and_change_samples() {
    let a = json(&evoform(&["analyze", "shear-nonidentity", "--seed", "1"]));
    let b = json(&evoform(&["analyze", "shear-nonidentity", "--seed", "2"]));
    assert_eq!(a["seed"], 1);
    assert_eq!(b["seed"], 2);
    assert_ne!(a["verdict"]["argmax_point"], b["verdict"]["argmax_point"]);
    let again = evoform(&["analyze", "shear-nonidentity", "--seed", "1"]);
    assert_eq!(serde_json::from_slice::<Value>(&again.stdout).unwrap(), a);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = evoform(&[
        "analyze",
        "exact-equilibrium",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["scenario"], "exact-equilibrium");
}

#[test]
fn text_format() {
    let o = evoform(&["analyze", "shear-nonidentity", "--format", "text"]);
    let t = String::from_utf8(o.stdout).unwrap();
    assert!(t.contains("verdict NONIDENTICAL"));
    assert!(t.contains("weak neutrino3"));
}

#[test]
fn scenario_listing() {
    let names = |args: &[&str]| -> Vec<String> {
        let v = json(&evoform(args));
        v.as_array()
            .unwrap()
            .iter()
            .map(|e| e["name"].as_str().unwrap().to_string())
            .collect()
    };
    let bundled = names(&["scenarios"]);
    for n in [
        "exact-equilibrium",
        "shear-nonidentity",
        "torsion-nonclosure",
        "maxwell-plane-wave",
        "poincare-invariant",
    ] {
        assert!(bundled.iter().any(|b| b == n), "{n}");
    }

    let empty = tempfile::tempdir().unwrap();
    assert_eq!(
        names(&[
            "scenarios",
            "--scenario-dir",
            empty.path().to_str().unwrap()
        ]),
        bundled
    );

    let user = tempfile::tempdir().unwrap();
    std::fs::copy(docs("not-closed.json"), user.path().join("not-closed.json")).unwrap();
    let with_user = names(&["scenarios", "--scenario-dir", user.path().to_str().unwrap()]);
    assert_eq!(with_user.len(), bundled.len() + 1);
    assert!(with_user.iter().any(|n| n == "not-closed"));

    let v = json(&evoform(&[
        "check-closure",
        "not-closed",
        "--scenario-dir",
        user.path().to_str().unwrap(),
    ]));
    assert_eq!(v["scenario"], "not-closed");
}

#[test]
fn grid_scenario_resolves_relative_paths() {
    let v = json(&evoform(&["analyze", &docs("grid-shear.json")]));
    assert_eq!(v["tol"]["closure"], 1e-4);
    assert_eq!(v["verdict"]["verdict"], "NONIDENTICAL");
    assert_eq!(v["cascade"]["steps"][0]["realized"], true);
}
