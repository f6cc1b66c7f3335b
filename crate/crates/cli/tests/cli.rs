use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folfriend"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data"))
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    v.as_object_mut().unwrap().remove("elapsed_ms").expect("timing field");
    v
}

fn golden(name: &str) -> Value {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn golden_reports() {
    let cases: [(&[&str], &str); 5] = [
        (
            &["--json", "friendly", "--gamma", "some_p.fol", "--phi", "exists x. Q(x)", "--relation", "r1", "--expansion", "s1", "--base-bound", "2"],
            "friendly.json",
        ),
        (&["--json", "friendly-prop", "--gamma", "P | Q", "--phi", "P <-> ~Q"], "friendly_prop.json"),
        (&["--json", "ef", "--left", "c3.json", "--right", "p3.json", "-k", "2"], "ef.json"),
        (&["--json", "beth", "--gamma", "edges.fol", "--symbol", "P", "--bound", "3"], "beth.json"),
        (
            &[
                "--json",
                "entails",
                "--gamma",
                "forall x, y. (x = y); exists x, y. R(x,y)",
                "--phi",
                "(forall x. exists y. R(x,y)) & (forall x, y, z. (R(x,z) & R(y,z) -> x = y)) & exists y. forall x. ~R(x,y)",
                "--bound",
                "4",
            ],
            "entails_refuted.json",
        ),
    ];
    for (args, file) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", stderr(&out));
        assert_eq!(json_of(&out), golden(file), "{file}");
    }
}

#[test]
fn json_keys_are_sorted_and_versioned() {
    let out = run(&["--json", "friendly-prop", "--gamma", "P", "--phi", "P & Q"]);
    let text = stdout(&out);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], 1);
    let keys: Vec<usize> = [
        "\"caveats\"",
        "\"command\"",
        "\"elapsed_ms\"",
        "\"result\"",
        "\"schema\"",
    ]
    .iter()
    .map(|k| text.find(k).unwrap())
    .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn human_and_json_share_the_payload() {
    let args = [
        "friendly",
        "--gamma",
        "some_p.fol",
        "--phi",
        "exists x. Q(x)",
        "--base-bound",
        "2",
    ];
    let human = stdout(&run(&args));
    let mut with_json = vec!["--json"];
    with_json.extend(args);
    let v = json_of(&run(&with_json));
    for (key, value) in v["result"].as_object().unwrap() {
        assert!(human.contains(&format!("{key}:")), "{key}");
        if let Value::String(s) = value {
            assert!(human.contains(s.as_str()), "{key}");
        }
    }
    assert!(human.starts_with("verdict: friendly_up_to_bounds\nfriendly: true\nconclusive: false\n"));
    assert!(human.contains("caveat: only base models with at most 2 elements"));
}

#[test]
fn non_conclusive_negative_prints_caveat() {
    let dedekind =
        "(forall x. exists y. R(x,y)) & (forall x, y, z. (R(x,z) & R(y,z) -> x = y)) & exists y. forall x. ~R(x,y)";
    let out = run(&[
        "friendly",
        "--gamma",
        "forall x, y. (x = y); exists x, y. R(x,y)",
        "--phi",
        dedekind,
        "--relation",
        "r1",
        "--expansion",
        "s3",
        "--base-bound",
        "1",
        "--ext-bound",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("verdict: not_friendly_within_bounds"));
    assert!(text.contains("conclusive: false"));
    assert!(text.lines().any(|l| l.starts_with("caveat:") && l.contains("infinite")));
}

#[test]
fn schema_fragment() {
    let out = run(&[
        "--json",
        "parse",
        "--schema",
        "at-least:3",
        "--theory",
        "exists x. P(x)",
    ]);
    let v = json_of(&out);
    assert_eq!(v["result"]["sentences"].as_array().unwrap().len(), 4);
    let out = run(&["--schema", "at-most:2", "models", "--size", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown schema"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["friendly-prop", "--gamma", "P", "--phi", "~P"]).status.code(),
        Some(0)
    );
    let parse_error = run(&["friendly-prop", "--gamma", "P &", "--phi", "Q"]);
    assert_eq!(parse_error.status.code(), Some(1));
    assert!(stderr(&parse_error).contains("1:4"), "{}", stderr(&parse_error));
    assert!(!stderr(&parse_error).contains("panicked"));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["friendly", "--phi", "Q"]).status.code(), Some(1));
    assert_eq!(run(&["repro", "no-such-entry"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let field = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/field_fragment.fol");
    let budget = run(&[
        "--node-budget",
        "1",
        "models",
        "--theory",
        field.to_str().unwrap(),
        "--size",
        "4",
    ]);
    assert_eq!(budget.status.code(), Some(2));
    assert!(stderr(&budget).contains("budget"));
}

#[test]
fn located_errors_for_files() {
    let dir = tempfile::tempdir().unwrap();
    let theory = dir.path().join("bad.fol");
    std::fs::write(&theory, "exists x. P(x)\n# comment\nforall x. (P(x) ->)\n").unwrap();
    let out = run(&["parse", "--theory", theory.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("bad.fol") && err.contains("3:"), "{err}");

    let s = dir.path().join("s.json");
    std::fs::write(
        &s,
        r#"{"domain_size":2,"relations":{"E":{"arity":2,"tuples":[[0,2]]}}}"#,
    )
    .unwrap();
    let out = run(&[
        "eval",
        "--structure",
        s.to_str().unwrap(),
        "--formula",
        "exists x. E(x,x)",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("outside a domain of size 2"));
}

#[test]
fn eval_with_assignment_and_no_equality() {
    let out = run(&[
        "--json",
        "eval",
        "--structure",
        "p3.json",
        "--formula",
        "E(x,y)",
        "--assign",
        "x=0",
        "--assign",
        "y=1",
    ]);
    assert_eq!(json_of(&out)["result"]["value"], true);
    let out = run(&["--no-equality", "parse", "--formula", "x = y"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "--json",
        "--no-equality",
        "friendly",
        "--gamma",
        "exists x. P(x)",
        "--phi",
        "exists x. Q(x)",
        "--base-bound",
        "2",
    ]);
    assert_eq!(json_of(&out)["result"]["config"]["equality"], false);
}

#[test]
fn models_and_spectrum() {
    let v = json_of(&run(&[
        "--json",
        "models",
        "--theory",
        "forall x. exists y. E(x,y)",
        "--size",
        "2",
        "--all",
    ]));
    assert_eq!(v["result"]["count"], v["result"]["models"].as_array().unwrap().len());
    let v = json_of(&run(&[
        "--json",
        "spectrum",
        "--formula",
        "exists x, y. ~(x = y)",
        "--max",
        "3",
    ]));
    assert_eq!(v["result"]["sizes"], serde_json::json!([2, 3]));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = [
        "--json",
        "friendly",
        "--gamma",
        "some_p.fol",
        "--phi",
        "exists x. Q(x)",
        "--base-bound",
        "3",
    ];
    let reports: Vec<Value> = ["1", "3"]
        .iter()
        .map(|n| {
            let out = Command::new(env!("CARGO_BIN_EXE_folfriend"))
                .args(args)
                .env("RAYON_NUM_THREADS", n)
                .current_dir(data(""))
                .output()
                .unwrap();
            json_of(&out)
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn repro_entries() {
    for name in [
        "example-field-6",
        "compactness-graphs",
        "spectrum-dedekind",
        "reduction-s2",
        "reduction-s3",
        "beth-demo",
    ] {
        let out = run(&["--json", "repro", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        let v = json_of(&out);
        assert_eq!(v["result"]["entries"][0]["status"], "PASS", "{name}");
        assert!(v["result"]["entries"][0]["claim"]
            .as_str()
            .is_some_and(|c| !c.is_empty()));
    }
    let out = run(&["--json", "repro", "reduction-s3"]);
    let v = json_of(&out);
    assert!(v["caveats"][0].as_str().unwrap().contains("infinite"));
}

#[test]
fn repro_all_passes() {
    let out = run(&["repro", "--all", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("status: PASS").count(), 10);
    assert!(text.contains("failed: 0"));
}
