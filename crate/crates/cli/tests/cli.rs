use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, v: &Value) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, v.to_string()).unwrap();
        p
    }

    fn raw(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supersmooth")).args(args).output().unwrap()
}

fn p(x: &Path) -> &str {
    x.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn blade(l: u32, gens: &[u32], re: &str) -> Value {
    json!({"L": l, "terms": [{"gens": gens, "re": re}]})
}

fn terms(v: &Value) -> Vec<(Vec<u64>, String)> {
    v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let gens = t["gens"].as_array().unwrap().iter().map(|g| g.as_u64().unwrap()).collect();
            (gens, t["re"].as_str().unwrap().to_string())
        })
        .collect()
}

fn poly_superfield() -> Value {
    json!({"m": 1, "n": 2, "coeffs": [
        {"a": [0, 0], "fn": {"kind": "poly", "arity": 1, "terms": [{"exps": [3], "re": "1"}]}},
        {"a": [1, 1], "fn": {"kind": "poly", "arity": 1, "terms": [{"exps": [1], "re": "2"}]}}
    ]})
}

fn point_1_2() -> Value {
    json!({"m": 1, "n": 2, "L": 3,
        "even": [{"terms": [{"gens": [], "re": "2"}, {"gens": [1, 2], "re": "1"}]}],
        "odd": [{"terms": [{"gens": [1], "re": "1"}]}, {"terms": [{"gens": [3], "re": "-1/2"}, {"gens": [2], "re": "1"}]}]})
}

#[test]
fn mul_of_anticommuting_generators() {
    let w = Workspace::new();
    let (a, b) = (w.file("s2.json", &blade(2, &[2], "1")), w.file("s1.json", &blade(2, &[1], "1")));
    let o = run(&["mul", p(&a), p(&b)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(terms(&json_out(&o)), vec![(vec![1, 2], "-1".to_string())]);
}

#[test]
fn add_and_dist() {
    let w = Workspace::new();
    let (a, b) = (w.file("a.json", &blade(2, &[1], "1")), w.file("b.json", &blade(2, &[1], "-1")));
    let o = run(&["add", p(&a), p(&b)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(terms(&json_out(&o)).is_empty());

    let zero = w.file("zero.json", &json!({"L": 3, "terms": []}));
    let o = run(&["dist", p(&zero)]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn project_to_a_larger_skeleton_is_a_usage_error() {
    let w = Workspace::new();
    let a = w.file("a.json", &blade(2, &[1], "1"));
    let o = run(&["project", "--skeleton", "3", p(&a)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["project", "--skeleton", "1", p(&w.file("b.json", &blade(2, &[2], "1")))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(terms(&json_out(&o)).is_empty());
}

#[test]
fn skeleton_mismatch_is_reported() {
    let w = Workspace::new();
    let (a, b) = (w.file("a.json", &blade(2, &[1], "1")), w.file("b.json", &blade(3, &[3], "1")));
    let o = run(&["mul", p(&a), p(&b)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--skeleton"));
    let o = run(&["mul", "--skeleton", "3", p(&a), p(&b)]);
    assert_eq!(terms(&json_out(&o)), vec![(vec![1, 3], "1".to_string())]);
}

#[test]
fn malformed_json_reports_position() {
    let w = Workspace::new();
    let bad = w.raw("bad.json", "{\"L\": 2,\n \"terms\": [}");
    let o = run(&["dist", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn continuation_of_cube_constant_and_log() {
    let w = Workspace::new();
    let arg = w.file("x.json", &json!([{"L": 2, "terms": [{"gens": [], "re": "2"}, {"gens": [1, 2], "re": "1"}]}]));
    let cube = w.file("cube.json", &json!({"kind": "poly", "arity": 1, "terms": [{"exps": [3], "re": "1"}]}));
    let o = run(&["continue", p(&cube), p(&arg)]);
    assert_eq!(terms(&json_out(&o)), vec![(vec![], "8".to_string()), (vec![1, 2], "12".to_string())]);

    let constant = w.file("c.json", &json!({"kind": "poly", "arity": 1, "terms": [{"exps": [0], "re": "5/2"}]}));
    let o = run(&["continue", p(&constant), p(&arg)]);
    assert_eq!(terms(&json_out(&o)), vec![(vec![], "5/2".to_string())]);

    let log = w.file("log.json", &json!({"kind": "analytic", "fn": "log", "coeffs": ["1"], "offset": "0"}));
    let soul = w.file("s.json", &json!([{"L": 2, "terms": [{"gens": [1, 2], "re": "1"}]}]));
    let o = run(&["continue", p(&log), p(&soul)]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn cr_check_passes_on_superfield_and_fails_on_body_coordinate() {
    let w = Workspace::new();
    let u = w.file("u.json", &poly_superfield());
    let x = w.file("x.json", &point_1_2());
    let o = run(&["cr-check", p(&u), p(&x)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let body = w.file("body.json", &json!({"kind": "blackbox", "name": "body-coordinate"}));
    let x = w.file("y.json", &json!({"m": 1, "n": 0, "L": 2, "even": [{"terms": [{"gens": [], "re": "1"}]}], "odd": []}));
    let o = run(&["cr-check", p(&body), p(&x)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("X[1,[1,2]] / X[1,[]]"), "{}", stdout(&o));
}

#[test]
fn suite_on_superfield_and_on_masuda_fixture() {
    let w = Workspace::new();
    let u = w.file("u.json", &poly_superfield());
    let o = run(&["suite", p(&u), "--skeleton", "3", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let masuda = w.file("m.json", &json!({"kind": "blackbox", "name": "masuda"}));
    let o = run(&["suite", p(&masuda), "--skeleton", "2", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("σ1·A1"), "{}", stdout(&o));
}

#[test]
fn witness_extract_taylor_and_derive() {
    let w = Workspace::new();
    let u = w.file("u.json", &poly_superfield());
    let x = w.file("x.json", &point_1_2());
    let o = run(&["witness", p(&u), p(&x)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("F_1 = 12"), "{}", stdout(&o));

    let o = run(&["extract", p(&u), p(&x)]);
    assert!(stdout(&o).contains("θ^(1,1): 4 + 2·σ1σ2"), "{}", stdout(&o));

    let o = run(&["taylor", p(&u), p(&x), p(&x)]);
    assert!(stdout(&o).contains("defect:      0"), "{}", stdout(&o));

    let o = run(&["derive", p(&u), p(&x), "--coord", "1:[]"]);
    assert_eq!(o.status.code(), Some(0));
    let d = json_out(&o);
    assert_eq!(terms(&d)[0], (vec![], "12".to_string()));
}

#[test]
fn solve_sigma_examples() {
    let w = Workspace::new();
    let ok = w.file("ok.json", &json!([blade(2, &[1, 2], "1"), {"L": 2, "terms": []}]));
    let o = run(&["solve-sigma", p(&ok)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("F = σ2"), "{}", stdout(&o));

    let zero = w.file("zero.json", &json!([{"L": 2, "terms": []}, {"L": 2, "terms": []}]));
    assert!(stdout(&run(&["solve-sigma", p(&zero)])).starts_with("F = 0"));

    let bad = w.file("bad.json", &json!([blade(2, &[2], "1"), {"L": 2, "terms": []}]));
    let o = run(&["solve-sigma", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("σ1·A1 = σ1σ2 ≠ 0"), "{}", stdout(&o));
}

#[test]
fn dual_examples() {
    let w = Workspace::new();
    let u = w.file("u.json", &json!({"kind": "right-multiply", "u": {"L": 4, "terms": [{"gens": [], "re": "1"}, {"gens": [1, 2], "re": "1"}]}}));
    let o = run(&["dual", "--skeleton", "4", p(&u)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("u = 1 + σ1σ2"), "{}", stdout(&o));

    let zero = w.file("z.json", &json!({"kind": "basis-table", "images": []}));
    assert_eq!(run(&["dual", p(&zero)]).status.code(), Some(0));

    let masuda = w.file("m.json", &json!({"kind": "masuda"}));
    let o = run(&["dual", p(&masuda)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("σ1·A1 = σ1σ2 ≠ 0"));
}

#[test]
fn standard_suite_reports_are_reproducible() {
    let w = Workspace::new();
    let (a, b) = (w.path("a.json"), w.path("b.json"));
    for out in [&a, &b] {
        let o = run(&["suite", "--seed", "9", "--suite", "sigma,dual,fixtures", "--out", p(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = run(&["suite", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}
