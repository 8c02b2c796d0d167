use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_derivcalc"));
    c.env_remove("DERIVCALC_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn derivcalc")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn derivcalc");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn order_of_second_derivative() {
    let o = run(&["order", "--k", "1", "--op", "d[2]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "order: 2"));
}

#[test]
fn char2_demo_values() {
    let o = run(&["demo", "char2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("D(x): 0\n"));
    assert!(out.contains("D(x^2): 1\n"));
    assert!(out.contains("collapse:\n"));
    assert!(out.contains("power_rule_holds: true"));
}

#[test]
fn fit_without_operators_is_infeasible() {
    let o = run(&["fit", "--k", "1", "--n", "0", "--require-o0", "--table", r#"{"t1":"1"}"#]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("infeasible"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    for args in [
        &["order", "--op", "d[2]", "--frobnicate"][..],
        &["apply", "--op", "d[1]", "--f", "t1 +"],
        &["apply", "--k", "2", "--op", "d[1,0]", "--f", "t3"],
        &["fit", "--n", "1", "--table", "{not json"],
        &["reconstruct", "--grid", r#"{"k":1,"n":1,"values":{"0":"0"}}"#],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).to_lowercase().contains("error"), "{args:?}");
    }
    let o = run(&["apply", "--op", "d[1]", "--f", "t1 +"]);
    assert!(stderr(&o).contains("byte 4"), "{}", stderr(&o));
    let o = run(&["apply", "--k", "2", "--op", "d[1,0]", "--f", "t3"]);
    assert!(stderr(&o).contains("unknown variable"), "{}", stderr(&o));
}

#[test]
fn failed_checks_exit_one_with_witness() {
    let o = run(&["gpdeg", "--op", "d[1]", "--n", "0", "--increment", "t1+1", "--point", "t1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("value: 1/(t1 + 1)"));

    let o = run(&["recurrence", "--coeffs=-1,-1,1", "--seq", "1,1,2,3,6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("index: 4"));

    let o = run(&["order", "--op", "d[1] + 3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("D(1): 3"));

    // D(x) = x^2 is not additive on the table
    let o = run(&["order", "--n", "2", "--table", r#"{"t1":"t1^2","2*t1":"4*t1^2","3*t1":"9*t1^2"}"#]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not additive"));
}

#[test]
fn table_order_check_passes_on_operator_data() {
    let table = r#"{"t1":"1","t1^2":"2*t1","t1^3":"3*t1^2","t1^4":"4*t1^3","t1^5":"5*t1^4","t1^6":"6*t1^5"}"#;
    let o = run(&["order", "--n", "1", "--table", table]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("status: consistent"));
}

#[test]
fn payload_from_stdin_and_file() {
    let grid = r#"{"k": 1, "n": 2, "values": {"0": "0", "1": "t1", "2": "2*t1^2"}}"#;
    let o = run_stdin(&["reconstruct", "--grid", "-"], grid);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("operator: t1*d[1]"));

    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join("grid.json");
    std::fs::write(&path, grid).unwrap();
    let arg = format!("@{}", path.display());
    let o2 = run(&["reconstruct", "--grid", &arg]);
    assert_eq!(stdout(&o2), stdout(&o));
}

#[test]
fn env_seed_overrides_flag() {
    let args = ["demo", "theorem2", "--n", "1"];
    let with_flag = |seed: &str| {
        let mut a = args.to_vec();
        a.extend(["--seed", seed]);
        stdout(&run(&a))
    };
    let env = bin()
        .args(args)
        .args(["--seed", "1"])
        .env("DERIVCALC_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(stdout(&env), with_flag("7"));
    assert_ne!(with_flag("1"), with_flag("7"));
    // default seed is fixed
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));

    let bad = bin().args(args).env("DERIVCALC_SEED", "nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn json_errors_are_json() {
    let o = run(&["--json", "apply", "--op", "d[1]", "--f", "("]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert!(v["error"].as_str().unwrap().contains("syntax error"));
}

/// Golden cases: name and arguments. Each has a human and a JSON golden.
const CASES: &[(&str, &[&str])] = &[
    ("order_d2", &["order", "--k", "1", "--op", "d[2]"]),
    ("apply", &["apply", "--k", "2", "--op", "t1*d[1,0] + d[0,2]", "--f", "t1^2*t2^3/(t1 + t2)"]),
    ("normalize", &["normalize", "--k", "2", "--word", "(t1->1,t2->0) o (t1->t1,t2->1)"]),
    ("compose", &["compose", "--k", "1", "--left", "d[1]", "--right", "t1^2*d[1]"]),
    ("defect", &["defect", "--k", "1", "--op", "d[2]", "--x", "t1", "--y", "t1^2"]),
    ("defect_nested", &["defect", "--k", "1", "--op", "d[2]", "--x", "t1", "--y", "t1", "--y", "t1"]),
    ("expoly", &["expoly", "--k", "2", "--op", "d[1,0] o (t1*d[1,0] + d[0,1])"]),
    ("gpdeg_pass", &["gpdeg", "--k", "1", "--op", "d[1]", "--n", "1"]),
    ("gpdeg_fail", &["gpdeg", "--k", "1", "--op", "d[2]", "--n", "1", "--increment", "t1", "--point", "t1 + 1"]),
    ("reconstruct", &["reconstruct", "--grid", r#"{"k":1,"n":2,"values":{"0":"0","1":"0","2":"2"}}"#]),
    ("reconstruct_overflow", &["reconstruct", "--grid", r#"{"k":2,"n":1,"values":{"0,0":"0","0,1":"0","1,0":"0","1,1":"t1*t2"}}"#]),
    ("fit", &["fit", "--k", "1", "--n", "2", "--require-o0", "--table", r#"{"t1":"t1","t1^2":"2*t1^2","t1^3":"3*t1^3"}"#]),
    ("fit_infeasible", &["fit", "--k", "1", "--n", "0", "--require-o0", "--table", r#"{"t1":"1"}"#]),
    ("recurrence_fib", &["recurrence", "--coeffs=-1,-1,1", "--seq", "1,1,2,3,5,8"]),
    ("recurrence_geometric", &["recurrence", "--coeffs=-t1,1", "--seq", "1,t1,t1^2,t1^3"]),
    ("demo_char2", &["demo", "char2"]),
    ("demo_product_ring", &["demo", "product-ring"]),
    ("demo_theorem2", &["demo", "theorem2", "--k", "1", "--n", "2"]),
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check_golden(path: &Path, actual: &str) {
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(path)
        .unwrap_or_else(|_| panic!("missing golden {}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert_eq!(actual, expected, "golden mismatch: {}", path.display());
}

/// Flatten a JSON report into `key: scalar` lines, the way the human
/// output spells them.
fn leaves(v: &Value, key: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                leaves(x, k, out);
            }
        }
        Value::Array(a) if a.is_empty() => out.push(format!("{key}: []")),
        Value::Array(a) => {
            for x in a {
                match x {
                    Value::String(s) => out.push(format!("- {s}")),
                    other => leaves(other, key, out),
                }
            }
        }
        Value::String(s) => out.push(format!("{key}: {s}")),
        Value::Null => out.push(format!("{key}: none")),
        other => out.push(format!("{key}: {other}")),
    }
}

#[test]
fn golden_outputs() {
    for (name, args) in CASES {
        let human = run(args);
        let mut json_args = vec!["--json"];
        json_args.extend_from_slice(args);
        let json = run(&json_args);
        assert_eq!(human.status.code(), json.status.code(), "{name}");
        assert_ne!(human.status.code(), Some(2), "{name}: {}", stderr(&human));

        let (h, j) = (stdout(&human), stdout(&json));
        check_golden(&golden_dir().join(format!("{name}.txt")), &h);
        check_golden(&golden_dir().join(format!("{name}.json")), &j);

        // same content: every JSON leaf appears, in order, as a human line
        let v: Value = serde_json::from_str(&j).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut want = Vec::new();
        leaves(&v, "", &mut want);
        let got: Vec<String> = h.lines().map(|l| l.trim_start().to_string()).filter(|l| !l.ends_with(':')).collect();
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn printed_operators_parse_back() {
    // the operator line of one command is valid input to another
    let o = run(&["compose", "--k", "2", "--left", "(t1 -> t2; t2 -> 1/t1)", "--right", "(t1 -> t1^2; t2 -> t1 + t2)"]);
    let op = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("operator: ").map(str::to_string))
        .unwrap();
    let again = run(&["compose", "--k", "2", "--left", &op, "--right", "id"]);
    assert_eq!(stdout(&again), stdout(&o));
}
