use std::io::Write;
use std::process::{Command, Output, Stdio};

fn tx(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tx"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn tx");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn example(name: &str) -> String {
    let o = tx(&["example", "--name", name], "");
    assert!(o.status.success(), "example {name} failed");
    stdout(&o)
}

fn json(args: &[&str], stdin: &str) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = tx(&all, stdin);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn g4_signature_through_a_pipe() {
    let o = tx(&["sig", "-"], &example("g4"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "sig=8 rsig=2");
}

#[test]
fn identity_has_order_one() {
    let o = tx(&["order", "-"], &example("id:3"));
    assert_eq!(stdout(&o).trim(), "Finite(1)");
}

#[test]
fn g4_has_order_two() {
    let o = tx(&["order", "--bound", "8", "-"], &example("g4"));
    assert_eq!(stdout(&o).trim(), "Finite(2)");
}

#[test]
fn json_report_schema() {
    let v = json(&["sig", "-"], &example("g4"));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["bounds", "command", "elapsed_ms", "inputs", "result"]);
    assert_eq!(v["command"], "sig");
    assert_eq!(v["result"]["rsig"], 2);
    assert_eq!(v["result"]["sig"], "8");
    assert_eq!(v["bounds"]["gcp_depth"], 64);
}

#[test]
fn json_is_stable_apart_from_timing() {
    let strip = |mut v: serde_json::Value| {
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let t = example("T:3");
    let a = strip(json(&["analyze", "-"], &t));
    let b = strip(json(&["analyze", "-"], &t));
    assert_eq!(a, b);
}

#[test]
fn bound_flags_reach_the_report() {
    let v = json(&["--order-states", "7", "--viable-size", "5", "sig", "-"], &example("g4"));
    assert_eq!(v["bounds"]["order_states"], 7);
    assert_eq!(v["bounds"]["viable_size"], 5);
}

#[test]
fn parse_round_trips() {
    for name in ["g4", "T:3", "U:4", "A:3", "B:3", "piR:5", "id:2"] {
        let text = example(name);
        let o = tx(&["parse", "-"], &text);
        assert!(o.status.success());
        assert_eq!(stdout(&o), text, "{name}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tx(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(tx(&["member", "-"], "").status.code(), Some(2));
    assert_eq!(tx(&["example", "--name", "Q:3"], "").status.code(), Some(2));
    assert_eq!(tx(&["verify", "--suite", "nope"], "").status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one_with_position() {
    let o = tx(&["parse", "-"], "TRANSDUCER n=2 r=0 states=a initial=-\na 0 -> a : 0\n");
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line"), "{err}");

    // the swap machine never synchronizes
    let swap = "TRANSDUCER n=2 r=0 states=a,b initial=-\na 0 -> b : 0\na 1 -> b : 1\nb 0 -> a : 0\nb 1 -> a : 1\n";
    let o = tx(&["sync-level", "-"], swap);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("synchroniz"));
}

#[test]
fn mul_with_inverse_is_identity() {
    let dir = std::env::temp_dir().join(format!("tx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let t = dir.join("t.tx");
    let t = t.to_str().unwrap();
    assert!(tx(&["example", "--name", "T:3", "-o", t], "").status.success());
    let inv = stdout(&tx(&["invert", t], ""));
    let o = tx(&["mul", t, "-"], &inv);
    assert!(o.status.success());
    let v = json(&["parse", "-"], &stdout(&o));
    assert_eq!(v["result"]["states"], 1);
    let o = tx(&["order", "-"], &stdout(&o));
    assert_eq!(stdout(&o).trim(), "Finite(1)");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn membership_of_g4() {
    let v = json(&["member", "--r", "3", "-"], &example("g4"));
    assert_eq!(v["result"]["TO"]["holds"], true);
    let v = json(&["member", "--r", "1", "-"], &example("g4"));
    assert_eq!(v["result"]["O"]["holds"], false);
}

#[test]
fn orbit_of_t_grows() {
    let o = tx(&["orbit", "--class", "1,2", "--steps", "8", "-"], &example("T:3"));
    assert_eq!(stdout(&o).trim(), "2 3 4 5 6 7 8 9 10");
}

#[test]
fn realized_machine_has_the_element_as_core() {
    let g = example("g4");
    let m = stdout(&tx(&["realize", "--r", "3", "-"], &g));
    assert!(m.starts_with("TRANSDUCER n=4 r=3"));
    let core = stdout(&tx(&["core", "-"], &m));
    let sig = tx(&["sig", "-"], &core);
    assert_eq!(stdout(&sig).trim(), "sig=8 rsig=2");
}

#[test]
fn partition_of_seven() {
    let o = tx(&["partition", "--n", "7", "--sigs", "1,5"], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // r(5-1) = 4r vanishes mod 6 exactly for r = 3, 6
    assert_eq!(stdout(&o), "{1,2,4,5}\n{3,6}\n");
}

#[test]
fn verify_f_relations_sequentially() {
    let o = tx(&["verify", "--suite", "F-relations", "--jobs", "1"], "");
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 2, "{out}");
}
