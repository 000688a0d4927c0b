use std::path::PathBuf;

use qsl_cli::run_cli;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("qsl").chain(args.iter().copied()).map(String::from).collect();
    let (code, out, err) = run_cli(&argv, stdin.as_bytes());
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn assert_single_error_line(err: &str) {
    assert!(err.starts_with("error:"), "{err:?}");
    assert_eq!(err.trim_end().lines().count(), 1, "{err:?}");
}

#[test]
fn eval_prints_the_value() {
    let p = fixture("min_resp.json");
    assert_eq!(run(&["eval", "--property", &p, "--lasso", "; rq tk gr"], ""), (0, "1\n".into(), String::new()));
    assert_eq!(run(&["eval", "--property", &p, "--lasso", "; tk"], "").1, "∞\n");
    let m = fixture("last_two.json");
    assert_eq!(run(&["eval", "--property", &m, "--lasso", "a ; a b"], "").1, "high\n");
}

#[test]
fn classify_reports_and_exit_codes() {
    let (code, out, _) = run(&["classify", "--property", &fixture("max_resp.json")], "");
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "cosafe: Yes"));
    assert!(out.lines().any(|l| l == "live: Yes"));
    assert!(out.starts_with("property: max_response\nmethod: exact\n"));

    let p = fixture("max_resp.json");
    assert_eq!(run(&["classify", "--property", &p, "--expect", "cosafe,live"], "").0, 0);
    assert_eq!(run(&["classify", "--property", &p, "--expect", "safe"], "").0, 1);
    let avg = fixture("avg_resp.json");
    assert_eq!(run(&["classify", "--property", &avg, "--expect", "live", "--expect", "colive"], "").0, 2);
    assert_eq!(run(&["classify", "--property", &avg, "--expect", "live,safe"], "").0, 1);
    let (code, _, err) = run(&["classify", "--property", &p, "--expect", "shiny"], "");
    assert_eq!(code, 64);
    assert_single_error_line(&err);
}

#[test]
fn monitor_streams_tsv() {
    let (code, out, _) =
        run(&["monitor", "--property", &fixture("min_resp.json"), "--hyp", "ge:2", "--hyp", "le:5"], "rq tk\ngr # done\n");
    assert_eq!(code, 0);
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows[0], ["step", "symbol", "pi", "lower", "upper", "ge:2", "le:5"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4][..3], ["3", "gr", "1"]);
    assert_eq!(rows[4][5..], ["Rejected@3", "Open"]);
    assert!(rows.iter().all(|r| r.len() == 7));
}

#[test]
fn monitor_reads_a_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.txt");
    std::fs::write(&t, "a a\nb\n").unwrap();
    let (code, out, _) = run(&["monitor", "--property", &fixture("disc_never_b.json"), "--trace", t.to_str().unwrap()], "");
    assert_eq!(code, 0);
    let last: Vec<&str> = out.lines().last().unwrap().split('\t').collect();
    assert_eq!(last, ["3", "b", "0.875", "0.875", "0.875"]);
}

#[test]
fn synth_writes_json_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let (m, d) = (dir.path().join("m.json"), dir.path().join("m.dot"));
    let args = [
        "synth",
        "--property",
        &fixture("disc_never_b.json"),
        "--delta",
        "0.25",
        "--out",
        m.to_str().unwrap(),
        "--dot",
        d.to_str().unwrap(),
    ];
    let (code, out, _) = run(&args, "");
    assert_eq!(code, 0);
    assert!(out.starts_with("classes: 5\n"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(json["classes"].as_array().unwrap().len(), 5);
    let dot = std::fs::read_to_string(&d).unwrap();
    assert_eq!(dot.lines().filter(|l| l.contains("shape=")).count(), 5);
}

#[test]
fn synth_depth_exceeded_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let args =
        ["synth", "--property", &fixture("max_resp.json"), "--delta", "1", "--max-depth", "12", "--out", m.to_str().unwrap()];
    let (code, _, err) = run(&args, "");
    assert_eq!(code, 3);
    assert_single_error_line(&err);
    assert!(!m.exists());
}

#[test]
fn closure_dump_reloads() {
    let (code, out, _) = run(&["closure", "--property", &fixture("max_resp.json"), "--kind", "cosafety"], "");
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.json");
    std::fs::write(&c, &out).unwrap();
    let c = c.to_str().unwrap();
    let p = fixture("max_resp.json");
    for lasso in ["; rq tk gr", "rq tk tk gr ; rq gr", "; tk"] {
        let closed = run(&["eval", "--property", c, "--lasso", lasso], "").1;
        let orig = run(&["eval", "--property", &p, "--lasso", lasso], "").1;
        assert_eq!(closed, orig, "{lasso}");
    }
    let (code, _, err) = run(&["closure", "--property", &fixture("avg_resp.json"), "--kind", "safety"], "");
    assert_eq!(code, 64);
    assert_single_error_line(&err);
}

#[test]
fn decompose_reports_parts() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixture("min_resp.json");
    let (code, out, _) =
        run(&["decompose", "--property", &p, "--mode", "safety-liveness", "--out", dir.path().to_str().unwrap()], "");
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["source"]["builtin"], "min_response");
    assert_eq!(doc["parts"][0]["backend"], "machine");
    assert_eq!(doc["parts"][1]["rule"], "liveness_part");
    assert_eq!(doc["verification"]["passed"], true);
    assert!(dir.path().join("part1.json").exists());

    let (code, out, _) = run(&["decompose", "--property", &p, "--mode", "live-live", "--symbols", "tk,gr"], "");
    assert_eq!(code, 0);
    assert!(out.contains("top_on_tk_tail"));
    let (code, _, err) = run(&["decompose", "--property", &p, "--mode", "live-live", "--symbols", "tk,tk"], "");
    assert_eq!(code, 64);
    assert_single_error_line(&err);
}

#[test]
fn errors_have_codes_and_one_line() {
    let p = fixture("min_resp.json");
    let cases: Vec<(Vec<&str>, &str, i32)> = vec![
        (vec![], "", 64),
        (vec!["frob"], "", 64),
        (vec!["eval", "--property", &p], "", 64),
        (vec!["eval", "--property", &p, "--lasso", "rq zz ; gr"], "", 65),
        (vec!["eval", "--property", &p, "--lasso", "rq gr"], "", 65),
        (vec!["eval", "--property", &p, "--lasso", "rq ; gr ; tk"], "", 65),
        (vec!["monitor", "--property", &p], "rq\nqq\n", 65),
        (vec!["monitor", "--property", &p, "--hyp", "gt:2"], "", 64),
        (vec!["eval", "--property", "/definitely/missing.json", "--lasso", "; gr"], "", 66),
        (vec!["synth", "--property", &p, "--delta", "0", "--out", "/dev/null"], "", 64),
    ];
    for (args, stdin, want) in cases {
        let (code, _, err) = run(&args, stdin);
        assert_eq!(code, want, "{args:?}: {err}");
        assert_single_error_line(&err);
    }
    let (_, _, err) = run(&["eval", "--property", &p, "--lasso", "rq zz ; gr"], "");
    assert!(err.contains("position 2"), "{err}");
    let (_, out, err) = run(&["monitor", "--property", &p], "rq\nqq\n");
    assert!(err.contains("line 2") && err.contains("position 2"), "{err}");
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn malformed_property_files_report_positions() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("{\n  \"version\": 1,\n  \"builtin\": \"gf_a\",\n}", "line 4"),
        (r#"{"version": 1, "builtin": "gf_a", "colour": "red"}"#, "colour"),
        (r#"{"version": 3, "builtin": "gf_a"}"#, "version"),
        (r#"{"version": 1, "builtin": "nope"}"#, "nope"),
        (r#"{"version": 1, "builtin": "min_response", "params": {"cap": "x"}}"#, "min_response"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let f = dir.path().join(format!("p{i}.json"));
        std::fs::write(&f, text).unwrap();
        let (code, _, err) = run(&["eval", "--property", f.to_str().unwrap(), "--lasso", "; a"], "");
        assert_eq!(code, 65, "{text}: {err}");
        assert_single_error_line(&err);
        assert!(err.contains(needle), "{err}");
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let commands: Vec<Vec<String>> = vec![
        vec!["classify".into(), "--property".into(), fixture("avg_resp.json"), "--seed".into(), "9".into()],
        vec!["decompose".into(), "--property".into(), fixture("max_resp.json"), "--mode".into(), "cosafety-coliveness".into()],
        vec!["closure".into(), "--property".into(), fixture("min_resp.json"), "--kind".into(), "safety".into()],
        vec![
            "synth".into(),
            "--property".into(),
            fixture("disc_never_b.json"),
            "--delta".into(),
            "0.125".into(),
            "--out".into(),
            m.display().to_string(),
        ],
    ];
    for c in commands {
        let args: Vec<&str> = c.iter().map(String::as_str).collect();
        let a = run(&args, "");
        let first = std::fs::read(&m).ok();
        let b = run(&args, "");
        assert_eq!(a, b, "{c:?}");
        assert_eq!(first, std::fs::read(&m).ok());
    }
}
