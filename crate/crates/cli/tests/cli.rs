use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ontoslice::{PhaseState, SessionLog};

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

fn toy() -> PathBuf {
    data().join("toy.ttl")
}

fn golden(id: &str) -> PathBuf {
    data().join("golden").join(id)
}

fn ontoslice(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ontoslice"));
    cmd.args(args)
        .env_remove("ONTOSLICE_CONFIG")
        .env_remove("ONTOSLICE_API_KEY")
        .current_dir(env!("CARGO_MANIFEST_DIR"));
    cmd
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn question(id: &str) -> String {
    fs::read_to_string(golden(id).join("question.txt"))
        .unwrap()
        .trim()
        .to_string()
}

fn ask(id: &str, logs: &Path, extra: &[&str]) -> (i32, String, String) {
    let transcript = golden(id).join("transcript.json");
    let (q, toy) = (question(id), toy());
    let mut args = vec![
        "-o",
        s(&toy),
        "ask",
        &q,
        "--transcript",
        s(&transcript),
        "--log-dir",
        s(logs),
    ];
    args.extend_from_slice(extra);
    run(&mut ontoslice(&args))
}

fn logs_in(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

#[test]
fn ingest_prints_counts() {
    let (code, out, _) = run(&mut ontoslice(&["ingest", s(&toy())]));
    assert_eq!(code, 0);
    assert!(out.starts_with("concepts: 11\n"), "{out}");
    assert!(out.contains("relationships: 18\n"));
    assert!(out.contains("axioms: "));
}

#[test]
fn ingest_reports_diagnostics_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ttl");
    fs::write(
        &bad,
        "@prefix ex: <http://ex.org/> .\n\nex:A a owl:Class ;\n",
    )
    .unwrap();
    let (code, out, err) = run(&mut ontoslice(&["ingest", s(&bad)]));
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains(&format!("{}:3:", bad.display())), "{err}");
}

#[test]
fn generated_enterprise_ontology_has_over_seven_thousand_axioms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen.ttl");
    let (code, _, _) = run(&mut ontoslice(&["gen", "--seed", "7", "-O", s(&out)]));
    assert_eq!(code, 0);
    let (code, stats, _) = run(&mut ontoslice(&["ingest", s(&out)]));
    assert_eq!(code, 0);
    assert!(stats.contains("concepts: 500\n") && stats.contains("relationships: 1000\n"));
    let axioms: usize = stats
        .lines()
        .find_map(|l| l.strip_prefix("axioms: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(axioms > 7000, "{axioms}");
}

#[test]
fn ask_prints_the_golden_queries_and_writes_session_logs() {
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(data().join("golden/manifest.json")).unwrap())
            .unwrap();
    for case in manifest
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["outcome"] == "done")
    {
        let id = case["id"].as_str().unwrap();
        let logs = tempfile::tempdir().unwrap();
        let (code, out, err) = ask(id, logs.path(), &[]);
        assert_eq!(code, 0, "{id}: {err}");
        assert_eq!(
            out,
            fs::read_to_string(golden(id).join("query.rq")).unwrap(),
            "{id}"
        );
        let files = logs_in(logs.path());
        assert_eq!(files.len(), 1);
        let written = fs::read_to_string(&files[0]).unwrap();
        assert_eq!(
            written,
            fs::read_to_string(golden(id).join("session.json")).unwrap(),
            "{id}"
        );
        assert!(matches!(
            SessionLog::from_json(&written).unwrap().outcome,
            PhaseState::Done { .. }
        ));
    }
}

#[test]
fn repeated_report_exits_with_the_no_progress_code_and_still_logs() {
    let logs = tempfile::tempdir().unwrap();
    let (code, out, err) = ask("churn-no-progress", logs.path(), &[]);
    assert_eq!(code, 4, "{err}");
    assert!(out.is_empty());
    assert!(err.contains("no-progress"));
    let files = logs_in(logs.path());
    assert_eq!(files.len(), 1);
    let name = files[0].file_name().unwrap().to_str().unwrap();
    assert!(name.ends_with(".json") && name.len() > 20, "{name}");
}

#[test]
fn failure_kinds_map_to_distinct_exit_codes() {
    let logs = tempfile::tempdir().unwrap();
    // One refinement step allowed, then the report forces a second.
    let (code, _, err) = ask(
        "invoice-total-per-region",
        logs.path(),
        &["--max-steps", "1"],
    );
    assert_eq!(code, 5, "{err}");
    let (code, _, err) = ask("plan-union", logs.path(), &["--budget", "50"]);
    assert_eq!(code, 7, "{err}");

    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    fs::write(
        &garbage,
        r#"{"entries": [{"phase": "approximation", "match": "any", "response": "no idea"}]}"#,
    )
    .unwrap();
    let (code, _, _) = run(&mut ontoslice(&[
        "-o",
        s(&toy()),
        "ask",
        "anything",
        "--transcript",
        s(&garbage),
        "--log-dir",
        s(logs.path()),
    ]));
    assert_eq!(code, 8);
    let empty = dir.path().join("empty.json");
    fs::write(&empty, r#"{"entries": []}"#).unwrap();
    let (code, _, err) = run(&mut ontoslice(&[
        "-o",
        s(&toy()),
        "ask",
        "anything",
        "--transcript",
        s(&empty),
        "--log-dir",
        s(logs.path()),
    ]));
    assert_eq!(code, 3);
    assert!(err.contains("approximation"), "{err}");
    assert_eq!(logs_in(logs.path()).len(), 4);
}

#[test]
fn config_file_and_environment_layers() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("conf.toml");
    fs::write(
        &config,
        format!(
            "ontology_path = {:?}\nlog_dir = \"logs\"\n[provider]\nkind = \"scripted\"\ntranscript = {:?}\n",
            s(&toy()),
            s(&golden("plan-union").join("transcript.json"))
        ),
    )
    .unwrap();
    let q = question("plan-union");
    let (code, out, err) = run(ontoslice(&["ask", &q]).env("ONTOSLICE_CONFIG", &config));
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        out,
        fs::read_to_string(golden("plan-union").join("query.rq")).unwrap()
    );
    assert_eq!(logs_in(&dir.path().join("logs")).len(), 1);

    // The flag wins over the environment variable.
    let (code, _, err) =
        run(ontoslice(&["--config", "/nonexistent.toml", "ask", &q])
            .env("ONTOSLICE_CONFIG", &config));
    assert_eq!(code, 2);
    assert!(err.contains("/nonexistent.toml"));
}

#[test]
fn missing_ontology_or_provider_is_a_usage_error() {
    let (code, _, _) = run(&mut ontoslice(&["ask", "q"]));
    assert_eq!(code, 2);
    let (code, _, err) = run(&mut ontoslice(&["-o", s(&toy()), "ask", "q"]));
    assert_eq!(code, 2);
    assert!(err.contains("provider"));
    let (code, _, _) = run(&mut ontoslice(&["-o", s(&toy()), "verbalize"]));
    assert_eq!(code, 2);
    let (code, _, _) = run(&mut ontoslice(&["frobnicate"]));
    assert_eq!(code, 2);
}

#[test]
fn slice_and_path_commands() {
    let o = s(&toy()).to_string();
    let (code, out, _) = run(&mut ontoslice(&["-o", &o, "slice", "tel:billedBy"]));
    assert_eq!(code, 0);
    assert!(
        out.contains("concept\ttel:Invoice\n") && out.contains("relationship\ttel:billedBy\n"),
        "{out}"
    );
    let (code, out, _) = run(&mut ontoslice(&["-o", &o, "slice", "--turtle", "has plan"]));
    assert_eq!(code, 0);
    assert!(out.contains("tel:hasPlan a owl:ObjectProperty"), "{out}");

    let (code, out, err) = run(&mut ontoslice(&["-o", &o, "slice", "plan", "gizmo"]));
    assert_eq!(code, 9);
    assert!(out.is_empty());
    assert!(err.contains("unresolved: gizmo"));

    let (code, out, _) = run(&mut ontoslice(&["-o", &o, "path", "Customer", "Customer"]));
    assert_eq!((code, out.as_str()), (0, "length: 0\n"));
    let (code, out, _) = run(&mut ontoslice(&["-o", &o, "path", "customer", "invoice"]));
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "length: 2\ntel:Customer\ttel:hasPlan\toutgoing\ttel:Plan\ntel:Plan\ttel:billedBy\toutgoing\ttel:Invoice\n"
    );
    let (code, _, _) = run(&mut ontoslice(&[
        "-o",
        &o,
        "path",
        "customer",
        "invoice",
        "--max-hops",
        "1",
    ]));
    assert_eq!(code, 9);
}

#[test]
fn validate_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = s(&toy()).to_string();
    let slice = dir.path().join("slice.txt");
    fs::write(&slice, "# elements\ntel:hasPlan\nplan name  # attribute\n").unwrap();
    let good = dir.path().join("good.rq");
    fs::write(
        &good,
        "PREFIX tel: <http://example.org/telecom#>\nSELECT ?c WHERE { ?c tel:hasPlan ?p . ?p tel:planName ?n }\n",
    )
    .unwrap();
    let (code, out, _) = run(&mut ontoslice(&[
        "-o",
        &o,
        "validate",
        s(&good),
        "--slice",
        s(&slice),
    ]));
    assert_eq!((code, out.as_str()), (0, ""));

    let bad = dir.path().join("bad.rq");
    fs::write(
        &bad,
        "PREFIX tel: <http://example.org/telecom#>\nSELECT ?c WHERE {\n  ?c tel:hasPlan ?p .\n  ?p tel:billedBy ?i\n}\n",
    )
    .unwrap();
    let (code, out, _) = run(&mut ontoslice(&[
        "-o",
        &o,
        "validate",
        s(&bad),
        "--slice",
        s(&slice),
    ]));
    assert_eq!(code, 6);
    let fields: Vec<&str> = out.trim_end().split('\t').collect();
    assert_eq!(
        &fields[..3],
        ["unknown-predicate", "tel:billedBy", "4:6"],
        "{out}"
    );
    // Against the whole ontology the same query conforms.
    let (code, _, _) = run(&mut ontoslice(&["-o", &o, "validate", s(&bad)]));
    assert_eq!(code, 0);
}

#[test]
fn verbalize_command() {
    let o = s(&toy()).to_string();
    let (code, out, _) = run(&mut ontoslice(&["-o", &o, "verbalize", "--catalog"]));
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 11 + 18 + 17);
    let (_, names, _) = run(&mut ontoslice(&[
        "-o",
        &o,
        "verbalize",
        "--catalog",
        "--names-only",
    ]));
    assert!(names.len() < out.len());
    let (code, formal, _) = run(&mut ontoslice(&["-o", &o, "verbalize", "--formal"]));
    assert_eq!(code, 0);
    assert_eq!(
        ontoslice::parse_turtle(&formal).unwrap().ontology,
        ontoslice::synthgen::toy_ontology()
    );
}
