use std::path::{Path, PathBuf};
use std::process::Command;

use cogmaplint_core::model::{CausalDiagram, Code, Severity};
use cogmaplint_core::report::parse_json;
use cogmaplint_core::synth::PlantLedger;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn inputs(dir: &Path, maps: &[&str], relations: &[&str]) -> Vec<String> {
    let mut args = Vec::new();
    for m in maps {
        args.extend(["--map".to_string(), dir.join(m).display().to_string()]);
    }
    for r in relations {
        args.extend(["--relations".to_string(), dir.join(r).display().to_string()]);
    }
    args.extend([
        "--spec".to_string(),
        dir.join("spec.cdsl").display().to_string(),
    ]);
    args
}

fn blight() -> Vec<String> {
    inputs(
        &fixtures().join("blight"),
        &["map.csv", "map_prose.csv"],
        &["relations.csv", "relations_prose.csv"],
    )
}

fn clean() -> Vec<String> {
    inputs(&fixtures().join("clean"), &["map.csv"], &["relations.csv"])
}

fn run(cmd: &str, input: &[String], extra: &[&str]) -> (i32, String, String) {
    let mut args = vec!["cogmaplint".to_string(), cmd.to_string()];
    args.extend(input.iter().cloned());
    args.extend(extra.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let status = cogmaplint::run(args, &mut out, &mut err);
    (
        status,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn blight_fixture_fails_with_cycles_in_text() {
    let (status, out, _) = run("lint", &blight(), &[]);
    assert_eq!(status, 1);
    assert!(out.lines().any(|l| l.starts_with("error[R4-CYCLE]")));
    assert!(out.lines().last().unwrap().starts_with("summary: "));
}

#[test]
fn clean_fixture_passes_even_with_warnings_as_errors() {
    let (status, out, _) = run(
        "lint",
        &clean(),
        &["--format", "json", "--warnings-as-errors"],
    );
    assert_eq!(status, 0);
    let doc = parse_json(&out).unwrap();
    assert!(doc.diagnostics.is_empty());
    assert_eq!(doc.inputs.len(), 3);
}

#[test]
fn json_report_is_byte_stable() {
    let first = run("lint", &blight(), &["--format", "json"]).1;
    assert_eq!(first, run("lint", &blight(), &["--format", "json"]).1);
    let doc = parse_json(&first).unwrap();
    assert_eq!(
        doc.summary.count(Severity::Error),
        doc.diagnostics
            .iter()
            .filter(|d| d.severity() == Severity::Error)
            .count()
    );
}

#[test]
fn missing_spec_is_a_usage_failure_naming_the_path() {
    let mut args = blight();
    let last = args.len() - 1;
    args[last] = "/nonexistent/spec.cdsl".into();
    let (status, out, err) = run("lint", &args, &[]);
    assert_eq!(status, 2);
    assert!(out.is_empty());
    assert!(err.contains("/nonexistent/spec.cdsl"), "{err}");
}

#[test]
fn bad_flags_and_overrides_are_usage_failures() {
    assert_eq!(run("lint", &blight(), &["--bogus"]).0, 2);
    assert_eq!(run("lint", &blight(), &["--max-path-len", "2"]).0, 2);
    assert_eq!(
        run("lint", &blight(), &["--near-dup-threshold", "1.5"]).0,
        2
    );
    assert_eq!(run("lint", &blight(), &["--format", "xml"]).0, 2);
    assert_eq!(run("export", &blight(), &[]).0, 2);
}

#[test]
fn help_goes_to_stdout() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(
        cogmaplint::run(["cogmaplint", "--help"], &mut out, &mut err),
        0
    );
    assert!(String::from_utf8(out).unwrap().contains("lint"));
    assert!(err.is_empty());
}

#[test]
fn warnings_as_errors_changes_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    // a near-duplicate pair is a warning and nothing else
    let (status, _, err) = run(
        "synth",
        &[],
        &[
            "--seed",
            "3",
            "--vars",
            "4",
            "--plant",
            "R1-NEARDUP=1",
            "-o",
            &out,
        ],
    );
    assert_eq!(status, 0, "{err}");
    let input = inputs(dir.path(), &["map.csv"], &["relations.csv"]);
    assert_eq!(run("lint", &input, &[]).0, 0);
    assert_eq!(run("lint", &input, &["--warnings-as-errors"]).0, 1);
}

#[test]
fn exported_json_diagram_lints_like_the_lifted_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diagram.json");
    let (status, _, err) = run("export", &blight(), &["--json", path.to_str().unwrap()]);
    assert_eq!(status, 0, "{err}");
    let text = std::fs::read_to_string(&path).unwrap();
    CausalDiagram::from_json(&text).unwrap();

    let lifted = parse_json(&run("lint", &blight(), &["--format", "json"]).1).unwrap();
    let loaded = parse_json(
        &run(
            "lint",
            &blight(),
            &["--format", "json", "--diagram", path.to_str().unwrap()],
        )
        .1,
    )
    .unwrap();
    assert_eq!(lifted.diagnostics, loaded.diagnostics);
}

#[test]
fn dot_export_to_stdout() {
    let (status, out, _) = run("export", &blight(), &["--dot", "-"]);
    assert_eq!(status, 0);
    assert!(out.starts_with("digraph causal_diagram {"));
    assert!(out.contains("\"UrbanPolicies\" -> \"Inspections\""));
    assert!(out.contains("\"Abandoned Housing\" [shape=box, style=dashed"));
}

#[test]
fn paths_and_splits() {
    let (status, out, _) = run(
        "paths",
        &blight(),
        &["--from", "Vacancy", "--to", "Infrastructure"],
    );
    assert_eq!(status, 0);
    assert!(
        out.contains("Vacancy -> Abandoned Housing -> Infrastructure"),
        "{out}"
    );
    assert_eq!(
        run(
            "paths",
            &blight(),
            &["--from", "Nowhere", "--to", "Vacancy"]
        )
        .0,
        2
    );

    let (status, out, _) = run("suggest-splits", &blight(), &[]);
    assert_eq!(status, 0);
    assert!(out.contains("reclassify `Abandoned Housing`"), "{out}");
}

#[test]
fn synthetic_plants_are_recalled_through_the_binary() {
    let codes = [
        "NAME-UNRESOLVED",
        "CLUSTER-OVERLAP",
        "R1-DUP",
        "R1-UNASSIGNED",
        "R1-NEARDUP",
        "R2-MISPLACED",
        "R3-UNSUPPORTED",
        "R3-MEDIATED",
        "R3-UNTYPED-ARTIFICIAL",
        "R4-TRANSITIVITY",
        "R4-CYCLE",
    ];
    let plant = codes
        .iter()
        .map(|c| format!("{c}=2"))
        .collect::<Vec<_>>()
        .join(",");
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_cogmaplint");
    let synth = Command::new(bin)
        .args([
            "synth", "--seed", "11", "--vars", "6", "--plant", &plant, "-o",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        synth.status.success(),
        "{}",
        String::from_utf8_lossy(&synth.stderr)
    );
    assert!(dir.path().join("diagram.json").exists());

    let mut args = inputs(dir.path(), &["map.csv"], &["relations.csv"]);
    args.extend([
        "--diagram".into(),
        dir.path().join("diagram.json").display().to_string(),
    ]);
    let lint = Command::new(bin)
        .arg("lint")
        .args(&args)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert_eq!(lint.status.code(), Some(1));
    let doc = parse_json(&String::from_utf8(lint.stdout).unwrap()).unwrap();

    let ledger: PlantLedger =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ledger.json")).unwrap())
            .unwrap();
    assert_eq!(ledger.plants.len(), 2 * codes.len());
    assert!(ledger.missed(&doc.diagnostics).is_empty());
    assert!(doc
        .diagnostics
        .iter()
        .any(|d| d.code == Code::R3UntypedArtificial));
}
