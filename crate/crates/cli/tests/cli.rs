//! Black-box runs of the `meso` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

/// Runs `meso` from `dir` so no stray `meso.toml` is picked up.
fn meso_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meso"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_lists_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = meso_in(dir.path(), &["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for sub in [
        "validate", "map", "extract", "coverage", "review", "evaluate", "kappa", "unmapped",
        "seed", "fixtures",
    ] {
        assert!(text.contains(sub), "missing {sub}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(meso_in(dir.path(), &[]).status.code(), Some(2));
    assert_eq!(meso_in(dir.path(), &["validate"]).status.code(), Some(2));
    assert_eq!(meso_in(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn seed_validates_clean_and_a_cycle_fails() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.json");
    assert!(meso_in(dir.path(), &["seed", "--out", path(&seed)])
        .status
        .success());
    let out = meso_in(dir.path(), &["validate", path(&seed), "--profile", "meso"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("0 pitfalls"));

    let cyclic = dir.path().join("cyclic.json");
    std::fs::write(
        &cyclic,
        r#"{"name":"t","version":"1","concepts":[
            {"id":"STRONG:000001","label":"Alpha","parent_ids":["STRONG:000002"]},
            {"id":"STRONG:000002","label":"Beta","parent_ids":["STRONG:000001"]}]}"#,
    )
    .unwrap();
    let out = meso_in(dir.path(), &["validate", path(&cyclic)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("CYCLE"), "{}", stdout(&out));
}

#[test]
fn config_precedence_flag_over_file_over_default() {
    let dir = tempfile::tempdir().unwrap();
    let shown = |args: &[&str]| {
        let mut all = vec!["--show-config"];
        all.extend_from_slice(args);
        let out = meso_in(dir.path(), &all);
        assert!(out.status.success());
        stdout(&out)
    };
    assert!(shown(&[]).contains("parallelism = \"4\""));

    std::fs::write(
        dir.path().join("meso.toml"),
        "parallelism = 7\nllm_model = \"m\"\n",
    )
    .unwrap();
    let text = shown(&[]);
    assert!(text.contains("parallelism = \"7\""));
    assert!(text.contains("llm_model = \"m\""));

    let text = shown(&["--parallelism", "2"]);
    assert!(text.contains("parallelism = \"2\""));
    assert!(text.contains("llm_model = \"m\""));

    std::fs::write(dir.path().join("bad.toml"), "no_such_key = 1\n").unwrap();
    let out = meso_in(dir.path(), &["--config", "bad.toml", "--show-config"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_idempotent_and_inputs_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let posts = fixtures().join("extraction/posts.jsonl");
    let before = std::fs::read(&posts).unwrap();
    let canned = fixtures().join("extraction/canned");
    let records = dir.path().join("records.jsonl");
    let unmapped = dir.path().join("unmapped.json");
    let mut seen = Vec::new();
    for _ in 0..2 {
        let out = meso_in(
            dir.path(),
            &[
                "extract",
                "--input",
                path(&posts),
                "--fixtures",
                path(&canned),
                "--out",
                path(&records),
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let out = meso_in(
            dir.path(),
            &[
                "unmapped",
                "--records",
                path(&records),
                "--out",
                path(&unmapped),
            ],
        );
        assert!(out.status.success());
        seen.push((
            std::fs::read(&records).unwrap(),
            std::fs::read(&unmapped).unwrap(),
        ));
    }
    assert_eq!(seen[0], seen[1]);
    assert_eq!(std::fs::read(&posts).unwrap(), before);

    let sheet = dir.path().join("sheet.csv");
    let out = meso_in(
        dir.path(),
        &[
            "review",
            "init",
            "--records",
            path(&records),
            "--out",
            path(&sheet),
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(&sheet).unwrap();
    assert_eq!(text.lines().count(), 1 + 199);
    assert!(text.starts_with("post_id,category,item_index,phrase,label,hallucination,note"));
}

#[test]
fn evaluate_and_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let eval = fixtures().join("evaluation");
    let a = eval.join("reviewer_a.csv");
    let b = eval.join("reviewer_b.csv");
    let out = meso_in(
        dir.path(),
        &[
            "evaluate",
            "--sheet",
            path(&eval.join("table3_adjudicated.csv")),
            "--reviewer-a",
            path(&a),
            "--reviewer-b",
            path(&b),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("172"));
    assert!(text.contains("78.18"));

    let out = meso_in(dir.path(), &["kappa", "--a", path(&a), "--b", path(&b)]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.905888");
    let out = meso_in(dir.path(), &["kappa", "--a", path(&a), "--b", path(&a)]);
    assert_eq!(stdout(&out).trim(), "1.000000");
}

#[test]
fn map_and_coverage_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = meso_in(dir.path(), &["map", "--term", "insomnia"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("Exact"), "{}", stdout(&out));

    let report = dir.path().join("coverage.json");
    let docs = fixtures().join("coverage/docs");
    for _ in 0..2 {
        let out = meso_in(
            dir.path(),
            &[
                "coverage",
                "--docs",
                path(&docs),
                "--k",
                "5",
                "--out",
                path(&report),
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["k"], 5);
    assert_eq!(json["documents"], 5);
    assert!(json["report"]["total_keywords"].as_u64().unwrap() > 0);
}
