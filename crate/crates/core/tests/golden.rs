//! End-to-end CLI runs compared byte-for-byte with files under
//! `tests/golden/expected`. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_folforge");

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

struct Case {
    name: &'static str,
    args: &'static str,
    exit: i32,
    /// Files the command writes into the scratch directory.
    outputs: &'static [&'static str],
}

const CASES: &[Case] = &[
    Case {
        name: "prove",
        args: "prove --premises {G}/rabbit_premises.fol --conclusion {G}/rabbit_conclusion.fol",
        exit: 0,
        outputs: &[],
    },
    Case {
        name: "parse",
        args: "parse {G}/formulas.fol",
        exit: 1,
        outputs: &[],
    },
    Case {
        name: "parse_ascii",
        args: "parse --ascii {G}/rabbit_premises.fol",
        exit: 0,
        outputs: &[],
    },
    Case {
        name: "lint",
        args: "lint {G}/formulas.fol",
        exit: 1,
        outputs: &[],
    },
    Case {
        name: "extract",
        args: "extract {G}/raw_generation.txt --premises 2",
        exit: 0,
        outputs: &[],
    },
    Case {
        name: "extract_short",
        args: "extract {G}/raw_generation.txt --premises 3",
        exit: 1,
        outputs: &[],
    },
    Case {
        name: "filter",
        args: "filter --in {G}/records.jsonl --out {T}/kept.jsonl --report {T}/report.json",
        exit: 0,
        outputs: &["kept.jsonl", "report.json"],
    },
    Case {
        name: "stats",
        args: "stats --in {G}/stats_records.jsonl --json {T}/hist.json --csv {T}/hist.csv",
        exit: 0,
        outputs: &["hist.json", "hist.csv"],
    },
    Case {
        name: "augment",
        args: "augment --in {G}/records.jsonl --out {T}/sft.jsonl --report {T}/augment.json",
        exit: 0,
        outputs: &["sft.jsonl", "augment.json"],
    },
    Case {
        name: "perturb",
        args: "perturb --in {G}/records.jsonl --out {T}/verifier.jsonl --seed 7 --profile proofwriter --report {T}/perturb.json",
        exit: 0,
        outputs: &["verifier.jsonl", "perturb.json"],
    },
    Case {
        name: "infer",
        args: "--config {G}/infer.toml infer --in {G}/infer_records.jsonl --playback {G}/playback.jsonl --out {T}/inferred.jsonl --audit {T}/audit.jsonl",
        exit: 0,
        outputs: &["inferred.jsonl", "audit.jsonl"],
    },
];

fn run_case(case: &Case, scratch: &Path) -> (i32, String) {
    let g = golden_dir();
    let args: Vec<String> = case
        .args
        .split(' ')
        .map(|a| {
            a.replace("{G}", g.to_str().unwrap())
                .replace("{T}", scratch.to_str().unwrap())
        })
        .collect();
    let out = Command::new(BIN).args(&args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn check(expected: &Path, actual: &str, failures: &mut Vec<String>) {
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(expected.parent().unwrap()).unwrap();
        std::fs::write(expected, actual).unwrap();
        return;
    }
    match std::fs::read_to_string(expected) {
        Ok(want) if want == actual => {}
        Ok(want) => failures.push(format!("{}:\n--- want\n{want}\n--- got\n{actual}", expected.display())),
        Err(e) => failures.push(format!("{}: {e}", expected.display())),
    }
}

#[test]
fn golden_cli_outputs() {
    let expected = golden_dir().join("expected");
    let mut failures = Vec::new();
    for case in CASES {
        let scratch = tempfile::tempdir().unwrap();
        let (code, stdout) = run_case(case, scratch.path());
        if code != case.exit {
            failures.push(format!("{}: exit {code}, want {}", case.name, case.exit));
        }
        check(&expected.join(format!("{}.stdout", case.name)), &stdout, &mut failures);
        for file in case.outputs {
            let got = std::fs::read_to_string(scratch.path().join(file)).unwrap_or_default();
            check(&expected.join(format!("{}.{file}", case.name)), &got, &mut failures);
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn documented_examples() {
    let scratch = tempfile::tempdir().unwrap();
    let find = |name: &str| CASES.iter().find(|c| c.name == name).unwrap();
    assert_eq!(run_case(find("prove"), scratch.path()), (0, "True\n".into()));

    run_case(find("filter"), scratch.path());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scratch.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["retained"], 7);
    assert_eq!(report["rejected_semantic"], 3);

    let one = scratch.path().join("one.jsonl");
    let kept = std::fs::read_to_string(scratch.path().join("kept.jsonl")).unwrap();
    std::fs::write(&one, kept.lines().next().unwrap()).unwrap();
    let sft = scratch.path().join("sft.jsonl");
    let status = Command::new(BIN)
        .args(["augment", "--in", one.to_str().unwrap(), "--out", sft.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read_to_string(&sft).unwrap().lines().count(), 4);
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "parse", "lint", "prove", "extract", "filter", "stats", "augment", "perturb", "infer",
    ] {
        let out = Command::new(BIN).args([sub, "--help"]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{sub}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains(&format!("Usage: folforge {sub}")), "{sub}: {text}");
    }
}

#[test]
fn usage_errors() {
    let code = |args: &[&str]| Command::new(BIN).args(args).output().unwrap().status.code();
    assert_eq!(code(&["perturb", "--in", "x", "--out", "y"]), Some(2));
    assert_eq!(code(&["prove", "--premises", "/nonexistent"]), Some(2));
    assert_eq!(code(&["nonsense"]), Some(2));
    let cfg = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(cfg.path(), "[reasoner]\nmystery = 1\n").unwrap();
    let g = golden_dir();
    let p = g.join("rabbit_premises.fol");
    let c = g.join("rabbit_conclusion.fol");
    assert_eq!(
        code(&[
            "--config",
            cfg.path().to_str().unwrap(),
            "prove",
            "--premises",
            p.to_str().unwrap(),
            "--conclusion",
            c.to_str().unwrap()
        ]),
        Some(2)
    );
}
