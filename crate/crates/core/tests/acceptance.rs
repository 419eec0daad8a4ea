//! Acceptance criteria. One PASS/FAIL line per criterion; exits nonzero if
//! any criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{any_formula, clean_formula, instance, sample, Vocabulary, CONSTANTS};
use folforge::augment::{augment_corpus, Instructions};
use folforge::diagnostics::{lint_corpus, lint_formula, ErrorKind, PredicateDecl};
use folforge::extraction::{Pair, Translation};
use folforge::jsonl;
use folforge::perturb::{perturb_fol, PerturbKind};
use folforge::pipeline::{analyze_record, build_dataset, FilterOutcome, PipelineConfig, Record};
use folforge::reasoner::{oracle_prove, prove, Budget, Label};
use folforge::syntax::{parse, print, Formula, PrintStyle};
use folforge::verify::{run_incremental, MockCorrector, MockPlayback, Run, TokenPolicy, VerifierMode};

type Verdict = Result<String, String>;

fn p(s: &str) -> Formula {
    parse(s).unwrap_or_else(|d| panic!("{s}: {d}"))
}

fn ps(ss: &[&str]) -> Vec<Formula> {
    ss.iter().map(|s| p(s)).collect()
}

fn label(premises: &[&str], conclusion: &str) -> Label {
    prove(&ps(premises), &p(conclusion), &Budget::default())
        .label()
        .expect("decidable instance")
}

/// Kind attributed to a generation whose formulas are `error` when the
/// reference translation is `gold`.
fn sense_kind(error: &[&str], gold: &[&str]) -> Option<ErrorKind> {
    let (ep, ec) = error.split_at(error.len() - 1);
    let (gp, gc) = gold.split_at(gold.len() - 1);
    let pair = |f: &&str| Pair::new(*f, "A sentence.");
    let raw = Translation {
        predicates: PredicateDecl::from_formulas(&ps(error))
            .iter()
            .map(ToString::to_string)
            .collect(),
        premises: ep.iter().map(pair).collect(),
        conclusion: pair(&ec[0]),
    }
    .render();
    let rec = Record::new("s", vec![String::new(); ep.len()], "", label(gp, gc[0]))
        .with_fol(gp.iter().map(|s| s.to_string()).collect(), gc[0])
        .with_raw_generation(raw);
    match analyze_record(&rec, &PipelineConfig::default()).outcome {
        FilterOutcome::Rejected(r) => r.diagnostics.first().map(|d| d.kind),
        FilterOutcome::Retained(_) => None,
    }
}

fn taxonomy() -> Verdict {
    let parse_kind = |s: &str| parse(s).err().map(|d| d.kind);
    let lint_kinds = |s: &str| lint_formula(&p(s)).into_iter().map(|d| d.kind).collect::<Vec<_>>();
    let corpus_kinds = |ss: &[&str]| {
        lint_corpus(&ps(ss), &[])
            .into_iter()
            .map(|d| d.kind)
            .collect::<Vec<_>>()
    };
    let cases: Vec<(ErrorKind, bool)> = vec![
        (
            ErrorKind::MissingQuantifier,
            lint_kinds("BerkeleyCollege(x) ∧ ResidentialCollegeAt(x, yaleUniversity)")
                == [ErrorKind::MissingQuantifier],
        ),
        (
            ErrorKind::ParenthesisImbalance,
            parse_kind("BeneficialTo(cherry, people) ⊕ On(cherry, warningList)) → ¬RedFruit(cherry)")
                == Some(ErrorKind::ParenthesisImbalance),
        ),
        (
            ErrorKind::CompletionError,
            parse_kind("∀x (Athlete(x) → ¬NeverExercises(x)) Never: does not exist a time")
                == Some(ErrorKind::CompletionError),
        ),
        (
            ErrorKind::QuantifierLocation,
            lint_kinds("∃y (Own(emily, y) ∧ Roommate(y)) → ∃y (Own(emily, y) ∧ LiveIn(emily, apartment))")
                .contains(&ErrorKind::QuantifierLocation),
        ),
        (
            ErrorKind::MissingVariable,
            lint_kinds("∀x ∃y (In(indonesia) ∧ Prosecutor(x) ∧ SpecialCrime(y) → InvestigatePersonally(x, y))")
                == [ErrorKind::MissingVariable],
        ),
        (
            ErrorKind::SpecialToken,
            parse_kind("Endowment(yale, 42.3 billion)") == Some(ErrorKind::SpecialToken),
        ),
        (
            ErrorKind::UnknownOperator,
            parse_kind("∀x (Rating(x, y) ∧ y > 4 → Listed(x))") == Some(ErrorKind::UnknownOperator),
        ),
        (
            ErrorKind::PredicateError,
            sense_kind(
                &[
                    "¬Solid2Pointers(jack) ∧ Successful3Pointers(jack)",
                    "GoodAt(jack, threes)",
                ],
                &["¬GoodAt(jack, twos) ∧ GoodAt(jack, threes)", "GoodAt(jack, threes)"],
            ) == Some(ErrorKind::PredicateError),
        ),
        (
            ErrorKind::IncorrectQuantifier,
            sense_kind(
                &[
                    "∃x (FleaBeetle(x) → ¬InFamily(x, chrysomelidae))",
                    "FleaBeetle(flea)",
                    "¬InFamily(flea, chrysomelidae)",
                ],
                &[
                    "∀x (FleaBeetle(x) → ¬In(x, chrysomelidaeFamily))",
                    "FleaBeetle(flea)",
                    "¬In(flea, chrysomelidaeFamily)",
                ],
            ) == Some(ErrorKind::IncorrectQuantifier),
        ),
        (
            ErrorKind::PredicateMismatch,
            sense_kind(
                &["¬High(NewHaven)", "Low(towerA)", "¬High(towerA)"],
                &["¬High(NewHaven)", "¬High(towerA)", "¬High(towerA)"],
            ) == Some(ErrorKind::PredicateMismatch),
        ),
        (
            ErrorKind::ArityMismatch,
            corpus_kinds(&[
                "Sees(Tiger, Mouse)",
                "∀x(((Visits(x, Rabbit)) ∧ (Sees(Mouse))) → (Visits(x, Tiger)))",
            ])
            .contains(&ErrorKind::ArityMismatch),
        ),
        (
            ErrorKind::SubjectPredicate,
            corpus_kinds(&["Platypus(platypus) ∧ ¬Teeth(platypus) ∧ Mammal(platypus)"])
                == [ErrorKind::SubjectPredicate],
        ),
    ];
    let missed: Vec<String> = cases.iter().filter(|(_, ok)| !ok).map(|(k, _)| k.to_string()).collect();
    let hit = cases.len() - missed.len();
    if missed.is_empty() {
        Ok(format!("{hit}/12 kinds"))
    } else {
        Err(format!("{hit}/12 kinds; missed {}", missed.join(", ")))
    }
}

fn round_trip() -> Verdict {
    let formulas = sample(&any_formula(), 1000, 2);
    let mut failures = 0;
    let mut max_depth = 0;
    for f in &formulas {
        max_depth = max_depth.max(f.depth());
        let u = parse(&print(f, PrintStyle::Unicode)).ok();
        let a = parse(&print(f, PrintStyle::Ascii)).ok();
        if u.as_ref() != Some(f) || a != Some(f.expand_xor()) {
            failures += 1;
        }
    }
    let msg = format!(
        "{}/1000 identical in both styles, max depth {max_depth}",
        1000 - failures
    );
    if failures == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn prover_oracle() -> Verdict {
    // Instances outside the oracle's fragment are redrawn.
    let mut checked = 0;
    let mut redrawn = 0;
    let mut disagreements = Vec::new();
    let mut seed = 3u8;
    while checked < 200 {
        for (premises, conclusion) in sample(&instance(), 100, seed) {
            if checked == 200 {
                break;
            }
            let Ok(want) = oracle_prove(&premises, &conclusion) else {
                redrawn += 1;
                continue;
            };
            checked += 1;
            let got = prove(&premises, &conclusion, &Budget::default());
            if got != want {
                disagreements.push(format!("{got} vs oracle {want}"));
            }
        }
        seed += 1;
    }
    let msg = format!("{}/200 agree ({redrawn} redrawn)", 200 - disagreements.len());
    if disagreements.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {}", disagreements.join("; ")))
    }
}

fn corpus(sizes: impl Iterator<Item = usize>) -> Vec<Record> {
    sizes
        .enumerate()
        .map(|(i, n)| {
            Record::new(
                format!("a{i}"),
                (0..n).map(|j| format!("S{j}.")).collect(),
                "C.",
                Label::Unknown,
            )
            .with_fol((0..n).map(|j| format!("P(c{j})")).collect(), "Q(a)")
        })
        .collect()
}

fn augmentation() -> Verdict {
    let long: Vec<usize> = (0..1000).map(|i| 15 + i % 7).collect();
    let short: Vec<usize> = (0..1000).map(|i| if i % 10 < 7 { 5 } else { 6 }).collect();
    let mut lines = Vec::new();
    let mut ok = true;
    for (sizes, target) in [(long, 20.0), (short, 7.0)] {
        let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
        let expected: usize = sizes.iter().map(|n| n + 2).sum();
        let (examples, report) = augment_corpus(corpus(sizes.into_iter()), &Instructions::default());
        let within = (report.growth - target).abs() / target <= 0.05;
        ok &= examples.len() == expected && within;
        lines.push(format!(
            "mean {mean:.1}: {} examples (Σ(n+2)={expected}), growth {:.2}x vs {target}x",
            examples.len(),
            report.growth
        ));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn rabbit(i: usize, gold: Label) -> Record {
    let n = format!("r{i}");
    Record::new(
        format!("p{i}"),
        vec![format!("{n} is a rabbit."), "Rabbits are furry.".into()],
        format!("{n} is furry."),
        gold,
    )
    .with_fol(
        vec![format!("Rabbit({n})"), "∀x (Rabbit(x) → Furry(x))".into()],
        format!("Furry({n})"),
    )
}

fn pipeline_corpus() -> Vec<Record> {
    (0..100)
        .map(|i| match i % 10 {
            0..=4 => rabbit(i, Label::True),
            5..=7 => rabbit(i, Label::False),
            8 => {
                let mut r = rabbit(i, Label::True);
                r.premises_fol.as_mut().unwrap()[1] = "∀x (Rabbit(x) → Furry(x)".into();
                r
            }
            _ => {
                let mut r = rabbit(i, Label::True);
                r.premises_fol.as_mut().unwrap().pop();
                r
            }
        })
        .collect()
}

fn filtering() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let kept = dir.path().join("kept.jsonl");
    let cfg = PipelineConfig::default();
    let r = build_dataset(pipeline_corpus(), &kept, &cfg).unwrap();
    let again = build_dataset(
        jsonl::read::<Record>(&kept).unwrap(),
        &dir.path().join("again.jsonl"),
        &cfg,
    )
    .unwrap();
    let msg = format!(
        "{} retained / {} semantic / {} syntax / {} format; re-filter keeps {}/{}",
        r.retained, r.rejected_semantic, r.rejected_syntax, r.rejected_format, again.retained, again.input
    );
    let counts = (r.retained, r.rejected_semantic, r.rejected_syntax, r.rejected_format);
    if counts == (50, 30, 10, 10) && again.retained == again.input && again.input == 50 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn detected(original: &Formula, kind: PerturbKind, text: &str) -> bool {
    let expected = kind.expected_diagnostics();
    match parse(text) {
        Err(d) => expected.contains(&d.kind),
        Ok(g) => {
            let decls = PredicateDecl::from_formulas([original]);
            let mut ds = lint_formula(&g);
            ds.extend(lint_corpus(&[g], &decls));
            ds.iter().any(|d| expected.contains(&d.kind))
        }
    }
}

fn flips(kind: PerturbKind, premises: &[&str], conclusion: &str) -> bool {
    let before = label(premises, conclusion);
    (0..16).any(|seed| {
        premises.iter().enumerate().any(|(i, target)| {
            let Some(text) = perturb_fol(&p(target), kind, seed) else {
                return false;
            };
            let mut changed: Vec<String> = premises.iter().map(|s| s.to_string()).collect();
            changed[i] = text;
            let refs: Vec<&str> = changed.iter().map(String::as_str).collect();
            label(&refs, conclusion) != before
        })
    })
}

fn detectability() -> Verdict {
    let vocab = || Vocabulary {
        constants: CONSTANTS.to_vec(),
        functions: false,
    };
    let formulas = sample(&clean_formula(vocab(), 4), 100, 5);
    let syntactic = PerturbKind::ALL
        .into_iter()
        .filter(|k| !k.is_predicate_kind() && !k.expected_diagnostics().is_empty());
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in syntactic {
        let (mut applied, mut hits) = (0, 0);
        for (i, f) in formulas.iter().enumerate() {
            if let Some(text) = perturb_fol(f, kind, i as u64) {
                applied += 1;
                hits += usize::from(detected(f, kind, &text));
            }
        }
        ok &= applied > 0 && hits == applied;
        parts.push(format!("{kind} {hits}/{applied}"));
    }
    let swap = flips(
        PerturbKind::SwapOperators,
        &["Rabbit(rex)", "∀x (Rabbit(x) ∧ Furry(x))"],
        "Rabbit(tom)",
    ) && flips(
        PerturbKind::SwapOperators,
        &["Rabbit(rex)", "∀x (Rabbit(x) → Furry(x))"],
        "Rabbit(tom)",
    );
    let negation = flips(
        PerturbKind::AddOrOmitNegation,
        &["Rabbit(rex)", "∀x (Rabbit(x) → Furry(x))"],
        "Furry(rex)",
    );
    ok &= swap && negation;
    parts.push(format!("SwapOperators flips label: {swap}"));
    parts.push(format!("AddOrOmitNegation flips label: {negation}"));
    let msg = parts.join(", ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn verifier_modes() -> Verdict {
    let rec = Record::new(
        "v",
        vec!["Rex is a rabbit.".into(), "All rabbits are very furry animals.".into()],
        "Rex is furry.",
        Label::True,
    );
    let script = || {
        MockPlayback::new([
            "Rabbit(x)\nFurry(x)",
            "Rabbit(rex) ::: Rex is a rabbit.",
            "∃x (Rabbit(x) → Furry(x)) ::: All rabbits are very furry animals.",
            "Furry(rex) ::: Rex is furry.",
        ])
    };
    let fixer = MockCorrector::new([("∃x (Rabbit(x) → Furry(x))", "∀x (Rabbit(x) → Furry(x))")]);
    let run = |mode, g: &MockPlayback| -> Run {
        run_incremental(
            g,
            &rec,
            mode,
            &MockCorrector::default(),
            &fixer,
            &TokenPolicy::default(),
            &Instructions::default(),
        )
        .unwrap()
    };
    let (on, off) = (script(), script());
    let run_on = run(VerifierMode::OnOn, &on);
    let run_off = run(VerifierMode::OnOff, &off);
    let (pon, poff) = (on.calls(), off.calls());
    let corrected = "∀x (Rabbit(x) → Furry(x)) ::: All rabbits";
    let original = "∃x (Rabbit(x) → Furry(x)) ::: All rabbits";
    let steps = pon.len() == 4 && poff.len() == 4;
    let same_before = pon[..3] == poff[..3];
    let feeds_on = pon[3].0.contains(corrected);
    let stale_off = poff[3].0.contains(original) && !poff[3].0.contains(corrected);
    let finals = run_on.translation == run_off.translation && run_off.translation.premises[1].fol.starts_with('∀');
    let msg = format!(
        "steps {}/{} (want 4), prompts before error equal: {same_before}, OnOn feeds correction: {feeds_on}, OnOff prompt keeps original: {stale_off}, final translations corrected: {finals}",
        pon.len(),
        poff.len()
    );
    if steps && same_before && feeds_on && stale_off && finals {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_folforge"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut records = pipeline_corpus();
    records.extend((100..400).map(|i| rabbit(i, if i % 3 == 0 { Label::False } else { Label::True })));
    jsonl::write(Path::new(&d("in.jsonl")), &records).unwrap();
    let input = d("in.jsonl");
    let mut mismatched = Vec::new();
    let commands: [(&str, Vec<&str>); 3] = [
        ("filter", vec!["filter", "--in", &input, "--report"]),
        ("perturb", vec!["perturb", "--in", &input, "--seed", "7", "--report"]),
        ("augment", vec!["augment", "--in", &input, "--report"]),
    ];
    for (name, base) in commands {
        let mut outputs = Vec::new();
        for (run, workers) in [(0, "1"), (1, "1"), (2, "4")] {
            let out = d(&format!("{name}{run}.jsonl"));
            let report = d(&format!("{name}{run}.json"));
            let mut args = base.clone();
            args.extend([report.as_str(), "--out", &out, "--workers", workers]);
            if !cli(&args) {
                mismatched.push(format!("{name} failed"));
                continue;
            }
            outputs.push((std::fs::read(&out).unwrap(), std::fs::read(&report).unwrap()));
        }
        if outputs.len() != 3 || outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatched.push(name.to_string());
        }
    }
    if mismatched.is_empty() {
        Ok(format!(
            "filter, perturb --seed 7, augment byte-identical over {} records, workers 1/1/4",
            records.len()
        ))
    } else {
        Err(format!("differs: {}", mismatched.join(", ")))
    }
}

type Criterion = (&'static str, fn() -> Verdict, Option<Duration>);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 taxonomy coverage", taxonomy, Some(Duration::from_secs(1))),
        ("2 parser round-trip", round_trip, Some(Duration::from_secs(5))),
        (
            "3 prover-oracle equivalence",
            prover_oracle,
            Some(Duration::from_secs(60)),
        ),
        ("4 augmentation arithmetic", augmentation, None),
        ("5 pipeline filtering", filtering, None),
        ("6 perturbation detectability", detectability, None),
        ("7 verifier-mode semantics", verifier_modes, None),
        ("8 determinism", determinism, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let verdict = match (verdict, limit) {
            (Ok(m), Some(l)) if elapsed > l => Err(format!("{m}; took {elapsed:.2?}, limit {l:?}")),
            (v, _) => v,
        };
        match verdict {
            Ok(m) => println!("PASS {name}: {m} ({elapsed:.2?})"),
            Err(m) => {
                failed += 1;
                println!("FAIL {name}: {m} ({elapsed:.2?})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
