//! Stepwise inference against a scripted generator, with rule-based
//! verification of every formula as it is produced.
use folforge::augment::Instructions;
use folforge::pipeline::Record;
use folforge::verify::{run_incremental, MockPlayback, RuleCorrector, TokenPolicy, VerifierMode};
use folforge::Label;

fn main() {
    let rec = Record::new(
        "demo",
        vec!["Rex is a rabbit.".into(), "All rabbits are furry.".into()],
        "Rex is furry.",
        Label::True,
    );
    // The second premise is missing its quantifier and closing bracket.
    let generator = MockPlayback::new([
        "Rabbit(x)\nFurry(x)",
        "Rabbit(rex) ::: Rex is a rabbit.",
        "(Rabbit(x) → Furry(x) ::: All rabbits are furry.",
        "Furry(rex) ::: Rex is furry.",
    ]);
    let run = run_incremental(
        &generator,
        &rec,
        VerifierMode::OnOn,
        &RuleCorrector,
        &RuleCorrector,
        &TokenPolicy::default(),
        &Instructions::default(),
    )
    .expect("script covers every step");
    for e in &run.audit {
        println!(
            "step {} {:?} {:?} {}",
            e.step,
            e.phase,
            e.verdict,
            e.replacement.as_deref().unwrap_or("")
        );
    }
    println!("\n{}", run.translation.render());
}
