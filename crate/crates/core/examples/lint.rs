//! Classify broken formulas and collect corpus-level lints.
use folforge::diagnostics::{lint_corpus, lint_formula, taxonomy_report};
use folforge::{parse, Diagnostic};

fn main() {
    let texts = [
        "∀x (Dog(x) → Barks(x)",
        "Dog(x) → Barks(x)",
        "Loves(anna)",
        "Loves(anna, bob)",
        "∀x ∀y Friend(x)",
    ];
    let mut all: Vec<Diagnostic> = Vec::new();
    let mut parsed = Vec::new();
    for t in texts {
        match parse(t) {
            Ok(f) => {
                for d in lint_formula(&f) {
                    println!("{t:<28} {d}");
                    all.push(d);
                }
                parsed.push(f);
            }
            Err(d) => {
                println!("{t:<28} {d}");
                all.push(d);
            }
        }
    }
    for d in lint_corpus(&parsed, &[]) {
        println!("{:<28} {d}", "(corpus)");
        all.push(d);
    }
    print!("\n{}", taxonomy_report(&all).to_csv());
}
