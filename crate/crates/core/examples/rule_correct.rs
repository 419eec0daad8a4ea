//! The rule-based corrector on its own, fed verifier contexts directly.
//! Arity repairs need a bound variable to pad with, so a ground formula
//! with a missing argument stays unrepaired.
use folforge::perturb::{fol_context, VerifierTask};
use folforge::verify::rule_correct;

fn main() {
    let preds = vec!["Owns(x, y)".to_string(), "Cat(x)".to_string()];
    for fol in [
        "Owns(anna, tom) ∧ Cat(tom)",
        "Owns(anna) ∧ Cat(tom)",
        "∀x (Cat(x) → Owns(x))",
        "Cat(x) → Owns(anna, x",
    ] {
        let ctx = fol_context(&preds, fol, "Anna owns a cat.");
        println!("{fol:<28} {:?}", rule_correct(VerifierTask::Fol, &ctx));
    }
}
