//! Apply every perturbation recipe with a fixed seed: predicate-list recipes
//! to a declaration list, formula recipes to a formula.
use folforge::perturb::{perturb_fol, perturb_predicates, PerturbKind};
use folforge::{parse, PredicateDecl};

fn main() {
    let preds: Vec<PredicateDecl> = ["Rabbit(x)", "Likes(x, y)", "Furry(x)"]
        .iter()
        .map(|p| PredicateDecl::parse(p).unwrap())
        .collect();
    let rule = parse("∀x (Rabbit(x) ∧ Likes(x, carrot) → Furry(x))").unwrap();
    let fact = parse("Likes(rex, carrot)").unwrap();
    for kind in PerturbKind::ALL {
        let out = if kind.is_predicate_kind() {
            perturb_predicates(&preds, kind, 7)
                .map(|ps| ps.iter().map(ToString::to_string).collect::<Vec<_>>().join("  "))
        } else {
            let target = if matches!(kind, PerturbKind::OmitArgsFromFacts | PerturbKind::AddOrOmitNegation) {
                &fact
            } else {
                &rule
            };
            perturb_fol(target, kind, 7)
        };
        println!("{:<28} {}", kind.name(), out.as_deref().unwrap_or("(not applicable)"));
    }
}
