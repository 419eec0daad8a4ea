mod common;

use common::{any_formula, clean_formula, instance, Vocabulary, CONSTANTS};
use folforge::augment::split_record;
use folforge::extraction::{extract, Pair, Translation};
use folforge::perturb::{perturb_fol, PerturbKind};
use folforge::pipeline::Record;
use folforge::reasoner::{oracle_prove, oracle_satisfiable, prove, Budget, Label, Outcome};
use folforge::syntax::{clausify, parse, print, PrintStyle};
use proptest::prelude::*;

proptest! {
    #[test]
    fn print_parse_round_trip(f in any_formula()) {
        let unicode = print(&f, PrintStyle::Unicode);
        prop_assert_eq!(parse(&unicode).unwrap(), f.clone(), "{}", unicode);
        let ascii = print(&f, PrintStyle::Ascii);
        prop_assert_eq!(parse(&ascii).unwrap(), f.expand_xor(), "{}", ascii);
    }

    #[test]
    fn clausify_preserves_satisfiability(f in clean_formula(Vocabulary { constants: CONSTANTS[..2].to_vec(), functions: false }, 3)) {
        let cs = clausify(&f);
        let as_formula = cs.as_formula();
        let clauses_sat = match &as_formula {
            None => Ok(true),
            Some(g) => oracle_satisfiable(std::slice::from_ref(g)),
        };
        let direct = oracle_satisfiable(std::slice::from_ref(&f));
        // The oracle cannot evaluate skolem functions; those cases are skipped.
        prop_assume!(clauses_sat.is_ok() && direct.is_ok());
        prop_assert_eq!(clauses_sat.unwrap(), direct.unwrap(), "{} ~> {}", f, cs);
    }

    #[test]
    fn skolem_symbols_are_fresh(f in any_formula()) {
        let symbols = f.symbols();
        let cs = clausify(&f.universal_closure());
        for name in cs.skolem_map.keys() {
            prop_assert!(!symbols.contains(name), "{} reused in {}", name, f);
        }
    }

    #[test]
    fn extraction_is_idempotent(
        fols in proptest::collection::vec(clean_formula(Vocabulary { constants: CONSTANTS.to_vec(), functions: false }, 3), 1..6),
        prose in "[A-Za-z ,!]{0,40}",
    ) {
        let n = fols.len() - 1;
        let pairs: Vec<Pair> = fols
            .iter()
            .enumerate()
            .map(|(i, f)| Pair::new(print(f, PrintStyle::Unicode), format!("Sentence {i}.")))
            .collect();
        let t = Translation {
            predicates: vec!["P(x)".into(), "Q(x)".into(), "R(x, y)".into()],
            premises: pairs[..n].to_vec(),
            conclusion: pairs[n].clone(),
        };
        let rendered = t.render();
        let once = extract(&rendered, n).unwrap();
        prop_assert_eq!(&once, &t);
        prop_assert_eq!(extract(&once.render(), n).unwrap(), once);
        let wrapped = format!("Here you go{prose}\n\n{rendered}\n\nThat is all.");
        prop_assert_eq!(extract(&wrapped, n).unwrap(), t);
    }

    #[test]
    fn augmentation_invariants(n in 0usize..12) {
        let rec = Record::new("p", (0..n).map(|i| format!("Premise {i}.")).collect(), "End.", Label::Unknown)
            .with_fol((0..n).map(|i| format!("P(c{i})")).collect(), "Q(a)");
        let ex = split_record(&rec).unwrap();
        prop_assert_eq!(ex.len(), n + 2);
        prop_assert!(ex.iter().all(|e| e.input == ex[0].input));
        for w in ex.windows(2) {
            prop_assert!(w[1].output.starts_with(&w[0].output));
        }
        prop_assert_eq!(extract(&ex[n + 1].output, n).unwrap().fols().count(), n + 1);
    }

    #[test]
    fn perturbation_is_deterministic(f in any_formula(), seed in any::<u64>(), k in 0usize..14) {
        let kind = PerturbKind::ALL[k];
        prop_assert_eq!(perturb_fol(&f, kind, seed), perturb_fol(&f, kind, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prover_agrees_with_oracle((premises, conclusion) in instance()) {
        let expected = oracle_prove(&premises, &conclusion);
        prop_assume!(expected.is_ok());
        let got = prove(&premises, &conclusion, &Budget::default());
        prop_assert_eq!(got, expected.unwrap());
    }
}

#[test]
fn oracle_sanity() {
    let p = |s: &str| parse(s).unwrap();
    let premises = [p("Rabbit(rex)"), p("∀x (Rabbit(x) → Furry(x))")];
    assert_eq!(oracle_prove(&premises, &p("Furry(rex)")).unwrap(), Outcome::True);
    assert_eq!(oracle_prove(&premises, &p("¬Rabbit(rex)")).unwrap(), Outcome::False);
    assert_eq!(oracle_prove(&premises, &p("Furry(tom)")).unwrap(), Outcome::Unknown);
}
