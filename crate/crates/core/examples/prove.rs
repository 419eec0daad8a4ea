//! Decide whether premises entail, refute or leave open a conclusion.
use folforge::{parse, prove, Budget};

fn main() {
    let premises: Vec<_> = ["Rabbit(rex)", "∀x (Rabbit(x) → Furry(x))", "∀x (Furry(x) → ¬Scaly(x))"]
        .iter()
        .map(|s| parse(s).unwrap())
        .collect();
    for c in ["Furry(rex)", "Scaly(rex)", "Furry(tom)"] {
        let outcome = prove(&premises, &parse(c).unwrap(), &Budget::default());
        println!("{c:<12} {outcome:?}");
    }
}
