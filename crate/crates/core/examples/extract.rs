//! Pull the predicate, premise and conclusion blocks out of chatty model output.
use folforge::extraction::extract;

const RAW: &str = "Sure! Here is the translation.

Predicates:
Rabbit(x)
Furry(x)
Premises:
Rabbit(rex) ::: Rex is a rabbit.
∀x (Rabbit(x) → Furry(x)) ::: All rabbits are furry.
Conclusion:
Furry(rex) ::: Rex is furry.

Let me know if you need anything else.";

fn main() {
    match extract(RAW, 2) {
        Ok(t) => println!("{}", t.render()),
        Err(diags) => diags.iter().for_each(|d| eprintln!("{d}")),
    }
    // Declaring three premises when only two are present is a format error.
    if let Err(diags) = extract(RAW, 3) {
        println!("\nwith 3 premises: {}", diags[0]);
    }
}
