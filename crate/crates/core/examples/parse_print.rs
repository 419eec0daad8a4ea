//! Parse a formula in either notation and print it back in both styles.
use folforge::syntax::{clausify, print};
use folforge::{parse, PrintStyle};

fn main() {
    for text in [
        "∀x (Cat(x) ∧ Black(x) → ¬White(x))",
        "all x (Bird(x) -> Flies(x) | Penguin(x))",
        "Mammal(rex) ⊕ Reptile(rex)",
    ] {
        let f = parse(text).expect("well-formed");
        println!("input:   {text}");
        println!("unicode: {}", print(&f, PrintStyle::Unicode));
        println!("ascii:   {}", print(&f, PrintStyle::Ascii));
        println!("clauses: {}\n", clausify(&f));
    }
}
