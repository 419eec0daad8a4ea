//! Split one translated record into its incremental training examples.
use folforge::augment::split_record;
use folforge::pipeline::Record;
use folforge::Label;

fn main() {
    let rec = Record::new(
        "demo",
        vec!["Rex is a rabbit.".into(), "All rabbits are furry.".into()],
        "Rex is furry.",
        Label::True,
    )
    .with_fol(
        vec!["Rabbit(rex)".into(), "∀x (Rabbit(x) → Furry(x))".into()],
        "Furry(rex)",
    );
    for ex in split_record(&rec).unwrap() {
        println!("== step {} ({:?})\n{}\n", ex.step, ex.task(), ex.output);
    }
}
