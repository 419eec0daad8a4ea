//! Run silver records through the filter and show why each was kept or dropped.
use folforge::pipeline::{filter_record, FilterOutcome, PipelineConfig, Record};
use folforge::Label;

fn main() {
    let premises = vec!["Rex is a rabbit.".to_string(), "All rabbits are furry.".to_string()];
    let base = || Record::new("r", premises.clone(), "Rex is furry.", Label::True);
    let records = [
        base().with_fol(
            vec!["Rabbit(rex)".into(), "∀x (Rabbit(x) → Furry(x))".into()],
            "Furry(rex)",
        ),
        base().with_fol(
            vec!["Rabbit(rex)".into(), "∀x (Rabbit(x) → Furry(x)".into()],
            "Furry(rex)",
        ),
        base().with_fol(
            vec!["Rabbit(rex)".into(), "∀x (Rabbit(x) → Furry(x))".into()],
            "¬Furry(rex)",
        ),
        base().with_fol(
            vec!["Rabbit(rex)".into(), "∀x (Rabbit(x) → Furry(x))".into()],
            "Furry(rex, tom)",
        ),
    ];
    let cfg = PipelineConfig::default();
    for (i, r) in records.iter().enumerate() {
        match filter_record(r, &cfg) {
            FilterOutcome::Retained(_) => println!("#{i} retained"),
            FilterOutcome::Rejected(rej) => {
                let first = rej.diagnostics.first().map(|d| d.to_string()).unwrap_or_default();
                println!("#{i} rejected at {:?} ({:?}) {first}", rej.stage, rej.reason);
            }
        }
    }
}
