//! Incremental training data: one record with `n` premises becomes `n + 2`
//! examples whose outputs grow one statement at a time.
//!
//! Every example of a record has the same input (premises and conclusion).
//! Step 0 outputs the predicate block; step `k` appends the `k`-th premise
//! translation; the last step appends the conclusion, at which point the
//! output equals [`Translation::render`].

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostic, PredicateDecl};
use crate::extraction::{render_predicates, Pair, Translation};
use crate::pipeline::Record;
use crate::syntax::parse;

pub const PREDICATE_INSTRUCTION: &str = "Generate predicates for the given natural language sentences.";
pub const FOL_INSTRUCTION: &str =
    "Given a premise and conclusion, generate the first order logic form of the premises and conclusion.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Instructions {
    pub predicate: String,
    pub fol: String,
}

impl Default for Instructions {
    fn default() -> Self {
        Instructions {
            predicate: PREDICATE_INSTRUCTION.to_string(),
            fol: FOL_INSTRUCTION.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    PredicateGen,
    FolGen,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedExample {
    pub instruction: String,
    pub input: String,
    pub output: String,
    pub source_id: String,
    pub step: usize,
}

impl AugmentedExample {
    pub fn task(&self) -> Task {
        if self.step == 0 {
            Task::PredicateGen
        } else {
            Task::FolGen
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error("record `{0}` has no FOL translation")]
    MissingFol(String),
    #[error("record `{id}`: {diagnostic}")]
    Unparseable { id: String, diagnostic: Diagnostic },
}

/// The shared input of every example: premises then conclusion.
pub fn render_input(premises: &[String], conclusion: &str) -> String {
    let mut s = String::from("Premises:");
    for p in premises {
        s.push('\n');
        s.push_str(p);
    }
    s.push_str("\nConclusion:\n");
    s.push_str(conclusion);
    s
}

/// Instruction-tuning prompt; the model continues after `output_prefix`.
pub fn render_prompt(instruction: &str, input: &str, output_prefix: &str) -> String {
    format!("### Instruction:\n{instruction}\n### Input:\n{input}\n### Output:\n{output_prefix}")
}

/// Output increments, one per step. Joined with `\n` they give the
/// rendered translation.
pub fn output_increments(t: &Translation) -> Vec<String> {
    let mut out = vec![render_predicates(&t.predicates)];
    for (i, p) in t.premises.iter().enumerate() {
        if i == 0 {
            out.push(format!("Premises:\n{}", p.line()));
        } else {
            out.push(p.line());
        }
    }
    let concl = format!("Conclusion:\n{}", t.conclusion.line());
    if t.premises.is_empty() {
        out.push(format!("Premises:\n{concl}"));
    } else {
        out.push(concl);
    }
    out
}

/// The record's gold translation. Predicates are derived from the formulas
/// when the record has none.
pub fn record_translation(rec: &Record) -> Result<Translation, AugmentError> {
    let (Some(pf), Some(cf)) = (&rec.premises_fol, &rec.conclusion_fol) else {
        return Err(AugmentError::MissingFol(rec.id.clone()));
    };
    let predicates = match &rec.predicates {
        Some(p) => p.clone(),
        None => {
            let mut fs = Vec::new();
            for t in pf.iter().chain(std::iter::once(cf)) {
                fs.push(parse(t).map_err(|diagnostic| AugmentError::Unparseable {
                    id: rec.id.clone(),
                    diagnostic,
                })?);
            }
            PredicateDecl::from_formulas(&fs)
                .iter()
                .map(ToString::to_string)
                .collect()
        }
    };
    Ok(Translation {
        predicates,
        premises: pf
            .iter()
            .zip(rec.premises.iter().map(Some).chain(std::iter::repeat(None)))
            .map(|(fol, nl)| Pair::new(fol.clone(), nl.cloned().unwrap_or_default()))
            .collect(),
        conclusion: Pair::new(cf.clone(), rec.conclusion.clone()),
    })
}

pub fn split_record(rec: &Record) -> Result<Vec<AugmentedExample>, AugmentError> {
    split_record_with(rec, &Instructions::default())
}

pub fn split_record_with(rec: &Record, instructions: &Instructions) -> Result<Vec<AugmentedExample>, AugmentError> {
    let t = record_translation(rec)?;
    let input = render_input(&rec.premises, &rec.conclusion);
    let mut output = String::new();
    Ok(output_increments(&t)
        .into_iter()
        .enumerate()
        .map(|(step, inc)| {
            if step > 0 {
                output.push('\n');
            }
            output.push_str(&inc);
            AugmentedExample {
                instruction: if step == 0 {
                    instructions.predicate.clone()
                } else {
                    instructions.fol.clone()
                },
                input: input.clone(),
                output: output.clone(),
                source_id: rec.id.clone(),
                step,
            }
        })
        .collect())
}

/// `None` when the premise count differs from the premise translation count.
pub fn one_to_one_filter(rec: Record) -> Option<Record> {
    let n = rec.premises_fol.as_ref().map_or(0, Vec::len);
    (n == rec.premises.len()).then_some(rec)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AugmentReport {
    pub records: usize,
    pub dropped_one_to_one: usize,
    /// Records without FOL or with formulas that do not parse.
    pub dropped_invalid: usize,
    pub examples: usize,
    pub growth: f64,
}

/// Filters and splits a corpus. Growth is examples per kept record.
pub fn augment_corpus(records: Vec<Record>, instructions: &Instructions) -> (Vec<AugmentedExample>, AugmentReport) {
    let mut report = AugmentReport {
        records: records.len(),
        ..AugmentReport::default()
    };
    let mut out = Vec::new();
    for rec in records {
        let Some(r) = one_to_one_filter(rec) else {
            report.dropped_one_to_one += 1;
            continue;
        };
        match split_record_with(&r, instructions) {
            Ok(ex) => out.extend(ex),
            Err(e) => {
                log::warn!("skipping {e}");
                report.dropped_invalid += 1;
            }
        }
    }
    report.examples = out.len();
    let kept = report.records - report.dropped_one_to_one - report.dropped_invalid;
    report.growth = if kept == 0 { 0.0 } else { out.len() as f64 / kept as f64 };
    (out, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::extract;
    use crate::reasoner::Label;

    fn two_premise() -> Record {
        Record::new(
            "r",
            vec!["Rex is a rabbit.".into(), "Rabbits are furry.".into()],
            "Rex is furry.",
            Label::True,
        )
        .with_fol(
            vec!["Rabbit(rex)".into(), "∀x (Rabbit(x) → Furry(x))".into()],
            "Furry(rex)",
        )
    }

    #[test]
    fn two_premises_four_examples() {
        let ex = split_record(&two_premise()).unwrap();
        assert_eq!(ex.len(), 4);
        assert_eq!(ex[0].instruction, PREDICATE_INSTRUCTION);
        assert!(ex[1..]
            .iter()
            .all(|e| e.instruction == FOL_INSTRUCTION && e.task() == Task::FolGen));
        assert_eq!(ex[0].output, "Predicates:\nRabbit(x)\nFurry(x)");
        assert_eq!(
            ex[1].output,
            "Predicates:\nRabbit(x)\nFurry(x)\nPremises:\nRabbit(rex) ::: Rex is a rabbit."
        );
        assert!(ex.iter().all(|e| e.input == ex[0].input));
        for w in ex.windows(2) {
            assert!(w[1].output.starts_with(&w[0].output) && w[1].output.len() > w[0].output.len());
        }
        let full = extract(&ex[3].output, 2).unwrap();
        assert_eq!(full, record_translation(&two_premise()).unwrap());
    }

    #[test]
    fn zero_premises() {
        let rec = Record::new("z", vec![], "Tom is a cat.", Label::Unknown).with_fol(vec![], "Cat(tom)");
        let ex = split_record(&rec).unwrap();
        assert_eq!(ex.len(), 2);
        assert_eq!(extract(&ex[1].output, 0).unwrap().conclusion.fol, "Cat(tom)");
    }

    #[test]
    fn one_to_one() {
        let three = |k: usize| {
            Record::new("t", vec!["a".into(), "b".into(), "c".into()], "d", Label::True)
                .with_fol((0..k).map(|i| format!("P(c{i})")).collect(), "P(c9)")
        };
        assert!(one_to_one_filter(three(3)).is_some());
        assert!(one_to_one_filter(three(2)).is_none());
        let empty = Record::new("e", vec![], "d", Label::True).with_fol(vec![], "P(a)");
        assert!(one_to_one_filter(empty).is_some());
    }

    #[test]
    fn missing_fol_rejected() {
        let rec = Record::new("m", vec!["a".into()], "b", Label::True);
        assert!(matches!(split_record(&rec), Err(AugmentError::MissingFol(_))));
    }
}
