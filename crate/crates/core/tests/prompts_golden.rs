//! Rendered prompts compared byte-for-byte with reference renderings.

use std::fs;
use std::path::PathBuf;

use comptra::lang::LanguageTag;
use comptra::prompts::{render_divide_prompt, render_translate_prompt, Demonstration, DivideMode, PromptSet};

const SENTENCE: &str = "\"We now have 4-month-old mice that are non-diabetic that used to be diabetic,\" he added.";

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(path).unwrap()
}

fn langs() -> (LanguageTag, LanguageTag) {
    (LanguageTag::from_code("amh_Ethi").unwrap(), LanguageTag::from_code("eng_Latn").unwrap())
}

fn placeholder_demos(sources: &[&str]) -> Vec<Demonstration> {
    sources.iter().map(|s| Demonstration::new(*s, "<>")).collect()
}

#[test]
fn zero_shot_matches_golden() {
    let (tgt, src) = langs();
    assert_eq!(render_translate_prompt(&tgt, &src, SENTENCE, &[]).unwrap(), golden("zero_shot.txt"));
}

#[test]
fn few_shot_matches_golden() {
    let (tgt, src) = langs();
    let demos = placeholder_demos(&[
        "\"If it becomes commercial, we should have it. That is, there's no in-principle objection to nuclear energy\" Mr Costello said.",
        "The governor also stated, \"Today, we learned that some school aged children have been identified as having had contact with the patient.\"",
        "The commissioner said, \"We haven't yet agreed on rules of origin and tariff con[c]essions, but the framework we have is enough to start trading on July 1, 2020\".",
        "Permits are limited to protect the canyon, and become available on the 1st day of the month, four months prior to the start month.",
        "We have a year-long financial crisis, which has had its most acute moment in the past two months, and I think now the financial markets are beginning to recover.\"",
    ]);
    assert_eq!(render_translate_prompt(&tgt, &src, SENTENCE, &demos).unwrap(), golden("few_shot.txt"));
}

#[test]
fn merge_matches_golden() {
    let (tgt, src) = langs();
    let pairs = placeholder_demos(&[
        "The mice used to be diabetic.",
        "They now have 4-month-old mice.",
        "The mice are non-diabetic.",
    ]);
    let set = PromptSet::embedded();
    assert_eq!(set.render_merge(&tgt, &src, SENTENCE, &pairs).unwrap(), golden("merge.txt"));
}

#[test]
fn divide_matches_golden() {
    assert_eq!(render_divide_prompt(SENTENCE, DivideMode::Propositions).unwrap(), golden("divide.txt"));
    assert_eq!(render_divide_prompt(SENTENCE, DivideMode::Paraphrase).unwrap(), golden("paraphrase.txt"));
}

#[test]
fn prompt_dir_copy_of_embedded_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let assets = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets/prompts");
    for entry in fs::read_dir(assets).unwrap() {
        let entry = entry.unwrap();
        let mut text = fs::read_to_string(entry.path()).unwrap();
        text.push('\n');
        fs::write(dir.path().join(entry.file_name()), text).unwrap();
    }
    assert_eq!(PromptSet::from_dir(dir.path()).unwrap(), PromptSet::embedded());
}
