//! Corpus and sentence scores against values pinned from sacreBLEU 2.6.0
//! (see fixtures/metrics/regen_oracle.py).

use std::fs;
use std::path::PathBuf;

use comptra::metrics::{bleu_corpus, chrfpp_corpus, BleuConfig, ChrfConfig, MetricConfig, MetricKind};
use serde_json::Value;

const TOL: f64 = 0.01;

fn fixture() -> (Vec<String>, Vec<String>, Value) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/metrics");
    let (mut hyps, mut refs) = (Vec::new(), Vec::new());
    for line in fs::read_to_string(dir.join("pairs.jsonl")).unwrap().lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        hyps.push(v["hyp"].as_str().unwrap().to_string());
        refs.push(v["ref"].as_str().unwrap().to_string());
    }
    let expected = serde_json::from_str(&fs::read_to_string(dir.join("expected.json")).unwrap()).unwrap();
    (hyps, refs, expected)
}

fn close(got: f64, want: &Value, what: &str) {
    let want = want.as_f64().unwrap();
    assert!((got - want).abs() <= TOL, "{what}: got {got}, sacreBLEU {want}");
}

#[test]
fn corpus_scores_match_oracle() {
    let (hyps, refs, exp) = fixture();
    assert_eq!(hyps.len(), 50);
    close(chrfpp_corpus(&hyps, &refs, &ChrfConfig::default()).unwrap(), &exp["corpus"]["chrfpp"], "chrF++");
    close(bleu_corpus(&hyps, &refs, &BleuConfig::default()).unwrap(), &exp["corpus"]["bleu"], "BLEU");
    close(
        chrfpp_corpus(&hyps[..20], &refs[..20], &ChrfConfig::default()).unwrap(),
        &exp["first_20"]["chrfpp"],
        "chrF++ first 20",
    );
    close(
        bleu_corpus(&hyps[..20], &refs[..20], &BleuConfig::default()).unwrap(),
        &exp["first_20"]["bleu"],
        "BLEU first 20",
    );
}

#[test]
fn sentence_scores_match_oracle() {
    let (hyps, refs, exp) = fixture();
    for (i, e) in exp["sentences"].as_array().unwrap().iter().enumerate() {
        let one = |m| MetricConfig::new(m).corpus_score(&hyps[i..=i], &refs[i..=i]).unwrap();
        close(one(MetricKind::Chrfpp), &e["chrfpp"], &format!("chrF++ sentence {i}"));
        close(one(MetricKind::Bleu), &e["bleu"], &format!("BLEU sentence {i}"));
    }
}

#[test]
fn permutation_invariance_and_monotonicity() {
    let (hyps, refs, _) = fixture();
    let mut order: Vec<usize> = (0..hyps.len()).collect();
    order.reverse();
    order.swap(3, 17);
    let ph: Vec<&String> = order.iter().map(|&i| &hyps[i]).collect();
    let pr: Vec<&String> = order.iter().map(|&i| &refs[i]).collect();
    for m in [MetricKind::Bleu, MetricKind::Chrfpp] {
        let cfg = MetricConfig::new(m);
        let base = cfg.corpus_score(&hyps, &refs).unwrap();
        assert_eq!(base, cfg.corpus_score(&ph, &pr).unwrap());
        for i in 0..hyps.len() {
            let mut fixed = hyps.clone();
            fixed[i] = refs[i].clone();
            assert!(cfg.corpus_score(&fixed, &refs).unwrap() >= base - 1e-9, "{m} dropped after fixing {i}");
        }
    }
}
