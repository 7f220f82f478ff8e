mod common;

use common::{brute_scores, paired_corpora, random_tags, TYPES3};
use longner::eval::{evaluate, EvalMode};
use longner::rng::SplitMix64;
use longner::Tag;

fn random_pairs(seed: u64, count: usize) -> Vec<(Vec<Tag>, Vec<Tag>)> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let len = 1 + rng.below(12) as usize;
            let well_formed = rng.below(2) == 0;
            (random_tags(&mut rng, len, &TYPES3, well_formed), random_tags(&mut rng, len, &TYPES3, well_formed))
        })
        .collect()
}

#[test]
fn matches_span_set_oracle() {
    for seed in 0..500 {
        let pairs = random_pairs(seed, 1 + (seed % 4) as usize);
        let (gold, pred) = paired_corpora(&pairs);
        let (micro, per_type) = brute_scores(&pairs);
        for mode in [EvalMode::Lenient, EvalMode::Strict] {
            let r = evaluate(&gold, &pred, mode).unwrap();
            assert_eq!((r.precision(), r.recall(), r.f1()), (micro.p, micro.r, micro.f), "seed {seed}");
            assert_eq!(r.per_type.len(), per_type.len(), "seed {seed}");
            for (ty, s) in &r.per_type {
                let o = per_type[ty];
                assert_eq!((s.precision, s.recall, s.f1), (o.p, o.r, o.f), "seed {seed} type {ty}");
            }
        }
    }
}

#[test]
fn precision_and_recall_swap() {
    for seed in 0..200 {
        let pairs = random_pairs(1000 + seed, 3);
        let (gold, pred) = paired_corpora(&pairs);
        let forward = evaluate(&gold, &pred, EvalMode::Lenient).unwrap();
        let backward = evaluate(&pred, &gold, EvalMode::Lenient).unwrap();
        assert_eq!(forward.precision(), backward.recall());
        assert_eq!(forward.recall(), backward.precision());
        assert_eq!(forward.f1(), backward.f1());
    }
}

#[test]
fn dropping_a_correct_span_lowers_recall() {
    let mut checked = 0;
    for seed in 0..300 {
        let pairs = random_pairs(5000 + seed, 2);
        let (gold, pred) = paired_corpora(&pairs);
        let before = evaluate(&gold, &pred, EvalMode::Lenient).unwrap();
        let m = before.micro;
        if m.matched == 0 {
            continue;
        }
        // Find a matched span and blank it out of the prediction.
        let mut dropped = None;
        'outer: for (i, (g, p)) in pairs.iter().enumerate() {
            let gs = common::brute_spans(i, g);
            for span in common::brute_spans(i, p) {
                if gs.contains(&span) {
                    dropped = Some(span);
                    break 'outer;
                }
            }
        }
        let (i, _, start, end) = dropped.unwrap();
        let mut edited = pairs.clone();
        for t in &mut edited[i].1[start..=end] {
            *t = Tag::outside();
        }
        // Blanking may turn a following I into an orphan that opens a new
        // span, so compare against the removal arithmetic only when it does not.
        if end + 1 < edited[i].1.len() && edited[i].1[end + 1].is_inside() {
            continue;
        }
        let (gold2, pred2) = paired_corpora(&edited);
        let after = evaluate(&gold2, &pred2, EvalMode::Lenient).unwrap().micro;
        assert_eq!(after.matched, m.matched - 1);
        assert_eq!(after.pred_support, m.pred_support - 1);
        assert!(after.recall < m.recall);
        let expected_p = if m.pred_support == 1 { 0.0 } else { (m.matched - 1) as f64 / (m.pred_support - 1) as f64 };
        assert_eq!(after.precision, expected_p);
        checked += 1;
    }
    assert!(checked > 50, "only {checked} cases exercised");
}

#[test]
fn worked_example() {
    let g = ["B-NEP", "I-NEP", "O", "O"];
    let p = ["B-NEP", "I-NEP", "O", "B-NEL"];
    let tags = |raw: &[&str]| raw.iter().map(|t| longner::tag::parse_tag(t).unwrap()).collect::<Vec<_>>();
    let (gold, pred) = paired_corpora(&[(tags(&g), tags(&p))]);
    let r = evaluate(&gold, &pred, EvalMode::Lenient).unwrap();
    assert_eq!(r.precision(), 0.5);
    assert_eq!(r.recall(), 1.0);
    assert!((r.f1() - 0.6667).abs() < 5e-5);
}
