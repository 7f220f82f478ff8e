//! Vectors printed by `tests/oracles/prng_oracle.py`, an independent Python
//! implementation of the draw and shuffle contract.

use longner::rng::{derive_seed, SplitMix64};
use longner::synth::{concat_k, concat_similar};
use longner::{Corpus, Sentence, Tag};

fn numbered(n: u64) -> Corpus {
    Corpus::new((0..n).map(|i| Sentence::new(i, vec![format!("s{i}")], vec![Tag::outside()]).unwrap()).collect())
        .unwrap()
}

#[test]
fn raw_draws() {
    let mut r = SplitMix64::new(0);
    assert_eq!([r.next(), r.next(), r.next()], [0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4, 0x06c45d188009454f]);
    let mut r = SplitMix64::new(42);
    assert_eq!([r.next(), r.next(), r.next()], [0xbdd732262feb6e95, 0x28efe333b266f103, 0x47526757130f9f52]);
}

#[test]
fn fisher_yates_seed_42() {
    let mut items: Vec<u32> = (0..6).collect();
    SplitMix64::new(42).shuffle(&mut items);
    assert_eq!(items, [4, 3, 0, 2, 5, 1]);
}

#[test]
fn bounded_draws() {
    let mut r = SplitMix64::new(3);
    let draws: Vec<u64> = (0..5).map(|_| r.below(7)).collect();
    assert_eq!(draws, [2, 3, 6, 0, 3]);
}

#[test]
fn concat_k_groups() {
    let out = concat_k(&numbered(6), 3, 42, false).unwrap();
    let groups: Vec<Vec<u64>> = out.corpus.sentences().iter().map(|s| s.provenance().unwrap().to_vec()).collect();
    assert_eq!(groups, [vec![4, 3, 0], vec![2, 5, 1]]);
    assert!(out.unused.is_empty());
}

#[test]
fn concat_similar_groups() {
    let out = concat_similar(&numbered(6), 7).unwrap();
    let groups: Vec<Vec<u64>> = out.corpus.sentences().iter().map(|s| s.provenance().unwrap().to_vec()).collect();
    assert_eq!(groups, [vec![1, 5, 1, 0], vec![3, 2, 4, 3]]);
}

#[test]
fn derived_seeds() {
    assert_eq!(derive_seed(42, "original"), 5090614545756274819);
    assert_eq!(derive_seed(42, "concat2"), 14887589245919539935);
    assert_eq!(derive_seed(42, "concat3"), 459121292879729080);
    assert_eq!(derive_seed(42, "concat_similar"), 13130042731381294265);
    assert_eq!(derive_seed(42, "combined"), 827128752651903980);
}
