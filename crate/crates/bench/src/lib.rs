//! Seeded synthetic workloads shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kbcheck::{Claim, Document, KnowledgeBase};

const VOCAB: [&str; 40] = [
    "ice", "bear", "polar", "melt", "sea", "warm", "carbon", "tree", "river", "moon", "sun",
    "rain", "coal", "wind", "storm", "fish", "salt", "rock", "sand", "lake", "snow", "heat",
    "cloud", "soil", "forest", "ocean", "glacier", "desert", "volcano", "island", "city", "energy",
    "policy", "vaccine", "virus", "cell", "protein", "election", "senate", "court",
];

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n)
        .map(|_| VOCAB[rng.random_range(0..VOCAB.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

/// `n_docs` documents of three to five sentences each.
pub fn synthetic_kb(n_docs: usize, seed: u64) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..n_docs)
        .map(|i| {
            let n_sentences = rng.random_range(3..=5);
            let text = (0..n_sentences)
                .map(|_| {
                    let len = rng.random_range(6..=14);
                    format!("{}.", words(&mut rng, len))
                })
                .collect::<Vec<_>>()
                .join(" ");
            Document::new(format!("doc{i:06}"), None, text).expect("non-empty text")
        })
        .collect();
    KnowledgeBase::indexed("synthetic", docs)
}

pub fn synthetic_claims(n: usize, seed: u64) -> Vec<Claim> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.random_range(4..=10);
            Claim::new(format!("c{i}"), words(&mut rng, len), None)
        })
        .collect()
}

/// `n` correctness flags, the first `correct` of them true.
pub fn flags(n: usize, correct: usize) -> Vec<bool> {
    (0..n).map(|i| i < correct).collect()
}
