//! Seeded template-based sentence generation.
//!
//! Low-complexity sentences are at most five words, typeable by the shipped
//! lexicon, and carry their sentiment in exactly one lexeme (a verb, an
//! adjective or an object noun). Moderate-complexity sentences are
//! multi-clause and average around eighteen words; they are meant for the
//! sequence models only and need not be grammatical for the pregroup
//! fragment.
//!
//! Class counts are allocated up front by largest remainder, so realized
//! shares match the targets to within one sentence per class.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::vocab::{words, Polarity, Pos};
use super::{DataError, Dataset, Result, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Complexity {
    Low,
    Moderate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_sentences: usize,
    pub complexity: Complexity,
    /// Target (negative, neutral, positive) shares.
    pub target_shares: (f64, f64, f64),
    pub seed: u64,
}

impl GenConfig {
    pub fn low(n_sentences: usize, seed: u64) -> Self {
        GenConfig {
            n_sentences,
            complexity: Complexity::Low,
            target_shares: (0.34, 0.18, 0.48),
            seed,
        }
    }

    pub fn moderate(n_sentences: usize, seed: u64) -> Self {
        GenConfig {
            complexity: Complexity::Moderate,
            target_shares: (0.37, 0.17, 0.46),
            ..Self::low(n_sentences, seed)
        }
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Det,
    Noun,
    Adj,
    TVerb,
    IVerb,
    ObjNoun,
    Adverb,
}

struct Template {
    slots: &'static [Slot],
    /// Indices of slots allowed to carry the sentence's sentiment.
    carriers: &'static [usize],
    weight: u32,
}

static LOW_TEMPLATES: &[Template] = &[
    Template { slots: &[Slot::Det, Slot::Noun, Slot::IVerb], carriers: &[2], weight: 1 },
    Template { slots: &[Slot::Noun, Slot::TVerb, Slot::ObjNoun], carriers: &[1, 2], weight: 1 },
    Template { slots: &[Slot::Adj, Slot::Noun, Slot::IVerb], carriers: &[0, 2], weight: 1 },
    Template { slots: &[Slot::Noun, Slot::IVerb, Slot::Adverb], carriers: &[1], weight: 1 },
    Template {
        slots: &[Slot::Det, Slot::Noun, Slot::TVerb, Slot::ObjNoun],
        carriers: &[2, 3],
        weight: 6,
    },
    Template {
        slots: &[Slot::Noun, Slot::TVerb, Slot::Adj, Slot::ObjNoun],
        carriers: &[1, 2],
        weight: 6,
    },
    Template {
        slots: &[Slot::Det, Slot::Adj, Slot::Noun, Slot::IVerb],
        carriers: &[1, 3],
        weight: 6,
    },
    Template {
        slots: &[Slot::Det, Slot::Noun, Slot::IVerb, Slot::Adverb],
        carriers: &[2],
        weight: 6,
    },
    Template {
        slots: &[Slot::Noun, Slot::TVerb, Slot::ObjNoun, Slot::Adverb],
        carriers: &[1, 2],
        weight: 6,
    },
    Template {
        slots: &[Slot::Det, Slot::Noun, Slot::TVerb, Slot::Adj, Slot::ObjNoun],
        carriers: &[2, 3],
        weight: 22,
    },
    Template {
        slots: &[Slot::Adj, Slot::Noun, Slot::TVerb, Slot::Adj, Slot::ObjNoun],
        carriers: &[0, 2],
        weight: 22,
    },
    Template {
        slots: &[Slot::Det, Slot::Adj, Slot::Noun, Slot::TVerb, Slot::ObjNoun],
        carriers: &[1, 4],
        weight: 22,
    },
];

static INTROS: &[&str] = &[
    "",
    "after a volatile week",
    "in early trading",
    "despite mixed signals",
    "following the earnings call",
];

static CONNECTORS: &[&str] = &["while", "as", "and", "although"];

static TAILS: &[&str] = &[
    "amid persistent inflation concerns",
    "even as analysts flag downside risks",
    "with volumes near seasonal averages",
    "as policy makers weigh stimulus",
    "leaving managers cautious near term",
];

fn label_polarity(label: u8) -> Polarity {
    match label {
        0 => Polarity::Negative,
        1 => Polarity::Neutral,
        _ => Polarity::Positive,
    }
}

fn slot_word(rng: &mut ChaCha8Rng, slot: Slot, polarity: Polarity) -> &'static str {
    let pool = match slot {
        Slot::Det => words(Pos::Determiner, Polarity::Neutral),
        Slot::Noun => words(Pos::Noun, Polarity::Neutral),
        Slot::Adj => words(Pos::Adjective, polarity),
        Slot::TVerb => words(Pos::TransitiveVerb, polarity),
        Slot::IVerb => words(Pos::IntransitiveVerb, polarity),
        Slot::ObjNoun => words(Pos::Noun, polarity),
        Slot::Adverb => words(Pos::Adverb, Polarity::Neutral),
    };
    pool[rng.gen_range(0..pool.len())]
}

fn pick_template(rng: &mut ChaCha8Rng) -> &'static Template {
    let total: u32 = LOW_TEMPLATES.iter().map(|t| t.weight).sum();
    let mut roll = rng.gen_range(0..total);
    for t in LOW_TEMPLATES {
        if roll < t.weight {
            return t;
        }
        roll -= t.weight;
    }
    unreachable!("weights cover the range")
}

fn low_sentence_words(rng: &mut ChaCha8Rng, label: u8) -> Vec<&'static str> {
    let template = pick_template(rng);
    let polarity = label_polarity(label);
    let carrier = template.carriers[rng.gen_range(0..template.carriers.len())];
    template
        .slots
        .iter()
        .enumerate()
        .map(|(idx, &slot)| {
            let slot_polarity = if idx == carrier { polarity } else { Polarity::Neutral };
            slot_word(rng, slot, slot_polarity)
        })
        .collect()
}

fn moderate_sentence_words(rng: &mut ChaCha8Rng, label: u8) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let intro = INTROS[rng.gen_range(0..INTROS.len())];
    out.extend(intro.split_whitespace().map(str::to_string));
    out.extend(low_sentence_words(rng, label).iter().map(|w| w.to_string()));
    out.push(CONNECTORS[rng.gen_range(0..CONNECTORS.len())].to_string());
    out.extend(low_sentence_words(rng, 1).iter().map(|w| w.to_string()));
    let tail = TAILS[rng.gen_range(0..TAILS.len())];
    out.extend(tail.split_whitespace().map(str::to_string));
    out
}

/// Largest-remainder allocation of `n` items to the target shares.
fn class_counts(n: usize, shares: (f64, f64, f64)) -> [usize; 3] {
    let shares = [shares.0, shares.1, shares.2];
    let mut counts = [0usize; 3];
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(3);
    let mut allocated = 0usize;
    for (i, &share) in shares.iter().enumerate() {
        let exact = share * n as f64;
        counts[i] = exact.floor() as usize;
        allocated += counts[i];
        remainders.push((i, exact - exact.floor()));
    }
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for k in 0..n - allocated {
        counts[remainders[k % 3].0] += 1;
    }
    counts
}

/// Generates a seeded synthetic dataset. Equal configs give byte-identical
/// output.
pub fn generate_synthetic(config: &GenConfig) -> Result<Dataset> {
    let (a, b, c) = config.target_shares;
    if a < 0.0 || b < 0.0 || c < 0.0 || (a + b + c - 1.0).abs() > 1e-9 {
        return Err(DataError::InvalidConfig(format!(
            "target shares must be non-negative and sum to 1, got ({a}, {b}, {c})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let counts = class_counts(config.n_sentences, config.target_shares);
    let mut labels: Vec<u8> = Vec::with_capacity(config.n_sentences);
    for (label, &count) in counts.iter().enumerate() {
        labels.extend(std::iter::repeat(label as u8).take(count));
    }
    labels.shuffle(&mut rng);

    let sentences = labels
        .into_iter()
        .map(|label| {
            let text = match config.complexity {
                Complexity::Low => low_sentence_words(&mut rng, label).join(" "),
                Complexity::Moderate => moderate_sentence_words(&mut rng, label).join(" "),
            };
            Sentence::new(text, label).expect("templates produce non-empty sentences")
        })
        .collect();
    Ok(Dataset::new(sentences, 3))
}
