//! Finance word pools with part-of-speech and sentiment tags.
//!
//! Single source of truth for both the synthetic generator and the shipped
//! default lexicon, so every generated low-complexity sentence is guaranteed
//! to be typeable. Each word belongs to exactly one part of speech.

use crate::grammar::{parse_type, Lexicon};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pos {
    Noun,
    Adjective,
    Determiner,
    TransitiveVerb,
    IntransitiveVerb,
    Adverb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

pub struct VocabEntry {
    pub word: &'static str,
    pub pos: Pos,
    pub polarity: Polarity,
}

const fn entry(word: &'static str, pos: Pos, polarity: Polarity) -> VocabEntry {
    VocabEntry { word, pos, polarity }
}

use Polarity::{Negative, Neutral, Positive};
use Pos::{Adjective, Adverb, Determiner, IntransitiveVerb, Noun, TransitiveVerb};

pub static ENTRIES: &[VocabEntry] = &[
    // Subject and neutral object nouns.
    entry("markets", Noun, Neutral),
    entry("stocks", Noun, Neutral),
    entry("shares", Noun, Neutral),
    entry("investors", Noun, Neutral),
    entry("banks", Noun, Neutral),
    entry("traders", Noun, Neutral),
    entry("bonds", Noun, Neutral),
    entry("funds", Noun, Neutral),
    entry("analysts", Noun, Neutral),
    entry("companies", Noun, Neutral),
    entry("firms", Noun, Neutral),
    entry("exporters", Noun, Neutral),
    entry("insurers", Noun, Neutral),
    entry("retailers", Noun, Neutral),
    entry("lenders", Noun, Neutral),
    entry("startups", Noun, Neutral),
    entry("brokers", Noun, Neutral),
    entry("regulators", Noun, Neutral),
    entry("forecasts", Noun, Neutral),
    entry("targets", Noun, Neutral),
    entry("estimates", Noun, Neutral),
    entry("volumes", Noun, Neutral),
    // Sentiment-bearing object nouns.
    entry("profits", Noun, Positive),
    entry("gains", Noun, Positive),
    entry("records", Noun, Positive),
    entry("dividends", Noun, Positive),
    entry("upgrades", Noun, Positive),
    entry("losses", Noun, Negative),
    entry("debts", Noun, Negative),
    entry("fines", Noun, Negative),
    entry("downgrades", Noun, Negative),
    entry("writedowns", Noun, Negative),
    // Adjectives.
    entry("big", Adjective, Neutral),
    entry("small", Adjective, Neutral),
    entry("global", Adjective, Neutral),
    entry("local", Adjective, Neutral),
    entry("major", Adjective, Neutral),
    entry("new", Adjective, Neutral),
    entry("quarterly", Adjective, Neutral),
    entry("regional", Adjective, Neutral),
    entry("strong", Adjective, Positive),
    entry("record", Adjective, Positive),
    entry("solid", Adjective, Positive),
    entry("robust", Adjective, Positive),
    entry("upbeat", Adjective, Positive),
    entry("impressive", Adjective, Positive),
    entry("weak", Adjective, Negative),
    entry("heavy", Adjective, Negative),
    entry("poor", Adjective, Negative),
    entry("dismal", Adjective, Negative),
    entry("bearish", Adjective, Negative),
    entry("steep", Adjective, Negative),
    // Determiners.
    entry("the", Determiner, Neutral),
    entry("some", Determiner, Neutral),
    entry("many", Determiner, Neutral),
    entry("most", Determiner, Neutral),
    // Intransitive verbs.
    entry("rally", IntransitiveVerb, Positive),
    entry("surge", IntransitiveVerb, Positive),
    entry("soar", IntransitiveVerb, Positive),
    entry("climb", IntransitiveVerb, Positive),
    entry("rebound", IntransitiveVerb, Positive),
    entry("advance", IntransitiveVerb, Positive),
    entry("strengthen", IntransitiveVerb, Positive),
    entry("crash", IntransitiveVerb, Negative),
    entry("plunge", IntransitiveVerb, Negative),
    entry("tumble", IntransitiveVerb, Negative),
    entry("slump", IntransitiveVerb, Negative),
    entry("sink", IntransitiveVerb, Negative),
    entry("slide", IntransitiveVerb, Negative),
    entry("weaken", IntransitiveVerb, Negative),
    entry("stumble", IntransitiveVerb, Negative),
    entry("trade", IntransitiveVerb, Neutral),
    entry("drift", IntransitiveVerb, Neutral),
    entry("consolidate", IntransitiveVerb, Neutral),
    entry("pause", IntransitiveVerb, Neutral),
    // Transitive verbs.
    entry("beat", TransitiveVerb, Positive),
    entry("boost", TransitiveVerb, Positive),
    entry("lift", TransitiveVerb, Positive),
    entry("exceed", TransitiveVerb, Positive),
    entry("outperform", TransitiveVerb, Positive),
    entry("miss", TransitiveVerb, Negative),
    entry("cut", TransitiveVerb, Negative),
    entry("hurt", TransitiveVerb, Negative),
    entry("rattle", TransitiveVerb, Negative),
    entry("trail", TransitiveVerb, Negative),
    entry("report", TransitiveVerb, Neutral),
    entry("track", TransitiveVerb, Neutral),
    entry("watch", TransitiveVerb, Neutral),
    entry("review", TransitiveVerb, Neutral),
    entry("hold", TransitiveVerb, Neutral),
    // Sentence-final adverbs.
    entry("today", Adverb, Neutral),
    entry("again", Adverb, Neutral),
    entry("gradually", Adverb, Neutral),
];

/// Words of a given part of speech and polarity, in table order.
pub fn words(pos: Pos, polarity: Polarity) -> Vec<&'static str> {
    ENTRIES
        .iter()
        .filter(|e| e.pos == pos && e.polarity == polarity)
        .map(|e| e.word)
        .collect()
}

/// The pregroup type of a part of speech.
pub fn type_expression(pos: Pos) -> &'static str {
    match pos {
        Pos::Noun => "n",
        Pos::Adjective | Pos::Determiner => "n @ n.l",
        Pos::TransitiveVerb => "n.r @ s @ n.l",
        Pos::IntransitiveVerb => "n.r @ s",
        Pos::Adverb => "s.r @ s",
    }
}

/// The shipped lexicon: every generator word, typed, with the positional
/// fallback enabled for out-of-vocabulary input. A few stock demonstration
/// words (proper names and their verb) are included on top of the generator
/// vocabulary.
pub fn standard_lexicon() -> Lexicon {
    let mut lexicon = Lexicon::new().with_fallback();
    for e in ENTRIES {
        lexicon.insert(e.word, parse_type(type_expression(e.pos)).expect("static type table"));
    }
    for name in ["alice", "bob"] {
        lexicon.insert(name, parse_type("n").expect("static type table"));
    }
    lexicon.insert("loves", parse_type("n.r @ s @ n.l").expect("static type table"));
    lexicon
}
