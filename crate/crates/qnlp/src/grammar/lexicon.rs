use std::collections::HashMap;
use std::path::Path;

use super::types::{parse_type, Atom, PregroupType};
use super::{GrammarError, Result};

/// Word-to-type map with an optional positional fallback for unknown words.
///
/// The file format is one `word<TAB>type-expression` entry per line; blank
/// lines and lines starting with `#` are skipped.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, PregroupType>,
    fallback_enabled: bool,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Enables the positional fallback tagger for out-of-lexicon words.
    pub fn with_fallback(mut self) -> Self {
        self.fallback_enabled = true;
        self
    }

    pub fn insert(&mut self, word: impl Into<String>, ty: PregroupType) {
        assert!(!ty.is_empty(), "lexicon types must be non-empty");
        self.entries.insert(word.into(), ty);
    }

    pub fn get(&self, word: &str) -> Option<&PregroupType> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_tsv_str(text: &str) -> Result<Self> {
        let mut lexicon = Lexicon::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (word, type_expr) = line.split_once('\t').ok_or(GrammarError::LexiconFormat {
                line: line_no,
                message: "expected `word<TAB>type`".into(),
            })?;
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(GrammarError::LexiconFormat {
                    line: line_no,
                    message: "empty word".into(),
                });
            }
            let ty = parse_type(type_expr).map_err(|e| GrammarError::LexiconFormat {
                line: line_no,
                message: e.to_string(),
            })?;
            lexicon.insert(word, ty);
        }
        Ok(lexicon)
    }

    pub fn from_tsv_file(path: &Path) -> std::io::Result<Result<Self>> {
        Ok(Self::from_tsv_str(&std::fs::read_to_string(path)?))
    }

    pub fn to_tsv_string(&self) -> String {
        let mut entries: Vec<_> = self.entries.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        for (word, ty) in entries {
            out.push_str(word);
            out.push('\t');
            out.push_str(&ty.to_string());
            out.push('\n');
        }
        out
    }
}

/// Lowercases, splits on whitespace and strips leading/trailing
/// non-alphanumeric characters from each token. Interior punctuation (as in
/// `u.s`) survives; tokens that strip to nothing are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| {
            raw.to_lowercase()
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_string()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

/// Maps each token to its pregroup type.
///
/// Lexicon misses go to the positional fallback when enabled: a word directly
/// before a known verb, or in final position, is tagged `n`; a word before a
/// known noun at the start of the sentence or after an `n.l`-final modifier
/// is tagged `n @ n.l`. Anything else is an error.
pub fn assign_types(tokens: &[String], lexicon: &Lexicon) -> Result<Vec<(String, PregroupType)>> {
    if tokens.is_empty() {
        return Err(GrammarError::EmptyInput);
    }
    let mut typed: Vec<(String, PregroupType)> = Vec::with_capacity(tokens.len());
    for (i, token) in tokens.iter().enumerate() {
        let ty = match lexicon.get(token) {
            Some(ty) => ty.clone(),
            None if lexicon.fallback_enabled => {
                fallback_type(i, tokens, &typed, lexicon)
                    .ok_or_else(|| GrammarError::UnknownWord(token.clone()))?
            }
            None => return Err(GrammarError::UnknownWord(token.clone())),
        };
        typed.push((token.clone(), ty));
    }
    Ok(typed)
}

fn fallback_type(
    i: usize,
    tokens: &[String],
    typed_so_far: &[(String, PregroupType)],
    lexicon: &Lexicon,
) -> Option<PregroupType> {
    let next = tokens.get(i + 1).and_then(|w| lexicon.get(w));
    let sentence_final = i + 1 == tokens.len();
    if sentence_final || next.map(PregroupType::is_verb) == Some(true) {
        return Some(PregroupType::single(Atom::N));
    }
    let after_modifier_or_start = i == 0
        || typed_so_far
            .last()
            .map(|(_, ty)| ty.ends_with_left_noun_adjoint())
            == Some(true);
    if after_modifier_or_start && next.map(PregroupType::is_noun) == Some(true) {
        return Some(parse_type("n @ n.l").expect("static type expression"));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::SimpleType;

    fn standard() -> Lexicon {
        let mut lex = Lexicon::new().with_fallback();
        lex.insert("alice", parse_type("n").unwrap());
        lex.insert("bob", parse_type("n").unwrap());
        lex.insert("markets", parse_type("n").unwrap());
        lex.insert("loves", parse_type("n.r @ s @ n.l").unwrap());
        lex.insert("rally", parse_type("n.r @ s").unwrap());
        lex.insert("big", parse_type("n @ n.l").unwrap());
        lex
    }

    #[test]
    fn tokenize_strips_punctuation() {
        assert_eq!(
            tokenize("Apple reports record profits."),
            vec!["apple", "reports", "record", "profits"]
        );
    }

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \t\n ").is_empty());
    }

    #[test]
    fn tokenize_keeps_interior_periods() {
        assert_eq!(tokenize("U.S. markets — rally!"), vec!["u.s", "markets", "rally"]);
    }

    #[test]
    fn assigns_standard_sentence() {
        let tokens = tokenize("alice loves bob");
        let typed = assign_types(&tokens, &standard()).unwrap();
        assert_eq!(typed[0].1, parse_type("n").unwrap());
        assert_eq!(typed[1].1, parse_type("n.r @ s @ n.l").unwrap());
        assert_eq!(typed[2].1, parse_type("n").unwrap());
    }

    #[test]
    fn assigns_intransitive() {
        let tokens = tokenize("markets rally");
        let typed = assign_types(&tokens, &standard()).unwrap();
        assert_eq!(typed[0].1.simples(), &[SimpleType::plain(Atom::N)]);
        assert_eq!(typed[1].1, parse_type("n.r @ s").unwrap());
    }

    #[test]
    fn unknown_word_without_fallback_errors() {
        let lex = Lexicon::new();
        let err = assign_types(&[String::from("zzzq")], &lex).unwrap_err();
        assert_eq!(err, GrammarError::UnknownWord("zzzq".into()));
    }

    #[test]
    fn fallback_tags_noun_before_verb() {
        let tokens = tokenize("dogecoin rally");
        let typed = assign_types(&tokens, &standard()).unwrap();
        assert_eq!(typed[0].1, parse_type("n").unwrap());
    }

    #[test]
    fn fallback_tags_modifier_before_noun() {
        let tokens = tokenize("shiny markets rally");
        let typed = assign_types(&tokens, &standard()).unwrap();
        assert_eq!(typed[0].1, parse_type("n @ n.l").unwrap());
    }

    #[test]
    fn fallback_gives_up_mid_sentence() {
        // Unknown word followed by another unknown word: no rule applies.
        let tokens = tokenize("zzzq qqqz rally extra");
        let err = assign_types(&tokens, &standard()).unwrap_err();
        assert_eq!(err, GrammarError::UnknownWord("zzzq".into()));
    }

    #[test]
    fn lexicon_tsv_round_trip() {
        let lex = standard();
        let tsv = lex.to_tsv_string();
        let back = Lexicon::from_tsv_str(&tsv).unwrap();
        assert_eq!(back.len(), lex.len());
        assert_eq!(back.get("loves"), lex.get("loves"));
    }

    #[test]
    fn lexicon_tsv_reports_bad_line() {
        let err = Lexicon::from_tsv_str("alice\tn\nbroken line\n").unwrap_err();
        assert!(matches!(err, GrammarError::LexiconFormat { line: 2, .. }));
    }
}
