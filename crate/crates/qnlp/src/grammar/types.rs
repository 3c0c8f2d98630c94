use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GrammarError, Result};

/// Atomic grammatical categories. A closed set: nouns and sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Atom {
    N,
    S,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::N => write!(f, "n"),
            Atom::S => write!(f, "s"),
        }
    }
}

/// An atom with an adjoint order: 0 plain, -1 left adjoint (`.l`),
/// +1 right adjoint (`.r`); orders up to +/-2 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimpleType {
    pub atom: Atom,
    pub z: i8,
}

impl SimpleType {
    pub fn new(atom: Atom, z: i8) -> Self {
        debug_assert!(z.abs() <= 2);
        SimpleType { atom, z }
    }

    pub fn plain(atom: Atom) -> Self {
        SimpleType { atom, z: 0 }
    }

    /// Whether `self` followed by `right` contracts to the unit.
    pub fn contracts_with(&self, right: &SimpleType) -> bool {
        self.atom == right.atom && i16::from(right.z) == i16::from(self.z) + 1
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atom)?;
        let suffix = if self.z < 0 { ".l" } else { ".r" };
        for _ in 0..self.z.abs() {
            write!(f, "{suffix}")?;
        }
        Ok(())
    }
}

/// Ordered concatenation of simple types; the empty list is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PregroupType(pub Vec<SimpleType>);

impl PregroupType {
    pub fn unit() -> Self {
        PregroupType(Vec::new())
    }

    pub fn single(atom: Atom) -> Self {
        PregroupType(vec![SimpleType::plain(atom)])
    }

    pub fn simples(&self) -> &[SimpleType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &PregroupType) -> PregroupType {
        let mut out = self.0.clone();
        out.extend(other.0.iter().copied());
        PregroupType(out)
    }

    /// True for plain `n`.
    pub fn is_noun(&self) -> bool {
        self.0 == [SimpleType::plain(Atom::N)]
    }

    /// True for verb-like types: `n.r` first and a plain `s` somewhere after.
    pub fn is_verb(&self) -> bool {
        self.0.first() == Some(&SimpleType::new(Atom::N, 1))
            && self.0.iter().any(|t| *t == SimpleType::plain(Atom::S))
    }

    /// True for modifier types ending in `n.l` (adjectives, determiners).
    pub fn ends_with_left_noun_adjoint(&self) -> bool {
        self.0.last() == Some(&SimpleType::new(Atom::N, -1))
    }
}

impl fmt::Display for PregroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, simple) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " @ ")?;
            }
            write!(f, "{simple}")?;
        }
        Ok(())
    }
}

/// Parses a type expression: atoms with `.l`/`.r` suffixes joined by `@`,
/// e.g. `n.r @ s @ n.l`. Whitespace is ignored everywhere.
pub fn parse_type(text: &str) -> Result<PregroupType> {
    let mut simples = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut expect_atom = true;

    loop {
        // Skip whitespace.
        while matches!(chars.peek(), Some((_, c)) if c.is_whitespace()) {
            chars.next();
        }
        let Some(&(col, c)) = chars.peek() else { break };

        if expect_atom {
            let atom = match c {
                'n' => Atom::N,
                's' => Atom::S,
                _ => {
                    return Err(GrammarError::Syntax {
                        column: col + 1,
                        message: format!("expected atom `n` or `s`, found `{c}`"),
                    })
                }
            };
            chars.next();
            let mut z: i32 = 0;
            // Adjoint suffixes: `.l` or `.r`, possibly iterated.
            while matches!(chars.peek(), Some((_, '.'))) {
                let (dot_col, _) = chars.next().unwrap();
                match chars.next() {
                    Some((_, 'l')) => z -= 1,
                    Some((_, 'r')) => z += 1,
                    other => {
                        let column = other.map(|(i, _)| i + 1).unwrap_or(dot_col + 2);
                        return Err(GrammarError::Syntax {
                            column,
                            message: "expected `l` or `r` after `.`".into(),
                        });
                    }
                }
                if z.abs() > 2 {
                    return Err(GrammarError::AdjointOutOfRange(z));
                }
                if matches!(chars.peek(), Some((_, c)) if c.is_alphanumeric()) {
                    let (bad_col, bad) = *chars.peek().unwrap();
                    return Err(GrammarError::Syntax {
                        column: bad_col + 1,
                        message: format!("unexpected `{bad}` after adjoint marker"),
                    });
                }
            }
            simples.push(SimpleType::new(atom, z as i8));
            expect_atom = false;
        } else {
            if c != '@' {
                return Err(GrammarError::Syntax {
                    column: col + 1,
                    message: format!("expected `@` between types, found `{c}`"),
                });
            }
            chars.next();
            expect_atom = true;
        }
    }

    if expect_atom && !simples.is_empty() {
        return Err(GrammarError::Syntax {
            column: text.chars().count() + 1,
            message: "trailing `@` without a type".into(),
        });
    }
    if simples.is_empty() {
        return Err(GrammarError::Syntax {
            column: 1,
            message: "empty type expression".into(),
        });
    }
    Ok(PregroupType(simples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_noun() {
        assert_eq!(parse_type("n").unwrap(), PregroupType::single(Atom::N));
    }

    #[test]
    fn parses_transitive_verb_type() {
        let t = parse_type("n.r @ s @ n.l").unwrap();
        assert_eq!(
            t.simples(),
            &[
                SimpleType::new(Atom::N, 1),
                SimpleType::plain(Atom::S),
                SimpleType::new(Atom::N, -1),
            ]
        );
    }

    #[test]
    fn parses_iterated_adjoint() {
        let t = parse_type("n.l.l").unwrap();
        assert_eq!(t.simples(), &[SimpleType::new(Atom::N, -2)]);
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse_type("n.r@s@n.l").unwrap(), parse_type(" n.r @  s @ n.l ").unwrap());
    }

    #[test]
    fn syntax_error_reports_column() {
        match parse_type("n @ x") {
            Err(GrammarError::Syntax { column, .. }) => assert_eq!(column, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_deep_adjoints() {
        assert!(matches!(parse_type("n.l.l.l"), Err(GrammarError::AdjointOutOfRange(-3))));
    }

    #[test]
    fn display_round_trips() {
        for text in ["n", "n.r @ s @ n.l", "n @ n.l", "s.r @ s", "n.l.l"] {
            let parsed = parse_type(text).unwrap();
            assert_eq!(parse_type(&parsed.to_string()).unwrap(), parsed);
        }
    }
}
