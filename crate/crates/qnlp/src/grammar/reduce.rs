use serde_json::json;

use super::types::{Atom, PregroupType, SimpleType};
use super::{GrammarError, Result};

/// A successful reduction of a typed word sequence.
///
/// Positions index the flattened simple-type sequence of all words in order.
/// `cups` pair contracted positions; `residue` lists what is left. For a
/// grammatical sentence the residue is exactly one plain `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub typed_words: Vec<(String, PregroupType)>,
    pub cups: Vec<(usize, usize)>,
    pub residue: Vec<usize>,
}

impl Derivation {
    /// All simple types of all words, in sentence order.
    pub fn flattened(&self) -> Vec<SimpleType> {
        self.typed_words
            .iter()
            .flat_map(|(_, ty)| ty.simples().iter().copied())
            .collect()
    }

    /// Word index owning each flattened position.
    pub fn position_owners(&self) -> Vec<usize> {
        let mut owners = Vec::new();
        for (word_idx, (_, ty)) in self.typed_words.iter().enumerate() {
            owners.extend(std::iter::repeat(word_idx).take(ty.len()));
        }
        owners
    }

    pub fn to_debug_json(&self) -> String {
        json!({
            "words": self.typed_words.iter().map(|(w, _)| w.clone()).collect::<Vec<_>>(),
            "types": self.typed_words.iter().map(|(_, t)| t.to_string()).collect::<Vec<_>>(),
            "cups": self.cups,
            "residue": self.residue,
        })
        .to_string()
    }
}

/// Finds a planar contraction of the concatenated types down to a single `s`.
///
/// Depth-first search over adjacent-after-contraction pairs, always trying
/// the leftmost contractible pair first and backtracking on failure, so the
/// returned derivation is deterministic. Fails with the shortest residue
/// encountered, for diagnostics.
pub fn reduce(typed: &[(String, PregroupType)]) -> Result<Derivation> {
    if typed.is_empty() {
        return Err(GrammarError::EmptyInput);
    }
    let simples: Vec<SimpleType> = typed
        .iter()
        .flat_map(|(_, ty)| ty.simples().iter().copied())
        .collect();

    let mut search = Search {
        simples: &simples,
        cups: Vec::new(),
        best_residue: (0..simples.len()).collect(),
    };
    let mut alive = vec![true; simples.len()];
    if search.run(&mut alive) {
        let mut cups = search.cups;
        cups.sort_unstable();
        let residue: Vec<usize> = alive_positions(&alive);
        Ok(Derivation {
            typed_words: typed.to_vec(),
            cups,
            residue,
        })
    } else {
        let best = search
            .best_residue
            .iter()
            .map(|&p| simples[p].to_string())
            .collect::<Vec<_>>()
            .join(" @ ");
        Err(GrammarError::NotASentence { best_residue: best })
    }
}

struct Search<'a> {
    simples: &'a [SimpleType],
    cups: Vec<(usize, usize)>,
    best_residue: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, alive: &mut [bool]) -> bool {
        let positions = alive_positions(alive);
        if positions.len() == 1 && self.simples[positions[0]] == SimpleType::plain(Atom::S) {
            return true;
        }

        let mut tried_any = false;
        for win in positions.windows(2) {
            let (left, right) = (win[0], win[1]);
            if !self.simples[left].contracts_with(&self.simples[right]) {
                continue;
            }
            tried_any = true;
            alive[left] = false;
            alive[right] = false;
            self.cups.push((left, right));
            if self.run(alive) {
                return true;
            }
            self.cups.pop();
            alive[left] = true;
            alive[right] = true;
        }

        if !tried_any && positions.len() < self.best_residue.len() {
            self.best_residue = positions;
        }
        false
    }
}

fn alive_positions(alive: &[bool]) -> Vec<usize> {
    alive
        .iter()
        .enumerate()
        .filter_map(|(i, &a)| a.then_some(i))
        .collect()
}

/// Independent soundness check: replays the cups of a derivation in
/// innermost-first fixpoint order and verifies each one is a legal
/// contraction of adjacent survivors, returning the final residue.
pub fn replay_contractions(
    simples: &[SimpleType],
    cups: &[(usize, usize)],
) -> std::result::Result<Vec<usize>, String> {
    let mut removed = vec![false; simples.len()];
    for &(a, b) in cups {
        if a >= b || b >= simples.len() {
            return Err(format!("cup ({a}, {b}) out of order or range"));
        }
        if !simples[a].contracts_with(&simples[b]) {
            return Err(format!(
                "cup ({a}, {b}) joins non-contractible types {} and {}",
                simples[a], simples[b]
            ));
        }
    }
    let mut pending: Vec<(usize, usize)> = cups.to_vec();
    while !pending.is_empty() {
        let mut applied = Vec::new();
        for (idx, &(a, b)) in pending.iter().enumerate() {
            if removed[a] || removed[b] {
                return Err(format!("cup ({a}, {b}) reuses a contracted position"));
            }
            if (a + 1..b).all(|p| removed[p]) {
                removed[a] = true;
                removed[b] = true;
                applied.push(idx);
            }
        }
        if applied.is_empty() {
            return Err("cups are not replayable: crossing or blocked pair".into());
        }
        for idx in applied.into_iter().rev() {
            pending.swap_remove(idx);
        }
    }
    Ok(removed
        .iter()
        .enumerate()
        .filter_map(|(i, &r)| (!r).then_some(i))
        .collect())
}
