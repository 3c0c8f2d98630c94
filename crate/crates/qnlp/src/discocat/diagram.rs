use serde::{Deserialize, Serialize};

use super::{DiscocatError, Result};
use crate::grammar::{Atom, Derivation, SimpleType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxKind {
    /// A ket: the word unitary applied to fresh `|0>` qubits.
    State,
    /// A bent word applied on its former cup partner's wire, post-selected.
    Effect,
}

/// One word in a diagram. For a state box `wires` are the flattened type
/// positions the word owns; for an effect box they are the partner wires the
/// effect acts on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordBox {
    pub word: String,
    pub kind: BoxKind,
    pub wires: Vec<usize>,
    /// Simple types of the box's own wires, in order (kept through bending so
    /// parameter scopes stay tied to the word's grammatical role).
    pub own_types: Vec<SimpleType>,
}

/// String diagram of a sentence. Wire identity is the flattened simple-type
/// position from the derivation; positions are never renumbered, wires simply
/// stop existing when their owner becomes an effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub boxes: Vec<WordBox>,
    pub wire_types: Vec<SimpleType>,
    pub cups: Vec<(usize, usize)>,
    pub open_wires: Vec<usize>,
}

impl Diagram {
    /// Word index owning each wire position (by original layout).
    fn wire_owners(&self) -> Vec<usize> {
        let mut owners = vec![usize::MAX; self.wire_types.len()];
        for (idx, wbox) in self.boxes.iter().enumerate() {
            if wbox.kind == BoxKind::State {
                for &w in &wbox.wires {
                    owners[w] = idx;
                }
            }
        }
        owners
    }
}

/// Turns a sentence derivation into its diagram: one state box per word,
/// cups copied from the contraction, one open sentence wire.
pub fn build_diagram(derivation: &Derivation) -> Result<Diagram> {
    let wire_types = derivation.flattened();
    let residue_is_sentence = derivation.residue.len() == 1
        && wire_types[derivation.residue[0]] == SimpleType::plain(Atom::S);
    if !residue_is_sentence {
        return Err(DiscocatError::NotASentenceDerivation);
    }

    let mut boxes = Vec::with_capacity(derivation.typed_words.len());
    let mut next_wire = 0usize;
    for (word, ty) in &derivation.typed_words {
        let wires: Vec<usize> = (next_wire..next_wire + ty.len()).collect();
        next_wire += ty.len();
        boxes.push(WordBox {
            word: word.clone(),
            kind: BoxKind::State,
            wires,
            own_types: ty.simples().to_vec(),
        });
    }
    Ok(Diagram {
        boxes,
        wire_types,
        cups: derivation.cups.clone(),
        open_wires: derivation.residue.clone(),
    })
}

/// Folds single-wire state boxes into effects on their cup partners.
///
/// Each cup with a single-wire state box on one end disappears: that box
/// becomes an effect applied to the other end's wire. Cups joining two
/// multi-wire boxes survive and compile to Bell effects later. A diagram with
/// no cups is a fixpoint.
pub fn bend_rewrite(diagram: &Diagram) -> Diagram {
    let mut out = diagram.clone();
    let owners = out.wire_owners();
    let mut remaining_cups = Vec::new();

    for &(a, b) in &out.cups {
        let bendable = |wire: usize| {
            let owner = owners[wire];
            out.boxes[owner].kind == BoxKind::State && out.boxes[owner].wires.len() == 1
        };
        if bendable(a) {
            let owner = owners[a];
            out.boxes[owner].kind = BoxKind::Effect;
            out.boxes[owner].wires = vec![b];
        } else if bendable(b) {
            let owner = owners[b];
            out.boxes[owner].kind = BoxKind::Effect;
            out.boxes[owner].wires = vec![a];
        } else {
            remaining_cups.push((a, b));
        }
    }
    out.cups = remaining_cups;
    out
}
