use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde_json::json;

use super::diagram::{BoxKind, Diagram};
use super::{AnsatzConfig, DiscocatError, Result, PROB_CLAMP};
use crate::grammar::{assign_types, reduce, tokenize, GrammarError, Lexicon, PregroupType};
use crate::qsim::{
    param_shift_grad_vec, run_circuit, Circuit, Gate, GateKind, Param, ParamStore, StateVector,
    DEGENERACY_THRESHOLD,
};

/// Placement metadata for one word of a compiled sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledBox {
    pub word: String,
    pub kind: BoxKind,
    pub qubits: Vec<usize>,
    pub param_names: Vec<String>,
}

/// A sentence lowered to a post-selected circuit.
///
/// `postselect_pattern` maps qubits that must read `|0>`; `s_qubits` carry the
/// sentence meaning and are always disjoint from the pattern. `param_names`
/// are the word-embedding symbols the circuit references.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledSentence {
    pub circuit: Circuit,
    pub postselect_pattern: BTreeMap<usize, u8>,
    pub s_qubits: Vec<usize>,
    pub param_names: Vec<String>,
    pub boxes: Vec<CompiledBox>,
}

impl CompiledSentence {
    /// Inserts any missing embedding angles, drawn uniformly from [0, 2*pi).
    pub fn register_params(&self, store: &mut ParamStore, rng: &mut impl Rng) {
        for name in &self.param_names {
            store.ensure(name, || rng.gen_range(0.0..std::f64::consts::TAU));
        }
    }

    /// Companion metadata for the circuit JSON export.
    pub fn sidecar_json(&self) -> String {
        let postselect: BTreeMap<String, u8> = self
            .postselect_pattern
            .iter()
            .map(|(q, b)| (q.to_string(), *b))
            .collect();
        json!({ "postselect": postselect, "s_qubits": self.s_qubits }).to_string()
    }
}

/// Parameter scope shared by all occurrences of a word with a given type.
fn param_scope(word: &str, ty: &[crate::grammar::SimpleType]) -> String {
    let ty = PregroupType(ty.to_vec()).to_string().replace(' ', "");
    format!("{word}__{ty}")
}

/// Gate list of a word box on `qubits`, with symbolic parameters.
///
/// One qubit: Euler embedding RX RZ RX. More: one entangling layer per qubit,
/// each layer Hadamards followed by a CRZ chain over neighbours with its own
/// angle per link.
fn box_gates(scope: &str, qubits: &[usize], ansatz: &AnsatzConfig) -> (Vec<Gate>, Vec<String>) {
    let d = qubits.len();
    let mut gates = Vec::new();
    let mut names = Vec::new();
    let sym = |names: &mut Vec<String>| {
        let name = format!("{scope}/{}", names.len());
        names.push(name.clone());
        Param::Sym(name)
    };
    if d == 1 {
        let q = qubits[0];
        gates.push(Gate::rx(q, sym(&mut names)));
        gates.push(Gate::rz(q, sym(&mut names)));
        gates.push(Gate::rx(q, sym(&mut names)));
    } else {
        for _layer in 0..ansatz.iqp_layers(d) {
            for &q in qubits {
                gates.push(Gate::h(q));
            }
            for link in 0..d - 1 {
                gates.push(Gate::crz(qubits[link], qubits[link + 1], sym(&mut names)));
            }
        }
    }
    (gates, names)
}

/// Transpose of a word-box circuit.
///
/// H, RX, RZ, CRZ and CNOT all have symmetric matrices, so reversing the gate
/// order is the exact transpose. RY (antisymmetric off-diagonal) never occurs
/// in word boxes; guard against it to keep the assumption honest.
fn transpose_gates(gates: &[Gate]) -> Vec<Gate> {
    debug_assert!(gates.iter().all(|g| g.kind != GateKind::RY));
    gates.iter().rev().cloned().collect()
}

/// Lowers a diagram to a post-selected circuit.
///
/// Qubits are allocated to live wires in position order, so for a transitive
/// sentence in bent form the subject effect lands on the first wire, the
/// sentence qubit in the middle and the object effect on the last wire.
pub fn compile(diagram: &Diagram, ansatz: &AnsatzConfig) -> Result<CompiledSentence> {
    // A wire exists iff its owner is still a state box.
    let mut wire_qubits: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut live_wires: Vec<usize> = Vec::new();
    for wbox in &diagram.boxes {
        if wbox.kind == BoxKind::State {
            live_wires.extend(wbox.wires.iter().copied());
        }
    }
    live_wires.sort_unstable();
    let mut next_qubit = 0usize;
    for &wire in &live_wires {
        let width = ansatz.qubits_for(diagram.wire_types[wire].atom)?;
        wire_qubits.insert(wire, (next_qubit..next_qubit + width).collect());
        next_qubit += width;
    }

    let mut circuit = Circuit::new(next_qubit);
    let mut postselect_pattern: BTreeMap<usize, u8> = BTreeMap::new();
    let mut param_names: Vec<String> = Vec::new();
    let mut boxes: Vec<CompiledBox> = Vec::new();

    let box_qubits = |wbox: &super::diagram::WordBox| -> Vec<usize> {
        wbox.wires
            .iter()
            .flat_map(|w| wire_qubits[w].iter().copied())
            .collect()
    };

    // Word states first, then effects and cups: effects must follow the state
    // boxes that prepared the wires they consume.
    for wbox in diagram.boxes.iter().filter(|b| b.kind == BoxKind::State) {
        let qubits = box_qubits(wbox);
        let scope = param_scope(&wbox.word, &wbox.own_types);
        let (gates, names) = box_gates(&scope, &qubits, ansatz);
        circuit.gates.extend(gates);
        for name in &names {
            if !param_names.contains(name) {
                param_names.push(name.clone());
            }
        }
        boxes.push(CompiledBox {
            word: wbox.word.clone(),
            kind: BoxKind::State,
            qubits,
            param_names: names,
        });
    }

    for wbox in diagram.boxes.iter().filter(|b| b.kind == BoxKind::Effect) {
        let qubits = box_qubits(wbox);
        let scope = param_scope(&wbox.word, &wbox.own_types);
        let (gates, names) = box_gates(&scope, &qubits, ansatz);
        circuit.gates.extend(transpose_gates(&gates));
        for &q in &qubits {
            postselect_pattern.insert(q, 0);
        }
        for name in &names {
            if !param_names.contains(name) {
                param_names.push(name.clone());
            }
        }
        boxes.push(CompiledBox {
            word: wbox.word.clone(),
            kind: BoxKind::Effect,
            qubits,
            param_names: names,
        });
    }

    for &(left, right) in &diagram.cups {
        let lq = &wire_qubits[&left];
        let rq = &wire_qubits[&right];
        for (&l, &r) in lq.iter().zip(rq) {
            circuit.push(Gate::cnot(l, r));
            circuit.push(Gate::h(l));
            postselect_pattern.insert(l, 0);
            postselect_pattern.insert(r, 0);
        }
    }

    let s_qubits: Vec<usize> = diagram
        .open_wires
        .iter()
        .flat_map(|w| wire_qubits[w].iter().copied())
        .collect();
    debug_assert!(s_qubits.iter().all(|q| !postselect_pattern.contains_key(q)));

    Ok(CompiledSentence {
        circuit,
        postselect_pattern,
        s_qubits,
        param_names,
        boxes,
    })
}

/// Errors from the text-to-circuit convenience pipeline.
#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SentenceError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Compile(#[from] DiscocatError),
}

/// Full pipeline: tokenize, type, reduce, diagram, optional bend, compile.
pub fn compile_sentence(
    text: &str,
    lexicon: &Lexicon,
    ansatz: &AnsatzConfig,
    bend: bool,
) -> std::result::Result<CompiledSentence, SentenceError> {
    let tokens = tokenize(text);
    let typed = assign_types(&tokens, lexicon)?;
    let derivation = reduce(&typed)?;
    let mut diagram = super::build_diagram(&derivation)?;
    if bend {
        diagram = super::bend_rewrite(&diagram);
    }
    Ok(compile(&diagram, ansatz)?)
}

/// Post-selected sentiment readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentEval {
    /// Probability that all post-selected qubits read `|0>`.
    pub success: f64,
    /// `P(s-qubit = 1 | post-selection)`; 0.5 when degenerate.
    pub p_positive: f64,
    /// Set when the post-selection mass fell below the degeneracy threshold.
    pub degenerate: bool,
}

fn joint_and_mass(state: &StateVector, compiled: &CompiledSentence) -> (f64, f64) {
    let mut mask = 0usize;
    for &q in compiled.postselect_pattern.keys() {
        mask |= 1 << q;
    }
    let s_mask = 1usize << compiled.s_qubits[0];
    let mut mass = 0.0;
    let mut joint = 0.0;
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        if idx & mask != 0 {
            continue;
        }
        let p = amp.norm_sqr();
        mass += p;
        if idx & s_mask != 0 {
            joint += p;
        }
    }
    (joint, mass)
}

/// Runs a compiled sentence and returns the conditional probability of the
/// positive class. Requires a single sentence qubit (the binary task).
pub fn sentiment_prob(compiled: &CompiledSentence, params: &ParamStore) -> Result<SentimentEval> {
    if compiled.s_qubits.len() != 1 {
        return Err(DiscocatError::NonBinarySentenceSpace(compiled.s_qubits.len()));
    }
    let state = run_circuit(&compiled.circuit, params, None)?;
    let (joint, mass) = joint_and_mass(&state, compiled);
    if mass < DEGENERACY_THRESHOLD {
        return Ok(SentimentEval {
            success: mass,
            p_positive: 0.5,
            degenerate: true,
        });
    }
    Ok(SentimentEval {
        success: mass,
        p_positive: joint / mass,
        degenerate: false,
    })
}

/// Binary cross entropy of a compiled sentence against `label`, plus whether
/// the thresholded prediction is correct. Degenerate sentences score as
/// incorrect with the maximally uninformative probability.
pub fn discocat_loss(
    compiled: &CompiledSentence,
    params: &ParamStore,
    label: u8,
) -> Result<(f64, bool, SentimentEval)> {
    let eval = sentiment_prob(compiled, params)?;
    let loss = crate::train::binary_cross_entropy(eval.p_positive, label);
    let correct = if eval.degenerate {
        false
    } else {
        (eval.p_positive > 0.5) == (label == 1)
    };
    Ok((loss, correct, eval))
}

/// Gradient of the binary cross entropy with respect to every embedding angle.
///
/// The conditional probability is the quotient `joint / mass` of two state
/// functionals; both are differentiated in one pass by the simulator's
/// gradient engine and combined by the quotient rule. Degenerate sentences
/// contribute zero gradient.
pub fn discocat_grad(
    compiled: &CompiledSentence,
    params: &ParamStore,
    label: u8,
) -> Result<HashMap<String, f64>> {
    let state = run_circuit(&compiled.circuit, params, None)?;
    let (joint, mass) = joint_and_mass(&state, compiled);
    if mass < DEGENERACY_THRESHOLD {
        return Ok(params.names().map(|n| (n.to_string(), 0.0)).collect());
    }

    let grads = param_shift_grad_vec(&compiled.circuit, params, |s| {
        let (j, m) = joint_and_mass(s, compiled);
        vec![j, m]
    })?;

    let p = (joint / mass).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    let y = f64::from(label);
    let dloss_dp = -y / p + (1.0 - y) / (1.0 - p);

    Ok(grads
        .into_iter()
        .map(|(name, jm)| {
            let dp = (jm[0] * mass - joint * jm[1]) / (mass * mass);
            (name, dloss_dp * dp)
        })
        .collect())
}

#[cfg(test)]
mod tests;
