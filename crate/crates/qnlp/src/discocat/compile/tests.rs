use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::discocat::{bend_rewrite, build_diagram, AnsatzConfig, BoxKind};
use crate::grammar::{assign_types, parse_type, reduce, tokenize, Lexicon};
use crate::qsim::dense::run_circuit_dense;

fn lexicon() -> Lexicon {
    let mut lex = Lexicon::new();
    for noun in ["alice", "bob", "banks", "markets", "profits"] {
        lex.insert(noun, parse_type("n").unwrap());
    }
    lex.insert("loves", parse_type("n.r @ s @ n.l").unwrap());
    lex.insert("beat", parse_type("n.r @ s @ n.l").unwrap());
    lex.insert("rally", parse_type("n.r @ s").unwrap());
    lex.insert("big", parse_type("n @ n.l").unwrap());
    lex.insert("ok", parse_type("s").unwrap());
    lex
}

fn compiled(sentence: &str, bend: bool) -> CompiledSentence {
    compile_sentence(sentence, &lexicon(), &AnsatzConfig::default(), bend).unwrap()
}

fn random_params(compiled: &[&CompiledSentence], seed: u64) -> ParamStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = ParamStore::new();
    for c in compiled {
        c.register_params(&mut store, &mut rng);
    }
    store
}

/// Independent readout: full dense-matrix simulation plus explicit
/// enumeration of every basis outcome.
fn enumerate_sentiment(compiled: &CompiledSentence, params: &ParamStore) -> (f64, f64) {
    let state = run_circuit_dense(&compiled.circuit, params, None).unwrap();
    let mut mass = 0.0;
    let mut joint = 0.0;
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let matches = compiled
            .postselect_pattern
            .iter()
            .all(|(&q, &b)| ((idx >> q) & 1) as u8 == b);
        if !matches {
            continue;
        }
        mass += amp.norm_sqr();
        if (idx >> compiled.s_qubits[0]) & 1 == 1 {
            joint += amp.norm_sqr();
        }
    }
    (mass, joint / mass)
}

#[test]
fn transitive_sentence_compiles_to_three_wire_circuit() {
    let c = compiled("alice loves bob", true);
    assert_eq!(c.circuit.n_qubits, 3);
    assert_eq!(c.postselect_pattern, BTreeMap::from([(0, 0), (2, 0)]));
    assert_eq!(c.s_qubits, vec![1]);

    // One 3-qubit state box and two 1-qubit effects.
    let states: Vec<_> = c.boxes.iter().filter(|b| b.kind == BoxKind::State).collect();
    let effects: Vec<_> = c.boxes.iter().filter(|b| b.kind == BoxKind::Effect).collect();
    assert_eq!(states.len(), 1);
    assert_eq!(states[0].word, "loves");
    assert_eq!(states[0].qubits, vec![0, 1, 2]);
    assert_eq!(states[0].param_names.len(), 6);
    assert_eq!(effects.len(), 2);
    assert_eq!(effects[0].word, "alice");
    assert_eq!(effects[0].qubits, vec![0]);
    assert_eq!(effects[1].word, "bob");
    assert_eq!(effects[1].qubits, vec![2]);
    assert!(effects.iter().all(|b| b.param_names.len() == 3));
}

#[test]
fn single_word_sentence_has_no_postselection() {
    let c = compiled("ok", true);
    assert_eq!(c.circuit.n_qubits, 1);
    assert!(c.postselect_pattern.is_empty());
    assert_eq!(c.s_qubits, vec![0]);
    // Just the Euler embedding.
    assert_eq!(c.circuit.gates.len(), 3);
}

#[test]
fn identical_words_share_parameters_across_sentences() {
    let a = compiled("alice loves bob", true);
    let b = compiled("bob loves alice", true);
    let loves_a: Vec<_> = a.param_names.iter().filter(|n| n.starts_with("loves__")).collect();
    let loves_b: Vec<_> = b.param_names.iter().filter(|n| n.starts_with("loves__")).collect();
    assert_eq!(loves_a, loves_b);

    // Mutating a shared angle moves both sentences' outputs.
    let mut params = random_params(&[&a, &b], 3);
    let before = (
        sentiment_prob(&a, &params).unwrap().p_positive,
        sentiment_prob(&b, &params).unwrap().p_positive,
    );
    let name = loves_a[0].clone();
    params.set(name.clone(), params.get(&name).unwrap() + 1.3);
    let after = (
        sentiment_prob(&a, &params).unwrap().p_positive,
        sentiment_prob(&b, &params).unwrap().p_positive,
    );
    assert!((before.0 - after.0).abs() > 1e-6);
    assert!((before.1 - after.1).abs() > 1e-6);
}

#[test]
fn sentiment_of_prepared_one_state() {
    // A circuit that pins the sentence qubit to |1> with no post-selection.
    let mut circuit = Circuit::new(1);
    circuit.push(Gate::rx(0, Param::Lit(std::f64::consts::PI)));
    let c = CompiledSentence {
        circuit,
        postselect_pattern: BTreeMap::new(),
        s_qubits: vec![0],
        param_names: vec![],
        boxes: vec![],
    };
    let eval = sentiment_prob(&c, &ParamStore::new()).unwrap();
    assert!((eval.success - 1.0).abs() < 1e-12);
    assert!((eval.p_positive - 1.0).abs() < 1e-12);
    assert!(!eval.degenerate);
}

#[test]
fn all_zero_angles_match_enumeration() {
    // With every embedding angle at zero the noun effects are identities but
    // the verb's Hadamard layers survive, leaving the uniform state: mass
    // 1/4 over the two pattern-matching outcomes and an even sentence bit.
    let c = compiled("alice loves bob", true);
    let mut params = ParamStore::new();
    for name in &c.param_names {
        params.set(name.clone(), 0.0);
    }
    let eval = sentiment_prob(&c, &params).unwrap();
    let (mass, p) = enumerate_sentiment(&c, &params);
    assert!((eval.success - mass).abs() < 1e-12);
    assert!((eval.p_positive - p).abs() < 1e-12);
    assert!((eval.success - 0.25).abs() < 1e-12);
    assert!((eval.p_positive - 0.5).abs() < 1e-12);
}

#[test]
fn random_angles_match_enumeration_oracle() {
    for (sentence, seed) in [("alice loves bob", 5), ("big banks rally", 6), ("markets rally", 7)] {
        let c = compiled(sentence, true);
        let params = random_params(&[&c], seed);
        let eval = sentiment_prob(&c, &params).unwrap();
        let (mass, p) = enumerate_sentiment(&c, &params);
        assert!((eval.success - mass).abs() < 1e-10);
        assert!((eval.p_positive - p).abs() < 1e-10);
        assert!(eval.success >= 0.0 && eval.success <= 1.0 + 1e-12);
        assert!(eval.p_positive >= 0.0 && eval.p_positive <= 1.0);
    }
}

#[test]
fn bent_and_unbent_forms_agree() {
    for (sentence, extra_qubits, seed) in
        [("alice loves bob", 2, 11), ("big banks rally", 1, 12), ("bob beat profits", 2, 13)]
    {
        let bent = compiled(sentence, true);
        let unbent = compiled(sentence, false);
        assert_eq!(unbent.circuit.n_qubits, bent.circuit.n_qubits + extra_qubits);
        let params = random_params(&[&bent, &unbent], seed);
        let a = sentiment_prob(&bent, &params).unwrap();
        let b = sentiment_prob(&unbent, &params).unwrap();
        assert!(
            (a.p_positive - b.p_positive).abs() < 1e-9,
            "{sentence}: {} vs {}",
            a.p_positive,
            b.p_positive
        );
    }
}

#[test]
fn gradient_matches_finite_differences() {
    for (sentence, label, seed) in [("ok", 1u8, 21), ("alice loves bob", 0u8, 22)] {
        let c = compiled(sentence, true);
        let params = random_params(&[&c], seed);
        let grads = discocat_grad(&c, &params, label).unwrap();
        let h = 1e-5;
        for name in &c.param_names {
            let base = params.get(name).unwrap();
            let mut plus = params.clone();
            plus.set(name.clone(), base + h);
            let mut minus = params.clone();
            minus.set(name.clone(), base - h);
            let lp = discocat_loss(&c, &plus, label).unwrap().0;
            let lm = discocat_loss(&c, &minus, label).unwrap().0;
            let fd = (lp - lm) / (2.0 * h);
            assert!(
                (grads[name] - fd).abs() < 1e-5,
                "{sentence}/{name}: {} vs {}",
                grads[name],
                fd
            );
        }
    }
}

#[test]
fn absent_parameter_gets_zero_gradient() {
    let c = compiled("ok", true);
    let mut params = random_params(&[&c], 31);
    params.set("elsewhere__n/0", 1.0);
    let grads = discocat_grad(&c, &params, 1).unwrap();
    assert_eq!(grads["elsewhere__n/0"], 0.0);
}

#[test]
fn degenerate_postselection_flagged_and_zero_grad() {
    // Post-selecting a qubit pinned to |1> has zero success mass.
    let mut circuit = Circuit::new(2);
    circuit.push(Gate::rx(0, Param::Sym("w__n/0".into())));
    let c = CompiledSentence {
        circuit,
        postselect_pattern: BTreeMap::from([(0, 0)]),
        s_qubits: vec![1],
        param_names: vec!["w__n/0".into()],
        boxes: vec![],
    };
    let mut params = ParamStore::new();
    params.set("w__n/0", std::f64::consts::PI);
    let eval = sentiment_prob(&c, &params).unwrap();
    assert!(eval.degenerate);
    assert_eq!(eval.p_positive, 0.5);
    let (loss, correct, _) = discocat_loss(&c, &params, 1).unwrap();
    assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    assert!(!correct);
    let grads = discocat_grad(&c, &params, 1).unwrap();
    assert!(grads.values().all(|&g| g == 0.0));
}

#[test]
fn probabilities_over_sentence_qubit_sum_to_one() {
    let c = compiled("alice loves bob", true);
    let params = random_params(&[&c], 41);
    let state = run_circuit(&c.circuit, &params, None).unwrap();
    let (joint, mass) = joint_and_mass(&state, &c);
    let p1 = joint / mass;
    let p0 = (mass - joint) / mass;
    assert!((p0 + p1 - 1.0).abs() < 1e-10);
}

#[test]
fn sidecar_json_shape() {
    let c = compiled("alice loves bob", true);
    let sidecar = c.sidecar_json();
    assert!(sidecar.contains("\"postselect\":{\"0\":0,\"2\":0}"));
    assert!(sidecar.contains("\"s_qubits\":[1]"));
    // Circuit side of the export round-trips.
    let back = Circuit::from_json(&c.circuit.to_json()).unwrap();
    assert_eq!(back, c.circuit);
}

#[test]
fn unparseable_sentence_reports_grammar_error() {
    let err = compile_sentence("alice bob", &lexicon(), &AnsatzConfig::default(), true)
        .unwrap_err();
    assert!(matches!(err, SentenceError::Grammar(_)));
}
