use super::*;
use crate::qlstm::cell::{qlstm_cell_step, qlstm_cell_step_with, CellState, GateOverrides};
use crate::qlstm::classical::{ClassicalLstm, LstmConfig};
use crate::qlstm::qnn::qnn_forward;
use crate::qlstm::sigmoid;

fn tiny_config() -> QlstmConfig {
    QlstmConfig {
        qnn: crate::qlstm::QnnConfig {
            n_qubits: 2,
            n_layers: 1,
            cnot_offsets: vec![1],
        },
        vocab_size: 6,
        embed_dim: 2,
        hidden: 2,
        classes: 3,
        collapse_output: false,
    }
}

fn small_state(hidden: usize) -> CellState {
    CellState {
        c: (0..hidden).map(|j| 0.3 + 0.1 * j as f64).collect(),
        h: (0..hidden).map(|j| -0.2 + 0.05 * j as f64).collect(),
    }
}

#[test]
fn forced_forget_one_input_zero_preserves_cell_state() {
    let config = QlstmConfig::defaults(10);
    let model = QlstmModel::new(config.clone(), 0).unwrap();
    let mut state = CellState {
        c: vec![0.7, -0.4, 0.2, 1.1],
        h: vec![0.0; 4],
    };
    let c0 = state.c.clone();
    let overrides = GateOverrides {
        f: Some(1.0),
        i: Some(0.0),
        ..GateOverrides::default()
    };
    for step in 0..10 {
        let (next, _) =
            qlstm_cell_step_with(&config, &model.params, &state, &vec![0.25; 5], &overrides)
                .unwrap();
        state = next;
        assert_eq!(state.c, c0, "cell state drifted at step {step}");
    }
}

#[test]
fn forced_zero_forget_and_output() {
    let config = tiny_config();
    let model = QlstmModel::new(config.clone(), 1).unwrap();
    let overrides = GateOverrides {
        f: Some(0.0),
        i: Some(0.3),
        g: Some(0.5),
        o: Some(0.0),
        ..GateOverrides::default()
    };
    let (next, y) =
        qlstm_cell_step_with(&config, &model.params, &small_state(2), &[0.4, -0.6], &overrides)
            .unwrap();
    // c_t = i * g exactly.
    assert_eq!(next.c, vec![0.15, 0.15]);

    // With o = 0 the postprocessing input is the zero vector, so the outputs
    // cannot depend on the token or the incoming state.
    let other_state = CellState {
        c: vec![5.0, -3.0],
        h: vec![1.0, 1.0],
    };
    let (next2, y2) =
        qlstm_cell_step_with(&config, &model.params, &other_state, &[-2.0, 2.0], &overrides)
            .unwrap();
    assert_eq!(next.h, next2.h);
    assert_eq!(y, y2);
}

#[test]
fn cell_step_matches_straight_line_reimplementation() {
    let config = tiny_config();
    let model = QlstmModel::new(config.clone(), 2).unwrap();
    let p = &model.params;
    let state = small_state(2);
    let x = [0.7, -0.3];

    let (next, y) = qlstm_cell_step(&config, p, &state, &x).unwrap();

    // Independent re-statement of the cell equations.
    let v: Vec<f64> = state.h.iter().chain(x.iter()).copied().collect();
    let u = p.w_in.apply(&v);
    let f: Vec<f64> = p.p_gates[0]
        .apply(&qnn_forward(&config.qnn, &p.qnn_angles[0], &u).unwrap())
        .iter()
        .map(|&a| sigmoid(a))
        .collect();
    let i: Vec<f64> = p.p_gates[1]
        .apply(&qnn_forward(&config.qnn, &p.qnn_angles[1], &u).unwrap())
        .iter()
        .map(|&a| sigmoid(a))
        .collect();
    let g: Vec<f64> = p.p_gates[2]
        .apply(&qnn_forward(&config.qnn, &p.qnn_angles[2], &u).unwrap())
        .iter()
        .map(|&a| a.tanh())
        .collect();
    let o: Vec<f64> = p.p_gates[3]
        .apply(&qnn_forward(&config.qnn, &p.qnn_angles[3], &u).unwrap())
        .iter()
        .map(|&a| sigmoid(a))
        .collect();
    let c: Vec<f64> = (0..2).map(|j| f[j] * state.c[j] + i[j] * g[j]).collect();
    let m: Vec<f64> = (0..2).map(|j| o[j] * c[j].tanh()).collect();
    let z = p.w_m.apply(&m);
    let h = p.p_h.apply(&qnn_forward(&config.qnn, &p.qnn_angles[4], &z).unwrap());
    let y_expected = p.p_y.apply(&qnn_forward(&config.qnn, &p.qnn_angles[5], &z).unwrap());

    for j in 0..2 {
        assert!((next.c[j] - c[j]).abs() < 1e-9);
        assert!((next.h[j] - h[j]).abs() < 1e-9);
    }
    for k in 0..3 {
        assert!((y[k] - y_expected[k]).abs() < 1e-9);
    }
}

#[test]
fn gate_ranges_hold() {
    let config = tiny_config();
    let model = QlstmModel::new(config.clone(), 3).unwrap();
    // Probe the gates through the override-free trace by checking the cell
    // recursion stays bounded: |c_t| <= |c_{t-1}| + 1 since f, i in (0,1)
    // and g in (-1,1).
    let mut state = CellState::zeros(2);
    for step in 0..20 {
        let (next, _) =
            qlstm_cell_step(&config, &model.params, &state, &[0.9, -0.9]).unwrap();
        for j in 0..2 {
            assert!(
                next.c[j].abs() <= state.c[j].abs() + 1.0 + 1e-12,
                "cell state exploded at step {step}"
            );
        }
        state = next;
    }
}

#[test]
fn single_token_sequence_equals_one_cell_step() {
    let config = tiny_config();
    let model = QlstmModel::new(config.clone(), 4).unwrap();
    let logits = model.sequence_forward(&[3]).unwrap();
    let x = &model.params.embedding[3 * 2..4 * 2];
    let (_, y) = qlstm_cell_step(&config, &model.params, &CellState::zeros(2), x).unwrap();
    assert_eq!(logits, y);
}

#[test]
fn parameter_perturbation_changes_logits() {
    let config = tiny_config();
    let mut model = QlstmModel::new(config, 5).unwrap();
    let before = model.sequence_forward(&[1, 2, 3]).unwrap();
    // Perturb the forget-gate circuit angles by a vector of norm 0.1.
    let n = model.params.qnn_angles[0].len();
    let delta = 0.1 / (n as f64).sqrt();
    for a in &mut model.params.qnn_angles[0] {
        *a += delta;
    }
    let after = model.sequence_forward(&[1, 2, 3]).unwrap();
    let moved: f64 = before
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .sum();
    assert!(moved > 1e-8, "logits insensitive to circuit angles");
}

#[test]
fn empty_and_out_of_range_sequences_error() {
    let model = QlstmModel::new(tiny_config(), 6).unwrap();
    assert_eq!(model.sequence_forward(&[]).unwrap_err(), QlstmError::EmptySequence);
    assert!(matches!(
        model.sequence_forward(&[99]).unwrap_err(),
        QlstmError::UnknownToken { id: 99, .. }
    ));
}

#[test]
fn gradients_match_finite_differences() {
    let config = tiny_config();
    let model = QlstmModel::new(config, 7).unwrap();
    let tokens = [1usize, 4, 2];
    let label = 2u8;
    let (_, grads) = model.loss_and_grad(&tokens, label).unwrap();
    let flat = model.params_flat();
    assert_eq!(grads.len(), flat.len());

    // Sample indices across all parameter classes: embedding, adapters,
    // circuit angles, projections.
    let n = flat.len();
    let sample: Vec<usize> = (0..12).map(|k| k * n / 12).collect();
    let h = 1e-5;
    for &idx in &sample {
        let mut plus = model.clone();
        let mut p = flat.clone();
        p[idx] += h;
        plus.set_params_flat(&p);
        let mut minus = model.clone();
        p[idx] -= 2.0 * h;
        minus.set_params_flat(&p);
        let fd = (plus.loss(&tokens, label).unwrap() - minus.loss(&tokens, label).unwrap())
            / (2.0 * h);
        assert!(
            (grads[idx] - fd).abs() < 1e-4,
            "param {idx}: analytic {} vs fd {fd}",
            grads[idx]
        );
    }
}

#[test]
fn checkpoint_round_trip_is_lossless() {
    let model = QlstmModel::new(tiny_config(), 8).unwrap();
    let json = model.to_json();
    let back = QlstmModel::from_json(&json).unwrap();
    assert_eq!(back, model);
}

#[test]
fn same_seed_same_model() {
    let a = QlstmModel::new(tiny_config(), 9).unwrap();
    let b = QlstmModel::new(tiny_config(), 9).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        a.sequence_forward(&[1, 2]).unwrap(),
        b.sequence_forward(&[1, 2]).unwrap()
    );
}

#[test]
fn classical_dropout_zero_train_eval_equal() {
    let model = ClassicalLstm::new(LstmConfig::defaults(10), 10).unwrap();
    let tokens = [1usize, 2, 3, 4];
    let train = model.sequence_forward_train(&tokens, 1234).unwrap();
    let eval = model.sequence_forward(&tokens).unwrap();
    assert_eq!(train, eval);
}

#[test]
fn classical_zero_weights_give_bias_logits() {
    let mut model = ClassicalLstm::new(LstmConfig::defaults(10), 11).unwrap();
    model.zero_all_params();
    let logits = model.sequence_forward(&[1, 2]).unwrap();
    assert_eq!(logits, model.output_bias().to_vec());
    assert_eq!(logits, vec![0.0, 0.0, 0.0]);
}

#[test]
fn classical_gradients_match_finite_differences() {
    let model = ClassicalLstm::new(LstmConfig::defaults(12), 12).unwrap();
    let tokens = [3usize, 1, 7, 2];
    let label = 0u8;
    let (_, grads) = model.loss_and_grad(&tokens, label, 0).unwrap();
    let flat = model.params_flat();
    let n = flat.len();
    let sample: Vec<usize> = (0..16).map(|k| k * n / 16).collect();
    let h = 1e-5;
    for &idx in &sample {
        let mut p = flat.clone();
        p[idx] += h;
        let mut plus = model.clone();
        plus.set_params_flat(&p);
        p[idx] -= 2.0 * h;
        let mut minus = model.clone();
        minus.set_params_flat(&p);
        let fd = (plus.loss(&tokens, label).unwrap() - minus.loss(&tokens, label).unwrap())
            / (2.0 * h);
        assert!(
            (grads[idx] - fd).abs() < 1e-5,
            "param {idx}: analytic {} vs fd {fd}",
            grads[idx]
        );
    }
}

#[test]
fn classical_dropout_masks_are_seeded() {
    let mut config = LstmConfig::defaults(10);
    config.dropout = 0.5;
    let model = ClassicalLstm::new(config, 13).unwrap();
    let tokens = [1usize, 2];
    let a = model.sequence_forward_train(&tokens, 42).unwrap();
    let b = model.sequence_forward_train(&tokens, 42).unwrap();
    assert_eq!(a, b);
    let eval_a = model.sequence_forward(&tokens).unwrap();
    let eval_b = model.sequence_forward(&tokens).unwrap();
    assert_eq!(eval_a, eval_b);
}

#[test]
fn collapsed_output_returns_hidden_state() {
    let mut config = tiny_config();
    config.classes = 2;
    config.collapse_output = true;
    let model = QlstmModel::new(config.clone(), 14).unwrap();
    let logits = model.sequence_forward(&[1]).unwrap();
    assert_eq!(logits.len(), config.hidden);

    let mut bad = config;
    bad.classes = 3;
    assert!(QlstmModel::new(bad, 15).is_err());
}

