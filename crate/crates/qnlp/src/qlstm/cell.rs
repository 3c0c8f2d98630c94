use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::QlstmConfig;
use super::qnn::{qnn_forward, qnn_jacobians};
use super::{sigmoid, QlstmError, Result};

/// Dense affine map, row-major weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub out_dim: usize,
    pub in_dim: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Linear {
    pub fn init(out_dim: usize, in_dim: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        Linear {
            out_dim,
            in_dim,
            w: (0..out_dim * in_dim).map(|_| rng.gen_range(-bound..bound)).collect(),
            b: (0..out_dim).map(|_| rng.gen_range(-bound..bound)).collect(),
        }
    }

    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        Linear {
            out_dim,
            in_dim,
            w: vec![0.0; out_dim * in_dim],
            b: vec![0.0; out_dim],
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.in_dim);
        (0..self.out_dim)
            .map(|r| {
                let row = &self.w[r * self.in_dim..(r + 1) * self.in_dim];
                row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.b[r]
            })
            .collect()
    }

    /// `W^T d` for backpropagation.
    pub fn backprop_input(&self, d_out: &[f64]) -> Vec<f64> {
        let mut dx = vec![0.0; self.in_dim];
        for r in 0..self.out_dim {
            let row = &self.w[r * self.in_dim..(r + 1) * self.in_dim];
            for (c, w) in row.iter().enumerate() {
                dx[c] += w * d_out[r];
            }
        }
        dx
    }

    /// Accumulates `d_out (x) input` into a gradient buffer of the same shape.
    pub fn accumulate_grad(&self, grad: &mut Linear, d_out: &[f64], input: &[f64]) {
        for r in 0..self.out_dim {
            grad.b[r] += d_out[r];
            let row = &mut grad.w[r * self.in_dim..(r + 1) * self.in_dim];
            for (c, x) in input.iter().enumerate() {
                row[c] += d_out[r] * x;
            }
        }
    }
}

/// Cell state: long-term memory `c` and hidden state `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

impl CellState {
    pub fn zeros(hidden: usize) -> Self {
        CellState {
            c: vec![0.0; hidden],
            h: vec![0.0; hidden],
        }
    }
}

/// All trainable parameters of the quantum cell plus the embedding table.
///
/// The six angle blocks drive the gate circuits (forget, input, update,
/// output, hidden postprocessing, output postprocessing); the linear maps
/// adapt dimensions around them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlstmParams {
    /// vocab x embed_dim, row per token id.
    pub embedding: Vec<f64>,
    /// (hidden + embed) -> qubits.
    pub w_in: Linear,
    /// hidden -> qubits, feeding the two postprocessing circuits.
    pub w_m: Linear,
    /// Circuit angles for networks 1-6.
    pub qnn_angles: [Vec<f64>; 6],
    /// qubits -> hidden for the four gates (f, i, g, o).
    pub p_gates: [Linear; 4],
    /// qubits -> hidden producing `h_t`.
    pub p_h: Linear,
    /// qubits -> classes producing `y_t`.
    pub p_y: Linear,
}

impl QlstmParams {
    pub fn init(config: &QlstmConfig, rng: &mut impl Rng) -> Self {
        let q = config.qnn.n_qubits;
        let angle = |rng: &mut dyn rand::RngCore, n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect()
        };
        let n_angles = config.qnn.n_angles();
        let embed_bound = 1.0 / (config.embed_dim as f64).sqrt();
        QlstmParams {
            embedding: (0..config.vocab_size * config.embed_dim)
                .map(|_| rng.gen_range(-embed_bound..embed_bound))
                .collect(),
            w_in: Linear::init(q, config.hidden + config.embed_dim, rng),
            w_m: Linear::init(q, config.hidden, rng),
            qnn_angles: std::array::from_fn(|_| angle(rng, n_angles)),
            p_gates: std::array::from_fn(|_| Linear::init(config.hidden, q, rng)),
            p_h: Linear::init(config.hidden, q, rng),
            p_y: Linear::init(config.classes, q, rng),
        }
    }

    pub fn zeros(config: &QlstmConfig) -> Self {
        let q = config.qnn.n_qubits;
        let n_angles = config.qnn.n_angles();
        QlstmParams {
            embedding: vec![0.0; config.vocab_size * config.embed_dim],
            w_in: Linear::zeros(q, config.hidden + config.embed_dim),
            w_m: Linear::zeros(q, config.hidden),
            qnn_angles: std::array::from_fn(|_| vec![0.0; n_angles]),
            p_gates: std::array::from_fn(|_| Linear::zeros(config.hidden, q)),
            p_h: Linear::zeros(config.hidden, q),
            p_y: Linear::zeros(config.classes, q),
        }
    }

    fn blocks(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = vec![&self.embedding, &self.w_in.w, &self.w_in.b, &self.w_m.w,
            &self.w_m.b];
        for a in &self.qnn_angles {
            out.push(a);
        }
        for p in &self.p_gates {
            out.push(&p.w);
            out.push(&p.b);
        }
        out.push(&self.p_h.w);
        out.push(&self.p_h.b);
        out.push(&self.p_y.w);
        out.push(&self.p_y.b);
        out
    }

    fn blocks_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out: Vec<&mut Vec<f64>> = vec![
            &mut self.embedding,
            &mut self.w_in.w,
            &mut self.w_in.b,
            &mut self.w_m.w,
            &mut self.w_m.b,
        ];
        for a in &mut self.qnn_angles {
            out.push(a);
        }
        for p in &mut self.p_gates {
            out.push(&mut p.w);
            out.push(&mut p.b);
        }
        out.push(&mut self.p_h.w);
        out.push(&mut self.p_h.b);
        out.push(&mut self.p_y.w);
        out.push(&mut self.p_y.b);
        out
    }

    pub fn n_params(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }

    /// Canonical flattening (embedding, input/adapter maps, angle blocks,
    /// output maps); the optimizer and checkpoints rely on this order.
    pub fn flatten(&self) -> Vec<f64> {
        self.blocks().concat()
    }

    pub fn assign_flat(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for block in self.blocks_mut() {
            let len = block.len();
            block.copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        assert_eq!(offset, flat.len(), "flat parameter length mismatch");
    }
}

/// Test hook: forces gate activations to constants (broadcast over the
/// hidden dimension) before the cell-state update.
#[derive(Debug, Clone, Copy, Default)]
pub struct GateOverrides {
    pub f: Option<f64>,
    pub i: Option<f64>,
    pub g: Option<f64>,
    pub o: Option<f64>,
}

pub(crate) struct StepTrace {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub q_gates: [Vec<f64>; 4],
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub tc: Vec<f64>,
    pub m: Vec<f64>,
    pub z: Vec<f64>,
    pub q5: Vec<f64>,
    pub q6: Vec<f64>,
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

pub(crate) fn step_forward(
    config: &QlstmConfig,
    params: &QlstmParams,
    state: &CellState,
    x: &[f64],
    overrides: &GateOverrides,
) -> Result<(CellState, Vec<f64>, StepTrace)> {
    if x.len() != config.embed_dim {
        return Err(QlstmError::DimensionMismatch(format!(
            "input length {} vs embed_dim {}",
            x.len(),
            config.embed_dim
        )));
    }
    if state.h.len() != config.hidden || state.c.len() != config.hidden {
        return Err(QlstmError::DimensionMismatch("cell state size".into()));
    }

    let mut v = state.h.clone();
    v.extend_from_slice(x);
    let u = params.w_in.apply(&v);

    let mut q_gates: [Vec<f64>; 4] = Default::default();
    for k in 0..4 {
        q_gates[k] = qnn_forward(&config.qnn, &params.qnn_angles[k], &u)?;
    }
    let act = |k: usize, fun: &dyn Fn(f64) -> f64| -> Vec<f64> {
        params.p_gates[k].apply(&q_gates[k]).iter().map(|&a| fun(a)).collect()
    };
    let mut f = act(0, &sigmoid);
    let mut i = act(1, &sigmoid);
    let mut g = act(2, &f64::tanh);
    let mut o = act(3, &sigmoid);
    if let Some(value) = overrides.f {
        f = vec![value; config.hidden];
    }
    if let Some(value) = overrides.i {
        i = vec![value; config.hidden];
    }
    if let Some(value) = overrides.g {
        g = vec![value; config.hidden];
    }
    if let Some(value) = overrides.o {
        o = vec![value; config.hidden];
    }

    let c: Vec<f64> = (0..config.hidden)
        .map(|j| f[j] * state.c[j] + i[j] * g[j])
        .collect();
    let tc: Vec<f64> = c.iter().map(|&x| x.tanh()).collect();
    let m = hadamard(&o, &tc);

    let z = params.w_m.apply(&m);
    let q5 = qnn_forward(&config.qnn, &params.qnn_angles[4], &z)?;
    let h = params.p_h.apply(&q5);
    let (q6, y) = if config.collapse_output {
        (Vec::new(), h.clone())
    } else {
        let q6 = qnn_forward(&config.qnn, &params.qnn_angles[5], &z)?;
        let y = params.p_y.apply(&q6);
        (q6, y)
    };

    let trace = StepTrace {
        v,
        u,
        q_gates,
        f,
        i,
        g,
        o,
        c_prev: state.c.clone(),
        tc,
        m,
        z,
        q5,
        q6,
    };
    Ok((CellState { c, h }, y, trace))
}

/// One cell step: consumes the previous state and the embedded token,
/// returns the next state and the step output.
pub fn qlstm_cell_step(
    config: &QlstmConfig,
    params: &QlstmParams,
    state: &CellState,
    x: &[f64],
) -> Result<(CellState, Vec<f64>)> {
    let (next, y, _) = step_forward(config, params, state, x, &GateOverrides::default())?;
    Ok((next, y))
}

/// [`qlstm_cell_step`] with forced gate activations, for algebraic tests.
pub fn qlstm_cell_step_with(
    config: &QlstmConfig,
    params: &QlstmParams,
    state: &CellState,
    x: &[f64],
    overrides: &GateOverrides,
) -> Result<(CellState, Vec<f64>)> {
    let (next, y, _) = step_forward(config, params, state, x, overrides)?;
    Ok((next, y))
}

/// Upstream gradients flowing into one step's backward pass.
pub(crate) struct StepUpstream<'a> {
    pub dh: &'a [f64],
    pub dc: &'a [f64],
    /// Gradient on `y_t`; empty when the step output is unused.
    pub dy: &'a [f64],
}

/// Gradients a step hands to its predecessor.
pub(crate) struct StepDownstream {
    pub dh_prev: Vec<f64>,
    pub dc_prev: Vec<f64>,
    pub dx: Vec<f64>,
}

pub(crate) fn step_backward(
    config: &QlstmConfig,
    params: &QlstmParams,
    trace: &StepTrace,
    upstream: &StepUpstream<'_>,
    grads: &mut QlstmParams,
) -> Result<StepDownstream> {
    let hidden = config.hidden;
    let q = config.qnn.n_qubits;

    let mut dh = upstream.dh.to_vec();
    let mut dz = vec![0.0; q];

    // y_t path (skipped entirely when y is unused or collapsed onto h).
    if !upstream.dy.is_empty() {
        if config.collapse_output {
            for (a, b) in dh.iter_mut().zip(upstream.dy) {
                *a += b;
            }
        } else {
            let dq6 = params.p_y.backprop_input(upstream.dy);
            params.p_y.accumulate_grad(&mut grads.p_y, upstream.dy, &trace.q6);
            let jac6 = qnn_jacobians(&config.qnn, &params.qnn_angles[5], &trace.z)?;
            accumulate_qnn(&mut dz, &mut grads.qnn_angles[5], &jac6, &dq6);
        }
    }

    // h_t path.
    let dq5 = params.p_h.backprop_input(&dh);
    params.p_h.accumulate_grad(&mut grads.p_h, &dh, &trace.q5);
    let jac5 = qnn_jacobians(&config.qnn, &params.qnn_angles[4], &trace.z)?;
    accumulate_qnn(&mut dz, &mut grads.qnn_angles[4], &jac5, &dq5);

    // z = W_m m.
    let dm = params.w_m.backprop_input(&dz);
    params.w_m.accumulate_grad(&mut grads.w_m, &dz, &trace.m);

    // m = o * tanh(c).
    let do_: Vec<f64> = (0..hidden).map(|j| dm[j] * trace.tc[j]).collect();
    let mut dc: Vec<f64> = (0..hidden)
        .map(|j| upstream.dc[j] + dm[j] * trace.o[j] * (1.0 - trace.tc[j] * trace.tc[j]))
        .collect();

    // c = f c_prev + i g.
    let df: Vec<f64> = (0..hidden).map(|j| dc[j] * trace.c_prev[j]).collect();
    let di: Vec<f64> = (0..hidden).map(|j| dc[j] * trace.g[j]).collect();
    let dg: Vec<f64> = (0..hidden).map(|j| dc[j] * trace.i[j]).collect();
    for j in 0..hidden {
        dc[j] *= trace.f[j];
    }
    let dc_prev = dc;

    // Through the activations into each gate's pre-activation.
    let da = [
        (0..hidden).map(|j| df[j] * trace.f[j] * (1.0 - trace.f[j])).collect::<Vec<f64>>(),
        (0..hidden).map(|j| di[j] * trace.i[j] * (1.0 - trace.i[j])).collect(),
        (0..hidden).map(|j| dg[j] * (1.0 - trace.g[j] * trace.g[j])).collect(),
        (0..hidden).map(|j| do_[j] * trace.o[j] * (1.0 - trace.o[j])).collect(),
    ];

    let mut du = vec![0.0; q];
    for k in 0..4 {
        let dq = params.p_gates[k].backprop_input(&da[k]);
        params.p_gates[k].accumulate_grad(&mut grads.p_gates[k], &da[k], &trace.q_gates[k]);
        let jac = qnn_jacobians(&config.qnn, &params.qnn_angles[k], &trace.u)?;
        accumulate_qnn(&mut du, &mut grads.qnn_angles[k], &jac, &dq);
    }

    // u = W_in v.
    let dv = params.w_in.backprop_input(&du);
    params.w_in.accumulate_grad(&mut grads.w_in, &du, &trace.v);

    Ok(StepDownstream {
        dh_prev: dv[..hidden].to_vec(),
        dc_prev,
        dx: dv[hidden..].to_vec(),
    })
}

/// Chains an output-side gradient through a circuit's Jacobians: into the
/// input vector and the angle block.
fn accumulate_qnn(
    d_input: &mut [f64],
    d_angles: &mut [f64],
    jac: &super::qnn::QnnJacobians,
    d_out: &[f64],
) {
    for (row, &d) in d_out.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        for (col, slot) in d_input.iter_mut().enumerate() {
            *slot += d * jac.d_x[row][col];
        }
        for (col, slot) in d_angles.iter_mut().enumerate() {
            *slot += d * jac.d_angles[row][col];
        }
    }
}
