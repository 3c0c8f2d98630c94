//! Gradients of circuit observables with respect to named parameters.
//!
//! RX/RY/RZ occurrences use the exact two-term parameter-shift rule with
//! shifts of pi/2. CRZ has generator spectrum {0, 1} rather than {-1/2, +1/2},
//! so its occurrences use central finite differences instead; simulation is
//! exact, which keeps them numerically clean.

use std::collections::HashMap;

use super::{Circuit, Gate, GateKind, Param, ParamStore, QsimError, Result, StateVector};

const SHIFT: f64 = std::f64::consts::FRAC_PI_2;
const CRZ_FD_STEP: f64 = 1e-6;

/// Gradient of a scalar function of the final state, per parameter name.
///
/// Every name in `params` gets an entry; names that never occur in the
/// circuit get gradient 0. A parameter appearing in several gates contributes
/// the sum over per-occurrence shifts.
pub fn param_shift_grad<F>(
    circuit: &Circuit,
    params: &ParamStore,
    scalar_fn: F,
) -> Result<HashMap<String, f64>>
where
    F: Fn(&StateVector) -> f64,
{
    let grads = param_shift_grad_vec(circuit, params, |state| vec![scalar_fn(state)])?;
    Ok(grads.into_iter().map(|(k, v)| (k, v[0])).collect())
}

/// Vector-valued variant: differentiates every component of `vec_fn` in the
/// same pass, reusing the shifted-circuit evaluations.
pub fn param_shift_grad_vec<F>(
    circuit: &Circuit,
    params: &ParamStore,
    vec_fn: F,
) -> Result<HashMap<String, Vec<f64>>>
where
    F: Fn(&StateVector) -> Vec<f64>,
{
    // Resolve all angles up front so one occurrence can be shifted while the
    // others (possibly sharing the same name) stay at the base value.
    let mut resolved: Vec<Gate> = Vec::with_capacity(circuit.gates.len());
    let mut occurrences: Vec<(String, usize, GateKind)> = Vec::new();
    for (idx, gate) in circuit.gates.iter().enumerate() {
        let mut gate = gate.clone();
        if let Some(Param::Sym(name)) = &gate.param {
            occurrences.push((name.clone(), idx, gate.kind));
            let value = params.get(name)?;
            gate.param = Some(Param::Lit(value));
        }
        resolved.push(gate);
    }
    let base = Circuit {
        n_qubits: circuit.n_qubits,
        gates: resolved,
    };

    let n_out = vec_fn(&super::run_circuit(&base, params, None)?).len();
    let mut grads: HashMap<String, Vec<f64>> = params
        .names()
        .map(|name| (name.to_string(), vec![0.0; n_out]))
        .collect();

    let eval_shifted = |gate_idx: usize, delta: f64| -> Result<Vec<f64>> {
        let mut shifted = base.clone();
        let param = shifted.gates[gate_idx]
            .param
            .as_mut()
            .expect("occurrence gates carry a param");
        let Param::Lit(angle) = param else {
            unreachable!("angles were resolved to literals")
        };
        *angle += delta;
        Ok(vec_fn(&super::run_circuit(&shifted, params, None)?))
    };

    for (name, gate_idx, kind) in &occurrences {
        let entry = grads
            .get_mut(name)
            .ok_or_else(|| QsimError::UnresolvedParam(name.clone()))?;
        let (plus, minus, scale) = match kind {
            GateKind::CRZ => (
                eval_shifted(*gate_idx, CRZ_FD_STEP)?,
                eval_shifted(*gate_idx, -CRZ_FD_STEP)?,
                1.0 / (2.0 * CRZ_FD_STEP),
            ),
            _ => (
                eval_shifted(*gate_idx, SHIFT)?,
                eval_shifted(*gate_idx, -SHIFT)?,
                0.5,
            ),
        };
        for ((g, p), m) in entry.iter_mut().zip(&plus).zip(&minus) {
            *g += scale * (p - m);
        }
    }
    Ok(grads)
}
