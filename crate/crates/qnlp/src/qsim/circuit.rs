use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ParamStore, QsimError, Result, StateVector};

/// Gate kinds supported by the simulator and the circuit JSON format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    CNOT,
    CRZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            GateKind::CNOT | GateKind::CRZ => 2,
        }
    }

    pub fn takes_param(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRZ)
    }
}

/// A rotation angle: literal radians or a named reference into a [`ParamStore`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Sym(String),
    Lit(f64),
}

impl Param {
    pub fn resolve(&self, params: &ParamStore) -> Result<f64> {
        match self {
            Param::Lit(v) => Ok(*v),
            Param::Sym(name) => params.get(name),
        }
    }

    pub fn symbol(&self) -> Option<&str> {
        match self {
            Param::Sym(name) => Some(name),
            Param::Lit(_) => None,
        }
    }
}

/// One gate application. Two-qubit gates list control first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(default)]
    pub param: Option<Param>,
}

impl Gate {
    pub fn h(target: usize) -> Self {
        Gate {
            kind: GateKind::H,
            targets: vec![target],
            param: None,
        }
    }

    pub fn rx(target: usize, param: Param) -> Self {
        Gate {
            kind: GateKind::RX,
            targets: vec![target],
            param: Some(param),
        }
    }

    pub fn ry(target: usize, param: Param) -> Self {
        Gate {
            kind: GateKind::RY,
            targets: vec![target],
            param: Some(param),
        }
    }

    pub fn rz(target: usize, param: Param) -> Self {
        Gate {
            kind: GateKind::RZ,
            targets: vec![target],
            param: Some(param),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::CNOT,
            targets: vec![control, target],
            param: None,
        }
    }

    pub fn crz(control: usize, target: usize, param: Param) -> Self {
        Gate {
            kind: GateKind::CRZ,
            targets: vec![control, target],
            param: Some(param),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(QsimError::WrongArity {
                kind: self.kind,
                expected: self.kind.arity(),
                got: self.targets.len(),
            });
        }
        for &t in &self.targets {
            if t >= n_qubits {
                return Err(QsimError::InvalidTarget {
                    target: t,
                    n_qubits,
                });
            }
        }
        if self.targets.len() == 2 && self.targets[0] == self.targets[1] {
            return Err(QsimError::DuplicateTargets);
        }
        match (self.kind.takes_param(), self.param.is_some()) {
            (true, false) => Err(QsimError::MissingParam(self.kind)),
            (false, true) => Err(QsimError::UnexpectedParam(self.kind)),
            _ => Ok(()),
        }
    }
}

/// Ordered gate list over a fixed qubit count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn validate(&self) -> Result<()> {
        for gate in &self.gates {
            gate.validate(self.n_qubits)?;
        }
        Ok(())
    }

    /// Names of all symbolic parameters, in first-occurrence order, deduplicated.
    pub fn symbols(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for gate in &self.gates {
            if let Some(name) = gate.param.as_ref().and_then(Param::symbol) {
                if !seen.contains(&name) {
                    seen.push(name);
                }
            }
        }
        seen
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization cannot fail")
    }

    /// Parses and validates circuit JSON.
    pub fn from_json(text: &str) -> Result<Self> {
        let circuit: Circuit =
            serde_json::from_str(text).map_err(|e| QsimError::Json(e.to_string()))?;
        circuit.validate()?;
        Ok(circuit)
    }
}

/// 2x2 unitary for a single-qubit gate kind at a resolved angle.
pub(crate) fn single_qubit_matrix(kind: GateKind, angle: f64) -> [[Complex64; 2]; 2] {
    let half = angle / 2.0;
    let (c, s) = (half.cos(), half.sin());
    let zero = Complex64::new(0.0, 0.0);
    match kind {
        GateKind::H => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::RX => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        GateKind::RY => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        GateKind::RZ => [
            [Complex64::from_polar(1.0, -half), zero],
            [zero, Complex64::from_polar(1.0, half)],
        ],
        GateKind::CNOT | GateKind::CRZ => unreachable!("not a single-qubit gate"),
    }
}

pub(crate) fn apply_gate_in_place(
    state: &mut StateVector,
    gate: &Gate,
    params: &ParamStore,
) -> Result<()> {
    gate.validate(state.n_qubits())?;
    let angle = match &gate.param {
        Some(p) => p.resolve(params)?,
        None => 0.0,
    };
    match gate.kind {
        GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ => {
            let m = single_qubit_matrix(gate.kind, angle);
            apply_single_qubit(state, gate.targets[0], &m);
        }
        GateKind::CNOT => apply_cnot(state, gate.targets[0], gate.targets[1]),
        GateKind::CRZ => apply_crz(state, gate.targets[0], gate.targets[1], angle),
    }
    Ok(())
}

fn apply_single_qubit(state: &mut StateVector, target: usize, m: &[[Complex64; 2]; 2]) {
    let mask = 1usize << target;
    let amps = state.amplitudes_mut();
    for idx in 0..amps.len() {
        if idx & mask != 0 {
            continue;
        }
        let pair = idx | mask;
        let a0 = amps[idx];
        let a1 = amps[pair];
        amps[idx] = m[0][0] * a0 + m[0][1] * a1;
        amps[pair] = m[1][0] * a0 + m[1][1] * a1;
    }
}

fn apply_cnot(state: &mut StateVector, control: usize, target: usize) {
    let cmask = 1usize << control;
    let tmask = 1usize << target;
    let amps = state.amplitudes_mut();
    for idx in 0..amps.len() {
        // Visit each swapped pair once, from the target=0 side.
        if idx & cmask != 0 && idx & tmask == 0 {
            amps.swap(idx, idx | tmask);
        }
    }
}

fn apply_crz(state: &mut StateVector, control: usize, target: usize, angle: f64) {
    let both = (1usize << control) | (1usize << target);
    let phase = Complex64::from_polar(1.0, angle);
    let amps = state.amplitudes_mut();
    for (idx, amp) in amps.iter_mut().enumerate() {
        if idx & both == both {
            *amp *= phase;
        }
    }
}
