//! Reversible-circuit intermediate representation.
//!
//! A circuit is an ordered cascade of multi-controlled Toffoli gates over
//! `n` lines, optionally annotated with the designer's ground truth: which
//! input lines are primary inputs vs. constant ancillas, and which output
//! lines are primary outputs vs. garbage. Circuits are immutable after
//! construction; all operations are pure.

use crate::bits::Bits;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Control polarity: positive fires on 1, negative fires on 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

/// A single control of a Toffoli gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub line: u32,
    pub polarity: Polarity,
}

impl Control {
    pub fn positive(line: u32) -> Self {
        Control {
            line,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(line: u32) -> Self {
        Control {
            line,
            polarity: Polarity::Negative,
        }
    }
}

/// A multi-controlled Toffoli gate: the target bit is inverted iff every
/// positive control reads 1 and every negative control reads 0. The empty
/// control set always fires (an unconditional NOT).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToffoliGate {
    controls: Vec<Control>,
    target: u32,
}

impl ToffoliGate {
    /// Builds a gate, rejecting duplicate control lines and a target that is
    /// also a control. Controls are kept sorted by line index.
    pub fn new(
        controls: impl IntoIterator<Item = Control>,
        target: u32,
    ) -> Result<Self, CircuitError> {
        let gate = Self::unchecked(controls, target);
        if let Some(d) = gate.check() {
            return Err(CircuitError::InvalidGate(d));
        }
        Ok(gate)
    }

    /// Builds a gate without invariant checks. Used by `validate_gates`
    /// tests and parsers that diagnose afterwards.
    pub fn unchecked(controls: impl IntoIterator<Item = Control>, target: u32) -> Self {
        let mut controls: Vec<Control> = controls.into_iter().collect();
        controls.sort_by_key(|c| c.line);
        ToffoliGate { controls, target }
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn max_line(&self) -> u32 {
        self.controls
            .iter()
            .map(|c| c.line)
            .chain([self.target])
            .max()
            .unwrap()
    }

    fn check(&self) -> Option<String> {
        for pair in self.controls.windows(2) {
            if pair[0].line == pair[1].line {
                return Some(format!("line {} appears twice in controls", pair[0].line));
            }
        }
        if self.controls.iter().any(|c| c.line == self.target) {
            return Some(format!("target line {} is also a control", self.target));
        }
        None
    }

    pub fn fires(&self, state: Bits) -> bool {
        self.controls.iter().all(|c| match c.polarity {
            Polarity::Positive => state.bit(c.line),
            Polarity::Negative => !state.bit(c.line),
        })
    }

    /// Applies the gate to a state. Errors if the state is too narrow for
    /// the gate's lines.
    pub fn apply(&self, state: Bits) -> Result<Bits, CircuitError> {
        if self.max_line() >= state.width() {
            return Err(CircuitError::WidthMismatch {
                expected: self.max_line() + 1,
                got: state.width(),
            });
        }
        Ok(if self.fires(state) {
            state.flipped(self.target)
        } else {
            state
        })
    }
}

impl fmt::Display for ToffoliGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TOF({{")?;
        for (i, c) in self.controls.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let sign = match c.polarity {
                Polarity::Positive => "+",
                Polarity::Negative => "-",
            };
            write!(f, "{}{}", c.line, sign)?;
        }
        write!(f, "}}, {})", self.target)
    }
}

/// Role of a line on the input side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputRole {
    Primary(String),
    Ancillary(bool),
}

/// Role of a line on the output side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputRole {
    Primary(String),
    Garbage,
}

/// Designer ground truth for one circuit line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineAnnotation {
    pub input: InputRole,
    pub output: OutputRole,
}

impl LineAnnotation {
    pub fn is_ancillary(&self) -> bool {
        matches!(self.input, InputRole::Ancillary(_))
    }

    pub fn is_garbage(&self) -> bool {
        matches!(self.output, OutputRole::Garbage)
    }
}

/// One invariant violation found by [`validate_gates`] or
/// [`ReversibleCircuit::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Gate index the problem was found at, if gate-specific.
    pub gate: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gate {
            Some(g) => write!(f, "gate {}: {}", g, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("width mismatch: need {expected} lines, got {got}")]
    WidthMismatch { expected: u32, got: u32 },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("line {line} out of range for width {width}")]
    LineOutOfRange { line: u32, width: u32 },
}

/// Checks raw gate data against a width, one diagnostic per violation.
pub fn validate_gates(width: u32, gates: &[ToffoliGate]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (i, gate) in gates.iter().enumerate() {
        if let Some(message) = gate.check() {
            out.push(Diagnostic {
                gate: Some(i),
                message,
            });
        }
        if gate.max_line() >= width {
            out.push(Diagnostic {
                gate: Some(i),
                message: format!("line {} out of range for width {}", gate.max_line(), width),
            });
        }
    }
    out
}

/// An immutable cascade of Toffoli gates over `width` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversibleCircuit {
    width: u32,
    gates: Vec<ToffoliGate>,
    annotations: Option<Vec<LineAnnotation>>,
}

impl ReversibleCircuit {
    pub fn new(width: u32, gates: Vec<ToffoliGate>) -> Result<Self, CircuitError> {
        Self::build(width, gates, None)
    }

    pub fn with_annotations(
        width: u32,
        gates: Vec<ToffoliGate>,
        annotations: Vec<LineAnnotation>,
    ) -> Result<Self, CircuitError> {
        Self::build(width, gates, Some(annotations))
    }

    fn build(
        width: u32,
        gates: Vec<ToffoliGate>,
        annotations: Option<Vec<LineAnnotation>>,
    ) -> Result<Self, CircuitError> {
        if width == 0 {
            return Err(CircuitError::InvalidCircuit("width must be >= 1".into()));
        }
        let circuit = ReversibleCircuit {
            width,
            gates,
            annotations,
        };
        let diags = circuit.validate();
        if let Some(d) = diags.first() {
            return Err(CircuitError::InvalidCircuit(d.to_string()));
        }
        Ok(circuit)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn gates(&self) -> &[ToffoliGate] {
        &self.gates
    }

    pub fn annotations(&self) -> Option<&[LineAnnotation]> {
        self.annotations.as_deref()
    }

    /// Re-checks all invariants; empty iff the circuit is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = validate_gates(self.width, &self.gates);
        if let Some(ann) = &self.annotations {
            if ann.len() != self.width as usize {
                out.push(Diagnostic {
                    gate: None,
                    message: format!(
                        "{} annotations for {} lines",
                        ann.len(),
                        self.width
                    ),
                });
            } else if ann.iter().all(|a| a.is_garbage()) {
                out.push(Diagnostic {
                    gate: None,
                    message: "all outputs are garbage; at least one must be primary".into(),
                });
            }
        }
        out
    }

    fn check_width(&self, bits: Bits) -> Result<(), CircuitError> {
        if bits.width() != self.width {
            return Err(CircuitError::WidthMismatch {
                expected: self.width,
                got: bits.width(),
            });
        }
        Ok(())
    }

    /// Applies all gates left to right.
    pub fn simulate(&self, input: Bits) -> Result<Bits, CircuitError> {
        self.check_width(input)?;
        let mut state = input;
        for gate in &self.gates {
            if gate.fires(state) {
                state = state.flipped(gate.target);
            }
        }
        Ok(state)
    }

    /// Applies all gates right to left. Each Toffoli gate is self-inverse,
    /// so this inverts [`simulate`](Self::simulate).
    pub fn simulate_inverse(&self, output: Bits) -> Result<Bits, CircuitError> {
        self.check_width(output)?;
        let mut state = output;
        for gate in self.gates.iter().rev() {
            if gate.fires(state) {
                state = state.flipped(gate.target);
            }
        }
        Ok(state)
    }

    /// Quantum cost of the cascade.
    ///
    /// A gate with `c >= 2` controls costs `2^(c+1) - 3`, plus 2 when every
    /// control is negative. NOT and CNOT (`c <= 1`) cost 1: the formula's
    /// domain starts at two controls, and the conventional cost for the
    /// small gates is a single elementary operation.
    pub fn quantum_cost(&self) -> u64 {
        self.gates.iter().map(gate_cost).sum()
    }
}

fn gate_cost(gate: &ToffoliGate) -> u64 {
    let c = gate.controls().len() as u32;
    if c <= 1 {
        return 1;
    }
    let base = (1u64 << (c + 1)) - 3;
    let all_negative = gate
        .controls()
        .iter()
        .all(|ctl| ctl.polarity == Polarity::Negative);
    if all_negative {
        base + 2
    } else {
        base
    }
}

/// The three-gate example circuit used as a fixed reference point in tests:
/// lines `x1 x2 x3` are 0..3, gates `TOF({x1}, x3)`, `TOF({x3, !x2}, x1)`,
/// `TOF({x1}, x2)`.
pub fn example_three_gate_circuit() -> ReversibleCircuit {
    let gates = vec![
        ToffoliGate::new([Control::positive(0)], 2).unwrap(),
        ToffoliGate::new([Control::positive(2), Control::negative(1)], 0).unwrap(),
        ToffoliGate::new([Control::positive(0)], 1).unwrap(),
    ];
    ReversibleCircuit::new(3, gates).unwrap()
}
