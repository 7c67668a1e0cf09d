//! Circuits: an input basis string, a sequence of gate applications, and a
//! single measured qubit read out once at the end.

use std::sync::Arc;

use thiserror::Error;

use crate::density::ExactBlock;
use crate::gate::GateDef;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("gate targets qubit {0} twice")]
    DuplicateTarget(usize),
    #[error("gate {gate} takes {expected} qubit(s), got {got}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("input string has length {got}, width is {width}")]
    InputLength { got: usize, width: usize },
    #[error("circuit width must be positive")]
    ZeroWidth,
    #[error("input block: {0}")]
    InputBlock(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitStep {
    gate: Arc<GateDef>,
    targets: Vec<usize>,
}

impl CircuitStep {
    pub fn new(gate: Arc<GateDef>, targets: &[usize], width: usize) -> Result<Self, CircuitError> {
        if targets.len() != gate.arity() {
            return Err(CircuitError::ArityMismatch {
                gate: gate.name().to_string(),
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        for &q in targets {
            if q >= width {
                return Err(CircuitError::QubitOutOfRange { qubit: q, width });
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(CircuitError::DuplicateTarget(targets[0]));
        }
        Ok(CircuitStep {
            gate,
            targets: targets.to_vec(),
        })
    }

    pub fn gate(&self) -> &Arc<GateDef> {
        &self.gate
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// The adjoint step on the same targets.
    pub fn inverse(&self) -> CircuitStep {
        CircuitStep {
            gate: Arc::new(self.gate.inverse()),
            targets: self.targets.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Circuit {
    width: usize,
    input: Vec<bool>,
    steps: Vec<CircuitStep>,
    measured: usize,
    input_blocks: Vec<ExactBlock>,
    custom_gates: Vec<Arc<GateDef>>,
}

// Gate definitions are carried for serialization only and do not take part
// in equality.
impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.input == other.input
            && self.steps == other.steps
            && self.measured == other.measured
            && self.input_blocks == other.input_blocks
    }
}

impl Circuit {
    /// Empty circuit on `width` qubits with input `|0…0⟩`, measuring qubit 0.
    pub fn new(width: usize) -> Result<Self, CircuitError> {
        if width == 0 {
            return Err(CircuitError::ZeroWidth);
        }
        Ok(Circuit {
            width,
            input: vec![false; width],
            steps: Vec::new(),
            measured: 0,
            input_blocks: Vec::new(),
            custom_gates: Vec::new(),
        })
    }

    pub fn with_input(mut self, bits: &[bool]) -> Result<Self, CircuitError> {
        self.set_input(bits)?;
        Ok(self)
    }

    pub fn set_input(&mut self, bits: &[bool]) -> Result<(), CircuitError> {
        if bits.len() != self.width {
            return Err(CircuitError::InputLength {
                got: bits.len(),
                width: self.width,
            });
        }
        self.input = bits.to_vec();
        Ok(())
    }

    pub fn set_measured(&mut self, qubit: usize) -> Result<(), CircuitError> {
        if qubit >= self.width {
            return Err(CircuitError::QubitOutOfRange {
                qubit,
                width: self.width,
            });
        }
        self.measured = qubit;
        Ok(())
    }

    pub fn push(&mut self, gate: Arc<GateDef>, targets: &[usize]) -> Result<(), CircuitError> {
        let step = CircuitStep::new(gate, targets, self.width)?;
        self.steps.push(step);
        Ok(())
    }

    pub fn push_step(&mut self, step: CircuitStep) -> Result<(), CircuitError> {
        let step = CircuitStep::new(step.gate, &step.targets, self.width)?;
        self.steps.push(step);
        Ok(())
    }

    /// Replaces the input on `block`'s qubits with a (possibly mixed)
    /// density matrix. Blocks may not overlap.
    pub fn add_input_block(&mut self, block: ExactBlock) -> Result<(), CircuitError> {
        for &q in block.labels() {
            if q >= self.width {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    width: self.width,
                });
            }
            if self.input_blocks.iter().any(|b| b.contains(q)) {
                return Err(CircuitError::InputBlock(format!(
                    "qubit {q} is in two input blocks"
                )));
            }
        }
        if !block.is_valid_density() {
            return Err(CircuitError::InputBlock("not a density matrix".into()));
        }
        self.input_blocks.push(block);
        Ok(())
    }

    /// Records a user-defined gate so serialization can re-emit it.
    pub fn register_gate(&mut self, gate: Arc<GateDef>) {
        if !self.custom_gates.iter().any(|g| g.name() == gate.name()) {
            self.custom_gates.push(gate);
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn input(&self) -> &[bool] {
        &self.input
    }

    pub fn steps(&self) -> &[CircuitStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn measured(&self) -> usize {
        self.measured
    }

    pub fn input_blocks(&self) -> &[ExactBlock] {
        &self.input_blocks
    }

    pub fn custom_gates(&self) -> &[Arc<GateDef>] {
        &self.custom_gates
    }

    /// Copy keeping only the first `len` steps.
    pub fn prefix(&self, len: usize) -> Circuit {
        let mut c = self.clone();
        c.steps.truncate(len);
        c
    }

    /// Input bits as a string, qubit 0 first.
    pub fn input_string(&self) -> String {
        self.input
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::builtin_gate;

    #[test]
    fn step_validation() {
        let cnot = builtin_gate("CNOT");
        assert_eq!(
            CircuitStep::new(cnot.clone(), &[0, 0], 2),
            Err(CircuitError::DuplicateTarget(0))
        );
        assert_eq!(
            CircuitStep::new(cnot.clone(), &[0, 2], 2),
            Err(CircuitError::QubitOutOfRange { qubit: 2, width: 2 })
        );
        assert!(matches!(
            CircuitStep::new(cnot, &[0], 2),
            Err(CircuitError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn input_and_measure_validation() {
        let mut c = Circuit::new(2).unwrap();
        assert!(c.set_input(&[true]).is_err());
        assert!(c.set_measured(2).is_err());
        c.set_input(&[true, false]).unwrap();
        assert_eq!(c.input_string(), "10");
        assert_eq!(Circuit::new(0), Err(CircuitError::ZeroWidth));
    }
}
