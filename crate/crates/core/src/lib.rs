//! Exact and tolerance-certified classical simulation of quantum circuits
//! whose states stay factored into small blocks of qubits.
//!
//! Engines:
//! - [`dense`]: exact full statevector reference.
//! - [`blocked`]: exact simulation of circuits that are `p`-blocked at every step.
//! - [`approx`]: forces a `p`-blocked surrogate each step and carries a
//!   certified trace-norm error ledger.
//! - [`stabilizer`]: Clifford circuits via stabilizer tableaus.
//!
//! [`ap`] decides blockedness of equal-superposition states combinatorially
//! and [`sampling`] turns exact probabilities into fair-coin samples.

pub mod ap;
pub mod approx;
pub mod blocked;
pub mod circuit;
pub mod dense;
pub mod density;
pub mod field;
pub mod gate;
pub mod generate;
pub mod linalg;
pub mod matrix;
pub mod parse;
pub mod partition;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod stabilizer;

pub use ap::{analyze_blockedness, build_ap, build_pair, census, BasisSuperposition};
pub use approx::{run_approx, ApproxCircuit, ApproxConfig, ErrorLedger};
pub use blocked::{run_blocked, BlockedOptions, BlockedState, PBlockError};
pub use circuit::{Circuit, CircuitError, CircuitStep};
pub use dense::{dense_blockedness, dense_marginal, dense_run, StateVector};
pub use density::{DensityBlock, ExactBlock, FloatBlock};
pub use field::Field;
pub use gate::{GateDef, GateLibrary};
pub use matrix::{ExactMatrix, FloatMatrix, Matrix, MatrixError};
pub use parse::{parse_circuit, serialize_circuit, ParseError};
pub use partition::Partition;
pub use sampling::OutcomeDistribution;
pub use scalar::{ExactScalar, ScalarError};
pub use stabilizer::{run_stabilizer, StabilizerTableau};
