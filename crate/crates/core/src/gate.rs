//! Gate definitions and the built-in exact gate library.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::matrix::ExactMatrix;
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("gate {0}: matrix must be 2x2 or 4x4")]
    BadShape(String),
    #[error("gate {0}: matrix is not exactly unitary")]
    NotUnitary(String),
    #[error("gate {0} is already defined")]
    Duplicate(String),
    #[error("gate name '{0}' is not an identifier")]
    BadName(String),
}

/// A named 1- or 2-qubit gate with an exactly unitary matrix.
#[derive(Clone, PartialEq)]
pub struct GateDef {
    name: String,
    arity: usize,
    matrix: ExactMatrix,
}

impl GateDef {
    pub fn new(name: impl Into<String>, matrix: ExactMatrix) -> Result<Self, GateError> {
        let name = name.into();
        let valid_name = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_name {
            return Err(GateError::BadName(name));
        }
        let arity = match (matrix.rows(), matrix.cols()) {
            (2, 2) => 1,
            (4, 4) => 2,
            _ => return Err(GateError::BadShape(name)),
        };
        if !matrix.is_unitary() {
            return Err(GateError::NotUnitary(name));
        }
        Ok(GateDef {
            name,
            arity,
            matrix,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    /// The adjoint gate, named `<name>_dg` unless self-inverse.
    pub fn inverse(&self) -> GateDef {
        let m = self.matrix.dagger();
        let name = if m == self.matrix {
            self.name.clone()
        } else {
            format!("{}_dg", self.name)
        };
        GateDef {
            name,
            arity: self.arity,
            matrix: m,
        }
    }
}

impl fmt::Debug for GateDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GateDef({})", self.name)
    }
}

fn matrix(rows: &[&[&str]]) -> ExactMatrix {
    ExactMatrix::from_rows(
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.parse::<ExactScalar>().expect("literal"))
                    .collect()
            })
            .collect(),
    )
    .expect("square literal")
}

/// Named gates available to circuits.
#[derive(Clone, Debug, Default)]
pub struct GateLibrary {
    gates: BTreeMap<String, Arc<GateDef>>,
}

impl GateLibrary {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `{I, X, Y, Z, H, S, T, CNOT, CZ, SWAP}` with exact entries.
    pub fn builtin() -> Self {
        let defs = [
            ("I", matrix(&[&["1", "0"], &["0", "1"]])),
            ("X", matrix(&[&["0", "1"], &["1", "0"]])),
            ("Y", matrix(&[&["0", "-i"], &["i", "0"]])),
            ("Z", matrix(&[&["1", "0"], &["0", "-1"]])),
            (
                "H",
                matrix(&[&["1/2*r2", "1/2*r2"], &["1/2*r2", "-1/2*r2"]]),
            ),
            ("S", matrix(&[&["1", "0"], &["0", "i"]])),
            ("T", matrix(&[&["1", "0"], &["0", "1/2*r2 + 1/2*i*r2"]])),
            (
                "CNOT",
                matrix(&[
                    &["1", "0", "0", "0"],
                    &["0", "1", "0", "0"],
                    &["0", "0", "0", "1"],
                    &["0", "0", "1", "0"],
                ]),
            ),
            (
                "CZ",
                matrix(&[
                    &["1", "0", "0", "0"],
                    &["0", "1", "0", "0"],
                    &["0", "0", "1", "0"],
                    &["0", "0", "0", "-1"],
                ]),
            ),
            (
                "SWAP",
                matrix(&[
                    &["1", "0", "0", "0"],
                    &["0", "0", "1", "0"],
                    &["0", "1", "0", "0"],
                    &["0", "0", "0", "1"],
                ]),
            ),
        ];
        let mut lib = Self::empty();
        for (name, m) in defs {
            lib.insert(GateDef::new(name, m).expect("built-in gates are unitary"))
                .expect("distinct names");
        }
        lib
    }

    pub fn insert(&mut self, def: GateDef) -> Result<Arc<GateDef>, GateError> {
        if self.gates.contains_key(def.name()) {
            return Err(GateError::Duplicate(def.name().to_string()));
        }
        let def = Arc::new(def);
        self.gates.insert(def.name().to_string(), Arc::clone(&def));
        Ok(def)
    }

    pub fn get(&self, name: &str) -> Option<Arc<GateDef>> {
        self.gates.get(name).cloned()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<GateDef>> {
        self.gates.values()
    }
}

/// Shared instance of the built-in library.
pub fn builtin() -> &'static GateLibrary {
    static LIB: OnceLock<GateLibrary> = OnceLock::new();
    LIB.get_or_init(GateLibrary::builtin)
}

/// Built-in gate by name; panics on unknown names.
pub fn builtin_gate(name: &str) -> Arc<GateDef> {
    builtin()
        .get(name)
        .unwrap_or_else(|| panic!("no built-in gate {name}"))
}
