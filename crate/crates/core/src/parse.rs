//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! defgate <NAME> <arity>        # followed by 2^arity rows of literals
//! qubits <n>
//! input <bitstring>
//! inputblock <q1,q2,...>        # followed by 2^k rows of literals
//! gate <NAME> <q> [<q2>]
//! measure <q>
//! ```
//!
//! Matrix rows are comma-separated scalar literals (`1/2*r2 + 1/2*i*r2`).

use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::density::ExactBlock;
use crate::gate::{builtin, GateDef, GateError, GateLibrary};
use crate::matrix::ExactMatrix;
use crate::scalar::{ExactScalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown gate '{0}'")]
    UnknownGate(String),
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("gate targets qubit {0} twice")]
    DuplicateTarget(usize),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Circuit(CircuitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl From<CircuitError> for ParseErrorKind {
    fn from(e: CircuitError) -> Self {
        match e {
            CircuitError::QubitOutOfRange { qubit, width } => {
                ParseErrorKind::QubitOutOfRange { qubit, width }
            }
            CircuitError::DuplicateTarget(q) => ParseErrorKind::DuplicateTarget(q),
            other => ParseErrorKind::Circuit(other),
        }
    }
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    col: line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            col: line[..s].chars().count() + 1,
        });
    }
    out
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    library: GateLibrary,
    defined: Vec<Arc<GateDef>>,
}

impl<'a> Parser<'a> {
    fn err(line: usize, col: usize, kind: impl Into<ParseErrorKind>) -> ParseError {
        ParseError {
            line,
            col,
            kind: kind.into(),
        }
    }

    fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        Self::err(line, col, ParseErrorKind::Syntax(msg.into()))
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.pos).copied();
        self.pos += 1;
        l
    }

    fn uint(tok: &Token<'_>, line: usize) -> Result<usize, ParseError> {
        tok.text.parse().map_err(|_| {
            Self::syntax(
                line,
                tok.col,
                format!("expected a non-negative integer, got '{}'", tok.text),
            )
        })
    }

    fn expect_args(
        toks: &[Token<'_>],
        n: std::ops::RangeInclusive<usize>,
        line: usize,
        what: &str,
    ) -> Result<(), ParseError> {
        let got = toks.len() - 1;
        if !n.contains(&got) {
            let col = toks.get(*n.end() + 1).or(toks.last()).map_or(1, |t| t.col);
            return Err(Self::syntax(
                line,
                col,
                format!("'{what}' takes {n:?} argument(s), got {got}"),
            ));
        }
        Ok(())
    }

    /// Reads `dim` rows of `dim` comma-separated literals.
    fn matrix_rows(&mut self, dim: usize, header_line: usize) -> Result<ExactMatrix, ParseError> {
        let mut rows = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (line, text) = self.next_line().ok_or_else(|| {
                Self::syntax(header_line, 1, format!("expected {dim} matrix rows"))
            })?;
            let mut row = Vec::with_capacity(dim);
            let mut offset = 0;
            for cell in text.split(',') {
                let col = text[..offset].chars().count() + 1;
                offset += cell.len() + 1;
                let v: ExactScalar = cell.parse().map_err(|e: ScalarError| match e {
                    ScalarError::Syntax { col: c, msg } => Self::syntax(line, col + c - 1, msg),
                    other => Self::syntax(line, col, other.to_string()),
                })?;
                row.push(v);
            }
            if row.len() != dim {
                return Err(Self::syntax(
                    line,
                    1,
                    format!("expected {dim} entries, got {}", row.len()),
                ));
            }
            rows.push(row);
        }
        Ok(ExactMatrix::from_rows(rows).expect("rows have equal length"))
    }

    fn run(mut self) -> Result<Circuit, ParseError> {
        let mut circuit: Option<Circuit> = None;
        let mut measure_seen = false;
        while let Some((line, text)) = self.next_line() {
            let toks = tokenize(text);
            let Some(head) = toks.first() else { continue };
            match head.text {
                "qubits" => {
                    Self::expect_args(&toks, 1..=1, line, "qubits")?;
                    if circuit.is_some() {
                        return Err(Self::syntax(line, head.col, "'qubits' given twice"));
                    }
                    let n = Self::uint(&toks[1], line)?;
                    circuit = Some(Circuit::new(n).map_err(|e| Self::err(line, toks[1].col, e))?);
                }
                "defgate" => {
                    Self::expect_args(&toks, 2..=2, line, "defgate")?;
                    let name = toks[1].text;
                    let arity = Self::uint(&toks[2], line)?;
                    if !(1..=2).contains(&arity) {
                        return Err(Self::syntax(line, toks[2].col, "arity must be 1 or 2"));
                    }
                    let m = self.matrix_rows(1 << arity, line)?;
                    let def = GateDef::new(name, m).map_err(|e| Self::err(line, toks[1].col, e))?;
                    let def = self
                        .library
                        .insert(def)
                        .map_err(|e| Self::err(line, toks[1].col, e))?;
                    self.defined.push(def);
                }
                other => {
                    let Some(c) = circuit.as_mut() else {
                        return Err(Self::syntax(
                            line,
                            head.col,
                            format!("'{other}' before 'qubits'"),
                        ));
                    };
                    match other {
                        "input" => {
                            Self::expect_args(&toks, 1..=1, line, "input")?;
                            let tok = &toks[1];
                            let bits: Option<Vec<bool>> = tok
                                .text
                                .chars()
                                .map(|ch| match ch {
                                    '0' => Some(false),
                                    '1' => Some(true),
                                    _ => None,
                                })
                                .collect();
                            let bits = bits.ok_or_else(|| {
                                Self::syntax(line, tok.col, "input must be a bitstring")
                            })?;
                            c.set_input(&bits)
                                .map_err(|e| Self::err(line, tok.col, e))?;
                        }
                        "gate" => {
                            Self::expect_args(&toks, 2..=3, line, "gate")?;
                            let name = &toks[1];
                            let gate = self.library.get(name.text).ok_or_else(|| {
                                Self::err(
                                    line,
                                    name.col,
                                    ParseErrorKind::UnknownGate(name.text.into()),
                                )
                            })?;
                            let targets = toks[2..]
                                .iter()
                                .map(|t| Self::uint(t, line))
                                .collect::<Result<Vec<_>, _>>()?;
                            c.push(gate, &targets).map_err(|e| {
                                let col = match &e {
                                    CircuitError::QubitOutOfRange { qubit, .. } => toks[2..]
                                        .iter()
                                        .find(|t| t.text.parse() == Ok(*qubit))
                                        .map_or(toks[2].col, |t| t.col),
                                    CircuitError::DuplicateTarget(_) => {
                                        toks.last().map_or(1, |t| t.col)
                                    }
                                    _ => name.col,
                                };
                                Self::err(line, col, e)
                            })?;
                        }
                        "measure" => {
                            Self::expect_args(&toks, 1..=1, line, "measure")?;
                            if measure_seen {
                                return Err(Self::syntax(line, head.col, "'measure' given twice"));
                            }
                            measure_seen = true;
                            let q = Self::uint(&toks[1], line)?;
                            c.set_measured(q)
                                .map_err(|e| Self::err(line, toks[1].col, e))?;
                        }
                        "inputblock" => {
                            if toks.len() < 2 {
                                return Err(Self::syntax(
                                    line,
                                    head.col,
                                    "'inputblock' needs qubit labels",
                                ));
                            }
                            let list: String = toks[1..].iter().map(|t| t.text).collect();
                            let labels = list
                                .split(',')
                                .map(|s| {
                                    s.parse::<usize>().map_err(|_| {
                                        Self::syntax(
                                            line,
                                            toks[1].col,
                                            format!("bad qubit label '{s}'"),
                                        )
                                    })
                                })
                                .collect::<Result<Vec<_>, _>>()?;
                            if labels.len() > 8 {
                                return Err(Self::syntax(
                                    line,
                                    toks[1].col,
                                    "input blocks hold at most 8 qubits",
                                ));
                            }
                            let m = self.matrix_rows(1 << labels.len(), line)?;
                            let block = ExactBlock::new(labels, m)
                                .map_err(|e| Self::syntax(line, toks[1].col, e.to_string()))?;
                            c.add_input_block(block)
                                .map_err(|e| Self::err(line, toks[1].col, e))?;
                        }
                        _ => {
                            return Err(Self::syntax(
                                line,
                                head.col,
                                format!("unknown directive '{other}'"),
                            ))
                        }
                    }
                }
            }
        }
        let mut circuit = circuit.ok_or_else(|| Self::syntax(1, 1, "missing 'qubits' line"))?;
        for def in self.defined {
            circuit.register_gate(def);
        }
        Ok(circuit)
    }
}

fn is_builtin(g: &GateDef) -> bool {
    builtin().get(g.name()).is_some_and(|b| *b == *g)
}

/// Parses circuit text against the built-in gate library.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    parse_circuit_with(text, builtin().clone())
}

/// Parses circuit text with an explicit starting library.
pub fn parse_circuit_with(text: &str, library: GateLibrary) -> Result<Circuit, ParseError> {
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    Parser {
        lines,
        pos: 0,
        library,
        defined: Vec::new(),
    }
    .run()
}

fn write_matrix(out: &mut String, m: &ExactMatrix) -> fmt::Result {
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| m.get(r, c).to_string()).collect();
        writeln!(out, "{}", row.join(", "))?;
    }
    Ok(())
}

/// Renders a circuit in the text format; `parse_circuit` reads it back.
pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    let mut emitted: Vec<&str> = Vec::new();
    let extra = c
        .steps()
        .iter()
        .map(|s| s.gate())
        .filter(|g| !is_builtin(g));
    for g in c.custom_gates().iter().chain(extra) {
        if emitted.contains(&g.name()) {
            continue;
        }
        emitted.push(g.name());
        writeln!(out, "defgate {} {}", g.name(), g.arity()).unwrap();
        write_matrix(&mut out, g.matrix()).unwrap();
    }
    writeln!(out, "qubits {}", c.width()).unwrap();
    writeln!(out, "input {}", c.input_string()).unwrap();
    for b in c.input_blocks() {
        let labels: Vec<String> = b.labels().iter().map(|l| l.to_string()).collect();
        writeln!(out, "inputblock {}", labels.join(",")).unwrap();
        write_matrix(&mut out, b.matrix()).unwrap();
    }
    for s in c.steps() {
        let t: Vec<String> = s.targets().iter().map(|q| q.to_string()).collect();
        writeln!(out, "gate {} {}", s.gate().name(), t.join(" ")).unwrap();
    }
    writeln!(out, "measure {}", c.measured()).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_block_local, gen_clifford, gen_entangle_disentangle, ghz};

    #[test]
    fn bell_text() {
        let c = parse_circuit("qubits 2\ninput 00\ngate H 0\ngate CNOT 0 1\nmeasure 0").unwrap();
        assert_eq!(c, crate::generate::bell());
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_circuit("qubits 2\ngate CNOT 0 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateTarget(0));
        assert_eq!((e.line, e.col), (2, 13));

        let e = parse_circuit("qubits 2\n# note\ngate FOO 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownGate("FOO".into()));
        assert_eq!((e.line, e.col), (3, 6));

        let e = parse_circuit("qubits 2\ngate H 5\n").unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::QubitOutOfRange { qubit: 5, width: 2 }
        );

        let e = parse_circuit("qubits 2\ninput 0x\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert!(parse_circuit("gate H 0\n").is_err());
        assert!(parse_circuit("qubits 1\nfrobnicate\n").is_err());
    }

    #[test]
    fn defgate_validation() {
        let text = "defgate HALF 1\n1, 0\n0, 1/2\nqubits 1\n";
        assert!(matches!(
            parse_circuit(text).unwrap_err().kind,
            ParseErrorKind::Gate(GateError::NotUnitary(_))
        ));
        let text = "defgate W 1\n1/2*r2, 1/2*r2\n1/2*r2, -1/2*r2\nqubits 1\ngate W 0\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(
            c.steps()[0].gate().matrix(),
            builtin().get("H").unwrap().matrix()
        );
        let e = parse_circuit("defgate V 1\n1, 0\n0, cos\nqubits 1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.line, 3);
    }

    #[test]
    fn inputblock_parses() {
        let text = "qubits 2\ninputblock 1\n1/2, 0\n0, 1/2\ngate H 0\nmeasure 1\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.input_blocks().len(), 1);
        assert_eq!(c.input_blocks()[0].labels(), &[1]);
        let bad = "qubits 1\ninputblock 0\n1, 0\n0, 1\n";
        assert!(matches!(
            parse_circuit(bad).unwrap_err().kind,
            ParseErrorKind::Circuit(_)
        ));
    }

    #[test]
    fn round_trip_corpus() {
        let mut corpus = Vec::new();
        for seed in 0..8 {
            corpus.push(gen_block_local(6, 2, 30, seed));
            corpus.push(gen_entangle_disentangle(5, 2, 25, seed));
            corpus.push(gen_clifford(7, 40, seed));
        }
        corpus.push(ghz(9));
        let custom = "defgate SQ 1\n1, 0\n0, 1/2*r2 + 1/2*i*r2\nqubits 3\ninput 101\n\
                      inputblock 0,2\n1/2, 0, 0, 0\n0, 0, 0, 0\n0, 0, 0, 0\n0, 0, 0, 1/2\n\
                      gate SQ 1\ngate SWAP 2 0\nmeasure 2\n";
        corpus.push(parse_circuit(custom).unwrap());
        assert!(corpus.len() >= 20);
        for c in corpus {
            let text = serialize_circuit(&c);
            let back = parse_circuit(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(serialize_circuit(&back), text);
        }
    }
}
