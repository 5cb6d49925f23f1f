//! JSON certificate files.
//!
//! ```text
//! { "n": N, "d": D, "blocks": [[B_00, ..., B_0(N-1)], ...] }
//! { "d": D, "vars": [X_0, ..., X_(m-1)] }
//! ```
//!
//! Each matrix is a list of rows, each row a list of `[re, im]` pairs.
//! Numbers are written in shortest round-trip form, so parsing the writer's
//! output reproduces every entry bit for bit.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Deserialize;

use super::{ComplexMatrix, MagicUnitaryCandidate, OperatorSolutionCandidate, QcertError};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMagic {
    n: usize,
    d: usize,
    blocks: Vec<Vec<RawMatrix>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperators {
    d: usize,
    vars: Vec<RawMatrix>,
}

fn json_err(e: serde_json::Error) -> QcertError {
    QcertError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn shape_err(message: String) -> QcertError {
    QcertError::Parse { line: 0, column: 0, message }
}

fn matrix(raw: RawMatrix, d: usize, what: impl Fn() -> String) -> Result<ComplexMatrix, QcertError> {
    if raw.len() != d || raw.iter().any(|r| r.len() != d) {
        return Err(shape_err(format!("{} is not {d}x{d}", what())));
    }
    Ok(ComplexMatrix::from_row_iterator(
        d,
        d,
        raw.into_iter().flatten().map(|[re, im]| Complex64::new(re, im)),
    ))
}

pub fn parse_magic_unitary(text: &str) -> Result<MagicUnitaryCandidate, QcertError> {
    let raw: RawMagic = serde_json::from_str(text).map_err(json_err)?;
    if raw.blocks.len() != raw.n || raw.blocks.iter().any(|r| r.len() != raw.n) {
        return Err(shape_err(format!("blocks is not {0}x{0}", raw.n)));
    }
    let mut blocks = Vec::with_capacity(raw.n * raw.n);
    for (x, row) in raw.blocks.into_iter().enumerate() {
        for (y, b) in row.into_iter().enumerate() {
            blocks.push(matrix(b, raw.d, || format!("block ({x}, {y})"))?);
        }
    }
    MagicUnitaryCandidate::new(raw.n, raw.d, blocks)
}

pub fn parse_operator_solution(text: &str) -> Result<OperatorSolutionCandidate, QcertError> {
    let raw: RawOperators = serde_json::from_str(text).map_err(json_err)?;
    let vars = raw
        .vars
        .into_iter()
        .enumerate()
        .map(|(i, m)| matrix(m, raw.d, || format!("operator {i}")))
        .collect::<Result<Vec<_>, _>>()?;
    OperatorSolutionCandidate::new(raw.d, vars)
}

fn write_matrix(out: &mut String, m: &ComplexMatrix) {
    out.push('[');
    for r in 0..m.nrows() {
        if r > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for c in 0..m.ncols() {
            if c > 0 {
                out.push_str(", ");
            }
            let z = m[(r, c)];
            write!(out, "[{:?}, {:?}]", z.re, z.im).unwrap();
        }
        out.push(']');
    }
    out.push(']');
}

pub fn write_magic_unitary(u: &MagicUnitaryCandidate) -> String {
    let mut out = format!("{{\n  \"n\": {},\n  \"d\": {},\n  \"blocks\": [\n", u.n(), u.d());
    for x in 0..u.n() {
        out.push_str("    [\n");
        for y in 0..u.n() {
            out.push_str("      ");
            write_matrix(&mut out, u.block(x, y));
            out.push_str(if y + 1 < u.n() { ",\n" } else { "\n" });
        }
        out.push_str(if x + 1 < u.n() { "    ],\n" } else { "    ]\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn write_operator_solution(s: &OperatorSolutionCandidate) -> String {
    let mut out = format!("{{\n  \"d\": {},\n  \"vars\": [\n", s.d());
    for (i, v) in s.vars().iter().enumerate() {
        out.push_str("    ");
        write_matrix(&mut out, v);
        out.push_str(if i + 1 < s.vars().len() { ",\n" } else { "\n" });
    }
    out.push_str("  ]\n}\n");
    out
}
