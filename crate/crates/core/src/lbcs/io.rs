//! LBCS text format.
//!
//! ```text
//! n m
//! b k i1 ... ik     (m lines: rhs bit, support size, strictly increasing indices)
//! ```

use std::fmt::Write as _;

use super::{Lbcs, LbcsError};

fn perr(line: usize, message: impl Into<String>) -> LbcsError {
    LbcsError::Parse { line, message: message.into() }
}

pub fn parse_lbcs(text: &str) -> Result<Lbcs, LbcsError> {
    let mut header = None;
    let mut constraints = Vec::new();
    let mut last = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        last = line_no;
        let nums = line
            .split_whitespace()
            .map(|f| f.parse::<usize>().map_err(|_| perr(line_no, format!("not a non-negative integer: {f:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let Some((n, m)) = header else {
            if nums.len() != 2 {
                return Err(perr(line_no, "expected header `n m`"));
            }
            header = Some((nums[0], nums[1]));
            continue;
        };
        if constraints.len() == m {
            return Err(perr(line_no, format!("more than the declared {m} constraints")));
        }
        if nums.len() < 2 {
            return Err(perr(line_no, "expected `b k i1 ... ik`"));
        }
        let (b, k) = (nums[0], nums[1]);
        if b > 1 {
            return Err(perr(line_no, format!("right-hand side must be 0 or 1, found {b}")));
        }
        let support = &nums[2..];
        if support.len() != k {
            return Err(perr(line_no, format!("declared {k} variables, found {}", support.len())));
        }
        if k == 0 {
            return Err(perr(line_no, "empty support"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(perr(line_no, "variable indices must be strictly increasing"));
        }
        if let Some(&v) = support.iter().find(|&&v| v >= n) {
            return Err(perr(line_no, format!("variable {v} out of range 0..{n}")));
        }
        constraints.push((support.to_vec(), b == 1));
    }
    let (n, m) = header.ok_or_else(|| perr(last, "missing `n m` header"))?;
    if constraints.len() != m {
        return Err(perr(last, format!("declared {m} constraints, found {}", constraints.len())));
    }
    Lbcs::new(n, constraints)
}

pub fn write_lbcs(f: &Lbcs) -> String {
    let mut out = format!("{} {}\n", f.n_vars(), f.constraints().len());
    for c in f.constraints() {
        write!(out, "{} {}", u8::from(c.rhs), c.support.len()).unwrap();
        for i in &c.support {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
    }
    out
}
