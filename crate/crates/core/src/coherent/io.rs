//! Text formats for configurations, intersection numbers and certificates.
//!
//! Configuration: `n r`, then `n` lines of `n` class ids.
//! Intersection numbers: one `i j k p` line per non-zero entry.
//! Certificate: one `i f(i)` line per class.
//! Blank lines and `#` comments are ignored by every parser.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{CoherentConfiguration, CoherentError, EquivalenceCertificate};

fn perr(line: usize, message: impl Into<String>) -> CoherentError {
    CoherentError::Parse { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn ints<T: std::str::FromStr>(line: usize, s: &str, expected: Option<usize>) -> Result<Vec<T>, CoherentError> {
    let v = s
        .split_whitespace()
        .map(|f| f.parse::<T>().map_err(|_| perr(line, format!("not a non-negative integer: {f:?}"))))
        .collect::<Result<Vec<T>, _>>()?;
    match expected {
        Some(k) if v.len() != k => Err(perr(line, format!("expected {k} fields, found {}", v.len()))),
        _ => Ok(v),
    }
}

pub fn write_configuration(c: &CoherentConfiguration) -> String {
    let n = c.n();
    let mut out = format!("{} {}\n", n, c.rank());
    for row in c.colors().chunks(n.max(1)) {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

pub fn parse_configuration(text: &str) -> Result<CoherentConfiguration, CoherentError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "missing `n r` header"))?;
    let h = ints::<usize>(hl, header, Some(2))?;
    let (n, r) = (h[0], h[1]);
    if n == 0 {
        return Err(perr(hl, "vertex count must be positive"));
    }
    let mut color = Vec::with_capacity(n * n);
    let mut last = hl;
    for (ln, l) in lines.by_ref().take(n) {
        last = ln;
        let row = ints::<u32>(ln, l, Some(n))?;
        if let Some(&bad) = row.iter().find(|&&c| c as usize >= r) {
            return Err(perr(ln, format!("class id {bad} out of range 0..{r}")));
        }
        color.extend(row);
    }
    if color.len() != n * n {
        return Err(perr(last, format!("expected {n} rows")));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, "trailing data after the matrix"));
    }
    let c = CoherentConfiguration::from_dense(n, color)?;
    if c.rank() != r {
        return Err(perr(hl, format!("header declares {r} classes, matrix uses {}", c.rank())));
    }
    Ok(c)
}

pub fn write_intersection_numbers(c: &CoherentConfiguration) -> String {
    let mut out = String::new();
    for (&(i, j, k), &p) in c.intersection_numbers() {
        writeln!(out, "{i} {j} {k} {p}").unwrap();
    }
    out
}

pub fn parse_intersection_numbers(text: &str) -> Result<BTreeMap<(u32, u32, u32), u64>, CoherentError> {
    let mut out = BTreeMap::new();
    for (ln, l) in content_lines(text) {
        let v = ints::<u64>(ln, l, Some(4))?;
        let key = (
            u32::try_from(v[0]).map_err(|_| perr(ln, "class id too large"))?,
            u32::try_from(v[1]).map_err(|_| perr(ln, "class id too large"))?,
            u32::try_from(v[2]).map_err(|_| perr(ln, "class id too large"))?,
        );
        if out.insert(key, v[3]).is_some() {
            return Err(perr(ln, format!("duplicate entry {} {} {}", key.0, key.1, key.2)));
        }
    }
    Ok(out)
}

pub fn write_certificate(cert: &EquivalenceCertificate) -> String {
    let mut out = String::new();
    for (i, f) in cert.map.iter().enumerate() {
        writeln!(out, "{i} {f}").unwrap();
    }
    out
}

/// Reads a class map; every class `0..r` must appear exactly once on each side.
pub fn parse_certificate(text: &str) -> Result<Vec<u32>, CoherentError> {
    let mut pairs = Vec::new();
    let mut last = 1;
    for (ln, l) in content_lines(text) {
        let v = ints::<u32>(ln, l, Some(2))?;
        pairs.push((ln, v[0], v[1]));
        last = ln;
    }
    let r = pairs.len();
    let mut map = vec![None; r];
    let mut hit = vec![false; r];
    for (ln, i, f) in pairs {
        if i as usize >= r || f as usize >= r {
            return Err(perr(ln, format!("class id out of range 0..{r}")));
        }
        if map[i as usize].replace(f).is_some() {
            return Err(perr(ln, format!("class {i} mapped twice")));
        }
        if std::mem::replace(&mut hit[f as usize], true) {
            return Err(perr(ln, format!("class {f} hit twice")));
        }
    }
    map.into_iter().map(|f| f.ok_or_else(|| perr(last, "incomplete map"))).collect()
}
