//! The matrix text format shared by the CLI and test fixtures.
//!
//! One row per line, entries written `p/q` (or just `p` when the
//! denominator is 1), separated by whitespace; a blank line (or end of
//! input) terminates the matrix. `parse(print(m)) == m` holds
//! bit-exactly because rationals are always stored reduced with a
//! positive denominator.

use crate::{Matrix, Rational, RationalMatrix};
use num_traits::{One, Signed, Zero};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: invalid entry {token:?}")]
    BadEntry {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line}: expected {expected} entries, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no matrix data found")]
    Empty,
    #[error("line {line}, column {column}: zero denominator in {token:?}")]
    ZeroDenominator {
        line: usize,
        column: usize,
        token: String,
    },
}

fn parse_entry(token: &str, line: usize, column: usize) -> Result<Rational, ParseError> {
    let bad = || ParseError::BadEntry {
        line,
        column,
        token: token.to_string(),
    };
    if let Some((num, den)) = token.split_once('/') {
        let n = crate::Integer::from_str(num).map_err(|_| bad())?;
        let d = crate::Integer::from_str(den).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ParseError::ZeroDenominator {
                line,
                column,
                token: token.to_string(),
            });
        }
        Ok(Rational::new(n, d))
    } else {
        let n = crate::Integer::from_str(token).map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

/// Parse one matrix from text. Reading stops at the first blank line
/// after the data, so several matrices can live in one stream.
pub fn parse_matrix(text: &str) -> Result<RationalMatrix, ParseError> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            if rows.is_empty() {
                continue; // leading blank lines are harmless
            }
            break;
        }
        let mut row = Vec::new();
        let mut col = 0usize;
        let bytes = raw.as_bytes();
        let mut pos = 0usize;
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let token = &raw[start..pos];
            row.push(parse_entry(token, line_no, start + 1)?);
            col += 1;
        }
        if let Some(first) = rows.first() {
            if col != first.len() {
                return Err(ParseError::RaggedRow {
                    line: line_no,
                    expected: first.len(),
                    found: col,
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError::Empty);
    }
    let (nrows, cols) = (rows.len(), rows[0].len());
    let entries: Vec<Rational> = rows.into_iter().flatten().collect();
    Ok(Matrix::new(nrows, cols, entries))
}

/// Canonical `p/q` (or `p`) rendering of a rational.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the canonical rational rendering.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    parse_entry(s, 0, 0)
}

/// serde adapter storing rationals as canonical `p/q` strings, so JSON
/// documents round-trip bit-exactly.
pub mod rational_string {
    use crate::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Canonical printer; inverse of [`parse_matrix`].
pub fn print_matrix(m: &RationalMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_rational).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// True if every entry is an integer.
pub fn is_integral(m: &RationalMatrix) -> bool {
    m.entries().iter().all(|e| e.denom().is_one())
}

/// Least common multiple of all entry denominators.
pub fn denominator_lcm(m: &RationalMatrix) -> crate::Integer {
    let mut acc = crate::Integer::from(1);
    for e in m.entries() {
        acc = num_integer::lcm(acc, e.denom().abs());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let text = "1 -2/3 0\n7/2 1 4\n0 0 1\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(print_matrix(&m), text);
        assert_eq!(parse_matrix(&print_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn blank_line_terminates() {
        let text = "1 0\n0 1\n\n9 9\n9 9\n";
        let m = parse_matrix(text).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn errors_carry_position() {
        match parse_matrix("1 x\n") {
            Err(ParseError::BadEntry {
                line: 1, column: 3, ..
            }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        match parse_matrix("1 2\n3\n") {
            Err(ParseError::RaggedRow {
                line: 2,
                expected: 2,
                found: 1,
            }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        match parse_matrix("1/0\n") {
            Err(ParseError::ZeroDenominator {
                line: 1, column: 1, ..
            }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        assert_eq!(parse_matrix("  \n\n"), Err(ParseError::Empty));
    }

    #[test]
    fn unreduced_input_normalizes() {
        let m = parse_matrix("2/4\n").unwrap();
        assert_eq!(print_matrix(&m), "1/2\n");
    }
}
