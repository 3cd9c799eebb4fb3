//! Small hand-specified codes used as reference points by the test suites.
//!
//! Every fixture keeps its original labels `X_1..X_M`. Generator rows are
//! written as sums of named message bits; `0` marks a constant-zero row.

use crate::construct::{CodeParts, DecodingSuperset, LinearCodeSpec};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

pub const FIXTURE_NAMES: &[&str] = &["fig1", "fig2", "intro_nonsmooth", "eq28", "fig4"];

pub fn load_fixture(name: &str) -> Result<LinearCodeSpec> {
    match name {
        "fig1" => fig1(),
        "fig2" => fig2(),
        "intro_nonsmooth" => intro_nonsmooth(),
        "eq28" => eq28(),
        "fig4" => fig4(),
        other => Err(Error::UnknownFixture {
            name: other.to_string(),
            valid: FIXTURE_NAMES,
        }),
    }
}

/// Column names `a1..a{lw}, b1..` for `k` messages.
fn lettered_columns(k: usize, lw: usize) -> Vec<String> {
    (0..k)
        .flat_map(|m| {
            let letter = (b'a' + m as u8) as char;
            (1..=lw).map(move |i| format!("{letter}{i}"))
        })
        .collect()
}

fn single_bit_columns(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("W{i}")).collect()
}

fn parse_row(expr: &str, columns: &[String]) -> Result<BitVector> {
    let mut row = BitVector::zeros(columns.len());
    if expr.trim() == "0" {
        return Ok(row);
    }
    for term in expr.split('+') {
        let term = term.trim();
        let col = columns
            .iter()
            .position(|c| c == term)
            .ok_or_else(|| Error::Format(format!("unknown message bit {term:?}")))?;
        row.flip(col);
    }
    Ok(row)
}

/// One-based set lists per message.
fn supersets(sets: &[&[[usize; 2]]]) -> Vec<DecodingSuperset> {
    sets.iter()
        .enumerate()
        .map(|(k, list)| DecodingSuperset {
            k,
            sets: list.iter().map(|s| s.iter().map(|&x| x - 1).collect()).collect(),
        })
        .collect()
}

struct Fixture<'a> {
    k: usize,
    lw: usize,
    columns: Vec<String>,
    symbols: &'a [&'a [&'a str]],
    sets: &'a [&'a [[usize; 2]]],
    groups: Option<Vec<usize>>,
}

impl Fixture<'_> {
    fn build(self) -> Result<LinearCodeSpec> {
        let gens = self
            .symbols
            .iter()
            .map(|rows| {
                let parsed = rows
                    .iter()
                    .map(|r| parse_row(r, &self.columns))
                    .collect::<Result<Vec<_>>>()?;
                BitMatrix::from_rows(self.columns.len(), parsed)
            })
            .collect::<Result<Vec<_>>>()?;
        LinearCodeSpec::from_parts(CodeParts {
            n: 2,
            k: self.k,
            lw: self.lw,
            column_order: self.columns.join(" "),
            labels: (1..=gens.len()).map(|i| format!("X_{i}")).collect(),
            digits: None,
            symbol_gens: gens,
            supersets: supersets(self.sets),
            groups: self.groups,
        })
    }
}

/// Six one-bit symbols; database split `{X_1,X_2,X_3}`, `{X_4,X_5,X_6}`.
fn fig1() -> Result<LinearCodeSpec> {
    Fixture {
        k: 3,
        lw: 1,
        columns: single_bit_columns(3),
        symbols: &[&["W1"], &["W2"], &["W3"], &["W2+W3"], &["W1+W2"], &["W3+W1"]],
        sets: &[
            &[[1, 4], [2, 5], [3, 6]],
            &[[1, 5], [2, 6], [3, 4]],
            &[[1, 6], [2, 4], [3, 5]],
        ],
        groups: Some(vec![0, 0, 0, 1, 1, 1]),
    }
    .build()
}

/// Universal but not smooth; `X_1` alone serves three sets of `W_1`.
fn intro_nonsmooth() -> Result<LinearCodeSpec> {
    Fixture {
        k: 3,
        lw: 1,
        columns: single_bit_columns(3),
        symbols: &[&["W1"], &["W2"], &["W3"], &["W2+W3"]],
        sets: &[
            &[[1, 2], [1, 3], [1, 4]],
            &[[1, 2], [2, 3], [3, 4]],
            &[[1, 3], [2, 3], [2, 4]],
        ],
        groups: None,
    }
    .build()
}

/// Four 6-bit symbols; every superset uses all four, so no split into two
/// databases exists.
fn fig2() -> Result<LinearCodeSpec> {
    Fixture {
        k: 3,
        lw: 4,
        columns: lettered_columns(3, 4),
        symbols: &[
            &["a1", "a2", "b1", "b2", "c1", "c2"],
            &["a3", "a4", "b1", "b3", "c1", "c3"],
            &["a1", "a3", "b3", "b4", "c2", "c4"],
            &["a2", "a4", "b2", "b4", "c3", "c4"],
        ],
        sets: &[&[[1, 2], [3, 4]], &[[1, 3], [2, 4]], &[[1, 4], [2, 3]]],
        groups: None,
    }
    .build()
}

/// Length-4 code for two 4-bit messages; one constant-zero row per symbol.
fn eq28() -> Result<LinearCodeSpec> {
    Fixture {
        k: 2,
        lw: 4,
        columns: lettered_columns(2, 4),
        symbols: &[
            &["0", "a2", "b3", "a4+b4"],
            &["a1", "0", "a3+b3", "b4"],
            &["a1+b1", "b2", "a3", "0"],
            &["b1", "a2+b2", "0", "a4"],
        ],
        sets: &[&[[1, 2], [3, 4]], &[[1, 4], [2, 3]]],
        groups: Some(vec![0, 1, 0, 1]),
    }
    .build()
}

/// Length-8 code for three 8-bit messages, 7 bits per symbol.
fn fig4() -> Result<LinearCodeSpec> {
    Fixture {
        k: 3,
        lw: 8,
        columns: lettered_columns(3, 8),
        symbols: &[
            &["a1", "b1", "c1", "a2+b2", "a3+c2", "b3+c3", "a4+b4+c4"],
            &["a6", "b6", "c4", "a5+b5", "a8+c3", "b8+c2", "a7+b7+c1"],
            &["a7", "b4", "c6", "a8+b3", "a5+c5", "b2+c8", "a6+b1+c7"],
            &["a4", "b7", "c7", "a3+b8", "a2+c8", "b5+c5", "a1+b6+c6"],
            &["a5", "b2", "c2", "a6+b1", "a7+c1", "b4+c4", "a8+b3+c3"],
            &["a2", "b5", "c3", "a1+b6", "a4+c4", "b7+c1", "a3+b8+c2"],
            &["a3", "b3", "c5", "a4+b4", "a1+c6", "b1+c7", "a2+b2+c8"],
            &["a8", "b8", "c8", "a7+b7", "a6+c7", "b6+c6", "a5+b5+c5"],
        ],
        sets: &[
            &[[1, 5], [2, 6], [3, 7], [4, 8]],
            &[[1, 6], [2, 5], [3, 8], [4, 7]],
            &[[1, 7], [3, 5], [2, 8], [4, 6]],
        ],
        groups: Some(vec![0, 0, 0, 0, 1, 1, 1, 1]),
    }
    .build()
}
