//! Same/distinct information predicates and the five structural properties
//! every capacity-achieving universal LDC must have.

use std::fmt;

use serde::Serialize;

use super::checks::check_universality;
use super::entropy::{all_but, full_mask, h, h_given_symbols, mask_of, MessageMask};
use crate::construct::LinearCodeSpec;
use crate::error::{Error, Result};

fn check_symbols(code: &LinearCodeSpec, symbols: &[usize]) -> Result<()> {
    match symbols.iter().find(|&&s| s >= code.m()) {
        Some(&s) => Err(Error::OutOfBounds { index: s, limit: code.m() }),
        None => Ok(()),
    }
}

fn check_messages(code: &LinearCodeSpec, messages: &[usize]) -> Result<()> {
    match messages.iter().find(|&&k| k >= code.k()) {
        Some(&k) => Err(Error::OutOfBounds { index: k, limit: code.k() }),
        None => Ok(()),
    }
}

/// `X_{i1}` and `X_{i2}` determine each other once every message outside
/// `kset` is known.
pub fn same_information(code: &LinearCodeSpec, i1: usize, i2: usize, kset: &[usize]) -> Result<bool> {
    check_symbols(code, &[i1, i2])?;
    check_messages(code, kset)?;
    Ok(same_masked(code, i1, i2, full_mask(code) & !mask_of(kset)))
}

fn same_masked(code: &LinearCodeSpec, i1: usize, i2: usize, given: MessageMask) -> bool {
    h_given_symbols(code, &[i1], &[i2], given) == 0 && h_given_symbols(code, &[i2], &[i1], given) == 0
}

/// Knowing `X_{i2}` leaves the residual entropy of `X_{i1}` about `W_k`
/// unchanged: `H(X_{i1} | X_{i2}, W_{-k}) = H(X_{i1} | W_{-k})`.
pub fn distinct_information(code: &LinearCodeSpec, i1: usize, i2: usize, k: usize) -> Result<bool> {
    check_symbols(code, &[i1, i2])?;
    check_messages(code, &[k])?;
    Ok(distinct_masked(code, i1, i2, k))
}

fn distinct_masked(code: &LinearCodeSpec, i1: usize, i2: usize, k: usize) -> bool {
    let given = all_but(code, k);
    h_given_symbols(code, &[i1], &[i2], given) == h(code, &[i1], given)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Property {
    P1,
    P2a,
    P2b,
    P2c,
    P3,
}

impl Property {
    pub const ALL: [Property; 5] = [Self::P1, Self::P2a, Self::P2b, Self::P2c, Self::P3];

    pub fn description(self) -> &'static str {
        match self {
            Self::P1 => "non-zero entropy",
            Self::P2a => "same interference",
            Self::P2b => "distinct desired information",
            Self::P2c => "independence of coded symbols",
            Self::P3 => "incompatibility of same and distinct",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Concrete counterexample. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyWitness {
    pub symbols: Vec<usize>,
    pub message: usize,
    pub other_message: Option<usize>,
    /// `(k, set index)` of the decoding set the symbols were drawn from.
    pub set: Option<(usize, usize)>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub property: Property,
    pub pass: bool,
    pub witness: Option<PropertyWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    /// Whether the universality precondition holds. The properties are
    /// evaluated regardless.
    pub universal: bool,
    pub verdicts: Vec<PropertyVerdict>,
}

impl PropertyReport {
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, p: Property) -> &PropertyVerdict {
        self.verdicts.iter().find(|v| v.property == p).expect("all properties evaluated")
    }
}

fn verdict(property: Property, witness: Option<PropertyWitness>) -> PropertyVerdict {
    PropertyVerdict {
        property,
        pass: witness.is_none(),
        witness,
    }
}

/// Ordered pairs of distinct members of every decoding set, as
/// `(k, set index, i1, i2)` in enumeration order.
fn set_pairs(code: &LinearCodeSpec) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
    code.supersets().iter().flat_map(|sup| {
        sup.sets.iter().enumerate().flat_map(move |(si, set)| {
            set.iter().enumerate().flat_map(move |(a, &i1)| {
                set.iter()
                    .enumerate()
                    .filter(move |&(b, _)| b != a)
                    .map(move |(_, &i2)| (sup.k, si, i1, i2))
            })
        })
    })
}

fn label(code: &LinearCodeSpec, i: usize) -> &str {
    code.label(i)
}

fn p1(code: &LinearCodeSpec) -> Option<PropertyWitness> {
    (0..code.m()).find_map(|i| {
        (0..code.k()).find_map(|k| {
            (h(code, &[i], all_but(code, k)) == 0).then(|| PropertyWitness {
                symbols: vec![i],
                message: k,
                other_message: None,
                set: None,
                detail: format!("H({} | W without W_{}) = 0", label(code, i), k + 1),
            })
        })
    })
}

fn p2a(code: &LinearCodeSpec) -> Option<PropertyWitness> {
    set_pairs(code).find_map(|(k, si, i1, i2)| {
        (0..code.k()).filter(|&k2| k2 != k).find_map(|k2| {
            let given = all_but(code, k2);
            if same_masked(code, i1, i2, given) {
                return None;
            }
            let (a, b) = if h_given_symbols(code, &[i1], &[i2], given) != 0 { (i1, i2) } else { (i2, i1) };
            Some(PropertyWitness {
                symbols: vec![i1, i2],
                message: k,
                other_message: Some(k2),
                set: Some((k, si)),
                detail: format!(
                    "{} in S_{}, about W_{}: H({} | {}, W without W_{}) = {} != 0",
                    code.set_label(&code.superset(k).sets[si]),
                    k + 1,
                    k2 + 1,
                    label(code, a),
                    label(code, b),
                    k2 + 1,
                    h_given_symbols(code, &[a], &[b], given)
                ),
            })
        })
    })
}

fn p2b(code: &LinearCodeSpec) -> Option<PropertyWitness> {
    set_pairs(code).find_map(|(k, si, i1, i2)| {
        (!distinct_masked(code, i1, i2, k)).then(|| {
            let given = all_but(code, k);
            PropertyWitness {
                symbols: vec![i1, i2],
                message: k,
                other_message: None,
                set: Some((k, si)),
                detail: format!(
                    "H({a} | {b}, W without W_{kk}) = {} but H({a} | W without W_{kk}) = {}",
                    h_given_symbols(code, &[i1], &[i2], given),
                    h(code, &[i1], given),
                    a = label(code, i1),
                    b = label(code, i2),
                    kk = k + 1
                ),
            }
        })
    })
}

fn p2c(code: &LinearCodeSpec) -> Option<PropertyWitness> {
    set_pairs(code).find_map(|(k, si, i1, i2)| {
        let cond = h_given_symbols(code, &[i1], &[i2], 0);
        let plain = h(code, &[i1], 0);
        (cond != plain).then(|| PropertyWitness {
            symbols: vec![i1, i2],
            message: k,
            other_message: None,
            set: Some((k, si)),
            detail: format!(
                "H({a} | {b}) = {cond} but H({a}) = {plain}",
                a = label(code, i1),
                b = label(code, i2)
            ),
        })
    })
}

fn p3(code: &LinearCodeSpec) -> Option<PropertyWitness> {
    (0..code.m()).find_map(|i1| {
        (0..code.m()).find_map(|i2| {
            (0..code.k()).find_map(|k| {
                let both = same_masked(code, i1, i2, all_but(code, k)) && distinct_masked(code, i1, i2, k);
                both.then(|| PropertyWitness {
                    symbols: vec![i1, i2],
                    message: k,
                    other_message: None,
                    set: None,
                    detail: format!(
                        "{} and {} carry both the same and distinct information about W_{}",
                        label(code, i1),
                        label(code, i2),
                        k + 1
                    ),
                })
            })
        })
    })
}

/// Evaluates all five properties exhaustively. Witnesses are the first
/// counterexamples in enumeration order (symbols, then sets, then messages).
pub fn check_capacity_properties(code: &LinearCodeSpec) -> PropertyReport {
    PropertyReport {
        universal: check_universality(code).pass,
        verdicts: vec![
            verdict(Property::P1, p1(code)),
            verdict(Property::P2a, p2a(code)),
            verdict(Property::P2b, p2b(code)),
            verdict(Property::P2c, p2c(code)),
            verdict(Property::P3, p3(code)),
        ],
    }
}

/// First `(i1, i2, i3, kset mask)` where same-information fails to be
/// transitive, scanning every message subset.
pub fn transitivity_counterexample(code: &LinearCodeSpec) -> Option<(usize, usize, usize, MessageMask)> {
    let m = code.m();
    for kset in 0..=full_mask(code) {
        let given = full_mask(code) & !kset;
        let same: Vec<Vec<bool>> = (0..m)
            .map(|a| (0..m).map(|b| same_masked(code, a, b, given)).collect())
            .collect();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if same[a][b] && same[b][c] && !same[a][c] {
                        return Some((a, b, c, kset));
                    }
                }
            }
        }
    }
    None
}
