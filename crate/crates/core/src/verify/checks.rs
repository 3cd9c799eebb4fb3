//! Correctness, smoothness and universality of a code's decoding sets.

use serde::Serialize;

use super::entropy::h_message_given;
use crate::construct::LinearCodeSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrectnessViolation {
    pub k: usize,
    pub set_index: usize,
    pub set: Vec<usize>,
    /// `H(W_k | S)` in bits; zero for a valid decoding set.
    pub residual: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrectnessReport {
    pub pass: bool,
    pub sets_checked: usize,
    pub violations: Vec<CorrectnessViolation>,
}

/// Every listed set must determine its message: `H(W_k | S) = 0`.
pub fn check_correctness(code: &LinearCodeSpec) -> CorrectnessReport {
    let mut violations = Vec::new();
    let mut sets_checked = 0;
    for sup in code.supersets() {
        for (set_index, set) in sup.sets.iter().enumerate() {
            sets_checked += 1;
            let residual = h_message_given(code, sup.k, set, 0);
            if residual != 0 {
                violations.push(CorrectnessViolation {
                    k: sup.k,
                    set_index,
                    set: set.clone(),
                    residual,
                });
            }
        }
    }
    CorrectnessReport {
        pass: violations.is_empty(),
        sets_checked,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothnessWitness {
    pub k: usize,
    pub symbol_a: usize,
    pub count_a: usize,
    pub symbol_b: usize,
    pub count_b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothnessReport {
    pub pass: bool,
    /// `counts[k][m]`: number of sets of `W_k` containing `X_m`.
    pub counts: Vec<Vec<usize>>,
    pub witness: Option<SmoothnessWitness>,
}

fn membership_counts(code: &LinearCodeSpec) -> Vec<Vec<usize>> {
    code.supersets()
        .iter()
        .map(|sup| {
            let mut c = vec![0; code.m()];
            for set in &sup.sets {
                for &s in set {
                    c[s] += 1;
                }
            }
            c
        })
        .collect()
}

/// Every symbol appears equally often in each superset.
pub fn check_smoothness(code: &LinearCodeSpec) -> SmoothnessReport {
    let counts = membership_counts(code);
    let witness = counts.iter().enumerate().find_map(|(k, c)| {
        let b = c.iter().position(|&x| x != c[0])?;
        Some(SmoothnessWitness {
            k,
            symbol_a: 0,
            count_a: c[0],
            symbol_b: b,
            count_b: c[b],
        })
    });
    SmoothnessReport {
        pass: witness.is_none(),
        counts,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalityReport {
    pub pass: bool,
    /// First `(k, symbol)` with the symbol in no set of `W_k`.
    pub missing: Option<(usize, usize)>,
}

/// Every symbol appears in at least one set of every superset.
pub fn check_universality(code: &LinearCodeSpec) -> UniversalityReport {
    let missing = membership_counts(code)
        .iter()
        .enumerate()
        .find_map(|(k, c)| c.iter().position(|&x| x == 0).map(|s| (k, s)));
    UniversalityReport {
        pass: missing.is_none(),
        missing,
    }
}
