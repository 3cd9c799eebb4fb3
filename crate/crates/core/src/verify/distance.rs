//! Erasure distance and corruption tolerance of a code's decoding sets.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::entropy::h;
use crate::capacity::Rational;
use crate::construct::{decode, encode, LinearCodeSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Largest code length searched exhaustively.
pub const EXACT_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinDistance {
    pub distance: usize,
    /// Lexicographically smallest minimal erasure.
    pub witness: Vec<usize>,
    /// Messages lost under `witness`.
    pub lost_messages: Vec<usize>,
    /// Every erasure of size `distance` that loses data, lexicographic.
    pub minimal_erasures: Vec<Vec<usize>>,
}

fn lost(code: &LinearCodeSpec, erased: &[usize]) -> Vec<usize> {
    let rest: Vec<usize> = (0..code.m()).filter(|s| !erased.contains(s)).collect();
    let all = h(code, &rest, 0);
    let lw = code.params().lw;
    // H(W_k | rest) = L_w + H(rest | W_k) - H(rest)
    (0..code.k()).filter(|&k| lw + h(code, &rest, 1 << k) > all).collect()
}

/// Smallest number of erased symbols after which some message can no longer
/// be recovered from all remaining symbols.
pub fn min_distance(code: &LinearCodeSpec) -> Result<MinDistance> {
    let m = code.m();
    if m > EXACT_LIMIT {
        return Err(Error::SizeBudget {
            what: "code length for exhaustive erasure search (use min_distance_sampled)",
            actual: m as u128,
            limit: EXACT_LIMIT as u128,
        });
    }
    for e in 1..=m {
        let minimal: Vec<Vec<usize>> = (0..m)
            .combinations(e)
            .filter(|c| !lost(code, c).is_empty())
            .collect();
        if let Some(first) = minimal.first() {
            return Ok(MinDistance {
                distance: e,
                witness: first.clone(),
                lost_messages: lost(code, first),
                minimal_erasures: minimal,
            });
        }
    }
    unreachable!("erasing every symbol loses every message")
}

/// Upper bound on the distance from `samples` random erasure orders.
pub fn min_distance_sampled(code: &LinearCodeSpec, samples: usize, seed: u64) -> MinDistance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Vec<usize>> = None;
    let mut order: Vec<usize> = (0..code.m()).collect();
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let limit = best.as_ref().map_or(code.m(), |b| b.len() - 1);
        for e in 1..=limit {
            if !lost(code, &order[..e]).is_empty() {
                let mut w = order[..e].to_vec();
                w.sort_unstable();
                best = Some(w);
                break;
            }
        }
    }
    let witness = best.unwrap_or_else(|| (0..code.m()).collect());
    MinDistance {
        distance: witness.len(),
        lost_messages: lost(code, &witness),
        minimal_erasures: vec![witness.clone()],
        witness,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialMode {
    /// Every corruption pattern and every decoding set.
    Exact,
    /// Random messages, patterns and errors; decoding runs for real.
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SuccessProbability {
    Exact(Rational),
    Sampled { successes: usize, trials: usize },
}

impl SuccessProbability {
    pub fn as_f64(&self) -> f64 {
        match self {
            Self::Exact(r) => r.to_f64(),
            Self::Sampled { successes, trials } => *successes as f64 / (*trials).max(1) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorruptionReport {
    pub delta: Rational,
    /// `floor(delta * M)`.
    pub corrupted: usize,
    pub patterns: usize,
    /// Worst case per message.
    pub per_message: Vec<SuccessProbability>,
    pub min_success: SuccessProbability,
    /// Exact mode only: whether every pattern leaves a clean set for every
    /// message.
    pub clean_set_always: Option<bool>,
    /// First pattern that corrupts every set of some message, with that message.
    pub worst_pattern: Option<(Vec<usize>, usize)>,
    /// `1 - delta N`, absent when negative.
    pub guarantee: Option<Rational>,
    pub warning: Option<String>,
}

impl CorruptionReport {
    /// Minimum success meets the `1 - delta N` guarantee (vacuous if none).
    pub fn meets_guarantee(&self) -> bool {
        match (&self.min_success, &self.guarantee) {
            (_, None) => true,
            (SuccessProbability::Exact(p), Some(g)) => p >= g,
            (s, Some(g)) => s.as_f64() >= g.to_f64(),
        }
    }
}

pub fn corruption_trial(code: &LinearCodeSpec, delta: Rational, mode: TrialMode) -> Result<CorruptionReport> {
    if delta > Rational::one() {
        return Err(Error::Domain(format!("delta = {delta} exceeds 1")));
    }
    let m = code.m();
    let e = (delta.numer() as u128 * m as u128 / delta.denom() as u128) as usize;
    let n_r = Rational::integer(code.n() as u64);
    let dn = delta.checked_mul(&n_r)?;
    let guarantee = Rational::one().checked_sub(&dn).ok().filter(|g| *g > Rational::zero());
    let warning = (dn >= Rational::one()).then(|| {
        format!("delta = {delta} >= 1/N: no success guarantee applies")
    });
    let mut report = CorruptionReport {
        delta,
        corrupted: e,
        patterns: 0,
        per_message: Vec::new(),
        min_success: SuccessProbability::Exact(Rational::one()),
        clean_set_always: None,
        worst_pattern: None,
        guarantee,
        warning,
    };
    match mode {
        TrialMode::Exact => exact_trial(code, e, &mut report)?,
        TrialMode::Sampled { trials, seed } => sampled_trial(code, e, trials, seed, &mut report)?,
    }
    Ok(report)
}

fn exact_trial(code: &LinearCodeSpec, e: usize, report: &mut CorruptionReport) -> Result<()> {
    if code.m() > EXACT_LIMIT {
        return Err(Error::SizeBudget {
            what: "code length for exact corruption enumeration (use sampled mode)",
            actual: code.m() as u128,
            limit: EXACT_LIMIT as u128,
        });
    }
    let mut worst: Vec<Rational> = code
        .supersets()
        .iter()
        .map(|_| Rational::one())
        .collect();
    let mut always = true;
    for pattern in (0..code.m()).combinations(e) {
        report.patterns += 1;
        for sup in code.supersets() {
            let clean = sup.sets.iter().filter(|s| !s.iter().any(|x| pattern.contains(x))).count();
            if clean == 0 && always {
                always = false;
                report.worst_pattern = Some((pattern.clone(), sup.k));
            }
            let p = Rational::new(clean as u64, sup.sets.len() as u64)?;
            if p < worst[sup.k] {
                worst[sup.k] = p;
            }
        }
    }
    let min = worst.iter().copied().min().unwrap_or(Rational::one());
    report.per_message = worst.into_iter().map(SuccessProbability::Exact).collect();
    report.min_success = SuccessProbability::Exact(min);
    report.clean_set_always = Some(always);
    Ok(())
}

fn sampled_trial(
    code: &LinearCodeSpec,
    e: usize,
    trials: usize,
    seed: u64,
    report: &mut CorruptionReport,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = code.params().message_bits();
    let lx = code.params().lx;
    let mut successes = vec![0usize; code.k()];
    let mut symbols: Vec<usize> = (0..code.m()).collect();
    for _ in 0..trials {
        let block = BitVector::from_bits((0..bits).map(|_| rng.random::<bool>()));
        let truth = code.split_messages(&block)?;
        let mut x = encode(code, &block)?;
        symbols.shuffle(&mut rng);
        for &s in &symbols[..e] {
            loop {
                let err = BitVector::from_bits((0..lx).map(|_| rng.random::<bool>()));
                if !err.is_zero() || lx == 0 {
                    x[s].xor_assign(&err)?;
                    break;
                }
            }
        }
        for sup in code.supersets() {
            let si = rng.random_range(0..sup.sets.len());
            let vals: Vec<BitVector> = sup.sets[si].iter().map(|&s| x[s].clone()).collect();
            if decode(code, sup.k, si, &vals).is_ok_and(|w| w == truth[sup.k]) {
                successes[sup.k] += 1;
            }
        }
    }
    report.patterns = trials;
    report.per_message = successes
        .iter()
        .map(|&s| SuccessProbability::Sampled { successes: s, trials })
        .collect();
    let min = successes.iter().copied().min().unwrap_or(trials);
    report.min_success = SuccessProbability::Sampled { successes: min, trials };
    Ok(())
}
