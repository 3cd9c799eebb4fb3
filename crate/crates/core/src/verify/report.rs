//! Runs a selection of checks and collects verdicts with witnesses.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use super::checks::{check_correctness, check_smoothness, check_universality};
use super::converse::audit_converse_chain;
use super::distance::{corruption_trial, min_distance, TrialMode, EXACT_LIMIT};
use super::information::check_capacity_properties;
use super::tree::{for_each_tree, leaf_distinctness, sample_trees, NaryTree};
use crate::capacity::{capacity_uldc, symbol_and_code_rate, CodeParams, Rational};
use crate::construct::LinearCodeSpec;
use crate::error::{Error, Result};
use crate::format::content_hash;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Correctness,
    Smoothness,
    Universality,
    Rate,
    Properties,
    Tree,
    Converse,
    MinDistance,
    Corruption,
}

impl CheckKind {
    pub const ALL: [CheckKind; 9] = [
        Self::Correctness,
        Self::Smoothness,
        Self::Universality,
        Self::Rate,
        Self::Properties,
        Self::Tree,
        Self::Converse,
        Self::MinDistance,
        Self::Corruption,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Correctness => "correctness",
            Self::Smoothness => "smoothness",
            Self::Universality => "universality",
            Self::Rate => "rate",
            Self::Properties => "properties",
            Self::Tree => "tree",
            Self::Converse => "converse",
            Self::MinDistance => "min-distance",
            Self::Corruption => "corruption",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|c| c.name()).collect();
            Error::Domain(format!("unknown check {s:?} (valid: {})", names.join(", ")))
        })
    }
}

impl Serialize for CheckKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: CheckKind,
    pub status: Status,
    pub summary: String,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub version: u32,
    pub params: CodeParams,
    pub content_hash: String,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn outcome(&self, check: CheckKind) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.check == check)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    /// `None` runs every check; the exhaustive ones are skipped above the
    /// length limit.
    pub checks: Option<Vec<CheckKind>>,
    /// Corruption fraction; defaults to the largest `e / M` with `e < M / N`.
    pub delta: Option<Rational>,
    pub seed: u64,
    /// Trees are enumerated exhaustively up to this many realizations.
    pub tree_limit: usize,
    /// Otherwise this many seeded samples are audited.
    pub tree_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            checks: None,
            delta: None,
            seed: 0,
            tree_limit: 10_000,
            tree_samples: 100,
        }
    }
}

/// Tree realizations used by the tree and converse checks.
#[derive(Debug, Clone)]
pub struct TreeSample {
    pub exhaustive: bool,
    pub trees: Vec<NaryTree>,
}

pub fn collect_trees(code: &LinearCodeSpec, limit: usize, samples: usize, seed: u64) -> Result<TreeSample> {
    let mut trees = Vec::new();
    match for_each_tree(code, limit, |t| {
        trees.push(t.clone());
        Ok(())
    }) {
        Ok(_) => Ok(TreeSample { exhaustive: true, trees }),
        Err(Error::SizeBudget { .. }) => Ok(TreeSample {
            exhaustive: false,
            trees: sample_trees(code, samples, seed)?,
        }),
        Err(e) => Err(e),
    }
}

fn outcome(check: CheckKind, pass: bool, summary: String, detail: Value) -> CheckOutcome {
    CheckOutcome {
        check,
        status: if pass { Status::Pass } else { Status::Fail },
        summary,
        detail,
    }
}

fn skip(check: CheckKind, reason: String) -> CheckOutcome {
    CheckOutcome {
        check,
        status: Status::Skip,
        summary: reason,
        detail: Value::Null,
    }
}

fn labels(code: &LinearCodeSpec, symbols: &[usize]) -> Vec<String> {
    symbols.iter().map(|&s| code.label(s).to_string()).collect()
}

fn perm_label(perm: &[usize]) -> String {
    let p: Vec<String> = perm.iter().map(|k| (k + 1).to_string()).collect();
    format!("({})", p.join(","))
}

/// Default corruption fraction: largest `e / M` with `e N < M`.
pub fn default_delta(code: &LinearCodeSpec) -> Result<Rational> {
    let (m, n) = (code.m(), code.n());
    Rational::new(((m - 1) / n) as u64, m as u64)
}

pub fn run_checks(code: &LinearCodeSpec, opts: &VerifyOptions) -> Result<VerifyReport> {
    let explicit = opts.checks.is_some();
    let checks = opts.checks.clone().unwrap_or_else(|| CheckKind::ALL.to_vec());
    if checks.is_empty() {
        return Err(Error::Domain("no checks selected".into()));
    }
    let mut trees: Option<std::result::Result<TreeSample, String>> = None;
    let mut out = Vec::with_capacity(checks.len());
    for &check in &checks {
        let o = match check {
            CheckKind::Correctness => correctness(code),
            CheckKind::Smoothness => smoothness(code),
            CheckKind::Universality => universality(code),
            CheckKind::Rate => rate(code)?,
            CheckKind::Properties => properties(code),
            CheckKind::Tree | CheckKind::Converse => {
                let sample = trees.get_or_insert_with(|| {
                    collect_trees(code, opts.tree_limit, opts.tree_samples, opts.seed).map_err(|e| e.to_string())
                });
                match sample {
                    Err(e) => outcome(check, false, format!("no tree can be built: {e}"), json!({ "error": e })),
                    Ok(s) if check == CheckKind::Tree => tree_check(code, s),
                    Ok(s) => converse_check(code, s)?,
                }
            }
            CheckKind::MinDistance | CheckKind::Corruption if code.m() > EXACT_LIMIT => skip(
                check,
                format!(
                    "exhaustive search limited to M <= {EXACT_LIMIT} (M = {}){}",
                    code.m(),
                    if explicit { "" } else { "; not run by default" }
                ),
            ),
            CheckKind::MinDistance => distance_check(code)?,
            CheckKind::Corruption => {
                let delta = match opts.delta {
                    Some(d) => d,
                    None => default_delta(code)?,
                };
                corruption_check(code, delta)?
            }
        };
        out.push(o);
    }
    Ok(VerifyReport {
        version: crate::format::FORMAT_VERSION,
        params: *code.params(),
        content_hash: content_hash(code)?,
        checks: out,
    })
}

fn correctness(code: &LinearCodeSpec) -> CheckOutcome {
    let r = check_correctness(code);
    let summary = match r.violations.first() {
        None => format!("all {} decoding sets determine their message", r.sets_checked),
        Some(v) => format!(
            "{} of {} sets fail; first: {} in S_{} leaves H(W_{} | S) = {}",
            r.violations.len(),
            r.sets_checked,
            code.set_label(&v.set),
            v.k + 1,
            v.k + 1,
            v.residual
        ),
    };
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| json!({"message": v.k + 1, "set_index": v.set_index, "set": labels(code, &v.set), "residual_bits": v.residual}))
        .collect();
    outcome(CheckKind::Correctness, r.pass, summary, json!({ "sets_checked": r.sets_checked, "violations": violations }))
}

fn smoothness(code: &LinearCodeSpec) -> CheckOutcome {
    let r = check_smoothness(code);
    let summary = match &r.witness {
        None => {
            let per: Vec<String> = r.counts.iter().map(|c| c[0].to_string()).collect();
            format!("every symbol lies in the same number of sets per message ({})", per.join(", "))
        }
        Some(w) => format!(
            "S_{}: {} lies in {} sets but {} lies in {}",
            w.k + 1,
            code.label(w.symbol_a),
            w.count_a,
            code.label(w.symbol_b),
            w.count_b
        ),
    };
    let witness = r.witness.as_ref().map(|w| {
        json!({"message": w.k + 1, "symbols": labels(code, &[w.symbol_a, w.symbol_b]), "counts": [w.count_a, w.count_b]})
    });
    outcome(CheckKind::Smoothness, r.pass, summary, json!({ "counts": r.counts, "witness": witness }))
}

fn universality(code: &LinearCodeSpec) -> CheckOutcome {
    let r = check_universality(code);
    let summary = match r.missing {
        None => "every symbol serves every message".to_string(),
        Some((k, s)) => format!("{} is in no decoding set of W_{}", code.label(s), k + 1),
    };
    let witness = r.missing.map(|(k, s)| json!({"message": k + 1, "symbol": code.label(s)}));
    outcome(CheckKind::Universality, r.pass, summary, json!({ "witness": witness }))
}

fn rate(code: &LinearCodeSpec) -> Result<CheckOutcome> {
    let (symbol, coded) = symbol_and_code_rate(code.params())?;
    let cap = capacity_uldc(code.n() as u64, code.k() as u64)?;
    let pass = symbol == cap;
    let rel = if symbol == cap { "=" } else if symbol < cap { "<" } else { ">" };
    Ok(outcome(
        CheckKind::Rate,
        pass,
        format!("symbol rate {symbol} {rel} capacity {cap}"),
        json!({"symbol_rate": symbol, "code_rate": coded, "capacity": cap}),
    ))
}

fn properties(code: &LinearCodeSpec) -> CheckOutcome {
    let r = check_capacity_properties(code);
    let failing: Vec<String> = r
        .verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| format!("{} ({})", v.property, v.witness.as_ref().map_or("", |w| w.detail.as_str())))
        .collect();
    let mut summary = if failing.is_empty() {
        "P1, P2a, P2b, P2c and P3 hold".to_string()
    } else {
        format!("failing: {}", failing.join("; "))
    };
    if !r.universal {
        summary.push_str(" [code is not universal]");
    }
    let verdicts: Vec<Value> = r
        .verdicts
        .iter()
        .map(|v| {
            json!({
                "property": v.property.to_string(),
                "name": v.property.description(),
                "pass": v.pass,
                "witness": v.witness.as_ref().map(|w| json!({
                    "symbols": labels(code, &w.symbols),
                    "message": w.message + 1,
                    "other_message": w.other_message.map(|k| k + 1),
                    "set": w.set.map(|(k, i)| json!({"message": k + 1, "index": i})),
                    "detail": w.detail,
                })),
            })
        })
        .collect();
    outcome(CheckKind::Properties, r.pass(), summary, json!({ "universal": r.universal, "verdicts": verdicts }))
}

fn mode(s: &TreeSample) -> &'static str {
    if s.exhaustive { "exhaustive" } else { "sampled" }
}

fn tree_check(code: &LinearCodeSpec, s: &TreeSample) -> CheckOutcome {
    let bad = s.trees.iter().find_map(|t| {
        let d = leaf_distinctness(t);
        (!d.distinct).then_some((t, d))
    });
    let failures = s.trees.iter().filter(|t| !leaf_distinctness(t).distinct).count();
    match bad {
        None => outcome(
            CheckKind::Tree,
            true,
            format!("{} trees ({}), all {} leaves distinct in each", s.trees.len(), mode(s), code.n().pow(code.k() as u32)),
            json!({"trees": s.trees.len(), "mode": mode(s), "failures": 0}),
        ),
        Some((t, d)) => {
            let dup = d.duplicate.expect("not distinct");
            outcome(
                CheckKind::Tree,
                false,
                format!(
                    "{failures} of {} trees ({}) repeat a leaf; first: pi = {}, root {}, choices {:?}: {} labels leaves {:?}",
                    s.trees.len(),
                    mode(s),
                    perm_label(&t.permutation),
                    code.label(t.root),
                    t.choices,
                    code.label(dup),
                    d.positions.iter().map(|p| p + 1).collect::<Vec<_>>()
                ),
                json!({
                    "trees": s.trees.len(),
                    "mode": mode(s),
                    "failures": failures,
                    "witness": {
                        "permutation": t.permutation.iter().map(|k| k + 1).collect::<Vec<_>>(),
                        "root": code.label(t.root),
                        "choices": t.choices,
                        "leaves": labels(code, &t.leaves()),
                        "duplicate": code.label(dup),
                    }
                }),
            )
        }
    }
}

fn converse_check(code: &LinearCodeSpec, s: &TreeSample) -> Result<CheckOutcome> {
    let mut first_loose = None;
    let mut loose = 0;
    let mut totals = None;
    for t in &s.trees {
        let a = audit_converse_chain(code, t)?;
        totals.get_or_insert((a.total_lhs, a.total_rhs, a.total_slack));
        if !a.tight() {
            loose += 1;
            if first_loose.is_none() {
                first_loose = Some((t, a));
            }
        }
    }
    let (lhs, rhs, slack) = totals.unwrap_or((0, 0, 0));
    let pass = first_loose.is_none() && !s.trees.is_empty();
    let summary = match &first_loose {
        None => format!("{} trees ({}), bound tight: N^K L_x = {lhs} = {rhs}", s.trees.len(), mode(s)),
        Some((t, a)) => {
            let per: Vec<String> = a.levels.iter().map(|l| format!("d{}: {}", l.depth, l.slack)).collect();
            format!(
                "total slack {slack} bit(s) (N^K L_x = {lhs} vs {rhs}); {loose} of {} trees loose; first: pi = {}, root {}, per level [{}], leaf gap {}",
                s.trees.len(),
                perm_label(&t.permutation),
                code.label(t.root),
                per.join(", "),
                a.leaf_gap
            )
        }
    };
    let witness = first_loose.map(|(t, a)| {
        json!({
            "permutation": t.permutation.iter().map(|k| k + 1).collect::<Vec<_>>(),
            "root": code.label(t.root),
            "choices": t.choices,
            "levels": a.levels.iter().map(|l| json!({"depth": l.depth, "message": l.message + 1, "lhs": l.lhs, "rhs": l.rhs, "slack": l.slack})).collect::<Vec<_>>(),
            "leaf_gap": a.leaf_gap,
        })
    });
    Ok(outcome(
        CheckKind::Converse,
        pass,
        summary,
        json!({"trees": s.trees.len(), "mode": mode(s), "total_lhs": lhs, "total_rhs": rhs, "total_slack": slack, "loose_trees": loose, "witness": witness}),
    ))
}

fn distance_check(code: &LinearCodeSpec) -> Result<CheckOutcome> {
    let d = min_distance(code)?;
    let pass = d.distance * code.n() >= code.m();
    let rel = if pass { ">=" } else { "<" };
    let lost: Vec<String> = d.lost_messages.iter().map(|k| format!("W_{}", k + 1)).collect();
    Ok(outcome(
        CheckKind::MinDistance,
        pass,
        format!(
            "d = {} {rel} M/N = {}/{}; smallest witness {} loses {} ({} minimal erasures)",
            d.distance,
            code.m(),
            code.n(),
            code.set_label(&d.witness),
            lost.join(", "),
            d.minimal_erasures.len()
        ),
        json!({
            "distance": d.distance,
            "witness": labels(code, &d.witness),
            "lost_messages": d.lost_messages.iter().map(|k| k + 1).collect::<Vec<_>>(),
            "minimal_erasures": d.minimal_erasures.iter().map(|e| labels(code, e)).collect::<Vec<_>>(),
        }),
    ))
}

fn corruption_check(code: &LinearCodeSpec, delta: Rational) -> Result<CheckOutcome> {
    let r = corruption_trial(code, delta, TrialMode::Exact)?;
    let min = match r.min_success {
        super::distance::SuccessProbability::Exact(p) => p,
        _ => unreachable!("exact mode"),
    };
    let always = r.clean_set_always.unwrap_or(false);
    let pass = match r.guarantee {
        Some(g) => always && min >= g,
        None => true,
    };
    let mut summary = format!(
        "delta = {delta}: {} corrupt of {}, {} patterns, min success {min}",
        r.corrupted,
        code.m(),
        r.patterns
    );
    match r.guarantee {
        Some(g) => summary.push_str(&format!(" (guarantee {g})")),
        None => summary.push_str(" (no guarantee)"),
    }
    if !always {
        if let Some((p, k)) = &r.worst_pattern {
            summary.push_str(&format!("; corrupting {} spoils every set of W_{}", code.set_label(p), k + 1));
        }
    }
    if let Some(w) = &r.warning {
        summary.push_str(&format!("; warning: {w}"));
    }
    Ok(outcome(
        CheckKind::Corruption,
        pass,
        summary,
        json!({
            "delta": delta,
            "corrupted": r.corrupted,
            "patterns": r.patterns,
            "min_success": min,
            "per_message": r.per_message,
            "guarantee": r.guarantee,
            "clean_set_always": always,
            "worst_pattern": r.worst_pattern.as_ref().map(|(p, k)| json!({"symbols": labels(code, p), "message": k + 1})),
            "warning": r.warning,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_sldc;
    use crate::fixtures::load_fixture;

    #[test]
    fn constructed_code_passes_everything() {
        let r = run_checks(&build_sldc(2, 3).unwrap(), &VerifyOptions::default()).unwrap();
        for c in &r.checks {
            assert_eq!(c.status, Status::Pass, "{}: {}", c.check, c.summary);
        }
    }

    #[test]
    fn fig1_verdicts() {
        let r = run_checks(&load_fixture("fig1").unwrap(), &VerifyOptions::default()).unwrap();
        let status = |k| r.outcome(k).unwrap().status;
        assert_eq!(status(CheckKind::Correctness), Status::Pass);
        assert_eq!(status(CheckKind::Smoothness), Status::Pass);
        assert_eq!(status(CheckKind::Properties), Status::Fail);
        assert_eq!(status(CheckKind::Converse), Status::Fail);
        assert_eq!(status(CheckKind::MinDistance), Status::Pass);
        assert_eq!(status(CheckKind::Corruption), Status::Pass);
        assert!(r.outcome(CheckKind::Converse).unwrap().summary.starts_with("total slack 1 bit(s)"));
        assert!(!r.pass());
    }

    #[test]
    fn long_codes_skip_exhaustive_checks() {
        let opts = VerifyOptions {
            checks: Some(vec![CheckKind::MinDistance, CheckKind::Corruption]),
            ..VerifyOptions::default()
        };
        let r = run_checks(&build_sldc(3, 3).unwrap(), &opts).unwrap();
        assert!(r.checks.iter().all(|c| c.status == Status::Skip));
        assert!(r.pass());
    }

    #[test]
    fn check_names_parse() {
        for c in CheckKind::ALL {
            assert_eq!(c.name().parse::<CheckKind>().unwrap(), c);
        }
        assert!("bogus".parse::<CheckKind>().is_err());
        let empty = VerifyOptions { checks: Some(vec![]), ..VerifyOptions::default() };
        assert!(run_checks(&build_sldc(2, 2).unwrap(), &empty).is_err());
    }
}
