//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Derived values come from the oracles in this file.

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sldc_core::capacity::{capacity_uldc, min_length, min_upload_bits, pir_capacity, symbol_and_code_rate};
use sldc_core::netsim::{retrieve, serve_database, ServerHandle};
use sldc_core::pir::{cost_metrics, deniability_audit, privacy_audit, scheme_from_sldc, PirScheme};
use sldc_core::verify::information::transitivity_counterexample;
use sldc_core::verify::tree::for_each_tree;
use sldc_core::verify::{
    audit_converse_chain, build_nary_tree, check_capacity_properties, check_correctness, check_smoothness,
    check_universality, conditional_entropy, corruption_trial, leaf_distinctness, min_distance, sample_trees, Chooser,
    EntropyQuery, NaryTree, Property, SuccessProbability, TrialMode,
};
use sldc_core::{build_sldc, load_fixture, BitVector, LinearCodeSpec, Rational, FIXTURE_NAMES};

const GRID: [(usize, usize); 6] = [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)];

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn r(n: u64, d: u64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn ac1() -> Outcome {
    let checks = [
        ("capacity_uldc(2,2)", capacity_uldc(2, 2).unwrap(), r(4, 3)),
        ("capacity_uldc(3,3)", capacity_uldc(3, 3).unwrap(), r(27, 13)),
        ("pir_capacity(2,3)", pir_capacity(2, 3).unwrap(), r(4, 7)),
    ];
    for (name, got, want) in checks {
        ensure(got == want, || format!("{name} = {got}, expected {want}"))?;
    }
    let m = min_length(2, 3).unwrap();
    ensure(m == 8, || format!("min_length(2,3) = {m}"))?;
    let up = min_upload_bits(2, 3).unwrap();
    ensure(up == 2.0, || format!("min_upload_bits(2,3) = {up}"))?;
    Ok("4/3, 27/13, 4/7, 8, 2 exact".into())
}

fn ac2() -> Outcome {
    let mut slowest = Duration::ZERO;
    for (n, k) in GRID {
        let start = Instant::now();
        let code = build_sldc(n, k).map_err(|e| format!("build({n},{k}): {e}"))?;
        ensure(check_correctness(&code).pass, || format!("({n},{k}) correctness"))?;
        ensure(check_smoothness(&code).pass, || format!("({n},{k}) smoothness"))?;
        ensure(check_universality(&code).pass, || format!("({n},{k}) universality"))?;
        let (rate, _) = symbol_and_code_rate(code.params()).unwrap();
        let cap = capacity_uldc(n as u64, k as u64).unwrap();
        ensure(rate == cap, || format!("({n},{k}) rate {rate} != {cap}"))?;
        let took = start.elapsed();
        ensure(took < Duration::from_secs(5), || format!("({n},{k}) took {took:?}"))?;
        slowest = slowest.max(took);
    }
    Ok(format!("6 codes correct, smooth, universal, at capacity; slowest {:.2?}", slowest))
}

/// Exhaustive realizations when `N^K <= 27`, else 100 seeded samples.
fn trees_for(code: &LinearCodeSpec) -> (Vec<NaryTree>, bool) {
    if code.n().pow(code.k() as u32) <= 27 {
        let mut all = Vec::new();
        for_each_tree(code, 1_000_000, |t| {
            all.push(t.clone());
            Ok(())
        })
        .unwrap();
        (all, true)
    } else {
        (sample_trees(code, 100, 7).unwrap(), false)
    }
}

fn ac3() -> Outcome {
    let mut audited = 0;
    for (n, k) in GRID {
        let code = build_sldc(n, k).unwrap();
        let (trees, exhaustive) = trees_for(&code);
        ensure(exhaustive || trees.len() >= 100, || format!("({n},{k}) only {} samples", trees.len()))?;
        let bound = (code.m() * code.params().lx) as i64;
        for t in &trees {
            let a = audit_converse_chain(&code, t).unwrap();
            ensure(a.levels.iter().all(|l| l.slack == 0) && a.leaf_gap == 0 && a.total_slack == 0, || {
                format!("({n},{k}) tree {:?} root {} has slack {}", t.permutation, t.root, a.total_slack)
            })?;
            ensure(a.total_lhs == bound, || format!("({n},{k}) lhs {} != N^K L_x = {bound}", a.total_lhs))?;
        }
        audited += trees.len();
    }
    let fig1 = load_fixture("fig1").unwrap();
    let (trees, _) = trees_for(&fig1);
    for t in &trees {
        let a = audit_converse_chain(&fig1, t).unwrap();
        ensure(a.total_slack == 1, || format!("fig1 tree {:?} root {}: slack {}", t.permutation, t.root, a.total_slack))?;
    }
    Ok(format!("{audited} grid trees tight; fig1 slack 1 bit on all {} trees", trees.len()))
}

fn ac4() -> Outcome {
    let mut count = 0;
    for (n, k) in [(2, 2), (2, 3)] {
        let code = build_sldc(n, k).unwrap();
        let (trees, exhaustive) = trees_for(&code);
        ensure(exhaustive, || format!("({n},{k}) not enumerated"))?;
        for t in &trees {
            let mut leaves = t.leaves();
            ensure(leaves.len() == code.m(), || format!("({n},{k}) {} leaves", leaves.len()))?;
            leaves.sort_unstable();
            leaves.dedup();
            ensure(leaves.len() == code.m(), || format!("({n},{k}) tree {:?} root {} repeats a leaf", t.permutation, t.root))?;
        }
        count += trees.len();
    }
    let intro = load_fixture("intro_nonsmooth").unwrap();
    let t = build_nary_tree(&intro, &[0, 1, 2], 0, &Chooser::Explicit(vec![0, 0, 1, 0, 0, 1, 1])).unwrap();
    let labels: Vec<&str> = t.leaves().iter().map(|&s| intro.label(s)).collect();
    let expected = ["X_1", "X_3", "X_2", "X_3", "X_2", "X_4", "X_3", "X_2"];
    ensure(labels == expected, || format!("intro tree leaves {labels:?}"))?;
    let d = leaf_distinctness(&t);
    ensure(d.duplicate == Some(1), || format!("duplicate {:?}", d.duplicate))?;
    Ok(format!("{count} trees with distinct leaves; intro tree leaves {}", labels.join(" ")))
}

fn ac5() -> Outcome {
    let c22 = check_capacity_properties(&build_sldc(2, 2).unwrap());
    ensure(c22.pass(), || "build(2,2) fails a property".into())?;
    let fig1 = check_capacity_properties(&load_fixture("fig1").unwrap());
    let p2a = fig1.verdict(Property::P2a);
    ensure(!p2a.pass, || "fig1 passes P2a".into())?;
    let w = p2a.witness.as_ref().ok_or("fig1 P2a has no witness")?;
    ensure(w.symbols.len() == 2 && w.other_message.is_some(), || format!("weak witness {w:?}"))?;
    let intro = check_capacity_properties(&load_fixture("intro_nonsmooth").unwrap());
    let failing: Vec<String> = intro.verdicts.iter().filter(|v| !v.pass).map(|v| v.property.to_string()).collect();
    ensure(!failing.is_empty(), || "intro_nonsmooth passes every property".into())?;
    for name in FIXTURE_NAMES {
        let code = load_fixture(name).unwrap();
        if let Some(ce) = transitivity_counterexample(&code) {
            return Err(format!("transitivity fails on {name}: {ce:?}"));
        }
    }
    Ok(format!(
        "build(2,2) P1-P3 hold; fig1 P2a witness {:?} ({}); intro fails {}; transitivity holds on all fixtures",
        w.symbols.iter().map(|&s| s + 1).collect::<Vec<_>>(),
        w.detail,
        failing.join(",")
    ))
}

fn block_from_index(v: u64, bits: usize) -> BitVector {
    BitVector::from_bits((0..bits).map(|i| (v >> (bits - 1 - i)) & 1 == 1))
}

fn shannon(counts: impl Iterator<Item = usize>, total: usize) -> f64 {
    counts
        .map(|c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

/// `H(X_A | W_J)` computed from the full joint distribution.
fn brute_entropy(code: &LinearCodeSpec, symbols: &[usize], given: &[usize]) -> f64 {
    let bits = code.params().message_bits();
    let total = 1usize << bits;
    let mut joint: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut marginal: HashMap<Vec<bool>, usize> = HashMap::new();
    for v in 0..total as u64 {
        let block = block_from_index(v, bits);
        let w: Vec<bool> = given.iter().flat_map(|&k| code.message_columns(k).map(|c| block.get(c))).collect();
        let mut key = w.clone();
        for &s in symbols {
            key.extend(code.generator(s).row_iter().map(|row| row.dot(&block).unwrap()));
        }
        *joint.entry(key).or_default() += 1;
        *marginal.entry(w).or_default() += 1;
    }
    shannon(joint.into_values(), total) - shannon(marginal.into_values(), total)
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut used = Vec::new();
    for name in FIXTURE_NAMES {
        let code = load_fixture(name).unwrap();
        if code.params().message_bits() > 12 {
            continue;
        }
        for _ in 0..200 {
            let symbols: Vec<usize> = (0..code.m()).filter(|_| rng.random::<bool>()).collect();
            let given: Vec<usize> = (0..code.k()).filter(|_| rng.random::<bool>()).collect();
            let q = EntropyQuery {
                symbols: symbols.clone(),
                given: given.clone(),
            };
            let rank = conditional_entropy(&code, &q).unwrap();
            let brute = brute_entropy(&code, &symbols, &given);
            ensure(brute == rank as f64, || format!("{name}: H(X{symbols:?} | W{given:?}) rank {rank} vs {brute}"))?;
        }
        used.push(*name);
    }
    ensure(used.len() >= 4, || format!("only {used:?} qualify"))?;
    Ok(format!("200 queries each on {}", used.join(", ")))
}

fn ac7() -> Outcome {
    for (n, k) in GRID {
        let scheme = scheme_from_sldc(&build_sldc(n, k).unwrap()).unwrap();
        let space = n.pow(k as u32 - 1);
        let uniform = r(1, space as u64);
        let privacy = privacy_audit(&scheme).unwrap();
        ensure(privacy.pass, || format!("({n},{k}) privacy witness {:?}", privacy.witness))?;
        for (db, per_k) in privacy.table.iter().enumerate() {
            for row in per_k {
                ensure(row.len() == space && row.iter().all(|p| *p == uniform), || {
                    format!("({n},{k}) database {} distribution {row:?}", db + 1)
                })?;
            }
        }
        ensure(deniability_audit(&scheme).unwrap().pass, || format!("({n},{k}) deniability"))?;
        let cost = cost_metrics(&scheme).unwrap();
        let want = (k - 1) as f64 * (n as f64).log2();
        for &u in &cost.upload_bits {
            ensure((u - want).abs() <= 1e-12, || format!("({n},{k}) upload {u} vs {want}"))?;
        }
        let cap = pir_capacity(n as u64, k as u64).unwrap();
        ensure(cost.rate == cap, || format!("({n},{k}) rate {} vs {cap}", cost.rate))?;
    }
    Ok("uniform 1/N^(K-1) queries for every message; deniable; upload (K-1)log2 N; rate = PIR capacity".into())
}

fn ac8() -> Outcome {
    let fig1 = load_fixture("fig1").unwrap();
    let report = corruption_trial(&fig1, r(1, 3), TrialMode::Exact).unwrap();
    ensure(report.corrupted == 2, || format!("{} corrupted", report.corrupted))?;
    ensure(report.clean_set_always == Some(true), || "some pattern spoils every set".into())?;
    // independent count: every pair misses at least one set per message
    for a in 0..fig1.m() {
        for b in a + 1..fig1.m() {
            for sup in fig1.supersets() {
                ensure(sup.sets.iter().any(|s| !s.contains(&a) && !s.contains(&b)), || {
                    format!("pair X_{} X_{} hits every set of W_{}", a + 1, b + 1, sup.k + 1)
                })?;
            }
        }
    }
    let min = match report.min_success {
        SuccessProbability::Exact(p) => p,
        other => return Err(format!("inexact {other:?}")),
    };
    ensure(min >= r(1, 3), || format!("min success {min}"))?;
    let d = min_distance(&fig1).unwrap();
    ensure(d.distance == 3, || format!("distance {}", d.distance))?;
    ensure(d.minimal_erasures.contains(&vec![0, 4, 5]), || {
        format!("{{X_1,X_5,X_6}} not among minimal erasures {:?}", d.minimal_erasures)
    })?;
    Ok(format!(
        "{} patterns of 2, min success {min}; d = 3 with witness {{X_1,X_5,X_6}}",
        report.patterns
    ))
}

fn random_block(scheme: &PirScheme, rng: &mut ChaCha8Rng) -> BitVector {
    BitVector::from_bits((0..scheme.code().params().message_bits()).map(|_| rng.random::<bool>()))
}

fn ac9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut total = 0;
    for (n, k) in [(2, 3), (3, 2)] {
        let scheme = scheme_from_sldc(&build_sldc(n, k).unwrap()).unwrap();
        let block = random_block(&scheme, &mut rng);
        let messages = scheme.code().split_messages(&block).unwrap();
        let servers: Vec<ServerHandle> = (0..n)
            .map(|db| serve_database(&scheme, db, &block, "127.0.0.1:0").unwrap())
            .collect();
        let endpoints: Vec<String> = servers.iter().map(|s| s.local_addr().to_string()).collect();
        let mut upload: Option<Vec<(u32, usize)>> = None;
        for i in 0..1000 {
            let theta = i % k;
            let (w, t) = retrieve(&scheme, theta, &endpoints, &mut rng).map_err(|e| format!("({n},{k}) retrieval {i}: {e}"))?;
            ensure(w == messages[theta], || format!("({n},{k}) retrieval {i} returned a wrong W_{}", theta + 1))?;
            let shape: Vec<(u32, usize)> = t.per_database.iter().map(|d| (d.upload_bits_wire, d.upload_frame_bytes)).collect();
            let first = upload.get_or_insert_with(|| shape.clone());
            ensure(*first == shape, || format!("({n},{k}) upload varies: {first:?} vs {shape:?}"))?;
            ensure(t.per_database.iter().all(|d| d.download_bits == scheme.code().params().lx), || "download size".into())?;
        }
        total += 1000;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("{total} loopback retrievals correct, constant upload, {:.2?}", took))
}

fn sldc(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_sldc")).args(args).output().expect("run sldc");
    out.stdout
}

/// SHA-256 document hash of `build --n 2 --k 2`, frozen.
const BUILD_2_2_HASH: &str = "a98a50be5314c7c9ba0a5ba8f925e14b48832db05fa34f2672c4d35e8232eb9d";

fn ac10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = sldc(&["build", "--n", "2", "--k", "2"]);
    let b = sldc(&["build", "--n", "2", "--k", "2"]);
    ensure(!a.is_empty() && a == b, || "build output differs between runs".into())?;
    let doc: serde_json::Value = serde_json::from_slice(&a).map_err(|e| e.to_string())?;
    let hash = doc["content_hash"].as_str().unwrap_or_default();
    ensure(hash == BUILD_2_2_HASH, || format!("content_hash {hash}"))?;
    let path = dir.path().join("c23.json");
    std::fs::write(&path, sldc(&["build", "--n", "2", "--k", "3"])).map_err(|e| e.to_string())?;
    let fig1 = dir.path().join("fig1.json");
    std::fs::write(&fig1, sldc(&["fixture", "--name", "fig1"])).map_err(|e| e.to_string())?;
    for file in [&path, &fig1] {
        let f = file.to_str().unwrap();
        for format in ["text", "json"] {
            let x = sldc(&["verify", f, "--format", format]);
            let y = sldc(&["verify", f, "--format", format]);
            ensure(!x.is_empty() && x == y, || format!("verify {f} --format {format} differs"))?;
        }
    }
    Ok(format!("build and verify byte-identical; build 2 2 hash {}..", &BUILD_2_2_HASH[..12]))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1", "capacity formulas", ac1),
        ("AC2", "construction", ac2),
        ("AC3", "converse tightness", ac3),
        ("AC4", "leaf distinctness", ac4),
        ("AC5", "capacity properties", ac5),
        ("AC6", "entropy oracle", ac6),
        ("AC7", "privacy", ac7),
        ("AC8", "corruption", ac8),
        ("AC9", "network end-to-end", ac9),
        ("AC10", "determinism", ac10),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {id} {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {name}: {why}");
            }
        }
    }
    println!("{} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
