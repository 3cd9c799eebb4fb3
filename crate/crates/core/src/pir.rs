//! PIR_max view of a code: each database serves a list of possible answers,
//! and a retrieval of `W_k` picks one query tuple (one answer per database)
//! whose answers form a decoding set of `W_k`.

use rand::Rng;
use serde::Serialize;

use crate::capacity::Rational;
use crate::construct::{decode_with_members, LinearCodeSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// A way to retrieve `W_k`: query `queries[n]` goes to database `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryTuple {
    pub queries: Vec<usize>,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PirScheme {
    code: LinearCodeSpec,
    /// `databases[n][q]` is the symbol answered by database `n` to query `q`.
    databases: Vec<Vec<usize>>,
    /// Per message, the admissible query tuples with their probabilities.
    tuples: Vec<Vec<QueryTuple>>,
}

/// One retrieval request, before it is split across databases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryBundle {
    pub theta: usize,
    pub tuple_index: usize,
    pub queries: Vec<usize>,
}

impl PirScheme {
    /// Validates an explicit scheme. Weights must be non-negative and sum to
    /// one per message; every tuple must address a set that decodes.
    pub fn new(code: LinearCodeSpec, databases: Vec<Vec<usize>>, tuples: Vec<Vec<QueryTuple>>) -> Result<Self> {
        let n = code.n();
        if databases.len() != n {
            return Err(Error::InvalidScheme(format!("{} databases for N = {n}", databases.len())));
        }
        for (d, list) in databases.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::InvalidScheme(format!("database {} has no answers", d + 1)));
            }
            if let Some(&s) = list.iter().find(|&&s| s >= code.m()) {
                return Err(Error::OutOfBounds { index: s, limit: code.m() });
            }
        }
        if tuples.len() != code.k() {
            return Err(Error::InvalidScheme(format!("{} query families for K = {}", tuples.len(), code.k())));
        }
        for (k, family) in tuples.iter().enumerate() {
            if family.is_empty() {
                return Err(Error::InvalidScheme(format!("no way to retrieve W_{}", k + 1)));
            }
            let mut total = Rational::zero();
            for t in family {
                if t.queries.len() != n {
                    return Err(Error::InvalidScheme(format!("query tuple {:?} has wrong arity", t.queries)));
                }
                for (d, &q) in t.queries.iter().enumerate() {
                    if q >= databases[d].len() {
                        return Err(Error::OutOfBounds { index: q, limit: databases[d].len() });
                    }
                }
                total = total.checked_add(&t.weight)?;
            }
            if total != Rational::one() {
                return Err(Error::InvalidScheme(format!("weights for W_{} sum to {total}", k + 1)));
            }
        }
        Ok(Self { code, databases, tuples })
    }

    pub fn code(&self) -> &LinearCodeSpec {
        &self.code
    }

    pub fn databases(&self) -> &[Vec<usize>] {
        &self.databases
    }

    pub fn tuples(&self, k: usize) -> &[QueryTuple] {
        &self.tuples[k]
    }

    pub fn all_tuples(&self) -> &[Vec<QueryTuple>] {
        &self.tuples
    }

    pub fn query_space(&self, n: usize) -> usize {
        self.databases[n].len()
    }

    /// Symbols addressed by a tuple, in database order.
    pub fn members(&self, queries: &[usize]) -> Vec<usize> {
        queries.iter().enumerate().map(|(n, &q)| self.databases[n][q]).collect()
    }

    /// Same databases and tuples, with a different family for `W_{k+1}`.
    pub fn with_tuples(&self, k: usize, family: Vec<QueryTuple>) -> Result<Self> {
        let mut tuples = self.tuples.clone();
        tuples[k] = family;
        Self::new(self.code.clone(), self.databases.clone(), tuples)
    }
}

fn uniform(count: usize) -> Result<Rational> {
    Rational::new(1, count as u64)
}

/// Database `n` answers with the symbols of group `n`, in symbol order; the
/// query to database `n` is the rank of the wanted symbol within its group.
pub fn scheme_from_sldc(code: &LinearCodeSpec) -> Result<PirScheme> {
    let groups = code
        .groups()
        .ok_or_else(|| Error::NotPartite("code has no group assignment".into()))?;
    let n = code.n();
    let mut databases = vec![Vec::new(); n];
    let mut position = vec![0; code.m()];
    for (s, &g) in groups.iter().enumerate() {
        position[s] = databases[g].len();
        databases[g].push(s);
    }
    let tuples = code
        .supersets()
        .iter()
        .map(|sup| {
            let w = uniform(sup.sets.len())?;
            sup.sets
                .iter()
                .map(|set| {
                    let mut queries = vec![usize::MAX; n];
                    for &s in set {
                        if queries[groups[s]] != usize::MAX {
                            return Err(Error::NotPartite(format!(
                                "{} meets group {} twice",
                                code.set_label(set),
                                groups[s]
                            )));
                        }
                        queries[groups[s]] = position[s];
                    }
                    Ok(QueryTuple { queries, weight: w })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    PirScheme::new(code.clone(), databases, tuples)
}

/// Every database stores every symbol; each decoding set yields one tuple per
/// assignment of its members to databases. Works for any universal code at
/// the price of an `N`-fold expansion.
pub fn replicated(code: &LinearCodeSpec) -> Result<PirScheme> {
    use itertools::Itertools;
    let n = code.n();
    let databases = vec![(0..code.m()).collect::<Vec<_>>(); n];
    let tuples = code
        .supersets()
        .iter()
        .map(|sup| {
            let all: Vec<Vec<usize>> = sup
                .sets
                .iter()
                .flat_map(|set| set.iter().copied().permutations(n))
                .collect();
            let w = uniform(all.len())?;
            Ok(all.into_iter().map(|queries| QueryTuple { queries, weight: w }).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    PirScheme::new(code.without_groups(), databases, tuples)
}

/// Group-based scheme when the code has (or admits) a transversal partition,
/// otherwise the replicated scheme.
pub fn default_scheme(code: &LinearCodeSpec) -> Result<PirScheme> {
    if code.groups().is_some() {
        return scheme_from_sldc(code);
    }
    match find_transversal_partition(code) {
        Some(groups) => {
            let mut parts = code.to_parts();
            parts.groups = Some(groups);
            scheme_from_sldc(&LinearCodeSpec::from_parts(parts)?)
        }
        None => replicated(code),
    }
}

/// Finds group labels making every decoding set a transversal, trying
/// assignments in lexicographic order. `None` if no partition exists.
pub fn find_transversal_partition(code: &LinearCodeSpec) -> Option<Vec<usize>> {
    fn ok(code: &LinearCodeSpec, labels: &[Option<usize>]) -> bool {
        code.supersets().iter().flat_map(|s| &s.sets).all(|set| {
            let mut seen = vec![false; code.n()];
            set.iter().all(|&s| match labels[s] {
                Some(g) => !std::mem::replace(&mut seen[g], true),
                None => true,
            })
        })
    }
    fn go(code: &LinearCodeSpec, labels: &mut Vec<Option<usize>>, i: usize) -> bool {
        if i == labels.len() {
            return true;
        }
        // symmetry: the first symbol may as well sit in group 0
        let limit = if i == 0 { 1 } else { code.n() };
        for g in 0..limit {
            labels[i] = Some(g);
            if ok(code, labels) && go(code, labels, i + 1) {
                return true;
            }
        }
        labels[i] = None;
        false
    }
    let mut labels = vec![None; code.m()];
    go(code, &mut labels, 0).then(|| labels.into_iter().map(|g| g.unwrap_or(0)).collect())
}

/// Draws a tuple for `W_theta` according to the scheme's weights.
pub fn gen_query<R: Rng + ?Sized>(scheme: &PirScheme, theta: usize, rng: &mut R) -> Result<QueryBundle> {
    let family = scheme.tuples.get(theta).ok_or(Error::OutOfBounds {
        index: theta,
        limit: scheme.code.k(),
    })?;
    let den = family.iter().fold(1u64, |acc, t| lcm(acc, t.weight.denom()));
    let ticket = rng.random_range(0..den);
    let mut acc = 0u64;
    let tuple_index = family
        .iter()
        .position(|t| {
            acc += t.weight.numer() * (den / t.weight.denom());
            ticket < acc
        })
        .expect("weights sum to one");
    Ok(QueryBundle {
        theta,
        tuple_index,
        queries: family[tuple_index].queries.clone(),
    })
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Answer of database `n` (zero-based) to query `q`.
pub fn answer(scheme: &PirScheme, n: usize, q: usize, block: &BitVector) -> Result<BitVector> {
    let db = scheme.databases.get(n).ok_or(Error::OutOfBounds {
        index: n,
        limit: scheme.databases.len(),
    })?;
    let &symbol = db.get(q).ok_or(Error::OutOfBounds { index: q, limit: db.len() })?;
    scheme.code.encode_symbol(symbol, block)
}

pub fn reconstruct(scheme: &PirScheme, bundle: &QueryBundle, answers: &[BitVector]) -> Result<BitVector> {
    decode_with_members(&scheme.code, bundle.theta, &scheme.members(&bundle.queries), answers)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrivacyWitness {
    /// Zero-based database, query and the two messages whose distributions differ.
    pub database: usize,
    pub query: usize,
    pub k: usize,
    pub k_other: usize,
    pub p: Rational,
    pub p_other: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditResult {
    pub pass: bool,
    /// `table[n][k][q] = Prob(q_n = q | W_k wanted)`.
    pub table: Vec<Vec<Vec<Rational>>>,
    pub witness: Option<PrivacyWitness>,
}

fn query_distribution(scheme: &PirScheme) -> Result<Vec<Vec<Vec<Rational>>>> {
    (0..scheme.databases.len())
        .map(|n| {
            scheme
                .tuples
                .iter()
                .map(|family| {
                    let mut row = vec![Rational::zero(); scheme.query_space(n)];
                    for t in family {
                        row[t.queries[n]] = row[t.queries[n]].checked_add(&t.weight)?;
                    }
                    Ok(row)
                })
                .collect()
        })
        .collect()
}

/// Exact check that each database's query distribution is the same for
/// every wanted message.
pub fn privacy_audit(scheme: &PirScheme) -> Result<AuditResult> {
    let table = query_distribution(scheme)?;
    let mut witness = None;
    'outer: for (n, per_k) in table.iter().enumerate() {
        for k in 1..per_k.len() {
            for q in 0..per_k[0].len() {
                if per_k[k][q] != per_k[0][q] {
                    witness = Some(PrivacyWitness {
                        database: n,
                        query: q,
                        k: 0,
                        k_other: k,
                        p: per_k[0][q],
                        p_other: per_k[k][q],
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(AuditResult {
        pass: witness.is_none(),
        table,
        witness,
    })
}

/// Every possible answer of every database is consistent with every wanted
/// message: it occurs in some tuple of positive weight for each `k`.
pub fn deniability_audit(scheme: &PirScheme) -> Result<AuditResult> {
    let table = query_distribution(scheme)?;
    let mut witness = None;
    'outer: for (n, per_k) in table.iter().enumerate() {
        for q in 0..scheme.query_space(n) {
            for (k, row) in per_k.iter().enumerate() {
                if row[q] == Rational::zero() {
                    let k_other = (0..per_k.len()).find(|&j| per_k[j][q] != Rational::zero()).unwrap_or(k);
                    witness = Some(PrivacyWitness {
                        database: n,
                        query: q,
                        k,
                        k_other,
                        p: row[q],
                        p_other: per_k[k_other][q],
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(AuditResult {
        pass: witness.is_none(),
        table,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostMetrics {
    /// `log2 M_n` per database.
    pub upload_bits: Vec<f64>,
    pub max_download_bits: usize,
    /// `L_w / (N L_x)`.
    pub rate: Rational,
}

pub fn cost_metrics(scheme: &PirScheme) -> Result<CostMetrics> {
    let p = scheme.code.params();
    Ok(CostMetrics {
        upload_bits: scheme.databases.iter().map(|d| (d.len() as f64).log2()).collect(),
        max_download_bits: p.lx,
        rate: Rational::new(p.lw as u64, (p.n * p.lx) as u64)?,
    })
}
