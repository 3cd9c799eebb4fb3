//! The length-`N^K` perfectly smooth LDC, plus encoding and decoding for any
//! linear code described by a [`LinearCodeSpec`].
//!
//! Layout of a constructed code:
//!
//! * symbols are indexed by `p = (p_1, ..., p_K)` in lexicographic order,
//!   `p_1` most significant;
//! * every symbol has one generator row per `gamma` (same order), and row
//!   `gamma` of symbol `p` sums `W_{k, (p_k + gamma_k) mod N}^gamma` over `k`;
//! * message column `k * L_w + gamma_index * (N - 1) + (t - 1)` holds
//!   `W_{k,t}^gamma` for `t` in `1..N`; `W_{k,0}^gamma` is the constant zero and
//!   has no column.
//!
//! Exactly one row per symbol (`gamma = -p`) is identically zero. It is kept
//! in the generator so sub-symbol positions stay addressable, but it is never
//! transmitted: encoded symbols carry only the non-zero rows, `L_x` bits.

use std::ops::Range;

use crate::capacity::CodeParams;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Limits on what [`build_sldc_with_budget`] will materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeBudget {
    /// Maximum code length `N^K`.
    pub max_symbols: u128,
    /// Maximum total generator size, `M * rows * columns` bits. The dense
    /// generator grows like `K N^{3K}`, so this binds long before
    /// `max_symbols` does for large `K`.
    pub max_generator_bits: u128,
}

impl Default for SizeBudget {
    fn default() -> Self {
        Self {
            max_symbols: 4096,
            max_generator_bits: 1 << 28,
        }
    }
}

/// Digits of a vector over `[0, N)^K`, most significant first.
fn digits_of(mut index: usize, n: usize, k: usize) -> Vec<usize> {
    let mut digits = vec![0; k];
    for d in digits.iter_mut().rev() {
        *d = index % n;
        index /= n;
    }
    digits
}

fn index_of(digits: &[usize], n: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * n + d)
}

/// Coordinates of a constructed coded symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PVector(pub Vec<usize>);

impl PVector {
    pub fn from_index(index: usize, n: usize, k: usize) -> Self {
        Self(digits_of(index, n, k))
    }

    pub fn index(&self, n: usize) -> usize {
        index_of(&self.0, n)
    }

    /// `sum p_i mod N`.
    pub fn group(&self, n: usize) -> usize {
        self.0.iter().sum::<usize>() % n
    }

    pub fn label(&self) -> String {
        self.0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("")
    }
}

/// Sub-symbol coordinates shared by every message and coded symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaVector(pub Vec<usize>);

impl GammaVector {
    pub fn from_index(index: usize, n: usize, k: usize) -> Self {
        Self(digits_of(index, n, k))
    }

    pub fn index(&self, n: usize) -> usize {
        index_of(&self.0, n)
    }
}

/// The decoding sets of one message, in a fixed enumeration order. Members of
/// each set are listed in canonical order; decoders expect symbol values in
/// that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingSuperset {
    pub k: usize,
    pub sets: Vec<Vec<usize>>,
}

impl DecodingSuperset {
    /// Number of sets containing `symbol`.
    pub fn multiplicity(&self, symbol: usize) -> usize {
        self.sets.iter().filter(|s| s.contains(&symbol)).count()
    }
}

/// A linear LDC over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCodeSpec {
    params: CodeParams,
    column_order: String,
    labels: Vec<String>,
    digits: Option<Vec<PVector>>,
    symbol_gens: Vec<BitMatrix>,
    transmitted: Vec<Vec<usize>>,
    supersets: Vec<DecodingSuperset>,
    groups: Option<Vec<usize>>,
}

/// Everything needed to assemble a [`LinearCodeSpec`]; `L_x` is derived.
#[derive(Debug, Clone)]
pub struct CodeParts {
    pub n: usize,
    pub k: usize,
    pub lw: usize,
    pub column_order: String,
    pub labels: Vec<String>,
    pub digits: Option<Vec<PVector>>,
    pub symbol_gens: Vec<BitMatrix>,
    pub supersets: Vec<DecodingSuperset>,
    pub groups: Option<Vec<usize>>,
}

impl LinearCodeSpec {
    /// Validates and assembles a code. Every symbol must have rank `L_x` with
    /// exactly `L_x` non-zero generator rows; sets must have `N` distinct
    /// in-range members; groups, if given, must be met once by every set.
    pub fn from_parts(parts: CodeParts) -> Result<Self> {
        let CodeParts {
            n,
            k,
            lw,
            column_order,
            labels,
            digits,
            symbol_gens,
            supersets,
            groups,
        } = parts;
        let m = symbol_gens.len();
        let cols = k * lw;
        if labels.len() != m {
            return Err(Error::DimensionMismatch { expected: m, actual: labels.len() });
        }
        if let Some(d) = &digits {
            if d.len() != m {
                return Err(Error::DimensionMismatch { expected: m, actual: d.len() });
            }
        }
        let mut transmitted = Vec::with_capacity(m);
        let mut lx = None;
        for (i, g) in symbol_gens.iter().enumerate() {
            if g.cols() != cols {
                return Err(Error::InvalidCode(format!(
                    "{} has {} columns, expected K*L_w = {cols}",
                    labels[i],
                    g.cols()
                )));
            }
            let rows: Vec<usize> = (0..g.rows()).filter(|&r| !g.row(r).is_zero()).collect();
            let rank = g.rank();
            if rank != rows.len() {
                return Err(Error::InvalidCode(format!(
                    "{} has {} non-zero rows but rank {rank}",
                    labels[i],
                    rows.len()
                )));
            }
            match lx {
                None => lx = Some(rank),
                Some(l) if l != rank => {
                    return Err(Error::InvalidCode(format!(
                        "{} has rank {rank}, other symbols have {l}",
                        labels[i]
                    )))
                }
                _ => {}
            }
            transmitted.push(rows);
        }
        let params = CodeParams {
            n,
            k,
            m,
            lw,
            lx: lx.unwrap_or(0),
        };
        params.validate()?;
        if supersets.len() != k {
            return Err(Error::InvalidCode(format!(
                "{} decoding supersets for K = {k}",
                supersets.len()
            )));
        }
        for (idx, sup) in supersets.iter().enumerate() {
            if sup.k != idx {
                return Err(Error::InvalidCode(format!("superset {idx} is labeled k = {}", sup.k)));
            }
            if sup.sets.is_empty() {
                return Err(Error::InvalidCode(format!("no decoding set for W_{}", idx + 1)));
            }
            for set in &sup.sets {
                check_set(set, n, m)?;
            }
        }
        let code = Self {
            params,
            column_order,
            labels,
            digits,
            symbol_gens,
            transmitted,
            supersets,
            groups,
        };
        if let Some(groups) = &code.groups {
            if groups.len() != m {
                return Err(Error::DimensionMismatch { expected: m, actual: groups.len() });
            }
            if let Some(&g) = groups.iter().find(|&&g| g >= n) {
                return Err(Error::InvalidCode(format!("group id {g} out of range for N = {n}")));
            }
            if let Some(bad) = code.first_non_transversal() {
                return Err(Error::NotPartite(bad));
            }
        }
        Ok(code)
    }

    fn first_non_transversal(&self) -> Option<String> {
        let groups = self.groups.as_ref()?;
        for sup in &self.supersets {
            for set in &sup.sets {
                let mut seen = vec![false; self.params.n];
                for &s in set {
                    if std::mem::replace(&mut seen[groups[s]], true) {
                        return Some(format!(
                            "set {} of W_{} has two symbols in group {}",
                            self.set_label(set),
                            sup.k + 1,
                            groups[s]
                        ));
                    }
                }
            }
        }
        None
    }

    /// Same generator, new decoding sets. Group metadata survives only if the
    /// new sets are still transversals.
    pub fn with_supersets(&self, supersets: Vec<DecodingSuperset>) -> Result<Self> {
        let mut parts = self.to_parts();
        parts.supersets = supersets;
        let groups = parts.groups.take();
        let plain = Self::from_parts(parts)?;
        let mut grouped = plain.clone();
        grouped.groups = groups;
        Ok(if grouped.groups.is_some() && grouped.first_non_transversal().is_none() {
            grouped
        } else {
            plain
        })
    }

    pub fn without_groups(&self) -> Self {
        Self {
            groups: None,
            ..self.clone()
        }
    }

    pub fn to_parts(&self) -> CodeParts {
        CodeParts {
            n: self.params.n,
            k: self.params.k,
            lw: self.params.lw,
            column_order: self.column_order.clone(),
            labels: self.labels.clone(),
            digits: self.digits.clone(),
            symbol_gens: self.symbol_gens.clone(),
            supersets: self.supersets.clone(),
            groups: self.groups.clone(),
        }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn column_order(&self) -> &str {
        &self.column_order
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, symbol: usize) -> &str {
        &self.labels[symbol]
    }

    pub fn set_label(&self, set: &[usize]) -> String {
        let names: Vec<&str> = set.iter().map(|&s| self.label(s)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn digits(&self) -> Option<&[PVector]> {
        self.digits.as_deref()
    }

    pub fn symbol_gens(&self) -> &[BitMatrix] {
        &self.symbol_gens
    }

    pub fn generator(&self, symbol: usize) -> &BitMatrix {
        &self.symbol_gens[symbol]
    }

    /// Indices of the generator rows that are actually stored/transmitted.
    pub fn transmitted_rows(&self, symbol: usize) -> &[usize] {
        &self.transmitted[symbol]
    }

    pub fn supersets(&self) -> &[DecodingSuperset] {
        &self.supersets
    }

    pub fn superset(&self, k: usize) -> &DecodingSuperset {
        &self.supersets[k]
    }

    pub fn groups(&self) -> Option<&[usize]> {
        self.groups.as_deref()
    }

    /// Message-bit columns belonging to `W_{k+1}`.
    pub fn message_columns(&self, k: usize) -> Range<usize> {
        k * self.params.lw..(k + 1) * self.params.lw
    }

    /// Splits a `K * L_w` bit block into the `K` messages.
    pub fn split_messages(&self, block: &BitVector) -> Result<Vec<BitVector>> {
        self.check_block(block)?;
        Ok((0..self.params.k)
            .map(|k| block.slice(k * self.params.lw, self.params.lw))
            .collect())
    }

    pub fn join_messages(&self, messages: &[BitVector]) -> Result<BitVector> {
        if messages.len() != self.params.k {
            return Err(Error::DimensionMismatch {
                expected: self.params.k,
                actual: messages.len(),
            });
        }
        let mut out = BitVector::zeros(0);
        for w in messages {
            if w.len() != self.params.lw {
                return Err(Error::DimensionMismatch {
                    expected: self.params.lw,
                    actual: w.len(),
                });
            }
            out.extend_from(w);
        }
        Ok(out)
    }

    fn check_block(&self, block: &BitVector) -> Result<()> {
        let expected = self.params.message_bits();
        if block.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: block.len(),
            });
        }
        Ok(())
    }

    /// Transmitted value of one coded symbol, `L_x` bits.
    pub fn encode_symbol(&self, symbol: usize, block: &BitVector) -> Result<BitVector> {
        self.check_block(block)?;
        let g = &self.symbol_gens[symbol];
        self.transmitted[symbol]
            .iter()
            .map(|&r| g.row(r).dot(block))
            .collect::<Result<Vec<_>>>()
            .map(BitVector::from_bits)
    }

    /// Decoding equations of `members`, one row per transmitted bit.
    pub fn stacked_transmitted(&self, members: &[usize]) -> Result<BitMatrix> {
        let mut out = BitMatrix::zeros(0, self.params.message_bits());
        for &s in members {
            if s >= self.params.m {
                return Err(Error::OutOfBounds {
                    index: s,
                    limit: self.params.m,
                });
            }
            let g = &self.symbol_gens[s];
            for &r in &self.transmitted[s] {
                out.push_row(g.row(r).clone())?;
            }
        }
        Ok(out)
    }
}

fn check_set(set: &[usize], n: usize, m: usize) -> Result<()> {
    if set.len() != n {
        return Err(Error::InvalidCode(format!(
            "decoding set {set:?} has {} members, expected N = {n}",
            set.len()
        )));
    }
    if let Some(&bad) = set.iter().find(|&&s| s >= m) {
        return Err(Error::OutOfBounds { index: bad, limit: m });
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != n {
        return Err(Error::InvalidCode(format!("decoding set {set:?} repeats a symbol")));
    }
    Ok(())
}

fn checked_pow(n: usize, k: usize) -> Option<usize> {
    u32::try_from(k).ok().and_then(|k| n.checked_pow(k))
}

fn check_budget(n: usize, k: usize, budget: &SizeBudget) -> Result<usize> {
    if n < 2 || k == 0 {
        return Err(Error::Domain(format!(
            "construction needs N >= 2 and K >= 1 (N={n}, K={k})"
        )));
    }
    let symbols = checked_pow(n, k).map(|m| m as u128).unwrap_or(u128::MAX);
    if symbols > budget.max_symbols {
        return Err(Error::SizeBudget {
            what: "N^K",
            actual: symbols,
            limit: budget.max_symbols,
        });
    }
    // M symbols * N^K rows * K N^K (N-1) columns
    let bits = symbols
        .saturating_mul(symbols)
        .saturating_mul(symbols)
        .saturating_mul(k as u128)
        .saturating_mul(n as u128 - 1);
    if bits > budget.max_generator_bits {
        return Err(Error::SizeBudget {
            what: "generator bits",
            actual: bits,
            limit: budget.max_generator_bits,
        });
    }
    Ok(symbols as usize)
}

/// The capacity-achieving SLDC of length `N^K` under the default budget.
pub fn build_sldc(n: usize, k: usize) -> Result<LinearCodeSpec> {
    build_sldc_with_budget(n, k, &SizeBudget::default())
}

pub fn build_sldc_with_budget(n: usize, k: usize, budget: &SizeBudget) -> Result<LinearCodeSpec> {
    let m = check_budget(n, k, budget)?;
    let lw = m * (n - 1);
    let cols = k * lw;
    let mut gens = Vec::with_capacity(m);
    let mut digits = Vec::with_capacity(m);
    for idx in 0..m {
        let p = PVector::from_index(idx, n, k);
        let mut g = BitMatrix::zeros(m, cols);
        for gi in 0..m {
            let gamma = GammaVector::from_index(gi, n, k);
            for kk in 0..k {
                let t = (p.0[kk] + gamma.0[kk]) % n;
                if t != 0 {
                    g.set(gi, kk * lw + gi * (n - 1) + (t - 1), true);
                }
            }
        }
        gens.push(g);
        digits.push(p);
    }
    let groups = digits.iter().map(|p| p.group(n)).collect();
    let labels = (1..=m).map(|i| format!("X_{i}")).collect();
    LinearCodeSpec::from_parts(CodeParts {
        n,
        k,
        lw,
        column_order: format!(
            "message k, then gamma in lexicographic order (gamma_1 most significant), \
             then t in 1..{n}; column = k*{lw} + gamma_index*{} + (t-1)",
            n - 1
        ),
        labels,
        digits: Some(digits),
        symbol_gens: gens,
        supersets: enumerate_supersets(n, k)?,
        groups: Some(groups),
    })
}

/// Decoding sets of the constructed code. Set number `j` of `W_k` fixes the
/// other coordinates to the `j`-th tuple in lexicographic order; its `i`-th
/// member has `p_k = p*_k + i mod N` and therefore lies in group `i`.
pub fn enumerate_supersets(n: usize, k: usize) -> Result<Vec<DecodingSuperset>> {
    let m = check_budget(n, k, &SizeBudget {
        max_generator_bits: u128::MAX,
        ..SizeBudget::default()
    })?;
    let others = m / n;
    Ok((0..k)
        .map(|kk| {
            let sets = (0..others)
                .map(|j| {
                    let rest = digits_of(j, n, k - 1);
                    let partial: usize = rest.iter().sum::<usize>() % n;
                    let star = (n - partial) % n;
                    (0..n)
                        .map(|i| {
                            let mut p = rest.clone();
                            p.insert(kk, (star + i) % n);
                            index_of(&p, n)
                        })
                        .collect()
                })
                .collect();
            DecodingSuperset { k: kk, sets }
        })
        .collect())
}

/// Encodes a message block into one `L_x`-bit vector per coded symbol.
pub fn encode(code: &LinearCodeSpec, block: &BitVector) -> Result<Vec<BitVector>> {
    (0..code.m()).map(|s| code.encode_symbol(s, block)).collect()
}

/// Recovers `W_{k+1}` from the values of decoding set `set_index` of `S_k`.
pub fn decode(
    code: &LinearCodeSpec,
    k: usize,
    set_index: usize,
    values: &[BitVector],
) -> Result<BitVector> {
    let sup = code.supersets.get(k).ok_or(Error::OutOfBounds {
        index: k,
        limit: code.k(),
    })?;
    let set = sup.sets.get(set_index).ok_or(Error::OutOfBounds {
        index: set_index,
        limit: sup.sets.len(),
    })?;
    decode_with_members(code, k, set, values)
}

/// Solves for `W_{k+1}` given the transmitted values of `members`, in order.
/// Fails if the values are inconsistent with the code or if the members do
/// not determine the message.
pub fn decode_with_members(
    code: &LinearCodeSpec,
    k: usize,
    members: &[usize],
    values: &[BitVector],
) -> Result<BitVector> {
    if k >= code.k() {
        return Err(Error::OutOfBounds {
            index: k,
            limit: code.k(),
        });
    }
    if values.len() != members.len() {
        return Err(Error::DimensionMismatch {
            expected: members.len(),
            actual: values.len(),
        });
    }
    let mut rhs = BitVector::zeros(0);
    for (&s, v) in members.iter().zip(values) {
        let want = code.transmitted.get(s).map_or(0, Vec::len);
        if v.len() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                actual: v.len(),
            });
        }
        rhs.extend_from(v);
    }
    let system = code.stacked_transmitted(members)?;
    let ech = system.echelon_with_rhs(&rhs)?;
    if !ech.consistent {
        return Err(Error::DecodeFailure(format!(
            "values of {} are not a codeword",
            code.set_label(members)
        )));
    }
    code.message_columns(k)
        .map(|c| {
            ech.solved_coordinate(c).ok_or_else(|| {
                Error::DecodeFailure(format!(
                    "{} does not determine W_{}",
                    code.set_label(members),
                    k + 1
                ))
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(BitVector::from_bits)
}
