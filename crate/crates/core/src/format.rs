//! JSON document format for codes and schemes.
//!
//! The document body is serialized compactly with a fixed field order and
//! hashed with SHA-256; the hex digest is stored as `content_hash` and
//! checked on load. Generator rows are hex strings of `K * L_w` bits,
//! MSB-first, zero-padded to whole bytes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::capacity::{CodeParams, Rational};
use crate::construct::{CodeParts, DecodingSuperset, LinearCodeSpec, PVector};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::pir::{PirScheme, QueryTuple};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digits: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
    pub rows: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatabasesDoc {
    /// `answers[n][q]`: symbol index served by database `n + 1` for query `q`.
    pub answers: Vec<Vec<usize>>,
    /// `queries[k][j]`: the per-database query indices of tuple `j` for `W_{k+1}`.
    pub queries: Vec<Vec<Vec<usize>>>,
    /// Tuple probabilities; omitted when uniform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<Rational>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentBody {
    pub version: u32,
    pub params: CodeParams,
    pub column_order: String,
    pub symbols: Vec<SymbolDoc>,
    /// Zero-based symbol indices, per message, per set.
    pub supersets: Vec<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub databases: Option<DatabasesDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    #[serde(flatten)]
    pub body: DocumentBody,
    pub content_hash: String,
}

impl DocumentBody {
    pub fn hash(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)?;
        Ok(hex::encode(Sha256::digest(&bytes)))
    }

    pub fn seal(self) -> Result<Document> {
        let content_hash = self.hash()?;
        Ok(Document { body: self, content_hash })
    }
}

fn code_body(code: &LinearCodeSpec) -> DocumentBody {
    let symbols = (0..code.m())
        .map(|s| SymbolDoc {
            label: code.label(s).to_string(),
            digits: code.digits().map(|d| d[s].0.clone()),
            group: code.groups().map(|g| g[s]),
            rows: code.generator(s).row_iter().map(BitVector::to_hex).collect(),
        })
        .collect();
    DocumentBody {
        version: FORMAT_VERSION,
        params: *code.params(),
        column_order: code.column_order().to_string(),
        symbols,
        supersets: code.supersets().iter().map(|s| s.sets.clone()).collect(),
        databases: None,
    }
}

pub fn code_document(code: &LinearCodeSpec) -> Result<Document> {
    code_body(code).seal()
}

pub fn scheme_document(scheme: &PirScheme) -> Result<Document> {
    let mut body = code_body(scheme.code());
    let uniform = scheme.all_tuples().iter().all(|family| {
        family.iter().all(|t| t.weight == Rational::new(1, family.len() as u64).expect("non-empty"))
    });
    body.databases = Some(DatabasesDoc {
        answers: scheme.databases().to_vec(),
        queries: scheme
            .all_tuples()
            .iter()
            .map(|f| f.iter().map(|t| t.queries.clone()).collect())
            .collect(),
        weights: (!uniform).then(|| {
            scheme
                .all_tuples()
                .iter()
                .map(|f| f.iter().map(|t| t.weight).collect())
                .collect()
        }),
    });
    body.seal()
}

/// Hex SHA-256 of the code's document body.
pub fn content_hash(code: &LinearCodeSpec) -> Result<String> {
    code_body(code).hash()
}

pub fn scheme_hash(scheme: &PirScheme) -> Result<String> {
    Ok(scheme_document(scheme)?.content_hash)
}

pub fn to_json(doc: &Document) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

/// Parses a document and checks its hash.
pub fn parse_document(text: &str) -> Result<Document> {
    let doc: Document = serde_json::from_str(text)?;
    if doc.body.version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {}", doc.body.version)));
    }
    let computed = doc.body.hash()?;
    if computed != doc.content_hash {
        return Err(Error::HashMismatch {
            stated: doc.content_hash.clone(),
            computed,
        });
    }
    Ok(doc)
}

pub fn code_from_document(doc: &Document) -> Result<LinearCodeSpec> {
    let b = &doc.body;
    let p = b.params;
    let cols = p.k * p.lw;
    let symbol_gens = b
        .symbols
        .iter()
        .map(|s| {
            let rows = s
                .rows
                .iter()
                .map(|h| BitVector::from_hex(h, cols))
                .collect::<Result<Vec<_>>>()?;
            BitMatrix::from_rows(cols, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let digits = if b.symbols.iter().all(|s| s.digits.is_some()) && !b.symbols.is_empty() {
        Some(b.symbols.iter().map(|s| PVector(s.digits.clone().expect("checked"))).collect())
    } else {
        None
    };
    let groups = if b.symbols.iter().all(|s| s.group.is_some()) && !b.symbols.is_empty() {
        Some(b.symbols.iter().map(|s| s.group.expect("checked")).collect())
    } else {
        None
    };
    let code = LinearCodeSpec::from_parts(CodeParts {
        n: p.n,
        k: p.k,
        lw: p.lw,
        column_order: b.column_order.clone(),
        labels: b.symbols.iter().map(|s| s.label.clone()).collect(),
        digits,
        symbol_gens,
        supersets: b
            .supersets
            .iter()
            .enumerate()
            .map(|(k, sets)| DecodingSuperset { k, sets: sets.clone() })
            .collect(),
        groups,
    })?;
    if *code.params() != p {
        return Err(Error::Format(format!(
            "stated parameters {p:?} disagree with the generators {:?}",
            code.params()
        )));
    }
    Ok(code)
}

/// The scheme stored in the document, if it has a `databases` section.
pub fn scheme_from_document(doc: &Document) -> Result<Option<PirScheme>> {
    let Some(db) = &doc.body.databases else {
        return Ok(None);
    };
    let code = code_from_document(doc)?;
    let tuples = db
        .queries
        .iter()
        .enumerate()
        .map(|(k, family)| {
            family
                .iter()
                .enumerate()
                .map(|(j, q)| {
                    let weight = match &db.weights {
                        Some(w) => *w
                            .get(k)
                            .and_then(|f| f.get(j))
                            .ok_or_else(|| Error::Format("weights do not match queries".into()))?,
                        None => Rational::new(1, family.len() as u64)?,
                    };
                    Ok(QueryTuple { queries: q.clone(), weight })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PirScheme::new(code, db.answers.clone(), tuples).map(Some)
}

pub fn read_code(text: &str) -> Result<LinearCodeSpec> {
    code_from_document(&parse_document(text)?)
}

/// Message files hold `K * L_w` bits, MSB-first, zero-padded.
pub fn read_messages(bytes: &[u8], params: &CodeParams) -> Result<BitVector> {
    BitVector::from_bytes(bytes, params.message_bits())
}

pub fn write_messages(block: &BitVector) -> Vec<u8> {
    block.to_bytes()
}
