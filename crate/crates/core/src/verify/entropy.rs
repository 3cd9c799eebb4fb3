//! Exact entropies of linear codes. With i.i.d. uniform message bits,
//! `H(X_A | W_J)` is the rank of the stacked generators of `A` once the
//! columns of the messages in `J` are deleted.

use crate::construct::LinearCodeSpec;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Subset of `[0, K)` as a bit mask, bit `k` for message `W_{k+1}`.
pub type MessageMask = u64;

pub fn mask_of(messages: &[usize]) -> MessageMask {
    messages.iter().fold(0, |m, &k| m | 1 << k)
}

/// All messages except `k`.
pub fn all_but(code: &LinearCodeSpec, k: usize) -> MessageMask {
    full_mask(code) & !(1 << k)
}

pub fn full_mask(code: &LinearCodeSpec) -> MessageMask {
    if code.k() == 64 {
        u64::MAX
    } else {
        (1u64 << code.k()) - 1
    }
}

/// `H(X_A | W_J)` with `A` given by symbol indices and `J` by message indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyQuery {
    pub symbols: Vec<usize>,
    pub given: Vec<usize>,
}

pub fn conditional_entropy(code: &LinearCodeSpec, q: &EntropyQuery) -> Result<usize> {
    if let Some(&s) = q.symbols.iter().find(|&&s| s >= code.m()) {
        return Err(Error::OutOfBounds { index: s, limit: code.m() });
    }
    if let Some(&k) = q.given.iter().find(|&&k| k >= code.k()) {
        return Err(Error::OutOfBounds { index: k, limit: code.k() });
    }
    Ok(h(code, &q.symbols, mask_of(&q.given)))
}

/// `H(X_A | W_given)`. Indices must be in range.
pub fn h(code: &LinearCodeSpec, symbols: &[usize], given: MessageMask) -> usize {
    let lw = code.params().lw;
    let keep: Vec<usize> = (0..code.k())
        .filter(|k| given & (1 << k) == 0)
        .flat_map(|k| k * lw..(k + 1) * lw)
        .collect();
    if keep.is_empty() || symbols.is_empty() {
        return 0;
    }
    let full = keep.len() == code.params().message_bits();
    let mut rows = BitMatrix::zeros(0, keep.len());
    for &s in symbols {
        let g = code.generator(s);
        let g = if full {
            g.clone()
        } else {
            g.restrict_columns(&keep).expect("columns in range")
        };
        for r in code.transmitted_rows(s) {
            rows.push_row(g.row(*r).clone()).expect("width matches");
        }
    }
    rows.rank()
}

/// `H(X_A | X_B, W_given) = H(X_{A u B} | W_given) - H(X_B | W_given)`.
pub fn h_given_symbols(
    code: &LinearCodeSpec,
    a: &[usize],
    b: &[usize],
    given: MessageMask,
) -> usize {
    let joint: Vec<usize> = a.iter().chain(b).copied().collect();
    h(code, &joint, given) - h(code, b, given)
}

/// `H(W_k | X_S, W_given)` for `k` outside `given`.
pub fn h_message_given(
    code: &LinearCodeSpec,
    k: usize,
    symbols: &[usize],
    given: MessageMask,
) -> usize {
    debug_assert!(given & (1 << k) == 0);
    code.params().lw + h(code, symbols, given | 1 << k) - h(code, symbols, given)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_sldc;
    use crate::fixtures::load_fixture;

    fn q(symbols: &[usize], given: &[usize]) -> EntropyQuery {
        EntropyQuery {
            symbols: symbols.to_vec(),
            given: given.to_vec(),
        }
    }

    #[test]
    fn fig1_examples() {
        let c = load_fixture("fig1").unwrap();
        assert_eq!(conditional_entropy(&c, &q(&[0], &[0])).unwrap(), 0);
        assert_eq!(conditional_entropy(&c, &q(&[0, 3], &[])).unwrap(), 2);
        assert!(conditional_entropy(&c, &q(&[6], &[])).is_err());
        assert!(conditional_entropy(&c, &q(&[0], &[3])).is_err());
    }

    #[test]
    fn constructed_symbols_carry_lx_bits() {
        let c = build_sldc(2, 2).unwrap();
        for s in 0..4 {
            assert_eq!(conditional_entropy(&c, &q(&[s], &[])).unwrap(), 3);
        }
    }

    #[test]
    fn decoding_sets_determine_their_message() {
        let c = build_sldc(3, 2).unwrap();
        for sup in c.supersets() {
            for set in &sup.sets {
                assert_eq!(h_message_given(&c, sup.k, set, 0), 0);
            }
        }
        // a single symbol never determines a message
        assert!(h_message_given(&c, 0, &[0], 0) > 0);
    }

    #[test]
    fn conditioning_and_subadditivity() {
        for name in crate::fixtures::FIXTURE_NAMES {
            let c = load_fixture(name).unwrap();
            let m = c.m();
            for a_mask in 1u32..(1 << m.min(6)) {
                let a: Vec<usize> = (0..m).filter(|i| a_mask & (1 << i) != 0).collect();
                let singles: usize = a.iter().map(|&i| h(&c, &[i], 0)).sum();
                assert!(h(&c, &a, 0) <= singles);
                for j in 0..=full_mask(&c) {
                    for j2 in 0..=full_mask(&c) {
                        if j2 & j == j2 {
                            assert!(h(&c, &a, j) <= h(&c, &a, j2));
                        }
                    }
                }
            }
        }
    }
}
