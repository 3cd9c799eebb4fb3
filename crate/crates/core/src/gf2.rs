//! Bit-packed vectors and matrices over GF(2).
//!
//! Bits are packed MSB-first: bit 0 is the most significant bit of the first
//! word (and therefore of the first byte when serialized). Pad bits past
//! `len` are always zero, so derived equality and hashing are sound.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
fn mask(bit: usize) -> u64 {
    1u64 << (WORD - 1 - (bit % WORD))
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Parses a string of `0`/`1` characters; `_` and spaces are ignored.
    pub fn parse_bits(s: &str) -> Result<Self> {
        let mut v = Self::zeros(0);
        for c in s.chars() {
            match c {
                '0' => v.push(false),
                '1' => v.push(true),
                '_' | ' ' => {}
                other => return Err(Error::Format(format!("invalid bit character {other:?}"))),
            }
        }
        Ok(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, bit: usize) -> bool {
        assert!(bit < self.len, "bit {bit} out of range for length {}", self.len);
        self.words[bit / WORD] & mask(bit) != 0
    }

    #[inline]
    pub fn set(&mut self, bit: usize, value: bool) {
        assert!(bit < self.len, "bit {bit} out of range for length {}", self.len);
        if value {
            self.words[bit / WORD] |= mask(bit);
        } else {
            self.words[bit / WORD] &= !mask(bit);
        }
    }

    #[inline]
    pub fn flip(&mut self, bit: usize) {
        assert!(bit < self.len, "bit {bit} out of range for length {}", self.len);
        self.words[bit / WORD] ^= mask(bit);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        if value {
            let bit = self.len - 1;
            self.words[bit / WORD] |= mask(bit);
        }
    }

    pub fn extend_from(&mut self, other: &BitVector) {
        self.extend_from_range(other, 0, other.len);
    }

    /// Appends bits `[start, start + len)` of `src`.
    pub fn extend_from_range(&mut self, src: &BitVector, start: usize, len: usize) {
        assert!(start + len <= src.len, "range out of bounds");
        let mut done = 0;
        while done < len {
            let take = (len - done).min(WORD);
            let w = src.word_at(start + done) & (!0u64 << (WORD - take));
            self.push_word(w, take);
            done += take;
        }
    }

    /// 64 bits starting at `bit`, zero past the end.
    fn word_at(&self, bit: usize) -> u64 {
        let (i, off) = (bit / WORD, bit % WORD);
        let hi = self.words.get(i).copied().unwrap_or(0) << off;
        if off == 0 {
            hi
        } else {
            hi | self.words.get(i + 1).copied().unwrap_or(0) >> (WORD - off)
        }
    }

    /// Appends the top `count` bits of `w`; lower bits must be zero.
    fn push_word(&mut self, w: u64, count: usize) {
        let off = self.len % WORD;
        if off == 0 {
            self.words.push(w);
        } else {
            *self.words.last_mut().expect("non-empty") |= w >> off;
            if off + count > WORD {
                self.words.push(w << (WORD - off));
            }
        }
        self.len += count;
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the first set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.leading_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    /// Copy of bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        BitVector::from_bits((start..start + len).map(|i| self.get(i)))
    }

    /// MSB-first packing into `ceil(len / 8)` bytes, zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_be_bytes()).collect();
        out.truncate(self.len.div_ceil(8));
        out
    }

    /// Inverse of [`BitVector::to_bytes`]. Rejects a wrong byte count or
    /// non-zero pad bits.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        let expected = len.div_ceil(8);
        if bytes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: bytes.len(),
            });
        }
        let mut words = vec![0u64; words_for(len)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (56 - 8 * (i % 8));
        }
        let v = Self { len, words };
        let mut canonical = v.clone();
        canonical.clear_padding();
        if canonical != v {
            return Err(Error::Format("non-zero padding bits".into()));
        }
        Ok(v)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str, len: usize) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::Format(format!("bad hex: {e}")))?;
        Self::from_bytes(&bytes, len)
    }

    fn clear_padding(&mut self) {
        let used = self.len % WORD;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 << (WORD - used);
            }
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense GF(2) matrix stored as one [`BitVector`] per row.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Convenience for tests and fixtures: `["110", "011"]`.
    pub fn parse_rows(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| BitVector::parse_bits(r))
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        Self::from_rows(cols, parsed)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.rows.iter()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Vertical concatenation. All parts must agree on the column count.
    pub fn stack<'a, I>(cols: usize, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BitMatrix>,
    {
        let mut out = Self::zeros(0, cols);
        for part in parts {
            if part.cols != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: part.cols,
                });
            }
            out.rows.extend(part.rows.iter().cloned());
        }
        Ok(out)
    }

    /// Keeps only the rows whose indices are listed, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> Result<Self> {
        let rows = keep
            .iter()
            .map(|&r| {
                self.rows.get(r).cloned().ok_or(Error::OutOfBounds {
                    index: r,
                    limit: self.rows.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cols: self.cols,
            rows,
        })
    }

    /// Projection onto the listed columns. Column order follows `keep`, which
    /// callers pass in ascending order to preserve the original order.
    pub fn restrict_columns(&self, keep: &[usize]) -> Result<Self> {
        if let Some(&bad) = keep.iter().find(|&&c| c >= self.cols) {
            return Err(Error::OutOfBounds {
                index: bad,
                limit: self.cols,
            });
        }
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for &c in keep {
            match runs.last_mut() {
                Some((start, len)) if *start + *len == c => *len += 1,
                _ => runs.push((c, 1)),
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = BitVector::zeros(0);
                for &(start, len) in &runs {
                    out.extend_from_range(r, start, len);
                }
                out
            })
            .collect();
        Ok(Self {
            cols: keep.len(),
            rows,
        })
    }

    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        self.rows.iter().map(|r| r.dot(v)).collect::<Result<Vec<_>>>().map(BitVector::from_bits)
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        if self.rows.is_empty() || self.cols == 0 {
            return 0;
        }
        let stride = words_for(self.cols);
        let mut data: Vec<u64> = Vec::with_capacity(stride * self.rows.len());
        for r in &self.rows {
            data.extend_from_slice(r.words());
        }
        eliminate(&mut data, stride, self.rows.len(), self.cols, None).len()
    }

    /// Reduced row echelon form of `[self | rhs]`, where `rhs` carries one
    /// bit per row. Used to solve for message bits and to detect inputs that
    /// are not in the column space.
    pub fn echelon_with_rhs(&self, rhs: &BitVector) -> Result<Echelon> {
        if rhs.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                actual: rhs.len(),
            });
        }
        let stride = words_for(self.cols);
        let nrows = self.rows.len();
        let mut data: Vec<u64> = Vec::with_capacity(stride * nrows);
        for r in &self.rows {
            data.extend_from_slice(r.words());
        }
        let mut values: Vec<bool> = rhs.iter().collect();
        let pivots = eliminate(&mut data, stride, nrows, self.cols, Some(&mut values));
        let rank = pivots.len();
        let consistent = values[rank..].iter().all(|&v| !v);
        let rows = (0..rank)
            .map(|r| BitVector {
                len: self.cols,
                words: data[r * stride..(r + 1) * stride].to_vec(),
            })
            .collect();
        Ok(Echelon {
            reduced: BitMatrix {
                cols: self.cols,
                rows,
            },
            values: values[..rank].to_vec(),
            pivots,
            consistent,
        })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Output of [`BitMatrix::echelon_with_rhs`]: the non-zero rows of the reduced
/// form, their right-hand-side bits and pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: BitMatrix,
    pub values: Vec<bool>,
    pub pivots: Vec<usize>,
    /// False iff some row reduced to zero while its right-hand side did not.
    pub consistent: bool,
}

impl Echelon {
    /// Value of coordinate `col` if the unit vector `e_col` lies in the row
    /// space, `None` otherwise. In reduced form that happens exactly when
    /// `col` is a pivot whose row has no other set bit.
    pub fn solved_coordinate(&self, col: usize) -> Option<bool> {
        let r = self.pivots.iter().position(|&p| p == col)?;
        (self.reduced.row(r).count_ones() == 1).then(|| self.values[r])
    }
}

/// Gauss-Jordan elimination over packed rows. Moves pivot rows to the top,
/// clears each pivot column everywhere else, and returns pivot columns in
/// row order.
fn eliminate(
    data: &mut [u64],
    stride: usize,
    nrows: usize,
    ncols: usize,
    mut rhs: Option<&mut Vec<bool>>,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == nrows {
            break;
        }
        let w = col / WORD;
        let m = mask(col);
        let Some(found) = (top..nrows).find(|&r| data[r * stride + w] & m != 0) else {
            continue;
        };
        if found != top {
            for i in 0..stride {
                data.swap(top * stride + i, found * stride + i);
            }
            if let Some(v) = rhs.as_deref_mut() {
                v.swap(top, found);
            }
        }
        let (head, tail) = data.split_at_mut(top * stride);
        let (pivot_row, after) = tail.split_at_mut(stride);
        for (r, chunk) in head.chunks_exact_mut(stride).enumerate() {
            if chunk[w] & m != 0 {
                for i in w..stride {
                    chunk[i] ^= pivot_row[i];
                }
                if let Some(v) = rhs.as_deref_mut() {
                    let t = v[top];
                    v[r] ^= t;
                }
            }
        }
        for (off, chunk) in after.chunks_exact_mut(stride).enumerate() {
            if chunk[w] & m != 0 {
                for i in w..stride {
                    chunk[i] ^= pivot_row[i];
                }
                if let Some(v) = rhs.as_deref_mut() {
                    let t = v[top];
                    v[top + 1 + off] ^= t;
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    pivots
}
