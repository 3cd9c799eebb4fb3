//! Closed-form capacity, minimum length and minimum upload cost, plus the
//! symbol/code rate of a concrete parameter set. All ratios are exact.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-negative rational in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<u64>);

impl Rational {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self(Ratio::new(numer, denom)))
    }

    pub fn integer(n: u64) -> Self {
        Self(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn checked_mul(&self, other: &Rational) -> Result<Rational> {
        let n = self.numer().checked_mul(other.numer());
        let d = self.denom().checked_mul(other.denom());
        n.zip(d)
            .map(|(n, d)| Self(Ratio::new(n, d)))
            .ok_or(Error::Overflow("rational product"))
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Rational> {
        if other.numer() == 0 {
            return Err(Error::Domain("division by zero".into()));
        }
        self.checked_mul(&Rational(Ratio::new(other.denom(), other.numer())))
    }

    pub fn checked_add(&self, other: &Rational) -> Result<Rational> {
        let (a, b, c, d) = (self.numer(), self.denom(), other.numer(), other.denom());
        let n = a
            .checked_mul(d)
            .and_then(|x| c.checked_mul(b).and_then(|y| x.checked_add(y)));
        let den = b.checked_mul(d);
        n.zip(den)
            .map(|(n, d)| Self(Ratio::new(n, d)))
            .ok_or(Error::Overflow("rational sum"))
    }

    /// `self - other`, which must not be negative.
    pub fn checked_sub(&self, other: &Rational) -> Result<Rational> {
        if other > self {
            return Err(Error::Domain(format!("{self} - {other} is negative")));
        }
        let (a, b, c, d) = (self.numer(), self.denom(), other.numer(), other.denom());
        let n = a.checked_mul(d).zip(c.checked_mul(b)).map(|(x, y)| x - y);
        n.zip(b.checked_mul(d))
            .map(|(n, d)| Self(Ratio::new(n, d)))
            .ok_or(Error::Overflow("rational difference"))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("invalid rational {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => Rational::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Rational::integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parameters of an LDC: locality `n`, `k` source symbols, length `m`,
/// `lw` bits per source symbol and `lx` bits per coded symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "Lw")]
    pub lw: usize,
    #[serde(rename = "Lx")]
    pub lx: usize,
}

/// Largest `K` supported; message subsets are carried as 64-bit masks.
pub const MAX_MESSAGES: usize = 64;

impl CodeParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(Error::Domain(format!(
                "N and K must be positive (N={}, K={})",
                self.n, self.k
            )));
        }
        if self.k > MAX_MESSAGES {
            return Err(Error::Domain(format!("K={} exceeds {MAX_MESSAGES}", self.k)));
        }
        if self.m < self.n {
            return Err(Error::Domain(format!(
                "code length M={} is below the locality N={}",
                self.m, self.n
            )));
        }
        if self.lw == 0 {
            return Err(Error::Domain("L_w must be at least 1".into()));
        }
        Ok(())
    }

    /// Total number of message bits, `K * L_w`.
    pub fn message_bits(&self) -> usize {
        self.k * self.lw
    }
}

fn check_nk(n: u64, k: u64) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::Domain(format!("N and K must be positive (N={n}, K={k})")));
    }
    Ok(())
}

fn pow(n: u64, k: u64) -> Result<u64> {
    u32::try_from(k)
        .ok()
        .and_then(|k| n.checked_pow(k))
        .ok_or(Error::Overflow("N^K"))
}

/// Maximum symbol rate of a universal (hence also perfectly smooth) LDC with
/// locality `n` and `k` source symbols: `N^K (N-1) / (N^K - 1)`, and `1/K`
/// when `N = 1`.
pub fn capacity_uldc(n: u64, k: u64) -> Result<Rational> {
    check_nk(n, k)?;
    if n == 1 {
        return Rational::new(1, k);
    }
    let nk = pow(n, k)?;
    let numer = nk.checked_mul(n - 1).ok_or(Error::Overflow("N^K (N-1)"))?;
    Rational::new(numer, nk - 1)
}

/// Shortest code length that attains [`capacity_uldc`]: `N^K`.
pub fn min_length(n: u64, k: u64) -> Result<u64> {
    check_nk(n, k)?;
    pow(n, k)
}

/// Capacity of PIR_max (equivalently RIR_max):
/// `(1 + 1/N + ... + 1/N^(K-1))^-1`.
pub fn pir_capacity(n: u64, k: u64) -> Result<Rational> {
    check_nk(n, k)?;
    if n == 1 {
        return Rational::new(1, k);
    }
    let nk = pow(n, k)?;
    // N^(K-1) (N-1) / (N^K - 1)
    Rational::new(nk / n * (n - 1), nk - 1)
}

/// Minimum per-database upload, in bits, of a capacity achieving PIR_max
/// scheme: `(K-1) log2 N`.
pub fn min_upload_bits(n: u64, k: u64) -> Result<f64> {
    check_nk(n, k)?;
    if n < 2 {
        return Err(Error::Domain(format!("upload cost needs N >= 2, got N={n}")));
    }
    Ok((k - 1) as f64 * (n as f64).log2())
}

/// `(L_w / L_x, K L_w / (M L_x))`.
pub fn symbol_and_code_rate(p: &CodeParams) -> Result<(Rational, Rational)> {
    if p.lx == 0 {
        return Err(Error::Domain("L_x = 0: rate undefined".into()));
    }
    let symbol = Rational::new(p.lw as u64, p.lx as u64)?;
    let numer = (p.k as u64)
        .checked_mul(p.lw as u64)
        .ok_or(Error::Overflow("K L_w"))?;
    let denom = (p.m as u64)
        .checked_mul(p.lx as u64)
        .ok_or(Error::Overflow("M L_x"))?;
    Ok((symbol, Rational::new(numer, denom)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    /// `N * (sum_{i<K} N^-i)^-1`, summed term by term as an independent route.
    fn geometric_capacity(n: u64, k: u64) -> Rational {
        let mut sum = Rational::zero();
        for i in 0..k {
            sum = sum.checked_add(&r(1, n.pow(i as u32))).unwrap();
        }
        Rational::integer(n).checked_div(&sum).unwrap()
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity_uldc(2, 2).unwrap(), r(4, 3));
        assert_eq!(capacity_uldc(3, 3).unwrap(), r(27, 13));
        for n in 1..6 {
            assert_eq!(capacity_uldc(n, 1).unwrap(), Rational::integer(n));
        }
        assert_eq!(capacity_uldc(1, 4).unwrap(), r(1, 4));
        assert!(capacity_uldc(0, 2).is_err());
        assert!(capacity_uldc(2, 0).is_err());
    }

    #[test]
    fn length_and_upload_examples() {
        assert_eq!(min_length(2, 3).unwrap(), 8);
        assert_eq!(min_length(3, 3).unwrap(), 27);
        assert_eq!(min_length(7, 1).unwrap(), 7);
        assert!(matches!(min_length(2, 64), Err(Error::Overflow(_))));
        assert_eq!(min_upload_bits(2, 3).unwrap(), 2.0);
        assert_eq!(min_upload_bits(5, 1).unwrap(), 0.0);
        assert_eq!(min_upload_bits(4, 3).unwrap(), 4.0);
        assert!(min_upload_bits(1, 3).is_err());
    }

    #[test]
    fn pir_capacity_examples() {
        assert_eq!(pir_capacity(2, 3).unwrap(), r(4, 7));
        for n in 1..6 {
            assert_eq!(pir_capacity(n, 1).unwrap(), Rational::one());
        }
        for k in 1..6 {
            assert_eq!(pir_capacity(1, k).unwrap(), r(1, k));
        }
    }

    #[test]
    fn rate_examples() {
        let fig1 = CodeParams { n: 2, k: 3, m: 6, lw: 1, lx: 1 };
        assert_eq!(symbol_and_code_rate(&fig1).unwrap(), (r(1, 1), r(1, 2)));
        let ex1 = CodeParams { n: 2, k: 2, m: 4, lw: 4, lx: 3 };
        assert_eq!(symbol_and_code_rate(&ex1).unwrap(), (r(4, 3), r(2, 3)));
        let plain = CodeParams { n: 3, k: 3, m: 3, lw: 5, lx: 5 };
        assert_eq!(symbol_and_code_rate(&plain).unwrap(), (Rational::one(), Rational::one()));
        let degenerate = CodeParams { lx: 0, ..plain };
        assert!(symbol_and_code_rate(&degenerate).is_err());
    }

    #[test]
    fn grid_identities() {
        for n in 1..=8u64 {
            for k in 1..=8u64 {
                let c = capacity_uldc(n, k).unwrap();
                let p = pir_capacity(n, k).unwrap();
                assert_eq!(c, p.checked_mul(&Rational::integer(n)).unwrap(), "N={n} K={k}");
                assert_eq!(c, geometric_capacity(n, k), "N={n} K={k}");
                if n > 1 || k > 1 {
                    assert!(Rational::integer(n - 1) < c, "N={n} K={k}");
                }
                assert!(c <= Rational::integer(n));
                assert_eq!(min_length(n, k + 1).unwrap(), n * min_length(n, k).unwrap());
                if k > 1 {
                    assert!(c < capacity_uldc(n, k - 1).unwrap(), "decreasing in K");
                }
                if n > 1 {
                    assert!(c > capacity_uldc(n - 1, k).unwrap(), "increasing in N");
                }
            }
        }
    }

    #[test]
    fn rational_text_round_trip() {
        let x: Rational = "27/13".parse().unwrap();
        assert_eq!(x, r(27, 13));
        assert_eq!(x.to_string(), "27/13");
        assert_eq!("6/4".parse::<Rational>().unwrap(), r(3, 2));
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::integer(3));
        assert!("1/0".parse::<Rational>().is_err());
    }
}
