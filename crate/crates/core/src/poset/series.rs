//! Möbius values from the minimum and the rank / characteristic series.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::TruncatedPoset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("constant term {0} is not a unit")]
    NonUnit(BigInt),
    #[error("empty series")]
    Empty,
}

/// `c_0 + c_1 x + … + c_N x^N`, exact, modulo `x^(N+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PowerSeriesTrunc {
    #[serde(with = "bigint_strings")]
    coeffs: Vec<BigInt>,
}

mod bigint_strings {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl PowerSeriesTrunc {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        PowerSeriesTrunc { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        PowerSeriesTrunc {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    /// The constant series `1` with precision `N`.
    pub fn one(depth: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); depth + 1];
        coeffs[0] = BigInt::one();
        PowerSeriesTrunc { coeffs }
    }

    /// Precision `N` (the highest retained exponent).
    pub fn depth(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Coefficients as `i64`, when they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    /// Truncated product; precision is the smaller of the two.
    pub fn mul_trunc(&self, other: &PowerSeriesTrunc) -> PowerSeriesTrunc {
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        PowerSeriesTrunc { coeffs: out }
    }

    /// True iff the series is `1` at its precision.
    pub fn is_one(&self) -> bool {
        !self.coeffs.is_empty() && self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, depth: usize) -> PowerSeriesTrunc {
        PowerSeriesTrunc {
            coeffs: self.coeffs.iter().take(depth + 1).cloned().collect(),
        }
    }
}

impl Mul for &PowerSeriesTrunc {
    type Output = PowerSeriesTrunc;
    fn mul(self, rhs: &PowerSeriesTrunc) -> PowerSeriesTrunc {
        self.mul_trunc(rhs)
    }
}

impl fmt::Display for PowerSeriesTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `t` with `s·t ≡ 1 (mod x^(N+1))`.
pub fn series_invert(s: &PowerSeriesTrunc) -> Result<PowerSeriesTrunc, SeriesError> {
    let c = s.coeffs();
    if c.is_empty() {
        return Err(SeriesError::Empty);
    }
    let c0 = &c[0];
    if c0.abs() != BigInt::one() {
        return Err(SeriesError::NonUnit(c0.clone()));
    }
    // c0 is ±1, so its inverse is itself.
    let mut t: Vec<BigInt> = Vec::with_capacity(c.len());
    t.push(c0.clone());
    for k in 1..c.len() {
        let mut acc = BigInt::zero();
        for j in 1..=k {
            if !c[j].is_zero() {
                acc += &c[j] * &t[k - j];
            }
        }
        t.push(-(c0 * acc));
    }
    Ok(PowerSeriesTrunc::new(t))
}

/// `μ(0̂, p)` for every node `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusVector {
    pub values: Vec<BigInt>,
}

impl MobiusVector {
    pub fn get(&self, v: u32) -> &BigInt {
        &self.values[v as usize]
    }
}

/// Computes `μ(0̂, y) = −Σ_{z<y} μ(0̂, z)` in rank order.
pub fn mobius_from_bottom(p: &TruncatedPoset) -> MobiusVector {
    let downs = p.down_sets();
    if let Some(values) = mobius_i128(&downs) {
        return MobiusVector {
            values: values.into_iter().map(BigInt::from).collect(),
        };
    }
    let mut values: Vec<BigInt> = Vec::with_capacity(downs.len());
    for (y, d) in downs.iter().enumerate() {
        if y == 0 {
            values.push(BigInt::one());
            continue;
        }
        let mut acc = BigInt::zero();
        for z in d.ones().filter(|&z| z != y) {
            acc += &values[z];
        }
        values.push(-acc);
    }
    MobiusVector { values }
}

fn mobius_i128(downs: &[fixedbitset::FixedBitSet]) -> Option<Vec<i128>> {
    let mut values: Vec<i128> = Vec::with_capacity(downs.len());
    for (y, d) in downs.iter().enumerate() {
        if y == 0 {
            values.push(1);
            continue;
        }
        let mut acc: i128 = 0;
        for z in d.ones().filter(|&z| z != y) {
            acc = acc.checked_add(values[z])?;
        }
        values.push(acc.checked_neg()?);
    }
    Some(values)
}

/// `F(P;x)`: coefficient `i` is the number of nodes of rank `i`.
pub fn rank_series(p: &TruncatedPoset) -> PowerSeriesTrunc {
    PowerSeriesTrunc::new(p.rank_sizes().into_iter().map(BigInt::from).collect())
}

/// `χ*(P;x)`: Möbius values from the minimum summed by rank.
pub fn char_series(p: &TruncatedPoset) -> PowerSeriesTrunc {
    let mu = mobius_from_bottom(p);
    let mut coeffs = vec![BigInt::zero(); p.depth() + 1];
    for v in 0..p.len() as u32 {
        coeffs[p.rank_of(v)] += mu.get(v);
    }
    PowerSeriesTrunc::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> TruncatedPoset {
        let ranks = (0..=n as u32).map(|i| vec![i]).collect();
        let covers: Vec<(u32, u32)> = (0..n as u32).map(|i| (i, i + 1)).collect();
        TruncatedPoset::new(ranks, &covers, None).unwrap()
    }

    #[test]
    fn invert_square() {
        let s = PowerSeriesTrunc::from_i64(&[1, -2, 1, 0]);
        assert_eq!(series_invert(&s).unwrap(), PowerSeriesTrunc::from_i64(&[1, 2, 3, 4]));
    }

    #[test]
    fn invert_recurrence() {
        let s = PowerSeriesTrunc::from_i64(&[1, -3, 2, 0, 0]);
        assert_eq!(series_invert(&s).unwrap(), PowerSeriesTrunc::from_i64(&[1, 3, 7, 15, 31]));
    }

    #[test]
    fn invert_identity_and_negative_unit() {
        assert_eq!(series_invert(&PowerSeriesTrunc::from_i64(&[1])).unwrap(), PowerSeriesTrunc::from_i64(&[1]));
        let s = PowerSeriesTrunc::from_i64(&[-1, 1, 0]);
        let t = series_invert(&s).unwrap();
        assert!(s.mul_trunc(&t).is_one());
        assert_eq!(
            series_invert(&PowerSeriesTrunc::from_i64(&[2, 1])),
            Err(SeriesError::NonUnit(BigInt::from(2)))
        );
    }

    #[test]
    fn mobius_chain_and_b2() {
        let mu = mobius_from_bottom(&chain(3));
        assert_eq!(mu.values, [1, -1, 0, 0].map(BigInt::from).to_vec());
        let b2 = super::super::tests::b2();
        let mu = mobius_from_bottom(&b2);
        assert_eq!(mu.values, [1, -1, -1, 1].map(BigInt::from).to_vec());
        assert_eq!(char_series(&b2), PowerSeriesTrunc::from_i64(&[1, -2, 1]));
    }

    #[test]
    fn single_node() {
        let p = chain(0);
        assert_eq!(rank_series(&p), PowerSeriesTrunc::from_i64(&[1]));
        assert_eq!(char_series(&p), PowerSeriesTrunc::from_i64(&[1]));
    }

    #[test]
    fn display() {
        assert_eq!(PowerSeriesTrunc::from_i64(&[1, 3, 7, 0, 31]).to_string(), "1 + 3x + 7x^2 + 31x^4");
        assert_eq!(PowerSeriesTrunc::from_i64(&[1, -1, 0]).to_string(), "1 - x");
        assert_eq!(PowerSeriesTrunc::from_i64(&[0, 0]).to_string(), "0");
    }
}
