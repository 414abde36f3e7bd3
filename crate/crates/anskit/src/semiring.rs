//! Exact semiring arithmetic and the dense matrix algebra built on it.
//!
//! Six coefficient domains are supported: the naturals, the naturals
//! extended with infinity, the integers, the integers modulo m, the Boolean
//! semiring and the rationals. All integer arithmetic is arbitrary
//! precision; there is no overflow anywhere in the crate.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Identifies one of the supported coefficient semirings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SemiringTag {
    /// ℕ with ordinary addition and multiplication.
    Nat,
    /// ℕ ∪ {∞} with ∞+n=∞, ∞·n=∞ for n≠0 and ∞·0=0.
    NatInf,
    /// ℤ.
    Int,
    /// ℤ/mℤ for m ≥ 2.
    IntMod(BigUint),
    /// The Boolean semiring ({0,1}, ∨, ∧).
    Bool,
    /// ℚ.
    Rat,
}

/// A natural number extended with a distinguished infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended {
    Finite(BigUint),
    Infinity,
}

/// A scalar belonging to one of the supported semirings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiringValue {
    Nat(BigUint),
    NatInf(Extended),
    Int(BigInt),
    /// Residue class, always reduced modulo the tag's modulus.
    Mod(BigUint),
    Bool(bool),
    Rat(BigRational),
}

impl SemiringTag {
    pub fn int_mod(m: u64) -> SemiringTag {
        assert!(m >= 2, "modulus must be at least 2");
        SemiringTag::IntMod(BigUint::from(m))
    }

    pub fn name(&self) -> String {
        match self {
            SemiringTag::Nat => "nat".into(),
            SemiringTag::NatInf => "nat-inf".into(),
            SemiringTag::Int => "int".into(),
            SemiringTag::IntMod(m) => format!("int-mod:{m}"),
            SemiringTag::Bool => "bool".into(),
            SemiringTag::Rat => "rat".into(),
        }
    }

    pub fn parse_tag(s: &str) -> Result<SemiringTag> {
        match s {
            "nat" => Ok(SemiringTag::Nat),
            "nat-inf" => Ok(SemiringTag::NatInf),
            "int" => Ok(SemiringTag::Int),
            "bool" => Ok(SemiringTag::Bool),
            "rat" => Ok(SemiringTag::Rat),
            _ => {
                if let Some(m) = s.strip_prefix("int-mod:") {
                    let m: BigUint = m
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
                    if m < BigUint::from(2u32) {
                        return Err(Error::Parse("modulus must be at least 2".into()));
                    }
                    Ok(SemiringTag::IntMod(m))
                } else {
                    Err(Error::Parse(format!("unknown semiring {s:?}")))
                }
            }
        }
    }

    pub fn zero(&self) -> SemiringValue {
        match self {
            SemiringTag::Nat => SemiringValue::Nat(BigUint::zero()),
            SemiringTag::NatInf => SemiringValue::NatInf(Extended::Finite(BigUint::zero())),
            SemiringTag::Int => SemiringValue::Int(BigInt::zero()),
            SemiringTag::IntMod(_) => SemiringValue::Mod(BigUint::zero()),
            SemiringTag::Bool => SemiringValue::Bool(false),
            SemiringTag::Rat => SemiringValue::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> SemiringValue {
        match self {
            SemiringTag::Nat => SemiringValue::Nat(BigUint::one()),
            SemiringTag::NatInf => SemiringValue::NatInf(Extended::Finite(BigUint::one())),
            SemiringTag::Int => SemiringValue::Int(BigInt::one()),
            SemiringTag::IntMod(_) => SemiringValue::Mod(BigUint::one()),
            SemiringTag::Bool => SemiringValue::Bool(true),
            SemiringTag::Rat => SemiringValue::Rat(BigRational::one()),
        }
    }

    /// Converts a small unsigned integer into this semiring.
    pub fn from_u64(&self, n: u64) -> SemiringValue {
        match self {
            SemiringTag::Nat => SemiringValue::Nat(BigUint::from(n)),
            SemiringTag::NatInf => SemiringValue::NatInf(Extended::Finite(BigUint::from(n))),
            SemiringTag::Int => SemiringValue::Int(BigInt::from(n)),
            SemiringTag::IntMod(m) => SemiringValue::Mod(BigUint::from(n) % m),
            SemiringTag::Bool => SemiringValue::Bool(n != 0),
            SemiringTag::Rat => SemiringValue::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn validate(&self, v: &SemiringValue) -> Result<()> {
        let ok = match (self, v) {
            (SemiringTag::Nat, SemiringValue::Nat(_)) => true,
            (SemiringTag::NatInf, SemiringValue::NatInf(_)) => true,
            (SemiringTag::Int, SemiringValue::Int(_)) => true,
            (SemiringTag::IntMod(m), SemiringValue::Mod(r)) => r < m,
            (SemiringTag::Bool, SemiringValue::Bool(_)) => true,
            (SemiringTag::Rat, SemiringValue::Rat(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidValue {
                tag: self.name(),
                value: v.to_string(),
            })
        }
    }

    pub fn add(&self, x: &SemiringValue, y: &SemiringValue) -> Result<SemiringValue> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(match (x, y) {
            (SemiringValue::Nat(a), SemiringValue::Nat(b)) => SemiringValue::Nat(a + b),
            (SemiringValue::NatInf(a), SemiringValue::NatInf(b)) => {
                SemiringValue::NatInf(match (a, b) {
                    (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
                    _ => Extended::Infinity,
                })
            }
            (SemiringValue::Int(a), SemiringValue::Int(b)) => SemiringValue::Int(a + b),
            (SemiringValue::Mod(a), SemiringValue::Mod(b)) => {
                let m = self.modulus().unwrap();
                SemiringValue::Mod((a + b) % m)
            }
            (SemiringValue::Bool(a), SemiringValue::Bool(b)) => SemiringValue::Bool(*a || *b),
            (SemiringValue::Rat(a), SemiringValue::Rat(b)) => SemiringValue::Rat(a + b),
            _ => unreachable!("validated above"),
        })
    }

    pub fn mul(&self, x: &SemiringValue, y: &SemiringValue) -> Result<SemiringValue> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(match (x, y) {
            (SemiringValue::Nat(a), SemiringValue::Nat(b)) => SemiringValue::Nat(a * b),
            (SemiringValue::NatInf(a), SemiringValue::NatInf(b)) => {
                // ∞·0 = 0·∞ = 0, ∞·n = ∞ for n ≠ 0.
                SemiringValue::NatInf(match (a, b) {
                    (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a * b),
                    (Extended::Infinity, Extended::Finite(b)) if b.is_zero() => {
                        Extended::Finite(BigUint::zero())
                    }
                    (Extended::Finite(a), Extended::Infinity) if a.is_zero() => {
                        Extended::Finite(BigUint::zero())
                    }
                    _ => Extended::Infinity,
                })
            }
            (SemiringValue::Int(a), SemiringValue::Int(b)) => SemiringValue::Int(a * b),
            (SemiringValue::Mod(a), SemiringValue::Mod(b)) => {
                let m = self.modulus().unwrap();
                SemiringValue::Mod((a * b) % m)
            }
            (SemiringValue::Bool(a), SemiringValue::Bool(b)) => SemiringValue::Bool(*a && *b),
            (SemiringValue::Rat(a), SemiringValue::Rat(b)) => SemiringValue::Rat(a * b),
            _ => unreachable!("validated above"),
        })
    }

    pub fn modulus(&self) -> Option<&BigUint> {
        match self {
            SemiringTag::IntMod(m) => Some(m),
            _ => None,
        }
    }

    /// True when the carrier set is finite (Bool, ℤ/mℤ).
    pub fn is_finite(&self) -> bool {
        matches!(self, SemiringTag::Bool | SemiringTag::IntMod(_))
    }

    /// True when elements embed into ℚ compatibly with + and ·.
    pub fn embeds_in_rationals(&self) -> bool {
        matches!(self, SemiringTag::Nat | SemiringTag::Int | SemiringTag::Rat)
    }

    /// Absolute value, for the tags carrying one (ℕ, ℤ, ℚ).
    pub fn norm(&self, v: &SemiringValue) -> Result<BigRational> {
        self.validate(v)?;
        match v {
            SemiringValue::Nat(a) => Ok(BigRational::from_integer(BigInt::from(a.clone()))),
            SemiringValue::Int(a) => Ok(BigRational::from_integer(a.abs())),
            SemiringValue::Rat(a) => Ok(a.abs()),
            _ => Err(Error::UnsupportedSemiring {
                tag: self.name(),
                hint: "no absolute value is defined for this semiring".into(),
            }),
        }
    }

    /// Parses a scalar in the textual interchange syntax: decimal integers,
    /// `inf`, `p/q` rationals, `0`/`1` Booleans.
    pub fn parse_value(&self, s: &str) -> Result<SemiringValue> {
        let bad = || Error::InvalidValue {
            tag: self.name(),
            value: s.to_string(),
        };
        let v = match self {
            SemiringTag::Nat => SemiringValue::Nat(s.parse().map_err(|_| bad())?),
            SemiringTag::NatInf => {
                if s == "inf" {
                    SemiringValue::NatInf(Extended::Infinity)
                } else {
                    SemiringValue::NatInf(Extended::Finite(s.parse().map_err(|_| bad())?))
                }
            }
            SemiringTag::Int => SemiringValue::Int(s.parse().map_err(|_| bad())?),
            SemiringTag::IntMod(m) => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                let m_int = BigInt::from(m.clone());
                let r = ((n % &m_int) + &m_int) % &m_int;
                SemiringValue::Mod(r.to_biguint().unwrap())
            }
            SemiringTag::Bool => match s {
                "0" => SemiringValue::Bool(false),
                "1" => SemiringValue::Bool(true),
                _ => return Err(bad()),
            },
            SemiringTag::Rat => {
                if let Some((p, q)) = s.split_once('/') {
                    let p: BigInt = p.parse().map_err(|_| bad())?;
                    let q: BigInt = q.parse().map_err(|_| bad())?;
                    if q.is_zero() {
                        return Err(bad());
                    }
                    SemiringValue::Rat(BigRational::new(p, q))
                } else {
                    SemiringValue::Rat(BigRational::from_integer(s.parse().map_err(|_| bad())?))
                }
            }
        };
        self.validate(&v)?;
        Ok(v)
    }
}

impl SemiringValue {
    pub fn is_zero(&self) -> bool {
        match self {
            SemiringValue::Nat(a) => a.is_zero(),
            SemiringValue::NatInf(Extended::Finite(a)) => a.is_zero(),
            SemiringValue::NatInf(Extended::Infinity) => false,
            SemiringValue::Int(a) => a.is_zero(),
            SemiringValue::Mod(a) => a.is_zero(),
            SemiringValue::Bool(b) => !b,
            SemiringValue::Rat(a) => a.is_zero(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SemiringValue::NatInf(Extended::Infinity))
    }

    /// The value as a rational, for the ℚ-embeddable tags.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            SemiringValue::Nat(a) => {
                Some(BigRational::from_integer(BigInt::from(a.clone())))
            }
            SemiringValue::Int(a) => Some(BigRational::from_integer(a.clone())),
            SemiringValue::Rat(a) => Some(a.clone()),
            _ => None,
        }
    }

    /// The value as a non-negative integer when it is one.
    pub fn to_nat(&self) -> Option<BigUint> {
        match self {
            SemiringValue::Nat(a) => Some(a.clone()),
            SemiringValue::NatInf(Extended::Finite(a)) => Some(a.clone()),
            SemiringValue::Int(a) => a.to_biguint(),
            SemiringValue::Mod(a) => Some(a.clone()),
            SemiringValue::Bool(b) => Some(if *b { BigUint::one() } else { BigUint::zero() }),
            _ => None,
        }
    }
}

impl fmt::Display for SemiringValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiringValue::Nat(a) => write!(f, "{a}"),
            SemiringValue::NatInf(Extended::Finite(a)) => write!(f, "{a}"),
            SemiringValue::NatInf(Extended::Infinity) => write!(f, "inf"),
            SemiringValue::Int(a) => write!(f, "{a}"),
            SemiringValue::Mod(a) => write!(f, "{a}"),
            SemiringValue::Bool(b) => write!(f, "{}", if *b { 1 } else { 0 }),
            SemiringValue::Rat(a) => {
                if a.denom().is_one() {
                    write!(f, "{}", a.numer())
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())
                }
            }
        }
    }
}

/// Dense matrix with entries in a fixed semiring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    tag: SemiringTag,
    rows: usize,
    cols: usize,
    entries: Vec<SemiringValue>,
}

impl Matrix {
    pub fn zero(tag: SemiringTag, rows: usize, cols: usize) -> Matrix {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let entries = vec![tag.zero(); rows * cols];
        Matrix {
            tag,
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(tag: SemiringTag, n: usize) -> Matrix {
        let mut m = Matrix::zero(tag.clone(), n, n);
        for i in 0..n {
            m.set(i, i, tag.one());
        }
        m
    }

    pub fn from_rows(tag: SemiringTag, rows: Vec<Vec<SemiringValue>>) -> Result<Matrix> {
        let r = rows.len();
        assert!(r > 0, "matrix dimensions must be positive");
        let c = rows[0].len();
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for v in row {
                tag.validate(&v)?;
                entries.push(v);
            }
        }
        Ok(Matrix {
            tag,
            rows: r,
            cols: c,
            entries,
        })
    }

    /// Row or column vector from scalars given as u64, mainly for tests.
    pub fn row_from_u64(tag: &SemiringTag, vals: &[u64]) -> Matrix {
        Matrix::from_rows(
            tag.clone(),
            vec![vals.iter().map(|&v| tag.from_u64(v)).collect()],
        )
        .unwrap()
    }

    pub fn col_from_u64(tag: &SemiringTag, vals: &[u64]) -> Matrix {
        Matrix::from_rows(
            tag.clone(),
            vals.iter().map(|&v| vec![tag.from_u64(v)]).collect(),
        )
        .unwrap()
    }

    pub fn tag(&self) -> &SemiringTag {
        &self.tag
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &SemiringValue {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: SemiringValue) {
        self.tag.validate(&v).expect("entry must match matrix tag");
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[SemiringValue] {
        &self.entries
    }

    fn check_tag(&self, other: &Matrix) -> Result<()> {
        if self.tag != other.tag {
            return Err(Error::TagMismatch {
                expected: self.tag.name(),
                got: other.tag.name(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_tag(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            *e = self.tag.add(e, o)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_tag(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.tag.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = self.tag.mul(a, b)?;
                    let cur = out.get(i, j);
                    let sum = self.tag.add(cur, &prod)?;
                    out.set(i, j, sum);
                }
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, k: &SemiringValue) -> Result<Matrix> {
        self.tag.validate(k)?;
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = self.tag.mul(k, e)?;
        }
        Ok(out)
    }

    /// Kronecker (tensor) product.
    pub fn kronecker(&self, other: &Matrix) -> Result<Matrix> {
        self.check_tag(other)?;
        let mut out = Matrix::zero(
            self.tag.clone(),
            self.rows * other.rows,
            self.cols * other.cols,
        );
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        let b = other.get(p, q);
                        if b.is_zero() {
                            continue;
                        }
                        let v = self.tag.mul(a, b)?;
                        out.set(i * other.rows + p, j * other.cols + q, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &Matrix) -> Result<Matrix> {
        self.check_tag(other)?;
        let mut out = Matrix::zero(
            self.tag.clone(),
            self.rows + other.rows,
            self.cols + other.cols,
        );
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Matrix) -> Result<Matrix> {
        self.check_tag(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hconcat row mismatch".into()));
        }
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols + other.cols);
            for j in 0..self.cols {
                row.push(self.get(i, j).clone());
            }
            for j in 0..other.cols {
                row.push(other.get(i, j).clone());
            }
            rows.push(row);
        }
        Matrix::from_rows(self.tag.clone(), rows)
    }

    /// Vertical concatenation.
    pub fn vconcat(&self, other: &Matrix) -> Result<Matrix> {
        self.check_tag(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vconcat column mismatch".into()));
        }
        let mut rows = Vec::with_capacity(self.rows + other.rows);
        for i in 0..self.rows {
            rows.push((0..self.cols).map(|j| self.get(i, j).clone()).collect());
        }
        for i in 0..other.rows {
            rows.push((0..other.cols).map(|j| other.get(i, j).clone()).collect());
        }
        Matrix::from_rows(self.tag.clone(), rows)
    }

    /// Maximum row sum of absolute values; submultiplicative for the tags
    /// with an absolute value.
    pub fn max_row_sum_norm(&self) -> Result<BigRational> {
        let mut best = BigRational::zero();
        for i in 0..self.rows {
            let mut sum = BigRational::zero();
            for j in 0..self.cols {
                sum += self.tag.norm(self.get(i, j))?;
            }
            if sum > best {
                best = sum;
            }
        }
        Ok(best)
    }

    /// Entry-wise scalar conversion into another semiring. Natural numbers
    /// move into any tag; integers additionally into ℤ/mℤ and ℚ.
    pub fn convert(&self, target: &SemiringTag) -> Result<Matrix> {
        let mut out = Matrix::zero(target.clone(), self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, convert_value(self.get(i, j), target)?);
            }
        }
        Ok(out)
    }
}

/// Converts a scalar between semirings when a canonical embedding exists.
pub fn convert_value(v: &SemiringValue, target: &SemiringTag) -> Result<SemiringValue> {
    let err = || Error::UnsupportedSemiring {
        tag: target.name(),
        hint: format!("cannot convert {v} into this semiring"),
    };
    Ok(match (v, target) {
        (SemiringValue::Nat(a), SemiringTag::Nat) => SemiringValue::Nat(a.clone()),
        (SemiringValue::Nat(a), SemiringTag::NatInf) => {
            SemiringValue::NatInf(Extended::Finite(a.clone()))
        }
        (SemiringValue::Nat(a), SemiringTag::Int) => SemiringValue::Int(BigInt::from(a.clone())),
        (SemiringValue::Nat(a), SemiringTag::IntMod(m)) => SemiringValue::Mod(a % m),
        (SemiringValue::Nat(a), SemiringTag::Bool) => SemiringValue::Bool(!a.is_zero()),
        (SemiringValue::Nat(a), SemiringTag::Rat) => {
            SemiringValue::Rat(BigRational::from_integer(BigInt::from(a.clone())))
        }
        (SemiringValue::NatInf(Extended::Finite(a)), _) => {
            convert_value(&SemiringValue::Nat(a.clone()), target)?
        }
        (SemiringValue::Int(a), SemiringTag::Int) => SemiringValue::Int(a.clone()),
        (SemiringValue::Int(a), SemiringTag::Rat) => {
            SemiringValue::Rat(BigRational::from_integer(a.clone()))
        }
        (SemiringValue::Int(a), SemiringTag::IntMod(m)) => {
            let m_int = BigInt::from(m.clone());
            let r = ((a % &m_int) + &m_int) % &m_int;
            SemiringValue::Mod(r.to_biguint().unwrap())
        }
        (SemiringValue::Int(a), SemiringTag::Nat) => {
            SemiringValue::Nat(a.to_biguint().ok_or_else(err)?)
        }
        (SemiringValue::Bool(b), SemiringTag::Bool) => SemiringValue::Bool(*b),
        (SemiringValue::Bool(b), _) => convert_value(
            &SemiringValue::Nat(if *b { BigUint::one() } else { BigUint::zero() }),
            target,
        )?,
        (SemiringValue::Mod(a), SemiringTag::IntMod(m)) if a < m => SemiringValue::Mod(a.clone()),
        (SemiringValue::Mod(a), SemiringTag::Nat) => SemiringValue::Nat(a.clone()),
        (SemiringValue::Rat(a), SemiringTag::Rat) => SemiringValue::Rat(a.clone()),
        (SemiringValue::Rat(a), SemiringTag::Int) if a.denom().is_one() => {
            SemiringValue::Int(a.numer().clone())
        }
        _ => return Err(err()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(n: u64) -> SemiringValue {
        SemiringTag::Nat.from_u64(n)
    }

    #[test]
    fn nat_inf_conventions() {
        let t = SemiringTag::NatInf;
        let inf = SemiringValue::NatInf(Extended::Infinity);
        let zero = t.zero();
        let five = t.from_u64(5);
        assert_eq!(t.mul(&inf, &zero).unwrap(), zero);
        assert_eq!(t.mul(&zero, &inf).unwrap(), zero);
        assert_eq!(t.mul(&inf, &five).unwrap(), inf);
        assert_eq!(t.add(&inf, &five).unwrap(), inf);
        assert_eq!(t.add(&five, &inf).unwrap(), inf);
    }

    #[test]
    fn additive_identity_and_mod() {
        let t = SemiringTag::Nat;
        assert_eq!(t.add(&t.zero(), &nat(17)).unwrap(), nat(17));
        let m5 = SemiringTag::int_mod(5);
        assert_eq!(
            m5.mul(&m5.from_u64(3), &m5.from_u64(4)).unwrap(),
            m5.from_u64(2)
        );
    }

    #[test]
    fn tag_mismatch_rejected() {
        let t = SemiringTag::Nat;
        assert!(t.add(&nat(1), &SemiringValue::Bool(true)).is_err());
    }

    #[test]
    fn identity_matrix_is_neutral() {
        let t = SemiringTag::Int;
        let a = Matrix::from_rows(
            t.clone(),
            vec![
                vec![t.from_u64(1), t.from_u64(2)],
                vec![t.from_u64(3), t.from_u64(4)],
            ],
        )
        .unwrap();
        let id = Matrix::identity(t, 2);
        assert_eq!(id.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&id).unwrap(), a);
    }

    #[test]
    fn bool_matrix_reachability() {
        // Two-step reachability on the path graph 0 -> 1 -> 2.
        let t = SemiringTag::Bool;
        let mut adj = Matrix::zero(t.clone(), 3, 3);
        adj.set(0, 1, t.one());
        adj.set(1, 2, t.one());
        let two = adj.mul(&adj).unwrap();
        assert_eq!(two.get(0, 2), &t.one());
        assert_eq!(two.get(0, 1), &t.zero());
    }

    #[test]
    fn value_round_trip_text() {
        for (tag, s) in [
            (SemiringTag::Nat, "12"),
            (SemiringTag::NatInf, "inf"),
            (SemiringTag::Int, "-3"),
            (SemiringTag::int_mod(7), "5"),
            (SemiringTag::Bool, "1"),
            (SemiringTag::Rat, "-2/3"),
        ] {
            let v = tag.parse_value(s).unwrap();
            assert_eq!(v.to_string(), s);
        }
    }

    fn all_tags() -> Vec<SemiringTag> {
        vec![
            SemiringTag::Nat,
            SemiringTag::NatInf,
            SemiringTag::Int,
            SemiringTag::int_mod(6),
            SemiringTag::Bool,
            SemiringTag::Rat,
        ]
    }

    proptest! {
        #[test]
        fn semiring_laws(idx in 0usize..6, picks in proptest::collection::vec(0u64..1_000_000, 3)) {
            let tag = all_tags()[idx].clone();
            // Deterministic derivation of three values from the picks keeps
            // this generic over tags, including ∞ for ℕ∞.
            let v = |p: u64| -> SemiringValue {
                if tag == SemiringTag::NatInf && p % 10 == 0 {
                    SemiringValue::NatInf(Extended::Infinity)
                } else {
                    tag.from_u64(p % 97)
                }
            };
            let (x, y, z) = (v(picks[0]), v(picks[1]), v(picks[2]));
            // associativity
            let l = tag.add(&tag.add(&x, &y).unwrap(), &z).unwrap();
            let r = tag.add(&x, &tag.add(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            let l = tag.mul(&tag.mul(&x, &y).unwrap(), &z).unwrap();
            let r = tag.mul(&x, &tag.mul(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            // distributivity
            let l = tag.mul(&x, &tag.add(&y, &z).unwrap()).unwrap();
            let r = tag.add(&tag.mul(&x, &y).unwrap(), &tag.mul(&x, &z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn matrix_mul_associative(idx in 0usize..6, seed in proptest::collection::vec(0u64..50, 27)) {
            let tag = all_tags()[idx].clone();
            let m = |off: usize| {
                let mut m = Matrix::zero(tag.clone(), 3, 3);
                for i in 0..3 {
                    for j in 0..3 {
                        m.set(i, j, tag.from_u64(seed[off + i * 3 + j]));
                    }
                }
                m
            };
            let (a, b, c) = (m(0), m(9), m(18));
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}
