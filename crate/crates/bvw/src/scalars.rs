//! Exact arithmetic over ℚ(√2, √3, √5, …): finite sums Σ q_m √m with m squarefree.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default bound on the dimension of the extension used by [`RadicalScalar::inverse`].
pub const DEFAULT_EXTENSION_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("extension of dimension {dim} exceeds the bound {bound}")]
    ExtensionOverflow { dim: usize, bound: usize },
    #[error("malformed scalar: {0}")]
    Malformed(String),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::Malformed(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn is_squarefree(mut m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p * p) {
            return false;
        }
        if m.is_multiple_of(p) {
            m /= p;
        }
        p += 1;
    }
    true
}

/// Splits m into (s, r) with m = s²·r and r squarefree.
fn square_split(mut m: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut r = 1u64;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
        p += 1;
    }
    (s, r * m)
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// √a·√b = g·√c for squarefree a, b.
fn radical_product(a: u64, b: u64) -> (u64, u64) {
    let g = a.gcd(&b);
    (g, (a / g) * (b / g))
}

/// Exact value Σ q_m √m. Key 1 holds the rational part; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RadicalScalar {
    terms: BTreeMap<u64, BigRational>,
}

impl RadicalScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut s = Self::zero();
        s.add_term(1, q);
        s
    }

    /// q·√m for squarefree m.
    pub fn term(m: u64, q: BigRational) -> Result<Self, ScalarError> {
        if !is_squarefree(m) {
            return Err(ScalarError::Malformed(format!(
                "radicand {m} is not squarefree"
            )));
        }
        let mut s = Self::zero();
        s.add_term(m, q);
        Ok(s)
    }

    /// √q for a nonnegative rational q.
    pub fn sqrt_rational(q: &BigRational) -> Result<Self, ScalarError> {
        if q.is_negative() {
            return Err(ScalarError::Malformed(
                "square root of a negative rational".into(),
            ));
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        // √(p/d) = √(p·d)/d
        let pd = (q.numer() * q.denom())
            .to_u64()
            .ok_or_else(|| ScalarError::Malformed("radicand too large".into()))?;
        let (s, r) = square_split(pd);
        let coeff = BigRational::new(BigInt::from(s), q.denom().clone());
        Self::term(r, coeff)
    }

    fn add_term(&mut self, m: u64, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&1).is_some_and(|q| q.is_one())
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&m| m == 1)
    }

    pub fn rational_part(&self) -> BigRational {
        self.terms
            .get(&1)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(&m, q)| (m, q))
    }

    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().copied()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&m, c)| (m, c * q)).collect(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&m, q)| q.to_f64().unwrap_or(f64::NAN) * (m as f64).sqrt())
            .sum()
    }

    /// Multiplicative inverse, with the default extension bound.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        self.inverse_bounded(DEFAULT_EXTENSION_BOUND)
    }

    /// Solves a·y = 1 as a linear system over ℚ in the extension ℚ(√p : p | radicands of a).
    pub fn inverse_bounded(&self, bound: usize) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroInverse);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.rational_part().recip()));
        }
        let mut primes: Vec<u64> = self.terms.keys().flat_map(|&m| prime_factors(m)).collect();
        primes.sort_unstable();
        primes.dedup();
        let dim = 1usize
            .checked_shl(primes.len() as u32)
            .unwrap_or(usize::MAX);
        if primes.len() >= 63 || dim > bound {
            return Err(ScalarError::ExtensionOverflow { dim, bound });
        }
        let basis: Vec<u64> = (0..dim)
            .map(|mask| {
                primes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| p)
                    .product()
            })
            .collect();
        let index: BTreeMap<u64, usize> = basis.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        // column j = a·√basis[j]
        let mut mat = vec![vec![BigRational::zero(); dim + 1]; dim];
        for (j, &bj) in basis.iter().enumerate() {
            for (&m, q) in &self.terms {
                let (g, c) = radical_product(m, bj);
                mat[index[&c]][j] += q * BigRational::from_integer(g.into());
            }
        }
        mat[index[&1]][dim] = BigRational::one();
        let sol = solve_dense(mat, dim).ok_or(ScalarError::ZeroInverse)?;
        let mut out = Self::zero();
        for (j, q) in sol.into_iter().enumerate() {
            out.add_term(basis[j], q);
        }
        Ok(out)
    }
}

/// Gauss–Jordan on an augmented dim×(dim+1) system; None if singular.
fn solve_dense(mut m: Vec<Vec<BigRational>>, dim: usize) -> Option<Vec<BigRational>> {
    for col in 0..dim {
        let piv = (col..dim).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..dim {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=dim {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[dim].clone()).collect())
}

impl From<i64> for RadicalScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for RadicalScalar {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

impl Add<&RadicalScalar> for &RadicalScalar {
    type Output = RadicalScalar;
    fn add(self, rhs: &RadicalScalar) -> RadicalScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for RadicalScalar {
    type Output = RadicalScalar;
    fn add(mut self, rhs: RadicalScalar) -> RadicalScalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&RadicalScalar> for RadicalScalar {
    fn add_assign(&mut self, rhs: &RadicalScalar) {
        for (&m, q) in &rhs.terms {
            self.add_term(m, q.clone());
        }
    }
}

impl Neg for &RadicalScalar {
    type Output = RadicalScalar;
    fn neg(self) -> RadicalScalar {
        RadicalScalar {
            terms: self.terms.iter().map(|(&m, q)| (m, -q)).collect(),
        }
    }
}

impl Neg for RadicalScalar {
    type Output = RadicalScalar;
    fn neg(self) -> RadicalScalar {
        -&self
    }
}

impl Sub<&RadicalScalar> for &RadicalScalar {
    type Output = RadicalScalar;
    fn sub(self, rhs: &RadicalScalar) -> RadicalScalar {
        self + &(-rhs)
    }
}

impl Sub for RadicalScalar {
    type Output = RadicalScalar;
    fn sub(self, rhs: RadicalScalar) -> RadicalScalar {
        &self - &rhs
    }
}

impl Mul<&RadicalScalar> for &RadicalScalar {
    type Output = RadicalScalar;
    fn mul(self, rhs: &RadicalScalar) -> RadicalScalar {
        let mut out = RadicalScalar::zero();
        for (&a, p) in &self.terms {
            for (&b, q) in &rhs.terms {
                let (g, c) = radical_product(a, b);
                out.add_term(c, p * q * BigRational::from_integer(g.into()));
            }
        }
        out
    }
}

impl Mul for RadicalScalar {
    type Output = RadicalScalar;
    fn mul(self, rhs: RadicalScalar) -> RadicalScalar {
        &self * &rhs
    }
}

impl fmt::Display for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&m, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            let abs = q.abs();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            match (m, abs.is_one()) {
                (1, _) => write!(f, "{}", format_rational(&abs))?,
                (_, true) => write!(f, "√{m}")?,
                _ => write!(f, "{}·√{m}", format_rational(&abs))?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RadicalRepr {
    terms: Vec<(u64, String)>,
}

impl Serialize for RadicalScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RadicalRepr {
            terms: self
                .terms
                .iter()
                .map(|(&m, q)| (m, format_rational(q)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadicalScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = RadicalRepr::deserialize(d)?;
        let mut out = RadicalScalar::zero();
        for (m, q) in repr.terms {
            let q = parse_rational(&q).map_err(D::Error::custom)?;
            out += &RadicalScalar::term(m, q).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

/// Gaussian pair re + i·im over [`RadicalScalar`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ComplexRadical {
    pub re: RadicalScalar,
    pub im: RadicalScalar,
}

impl ComplexRadical {
    pub fn new(re: RadicalScalar, im: RadicalScalar) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(RadicalScalar::one())
    }

    pub fn i() -> Self {
        Self::new(RadicalScalar::zero(), RadicalScalar::one())
    }

    pub fn real(re: RadicalScalar) -> Self {
        Self::new(re, RadicalScalar::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> RadicalScalar {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn scale(&self, r: &RadicalScalar) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }
}

impl Add<&ComplexRadical> for &ComplexRadical {
    type Output = ComplexRadical;
    fn add(self, rhs: &ComplexRadical) -> ComplexRadical {
        ComplexRadical::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&ComplexRadical> for &ComplexRadical {
    type Output = ComplexRadical;
    fn sub(self, rhs: &ComplexRadical) -> ComplexRadical {
        ComplexRadical::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Neg for &ComplexRadical {
    type Output = ComplexRadical;
    fn neg(self) -> ComplexRadical {
        ComplexRadical::new(-&self.re, -&self.im)
    }
}

impl Mul<&ComplexRadical> for &ComplexRadical {
    type Output = ComplexRadical;
    fn mul(self, rhs: &ComplexRadical) -> ComplexRadical {
        ComplexRadical::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl fmt::Display for ComplexRadical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i({})", self.im),
            _ => write!(f, "({}) + i({})", self.re, self.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(m: u64) -> RadicalScalar {
        RadicalScalar::term(m, BigRational::one()).unwrap()
    }

    #[test]
    fn root_products() {
        assert_eq!(&sq(2) * &sq(2), RadicalScalar::from_int(2));
        assert_eq!(&sq(2) * &sq(3), sq(6));
        let a = RadicalScalar::sqrt_rational(&rat(1, 3)).unwrap();
        let b = RadicalScalar::sqrt_rational(&rat(1, 6)).unwrap();
        assert_eq!(&a * &b, RadicalScalar::term(2, rat(1, 6)).unwrap());
    }

    #[test]
    fn inverses() {
        let half = RadicalScalar::from_rational(rat(1, 2));
        assert_eq!(half.inverse().unwrap(), RadicalScalar::from_int(2));
        let a = &RadicalScalar::one() + &sq(2);
        assert_eq!(a.inverse().unwrap(), &sq(2) - &RadicalScalar::one());
        let b = RadicalScalar::term(3, rat(1, 2)).unwrap();
        assert_eq!(
            b.inverse().unwrap(),
            RadicalScalar::term(3, rat(2, 3)).unwrap()
        );
        assert_eq!(
            RadicalScalar::zero().inverse(),
            Err(ScalarError::ZeroInverse)
        );
    }

    #[test]
    fn extension_bound() {
        let a = &(&sq(2) + &sq(3)) + &sq(5);
        assert!(matches!(
            a.inverse_bounded(4),
            Err(ScalarError::ExtensionOverflow { dim: 8, .. })
        ));
        assert!(a.inverse_bounded(8).is_ok());
    }

    #[test]
    fn sqrt_of_rational_is_canonical() {
        assert_eq!(
            RadicalScalar::sqrt_rational(&rat(8, 1)).unwrap(),
            RadicalScalar::term(2, rat(2, 1)).unwrap()
        );
        assert_eq!(
            RadicalScalar::sqrt_rational(&rat(1, 4)).unwrap(),
            RadicalScalar::from_rational(rat(1, 2))
        );
        assert!(RadicalScalar::term(12, rat(1, 1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a =
            &RadicalScalar::from_rational(rat(-3, 7)) + &RadicalScalar::term(6, rat(5, 2)).unwrap();
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, r#"{"terms":[[1,"-3/7"],[6,"5/2"]]}"#);
        assert_eq!(serde_json::from_str::<RadicalScalar>(&js).unwrap(), a);
        let z = ComplexRadical::new(a.clone(), sq(3));
        let js = serde_json::to_string(&z).unwrap();
        assert_eq!(serde_json::from_str::<ComplexRadical>(&js).unwrap(), z);
    }

    #[test]
    fn float_conversion() {
        let a = &RadicalScalar::one() + &sq(2);
        assert!((a.to_f64() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
    }
}
