//! Graded-commutative polynomials in fields, ghosts, antifields, anti-ghosts and
//! auxiliary variables, with left/right derivatives, the antibracket and the BV Laplacian.
//!
//! Sign conventions:
//! * Monomials are stored in the global variable order with Koszul signs absorbed
//!   into the coefficient.
//! * `∂_L/∂v` anticommutes `v` to the front; `∂_R/∂v` to the back. On a monomial m,
//!   `∂_R m/∂v = (−1)^{ε(v)(ε(m)+1)} ∂_L m/∂v`.
//! * `{F, G} = Σ_φ ∂_R F/∂φ* · ∂_L G/∂φ − ∂_R F/∂φ · ∂_L G/∂φ*`, which gives
//!   `{φ*, φ} = 1` and `{φ, φ*} = −1` for even φ.
//! * `Δ F = Σ_φ ∂_L/∂φ ∂_L/∂φ* F`, so `Δ(x₁x*₁) = 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exec;
use crate::scalars::RadicalScalar;

/// Variable kinds, declared in the global normal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Field,
    Ghost,
    Antifield,
    Antighost,
    AuxB,
    AuxH,
    AuxBStar,
    AuxHStar,
}

impl Kind {
    pub fn ghost_degree(self) -> i32 {
        match self {
            Kind::Field | Kind::AuxH | Kind::AuxBStar => 0,
            Kind::Ghost => 1,
            Kind::Antifield | Kind::AuxB | Kind::AuxHStar => -1,
            Kind::Antighost => -2,
        }
    }

    pub fn is_starred(self) -> bool {
        matches!(
            self,
            Kind::Antifield | Kind::Antighost | Kind::AuxBStar | Kind::AuxHStar
        )
    }

    pub fn partner(self) -> Kind {
        match self {
            Kind::Field => Kind::Antifield,
            Kind::Antifield => Kind::Field,
            Kind::Ghost => Kind::Antighost,
            Kind::Antighost => Kind::Ghost,
            Kind::AuxB => Kind::AuxBStar,
            Kind::AuxBStar => Kind::AuxB,
            Kind::AuxH => Kind::AuxHStar,
            Kind::AuxHStar => Kind::AuxH,
        }
    }

    pub fn is_aux(self) -> bool {
        matches!(
            self,
            Kind::AuxB | Kind::AuxH | Kind::AuxBStar | Kind::AuxHStar
        )
    }

    fn prefix(self) -> &'static str {
        match self {
            Kind::Field => "x",
            Kind::Ghost => "C",
            Kind::Antifield => "x*",
            Kind::Antighost => "C*",
            Kind::AuxB => "B",
            Kind::AuxH => "h",
            Kind::AuxBStar => "B*",
            Kind::AuxHStar => "h*",
        }
    }
}

/// A graded generator, e.g. `x3` or `C*2`. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub kind: Kind,
    pub index: u16,
}

impl Var {
    pub const fn new(kind: Kind, index: u16) -> Self {
        Self { kind, index }
    }
    pub const fn x(i: u16) -> Self {
        Self::new(Kind::Field, i)
    }
    pub const fn xs(i: u16) -> Self {
        Self::new(Kind::Antifield, i)
    }
    pub const fn c(i: u16) -> Self {
        Self::new(Kind::Ghost, i)
    }
    pub const fn cs(i: u16) -> Self {
        Self::new(Kind::Antighost, i)
    }
    pub const fn b(i: u16) -> Self {
        Self::new(Kind::AuxB, i)
    }
    pub const fn h(i: u16) -> Self {
        Self::new(Kind::AuxH, i)
    }
    pub const fn bs(i: u16) -> Self {
        Self::new(Kind::AuxBStar, i)
    }
    pub const fn hs(i: u16) -> Self {
        Self::new(Kind::AuxHStar, i)
    }

    pub fn ghost_degree(self) -> i32 {
        self.kind.ghost_degree()
    }

    pub fn is_odd(self) -> bool {
        self.ghost_degree().rem_euclid(2) == 1
    }

    pub fn is_starred(self) -> bool {
        self.kind.is_starred()
    }

    pub fn partner(self) -> Var {
        Var::new(self.kind.partner(), self.index)
    }

    /// The unstarred member of this variable's conjugate pair.
    pub fn base(self) -> Var {
        if self.is_starred() {
            self.partner()
        } else {
            self
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)
    }
}

impl FromStr for Var {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        const KINDS: [Kind; 8] = [
            Kind::Antifield,
            Kind::Antighost,
            Kind::AuxBStar,
            Kind::AuxHStar,
            Kind::Field,
            Kind::Ghost,
            Kind::AuxB,
            Kind::AuxH,
        ];
        for kind in KINDS {
            if let Some(rest) = s.strip_prefix(kind.prefix()) {
                if let Ok(i) = rest.parse::<u16>() {
                    if i >= 1 {
                        return Ok(Var::new(kind, i));
                    }
                }
            }
        }
        Err(format!("unknown variable {s:?}"))
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// Table row used when serializing a theory's variables.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VarInfo {
    pub id: Var,
    pub ghost_degree: i32,
    pub kind: Kind,
    pub partner: Var,
}

pub fn var_table(vars: &[Var]) -> Vec<VarInfo> {
    vars.iter()
        .map(|&v| VarInfo {
            id: v,
            ghost_degree: v.ghost_degree(),
            kind: v.kind,
            partner: v.partner(),
        })
        .collect()
}

/// Normal-ordered product of variables. Odd variables appear with exponent 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Self(vec![(v, 1)])
    }

    /// Builds the normal form of a product of factors given in the written order.
    /// Returns None when an odd variable repeats.
    pub fn from_factors(factors: &[(Var, u32)]) -> Option<(Monomial, i32)> {
        let mut acc = Monomial::one();
        let mut sign = 1;
        for &(v, e) in factors {
            if e == 0 {
                continue;
            }
            if v.is_odd() && e > 1 {
                return None;
            }
            let (m, s) = acc.mul(&Monomial(vec![(v, e)]))?;
            acc = m;
            sign *= s;
        }
        Some((acc, sign))
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ghost_degree(&self) -> i32 {
        self.0
            .iter()
            .map(|&(v, e)| v.ghost_degree() * e as i32)
            .sum()
    }

    pub fn poly_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_odd(&self) -> bool {
        self.ghost_degree().rem_euclid(2) == 1
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |&(_, e)| e)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.exponent(v) > 0
    }

    /// Normal-ordered product with its Koszul sign, or None if it vanishes.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i32)> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut odd_in_a_remaining = a.iter().filter(|(v, _)| v.is_odd()).count();
        let mut swaps = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 <= b[j].0);
            if take_a && j < b.len() && i < a.len() && a[i].0 == b[j].0 {
                let v = a[i].0;
                if v.is_odd() {
                    return None;
                }
                out.push((v, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            } else if take_a {
                if a[i].0.is_odd() {
                    odd_in_a_remaining -= 1;
                }
                out.push(a[i]);
                i += 1;
            } else {
                if b[j].0.is_odd() {
                    swaps += odd_in_a_remaining;
                }
                out.push(b[j]);
                j += 1;
            }
        }
        Some((Monomial(out), if swaps.is_multiple_of(2) { 1 } else { -1 }))
    }

    /// ∂_L/∂v of the monomial: (sign·multiplicity, remaining monomial).
    pub fn left_derivative(&self, v: Var) -> Option<(i64, Monomial)> {
        let pos = self.0.iter().position(|(w, _)| *w == v)?;
        let mut rest = self.0.clone();
        let e = rest[pos].1;
        if v.is_odd() {
            let before = self.0[..pos].iter().filter(|(w, _)| w.is_odd()).count();
            rest.remove(pos);
            Some((if before % 2 == 0 { 1 } else { -1 }, Monomial(rest)))
        } else {
            if e == 1 {
                rest.remove(pos);
            } else {
                rest[pos].1 -= 1;
            }
            Some((e as i64, Monomial(rest)))
        }
    }

    /// ∂_R/∂v, expressed through the left derivative.
    pub fn right_derivative(&self, v: Var) -> Option<(i64, Monomial)> {
        let (c, rest) = self.left_derivative(v)?;
        let flip = v.is_odd() && !self.is_odd();
        Some((if flip { -c } else { c }, rest))
    }

    /// Splits into (field part, remainder); both remain normal ordered.
    pub fn split_fields(&self) -> (Monomial, Monomial) {
        let (f, r): (Vec<_>, Vec<_>) = self.0.iter().partition(|(v, _)| v.kind == Kind::Field);
        (Monomial(f), Monomial(r))
    }

    /// Factors expanded with multiplicity, in normal order.
    pub fn expanded(&self) -> Vec<Var> {
        self.0
            .iter()
            .flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize))
            .collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Finite sum of normal-ordered monomials with real radical coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, RadicalScalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(RadicalScalar::one())
    }

    pub fn constant(c: RadicalScalar) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(RadicalScalar::from_int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), RadicalScalar::one())
    }

    pub fn term(m: Monomial, c: RadicalScalar) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// Product of variables in the written order, with a coefficient.
    pub fn product(c: RadicalScalar, factors: &[Var]) -> Self {
        let fs: Vec<_> = factors.iter().map(|&v| (v, 1)).collect();
        match Monomial::from_factors(&fs) {
            Some((m, s)) => Self::term(m, if s < 0 { -c } else { c }),
            None => Self::zero(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: RadicalScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RadicalScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> RadicalScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn scale(&self, c: &RadicalScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&RadicalScalar::from_int(n))
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        self.scale(&RadicalScalar::from_rational(q.clone()))
    }

    /// The ghost degree if the polynomial is homogeneous (None for zero or mixed).
    pub fn ghost_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(Monomial::ghost_degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn max_poly_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::poly_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn homogeneous(&self, k: i32) -> Self {
        self.filter(|m| m.ghost_degree() == k)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn has_starred(&self) -> bool {
        self.vars().iter().any(|v| v.is_starred())
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(RadicalScalar::is_rational)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn left_derivative(&self, v: Var) -> Self {
        self.derive(v, Monomial::left_derivative)
    }

    pub fn right_derivative(&self, v: Var) -> Self {
        self.derive(v, Monomial::right_derivative)
    }

    fn derive(&self, v: Var, d: impl Fn(&Monomial, Var) -> Option<(i64, Monomial)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((k, rest)) = d(m, v) {
                out.add_term(rest, c * &RadicalScalar::from_int(k));
            }
        }
        out
    }

    /// Simultaneous substitution of variables by polynomials of the same parity.
    pub fn substitute(&self, map: &BTreeMap<Var, Poly>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            for &(v, e) in &m.0 {
                let factor = map.get(&v).cloned().unwrap_or_else(|| Poly::var(v));
                for _ in 0..e {
                    acc = &acc * &factor;
                }
                if acc.is_zero() {
                    break;
                }
            }
            out += &acc;
        }
        out
    }

    /// Largest coefficient magnitude, as a float, for reporting.
    pub fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += &(-rhs);
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, p) in &self.terms {
            for (b, q) in &rhs.terms {
                if let Some((m, s)) = a.mul(b) {
                    let c = p * q;
                    out.add_term(m, if s < 0 { -c } else { c });
                }
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        let mut out = Poly::zero();
        for p in iter {
            out += &p;
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (m.is_one(), c.is_one()) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => write!(f, "{m}")?,
                (false, false) if c.terms().count() == 1 => write!(f, "{c}·{m}")?,
                _ => write!(f, "({c})·{m}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: RadicalScalar,
    monomial: Vec<(Var, u32)>,
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let factors = Vec::<(Var, u32)>::deserialize(d)?;
        match Monomial::from_factors(&factors) {
            Some((m, 1)) => Ok(m),
            _ => Err(D::Error::custom(
                "factors must be normal-ordered with odd exponents ≤ 1",
            )),
        }
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(m, c)| TermRepr {
                coeff: c.clone(),
                monomial: m.0.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let mut out = Poly::zero();
        for t in terms {
            let (m, s) = Monomial::from_factors(&t.monomial)
                .ok_or_else(|| D::Error::custom("odd variable with exponent > 1"))?;
            out.add_term(m, if s < 0 { -t.coeff } else { t.coeff });
        }
        Ok(out)
    }
}

/// Conjugate pairs touched by either argument, keyed by their unstarred member.
fn touched_pairs(a: &Poly, b: &Poly) -> Vec<Var> {
    let set: BTreeSet<Var> = a
        .vars()
        .into_iter()
        .chain(b.vars())
        .map(Var::base)
        .collect();
    set.into_iter().collect()
}

/// The antibracket; see the module docs for the sign convention.
pub fn antibracket(f: &Poly, g: &Poly) -> Poly {
    let pairs = touched_pairs(f, g);
    let parts = exec::map(&pairs, |&phi| {
        let star = phi.partner();
        let mut acc = Poly::zero();
        let a = f.right_derivative(star);
        if !a.is_zero() {
            let b = g.left_derivative(phi);
            if !b.is_zero() {
                acc += &(&a * &b);
            }
        }
        let a = f.right_derivative(phi);
        if !a.is_zero() {
            let b = g.left_derivative(star);
            if !b.is_zero() {
                acc += &(-(&a * &b));
            }
        }
        acc
    });
    parts.into_iter().sum()
}

/// The BV Laplacian Σ_φ ∂_L/∂φ ∂_L/∂φ*.
pub fn bv_laplacian(f: &Poly) -> Poly {
    let pairs = touched_pairs(f, &Poly::zero());
    pairs
        .iter()
        .map(|&phi| f.left_derivative(phi.partner()).left_derivative(phi))
        .sum()
}

/// x₁..x_{n²}, x*₁..x*_{n²}, C₁..C_{n²−1}, C*₁..C*_{n²−1} in normal order.
pub fn bv_variables(n: usize) -> Vec<Var> {
    let (nf, ng) = ((n * n) as u16, (n * n - 1) as u16);
    let mut vars: Vec<Var> = (1..=nf).map(Var::x).collect();
    vars.extend((1..=ng).map(Var::c));
    vars.extend((1..=nf).map(Var::xs));
    vars.extend((1..=ng).map(Var::cs));
    vars
}

/// B, h, B*, h* for q = 1..n²−1.
pub fn aux_variables(n: usize) -> Vec<Var> {
    let ng = (n * n - 1) as u16;
    let mut vars: Vec<Var> = (1..=ng).map(Var::b).collect();
    vars.extend((1..=ng).map(Var::h));
    vars.extend((1..=ng).map(Var::bs));
    vars.extend((1..=ng).map(Var::hs));
    vars
}

/// Helper for tests and callers: the rational q as a scalar.
pub fn rational(n: i64, d: i64) -> RadicalScalar {
    RadicalScalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

impl From<RadicalScalar> for Poly {
    fn from(c: RadicalScalar) -> Self {
        Poly::constant(c)
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> Poly {
        Poly::var(x)
    }

    #[test]
    fn koszul_signs() {
        let c1c2 = &v(Var::c(1)) * &v(Var::c(2));
        let c2c1 = &v(Var::c(2)) * &v(Var::c(1));
        assert_eq!(c2c1, -&c1c2);
        assert!((&v(Var::c(1)) * &v(Var::c(1))).is_zero());
        assert_eq!(&v(Var::x(1)) * &v(Var::c(1)), &v(Var::c(1)) * &v(Var::x(1)));
    }

    #[test]
    fn derivatives() {
        let c1c2 = Poly::product(RadicalScalar::one(), &[Var::c(1), Var::c(2)]);
        assert_eq!(c1c2.left_derivative(Var::c(1)), v(Var::c(2)));
        assert_eq!(c1c2.left_derivative(Var::c(2)), -v(Var::c(1)));
        assert_eq!(c1c2.right_derivative(Var::c(2)), v(Var::c(1)));
        let p = Poly::product(RadicalScalar::one(), &[Var::x(1), Var::x(1), Var::c(3)]);
        assert_eq!(
            p.left_derivative(Var::x(1)),
            Poly::product(2.into(), &[Var::x(1), Var::c(3)])
        );
    }

    #[test]
    fn generator_pairings() {
        assert_eq!(antibracket(&v(Var::xs(1)), &v(Var::x(1))), Poly::one());
        assert_eq!(antibracket(&v(Var::cs(2)), &v(Var::c(2))), Poly::one());
        assert_eq!(antibracket(&v(Var::bs(1)), &v(Var::b(1))), Poly::one());
        assert!(antibracket(&v(Var::x(1)), &v(Var::x(2))).is_zero());
        assert!(antibracket(&v(Var::xs(1)), &v(Var::xs(2))).is_zero());
        let f = Poly::product(1.into(), &[Var::xs(1), Var::x(2)]);
        let g = Poly::product(1.into(), &[Var::x(1), Var::c(3)]);
        let b = antibracket(&f, &g);
        assert_eq!(
            b.ghost_degree(),
            Some(f.ghost_degree().unwrap() + g.ghost_degree().unwrap() + 1)
        );
    }

    #[test]
    fn laplacian_examples() {
        let p = Poly::product(1.into(), &[Var::x(1), Var::xs(1)]);
        assert_eq!(bv_laplacian(&p), Poly::one());
        assert!(bv_laplacian(&Poly::product(1.into(), &[Var::x(1), Var::x(2)])).is_zero());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let p = Poly::product(1.into(), &[Var::xs(1), Var::x(2)]);
        let mut map = BTreeMap::new();
        map.insert(Var::xs(1), v(Var::b(1)));
        map.insert(Var::x(2), v(Var::x(3)));
        assert_eq!(
            p.substitute(&map),
            Poly::product(1.into(), &[Var::b(1), Var::x(3)])
        );
    }

    #[test]
    fn var_names_round_trip() {
        for var in bv_variables(2).into_iter().chain(aux_variables(2)) {
            assert_eq!(var.to_string().parse::<Var>().unwrap(), var);
            assert_eq!(var.partner().ghost_degree(), -var.ghost_degree() - 1);
        }
    }

    #[test]
    fn json_round_trip() {
        let p = &Poly::product(rational(3, 2), &[Var::c(2), Var::c(1), Var::x(1)]) + &Poly::int(4);
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Poly>(&js).unwrap(), p);
    }
}
