//! Generalized Gell-Mann generators of su(n) and their structure constants.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::exec;
use crate::scalars::{rat, ComplexRadical, RadicalScalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LieError {
    #[error("matrix size {0} is not supported (need n ≥ 2)")]
    BadSize(usize),
    #[error("generators are not orthonormal: tr(σ_{0} σ_{1}) ≠ 2δ")]
    NonOrthonormal(usize, usize),
    #[error("structure constant f_{0}{1}{2} has a nonzero imaginary part")]
    NotReal(usize, usize, usize),
}

/// Dense square matrix with exact complex entries, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    pub n: usize,
    pub entries: Vec<ComplexRadical>,
}

impl CMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![ComplexRadical::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = ComplexRadical::one();
        }
        m
    }

    /// The matrix unit E_ij (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.entries[i * n + j] = ComplexRadical::one();
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &ComplexRadical {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: ComplexRadical) {
        self.entries[i * self.n + j] = z;
    }

    pub fn dagger(&self) -> Self {
        let n = self.n;
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.entries[j * n + i] = self.get(i, j).conj();
            }
        }
        m
    }

    pub fn trace(&self) -> ComplexRadical {
        (0..self.n).fold(ComplexRadical::zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn scale(&self, z: &ComplexRadical) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|e| e * z).collect(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ComplexRadical::is_zero)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.dagger()
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        m.entries[i * n + j] = &m.entries[i * n + j] + &(a * b);
                    }
                }
            }
        }
        m
    }
}

/// σ_1..σ_{n²−1} (hermitian, traceless) followed by σ_{n²} = Id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBasis {
    pub n: usize,
    pub sigma: Vec<CMatrix>,
}

impl GeneratorBasis {
    /// σ_a with 1-based index.
    pub fn sigma(&self, a: usize) -> &CMatrix {
        &self.sigma[a - 1]
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }
}

/// Generalized Gell-Mann matrices. For each k = 2..n the symmetric and antisymmetric
/// members for the pairs (j, k), j < k, come first, then the diagonal member with l = k−1.
/// This reproduces the Pauli matrices for n = 2 and λ₁..λ₈ for n = 3.
pub fn gellmann_basis(n: usize) -> Result<GeneratorBasis, LieError> {
    if n < 2 {
        return Err(LieError::BadSize(n));
    }
    let one = ComplexRadical::one();
    let i = ComplexRadical::i();
    let mut sigma = Vec::with_capacity(n * n);
    for k in 1..n {
        for j in 0..k {
            let mut s = CMatrix::zero(n);
            s.set(j, k, one.clone());
            s.set(k, j, one.clone());
            sigma.push(s);
            let mut a = CMatrix::zero(n);
            a.set(j, k, -&i);
            a.set(k, j, i.clone());
            sigma.push(a);
        }
        let l = k as i64;
        let norm = RadicalScalar::sqrt_rational(&rat(2, l * (l + 1))).expect("positive rational");
        let mut d = CMatrix::zero(n);
        for m in 0..k {
            d.set(m, m, ComplexRadical::real(norm.clone()));
        }
        d.set(
            k,
            k,
            ComplexRadical::real(&norm * &RadicalScalar::from_int(-l)),
        );
        sigma.push(d);
    }
    sigma.push(CMatrix::identity(n));
    Ok(GeneratorBasis { n, sigma })
}

/// Sparse, totally antisymmetric f_pqr for 1 ≤ p, q, r ≤ n²−1.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub n: usize,
    table: BTreeMap<(usize, usize, usize), RadicalScalar>,
}

impl StructureConstants {
    pub fn from_table(n: usize, table: BTreeMap<(usize, usize, usize), RadicalScalar>) -> Self {
        let table = table.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self { n, table }
    }

    pub fn dim(&self) -> usize {
        self.n * self.n - 1
    }

    pub fn get(&self, p: usize, q: usize, r: usize) -> RadicalScalar {
        self.table.get(&(p, q, r)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &RadicalScalar)> {
        self.table.iter().map(|(&k, v)| (k, v))
    }

    pub fn table_mut(&mut self) -> &mut BTreeMap<(usize, usize, usize), RadicalScalar> {
        &mut self.table
    }

    pub fn is_rational(&self) -> bool {
        self.table.values().all(RadicalScalar::is_rational)
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    n: usize,
    entries: Vec<(usize, usize, usize, RadicalScalar)>,
}

impl Serialize for StructureConstants {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TableRepr {
            n: self.n,
            entries: self
                .table
                .iter()
                .map(|(&(p, q, r), v)| (p, q, r, v.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureConstants {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = TableRepr::deserialize(d)?;
        Ok(Self::from_table(
            repr.n,
            repr.entries
                .into_iter()
                .map(|(p, q, r, v)| ((p, q, r), v))
                .collect(),
        ))
    }
}

/// f_pqr = −(i/4)·tr([σ_p, σ_q] σ_r).
pub fn structure_constants(basis: &GeneratorBasis) -> Result<StructureConstants, LieError> {
    let m = basis.dim() - 1;
    let two = ComplexRadical::real(RadicalScalar::from_int(2));
    for a in 1..=m {
        for b in 1..=m {
            let t = (basis.sigma(a) * basis.sigma(b)).trace();
            let want = if a == b {
                two.clone()
            } else {
                ComplexRadical::zero()
            };
            if t != want {
                return Err(LieError::NonOrthonormal(a, b));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (1..=m)
        .flat_map(|p| (p + 1..=m).map(move |q| (p, q)))
        .collect();
    let factor = ComplexRadical::new(
        RadicalScalar::zero(),
        RadicalScalar::from_rational(rat(-1, 4)),
    );
    let rows = exec::map(&pairs, |&(p, q)| {
        let comm = basis.sigma(p).commutator(basis.sigma(q));
        (1..=m)
            .map(|r| (r, &(&comm * basis.sigma(r)).trace() * &factor))
            .collect::<Vec<_>>()
    });
    let mut table = BTreeMap::new();
    for (&(p, q), row) in pairs.iter().zip(rows) {
        for (r, z) in row {
            if !z.im.is_zero() {
                return Err(LieError::NotReal(p, q, r));
            }
            if !z.re.is_zero() {
                table.insert((p, q, r), z.re.clone());
                table.insert((q, p, r), -&z.re);
            }
        }
    }
    Ok(StructureConstants::from_table(basis.n, table))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Violation {
    pub indices: Vec<usize>,
    pub residual: RadicalScalar,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LieReport {
    pub n: usize,
    pub antisymmetry_max_residual: f64,
    pub jacobi_max_residual: f64,
    pub antisymmetry_violations: Vec<Violation>,
    pub jacobi_violations: Vec<Violation>,
}

impl LieReport {
    pub fn ok(&self) -> bool {
        self.antisymmetry_violations.is_empty() && self.jacobi_violations.is_empty()
    }
}

const VIOLATION_CAP: usize = 32;

/// Checks total antisymmetry and Σ_a (f_apr f_aqs − f_aps f_aqr − f_apq f_ars) = 0.
pub fn verify_lie_axioms(f: &StructureConstants) -> LieReport {
    let m = f.dim();
    let mut anti = Vec::new();
    let mut anti_max = 0f64;
    for p in 1..=m {
        for q in 1..=m {
            for r in 1..=m {
                let v = f.get(p, q, r);
                for (idx, w) in [((q, p, r), -&v), ((p, r, q), -&v), ((q, r, p), v.clone())] {
                    let res = &f.get(idx.0, idx.1, idx.2) - &w;
                    if !res.is_zero() {
                        anti_max = anti_max.max(res.to_f64().abs());
                        if anti.len() < VIOLATION_CAP {
                            anti.push(Violation {
                                indices: vec![p, q, r, idx.0, idx.1, idx.2],
                                residual: res,
                            });
                        }
                    }
                }
            }
        }
    }
    let quads: Vec<(usize, usize, usize, usize)> = (1..=m)
        .flat_map(|p| {
            (1..=m).flat_map(move |q| (1..=m).flat_map(move |r| (1..=m).map(move |s| (p, q, r, s))))
        })
        .collect();
    let residuals = exec::map(&quads, |&(p, q, r, s)| {
        let mut acc = RadicalScalar::zero();
        for a in 1..=m {
            acc += &(&f.get(a, p, r) * &f.get(a, q, s));
            acc += &-(&f.get(a, p, s) * &f.get(a, q, r));
            acc += &-(&f.get(a, p, q) * &f.get(a, r, s));
        }
        acc
    });
    let mut jac = Vec::new();
    let mut jac_max = 0f64;
    for (&(p, q, r, s), res) in quads.iter().zip(residuals) {
        if !res.is_zero() {
            jac_max = jac_max.max(res.to_f64().abs());
            if jac.len() < VIOLATION_CAP {
                jac.push(Violation {
                    indices: vec![p, q, r, s],
                    residual: res,
                });
            }
        }
    }
    LieReport {
        n: f.n,
        antisymmetry_max_residual: anti_max,
        jacobi_max_residual: jac_max,
        antisymmetry_violations: anti,
        jacobi_violations: jac,
    }
}

/// [σ_p, σ_q] − 2i Σ_r f_pqr σ_r for all p, q; true when every difference vanishes.
pub fn commutators_match(basis: &GeneratorBasis, f: &StructureConstants) -> bool {
    let m = f.dim();
    let two_i = ComplexRadical::new(RadicalScalar::zero(), RadicalScalar::from_int(2));
    (1..=m).all(|p| {
        (1..=m).all(|q| {
            let lhs = basis.sigma(p).commutator(basis.sigma(q));
            let mut rhs = CMatrix::zero(basis.n);
            for r in 1..=m {
                let c = f.get(p, q, r);
                if !c.is_zero() {
                    rhs = &rhs + &basis.sigma(r).scale(&two_i.scale(&c));
                }
            }
            (&lhs - &rhs).is_zero()
        })
    })
}

/// Levi-Civita ε_pqr on {1, 2, 3}.
pub fn levi_civita(p: usize, q: usize, r: usize) -> i64 {
    match (p, q, r) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (1, 3, 2) | (3, 2, 1) | (2, 1, 3) => -1,
        _ => 0,
    }
}
