//! Finite, BV and total spectral triples as block operators with graded-polynomial
//! entries, the real structure J, and symbolic evaluation of the fermionic action.
//!
//! Each summand of the Hilbert space is a copy of M_n(ℂ), written in the matrix-unit
//! basis (row-major), so the Hilbert–Schmidt product is the Euclidean one. In this basis
//! J(φ) = i·φ† is `i · conj` composed with the transpose permutation P, and for any
//! linear operator X one has J X J = P·conj(X)·P.
//!
//! Effective vectors expand each summand in the HS-orthonormal family σ_a/√2 (hermitian
//! summands) or iσ_a/√2 (anti-hermitian summands), a < n².

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::lie::{
    gellmann_basis, structure_constants, CMatrix, GeneratorBasis, LieError, StructureConstants,
};
use crate::poly::{Kind, Poly, Var};
use crate::scalars::{rat, ComplexRadical, RadicalScalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TripleError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("D0 must be a hermitian {0}×{0} matrix")]
    NotHermitian(usize),
    #[error("vector is not in the effective subspace (summand {0})")]
    NotEffective(String),
    #[error("vector has {got} summands, expected {want}")]
    WrongShape { got: usize, want: usize },
    #[error("fermionic action has a nonzero imaginary part")]
    NotReal,
}

/// Complex combination re + i·im of graded polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CPoly {
    pub re: Poly,
    pub im: Poly,
}

impl CPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn real(re: Poly) -> Self {
        Self {
            re,
            im: Poly::zero(),
        }
    }

    pub fn scalar(z: &ComplexRadical) -> Self {
        Self {
            re: Poly::constant(z.re.clone()),
            im: Poly::constant(z.im.clone()),
        }
    }

    /// z·p for a complex scalar z and real polynomial p.
    pub fn scaled(z: &ComplexRadical, p: &Poly) -> Self {
        Self {
            re: p.scale(&z.re),
            im: p.scale(&z.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn times_i(&self) -> Self {
        Self {
            re: -&self.im,
            im: self.re.clone(),
        }
    }
}

impl Add<&CPoly> for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        CPoly {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub<&CPoly> for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        CPoly {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Mul<&CPoly> for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        CPoly {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

/// Sparse square operator with complex graded-polynomial entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Operator {
    pub dim: usize,
    entries: BTreeMap<(usize, usize), CPoly>,
}

impl Operator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> CPoly {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn add_entry(&mut self, i: usize, j: usize, z: CPoly) {
        if z.is_zero() {
            return;
        }
        let e = self.entries.entry((i, j)).or_default();
        *e = &*e + &z;
        if e.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &CPoly)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// (Xv)_k = Σ_l X_kl · v_l, with the operator's variables to the left.
    pub fn apply(&self, v: &[CPoly]) -> Vec<CPoly> {
        let mut out = vec![CPoly::zero(); self.dim];
        for (&(i, j), x) in &self.entries {
            if !v[j].is_zero() {
                out[i] = &out[i] + &(x * &v[j]);
            }
        }
        out
    }

    pub fn compose(&self, rhs: &Operator) -> Operator {
        let mut rows: BTreeMap<usize, Vec<(usize, &CPoly)>> = BTreeMap::new();
        for (&(k, j), y) in &rhs.entries {
            rows.entry(k).or_default().push((j, y));
        }
        let mut out = Operator::zero(self.dim);
        for (&(i, k), x) in &self.entries {
            if let Some(row) = rows.get(&k) {
                for &(j, y) in row {
                    out.add_entry(i, j, x * y);
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Operator) -> Operator {
        let mut out = self.clone();
        for (&(i, j), y) in &rhs.entries {
            out.add_entry(i, j, -y);
        }
        out
    }

    pub fn add(&self, rhs: &Operator) -> Operator {
        let mut out = self.clone();
        for (&(i, j), y) in &rhs.entries {
            out.add_entry(i, j, y.clone());
        }
        out
    }

    pub fn commutator(&self, rhs: &Operator) -> Operator {
        self.compose(rhs).sub(&rhs.compose(self))
    }

    /// Transpose with complex conjugation; no Koszul sign is attached to entries.
    pub fn adjoint(&self) -> Operator {
        let mut out = Operator::zero(self.dim);
        for (&(i, j), x) in &self.entries {
            out.add_entry(j, i, x.conj());
        }
        out
    }

    /// Restriction to the given row and column index sets.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Operator {
        let mut out = Operator::zero(self.dim);
        for (&(i, j), x) in &self.entries {
            if keep(i) && keep(j) {
                out.add_entry(i, j, x.clone());
            }
        }
        out
    }
}

/// Whether a summand's effective part consists of hermitian or anti-hermitian matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reality {
    Hermitian,
    AntiHermitian,
}

/// One copy of M_n(ℂ) inside the Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summand {
    /// Kind of the coordinate variables of the effective vector on this summand.
    pub kind: Kind,
    pub ghost_degree: i32,
    pub reality: Reality,
}

impl Summand {
    fn new(kind: Kind, reality: Reality) -> Self {
        Self {
            kind,
            ghost_degree: kind.ghost_degree(),
            reality,
        }
    }

    pub fn is_bosonic(&self) -> bool {
        self.ghost_degree.rem_euclid(2) == 0
    }
}

/// (M_n(ℂ), ℂⁿ, D0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpectralTriple {
    pub n: usize,
    pub d0: CMatrix,
}

impl FiniteSpectralTriple {
    pub fn new(n: usize, d0: CMatrix) -> Result<Self, TripleError> {
        if n < 2 {
            return Err(LieError::BadSize(n).into());
        }
        if d0.n != n || !d0.is_hermitian() {
            return Err(TripleError::NotHermitian(n));
        }
        Ok(Self { n, d0 })
    }

    pub fn trivial(n: usize) -> Result<Self, TripleError> {
        Self::new(n, CMatrix::zero(n))
    }
}

/// Shared accessors for the BV and total triples.
pub trait BlockTriple {
    fn n(&self) -> usize;
    fn summands(&self) -> &[Summand];
    fn dirac(&self) -> &Operator;
    fn dim(&self) -> usize {
        self.summands().len() * self.n() * self.n()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BVSpectralTriple {
    pub n: usize,
    pub basis: GeneratorBasis,
    pub f: StructureConstants,
    pub summands: Vec<Summand>,
    pub dirac: Operator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalSpectralTriple {
    pub bv: BVSpectralTriple,
    pub summands: Vec<Summand>,
    pub dirac: Operator,
}

impl BlockTriple for BVSpectralTriple {
    fn n(&self) -> usize {
        self.n
    }
    fn summands(&self) -> &[Summand] {
        &self.summands
    }
    fn dirac(&self) -> &Operator {
        &self.dirac
    }
}

impl BlockTriple for TotalSpectralTriple {
    fn n(&self) -> usize {
        self.bv.n
    }
    fn summands(&self) -> &[Summand] {
        &self.summands
    }
    fn dirac(&self) -> &Operator {
        &self.dirac
    }
}

/// The n²×n² matrix of ad(z)φ = [α(z), φ], α(z) = −½ Σ_r z_r σ_r, in the matrix-unit
/// basis, for coordinate variables z_r of the given kind.
pub fn ad_block(basis: &GeneratorBasis, kind: Kind) -> Vec<Vec<CPoly>> {
    let n = basis.n;
    let m = n * n - 1;
    let half = ComplexRadical::real(RadicalScalar::from_rational(rat(-1, 2)));
    // α_ik as a complex polynomial
    let alpha: Vec<CPoly> = (0..n * n)
        .map(|ik| {
            let mut acc = CPoly::zero();
            for r in 1..=m {
                let s = &basis.sigma(r).entries[ik] * &half;
                if !s.is_zero() {
                    acc = &acc + &CPoly::scaled(&s, &Poly::var(Var::new(kind, r as u16)));
                }
            }
            acc
        })
        .collect();
    let mut out = vec![vec![CPoly::zero(); n * n]; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut e = CPoly::zero();
                    if j == l {
                        e = &e + &alpha[i * n + k];
                    }
                    if i == k {
                        e = &e - &alpha[l * n + j];
                    }
                    out[i * n + j][k * n + l] = e;
                }
            }
        }
    }
    out
}

fn place(
    op: &mut Operator,
    n2: usize,
    row_block: usize,
    col_block: usize,
    block: &[Vec<CPoly>],
    c: &ComplexRadical,
) {
    for (i, row) in block.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                op.add_entry(
                    row_block * n2 + i,
                    col_block * n2 + j,
                    &CPoly::scalar(c) * e,
                );
            }
        }
    }
}

fn place_adjoint(
    op: &mut Operator,
    n2: usize,
    row_block: usize,
    col_block: usize,
    block: &[Vec<CPoly>],
    c: &ComplexRadical,
) {
    let mut t = vec![vec![CPoly::zero(); n2]; n2];
    for (i, row) in block.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            t[j][i] = e.conj();
        }
    }
    place(op, n2, row_block, col_block, &t, &c.conj());
}

/// BV summand order by increasing degree: [C*]_{−2}, [x*]_{−1}, [x]_0, [C]_1.
pub const BV_ORDER: [Kind; 4] = [Kind::Antighost, Kind::Antifield, Kind::Field, Kind::Ghost];
/// Auxiliary summand order R*[1] ⊕ R: h*, B*, B, h.
pub const AUX_ORDER: [Kind; 4] = [Kind::AuxHStar, Kind::AuxBStar, Kind::AuxB, Kind::AuxH];

/// D_BV = [[0, R], [R*, S]] with R = ½[[0, −ad(C)], [ad(C), −ad(X)]] and
/// S = [[0, ad(X*)], [ad(X*), ad(C*)]].
pub fn build_bv_triple(base: &FiniteSpectralTriple) -> Result<BVSpectralTriple, TripleError> {
    let n = base.n;
    let basis = gellmann_basis(n)?;
    let f = structure_constants(&basis)?;
    let n2 = n * n;
    let ad_c = ad_block(&basis, Kind::Ghost);
    let ad_x = ad_block(&basis, Kind::Field);
    let ad_xs = ad_block(&basis, Kind::Antifield);
    let ad_cs = ad_block(&basis, Kind::Antighost);
    let half = ComplexRadical::real(RadicalScalar::from_rational(rat(1, 2)));
    let mhalf = ComplexRadical::real(RadicalScalar::from_rational(rat(-1, 2)));
    let one = ComplexRadical::one();
    let (a, y, x, g) = (0, 1, 2, 3);
    let mut d = Operator::zero(4 * n2);
    // R: rows (C*, x*), columns (x, C)
    place(&mut d, n2, a, g, &ad_c, &mhalf);
    place(&mut d, n2, y, x, &ad_c, &half);
    place(&mut d, n2, y, g, &ad_x, &mhalf);
    // R*
    place_adjoint(&mut d, n2, g, a, &ad_c, &mhalf);
    place_adjoint(&mut d, n2, x, y, &ad_c, &half);
    place_adjoint(&mut d, n2, g, y, &ad_x, &mhalf);
    // S
    place(&mut d, n2, x, g, &ad_xs, &one);
    place(&mut d, n2, g, x, &ad_xs, &one);
    place(&mut d, n2, g, g, &ad_cs, &one);
    let summands = vec![
        Summand::new(Kind::Antighost, Reality::Hermitian),
        Summand::new(Kind::Antifield, Reality::Hermitian),
        Summand::new(Kind::Field, Reality::Hermitian),
        Summand::new(Kind::Ghost, Reality::Hermitian),
    ];
    Ok(BVSpectralTriple {
        n,
        basis,
        f,
        summands,
        dirac: d,
    })
}

/// D_t = blockdiag(D_BV, D_aux) with D_aux = [[0, T], [T*, 0]], T = [[0, 0], [0, 2·Id]]
/// acting from R = (B, h) to R*[1] = (h*, B*).
pub fn build_total_triple(t: &BVSpectralTriple) -> TotalSpectralTriple {
    let n2 = t.n * t.n;
    let mut d = t.dirac.clone();
    d.dim = 8 * n2;
    let two = CPoly::real(Poly::int(2));
    let (bs, h) = (4 + 1, 4 + 3);
    for k in 0..n2 {
        d.add_entry(bs * n2 + k, h * n2 + k, two.clone());
        d.add_entry(h * n2 + k, bs * n2 + k, two.clone());
    }
    let mut summands = t.summands.clone();
    summands.extend([
        Summand::new(Kind::AuxHStar, Reality::Hermitian),
        Summand::new(Kind::AuxBStar, Reality::AntiHermitian),
        Summand::new(Kind::AuxB, Reality::AntiHermitian),
        Summand::new(Kind::AuxH, Reality::Hermitian),
    ]);
    TotalSpectralTriple {
        bv: t.clone(),
        summands,
        dirac: d,
    }
}

/// Hilbert-space vector: one n×n matrix (row-major) per summand.
pub type Vector = Vec<Vec<CPoly>>;

/// The generic effective vector: each summand is Σ_{a<n²} z_a e_a with e_a = σ_a/√2
/// or iσ_a/√2 according to the summand's reality.
pub fn generic_effective_vector<T: BlockTriple + ?Sized>(t: &T, basis: &GeneratorBasis) -> Vector {
    let n = t.n();
    let inv_sqrt2 = RadicalScalar::sqrt_rational(&rat(1, 2)).expect("positive");
    t.summands()
        .iter()
        .map(|s| {
            let phase = match s.reality {
                Reality::Hermitian => ComplexRadical::real(inv_sqrt2.clone()),
                Reality::AntiHermitian => {
                    ComplexRadical::new(RadicalScalar::zero(), inv_sqrt2.clone())
                }
            };
            (0..n * n)
                .map(|ij| {
                    let mut acc = CPoly::zero();
                    for a in 1..n * n {
                        let c = &basis.sigma(a).entries[ij] * &phase;
                        if !c.is_zero() {
                            acc = &acc + &CPoly::scaled(&c, &Poly::var(Var::new(s.kind, a as u16)));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Keeps only the summands selected by `keep`, zeroing the others.
pub fn mask_vector(v: &Vector, keep: impl Fn(usize) -> bool) -> Vector {
    v.iter()
        .enumerate()
        .map(|(b, comp)| {
            if keep(b) {
                comp.clone()
            } else {
                vec![CPoly::zero(); comp.len()]
            }
        })
        .collect()
}

pub fn zero_vector<T: BlockTriple + ?Sized>(t: &T) -> Vector {
    vec![vec![CPoly::zero(); t.n() * t.n()]; t.summands().len()]
}

/// J(φ) = i·φ† on every summand.
pub fn apply_j(n: usize, v: &Vector) -> Vector {
    v.iter()
        .map(|comp| {
            (0..n * n)
                .map(|ij| {
                    let (i, j) = (ij / n, ij % n);
                    comp[j * n + i].conj().times_i()
                })
                .collect()
        })
        .collect()
}

fn flatten(v: &Vector) -> Vec<CPoly> {
    v.iter().flatten().cloned().collect()
}

fn unflatten(flat: Vec<CPoly>, n2: usize) -> Vector {
    flat.chunks(n2).map(<[CPoly]>::to_vec).collect()
}

pub fn apply_operator(op: &Operator, n: usize, v: &Vector) -> Vector {
    unflatten(op.apply(&flatten(v)), n * n)
}

/// ⟨u, v⟩ = Σ_k conj(u_k)·v_k, the left slot's variables placed first.
pub fn inner(u: &Vector, v: &Vector) -> CPoly {
    let mut acc = CPoly::zero();
    for (a, b) in u.iter().flatten().zip(v.iter().flatten()) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(&a.conj() * b);
        }
    }
    acc
}

/// Checks J(v) = ±i·v summand-wise (+ for hermitian, − for anti-hermitian summands).
pub fn check_effective<T: BlockTriple + ?Sized>(t: &T, v: &Vector) -> Result<(), TripleError> {
    if v.len() != t.summands().len() {
        return Err(TripleError::WrongShape {
            got: v.len(),
            want: t.summands().len(),
        });
    }
    let jv = apply_j(t.n(), v);
    for ((s, comp), jcomp) in t.summands().iter().zip(v).zip(&jv) {
        for (x, jx) in comp.iter().zip(jcomp) {
            let want = match s.reality {
                Reality::Hermitian => x.times_i(),
                Reality::AntiHermitian => -&x.times_i(),
            };
            if *jx != want {
                return Err(TripleError::NotEffective(format!("{:?}", s.kind)));
            }
        }
    }
    Ok(())
}

/// S_ferm[v] = ½⟨J v, D v⟩.
pub fn fermionic_action<T: BlockTriple + ?Sized>(t: &T, v: &Vector) -> Result<Poly, TripleError> {
    check_effective(t, v)?;
    let jv = apply_j(t.n(), v);
    let dv = apply_operator(t.dirac(), t.n(), v);
    let z = inner(&jv, &dv);
    if !z.im.is_zero() {
        return Err(TripleError::NotReal);
    }
    Ok(z.re.scale(&RadicalScalar::from_rational(rat(1, 2))))
}

/// J X J = P·conj(X)·P.
pub fn j_conjugate(op: &Operator, n: usize) -> Operator {
    let n2 = n * n;
    let perm = |k: usize| {
        let (b, ij) = (k / n2, k % n2);
        b * n2 + (ij % n) * n + ij / n
    };
    let mut out = Operator::zero(op.dim);
    for (&(i, j), x) in op.entries() {
        out.add_entry(perm(i), perm(j), x.conj());
    }
    out
}

/// Left multiplication by a acting diagonally on every summand.
pub fn left_action(a: &CMatrix, summands: usize) -> Operator {
    let n = a.n;
    let n2 = n * n;
    let mut op = Operator::zero(summands * n2);
    for b in 0..summands {
        for i in 0..n {
            for k in 0..n {
                let z = a.get(i, k);
                if z.is_zero() {
                    continue;
                }
                for j in 0..n {
                    op.add_entry(b * n2 + i * n + j, b * n2 + k * n + j, CPoly::scalar(z));
                }
            }
        }
    }
    op
}

/// The matrix of ad(z) in the basis {σ_a}: entry (p, r) = tr(σ_p · ad(z)σ_r)/2.
pub fn ad_in_sigma_basis(basis: &GeneratorBasis, kind: Kind) -> Vec<Vec<CPoly>> {
    let n = basis.n;
    let m = n * n - 1;
    let ad = ad_block(basis, kind);
    let half = ComplexRadical::real(RadicalScalar::from_rational(rat(1, 2)));
    (1..=m)
        .map(|p| {
            (1..=m)
                .map(|r| {
                    let sr = &basis.sigma(r).entries;
                    let image: Vec<CPoly> = (0..n * n)
                        .map(|ij| {
                            let mut acc = CPoly::zero();
                            for (kl, s) in sr.iter().enumerate() {
                                if !s.is_zero() && !ad[ij][kl].is_zero() {
                                    acc = &acc + &(&ad[ij][kl] * &CPoly::scalar(s));
                                }
                            }
                            acc
                        })
                        .collect();
                    let sp = basis.sigma(p);
                    let mut tr = CPoly::zero();
                    for i in 0..n {
                        for k in 0..n {
                            let s = sp.get(i, k);
                            if !s.is_zero() {
                                tr = &tr + &(&CPoly::scalar(&(s * &half)) * &image[k * n + i]);
                            }
                        }
                    }
                    tr
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RealStructureReport {
    pub j_squared_identity: bool,
    pub self_adjoint: bool,
    /// Nonzero entries of J D_BV J + D_BV.
    pub ko_dim_residual_nnz: usize,
    /// J(D v) + D(J v) vanishes on the generic effective BV vector.
    pub effective_anticommutator_zero: bool,
    pub commutant_failures: usize,
    pub first_order_failures: usize,
    pub effective_rule_holds: bool,
    /// Total triple only: nonzero entries of J D_aux J − D_aux on bosonic summands.
    pub aux_commute_bosonic_nnz: Option<usize>,
    /// Total triple only: the same over all auxiliary summands (informational).
    pub aux_commute_all_nnz: Option<usize>,
    pub notes: Vec<String>,
}

impl RealStructureReport {
    pub fn ok(&self) -> bool {
        self.j_squared_identity
            && self.self_adjoint
            && self.ko_dim_residual_nnz == 0
            && self.effective_anticommutator_zero
            && self.commutant_failures == 0
            && self.first_order_failures == 0
            && self.effective_rule_holds
            && self.aux_commute_bosonic_nnz.unwrap_or(0) == 0
    }
}

fn j_squared_on_units<T: BlockTriple + ?Sized>(t: &T) -> bool {
    let n = t.n();
    let dim = t.dim();
    let n2 = n * n;
    (0..dim).all(|k| {
        [CPoly::real(Poly::one()), CPoly::real(Poly::one()).times_i()]
            .into_iter()
            .all(|e| {
                let mut v = zero_vector(t);
                v[k / n2][k % n2] = e;
                apply_j(n, &apply_j(n, &v)) == v
            })
    })
}

/// Verifies J² = Id, self-adjointness, J D = −D J on the BV block, the commutant and
/// first-order conditions for matrix units, and (total case) J D_aux = D_aux J.
pub fn check_real_structure<T: BlockTriple + ?Sized>(
    t: &T,
    basis: &GeneratorBasis,
) -> RealStructureReport {
    let n = t.n();
    let n2 = n * n;
    let d = t.dirac();
    let bv_dim = 4 * n2;
    let d_bv = d.restrict(|k| k < bv_dim);
    let ko = j_conjugate(&d_bv, n).add(&d_bv);

    let v = mask_vector(&generic_effective_vector(t, basis), |b| b < 4);
    let lhs = apply_j(n, &apply_operator(&d_bv, n, &v));
    let rhs = apply_operator(&d_bv, n, &apply_j(n, &v));
    let anti_zero = lhs
        .iter()
        .flatten()
        .zip(rhs.iter().flatten())
        .all(|(a, b)| (a + b).is_zero());

    let blocks = t.summands().len();
    let units: Vec<CMatrix> = (0..n)
        .flat_map(|i| (0..n).map(move |j| CMatrix::unit(n, i, j)))
        .collect();
    let mut commutant_failures = 0;
    let mut first_order_failures = 0;
    for a in &units {
        let la = left_action(a, blocks);
        let da = d.commutator(&la);
        for b in &units {
            let jbj = j_conjugate(&left_action(&b.dagger(), blocks), n);
            if !la.commutator(&jbj).is_zero() {
                commutant_failures += 1;
            }
            if !da.commutator(&jbj).is_zero() {
                first_order_failures += 1;
            }
        }
    }

    let (aux_bos, aux_all) = if blocks > 4 {
        let d_aux = d.restrict(|k| k >= bv_dim);
        let diff = j_conjugate(&d_aux, n).sub(&d_aux);
        let bosonic = |k: usize| t.summands()[k / n2].is_bosonic();
        (
            Some(diff.restrict(|k| k >= bv_dim && bosonic(k)).nnz()),
            Some(diff.nnz()),
        )
    } else {
        (None, None)
    };

    RealStructureReport {
        j_squared_identity: j_squared_on_units(t),
        self_adjoint: d.adjoint() == *d,
        ko_dim_residual_nnz: ko.nnz(),
        effective_anticommutator_zero: anti_zero,
        commutant_failures,
        first_order_failures,
        effective_rule_holds: check_effective(t, &generic_effective_vector(t, basis)).is_ok(),
        aux_commute_bosonic_nnz: aux_bos,
        aux_commute_all_nnz: aux_all,
        notes: vec!["the sign ε'' relating J and a grading is not checked".into()],
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BlockEntry {
    pub row: usize,
    pub col: usize,
    pub re: Poly,
    pub im: Poly,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TripleExport {
    pub n: usize,
    pub summands: Vec<Summand>,
    pub variables: Vec<crate::poly::VarInfo>,
    pub dirac: Vec<BlockEntry>,
    pub j_rule: String,
}

pub fn export_triple<T: BlockTriple + ?Sized>(t: &T) -> TripleExport {
    let n = t.n();
    let mut vars = crate::poly::bv_variables(n);
    if t.summands().len() > 4 {
        vars.extend(crate::poly::aux_variables(n));
    }
    TripleExport {
        n,
        summands: t.summands().to_vec(),
        variables: crate::poly::var_table(&vars),
        dirac: t
            .dirac()
            .entries()
            .map(|(&(row, col), z)| BlockEntry {
                row,
                col,
                re: z.re.clone(),
                im: z.im.clone(),
            })
            .collect(),
        j_rule: "J(phi) = i * phi^dagger on each summand".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(n: usize) -> BVSpectralTriple {
        build_bv_triple(&FiniteSpectralTriple::trivial(n).unwrap()).unwrap()
    }

    #[test]
    fn ad_entries_follow_structure_constants() {
        let t = bv(2);
        let m = ad_in_sigma_basis(&t.basis, Kind::Ghost);
        for p in 1..=3 {
            for r in 1..=3 {
                // −Σ_q i f_pqr C_q
                let mut want = Poly::zero();
                for q in 1..=3 {
                    want += &Poly::var(Var::c(q as u16)).scale(&t.f.get(p, q, r));
                }
                assert_eq!(
                    m[p - 1][r - 1],
                    CPoly {
                        re: Poly::zero(),
                        im: -want
                    }
                );
            }
        }
    }

    #[test]
    fn j_squared_on_e12() {
        let t = bv(2);
        let mut v = zero_vector(&t);
        v[2][1] = CPoly::real(Poly::one());
        let jv = apply_j(2, &v);
        assert_eq!(jv[2][2], CPoly::real(Poly::one()).times_i());
        assert_eq!(apply_j(2, &jv), v);
    }

    #[test]
    fn zero_vector_action() {
        let t = bv(2);
        assert!(fermionic_action(&t, &zero_vector(&t)).unwrap().is_zero());
    }

    #[test]
    fn non_effective_rejected() {
        let t = bv(2);
        let mut v = zero_vector(&t);
        v[2][1] = CPoly::real(Poly::var(Var::x(1)));
        assert!(matches!(
            fermionic_action(&t, &v),
            Err(TripleError::NotEffective(_))
        ));
    }

    #[test]
    fn d0_must_be_hermitian() {
        let mut d0 = CMatrix::zero(2);
        d0.set(0, 1, ComplexRadical::one());
        assert_eq!(
            FiniteSpectralTriple::new(2, d0),
            Err(TripleError::NotHermitian(2))
        );
    }

    #[test]
    fn total_triple_acts_blockwise() {
        let t = bv(2);
        let tt = build_total_triple(&t);
        let v = mask_vector(&generic_effective_vector(&tt, &t.basis), |b| b < 4);
        let dv = apply_operator(&tt.dirac, 2, &v);
        let dv_bv = apply_operator(&t.dirac, 2, &v[..4].to_vec());
        assert_eq!(dv[..4].to_vec(), dv_bv);
        assert!(dv[4..].iter().flatten().all(CPoly::is_zero));
    }
}
