//! The coalgebra/comodule pair attached to an action and its graded Hochschild complex.
//!
//! Cochains in M ⊗ T^p(B) are kept in graded-symmetric normal form: a map from a
//! ghost-sector word y_1⋯y_p (a normal-ordered monomial without x variables) to its
//! coefficient in M, a polynomial in the x variables only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bv::{gauge_fix_poly, GaugeFixingFermion};
use crate::complexes::{basis_by_degree, cochain_basis};
use crate::exec;
use crate::linalg::{rank, Mode, SparseMatrix};
use crate::poly::{antibracket, aux_variables, bv_variables, Kind, Monomial, Poly, Var};
use crate::scalars::RadicalScalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PairKind {
    /// (B, M) from S̃.
    Bv,
    /// (B_t, M_t) from S_t, auxiliary generators included.
    Total,
    /// (B_Ψ, M_Ψ): the ghost sector of the total pair with brackets evaluated at Ψ.
    GaugeFixed(GaugeFixingFermion),
}

/// A 1-shifted graded coalgebra B together with its degree-1 comodule M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub kind: PairKind,
    pub n: usize,
    pub action: Poly,
    /// Upper bound on the polynomial degree of a B_0 factor.
    pub b0_bound: u32,
    /// The x variables generating M.
    pub fields: Vec<Var>,
    /// Non-field generators of B.
    pub generators: Vec<Var>,
    /// Δ(y) for every generator y.
    pub coproduct: BTreeMap<Var, Poly>,
    /// ω_R(x_i) for every field.
    pub coaction: BTreeMap<Var, Poly>,
}

impl Pair {
    /// `s0_degree` is the polynomial degree of S_0, which fixes the B_0 truncation.
    pub fn build(kind: PairKind, n: usize, action: Poly, s0_degree: u32) -> Self {
        let mut vars = bv_variables(n);
        if !matches!(kind, PairKind::Bv) {
            vars.extend(aux_variables(n));
        }
        if matches!(kind, PairKind::GaugeFixed(_)) {
            vars.retain(|v| !v.is_starred());
        }
        let (fields, generators): (Vec<Var>, Vec<Var>) =
            vars.into_iter().partition(|v| v.kind == Kind::Field);
        let mut pair = Pair {
            kind,
            n,
            action,
            b0_bound: s0_degree.saturating_sub(1).max(1),
            fields,
            generators,
            coproduct: BTreeMap::new(),
            coaction: BTreeMap::new(),
        };
        let delta: Vec<Poly> = exec::map(&pair.generators, |&y| pair.bracket(&Poly::var(y)));
        pair.coproduct = pair.generators.iter().copied().zip(delta).collect();
        let omega: Vec<Poly> = exec::map(&pair.fields, |&x| pair.bracket(&Poly::var(x)));
        pair.coaction = pair.fields.iter().copied().zip(omega).collect();
        pair
    }

    /// The complex differential computed directly: {S, p}, evaluated at Ψ in the gauge-fixed case.
    pub fn bracket(&self, p: &Poly) -> Poly {
        let b = antibracket(&self.action, p);
        match &self.kind {
            PairKind::GaugeFixed(psi) => gauge_fix_poly(&b, psi),
            _ => b,
        }
    }

    /// All variables of the cochain algebra.
    pub fn variables(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self
            .fields
            .iter()
            .chain(&self.generators)
            .copied()
            .collect();
        v.sort();
        v
    }

    fn table(&self, v: Var) -> &Poly {
        if v.kind == Kind::Field {
            &self.coaction[&v]
        } else {
            &self.coproduct[&v]
        }
    }

    /// The degree-1 derivation determined by the Δ and ω tables, applied to a polynomial.
    pub fn derivation(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let factors = m.expanded();
            let mut prefix = Poly::one();
            let mut degree = 0;
            for (j, &y) in factors.iter().enumerate() {
                let suffix = Monomial::from_factors(&collect(&factors[j + 1..]))
                    .map(|(s, sign)| Poly::term(s, RadicalScalar::from_int(sign as i64)))
                    .unwrap_or_else(Poly::zero);
                let mut t = &(&prefix * self.table(y)) * &suffix;
                if degree % 2 != 0 {
                    t = -t;
                }
                out += &t.scale(c);
                prefix = &prefix * &Poly::var(y);
                degree += y.ghost_degree();
            }
        }
        out
    }

    /// JSON-friendly copy of the Δ and ω tables keyed by generator name.
    pub fn tables(&self) -> PairTables {
        let key =
            |m: &BTreeMap<Var, Poly>| m.iter().map(|(v, p)| (v.to_string(), p.clone())).collect();
        PairTables {
            coproduct: key(&self.coproduct),
            coaction: key(&self.coaction),
        }
    }
}

fn collect(vars: &[Var]) -> Vec<(Var, u32)> {
    let mut out: Vec<(Var, u32)> = Vec::new();
    for &v in vars {
        match out.last_mut() {
            Some((w, e)) if *w == v => *e += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTables {
    pub coproduct: BTreeMap<String, Poly>,
    pub coaction: BTreeMap<String, Poly>,
}

/// An element of M ⊗ T^p(B) in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HochschildCochain {
    #[serde(with = "word_list")]
    pub terms: BTreeMap<Monomial, Poly>,
}

mod word_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        word: Monomial,
        coeff: Poly,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Monomial, Poly>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m
            .iter()
            .map(|(w, c)| Entry {
                word: w.clone(),
                coeff: c.clone(),
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Monomial, Poly>, D::Error> {
        Ok(Vec::<Entry>::deserialize(d)?
            .into_iter()
            .map(|e| (e.word, e.coeff))
            .collect())
    }
}

impl HochschildCochain {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Ghost degree p, if homogeneous.
    pub fn ghost_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(Monomial::ghost_degree);
        let first = it.next().unwrap_or(0);
        it.all(|d| d == first).then_some(first)
    }

    fn add(&mut self, word: Monomial, coeff: Poly) {
        let slot = self.terms.entry(word.clone()).or_default();
        *slot = &*slot + &coeff;
        if slot.is_zero() {
            self.terms.remove(&word);
        }
    }
}

/// Φ: regroups each term f·D_1⋯D_p as f ⊗ y_1 ⊗ ⋯ ⊗ y_p.
pub fn phi(p: &Poly) -> HochschildCochain {
    let mut out = HochschildCochain::zero();
    for (m, c) in p.terms() {
        let (f, word) = m.split_fields();
        out.add(word, Poly::term(f, c.clone()));
    }
    out
}

pub fn phi_inv(c: &HochschildCochain) -> Poly {
    c.terms
        .iter()
        .map(|(w, f)| f * &Poly::term(w.clone(), RadicalScalar::one()))
        .sum()
}

/// ω_R(f) for f ∈ M, via ω_R(f) = Σ_i ω_R(x_i)·∂f/∂x_i.
pub fn coaction(pair: &Pair, f: &Poly) -> Poly {
    pair.fields
        .iter()
        .map(|&x| {
            let d = f.left_derivative(x);
            if d.is_zero() {
                Poly::zero()
            } else {
                &pair.coaction[&x] * &d
            }
        })
        .sum()
}

/// d_{H,Δ}(f ⊗ y_1 ⊗ ⋯ ⊗ y_k) = ω_R(f) ⊗ y_1 ⊗ ⋯ ⊗ y_k
///   + Σ_j (−1)^{|y_1|+⋯+|y_{j−1}|} f ⊗ y_1 ⊗ ⋯ ⊗ Δ(y_j) ⊗ ⋯ ⊗ y_k.
pub fn hochschild_coboundary(c: &HochschildCochain, pair: &Pair) -> HochschildCochain {
    let mut total = Poly::zero();
    for (word, f) in &c.terms {
        let w = Poly::term(word.clone(), RadicalScalar::one());
        total += &(&coaction(pair, f) * &w);
        let ys = word.expanded();
        let mut sign_degree = 0;
        for j in 0..ys.len() {
            let before = Monomial::from_factors(&collect(&ys[..j]))
                .expect("sub-word of a normal word")
                .0;
            let after = Monomial::from_factors(&collect(&ys[j + 1..]))
                .expect("sub-word of a normal word")
                .0;
            let inserted = &(&Poly::term(before, RadicalScalar::one()) * &pair.coproduct[&ys[j]])
                * &Poly::term(after, RadicalScalar::one());
            let mut t = f * &inserted;
            if sign_degree % 2 != 0 {
                t = -t;
            }
            total += &t;
            sign_degree += ys[j].ghost_degree();
        }
    }
    phi(&total)
}

/// One tensor factor of a coproduct term: an x-monomial counts as a single B_0 element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitTerm {
    pub coeff: RadicalScalar,
    pub left: Monomial,
    pub right: Monomial,
}

/// Splits each term of Δ(y) into z⁽¹⁾ ⊗ z⁽²⁾; returns None if some term has more than two factors.
pub fn split_coproduct(delta: &Poly) -> Option<Vec<SplitTerm>> {
    let mut out = Vec::new();
    for (m, c) in delta.terms() {
        let (f, rest) = m.split_fields();
        let mut factors: Vec<Monomial> = Vec::new();
        if !f.is_one() {
            factors.push(f);
        }
        factors.extend(rest.expanded().into_iter().map(Monomial::var));
        let (left, right) = match factors.len() {
            0 => (Monomial::one(), Monomial::one()),
            1 => (factors[0].clone(), Monomial::one()),
            2 => (factors[0].clone(), factors[1].clone()),
            _ => return None,
        };
        out.push(SplitTerm {
            coeff: c.clone(),
            left,
            right,
        });
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorAudit {
    pub generator: String,
    pub degree: i32,
    pub degree_rule: bool,
    pub coassociativity_residual: Poly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalgebraReport {
    pub generators: Vec<GeneratorAudit>,
    /// Σ ω(m) ⊗ b and Σ m ⊗ Δ(b) compared on each monomial of B_0.
    pub comodule_in_b1: bool,
    /// Sign s with (ω⊗id)∘ω = s·(id⊗Δ)∘ω on every tested element, if one exists.
    pub comodule_sign: Option<i32>,
}

impl CoalgebraReport {
    pub fn ok(&self) -> bool {
        self.comodule_in_b1
            && self.comodule_sign == Some(-1)
            && self
                .generators
                .iter()
                .all(|g| g.degree_rule && g.coassociativity_residual.is_zero())
    }
}

fn degree_rule(pair: &Pair, y: Var, delta: &Poly) -> bool {
    let Some(split) = split_coproduct(delta) else {
        return false;
    };
    split.iter().all(|t| {
        let ok_b0 = |m: &Monomial| {
            m.ghost_degree() != 0
                || m.factors().iter().any(|(v, _)| v.kind != Kind::Field)
                || m.poly_degree() <= pair.b0_bound
        };
        t.left.ghost_degree() + t.right.ghost_degree() == y.ghost_degree() + 1
            && ok_b0(&t.left)
            && ok_b0(&t.right)
    })
}

/// Σ c [Δ(z⁽¹⁾) z⁽²⁾ + (−1)^{|z⁽¹⁾|} z⁽¹⁾ Δ(z⁽²⁾)], Δ extended to products by the Leibniz rule.
fn coassociativity_residual(pair: &Pair, delta: &Poly) -> Poly {
    let Some(split) = split_coproduct(delta) else {
        return delta.clone();
    };
    let mut out = Poly::zero();
    for t in split {
        let z1 = Poly::term(t.left.clone(), RadicalScalar::one());
        let z2 = Poly::term(t.right.clone(), RadicalScalar::one());
        let mut second = &z1 * &pair.derivation(&z2);
        if t.left.ghost_degree() % 2 != 0 {
            second = -second;
        }
        out += &(&(&pair.derivation(&z1) * &z2) + &second).scale(&t.coeff);
    }
    out
}

pub fn check_coalgebra_axioms(pair: &Pair) -> CoalgebraReport {
    let generators = exec::map(&pair.generators, |&y| {
        let delta = &pair.coproduct[&y];
        GeneratorAudit {
            generator: y.to_string(),
            degree: y.ghost_degree(),
            degree_rule: degree_rule(pair, y, delta),
            coassociativity_residual: coassociativity_residual(pair, delta),
        }
    });
    let b0: Vec<Monomial> = cochain_basis(&pair.fields, 0, pair.b0_bound);
    let mut in_b1 = true;
    let mut plus = true;
    let mut minus = true;
    for m in &b0 {
        let omega = coaction(pair, &Poly::term(m.clone(), RadicalScalar::one()));
        in_b1 &= omega.terms().all(|(t, _)| {
            let (_, rest) = t.split_fields();
            rest.poly_degree() == 1 && rest.ghost_degree() == 1
        });
        let mut lhs = Poly::zero();
        let mut rhs = Poly::zero();
        for (word, f) in &phi(&omega).terms {
            let b = Poly::term(word.clone(), RadicalScalar::one());
            lhs += &(&coaction(pair, f) * &b);
            rhs += &(f * &pair.derivation(&b));
        }
        plus &= (&lhs - &rhs).is_zero();
        minus &= (&lhs + &rhs).is_zero();
    }
    let comodule_sign = if minus {
        Some(-1)
    } else if plus {
        Some(1)
    } else {
        None
    };
    CoalgebraReport {
        generators,
        comodule_in_b1: in_b1,
        comodule_sign,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMismatch {
    pub input: Poly,
    pub via_bracket: HochschildCochain,
    pub via_hochschild: HochschildCochain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiSquareReport {
    pub checked: usize,
    pub mismatches: Vec<SquareMismatch>,
}

impl PhiSquareReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares Φ(d φ) with d_{H,Δ}(Φ φ) on every generator and every sample element.
pub fn check_phi_square(pair: &Pair, sample: &[Poly]) -> PhiSquareReport {
    let mut inputs: Vec<Poly> = pair.variables().into_iter().map(Poly::var).collect();
    inputs.extend(sample.iter().cloned());
    let results = exec::map(&inputs, |p| {
        let a = phi(&pair.bracket(p));
        let b = hochschild_coboundary(&phi(p), pair);
        (a != b).then(|| SquareMismatch {
            input: p.clone(),
            via_bracket: a,
            via_hochschild: b,
        })
    });
    PhiSquareReport {
        checked: inputs.len(),
        mismatches: results.into_iter().flatten().collect(),
    }
}

/// Basis of M ⊗ T^k(B) truncated at total polynomial degree d, as (word, x-monomial) pairs.
pub fn hochschild_basis(pair: &Pair, k: i32, d: u32) -> Vec<(Monomial, Monomial)> {
    let words = basis_by_degree(&pair.generators, d)
        .remove(&k)
        .unwrap_or_default();
    let coeffs = basis_by_degree(&pair.fields, d)
        .remove(&0)
        .unwrap_or_default();
    let mut out = Vec::new();
    for w in &words {
        for f in &coeffs {
            if w.poly_degree() + f.poly_degree() <= d {
                out.push((w.clone(), f.clone()));
            }
        }
    }
    out
}

fn basis_element(w: &Monomial, f: &Monomial) -> HochschildCochain {
    let mut c = HochschildCochain::zero();
    c.add(w.clone(), Poly::term(f.clone(), RadicalScalar::one()));
    c
}

/// Checks d_{H,Δ}² = 0 on every basis element of degrees kmin..=kmax up to polynomial degree d.
/// Returns the basis elements on which it fails.
pub fn check_d_squared(
    pair: &Pair,
    kmin: i32,
    kmax: i32,
    d: u32,
) -> (usize, Vec<(Monomial, Monomial)>) {
    let basis: Vec<(Monomial, Monomial)> = (kmin..=kmax)
        .flat_map(|k| hochschild_basis(pair, k, d))
        .collect();
    let failures = exec::map(&basis, |(w, f)| {
        let c = basis_element(w, f);
        let dd = hochschild_coboundary(&hochschild_coboundary(&c, pair), pair);
        (!dd.is_zero()).then(|| (w.clone(), f.clone()))
    });
    (basis.len(), failures.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyCell {
    pub k: i32,
    pub d: u32,
    pub hochschild_dim: usize,
    pub bv_dim: usize,
    /// Φ⁻¹ maps the Hochschild basis onto the monomial basis.
    pub bijective: bool,
    pub hochschild_rank: usize,
    pub bv_rank: usize,
}

impl ConjugacyCell {
    pub fn ok(&self) -> bool {
        self.bijective && self.hochschild_dim == self.bv_dim && self.hochschild_rank == self.bv_rank
    }
}

/// Builds the degree-k coboundary matrix on both sides and compares dimensions and ranks.
pub fn conjugacy_cell(pair: &Pair, k: i32, d: u32, increment: u32, mode: Mode) -> ConjugacyCell {
    let vars = pair.variables();
    let bv_dom = cochain_basis(&vars, k, d);
    let bv_cod = cochain_basis(&vars, k + 1, d + increment);
    let h_dom = hochschild_basis(pair, k, d);
    let h_cod = hochschild_basis(pair, k + 1, d + increment);

    let as_mono = |(w, f): &(Monomial, Monomial)| {
        f.mul(w).map(|(m, s)| (m, s == 1)).expect("fields are even")
    };
    let mapped: Vec<Monomial> = h_dom.iter().map(|e| as_mono(e).0).collect();
    let mut sorted = mapped.clone();
    sorted.sort();
    sorted.dedup();
    let mut bv_sorted = bv_dom.clone();
    bv_sorted.sort();
    let bijective =
        sorted.len() == mapped.len() && sorted == bv_sorted && h_dom.iter().all(|e| as_mono(e).1);

    let bv_matrix =
        crate::complexes::coboundary_matrix(&|p: &Poly| pair.bracket(p), &bv_dom, &bv_cod);
    let index: BTreeMap<(Monomial, Monomial), usize> = h_cod
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let columns = exec::map(&h_dom, |(w, f)| {
        let image = hochschild_coboundary(&basis_element(w, f), pair);
        let mut col = BTreeMap::new();
        let mut overflow = false;
        for (word, coeff) in &image.terms {
            for (m, c) in coeff.terms() {
                match index.get(&(word.clone(), m.clone())) {
                    Some(&i) => {
                        col.insert(i, c.clone());
                    }
                    None => overflow = true,
                }
            }
        }
        (col, overflow)
    });
    let overflow = columns.iter().any(|(_, o)| *o);
    let h_matrix =
        SparseMatrix::from_columns(h_cod.len(), columns.into_iter().map(|(c, _)| c).collect());
    let bv_rank = bv_matrix
        .as_ref()
        .map(|m| rank(m, mode).rank)
        .unwrap_or(usize::MAX);
    let hochschild_rank = if overflow {
        usize::MAX
    } else {
        rank(&h_matrix, mode).rank
    };
    ConjugacyCell {
        k,
        d,
        hochschild_dim: h_dom.len(),
        bv_dim: bv_dom.len(),
        bijective,
        hochschild_rank,
        bv_rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv::{casimir_action, extended_action, ghost_terms_closed_form, total_action};
    use crate::scalars::rat;
    use crate::triples::{build_bv_triple, build_total_triple, FiniteSpectralTriple};

    fn bv_pair(n: usize) -> Pair {
        let t = build_bv_triple(&FiniteSpectralTriple::trivial(n).unwrap()).unwrap();
        let s0 = casimir_action(n, &[vec![], vec![rat(1, 1)]]);
        Pair::build(PairKind::Bv, n, extended_action(&t, &s0).unwrap().body, 2)
    }

    #[test]
    fn coproduct_of_ghost() {
        let pair = bv_pair(2);
        let d = &pair.coproduct[&Var::c(3)];
        // ½ Σ ε_pq3 C_p C_q = C_1 C_2
        assert_eq!(
            *d,
            Poly::product(RadicalScalar::one(), &[Var::c(1), Var::c(2)])
        );
        assert!(check_coalgebra_axioms(&pair).ok());
    }

    #[test]
    fn single_factor_rule() {
        let pair = bv_pair(2);
        let c = phi(&Poly::product(
            RadicalScalar::one(),
            &[Var::x(1), Var::c(2)],
        ));
        let got = hochschild_coboundary(&c, &pair);
        let f = Poly::var(Var::x(1));
        let want =
            &(&coaction(&pair, &f) * &Poly::var(Var::c(2))) + &(&f * &pair.coproduct[&Var::c(2)]);
        assert_eq!(got, phi(&want));
        assert!(hochschild_coboundary(&phi(&Poly::one()), &pair).is_zero());
    }

    #[test]
    fn squares_commute_on_products() {
        let pair = bv_pair(2);
        let sample = [
            Poly::product(RadicalScalar::one(), &[Var::c(1), Var::c(2)]),
            Poly::product(RadicalScalar::one(), &[Var::x(1), Var::xs(2), Var::cs(3)]),
            Poly::var(Var::xs(1)).pow(1),
        ];
        assert!(check_phi_square(&pair, &sample).ok());
    }

    #[test]
    fn dropped_half_breaks_coassociativity() {
        let pair = bv_pair(2);
        let mut broken = pair.action.clone();
        broken += &ghost_terms_closed_form(&pair_f(2))
            .filter(|m| m.contains(Var::cs(1)) || m.contains(Var::cs(2)) || m.contains(Var::cs(3)));
        let bad = Pair::build(PairKind::Bv, 2, broken, 2);
        let report = check_coalgebra_axioms(&bad);
        assert!(report
            .generators
            .iter()
            .any(|g| !g.coassociativity_residual.is_zero()));
    }

    fn pair_f(n: usize) -> crate::lie::StructureConstants {
        crate::lie::structure_constants(&crate::lie::gellmann_basis(n).unwrap()).unwrap()
    }

    #[test]
    fn total_and_gauge_fixed_pairs() {
        let t = build_bv_triple(&FiniteSpectralTriple::trivial(2).unwrap()).unwrap();
        let tt = build_total_triple(&t);
        let s0 = casimir_action(2, &[vec![], vec![rat(1, 1)]]);
        let st = total_action(&extended_action(&t, &s0).unwrap(), &tt).unwrap();
        let total = Pair::build(PairKind::Total, 2, st.body.clone(), 2);
        assert!(check_coalgebra_axioms(&total).ok());
        let gf = Pair::build(
            PairKind::GaugeFixed(GaugeFixingFermion::standard(2)),
            2,
            st.body,
            2,
        );
        assert!(gf.generators.iter().all(|v| !v.is_starred()));
        assert!(check_phi_square(&gf, &[]).ok());
    }

    #[test]
    fn bases_are_in_bijection() {
        let pair = bv_pair(2);
        for k in -2..=2 {
            let cell = conjugacy_cell(&pair, k, 2, 1, Mode::Exact);
            assert!(cell.ok(), "{cell:?}");
        }
    }
}
