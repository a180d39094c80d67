//! Actions and the BV pipeline: spectral and Casimir actions, the extended and total
//! actions, master equations, auxiliary-field degrees, gauge fixing and BRST.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::complexes::cochain_basis;
use crate::lie::StructureConstants;
use crate::linalg::{in_column_span, Mode, SparseMatrix};
use crate::poly::{antibracket, bv_laplacian, Kind, Monomial, Poly, Var};
use crate::scalars::{rat, ComplexRadical, RadicalScalar};
use crate::triples::{
    fermionic_action, generic_effective_vector, mask_vector, BVSpectralTriple, CPoly,
    FiniteSpectralTriple, TotalSpectralTriple, TripleError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BvError {
    #[error("S_0 is not gauge invariant; residual {0}")]
    NotInvariant(Poly),
    #[error("malformed gauge-fixing fermion: {0}")]
    MalformedFermion(String),
    #[error("input contains starred variables")]
    StarredInput,
    #[error("action has nonzero ghost degree")]
    NotDegreeZero,
    #[error(transparent)]
    Triple(#[from] TripleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionKind {
    Classical,
    Extended,
    Total,
    GaugeFixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    pub body: Poly,
}

impl Action {
    pub fn new(kind: ActionKind, body: Poly) -> Result<Self, BvError> {
        if body.terms().any(|(m, _)| m.ghost_degree() != 0) {
            return Err(BvError::NotDegreeZero);
        }
        Ok(Self { kind, body })
    }
}

/// tr f(D0 + Σ_{a≤n²} x_a σ_a) for f = Σ_k coeffs[k]·t^k.
pub fn spectral_action(base: &FiniteSpectralTriple, coeffs: &[BigRational]) -> Action {
    let n = base.n;
    let basis = crate::lie::gellmann_basis(n).expect("n ≥ 2 is enforced by the triple");
    let mut m: Vec<CPoly> = base.d0.entries.iter().map(CPoly::scalar).collect();
    for a in 1..=n * n {
        for (ij, s) in basis.sigma(a).entries.iter().enumerate() {
            if !s.is_zero() {
                m[ij] = &m[ij] + &CPoly::scaled(s, &Poly::var(Var::x(a as u16)));
            }
        }
    }
    let matmul = |a: &[CPoly], b: &[CPoly]| -> Vec<CPoly> {
        let mut out = vec![CPoly::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                if a[i * n + k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = &out[i * n + j] + &(&a[i * n + k] * &b[k * n + j]);
                }
            }
        }
        out
    };
    let mut power: Vec<CPoly> = (0..n * n)
        .map(|ij| {
            if ij % (n + 1) == 0 {
                CPoly::real(Poly::one())
            } else {
                CPoly::zero()
            }
        })
        .collect();
    let mut total = Poly::zero();
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            power = matmul(&power, &m);
        }
        if c.is_zero() {
            continue;
        }
        let tr = (0..n).fold(Poly::zero(), |acc, i| &acc + &power[i * n + i].re);
        total += &tr.scale_rational(c);
    }
    Action {
        kind: ActionKind::Classical,
        body: total,
    }
}

/// Σ_k (x_1² + … + x_{n²−1}²)^k · g_k(x_{n²}), with g[k] the coefficients of g_k.
pub fn casimir_action(n: usize, g: &[Vec<BigRational>]) -> Action {
    let last = Var::x((n * n) as u16);
    let casimir: Poly = (1..n * n).map(|a| Poly::var(Var::x(a as u16)).pow(2)).sum();
    let mut total = Poly::zero();
    for (k, gk) in g.iter().enumerate() {
        let gpoly: Poly = gk
            .iter()
            .enumerate()
            .map(|(e, c)| Poly::var(last).pow(e as u32).scale_rational(c))
            .sum();
        total += &(&casimir.pow(k as u32) * &gpoly);
    }
    Action {
        kind: ActionKind::Classical,
        body: total,
    }
}

/// Σ_r (Σ_pq f_pqr ∂_p S_0 x_q) C_r.
pub fn gauge_invariance_residual(f: &StructureConstants, s0: &Poly) -> Poly {
    let m = f.dim();
    let derivs: Vec<Poly> = (1..=m)
        .map(|p| s0.left_derivative(Var::x(p as u16)))
        .collect();
    let mut out = Poly::zero();
    for ((p, q, r), c) in f.entries() {
        if derivs[p - 1].is_zero() {
            continue;
        }
        let term = &(&derivs[p - 1] * &Poly::var(Var::x(q as u16))) * &Poly::var(Var::c(r as u16));
        out += &term.scale(c);
    }
    out
}

/// Σ_pqr f_pqr (x*_p x_q C_r + ½ C*_p C_q C_r).
pub fn ghost_terms_closed_form(f: &StructureConstants) -> Poly {
    let half = RadicalScalar::from_rational(rat(1, 2));
    let mut out = Poly::zero();
    for ((p, q, r), c) in f.entries() {
        let (p, q, r) = (p as u16, q as u16, r as u16);
        out += &Poly::product(c.clone(), &[Var::xs(p), Var::x(q), Var::c(r)]);
        out += &Poly::product(c * &half, &[Var::cs(p), Var::c(q), Var::c(r)]);
    }
    out
}

/// S̃ = S_0 + ½·S_ferm on the generic effective vector.
pub fn extended_action(t: &BVSpectralTriple, s0: &Action) -> Result<Action, BvError> {
    let residual = gauge_invariance_residual(&t.f, &s0.body);
    if !residual.is_zero() {
        return Err(BvError::NotInvariant(residual));
    }
    let v = generic_effective_vector(t, &t.basis);
    let ferm = fermionic_action(t, &v)?;
    let body = &s0.body + &ferm.scale(&RadicalScalar::from_rational(rat(1, 2)));
    Action::new(ActionKind::Extended, body)
}

/// S_0 + the closed-form ghost terms, for cross-checking [`extended_action`].
pub fn extended_action_closed_form(f: &StructureConstants, s0: &Action) -> Action {
    Action {
        kind: ActionKind::Extended,
        body: &s0.body + &ghost_terms_closed_form(f),
    }
}

/// {S, S}; the zero polynomial means the classical master equation holds.
pub fn check_cme(s: &Action) -> Poly {
    antibracket(&s.body, &s.body)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QmeReport {
    /// Residual at each power of (−iħ), starting from the zeroth.
    pub orders: Vec<Poly>,
}

impl QmeReport {
    pub fn ok(&self) -> bool {
        self.orders.iter().all(Poly::is_zero)
    }
}

/// Order-k residual of ½{S_q,S_q} − iħΔS_q for S_q = Σ_k (−iħ)^k s[k]:
/// ½ Σ_{a+b=k} {s_a, s_b} + Δ s_{k−1}.
pub fn check_qme(s: &[Poly]) -> QmeReport {
    if s.is_empty() {
        return QmeReport { orders: Vec::new() };
    }
    let top = (2 * (s.len() - 1)).max(s.len());
    let half = RadicalScalar::from_rational(rat(1, 2));
    let orders = (0..=top)
        .map(|k| {
            let mut acc = Poly::zero();
            for a in 0..=k.min(s.len() - 1) {
                let b = k - a;
                if b < s.len() {
                    acc += &antibracket(&s[a], &s[b]).scale(&half);
                }
            }
            if k >= 1 && k - 1 < s.len() {
                acc += &bv_laplacian(&s[k - 1]);
            }
            acc
        })
        .collect();
    QmeReport { orders }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxFamily {
    pub i: u32,
    pub j: u32,
    pub deg_b: i32,
    pub deg_h: i32,
}

/// Degrees of the auxiliary pairs B_i^j, h_i^j for reducibility level L.
pub fn auxiliary_spectrum(level: u32) -> Vec<AuxFamily> {
    let mut out = Vec::new();
    for i in 0..=level {
        for j in 1..=i + 1 {
            let (ii, jj) = (i as i32, j as i32);
            let deg_b = if j % 2 == 1 { jj - ii - 2 } else { ii - jj + 1 };
            out.push(AuxFamily {
                i,
                j,
                deg_b,
                deg_h: deg_b + 1,
            });
        }
    }
    out
}

/// Σ_q B*_q h_q, obtained from the auxiliary block of the total triple.
pub fn auxiliary_action(t: &TotalSpectralTriple) -> Result<Poly, BvError> {
    let v = mask_vector(&generic_effective_vector(t, &t.bv.basis), |b| b >= 4);
    Ok(fermionic_action(t, &v)?.scale(&RadicalScalar::from_rational(rat(1, 2))))
}

/// S_t = S̃ + S_aux.
pub fn total_action(extended: &Action, t: &TotalSpectralTriple) -> Result<Action, BvError> {
    Action::new(ActionKind::Total, &extended.body + &auxiliary_action(t)?)
}

/// A degree −1 function of unstarred variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeFixingFermion {
    pub body: Poly,
}

impl GaugeFixingFermion {
    pub fn new(body: Poly) -> Result<Self, BvError> {
        if body.has_starred() {
            return Err(BvError::MalformedFermion(
                "contains starred variables".into(),
            ));
        }
        if body.terms().any(|(m, _)| m.ghost_degree() != -1) {
            return Err(BvError::MalformedFermion(
                "every term must have ghost degree −1".into(),
            ));
        }
        Ok(Self { body })
    }

    /// Σ_q B_q x_q for q = 1..n²−1.
    pub fn standard(n: usize) -> Self {
        let body = (1..n * n)
            .map(|q| Poly::product(RadicalScalar::one(), &[Var::b(q as u16), Var::x(q as u16)]))
            .sum();
        Self { body }
    }
}

fn substitution_map(vars: &BTreeSet<Var>, psi: &GaugeFixingFermion) -> BTreeMap<Var, Poly> {
    vars.iter()
        .filter(|v| v.is_starred())
        .map(|&v| (v, psi.body.left_derivative(v.partner())))
        .collect()
}

/// Replaces every starred φ* by ∂_L Ψ/∂φ, all derivatives taken before substituting.
pub fn gauge_fix_poly(p: &Poly, psi: &GaugeFixingFermion) -> Poly {
    p.substitute(&substitution_map(&p.vars(), psi))
}

pub fn gauge_fix(s: &Action, psi: &GaugeFixingFermion) -> Result<Action, BvError> {
    let psi = GaugeFixingFermion::new(psi.body.clone())?;
    Action::new(ActionKind::GaugeFixed, gauge_fix_poly(&s.body, &psi))
}

/// ({S_t, c})|_Ψ for c free of starred variables.
pub fn brst_differential(s: &Action, psi: &GaugeFixingFermion, c: &Poly) -> Result<Poly, BvError> {
    if c.has_starred() {
        return Err(BvError::StarredInput);
    }
    Ok(gauge_fix_poly(&antibracket(&s.body, c), psi))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EomMembership {
    pub residual: Poly,
    pub in_span: bool,
    /// Number of spanning products ∂_v S · m used in the solve.
    pub columns: usize,
    pub multiplier_degree: u32,
}

/// Tests whether `residual` lies in the span of {∂_L S/∂v · m} with m ranging over
/// monomials of polynomial degree ≤ `multiplier_degree` of matching ghost degree.
pub fn eom_membership(
    gauge_fixed: &Poly,
    residual: &Poly,
    multiplier_degree: u32,
) -> EomMembership {
    let done = |in_span, columns| EomMembership {
        residual: residual.clone(),
        in_span,
        columns,
        multiplier_degree,
    };
    if residual.is_zero() {
        return done(true, 0);
    }
    let Some(deg) = residual.ghost_degree() else {
        return done(false, 0);
    };
    let vars: Vec<Var> = gauge_fixed
        .vars()
        .into_iter()
        .chain(residual.vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut products = Vec::new();
    for &v in &vars {
        let g = gauge_fixed.left_derivative(v);
        if g.is_zero() {
            continue;
        }
        let want = deg + v.ghost_degree();
        for m in cochain_basis(&vars, want, multiplier_degree) {
            products.push(&g * &Poly::term(m, RadicalScalar::one()));
        }
    }
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in products.iter().chain(std::iter::once(residual)) {
        for (m, _) in p.terms() {
            let next = index.len();
            index.entry(m.clone()).or_insert(next);
        }
    }
    let to_col = |p: &Poly| {
        p.terms()
            .map(|(m, c)| (index[m], c.clone()))
            .collect::<BTreeMap<_, _>>()
    };
    let matrix = SparseMatrix::from_columns(index.len(), products.iter().map(to_col).collect());
    let (in_span, _) = in_column_span(&matrix, &to_col(residual), Mode::Exact);
    done(in_span, products.len())
}

/// Unstarred generators of the total theory: x, C, B, h.
pub fn ghost_sector_variables(n: usize) -> Vec<Var> {
    crate::poly::bv_variables(n)
        .into_iter()
        .chain(crate::poly::aux_variables(n))
        .filter(|v| !v.is_starred())
        .collect()
}

/// The diagonal matrix diag(d) as a hermitian D0.
pub fn diagonal_d0(d: &[BigRational]) -> crate::lie::CMatrix {
    let n = d.len();
    let mut m = crate::lie::CMatrix::zero(n);
    for (i, q) in d.iter().enumerate() {
        m.set(
            i,
            i,
            ComplexRadical::real(RadicalScalar::from_rational(q.clone())),
        );
    }
    m
}

/// Drops every term that contains a variable of one of the given kinds.
pub fn drop_kinds(p: &Poly, kinds: &[Kind]) -> Poly {
    p.filter(|m| m.factors().iter().all(|(v, _)| !kinds.contains(&v.kind)))
}
