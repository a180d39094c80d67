//! Truncated cochain complexes: monomial bases, coboundary matrices, ranks and
//! windowed cohomology dimensions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::exec;
use crate::linalg::{rank, Mode, RankResult, SparseMatrix};
use crate::poly::{Monomial, Poly, Var};
use crate::scalars::RadicalScalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ComplexError {
    #[error("image monomial {0} is missing from the codomain basis")]
    ImageOverflow(String),
    #[error("invalid window: {0}")]
    BadWindow(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationWindow {
    pub ghost_min: i32,
    pub ghost_max: i32,
    pub poly_max: u32,
}

impl TruncationWindow {
    pub fn new(ghost_min: i32, ghost_max: i32, poly_max: u32) -> Result<Self, ComplexError> {
        if ghost_min > ghost_max {
            return Err(ComplexError::BadWindow(format!(
                "{ghost_min} > {ghost_max}"
            )));
        }
        Ok(Self {
            ghost_min,
            ghost_max,
            poly_max,
        })
    }
}

/// Every normal-form monomial in `vars` of polynomial degree ≤ d, grouped by ghost degree
/// and ordered by (polynomial degree, normal order).
pub fn basis_by_degree(vars: &[Var], d: u32) -> BTreeMap<i32, Vec<Monomial>> {
    let mut vars = vars.to_vec();
    vars.sort();
    vars.dedup();
    let mut out: BTreeMap<i32, Vec<Monomial>> = BTreeMap::new();
    let mut stack: Vec<(Var, u32)> = Vec::new();
    fn rec(
        vars: &[Var],
        start: usize,
        budget: u32,
        stack: &mut Vec<(Var, u32)>,
        out: &mut BTreeMap<i32, Vec<Monomial>>,
    ) {
        let (m, _) = Monomial::from_factors(stack).expect("normal-ordered input");
        out.entry(m.ghost_degree()).or_default().push(m);
        for i in start..vars.len() {
            let v = vars[i];
            let max_e = if v.is_odd() { 1 } else { budget };
            for e in 1..=max_e.min(budget) {
                stack.push((v, e));
                rec(vars, i + 1, budget - e, stack, out);
                stack.pop();
            }
        }
    }
    rec(&vars, 0, d, &mut stack, &mut out);
    for list in out.values_mut() {
        list.sort_by(|a, b| a.poly_degree().cmp(&b.poly_degree()).then_with(|| a.cmp(b)));
    }
    out
}

pub fn cochain_basis(vars: &[Var], k: i32, d: u32) -> Vec<Monomial> {
    basis_by_degree(vars, d).remove(&k).unwrap_or_default()
}

pub type Differential = Arc<dyn Fn(&Poly) -> Poly + Send + Sync>;

/// Column j holds the coordinates of d(basis_in[j]) in basis_out.
pub fn coboundary_matrix(
    d: &(dyn Fn(&Poly) -> Poly + Send + Sync),
    basis_in: &[Monomial],
    basis_out: &[Monomial],
) -> Result<SparseMatrix, ComplexError> {
    let index: HashMap<&Monomial, usize> =
        basis_out.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let columns = exec::map(basis_in, |m| {
        let image = d(&Poly::term(m.clone(), RadicalScalar::one()));
        let mut col = BTreeMap::new();
        for (mono, c) in image.terms() {
            match index.get(mono) {
                Some(&i) => {
                    col.insert(i, c.clone());
                }
                None => return Err(ComplexError::ImageOverflow(mono.to_string())),
            }
        }
        Ok(col)
    });
    let columns = columns.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(SparseMatrix::from_columns(basis_out.len(), columns))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreePiece {
    pub k: i32,
    pub domain: Vec<Monomial>,
    pub codomain: Vec<Monomial>,
    pub matrix: SparseMatrix,
}

/// Coboundary matrices for ghost degrees ghost_min−1 ..= ghost_max.
#[derive(Clone)]
pub struct TruncatedComplex {
    pub vars: Vec<Var>,
    pub window: TruncationWindow,
    /// Codomain cutoff is poly_max + increment.
    pub increment: u32,
    pub pieces: Vec<DegreePiece>,
    pub differential: Differential,
}

impl std::fmt::Debug for TruncatedComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TruncatedComplex")
            .field("window", &self.window)
            .field("increment", &self.increment)
            .field("pieces", &self.pieces.len())
            .finish()
    }
}

impl TruncatedComplex {
    pub fn assemble(
        vars: &[Var],
        window: TruncationWindow,
        increment: u32,
        differential: Differential,
    ) -> Result<Self, ComplexError> {
        let dom = basis_by_degree(vars, window.poly_max);
        let cod = basis_by_degree(vars, window.poly_max + increment);
        let mut pieces = Vec::new();
        for k in window.ghost_min - 1..=window.ghost_max {
            let domain = dom.get(&k).cloned().unwrap_or_default();
            let codomain = cod.get(&(k + 1)).cloned().unwrap_or_default();
            let matrix = coboundary_matrix(differential.as_ref(), &domain, &codomain)?;
            pieces.push(DegreePiece {
                k,
                domain,
                codomain,
                matrix,
            });
        }
        Ok(Self {
            vars: vars.to_vec(),
            window,
            increment,
            pieces,
            differential,
        })
    }

    pub fn piece(&self, k: i32) -> Option<&DegreePiece> {
        self.pieces.iter().find(|p| p.k == k)
    }

    /// For each assembled degree k, composes d_{k+1} (assembled on the codomain of d_k)
    /// with d_k and reports whether the product is the zero matrix.
    pub fn check_d_squared(&self) -> Result<Vec<(i32, bool)>, ComplexError> {
        let far = basis_by_degree(&self.vars, self.window.poly_max + 2 * self.increment);
        self.pieces
            .iter()
            .map(|p| {
                let next_cod = far.get(&(p.k + 2)).cloned().unwrap_or_default();
                let next = coboundary_matrix(self.differential.as_ref(), &p.codomain, &next_cod)?;
                Ok((p.k, next.mul(&p.matrix).is_zero()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DegreeReport {
    pub k: i32,
    pub dim_cochains: usize,
    pub rank: usize,
    pub dim_ker: usize,
    pub dim_im_prev: usize,
    pub dim: i64,
    pub stable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CohomologyReport {
    pub window: TruncationWindow,
    pub mode_requested: Mode,
    pub modes_used: Vec<Mode>,
    pub degrees: Vec<DegreeReport>,
    pub annotations: Vec<String>,
}

impl CohomologyReport {
    pub fn degree(&self, k: i32) -> Option<&DegreeReport> {
        self.degrees.iter().find(|d| d.k == k)
    }
}

fn note(r: &RankResult, used: &mut Vec<Mode>, notes: &mut Vec<String>) {
    if !used.contains(&r.mode_used) {
        used.push(r.mode_used);
    }
    if let Some(a) = &r.annotation {
        notes.push(a.clone());
    }
}

fn dims_only(
    c: &TruncatedComplex,
    mode: Mode,
    used: &mut Vec<Mode>,
    notes: &mut Vec<String>,
) -> Vec<DegreeReport> {
    let d = c.window.poly_max;
    let mut out = Vec::new();
    for k in c.window.ghost_min..=c.window.ghost_max {
        let (Some(p), Some(prev)) = (c.piece(k), c.piece(k - 1)) else {
            continue;
        };
        let r = rank(&p.matrix, mode);
        note(&r, used, notes);
        let dim_ker = p.domain.len() - r.rank;
        // dim(im d_{k−1} ∩ V_{≤D}) = rank(M) − rank(rows of degree > D)
        let full = rank(&prev.matrix, mode);
        note(&full, used, notes);
        let high = prev
            .matrix
            .select_rows(|i| prev.codomain[i].poly_degree() > d);
        let rh = rank(&high, mode);
        note(&rh, used, notes);
        let dim_im_prev = full.rank - rh.rank;
        out.push(DegreeReport {
            k,
            dim_cochains: p.domain.len(),
            rank: r.rank,
            dim_ker,
            dim_im_prev,
            dim: dim_ker as i64 - dim_im_prev as i64,
            stable: false,
        });
    }
    out
}

/// Windowed cohomology: H^k = ker(d_k on V_{≤D}) / (im d_{k−1} ∩ V_{≤D}), with stability
/// flags from a rerun at D−1.
pub fn cohomology_dims(c: &TruncatedComplex, mode: Mode) -> Result<CohomologyReport, ComplexError> {
    let mut used = Vec::new();
    let mut notes = Vec::new();
    let mut degrees = dims_only(c, mode, &mut used, &mut notes);
    if c.window.poly_max > 0 {
        let w = TruncationWindow {
            poly_max: c.window.poly_max - 1,
            ..c.window
        };
        let smaller = TruncatedComplex::assemble(&c.vars, w, c.increment, c.differential.clone())?;
        let prev = dims_only(&smaller, mode, &mut used, &mut notes);
        for d in &mut degrees {
            d.stable = prev.iter().any(|p| p.k == d.k && p.dim == d.dim);
        }
    }
    notes.dedup();
    Ok(CohomologyReport {
        window: c.window,
        mode_requested: mode,
        modes_used: used,
        degrees,
        annotations: notes,
    })
}
