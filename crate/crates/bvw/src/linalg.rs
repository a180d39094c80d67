//! Sparse matrices over [`RadicalScalar`] and rank computation in three arithmetic modes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalars::{format_rational, RadicalScalar, ScalarError, DEFAULT_EXTENSION_BOUND};

/// Arithmetic used for rank computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Fraction-free integer elimination when all entries are rational, radical otherwise.
    Exact,
    /// Field elimination inside the finite radical extension spanned by the entries.
    Radical,
    /// Partial-pivoting elimination in f64; pivots below 1e−9 × max |entry| count as zero.
    Float,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "radical" => Ok(Mode::Radical),
            "float" => Ok(Mode::Float),
            _ => Err(format!(
                "unknown mode {s:?} (expected exact, radical or float)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Radical => "radical",
            Mode::Float => "float",
        })
    }
}

pub const FLOAT_RANK_TOLERANCE: f64 = 1e-9;

/// Column-major sparse matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    columns: Vec<BTreeMap<usize, RadicalScalar>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            columns: vec![BTreeMap::new(); cols],
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<BTreeMap<usize, RadicalScalar>>) -> Self {
        let columns: Vec<_> = columns
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Self {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn column(&self, j: usize) -> &BTreeMap<usize, RadicalScalar> {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> RadicalScalar {
        self.columns[j].get(&i).cloned().unwrap_or_default()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn is_rational(&self) -> bool {
        self.columns
            .iter()
            .flat_map(BTreeMap::values)
            .all(RadicalScalar::is_rational)
    }

    /// Entries as (row, col, value) in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &RadicalScalar)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(&i, v)| (i, j, v)))
    }

    /// Keeps only the rows selected by `keep` (indices are preserved).
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            columns: self
                .columns
                .iter()
                .map(|c| {
                    c.iter()
                        .filter(|(i, _)| keep(**i))
                        .map(|(&i, v)| (i, v.clone()))
                        .collect()
                })
                .collect(),
        }
    }

    /// Product self · rhs.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, RadicalScalar> = BTreeMap::new();
                for (&k, b) in col {
                    for (&i, a) in &self.columns[k] {
                        let e = acc.entry(i).or_default();
                        *e += &(a * b);
                    }
                }
                acc
            })
            .collect();
        SparseMatrix::from_columns(self.rows, columns)
    }

    /// Appends a column and returns the new matrix.
    pub fn with_column(&self, col: BTreeMap<usize, RadicalScalar>) -> SparseMatrix {
        let mut cols = self.columns.clone();
        cols.push(col);
        SparseMatrix::from_columns(self.rows, cols)
    }

    /// Text export: a header line, the shape, then one `row col value` line per entry (0-based).
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "%%bvw coordinate radical\n{} {} {}\n",
            self.rows,
            self.cols,
            self.nnz()
        );
        for (i, j, v) in self.triplets() {
            let terms: Vec<String> = v
                .terms()
                .map(|(m, q)| format!("{}:{}", format_rational(q), m))
                .collect();
            s.push_str(&format!("{i} {j} {}\n", terms.join(",")));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixExport {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, RadicalScalar)>,
}

impl From<&SparseMatrix> for MatrixExport {
    fn from(m: &SparseMatrix) -> Self {
        Self {
            rows: m.rows,
            cols: m.cols,
            entries: m.triplets().map(|(i, j, v)| (i, j, v.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    pub mode_used: Mode,
    pub annotation: Option<String>,
}

pub fn rank(m: &SparseMatrix, mode: Mode) -> RankResult {
    match mode {
        Mode::Exact if m.is_rational() => RankResult {
            rank: rank_integer(m),
            mode_used: Mode::Exact,
            annotation: None,
        },
        Mode::Exact | Mode::Radical => match rank_radical(m, DEFAULT_EXTENSION_BOUND) {
            Ok(r) => RankResult {
                rank: r,
                mode_used: Mode::Radical,
                annotation: None,
            },
            Err(e) => RankResult {
                rank: rank_float(m),
                mode_used: Mode::Float,
                annotation: Some(format!(
                    "radical elimination failed ({e}); fell back to float"
                )),
            },
        },
        Mode::Float => RankResult {
            rank: rank_float(m),
            mode_used: Mode::Float,
            annotation: None,
        },
    }
}

fn content_normalize(v: &mut BTreeMap<usize, BigInt>) {
    let mut g = BigInt::zero();
    for x in v.values() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for x in v.values_mut() {
            *x /= &g;
        }
    }
}

/// Fraction-free incremental echelon form over ℤ on the columns.
pub fn rank_integer(m: &SparseMatrix) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for col in &m.columns {
        let lcm = col
            .values()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.rational_part().denom()));
        let mut v: BTreeMap<usize, BigInt> = col
            .iter()
            .map(|(&i, x)| {
                let q = x.rational_part();
                (i, q.numer() * (&lcm / q.denom()))
            })
            .collect();
        content_normalize(&mut v);
        while let Some((&lead, _)) = v.iter().next() {
            let Some(p) = pivots.get(&lead) else { break };
            let (a, b) = (&p[&lead], &v[&lead]);
            let g = a.gcd(b);
            let (sa, sb) = (a / &g, b / &g);
            let mut next: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (&i, x) in &v {
                next.insert(i, x * &sa);
            }
            for (&i, y) in p {
                let e = next.entry(i).or_insert_with(BigInt::zero);
                *e -= y * &sb;
            }
            next.retain(|_, x| !x.is_zero());
            content_normalize(&mut next);
            v = next;
        }
        if let Some((&lead, _)) = v.iter().next() {
            if v[&lead].is_negative() {
                for x in v.values_mut() {
                    *x = -&*x;
                }
            }
            pivots.insert(lead, v);
        }
    }
    pivots.len()
}

/// Field elimination with exact radical inverses.
pub fn rank_radical(m: &SparseMatrix, bound: usize) -> Result<usize, ScalarError> {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, RadicalScalar>> = BTreeMap::new();
    for col in &m.columns {
        let mut v = col.clone();
        while let Some((&lead, _)) = v.iter().next() {
            let Some(p) = pivots.get(&lead) else { break };
            let factor = v[&lead].clone();
            for (&i, y) in p {
                let e = v.entry(i).or_default();
                *e += &-(y * &factor);
                if e.is_zero() {
                    v.remove(&i);
                }
            }
        }
        if let Some((&lead, x)) = v.iter().next() {
            let inv = x.inverse_bounded(bound)?;
            let normalized = v.iter().map(|(&i, y)| (i, y * &inv)).collect();
            pivots.insert(lead, normalized);
        }
    }
    Ok(pivots.len())
}

/// Dense partial-pivoting elimination with the relative threshold [`FLOAT_RANK_TOLERANCE`].
pub fn rank_float(m: &SparseMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    // rows of `a` are the matrix columns, so the working set is cols × rows
    let mut a: Vec<Vec<f64>> = m
        .columns
        .iter()
        .map(|c| {
            let mut row = vec![0.0; m.rows];
            for (&i, v) in c {
                row[i] = v.to_f64();
            }
            row
        })
        .collect();
    let max = a.iter().flatten().fold(0f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 {
        return 0;
    }
    let tol = FLOAT_RANK_TOLERANCE * max;
    let mut rank = 0;
    for c in 0..m.rows {
        if rank == a.len() {
            break;
        }
        let (best, val) = (rank..a.len())
            .map(|r| (r, a[r][c].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        a.swap(rank, best);
        let piv = a[rank][c];
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[c] / piv;
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// True when `target` lies in the column span of `m` (exact arithmetic, radical fallback to float).
pub fn in_column_span(
    m: &SparseMatrix,
    target: &BTreeMap<usize, RadicalScalar>,
    mode: Mode,
) -> (bool, RankResult) {
    let base = rank(m, mode);
    let ext = rank(&m.with_column(target.clone()), mode);
    (base.rank == ext.rank, ext)
}
