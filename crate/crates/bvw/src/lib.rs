//! Exact symbolic workbench for the BV/BRST construction of U(n) gauge theories
//! induced by finite spectral triples on M_n(ℂ).

pub mod bv;
pub mod complexes;
pub mod exec;
pub mod hochschild;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod scalars;
pub mod triples;

pub use poly::{antibracket, bv_laplacian, Kind, Monomial, Poly, Var};
pub use scalars::{ComplexRadical, RadicalScalar};
