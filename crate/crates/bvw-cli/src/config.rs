//! Model configuration: a single JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use bvw::bv::{casimir_action, spectral_action, Action, ActionKind, GaugeFixingFermion};
use bvw::lie::CMatrix;
use bvw::linalg::Mode;
use bvw::poly::Poly;
use bvw::scalars::{parse_rational, ComplexRadical, RadicalScalar};
use bvw::triples::FiniteSpectralTriple;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::expr::{parse_poly, parse_univariate};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(String),
    Complex { re: String, im: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Expression(String),
    Coefficients(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub kmin: i32,
    pub kmax: i32,
    #[serde(rename = "D")]
    pub d: u32,
}

impl std::str::FromStr for Window {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [kmin, kmax, d] = parts.as_slice() else {
            return Err(format!("expected kmin:kmax:D, got {s:?}"));
        };
        let w = Window {
            kmin: kmin
                .trim()
                .parse()
                .map_err(|_| format!("bad kmin {kmin:?}"))?,
            kmax: kmax
                .trim()
                .parse()
                .map_err(|_| format!("bad kmax {kmax:?}"))?,
            d: d.trim().parse().map_err(|_| format!("bad D {d:?}"))?,
        };
        if w.kmin > w.kmax {
            return Err(format!("kmin {} exceeds kmax {}", w.kmin, w.kmax));
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiSource {
    Inline(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FunctionSpec>,
    /// g_k coefficient lists, lowest power of x_{n²} first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casimir: Option<Vec<Vec<String>>>,
    /// Inline expression replacing S_0 outright.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ModelConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let digest = Sha256::digest(value.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn rational(s: &str, name: &'static str) -> Result<BigRational, ConfigError> {
    parse_rational(s).map_err(|e| field(name, format!("{s:?}: {e}")))
}

/// A validated configuration with its derived objects.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: ModelConfig,
    pub base: FiniteSpectralTriple,
    pub s0: Option<Action>,
    pub psi: Option<GaugeFixingFermion>,
    pub window: Window,
    pub mode: Mode,
    pub out: PathBuf,
}

impl Model {
    pub fn resolve(config: ModelConfig, base_dir: &Path) -> Result<Self, ConfigError> {
        let n = config.n;
        if !(2..=8).contains(&n) {
            return Err(field("n", format!("must be between 2 and 8, got {n}")));
        }
        let d0 = match &config.d0 {
            None => CMatrix::zero(n),
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(field("d0", format!("must be an {n}×{n} matrix")));
                }
                let mut m = CMatrix::zero(n);
                for (i, row) in rows.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        let z = match e {
                            Entry::Real(s) => ComplexRadical::real(RadicalScalar::from_rational(
                                rational(s, "d0")?,
                            )),
                            Entry::Complex { re, im } => ComplexRadical::new(
                                RadicalScalar::from_rational(rational(re, "d0")?),
                                RadicalScalar::from_rational(rational(im, "d0")?),
                            ),
                        };
                        m.set(i, j, z);
                    }
                }
                m
            }
        };
        let base = FiniteSpectralTriple::new(n, d0).map_err(|e| field("d0", e.to_string()))?;

        let given = [
            config.f.is_some(),
            config.casimir.is_some(),
            config.s0.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(field("f", "give at most one of f, casimir and s0"));
        }
        let s0 = if let Some(spec) = &config.f {
            let coeffs = match spec {
                FunctionSpec::Expression(s) => {
                    parse_univariate(s).map_err(|e| field("f", e.to_string()))?
                }
                FunctionSpec::Coefficients(cs) => cs
                    .iter()
                    .map(|c| rational(c, "f"))
                    .collect::<Result<_, _>>()?,
            };
            Some(spectral_action(&base, &coeffs))
        } else if let Some(g) = &config.casimir {
            let g = g
                .iter()
                .map(|gk| {
                    gk.iter()
                        .map(|c| rational(c, "casimir"))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(casimir_action(n, &g))
        } else if let Some(src) = &config.s0 {
            let body = parse_poly(src, n).map_err(|e| field("s0", e.to_string()))?;
            if body
                .terms()
                .any(|(m, _)| m.factors().iter().any(|(v, _)| v.kind != bvw::Kind::Field))
            {
                return Err(field("s0", "may only contain x variables"));
            }
            Some(Action {
                kind: ActionKind::Classical,
                body,
            })
        } else {
            None
        };

        let psi = match &config.psi {
            None => None,
            Some(src) => {
                let text = match src {
                    PsiSource::Inline(s) => s.clone(),
                    PsiSource::File(p) => {
                        let p = base_dir.join(p);
                        std::fs::read_to_string(&p)
                            .map_err(|source| ConfigError::Io { path: p, source })?
                    }
                };
                let body: Poly = parse_poly(&text, n).map_err(|e| field("psi", e.to_string()))?;
                Some(GaugeFixingFermion::new(body).map_err(|e| field("psi", e.to_string()))?)
            }
        };

        Ok(Model {
            window: config.window.unwrap_or(Window {
                kmin: -1,
                kmax: 1,
                d: 2,
            }),
            mode: config.mode.unwrap_or(Mode::Exact),
            out: config.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            base,
            s0,
            psi,
            config,
        })
    }

    pub fn require_s0(&self) -> Result<&Action, ConfigError> {
        self.s0
            .as_ref()
            .ok_or_else(|| field("f", "this command needs one of f, casimir or s0"))
    }

    /// Polynomial degree of S_0, which fixes the B_0 truncation and the codomain increment.
    pub fn s0_degree(&self) -> u32 {
        self.s0.as_ref().map_or(0, |s| s.body.max_poly_degree())
    }

    pub fn increment(&self) -> u32 {
        self.s0_degree().saturating_sub(1).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_flag() {
        assert_eq!(
            "-2:2:3".parse::<Window>().unwrap(),
            Window {
                kmin: -2,
                kmax: 2,
                d: 3
            }
        );
        assert!("2:1:0".parse::<Window>().is_err());
        assert!("1:2".parse::<Window>().is_err());
    }

    #[test]
    fn config_forms() {
        let c: ModelConfig = serde_json::from_str(
            r#"{"n":2,"d0":[["1",{"re":"0","im":"1/2"}],[{"re":"0","im":"-1/2"},"1"]],"f":"t^2","psi":{"inline":"B1*x1"}}"#,
        )
        .unwrap();
        let m = Model::resolve(c.clone(), Path::new(".")).unwrap();
        assert!(m.psi.is_some());
        assert_eq!(m.s0_degree(), 2);
        assert_eq!(c.hash(), c.clone().hash());
        let bad: ModelConfig =
            serde_json::from_str(r#"{"n":2,"f":"t^2","casimir":[[],["1"]]}"#).unwrap();
        assert!(Model::resolve(bad, Path::new(".")).is_err());
        assert!(serde_json::from_str::<ModelConfig>(r#"{"n":2,"bogus":1}"#).is_err());
    }
}
