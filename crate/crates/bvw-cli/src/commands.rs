use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use bvw::bv::{
    brst_differential, check_cme, check_qme, eom_membership, extended_action, gauge_fix,
    gauge_invariance_residual, ghost_sector_variables, ghost_terms_closed_form, total_action,
    Action, ActionKind, BvError, GaugeFixingFermion,
};
use bvw::complexes::{
    basis_by_degree, cohomology_dims, ComplexError, TruncatedComplex, TruncationWindow,
};
use bvw::hochschild::{
    check_coalgebra_axioms, check_d_squared, check_phi_square, conjugacy_cell, Pair, PairKind,
};
use bvw::lie::{gellmann_basis, structure_constants, verify_lie_axioms};
use bvw::linalg::{MatrixExport, Mode};
use bvw::poly::{bv_laplacian, bv_variables, Poly, Var};
use bvw::scalars::{rat, RadicalScalar};
use bvw::triples::{build_bv_triple, build_total_triple, check_real_structure, export_triple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ConfigError, Model};

pub const SUITES: [&str; 6] = ["lie", "triple", "cme", "qme", "hochschild", "brst"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            _ => 2,
        }
    }
}

impl From<BvError> for CliError {
    fn from(e: BvError) -> Self {
        CliError::Verification(e.to_string())
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        CliError::Verification(e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub mode: Mode,
    pub suites: BTreeMap<String, Value>,
    pub ok: bool,
}

impl Report {
    fn new(model: &Model, command: &str) -> Self {
        Report {
            command: command.into(),
            config_hash: model.config.hash(),
            mode: model.mode,
            suites: BTreeMap::new(),
            ok: true,
        }
    }

    fn add(&mut self, name: &str, ok: bool, mut body: Value) {
        if let Value::Object(m) = &mut body {
            m.insert("ok".into(), Value::Bool(ok));
        }
        self.ok &= ok;
        self.suites.insert(name.into(), body);
    }

    pub fn write(&self, model: &Model, file: &str) -> Result<PathBuf, CliError> {
        write_json(model, file, self)
    }
}

fn write_json(model: &Model, file: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let path = model.out.join(file);
    let io = |source| CliError::Write {
        path: path.clone(),
        source,
    };
    std::fs::create_dir_all(&model.out).map_err(io)?;
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(io)?;
    Ok(path)
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

/// Everything downstream of S_0, built once.
struct Pipeline {
    s0: Action,
    extended: Action,
    st: Action,
    psi: GaugeFixingFermion,
}

impl Pipeline {
    fn build(model: &Model) -> Result<Self, CliError> {
        let bv = build_bv_triple(&model.base).map_err(|e| CliError::Verification(e.to_string()))?;
        let total = build_total_triple(&bv);
        let s0 = model.require_s0()?.clone();
        let extended = extended_action(&bv, &s0)?;
        let st = total_action(&extended, &total)?;
        let psi = model
            .psi
            .clone()
            .unwrap_or_else(|| GaugeFixingFermion::standard(model.base.n));
        Ok(Pipeline {
            s0,
            extended,
            st,
            psi,
        })
    }

    /// Records a failed suite instead of aborting when the pipeline itself fails to verify.
    fn for_suite(model: &Model, report: &mut Report, name: &str) -> Result<Option<Self>, CliError> {
        match Self::build(model) {
            Ok(p) => Ok(Some(p)),
            Err(CliError::Verification(e)) => {
                report.add(name, false, json!({ "error": e }));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

fn random_sample(vars: &[Var], kmin: i32, kmax: i32, d: u32, count: usize) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let by_degree = basis_by_degree(vars, d);
    let degrees: Vec<i32> = (kmin..=kmax)
        .filter(|k| by_degree.contains_key(k))
        .collect();
    if degrees.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let basis = &by_degree[&degrees[rng.gen_range(0..degrees.len())]];
            (0..rng.gen_range(1..=4))
                .map(|_| {
                    let m = basis[rng.gen_range(0..basis.len())].clone();
                    Poly::term(
                        m,
                        RadicalScalar::from_rational(rat(
                            rng.gen_range(-5..=5),
                            rng.gen_range(1..=3),
                        )),
                    )
                })
                .sum()
        })
        .collect()
}

fn suite_lie(model: &Model, report: &mut Report) -> Result<(), CliError> {
    let basis = gellmann_basis(model.base.n).map_err(|e| CliError::Verification(e.to_string()))?;
    let f = structure_constants(&basis).map_err(|e| CliError::Verification(e.to_string()))?;
    let r = verify_lie_axioms(&f);
    report.add("lie", r.ok(), to_value(&r));
    Ok(())
}

fn suite_triple(model: &Model, report: &mut Report) -> Result<(), CliError> {
    let bv = build_bv_triple(&model.base).map_err(|e| CliError::Verification(e.to_string()))?;
    let total = build_total_triple(&bv);
    let rb = check_real_structure(&bv, &bv.basis);
    let rt = check_real_structure(&total, &bv.basis);
    let zero = Action {
        kind: ActionKind::Classical,
        body: Poly::zero(),
    };
    let ghost = extended_action(&bv, &zero)?.body;
    let identity = &ghost - &ghost_terms_closed_form(&bv.f);
    let ok = rb.ok() && rt.ok() && identity.is_zero();
    report.add(
        "triple",
        ok,
        json!({ "bv": to_value(&rb), "total": to_value(&rt), "fermionic_identity_residual": identity.to_string() }),
    );
    Ok(())
}

fn suite_cme(model: &Model, report: &mut Report) -> Result<(), CliError> {
    let s0 = model.require_s0()?;
    let bv = build_bv_triple(&model.base).map_err(|e| CliError::Verification(e.to_string()))?;
    let residual = gauge_invariance_residual(&bv.f, &s0.body);
    if !residual.is_zero() {
        report.add(
            "cme",
            false,
            json!({ "invariance_residual": residual.to_string() }),
        );
        return Ok(());
    }
    let ext = extended_action(&bv, s0)?;
    let r = check_cme(&ext);
    report.add(
        "cme",
        r.is_zero(),
        json!({ "invariance_residual": "0", "cme_residual": r.to_string() }),
    );
    Ok(())
}

fn suite_qme(model: &Model, report: &mut Report) -> Result<(), CliError> {
    let Some(p) = Pipeline::for_suite(model, report, "qme")? else {
        return Ok(());
    };
    let lap = bv_laplacian(&p.extended.body);
    let q = check_qme(std::slice::from_ref(&p.extended.body));
    let orders: Vec<String> = q.orders.iter().map(|o| o.to_string()).collect();
    report.add(
        "qme",
        lap.is_zero() && q.ok(),
        json!({ "laplacian_residual": lap.to_string(), "orders": orders }),
    );
    Ok(())
}

fn suite_hochschild(model: &Model, report: &mut Report) -> Result<(), CliError> {
    let Some(p) = Pipeline::for_suite(model, report, "hochschild")? else {
        return Ok(());
    };
    let n = model.base.n;
    let w = model.window;
    let pair = Pair::build(PairKind::Bv, n, p.extended.body.clone(), model.s0_degree());
    let axioms = check_coalgebra_axioms(&pair);
    let sample = random_sample(&pair.variables(), w.kmin, w.kmax, w.d, 100);
    let square = check_phi_square(&pair, &sample);
    let (basis_size, failures) = check_d_squared(&pair, w.kmin, w.kmax, w.d);
    let cells: Vec<_> = (w.kmin..=w.kmax)
        .map(|k| conjugacy_cell(&pair, k, w.d, model.increment(), model.mode))
        .collect();
    let gf = Pair::build(
        PairKind::GaugeFixed(p.psi.clone()),
        n,
        p.st.body.clone(),
        model.s0_degree(),
    );
    let gf_square = check_phi_square(
        &gf,
        &random_sample(&gf.variables(), w.kmin, w.kmax, w.d, 100),
    );
    let ok = axioms.ok()
        && square.ok()
        && failures.is_empty()
        && cells.iter().all(|c| c.ok())
        && gf_square.ok();
    report.add(
        "hochschild",
        ok,
        json!({
            "coalgebra": to_value(&axioms),
            "phi_square": { "checked": square.checked, "mismatches": to_value(&square.mismatches) },
            "gauge_fixed_phi_square": { "checked": gf_square.checked, "mismatches": to_value(&gf_square.mismatches) },
            "d_squared": { "basis_size": basis_size, "failures": failures.len() },
            "conjugacy": to_value(&cells),
        }),
    );
    Ok(())
}

fn suite_brst(model: &Model, report: &mut Report) -> Result<(), CliError> {
    let Some(p) = Pipeline::for_suite(model, report, "brst")? else {
        return Ok(());
    };
    let gf = gauge_fix(&p.st, &p.psi)?;
    let mut generators = Vec::new();
    let mut ok = !gf.body.has_starred();
    for v in ghost_sector_variables(model.base.n) {
        let once = brst_differential(&p.st, &p.psi, &Poly::var(v))?;
        let twice = brst_differential(&p.st, &p.psi, &once)?;
        let m = eom_membership(&gf.body, &twice, model.window.d.max(1));
        ok &= m.in_span;
        generators.push(json!({ "generator": v.to_string(), "d_squared": twice.to_string(), "in_eom_span": m.in_span }));
    }
    report.add(
        "brst",
        ok,
        json!({
            "psi": p.psi.body.to_string(),
            "gauge_fixed_action": gf.body.to_string(),
            "starred_free": !gf.body.has_starred(),
            "generators": generators,
        }),
    );
    Ok(())
}

pub fn cmd_check(model: &Model, which: &[String]) -> Result<Report, CliError> {
    let mut report = Report::new(model, "check");
    for name in which {
        match name.as_str() {
            "lie" => suite_lie(model, &mut report)?,
            "triple" => suite_triple(model, &mut report)?,
            "cme" => suite_cme(model, &mut report)?,
            "qme" => suite_qme(model, &mut report)?,
            "hochschild" => suite_hochschild(model, &mut report)?,
            "brst" => suite_brst(model, &mut report)?,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown suite {other:?}; choose from {}",
                    SUITES.join(",")
                )))
            }
        }
    }
    Ok(report)
}

fn window(model: &Model) -> Result<TruncationWindow, CliError> {
    let w = model.window;
    TruncationWindow::new(w.kmin, w.kmax, w.d).map_err(|e| CliError::Usage(e.to_string()))
}

fn bv_complex(model: &Model, p: &Pipeline) -> Result<TruncatedComplex, CliError> {
    let s = p.extended.body.clone();
    let vars = bv_variables(model.base.n);
    Ok(TruncatedComplex::assemble(
        &vars,
        window(model)?,
        model.increment(),
        Arc::new(move |q: &Poly| bvw::antibracket(&s, q)),
    )?)
}

pub fn cmd_cohomology(model: &Model) -> Result<Report, CliError> {
    let mut report = Report::new(model, "cohomology");
    let p = Pipeline::build(model)?;
    let bv = cohomology_dims(&bv_complex(model, &p)?, model.mode)?;
    let d_sq_ok = bv_complex(model, &p)?
        .check_d_squared()?
        .iter()
        .all(|(_, z)| *z);
    report.add(
        "bv",
        d_sq_ok,
        json!({ "report": to_value(&bv), "d_squared_zero": d_sq_ok }),
    );

    if let Some(psi) = &model.psi {
        let st = p.st.clone();
        let psi = psi.clone();
        let vars = ghost_sector_variables(model.base.n);
        // The ghost-sector basis has no starred variables, so the differential cannot fail.
        let c = TruncatedComplex::assemble(
            &vars,
            window(model)?,
            model.increment(),
            Arc::new(move |q: &Poly| {
                brst_differential(&st, &psi, q).unwrap_or_else(|_| Poly::zero())
            }),
        )?;
        let brst = cohomology_dims(&c, model.mode)?;
        let squares = c.check_d_squared()?;
        report.add(
            "brst",
            true,
            json!({ "report": to_value(&brst), "d_squared_zero": to_value(&squares) }),
        );
    }

    let pair = Pair::build(
        PairKind::Bv,
        model.base.n,
        p.extended.body.clone(),
        model.s0_degree(),
    );
    let w = model.window;
    let cells: Vec<_> = (w.kmin..=w.kmax)
        .map(|k| conjugacy_cell(&pair, k, w.d, model.increment(), model.mode))
        .collect();
    report.add(
        "hochschild_conjugacy",
        cells.iter().all(|c| c.ok()),
        json!({ "cells": to_value(&cells) }),
    );
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportWhat {
    Triple,
    Actions,
    Pair,
    Matrices,
}

#[derive(Serialize)]
struct Export {
    what: String,
    config_hash: String,
    mode: Mode,
    data: Value,
}

pub fn cmd_export(model: &Model, what: ExportWhat) -> Result<PathBuf, CliError> {
    let (name, data) = match what {
        ExportWhat::Triple => {
            let bv =
                build_bv_triple(&model.base).map_err(|e| CliError::Verification(e.to_string()))?;
            let total = build_total_triple(&bv);
            (
                "triple",
                json!({ "bv": to_value(&export_triple(&bv)), "total": to_value(&export_triple(&total)) }),
            )
        }
        ExportWhat::Actions => {
            let p = Pipeline::build(model)?;
            let gf = gauge_fix(&p.st, &p.psi)?;
            let aux = &p.st.body - &p.extended.body;
            (
                "actions",
                json!({
                    "s0": to_value(&p.s0.body),
                    "extended": to_value(&p.extended.body),
                    "auxiliary": to_value(&aux),
                    "total": to_value(&p.st.body),
                    "psi": to_value(&p.psi.body),
                    "gauge_fixed": to_value(&gf.body),
                }),
            )
        }
        ExportWhat::Pair => {
            let p = Pipeline::build(model)?;
            let n = model.base.n;
            let bv = Pair::build(PairKind::Bv, n, p.extended.body.clone(), model.s0_degree());
            let total = Pair::build(PairKind::Total, n, p.st.body.clone(), model.s0_degree());
            let gf = Pair::build(
                PairKind::GaugeFixed(p.psi.clone()),
                n,
                p.st.body.clone(),
                model.s0_degree(),
            );
            (
                "pair",
                json!({
                    "b0_bound": bv.b0_bound,
                    "bv": to_value(&bv.tables()),
                    "total": to_value(&total.tables()),
                    "gauge_fixed": to_value(&gf.tables()),
                }),
            )
        }
        ExportWhat::Matrices => {
            let p = Pipeline::build(model)?;
            let c = bv_complex(model, &p)?;
            let pieces: Vec<Value> = c
                .pieces
                .iter()
                .map(|piece| {
                    json!({
                        "k": piece.k,
                        "domain": piece.domain.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                        "codomain": piece.codomain.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                        "matrix": to_value(&MatrixExport::from(&piece.matrix)),
                    })
                })
                .collect();
            (
                "matrices",
                json!({ "window": to_value(&c.window), "increment": c.increment, "pieces": pieces }),
            )
        }
    };
    let export = Export {
        what: name.into(),
        config_hash: model.config.hash(),
        mode: model.mode,
        data,
    };
    write_json(model, &format!("export_{name}.json"), &export)
}
