//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest harness
//! so the lines are always printed.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use bvw::bv::{
    auxiliary_spectrum, brst_differential, casimir_action, check_cme, check_qme, diagonal_d0,
    eom_membership, extended_action, gauge_fix, ghost_sector_variables, ghost_terms_closed_form,
    spectral_action, total_action, Action, GaugeFixingFermion,
};
use bvw::complexes::{basis_by_degree, cohomology_dims, TruncatedComplex, TruncationWindow};
use bvw::hochschild::{check_coalgebra_axioms, check_phi_square, conjugacy_cell, Pair, PairKind};
use bvw::lie::{
    gellmann_basis, levi_civita, structure_constants, verify_lie_axioms, CMatrix,
    StructureConstants,
};
use bvw::linalg::{rank, Mode};
use bvw::poly::{bv_laplacian, bv_variables, Monomial, Poly, Var};
use bvw::scalars::{rat, ComplexRadical, RadicalScalar};
use bvw::triples::{
    build_bv_triple, build_total_triple, check_real_structure, FiniteSpectralTriple,
};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(n: i64) -> BigRational {
    rat(n, 1)
}

fn casimir(n: usize) -> Action {
    casimir_action(n, &[vec![], vec![q(1)]])
}

fn classical_actions(n: usize) -> Vec<(String, Action)> {
    let zero = FiniteSpectralTriple::new(n, diagonal_d0(&vec![q(0); n])).unwrap();
    let scalar = FiniteSpectralTriple::new(n, diagonal_d0(&vec![rat(3, 2); n])).unwrap();
    let square = [q(0), q(0), q(1)];
    let quartic = [q(0), q(0), q(0), q(0), q(1)];
    vec![
        ("casimir".into(), casimir(n)),
        ("tr(D0+φ)², D0=0".into(), spectral_action(&zero, &square)),
        (
            "tr(D0+φ)², D0=3/2".into(),
            spectral_action(&scalar, &square),
        ),
        ("tr(D0+φ)⁴, D0=0".into(), spectral_action(&zero, &quartic)),
        (
            "tr(D0+φ)⁴, D0=3/2".into(),
            spectral_action(&scalar, &quartic),
        ),
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for n in [2, 3] {
        let t = build_bv_triple(&FiniteSpectralTriple::trivial(n).unwrap())
            .map_err(|e| e.to_string())?;
        for (name, s0) in classical_actions(n) {
            let ext = extended_action(&t, &s0).map_err(|e| format!("n={n} {name}: {e}"))?;
            let r = check_cme(&ext);
            ensure(r.is_zero(), format!("n={n} {name}: {{S,S}} = {r}"))?;
            count += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("took {secs:.1} s"))?;
    Ok(format!("{count} actions, under 60 s"))
}

/// Gell-Mann structure constants f_pqr for p<q<r, written out by hand.
fn su3_oracle() -> BTreeMap<(usize, usize, usize), RadicalScalar> {
    let half = RadicalScalar::from_rational(rat(1, 2));
    let r3 = RadicalScalar::sqrt_rational(&rat(3, 4)).unwrap();
    let mut base = BTreeMap::new();
    base.insert((1, 2, 3), RadicalScalar::one());
    base.insert((1, 4, 7), half.clone());
    base.insert((1, 5, 6), -half.clone());
    base.insert((2, 4, 6), half.clone());
    base.insert((2, 5, 7), half.clone());
    base.insert((3, 4, 5), half.clone());
    base.insert((3, 6, 7), -half);
    base.insert((4, 5, 8), r3.clone());
    base.insert((6, 7, 8), r3);
    let mut full = BTreeMap::new();
    for ((a, b, c), v) in base {
        for (p, q, r, s) in [
            (a, b, c, 1),
            (b, c, a, 1),
            (c, a, b, 1),
            (b, a, c, -1),
            (a, c, b, -1),
            (c, b, a, -1),
        ] {
            full.insert((p, q, r), if s > 0 { v.clone() } else { -v.clone() });
        }
    }
    full
}

/// f_pqr = −(i/4) tr([σ_p, σ_q] σ_r), recomputed from the matrices.
fn brute_force(n: usize) -> BTreeMap<(usize, usize, usize), RadicalScalar> {
    let basis = gellmann_basis(n).unwrap();
    let m = n * n;
    let coeff = ComplexRadical::new(
        RadicalScalar::zero(),
        RadicalScalar::from_rational(rat(-1, 4)),
    );
    let mut out = BTreeMap::new();
    for p in 1..=m {
        for qq in 1..=m {
            let c: CMatrix = basis.sigma(p).commutator(basis.sigma(qq));
            for r in 1..=m {
                let z = (&c * basis.sigma(r)).trace();
                let v = &coeff * &z;
                if !v.is_zero() {
                    assert!(v.im.is_zero());
                    out.insert((p, qq, r), v.re);
                }
            }
        }
    }
    out
}

fn table_of(f: &StructureConstants) -> BTreeMap<(usize, usize, usize), RadicalScalar> {
    f.entries()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| (k, v.clone()))
        .collect()
}

fn criterion_2() -> Outcome {
    let f2 = structure_constants(&gellmann_basis(2).unwrap()).map_err(|e| e.to_string())?;
    let eps: BTreeMap<_, _> = (1..=4)
        .flat_map(|p| (1..=4).flat_map(move |qq| (1..=4).map(move |r| (p, qq, r))))
        .filter(|&(p, qq, r)| p <= 3 && qq <= 3 && r <= 3 && levi_civita(p, qq, r) != 0)
        .map(|(p, qq, r)| ((p, qq, r), RadicalScalar::from_int(levi_civita(p, qq, r))))
        .collect();
    ensure(table_of(&f2) == eps, "n=2 table differs from ε")?;
    let f3 = structure_constants(&gellmann_basis(3).unwrap()).map_err(|e| e.to_string())?;
    ensure(
        table_of(&f3) == brute_force(3),
        "n=3 table differs from the trace formula",
    )?;
    ensure(
        table_of(&f3) == su3_oracle(),
        "n=3 table differs from the Gell-Mann values",
    )?;
    for f in [&f2, &f3] {
        let r = verify_lie_axioms(f);
        ensure(
            r.ok(),
            format!(
                "n={}: axiom residuals {} / {}",
                f.n, r.antisymmetry_max_residual, r.jacobi_max_residual
            ),
        )?;
    }
    Ok("ε for n=2, 24 nonzero entries for n=3".into())
}

fn criterion_3() -> Outcome {
    for n in [2, 3] {
        let t = build_bv_triple(&FiniteSpectralTriple::trivial(n).unwrap())
            .map_err(|e| e.to_string())?;
        let zero = Action {
            kind: bvw::bv::ActionKind::Classical,
            body: Poly::zero(),
        };
        let ghost = extended_action(&t, &zero).map_err(|e| e.to_string())?.body;
        let oracle =
            StructureConstants::from_table(n, if n == 2 { brute_force(2) } else { su3_oracle() });
        ensure(
            ghost == ghost_terms_closed_form(&oracle),
            format!("n={n}: ½·S_ferm = {ghost}"),
        )?;
    }
    Ok("n=2, n=3".into())
}

fn criterion_4() -> Outcome {
    let t =
        build_bv_triple(&FiniteSpectralTriple::trivial(2).unwrap()).map_err(|e| e.to_string())?;
    let r = check_real_structure(&t, &t.basis);
    ensure(r.ok(), format!("BV triple: {r:?}"))?;
    let tt = build_total_triple(&t);
    let r = check_real_structure(&tt, &t.basis);
    ensure(r.ok(), format!("total triple: {r:?}"))?;
    Ok(format!(
        "aux J/D commutator on bosons has {} nonzero entries",
        r.aux_commute_bosonic_nnz.unwrap_or(0)
    ))
}

fn criterion_5() -> Outcome {
    let vars = bv_variables(2);
    let mut checked = 0;
    for list in basis_by_degree(&vars, 4).into_values() {
        for m in list {
            let p = Poly::term(m.clone(), RadicalScalar::one());
            ensure(
                bv_laplacian(&bv_laplacian(&p)).is_zero(),
                format!("Δ²({m}) ≠ 0"),
            )?;
            checked += 1;
        }
    }
    for n in [2, 3] {
        let t = build_bv_triple(&FiniteSpectralTriple::trivial(n).unwrap())
            .map_err(|e| e.to_string())?;
        for (name, s0) in classical_actions(n) {
            let ext = extended_action(&t, &s0).map_err(|e| e.to_string())?;
            let d = bv_laplacian(&ext.body);
            ensure(d.is_zero(), format!("n={n} {name}: ΔS̃ = {d}"))?;
            ensure(
                check_qme(&[ext.body]).ok(),
                format!("n={n} {name}: QME fails"),
            )?;
        }
    }
    Ok(format!("Δ² on {checked} monomials"))
}

fn random_cochains(vars: &[Var], count: usize, seed: u64) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let by_degree = basis_by_degree(vars, 3);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(-2..=2);
            let basis = &by_degree[&k];
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

fn criterion_6() -> Outcome {
    let t =
        build_bv_triple(&FiniteSpectralTriple::trivial(2).unwrap()).map_err(|e| e.to_string())?;
    let ext = extended_action(&t, &casimir(2)).map_err(|e| e.to_string())?;
    let pair = Pair::build(PairKind::Bv, 2, ext.body.clone(), 2);

    let report = check_coalgebra_axioms(&pair);
    ensure(report.ok(), format!("coalgebra axioms: {report:?}"))?;

    let degrees: Vec<i32> = basis_by_degree(&pair.variables(), 3).into_keys().collect();
    let (basis_size, failures) = bvw::hochschild::check_d_squared(
        &pair,
        *degrees.first().unwrap(),
        *degrees.last().unwrap(),
        3,
    );
    ensure(
        failures.is_empty(),
        format!(
            "d_H² ≠ 0 on {} of {basis_size} basis elements",
            failures.len()
        ),
    )?;

    let sample = random_cochains(&pair.variables(), 100, 7);
    let square = check_phi_square(&pair, &sample);
    ensure(
        square.ok(),
        format!("{} square mismatches", square.mismatches.len()),
    )?;

    for k in -2..=2 {
        let cell = conjugacy_cell(&pair, k, 2, 1, Mode::Exact);
        ensure(cell.ok(), format!("conjugacy cell {cell:?}"))?;
    }

    let tt = build_total_triple(&t);
    let st = total_action(&ext, &tt).map_err(|e| e.to_string())?;
    let total = Pair::build(PairKind::Total, 2, st.body.clone(), 2);
    ensure(check_coalgebra_axioms(&total).ok(), "total pair axioms")?;
    let gf = Pair::build(
        PairKind::GaugeFixed(GaugeFixingFermion::standard(2)),
        2,
        st.body,
        2,
    );
    let sample = random_cochains(&gf.variables(), 100, 11);
    ensure(check_phi_square(&gf, &sample).ok(), "gauge-fixed square")?;
    Ok(format!(
        "d_H² on {basis_size} basis elements, {} square checks",
        square.checked
    ))
}

fn criterion_7() -> Outcome {
    let t =
        build_bv_triple(&FiniteSpectralTriple::trivial(2).unwrap()).map_err(|e| e.to_string())?;
    let tt = build_total_triple(&t);
    let ext = extended_action(&t, &casimir(2)).map_err(|e| e.to_string())?;
    let st = total_action(&ext, &tt).map_err(|e| e.to_string())?;
    let psi = GaugeFixingFermion::standard(2);
    let gf = gauge_fix(&st, &psi).map_err(|e| e.to_string())?;
    ensure(
        !gf.body.has_starred(),
        "gauge-fixed action contains starred variables",
    )?;
    let mut generators = 0;
    for v in ghost_sector_variables(2) {
        let once = brst_differential(&st, &psi, &Poly::var(v)).map_err(|e| e.to_string())?;
        let twice = brst_differential(&st, &psi, &once).map_err(|e| e.to_string())?;
        let m = eom_membership(&gf.body, &twice, 2);
        ensure(
            m.in_span,
            format!("d²({v}) = {twice} is not in the EOM span"),
        )?;
        generators += 1;
    }
    Ok(format!("{generators} generators"))
}

fn criterion_8() -> Outcome {
    let expected: [&[(u32, u32, i32)]; 3] = [
        &[(0, 1, -1)],
        &[(0, 1, -1), (1, 1, -2), (1, 2, 0)],
        &[
            (0, 1, -1),
            (1, 1, -2),
            (1, 2, 0),
            (2, 1, -3),
            (2, 2, 1),
            (2, 3, -1),
        ],
    ];
    for (level, want) in expected.iter().enumerate() {
        let got: Vec<(u32, u32, i32)> = auxiliary_spectrum(level as u32)
            .iter()
            .map(|f| (f.i, f.j, f.deg_b))
            .collect();
        ensure(got == *want, format!("L={level}: {got:?}"))?;
        ensure(
            auxiliary_spectrum(level as u32)
                .iter()
                .all(|f| f.deg_h == f.deg_b + 1),
            "deg h ≠ deg B + 1",
        )?;
    }
    Ok("L = 0, 1, 2".into())
}

fn criterion_9() -> Outcome {
    let t =
        build_bv_triple(&FiniteSpectralTriple::trivial(2).unwrap()).map_err(|e| e.to_string())?;
    let ext = extended_action(&t, &casimir(2)).map_err(|e| e.to_string())?;
    let s = ext.body.clone();
    let vars = bv_variables(2);
    let window = TruncationWindow::new(-2, 2, 3).unwrap();
    let c = TruncatedComplex::assemble(
        &vars,
        window,
        1,
        Arc::new(move |p: &Poly| bvw::antibracket(&s, p)),
    )
    .map_err(|e| e.to_string())?;
    for (k, zero) in c.check_d_squared().map_err(|e| e.to_string())? {
        ensure(zero, format!("d_{{k+1}}·d_k ≠ 0 at k={k}"))?;
    }
    let report = cohomology_dims(&c, Mode::Exact).map_err(|e| e.to_string())?;
    for d in &report.degrees {
        ensure(
            d.dim_ker + d.rank == d.dim_cochains,
            format!("rank-nullity fails at k={}", d.k),
        )?;
        ensure(d.dim >= 0, format!("negative dimension at k={}", d.k))?;
    }
    for p in &c.pieces {
        let exact = rank(&p.matrix, Mode::Exact).rank;
        let float = rank(&p.matrix, Mode::Float).rank;
        ensure(
            exact == float,
            format!("k={}: exact rank {exact}, float rank {float}", p.k),
        )?;
    }
    let one = Monomial::one();
    let prev = c.piece(-1).ok_or("missing degree −1 piece")?;
    let row = prev
        .codomain
        .iter()
        .position(|m| *m == one)
        .ok_or("1 missing from the codomain")?;
    ensure(
        prev.matrix.select_rows(|i| i == row).is_zero(),
        "d hits the constant 1",
    )?;
    ensure(
        bvw::antibracket(&ext.body, &Poly::one()).is_zero(),
        "d(1) ≠ 0",
    )?;
    let h0 = report.degree(0).ok_or("no H⁰")?;
    ensure(h0.dim >= 1, "H⁰ is empty")?;
    let dims: Vec<String> = report
        .degrees
        .iter()
        .map(|d| format!("H^{}={}", d.k, d.dim))
        .collect();
    Ok(dims.join(" "))
}

fn main() {
    bvw::exec::init_from_env();
    let criteria: [Criterion; 9] = [
        ("classical master equation", criterion_1),
        ("structure constants", criterion_2),
        ("fermionic action identity", criterion_3),
        ("real-structure axioms", criterion_4),
        ("BV Laplacian and quantum master equation", criterion_5),
        ("Hochschild suite", criterion_6),
        ("gauge fixing and BRST", criterion_7),
        ("auxiliary spectrum", criterion_8),
        ("cohomology plumbing", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {} {name} ({detail}; {secs:.2} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
