use bvw::bv::{gauge_invariance_residual, spectral_action};
use bvw::lie::{gellmann_basis, structure_constants};
use bvw::poly::{antibracket, bv_laplacian, bv_variables, Monomial, Poly, Var};
use bvw::scalars::{rat, RadicalScalar};
use bvw::triples::FiniteSpectralTriple;
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = RadicalScalar> {
    (
        -6i64..=6,
        1i64..=4,
        prop::sample::select(vec![1u64, 2, 3, 6]),
        -3i64..=3,
    )
        .prop_map(|(a, d, m, b)| {
            &RadicalScalar::from_rational(rat(a, d)) + &RadicalScalar::term(m, rat(b, 1)).unwrap()
        })
}

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(bv_variables(2))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((var(), 1u32..=2), 0..=3).prop_map(|fs| {
        let mut m = Monomial::one();
        for (v, e) in fs {
            let e = if v.is_odd() { 1 } else { e };
            if let Some((p, _)) = m.mul(&Monomial::from_factors(&[(v, e)]).unwrap().0) {
                m = p;
            }
        }
        m
    })
}

/// Polynomials with a single ghost degree, so that graded signs are well defined.
fn homogeneous() -> impl Strategy<Value = Poly> {
    (
        monomial(),
        prop::collection::vec((monomial(), scalar()), 0..=3),
        scalar(),
    )
        .prop_map(|(lead, rest, c)| {
            let k = lead.ghost_degree();
            let mut p = Poly::term(lead, c);
            for (m, s) in rest {
                if m.ghost_degree() == k {
                    p += &Poly::term(m, s);
                }
            }
            p
        })
}

fn parity(p: &Poly) -> i32 {
    p.ghost_degree().unwrap_or(0).rem_euclid(2)
}

fn sign(e: i32) -> Poly {
    if e.rem_euclid(2) == 0 {
        Poly::one()
    } else {
        Poly::int(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn scalar_arithmetic(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn graded_commutativity(a in homogeneous(), b in homogeneous()) {
        let (ea, eb) = (parity(&a), parity(&b));
        prop_assert_eq!(&a * &b, &(&b * &a) * &sign(ea * eb));
    }

    #[test]
    fn antibracket_symmetry(f in homogeneous(), g in homogeneous()) {
        let (ef, eg) = (parity(&f), parity(&g));
        let lhs = antibracket(&f, &g);
        let rhs = &antibracket(&g, &f) * &sign((ef + 1) * (eg + 1) + 1);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn antibracket_leibniz(f in homogeneous(), g in homogeneous(), h in homogeneous()) {
        let (ef, eg) = (parity(&f), parity(&g));
        let lhs = antibracket(&f, &(&g * &h));
        let rhs = &(&antibracket(&f, &g) * &h) + &(&(&g * &antibracket(&f, &h)) * &sign((ef + 1) * eg));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_jacobi(f in homogeneous(), g in homogeneous(), h in homogeneous()) {
        let (ef, eg, eh) = (parity(&f), parity(&g), parity(&h));
        let cyc = |a: &Poly, b: &Poly, c: &Poly, ea: i32, ec: i32| {
            &antibracket(a, &antibracket(b, c)) * &sign((ea + 1) * (ec + 1))
        };
        let total = &(&cyc(&f, &g, &h, ef, eh) + &cyc(&g, &h, &f, eg, ef)) + &cyc(&h, &f, &g, eh, eg);
        prop_assert!(total.is_zero(), "{}", total);
    }

    #[test]
    fn laplacian_squares_to_zero(p in homogeneous()) {
        prop_assert!(bv_laplacian(&bv_laplacian(&p)).is_zero());
    }

    #[test]
    fn ad_is_a_derivation(p in 1usize..=8, q in 1usize..=8, r in 1usize..=8) {
        // ad(σ_p)[σ_q, σ_r] = [ad(σ_p)σ_q, σ_r] + [σ_q, ad(σ_p)σ_r]
        let b = gellmann_basis(3).unwrap();
        let (sp, sq, sr) = (b.sigma(p), b.sigma(q), b.sigma(r));
        let lhs = sp.commutator(&sq.commutator(sr));
        let rhs = &sp.commutator(sq).commutator(sr) + &sq.commutator(&sp.commutator(sr));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn structure_constants_reproduce_commutators() {
    for n in [2, 3] {
        let b = gellmann_basis(n).unwrap();
        let f = structure_constants(&b).unwrap();
        assert!(bvw::lie::commutators_match(&b, &f));
    }
}

#[test]
fn non_scalar_d0_breaks_gauge_invariance() {
    let b = gellmann_basis(2).unwrap();
    let f = structure_constants(&b).unwrap();
    let base = FiniteSpectralTriple::new(2, b.sigma(3).clone()).unwrap();
    let s0 = spectral_action(&base, &[rat(0, 1), rat(0, 1), rat(1, 1)]);
    let r = gauge_invariance_residual(&f, &s0.body);
    let want = &Poly::product(RadicalScalar::from_int(4), &[Var::x(1), Var::c(2)])
        - &Poly::product(RadicalScalar::from_int(4), &[Var::x(2), Var::c(1)]);
    assert_eq!(r, want);
}
