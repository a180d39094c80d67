use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bvw::bv::{casimir_action, check_cme, extended_action};
use bvw::complexes::{TruncatedComplex, TruncationWindow};
use bvw::exec;
use bvw::poly::{bv_variables, Poly};
use bvw::scalars::rat;
use bvw::triples::{build_bv_triple, FiniteSpectralTriple};

fn bench(c: &mut Criterion) {
    exec::init_from_env();
    let t = build_bv_triple(&FiniteSpectralTriple::trivial(3).unwrap()).unwrap();
    let s0 = casimir_action(3, &[vec![], vec![rat(1, 1)], vec![rat(1, 1)]]);
    let ext = extended_action(&t, &s0).unwrap();

    let t2 = build_bv_triple(&FiniteSpectralTriple::trivial(2).unwrap()).unwrap();
    let s2 = extended_action(&t2, &casimir_action(2, &[vec![], vec![rat(1, 1)]]))
        .unwrap()
        .body;
    let vars = bv_variables(2);
    let window = TruncationWindow::new(-1, 1, 3).unwrap();

    let mut group = c.benchmark_group("bvw");
    group.sample_size(10);
    for (label, sequential) in [("parallel", false), ("sequential", true)] {
        exec::set_sequential(sequential);
        group.bench_function(BenchmarkId::new("cme_n3", label), |b| {
            b.iter(|| check_cme(&ext))
        });
        let s = s2.clone();
        let d = Arc::new(move |p: &Poly| bvw::antibracket(&s, p));
        group.bench_function(BenchmarkId::new("assemble_n2_d3", label), |b| {
            b.iter(|| TruncatedComplex::assemble(&vars, window, 1, d.clone()).unwrap())
        });
    }
    exec::set_sequential(false);
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
