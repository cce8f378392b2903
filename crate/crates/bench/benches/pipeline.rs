use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use knotchar::boundary::{a_polynomial, restriction_map};
use knotchar::charvar::{defining_polynomial, reducible_characters};
use knotchar::ideal::NormContext;
use knotchar::regulator::track::track_numeric;
use knotchar::regulator::{integrate_forms, loop_library, NumCurve};
use knotchar::surgery::{SurgeryContext, SurgerySlope};
use knotchar::{GroupWord, KnotPresentation, TraceEngine};

fn exact(c: &mut Criterion) {
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let word = GroupWord::parse("BAbaBabABaBAbaBabABa").unwrap();
    c.bench_function("trace_poly_len20_cold", |b| {
        b.iter(|| TraceEngine::new().trace_poly(black_box(&word)).unwrap())
    });
    c.bench_function("defining_polynomial_fig8", |b| {
        b.iter(|| defining_polynomial(&TraceEngine::new(), black_box(&pres), 1).unwrap())
    });

    let engine = TraceEngine::new();
    let curve = defining_polynomial(&engine, &pres, 1).unwrap();
    let comp = curve.nonabelian().unwrap();
    let triple = restriction_map(&engine, comp, &pres).unwrap();
    c.bench_function("a_polynomial_fig8", |b| b.iter(|| a_polynomial(black_box(&triple)).unwrap()));

    let norms = NormContext::new(&triple).unwrap();
    c.bench_function("norm_with_direct_7_2", |b| b.iter(|| norms.norm_with_direct(black_box(7), 2).unwrap()));

    let red = reducible_characters(comp, &pres.alexander).unwrap();
    let surgery = SurgeryContext::new(&triple, red).unwrap();
    let slope = SurgerySlope::new(3, 1).unwrap();
    let mut group = c.benchmark_group("surgery");
    group.sample_size(10);
    group.bench_function("intersection_set_3_1", |b| b.iter(|| surgery.intersection_set(black_box(slope), 0).unwrap()));
    group.finish();
}

fn numeric(c: &mut Criterion) {
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let engine = TraceEngine::new();
    let curve = defining_polynomial(&engine, &pres, 1).unwrap();
    let triple = restriction_map(&engine, curve.nonabelian().unwrap(), &pres).unwrap();
    let a = a_polynomial(&triple).unwrap().poly;
    let nc = NumCurve::new(&a).unwrap();
    let loops = loop_library(&a, 6, 512).unwrap();
    let spec = loops[1].path_spec(1024);
    c.bench_function("track_loop_1024", |b| b.iter(|| track_numeric(&nc, black_box(&spec)).unwrap()));
    let path = track_numeric(&nc, &spec).unwrap();
    c.bench_function("integrate_forms_1024", |b| b.iter(|| integrate_forms(black_box(&path))));
}

criterion_group!(benches, exact, numeric);
criterion_main!(benches);
