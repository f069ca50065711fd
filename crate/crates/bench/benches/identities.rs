use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qfin::guess::{certify_sequence, AnsatzSpec, SequenceSource};
use qfin::identities::{recurrence_spec, run_recurrence, verify_identity, IdentityId, SideBuilder};
use qfin::qcomb::gaussian_binomial;
use qfin::series::{jtp_check, product_side};
use qfin::QBinomialArgs;
use qfin_bench::lhs_sequence;

fn binomials(c: &mut Criterion) {
    c.bench_function("gaussian_binomial 40 choose 20", |b| {
        b.iter(|| gaussian_binomial(black_box(QBinomialArgs::new(40, 20, 1))))
    });
}

fn sides(c: &mut Criterion) {
    let mut g = c.benchmark_group("sides");
    g.sample_size(10);
    for id in IdentityId::FINITE {
        for n in [10u32, 20] {
            g.bench_with_input(BenchmarkId::new(format!("{}_lhs", id.short_name()), n), &n, |b, &n| {
                b.iter(|| SideBuilder::new(id).unwrap().lhs(n))
            });
            g.bench_with_input(BenchmarkId::new(format!("{}_rhs", id.short_name()), n), &n, |b, &n| {
                b.iter(|| SideBuilder::new(id).unwrap().rhs(n))
            });
        }
    }
    g.finish();
}

fn recurrences(c: &mut Criterion) {
    let mut g = c.benchmark_group("recurrence");
    for id in IdentityId::FINITE {
        let spec = recurrence_spec(id).unwrap();
        g.bench_function(id.short_name(), |b| b.iter(|| run_recurrence(&spec, black_box(40))));
    }
    g.finish();
}

fn verification(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("r1_n20", |b| b.iter(|| verify_identity(IdentityId::R1Finite, 20).unwrap()));
    g.bench_function("arrf3_n20", |b| b.iter(|| verify_identity(IdentityId::Arrf3, 20).unwrap()));
    g.finish();
}

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    g.sample_size(10);
    g.bench_function("r2_product_side_40", |b| b.iter(|| product_side(IdentityId::R2Finite, 40).unwrap()));
    g.bench_function("r1_jtp_30", |b| b.iter(|| jtp_check(IdentityId::R1Finite, 30).unwrap()));
    g.finish();
}

fn guessing(c: &mut Criterion) {
    let mut g = c.benchmark_group("guess");
    g.sample_size(10);
    let id = IdentityId::R1PartnerFinite;
    let seq = lhs_sequence(id, 40);
    let ansatz = AnsatzSpec::known_shape(id).unwrap();
    g.bench_function("r1p_certify", |b| {
        b.iter(|| certify_sequence(id, SequenceSource::Lhs, &seq, &ansatz, 4..=30, 31..=40).unwrap())
    });
    g.finish();
}

criterion_group!(benches, binomials, sides, recurrences, verification, series, guessing);
criterion_main!(benches);
