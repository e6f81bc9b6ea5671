use criterion::{black_box, criterion_group, criterion_main, Criterion};
use polyzeta::bases::{pbw_basis, BasisKind};
use polyzeta::ncalg::{shuffle_words, stuffle_words};
use polyzeta::numeric::{mzv, NumericConfig};
use polyzeta::ratseries::{equal_up_to, parse};
use polyzeta::Word;

fn products(c: &mut Criterion) {
    let (u, v) = (Word::x(&[0, 1, 0, 1, 1]), Word::x(&[0, 0, 1, 1]));
    c.bench_function("shuffle 5x4", |b| b.iter(|| shuffle_words(black_box(&u), black_box(&v))));
    let (u, v) = (Word::y(&[2, 1, 3, 1]), Word::y(&[3, 2, 1]));
    c.bench_function("stuffle 4x3", |b| b.iter(|| stuffle_words(black_box(&u), black_box(&v))));
}

fn bases(c: &mut Criterion) {
    let mut g = c.benchmark_group("pbw grade 6");
    g.sample_size(10);
    for kind in [BasisKind::ShuffleX, BasisKind::StuffleY] {
        g.bench_function(format!("{kind:?}"), |b| b.iter(|| pbw_basis(kind, 6).unwrap()));
    }
    g.finish();
}

fn series(c: &mut Criterion) {
    let lhs = parse("(-t^2 x0.x1)* sh (t^2 x0.x1)*").unwrap();
    let rhs = parse("(-4 t^4 x0.x0.x1.x1)*").unwrap();
    let mut g = c.benchmark_group("rational");
    g.sample_size(10);
    g.bench_function("shuffle star identity to 8", |b| b.iter(|| equal_up_to(&lhs, &rhs, 8).unwrap()));
    g.finish();
}

fn numeric(c: &mut Criterion) {
    let cfg = NumericConfig::default();
    c.bench_function("mzv(2,1,1) 1e5 terms", |b| b.iter(|| mzv(black_box(&[2, 1, 1]), &cfg).unwrap()));
}

criterion_group!(benches, products, bases, series, numeric);
criterion_main!(benches);
