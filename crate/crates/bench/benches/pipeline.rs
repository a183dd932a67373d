//! Benchmarks for the hot paths: symbolic term handling, law checking,
//! rasterization, autoencoder passes, and the coupling map.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use embalg::algebra::{equivalent_term, parse_term, random_term, OperationSymbol};
use embalg::embed::{EmbedArch, EmbedModel};
use embalg::mirrored::{pair_law_profile, riesz_pair, LawCheckConfig, TolerancePolicy};
use embalg::setgen::{rasterize, sample_set_spec};
use embalg::transport::random_latent;
use embalg::{SeedRng, TransportModel};

fn symbolic(c: &mut Criterion) {
    c.bench_function("parse_term_15_vars", |b| {
        let text = "((x1 & x2) | (x3 & x4)) & ((x5 | x6) & (x7 | x8)) | ((x9 & x10) | (x11 & x12)) & (x13 | (x14 & x15))";
        b.iter(|| parse_term(black_box(text)).unwrap())
    });
    c.bench_function("random_term_ell10", |b| {
        let mut rng = SeedRng::new(1);
        b.iter(|| random_term(10, &mut rng))
    });
    c.bench_function("equivalent_term_j8", |b| {
        let mut rng = SeedRng::new(2);
        let term = random_term(10, &mut rng);
        b.iter(|| equivalent_term(black_box(&term), 8, &mut rng))
    });
}

fn law_checking(c: &mut Criterion) {
    c.bench_function("law_profile_riesz_dim64", |b| {
        let config = LawCheckConfig {
            dim: 64,
            num_samples: 64,
            policy: TolerancePolicy::SinglePrecision { atol: 1e-8, rtol: 1e-5 },
        };
        b.iter(|| pair_law_profile(riesz_pair(), black_box(&config), 7).unwrap())
    });
}

fn set_generation(c: &mut Criterion) {
    c.bench_function("rasterize_res32", |b| {
        let mut rng = SeedRng::new(3);
        let spec = sample_set_spec(&mut rng);
        b.iter(|| rasterize(black_box(&spec), 32))
    });
}

fn autoencoder(c: &mut Criterion) {
    let model = EmbedModel::new(EmbedArch::desk(32, 64), 4);
    let mut rng = SeedRng::new(5);
    let grid = rasterize(&sample_set_spec(&mut rng), 32);
    let z = model.encode(&grid);
    let points: Vec<[f64; 2]> = (0..1024)
        .map(|_| [rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)])
        .collect();
    c.bench_function("encode_res32_dim64", |b| b.iter(|| model.encode(black_box(&grid))));
    c.bench_function("decode_1024_points", |b| {
        b.iter(|| model.decode_logits(black_box(&points), black_box(&z)))
    });
}

fn coupling(c: &mut Criterion) {
    let mut rng = SeedRng::new(6);
    let mut model = TransportModel::new(riesz_pair(), 64, 6);
    model.randomize_params(&mut rng);
    let z1 = random_latent(64, &mut rng);
    let z2 = random_latent(64, &mut rng);
    c.bench_function("coupling_round_trip_dim64", |b| {
        b.iter(|| model.phi_inverse(&model.phi_forward(black_box(&z1))))
    });
    c.bench_function("induced_meet_dim64", |b| {
        let meet = OperationSymbol::meet();
        b.iter(|| model.induced_op(&meet, black_box(&z1), black_box(&z2)))
    });
}

criterion_group!(benches, symbolic, law_checking, set_generation, autoencoder, coupling);
criterion_main!(benches);
