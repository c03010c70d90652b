use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use attrnoise::experiment::{run_trial, ExperimentConfig};
use attrnoise::ingest::{default_data_dir, DatasetId};
use attrnoise::solvers::{exact_minimize_zero_one_2d, grid_minimize_zero_one, GridSpec, Parameterization, SeparatorFamily};
use attrnoise::verify::{square_population, SQUARE_WEIGHTS};
use attrnoise::{corrupt_population, fit_squared_population, NoiseSpec, PopulationDistribution};

fn cube_population(n: usize) -> PopulationDistribution {
    let atoms = (0..1u32 << n).map(|bits| {
        let x: Vec<i8> = (0..n).map(|j| if bits >> j & 1 == 1 { 1 } else { -1 }).collect();
        let y = if bits.count_ones() % 3 == 0 { 1 } else { -1 };
        (x, y, f64::from(bits % 7 + 1))
    });
    PopulationDistribution::new(atoms).unwrap()
}

fn zero_one(c: &mut Criterion) {
    let d = square_population(SQUARE_WEIGHTS, [1, -1, -1, 1]).unwrap();
    let noisy = corrupt_population(&d, &NoiseSpec::asy_in(vec![0.12, 0.23]).unwrap()).unwrap();
    let coarse = GridSpec::default();
    let fine = GridSpec::square(-5.0, 5.0, 0.01).unwrap();
    c.bench_function("grid 0.1 noisy square", |b| {
        b.iter(|| grid_minimize_zero_one(black_box(&noisy), &coarse, Parameterization::UnitSecondWeight).unwrap())
    });
    c.bench_function("grid 0.01 noisy square", |b| {
        b.iter(|| grid_minimize_zero_one(black_box(&noisy), &fine, Parameterization::UnitSecondWeight).unwrap())
    });
    c.bench_function("oracle affine noisy square", |b| {
        b.iter(|| exact_minimize_zero_one_2d(black_box(&noisy), SeparatorFamily::Affine).unwrap())
    });
}

fn populations(c: &mut Criterion) {
    let d = cube_population(10);
    let asy = NoiseSpec::asy_in(vec![0.1; 10]).unwrap();
    let sy = NoiseSpec::sy_de(0.2).unwrap();
    c.bench_function("corrupt asy-in n=10 full cube", |b| b.iter(|| corrupt_population(black_box(&d), &asy).unwrap()));
    c.bench_function("corrupt sy-de n=10 full cube", |b| b.iter(|| corrupt_population(black_box(&d), &sy).unwrap()));
    c.bench_function("squared fit n=10 full cube", |b| b.iter(|| fit_squared_population(black_box(&d)).unwrap()));
}

fn trials(c: &mut Criterion) {
    let s = DatasetId::Krkp.load(&default_data_dir()).unwrap();
    let cfg = ExperimentConfig::new("krkp");
    c.bench_function("krkp trial p=0.3", |b| b.iter(|| run_trial(black_box(&s), 0.3, 7, &cfg).unwrap()));
}

criterion_group!(benches, zero_one, populations, trials);
criterion_main!(benches);
