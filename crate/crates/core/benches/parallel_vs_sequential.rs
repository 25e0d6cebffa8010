use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gcstar::algebra::c_star_spectrum;
use gcstar::bundle::verify_phi_iso_up_to;
use gcstar::corpus::{abelian_isotropy_corpus, dynamical_corpus, union_system};
use gcstar::crossed::crossed_spectrum;
use gcstar::induction::verify_scalar_main_theorem;
use gcstar::{Exec, FiniteGroupoid, GroupTable, NumericOptions};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

/// Many orbits of moderate size: the per-orbit loops have work to split.
fn many_orbits() -> FiniteGroupoid {
    let parts: Vec<FiniteGroupoid> = (0..6)
        .flat_map(|_| {
            [
                FiniteGroupoid::pair_groupoid(5).unwrap(),
                FiniteGroupoid::product(&FiniteGroupoid::pair_groupoid(2).unwrap(), &FiniteGroupoid::from_group(&GroupTable::symmetric(3).unwrap())),
            ]
        })
        .collect();
    FiniteGroupoid::disjoint_union(&parts.iter().collect::<Vec<_>>())
}

fn spectra(c: &mut Criterion) {
    let g = many_orbits();
    let mut group = c.benchmark_group("c_star_spectrum");
    for (name, exec) in MODES {
        let opts = NumericOptions::default().with_exec(exec);
        group.bench_with_input(BenchmarkId::new(name, g.len()), &g, |b, g| b.iter(|| c_star_spectrum(black_box(g), &opts).unwrap()));
    }
    group.finish();
}

fn crossed(c: &mut Criterion) {
    let corpus = dynamical_corpus(1).unwrap();
    let parts: Vec<_> = corpus.iter().map(|(_, s)| s).collect();
    let sys = union_system(&parts).unwrap();
    let mut group = c.benchmark_group("crossed_spectrum");
    group.sample_size(20);
    for (name, exec) in MODES {
        let opts = NumericOptions::default().with_exec(exec);
        group.bench_function(name, |b| b.iter(|| crossed_spectrum(black_box(&sys), &opts).unwrap()));
    }
    group.finish();
}

fn corpus_sweep(c: &mut Criterion) {
    let corpus = abelian_isotropy_corpus();
    let mut group = c.benchmark_group("scalar_main_theorem_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = NumericOptions::default().with_exec(exec);
        group.bench_function(name, |b| {
            b.iter(|| exec.map(&corpus, |(_, g)| verify_scalar_main_theorem(g, &opts).unwrap().passed))
        });
    }
    group.finish();
}

fn phi_fibers(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_phi_iso_up_to_50");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| verify_phi_iso_up_to(black_box(50), exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, spectra, crossed, corpus_sweep, phi_fibers);
criterion_main!(benches);
