//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::time::Instant;

use gcstar::algebra::{c_star_spectrum, operator_norm, GroupoidFunction};
use gcstar::bundle::{counterexample_demo, finite_double_dual_check, verify_phi_iso_up_to, CertificateVerdict};
use gcstar::corpus::{
    abelian_isotropy_corpus, dynamical_corpus, random_groupoid, random_transitive, rng, unitary_corpus,
};
use gcstar::crossed::{crossed_spectrum, invariant_ideal_sequence, unitary_action_check, DynamicalSystem};
use gcstar::groupoid::{orbit_structure, validate, GroupoidTable};
use gcstar::groups::abelian_groups_of_order;
use gcstar::induction::{
    characters, morita_bimodule_check, orthogonality_residual, stone_von_neumann_check, verify_crossed_main_theorem,
    verify_scalar_main_theorem, GroupoidEquivalence,
};
use gcstar::linalg::C64;
use gcstar::{Exec, FiniteGroupoid, NumericOptions};
use rand::Rng;

const BLOCK_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-8;
const IDEAL_TOL: f64 = 1e-8;
const ORTHO_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;
const AXIOM_BUDGET_S: f64 = 30.0;
const PAIR_BUDGET_S: f64 = 1.0;
const SCALAR_BUDGET_S: f64 = 10.0;
const COUNTER_BUDGET_S: f64 = 1.0;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn opts() -> NumericOptions {
    NumericOptions { assert_tol: BLOCK_TOL, ..NumericOptions::default() }
}

/// Changes one entry of the table to a different id in range.
fn mutate<R: Rng>(t: &GroupoidTable, rng: &mut R) -> GroupoidTable {
    let n = t.names.len();
    let mut m = t.clone();
    let other = |v: usize, rng: &mut R| (v + rng.random_range(1..n)) % n;
    match rng.random_range(0..4) {
        0 => {
            let a = rng.random_range(0..n);
            m.range[a] = other(m.range[a], rng);
        }
        1 => {
            let a = rng.random_range(0..n);
            m.source[a] = other(m.source[a], rng);
        }
        2 => {
            let a = rng.random_range(0..n);
            m.inverse[a] = other(m.inverse[a], rng);
        }
        _ => {
            let k = rng.random_range(0..m.mult.len());
            m.mult[k].2 = other(m.mult[k].2, rng);
        }
    }
    m
}

fn c1_axioms() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let (mut valid, mut mutated, mut detected) = (0, 0, 0);
    let mut first_miss = None;
    for i in 0..1000 {
        let g = random_groupoid(&mut r, 60);
        let t = g.table();
        if validate(&t).is_valid() {
            valid += 1;
        }
        if g.len() > 1 {
            for _ in 0..3 {
                let m = mutate(&t, &mut r);
                mutated += 1;
                if !validate(&m).is_valid() {
                    detected += 1;
                } else if first_miss.is_none() {
                    first_miss = Some(i);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        valid == 1000 && detected == mutated && secs < AXIOM_BUDGET_S,
        format!("{valid}/1000 valid, {detected}/{mutated} single-entry mutations detected (first miss {first_miss:?}), {secs:.2}s"),
    )
}

fn c2_pair_groupoids() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for n in [2, 3, 5] {
        let start = Instant::now();
        let g = FiniteGroupoid::pair_groupoid(n).expect("n >= 1");
        let spec = c_star_spectrum(&g, &opts()).expect("spectrum");
        let secs = start.elapsed().as_secs_f64();
        let dims = spec.sorted_dims();
        let sum: usize = dims.iter().map(|d| d * d).sum();
        ok &= dims == [n] && sum == n * n && sum == g.len() && secs < PAIR_BUDGET_S;
        details.push(format!("n={n}: blocks {dims:?}, sum d^2 = {sum}, {secs:.3}s"));
    }
    outcome(ok, details.join("; "))
}

fn c3_cyclic_dft() -> Outcome {
    let mut worst = 0.0f64;
    let mut ok = true;
    for m in 1..=12 {
        let g = FiniteGroupoid::from_group(&gcstar::GroupTable::cyclic(m).expect("m >= 1"));
        let spec = c_star_spectrum(&g, &opts()).expect("spectrum");
        ok &= spec.blocks.len() == m && spec.blocks.iter().all(|b| b.dim == 1);
        // DFT rows: k -> (e^{2 pi i j k / m})_k, matched greedily
        let mut unused: Vec<usize> = (0..m).collect();
        for b in &spec.blocks {
            let tr = b.full_traces(m);
            let dist = |j: usize| {
                (0..m)
                    .map(|k| {
                        let t = TAU * (j * k % m) as f64 / m as f64;
                        (tr[k] - C64::new(t.cos(), t.sin())).norm()
                    })
                    .fold(0.0, f64::max)
            };
            let (pos, d) = unused
                .iter()
                .enumerate()
                .map(|(p, &j)| (p, dist(j)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap_or((0, f64::INFINITY));
            if pos < unused.len() {
                unused.remove(pos);
            }
            worst = worst.max(d);
        }
    }
    outcome(ok && worst < TRACE_TOL, format!("m = 1..12, worst trace deviation from the DFT table {worst:.2e}"))
}

fn c4_stone_von_neumann() -> Outcome {
    let mut r = rng(404);
    let groupoids: Vec<FiniteGroupoid> = (0..50).map(|_| random_groupoid(&mut r, 30)).collect();
    let results = Exec::Parallel.map(&groupoids, |g| {
        let report = stone_von_neumann_check(g, &opts()).expect("svn");
        // oracle: |G_u| by scanning sources
        let mut expected: HashMap<String, Vec<usize>> = HashMap::new();
        for &u in g.units() {
            let count = g.elements().filter(|&x| g.source(x) == u).count();
            expected.insert(g.name(u).to_string(), vec![count]);
        }
        let found: HashMap<String, Vec<usize>> = report.found.iter().cloned().collect();
        (found == expected && report.passed, g.len())
    });
    let good = results.iter().filter(|r| r.0).count();
    let largest = results.iter().map(|r| r.1).max().unwrap_or(0);
    outcome(good == 50, format!("{good}/50 groupoids (|G| <= {largest}) give one block of dim |G_u| per unit"))
}

fn c5_transitive_morita() -> Outcome {
    let mut r = rng(505);
    let groupoids: Vec<FiniteGroupoid> = (0..20).map(|_| random_transitive(&mut r, 30)).collect();
    let results = Exec::Parallel.map(&groupoids, |g| {
        let u = g.units()[0];
        let (h, x) = GroupoidEquivalence::from_subgroupoid(g, &g.isotropy(u)).expect("G_u is an equivalence");
        let report = morita_bimodule_check(g, &h, &x, &opts()).expect("morita");
        let quotient = g.units().len();
        let mut scaled: Vec<usize> = report.h_block_dims.iter().map(|d| d * quotient).collect();
        scaled.sort_unstable();
        let key = |name: &str| report.checks.iter().any(|c| c.check.starts_with(name) && c.passed());
        let ok = report.passed && scaled == report.g_block_dims && key("positivity") && key("fullness");
        (ok, format!("{:?} vs {:?} x {quotient}", report.g_block_dims, report.h_block_dims))
    });
    let good = results.iter().filter(|r| r.0).count();
    let bad: Vec<&String> = results.iter().filter(|r| !r.0).map(|r| &r.1).collect();
    outcome(good == 20, format!("{good}/20 transitive groupoids; failures {bad:?}"))
}

fn c6_scalar_main_theorem() -> Outcome {
    let corpus = abelian_isotropy_corpus();
    let results = Exec::Parallel.map(&corpus, |(name, g)| {
        let start = Instant::now();
        let report = verify_scalar_main_theorem(g, &opts()).expect("abelian isotropy");
        let secs = start.elapsed().as_secs_f64();
        (report.passed && secs < SCALAR_BUDGET_S, name.clone(), secs)
    });
    let good = results.iter().filter(|r| r.0).count();
    let slowest = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let bad: Vec<&String> = results.iter().filter(|r| !r.0).map(|r| &r.1).collect();
    outcome(
        good == corpus.len() && corpus.len() >= 30,
        format!("{good}/{} instances pass all clauses, slowest {slowest:.2}s; failures {bad:?}", corpus.len()),
    )
}

fn c7_crossed_main_theorem() -> Outcome {
    let corpus = dynamical_corpus(707).expect("corpus");
    let results = Exec::Parallel.map(&corpus, |(name, sys)| {
        let report = verify_crossed_main_theorem(sys, &opts()).expect("crossed theorem");
        let mut dims = crossed_spectrum(sys, &opts()).expect("spectrum").sorted_dims();
        dims.sort_unstable();
        let mut induced = report.induced_dims.clone();
        induced.sort_unstable();
        (report.passed && induced == dims && report.orbits.len() == dims.len(), name.clone())
    });
    let good = results.iter().filter(|r| r.0).count();
    let bad: Vec<&String> = results.iter().filter(|r| !r.0).map(|r| &r.1).collect();
    outcome(good == corpus.len() && corpus.len() >= 10, format!("{good}/{} systems; failures {bad:?}", corpus.len()))
}

fn c8_unitary_collapse() -> Outcome {
    let corpus = unitary_corpus(808).expect("corpus");
    let results = Exec::Parallel.map(&corpus, |(name, action)| {
        let report = unitary_action_check(action, &opts()).expect("unitary check");
        let exact = report.fibers.iter().all(|f| f.twisted_dims == f.tensor_dims);
        (report.passed && exact, name.clone())
    });
    let good = results.iter().filter(|r| r.0).count();
    let bad: Vec<&String> = results.iter().filter(|r| !r.0).map(|r| &r.1).collect();
    outcome(good == corpus.len() && corpus.len() >= 10, format!("{good}/{} actions; failures {bad:?}", corpus.len()))
}

fn c9_invariant_ideals() -> Outcome {
    let mut systems: Vec<(String, DynamicalSystem)> = dynamical_corpus(909).expect("corpus");
    systems.extend(abelian_isotropy_corpus().into_iter().map(|(n, g)| (n, DynamicalSystem::scalar(g))));
    let results = Exec::Parallel.map(&systems, |(name, sys)| {
        let orbits = orbit_structure(sys.groupoid()).orbits;
        if orbits.len() > 3 {
            return (true, 0, 0.0, name.clone());
        }
        let mut ok = true;
        let mut worst = 0.0f64;
        let mut count = 0;
        for mask in 0..(1usize << orbits.len()) {
            let subset: Vec<_> = (0..orbits.len()).filter(|k| mask >> k & 1 == 1).flat_map(|k| orbits[k].clone()).collect();
            let r = invariant_ideal_sequence(sys, &subset, &opts()).expect("invariant subset");
            ok &= r.passed && r.additive && r.dim_ideal + r.dim_quotient == r.dim_total;
            worst = worst.max(r.ideal_residual);
            count += 1;
        }
        (ok && worst < IDEAL_TOL, count, worst, name.clone())
    });
    let good = results.iter().filter(|r| r.0).count();
    let subsets: usize = results.iter().map(|r| r.1).sum();
    let worst = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let bad: Vec<&String> = results.iter().filter(|r| !r.0).map(|r| &r.3).collect();
    outcome(
        good == systems.len(),
        format!("{subsets} invariant subsets over {} systems, worst ideal residual {worst:.2e}; failures {bad:?}", systems.len()),
    )
}

fn c10_counterexample() -> Outcome {
    let start = Instant::now();
    let iso = verify_phi_iso_up_to(50, Exec::Parallel).expect("N >= 1");
    let demo = counterexample_demo(50).expect("N >= 2");
    let secs = start.elapsed().as_secs_f64();
    let within = demo.rows.iter().all(|row| row.distance <= 2.0 / row.n as f64);
    let gap = match demo.preimage.verdict {
        CertificateVerdict::CertifiedEscaping { lower_bound } => lower_bound,
        _ => 0.0,
    };
    outcome(
        iso.passed && within && demo.image.is_convergent() && gap >= 2.0 && secs < COUNTER_BUDGET_S,
        format!(
            "phi iso on T_0..T_50: {}, image distance <= 2/n: {within}, preimage gap {gap:.4}, {secs:.3}s",
            iso.passed
        ),
    )
}

fn c11_duality() -> Outcome {
    let orders: Vec<usize> = (1..=100).collect();
    let results = Exec::Parallel.map(&orders, |&n| {
        let groups = abelian_groups_of_order(n).expect("n >= 1");
        let mut ok = true;
        let mut worst = 0.0f64;
        for (_, g) in &groups {
            ok &= finite_double_dual_check(g).expect("abelian").passed;
            worst = worst.max(orthogonality_residual(&characters(g).expect("abelian")));
        }
        (ok, groups.len(), worst)
    });
    let groups: usize = results.iter().map(|r| r.1).sum();
    let worst = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let ok = results.iter().all(|r| r.0);
    outcome(ok && worst < ORTHO_TOL, format!("{groups} abelian groups of order <= 100, orthogonality residual {worst:.2e}"))
}

fn c12_norms() -> Outcome {
    let corpus = abelian_isotropy_corpus();
    let results = Exec::Parallel.map(&corpus, |(name, g)| {
        let mut r = rng(1212 ^ g.len() as u64);
        let orbits = orbit_structure(g);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let f = GroupoidFunction::random(g, &mut r);
            let h = GroupoidFunction::random(g, &mut r);
            let (nf, nh) = (f.i_norm(), h.i_norm());
            worst = worst.max(f.convolve(&h).expect("same groupoid").i_norm() - nf * nh);
            worst = worst.max((f.involute().i_norm() - nf).abs());
            worst = worst.max(operator_norm(&f, &orbits) - nf);
        }
        (worst, name.clone())
    });
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    outcome(worst < NORM_TOL, format!("1000 pairs on each of {} groupoids, worst violation {worst:.2e}", corpus.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("axiom suite", c1_axioms),
        ("pair groupoid spectra", c2_pair_groupoids),
        ("cyclic group traces", c3_cyclic_dft),
        ("Stone-von Neumann", c4_stone_von_neumann),
        ("transitive Morita", c5_transitive_morita),
        ("scalar main theorem", c6_scalar_main_theorem),
        ("crossed main theorem", c7_crossed_main_theorem),
        ("unitary collapse", c8_unitary_collapse),
        ("invariant ideals", c9_invariant_ideals),
        ("counterexample", c10_counterexample),
        ("duality", c11_duality),
        ("norm inequalities", c12_norms),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
        if !o.ok {
            failed += 1;
        }
    }
    println!("acceptance: {}/12 criteria pass", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
