use gcstar::algebra::GroupoidFunction;
use gcstar::corpus::{dynamical_corpus, random_groupoid, rng, unitary_corpus};
use gcstar::crossed::{
    convolve_sections, crossed_product_model, group_bundle_fibering, involute_section, invariant_ideal_sequence,
    unitary_action_check, DynamicalSystem, Section,
};
use gcstar::groupoid::{orbit_structure, stabilizer_subgroupoid};
use gcstar::linalg::ComplexMatrix;
use gcstar::NumericOptions;
use proptest::prelude::*;

const EXACT: f64 = 1e-12;

fn corpus() -> Vec<(String, DynamicalSystem)> {
    dynamical_corpus(31).unwrap()
}

#[test]
fn model_dimension_counts_fiber_squares() {
    for (name, sys) in corpus() {
        let g = sys.groupoid();
        let expected: usize = g.elements().map(|x| sys.dim_at(g.range(x)).pow(2)).sum();
        let (_, alg) = crossed_product_model(&sys).unwrap();
        assert_eq!(alg.dim(), expected, "{name}");
        assert_eq!(sys.crossed_dim(), expected, "{name}");
    }
}

#[test]
fn sections_form_a_star_algebra() {
    let mut r = rng(5);
    for (name, sys) in corpus() {
        let f = Section::random(&sys, &mut r);
        let h = Section::random(&sys, &mut r);
        let k = Section::random(&sys, &mut r);
        let left = convolve_sections(&convolve_sections(&f, &h).unwrap(), &k).unwrap();
        let right = convolve_sections(&f, &convolve_sections(&h, &k).unwrap()).unwrap();
        assert!(left.max_abs_diff(&right) < EXACT, "{name}");
        let star = involute_section(&convolve_sections(&f, &h).unwrap());
        let flipped = convolve_sections(&involute_section(&h), &involute_section(&f)).unwrap();
        assert!(star.max_abs_diff(&flipped) < EXACT, "{name}");
    }
}

#[test]
fn fibering_adds_up() {
    for (name, sys) in corpus() {
        let g = sys.groupoid();
        let iso: Vec<usize> = g.units().iter().flat_map(|&u| g.isotropy(u)).collect();
        let stab = stabilizer_subgroupoid(g).embedded;
        let restricted = sys.restrict(&stab).unwrap();
        let report = group_bundle_fibering(&restricted, &NumericOptions::default()).unwrap();
        let expected: usize = iso.iter().map(|&x| sys.dim_at(g.range(x)).pow(2)).sum();
        assert!(report.passed, "{name}");
        assert_eq!(report.total_dim, expected, "{name}");
        assert_eq!(report.fibers.iter().map(|f| f.algebra_dim).sum::<usize>(), expected, "{name}");
    }
}

#[test]
fn unitary_actions_collapse() {
    for (name, action) in unitary_corpus(32).unwrap() {
        let report = unitary_action_check(&action, &NumericOptions::default()).unwrap();
        assert!(report.passed, "{name}");
        for f in &report.fibers {
            assert_eq!(f.twisted_dims, f.tensor_dims, "{name} at {}", f.unit);
        }
    }
}

#[test]
fn invariant_ideals_are_exact() {
    for (name, sys) in corpus() {
        let orbits = orbit_structure(sys.groupoid()).orbits;
        for mask in 0..(1usize << orbits.len()) {
            let subset: Vec<_> =
                (0..orbits.len()).filter(|k| mask >> k & 1 == 1).flat_map(|k| orbits[k].clone()).collect();
            let r = invariant_ideal_sequence(&sys, &subset, &NumericOptions::default()).unwrap();
            assert!(r.passed, "{name} {subset:?}");
            assert_eq!(r.dim_ideal + r.dim_quotient, r.dim_total, "{name}");
            assert!(r.ideal_residual < 1e-8, "{name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_fibers_reduce_bitwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_groupoid(&mut r, 30);
        let sys = DynamicalSystem::scalar(g.clone());
        let f = GroupoidFunction::random(&g, &mut r);
        let h = GroupoidFunction::random(&g, &mut r);
        let lift = |f: &GroupoidFunction| {
            let values = f.values().iter().map(|&z| ComplexMatrix::from_element(1, 1, z)).collect();
            Section::new(&sys, values).unwrap()
        };
        let conv = convolve_sections(&lift(&f), &lift(&h)).unwrap();
        let expected = f.convolve(&h).unwrap();
        let inv = involute_section(&lift(&f));
        let f_star = f.involute();
        for x in g.elements() {
            prop_assert_eq!(conv.at(x)[(0, 0)], expected.at(x));
            prop_assert_eq!(inv.at(x)[(0, 0)], f_star.at(x));
        }
    }
}
