use gcstar::algebra::{c_star_spectrum, GroupoidFunction, RegularModel};
use gcstar::corpus::{random_groupoid, rng};
use gcstar::linalg::{max_abs, random_unitary, zeros};
use gcstar::star_algebra::wedderburn;
use gcstar::{FiniteGroupoid, NumericOptions};
use proptest::prelude::*;

const EXACT: f64 = 1e-12;
const BLOCK: f64 = 1e-8;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_is_an_associative_star_algebra(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_groupoid(&mut r, 30);
        let f = GroupoidFunction::random(&g, &mut r);
        let h = GroupoidFunction::random(&g, &mut r);
        let k = GroupoidFunction::random(&g, &mut r);
        let left = f.convolve(&h).unwrap().convolve(&k).unwrap();
        let right = f.convolve(&h.convolve(&k).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < EXACT);
        let star = f.convolve(&h).unwrap().involute();
        let flipped = h.involute().convolve(&f.involute()).unwrap();
        prop_assert!(star.max_abs_diff(&flipped) < EXACT);
    }

    #[test]
    fn regular_model_is_a_faithful_star_representation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_groupoid(&mut r, 30);
        let model = RegularModel::full(&g);
        let f = GroupoidFunction::random(&g, &mut r);
        let h = GroupoidFunction::random(&g, &mut r);
        let lf = model.embed(&f).unwrap();
        let lh = model.embed(&h).unwrap();
        prop_assert!(max_abs(&(model.embed(&f.convolve(&h).unwrap()).unwrap() - &lf * &lh)) < 1e-10);
        prop_assert!(max_abs(&(model.embed(&f.involute()).unwrap() - lf.adjoint())) < 1e-12);
        // dim C*(G) = |G|: the delta images are linearly independent
        let alg = model.algebra().unwrap();
        prop_assert_eq!(alg.dim(), g.len());
    }

    #[test]
    fn wedderburn_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_groupoid(&mut r, 24);
        let alg = RegularModel::full(&g).algebra().unwrap();
        let opts = NumericOptions::default().with_seed(seed);
        let dec = wedderburn(&alg, &opts).unwrap();
        prop_assert_eq!(dec.sum_of_squares(), alg.dim());
        let n = alg.ambient_dim();
        let mut total = zeros(n, n);
        for (i, b) in dec.blocks.iter().enumerate() {
            let p = &b.projection;
            prop_assert!(max_abs(&(p * p - p)) < BLOCK);
            prop_assert!(max_abs(&(p.adjoint() - p)) < BLOCK);
            for q in &dec.blocks[i + 1..] {
                prop_assert!(max_abs(&(p * &q.projection)) < BLOCK);
            }
            total += p;
        }
        prop_assert!(max_abs(&(total - alg.unit(1e-9))) < BLOCK);
        // conjugating every basis matrix by a unitary leaves the block data unchanged
        let u = random_unitary(n, &mut r);
        let mut before = dec.dims();
        let mut after = wedderburn(&alg.conjugated(&u), &opts).unwrap().dims();
        before.sort_unstable();
        after.sort_unstable();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn spectrum_dimension_count(seed in any::<u64>()) {
        let g = random_groupoid(&mut rng(seed), 40);
        let spec = c_star_spectrum(&g, &NumericOptions::default()).unwrap();
        let sum: usize = spec.blocks.iter().map(|b| b.dim * b.dim).sum();
        prop_assert_eq!(sum, g.len());
    }
}

#[test]
fn pair_groupoids_have_one_block() {
    for n in 1..=6 {
        let g = FiniteGroupoid::pair_groupoid(n).unwrap();
        assert_eq!(c_star_spectrum(&g, &NumericOptions::default()).unwrap().sorted_dims(), vec![n]);
    }
}
