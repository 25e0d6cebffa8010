//! Seeded generators for test corpora: random constructor-built groupoids, groupoids with
//! abelian isotropy, dynamical systems on small fibers and unitary actions on group bundles.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::crossed::{DynamicalSystem, UnitaryBundleAction};
use crate::error::Result;
use crate::groupoid::{FiniteGroupoid, GroupoidActionOnSet};
use crate::groups::GroupTable;
use crate::linalg::{c, diag, identity, random_unitary, zeros, ComplexMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn catalogue() -> Vec<GroupTable> {
    let mut out: Vec<GroupTable> = (1..=12).map(|m| GroupTable::cyclic(m).expect("cyclic")).collect();
    out.extend((3..=6).map(|k| GroupTable::dihedral(k).expect("dihedral")));
    out.push(GroupTable::symmetric(3).expect("S3"));
    for f in [&[2, 2][..], &[2, 4], &[2, 2, 2], &[3, 3], &[2, 6]] {
        out.push(GroupTable::abelian(f).expect("abelian"));
    }
    out
}

/// A group of order at most `max_order` from a fixed catalogue.
pub fn random_group<R: Rng>(rng: &mut R, max_order: usize) -> GroupTable {
    let fits: Vec<GroupTable> = catalogue().into_iter().filter(|g| g.order() <= max_order.max(1)).collect();
    fits.choose(rng).expect("Z1 always fits").clone()
}

/// The action of `group` on the disjoint union of the coset spaces `G/<gens_i>`.
pub fn coset_union(group: &GroupTable, subgroups: &[Vec<usize>]) -> Result<GroupoidActionOnSet> {
    let mut points = Vec::new();
    let mut perms = vec![Vec::new(); group.order()];
    for (k, gens) in subgroups.iter().enumerate() {
        let a = GroupoidActionOnSet::coset_action(group, gens)?;
        let offset = points.len();
        points.extend(a.points().iter().map(|p| format!("{p}.{k}")));
        for (g, perm) in perms.iter_mut().enumerate() {
            perm.extend((0..a.num_points()).map(|x| a.act(g, x).expect("group action") + offset));
        }
    }
    GroupoidActionOnSet::from_permutations(group, points, perms)
}

fn random_subgroup_gens<R: Rng>(rng: &mut R, group: &GroupTable) -> Vec<usize> {
    let k = rng.random_range(0..=2);
    (0..k).map(|_| rng.random_range(0..group.order())).collect()
}

/// A transformation groupoid of a random group acting on a union of coset spaces.
pub fn random_transformation_groupoid<R: Rng>(rng: &mut R, max: usize) -> FiniteGroupoid {
    loop {
        let group = random_group(rng, max);
        let parts = rng.random_range(1..=3);
        let subgroups: Vec<Vec<usize>> = (0..parts).map(|_| random_subgroup_gens(rng, &group)).collect();
        let act = coset_union(&group, &subgroups).expect("coset actions are actions");
        if group.order() * act.num_points() <= max {
            return FiniteGroupoid::transformation_groupoid(&act);
        }
    }
}

/// A random constructor-built groupoid with at most `max` elements (`max >= 1`).
pub fn random_groupoid<R: Rng>(rng: &mut R, max: usize) -> FiniteGroupoid {
    loop {
        let g = match rng.random_range(0..8) {
            0 => FiniteGroupoid::from_group(&random_group(rng, max)),
            1 => FiniteGroupoid::pair_groupoid(rng.random_range(1..=7)).expect("n >= 1"),
            2 => FiniteGroupoid::cotrivial(rng.random_range(1..=8)).expect("n >= 1"),
            3 => {
                let k = rng.random_range(1..=4);
                let base: Vec<String> = (0..k).map(|i| format!("p{i}")).collect();
                let fibers: Vec<GroupTable> = (0..k).map(|_| random_group(rng, (max / k).max(1))).collect();
                FiniteGroupoid::group_bundle(&base, &fibers).expect("one fiber per point")
            }
            4 => random_transformation_groupoid(rng, max),
            5 if max >= 2 => {
                let a = random_groupoid(rng, max / 2);
                let b = random_groupoid(rng, max - a.len());
                FiniteGroupoid::disjoint_union(&[&a, &b])
            }
            6 if max >= 4 => {
                let a = random_groupoid(rng, 8.min(max / 2));
                let b = random_groupoid(rng, (max / a.len()).max(1));
                FiniteGroupoid::product(&a, &b)
            }
            _ => {
                let n = rng.random_range(1..=4);
                let group = random_group(rng, (max / (n * n)).max(1));
                FiniteGroupoid::product(&FiniteGroupoid::pair_groupoid(n).expect("n >= 1"), &FiniteGroupoid::from_group(&group))
            }
        };
        if g.len() <= max {
            return g;
        }
    }
}

/// A random transitive groupoid with at most `max` elements.
pub fn random_transitive<R: Rng>(rng: &mut R, max: usize) -> FiniteGroupoid {
    loop {
        let g = match rng.random_range(0..3) {
            0 => {
                let group = random_group(rng, max);
                let gens = random_subgroup_gens(rng, &group);
                let act = GroupoidActionOnSet::coset_action(&group, &gens).expect("coset action");
                FiniteGroupoid::transformation_groupoid(&act)
            }
            1 => FiniteGroupoid::pair_groupoid(rng.random_range(1..=5)).expect("n >= 1"),
            _ => {
                let n = rng.random_range(1..=4);
                let group = random_group(rng, (max / (n * n)).max(1));
                FiniteGroupoid::product(&FiniteGroupoid::pair_groupoid(n).expect("n >= 1"), &FiniteGroupoid::from_group(&group))
            }
        };
        if g.len() <= max {
            return g;
        }
    }
}

fn abelian_catalogue() -> Vec<(String, GroupTable)> {
    let mut out: Vec<(String, GroupTable)> =
        (1..=8).map(|m| (format!("Z{m}"), GroupTable::cyclic(m).expect("cyclic"))).collect();
    for (name, f) in [("Z2xZ2", &[2, 2][..]), ("Z2xZ4", &[2, 4]), ("Z2xZ2xZ2", &[2, 2, 2])] {
        out.push((name.into(), GroupTable::abelian(f).expect("abelian")));
    }
    out
}

/// Groupoids with abelian isotropy: transformation groupoids of abelian groups of order
/// at most 8 on at most 6 points, group bundles of abelian groups and disjoint unions.
pub fn abelian_isotropy_corpus() -> Vec<(String, FiniteGroupoid)> {
    let mut out = Vec::new();
    for (name, group) in abelian_catalogue() {
        // distinct cyclic subgroups, listed by a generator
        let mut subgroups: Vec<(usize, Vec<usize>)> = Vec::new();
        for g in 0..group.order() {
            let h = group.generated_subgroup(&[g]);
            if !subgroups.iter().any(|(_, k)| *k == h) {
                subgroups.push((g, h));
            }
        }
        let index = |h: &Vec<usize>| group.order() / h.len();
        let mut actions: Vec<(String, Vec<Vec<usize>>)> = Vec::new();
        for (g, h) in &subgroups {
            if index(h) <= 6 && index(h) > 1 {
                actions.push((format!("{name}/<{g}>"), vec![vec![*g]]));
            }
        }
        // two orbits: the largest proper quotient alongside a fixed point
        if let Some((g, _)) = subgroups.iter().filter(|(_, h)| index(h) > 1 && index(h) <= 5).min_by_key(|(_, h)| h.len()) {
            actions.push((format!("{name}/<{g}>+pt"), vec![vec![*g], (0..group.order()).collect()]));
        }
        for (label, subs) in actions {
            let act = coset_union(&group, &subs).expect("coset action");
            out.push((format!("{label} on {} points", act.num_points()), FiniteGroupoid::transformation_groupoid(&act)));
        }
    }
    let z = |m| GroupTable::cyclic(m).expect("cyclic");
    let pts = |k: usize| (0..k).map(|i| format!("p{i}")).collect::<Vec<_>>();
    let bundles = [
        ("bundle Z2,Z3", vec![z(2), z(3)]),
        ("bundle Z4,Z2xZ2", vec![z(4), GroupTable::abelian(&[2, 2]).expect("abelian")]),
        ("bundle Z1,Z5,Z6", vec![z(1), z(5), z(6)]),
        ("bundle Z2 x3", vec![z(2), z(2), z(2)]),
    ];
    for (label, fibers) in bundles {
        out.push((label.into(), FiniteGroupoid::group_bundle(&pts(fibers.len()), &fibers).expect("bundle")));
    }
    let parity = FiniteGroupoid::transformation_groupoid(&coset_union(&z(4), &[vec![2]]).expect("coset"));
    let pair = FiniteGroupoid::pair_groupoid(3).expect("pair");
    let z3 = FiniteGroupoid::from_group(&z(3));
    let cot = FiniteGroupoid::cotrivial(2).expect("cotrivial");
    out.push(("parity u pair(3)".into(), FiniteGroupoid::disjoint_union(&[&parity, &pair])));
    out.push(("Z3 u cotrivial(2)".into(), FiniteGroupoid::disjoint_union(&[&z3, &cot])));
    out.push(("pair(2) x Z3".into(), FiniteGroupoid::product(&FiniteGroupoid::pair_groupoid(2).expect("pair"), &z3)));
    out
}

/// Unitary representation of `group` by permutation matrices on `G/<gens>`.
pub fn permutation_rep(group: &GroupTable, gens: &[usize]) -> Result<Vec<ComplexMatrix>> {
    let act = GroupoidActionOnSet::coset_action(group, gens)?;
    let d = act.num_points();
    Ok((0..group.order())
        .map(|g| {
            let mut m = zeros(d, d);
            for x in 0..d {
                m[(act.act(g, x).expect("group action"), x)] = c(1.0, 0.0);
            }
            m
        })
        .collect())
}

/// `k -> diag(zeta^(k e_1), zeta^(k e_2), ...)` for `Z_m`, `zeta = e^{2 pi i / m}`.
pub fn cyclic_rep(m: usize, exponents: &[usize]) -> Vec<ComplexMatrix> {
    (0..m)
        .map(|k| {
            let phases: Vec<_> = exponents
                .iter()
                .map(|&e| {
                    let t = std::f64::consts::TAU * (k * e % m) as f64 / m as f64;
                    c(t.cos(), t.sin())
                })
                .collect();
            diag(&phases)
        })
        .collect()
}

/// `Gamma x| X` with `U_(g, x) = W_x V(g) W_{g^-1 x}^*` for a unitary representation `V`
/// and random unitaries `W_x`.
pub fn transformation_system<R: Rng>(act: &GroupoidActionOnSet, v: &[ComplexMatrix], rng: &mut R) -> Result<DynamicalSystem> {
    let g = FiniteGroupoid::transformation_groupoid(act);
    let order = act.groupoid().len();
    let d = v[0].nrows();
    let w: Vec<ComplexMatrix> = (0..act.num_points()).map(|_| random_unitary(d, rng)).collect();
    // elements are listed point by point, group elements in id order
    let unitaries = g
        .elements()
        .map(|e| {
            let (x, a) = (e / order, e % order);
            let y = act.act(act.groupoid().inverse(a), x).expect("group action");
            &w[x] * &v[a] * w[y].adjoint()
        })
        .collect();
    DynamicalSystem::new(g, vec![d; act.num_points()], unitaries)
}

/// Disjoint union of systems, element and unit ids concatenated.
pub fn union_system(parts: &[&DynamicalSystem]) -> Result<DynamicalSystem> {
    let groupoids: Vec<&FiniteGroupoid> = parts.iter().map(|s| s.groupoid()).collect();
    let g = FiniteGroupoid::disjoint_union(&groupoids);
    let dims = parts.iter().flat_map(|s| s.fibers().dims.iter().copied()).collect();
    let unitaries = parts.iter().flat_map(|s| s.unitaries().iter().cloned()).collect();
    DynamicalSystem::new(g, dims, unitaries)
}

/// At least ten dynamical systems with fiber dimensions at most 3 and `|G| <= 20`.
pub fn dynamical_corpus(seed: u64) -> Result<Vec<(String, DynamicalSystem)>> {
    let mut rng = rng(seed);
    let z = |m| GroupTable::cyclic(m).expect("cyclic");
    let s3 = GroupTable::symmetric(3)?;
    let d4 = GroupTable::dihedral(4)?;
    let v4 = GroupTable::abelian(&[2, 2])?;
    let mut out = Vec::new();
    let mut push = |name: &str, s: DynamicalSystem| out.push((name.to_string(), s));

    let swap = transformation_system(&GroupoidActionOnSet::coset_action(&z(2), &[])?, &permutation_rep(&z(2), &[])?, &mut rng)?;
    push("Z2 swap on 2 points, M2", swap.clone());
    push(
        "Z3 rotation on 3 points, M3",
        transformation_system(&GroupoidActionOnSet::coset_action(&z(3), &[])?, &permutation_rep(&z(3), &[])?, &mut rng)?,
    );
    push("Z4 parity on 2 points, M2", transformation_system(&coset_union(&z(4), &[vec![2]])?, &cyclic_rep(4, &[0, 1]), &mut rng)?);
    let transposition = (0..6).find(|&g| s3.element_order(g) == 2).expect("S3 has a transposition");
    push(
        "S3 on 3 points, M3",
        transformation_system(&GroupoidActionOnSet::coset_action(&s3, &[transposition])?, &permutation_rep(&s3, &[transposition])?, &mut rng)?,
    );
    let three = (0..6).find(|&g| s3.element_order(g) == 3).expect("S3 has a 3-cycle");
    push(
        "S3 sign on 2 points, M2",
        transformation_system(&GroupoidActionOnSet::coset_action(&s3, &[three])?, &permutation_rep(&s3, &[three])?, &mut rng)?,
    );
    let v4_rep: Vec<ComplexMatrix> = (0..4)
        .map(|g| {
            let s = |b: bool| c(if b { -1.0 } else { 1.0 }, 0.0);
            diag(&[s(false), s(g & 1 == 1), s(g & 2 == 2)])
        })
        .collect();
    push("Z2xZ2 on 2 points, M3", transformation_system(&coset_union(&v4, &[vec![1]])?, &v4_rep, &mut rng)?);
    let rotation = (0..8).find(|&g| d4.element_order(g) == 4).expect("D4 has a rotation");
    push(
        "D4 on 2 points, M2",
        transformation_system(&GroupoidActionOnSet::coset_action(&d4, &[rotation])?, &permutation_rep(&d4, &[rotation])?, &mut rng)?,
    );
    push("Z6 on 3 points, M2", transformation_system(&coset_union(&z(6), &[vec![3]])?, &cyclic_rep(6, &[0, 1]), &mut rng)?);
    let w3: Vec<ComplexMatrix> = (0..3).map(|_| random_unitary(2, &mut rng)).collect();
    push("coboundary on pair(3), M2", DynamicalSystem::coboundary(FiniteGroupoid::pair_groupoid(3)?, &w3)?);
    let w2: Vec<ComplexMatrix> = (0..2).map(|_| random_unitary(3, &mut rng)).collect();
    push("coboundary on pair(2), M3", DynamicalSystem::coboundary(FiniteGroupoid::pair_groupoid(2)?, &w2)?);
    let bundle = FiniteGroupoid::group_bundle(&["a".into(), "b".into()], &[z(2), z(3)])?;
    let bundle_u: Vec<ComplexMatrix> = cyclic_rep(2, &[0, 1]).into_iter().chain(cyclic_rep(3, &[0, 1, 2])).collect();
    push("bundle Z2 on M2, Z3 on M3", DynamicalSystem::new(bundle, vec![2, 3], bundle_u)?);
    let cot = DynamicalSystem::trivial(FiniteGroupoid::cotrivial(1)?, vec![1])?;
    push("Z2 swap on M2 u point", union_system(&[&swap, &cot])?);
    push(
        "Z4 regular on 4 points, scalar",
        transformation_system(&GroupoidActionOnSet::coset_action(&z(4), &[])?, &cyclic_rep(4, &[1]), &mut rng)?,
    );
    Ok(out)
}

fn conjugate_rep(v: &[ComplexMatrix], w: &ComplexMatrix) -> Vec<ComplexMatrix> {
    v.iter().map(|m| w * m * w.adjoint()).collect()
}

/// At least ten strictly multiplicative unitary fields on group bundles.
pub fn unitary_corpus(seed: u64) -> Result<Vec<(String, UnitaryBundleAction)>> {
    let mut rng = rng(seed);
    let z = |m| GroupTable::cyclic(m).expect("cyclic");
    let s3 = GroupTable::symmetric(3)?;
    let d4 = GroupTable::dihedral(4)?;
    let v4 = GroupTable::abelian(&[2, 2])?;
    let single = |name: &str, group: &GroupTable, v: Vec<ComplexMatrix>| -> Result<(String, UnitaryBundleAction)> {
        let d = v[0].nrows();
        let bundle = FiniteGroupoid::group_bundle(&["p".into()], std::slice::from_ref(group))?;
        Ok((name.to_string(), UnitaryBundleAction::new(bundle, vec![d], v)?))
    };
    let three = (0..6).find(|&g| s3.element_order(g) == 3).expect("3-cycle");
    let transposition = (0..6).find(|&g| s3.element_order(g) == 2).expect("transposition");
    let rotation = (0..8).find(|&g| d4.element_order(g) == 4).expect("rotation");
    let w2 = random_unitary(2, &mut rng);
    let w3 = random_unitary(3, &mut rng);
    let v4_rep: Vec<ComplexMatrix> = (0..4)
        .map(|g| diag(&[c(if g & 1 == 1 { -1.0 } else { 1.0 }, 0.0), c(if g & 2 == 2 { -1.0 } else { 1.0 }, 0.0)]))
        .collect();
    let mut out = vec![
        single("Z2 by diag(1,-1)", &z(2), cyclic_rep(2, &[0, 1]))?,
        single("Z4 by diag(1,i)", &z(4), cyclic_rep(4, &[0, 1]))?,
        single("Z3 regular", &z(3), permutation_rep(&z(3), &[])?)?,
        single("S3 on 3 points", &s3, permutation_rep(&s3, &[transposition])?)?,
        single("S3 sign", &s3, permutation_rep(&s3, &[three])?)?,
        single("Z2xZ2 by signs", &v4, v4_rep)?,
        single("D4 on rotation cosets", &d4, permutation_rep(&d4, &[rotation])?)?,
        single("Z6 conjugated", &z(6), conjugate_rep(&cyclic_rep(6, &[0, 1]), &w2))?,
        single("Z5 conjugated", &z(5), conjugate_rep(&cyclic_rep(5, &[0, 1, 2]), &w3))?,
        single("S3 trivial on M2", &s3, vec![identity(2); 6])?,
    ];
    let bundle = FiniteGroupoid::group_bundle(&["a".into(), "b".into()], &[z(2), z(3)])?;
    let u: Vec<ComplexMatrix> = cyclic_rep(2, &[0, 1]).into_iter().chain(permutation_rep(&z(3), &[])?).collect();
    out.push(("bundle Z2 on M2, Z3 on M3".into(), UnitaryBundleAction::new(bundle, vec![2, 3], u)?));
    let bundle = FiniteGroupoid::group_bundle(&["a".into(), "b".into(), "c".into()], &[z(2), z(2), z(2)])?;
    let u: Vec<ComplexMatrix> =
        [cyclic_rep(2, &[1]), cyclic_rep(2, &[0, 1]), cyclic_rep(2, &[0, 1, 1])].into_iter().flatten().collect();
    out.push(("Z2 bundle over M1, M2, M3".into(), UnitaryBundleAction::new(bundle, vec![1, 2, 3], u)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{structural_queries, validate};

    #[test]
    fn random_groupoids_are_valid_and_bounded() {
        let mut r = rng(1);
        for _ in 0..100 {
            let g = random_groupoid(&mut r, 60);
            assert!(g.len() <= 60);
            assert!(validate(&g.table()).is_valid());
            let t = random_transitive(&mut r, 30);
            assert!(t.len() <= 30);
            assert!(structural_queries(&t).is_transitive);
        }
    }

    #[test]
    fn corpora_sizes() {
        let ab = abelian_isotropy_corpus();
        assert!(ab.len() >= 30, "{}", ab.len());
        for (name, g) in &ab {
            assert!(g.units().iter().all(|&u| {
                let iso = g.isotropy(u);
                iso.iter().all(|&a| iso.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
            }), "{name}");
        }
        let dyn_corpus = dynamical_corpus(7).unwrap();
        assert!(dyn_corpus.len() >= 10);
        for (name, s) in &dyn_corpus {
            assert!(s.groupoid().len() <= 20, "{name}");
            assert!(s.fibers().dims.iter().all(|&d| d <= 3), "{name}");
        }
        assert!(unitary_corpus(7).unwrap().len() >= 10);
    }
}
