use std::collections::HashMap;

use serde::Serialize;

use super::induce::{crossed_rep_residual, scalar_rep_residual};
use super::{
    conjugate_fiber_rep, dual_bundle, dual_orbits, fiber_covariant_reps, g_action_on_dual, induce_character,
    induce_covariant, FiberCovariantRep, QuotientSection,
};
use crate::algebra::c_star_spectrum;
use crate::crossed::{crossed_spectrum, group_bundle_fibering, point_basis, DynamicalSystem, PointLabel};
use crate::error::{Error, Result};
use crate::groupoid::{stabilizer_subgroupoid, unit_orbits, ElemId, FiniteGroupoid};
use crate::linalg::{C64, ZERO};
use crate::report::{Check, Verdicts};
use crate::star_algebra::{are_equivalent, commutant_dimension, MatrixRep, NumericOptions};

const FINITE_NOTE: &str =
    "finite discrete spaces: the induction map is checked as a bijection of orbits onto blocks; openness is vacuous";

fn close(a: &[C64], b: &[C64], dim: usize, tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * (dim as f64).max(1.0))
}

/// Greedy one-to-one matching of induced trace vectors against block trace vectors.
/// Returns the indices of unmatched induced representations.
fn match_blocks(induced: &[(usize, &[C64])], blocks: &[(usize, Vec<C64>)], tol: f64) -> (Vec<usize>, usize) {
    let mut used = vec![false; blocks.len()];
    let mut unmatched = Vec::new();
    for (k, &(dim, traces)) in induced.iter().enumerate() {
        match (0..blocks.len()).find(|&b| !used[b] && blocks[b].0 == dim && close(&blocks[b].1, traces, dim, tol)) {
            Some(b) => used[b] = true,
            None => unmatched.push(k),
        }
    }
    (unmatched, used.iter().filter(|u| !**u).count())
}

fn union_find_classes(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for k in 0..n {
        let r = find(&mut parent, k);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[slot[r]].push(k);
    }
    classes
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarTheoremReport {
    pub characters: usize,
    /// Dual orbits as `unit:index` labels.
    pub dual_orbits: Vec<Vec<String>>,
    pub induced_dims: Vec<usize>,
    pub block_dims: Vec<usize>,
    pub checks: Vec<Check>,
    pub note: String,
    pub passed: bool,
}

impl Verdicts for ScalarTheoremReport {
    fn checks(&self) -> Vec<Check> {
        self.checks.clone()
    }
}

/// The five clauses relating dual orbits of the isotropy to the spectrum of `C*(G)`:
/// each `N^omega` is irreducible, constant on `G`-orbits, inequivalent across orbits,
/// exhausts the blocks with matching characters, and has dimension the orbit size.
pub fn verify_scalar_main_theorem(g: &FiniteGroupoid, opts: &NumericOptions) -> Result<ScalarTheoremReport> {
    let dual = dual_bundle(g)?;
    let orbits = dual_orbits(g, &dual)?;
    let label = |k: usize| {
        let unit = dual.characters[k].unit;
        let pos = dual.by_unit[g.unit_pos(unit)].iter().position(|&j| j == k).expect("indexed");
        format!("{}:{}", g.name(unit), pos)
    };
    let sections: Vec<QuotientSection> = g.units().iter().map(|&u| QuotientSection::minimal(g, u)).collect();
    let reps = opts
        .exec
        .map_range(0..dual.characters.len(), |k| {
            let omega = &dual.characters[k];
            induce_character(g, omega, &sections[g.unit_pos(omega.unit)])
        })
        .into_iter()
        .collect::<Result<Vec<MatrixRep>>>()?;
    let tol = opts.assert_tol;
    let mut checks = Vec::new();

    let hom = opts
        .exec
        .map_range(0..reps.len(), |k| scalar_rep_residual(g, &reps[k], opts))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::residual("induced representations are *-representations", hom, tol));

    let commutants = opts.exec.map_range(0..reps.len(), |k| commutant_dimension(&reps[k], opts));
    let reducible: Vec<String> = (0..reps.len()).filter(|&k| commutants[k] != 1).map(label).collect();
    checks.push(Check::new("(i) every N^omega is irreducible", reducible.is_empty(), || {
        format!("commutant dimension > 1 for {}", reducible.join(", "))
    }));

    let mut broken = None;
    'outer: for x in g.elements() {
        for &k in &dual.by_unit[g.unit_pos(g.source(x))] {
            let moved = g_action_on_dual(g, &dual.characters[k], x)?;
            let j = dual.find(&moved, g).ok_or_else(|| Error::Numerical("transported character missing".into()))?;
            if !are_equivalent(&reps[k], &reps[j], tol)? {
                broken = Some((k, x, j));
                break 'outer;
            }
        }
    }
    checks.push(Check::new("(ii) N^omega equivalent to N^(x.omega)", broken.is_none(), || {
        let (k, x, j) = broken.expect("failure");
        format!("{} vs {} via {}", label(k), label(j), g.name(x))
    }));

    let heads: Vec<usize> = orbits.iter().map(|o| o[0]).collect();
    let mut clash = None;
    for a in 0..heads.len() {
        for b in 0..a {
            if are_equivalent(&reps[heads[a]], &reps[heads[b]], tol)? {
                clash = Some((heads[b], heads[a]));
            }
        }
    }
    checks.push(Check::new("(iii) inequivalent across dual orbits", clash.is_none(), || {
        let (a, b) = clash.expect("failure");
        format!("{} and {} lie in different orbits but are equivalent", label(a), label(b))
    }));

    let spec = c_star_spectrum(g, opts)?;
    let blocks: Vec<(usize, Vec<C64>)> = spec.blocks.iter().map(|b| (b.dim, b.full_traces(g.len()))).collect();
    let induced: Vec<(usize, &[C64])> = heads.iter().map(|&k| (reps[k].dim, reps[k].traces.as_slice())).collect();
    let (unmatched, spare) = match_blocks(&induced, &blocks, tol);
    let exhaustive = unmatched.is_empty() && spare == 0 && heads.len() == blocks.len();
    checks.push(
        Check::new("(iv) dual orbits biject onto blocks with matching characters", exhaustive, || {
            format!(
                "{} orbits, {} blocks; unmatched orbits: [{}]",
                heads.len(),
                blocks.len(),
                unmatched.iter().map(|&i| label(heads[i])).collect::<Vec<_>>().join(", ")
            )
        })
        .with_value(heads.len() as f64),
    );

    let (unit_orbit_list, orbit_of_unit) = unit_orbits(g);
    let wrong_dim: Vec<usize> = (0..reps.len())
        .filter(|&k| reps[k].dim != unit_orbit_list[orbit_of_unit[g.unit_pos(dual.characters[k].unit)]].len())
        .collect();
    checks.push(Check::new("(v) dim N^omega equals the orbit size", wrong_dim.is_empty(), || {
        wrong_dim.iter().map(|&k| format!("{} has dim {}", label(k), reps[k].dim)).collect::<Vec<_>>().join(", ")
    }));

    let passed = checks.iter().all(Check::passed);
    let mut induced_dims: Vec<usize> = heads.iter().map(|&k| reps[k].dim).collect();
    induced_dims.sort_unstable();
    Ok(ScalarTheoremReport {
        characters: dual.characters.len(),
        dual_orbits: orbits.iter().map(|o| o.iter().map(|&k| label(k)).collect()).collect(),
        induced_dims,
        block_dims: spec.sorted_dims(),
        checks,
        note: FINITE_NOTE.into(),
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossedTheoremReport {
    /// Irreducible covariant pairs over all units.
    pub fiber_irreps: usize,
    /// Orbits of fiber irreps as `unit:index` labels.
    pub orbits: Vec<Vec<String>>,
    pub induced_dims: Vec<usize>,
    pub block_dims: Vec<usize>,
    pub checks: Vec<Check>,
    pub note: String,
    pub passed: bool,
}

impl Verdicts for CrossedTheoremReport {
    fn checks(&self) -> Vec<Check> {
        self.checks.clone()
    }
}

/// Orbits of the `G`-action on the irreps of the fiber crossed products, induced
/// one per orbit and matched bijectively against the blocks of `A x| G`.
pub fn verify_crossed_main_theorem(sys: &DynamicalSystem, opts: &NumericOptions) -> Result<CrossedTheoremReport> {
    let g = sys.groupoid();
    let stab = stabilizer_subgroupoid(g);
    if let Some(f) = stab.fibers.iter().find(|f| !f.group.is_abelian()) {
        return Err(Error::NonAbelian(format!("isotropy at {} is not abelian", g.name(f.unit))));
    }
    let tol = opts.assert_tol;
    let mut checks = Vec::new();
    let bundle = sys.restrict(&stab.embedded)?;
    let fibering = group_bundle_fibering(&bundle, opts)?;
    checks.push(Check::new("fiber crossed products from the isotropy bundle", fibering.passed, || {
        format!(
            "blocks match: {}, kernels match: {}, restriction residual {:.2e}",
            fibering.blocks_match, fibering.kernels_match, fibering.max_residual
        )
    }));

    let per_unit = opts
        .exec
        .map(g.units(), |&u| fiber_covariant_reps(sys, u, opts))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut nodes: Vec<(ElemId, usize)> = Vec::new();
    let mut node_of: HashMap<(ElemId, usize), usize> = HashMap::new();
    for (p, reps) in per_unit.iter().enumerate() {
        for k in 0..reps.len() {
            node_of.insert((g.units()[p], k), nodes.len());
            nodes.push((g.units()[p], k));
        }
    }
    let rep_of = |n: usize| -> &FiberCovariantRep { &per_unit[g.unit_pos(nodes[n].0)][nodes[n].1] };
    let label = |n: usize| format!("{}:{}", g.name(nodes[n].0), nodes[n].1);

    let mut edges = Vec::new();
    let mut lost = None;
    for x in g.elements() {
        let (s, r) = (g.source(x), g.range(x));
        for k in 0..per_unit[g.unit_pos(s)].len() {
            let moved = conjugate_fiber_rep(sys, x, &per_unit[g.unit_pos(s)][k])?;
            match per_unit[g.unit_pos(r)].iter().position(|t| moved.equivalent(t, tol)) {
                Some(j) => edges.push((node_of[&(s, k)], node_of[&(r, j)])),
                None => {
                    lost.get_or_insert((node_of[&(s, k)], x));
                }
            }
        }
    }
    checks.push(Check::new("x.R is again a fiber irrep", lost.is_none(), || {
        let (n, x) = lost.expect("failure");
        format!("{} moved by {} matches no irrep at the range", label(n), g.name(x))
    }));
    let classes = union_find_classes(nodes.len(), &edges);

    let sections: Vec<QuotientSection> = g.units().iter().map(|&u| QuotientSection::minimal(g, u)).collect();
    let induced = opts
        .exec
        .map_range(0..nodes.len(), |n| induce_covariant(sys, rep_of(n), &sections[g.unit_pos(nodes[n].0)]))
        .into_iter()
        .collect::<Result<Vec<MatrixRep>>>()?;

    let hom = opts
        .exec
        .map_range(0..induced.len(), |n| crossed_rep_residual(sys, &induced[n], opts))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::residual("induced representations are *-representations", hom, tol));

    let commutants = opts.exec.map_range(0..induced.len(), |n| commutant_dimension(&induced[n], opts));
    let reducible: Vec<String> = (0..induced.len()).filter(|&n| commutants[n] != 1).map(label).collect();
    checks.push(Check::new("every N^R is irreducible", reducible.is_empty(), || {
        format!("commutant dimension > 1 for {}", reducible.join(", "))
    }));

    let mut split = None;
    for class in &classes {
        for &n in &class[1..] {
            if !are_equivalent(&induced[class[0]], &induced[n], tol)? {
                split.get_or_insert((class[0], n));
            }
        }
    }
    checks.push(Check::new("N^R constant on orbits", split.is_none(), || {
        let (a, b) = split.expect("failure");
        format!("{} and {} share an orbit but induce inequivalent representations", label(a), label(b))
    }));

    let heads: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let mut clash = None;
    for a in 0..heads.len() {
        for b in 0..a {
            if are_equivalent(&induced[heads[a]], &induced[heads[b]], tol)? {
                clash.get_or_insert((heads[b], heads[a]));
            }
        }
    }
    checks.push(Check::new("inequivalent across orbits", clash.is_none(), || {
        let (a, b) = clash.expect("failure");
        format!("{} and {} lie in different orbits but are equivalent", label(a), label(b))
    }));

    let basis = point_basis(sys);
    let index: HashMap<PointLabel, usize> = basis
        .iter()
        .enumerate()
        .map(|(k, &(element, i, j))| (PointLabel { element, i, j }, k))
        .collect();
    let spec = crossed_spectrum(sys, opts)?;
    let blocks: Vec<(usize, Vec<C64>)> = spec
        .blocks
        .iter()
        .map(|b| {
            let mut t = vec![ZERO; basis.len()];
            for (l, z) in b.labels.iter().zip(&b.rep.traces) {
                t[index[l]] = *z;
            }
            (b.dim, t)
        })
        .collect();
    let heads_traces: Vec<(usize, &[C64])> = heads.iter().map(|&n| (induced[n].dim, induced[n].traces.as_slice())).collect();
    let (unmatched, spare) = match_blocks(&heads_traces, &blocks, tol);
    let exhaustive = unmatched.is_empty() && spare == 0 && heads.len() == blocks.len();
    checks.push(
        Check::new("orbits of fiber irreps biject onto blocks of the crossed product", exhaustive, || {
            format!(
                "{} orbits, {} blocks; unmatched orbits: [{}]",
                heads.len(),
                blocks.len(),
                unmatched.iter().map(|&i| label(heads[i])).collect::<Vec<_>>().join(", ")
            )
        })
        .with_value(heads.len() as f64),
    );

    let (unit_orbit_list, orbit_of_unit) = unit_orbits(g);
    let wrong_dim: Vec<usize> = (0..nodes.len())
        .filter(|&n| {
            let size = unit_orbit_list[orbit_of_unit[g.unit_pos(nodes[n].0)]].len();
            induced[n].dim != rep_of(n).dim * size
        })
        .collect();
    checks.push(Check::new("dim N^R = dim R x orbit size", wrong_dim.is_empty(), || {
        wrong_dim.iter().map(|&n| format!("{} has dim {}", label(n), induced[n].dim)).collect::<Vec<_>>().join(", ")
    }));

    let passed = checks.iter().all(Check::passed);
    let mut induced_dims: Vec<usize> = heads.iter().map(|&n| induced[n].dim).collect();
    induced_dims.sort_unstable();
    Ok(CrossedTheoremReport {
        fiber_irreps: nodes.len(),
        orbits: classes.iter().map(|c| c.iter().map(|&n| label(n)).collect()).collect(),
        induced_dims,
        block_dims: spec.sorted_dims(),
        checks,
        note: FINITE_NOTE.into(),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::GroupoidActionOnSet;
    use crate::groups::GroupTable;
    use crate::linalg::{c, diag, identity, random_unitary, ComplexMatrix, ONE};

    fn parity() -> FiniteGroupoid {
        let act = GroupoidActionOnSet::from_permutations(
            &GroupTable::cyclic(4).unwrap(),
            vec!["0".into(), "1".into()],
            vec![vec![0, 1], vec![1, 0], vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        FiniteGroupoid::transformation_groupoid(&act)
    }

    #[test]
    fn scalar_theorem_examples() {
        let opts = NumericOptions::default();
        for n in [2, 3, 4] {
            let r = verify_scalar_main_theorem(&FiniteGroupoid::pair_groupoid(n).unwrap(), &opts).unwrap();
            assert!(r.passed, "{:?}", r.checks);
            assert_eq!(r.block_dims, vec![n]);
        }
        let base = vec!["p".to_string(), "q".to_string()];
        let z2 = GroupTable::cyclic(2).unwrap();
        let bundle = FiniteGroupoid::group_bundle(&base, &[z2.clone(), z2]).unwrap();
        let r = verify_scalar_main_theorem(&bundle, &opts).unwrap();
        assert!(r.passed);
        assert_eq!(r.dual_orbits.len(), 4);

        let r = verify_scalar_main_theorem(&parity(), &opts).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(r.dual_orbits.len(), 2);
        assert_eq!(r.block_dims, vec![2, 2]);
    }

    #[test]
    fn crossed_theorem_scalar_agrees() {
        let opts = NumericOptions::default();
        let g = parity();
        let scalar = verify_scalar_main_theorem(&g, &opts).unwrap();
        let crossed = verify_crossed_main_theorem(&DynamicalSystem::scalar(g), &opts).unwrap();
        assert_eq!(scalar.passed, crossed.passed);
        assert_eq!(scalar.induced_dims, crossed.induced_dims);
        assert_eq!(scalar.block_dims, crossed.block_dims);
    }

    #[test]
    fn crossed_theorem_examples() {
        let opts = NumericOptions::default();
        let act = GroupoidActionOnSet::from_permutations(
            &GroupTable::cyclic(2).unwrap(),
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let swap = FiniteGroupoid::transformation_groupoid(&act);
        let mut rng = opts.rng(8);
        let w: Vec<ComplexMatrix> = (0..2).map(|_| random_unitary(2, &mut rng)).collect();
        let r = verify_crossed_main_theorem(&DynamicalSystem::coboundary(swap, &w).unwrap(), &opts).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(r.orbits.len(), 1);
        assert_eq!(r.block_dims, vec![4]);

        // a bundle acting by Ad(u): every orbit is a singleton
        let base = vec!["p".to_string(), "q".to_string()];
        let bundle =
            FiniteGroupoid::group_bundle(&base, &[GroupTable::cyclic(2).unwrap(), GroupTable::cyclic(3).unwrap()]).unwrap();
        let phase = c(0.0, 1.0);
        let mut us = Vec::new();
        for x in bundle.elements() {
            let d = if bundle.range(x) == bundle.units()[0] { 2 } else { 1 };
            us.push(if bundle.is_unit(x) {
                identity(d)
            } else if d == 2 {
                diag(&[ONE, -ONE])
            } else {
                identity(1) * phase
            });
        }
        let sys = DynamicalSystem::new(bundle, vec![2, 1], us).unwrap();
        let r = verify_crossed_main_theorem(&sys, &opts).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert!(r.orbits.iter().all(|o| o.len() == 1));
        assert_eq!(r.orbits.len(), 2 + 3);
    }
}
