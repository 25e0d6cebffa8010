use serde::Serialize;

use super::{convolve_sections, involute_section, model::crossed_spectrum, point_product, DynamicalSystem, Section};
use crate::algebra::{c_star_spectrum, orbit_options};
use crate::error::{Error, Result};
use crate::groupoid::{restriction, subgroupoid, unit_orbits, ElemId, FiniteGroupoid};
use crate::linalg::{identity, matrix_unit, max_abs, rank, trace, zeros, ComplexMatrix, ONE, ZERO};
use crate::star_algebra::NumericOptions;

fn is_group_bundle(g: &FiniteGroupoid) -> bool {
    g.elements().all(|x| g.range(x) == g.source(x))
}

fn restrict_section<'s>(f: &Section<'_>, sub: &'s DynamicalSystem, inclusion: &[ElemId]) -> Section<'s> {
    let values = inclusion.iter().map(|&x| f.at(x).clone()).collect();
    Section::new(sub, values).expect("restriction keeps fiber sizes")
}

/// Worst restriction residual of `f * h` and `f^*` over a few random sections.
fn restriction_residual(sys: &DynamicalSystem, sub: &DynamicalSystem, inclusion: &[ElemId], opts: &NumericOptions, stream: u64) -> Result<f64> {
    let mut rng = opts.rng(stream);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let f = Section::random(sys, &mut rng);
        let h = Section::random(sys, &mut rng);
        let (rf, rh) = (restrict_section(&f, sub, inclusion), restrict_section(&h, sub, inclusion));
        let lhs = restrict_section(&convolve_sections(&f, &h)?, sub, inclusion);
        worst = worst.max(lhs.max_abs_diff(&convolve_sections(&rf, &rh)?));
        let star = restrict_section(&involute_section(&f), sub, inclusion);
        worst = worst.max(star.max_abs_diff(&involute_section(&rf)));
    }
    Ok(worst)
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// One fiber `A(u) x| S_u` of a group bundle.
#[derive(Clone, Debug, Serialize)]
pub struct UnitFiber {
    pub unit: String,
    pub group_order: usize,
    pub fiber_dim: usize,
    /// `|S_u| d_u^2`.
    pub algebra_dim: usize,
    /// `(d, m)` blocks of `A(u) x| S_u` computed on its own.
    pub dims: Vec<(usize, usize)>,
    /// Block dimensions of the same orbit inside the full crossed product.
    pub ambient_dims: Vec<usize>,
    /// Dimension of the kernel of restriction to `S_u`.
    pub kernel_dim: usize,
    pub restriction_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberingReport {
    pub fibers: Vec<UnitFiber>,
    pub total_dim: usize,
    pub blocks_match: bool,
    pub kernels_match: bool,
    pub max_residual: f64,
    pub passed: bool,
}

/// For a system over a group bundle `S`, compares `A x| S` with its fibers
/// `A(u) x| S_u` through the restriction maps: each is a *-homomorphism onto the
/// fiber whose kernel is the sections vanishing on `S_u`, and the spectrum of the
/// whole algebra is the disjoint union of the fiber spectra.
pub fn group_bundle_fibering(sys: &DynamicalSystem, opts: &NumericOptions) -> Result<FiberingReport> {
    let g = sys.groupoid();
    if !is_group_bundle(g) {
        return Err(Error::InvalidParameter("the system must live on a group bundle".into()));
    }
    let whole = crossed_spectrum(sys, opts)?;
    let (orbits, _) = unit_orbits(g);
    let total_dim = sys.crossed_dim();
    let per_unit = opts.exec.map_range(0..orbits.len(), |k| -> Result<UnitFiber> {
        let u = orbits[k][0];
        let emb = subgroupoid(g, &g.isotropy(u))?;
        let fiber = sys.restrict(&emb)?;
        let o = orbit_options(opts, k);
        let spec = crossed_spectrum(&fiber, &o)?;
        let residual = restriction_residual(sys, &fiber, &emb.inclusion, &o, 0x5245_5354)?;
        let ambient_dims = sorted(whole.blocks.iter().filter(|b| b.orbit == k).map(|b| b.dim).collect());
        Ok(UnitFiber {
            unit: g.name(u).to_string(),
            group_order: emb.inclusion.len(),
            fiber_dim: sys.dim_at(u),
            algebra_dim: fiber.crossed_dim(),
            dims: spec.dims.clone(),
            ambient_dims,
            kernel_dim: total_dim - fiber.crossed_dim(),
            restriction_residual: residual,
        })
    });
    let fibers = per_unit.into_iter().collect::<Result<Vec<_>>>()?;
    let blocks_match = fibers
        .iter()
        .all(|f| sorted(f.dims.iter().map(|p| p.0).collect()) == f.ambient_dims);
    // sections vanishing on S_u are exactly those supported on the other fibers
    let kernels_match = fibers
        .iter()
        .all(|f| f.kernel_dim == fibers.iter().filter(|h| h.unit != f.unit).map(|h| h.algebra_dim).sum::<usize>());
    let max_residual = fibers.iter().map(|f| f.restriction_residual).fold(0.0, f64::max);
    let passed = blocks_match && kernels_match && max_residual < opts.assert_tol;
    Ok(FiberingReport { fibers, total_dim, blocks_match, kernels_match, max_residual, passed })
}

/// A strictly multiplicative unitary field `s -> u_s in A(p(s))` on a group bundle.
#[derive(Clone, Debug)]
pub struct UnitaryBundleAction {
    system: DynamicalSystem,
}

impl UnitaryBundleAction {
    pub fn new(bundle: FiniteGroupoid, dims: Vec<usize>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if !is_group_bundle(&bundle) {
            return Err(Error::InvalidParameter("unitary actions live on group bundles".into()));
        }
        let system = DynamicalSystem::new(bundle, dims, unitaries)?;
        let g = system.groupoid();
        for a in g.elements() {
            for b in g.elements() {
                let Some(ab) = g.mul(a, b) else { continue };
                let r = max_abs(&(system.unitary(a) * system.unitary(b) - system.unitary(ab)));
                if r > 1e-9 {
                    return Err(Error::InvalidAction(format!(
                        "u({}) u({}) != u({}) (residual {r:.2e})",
                        g.name(a),
                        g.name(b),
                        g.name(ab)
                    )));
                }
            }
        }
        for &e in g.units() {
            if max_abs(&(system.unitary(e) - identity(system.dim_at(e)))) > 1e-9 {
                return Err(Error::InvalidAction(format!("u({}) is not the identity", g.name(e))));
            }
        }
        Ok(UnitaryBundleAction { system })
    }

    /// The system with `alpha = Ad(u)`.
    pub fn system(&self) -> &DynamicalSystem {
        &self.system
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitaryFiberReport {
    pub unit: String,
    /// Worst `|phi(x) phi(y) - phi(xy)|` over point basis pairs.
    pub hom_residual: f64,
    pub star_residual: f64,
    pub rank: usize,
    pub expected_rank: usize,
    /// Block dimensions of `A(u) x|_{Ad u} S_u`.
    pub twisted_dims: Vec<usize>,
    /// Block dimensions of `A(u) x|_id S_u`.
    pub untwisted_dims: Vec<usize>,
    /// Irrep dimensions of `C*(S_u)` scaled by `d_u`.
    pub tensor_dims: Vec<usize>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitaryReport {
    pub fibers: Vec<UnitaryFiberReport>,
    pub passed: bool,
}

/// Checks `phi(f (x) a)(s) = f(s) a(p(s)) u_s^*` from `C*(S) (x) A` (trivial action)
/// to `A x|_{Ad u} S` fiber by fiber: multiplicative and *-preserving on the point
/// basis, bijective by rank, and matching block data on both sides.
pub fn unitary_action_check(action: &UnitaryBundleAction, opts: &NumericOptions) -> Result<UnitaryReport> {
    let sys = &action.system;
    let g = sys.groupoid();
    let units: Vec<ElemId> = g.units().to_vec();
    let per_unit = opts.exec.map_range(0..units.len(), |k| -> Result<UnitaryFiberReport> {
        let u = units[k];
        let d = sys.dim_at(u);
        let emb = subgroupoid(g, &g.isotropy(u))?;
        let twisted = sys.restrict(&emb)?;
        let plain = DynamicalSystem::trivial(emb.groupoid.clone(), vec![d])?;
        let sg = twisted.groupoid();
        let phi = |s: ElemId, a: &ComplexMatrix| a * twisted.unitary(s).adjoint();
        let units_of = |n: usize| -> Vec<ComplexMatrix> {
            (0..n * n).map(|p| matrix_unit(n, p / n, p % n)).collect()
        };
        let basis = units_of(d);
        let mut hom = 0.0f64;
        let mut star = 0.0f64;
        let mut rank_total = 0;
        for s in sg.elements() {
            for a in &basis {
                for t in sg.elements() {
                    for b in &basis {
                        let (st, lhs) = point_product(&twisted, s, &phi(s, a), t, &phi(t, b)).expect("group");
                        let (st2, prod) = point_product(&plain, s, a, t, b).expect("group");
                        debug_assert_eq!(st, st2);
                        hom = hom.max(max_abs(&(lhs - phi(st, &prod))));
                    }
                }
                let sinv = sg.inverse(s);
                let lhs = twisted.alpha(sinv, &phi(s, a).adjoint());
                star = star.max(max_abs(&(lhs - phi(sinv, &plain.alpha(sinv, &a.adjoint())))));
            }
            let mut cols = zeros(d * d, d * d);
            for (p, a) in basis.iter().enumerate() {
                let img = phi(s, a);
                for (q, z) in img.iter().enumerate() {
                    cols[(q, p)] = *z;
                }
            }
            rank_total += rank(&cols, 1e-9);
        }
        let o = orbit_options(opts, k);
        let twisted_dims = crossed_spectrum(&twisted, &o)?.sorted_dims();
        let untwisted_dims = crossed_spectrum(&plain, &o)?.sorted_dims();
        let tensor_dims = sorted(c_star_spectrum(sg, &o)?.sorted_dims().into_iter().map(|e| e * d).collect());
        let expected_rank = sg.len() * d * d;
        let passed = hom < opts.assert_tol
            && star < opts.assert_tol
            && rank_total == expected_rank
            && twisted_dims == tensor_dims
            && untwisted_dims == tensor_dims;
        Ok(UnitaryFiberReport {
            unit: g.name(u).to_string(),
            hom_residual: hom,
            star_residual: star,
            rank: rank_total,
            expected_rank,
            twisted_dims,
            untwisted_dims,
            tensor_dims,
            passed,
        })
    });
    let fibers = per_unit.into_iter().collect::<Result<Vec<_>>>()?;
    let passed = fibers.iter().all(|f| f.passed);
    Ok(UnitaryReport { fibers, passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub invariant_units: Vec<String>,
    pub dim_total: usize,
    /// Linear dimension of `Ex(U)`, the sections supported on `G|_U`.
    pub dim_ideal: usize,
    /// Linear dimension of `A(C) x| G|_C`, `C` the complement of `U`.
    pub dim_quotient: usize,
    /// Worst component outside `G|_U` of a product of an `Ex(U)` basis element with any basis element.
    pub ideal_residual: f64,
    /// Worst failure of restriction to `G|_C` to be a *-homomorphism.
    pub restriction_residual: f64,
    pub additive: bool,
    pub kernel_matches: bool,
    pub surjective: bool,
    pub passed: bool,
}

/// `0 -> Ex(U) -> A x| G -> A(C) x| G|_C -> 0` for an invariant set `U` of units.
pub fn invariant_ideal_sequence(sys: &DynamicalSystem, u_set: &[ElemId], opts: &NumericOptions) -> Result<ExactnessReport> {
    let g = sys.groupoid();
    let mut in_u = vec![false; g.len()];
    for &u in u_set {
        if u >= g.len() || !g.is_unit(u) {
            return Err(Error::InvalidParameter(format!("{u} is not a unit")));
        }
        in_u[u] = true;
    }
    if let Some(x) = g.elements().find(|&x| in_u[g.range(x)] != in_u[g.source(x)]) {
        return Err(Error::NotInvariant { element: x });
    }
    let in_ideal: Vec<bool> = g.elements().map(|x| in_u[g.range(x)]).collect();
    let sq = |x: ElemId| sys.dim_at(g.range(x)).pow(2);
    let dim_total = sys.crossed_dim();
    let dim_ideal: usize = g.elements().filter(|&x| in_ideal[x]).map(sq).sum();

    let basis: Vec<(ElemId, ComplexMatrix)> = g
        .elements()
        .flat_map(|x| {
            let d = sys.dim_at(g.range(x));
            (0..d * d).map(move |p| (x, matrix_unit(d, p / d, p % d)))
        })
        .collect();
    let ideal_residual = opts.exec.fold_range(
        0..basis.len(),
        || 0.0f64,
        |i| {
            let (x, a) = &basis[i];
            if !in_ideal[*x] {
                return 0.0;
            }
            let mut worst = 0.0f64;
            for (y, b) in &basis {
                for (p, q) in [((*x, a), (*y, b)), ((*y, b), (*x, a))] {
                    if let Some((z, m)) = point_product(sys, p.0, p.1, q.0, q.1) {
                        if !in_ideal[z] {
                            worst = worst.max(max_abs(&m));
                        }
                    }
                }
            }
            worst
        },
        f64::max,
    );

    let complement: Vec<ElemId> = g.units().iter().copied().filter(|&u| !in_u[u]).collect();
    let mut in_quotient = vec![false; g.len()];
    let (dim_quotient, restriction_res, surjective) = if complement.is_empty() {
        (0, 0.0, true)
    } else {
        let emb = restriction(g, &complement)?;
        let quotient = sys.restrict(&emb)?;
        let res = restriction_residual(sys, &quotient, &emb.inclusion, opts, 0x4558_4143)?;
        for &x in &emb.inclusion {
            in_quotient[x] = true;
        }
        // every point of the quotient is the image of the same point upstairs
        let surjective = emb
            .inclusion
            .iter()
            .enumerate()
            .all(|(k, &x)| quotient.dim_at(quotient.groupoid().range(k)) == sys.dim_at(g.range(x)));
        (quotient.crossed_dim(), res, surjective)
    };
    // sections vanishing on G|_C
    let kernel: Vec<ElemId> = g.elements().filter(|&x| !in_quotient[x]).collect();
    let kernel_dim: usize = kernel.iter().map(|&x| sq(x)).sum();
    let kernel_matches = kernel_dim == dim_ideal && kernel.iter().all(|&x| in_ideal[x]);
    let additive = dim_total == dim_ideal + dim_quotient;
    let passed = additive
        && kernel_matches
        && surjective
        && ideal_residual < opts.assert_tol
        && restriction_res < opts.assert_tol;
    Ok(ExactnessReport {
        invariant_units: u_set.iter().map(|&u| g.name(u).to_string()).collect(),
        dim_total,
        dim_ideal,
        dim_quotient,
        ideal_residual,
        restriction_residual: restriction_res,
        additive,
        kernel_matches,
        surjective,
        passed,
    })
}

/// How `x: s(x) -> r(x)` moves the single point of the spectrum of `A(s(x))`.
#[derive(Clone, Debug, Serialize)]
pub struct FiberTransport {
    pub element: String,
    pub from: String,
    pub to: String,
    /// Worst trace mismatch between `pi_{s(x)} o alpha_x^-1` and the irrep of `A(r(x))`.
    pub trace_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberSpectrumAction {
    pub transports: Vec<FiberTransport>,
    /// Orbits of the induced action on `sum_u spec A(u)`, as unit names.
    pub orbits: Vec<Vec<String>>,
    pub matches_unit_orbits: bool,
}

/// The action `x . pi = pi o alpha_x^-1` on the fiber spectra.
pub fn action_on_fiber_spectrum(sys: &DynamicalSystem) -> FiberSpectrumAction {
    let g = sys.groupoid();
    let k = g.units().len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut transports = Vec::with_capacity(g.len());
    for x in g.elements() {
        let (r, s) = (g.range(x), g.source(x));
        let d = sys.dim_at(r);
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let t = trace(&sys.alpha_inv(x, &matrix_unit(d, i, j)));
                let expected = if i == j { ONE } else { ZERO };
                worst = worst.max((t - expected).norm());
            }
        }
        if worst < 1e-9 {
            let (a, b) = (find(&mut parent, g.unit_pos(r)), find(&mut parent, g.unit_pos(s)));
            parent[a.max(b)] = a.min(b);
        }
        transports.push(FiberTransport {
            element: g.name(x).to_string(),
            from: g.name(s).to_string(),
            to: g.name(r).to_string(),
            trace_residual: worst,
        });
    }
    let mut classes: Vec<Vec<ElemId>> = Vec::new();
    let mut root_class = vec![usize::MAX; k];
    for (i, &u) in g.units().iter().enumerate() {
        let root = find(&mut parent, i);
        if root_class[root] == usize::MAX {
            root_class[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[root_class[root]].push(u);
    }
    let matches_unit_orbits = classes == unit_orbits(g).0;
    let orbits = classes
        .iter()
        .map(|c| c.iter().map(|&u| g.name(u).to_string()).collect())
        .collect();
    FiberSpectrumAction { transports, orbits, matches_unit_orbits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::GroupoidActionOnSet;
    use crate::groups::GroupTable;
    use crate::linalg::{c, diag, random_unitary};

    #[test]
    fn fibering_of_a_bundle() {
        let base = vec!["p".to_string(), "q".to_string()];
        let g = FiniteGroupoid::group_bundle(&base, &[GroupTable::cyclic(2).unwrap(), GroupTable::cyclic(3).unwrap()]).unwrap();
        let sys = DynamicalSystem::trivial(g, vec![2, 1]).unwrap();
        let report = group_bundle_fibering(&sys, &NumericOptions::default()).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.total_dim, 2 * 4 + 3);
        assert_eq!(report.fibers[0].ambient_dims, vec![2, 2]);
        assert_eq!(report.fibers[1].ambient_dims, vec![1, 1, 1]);
    }

    #[test]
    fn z4_rotation_collapses() {
        let g = FiniteGroupoid::from_group(&GroupTable::cyclic(4).unwrap());
        let u1 = diag(&[ONE, c(0.0, 1.0)]);
        let mut us = vec![identity(2)];
        for k in 1..4 {
            us.push(&us[k - 1] * &u1);
        }
        // element ids of the cyclic group follow powers of the generator
        let action = UnitaryBundleAction::new(g, vec![2], us).unwrap();
        let report = unitary_action_check(&action, &NumericOptions::default()).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.fibers[0].twisted_dims, vec![2, 2, 2, 2]);
    }

    #[test]
    fn cocycle_with_a_phase_is_not_a_unitary_action() {
        let g = FiniteGroupoid::from_group(&GroupTable::cyclic(2).unwrap());
        let bad = UnitaryBundleAction::new(g, vec![1], vec![identity(1), identity(1) * c(0.0, 1.0)]);
        assert!(bad.is_err());
    }

    #[test]
    fn exact_sequence_on_two_points() {
        let g = FiniteGroupoid::cotrivial(2).unwrap();
        let sys = DynamicalSystem::trivial(g.clone(), vec![1, 1]).unwrap();
        let a = g.find("1").unwrap();
        let report = invariant_ideal_sequence(&sys, &[a], &NumericOptions::default()).unwrap();
        assert!(report.passed);
        assert_eq!((report.dim_total, report.dim_ideal, report.dim_quotient), (2, 1, 1));
    }

    #[test]
    fn exact_sequence_with_matrix_fibers() {
        let act = GroupoidActionOnSet::from_permutations(
            &GroupTable::cyclic(2).unwrap(),
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1, 2], vec![1, 0, 2]],
        )
        .unwrap();
        let g = FiniteGroupoid::transformation_groupoid(&act);
        let mut rng = NumericOptions::default().rng(4);
        let w: Vec<ComplexMatrix> = (0..3).map(|_| random_unitary(2, &mut rng)).collect();
        let sys = DynamicalSystem::coboundary(g.clone(), &w).unwrap();
        let units = g.units().to_vec();
        let (orbits, _) = unit_orbits(&g);
        for orbit in &orbits {
            let report = invariant_ideal_sequence(&sys, orbit, &NumericOptions::default()).unwrap();
            assert!(report.passed, "{report:?}");
        }
        assert!(invariant_ideal_sequence(&sys, &units, &NumericOptions::default()).unwrap().passed);
        assert!(invariant_ideal_sequence(&sys, &[], &NumericOptions::default()).unwrap().passed);
        let single = orbits.iter().find(|o| o.len() == 2).unwrap()[0];
        assert!(matches!(
            invariant_ideal_sequence(&sys, &[single], &NumericOptions::default()),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn fiber_spectrum_orbits() {
        let act = GroupoidActionOnSet::from_permutations(
            &GroupTable::cyclic(2).unwrap(),
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1, 2], vec![1, 0, 2]],
        )
        .unwrap();
        let g = FiniteGroupoid::transformation_groupoid(&act);
        let sys = DynamicalSystem::trivial(g, vec![2, 2, 1]).unwrap();
        let spec = action_on_fiber_spectrum(&sys);
        assert!(spec.matches_unit_orbits);
        assert_eq!(spec.orbits.len(), 2);
    }
}
