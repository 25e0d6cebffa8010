//! Groupoid dynamical systems with full matrix-algebra fibers, their section
//! algebras and crossed products.
//!
//! `alpha_g = Ad(U_g)` for a stored unitary `U_g: C^{d_s(g)} -> C^{d_r(g)}`; only
//! `alpha` is required to be functorial, so the unitaries may carry a phase cocycle.

mod model;
mod theorems;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{Embedded, ElemId, FiniteGroupoid};
use crate::linalg::{c, identity, matrix_unit, max_abs, random_matrix, zeros, ComplexMatrix};

pub use model::{crossed_product_model, crossed_spectrum, CrossedBlock, CrossedModel, CrossedSpectrum, PointLabel};
pub use theorems::{
    action_on_fiber_spectrum, group_bundle_fibering, invariant_ideal_sequence, unitary_action_check,
    ExactnessReport, FiberSpectrumAction, FiberTransport, FiberingReport, UnitFiber, UnitaryBundleAction, UnitaryFiberReport,
    UnitaryReport,
};

/// `A(u) = M_{d_u}` for every unit, indexed by unit position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberedAlgebra {
    pub dims: Vec<usize>,
}

/// One failed check of the action axioms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ActionIssue {
    /// Wrong unitary shape or count.
    Shape { element: ElemId },
    /// `d_r(g) != d_s(g)`.
    DimensionMismatch { element: ElemId, range_dim: usize, source_dim: usize },
    NotUnitary { element: ElemId, residual: f64 },
    UnitNotIdentity { unit: ElemId, residual: f64 },
    /// `alpha_{gh} != alpha_g alpha_h`.
    Functoriality { left: ElemId, right: ElemId, residual: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub issues: Vec<ActionIssue>,
}

impl ActionReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks units, unitarity, orbit-constant dimensions and `alpha_{gh} = alpha_g alpha_h`
/// on matrix units for every composable pair.
pub fn validate_action(g: &FiniteGroupoid, fibers: &FiberedAlgebra, unitaries: &[ComplexMatrix], tol: f64) -> ActionReport {
    let mut issues = Vec::new();
    if fibers.dims.len() != g.units().len() || unitaries.len() != g.len() || fibers.dims.contains(&0) {
        issues.push(ActionIssue::Shape { element: 0 });
        return ActionReport { issues };
    }
    let dim = |u: ElemId| fibers.dims[g.unit_pos(u)];
    for x in g.elements() {
        let (dr, ds) = (dim(g.range(x)), dim(g.source(x)));
        if dr != ds {
            issues.push(ActionIssue::DimensionMismatch { element: x, range_dim: dr, source_dim: ds });
        } else if unitaries[x].shape() != (dr, ds) {
            issues.push(ActionIssue::Shape { element: x });
        }
    }
    if !issues.is_empty() {
        return ActionReport { issues };
    }
    for x in g.elements() {
        let u = &unitaries[x];
        let r = max_abs(&(u.adjoint() * u - identity(u.ncols())));
        if r > tol {
            issues.push(ActionIssue::NotUnitary { element: x, residual: r });
        }
    }
    for &e in g.units() {
        let d = dim(e);
        let worst = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| {
                let m = matrix_unit(d, i, j);
                max_abs(&(&unitaries[e] * &m * unitaries[e].adjoint() - m))
            })
            .fold(0.0, f64::max);
        if worst > tol {
            issues.push(ActionIssue::UnitNotIdentity { unit: e, residual: worst });
        }
    }
    for a in g.elements() {
        for b in g.elements() {
            let Some(ab) = g.mul(a, b) else { continue };
            let d = dim(g.source(b));
            let (ua, ub, uab) = (&unitaries[a], &unitaries[b], &unitaries[ab]);
            let mut worst = 0.0f64;
            for i in 0..d {
                for j in 0..d {
                    let m = matrix_unit(d, i, j);
                    let lhs = uab * &m * uab.adjoint();
                    let rhs = ua * (ub * &m * ub.adjoint()) * ua.adjoint();
                    worst = worst.max(max_abs(&(lhs - rhs)));
                }
            }
            if worst > tol {
                issues.push(ActionIssue::Functoriality { left: a, right: b, residual: worst });
            }
        }
    }
    ActionReport { issues }
}

/// A validated groupoid dynamical system `(A, G, alpha)`.
#[derive(Clone, Debug)]
pub struct DynamicalSystem {
    groupoid: FiniteGroupoid,
    fibers: FiberedAlgebra,
    unitaries: Vec<ComplexMatrix>,
}

impl DynamicalSystem {
    pub fn new(groupoid: FiniteGroupoid, dims: Vec<usize>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let fibers = FiberedAlgebra { dims };
        let report = validate_action(&groupoid, &fibers, &unitaries, 1e-9);
        if let Some(issue) = report.issues.first() {
            return Err(Error::InvalidAction(format!("{issue:?} ({} issues)", report.issues.len())));
        }
        Ok(DynamicalSystem { groupoid, fibers, unitaries })
    }

    /// The trivial action on fibers of orbit-constant dimension.
    pub fn trivial(groupoid: FiniteGroupoid, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != groupoid.units().len() {
            return Err(Error::DimensionMismatch("one fiber dimension per unit".into()));
        }
        let unitaries = groupoid
            .elements()
            .map(|x| identity(dims[groupoid.unit_pos(groupoid.source(x))]))
            .collect();
        Self::new(groupoid, dims, unitaries)
    }

    /// Scalar fibers: the crossed product is `C*(G)`.
    pub fn scalar(groupoid: FiniteGroupoid) -> Self {
        let k = groupoid.units().len();
        Self::trivial(groupoid, vec![1; k]).expect("scalar fibers are always valid")
    }

    /// `U_g = W_{r(g)} W_{s(g)}^*`, an action exterior equivalent to the trivial one.
    pub fn coboundary(groupoid: FiniteGroupoid, w: &[ComplexMatrix]) -> Result<Self> {
        if w.len() != groupoid.units().len() {
            return Err(Error::DimensionMismatch("one unitary per unit".into()));
        }
        let dims = w.iter().map(|m| m.nrows()).collect();
        let unitaries = groupoid
            .elements()
            .map(|x| &w[groupoid.unit_pos(groupoid.range(x))] * w[groupoid.unit_pos(groupoid.source(x))].adjoint())
            .collect();
        Self::new(groupoid, dims, unitaries)
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn fibers(&self) -> &FiberedAlgebra {
        &self.fibers
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn unitary(&self, x: ElemId) -> &ComplexMatrix {
        &self.unitaries[x]
    }

    /// `d_u` for a unit `u`.
    pub fn dim_at(&self, u: ElemId) -> usize {
        self.fibers.dims[self.groupoid.unit_pos(u)]
    }

    /// `alpha_x: A(s(x)) -> A(r(x))`.
    pub fn alpha(&self, x: ElemId, a: &ComplexMatrix) -> ComplexMatrix {
        let u = &self.unitaries[x];
        u * a * u.adjoint()
    }

    /// `alpha_x^-1: A(r(x)) -> A(s(x))`.
    pub fn alpha_inv(&self, x: ElemId, a: &ComplexMatrix) -> ComplexMatrix {
        let u = &self.unitaries[x];
        u.adjoint() * a * u
    }

    /// `sum_x d_{r(x)}^2`, the linear dimension of the crossed product.
    pub fn crossed_dim(&self) -> usize {
        self.groupoid.elements().map(|x| self.dim_at(self.groupoid.range(x)).pow(2)).sum()
    }

    pub fn is_scalar(&self) -> bool {
        self.fibers.dims.iter().all(|&d| d == 1)
    }

    /// The system restricted to a subgroupoid.
    pub fn restrict(&self, sub: &Embedded) -> Result<Self> {
        let dims = sub.groupoid.units().iter().map(|&k| self.dim_at(sub.inclusion[k])).collect();
        let unitaries = sub.inclusion.iter().map(|&x| self.unitaries[x].clone()).collect();
        Self::new(sub.groupoid.clone(), dims, unitaries)
    }
}

/// A section `x -> f(x) in A(r(x))` of the pulled-back bundle.
#[derive(Clone, Debug)]
pub struct Section<'s> {
    system: &'s DynamicalSystem,
    values: Vec<ComplexMatrix>,
}

impl<'s> Section<'s> {
    pub fn new(system: &'s DynamicalSystem, values: Vec<ComplexMatrix>) -> Result<Self> {
        let g = &system.groupoid;
        if values.len() != g.len() {
            return Err(Error::DimensionMismatch(format!("{} values for |G| = {}", values.len(), g.len())));
        }
        for (x, v) in values.iter().enumerate() {
            let d = system.dim_at(g.range(x));
            if v.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!("value at {} must be {d}x{d}", g.name(x))));
            }
        }
        Ok(Section { system, values })
    }

    pub fn zero(system: &'s DynamicalSystem) -> Self {
        let g = &system.groupoid;
        let values = g.elements().map(|x| {
            let d = system.dim_at(g.range(x));
            zeros(d, d)
        });
        Section { system, values: values.collect() }
    }

    /// `delta_x (x) a`.
    pub fn point(system: &'s DynamicalSystem, x: ElemId, a: ComplexMatrix) -> Result<Self> {
        let mut f = Self::zero(system);
        if f.values[x].shape() != a.shape() {
            return Err(Error::DimensionMismatch(format!("value at {} has the wrong size", system.groupoid.name(x))));
        }
        f.values[x] = a;
        Ok(f)
    }

    pub fn random<R: Rng>(system: &'s DynamicalSystem, rng: &mut R) -> Self {
        let g = &system.groupoid;
        let values = g
            .elements()
            .map(|x| {
                let d = system.dim_at(g.range(x));
                random_matrix(d, d, rng)
            })
            .collect();
        Section { system, values }
    }

    pub fn system(&self) -> &'s DynamicalSystem {
        self.system
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    pub fn at(&self, x: ElemId) -> &ComplexMatrix {
        &self.values[x]
    }

    fn same_system(&self, other: &Self) -> Result<()> {
        if !std::ptr::eq(self.system, other.system) && self.system.groupoid != other.system.groupoid {
            return Err(Error::GroupoidMismatch);
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| max_abs(&(a - b))).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_system(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Section { system: self.system, values })
    }
}

/// `(f * g)(x) = sum over y in G^{r(x)} of f(y) alpha_y(g(y^-1 x))`.
pub fn convolve_sections<'s>(f: &Section<'s>, h: &Section<'s>) -> Result<Section<'s>> {
    f.same_system(h)?;
    let sys = f.system;
    let g = &sys.groupoid;
    let values = g
        .elements()
        .map(|x| {
            let u = g.range(x);
            let d = sys.dim_at(u);
            let mut acc = zeros(d, d);
            for &y in g.range_fiber(u) {
                let rest = g.mul_unchecked(g.inverse(y), x);
                acc += &f.values[y] * sys.alpha(y, &h.values[rest]);
            }
            acc * c(g.weight(u), 0.0)
        })
        .collect();
    Ok(Section { system: sys, values })
}

/// `f^*(x) = alpha_x(f(x^-1)^*)`.
pub fn involute_section<'s>(f: &Section<'s>) -> Section<'s> {
    let sys = f.system;
    let g = &sys.groupoid;
    let values = g.elements().map(|x| sys.alpha(x, &f.values[g.inverse(x)].adjoint())).collect();
    Section { system: sys, values }
}

/// `(delta_a (x) p)(delta_b (x) q) = delta_{ab} (x) p alpha_a(q)`, or `None` if not composable.
pub fn point_product(sys: &DynamicalSystem, a: ElemId, p: &ComplexMatrix, b: ElemId, q: &ComplexMatrix) -> Option<(ElemId, ComplexMatrix)> {
    let g = &sys.groupoid;
    g.mul(a, b).map(|ab| (ab, p * sys.alpha(a, q) * c(g.weight(g.range(a)), 0.0)))
}

/// Helper for tests and corpora: the matrix unit basis of `A(r(x))` at every `x`.
pub fn point_basis(sys: &DynamicalSystem) -> Vec<(ElemId, usize, usize)> {
    let g = &sys.groupoid;
    let mut out = Vec::new();
    for x in g.elements() {
        let d = sys.dim_at(g.range(x));
        for i in 0..d {
            for j in 0..d {
                out.push((x, i, j));
            }
        }
    }
    out
}

#[cfg(test)]
pub(crate) fn embed_scalar(z: crate::linalg::C64) -> ComplexMatrix {
    ComplexMatrix::from_element(1, 1, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupoidFunction;
    use crate::groupoid::GroupoidActionOnSet;
    use crate::groups::GroupTable;
    use crate::linalg::{diag, random_unitary, ONE};
    use crate::star_algebra::NumericOptions;

    fn z2() -> FiniteGroupoid {
        FiniteGroupoid::from_group(&GroupTable::cyclic(2).unwrap())
    }

    fn swap() -> FiniteGroupoid {
        let act = GroupoidActionOnSet::from_permutations(
            &GroupTable::cyclic(2).unwrap(),
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        FiniteGroupoid::transformation_groupoid(&act)
    }

    #[test]
    fn validation() {
        assert!(DynamicalSystem::trivial(z2(), vec![1]).is_ok());
        let u = diag(&[ONE, -ONE]);
        let sys = DynamicalSystem::new(z2(), vec![2], vec![identity(2), u.clone()]).unwrap();
        assert_eq!(sys.crossed_dim(), 8);

        // a cocycle built from per-unit unitaries is consistent
        let mut rng = NumericOptions::default().rng(1);
        let w: Vec<ComplexMatrix> = (0..2).map(|_| random_unitary(2, &mut rng)).collect();
        assert!(DynamicalSystem::coboundary(swap(), &w).is_ok());

        // corrupt one arrow of the swap system: the report names a pair containing it
        let g = swap();
        let mut us: Vec<ComplexMatrix> = g.elements().map(|_| identity(2)).collect();
        let bad = g.elements().find(|&x| !g.is_unit(x)).unwrap();
        us[bad] = diag(&[ONE, c(0.0, 1.0)]);
        let report = validate_action(&g, &FiberedAlgebra { dims: vec![2, 2] }, &us, 1e-9);
        assert!(report.issues.iter().any(|i| matches!(i, ActionIssue::Functoriality { left, right, .. } if *left == bad || *right == bad)));

        let mismatch = DynamicalSystem::trivial(swap(), vec![1, 2]);
        assert!(mismatch.is_err());
    }

    #[test]
    fn section_algebra() {
        let mut rng = NumericOptions::default().rng(2);
        let w: Vec<ComplexMatrix> = (0..2).map(|_| random_unitary(2, &mut rng)).collect();
        let sys = DynamicalSystem::coboundary(swap(), &w).unwrap();
        let g = sys.groupoid().clone();
        let (a, b) = (random_matrix(2, 2, &mut rng), random_matrix(2, 2, &mut rng));
        for x in g.elements() {
            for y in g.elements() {
                let lhs = convolve_sections(
                    &Section::point(&sys, x, a.clone()).unwrap(),
                    &Section::point(&sys, y, b.clone()).unwrap(),
                )
                .unwrap();
                let expected = match point_product(&sys, x, &a, y, &b) {
                    Some((xy, m)) => Section::point(&sys, xy, m).unwrap(),
                    None => Section::zero(&sys),
                };
                assert!(lhs.max_abs_diff(&expected) < 1e-12);
            }
        }
        let f = Section::random(&sys, &mut rng);
        let h = Section::random(&sys, &mut rng);
        let k = Section::random(&sys, &mut rng);
        assert!(involute_section(&involute_section(&f)).max_abs_diff(&f) < 1e-12);
        let fh = convolve_sections(&f, &h).unwrap();
        let assoc = convolve_sections(&fh, &k).unwrap().max_abs_diff(
            &convolve_sections(&f, &convolve_sections(&h, &k).unwrap()).unwrap(),
        );
        assert!(assoc < 1e-12);
        let star = involute_section(&fh).max_abs_diff(
            &convolve_sections(&involute_section(&h), &involute_section(&f)).unwrap(),
        );
        assert!(star < 1e-12);
    }

    #[test]
    fn scalar_case_is_the_groupoid_algebra() {
        let g = swap();
        let sys = DynamicalSystem::scalar(g.clone());
        let mut rng = NumericOptions::default().rng(3);
        let f = GroupoidFunction::random(&g, &mut rng);
        let h = GroupoidFunction::random(&g, &mut rng);
        let lift = |f: &GroupoidFunction| {
            Section::new(&sys, f.values().iter().map(|&z| embed_scalar(z)).collect()).unwrap()
        };
        let conv = convolve_sections(&lift(&f), &lift(&h)).unwrap();
        let expected = f.convolve(&h).unwrap();
        for x in g.elements() {
            assert_eq!(conv.at(x)[(0, 0)], expected.at(x));
        }
        let inv = involute_section(&lift(&f));
        for x in g.elements() {
            assert_eq!(inv.at(x)[(0, 0)], f.involute().at(x));
        }
    }
}
