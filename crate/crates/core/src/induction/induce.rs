use serde::Serialize;

use super::{Character, QuotientSection};
use crate::algebra::{orbit_options, GroupoidFunction};
use crate::crossed::{
    convolve_sections, crossed_spectrum, involute_section, point_basis, DynamicalSystem, Section,
};
use crate::error::{Error, Result};
use crate::groupoid::{subgroupoid, ElemId, FiniteGroupoid};
use crate::linalg::{c, identity, matrix_unit, max_abs, trace, zeros, ComplexMatrix, C64};
use crate::star_algebra::{MatrixRep, NumericOptions};

/// Which class representative sits over each unit, by unit position.
fn reps_over(g: &FiniteGroupoid, section: &QuotientSection) -> Vec<Option<usize>> {
    let mut over = vec![None; g.units().len()];
    for (p, &x) in section.representatives.iter().enumerate() {
        over[g.unit_pos(g.range(x))] = Some(p);
    }
    over
}

/// `N^omega` on `l2(G_u / S_u)`: `N^omega(delta_y)` sends the class of `y^-1 c` to the
/// class of `c` with coefficient `conj(omega(delta(y^-1 c)))`, `c` the representative over `r(y)`.
pub fn induce_character(g: &FiniteGroupoid, omega: &Character, section: &QuotientSection) -> Result<MatrixRep> {
    if section.unit != omega.unit {
        return Err(Error::FiberMismatch(section.unit as u32, omega.unit as u32));
    }
    let k = section.len();
    let over = reps_over(g, section);
    let mut images = Vec::with_capacity(g.len());
    for y in g.elements() {
        let mut m = zeros(k, k);
        if let Some(p) = over[g.unit_pos(g.range(y))] {
            let moved = g.mul_unchecked(g.inverse(y), section.representatives[p]);
            let q = section.class(moved).expect("still in G_u");
            let d = section.delta(moved).expect("still in G_u");
            let w = omega.at(d).expect("delta lies in the isotropy");
            m[(p, q)] = w.conj() * g.weight(g.range(y));
        }
        images.push(m);
    }
    MatrixRep::new(g.names().to_vec(), images)
}

/// Worst failure of a representation labelled by element names to be multiplicative
/// and *-preserving, on a few random functions.
pub fn scalar_rep_residual(g: &FiniteGroupoid, rep: &MatrixRep, opts: &NumericOptions) -> Result<f64> {
    let mut rng = opts.rng(0x5343_414c);
    let n = rep.dim;
    let apply = |f: &GroupoidFunction| {
        let mut m = zeros(n, n);
        for (x, img) in rep.images.iter().enumerate() {
            m += img * f.at(x);
        }
        m
    };
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let f = GroupoidFunction::random(g, &mut rng);
        let h = GroupoidFunction::random(g, &mut rng);
        worst = worst.max(max_abs(&(apply(&f) * apply(&h) - apply(&f.convolve(&h)?))));
        worst = worst.max(max_abs(&(apply(&f).adjoint() - apply(&f.involute()))));
    }
    Ok(worst)
}

/// A covariant pair `(pi, U)` for `(A(u), S_u, alpha)`.
#[derive(Clone, Debug, Serialize)]
pub struct FiberCovariantRep {
    pub unit: ElemId,
    pub fiber_dim: usize,
    pub dim: usize,
    /// `pi(E_ij)` at index `i * fiber_dim + j`.
    #[serde(skip)]
    pub pi: Vec<ComplexMatrix>,
    /// The isotropy at `unit`, in id order.
    pub isotropy: Vec<ElemId>,
    #[serde(skip)]
    pub u: Vec<ComplexMatrix>,
}

impl FiberCovariantRep {
    /// Validates that `pi` is a *-representation, `U` a unitary representation and
    /// `U_s pi(a) U_s^* = pi(alpha_s(a))`.
    pub fn new(sys: &DynamicalSystem, unit: ElemId, pi: Vec<ComplexMatrix>, u: Vec<ComplexMatrix>) -> Result<Self> {
        let g = sys.groupoid();
        let d = sys.dim_at(unit);
        let isotropy = g.isotropy(unit);
        if pi.len() != d * d || u.len() != isotropy.len() {
            return Err(Error::Covariance("wrong number of images".into()));
        }
        let dim = pi[0].nrows();
        if pi.iter().chain(&u).any(|m| m.shape() != (dim, dim)) {
            return Err(Error::Covariance("images of different sizes".into()));
        }
        let rep = FiberCovariantRep { unit, fiber_dim: d, dim, pi, isotropy, u };
        let tol = 1e-8;
        for i in 0..d {
            for j in 0..d {
                let pij = &rep.pi[i * d + j];
                if max_abs(&(pij.adjoint() - &rep.pi[j * d + i])) > tol {
                    return Err(Error::Covariance(format!("pi(E_{i}{j})^* != pi(E_{j}{i})")));
                }
                for k in 0..d {
                    for l in 0..d {
                        let expected = if j == k { rep.pi[i * d + l].clone() } else { zeros(dim, dim) };
                        if max_abs(&(pij * &rep.pi[k * d + l] - expected)) > tol {
                            return Err(Error::Covariance(format!("pi is not multiplicative at E_{i}{j} E_{k}{l}")));
                        }
                    }
                }
            }
        }
        for (a, &s) in rep.isotropy.iter().enumerate() {
            for (b, &t) in rep.isotropy.iter().enumerate() {
                let st = rep.position(g.mul_unchecked(s, t)).expect("isotropy is a group");
                if max_abs(&(&rep.u[a] * &rep.u[b] - &rep.u[st])) > tol {
                    return Err(Error::Covariance(format!("U({}) U({}) != U({})", g.name(s), g.name(t), g.name(rep.isotropy[st]))));
                }
            }
            if max_abs(&(rep.u[a].adjoint() * &rep.u[a] - identity(dim))) > tol {
                return Err(Error::Covariance(format!("U({}) is not unitary", g.name(s))));
            }
            for i in 0..d {
                for j in 0..d {
                    let e = matrix_unit(d, i, j);
                    let lhs = &rep.u[a] * &rep.pi[i * d + j] * rep.u[a].adjoint();
                    let rhs = rep.pi_of(&sys.alpha(s, &e));
                    if max_abs(&(lhs - rhs)) > tol {
                        return Err(Error::Covariance(format!("covariance fails at s = {}, E_{i}{j}", g.name(s))));
                    }
                }
            }
        }
        Ok(rep)
    }

    pub fn position(&self, s: ElemId) -> Option<usize> {
        self.isotropy.binary_search(&s).ok()
    }

    pub fn pi_of(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let d = self.fiber_dim;
        let mut m = zeros(self.dim, self.dim);
        for i in 0..d {
            for j in 0..d {
                let z = a[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    m += &self.pi[i * d + j] * z;
                }
            }
        }
        m
    }

    pub fn u_at(&self, s: ElemId) -> Option<&ComplexMatrix> {
        self.position(s).map(|k| &self.u[k])
    }

    /// Traces of `pi(E_ij) U_s`, the character of the integrated form on `A(u) x| S_u`,
    /// ordered by `(s, i, j)`.
    pub fn fiber_traces(&self) -> Vec<C64> {
        let d = self.fiber_dim;
        let mut out = Vec::with_capacity(self.isotropy.len() * d * d);
        for us in &self.u {
            for p in &self.pi {
                out.push(trace(&(p * us)));
            }
        }
        out
    }

    pub fn equivalent(&self, other: &FiberCovariantRep, tol: f64) -> bool {
        self.unit == other.unit
            && self.dim == other.dim
            && self
                .fiber_traces()
                .iter()
                .zip(other.fiber_traces())
                .all(|(a, b)| (a - b).norm() <= tol * (self.dim as f64).max(1.0))
    }
}

/// The irreducible covariant pairs at `u`, one per block of `A(u) x| S_u`:
/// `pi(a) = rho(delta_u (x) a)` and `U_s = rho(delta_s (x) 1)`.
pub fn fiber_covariant_reps(sys: &DynamicalSystem, u: ElemId, opts: &NumericOptions) -> Result<Vec<FiberCovariantRep>> {
    let g = sys.groupoid();
    let emb = subgroupoid(g, &g.isotropy(u))?;
    let fiber = sys.restrict(&emb)?;
    let local_unit = emb.local(u).expect("unit is in its isotropy");
    let d = sys.dim_at(u);
    let spec = crossed_spectrum(&fiber, &orbit_options(opts, g.unit_pos(u)))?;
    let mut out = Vec::with_capacity(spec.blocks.len());
    for block in &spec.blocks {
        let image = |s: ElemId, i: usize, j: usize| -> ComplexMatrix {
            let k = block
                .labels
                .iter()
                .position(|l| l.element == s && l.i == i && l.j == j)
                .expect("point label present");
            block.rep.images[k].clone()
        };
        let pi = (0..d * d).map(|p| image(local_unit, p / d, p % d)).collect();
        let us = (0..emb.inclusion.len())
            .map(|s| (0..d).fold(zeros(block.dim, block.dim), |acc, i| acc + image(s, i, i)))
            .collect();
        out.push(FiberCovariantRep::new(sys, u, pi, us)?);
    }
    Ok(out)
}

/// `x . R = (pi o alpha_x^-1, s -> U_{x^-1 s x})` at `r(x)`.
pub fn conjugate_fiber_rep(sys: &DynamicalSystem, x: ElemId, rep: &FiberCovariantRep) -> Result<FiberCovariantRep> {
    let g = sys.groupoid();
    if g.source(x) != rep.unit {
        return Err(Error::FiberMismatch(g.source(x) as u32, rep.unit as u32));
    }
    let r = g.range(x);
    let d = sys.dim_at(r);
    let pi = (0..d * d)
        .map(|p| rep.pi_of(&sys.alpha_inv(x, &matrix_unit(d, p / d, p % d))))
        .collect();
    let xinv = g.inverse(x);
    let u = g
        .isotropy(r)
        .iter()
        .map(|&s| rep.u_at(g.mul_unchecked(g.mul_unchecked(xinv, s), x)).cloned().expect("conjugate is in the isotropy"))
        .collect();
    FiberCovariantRep::new(sys, r, pi, u)
}

/// `N^R` on `sum over classes of C^{dim R}`: for each point label `delta_y (x) E_ij`
/// the block from the class of `y^-1 c` to the class of `c` (`c` over `r(y)`) is
/// `pi(alpha_c^-1(E_ij)) U_{delta(y^-1 c)}^*`. Labels follow `crossed::point_basis`.
pub fn induce_covariant(sys: &DynamicalSystem, rep: &FiberCovariantRep, section: &QuotientSection) -> Result<MatrixRep> {
    let g = sys.groupoid();
    if section.unit != rep.unit {
        return Err(Error::FiberMismatch(section.unit as u32, rep.unit as u32));
    }
    let k = section.len();
    let dim = rep.dim;
    let over = reps_over(g, section);
    let labels = point_basis(sys);
    let mut names = Vec::with_capacity(labels.len());
    let mut images = Vec::with_capacity(labels.len());
    for &(y, i, j) in &labels {
        names.push(format!("{}[{},{}]", g.name(y), i, j));
        let mut m = zeros(dim * k, dim * k);
        if let Some(p) = over[g.unit_pos(g.range(y))] {
            let cp = section.representatives[p];
            let moved = g.mul_unchecked(g.inverse(y), cp);
            let q = section.class(moved).expect("still in G_u");
            let delta = section.delta(moved).expect("still in G_u");
            let d = sys.dim_at(g.range(y));
            let a = sys.alpha_inv(cp, &matrix_unit(d, i, j));
            let block = rep.pi_of(&a) * rep.u_at(delta).expect("isotropy").adjoint() * c(g.weight(g.range(y)), 0.0);
            m.view_mut((p * dim, q * dim), (dim, dim)).copy_from(&block);
        }
        images.push(m);
    }
    MatrixRep::new(names, images)
}

/// Worst failure of a representation labelled by `point_basis` to be a
/// *-representation of the section algebra, on a few random sections.
pub fn crossed_rep_residual(sys: &DynamicalSystem, rep: &MatrixRep, opts: &NumericOptions) -> Result<f64> {
    let labels = point_basis(sys);
    let mut rng = opts.rng(0x4352_4f53);
    let n = rep.dim;
    let apply = |f: &Section| {
        let mut m = zeros(n, n);
        for (k, &(y, i, j)) in labels.iter().enumerate() {
            m += &rep.images[k] * f.at(y)[(i, j)];
        }
        m
    };
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let f = Section::random(sys, &mut rng);
        let h = Section::random(sys, &mut rng);
        worst = worst.max(max_abs(&(apply(&f) * apply(&h) - apply(&convolve_sections(&f, &h)?))));
        worst = worst.max(max_abs(&(apply(&f).adjoint() - apply(&involute_section(&f)))));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c_star_spectrum;
    use crate::groupoid::GroupoidActionOnSet;
    use crate::groups::GroupTable;
    use crate::induction::{dual_bundle, g_action_on_dual};
    use crate::linalg::random_unitary;
    use crate::star_algebra::{are_equivalent, is_irreducible};

    fn parity() -> FiniteGroupoid {
        let act = GroupoidActionOnSet::from_permutations(
            &GroupTable::cyclic(4).unwrap(),
            vec!["0".into(), "1".into()],
            vec![vec![0, 1], vec![1, 0], vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        FiniteGroupoid::transformation_groupoid(&act)
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

    fn matches_some_block(g: &FiniteGroupoid, rep: &MatrixRep) -> bool {
        let spec = c_star_spectrum(g, &NumericOptions::default()).unwrap();
        spec.blocks.iter().any(|b| {
            b.dim == rep.dim
                && b.full_traces(g.len()).iter().zip(&rep.traces).all(|(x, y)| (x - y).norm() < 1e-8)
        })
    }

    #[test]
    fn induced_characters() {
        let opts = NumericOptions::default();
        let pair = FiniteGroupoid::pair_groupoid(2).unwrap();
        let u = pair.units()[0];
        let dual = dual_bundle(&pair).unwrap();
        let omega = &dual.characters[dual.by_unit[0][0]];
        let rep = induce_character(&pair, omega, &QuotientSection::minimal(&pair, u)).unwrap();
        assert_eq!(rep.dim, 2);
        assert!(is_irreducible(&rep, &opts));
        assert!(matches_some_block(&pair, &rep));

        let z4 = FiniteGroupoid::from_group(&GroupTable::cyclic(4).unwrap());
        let dual = dual_bundle(&z4).unwrap();
        let omega = &dual.characters[1];
        let rep = induce_character(&z4, omega, &QuotientSection::minimal(&z4, z4.units()[0])).unwrap();
        assert_eq!(rep.dim, 1);
        for x in z4.elements() {
            assert!((rep.images[x][(0, 0)] - omega.at(x).unwrap()).norm() < 1e-15);
        }

        let g = parity();
        let dual = dual_bundle(&g).unwrap();
        for omega in &dual.characters {
            let rep = induce_character(&g, omega, &QuotientSection::minimal(&g, omega.unit)).unwrap();
            assert_eq!(rep.dim, 2);
            assert!(is_irreducible(&rep, &opts));
            assert!(scalar_rep_residual(&g, &rep, &opts).unwrap() < 1e-12);
            assert!(matches_some_block(&g, &rep));
            // another section gives an equivalent representation
            let other = induce_character(&g, omega, &QuotientSection::maximal(&g, omega.unit)).unwrap();
            assert!(are_equivalent(&rep, &other, 1e-10).unwrap());
            for &x in g.source_fiber(omega.unit) {
                let moved = g_action_on_dual(&g, omega, x).unwrap();
                let rep2 = induce_character(&g, &moved, &QuotientSection::minimal(&g, moved.unit)).unwrap();
                assert!(are_equivalent(&rep, &rep2, 1e-10).unwrap());
            }
        }
    }

    #[test]
    fn scalar_covariant_induction_agrees() {
        let g = parity();
        let sys = DynamicalSystem::scalar(g.clone());
        let dual = dual_bundle(&g).unwrap();
        for omega in &dual.characters {
            let iso = g.isotropy(omega.unit);
            let u = iso.iter().map(|&s| ComplexMatrix::from_element(1, 1, omega.at(s).unwrap())).collect();
            let r = FiberCovariantRep::new(&sys, omega.unit, vec![identity(1)], u).unwrap();
            let section = QuotientSection::minimal(&g, omega.unit);
            let a = induce_covariant(&sys, &r, &section).unwrap();
            let b = induce_character(&g, omega, &section).unwrap();
            for x in g.elements() {
                assert!(max_abs(&(&a.images[x] - &b.images[x])) < 1e-15);
            }
        }
    }

    #[test]
    fn covariant_induction_on_matrix_fibers() {
        let opts = NumericOptions::default();
        let mut rng = opts.rng(6);
        let w: Vec<ComplexMatrix> = (0..2).map(|_| random_unitary(2, &mut rng)).collect();
        let sys = DynamicalSystem::coboundary(swap(), &w).unwrap();
        let g = sys.groupoid().clone();
        let u = g.units()[0];
        let reps = fiber_covariant_reps(&sys, u, &opts).unwrap();
        assert_eq!(reps.len(), 1);
        let n = induce_covariant(&sys, &reps[0], &QuotientSection::minimal(&g, u)).unwrap();
        assert_eq!(n.dim, 4);
        assert!(is_irreducible(&n, &opts));
        assert!(crossed_rep_residual(&sys, &n, &opts).unwrap() < 1e-10);

        let x = g.elements().find(|&x| g.source(x) == u && g.range(x) != u).unwrap();
        let moved = conjugate_fiber_rep(&sys, x, &reps[0]).unwrap();
        assert_eq!(moved.unit, g.range(x));
        let there = fiber_covariant_reps(&sys, g.range(x), &opts).unwrap();
        assert!(moved.equivalent(&there[0], 1e-8));
    }

    #[test]
    fn group_case_and_covariance_errors() {
        let opts = NumericOptions::default();
        let g = FiniteGroupoid::from_group(&GroupTable::cyclic(2).unwrap());
        let sys = DynamicalSystem::new(g.clone(), vec![2], vec![identity(2), crate::linalg::diag(&[crate::linalg::ONE, -crate::linalg::ONE])]).unwrap();
        let u = g.units()[0];
        let reps = fiber_covariant_reps(&sys, u, &opts).unwrap();
        assert_eq!(reps.len(), 2);
        for r in &reps {
            let n = induce_covariant(&sys, r, &QuotientSection::minimal(&g, u)).unwrap();
            assert_eq!(n.dim, r.dim);
            // a point quotient: N^R is R integrated
            let traces = r.fiber_traces();
            assert!(n.traces.iter().zip(&traces).all(|(a, b)| (a - b).norm() < 1e-10));
            let s = g.isotropy(u)[1];
            let conj = conjugate_fiber_rep(&sys, s, r).unwrap();
            assert!(conj.equivalent(r, 1e-8));
        }
        // drop covariance by flipping U
        let r = &reps[0];
        let bad = FiberCovariantRep::new(&sys, u, r.pi.clone(), vec![identity(r.dim), identity(r.dim)]);
        assert!(matches!(bad, Err(Error::Covariance(_))));
    }
}
