//! The convolution algebra of a finite groupoid and its faithful matrix model.
//!
//! With Haar weights `w` (one per orbit) the left Haar measure on `G^u` is `w_u`
//! times counting measure, the right one on `G_u` is its inverse image, and the
//! modular function is identically one.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{check_homomorphism, is_bijection, unit_orbits, ElemId, FiniteGroupoid, OrbitStructure};
use crate::linalg::{self, c, op_norm, zeros, ComplexMatrix, C64, ZERO};
use crate::star_algebra::{irreps, wedderburn, MatrixRep, MatrixStarAlgebra, NumericOptions};

/// A function on a finite groupoid; point masses form the canonical basis.
#[derive(Clone, Debug)]
pub struct GroupoidFunction<'g> {
    groupoid: &'g FiniteGroupoid,
    values: Vec<C64>,
}

impl PartialEq for GroupoidFunction<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.groupoid == other.groupoid && self.values == other.values
    }
}

impl<'g> GroupoidFunction<'g> {
    pub fn new(groupoid: &'g FiniteGroupoid, values: Vec<C64>) -> Result<Self> {
        if values.len() != groupoid.len() {
            return Err(Error::DimensionMismatch(format!("{} values for |G| = {}", values.len(), groupoid.len())));
        }
        Ok(GroupoidFunction { groupoid, values })
    }

    pub fn zero(groupoid: &'g FiniteGroupoid) -> Self {
        GroupoidFunction { groupoid, values: vec![ZERO; groupoid.len()] }
    }

    pub fn delta(groupoid: &'g FiniteGroupoid, g: ElemId) -> Self {
        let mut f = Self::zero(groupoid);
        f.values[g] = c(1.0, 0.0);
        f
    }

    pub fn constant(groupoid: &'g FiniteGroupoid, z: C64) -> Self {
        GroupoidFunction { groupoid, values: vec![z; groupoid.len()] }
    }

    /// Entries with real and imaginary parts uniform in `[-1, 1)`.
    pub fn random<R: Rng>(groupoid: &'g FiniteGroupoid, rng: &mut R) -> Self {
        let values =
            (0..groupoid.len()).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        GroupoidFunction { groupoid, values }
    }

    pub fn groupoid(&self) -> &'g FiniteGroupoid {
        self.groupoid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn at(&self, g: ElemId) -> C64 {
        self.values[g]
    }

    fn same_groupoid(&self, other: &Self) -> Result<()> {
        if self.groupoid.digest() != other.groupoid.digest() {
            return Err(Error::GroupoidMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_groupoid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(GroupoidFunction { groupoid: self.groupoid, values })
    }

    pub fn scale(&self, z: C64) -> Self {
        GroupoidFunction { groupoid: self.groupoid, values: self.values.iter().map(|v| v * z).collect() }
    }

    /// `(f * g)(x) = sum over y in G^{r(x)} of f(y) g(y^-1 x)`, weighted by the Haar weight at `r(x)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.same_groupoid(other)?;
        let g = self.groupoid;
        let values = g
            .elements()
            .map(|x| {
                let u = g.range(x);
                let sum: C64 = g
                    .range_fiber(u)
                    .iter()
                    .map(|&y| self.values[y] * other.values[g.mul_unchecked(g.inverse(y), x)])
                    .sum();
                sum * g.weight(u)
            })
            .collect();
        Ok(GroupoidFunction { groupoid: g, values })
    }

    /// `f^*(x) = conj f(x^-1)`.
    pub fn involute(&self) -> Self {
        let g = self.groupoid;
        let values = g.elements().map(|x| self.values[g.inverse(x)].conj()).collect();
        GroupoidFunction { groupoid: g, values }
    }

    /// `max(sup_u sum_{G^u} |f|, sup_u sum_{G_u} |f|)` with Haar weights.
    pub fn i_norm(&self) -> f64 {
        let g = self.groupoid;
        let sum = |fiber: &[ElemId]| fiber.iter().map(|&x| self.values[x].norm()).sum::<f64>();
        g.units()
            .iter()
            .map(|&u| g.weight(u) * sum(g.range_fiber(u)).max(sum(g.source_fiber(u))))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `nu = mu o lambda` and its inverse agree when `mu` is counting measure on the units,
/// so the modular function is identically one.
pub fn modular_function_is_trivial(g: &FiniteGroupoid) -> bool {
    g.elements().all(|x| g.weight(g.range(x)) == g.weight(g.source(x)))
}

/// Coordinates of the left regular representation on `sum_{u in units} l2(G_u)`.
///
/// The full model uses every unit in id order with `G_u` in id order; a reduced
/// model keeps one unit per orbit, which is still faithful.
#[derive(Clone, Debug)]
pub struct RegularModel<'g> {
    groupoid: &'g FiniteGroupoid,
    /// Units whose source fibers are included, with the offset of each.
    units: Vec<(ElemId, usize)>,
    /// Coordinate index of each element `x`, if `s(x)` is an included unit.
    coord: Vec<Option<usize>>,
    dim: usize,
}

impl<'g> RegularModel<'g> {
    fn on_units(groupoid: &'g FiniteGroupoid, units: &[ElemId]) -> Self {
        let mut coord = vec![None; groupoid.len()];
        let mut offsets = Vec::with_capacity(units.len());
        let mut dim = 0;
        for &u in units {
            offsets.push((u, dim));
            for &x in groupoid.source_fiber(u) {
                coord[x] = Some(dim);
                dim += 1;
            }
        }
        RegularModel { groupoid, units: offsets, coord, dim }
    }

    /// On `sum_u l2(G_u)` over all units.
    pub fn full(groupoid: &'g FiniteGroupoid) -> Self {
        Self::on_units(groupoid, groupoid.units())
    }

    /// On `l2(G_u)` for the least unit `u` of one orbit.
    pub fn on_orbit(groupoid: &'g FiniteGroupoid, orbit: &[ElemId]) -> Self {
        Self::on_units(groupoid, &orbit[..1])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn units(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.units.iter().map(|&(u, _)| u)
    }

    /// Index of the basis vector `e_x`, if `x` is a coordinate.
    pub fn coordinate(&self, x: ElemId) -> Option<usize> {
        self.coord[x]
    }

    /// `L(delta_y) e_x = w e_{yx}` whenever `s(y) = r(x)`.
    pub fn delta_image(&self, y: ElemId) -> ComplexMatrix {
        let g = self.groupoid;
        let w = c(g.weight(g.range(y)), 0.0);
        let mut m = zeros(self.dim, self.dim);
        for &x in g.range_fiber(g.source(y)) {
            if let Some(j) = self.coord[x] {
                let i = self.coord[g.mul_unchecked(y, x)].expect("same source");
                m[(i, j)] = w;
            }
        }
        m
    }

    pub fn embed(&self, f: &GroupoidFunction<'_>) -> Result<ComplexMatrix> {
        if f.groupoid.digest() != self.groupoid.digest() {
            return Err(Error::GroupoidMismatch);
        }
        let g = self.groupoid;
        let mut m = zeros(self.dim, self.dim);
        for y in g.elements() {
            let v = f.values[y];
            if v == ZERO {
                continue;
            }
            let w = g.weight(g.range(y));
            for &x in g.range_fiber(g.source(y)) {
                if let Some(j) = self.coord[x] {
                    let i = self.coord[g.mul_unchecked(y, x)].expect("same source");
                    m[(i, j)] += v * w;
                }
            }
        }
        Ok(m)
    }

    /// Elements acting nontrivially on the model, in id order.
    pub fn support(&self) -> Vec<ElemId> {
        let g = self.groupoid;
        g.elements().filter(|&y| g.range_fiber(g.source(y)).iter().any(|&x| self.coord[x].is_some())).collect()
    }

    /// The image algebra labelled by element names. Images of distinct point masses
    /// have disjoint supports, so they form an orthogonal basis.
    pub fn algebra(&self) -> Result<MatrixStarAlgebra> {
        let support = self.support();
        let labels = support.iter().map(|&y| self.groupoid.name(y).to_string()).collect();
        let images = support.iter().map(|&y| self.delta_image(y)).collect();
        MatrixStarAlgebra::from_orthogonal_basis(labels, images)
    }
}

/// Operator norm of `L(f)`: the maximum over orbits of the reduced models.
pub fn operator_norm(f: &GroupoidFunction<'_>, orbits: &OrbitStructure) -> f64 {
    orbits
        .orbits
        .iter()
        .map(|o| op_norm(&RegularModel::on_orbit(f.groupoid, o).embed(f).expect("same groupoid")))
        .fold(0.0, f64::max)
}

/// One irreducible representation of `C*(G)`, supported on one orbit.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumBlock {
    pub orbit: usize,
    pub dim: usize,
    /// Multiplicity inside the reduced model `l2(G_u)`.
    pub multiplicity: usize,
    /// Elements of `G|_orbit`; the representation vanishes elsewhere.
    pub elements: Vec<ElemId>,
    pub rep: MatrixRep,
}

impl SpectrumBlock {
    /// Traces of `rho(delta_x)` for every element of `G`.
    pub fn full_traces(&self, n: usize) -> Vec<C64> {
        let mut t = vec![ZERO; n];
        for (k, &x) in self.elements.iter().enumerate() {
            t[x] = self.rep.traces[k];
        }
        t
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub blocks: Vec<SpectrumBlock>,
    /// `(d, m)` per block in block order.
    pub dims: Vec<(usize, usize)>,
    /// Linear dimension of the algebra, `|G|`.
    pub algebra_dim: usize,
}

impl Spectrum {
    pub fn sorted_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.blocks.iter().map(|b| b.dim).collect();
        d.sort_unstable();
        d
    }
}

/// Per-orbit stream seeds keep parallel and sequential runs identical.
pub(crate) fn orbit_options(opts: &NumericOptions, k: usize) -> NumericOptions {
    opts.clone().with_seed(opts.seed ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Wedderburn blocks and irreducible representations of `C*(G)`, one orbit at a time.
pub fn c_star_spectrum(g: &FiniteGroupoid, opts: &NumericOptions) -> Result<Spectrum> {
    let (orbits, _) = unit_orbits(g);
    let per_orbit = opts.exec.map_range(0..orbits.len(), |k| -> Result<Vec<SpectrumBlock>> {
        let model = RegularModel::on_orbit(g, &orbits[k]);
        let elements = model.support();
        let alg = model.algebra()?;
        let o = orbit_options(opts, k);
        let dec = wedderburn(&alg, &o)?;
        let reps = irreps(&alg, &dec, &o)?;
        Ok(dec
            .blocks
            .iter()
            .zip(reps)
            .map(|(b, rep)| SpectrumBlock {
                orbit: k,
                dim: b.dim,
                multiplicity: b.multiplicity,
                elements: elements.clone(),
                rep,
            })
            .collect())
    });
    let mut blocks = Vec::new();
    for r in per_orbit {
        blocks.extend(r?);
    }
    let dims = blocks.iter().map(|b| (b.dim, b.multiplicity)).collect();
    Ok(Spectrum { blocks, dims, algebra_dim: g.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct PullbackReport {
    pub convolution_residual: f64,
    pub involution_residual: f64,
    pub dims_source: Vec<usize>,
    pub dims_target: Vec<usize>,
    pub passed: bool,
}

/// For a bijective homomorphism `phi: G -> H` with matching weights, checks that
/// `f -> f o phi` is a *-isomorphism `C*(H) -> C*(G)` and compares block data.
pub fn pullback_isomorphism(
    g: &FiniteGroupoid,
    h: &FiniteGroupoid,
    phi: &[ElemId],
    opts: &NumericOptions,
) -> Result<PullbackReport> {
    if !is_bijection(phi, h.len()) || phi.len() != g.len() {
        return Err(Error::NotIsomorphism("map is not a bijection".into()));
    }
    let hom = check_homomorphism(g, h, phi);
    if !hom.is_homomorphism {
        return Err(Error::NotIsomorphism(format!("{} composable pairs not preserved", hom.violations.len())));
    }
    if let Some(&u) = g.units().iter().find(|&&u| g.weight(u) != h.weight(phi[u])) {
        return Err(Error::NotIsomorphism(format!("Haar weight differs at {}", g.name(u))));
    }
    let mut conv = 0.0f64;
    let mut inv = 0.0f64;
    for a in h.elements() {
        let da = GroupoidFunction::delta(h, a);
        let pa = pull_back(g, phi, &da);
        inv = inv.max(pull_back(g, phi, &da.involute()).max_abs_diff(&pa.involute()));
        for b in h.elements() {
            let db = GroupoidFunction::delta(h, b);
            let lhs = pull_back(g, phi, &da.convolve(&db)?);
            let rhs = pa.convolve(&pull_back(g, phi, &db))?;
            conv = conv.max(lhs.max_abs_diff(&rhs));
        }
    }
    let dims_source = c_star_spectrum(g, opts)?.sorted_dims();
    let dims_target = c_star_spectrum(h, opts)?.sorted_dims();
    let passed = conv <= opts.assert_tol && inv <= opts.assert_tol && dims_source == dims_target;
    Ok(PullbackReport { convolution_residual: conv, involution_residual: inv, dims_source, dims_target, passed })
}

/// `f o phi`.
pub fn pull_back<'g>(g: &'g FiniteGroupoid, phi: &[ElemId], f: &GroupoidFunction<'_>) -> GroupoidFunction<'g> {
    GroupoidFunction { groupoid: g, values: g.elements().map(|x| f.values[phi[x]]).collect() }
}

/// Checks `L(f*g) = L(f)L(g)` and `L(f^*) = L(f)^*` on the full model.
pub fn embedding_residual(f: &GroupoidFunction<'_>, h: &GroupoidFunction<'_>) -> Result<f64> {
    let model = RegularModel::full(f.groupoid);
    let lf = model.embed(f)?;
    let lh = model.embed(h)?;
    let prod = model.embed(&f.convolve(h)?)?;
    let adj = model.embed(&f.involute())?;
    Ok(linalg::max_abs(&(prod - &lf * &lh)).max(linalg::max_abs(&(adj - lf.adjoint()))))
}
