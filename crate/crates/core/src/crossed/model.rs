use serde::Serialize;

use super::{DynamicalSystem, Section};
use crate::algebra::orbit_options;
use crate::error::{Error, Result};
use crate::groupoid::{unit_orbits, ElemId};
use crate::linalg::{c, frob_inner, frob_norm, matrix_unit, zeros, ComplexMatrix};
use crate::star_algebra::{irreps, wedderburn, MatrixRep, MatrixStarAlgebra, NumericOptions};

/// `delta_element (x) E_ij` with `E_ij` a matrix unit of `A(r(element))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PointLabel {
    pub element: ElemId,
    pub i: usize,
    pub j: usize,
}

/// Left regular model of `A x| G` on `sum_x C^{d_s(x)}` over the `x` with `s(x)` in
/// the chosen units:
/// `(L(f) h)(x) = sum over y in G^{r(x)} of alpha_x^-1(f(y)) h(y^-1 x)`.
#[derive(Clone, Debug)]
pub struct CrossedModel<'s> {
    system: &'s DynamicalSystem,
    units: Vec<ElemId>,
    offset: Vec<Option<usize>>,
    dim: usize,
}

impl<'s> CrossedModel<'s> {
    fn on_units(system: &'s DynamicalSystem, units: &[ElemId]) -> Self {
        let g = system.groupoid();
        let mut offset = vec![None; g.len()];
        let mut dim = 0;
        for &u in units {
            let d = system.dim_at(u);
            for &x in g.source_fiber(u) {
                offset[x] = Some(dim);
                dim += d;
            }
        }
        CrossedModel { system, units: units.to_vec(), offset, dim }
    }

    pub fn full(system: &'s DynamicalSystem) -> Self {
        Self::on_units(system, system.groupoid().units())
    }

    /// Reduced to the source fiber of the least unit of one orbit.
    pub fn on_orbit(system: &'s DynamicalSystem, orbit: &[ElemId]) -> Self {
        Self::on_units(system, &orbit[..1])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn units(&self) -> &[ElemId] {
        &self.units
    }

    fn add_point(&self, m: &mut ComplexMatrix, y: ElemId, a: &ComplexMatrix) {
        let sys = self.system;
        let g = sys.groupoid();
        let w = c(g.weight(g.range(y)), 0.0);
        let yinv = g.inverse(y);
        for &x in g.range_fiber(g.range(y)) {
            let Some(row) = self.offset[x] else { continue };
            let col = self.offset[g.mul_unchecked(yinv, x)].expect("same source");
            let block = sys.alpha_inv(x, a) * w;
            let d = block.nrows();
            let mut view = m.view_mut((row, col), (d, d));
            view += block;
        }
    }

    /// `L(delta_y (x) a)`.
    pub fn point_image(&self, y: ElemId, a: &ComplexMatrix) -> ComplexMatrix {
        let mut m = zeros(self.dim, self.dim);
        self.add_point(&mut m, y, a);
        m
    }

    pub fn label_image(&self, l: PointLabel) -> ComplexMatrix {
        let d = self.system.dim_at(self.system.groupoid().range(l.element));
        self.point_image(l.element, &matrix_unit(d, l.i, l.j))
    }

    pub fn embed(&self, f: &Section<'_>) -> Result<ComplexMatrix> {
        if f.system().groupoid() != self.system.groupoid() {
            return Err(Error::GroupoidMismatch);
        }
        let mut m = zeros(self.dim, self.dim);
        for (y, a) in f.values().iter().enumerate() {
            self.add_point(&mut m, y, a);
        }
        Ok(m)
    }

    /// Point labels acting nontrivially, ordered by element then matrix unit.
    pub fn support(&self) -> Vec<PointLabel> {
        let sys = self.system;
        let g = sys.groupoid();
        let mut out = Vec::new();
        for y in g.elements() {
            if !g.range_fiber(g.range(y)).iter().any(|&x| self.offset[x].is_some()) {
                continue;
            }
            let d = sys.dim_at(g.range(y));
            for i in 0..d {
                for j in 0..d {
                    out.push(PointLabel { element: y, i, j });
                }
            }
        }
        out
    }

    pub fn label_name(&self, l: PointLabel) -> String {
        format!("{}[{},{}]", self.system.groupoid().name(l.element), l.i, l.j)
    }

    /// Since `alpha_x^-1` is unitary conjugation, images of distinct matrix units are
    /// Frobenius-orthogonal, so the point labels form an orthogonal basis.
    pub fn algebra(&self) -> Result<MatrixStarAlgebra> {
        let support = self.support();
        let labels = support.iter().map(|&l| self.label_name(l)).collect();
        let images = support.iter().map(|&l| self.label_image(l)).collect();
        MatrixStarAlgebra::from_orthogonal_basis(labels, images)
    }

    /// Largest normalized Gram off-diagonal entry and smallest image norm over the
    /// point basis: injectivity holds when the first is ~0 and the second is > 0.
    pub fn injectivity_residual(&self) -> (f64, f64) {
        let support = self.support();
        let images: Vec<ComplexMatrix> = support.iter().map(|&l| self.label_image(l)).collect();
        let norms: Vec<f64> = images.iter().map(frob_norm).collect();
        let mut off = 0.0f64;
        for i in 0..images.len() {
            for j in 0..i {
                if support[i].element == support[j].element {
                    off = off.max(frob_inner(&images[i], &images[j]).norm() / (norms[i] * norms[j]));
                }
            }
        }
        (off, norms.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

/// The full model together with its image algebra.
pub fn crossed_product_model(system: &DynamicalSystem) -> Result<(CrossedModel<'_>, MatrixStarAlgebra)> {
    let model = CrossedModel::full(system);
    let alg = model.algebra()?;
    Ok((model, alg))
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossedBlock {
    pub orbit: usize,
    pub dim: usize,
    pub multiplicity: usize,
    /// Point labels of `A x| G|_orbit`; the representation vanishes elsewhere.
    pub labels: Vec<PointLabel>,
    pub rep: MatrixRep,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossedSpectrum {
    pub blocks: Vec<CrossedBlock>,
    pub dims: Vec<(usize, usize)>,
    pub algebra_dim: usize,
}

impl CrossedSpectrum {
    pub fn sorted_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.blocks.iter().map(|b| b.dim).collect();
        d.sort_unstable();
        d
    }
}

/// Wedderburn blocks and irreducible representations of `A x| G`, one orbit at a time.
pub fn crossed_spectrum(system: &DynamicalSystem, opts: &NumericOptions) -> Result<CrossedSpectrum> {
    let (orbits, _) = unit_orbits(system.groupoid());
    let per_orbit = opts.exec.map_range(0..orbits.len(), |k| -> Result<Vec<CrossedBlock>> {
        let model = CrossedModel::on_orbit(system, &orbits[k]);
        let labels = model.support();
        let alg = model.algebra()?;
        let o = orbit_options(opts, k);
        let dec = wedderburn(&alg, &o)?;
        let reps = irreps(&alg, &dec, &o)?;
        Ok(dec
            .blocks
            .iter()
            .zip(reps)
            .map(|(b, rep)| CrossedBlock {
                orbit: k,
                dim: b.dim,
                multiplicity: b.multiplicity,
                labels: labels.clone(),
                rep,
            })
            .collect())
    });
    let mut blocks = Vec::new();
    for r in per_orbit {
        blocks.extend(r?);
    }
    let dims = blocks.iter().map(|b| (b.dim, b.multiplicity)).collect();
    Ok(CrossedSpectrum { blocks, dims, algebra_dim: system.crossed_dim() })
}
