//! Finite-dimensional *-subalgebras of `M_n(C)`: span closure, center, Wedderburn
//! blocks, irreducible representations, equivalence and positivity tests.
//!
//! Block data come from a central element produced by the averaging map
//! `Psi(x) = sum_k b_k x b_k^*` over a Frobenius-orthonormal basis `b_k`. On a block
//! `M_d (x) 1_m` it sends `a` to `tr(a) / m` times the block unit, so the image of a
//! random self-adjoint element separates the blocks, and `tr(P Psi(1)) = d^2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{
    self, c, column_basis, frob_inner, frob_norm, hermitian_eigen, max_abs, nullspace, trace, vectorize, zeros,
    ComplexMatrix, C64, ZERO,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericOptions {
    /// Rank and eigenvalue clustering threshold.
    pub tol: f64,
    /// Threshold for invariant assertions.
    pub assert_tol: f64,
    pub seed: u64,
    /// Fresh random central elements tried before giving up.
    pub retries: usize,
    pub exec: Exec,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { tol: 1e-9, assert_tol: 1e-8, seed: 0x9e37_79b9, retries: 5, exec: Exec::default() }
    }
}

impl NumericOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// Independent deterministic stream; results never depend on scheduling.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

/// A *-closed, multiplicatively closed span of `n x n` matrices with an
/// orthonormal basis and optional labelled generators.
#[derive(Clone, Debug)]
pub struct MatrixStarAlgebra {
    n: usize,
    basis: Vec<ComplexMatrix>,
    labels: Vec<String>,
    images: Vec<ComplexMatrix>,
}

fn check_square(ms: &[ComplexMatrix]) -> Result<usize> {
    let n = ms.first().map(|m| m.nrows()).ok_or_else(|| Error::Shape("no generators".into()))?;
    if let Some(m) = ms.iter().find(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::Shape(format!("expected {n}x{n}, found {}x{}", m.nrows(), m.ncols())));
    }
    Ok(n)
}

/// Adds `x` to the orthonormal family when its residual is not negligible.
fn push_independent(basis: &mut Vec<ComplexMatrix>, x: &ComplexMatrix, tol: f64) -> bool {
    let norm0 = frob_norm(x);
    if norm0 <= tol {
        return false;
    }
    let mut r = x.clone();
    for _ in 0..2 {
        for b in basis.iter() {
            let k = frob_inner(b, &r);
            r -= b * k;
        }
    }
    let norm = frob_norm(&r);
    if norm <= 1e-8 * norm0.max(1.0) {
        return false;
    }
    basis.push(r / c(norm, 0.0));
    true
}

impl MatrixStarAlgebra {
    /// Smallest *-algebra containing the generators; the basis is Gram-Schmidt over
    /// generators, adjoints and then iterated products in a fixed order.
    pub fn span_closure(generators: &[ComplexMatrix], tol: f64) -> Result<Self> {
        let n = check_square(generators)?;
        let mut basis = Vec::new();
        for g in generators {
            push_independent(&mut basis, g, tol);
            push_independent(&mut basis, &g.adjoint(), tol);
        }
        let mut i = 0;
        while i < basis.len() {
            let mut j = 0;
            while j <= i {
                let p = &basis[i] * &basis[j];
                let q = &basis[j] * &basis[i];
                push_independent(&mut basis, &p, tol);
                push_independent(&mut basis, &q, tol);
                j += 1;
            }
            i += 1;
        }
        let labels = (0..generators.len()).map(|k| format!("g{k}")).collect();
        Ok(MatrixStarAlgebra { n, basis, labels, images: generators.to_vec() })
    }

    /// Trusts that the labelled images already span a *-algebra.
    pub fn from_spanning(labels: Vec<String>, images: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let n = check_square(&images)?;
        if labels.len() != images.len() {
            return Err(Error::Shape("one label per image".into()));
        }
        let mut basis = Vec::new();
        for m in &images {
            push_independent(&mut basis, m, tol);
        }
        Ok(MatrixStarAlgebra { n, basis, labels, images })
    }

    /// Images that are already pairwise Frobenius-orthogonal and nonzero, e.g. with disjoint supports.
    pub fn from_orthogonal_basis(labels: Vec<String>, images: Vec<ComplexMatrix>) -> Result<Self> {
        let n = check_square(&images)?;
        if labels.len() != images.len() {
            return Err(Error::Shape("one label per image".into()));
        }
        let basis = images
            .iter()
            .map(|m| {
                let norm = frob_norm(m);
                if norm == 0.0 {
                    Err(Error::Numerical("zero basis image".into()))
                } else {
                    Ok(m / c(norm, 0.0))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixStarAlgebra { n, basis, labels, images })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    pub fn image(&self, label: &str) -> Option<&ComplexMatrix> {
        self.labels.iter().position(|l| l == label).map(|k| &self.images[k])
    }

    /// Conjugates every basis and label image by a unitary.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        let conj = |m: &ComplexMatrix| u * m * u.adjoint();
        MatrixStarAlgebra {
            n: self.n,
            basis: self.basis.iter().map(conj).collect(),
            labels: self.labels.clone(),
            images: self.images.iter().map(conj).collect(),
        }
    }

    /// Frobenius distance from `x` to the span.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        let mut r = x.clone();
        for b in &self.basis {
            let k = frob_inner(b, &r);
            r -= b * k;
        }
        frob_norm(&r)
    }

    /// Largest residual of `b_i b_j` and `b_i^*` over the basis.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            worst = worst.max(self.residual(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }

    /// `sum_k b_k x b_k^*`.
    pub fn psi(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = zeros(self.n, self.n);
        for b in &self.basis {
            out += b * x * b.adjoint();
        }
        out
    }

    pub fn random_self_adjoint<R: Rng>(&self, rng: &mut R) -> ComplexMatrix {
        let mut x = zeros(self.n, self.n);
        for b in &self.basis {
            let (s, t): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            x += (b + b.adjoint()) * c(s, 0.0) + (b - b.adjoint()) * c(0.0, t);
        }
        x
    }

    /// The unit of the algebra: range projection of `Psi(1)`.
    pub fn unit(&self, tol: f64) -> ComplexMatrix {
        let p = self.psi(&linalg::identity(self.n));
        let (vals, vecs) = hermitian_eigen(&p);
        let top = vals.last().copied().unwrap_or(0.0).max(1.0);
        let mut e = zeros(self.n, self.n);
        for (k, &v) in vals.iter().enumerate() {
            if v > tol.max(1e-6) * top {
                let col = vecs.column(k);
                e += col * col.adjoint();
            }
        }
        e
    }
}

/// One Wedderburn block `M_d (x) 1_m`.
#[derive(Clone, Debug)]
pub struct Block {
    pub projection: ComplexMatrix,
    /// Orthonormal columns spanning the range of `projection`.
    pub vectors: ComplexMatrix,
    pub dim: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    /// Block vectors concatenated in block order, then the kernel of the unit.
    pub change_of_basis: ComplexMatrix,
}

impl BlockDecomposition {
    /// `(d_i, m_i)` in block order.
    pub fn dims(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.dim, b.multiplicity)).collect()
    }

    pub fn sum_of_squares(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// Worst residual among `p^2 = p = p^*`, `p_i p_j = 0` and `sum p_i = 1_A`.
    pub fn projection_residual(&self, unit: &ComplexMatrix) -> f64 {
        let mut worst = 0.0f64;
        let mut sum = zeros(unit.nrows(), unit.ncols());
        for (i, b) in self.blocks.iter().enumerate() {
            let p = &b.projection;
            worst = worst.max(max_abs(&(p * p - p))).max(max_abs(&(p - p.adjoint())));
            for q in &self.blocks[i + 1..] {
                worst = worst.max(max_abs(&(p * &q.projection)));
            }
            sum += p;
        }
        worst.max(max_abs(&(sum - unit)))
    }
}

/// Sorted eigenvalue clusters above `floor`: `Ok(None)` signals an ambiguous gap.
fn cluster(vals: &[f64], floor: f64, tol: f64) -> Option<Vec<Vec<usize>>> {
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut prev: Option<f64> = None;
    for (k, &v) in vals.iter().enumerate() {
        if v <= floor {
            continue;
        }
        match prev {
            Some(p) if v - p <= tol * scale => clusters.last_mut().expect("open cluster").push(k),
            Some(p) if v - p < 1e-6 * scale => return None,
            _ => clusters.push(vec![k]),
        }
        prev = Some(v);
    }
    Some(clusters)
}

fn columns(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), idx.len(), |r, k| m[(r, idx[k])])
}

fn round_square(x: f64) -> Option<usize> {
    let k = x.round();
    if (x - k).abs() > 0.5 || k < 0.0 {
        return None;
    }
    let k = k as usize;
    let d = (k as f64).sqrt().round() as usize;
    (d * d == k).then_some(d)
}

/// Wedderburn block data from a random central element; see the module docs.
pub fn wedderburn(a: &MatrixStarAlgebra, opts: &NumericOptions) -> Result<BlockDecomposition> {
    let n = a.n;
    let psi_one = a.psi(&linalg::identity(n));
    let unit = a.unit(opts.tol);
    let mut last_err = String::new();
    for attempt in 0..opts.retries.max(1) {
        let mut rng = opts.rng(0x5745_4444 + attempt as u64);
        let x = a.random_self_adjoint(&mut rng);
        let z = a.psi(&x);
        let shift = frob_norm(&z) + 1.0;
        let h = &z + &unit * c(shift, 0.0);
        let (vals, vecs) = hermitian_eigen(&h);
        let Some(clusters) = cluster(&vals, 0.5, opts.tol) else {
            last_err = format!("ambiguous eigenvalue gap on attempt {attempt}");
            continue;
        };
        let mut blocks = Vec::with_capacity(clusters.len());
        let mut failure = None;
        for idx in &clusters {
            let v = columns(&vecs, idx);
            let p = &v * v.adjoint();
            let d2 = trace(&(&p * &psi_one)).re;
            let rank = idx.len();
            match round_square(d2) {
                Some(d) if d > 0 && rank % d == 0 => {
                    blocks.push(Block { projection: p, vectors: v, dim: d, multiplicity: rank / d })
                }
                _ => {
                    failure = Some(format!("block of rank {rank} has dimension {d2:.6}, not d^2 with d | rank"));
                    break;
                }
            }
        }
        if let Some(f) = failure {
            last_err = f;
            continue;
        }
        if blocks.iter().map(|b| b.dim * b.dim).sum::<usize>() != a.dim() {
            last_err = format!("sum of d^2 differs from dim {}", a.dim());
            continue;
        }
        let first_support = |b: &Block| (0..n).find(|&i| b.projection[(i, i)].re > 1e-6).unwrap_or(n);
        blocks.sort_by_key(|b| (b.dim, first_support(b)));
        let kernel: Vec<usize> = (0..n).filter(|&k| vals[k] <= 0.5).collect();
        let mut cols: Vec<ComplexMatrix> = blocks.iter().map(|b| b.vectors.clone()).collect();
        cols.push(columns(&vecs, &kernel));
        let mut change = zeros(n, n);
        let mut at = 0;
        for m in cols {
            change.view_mut((0, at), (n, m.ncols())).copy_from(&m);
            at += m.ncols();
        }
        return Ok(BlockDecomposition { blocks, change_of_basis: change });
    }
    Err(Error::Numerical(format!("wedderburn failed after {} attempts: {last_err}", opts.retries)))
}

/// Linear basis of the center, found as the commutant within the span of two random
/// elements and then confirmed against every basis element.
pub fn center(a: &MatrixStarAlgebra, opts: &NumericOptions) -> Vec<ComplexMatrix> {
    let k = a.dim();
    let mut rng = opts.rng(0x4345_4e54);
    let mut constraints: Vec<ComplexMatrix> = (0..2).map(|_| a.random_self_adjoint(&mut rng)).collect();
    loop {
        let rows = a.n * a.n * constraints.len();
        let mut m = zeros(rows, k);
        for (j, b) in a.basis.iter().enumerate() {
            let mut r = 0;
            for t in &constraints {
                for v in vectorize(&(b * t - t * b)) {
                    m[(r, j)] = v;
                    r += 1;
                }
            }
        }
        let ns = nullspace(&m, opts.tol);
        let elems: Vec<ComplexMatrix> = (0..ns.ncols())
            .map(|col| {
                let mut x = zeros(a.n, a.n);
                for (j, b) in a.basis.iter().enumerate() {
                    x += b * ns[(j, col)];
                }
                x
            })
            .collect();
        let bad = a.basis.iter().find(|b| {
            elems.iter().any(|z| max_abs(&(z * *b - *b * z)) > opts.assert_tol)
        });
        match bad {
            Some(b) => constraints.push(b.clone()),
            None => return elems,
        }
    }
}

/// A finite-dimensional representation given on the labelled generators.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixRep {
    pub dim: usize,
    pub labels: Vec<String>,
    #[serde(skip)]
    pub images: Vec<ComplexMatrix>,
    #[serde(serialize_with = "serialize_complex_vec")]
    pub traces: Vec<C64>,
}

fn serialize_complex_vec<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl MatrixRep {
    pub fn new(labels: Vec<String>, images: Vec<ComplexMatrix>) -> Result<Self> {
        if labels.len() != images.len() {
            return Err(Error::Shape("one image per label".into()));
        }
        let dim = images.first().map_or(0, |m| m.nrows());
        if images.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::Shape(format!("images must all be {dim}x{dim}")));
        }
        let traces = images.iter().map(trace).collect();
        Ok(MatrixRep { dim, labels, images, traces })
    }

    pub fn image(&self, label: &str) -> Option<&ComplexMatrix> {
        self.labels.iter().position(|l| l == label).map(|k| &self.images[k])
    }

    /// `u rho(.) u^*`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        let images = self.images.iter().map(|m| u * m * u.adjoint()).collect();
        MatrixRep::new(self.labels.clone(), images).expect("same shape")
    }

    pub fn direct_sum(&self, other: &MatrixRep) -> Result<Self> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        let (p, q) = (self.dim, other.dim);
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| {
                let mut m = zeros(p + q, p + q);
                m.view_mut((0, 0), (p, p)).copy_from(a);
                m.view_mut((p, p), (q, q)).copy_from(b);
                m
            })
            .collect();
        MatrixRep::new(self.labels.clone(), images)
    }

    /// Restricts to (or extends by zero onto) another label list.
    pub fn relabelled(&self, labels: &[String]) -> Self {
        let images = labels
            .iter()
            .map(|l| self.image(l).cloned().unwrap_or_else(|| zeros(self.dim, self.dim)))
            .collect();
        MatrixRep::new(labels.to_vec(), images).expect("same shape")
    }
}

/// One irreducible representation per block: the cyclic subspace `A v` of an
/// eigenvector `v` of a random self-adjoint element compressed to the block.
pub fn irreps(a: &MatrixStarAlgebra, b: &BlockDecomposition, opts: &NumericOptions) -> Result<Vec<MatrixRep>> {
    let results = opts.exec.map_range(0..b.blocks.len(), |i| irrep_of_block(a, &b.blocks[i], i, opts));
    results.into_iter().collect()
}

fn irrep_of_block(a: &MatrixStarAlgebra, block: &Block, index: usize, opts: &NumericOptions) -> Result<MatrixRep> {
    let (d, m) = (block.dim, block.multiplicity);
    for attempt in 0..opts.retries.max(1) {
        let mut rng = opts.rng(0x4952_5200 + ((index as u64) << 8) + attempt as u64);
        let x = a.random_self_adjoint(&mut rng);
        let v = &block.vectors;
        let compressed = v.adjoint() * &x * v;
        let (vals, vecs) = hermitian_eigen(&compressed);
        let scale = vals.iter().fold(1.0f64, |s, t| s.max(t.abs()));
        // each eigenvalue of the block generator carries multiplicity m; take an isolated one
        let Some(clusters) = cluster(&vals, f64::NEG_INFINITY, 1e-7) else { continue };
        let Some(first) = clusters.iter().find(|cl| cl.len() == m) else { continue };
        let isolated = clusters.iter().all(|cl| {
            std::ptr::eq(cl, first) || (vals[cl[0]] - vals[first[0]]).abs() > 1e-6 * scale
        });
        if !isolated {
            continue;
        }
        let w = v * vecs.column(first[0]);
        let mut kmat = zeros(a.n, a.dim());
        for (j, bk) in a.basis.iter().enumerate() {
            kmat.set_column(j, &(bk * &w));
        }
        let q = column_basis(&kmat, 1e-7);
        if q.ncols() != d {
            return Err(Error::Numerical(format!(
                "compression rank disagreement: cyclic subspace of rank {} for block dimension {d}",
                q.ncols()
            )));
        }
        let images = a.images.iter().map(|l| q.adjoint() * l * &q).collect();
        return MatrixRep::new(a.labels.clone(), images);
    }
    Err(Error::Numerical(format!("no isolated eigenvalue found in block {index}")))
}

/// Trace-vector comparison; complete for finite-dimensional semisimple algebras.
pub fn are_equivalent(rho: &MatrixRep, sigma: &MatrixRep, tol: f64) -> Result<bool> {
    if rho.labels != sigma.labels {
        return Err(Error::LabelMismatch);
    }
    if rho.dim != sigma.dim {
        return Ok(false);
    }
    let scale = (rho.dim as f64).max(1.0);
    Ok(rho.traces.iter().zip(&sigma.traces).all(|(x, y)| (x - y).norm() <= tol * scale))
}

/// Linear dimension of the commutant of the image.
pub fn commutant_dimension(rho: &MatrixRep, opts: &NumericOptions) -> usize {
    let d = rho.dim;
    if d == 0 {
        return 0;
    }
    let mut rng = opts.rng(0x434f_4d4d);
    let mut h1 = zeros(d, d);
    let mut h2 = zeros(d, d);
    for m in &rho.images {
        let (s, t): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        h1 += (m + m.adjoint()) * c(s, 0.0);
        h2 += (m - m.adjoint()) * c(0.0, t);
    }
    let mut constraints = vec![h1, h2];
    let eye = linalg::identity(d);
    loop {
        let mut stacked = zeros(d * d * constraints.len(), d * d);
        for (k, h) in constraints.iter().enumerate() {
            // vec(hX - Xh) = (I (x) h - h^T (x) I) vec X
            let op = linalg::kron(&eye, h) - linalg::kron(&h.transpose(), &eye);
            stacked.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(&op);
        }
        let ns = nullspace(&stacked, opts.tol);
        let sols: Vec<ComplexMatrix> =
            (0..ns.ncols()).map(|j| linalg::unvectorize(ns.column(j).as_slice(), d)).collect();
        let bad = rho.images.iter().find(|m| sols.iter().any(|x| max_abs(&(*m * x - x * *m)) > opts.assert_tol));
        match bad {
            Some(m) => {
                constraints.push(m.clone());
                constraints.push(m.adjoint());
            }
            None => return sols.len(),
        }
    }
}

pub fn is_irreducible(rho: &MatrixRep, opts: &NumericOptions) -> bool {
    commutant_dimension(rho, opts) == 1
}

/// Self-adjoint within `tol` and no eigenvalue below `-tol` (both relative to the norm).
pub fn positivity_check(x: &ComplexMatrix, tol: f64) -> bool {
    if !x.is_square() {
        return false;
    }
    let scale = max_abs(x).max(1.0);
    if max_abs(&(x - x.adjoint())) > tol * scale {
        return false;
    }
    let (vals, _) = hermitian_eigen(x);
    vals.first().is_none_or(|&v| v >= -tol * scale)
}

/// Worst residual of `rho(x)rho(y) = rho(xy)` and `rho(x^*) = rho(x)^*` over label
/// pairs, with products expanded in the label images of `a` by least squares.
pub fn homomorphism_residual(a: &MatrixStarAlgebra, rho: &MatrixRep, pairs: &[(usize, usize)]) -> Result<f64> {
    if a.labels != rho.labels {
        return Err(Error::LabelMismatch);
    }
    let l = a.images.len();
    let mut gram = zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            gram[(i, j)] = frob_inner(&a.images[i], &a.images[j]);
        }
    }
    let pinv = gram
        .pseudo_inverse(1e-10)
        .map_err(|e| Error::Numerical(format!("label Gram matrix: {e}")))?;
    let coords = |x: &ComplexMatrix| -> Vec<C64> {
        let rhs = ComplexMatrix::from_fn(l, 1, |i, _| frob_inner(&a.images[i], x));
        let sol = &pinv * rhs;
        sol.iter().copied().collect()
    };
    let eval = |cs: &[C64]| -> ComplexMatrix {
        let mut out = zeros(rho.dim, rho.dim);
        for (k, &z) in cs.iter().enumerate() {
            if z != ZERO {
                out += &rho.images[k] * z;
            }
        }
        out
    };
    let mut worst = 0.0f64;
    for &(i, j) in pairs {
        let prod = &a.images[i] * &a.images[j];
        worst = worst.max(max_abs(&(&rho.images[i] * &rho.images[j] - eval(&coords(&prod)))));
        let adj = a.images[i].adjoint();
        worst = worst.max(max_abs(&(rho.images[i].adjoint() - eval(&coords(&adj)))));
    }
    Ok(worst)
}
