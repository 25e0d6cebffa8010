//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(r, c)
}

/// Matrix unit `E_ij` of size `n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn diag(values: &[C64]) -> ComplexMatrix {
    let n = values.len();
    let mut m = zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = v;
    }
    m
}

/// `tr(a^* b)`.
pub fn frob_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frob_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.norm()))
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and matching eigenvector columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, idx[k])]);
    (values, vectors)
}

/// One-sided (Hestenes) Jacobi on the columns of `a`: returns `(a v, v)` with the
/// columns of `a v` pairwise orthogonal and `v` unitary. Accurate on rank-deficient
/// input, where bidiagonalisation-based complex SVDs can lose the leading vectors.
fn jacobi_columns(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.ncols();
    let mut u = a.clone();
    let mut v = identity(n);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = u.column(p).iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = u.column(q).iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = u.column(p).iter().zip(u.column(q).iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let ph = phase.conj();
                for m in [&mut u, &mut v] {
                    for r in 0..m.nrows() {
                        let (x, y) = (m[(r, p)], m[(r, q)] * ph);
                        m[(r, p)] = x * cs - y * sn;
                        m[(r, q)] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (u, v)
}

/// Thin SVD `a = u diag(s) v^*` with `s` descending; `u` is `m x k`, `v` is `n x k`, `k = min(m, n)`.
pub fn svd(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (m, n) = a.shape();
    if m < n {
        let (v, s, u) = svd(&a.adjoint());
        return (u, s, v);
    }
    let (av, v) = jacobi_columns(a);
    let mut order: Vec<(f64, usize)> =
        (0..n).map(|j| (av.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let s: Vec<f64> = order.iter().map(|&(x, _)| x).collect();
    let mut u = zeros(m, n);
    let mut vv = zeros(n, n);
    for (k, &(sigma, j)) in order.iter().enumerate() {
        if sigma > 0.0 {
            u.set_column(k, &(av.column(j) / c(sigma, 0.0)));
        }
        vv.set_column(k, &v.column(j));
    }
    (u, s, vv)
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    svd(m).1
}

/// Spectral norm.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical rank with threshold `tol * max(1, largest singular value)`.
pub fn rank(m: &ComplexMatrix, tol: f64) -> usize {
    let s = singular_values(m);
    let cut = tol * s.first().copied().unwrap_or(0.0).max(1.0);
    s.iter().filter(|&&x| x > cut).count()
}

/// Orthonormal basis (as columns) of the column space.
pub fn column_basis(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    if m.ncols() == 0 || m.nrows() == 0 {
        return zeros(m.nrows(), 0);
    }
    let (u, s, _) = svd(m);
    let cut = tol * s[0].max(1.0);
    let keep = s.iter().filter(|&&x| x > cut).count();
    u.columns(0, keep).into_owned()
}

/// Orthonormal basis (as columns) of the kernel.
pub fn nullspace(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let n = m.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    // pad to at least square so the right factor is complete
    let rows = m.nrows().max(n);
    let mut padded = zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let (_, s, v) = svd(&padded);
    let cut = tol * s[0].max(1.0);
    let keep = s.iter().filter(|&&x| x > cut).count();
    v.columns(keep, n - keep).into_owned()
}

/// Column-stacking `vec`.
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    m.iter().copied().collect()
}

pub fn unvectorize(v: &[C64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, v.len() / n, v)
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol * max_abs(m).max(1.0)
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m.adjoint() * m - identity(m.nrows()))) <= tol
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let a = random_matrix(n, n, rng);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// A random unitary from the QR factor of a random matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(n, n, rng).qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(5, &mut rng);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = diag(&vals.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
        assert!(max_abs(&(&vecs * d * vecs.adjoint() - &h)) < 1e-10);
    }

    #[test]
    fn kernel_and_range() {
        let mut m = zeros(2, 3);
        m[(0, 0)] = ONE;
        m[(1, 1)] = ONE;
        assert_eq!(rank(&m, 1e-9), 2);
        let k = nullspace(&m, 1e-9);
        assert_eq!(k.ncols(), 1);
        assert!(max_abs(&(&m * &k)) < 1e-12);
        assert_eq!(column_basis(&m, 1e-9).ncols(), 2);
    }

    #[test]
    fn eigen_on_degenerate_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 4, 6, 9, 16] {
            for trial in 0..20 {
                // a random projection of rank n/2 plus noise of size 1e-17, scaled
                let q = random_unitary(n, &mut rng);
                let vals: Vec<C64> = (0..n).map(|k| c(if k < n / 2 { 1.0 } else { 0.0 } + (trial % 3) as f64, 0.0)).collect();
                let mut h = &q * diag(&vals) * q.adjoint();
                h += random_hermitian(n, &mut rng) * c(1e-17, 0.0);
                let (ev, vecs) = hermitian_eigen(&h);
                let d = diag(&ev.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
                assert!(max_abs(&(&vecs * d * vecs.adjoint() - &h)) < 1e-12, "n={n} trial={trial}");
                assert!(is_unitary(&vecs, 1e-12));
            }
        }
        let w = ComplexMatrix::from_fn(4, 4, |i, j| c(-0.25, 1e-17 * ((i * 3 + j) as f64 - 7.0)));
        let w = &w * w.adjoint();
        let (ev, vecs) = hermitian_eigen(&w);
        let d = diag(&ev.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
        assert!(max_abs(&(&vecs * d * vecs.adjoint() - &w)) < 1e-12);
    }

    #[test]
    fn svd_of_rank_one_noise() {
        let w = ComplexMatrix::from_fn(4, 4, |i, j| c(-0.25, 1e-17 * ((i * 3 + j) as f64 - 7.0)));
        let (u, s, v) = svd(&w);
        assert!((s[0] - 1.0).abs() < 1e-12);
        assert!(s[1] < 1e-12);
        let rebuilt = &u * diag(&s.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>()) * v.adjoint();
        assert!(max_abs(&(rebuilt - &w)) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(3, 6, &mut rng);
        let (u, s, v) = svd(&a);
        let rebuilt = &u * diag(&s.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>()) * v.adjoint();
        assert!(max_abs(&(rebuilt - &a)) < 1e-12);
        assert_eq!(nullspace(&a, 1e-9).ncols(), 3);
    }

    #[test]
    fn unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(is_unitary(&random_unitary(4, &mut rng), 1e-10));
        assert!((op_norm(&identity(3)) - 1.0).abs() < 1e-12);
    }
}
