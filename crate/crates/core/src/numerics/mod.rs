//! Dense complex linear algebra used by every higher module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. All cutoffs are relative to
//! the norm of the input unless stated otherwise.

pub mod blocks;
pub mod json;

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default reporting tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance for accepting a matrix as Hermitian before symmetrizing.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn check_finite(a: &CMatrix) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn require_square(a: &CMatrix, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "{what} requires a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

/// Frobenius norm.
pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Singular value decomposition with the full right singular basis.
///
/// Singular values are sorted in decreasing order. `v` is `n x n` with
/// column `k` the right singular vector for `singular_values[k]`; columns
/// beyond `min(m, n)` span the part of the kernel that is forced by shape.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

pub fn svd(a: &CMatrix) -> Result<Svd> {
    check_finite(a)?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(Svd {
            singular_values: vec![],
            u: CMatrix::zeros(m, 0),
            v: CMatrix::identity(n, n),
        });
    }
    let work = faer::Mat::<C64>::from_fn(m, n, |i, j| a[(i, j)]);
    let dec = work
        .svd()
        .map_err(|_| Error::NoConvergence("singular value decomposition"))?;
    let k = m.min(n);
    let s = dec.S().column_vector();
    let singular_values = (0..k).map(|i| s[i].re).collect();
    let (fu, fv) = (dec.U(), dec.V());
    Ok(Svd {
        singular_values,
        u: CMatrix::from_fn(m, k, |i, j| fu[(i, j)]),
        v: CMatrix::from_fn(n, n, |i, j| fv[(i, j)]),
    })
}

pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.singular_values)
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    match svd(a) {
        Ok(s) => s.singular_values.first().copied().unwrap_or(0.0),
        Err(_) => f64::NAN,
    }
}

/// `(||A||, ||A^-1||, cond)` from one SVD.
pub fn condition(a: &CMatrix) -> Result<(f64, f64, f64)> {
    require_square(a, "condition number")?;
    let s = singular_values(a)?;
    let max = s.first().copied().unwrap_or(0.0);
    let min = s.last().copied().unwrap_or(0.0);
    if min <= 0.0 {
        return Ok((max, f64::INFINITY, f64::INFINITY));
    }
    Ok((max, 1.0 / min, max / min))
}

/// Orthonormal basis (as columns) of the kernel of `a`.
///
/// Singular values at most `cutoff` (absolute) count as zero.
pub fn nullspace(a: &CMatrix, cutoff: f64) -> Result<CMatrix> {
    let n = a.ncols();
    let dec = svd(a)?;
    let rank = dec
        .singular_values
        .iter()
        .filter(|&&s| s > cutoff)
        .count();
    Ok(dec.v.columns(rank, n - rank).into_owned())
}

/// Orthonormal basis of the column space, with the same absolute cutoff rule.
pub fn range_basis(a: &CMatrix, cutoff: f64) -> Result<CMatrix> {
    let dec = svd(a)?;
    let rank = dec
        .singular_values
        .iter()
        .filter(|&&s| s > cutoff)
        .count();
    Ok(dec.u.columns(0, rank).into_owned())
}

/// Numerical rank with cutoff `rel * sigma_max`.
pub fn rank(a: &CMatrix, rel: f64) -> Result<usize> {
    let s = singular_values(a)?;
    let top = s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&x| x > rel * top).count())
}

/// Required ratio between the smallest kept and the largest dropped
/// singular value.
pub const RANK_GAP: f64 = 1e6;

/// Rank from sorted singular values with cutoff `rel * max(1, sigma_max)`,
/// refusing decisions without a clear gap.
pub fn gap_rank(sv: &[f64], rel: f64, what: &'static str) -> Result<usize> {
    let top = sv.first().copied().unwrap_or(0.0);
    let cutoff = rel * top.max(1.0);
    let r = sv.iter().filter(|&&s| s > cutoff).count();
    if r > 0 && r < sv.len() {
        let dropped = sv[r];
        if dropped > 0.0 {
            let ratio = sv[r - 1] / dropped;
            if ratio < RANK_GAP {
                return Err(Error::AmbiguousRank { what, ratio });
            }
        }
    }
    Ok(r)
}

/// Kernel and rank of `a` under [`gap_rank`].
pub fn gap_nullspace(a: &CMatrix, rel: f64, what: &'static str) -> Result<CMatrix> {
    let n = a.ncols();
    let dec = svd(a)?;
    let r = gap_rank(&dec.singular_values, rel, what)?;
    Ok(dec.v.columns(r, n - r).into_owned())
}

/// Orthonormal column-space basis under [`gap_rank`].
pub fn gap_range(a: &CMatrix, rel: f64, what: &'static str) -> Result<CMatrix> {
    let dec = svd(a)?;
    let r = gap_rank(&dec.singular_values, rel, what)?;
    Ok(dec.u.columns(0, r).into_owned())
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors as the columns of a unitary matrix.
pub fn hermitian_eig(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    require_square(a, "hermitian_eig")?;
    check_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }
    let adj = a.adjoint();
    let defect = frobenius(&(a - &adj));
    let scale = frobenius(a).max(1.0);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { defect });
    }
    let sym = (a + adj).scale(0.5);
    let dec = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or(Error::NoConvergence("Hermitian eigensolver"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[i].total_cmp(&dec.eigenvalues[j]));
    let values = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &dec.eigenvectors.column(src));
    }
    Ok((values, vecs))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(a: &CMatrix) -> Result<f64> {
    Ok(hermitian_eig(a)?.0.last().copied().unwrap_or(0.0))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &CMatrix) -> Result<f64> {
    Ok(hermitian_eig(a)?.0.first().copied().unwrap_or(0.0))
}

/// Complex Schur decomposition `A = Q U Q*` with `U` upper triangular.
pub fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    require_square(a, "schur")?;
    check_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)));
    }
    let dec = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::NoConvergence("Schur decomposition"))?;
    let (q, mut u) = dec.unpack();
    let scale = frobenius(a).max(f64::MIN_POSITIVE);
    let mut below = 0.0f64;
    for j in 0..n {
        for i in j + 1..n {
            below = below.max(u[(i, j)].norm());
            u[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    if below > 1e-10 * scale {
        return Err(Error::NoConvergence("Schur decomposition (triangularity)"));
    }
    let residual = frobenius(&(&q * &u * q.adjoint() - a));
    if residual > 1e-10 * scale {
        return Err(Error::Residual {
            what: "Schur decomposition",
            residual,
            tol: 1e-10 * scale,
        });
    }
    Ok((q, u))
}

/// Eigenvalues of a general square matrix, in Schur order.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let (_, u) = schur(a)?;
    Ok((0..u.nrows()).map(|i| u[(i, i)]).collect())
}

/// `A^{-1/2}` for a Hermitian positive definite matrix.
pub fn inv_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eig(a)?;
    let max = vals.last().copied().unwrap_or(0.0);
    let min = vals.first().copied().unwrap_or(0.0);
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::NotPositiveDefinite { eigenvalue: min });
    }
    Ok(spectral_apply(&vals, &vecs, |x| 1.0 / x.sqrt()))
}

/// `A^{1/2}` for a Hermitian positive definite matrix.
pub fn sqrt_pd(a: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eig(a)?;
    let max = vals.last().copied().unwrap_or(0.0);
    let min = vals.first().copied().unwrap_or(0.0);
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::NotPositiveDefinite { eigenvalue: min });
    }
    Ok(spectral_apply(&vals, &vecs, f64::sqrt))
}

fn spectral_apply(vals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v);
        scaled.column_mut(j).scale_mut(fv);
    }
    scaled * vecs.adjoint()
}

/// Solve `A X = B` by partial-pivoting LU.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    require_square(a, "solve")?;
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "solve: A is {}x{}, B has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    check_finite(a)?;
    check_finite(b)?;
    let lu = a.clone().lu();
    let x = lu.solve(b).ok_or(Error::Singular("linear solve"))?;
    check_finite(&x).map_err(|_| Error::Singular("linear solve"))?;
    Ok(x)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    solve(a, &CMatrix::identity(n, n))
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Column-major vectorization as an `mn x 1` column.
pub fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_iterator(a.len(), a.iter().copied())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[C64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v)
}

/// Coefficient matrix of `X -> X A - B X` acting on column-major `vec(X)`,
/// where `X` is `rows(B) x rows(A)`.
pub fn intertwiner_operator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let m = b.nrows();
    let id_m = CMatrix::identity(m, m);
    let id_n = CMatrix::identity(n, n);
    kron(&a.transpose(), &id_m) - kron(&id_n, b)
}

/// Basis of `{X : X A_j = B_j X for all j}`, each element reshaped to a matrix.
pub fn intertwiners(a: &[CMatrix], b: &[CMatrix], rel_cutoff: f64) -> Result<Vec<CMatrix>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Dimension("intertwiners: tuple lengths differ".into()));
    }
    let n = a[0].nrows();
    let m = b[0].nrows();
    let blocks: Vec<CMatrix> = a
        .iter()
        .zip(b)
        .map(|(aj, bj)| intertwiner_operator(aj, bj))
        .collect();
    let stacked = vstack(&blocks);
    let top = operator_norm(&stacked).max(1.0);
    let kernel = nullspace(&stacked, rel_cutoff * top)?;
    Ok((0..kernel.ncols())
        .map(|k| unvectorize(kernel.column(k).as_slice(), m, n))
        .collect())
}

/// Stack matrices with equal column counts vertically.
pub fn vstack(parts: &[CMatrix]) -> CMatrix {
    let cols = parts.first().map(|p| p.ncols()).unwrap_or(0);
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut r = 0;
    for p in parts {
        out.view_mut((r, 0), (p.nrows(), cols)).copy_from(p);
        r += p.nrows();
    }
    out
}

/// Stack matrices with equal row counts horizontally.
pub fn hstack(parts: &[CMatrix]) -> CMatrix {
    let rows = parts.first().map(|p| p.nrows()).unwrap_or(0);
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut c = 0;
    for p in parts {
        out.view_mut((0, c), (rows, p.ncols())).copy_from(p);
        c += p.ncols();
    }
    out
}

/// Block-diagonal direct sum.
pub fn direct_sum(parts: &[CMatrix]) -> CMatrix {
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for p in parts {
        out.view_mut((r, c), p.shape()).copy_from(p);
        r += p.nrows();
        c += p.ncols();
    }
    out
}

/// Orthonormalize columns with greedy column pivoting (largest residual
/// first, ties broken by lowest index). Columns whose residual falls below
/// `cutoff` are dropped. The selected vectors are returned in increasing
/// order of their source column.
pub fn pivoted_orthonormal_columns(a: &CMatrix, cutoff: f64) -> CMatrix {
    let (m, n) = a.shape();
    let mut resid: Vec<CVector> = (0..n).map(|j| a.column(j).into_owned()).collect();
    let mut chosen: Vec<(usize, CVector)> = Vec::new();
    let mut used = vec![false; n];
    loop {
        let mut best = None;
        let mut best_norm = cutoff;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let nrm = resid[j].norm();
            // Strict improvement beyond a relative hair keeps ties on the lowest index.
            if nrm > best_norm * (1.0 + 1e-12) {
                best_norm = nrm;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        used[j] = true;
        let q = resid[j].unscale(best_norm);
        for k in 0..n {
            if !used[k] {
                let proj = q.dotc(&resid[k]);
                resid[k] -= &q * proj;
            }
        }
        chosen.push((j, q));
        if chosen.len() == m {
            break;
        }
    }
    // Re-orthonormalize in source-column order for a deterministic, natural layout.
    chosen.sort_by_key(|(j, _)| *j);
    let raw = hstack(
        &chosen
            .iter()
            .map(|(j, _)| a.column(*j).into_owned())
            .map(|v| CMatrix::from_column_slice(m, 1, v.as_slice()))
            .collect::<Vec<_>>(),
    );
    gram_schmidt(&raw)
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
pub fn gram_schmidt(a: &CMatrix) -> CMatrix {
    let (m, n) = a.shape();
    let mut q = CMatrix::zeros(m, n);
    for j in 0..n {
        let mut v = a.column(j).into_owned();
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.column(k);
                let proj = qk.dotc(&v);
                v -= qk * proj;
            }
        }
        let nrm = v.norm();
        if nrm > 0.0 {
            v.unscale_mut(nrm);
        }
        q.set_column(j, &v);
    }
    q
}

/// Orthogonal projector onto the column space of `basis` (assumed orthonormal).
pub fn projector(basis: &CMatrix) -> CMatrix {
    basis * basis.adjoint()
}

/// Residual of projecting the columns of `a` onto the span of the
/// orthonormal columns of `basis`, as the largest column residual norm.
pub fn projection_residual(a: &CMatrix, basis: &CMatrix) -> f64 {
    let proj = if basis.ncols() == 0 {
        CMatrix::zeros(a.nrows(), a.ncols())
    } else {
        basis * (basis.adjoint() * a)
    };
    let diff = a - proj;
    (0..diff.ncols())
        .map(|j| diff.column(j).norm())
        .fold(0.0, f64::max)
}

/// Largest principal-angle sine between two subspaces given by orthonormal
/// columns; `f64::INFINITY` when the dimensions differ.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    projection_residual(a, b).max(projection_residual(b, a))
}

/// Matrix power by repeated squaring.
pub fn matrix_power(a: &CMatrix, mut k: usize) -> CMatrix {
    let n = a.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(v.len(), v.iter().map(|&x| real(x))))
    }

    #[test]
    fn svd_reconstructs_sparse_low_rank_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let m = rng.random_range(1..10);
            let n = rng.random_range(1..10);
            let r = rng.random_range(1..=m.min(n));
            let density: f64 = rng.random_range(0.1..1.0);
            let entry = |rng: &mut ChaCha8Rng| {
                if rng.random::<f64>() < density {
                    c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    c64(0.0, 0.0)
                }
            };
            let a = CMatrix::from_fn(m, r, |_, _| entry(&mut rng));
            let b = CMatrix::from_fn(r, n, |_, _| entry(&mut rng));
            let x = &a * &b;
            let dec = svd(&x).unwrap();
            let k = dec.u.ncols();
            let sigma = CMatrix::from_diagonal(&CVector::from_iterator(
                k,
                dec.singular_values.iter().map(|&v| real(v)),
            ));
            let rec = &dec.u * sigma * dec.v.columns(0, k).adjoint();
            assert!(frobenius(&(rec - &x)) <= 1e-12 * frobenius(&x).max(1.0));
            let vv = dec.v.adjoint() * &dec.v;
            assert!(frobenius(&(vv - CMatrix::identity(n, n))) < 1e-12);
        }
    }

    #[test]
    fn hermitian_eig_examples() {
        let (v, _) = hermitian_eig(&CMatrix::identity(3, 3)).unwrap();
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-14));

        let (v, _) = hermitian_eig(&diag(&[0.0, 1.0, 1.0])).unwrap();
        assert!((v[0]).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14 && (v[2] - 1.0).abs() < 1e-14);

        // [[2,1],[1,2]]: characteristic polynomial (2-x)^2 - 1 has roots 1, 3.
        let a = CMatrix::from_row_slice(2, 2, &[real(2.0), real(1.0), real(1.0), real(2.0)]);
        let (v, vecs) = hermitian_eig(&a).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        let unit = vecs.adjoint() * &vecs - CMatrix::identity(2, 2);
        assert!(frobenius(&unit) < 1e-12);
    }

    #[test]
    fn hermitian_eig_rejects_non_hermitian_and_rectangular() {
        let a = CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]);
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            hermitian_eig(&CMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn hermitian_eig_residual_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..12 {
            let b = random_matrix(&mut rng, n);
            let a = &b + b.adjoint();
            let (vals, v) = hermitian_eig(&a).unwrap();
            let d = CMatrix::from_diagonal(&CVector::from_iterator(n, vals.iter().map(|&x| real(x))));
            let res = frobenius(&(&a * &v - &v * d));
            assert!(res <= 1e-9 * operator_norm(&a));
            assert!(frobenius(&(v.adjoint() * &v - CMatrix::identity(n, n))) < 1e-10);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn schur_upper_triangular_input() {
        let u = CMatrix::from_row_slice(
            3,
            3,
            &[
                real(1.0), real(2.0), real(3.0),
                real(0.0), real(4.0), real(5.0),
                real(0.0), real(0.0), real(6.0),
            ],
        );
        let (q, t) = schur(&u).unwrap();
        // Q is diagonal (identity up to phases).
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(q[(i, j)].norm() < 1e-12);
                }
            }
            assert!((q[(i, i)].norm() - 1.0).abs() < 1e-12);
        }
        assert!(frobenius(&(&q * &t * q.adjoint() - &u)) < 1e-12);
    }

    #[test]
    fn schur_nilpotent() {
        let a = CMatrix::from_row_slice(2, 2, &[real(0.0), real(0.0), real(1.0), real(0.0)]);
        let (q, u) = schur(&a).unwrap();
        assert!(u[(0, 0)].norm() < 1e-14 && u[(1, 1)].norm() < 1e-14);
        assert!(frobenius(&(&q * &u * q.adjoint() - &a)) < 1e-14);
    }

    /// Roots of the characteristic polynomial via the companion matrix of the
    /// coefficients computed by Faddeev-LeVerrier, compared as multisets.
    #[test]
    fn schur_matches_companion_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 5;
        let a = random_matrix(&mut rng, n);
        // Faddeev-LeVerrier: coefficients of det(xI - A) = x^n + c1 x^{n-1} + ... + cn.
        let mut m = CMatrix::zeros(n, n);
        let mut coeffs = vec![real(1.0)];
        let id = CMatrix::identity(n, n);
        for k in 1..=n {
            m = &a * &m + &id * coeffs[k - 1];
            let ck = -(&a * &m).trace() / real(k as f64);
            coeffs.push(ck);
        }
        // Companion matrix with last column -c.
        let mut comp = CMatrix::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = real(1.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -coeffs[n - i];
        }
        let mut roots = eigenvalues(&comp).unwrap();
        let (q, u) = schur(&a).unwrap();
        assert!(frobenius(&(&q * &u * q.adjoint() - &a)) <= 1e-9 * operator_norm(&a));
        for i in 0..n {
            let z = u[(i, i)];
            let (k, dist) = roots
                .iter()
                .enumerate()
                .map(|(k, r)| (k, (r - z).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(dist < 1e-7, "eigenvalue {z} off by {dist}");
            roots.remove(k);
        }
    }

    #[test]
    fn schur_random_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..100 {
            let n = 2 + trial % 19;
            let a = random_matrix(&mut rng, n);
            let (q, u) = schur(&a).unwrap();
            let scale = operator_norm(&a);
            assert!(frobenius(&(&q * &u * q.adjoint() - &a)) <= 1e-9 * scale);
            assert!(frobenius(&(q.adjoint() * &q - CMatrix::identity(n, n))) <= 1e-10);
        }
    }

    #[test]
    fn operator_norm_and_inv_sqrt_examples() {
        assert!((operator_norm(&diag(&[0.0, 1.0, 1.0])) - 1.0).abs() < 1e-14);
        let four = CMatrix::identity(3, 3) * real(4.0);
        let half = inv_sqrt(&four).unwrap();
        assert!(frobenius(&(half - CMatrix::identity(3, 3) * real(0.5))) < 1e-14);
        // [[0, 1 - |lambda|], [0, 0]] at lambda = 0 is a rank-one matrix of norm 1.
        let a = CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]);
        assert!((operator_norm(&a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inv_sqrt_reports_offending_eigenvalue() {
        let a = diag(&[1.0, -0.5]);
        match inv_sqrt(&a) {
            Err(Error::NotPositiveDefinite { eigenvalue }) => assert!((eigenvalue + 0.5).abs() < 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inv_sqrt_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..10 {
            let b = random_matrix(&mut rng, n);
            let a = &b * b.adjoint() + CMatrix::identity(n, n) * real(0.1);
            let r = inv_sqrt(&a).unwrap();
            assert!(frobenius(&(&r * &a * &r - CMatrix::identity(n, n))) < 1e-8);
        }
    }

    #[test]
    fn solve_singular_is_error() {
        let a = CMatrix::zeros(2, 2);
        assert!(matches!(solve(&a, &CMatrix::identity(2, 2)), Err(Error::Singular(_))));
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let a = CMatrix::from_row_slice(1, 3, &[real(1.0), real(1.0), real(0.0)]);
        let k = nullspace(&a, 1e-12).unwrap();
        assert_eq!(k.ncols(), 2);
        assert!(frobenius(&(&a * &k)) < 1e-14);
    }

    #[test]
    fn intertwiner_operator_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 3);
        let b = random_matrix(&mut rng, 2);
        let x = CMatrix::from_fn(2, 3, |i, j| c64(i as f64 + 0.5, j as f64 - 1.0));
        let lhs = intertwiner_operator(&a, &b) * vectorize(&x);
        let rhs = vectorize(&(&x * &a - &b * &x));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn pivoted_columns_keep_coordinate_basis() {
        let p = diag(&[0.0, 1.0, 0.0, 1.0]);
        let v = pivoted_orthonormal_columns(&p, 1e-8);
        assert_eq!(v.ncols(), 2);
        assert!((v[(1, 0)] - real(1.0)).norm() < 1e-15);
        assert!((v[(3, 1)] - real(1.0)).norm() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn operator_norm_submultiplicative(seed in 0u64..1000, n in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n);
            let b = random_matrix(&mut rng, n);
            let ab = operator_norm(&(&a * &b));
            proptest::prop_assert!(ab <= operator_norm(&a) * operator_norm(&b) * (1.0 + 1e-12));
        }
    }
}
