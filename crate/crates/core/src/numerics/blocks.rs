//! Ordered Schur forms and block diagonalization by triangular Sylvester
//! solves.

use super::{operator_norm, CMatrix, C64};
use crate::error::{Error, Result};

/// Swap the adjacent diagonal entries `k` and `k + 1` of the upper-triangular
/// `u` by a unitary rotation, keeping `a = q u q*` intact.
pub fn swap_adjacent(q: &mut CMatrix, u: &mut CMatrix, k: usize) {
    let n = u.nrows();
    let a = u[(k, k)];
    let b = u[(k, k + 1)];
    let c = u[(k + 1, k + 1)];
    // (b, c - a) is an eigenvector of [[a, b], [0, c]] for c.
    let x1 = b;
    let x2 = c - a;
    let nrm = (x1.norm_sqr() + x2.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return;
    }
    let (x1, x2) = (x1 / nrm, x2 / nrm);
    // G = [[x1, -conj(x2)], [x2, conj(x1)]]
    let g = [[x1, -x2.conj()], [x2, x1.conj()]];
    // u <- G* u on rows k, k+1.
    for j in 0..n {
        let r0 = u[(k, j)];
        let r1 = u[(k + 1, j)];
        u[(k, j)] = g[0][0].conj() * r0 + g[1][0].conj() * r1;
        u[(k + 1, j)] = g[0][1].conj() * r0 + g[1][1].conj() * r1;
    }
    // u <- u G and q <- q G on columns k, k+1.
    for m in [&mut *u, &mut *q] {
        for i in 0..n {
            let c0 = m[(i, k)];
            let c1 = m[(i, k + 1)];
            m[(i, k)] = c0 * g[0][0] + c1 * g[1][0];
            m[(i, k + 1)] = c0 * g[0][1] + c1 * g[1][1];
        }
    }
    u[(k + 1, k)] = C64::new(0.0, 0.0);
}

/// Reorder a Schur form so that the diagonal keys are non-decreasing
/// (stable with respect to the original order). Returns the sorted keys.
pub fn order_schur(q: &mut CMatrix, u: &mut CMatrix, keys: &[usize]) -> Vec<usize> {
    let mut keys = keys.to_vec();
    let n = keys.len();
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1 + pass) {
            if keys[k] > keys[k + 1] {
                swap_adjacent(q, u, k);
                keys.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    keys
}

/// Solve `a y - y b = c` for upper-triangular `a` (p x p) and `b` (q x q)
/// with disjoint diagonals.
pub fn sylvester_triangular(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    let p = a.nrows();
    let q = b.nrows();
    let mut y = CMatrix::zeros(p, q);
    for j in 0..q {
        let mut rhs: Vec<C64> = (0..p).map(|i| c[(i, j)]).collect();
        for k in 0..j {
            let bkj = b[(k, j)];
            if bkj != C64::new(0.0, 0.0) {
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r += y[(i, k)] * bkj;
                }
            }
        }
        let shift = b[(j, j)];
        for i in (0..p).rev() {
            let mut s = rhs[i];
            for l in i + 1..p {
                s -= a[(i, l)] * y[(l, j)];
            }
            let piv = a[(i, i)] - shift;
            if piv.norm() == 0.0 {
                return Err(Error::Singular("triangular Sylvester solve"));
            }
            y[(i, j)] = s / piv;
        }
    }
    Ok(y)
}

/// An ordered Schur form `a = q u q*` together with a block diagonalizing
/// similarity `u = s diag(u_11, ..., u_kk) s^{-1}` (`s` unit block upper
/// triangular).
#[derive(Debug, Clone)]
pub struct BlockSchur {
    pub q: CMatrix,
    pub u: CMatrix,
    pub s: CMatrix,
    pub s_inv: CMatrix,
    /// `(start, len)` of each diagonal block.
    pub blocks: Vec<(usize, usize)>,
}

impl BlockSchur {
    /// Build from a Schur form whose diagonal is already grouped into
    /// contiguous blocks of the given sizes.
    pub fn new(q: CMatrix, u: CMatrix, sizes: &[usize]) -> Result<Self> {
        let n = u.nrows();
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &len in sizes {
            blocks.push((start, len));
            start += len;
        }
        if start != n {
            return Err(crate::error::Error::Dimension(format!(
                "block sizes sum to {start}, matrix has size {n}"
            )));
        }
        let mut s = CMatrix::identity(n, n);
        let mut s_inv = CMatrix::identity(n, n);
        let mut work = u.clone();
        for &(st, len) in blocks.iter() {
            let rest = n - st - len;
            if rest == 0 {
                break;
            }
            let a = work.view((st, st), (len, len)).into_owned();
            let b = work.view((st + len, st + len), (rest, rest)).into_owned();
            let c = work.view((st, st + len), (len, rest)).into_owned();
            let y = sylvester_triangular(&a, &b, &(-c))?;
            // work <- S_i^{-1} work S_i with S_i = [[I, Y], [0, I]] on the trailing part.
            work.view_mut((st, st + len), (len, rest)).fill(C64::new(0.0, 0.0));
            // s <- s S_i: columns st+len.. gain s[:, st..st+len] * Y
            let left = s.columns(st, len) * &y;
            let mut tail = s.columns_mut(st + len, rest);
            tail += left;
            // s_inv <- S_i^{-1} s_inv: rows st..st+len lose Y * s_inv[st+len.., :]
            let upper = &y * s_inv.rows(st + len, rest);
            let mut head = s_inv.rows_mut(st, len);
            head -= upper;
        }
        Ok(Self {
            q,
            u,
            s,
            s_inv,
            blocks,
        })
    }

    /// Spectral projector of the original matrix onto block `i`.
    pub fn projector(&self, i: usize) -> CMatrix {
        let (st, len) = self.blocks[i];
        let left = &self.q * self.s.columns(st, len);
        let right = self.s_inv.rows(st, len) * self.q.adjoint();
        left * right
    }

    /// `||s|| * ||s^{-1}||`, the conditioning of the block separation.
    pub fn separation_condition(&self) -> f64 {
        operator_norm(&self.s) * operator_norm(&self.s_inv)
    }
}
