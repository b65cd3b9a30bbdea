//! Joint eigenvalues, spectral idempotents and block decompositions of
//! commuting tuples.
//!
//! A generic combination `A = sum c_j T_j` is brought to Schur form, its
//! eigenvalues are grouped into clusters, the clusters are made contiguous
//! and each diagonal block is refined until every `T_j` is upper triangular.
//! Idempotents come from block diagonalizing the ordered Schur form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::blocks::{order_schur, BlockSchur};
use crate::numerics::{
    condition, frobenius, inverse, operator_norm, pivoted_orthonormal_columns, schur, solve,
    sqrt_pd, svd, vstack, CMatrix, C64,
};
use crate::tuples::{CommutingTuple, COMMUTE_TOL};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// Relative bound on the strictly lower part of every `Q^* T_j Q`.
pub const TRIANGULARITY_TOL: f64 = 1e-7;

/// Relative bound on the decomposition residual.
pub const RESIDUAL_TOL: f64 = 1e-7;

/// Separation condition above which idempotents are refused.
pub const SEPARATION_LIMIT: f64 = 1e12;

const ATTEMPTS: usize = 5;

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    pub cluster_tol: f64,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            cluster_tol: DEFAULT_CLUSTER_TOL,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    #[serde(with = "crate::numerics::json::complex_vec")]
    pub point: Vec<C64>,
    pub multiplicity: usize,
    /// Index of the diagonal block of the ordered Schur form.
    #[serde(skip)]
    block: usize,
}

/// Joint eigenvalues of a commuting tuple together with the ordered,
/// simultaneously triangular Schur data they were read from.
#[derive(Debug, Clone, Serialize)]
pub struct JointSpectrum {
    /// Sorted lexicographically by the real, then imaginary parts of the
    /// coordinates.
    pub clusters: Vec<Cluster>,
    pub cluster_tol: f64,
    /// Largest strictly-lower entry of `Q^* T_j Q`, relative to `||T_j||`.
    pub triangularity_defect: f64,
    #[serde(skip)]
    combination: Vec<f64>,
    #[serde(skip)]
    block_schur: BlockSchur,
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Merge distance for a cluster of `m` eigenvalues of a matrix of size `n`
/// and norm `scale`: a defective eigenvalue of multiplicity `m` is spread by
/// roughly `(u n ||A||)^{1/m}` in floating point.
fn spread(m: usize, n: usize, scale: f64) -> f64 {
    8.0 * (f64::EPSILON * n as f64 * scale).powf(1.0 / m as f64) * scale.max(1.0).powf(1.0 - 1.0 / m as f64)
}

/// Single-linkage clusters of `values` at distance `thr`, as a label per value
/// (labels ordered by first appearance).
fn single_link(values: &[C64], thr: f64) -> Vec<usize> {
    let n = values.len();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if label[j] == usize::MAX && (values[i] - values[j]).norm() <= thr {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    label
}

/// Longest edge of the minimum spanning tree of `values`.
fn longest_mst_edge(values: &[C64]) -> f64 {
    let n = values.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut longest = 0.0f64;
    dist[0] = 0.0;
    for _ in 0..n {
        let i = (0..n)
            .filter(|&i| !done[i])
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            .expect("unvisited vertex");
        done[i] = true;
        longest = longest.max(dist[i]);
        for j in 0..n {
            if !done[j] {
                dist[j] = dist[j].min((values[i] - values[j]).norm());
            }
        }
    }
    longest
}

/// Divisive clustering: a set of size `m` is kept whole when its diameter is
/// at most `max(floor, spread(m))`, otherwise it is cut at its longest
/// spanning-tree edge and each part is treated the same way.
fn adaptive_clusters(values: &[C64], floor: f64, scale: f64) -> Vec<usize> {
    let n = values.len();
    let mut label = vec![0usize; n];
    let mut next = 0;
    let mut pending: Vec<Vec<usize>> = vec![(0..n).collect()];
    while let Some(set) = pending.pop() {
        let thr = floor.max(spread(set.len(), n, scale));
        let sub: Vec<C64> = set.iter().map(|&i| values[i]).collect();
        let diameter = sub
            .iter()
            .flat_map(|a| sub.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        if diameter <= thr {
            for &i in &set {
                label[i] = next;
            }
            next += 1;
            continue;
        }
        let cut = longest_mst_edge(&sub);
        let parts = single_link(&sub, cut * (1.0 - 1e-12));
        let k = parts.iter().copied().max().map_or(0, |x| x + 1);
        if k <= 1 {
            for &i in &set {
                label[i] = next;
            }
            next += 1;
            continue;
        }
        for c in 0..k {
            pending.push(set.iter().zip(&parts).filter(|(_, &p)| p == c).map(|(&i, _)| i).collect());
        }
    }
    // Relabel by first appearance.
    let mut map = vec![usize::MAX; next];
    let mut fresh = 0;
    for l in label.iter_mut() {
        if map[*l] == usize::MAX {
            map[*l] = fresh;
            fresh += 1;
        }
        *l = map[*l];
    }
    label
}

/// Unitary with first column `v` (unit norm).
fn complete_to_unitary(v: &CMatrix) -> CMatrix {
    let r = v.nrows();
    let mut cols = vec![v.clone()];
    for i in 0..r {
        let mut e = CMatrix::zeros(r, 1);
        e[(i, 0)] = C64::new(1.0, 0.0);
        cols.push(e);
    }
    pivoted_orthonormal_columns(&crate::numerics::hstack(&cols), 1e-8)
}

/// Simultaneously triangularize the commuting blocks `b` (all `m x m`, one
/// joint eigenvalue) by peeling off common kernel vectors. Returns the
/// unitary `V` with every `V^* b_j V` upper triangular.
fn triangularize_cluster(b: &[CMatrix]) -> Result<CMatrix> {
    let m = b[0].nrows();
    let mut v_total = CMatrix::identity(m, m);
    let mut work: Vec<CMatrix> = b.to_vec();
    for k in 0..m.saturating_sub(1) {
        let r = m - k;
        let shifted: Vec<CMatrix> = work
            .iter()
            .map(|w| {
                let sub = w.view((k, k), (r, r)).into_owned();
                let mu = sub.trace() / C64::new(r as f64, 0.0);
                sub - CMatrix::identity(r, r) * mu
            })
            .collect();
        let dec = svd(&vstack(&shifted))?;
        let v = dec.v.columns(r - 1, 1).into_owned();
        let w_small = complete_to_unitary(&v);
        let mut w = CMatrix::identity(m, m);
        w.view_mut((k, k), (r, r)).copy_from(&w_small);
        for t in work.iter_mut() {
            *t = w.adjoint() * &*t * &w;
        }
        v_total = v_total * w;
    }
    Ok(v_total)
}

fn lower_defect(q: &CMatrix, t: &CMatrix) -> f64 {
    let s = q.adjoint() * t * q;
    let n = s.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j + 1..n {
            worst = worst.max(s[(i, j)].norm());
        }
    }
    worst / operator_norm(t).max(f64::MIN_POSITIVE)
}

struct Attempt {
    q: CMatrix,
    u: CMatrix,
    sizes: Vec<usize>,
    points: Vec<Vec<C64>>,
    defect: f64,
}

fn attempt(t: &CommutingTuple, c: &[f64], opts: &SpectralOptions) -> Result<Option<Attempt>> {
    let n = t.size();
    let d = t.d();
    let mut a = CMatrix::zeros(n, n);
    for (m, &cj) in t.matrices().iter().zip(c) {
        a += m * C64::new(cj, 0.0);
    }
    let (q0, u0) = schur(&a)?;
    let diag: Vec<C64> = (0..n).map(|i| u0[(i, i)]).collect();
    let c_norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let floor = 2.0 * opts.cluster_tol * c_norm;
    let mut labels = adaptive_clusters(&diag, floor, operator_norm(&a));
    // A cluster that cannot be triangularized around one joint point is
    // split at its longest spanning-tree edge.
    let (q, sizes) = 'refine: loop {
        let mut q = q0.clone();
        let mut u = u0.clone();
        let sorted = order_schur(&mut q, &mut u, &labels);
        let k = sorted.iter().copied().max().map_or(0, |x| x + 1);
        let sizes: Vec<usize> = (0..k).map(|l| sorted.iter().filter(|&&s| s == l).count()).collect();
        let mut start = 0;
        for (l, &m) in sizes.iter().enumerate() {
            if m > 1 {
                let blocks: Vec<CMatrix> = t
                    .matrices()
                    .iter()
                    .map(|tj| (q.adjoint() * tj * &q).view((start, start), (m, m)).into_owned())
                    .collect();
                let v = triangularize_cluster(&blocks)?;
                let local = blocks
                    .iter()
                    .zip(t.matrices())
                    .map(|(b, tj)| lower_defect(&v, b) * operator_norm(b) / operator_norm(tj).max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max);
                if local > TRIANGULARITY_TOL {
                    let members: Vec<usize> = (0..n).filter(|&i| labels[i] == l).collect();
                    let values: Vec<C64> = members.iter().map(|&i| diag[i]).collect();
                    let cut = longest_mst_edge(&values);
                    if cut <= floor {
                        return Ok(None);
                    }
                    let parts = single_link(&values, cut * (1.0 - 1e-12));
                    let fresh = labels.iter().copied().max().unwrap_or(0) + 1;
                    for (&i, &p) in members.iter().zip(&parts) {
                        if p > 0 {
                            labels[i] = fresh + p - 1;
                        }
                    }
                    continue 'refine;
                }
                let cols = q.columns(start, m) * v;
                q.columns_mut(start, m).copy_from(&cols);
            }
            start += m;
        }
        break (q, sizes);
    };
    let k = sizes.len();
    let mut u = q.adjoint() * &a * &q;
    for j in 0..n {
        for i in j + 1..n {
            u[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    let defect = t
        .matrices()
        .iter()
        .map(|tj| lower_defect(&q, tj))
        .fold(0.0, f64::max);
    if defect > TRIANGULARITY_TOL {
        return Ok(None);
    }

    // Joint eigenvalue of a cluster: mean of the diagonal entries.
    let mut points = Vec::with_capacity(k);
    let mut start = 0;
    for &m in &sizes {
        let mut point = Vec::with_capacity(d);
        let mut spread_ok = true;
        for tj in t.matrices() {
            let s = q.columns(start, m).adjoint() * tj * q.columns(start, m);
            let mean = s.trace() / C64::new(m as f64, 0.0);
            let allowed = spread(m, n, operator_norm(tj)).max(opts.cluster_tol) * 4.0;
            for i in 0..m {
                if (s[(i, i)] - mean).norm() > allowed {
                    spread_ok = false;
                }
            }
            point.push(mean);
        }
        if !spread_ok {
            // The combination collapsed distinct joint eigenvalues.
            return Ok(None);
        }
        points.push(point);
        start += m;
    }
    Ok(Some(Attempt {
        q,
        u,
        sizes,
        points,
        defect,
    }))
}

/// Joint eigenvalues with algebraic multiplicities.
pub fn joint_eigenvalues(t: &CommutingTuple, opts: &SpectralOptions) -> Result<JointSpectrum> {
    t.require_commuting(COMMUTE_TOL)?;
    let d = t.d();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..ATTEMPTS {
        let c: Vec<f64> = (0..d)
            .map(|_| {
                let mag: f64 = rng.random_range(0.2..1.0);
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let Some(found) = attempt(t, &c, opts)? else {
            continue;
        };
        let block_schur = BlockSchur::new(found.q, found.u, &found.sizes)?;
        let mut clusters: Vec<Cluster> = found
            .points
            .into_iter()
            .zip(&found.sizes)
            .enumerate()
            .map(|(block, (point, &multiplicity))| Cluster {
                point,
                multiplicity,
                block,
            })
            .collect();
        clusters.sort_by(|a, b| lex_cmp(&a.point, &b.point));
        return Ok(JointSpectrum {
            clusters,
            cluster_tol: opts.cluster_tol,
            triangularity_defect: found.defect,
            combination: c,
            block_schur,
        });
    }
    Err(Error::Triangularization {
        attempts: ATTEMPTS,
        defect: t.commutator_defect(),
    })
}

impl JointSpectrum {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn points(&self) -> Vec<Vec<C64>> {
        self.clusters.iter().map(|c| c.point.clone()).collect()
    }

    /// Coefficients of the generic combination that was used.
    pub fn combination(&self) -> &[f64] {
        &self.combination
    }

    /// Index of the cluster containing `z`, if any lies within the
    /// clustering tolerance (or the nearest one within a factor 100 of it).
    pub fn find(&self, z: &[C64]) -> Option<usize> {
        let dist = |p: &[C64]| {
            p.iter()
                .zip(z)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let (i, best) = self
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (i, dist(&c.point)))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        (best <= 100.0 * self.cluster_tol.max(1e-8)).then_some(i)
    }

    /// `||S|| ||S^{-1}||` for the block-diagonalizing similarity of the
    /// ordered Schur form.
    pub fn separation_condition(&self) -> f64 {
        self.block_schur.separation_condition()
    }

    /// Spectral idempotent of cluster `i`.
    pub fn idempotent(&self, i: usize) -> Result<CMatrix> {
        let cond = self.separation_condition();
        if !(cond <= SEPARATION_LIMIT) {
            return Err(Error::IllConditioned {
                what: "spectral idempotents",
                cond,
            });
        }
        Ok(self.block_schur.projector(self.clusters[i].block))
    }

    /// Eigenvalue of the generic combination at cluster `i`.
    pub fn combined_value(&self, i: usize) -> C64 {
        self.clusters[i]
            .point
            .iter()
            .zip(&self.combination)
            .map(|(z, &c)| z * c)
            .sum()
    }
}

/// Riesz idempotent of `t` at the joint eigenvalue `z`.
pub fn riesz_idempotent(spectrum: &JointSpectrum, z: &[C64]) -> Result<CMatrix> {
    let i = spectrum
        .find(z)
        .ok_or_else(|| Error::InvalidInput("point is not a joint eigenvalue of the tuple".into()))?;
    spectrum.idempotent(i)
}

/// The same idempotent as a polynomial in the generic combination: the
/// Hermite interpolant equal to 1 at cluster `i` and vanishing to the order
/// of each multiplicity at the others. Only sensible for small sizes.
pub fn hermite_idempotent(t: &CommutingTuple, spectrum: &JointSpectrum, i: usize) -> Result<CMatrix> {
    let n = t.size();
    let mut a = CMatrix::zeros(n, n);
    for (m, &c) in t.matrices().iter().zip(spectrum.combination()) {
        a += m * C64::new(c, 0.0);
    }
    // Rows: derivative conditions; columns: monomials a^0..a^{n-1}.
    let mut sys = CMatrix::zeros(n, n);
    let mut rhs = CMatrix::zeros(n, 1);
    let mut row = 0;
    for (k, cl) in spectrum.clusters.iter().enumerate() {
        let x = spectrum.combined_value(k);
        for order in 0..cl.multiplicity {
            for p in order..n {
                let falling: f64 = ((p - order + 1)..=p).map(|v| v as f64).product();
                sys[(row, p)] = x.powu((p - order) as u32) * falling;
            }
            if k == i && order == 0 {
                rhs[(row, 0)] = C64::new(1.0, 0.0);
            }
            row += 1;
        }
    }
    let (_, _, cond) = condition(&sys)?;
    if !(cond <= SEPARATION_LIMIT) {
        return Err(Error::IllConditioned {
            what: "Hermite interpolation system",
            cond,
        });
    }
    let coef = solve(&sys, &rhs)?;
    let mut q = CMatrix::zeros(n, n);
    for p in (0..n).rev() {
        q = &q * &a + CMatrix::identity(n, n) * coef[(p, 0)];
    }
    Ok(q)
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanBlock {
    #[serde(with = "crate::numerics::json::complex_vec")]
    pub point: Vec<C64>,
    pub dim: usize,
    /// First row/column of the block in `X T X^{-1}`.
    pub start: usize,
    /// `N^{(z)}_j = (X T_j X^{-1})|_block - z_j I`.
    #[serde(with = "crate::numerics::json::cmatrix_vec")]
    pub nilpotent: Vec<CMatrix>,
    /// Largest `||N^alpha||` over `|alpha| = dim`.
    pub nilpotency_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanDecomposition {
    pub blocks: Vec<JordanBlock>,
    #[serde(with = "crate::numerics::json::cmatrix")]
    pub x: CMatrix,
    #[serde(skip)]
    pub x_inv: CMatrix,
    pub norm_x: f64,
    pub norm_x_inv: f64,
    pub cond: f64,
    /// `max_j ||X T_j X^{-1} - (+) blocks||`.
    pub residual: f64,
    /// `max(||sum Q_z - I||, max ||Q_z Q_w - delta_zw Q_z||)`.
    pub idempotent_defect: f64,
    pub separation_condition: f64,
    pub triangularity_defect: f64,
    pub checks: JordanChecks,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct JordanChecks {
    pub residual: bool,
    pub nilpotent: bool,
    pub idempotents: bool,
}

impl JordanDecomposition {
    /// `z I + N^{(z)}` for block `i`.
    pub fn block_matrices(&self, i: usize) -> Vec<CMatrix> {
        let b = &self.blocks[i];
        b.nilpotent
            .iter()
            .zip(&b.point)
            .map(|(n, &z)| n + CMatrix::identity(b.dim, b.dim) * z)
            .collect()
    }
}

/// Block decomposition `X T_j X^{-1} = (+)_z (z_j I + N^{(z)}_j)`.
pub fn jordan_decompose(t: &CommutingTuple, opts: &SpectralOptions) -> Result<JordanDecomposition> {
    let spectrum = joint_eigenvalues(t, opts)?;
    let n = t.size();
    let k = spectrum.len();
    let idempotents: Vec<CMatrix> = (0..k).map(|i| spectrum.idempotent(i)).collect::<Result<_>>()?;

    let id = CMatrix::identity(n, n);
    let mut idempotent_defect = frobenius(&(idempotents.iter().fold(CMatrix::zeros(n, n), |s, q| s + q) - &id));
    for (i, qi) in idempotents.iter().enumerate() {
        for (j, qj) in idempotents.iter().enumerate() {
            let prod = qi * qj;
            let target = if i == j { qi.clone() } else { CMatrix::zeros(n, n) };
            idempotent_defect = idempotent_defect.max(frobenius(&(prod - target)));
        }
    }

    let s = idempotents
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, q| acc + q.adjoint() * q);
    let y = sqrt_pd(&s)?;
    let y_inv = inverse(&y)?;
    let mut frames = Vec::with_capacity(k);
    for (i, q) in idempotents.iter().enumerate() {
        let p = &y * q * &y_inv;
        let frame = pivoted_orthonormal_columns(&p, 1e-6);
        let m = spectrum.clusters[i].multiplicity;
        if frame.ncols() != m {
            return Err(Error::Residual {
                what: "orthogonalized idempotent rank",
                residual: (frame.ncols() as f64 - m as f64).abs(),
                tol: 0.0,
            });
        }
        frames.push(frame);
    }
    let v = crate::numerics::hstack(&frames);
    let x = v.adjoint() * &y;
    let x_inv = &y_inv * &v;
    let (norm_x, norm_x_inv, cond) = condition(&x)?;

    let scale = t.matrices().iter().map(operator_norm).fold(1.0, f64::max);
    let mut residual = 0.0f64;
    let mut blocks = Vec::with_capacity(k);
    let mut starts = Vec::with_capacity(k);
    let mut start = 0;
    for cl in &spectrum.clusters {
        starts.push(start);
        start += cl.multiplicity;
    }
    let conj: Vec<CMatrix> = t.matrices().iter().map(|tj| &x * tj * &x_inv).collect();
    for c in &conj {
        let mut off = c.clone();
        for (&st, cl) in starts.iter().zip(&spectrum.clusters) {
            off.view_mut((st, st), (cl.multiplicity, cl.multiplicity))
                .fill(C64::new(0.0, 0.0));
        }
        residual = residual.max(operator_norm(&off));
    }
    for (&st, cl) in starts.iter().zip(&spectrum.clusters) {
        let m = cl.multiplicity;
        let nil: Vec<CMatrix> = conj
            .iter()
            .zip(&cl.point)
            .map(|(c, &z)| c.view((st, st), (m, m)).into_owned() - CMatrix::identity(m, m) * z)
            .collect();
        let tuple = CommutingTuple::validate(nil.clone())?;
        let nilpotency_defect = tuple
            .monomials(m)
            .iter()
            .filter(|(a, _)| a.degree() == m)
            .map(|(_, p)| operator_norm(p))
            .fold(0.0, f64::max);
        blocks.push(JordanBlock {
            point: cl.point.clone(),
            dim: m,
            start: st,
            nilpotent: nil,
            nilpotency_defect,
        });
    }
    if residual > RESIDUAL_TOL * scale {
        return Err(Error::Residual {
            what: "block decomposition",
            residual,
            tol: RESIDUAL_TOL * scale,
        });
    }
    let separation_scale = spectrum.separation_condition().max(1.0);
    Ok(JordanDecomposition {
        x,
        x_inv,
        norm_x,
        norm_x_inv,
        cond,
        residual,
        idempotent_defect,
        separation_condition: spectrum.separation_condition(),
        triangularity_defect: spectrum.triangularity_defect,
        checks: JordanChecks {
            residual: true,
            nilpotent: blocks
                .iter()
                .all(|b| b.nilpotency_defect <= 1e-6 * scale.powi(b.dim as i32)),
            idempotents: idempotent_defect <= 1e-8 * separation_scale,
        },
        blocks,
    })
}
