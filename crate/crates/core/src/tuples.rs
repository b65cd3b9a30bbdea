//! Commuting tuples of square matrices.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::point_norm;
use crate::multiindex::{enumerate, enumerate_homogeneous, MonomialBasis, MultiIndex};
use crate::numerics::{
    check_finite, condition, frobenius, gap_range, gap_rank, hstack, inverse, max_eigenvalue,
    operator_norm, singular_values, svd, vectorize, CMatrix, CVector, C64, DEFAULT_TOL,
};
use crate::poly::Polynomial;
use crate::polyideal::PolyIdeal;

/// Relative cutoff for Krylov ranks and annihilator kernels.
pub const KERNEL_TOL: f64 = 1e-9;

/// Condition number above which `I - sum conj(w_j) T_j` counts as singular.
pub const RESOLVENT_COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct CommutingTuple {
    matrices: Vec<CMatrix>,
    commutator_defect: f64,
    row_defect: f64,
}

impl CommutingTuple {
    /// Measure a tuple. Only shapes are enforced here; use
    /// [`require_commuting`](Self::require_commuting) before algebraic work.
    pub fn validate(matrices: Vec<CMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidInput("tuple needs at least one matrix".into()))?;
        let n = first.nrows();
        for (j, m) in matrices.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension(format!(
                    "matrix {j} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            check_finite(m)?;
        }
        let mut commutator_defect = 0.0f64;
        for i in 0..matrices.len() {
            for j in i + 1..matrices.len() {
                let c = &matrices[i] * &matrices[j] - &matrices[j] * &matrices[i];
                commutator_defect = commutator_defect.max(operator_norm(&c));
            }
        }
        let mut row = -CMatrix::identity(n, n);
        for m in &matrices {
            row += m * m.adjoint();
        }
        let row_defect = if n == 0 { 0.0 } else { max_eigenvalue(&row)? };
        Ok(Self {
            matrices,
            commutator_defect,
            row_defect,
        })
    }

    /// Validate and insist on commutativity within `tol * max(1, ||T||^2)`.
    pub fn new(matrices: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let t = Self::validate(matrices)?;
        t.require_commuting(tol)?;
        Ok(t)
    }

    pub fn require_commuting(&self, tol: f64) -> Result<()> {
        let scale = self.max_norm().powi(2).max(1.0);
        if self.commutator_defect > tol * scale {
            return Err(Error::NotCommuting {
                defect: self.commutator_defect,
            });
        }
        Ok(())
    }

    pub fn require_row_contraction(&self, tol: f64) -> Result<()> {
        if self.row_defect > tol {
            return Err(Error::NotRowContraction {
                defect: self.row_defect,
            });
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.matrices.len()
    }

    pub fn size(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn get(&self, j: usize) -> &CMatrix {
        &self.matrices[j]
    }

    pub fn commutator_defect(&self) -> f64 {
        self.commutator_defect
    }

    /// Largest eigenvalue of `sum_j T_j T_j^* - I`.
    pub fn row_defect(&self) -> f64 {
        self.row_defect
    }

    pub fn is_row_contraction(&self, tol: f64) -> bool {
        self.row_defect <= tol
    }

    /// `||(T_1, ..., T_d)||` as a row operator.
    pub fn row_norm(&self) -> f64 {
        (self.row_defect + 1.0).max(0.0).sqrt()
    }

    fn max_norm(&self) -> f64 {
        self.matrices.iter().map(operator_norm).fold(0.0, f64::max)
    }

    /// `sum_j T_j T_j^*`.
    pub fn row_sum(&self) -> CMatrix {
        let n = self.size();
        let mut row = CMatrix::zeros(n, n);
        for m in &self.matrices {
            row += m * m.adjoint();
        }
        row
    }

    /// `T^alpha` for every `|alpha| <= max_degree`, built along the graded
    /// order so each power costs one product.
    pub fn monomials(&self, max_degree: usize) -> HashMap<MultiIndex, CMatrix> {
        let d = self.d();
        let n = self.size();
        let mut out: HashMap<MultiIndex, CMatrix> = HashMap::new();
        for alpha in enumerate(d, max_degree) {
            let value = match alpha.exponents().iter().position(|&e| e > 0) {
                None => CMatrix::identity(n, n),
                Some(j) => {
                    let prev = alpha.checked_sub(&MultiIndex::unit(d, j)).expect("positive");
                    &self.matrices[j] * &out[&prev]
                }
            };
            out.insert(alpha, value);
        }
        out
    }

    pub fn monomial(&self, alpha: &MultiIndex) -> CMatrix {
        let n = self.size();
        let mut m = CMatrix::identity(n, n);
        for (j, &e) in alpha.exponents().iter().enumerate() {
            for _ in 0..e {
                m = &self.matrices[j] * m;
            }
        }
        m
    }

    /// `p(T)`.
    pub fn apply_poly(&self, p: &Polynomial) -> Result<CMatrix> {
        if p.d() != self.d() {
            return Err(Error::Dimension(format!(
                "polynomial in {} variables applied to a {}-tuple",
                p.d(),
                self.d()
            )));
        }
        let powers = self.monomials(p.degree());
        let n = self.size();
        let mut out = CMatrix::zeros(n, n);
        for (alpha, &c) in p.terms() {
            out += &powers[alpha] * c;
        }
        Ok(out)
    }

    /// Span of `T^alpha xi` over `|alpha| <= max_degree`, layer by layer.
    pub fn krylov(&self, xi: &CVector, max_degree: usize) -> Result<Krylov> {
        let n = self.size();
        if xi.len() != n {
            return Err(Error::Dimension(format!(
                "vector has length {}, tuple acts on C^{n}",
                xi.len()
            )));
        }
        if xi.norm() == 0.0 {
            return Err(Error::InvalidInput("Krylov start vector is zero".into()));
        }
        let d = self.d();
        let mut layer_vectors: Vec<CVector> = vec![xi.clone()];
        let mut all: Vec<CMatrix> = Vec::new();
        let mut layer_dims = Vec::new();
        let mut prev: HashMap<MultiIndex, CVector> = HashMap::new();
        prev.insert(MultiIndex::zero(d), xi.clone());
        for level in 0..=max_degree {
            if level > 0 {
                let mut next = HashMap::new();
                for alpha in enumerate_homogeneous(d, level) {
                    let j = alpha.exponents().iter().position(|&e| e > 0).expect("level > 0");
                    let lower = alpha.checked_sub(&MultiIndex::unit(d, j)).expect("positive");
                    next.insert(alpha, &self.matrices[j] * &prev[&lower]);
                }
                layer_vectors = enumerate_homogeneous(d, level)
                    .iter()
                    .map(|a| next[a].clone())
                    .collect();
                prev = next;
            }
            let cols: Vec<CMatrix> = layer_vectors
                .iter()
                .map(|v| CMatrix::from_column_slice(n, 1, v.as_slice()))
                .collect();
            let layer = hstack(&cols);
            let sv = singular_values(&layer)?;
            let scale = xi.norm();
            let r = gap_rank(&sv.iter().map(|s| s / scale).collect::<Vec<_>>(), KERNEL_TOL, "Krylov layer")?;
            layer_dims.push(r);
            all.push(layer);
        }
        let stacked = hstack(&all);
        let scaled = &stacked / C64::new(xi.norm(), 0.0);
        let basis = gap_range(&scaled, KERNEL_TOL, "Krylov span")?;
        let rank = basis.ncols();
        let direct = layer_dims.iter().sum::<usize>() == rank;
        Ok(Krylov {
            is_cyclic: rank == n,
            basis,
            layer_dims,
            direct,
        })
    }

    /// Polynomials of degree at most `degree_bound` with `p(T) = 0`, computed
    /// as the kernel of `p -> vec p(T)`. Column `alpha` is weighted by
    /// `1 / max(1, ||T||^{|alpha|})` before the rank decision.
    pub fn annihilator_slice(&self, degree_bound: usize) -> Result<PolyIdeal> {
        let d = self.d();
        let basis = MonomialBasis::new(d, degree_bound);
        let powers = self.monomials(degree_bound);
        let growth = self.max_norm().max(1.0);
        let weights: Vec<f64> = basis
            .indices()
            .iter()
            .map(|a| growth.powi(-(a.degree() as i32)))
            .collect();
        let cols: Vec<CMatrix> = basis
            .indices()
            .iter()
            .zip(&weights)
            .map(|(a, &w)| {
                let v = vectorize(&powers[a]) * C64::new(w, 0.0);
                CMatrix::from_column_slice(v.len(), 1, v.as_slice())
            })
            .collect();
        let map = hstack(&cols);
        let dec = svd(&map)?;
        let r = gap_rank(&dec.singular_values, KERNEL_TOL, "annihilator")?;
        let m = basis.len();
        let kernel = dec.v.columns(r, m - r).into_owned();
        let mut raw = kernel;
        for (i, &w) in weights.iter().enumerate() {
            raw.row_mut(i).scale_mut(w);
        }
        PolyIdeal::from_slice(d, degree_bound, &raw)
    }

    /// The automorphism `Gamma_w` of the ball applied to the tuple:
    /// `(w - P_w T - s Q_w T)(I - sum conj(w_j) T_j)^{-1}`, `s = sqrt(1 - |w|^2)`.
    pub fn moebius(&self, w: &[C64]) -> Result<CommutingTuple> {
        let d = self.d();
        if w.len() != d {
            return Err(Error::Dimension(format!(
                "automorphism point has {} coordinates, tuple has {d}",
                w.len()
            )));
        }
        let norm = point_norm(w);
        if norm >= 1.0 {
            return Err(Error::OutsideBall { index: 0, norm });
        }
        let n = self.size();
        let id = CMatrix::identity(n, n);
        let mut pairing = CMatrix::zeros(n, n);
        for (m, wj) in self.matrices.iter().zip(w) {
            pairing += m * wj.conj();
        }
        let denom = &id - &pairing;
        let (_, _, cond) = condition(&denom)?;
        if !(cond < RESOLVENT_COND_LIMIT) {
            return Err(Error::Resolvent);
        }
        let resolvent = inverse(&denom).map_err(|_| Error::Resolvent)?;
        let s = (1.0 - norm * norm).sqrt();
        let norm_sq = norm * norm;
        let mut out = Vec::with_capacity(d);
        for (i, m) in self.matrices.iter().enumerate() {
            let p = if norm_sq > 0.0 {
                &pairing * (w[i] / norm_sq)
            } else {
                CMatrix::zeros(n, n)
            };
            let q = m - &p;
            let numer = &id * w[i] - &p - q * C64::new(s, 0.0);
            out.push(numer * &resolvent);
        }
        CommutingTuple::validate(out)
    }
}

/// Result of a Krylov expansion.
#[derive(Debug, Clone)]
pub struct Krylov {
    /// Orthonormal basis of the cyclic subspace.
    pub basis: CMatrix,
    pub is_cyclic: bool,
    /// Dimension of `span{T^alpha xi : |alpha| = l}` for each level `l`.
    pub layer_dims: Vec<usize>,
    /// Whether the layers form a direct sum.
    pub direct: bool,
}

/// The automorphism `Gamma_w` of the ball at a point `z`.
pub fn moebius_point(w: &[C64], z: &[C64]) -> Result<Vec<C64>> {
    if w.len() != z.len() {
        return Err(Error::Dimension("points differ in dimension".into()));
    }
    let tuple = CommutingTuple::validate(
        z.iter().map(|&c| CMatrix::from_element(1, 1, c)).collect(),
    )?;
    Ok(tuple.moebius(w)?.matrices.iter().map(|m| m[(0, 0)]).collect())
}

/// On-disk tuple: `{"d", "matrices": [...], "cyclic_vector"?: [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleJson {
    pub d: usize,
    #[serde(with = "crate::numerics::json::cmatrix_vec")]
    pub matrices: Vec<CMatrix>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "optional_vector"
    )]
    pub cyclic_vector: Option<Vec<C64>>,
}

mod optional_vector {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<C64>>, D::Error> {
        let raw = Option::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(raw.map(|v| v.into_iter().map(|[re, im]| C64::new(re, im)).collect()))
    }
}

impl TupleJson {
    pub fn from_tuple(t: &CommutingTuple, cyclic_vector: Option<&CVector>) -> Self {
        Self {
            d: t.d(),
            matrices: t.matrices.clone(),
            cyclic_vector: cyclic_vector.map(|v| v.iter().copied().collect()),
        }
    }

    /// Validate shapes; the caller decides on tolerances.
    pub fn into_tuple(self) -> Result<(CommutingTuple, Option<CVector>)> {
        if self.d != self.matrices.len() {
            return Err(Error::InvalidInput(format!(
                "field `d` is {} but `matrices` has {} entries",
                self.d,
                self.matrices.len()
            )));
        }
        let t = CommutingTuple::validate(self.matrices)?;
        let xi = match self.cyclic_vector {
            Some(v) => {
                if v.len() != t.size() {
                    return Err(Error::InvalidInput(format!(
                        "field `cyclic_vector` has length {}, matrices are {}x{}",
                        v.len(),
                        t.size(),
                        t.size()
                    )));
                }
                Some(CVector::from_vec(v))
            }
            None => None,
        };
        Ok((t, xi))
    }
}

/// Default commutator tolerance used by downstream modules.
pub const COMMUTE_TOL: f64 = DEFAULT_TOL;

/// Frobenius distance between two tuples of the same shape.
pub fn tuple_distance(a: &CommutingTuple, b: &CommutingTuple) -> f64 {
    a.matrices
        .iter()
        .zip(&b.matrices)
        .map(|(x, y)| frobenius(&(x - y)))
        .fold(0.0, f64::max)
}
