//! Polynomial ideals through degree-bounded slices, and their jet images at
//! points.
//!
//! A slice is the space `{p in I : deg p <= D}` stored as orthonormal columns
//! of raw monomial coefficients in graded order. Local ideals are stored by
//! their image in the Taylor-coefficient space at a point, truncated below
//! order `mu` (the quotient by `m_z^mu`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{check_ball, point_norm};
use crate::multiindex::{count, enumerate_homogeneous, MonomialBasis, MultiIndex};
use crate::numerics::{
    gap_nullspace, gap_range, hstack, projection_residual, CMatrix, CVector, C64,
};
use crate::poly::{taylor_entry, Polynomial, PolynomialJson};

/// Relative membership tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Relative singular value cutoff for slice and jet computations.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PolyIdeal {
    d: usize,
    generators: Vec<Polynomial>,
    degree_bound: usize,
    basis: MonomialBasis,
    slice_basis: CMatrix,
}

fn column(v: &CVector) -> CMatrix {
    CMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

/// Scale to unit coefficient norm with the largest coefficient real and
/// positive, so that generators print the same way every run.
fn normalize(v: &CVector) -> CVector {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[best].norm() * (1.0 + 1e-9) {
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    let phase = pivot.conj() / pivot.norm();
    (v * phase).unscale(v.norm())
}

impl PolyIdeal {
    /// The ideal generated by `generators`, sliced at degree `degree_bound`.
    pub fn from_generators(
        d: usize,
        generators: Vec<Polynomial>,
        degree_bound: usize,
    ) -> Result<Self> {
        let basis = MonomialBasis::new(d, degree_bound);
        for g in &generators {
            if g.d() != d {
                return Err(Error::Dimension(format!(
                    "generator in {} variables, ideal has {d}",
                    g.d()
                )));
            }
            if g.degree() > degree_bound {
                return Err(Error::BeyondTruncation {
                    degree: g.degree(),
                    max_degree: degree_bound,
                });
            }
        }
        let slice_basis = Self::span_of_multiples(&basis, &generators, degree_bound)?;
        Ok(Self {
            d,
            generators,
            degree_bound,
            basis,
            slice_basis,
        })
    }

    /// Build from a slice given as columns of monomial coefficients. The slice
    /// must be closed under multiplication by the variables within degree
    /// `degree_bound`; generators are extracted degree by degree.
    pub fn from_slice(d: usize, degree_bound: usize, columns: &CMatrix) -> Result<Self> {
        let basis = MonomialBasis::new(d, degree_bound);
        if columns.nrows() != basis.len() {
            return Err(Error::Dimension(format!(
                "slice has {} rows, degree {degree_bound} in {d} variables needs {}",
                columns.nrows(),
                basis.len()
            )));
        }
        let slice_basis = if columns.ncols() == 0 {
            CMatrix::zeros(basis.len(), 0)
        } else {
            gap_range(columns, RANK_TOL, "ideal slice")?
        };
        let n = basis.len();
        let mut generators: Vec<Polynomial> = Vec::new();
        for e in 0..=degree_bound {
            let head = count(d, e);
            // S_e: elements of the slice with no terms above degree e.
            let sub = if head == n {
                slice_basis.clone()
            } else {
                let tail = slice_basis.rows(head, n - head).into_owned();
                let coef = gap_nullspace(&tail, RANK_TOL, "degree filtration")?;
                &slice_basis * coef
            };
            if sub.ncols() == 0 {
                continue;
            }
            let generated = Self::span_of_multiples(&basis, &generators, e)?;
            let rest = if generated.ncols() == 0 {
                sub
            } else {
                &sub - &generated * (generated.adjoint() * &sub)
            };
            let fresh = gap_range(&rest, RANK_TOL, "generator extraction")?;
            for j in 0..fresh.ncols() {
                let v = normalize(&fresh.column(j).into_owned());
                let p = Polynomial::from_coefficients(&basis, v.as_slice()).prune(1e-14);
                generators.push(p);
            }
        }
        Ok(Self {
            d,
            generators,
            degree_bound,
            basis,
            slice_basis,
        })
    }

    fn span_of_multiples(
        basis: &MonomialBasis,
        generators: &[Polynomial],
        max_degree: usize,
    ) -> Result<CMatrix> {
        let mut cols = Vec::new();
        for g in generators {
            if g.is_zero() || g.degree() > max_degree {
                continue;
            }
            let room = max_degree - g.degree();
            for q in crate::multiindex::enumerate(basis.d(), room) {
                let prod = g * &Polynomial::monomial(q, C64::new(1.0, 0.0));
                cols.push(column(&prod.coefficients(basis)?));
            }
        }
        if cols.is_empty() {
            return Ok(CMatrix::zeros(basis.len(), 0));
        }
        gap_range(&hstack(&cols), RANK_TOL, "ideal slice")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn max_generator_degree(&self) -> usize {
        self.generators.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn monomial_basis(&self) -> &MonomialBasis {
        &self.basis
    }

    /// Orthonormal columns spanning the slice.
    pub fn slice_basis(&self) -> &CMatrix {
        &self.slice_basis
    }

    pub fn slice_dim(&self) -> usize {
        self.slice_basis.ncols()
    }

    /// Relative distance of `p` from the slice.
    pub fn membership_residual(&self, p: &Polynomial) -> Result<f64> {
        let v = p.coefficients(&self.basis)?;
        let norm = v.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        Ok(projection_residual(&column(&v), &self.slice_basis) / norm)
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool> {
        Ok(self.membership_residual(p)? < MEMBERSHIP_TOL)
    }

    /// Whether the slice of `self` lies inside the slice of `other`.
    pub fn slice_contained_in(&self, other: &PolyIdeal) -> Result<bool> {
        if self.d != other.d || self.degree_bound != other.degree_bound {
            return Err(Error::Dimension("slices of different shape".into()));
        }
        Ok(projection_residual(&self.slice_basis, &other.slice_basis) < MEMBERSHIP_TOL)
    }

    /// Image of the ideal in the jets of order below `mu` at `z`.
    pub fn localize(&self, z: &[C64], mu: usize) -> Result<LocalJetIdeal> {
        if z.len() != self.d {
            return Err(Error::Dimension("localization point has wrong dimension".into()));
        }
        if mu == 0 {
            return Err(Error::InvalidInput("jet order must be positive".into()));
        }
        let top = self.max_generator_degree();
        if mu + top > self.degree_bound + 1 {
            return Err(Error::JetOrderTooHigh {
                order: mu,
                degree_bound: self.degree_bound,
                max_generator_degree: top,
            });
        }
        let jets = MonomialBasis::new(self.d, mu - 1);
        let mut cols = Vec::new();
        for g in &self.generators {
            let t = g.taylor_at(z, mu - 1);
            for gamma in jets.indices() {
                // jet of (x - z)^gamma g: Taylor coefficients shifted by gamma.
                let mut v = CVector::zeros(jets.len());
                for (i, beta) in jets.indices().iter().enumerate() {
                    let target = beta.add(gamma);
                    if let Some(k) = jets.position(&target) {
                        v[k] = t[i];
                    }
                }
                cols.push(column(&v));
            }
        }
        let basis = if cols.is_empty() {
            CMatrix::zeros(jets.len(), 0)
        } else {
            gap_range(&hstack(&cols), RANK_TOL, "jet localization")?
        };
        Ok(LocalJetIdeal {
            point: z.to_vec(),
            mu,
            jets,
            basis,
        })
    }

    /// Smallest `kappa >= 0` with `m_z^{kappa+1}` inside the localization at
    /// `z`. The point must be a zero of the ideal and isolated.
    pub fn polynomial_order(&self, z: &[C64]) -> Result<usize> {
        let scale = self
            .generators
            .iter()
            .map(Polynomial::max_coefficient)
            .fold(1.0, f64::max);
        let value = self
            .generators
            .iter()
            .map(|g| g.eval(z).norm())
            .fold(0.0, f64::max);
        if value > MEMBERSHIP_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "point is not a zero of the ideal (generator value {value:.3e})"
            )));
        }
        self.check_isolated(z)?;
        let top = self.max_generator_degree();
        let mut kappa = 0;
        loop {
            let mu = kappa + 2;
            if mu + top > self.degree_bound + 1 {
                return Err(Error::OrderExceedsBound {
                    bound: kappa,
                });
            }
            let local = self.localize(z, mu)?;
            if local.contains_maximal_power(kappa + 1) {
                return Ok(kappa);
            }
            kappa += 1;
        }
    }

    /// Mesh test: the generators must not all vanish near `z` along the
    /// coordinate directions and their pairwise diagonals.
    pub fn check_isolated(&self, z: &[C64]) -> Result<()> {
        let d = self.d;
        let mut dirs: Vec<Vec<C64>> = Vec::new();
        let unit = |j: usize, c: C64| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[j] = c;
            v
        };
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        for j in 0..d {
            dirs.push(unit(j, one));
            dirs.push(unit(j, i));
            for k in j + 1..d {
                for c in [one, -one, i, -i] {
                    let mut v = unit(j, one);
                    v[k] = c;
                    dirs.push(v);
                }
            }
        }
        let scale = self
            .generators
            .iter()
            .map(Polynomial::max_coefficient)
            .fold(1.0, f64::max);
        for r in [1e-2, 5e-2, 1e-1] {
            for u in &dirs {
                let nu = point_norm(u);
                let x: Vec<C64> = z.iter().zip(u).map(|(a, b)| a + b * (r / nu)).collect();
                let value = self
                    .generators
                    .iter()
                    .map(|g| g.eval(&x).norm())
                    .fold(0.0, f64::max);
                if value < 1e-14 * scale {
                    return Err(Error::NotIsolated);
                }
            }
        }
        Ok(())
    }
}

/// Image of an ideal in the jet space `C[x] / m_z^mu` at `z`, coordinates
/// being Taylor coefficients at `z`.
#[derive(Debug, Clone)]
pub struct LocalJetIdeal {
    point: Vec<C64>,
    mu: usize,
    jets: MonomialBasis,
    basis: CMatrix,
}

impl LocalJetIdeal {
    pub fn point(&self) -> &[C64] {
        &self.point
    }

    pub fn order(&self) -> usize {
        self.mu
    }

    pub fn jet_basis(&self) -> &MonomialBasis {
        &self.jets
    }

    /// Orthonormal columns spanning the jet image.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Dimension of the quotient jet space.
    pub fn codim(&self) -> usize {
        self.jets.len() - self.basis.ncols()
    }

    /// Taylor coefficients of `p` at the base point below order `mu`.
    pub fn jet_of(&self, p: &Polynomial) -> CVector {
        CVector::from_vec(p.taylor_at(&self.point, self.mu - 1))
    }

    pub fn residual(&self, p: &Polynomial) -> f64 {
        let v = self.jet_of(p);
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        projection_residual(&column(&v), &self.basis) / norm
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.residual(p) < MEMBERSHIP_TOL
    }

    /// Whether every `(x - z)^beta` with `|beta| = k` lies in the image.
    pub fn contains_maximal_power(&self, k: usize) -> bool {
        if k >= self.mu {
            return true;
        }
        enumerate_homogeneous(self.jets.d(), k).iter().all(|beta| {
            let i = self.jets.position(beta).expect("degree below mu");
            let mut e = CVector::zeros(self.jets.len());
            e[i] = C64::new(1.0, 0.0);
            projection_residual(&column(&e), &self.basis) < MEMBERSHIP_TOL
        })
    }

    /// Whether two jet images at the same point and order coincide.
    pub fn same_as(&self, other: &LocalJetIdeal) -> bool {
        self.mu == other.mu
            && self.point == other.point
            && crate::numerics::subspace_distance(&self.basis, &other.basis) < MEMBERSHIP_TOL
    }

    /// The polynomials `sum_beta c_beta (x - z)^beta` of the image together
    /// with all `(x - z)^beta`, `|beta| = mu`, as a polynomial ideal.
    pub fn pullback(&self, degree_bound: usize) -> Result<PolyIdeal> {
        let d = self.jets.d();
        let mut gens = Vec::new();
        for j in 0..self.basis.ncols() {
            let mut p = Polynomial::zero(d);
            for (i, beta) in self.jets.indices().iter().enumerate() {
                let c = self.basis[(i, j)];
                if c.norm() > 1e-15 {
                    p = p + Polynomial::shifted_monomial(&self.point, beta).scale(c);
                }
            }
            gens.push(p);
        }
        for beta in enumerate_homogeneous(d, self.mu) {
            gens.push(Polynomial::shifted_monomial(&self.point, &beta));
        }
        PolyIdeal::from_generators(d, gens, degree_bound)
    }
}

/// Polynomials of degree at most `degree_bound` whose Taylor coefficients of
/// order at most `kappa` vanish at every point of `points`.
pub fn vanishing_ideal_slice(
    points: &[Vec<C64>],
    kappa: usize,
    degree_bound: usize,
) -> Result<PolyIdeal> {
    let d = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidInput("empty point list".into()))?;
    check_ball(points, d)?;
    for (i, z) in points.iter().enumerate() {
        for (j, w) in points.iter().enumerate().skip(i + 1) {
            let dist: f64 = z
                .iter()
                .zip(w)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if dist <= 1e-12 {
                return Err(Error::DuplicatePoints { first: i, second: j });
            }
        }
    }
    let basis = MonomialBasis::new(d, degree_bound);
    let orders = crate::multiindex::enumerate(d, kappa);
    let rows = points.len() * orders.len();
    let mut map = CMatrix::zeros(rows, basis.len());
    for (pi, z) in points.iter().enumerate() {
        for (oi, alpha) in orders.iter().enumerate() {
            let r = pi * orders.len() + oi;
            for (c, beta) in basis.indices().iter().enumerate() {
                map[(r, c)] = taylor_entry(beta, alpha, z);
            }
        }
    }
    let kernel = gap_nullspace(&map, RANK_TOL, "vanishing ideal")?;
    PolyIdeal::from_slice(d, degree_bound, &kernel)
}

/// On-disk form of an ideal.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealJson {
    pub d: usize,
    pub degree_bound: usize,
    pub generators: Vec<PolynomialJson>,
}

impl From<&PolyIdeal> for IdealJson {
    fn from(i: &PolyIdeal) -> Self {
        Self {
            d: i.d,
            degree_bound: i.degree_bound,
            generators: i.generators.iter().map(PolynomialJson::from).collect(),
        }
    }
}

impl TryFrom<IdealJson> for PolyIdeal {
    type Error = Error;

    fn try_from(j: IdealJson) -> Result<Self> {
        let gens = j
            .generators
            .into_iter()
            .map(Polynomial::try_from)
            .collect::<Result<Vec<_>>>()?;
        PolyIdeal::from_generators(j.d, gens, j.degree_bound)
    }
}

/// The monomial `(x - z)^beta` as a convenience for callers.
pub fn maximal_ideal_power(z: &[C64], k: usize, degree_bound: usize) -> Result<PolyIdeal> {
    let gens = enumerate_homogeneous(z.len(), k)
        .iter()
        .map(|b: &MultiIndex| Polynomial::shifted_monomial(z, b))
        .collect();
    PolyIdeal::from_generators(z.len(), gens, degree_bound)
}
