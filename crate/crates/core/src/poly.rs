//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{binomial_f64, enumerate, MonomialBasis, MultiIndex};
use crate::numerics::{CVector, C64};

/// A polynomial in `d` variables; terms are kept in graded lexicographic order
/// and zero coefficients are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    d: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

fn is_zero(c: C64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

impl Polynomial {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: C64) -> Self {
        Self::monomial(MultiIndex::zero(d), c)
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, C64::new(1.0, 0.0))
    }

    pub fn monomial(alpha: MultiIndex, c: C64) -> Self {
        let d = alpha.dim();
        let mut p = Self::zero(d);
        p.add_term(alpha, c);
        p
    }

    /// The coordinate function `x_j` (0-based).
    pub fn variable(d: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(d, j), C64::new(1.0, 0.0))
    }

    /// `x_j - z_j`.
    pub fn shifted_variable(d: usize, j: usize, zj: C64) -> Self {
        Self::variable(d, j) - Self::constant(d, zj)
    }

    /// `(x - z)^beta`.
    pub fn shifted_monomial(z: &[C64], beta: &MultiIndex) -> Self {
        let d = z.len();
        let mut p = Self::one(d);
        for (j, &b) in beta.exponents().iter().enumerate() {
            let f = Self::shifted_variable(d, j, z[j]);
            for _ in 0..b {
                p = &p * &f;
            }
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, C64)>>(d: usize, terms: I) -> Result<Self> {
        let mut p = Self::zero(d);
        for (alpha, c) in terms {
            if alpha.dim() != d {
                return Err(Error::Dimension(format!(
                    "term exponent {alpha:?} has length {}, expected {d}",
                    alpha.dim()
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidInput(format!("coefficient of {alpha:?} is not finite")));
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    /// From a coefficient vector laid out on `basis`.
    pub fn from_coefficients(basis: &MonomialBasis, coeffs: &[C64]) -> Self {
        let mut p = Self::zero(basis.d());
        for (alpha, &c) in basis.indices().iter().zip(coeffs) {
            p.add_term(alpha.clone(), c);
        }
        p
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: C64) {
        use std::collections::btree_map::Entry;
        debug_assert_eq!(alpha.dim(), self.d);
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                if !is_zero(c) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if is_zero(s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|a| a.degree()).max().unwrap_or(0)
    }

    /// Smallest degree among the nonzero terms.
    pub fn min_degree(&self) -> usize {
        self.terms.keys().map(|a| a.degree()).min().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> C64 {
        self.terms.get(alpha).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut p = Self::zero(self.d);
        for (a, &c) in &self.terms {
            p.add_term(a.clone(), c * s);
        }
        p
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one(self.d);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(a, &c)| c * a.eval(z))
            .fold(C64::new(0.0, 0.0), |s, t| s + t)
    }

    /// `d^alpha p / d x^alpha`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Self {
        let mut p = Self::zero(self.d);
        for (beta, &c) in &self.terms {
            if let Some(rest) = beta.checked_sub(alpha) {
                let factor: f64 = beta
                    .exponents()
                    .iter()
                    .zip(alpha.exponents())
                    .map(|(&b, &a)| ((b - a + 1)..=b).map(f64::from).product::<f64>())
                    .product();
                p.add_term(rest, c * factor);
            }
        }
        p
    }

    /// Taylor coefficients `d^beta p(z) / beta!` for all `|beta| <= max_order`
    /// in graded lexicographic order (coordinates of `p` in powers of `x - z`).
    pub fn taylor_at(&self, z: &[C64], max_order: usize) -> Vec<C64> {
        enumerate(self.d, max_order)
            .iter()
            .map(|beta| {
                self.terms
                    .iter()
                    .map(|(alpha, &c)| c * taylor_entry(alpha, beta, z))
                    .fold(C64::new(0.0, 0.0), |s, t| s + t)
            })
            .collect()
    }

    /// Coefficient vector on `basis`; fails if a term lies outside it.
    pub fn coefficients(&self, basis: &MonomialBasis) -> Result<CVector> {
        let mut v = CVector::zeros(basis.len());
        for (alpha, &c) in &self.terms {
            let pos = basis.position(alpha).ok_or(Error::BeyondTruncation {
                degree: alpha.degree(),
                max_degree: basis.max_degree(),
            })?;
            v[pos] = c;
        }
        Ok(v)
    }

    /// Drop coefficients with modulus at most `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        let mut p = Self::zero(self.d);
        for (a, &c) in &self.terms {
            if c.norm() > tol {
                p.add_term(a.clone(), c);
            }
        }
        p
    }

    /// Largest coefficient modulus.
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Coefficient of `(x - z)^beta` in the expansion of `x^alpha`:
/// `prod_j C(alpha_j, beta_j) z_j^{alpha_j - beta_j}`.
pub fn taylor_entry(alpha: &MultiIndex, beta: &MultiIndex, z: &[C64]) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for ((&a, &b), &zj) in alpha.exponents().iter().zip(beta.exponents()).zip(z) {
        if b > a {
            return C64::new(0.0, 0.0);
        }
        acc *= zj.powu(a - b) * binomial_f64(a as usize, b as usize);
    }
    acc
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (a, &c) in &rhs.terms {
            p.add_term(a.clone(), c);
        }
        p
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut p = Polynomial::zero(self.d);
        for (a, &c) in &self.terms {
            for (b, &e) in &rhs.terms {
                p.add_term(a.add(b), c * e);
            }
        }
        p
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: [f64; 2],
    pub alpha: Vec<u32>,
}

/// On-disk polynomial: `{"d", "terms": [{"coeff": [re, im], "alpha": [..]}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub d: usize,
    pub terms: Vec<TermJson>,
}

impl From<&Polynomial> for PolynomialJson {
    fn from(p: &Polynomial) -> Self {
        Self {
            d: p.d,
            terms: p
                .terms
                .iter()
                .map(|(a, c)| TermJson {
                    coeff: [c.re, c.im],
                    alpha: a.exponents().to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = Error;

    fn try_from(j: PolynomialJson) -> Result<Self> {
        if j.d == 0 {
            return Err(Error::InvalidInput("polynomial dimension d must be >= 1".into()));
        }
        Polynomial::from_terms(
            j.d,
            j.terms
                .into_iter()
                .map(|t| (MultiIndex::new(t.alpha), C64::new(t.coeff[0], t.coeff[1]))),
        )
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolynomialJson::deserialize(d)?;
        Polynomial::try_from(j).map_err(serde::de::Error::custom)
    }
}
