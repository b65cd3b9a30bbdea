//! Multi-indices, graded lexicographic monomial enumeration and the exact
//! Drury-Arveson monomial norms.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::C64;

/// Largest degree for which factorials are evaluated exactly (`20! < 2^64`).
pub const MAX_EXACT_DEGREE: usize = 20;

/// An exponent vector `alpha` in `N^d`.
///
/// Ordering is graded lexicographic: lower total degree first, and within a
/// degree the larger leading exponent first, so `(1,0) < (0,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    /// The unit index `e_j`.
    pub fn unit(d: usize, j: usize) -> Self {
        let mut v = vec![0; d];
        v[j] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// `alpha! = alpha_1! ... alpha_d!`, exact.
    pub fn factorial(&self) -> Result<u64> {
        self.check_exact()?;
        self.0.iter().try_fold(1u64, |acc, &a| Ok(acc * factorial(a as usize)?))
    }

    /// `|alpha|! / alpha!`, a positive integer.
    pub fn multinomial(&self) -> Result<u64> {
        self.check_exact()?;
        Ok(factorial(self.degree())? / self.factorial()?)
    }

    /// `|alpha|! / alpha!` in floating point for any degree.
    pub fn multinomial_f64(&self) -> f64 {
        if self.degree() <= MAX_EXACT_DEGREE {
            return self.multinomial().expect("degree checked") as f64;
        }
        // Product of binomials C(a_1 + ... + a_k, a_k).
        let mut acc = 1.0;
        let mut running = 0usize;
        for &a in &self.0 {
            for i in 1..=a as usize {
                running += 1;
                acc *= running as f64 / i as f64;
            }
        }
        acc
    }

    fn check_exact(&self) -> Result<()> {
        let degree = self.degree();
        if degree > MAX_EXACT_DEGREE {
            return Err(Error::DegreeOverflow {
                degree,
                limit: MAX_EXACT_DEGREE,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_unit(&self, j: usize) -> Self {
        let mut v = self.0.clone();
        v[j] += 1;
        Self(v)
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// Whether `x^self` divides `x^other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `z^alpha`.
    pub fn eval(&self, z: &[C64]) -> C64 {
        self.0
            .iter()
            .zip(z)
            .fold(C64::new(1.0, 0.0), |acc, (&a, &zj)| acc * zj.powu(a))
    }

    /// The single variable index `j` if this is a pure power `x_j^k`, `k >= 1`.
    pub fn pure_power_variable(&self) -> Option<usize> {
        let nonzero: Vec<usize> = (0..self.dim()).filter(|&j| self.0[j] > 0).collect();
        match nonzero.as_slice() {
            [j] => Some(*j),
            _ => None,
        }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

pub fn factorial(n: usize) -> Result<u64> {
    if n > MAX_EXACT_DEGREE {
        return Err(Error::DegreeOverflow {
            degree: n,
            limit: MAX_EXACT_DEGREE,
        });
    }
    Ok((1..=n as u64).product())
}

/// Binomial coefficient in floating point.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of monomials of degree at most `max_degree` in `d` variables,
/// `C(d + max_degree, d)`.
pub fn count(d: usize, max_degree: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 0..d as u128 {
        acc = acc * (max_degree as u128 + i + 1) / (i + 1);
    }
    acc as usize
}

/// All `alpha` with `|alpha| = degree`, in graded lexicographic order.
pub fn enumerate_homogeneous(d: usize, degree: usize) -> Vec<MultiIndex> {
    assert!(d >= 1, "enumerate_homogeneous requires d >= 1");
    let mut out = Vec::new();
    let mut buf = vec![0u32; d];
    fill_homogeneous(&mut buf, 0, degree as u32, &mut out);
    out
}

fn fill_homogeneous(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for a in (0..=remaining).rev() {
        buf[pos] = a;
        fill_homogeneous(buf, pos + 1, remaining - a, out);
    }
}

/// All `alpha` with `|alpha| <= max_degree` in graded lexicographic order.
pub fn enumerate(d: usize, max_degree: usize) -> Vec<MultiIndex> {
    assert!(d >= 1, "enumerate requires d >= 1");
    (0..=max_degree)
        .flat_map(|k| enumerate_homogeneous(d, k))
        .collect()
}

/// `||x^alpha||^2 = alpha! / |alpha|!` in the Drury-Arveson space, exact.
pub fn monomial_norm_sq(alpha: &MultiIndex) -> Result<Ratio<u64>> {
    Ok(Ratio::new(1, alpha.multinomial()?))
}

/// Floating-point `alpha! / |alpha|!`, valid beyond the exact degree limit.
pub fn monomial_norm_sq_f64(alpha: &MultiIndex) -> f64 {
    1.0 / alpha.multinomial_f64()
}

/// An enumerated monomial list with position lookup.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    d: usize,
    max_degree: usize,
    list: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl MonomialBasis {
    pub fn new(d: usize, max_degree: usize) -> Self {
        let list = enumerate(d, max_degree);
        let position = list
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Self {
            d,
            max_degree,
            list,
            position,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.list
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.position.get(alpha).copied()
    }

    /// Number of leading basis elements of degree at most `k`.
    pub fn prefix_len(&self, k: usize) -> usize {
        count(self.d, k.min(self.max_degree))
    }
}
