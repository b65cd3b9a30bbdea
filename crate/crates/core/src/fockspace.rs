//! The Drury-Arveson space truncated to polynomials of bounded degree.
//!
//! Vectors are stored in the orthonormalized monomial basis
//! `e_alpha = x^alpha / ||x^alpha||`, so compressions and Gram matrices are
//! plain matrix algebra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{binomial_f64, monomial_norm_sq_f64, MonomialBasis, MultiIndex};
use crate::numerics::{CMatrix, CVector, C64};
use crate::poly::Polynomial;

/// Kernel tail tolerance used when choosing truncation degrees.
pub const TAIL_SQ_TOL: f64 = 1e-14;

/// `<z, w> = sum_j z_j conj(w_j)`.
pub fn inner(z: &[C64], w: &[C64]) -> C64 {
    z.iter()
        .zip(w)
        .map(|(a, b)| a * b.conj())
        .fold(C64::new(0.0, 0.0), |s, t| s + t)
}

pub fn point_norm(z: &[C64]) -> f64 {
    z.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Check that every point lies in the open unit ball and has dimension `d`.
pub fn check_ball(points: &[Vec<C64>], d: usize) -> Result<()> {
    for (index, z) in points.iter().enumerate() {
        if z.len() != d {
            return Err(Error::Dimension(format!(
                "point {index} has {} coordinates, expected {d}",
                z.len()
            )));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput(format!("point {index} is not finite")));
        }
        let norm = point_norm(z);
        if norm >= 1.0 {
            return Err(Error::OutsideBall { index, norm });
        }
    }
    Ok(())
}

/// The Drury-Arveson kernel `k(z, w) = 1 / (1 - <z, w>)`.
pub fn kernel(z: &[C64], w: &[C64]) -> Result<C64> {
    if z.len() != w.len() {
        return Err(Error::Dimension("kernel arguments differ in dimension".into()));
    }
    for (index, p) in [z, w].iter().enumerate() {
        let norm = point_norm(p);
        if norm >= 1.0 {
            return Err(Error::OutsideBall { index, norm });
        }
    }
    Ok(C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - inner(z, w)))
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// A degree-bounded slice of the Drury-Arveson space.
#[derive(Debug, Clone)]
pub struct FockTruncation {
    basis: MonomialBasis,
    norms: Vec<f64>,
    ln_fact: Vec<f64>,
}

impl FockTruncation {
    pub fn new(d: usize, max_degree: usize) -> Self {
        let basis = MonomialBasis::new(d, max_degree);
        let norms = basis
            .indices()
            .iter()
            .map(|a| monomial_norm_sq_f64(a).sqrt())
            .collect();
        let mut ln_fact = Vec::with_capacity(max_degree + 2);
        let mut acc = 0.0;
        ln_fact.push(0.0);
        for i in 1..=max_degree + 1 {
            acc += (i as f64).ln();
            ln_fact.push(acc);
        }
        Self {
            basis,
            norms,
            ln_fact,
        }
    }

    /// Smallest `D` with `rho^{2(D+1)} / (1 - rho^2) < TAIL_SQ_TOL`.
    pub fn degree_for_radius(rho: f64) -> Result<usize> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::OutsideBall { index: 0, norm: rho });
        }
        if rho == 0.0 {
            return Ok(0);
        }
        let mut d = 0usize;
        while rho.powi(2 * (d as i32 + 1)) / (1.0 - rho * rho) >= TAIL_SQ_TOL {
            d += 1;
        }
        Ok(d)
    }

    pub fn for_radius(d: usize, rho: f64) -> Result<Self> {
        Ok(Self::new(d, Self::degree_for_radius(rho)?))
    }

    pub fn d(&self) -> usize {
        self.basis.d()
    }

    pub fn max_degree(&self) -> usize {
        self.basis.max_degree()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    /// `||x^alpha||` for the `i`-th basis monomial.
    pub fn monomial_norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    /// Orthonormal coordinates of a polynomial of degree at most `D`.
    pub fn embed(&self, p: &Polynomial) -> Result<CVector> {
        let mut v = p.coefficients(&self.basis)?;
        for (x, &n) in v.iter_mut().zip(&self.norms) {
            *x *= n;
        }
        Ok(v)
    }

    /// Inverse of [`embed`](Self::embed).
    pub fn to_polynomial(&self, v: &CVector) -> Polynomial {
        let raw: Vec<C64> = v.iter().zip(&self.norms).map(|(x, &n)| x / n).collect();
        Polynomial::from_coefficients(&self.basis, &raw)
    }

    /// `M_{x_j}` applied to `v`, truncated to degree `D`.
    pub fn shift_apply(&self, j: usize, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim());
        for (i, beta) in self.basis.indices().iter().enumerate() {
            let x = v[i];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            let next = beta.add_unit(j);
            if let Some(k) = self.basis.position(&next) {
                let ratio = ((beta.exponents()[j] + 1) as f64 / (beta.degree() + 1) as f64).sqrt();
                out[k] += x * ratio;
            }
        }
        out
    }

    /// Matrix of `v -> truncate_D(p v)` in the orthonormal basis.
    pub fn mult_matrix(&self, p: &Polynomial) -> Result<CMatrix> {
        if p.d() != self.d() {
            return Err(Error::Dimension("multiplier dimension differs from truncation".into()));
        }
        if p.degree() > self.max_degree() {
            return Err(Error::BeyondTruncation {
                degree: p.degree(),
                max_degree: self.max_degree(),
            });
        }
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (col, beta) in self.basis.indices().iter().enumerate() {
            for (gamma, &c) in p.terms() {
                let target = beta.add(gamma);
                if let Some(row) = self.basis.position(&target) {
                    m[(row, col)] += c * (self.norms[row] / self.norms[col]);
                }
            }
        }
        Ok(m)
    }

    /// The derivative kernel `d^alpha k_z / d conj(z)^alpha`, i.e. the
    /// function `|alpha|! x^alpha / (1 - <x, z>)^{|alpha| + 1}`, truncated to
    /// degree `D`, together with a bound on the norm of the discarded tail.
    pub fn jet_vector(&self, z: &[C64], alpha: &MultiIndex) -> Result<JetVector> {
        let d = self.d();
        if z.len() != d || alpha.dim() != d {
            return Err(Error::Dimension("jet point or order has wrong dimension".into()));
        }
        let rho = point_norm(z);
        if rho >= 1.0 {
            return Err(Error::OutsideBall { index: 0, norm: rho });
        }
        let m = alpha.degree();
        if m > self.max_degree() {
            return Err(Error::BeyondTruncation {
                degree: m,
                max_degree: self.max_degree(),
            });
        }
        let mut coeffs = CVector::zeros(self.dim());
        for (i, beta) in self.basis.indices().iter().enumerate() {
            let Some(gamma) = beta.checked_sub(alpha) else {
                continue;
            };
            let k = gamma.degree();
            // coefficient = sqrt((m + k)! beta!) / gamma! * conj(z)^gamma
            let mut phase = C64::new(1.0, 0.0);
            let mut log_mag = 0.5 * self.ln_fact[m + k];
            let mut zero = false;
            for (j, (&g, &b)) in gamma.exponents().iter().zip(beta.exponents()).enumerate() {
                log_mag += 0.5 * self.ln_fact[b as usize] - self.ln_fact[g as usize];
                if g > 0 {
                    let zj = z[j].conj();
                    let r = zj.norm();
                    if r == 0.0 {
                        zero = true;
                        break;
                    }
                    log_mag += g as f64 * r.ln();
                    phase *= (zj / r).powu(g);
                }
            }
            if !zero {
                coeffs[i] = phase * log_mag.exp();
            }
        }
        Ok(JetVector {
            point: z.to_vec(),
            order: alpha.clone(),
            tail_bound: jet_tail_bound(alpha, rho, self.max_degree()),
            coefficients: coeffs,
        })
    }

    /// Smallest truncation degree for which every listed jet at every listed
    /// point has squared tail bound below [`TAIL_SQ_TOL`], and at least the
    /// kernel rule for the largest point norm.
    pub fn degree_for_jets(points: &[Vec<C64>], max_order: usize) -> Result<usize> {
        let rho = points.iter().map(|z| point_norm(z)).fold(0.0, f64::max);
        let mut deg = Self::degree_for_radius(rho)?.max(max_order);
        let alpha_worst = |m: usize| {
            // The bound grows with alpha!, largest for a pure power.
            let mut v = vec![0u32; points.first().map(|p| p.len()).unwrap_or(1)];
            v[0] = m as u32;
            MultiIndex::new(v)
        };
        loop {
            let ok = (0..=max_order)
                .all(|m| jet_tail_bound(&alpha_worst(m), rho, deg).powi(2) < TAIL_SQ_TOL);
            if ok {
                return Ok(deg);
            }
            deg += 1;
            if deg > 2000 {
                return Err(Error::TailBound {
                    bound: jet_tail_bound(&alpha_worst(max_order), rho, deg),
                    tol: TAIL_SQ_TOL.sqrt(),
                });
            }
        }
    }
}

/// Bound on the norm of the part of `d^alpha k_z` of degree above `max_degree`
/// for `||z|| <= rho`:
/// `sqrt(alpha! m! sum_{k > D - m} C(m + k, m)^2 rho^{2k})`, summed as a
/// geometric tail from the first discarded level.
pub fn jet_tail_bound(alpha: &MultiIndex, rho: f64, max_degree: usize) -> f64 {
    let m = alpha.degree();
    if rho == 0.0 {
        return 0.0;
    }
    if max_degree < m {
        return f64::INFINITY;
    }
    let first = max_degree - m + 1;
    let ratio = ((m + first + 1) as f64 / (first + 1) as f64).powi(2) * rho * rho;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let lead = binomial_f64(m + first, m).powi(2) * rho.powi(2 * first as i32);
    let alpha_fact: f64 = alpha
        .exponents()
        .iter()
        .map(|&a| (1..=a).map(f64::from).product::<f64>())
        .product();
    let m_fact = ln_factorial(m).exp();
    (alpha_fact * m_fact * lead / (1.0 - ratio)).sqrt()
}

/// A truncated derivative kernel in orthonormal coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JetVector {
    #[serde(with = "crate::numerics::json::complex_vec")]
    pub point: Vec<C64>,
    pub order: MultiIndex,
    #[serde(skip)]
    pub coefficients: CVector,
    pub tail_bound: f64,
}

impl JetVector {
    /// `<p, self>`, which equals `d^alpha p(z)` for `deg p <= D`.
    pub fn pair(&self, trunc: &FockTruncation, p: &Polynomial) -> Result<C64> {
        let v = trunc.embed(p)?;
        Ok(self.coefficients.dotc(&v))
    }

    /// Coefficient of the raw monomial `x^beta` (not orthonormalized).
    pub fn raw_coefficient(&self, trunc: &FockTruncation, beta: &MultiIndex) -> C64 {
        match trunc.basis().position(beta) {
            Some(i) => self.coefficients[i] / trunc.monomial_norm(i),
            None => C64::new(0.0, 0.0),
        }
    }
}
