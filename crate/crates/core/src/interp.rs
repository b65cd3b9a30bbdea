//! Interpolation diagnostics for finite point sets in the ball: weak
//! separation, the Carleson constant, Pick minimal norms, strong separation
//! and jet certificates for the idempotent multipliers `theta_Omega`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{check_ball, kernel};
use crate::multiindex::enumerate;
use crate::numerics::{max_eigenvalue, min_eigenvalue, real, CMatrix, C64};
use crate::poly::Polynomial;

/// Bisection steps for the Pick problem.
pub const PICK_ITERATIONS: usize = 60;

/// Points closer than this are treated as coincident.
pub const COINCIDENT_TOL: f64 = 1e-12;

/// Gram condition number beyond which the Pick bracket is not trusted.
pub const GRAM_COND_LIMIT: f64 = 1e14;

/// On-disk point set: `{"d", "points": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsJson {
    pub d: usize,
    #[serde(with = "crate::numerics::json::points")]
    pub points: Vec<Vec<C64>>,
}

impl PointsJson {
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidInput("points: empty point list".into()));
        }
        if let Some((i, p)) = self.points.iter().enumerate().find(|(_, p)| p.len() != self.d) {
            return Err(Error::Dimension(format!(
                "points[{i}] has {} coordinates, d = {}",
                p.len(),
                self.d
            )));
        }
        check_points(&self.points)
    }
}

/// Points are in the ball, of one dimension, and pairwise distinct.
pub fn check_points(points: &[Vec<C64>]) -> Result<()> {
    let d = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidInput("empty point list".into()))?;
    check_ball(points, d)?;
    for (i, z) in points.iter().enumerate() {
        for (j, w) in points.iter().enumerate().skip(i + 1) {
            let dist = z
                .iter()
                .zip(w)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if dist <= COINCIDENT_TOL {
                return Err(Error::DuplicatePoints { first: i, second: j });
            }
        }
    }
    Ok(())
}

/// Kernel matrix `K[n, m] = k(lambda_n, lambda_m)`.
pub fn kernel_matrix(points: &[Vec<C64>]) -> Result<CMatrix> {
    let n = points.len();
    let mut k = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            k[(i, j)] = kernel(&points[i], &points[j])?;
        }
    }
    Ok(k)
}

/// Gram matrix of the normalized kernels `<k_m / ||k_m||, k_n / ||k_n||>`.
pub fn normalized_gram(points: &[Vec<C64>]) -> Result<CMatrix> {
    let k = kernel_matrix(points)?;
    let n = points.len();
    Ok(CMatrix::from_fn(n, n, |i, j| {
        k[(i, j)] / (k[(i, i)].re * k[(j, j)].re).sqrt()
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    pub points: usize,
    /// `min_{n != m} (1 - |G_nm|^2)`; 1 for a single point.
    pub delta_weak: f64,
    /// `||G||` for the normalized Gram matrix.
    pub gamma_carleson: f64,
    /// `epsilon_n = 1 / c*(indicator of n)`, when computed.
    pub strong: Option<Vec<f64>>,
    pub strong_min: Option<f64>,
}

/// Weak separation and Carleson constants.
pub fn separation_constants(points: &[Vec<C64>]) -> Result<SeparationReport> {
    check_points(points)?;
    let g = normalized_gram(points)?;
    let n = points.len();
    let mut delta = 1.0f64;
    for i in 0..n {
        for j in i + 1..n {
            delta = delta.min(1.0 - g[(i, j)].norm_sqr());
        }
    }
    Ok(SeparationReport {
        points: n,
        delta_weak: delta.clamp(0.0, 1.0),
        gamma_carleson: max_eigenvalue(&g)?.max(1.0),
        strong: None,
        strong_min: None,
    })
}

/// Full report including the strong separation constants.
pub fn separation_report(points: &[Vec<C64>]) -> Result<SeparationReport> {
    let mut r = separation_constants(points)?;
    let eps = strong_separation(points)?;
    r.strong_min = eps.iter().copied().reduce(f64::min);
    r.strong = Some(eps);
    Ok(r)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PickSolution {
    /// Smallest multiplier norm interpolating the targets.
    pub c_star: f64,
    /// Minimum eigenvalue of the normalized Pick matrix at `c_star`.
    pub margin: f64,
}

fn pick_matrix(g: &CMatrix, targets: &[C64], c: f64) -> CMatrix {
    let n = targets.len();
    CMatrix::from_fn(n, n, |i, j| (c * c - targets[i] * targets[j].conj()) * g[(i, j)])
}

/// Smallest `c >= 0` with `[(c^2 - a_n conj(a_m)) k(lambda_n, lambda_m)]`
/// positive semidefinite, by bisection.
pub fn pick_min_norm(points: &[Vec<C64>], targets: &[C64]) -> Result<PickSolution> {
    check_points(points)?;
    if targets.len() != points.len() {
        return Err(Error::Dimension(format!(
            "{} targets for {} points",
            targets.len(),
            points.len()
        )));
    }
    if let Some(i) = targets.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    // The normalized kernel gives a congruent Pick matrix.
    let g = normalized_gram(points)?;
    let lo_val = targets.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let scale = targets.iter().map(|a| a.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);
    let feasible = |c: f64| -> Result<(bool, f64)> {
        let m = min_eigenvalue(&pick_matrix(&g, targets, c))?;
        Ok((m >= -1e-13 * scale, m))
    };
    let (ok, m) = feasible(lo_val)?;
    if ok {
        return Ok(PickSolution {
            c_star: lo_val,
            margin: m,
        });
    }
    // Frame bound: ||a|| sqrt(gamma) ||G^{-1}||^{1/2}, doubled until feasible.
    let gamma = max_eigenvalue(&g)?;
    let g_min = min_eigenvalue(&g)?;
    if g_min <= GRAM_COND_LIMIT.recip() * gamma {
        return Err(Error::IllConditioned {
            what: "normalized Gram matrix",
            cond: gamma / g_min.max(f64::MIN_POSITIVE),
        });
    }
    let mut hi = (scale.sqrt() * (gamma / g_min).sqrt()).max(lo_val * 2.0).max(1e-300);
    let mut hi_margin = loop {
        let (ok, m) = feasible(hi)?;
        if ok {
            break m;
        }
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConvergence("Pick bracket"));
        }
    };
    let mut lo = lo_val;
    for _ in 0..PICK_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let (ok, m) = feasible(mid)?;
        if ok {
            hi = mid;
            hi_margin = m;
        } else {
            lo = mid;
        }
    }
    Ok(PickSolution {
        c_star: hi,
        margin: hi_margin,
    })
}

fn indicator(n: usize, set: &[usize]) -> Vec<C64> {
    (0..n)
        .map(|i| real(if set.contains(&i) { 1.0 } else { 0.0 }))
        .collect()
}

/// `epsilon_n = 1 / c*(e_n)` for each point.
pub fn strong_separation(points: &[Vec<C64>]) -> Result<Vec<f64>> {
    let n = points.len();
    (0..n)
        .map(|i| Ok(1.0 / pick_min_norm(points, &indicator(n, &[i]))?.c_star))
        .collect()
}

/// Largest Pick norm over all `+-1` target patterns (at most 16 points).
pub fn sign_pattern_constant(points: &[Vec<C64>]) -> Result<f64> {
    let n = points.len();
    if n > 16 {
        return Err(Error::InvalidInput("sign patterns limited to 16 points".into()));
    }
    let mut worst = 0.0f64;
    // Patterns and their negatives have the same norm: fix the first sign.
    for mask in 0..(1u32 << n.saturating_sub(1)) {
        let targets: Vec<C64> = (0..n)
            .map(|i| {
                let negative = i > 0 && mask & (1 << (i - 1)) != 0;
                real(if negative { -1.0 } else { 1.0 })
            })
            .collect();
        worst = worst.max(pick_min_norm(points, &targets)?.c_star);
    }
    Ok(worst)
}

/// Jets of `theta_Omega = 1 - (1 - phi^{kappa+1})^{kappa+1}` at one point.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaJet {
    pub point: usize,
    pub in_omega: bool,
    pub phi: f64,
    pub theta: f64,
    /// Order to which `theta - 1` (on Omega) or `theta` (off Omega) vanishes
    /// by the factor bookkeeping; always `kappa + 1`.
    pub certified_order: usize,
    /// Largest jet coefficient of order `<= kappa` of `theta - theta(point)`
    /// target, over randomized unknown higher derivatives of `phi`.
    pub max_jet_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaReport {
    pub kappa: usize,
    pub omega: Vec<usize>,
    /// Pick norm of the indicator of Omega.
    pub c: f64,
    /// `1 + (1 + c^{kappa+1})^{kappa+1}`.
    pub norm_proxy: f64,
    pub jets: Vec<ThetaJet>,
}

fn truncate(p: &Polynomial, k: usize) -> Polynomial {
    Polynomial::from_terms(
        p.d(),
        p.terms().filter(|(a, _)| a.degree() <= k).map(|(a, &c)| (a.clone(), c)),
    )
    .expect("dimensions agree")
}

fn jet_pow(p: &Polynomial, e: usize, k: usize) -> Polynomial {
    let mut out = Polynomial::one(p.d());
    for _ in 0..e {
        out = truncate(&(&out * p), k);
    }
    out
}

/// Jet of order `k` of `1 - (1 - phi^{k+1})^{k+1}` for the jet `phi`.
pub fn theta_of_jet(phi: &Polynomial, k: usize) -> Polynomial {
    let one = Polynomial::one(phi.d());
    let u = jet_pow(phi, k + 1, k);
    let v = jet_pow(&(&one - &u), k + 1, k);
    truncate(&(&one - &v), k)
}

/// Certified jet table of `theta_Omega` on the points. The values of `phi`
/// are the interpolated indicator; its unknown derivatives are drawn at
/// random (`trials` draws, seeded) to confirm the bookkeeping.
pub fn theta_jets(points: &[Vec<C64>], omega: &[usize], kappa: usize, seed: u64) -> Result<ThetaReport> {
    check_points(points)?;
    let n = points.len();
    if let Some(&bad) = omega.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidInput(format!("omega index {bad} out of range")));
    }
    let d = points[0].len();
    let pick = pick_min_norm(points, &indicator(n, omega))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders = enumerate(d, kappa);
    let mut jets = Vec::with_capacity(n);
    for i in 0..n {
        let in_omega = omega.contains(&i);
        let value = if in_omega { 1.0 } else { 0.0 };
        let mut worst = 0.0f64;
        let mut theta_value = 0.0;
        for _ in 0..8 {
            let phi = Polynomial::from_terms(
                d,
                orders.iter().map(|a| {
                    let c = if a.degree() == 0 {
                        real(value)
                    } else {
                        C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))
                    };
                    (a.clone(), c)
                }),
            )?;
            let theta = theta_of_jet(&phi, kappa);
            let target = Polynomial::constant(d, real(value));
            let diff = &theta - &target;
            worst = worst.max(diff.max_coefficient());
            theta_value = theta.eval(&vec![C64::new(0.0, 0.0); d]).re;
        }
        jets.push(ThetaJet {
            point: i,
            in_omega,
            phi: value,
            theta: theta_value,
            certified_order: kappa + 1,
            max_jet_residual: worst,
            pass: worst <= 1e-9,
        });
    }
    let c = pick.c_star;
    Ok(ThetaReport {
        kappa,
        omega: omega.to_vec(),
        c,
        norm_proxy: 1.0 + (1.0 + c.powi(kappa as i32 + 1)).powi(kappa as i32 + 1),
        jets,
    })
}
