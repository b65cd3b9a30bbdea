//! Norm-controlled similarity of nilpotent commuting row contractions to the
//! monomial model.
//!
//! For a nilpotent tuple `N` with unit cyclic vector `xi` and monomial
//! annihilator, the map `sqrt(w_alpha) N^alpha xi -> sqrt(w_alpha) Z^alpha 1`
//! (`w_alpha = |alpha|! / alpha!`) is the explicit similarity. Its norms are
//! bounded by the weight defect `epsilon`, the layer gauge constant `gamma`
//! and the top degree `L`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{monomial_model, standard_monomials};
use crate::multiindex::{enumerate_homogeneous, MultiIndex};
use crate::numerics::{
    c64, condition, frobenius, gap_range, gap_rank, hstack, inverse, max_abs, operator_norm, singular_values, vectorize,
    CMatrix, CVector, C64,
};
use crate::tuples::{CommutingTuple, COMMUTE_TOL, KERNEL_TOL};

/// Points of the `t`-grid for the gauge supremum.
pub const GAMMA_GRID: usize = 64;

/// Relative size below which `N^alpha` counts as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// Slack allowed on the similarity bounds.
pub const BOUND_TOL: f64 = 1e-7;

/// Relative residual accepted for `X N X^{-1} = Z`.
pub const INTERTWINING_TOL: f64 = 1e-8;

/// `|alpha|! / alpha!` from exact integer arithmetic.
pub fn weight(alpha: &MultiIndex) -> Result<f64> {
    Ok(alpha.multinomial()? as f64)
}

/// One entry of the weight table: `w_alpha ||N^alpha xi||^2`.
#[derive(Debug, Clone, Serialize)]
pub struct WeightEntry {
    pub alpha: MultiIndex,
    pub weighted_norm_sq: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NilsimHypotheses {
    /// `{alpha : N^alpha != 0}`, graded order.
    pub xi_set: Vec<MultiIndex>,
    pub card_xi: usize,
    /// `max |alpha|` over the set.
    pub top_degree: usize,
    pub weights: Vec<WeightEntry>,
    /// `max (1 - w_alpha ||N^alpha xi||^2)`, clamped at 0.
    pub epsilon: f64,
    pub layer_dims: Vec<usize>,
    pub layers_direct: bool,
    /// `sup_t ||Y_t||` for the layer gauge, when the layers are direct.
    pub gamma: Option<f64>,
    /// Grid maximum before refinement.
    pub gamma_grid: Option<f64>,
    pub grid_points: usize,
    /// `epsilon * card(Xi) < 1` and direct layers.
    pub admissible: bool,
}

impl NilsimHypotheses {
    pub fn epsilon_card(&self) -> f64 {
        self.epsilon * self.card_xi as f64
    }
}

fn require_unit(xi: &CVector, n: usize) -> Result<()> {
    if xi.len() != n {
        return Err(Error::Dimension(format!("vector has length {}, tuple acts on C^{n}", xi.len())));
    }
    if (xi.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("xi must be a unit vector (norm {})", xi.norm())));
    }
    Ok(())
}

/// The nonzero `N^alpha`, level by level, up to the first vanishing level.
/// Only multiples of nonzero monomials can be nonzero, and a commuting
/// nilpotent tuple on `C^n` kills every product of `n` factors.
pub fn nonzero_monomials(n: &CommutingTuple) -> Result<Vec<Vec<(MultiIndex, CMatrix)>>> {
    let size = n.size();
    let d = n.d();
    let scale = n.matrices().iter().map(operator_norm).fold(1.0, f64::max);
    let mut levels = vec![vec![(MultiIndex::zero(d), CMatrix::identity(size, size))]];
    loop {
        let k = levels.len();
        let mut next: HashMap<MultiIndex, CMatrix> = HashMap::new();
        for (beta, m) in levels.last().expect("level 0") {
            for (j, nj) in n.matrices().iter().enumerate() {
                next.entry(beta.add_unit(j)).or_insert_with(|| nj * m);
            }
        }
        let tol = ZERO_TOL * scale.powi(k as i32);
        let level: Vec<(MultiIndex, CMatrix)> = enumerate_homogeneous(d, k)
            .into_iter()
            .filter_map(|a| next.remove(&a).map(|m| (a, m)))
            .filter(|(_, m)| frobenius(m) > tol)
            .collect();
        if level.is_empty() {
            return Ok(levels);
        }
        if k >= size {
            let defect = level.iter().map(|(_, m)| operator_norm(m)).fold(0.0, f64::max);
            return Err(Error::NotNilpotent { defect });
        }
        levels.push(level);
    }
}

/// Nilpotency check: every product of `size` factors vanishes.
pub fn require_nilpotent(n: &CommutingTuple) -> Result<()> {
    nonzero_monomials(n).map(|_| ())
}

/// Orthonormal layer bases `H_l = span{N^alpha xi : |alpha| = l}`.
fn layers(n: &CommutingTuple, xi: &CVector, top: usize) -> Result<Vec<CMatrix>> {
    let size = n.size();
    let d = n.d();
    (0..=top)
        .map(|l| {
            let cols: Vec<CMatrix> = enumerate_homogeneous(d, l)
                .iter()
                .map(|a| {
                    let v = n.monomial(a) * xi;
                    CMatrix::from_column_slice(size, 1, v.as_slice())
                })
                .collect();
            gap_range(&hstack(&cols), ZERO_TOL, "gauge layer")
        })
        .collect()
}

/// The layer gauge `Y_t = B diag(e^{i l t}) B^{-1}` for a direct, total
/// layer decomposition with block basis `B`.
pub struct LayerGauge {
    b: CMatrix,
    b_inv: CMatrix,
    levels: Vec<usize>,
}

impl LayerGauge {
    pub fn new(layers: &[CMatrix]) -> Result<Self> {
        let b = hstack(layers);
        let b_inv = inverse(&b)?;
        let levels = layers
            .iter()
            .enumerate()
            .flat_map(|(l, m)| std::iter::repeat_n(l, m.ncols()))
            .collect();
        Ok(Self { b, b_inv, levels })
    }

    pub fn at(&self, t: f64) -> CMatrix {
        let mut scaled = self.b.clone();
        for (j, &l) in self.levels.iter().enumerate() {
            let phase = C64::from_polar(1.0, l as f64 * t);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= phase;
            }
        }
        scaled * &self.b_inv
    }

    /// Grid maximum of `||Y_t||` and its refinement by golden-section search
    /// around the best grid point. Mutually orthogonal layers make every
    /// `Y_t` unitary.
    pub fn sup_norm(&self, grid: usize) -> (f64, f64) {
        let n = self.b.ncols();
        if max_abs(&(self.b.adjoint() * &self.b - CMatrix::identity(n, n))) <= 1e-14 {
            return (1.0, 1.0);
        }
        let f = |t: f64| operator_norm(&self.at(t));
        let h = std::f64::consts::TAU / grid as f64;
        let (k, grid_max) = (0..grid)
            .map(|k| (k, f(k as f64 * h)))
            .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
        let (mut a, mut b) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut e = a + g * (b - a);
        let (mut fc, mut fe) = (f(c), f(e));
        for _ in 0..60 {
            if fc > fe {
                b = e;
                e = c;
                fe = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + g * (b - a);
                fe = f(e);
            }
        }
        (grid_max, grid_max.max(fc).max(fe))
    }
}

/// Evaluate the hypotheses of the similarity theorem for `(N, xi)`.
pub fn check_hypotheses(n: &CommutingTuple, xi: &CVector) -> Result<NilsimHypotheses> {
    check_hypotheses_with_grid(n, xi, GAMMA_GRID)
}

pub fn check_hypotheses_with_grid(n: &CommutingTuple, xi: &CVector, grid: usize) -> Result<NilsimHypotheses> {
    let size = n.size();
    require_unit(xi, size)?;
    n.require_commuting(COMMUTE_TOL)?;
    require_nilpotent(n)?;
    n.require_row_contraction(1e-9)?;
    let levels = nonzero_monomials(n)?;
    let top = levels.len() - 1;
    let krylov = n.krylov(xi, top)?;
    if !krylov.is_cyclic {
        return Err(Error::NotCyclic {
            rank: krylov.basis.ncols(),
            dim: size,
        });
    }
    let mut xi_set = Vec::new();
    let mut weights = Vec::new();
    let mut epsilon = 0.0f64;
    for (alpha, p) in levels.iter().flatten() {
        let value = weight(alpha)? * (p * xi).norm_squared();
        epsilon = epsilon.max(1.0 - value);
        weights.push(WeightEntry {
            alpha: alpha.clone(),
            weighted_norm_sq: value,
        });
        xi_set.push(alpha.clone());
    }
    let layer_bases = layers(n, xi, top)?;
    let layer_dims: Vec<usize> = layer_bases.iter().map(|m| m.ncols()).collect();
    let layers_direct = layer_dims.iter().sum::<usize>() == size
        && gap_range(&hstack(&layer_bases), ZERO_TOL, "layer sum")?.ncols() == size;
    let (gamma_grid, gamma) = if layers_direct {
        let (g0, g1) = LayerGauge::new(&layer_bases)?.sup_norm(grid);
        (Some(g0), Some(g1))
    } else {
        (None, None)
    };
    let card = xi_set.len();
    Ok(NilsimHypotheses {
        card_xi: card,
        top_degree: top,
        weights,
        epsilon,
        layer_dims,
        layers_direct,
        gamma,
        gamma_grid,
        grid_points: grid,
        admissible: layers_direct && epsilon * (card as f64) < 1.0,
        xi_set,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimilarityCertificate {
    pub hypotheses: NilsimHypotheses,
    #[serde(with = "crate::numerics::json::cmatrix")]
    pub x: CMatrix,
    #[serde(skip)]
    pub x_inv: CMatrix,
    pub norm_x: f64,
    pub norm_x_inv: f64,
    pub cond: f64,
    /// `(L + 1) gamma / (1 - epsilon card(Xi))^{1/2}`, when admissible.
    pub bound_x: Option<f64>,
    /// `L + 1`.
    pub bound_x_inv: f64,
    pub pass_x: Option<bool>,
    pub pass_x_inv: bool,
    /// `max_j ||X N_j X^{-1} - Z_j||`.
    pub residual: f64,
}

/// Smallest `k` with `N^alpha = 0` for every `|alpha| = k`.
pub fn nilpotency_index(n: &CommutingTuple) -> Result<usize> {
    Ok(nonzero_monomials(n)?.len())
}

/// Check that the annihilator of `n` is the monomial ideal generated by
/// `gens`. It contains the ideal iff `N^g = 0` for every generator, and is
/// then equal to it iff the `N^alpha` over standard monomials are linearly
/// independent.
pub fn require_monomial_annihilator(n: &CommutingTuple, gens: &[MultiIndex]) -> Result<()> {
    let d = n.d();
    let scale = n.matrices().iter().map(operator_norm).fold(1.0, f64::max);
    for g in gens {
        if g.dim() != d {
            return Err(Error::Dimension(format!("generator {g:?} in {} variables, tuple has {d}", g.dim())));
        }
        let size = frobenius(&n.monomial(g));
        if size > ZERO_TOL * scale.powi(g.degree() as i32) {
            return Err(Error::AnnihilatorMismatch(format!(
                "N^{g:?} has norm {size:e}, so the generator does not annihilate"
            )));
        }
    }
    let basis = standard_monomials(gens, d)?;
    let cols: Vec<CMatrix> = basis
        .iter()
        .map(|a| {
            let v = vectorize(&n.monomial(a)) * c64(scale.powi(-(a.degree() as i32)), 0.0);
            CMatrix::from_column_slice(v.len(), 1, v.as_slice())
        })
        .collect();
    let rank = gap_rank(&singular_values(&hstack(&cols))?, KERNEL_TOL, "standard monomials")?;
    if rank < basis.len() {
        return Err(Error::AnnihilatorMismatch(format!(
            "the {} standard monomials span a space of dimension {rank} at the tuple",
            basis.len()
        )));
    }
    Ok(())
}

fn assemble(n: &CommutingTuple, xi: &CVector, gens: &[MultiIndex], hyp: NilsimHypotheses) -> Result<SimilarityCertificate> {
    let d = n.d();
    let model = monomial_model(gens, d)?;
    let basis = standard_monomials(gens, d)?;
    if basis.len() != n.size() {
        return Err(Error::AnnihilatorMismatch(format!(
            "model has dimension {} but the tuple acts on C^{}",
            basis.len(),
            n.size()
        )));
    }
    let cols: Vec<CMatrix> = basis
        .iter()
        .map(|a| {
            let v = n.monomial(a) * xi * c64(weight(a)?.sqrt(), 0.0);
            Ok(CMatrix::from_column_slice(n.size(), 1, v.as_slice()))
        })
        .collect::<Result<_>>()?;
    let x_inv = hstack(&cols);
    let x = inverse(&x_inv)?;
    let (norm_x, norm_x_inv, cond) = condition(&x)?;
    let scale = n.matrices().iter().map(operator_norm).fold(1.0, f64::max);
    let residual = n
        .matrices()
        .iter()
        .zip(model.tuple.matrices())
        .map(|(nj, zj)| operator_norm(&(&x * nj * &x_inv - zj)))
        .fold(0.0, f64::max);
    if residual > INTERTWINING_TOL * scale * cond {
        return Err(Error::Residual {
            what: "similarity to the model",
            residual,
            tol: INTERTWINING_TOL * scale * cond,
        });
    }
    let l1 = (hyp.top_degree + 1) as f64;
    let bound_x = match (hyp.admissible, hyp.gamma) {
        (true, Some(g)) => Some(l1 * g / (1.0 - hyp.epsilon_card()).sqrt()),
        _ => None,
    };
    Ok(SimilarityCertificate {
        pass_x: bound_x.map(|b| norm_x <= b + BOUND_TOL),
        pass_x_inv: norm_x_inv <= l1 + BOUND_TOL,
        bound_x,
        bound_x_inv: l1,
        hypotheses: hyp,
        x,
        x_inv,
        norm_x,
        norm_x_inv,
        cond,
        residual,
    })
}

/// The explicit similarity `X` with `X N X^{-1} = Z`, after checking the
/// annihilator and the admissibility of the hypotheses.
pub fn build_similarity(n: &CommutingTuple, xi: &CVector, gens: &[MultiIndex]) -> Result<SimilarityCertificate> {
    build_similarity_with_grid(n, xi, gens, GAMMA_GRID)
}

pub fn build_similarity_with_grid(
    n: &CommutingTuple,
    xi: &CVector,
    gens: &[MultiIndex],
    grid: usize,
) -> Result<SimilarityCertificate> {
    let hyp = check_hypotheses_with_grid(n, xi, grid)?;
    require_monomial_annihilator(n, gens)?;
    if !hyp.layers_direct {
        return Err(Error::GaugeUnverified);
    }
    if !hyp.admissible {
        return Err(Error::Inadmissible {
            product: hyp.epsilon_card(),
        });
    }
    assemble(n, xi, gens, hyp)
}

/// The same correspondence without requiring admissibility; the norm bound
/// on `X` is then not reported.
pub fn build_intertwiner(n: &CommutingTuple, xi: &CVector, gens: &[MultiIndex]) -> Result<SimilarityCertificate> {
    build_intertwiner_with_grid(n, xi, gens, GAMMA_GRID)
}

pub fn build_intertwiner_with_grid(
    n: &CommutingTuple,
    xi: &CVector,
    gens: &[MultiIndex],
    grid: usize,
) -> Result<SimilarityCertificate> {
    let hyp = check_hypotheses_with_grid(n, xi, grid)?;
    require_monomial_annihilator(n, gens)?;
    assemble(n, xi, gens, hyp)
}

#[derive(Debug, Clone, Serialize)]
pub struct NecessityReport {
    pub norm_x: f64,
    pub norm_x_inv: f64,
    /// `1 / (||X|| ||X^{-1}||)^2`, the bound that follows from the
    /// intertwining.
    pub lower_bound: f64,
    /// `1 / (||X|| ||X^{-1}||)`; this can fail (`N = [[0,0],[s,0]]`,
    /// `X = diag(1, 1/s)`).
    pub stated_bound: f64,
    pub pass_stated: bool,
    /// `min w_alpha ||N^alpha xi||^2` over monomials outside the ideal, with
    /// `xi = X^{-1} 1 / ||X^{-1} 1||`.
    pub min_weight: f64,
    pub argmin: MultiIndex,
    pub pass_weights: bool,
    /// `max_t ||X^{-1} W_t X||` over the grid.
    pub max_gauge_norm: f64,
    /// Largest of `||Y_t N Y_t^{-1} - e^{it} N||` and `||Y_t^{-1} xi - xi||`.
    pub gauge_residual: f64,
    pub pass_gauge: bool,
    /// `|<xi, xi_given>|`.
    pub alignment: f64,
    pub intertwining_residual: f64,
}

/// Check the necessary conditions implied by an invertible `X` with
/// `X N X^{-1} = Z`.
pub fn necessity_check(
    n: &CommutingTuple,
    xi_given: &CVector,
    x: &CMatrix,
    gens: &[MultiIndex],
) -> Result<NecessityReport> {
    let d = n.d();
    let model = monomial_model(gens, d)?;
    if x.nrows() != model.size() || x.ncols() != n.size() {
        return Err(Error::Dimension(format!(
            "X is {}x{}, expected {}x{}",
            x.nrows(),
            x.ncols(),
            model.size(),
            n.size()
        )));
    }
    let x_inv = inverse(x)?;
    let (norm_x, norm_x_inv, cond) = condition(x)?;
    let scale = n.matrices().iter().map(operator_norm).fold(1.0, f64::max);
    let residual = n
        .matrices()
        .iter()
        .zip(model.tuple.matrices())
        .map(|(nj, zj)| operator_norm(&(x * nj * &x_inv - zj)))
        .fold(0.0, f64::max);
    if residual > INTERTWINING_TOL * scale * cond {
        return Err(Error::Residual {
            what: "intertwining X N X^{-1} = Z",
            residual,
            tol: INTERTWINING_TOL * scale * cond,
        });
    }
    let raw = &x_inv * &model.cyclic_vector;
    let xi = raw.unscale(raw.norm());
    let lower_bound = 1.0 / (cond * cond);
    let mut min_weight = f64::INFINITY;
    let mut argmin = MultiIndex::zero(d);
    for b in standard_monomials(gens, d)? {
        let v = weight(&b)? * (n.monomial(&b) * &xi).norm_squared();
        if v < min_weight {
            min_weight = v;
            argmin = b;
        }
    }
    let mut max_gauge_norm = 0.0f64;
    let mut gauge_residual = 0.0f64;
    let basis = standard_monomials(gens, d)?;
    for k in 0..GAMMA_GRID {
        let t = std::f64::consts::TAU * k as f64 / GAMMA_GRID as f64;
        let w = CMatrix::from_diagonal(&CVector::from_iterator(
            basis.len(),
            basis.iter().map(|a| C64::from_polar(1.0, a.degree() as f64 * t)),
        ));
        let y = &x_inv * &w * x;
        let y_inv = &x_inv * w.adjoint() * x;
        max_gauge_norm = max_gauge_norm.max(operator_norm(&y));
        for nj in n.matrices() {
            let r = operator_norm(&(&y * nj * &y_inv - nj * C64::from_polar(1.0, t)));
            gauge_residual = gauge_residual.max(r);
        }
        gauge_residual = gauge_residual.max((&y_inv * &xi - &xi).norm());
    }
    let slack = 1e-9 * cond;
    Ok(NecessityReport {
        norm_x,
        norm_x_inv,
        lower_bound,
        pass_weights: min_weight >= lower_bound - slack,
        stated_bound: 1.0 / cond,
        pass_stated: min_weight >= 1.0 / cond - slack,
        min_weight,
        argmin,
        pass_gauge: max_gauge_norm <= cond * (1.0 + 1e-9) && gauge_residual <= slack * scale,
        max_gauge_norm,
        gauge_residual,
        alignment: if xi_given.len() == xi.len() { xi.dotc(xi_given).norm() } else { 0.0 },
        intertwining_residual: residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub epsilon: f64,
    /// Equal-length pairs meeting the weight hypothesis.
    pub pairs_tested: usize,
    /// `max (sqrt(w_a w_b) |<T^a xi, T^b xi>| - epsilon)`; non-positive
    /// when the inequality holds.
    pub pair_worst_slack: f64,
    pub pair_pass: bool,
    pub levels_tested: Vec<usize>,
    pub samples: usize,
    /// `min (||sum sqrt(w) c T^a xi||^2 - (1 - eps card S) |c|^2) / |c|^2`.
    pub level_worst_slack: f64,
    pub level_pass: bool,
    /// Two-sided estimate over the nonzero monomials, with the measured
    /// weight defect (nilpotent tuples with a verified gauge only).
    pub sandwich: Option<SandwichReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub lower_constant: f64,
    pub upper_constant: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

fn random_coeffs(rng: &mut ChaCha8Rng, k: usize) -> Vec<C64> {
    // Random support, at least one entry.
    let mut c: Vec<C64> = (0..k)
        .map(|_| {
            if rng.random::<f64>() < 0.7 {
                c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    if c.iter().all(|z| z.norm() == 0.0) {
        let i = rng.random_range(0..k);
        c[i] = c64(1.0, 0.0);
    }
    c
}

/// Evaluate the orthogonality, same-length and two-sided estimates on
/// `(T, xi)` for monomials up to degree `max_len`, with 100 random
/// coefficient vectors per test.
pub fn lemma_checks(t: &CommutingTuple, xi: &CVector, epsilon: f64, max_len: usize, seed: u64) -> Result<LemmaReport> {
    require_unit(xi, t.size())?;
    let d = t.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = 100;
    let mut pairs_tested = 0;
    let mut pair_worst = f64::NEG_INFINITY;
    let mut levels_tested = Vec::new();
    let mut level_worst = f64::INFINITY;
    for l in 0..=max_len {
        let alphas = enumerate_homogeneous(d, l);
        let vecs: Vec<CVector> = alphas.iter().map(|a| t.monomial(a) * xi).collect();
        let w: Vec<f64> = alphas.iter().map(weight).collect::<Result<_>>()?;
        let ok: Vec<bool> = vecs
            .iter()
            .zip(&w)
            .map(|(v, &wa)| wa * v.norm_squared() >= 1.0 - epsilon)
            .collect();
        for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                if ok[i] && ok[j] {
                    pairs_tested += 1;
                    let value = (w[i] * w[j]).sqrt() * vecs[i].dotc(&vecs[j]).norm();
                    pair_worst = pair_worst.max(value - epsilon);
                }
            }
        }
        if ok.iter().all(|&b| b) {
            levels_tested.push(l);
            for _ in 0..samples {
                let c = random_coeffs(&mut rng, alphas.len());
                let card = c.iter().filter(|z| z.norm() > 0.0).count() as f64;
                let mut h = CVector::zeros(t.size());
                for ((v, &wa), &ci) in vecs.iter().zip(&w).zip(&c) {
                    h += v * (ci * wa.sqrt());
                }
                let c2: f64 = c.iter().map(|z| z.norm_sqr()).sum();
                level_worst = level_worst.min((h.norm_squared() - (1.0 - epsilon * card) * c2) / c2);
            }
        }
    }
    let sandwich = match check_hypotheses(t, xi) {
        Ok(hyp) if hyp.layers_direct => {
            let gamma = hyp.gamma.unwrap_or(1.0);
            let l1 = (hyp.top_degree + 1) as f64;
            let lower = (1.0 - hyp.epsilon_card()) / (l1 * gamma * gamma);
            let vecs: Vec<CVector> = hyp
                .xi_set
                .iter()
                .map(|a| Ok(t.monomial(a) * xi * c64(weight(a)?.sqrt(), 0.0)))
                .collect::<Result<_>>()?;
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for _ in 0..samples {
                let c = random_coeffs(&mut rng, vecs.len());
                let mut h = CVector::zeros(t.size());
                for (v, &ci) in vecs.iter().zip(&c) {
                    h += v * ci;
                }
                let r = h.norm_squared() / c.iter().map(|z| z.norm_sqr()).sum::<f64>();
                lo = lo.min(r);
                hi = hi.max(r);
            }
            Some(SandwichReport {
                lower_constant: lower,
                upper_constant: l1,
                min_ratio: lo,
                max_ratio: hi,
                pass: lo >= lower - 1e-12 && hi <= l1 + 1e-12,
            })
        }
        _ => None,
    };
    Ok(LemmaReport {
        epsilon,
        pairs_tested,
        pair_worst_slack: if pairs_tested == 0 { 0.0 } else { pair_worst },
        pair_pass: pair_worst <= 1e-12,
        levels_tested,
        samples,
        level_worst_slack: if level_worst.is_finite() { level_worst } else { 0.0 },
        level_pass: !(level_worst < -1e-12),
        sandwich,
    })
}

/// `R(t)` of the three-dimensional example: `(N_1, N_1 + t N_2) / f(t)`.
pub fn example_pair(t: f64) -> CommutingTuple {
    let f = example_f(t);
    let mut n1 = CMatrix::zeros(3, 3);
    n1[(1, 0)] = c64(1.0 / f, 0.0);
    let mut n2 = n1.clone();
    n2[(2, 0)] = c64(t / f, 0.0);
    CommutingTuple::validate(vec![n1, n2]).expect("3x3 pair")
}

/// `f(t) = sqrt(1 + t^2/2 + sqrt(1 + t^4/4))`.
pub fn example_f(t: f64) -> f64 {
    (1.0 + t * t / 2.0 + (1.0 + t.powi(4) / 4.0).sqrt()).sqrt()
}

/// A seeded admissible-style test input: the monomial model conjugated by
/// `U (I + spread K)` (random unitary `U`, random `K` with entries in the
/// unit square) and rescaled to a row contraction, with the transported
/// cyclic vector.
pub fn perturbed_model(gens: &[MultiIndex], d: usize, spread: f64, seed: u64) -> Result<(CommutingTuple, CVector)> {
    let model = monomial_model(gens, d)?;
    let n = model.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rand = |s: f64| CMatrix::from_fn(n, n, |_, _| c64(rng.random_range(-s..s), rng.random_range(-s..s)));
    let (q, _) = crate::numerics::schur(&(rand(1.0) + CMatrix::identity(n, n)))?;
    let g = q * (CMatrix::identity(n, n) + rand(spread));
    let g_inv = inverse(&g)?;
    let mats: Vec<CMatrix> = model.tuple.matrices().iter().map(|z| &g * z * &g_inv).collect();
    let tuple = CommutingTuple::validate(mats)?;
    let row = tuple.row_norm().max(1.0);
    let scaled: Vec<CMatrix> = tuple.matrices().iter().map(|m| m.unscale(row)).collect();
    let xi = &g * &model.cyclic_vector;
    Ok((CommutingTuple::new(scaled, COMMUTE_TOL)?, xi.unscale(xi.norm())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::polyideal::PolyIdeal;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn square_gens() -> Vec<MultiIndex> {
        vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]
    }

    fn e1() -> CVector {
        CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)])
    }

    #[test]
    fn model_has_trivial_hypotheses() {
        let m = monomial_model(&square_gens(), 2).unwrap();
        let h = check_hypotheses(&m.tuple, &m.cyclic_vector).unwrap();
        assert_eq!(h.epsilon, 0.0);
        assert!((h.gamma.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(h.xi_set, vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]);
        assert_eq!(h.top_degree, 1);
        assert!(h.admissible);
        // Direct measurement, without the unitary shortcut.
        let lay = layers(&m.tuple, &m.cyclic_vector, 1).unwrap();
        let g = LayerGauge::new(&lay).unwrap();
        for k in 0..16 {
            assert!((operator_norm(&g.at(0.4 * k as f64)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn example_pair_weights() {
        for t in [0.1, 0.3, 1.0, 2.0] {
            let r = example_pair(t);
            let f = example_f(t);
            let h = check_hypotheses(&r, &e1()).unwrap();
            let w1 = h.weights.iter().find(|w| w.alpha == mi(&[1, 0])).unwrap().weighted_norm_sq;
            let w2 = h.weights.iter().find(|w| w.alpha == mi(&[0, 1])).unwrap().weighted_norm_sq;
            assert!((w1 - 1.0 / (f * f)).abs() < 1e-14);
            assert!((w2 - (1.0 + t * t) / (f * f)).abs() < 1e-14);
            assert!((h.epsilon - (1.0 - 1.0 / (f * f))).abs() < 1e-14);
            // f^2 >= 2, so epsilon >= 1/2 and card(Xi) = 3: never admissible.
            assert!(!h.admissible);
        }
    }

    #[test]
    fn scaled_model_epsilon() {
        let gens = vec![mi(&[3, 0]), mi(&[1, 1]), mi(&[0, 3])];
        let m = monomial_model(&gens, 2).unwrap();
        let scaled = CommutingTuple::new(m.tuple.matrices().iter().map(|z| z * c64(0.9, 0.0)).collect(), COMMUTE_TOL).unwrap();
        let h = check_hypotheses(&scaled, &m.cyclic_vector).unwrap();
        for w in &h.weights {
            let l = w.alpha.degree() as i32;
            assert!((w.weighted_norm_sq - 0.81f64.powi(l)).abs() < 1e-14);
        }
        assert!((h.epsilon - (1.0 - 0.81f64.powi(2))).abs() < 1e-14);
    }

    #[test]
    fn identity_certificate_on_the_model() {
        let m = monomial_model(&square_gens(), 2).unwrap();
        let c = build_similarity(&m.tuple, &m.cyclic_vector, &square_gens()).unwrap();
        assert!(frobenius(&(&c.x - CMatrix::identity(3, 3))) < 1e-14);
        assert!((c.cond - 1.0).abs() < 1e-12);
        assert_eq!(c.pass_x, Some(true));
        assert!(c.pass_x_inv);
        let nec = necessity_check(&m.tuple, &m.cyclic_vector, &c.x, &square_gens()).unwrap();
        assert!((nec.lower_bound - 1.0).abs() < 1e-12);
        assert!((nec.min_weight - 1.0).abs() < 1e-12);
        assert!(nec.pass_weights && nec.pass_gauge);
    }

    #[test]
    fn scaled_model_certificate() {
        let gens = vec![mi(&[2, 0]), mi(&[0, 2])];
        let m = monomial_model(&gens, 2).unwrap();
        let scaled = CommutingTuple::new(m.tuple.matrices().iter().map(|z| z * c64(0.99, 0.0)).collect(), COMMUTE_TOL).unwrap();
        let c = build_similarity(&scaled, &m.cyclic_vector, &gens).unwrap();
        assert_eq!(c.pass_x, Some(true));
        assert!(c.pass_x_inv);
        assert!(c.residual < 1e-12);
    }

    #[test]
    fn example_pair_intertwiner_matches_closed_form() {
        let t = 0.3;
        let r = example_pair(t);
        let c = build_intertwiner(&r, &e1(), &square_gens()).unwrap();
        assert_eq!(c.bound_x, None);
        // X^{-1} maps N to R: it has the form [[a,0,0],[b,a/f,a/f],[c,0,a t/f]].
        let f = example_f(t);
        let xi = &c.x_inv;
        let a = xi[(0, 0)];
        assert!((xi[(1, 1)] - a / f).norm() < 1e-14);
        assert!((xi[(1, 2)] - a / f).norm() < 1e-14);
        assert!((xi[(2, 2)] - a * t / f).norm() < 1e-14);
        for (i, j) in [(0, 1), (0, 2), (2, 1)] {
            assert!(xi[(i, j)].norm() < 1e-15);
        }
        let nec = necessity_check(&r, &e1(), &c.x, &square_gens()).unwrap();
        assert!(nec.pass_weights && nec.pass_gauge);
        // cond(X) >= 1 / (w ||R^alpha xi||^2) for every alpha outside the ideal.
        assert!(c.cond >= 1.0 / nec.min_weight - 1e-9);
    }

    #[test]
    fn rescaled_intertwiner_keeps_necessity() {
        let r = example_pair(0.3);
        let c = build_intertwiner(&r, &e1(), &square_gens()).unwrap();
        // p(Z) X is again an intertwiner when p(0) != 0.
        let m = monomial_model(&square_gens(), 2).unwrap();
        let p = CMatrix::identity(3, 3) * c64(2.0, 0.0) + &m.tuple.matrices()[0] * c64(0.5, 0.5);
        let x = p * &c.x;
        let nec = necessity_check(&r, &e1(), &x, &square_gens()).unwrap();
        assert!(nec.pass_weights && nec.pass_gauge);
        assert!(nec.min_weight > nec.lower_bound);
    }

    #[test]
    fn stated_weight_bound_can_fail() {
        let s = 0.5;
        let n = CommutingTuple::new(vec![CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0), c64(0.0, 0.0)])], COMMUTE_TOL).unwrap();
        let x = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(1.0 / s, 0.0)]));
        let nec = necessity_check(&n, &CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]), &x, &[mi(&[2])]).unwrap();
        assert!((nec.min_weight - s * s).abs() < 1e-15);
        assert!((nec.lower_bound - s * s).abs() < 1e-15);
        assert!(nec.pass_weights && !nec.pass_stated);
    }

    #[test]
    fn perturbed_models_satisfy_the_bounds() {
        let families: Vec<(Vec<MultiIndex>, usize)> = vec![
            (square_gens(), 2),
            (vec![mi(&[3])], 1),
            (vec![mi(&[2, 0]), mi(&[0, 2])], 2),
            (vec![mi(&[2, 0, 0]), mi(&[0, 1, 0]), mi(&[0, 0, 1])], 3),
        ];
        let mut admissible = 0;
        for (gens, d) in &families {
            for seed in 0..20 {
                let (n, xi) = perturbed_model(gens, *d, 0.01, seed).unwrap();
                let hyp = check_hypotheses(&n, &xi).unwrap();
                if !hyp.admissible {
                    continue;
                }
                admissible += 1;
                let c = build_similarity(&n, &xi, gens).unwrap();
                assert_eq!(c.pass_x, Some(true), "{c:?}");
                assert!(c.pass_x_inv);
                let nec = necessity_check(&n, &xi, &c.x, gens).unwrap();
                assert!(nec.pass_weights && nec.pass_gauge, "{nec:?}");
                let lem = lemma_checks(&n, &xi, hyp.epsilon, hyp.top_degree, seed).unwrap();
                assert!(lem.pair_pass && lem.level_pass && lem.sandwich.unwrap().pass);
            }
        }
        assert!(admissible >= 40);
    }

    #[test]
    fn lemma_checks_on_the_model_and_example() {
        let m = monomial_model(&square_gens(), 2).unwrap();
        let lem = lemma_checks(&m.tuple, &m.cyclic_vector, 0.0, 1, 0).unwrap();
        assert!(lem.pair_pass && lem.pair_worst_slack <= 0.0);
        assert_eq!(lem.pairs_tested, 1);

        let r = example_pair(0.2);
        let eps = check_hypotheses(&r, &e1()).unwrap().epsilon;
        let lem = lemma_checks(&r, &e1(), eps, 1, 0).unwrap();
        assert_eq!(lem.pairs_tested, 1);
        assert!(lem.pair_pass);
    }

    #[test]
    fn lemma_checks_on_compressions() {
        use crate::models::{jet_model, local_ideal};
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..10 {
            let pts: Vec<Vec<C64>> = (0..3)
                .map(|_| (0..2).map(|_| C64::from_polar(rng.random_range(0.0..0.4), rng.random_range(0.0..6.28))).collect())
                .collect();
            let ideals: Vec<_> = pts.iter().map(|z| local_ideal(z, 1, Vec::new(), 2).unwrap()).collect();
            let m = jet_model(&pts, &ideals, None).unwrap();
            let xi = m.cyclic_vector.unscale(m.cyclic_vector.norm());
            let lem = lemma_checks(&m.tuple, &xi, 0.9, 3, trial).unwrap();
            assert!(lem.pair_pass && lem.level_pass, "{lem:?}");
        }
    }

    #[test]
    fn rejections() {
        let m = monomial_model(&square_gens(), 2).unwrap();
        let not_cyclic = CVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert!(matches!(check_hypotheses(&m.tuple, &not_cyclic), Err(Error::NotCyclic { .. })));
        let wrong = vec![mi(&[2, 0]), mi(&[0, 2])];
        assert!(matches!(
            build_similarity(&m.tuple, &m.cyclic_vector, &wrong),
            Err(Error::AnnihilatorMismatch(_))
        ));
        let r = example_pair(0.3);
        assert!(matches!(build_similarity(&r, &e1(), &square_gens()), Err(Error::Inadmissible { .. })));
        let shift = CommutingTuple::new(vec![CMatrix::identity(2, 2) * c64(0.5, 0.0)], COMMUTE_TOL).unwrap();
        let v = CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert!(matches!(check_hypotheses(&shift, &v), Err(Error::NotNilpotent { .. })));
    }

    fn slice_oracle(n: &CommutingTuple, gens: &[MultiIndex]) -> bool {
        let top_gen = gens.iter().map(MultiIndex::degree).max().unwrap();
        let degree = top_gen.max(nilpotency_index(n).unwrap());
        let ann = n.annihilator_slice(degree).unwrap();
        let ideal = PolyIdeal::from_generators(
            n.d(),
            gens.iter().map(|g| Polynomial::monomial(g.clone(), c64(1.0, 0.0))).collect(),
            degree,
        )
        .unwrap();
        ideal.slice_contained_in(&ann).unwrap() && ann.slice_contained_in(&ideal).unwrap()
    }

    #[test]
    fn annihilator_test_matches_slice_comparison() {
        let candidates: Vec<(Vec<MultiIndex>, usize)> = vec![
            (vec![mi(&[2])], 1),
            (vec![mi(&[3])], 1),
            (square_gens(), 2),
            (vec![mi(&[2, 0]), mi(&[0, 2])], 2),
            (vec![mi(&[1, 0]), mi(&[0, 3])], 2),
            (vec![mi(&[3, 0]), mi(&[1, 1]), mi(&[0, 2])], 2),
            (vec![mi(&[2, 0, 0]), mi(&[0, 1, 0]), mi(&[0, 0, 1])], 3),
            (vec![mi(&[1, 0, 0]), mi(&[0, 2, 0]), mi(&[0, 1, 1]), mi(&[0, 0, 2])], 3),
        ];
        let mut tuples = Vec::new();
        for (k, (gens, d)) in candidates.iter().enumerate() {
            tuples.push(monomial_model(gens, *d).unwrap().tuple);
            tuples.push(perturbed_model(gens, *d, 0.05, k as u64).unwrap().0);
        }
        tuples.push(example_pair(0.2));
        let mut agreements = [0usize; 2];
        for n in &tuples {
            for (gens, d) in &candidates {
                if *d != n.d() {
                    continue;
                }
                let fast = require_monomial_annihilator(n, gens).is_ok();
                assert_eq!(fast, slice_oracle(n, gens), "{gens:?} on a tuple of size {}", n.size());
                agreements[fast as usize] += 1;
            }
        }
        assert!(agreements[0] >= 10 && agreements[1] >= 10, "{agreements:?}");
    }

    #[test]
    fn layer_gauge_conjugates() {
        let (n, xi) = perturbed_model(&square_gens(), 2, 0.05, 3).unwrap();
        let hyp = check_hypotheses(&n, &xi).unwrap();
        let lay = layers(&n, &xi, hyp.top_degree).unwrap();
        let g = LayerGauge::new(&lay).unwrap();
        let t = 0.77;
        let y = g.at(t);
        let y_inv = inverse(&y).unwrap();
        for nj in n.matrices() {
            assert!(frobenius(&(&y * nj * &y_inv - nj * C64::from_polar(1.0, t))) < 1e-12);
        }
        assert!((&y_inv * &xi - &xi).norm() < 1e-12);
        assert!(hyp.gamma.unwrap() >= hyp.gamma_grid.unwrap());
    }
}
