//! Seeded inputs for the benchmarks.

use arveson_core::models::monomial_model;
use arveson_core::multiindex::{enumerate, MultiIndex};
use arveson_core::nilsim::{check_hypotheses, perturbed_model};
use arveson_core::numerics::{c64, direct_sum, inverse, real, CMatrix, CVector, C64};
use arveson_core::tuples::{CommutingTuple, COMMUTE_TOL};
use arveson_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generators of `m_0^k` in `d` variables.
pub fn maximal_power(d: usize, k: usize) -> Vec<MultiIndex> {
    enumerate(d, k).into_iter().filter(|a| a.degree() == k).collect()
}

/// `G ((+) (z_i I + s_i Z)) G^{-1}` with `blocks` copies of the model of
/// `m_0^2` in `d` variables at points spaced along the first axis and a
/// well-conditioned `G = I + 0.2 R / ||R||`.
pub fn conjugated_blocks(d: usize, blocks: usize, seed: u64) -> Result<CommutingTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = monomial_model(&maximal_power(d, 2), d)?;
    let n = model.size();
    let mut per_var: Vec<Vec<CMatrix>> = vec![Vec::new(); d];
    for b in 0..blocks {
        let s = rng.random_range(0.3..0.6);
        for (j, zj) in model.tuple.matrices().iter().enumerate() {
            let p = if j == 0 { -0.6 + 1.2 * (b as f64 + 0.5) / blocks as f64 } else { 0.05 * j as f64 };
            per_var[j].push(CMatrix::identity(n, n) * real(p / (d as f64).sqrt()) + zj * real(s));
        }
    }
    let size = n * blocks;
    let r = CMatrix::from_fn(size, size, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let g = CMatrix::identity(size, size) + &r * real(0.2 / r.norm());
    let g_inv = inverse(&g)?;
    let mats = per_var.iter().map(|parts| &g * direct_sum(parts) * &g_inv).collect();
    CommutingTuple::new(mats, COMMUTE_TOL)
}

/// `n` random points in the ball of radius 0.8 in `C^d` and unimodular
/// targets.
pub fn pick_data(n: usize, d: usize, seed: u64) -> (Vec<Vec<C64>>, Vec<C64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| C64::from_polar(rng.random_range(0.0..0.8 / (d as f64).sqrt()), rng.random_range(0.0..6.3)))
                .collect()
        })
        .collect();
    let targets = (0..n).map(|_| C64::from_polar(1.0, rng.random_range(0.0..6.3))).collect();
    (points, targets)
}

/// First seeded perturbation of the model of `gens` that satisfies the
/// similarity hypotheses, shrinking the spread until one does.
pub fn admissible_perturbation(gens: &[MultiIndex], d: usize, seed: u64) -> Result<(CommutingTuple, CVector)> {
    let mut spread = 0.02;
    for _ in 0..8 {
        for s in seed..seed + 8 {
            let (n, xi) = perturbed_model(gens, d, spread, s)?;
            if check_hypotheses(&n, &xi)?.admissible {
                return Ok((n, xi));
            }
        }
        spread /= 2.0;
    }
    Err(Error::NoConvergence("admissible perturbation search"))
}
