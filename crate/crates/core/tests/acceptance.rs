//! Acceptance suite. Prints one line per criterion and exits non-zero on any
//! failure that is not a documented impossibility.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use arveson_core::models::{gauge_unitary, jet_model, local_ideal, monomial_model, verify_localizations};
use arveson_core::multiindex::{enumerate, MultiIndex};
use arveson_core::nilsim::{
    build_intertwiner, build_similarity, check_hypotheses, example_pair, lemma_checks, necessity_check,
    perturbed_model,
};
use arveson_core::numerics::{
    c64, direct_sum, inverse, max_abs, operator_norm, schur, subspace_distance, CMatrix, CVector, C64,
};
use arveson_core::poly::Polynomial;
use arveson_core::polyideal::{maximal_ideal_power, PolyIdeal};
use arveson_core::repro::{dichotomy_demo, example_one_variable, example_two_variable, ReproReport};
use arveson_core::spectral::{jordan_decompose, SpectralOptions};
use arveson_core::tuples::{CommutingTuple, COMMUTE_TOL};
use arveson_core::interp::{pick_min_norm, separation_constants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria containing a requirement that cannot hold; see the notes printed
/// for them.
const KNOWN_UNATTAINABLE: &[usize] = &[5];

#[derive(Default)]
struct Check {
    failures: Vec<String>,
    unattainable: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}

type Outcome = arveson_core::Result<()>;

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

fn real(x: f64) -> C64 {
    c64(x, 0.0)
}

fn monomial_ideal(d: usize, gens: &[MultiIndex], degree: usize) -> arveson_core::Result<PolyIdeal> {
    PolyIdeal::from_generators(d, gens.iter().map(|g| Polynomial::monomial(g.clone(), real(1.0))).collect(), degree)
}

/// Standard monomial sets of all proper monomial ideals containing every
/// monomial of degree `k + 1`, with their minimal generators.
fn monomial_ideals(d: usize, k: usize) -> Vec<Vec<MultiIndex>> {
    let all = enumerate(d, k);
    let mut sets = Vec::new();
    fn rec(i: usize, all: &[MultiIndex], cur: &mut HashSet<MultiIndex>, out: &mut Vec<HashSet<MultiIndex>>) {
        if i == all.len() {
            out.push(cur.clone());
            return;
        }
        rec(i + 1, all, cur, out);
        let a = &all[i];
        let closed = (0..a.dim()).all(|j| {
            a.exponents()[j] == 0 || {
                let mut e = a.exponents().to_vec();
                e[j] -= 1;
                cur.contains(&MultiIndex::new(e))
            }
        });
        if closed {
            cur.insert(a.clone());
            rec(i + 1, all, cur, out);
            cur.remove(a);
        }
    }
    let mut cur = HashSet::from([all[0].clone()]);
    rec(1, &all, &mut cur, &mut sets);
    sets.into_iter()
        .map(|s| {
            enumerate(d, k + 1)
                .into_iter()
                .filter(|a| {
                    !s.contains(a)
                        && (0..d).all(|j| {
                            a.exponents()[j] == 0 || {
                                let mut e = a.exponents().to_vec();
                                e[j] -= 1;
                                s.contains(&MultiIndex::new(e))
                            }
                        })
                })
                .collect()
        })
        .collect()
}

fn report_rows(ck: &mut Check, r: &ReproReport) {
    for row in r.rows.iter().filter(|row| !row.pass) {
        ck.failures.push(format!(
            "{} {} at {}: formula {} measured {}",
            row.example, row.quantity, row.parameter, row.formula, row.measured
        ));
    }
}

fn criterion_1(ck: &mut Check) -> Outcome {
    let gens = vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])];
    let m = monomial_model(&gens, 2)?;
    let mut e21 = CMatrix::zeros(3, 3);
    e21[(1, 0)] = real(1.0);
    let mut e31 = CMatrix::zeros(3, 3);
    e31[(2, 0)] = real(1.0);
    let dev = max_abs(&(m.tuple.get(0) - &e21)).max(max_abs(&(m.tuple.get(1) - &e31)));
    ck.expect(dev <= 1e-12, || format!("model differs from (E21, E31) by {dev:e}"));
    let target = CMatrix::from_diagonal(&CVector::from_vec(vec![real(0.0), real(1.0), real(1.0)]));
    let row = max_abs(&(m.tuple.row_sum() - target));
    ck.expect(row <= 1e-12, || format!("sum N N* differs from diag(0,1,1) by {row:e}"));
    let ann = m.tuple.annihilator_slice(2)?;
    let ideal = monomial_ideal(2, &gens, 2)?;
    let same = ann.slice_contained_in(&ideal)? && ideal.slice_contained_in(&ann)?;
    ck.expect(same, || "annihilator slice at degree 2 differs from span{x1^2, x1x2, x2^2}".into());
    ck.note(format!("entry deviation {dev:.1e}"));
    Ok(())
}

fn criterion_2(ck: &mut Check) -> Outcome {
    let eps = [0.1, 0.01, 0.001];
    let r = example_one_variable(&[c64(0.5, 0.0)], &eps)?;
    report_rows(ck, &r);
    for e in eps {
        match r.find("min cond", e) {
            Some(row) => {
                ck.expect((row.measured * e - 1.0).abs() <= 0.01, || format!("min cond {} at eps {e}", row.measured));
                ck.note(format!("eps {e}: {:.6}", row.measured));
            }
            None => ck.failures.push(format!("no condition row for eps {e}")),
        }
    }
    Ok(())
}

fn criterion_3(ck: &mut Check) -> Outcome {
    let targets = vec![vec![c64(0.3, 0.1), c64(-0.2, 0.4)], vec![c64(0.0, 0.0), c64(0.5, -0.1)]];
    let r = example_two_variable(&[0.1, 0.01, 0.001, 1.0], &targets, 0)?;
    report_rows(ck, &r);
    for e in [0.1, 0.01, 0.001] {
        for q in ["nullspace dimension", "form residual", "determinant identity", "min cond vs lower bound"] {
            ck.expect(r.find(q, e).is_some(), || format!("missing {q} at eps {e}"));
        }
        if let Some(row) = r.find("min cond vs lower bound", e) {
            ck.note(format!("eps {e}: cond {:.4} >= {:.4}", row.measured, row.formula));
        }
    }
    ck.expect(r.find("f(1) golden ratio", 1.0).is_some_and(|row| row.pass), || "f(1) check missing".into());
    ck.expect(r.find("f limit sqrt(2)", 0.001).is_some_and(|row| row.pass), || "f(0.001) check missing".into());
    Ok(())
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> arveson_core::Result<CMatrix> {
    let a = CMatrix::from_fn(n, n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Ok(schur(&a)?.0)
}

fn block_ideals(d: usize) -> Vec<Vec<MultiIndex>> {
    match d {
        1 => vec![vec![mi(&[1])], vec![mi(&[2])], vec![mi(&[3])]],
        2 => vec![
            vec![mi(&[1, 0]), mi(&[0, 1])],
            vec![mi(&[2, 0]), mi(&[0, 1])],
            vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])],
            vec![mi(&[3, 0]), mi(&[1, 1]), mi(&[0, 2])],
            vec![mi(&[2, 0]), mi(&[0, 2])],
        ],
        _ => vec![
            vec![mi(&[1, 0, 0]), mi(&[0, 1, 0]), mi(&[0, 0, 1])],
            vec![mi(&[2, 0, 0]), mi(&[0, 1, 0]), mi(&[0, 0, 1])],
            vec![mi(&[2, 0, 0]), mi(&[1, 1, 0]), mi(&[0, 2, 0]), mi(&[0, 0, 1])],
            vec![mi(&[2, 0, 0]), mi(&[0, 2, 0]), mi(&[0, 0, 2]), mi(&[1, 1, 1])],
            enumerate(3, 2).into_iter().filter(|a| a.degree() == 2).collect(),
        ],
    }
}

fn criterion_4(ck: &mut Check) -> Outcome {
    let mut worst_point = 0.0f64;
    let mut worst_residual = 0.0f64;
    let mut worst_cond = 0.0f64;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let d = 1 + (seed % 3) as usize;
        let choices = block_ideals(d);
        let mut blocks: Vec<(Vec<C64>, f64, Vec<MultiIndex>)> = Vec::new();
        let mut size = 0;
        let k = rng.random_range(1..=4);
        while blocks.len() < k {
            let gens = choices[rng.random_range(0..choices.len())].clone();
            let m = monomial_model(&gens, d)?.size();
            if size + m > 30 {
                break;
            }
            let z: Vec<C64> = (0..d)
                .map(|_| C64::from_polar(rng.random_range(0.0..0.7 / (d as f64).sqrt()), rng.random_range(0.0..6.3)))
                .collect();
            let far = blocks
                .iter()
                .all(|(w, _, _)| z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() >= 0.1);
            if !far {
                continue;
            }
            size += m;
            blocks.push((z, rng.random_range(0.3..1.0), gens));
        }
        let locals: Vec<CommutingTuple> = blocks
            .iter()
            .map(|(z, s, gens)| {
                let model = monomial_model(gens, d)?;
                let n = model.size();
                let mats = model
                    .tuple
                    .matrices()
                    .iter()
                    .zip(z)
                    .map(|(zj, &p)| CMatrix::identity(n, n) * p + zj * real(*s))
                    .collect();
                CommutingTuple::new(mats, COMMUTE_TOL)
            })
            .collect::<arveson_core::Result<_>>()?;
        let kappa_g: f64 = rng.random_range(1.0..10.0);
        let u = random_unitary(&mut rng, size)?;
        let v = random_unitary(&mut rng, size)?;
        let sigma = CVector::from_iterator(size, (0..size).map(|_| real(kappa_g.powf(rng.random_range(0.0..1.0)))));
        let g = u * CMatrix::from_diagonal(&sigma) * v;
        let g_inv = inverse(&g)?;
        let mats: Vec<CMatrix> = (0..d)
            .map(|j| &g * direct_sum(&locals.iter().map(|b| b.get(j).clone()).collect::<Vec<_>>()) * &g_inv)
            .collect();
        let t = CommutingTuple::new(mats, 1e-8)?;
        let dec = jordan_decompose(&t, &SpectralOptions { seed, ..SpectralOptions::default() })?;
        worst_cond = worst_cond.max(dec.cond);
        ck.expect(dec.blocks.len() == blocks.len(), || {
            format!("seed {seed}: {} clusters for {} blocks", dec.blocks.len(), blocks.len())
        });
        if dec.blocks.len() != blocks.len() {
            continue;
        }
        for (i, b) in dec.blocks.iter().enumerate() {
            let (idx, err) = blocks
                .iter()
                .enumerate()
                .map(|(i, (z, _, _))| (i, z.iter().zip(&b.point).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt()))
                .fold((0, f64::INFINITY), |a, x| if x.1 < a.1 { x } else { a });
            worst_point = worst_point.max(err);
            ck.expect(err <= 1e-8, || format!("seed {seed}: joint eigenvalue error {err:e}"));
            ck.expect(b.dim == locals[idx].size(), || format!("seed {seed}: block dimension {} vs {}", b.dim, locals[idx].size()));
            let degree = blocks[idx].2.iter().map(MultiIndex::degree).max().unwrap_or(1);
            let got = CommutingTuple::new(dec.block_matrices(i), 1e-8)?.annihilator_slice(degree)?;
            let want = locals[idx].annihilator_slice(degree)?;
            let same = got.slice_contained_in(&want)? && want.slice_contained_in(&got)?;
            ck.expect(same, || format!("seed {seed}: local annihilator of block {i} differs"));
        }
        let recovered: Vec<CMatrix> = (0..d)
            .map(|j| {
                direct_sum(&(0..dec.blocks.len()).map(|i| dec.block_matrices(i)[j].clone()).collect::<Vec<_>>())
            })
            .collect();
        for (j, tj) in t.matrices().iter().enumerate() {
            let r = operator_norm(&(&dec.x * tj * &dec.x_inv - &recovered[j])) / operator_norm(tj);
            worst_residual = worst_residual.max(r);
            ck.expect(r <= 1e-7, || format!("seed {seed}: residual {r:e}"));
        }
    }
    ck.note(format!(
        "max eigenvalue error {worst_point:.1e}, max relative residual {worst_residual:.1e}, max cond(X) {worst_cond:.1}"
    ));
    Ok(())
}

fn criterion_5(ck: &mut Check) -> Outcome {
    let mut models = 0;
    let mut worst_eps = 0.0f64;
    let mut worst_gamma = 0.0f64;
    let mut worst_x = 0.0f64;
    for d in 1..=3 {
        for gens in monomial_ideals(d, 3) {
            let m = monomial_model(&gens, d)?;
            let cert = build_similarity(&m.tuple, &m.cyclic_vector, &gens)?;
            let hyp = &cert.hypotheses;
            let gamma_err = hyp.gamma.map_or(f64::INFINITY, |g| (g - 1.0).abs());
            worst_eps = worst_eps.max(hyp.epsilon);
            worst_gamma = worst_gamma.max(gamma_err);
            let dx = max_abs(&(&cert.x - CMatrix::identity(m.size(), m.size())));
            worst_x = worst_x.max(dx);
            ck.expect(hyp.epsilon <= 1e-12 && gamma_err <= 1e-9 && dx <= 1e-12, || {
                format!("model {gens:?}: eps {:e}, gamma error {gamma_err:e}, |X - I| {dx:e}", hyp.epsilon)
            });
            models += 1;
        }
    }
    ck.note(format!("{models} monomial models: eps <= {worst_eps:.0e}, |gamma-1| <= {worst_gamma:.0e}, |X-I| <= {worst_x:.0e}"));

    // Admissible inputs: 0.9-scaled models and conjugated models.
    let mut inputs: Vec<(String, CommutingTuple, CVector, Vec<MultiIndex>)> = Vec::new();
    for gens in [
        vec![mi(&[2])],
        vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])],
        enumerate(3, 2).into_iter().filter(|a| a.degree() == 2).collect(),
    ] {
        let d = gens[0].dim();
        let m = monomial_model(&gens, d)?;
        let scaled = CommutingTuple::new(m.tuple.matrices().iter().map(|z| z * real(0.9)).collect(), COMMUTE_TOL)?;
        inputs.push((format!("0.9 x model {gens:?}"), scaled, m.cyclic_vector.clone(), gens));
    }
    let families: Vec<(Vec<MultiIndex>, usize)> = vec![
        (vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])], 2),
        (vec![mi(&[3])], 1),
        (vec![mi(&[2, 0]), mi(&[0, 2])], 2),
        (vec![mi(&[2, 0, 0]), mi(&[0, 1, 0]), mi(&[0, 0, 1])], 3),
    ];
    let mut seed = 0u64;
    while inputs.len() < 20 {
        let (gens, d) = &families[seed as usize % families.len()];
        let (n, xi) = perturbed_model(gens, *d, 0.02, seed)?;
        if check_hypotheses(&n, &xi)?.admissible {
            inputs.push((format!("perturbed {gens:?} seed {seed}"), n, xi, gens.clone()));
        }
        seed += 1;
    }
    let mut stated_failures = Vec::new();
    let mut min_slack = f64::INFINITY;
    let total = inputs.len() + 3;
    for (name, n, xi, gens) in &inputs {
        let cert = build_similarity(n, xi, gens)?;
        let slack_x = cert.bound_x.map_or(f64::NEG_INFINITY, |b| b - cert.norm_x);
        let slack_inv = cert.bound_x_inv - cert.norm_x_inv;
        min_slack = min_slack.min(slack_x).min(slack_inv);
        ck.expect(slack_x >= 0.0 && slack_inv >= 0.0, || format!("{name}: slacks {slack_x:e}, {slack_inv:e}"));
        let nec = necessity_check(n, xi, &cert.x, gens)?;
        ck.expect(nec.pass_weights && nec.pass_gauge, || format!("{name}: necessity check failed"));
        if !nec.pass_stated {
            stated_failures.push(name.clone());
        }
    }
    ck.note(format!("20 admissible inputs: min bound slack {min_slack:.3e}"));

    for t in [0.1, 0.2, 0.3] {
        let r = example_pair(t);
        let xi = CVector::from_vec(vec![real(1.0), real(0.0), real(0.0)]);
        let gens = vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])];
        let hyp = check_hypotheses(&r, &xi)?;
        if !hyp.admissible {
            ck.unattainable.push(format!(
                "R({t}) is not admissible: eps*card(Xi) = {:.3} >= 1, so the bound on |X| is undefined",
                hyp.epsilon_card()
            ));
        }
        let cert = build_intertwiner(&r, &xi, &gens)?;
        ck.expect(cert.pass_x_inv, || format!("R({t}): |X^-1| = {} > {}", cert.norm_x_inv, cert.bound_x_inv));
        let nec = necessity_check(&r, &xi, &cert.x, &gens)?;
        ck.expect(nec.pass_weights && nec.pass_gauge, || format!("R({t}): necessity check failed"));
        if !nec.pass_stated {
            stated_failures.push(format!("R({t})"));
        }
    }
    if !stated_failures.is_empty() {
        ck.unattainable.push(format!(
            "weight bound 1/(|X||X^-1|) as stated fails on {} of {total} certificates (e.g. {}); the proved bound 1/(|X||X^-1|)^2 holds on all",
            stated_failures.len(),
            stated_failures[0]
        ));
    }
    Ok(())
}

fn criterion_6(ck: &mut Check) -> Outcome {
    let pts = vec![vec![real(0.0)], vec![real(0.5)]];
    let sep = separation_constants(&pts)?;
    ck.expect((sep.delta_weak - 0.25).abs() <= 1e-12, || format!("delta_weak {}", sep.delta_weak));
    let carleson = 1.0 + 3f64.sqrt() / 2.0;
    ck.expect((sep.gamma_carleson - carleson).abs() <= 1e-10, || format!("gamma_carleson {}", sep.gamma_carleson));
    let pick = pick_min_norm(&pts, &[real(0.0), real(1.0)])?;
    ck.expect((pick.c_star - 2.0).abs() <= 1e-6, || format!("pick norm {}", pick.c_star));
    let mut conds = Vec::new();
    for r in [0.5, 0.25, 0.1, 0.05, 0.01] {
        let rep = dichotomy_demo(&[vec![real(0.0)], vec![real(r)]], 0, &[], 0)?;
        report_rows(ck, &rep);
        match rep.find("two-point min cond", 2.0) {
            Some(row) => conds.push(row.measured),
            None => ck.failures.push(format!("no condition row at distance {r}")),
        }
    }
    ck.expect(conds.iter().all(|c| c.is_finite()), || "infinite condition number".into());
    ck.expect(conds.windows(2).all(|w| w[1] > w[0]), || format!("condition numbers not increasing: {conds:?}"));
    ck.note(format!("min cond at distances 0.5..0.01: {}", conds.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join(", ")));
    Ok(())
}

fn random_contraction(rng: &mut ChaCha8Rng, nilpotent: bool) -> arveson_core::Result<(CommutingTuple, CVector)> {
    loop {
        let d = rng.random_range(1..=if nilpotent { 3 } else { 2 });
        let model = if nilpotent {
            let k = rng.random_range(2..=3);
            let zero = vec![real(0.0); d];
            let extra: Vec<Polynomial> = (0..rng.random_range(0..=2))
                .map(|_| {
                    Polynomial::from_terms(
                        d,
                        enumerate(d, k - 1)
                            .into_iter()
                            .filter(|a| a.degree() == k - 1)
                            .map(|a| (a, c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect::<arveson_core::Result<_>>()?;
            jet_model(&[zero.clone()], &[local_ideal(&zero, k, extra, 4)?], None)
        } else {
            let count = rng.random_range(1..=3);
            let pts: Vec<Vec<C64>> = (0..count)
                .map(|_| (0..d).map(|_| C64::from_polar(rng.random_range(0.0..0.6 / (d as f64).sqrt()), rng.random_range(0.0..6.3))).collect())
                .collect();
            let ideals = pts
                .iter()
                .map(|z| local_ideal(z, rng.random_range(1..=2), Vec::new(), 4))
                .collect::<arveson_core::Result<Vec<_>>>()?;
            jet_model(&pts, &ideals, None)
        };
        let Ok(model) = model else { continue };
        let r = rng.random_range(0.5..1.0);
        let t = CommutingTuple::new(model.tuple.matrices().iter().map(|m| m * real(r)).collect(), COMMUTE_TOL)?;
        let xi = model.cyclic_vector.unscale(model.cyclic_vector.norm());
        return Ok((t, xi));
    }
}

fn criterion_7(ck: &mut Check) -> Outcome {
    let mut pairs = 0;
    let mut levels = 0;
    let mut sandwiches = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let (t, xi) = random_contraction(&mut rng, seed % 2 == 1)?;
        let eps = [0.05, 0.2, 0.5, 0.9][(seed % 4) as usize];
        let rep = lemma_checks(&t, &xi, eps, 3, seed)?;
        pairs += rep.pairs_tested;
        levels += rep.levels_tested.len();
        ck.expect(rep.pair_pass, || format!("seed {seed}: pair inequality slack {:e}", rep.pair_worst_slack));
        ck.expect(rep.level_pass, || format!("seed {seed}: same-length estimate slack {:e}", rep.level_worst_slack));
        if let Some(s) = &rep.sandwich {
            sandwiches += 1;
            ck.expect(s.pass, || format!("seed {seed}: two-sided estimate {s:?}"));
        }
    }
    ck.expect(sandwiches > 0, || "two-sided estimate never evaluated".into());
    let mut worst = 0.0f64;
    let mut gauged = 0;
    for d in 1..=3 {
        for gens in monomial_ideals(d, 3) {
            let m = monomial_model(&gens, d)?;
            for k in 0..8 {
                let t = std::f64::consts::TAU * k as f64 / 8.0;
                let w = gauge_unitary(&m, t)?;
                for z in m.tuple.matrices() {
                    worst = worst.max(max_abs(&(&w * z * w.adjoint() - z * C64::from_polar(1.0, t))));
                }
            }
            gauged += 1;
        }
    }
    ck.expect(worst <= 1e-14, || format!("gauge identity defect {worst:e}"));
    ck.note(format!(
        "200 contractions: {pairs} pairs, {levels} levels, {sandwiches} two-sided checks; gauge defect {worst:.0e} on {gauged} models"
    ));
    Ok(())
}

fn criterion_8(ck: &mut Check) -> Outcome {
    let x2x1 = Polynomial::from_terms(1, vec![(mi(&[3]), real(1.0)), (mi(&[2]), real(-1.0))])?;
    let ideal = PolyIdeal::from_generators(1, vec![x2x1], 6)?;
    let at0 = ideal.localize(&[real(0.0)], 3)?;
    let m0 = maximal_ideal_power(&[real(0.0)], 2, 6)?.localize(&[real(0.0)], 3)?;
    let d0 = subspace_distance(at0.basis(), m0.basis());
    ck.expect(at0.dim() == m0.dim() && d0 <= 1e-10, || format!("localization at 0 differs from m_0^2 ({d0:e})"));
    let at1 = ideal.localize(&[real(1.0)], 3)?;
    let m1 = maximal_ideal_power(&[real(1.0)], 1, 6)?.localize(&[real(1.0)], 3)?;
    let d1 = subspace_distance(at1.basis(), m1.basis());
    ck.expect(at1.dim() == m1.dim() && d1 <= 1e-10, || format!("localization at 1 differs from m_1 ({d1:e})"));

    let z = vec![c64(0.3, 0.1), c64(-0.2, 0.2)];
    let x1 = Polynomial::shifted_variable(2, 0, z[0]);
    let tangential = local_ideal(&z, 2, vec![x1], 4)?;
    let w = vec![c64(-0.4, 0.0), c64(0.1, -0.3)];
    let other = local_ideal(&w, 1, Vec::new(), 4)?;
    let pts = vec![z, w];
    let ideals = vec![tangential, other];
    let model = jet_model(&pts, &ideals, None)?;
    let checks = verify_localizations(&model, &pts, &ideals)?;
    ck.expect(checks.iter().all(|c| c.pass), || format!("localization checks failed: {checks:?}"));
    ck.note(format!("two-point model of dimension {}; jet-space distances {d0:.0e}, {d1:.0e}", model.size()));
    Ok(())
}

fn main() {
    type Criterion = fn(&mut Check) -> Outcome;
    let criteria: [(usize, &str, u64, Criterion); 8] = [
        (1, "model identity", 1, criterion_1),
        (2, "one-variable obstruction", 5, criterion_2),
        (3, "two-variable obstruction", 10, criterion_3),
        (4, "Jordan round trip", 30, criterion_4),
        (5, "similarity certificates", 20, criterion_5),
        (6, "interpolation constants", 5, criterion_6),
        (7, "lemma property suite", 30, criterion_7),
        (8, "localization oracle", 2, criterion_8),
    ];
    let mut ok = true;
    for (id, title, limit, f) in criteria {
        let mut ck = Check::default();
        let start = Instant::now();
        if let Err(e) = f(&mut ck) {
            ck.failures.push(format!("error: {e}"));
        }
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(limit) {
            ck.failures.push(format!("runtime {:.2}s exceeds {limit}s", elapsed.as_secs_f64()));
        }
        let pass = ck.failures.is_empty() && ck.unattainable.is_empty();
        println!(
            "criterion {id} ({title}): {} [{:.2}s / {limit}s]{}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if ck.notes.is_empty() { String::new() } else { format!(" {}", ck.notes.join("; ")) }
        );
        for f in &ck.failures {
            println!("    failure: {f}");
        }
        for u in &ck.unattainable {
            println!("    unattainable: {u}");
        }
        if !ck.failures.is_empty() || (!ck.unattainable.is_empty() && !KNOWN_UNATTAINABLE.contains(&id)) {
            ok = false;
        }
    }
    if !ok {
        std::process::exit(1);
    }
}
