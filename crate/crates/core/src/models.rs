//! Model tuples `Z = P_H M_x|_H` on finite-dimensional co-invariant
//! subspaces `H` of the Drury-Arveson space.
//!
//! Monomial ideals give exact models on the standard monomials. Finite point
//! sets with local ideals give models on spans of derivative kernels, built
//! in a Fock truncation whose tail is bounded explicitly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fockspace::{check_ball, FockTruncation, TAIL_SQ_TOL};
use crate::multiindex::{enumerate, MultiIndex};
use crate::numerics::{
    condition, gap_nullspace, inv_sqrt, real, CMatrix, CVector, C64,
};
use crate::polyideal::{IdealJson, PolyIdeal, RANK_TOL};
use crate::spectral::{joint_eigenvalues, SpectralOptions};
use crate::tuples::{CommutingTuple, COMMUTE_TOL};

/// Largest accepted condition number of the jet Gram matrix.
pub const GRAM_COND_LIMIT: f64 = 1e12;

/// Tolerance for the row contraction check of a model.
pub const ROW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Monomial {
        generators: Vec<MultiIndex>,
    },
    Jets {
        #[serde(with = "crate::numerics::json::points")]
        points: Vec<Vec<C64>>,
        ideals: Vec<IdealJson>,
        /// Jet order `mu` used at each point (`m_z^mu` lies in the ideal).
        orders: Vec<usize>,
        truncation_degree: usize,
        tail_bound: f64,
        gram_condition: f64,
    },
}

/// One orthonormal basis vector of `H`, described by where it came from.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisElement {
    /// `x^alpha / ||x^alpha||`.
    Monomial { alpha: MultiIndex },
    /// A functional `p -> sum_beta w_beta (d^beta p)(z) / beta!` of the
    /// inverse system at point `point`; the basis is the Gram
    /// orthonormalization of the Riesz representers.
    Jet {
        point: usize,
        #[serde(with = "crate::numerics::json::complex_vec")]
        functional: Vec<C64>,
    },
}

#[derive(Debug, Clone)]
pub struct ModelTuple {
    pub provenance: Provenance,
    pub basis: Vec<BasisElement>,
    pub tuple: CommutingTuple,
    /// `P_H 1` in the orthonormal basis.
    pub cyclic_vector: CVector,
}

/// Exponent vectors of a monomial ideal. Generators that are not single
/// monomials (as extracted from a numerical slice) are accepted when the
/// slice is spanned by the monomials it contains.
pub fn monomial_generators(ideal: &PolyIdeal) -> Result<Vec<MultiIndex>> {
    if ideal.generators().iter().all(|g| g.is_monomial()) {
        return Ok(ideal
            .generators()
            .iter()
            .map(|g| g.terms().next().map(|(a, _)| a.clone()).expect("monomial is non-zero"))
            .collect());
    }
    let mut members = Vec::new();
    for a in ideal.monomial_basis().indices() {
        if ideal.contains(&crate::poly::Polynomial::monomial(a.clone(), real(1.0)))? {
            members.push(a.clone());
        }
    }
    if members.len() != ideal.slice_dim() {
        return Err(Error::NotMonomial(format!(
            "slice of dimension {} contains only {} monomials",
            ideal.slice_dim(),
            members.len()
        )));
    }
    Ok(members
        .iter()
        .filter(|a| !members.iter().any(|b| b != *a && b.divides(a)))
        .cloned()
        .collect())
}

/// Monomials outside the ideal generated by `generators`, graded order.
pub fn standard_monomials(generators: &[MultiIndex], d: usize) -> Result<Vec<MultiIndex>> {
    if let Some(g) = generators.iter().find(|g| g.dim() != d) {
        return Err(Error::Dimension(format!("generator {:?} is not in {d} variables", g.exponents())));
    }
    let mut pure = vec![None::<usize>; d];
    for g in generators {
        if g.degree() == 0 {
            return Err(Error::InvalidInput("the unit ideal has a zero-dimensional model".into()));
        }
        if let Some(j) = g.pure_power_variable() {
            let e = g.degree();
            pure[j] = Some(pure[j].map_or(e, |p| p.min(e)));
        }
    }
    let mut bound = 0;
    for (j, p) in pure.iter().enumerate() {
        match p {
            Some(e) => bound += e - 1,
            None => return Err(Error::InfiniteComplement { variable: j }),
        }
    }
    Ok(enumerate(d, bound)
        .into_iter()
        .filter(|a| !generators.iter().any(|g| g.divides(a)))
        .collect())
}

/// Exact model of a monomial ideal.
pub fn monomial_model(generators: &[MultiIndex], d: usize) -> Result<ModelTuple> {
    let basis = standard_monomials(generators, d)?;
    let n = basis.len();
    let mut mats = vec![CMatrix::zeros(n, n); d];
    for (col, alpha) in basis.iter().enumerate() {
        for (j, m) in mats.iter_mut().enumerate() {
            let next = alpha.add_unit(j);
            if let Some(row) = basis.iter().position(|b| *b == next) {
                let ratio = (f64::from(alpha.exponents()[j] + 1) / (alpha.degree() + 1) as f64).sqrt();
                m[(row, col)] = real(ratio);
            }
        }
    }
    let mut cyclic = CVector::zeros(n);
    cyclic[0] = real(1.0);
    Ok(ModelTuple {
        provenance: Provenance::Monomial {
            generators: generators.to_vec(),
        },
        basis: basis.into_iter().map(|alpha| BasisElement::Monomial { alpha }).collect(),
        tuple: CommutingTuple::new(mats, COMMUTE_TOL)?,
        cyclic_vector: cyclic,
    })
}

/// The gauge unitary `diag(e^{i |alpha| t})` of a monomial model.
pub fn gauge_unitary(model: &ModelTuple, t: f64) -> Result<CMatrix> {
    let mut degrees = Vec::with_capacity(model.basis.len());
    for b in &model.basis {
        match b {
            BasisElement::Monomial { alpha } => degrees.push(alpha.degree()),
            BasisElement::Jet { .. } => {
                return Err(Error::InvalidInput("the gauge needs a monomial model".into()));
            }
        }
    }
    let diag = CVector::from_iterator(
        degrees.len(),
        degrees.iter().map(|&k| C64::from_polar(1.0, k as f64 * t)),
    );
    Ok(CMatrix::from_diagonal(&diag))
}

fn factorial_f64(alpha: &MultiIndex) -> f64 {
    alpha
        .exponents()
        .iter()
        .map(|&a| (1..=a).map(f64::from).product::<f64>())
        .product()
}

/// Model on the span of the inverse systems of local ideals `ideals[i]` at
/// `points[i]`. Each ideal must contain a power of the maximal ideal at its
/// point. `degree` overrides the automatic truncation degree.
pub fn jet_model(points: &[Vec<C64>], ideals: &[PolyIdeal], degree: Option<usize>) -> Result<ModelTuple> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point list".into()));
    }
    if points.len() != ideals.len() {
        return Err(Error::Dimension(format!(
            "{} points but {} local ideals",
            points.len(),
            ideals.len()
        )));
    }
    let d = points[0].len();
    check_ball(points, d)?;
    for (i, z) in points.iter().enumerate() {
        for (j, w) in points.iter().enumerate().skip(i + 1) {
            if z.iter().zip(w).all(|(a, b)| (a - b).norm() <= 1e-12) {
                return Err(Error::DuplicatePoints { first: i, second: j });
            }
        }
    }

    // Inverse system at each point: functionals on jets below order mu that
    // kill the jet image of the ideal.
    let mut orders = Vec::with_capacity(points.len());
    let mut functionals: Vec<(usize, Vec<MultiIndex>, CMatrix)> = Vec::new();
    for (i, (z, ideal)) in points.iter().zip(ideals).enumerate() {
        if ideal.d() != d {
            return Err(Error::Dimension(format!("local ideal {i} is not in {d} variables")));
        }
        let mu = ideal.polynomial_order(z)? + 1;
        let local = ideal.localize(z, mu)?;
        let jets = local.jet_basis().indices().to_vec();
        let dual = if local.dim() == 0 {
            CMatrix::identity(jets.len(), jets.len())
        } else {
            gap_nullspace(&local.basis().transpose(), RANK_TOL, "inverse system")?
        };
        orders.push(mu);
        functionals.push((i, jets, dual));
    }

    let max_order = orders.iter().max().copied().unwrap_or(1) - 1;
    let auto = FockTruncation::degree_for_jets(points, max_order)?;
    let trunc = FockTruncation::new(d, degree.unwrap_or(auto));

    let mut columns = Vec::new();
    let mut basis = Vec::new();
    let mut tail = 0.0f64;
    for (i, jets, dual) in &functionals {
        let z = &points[*i];
        let vectors = jets
            .iter()
            .map(|beta| trunc.jet_vector(z, beta))
            .collect::<Result<Vec<_>>>()?;
        for c in 0..dual.ncols() {
            let mut h = CVector::zeros(trunc.dim());
            let mut t = 0.0;
            for (k, (beta, jv)) in jets.iter().zip(&vectors).enumerate() {
                let w = dual[(k, c)].conj() / factorial_f64(beta);
                if w.norm() == 0.0 {
                    continue;
                }
                h += &jv.coefficients * w;
                t += w.norm() * jv.tail_bound;
            }
            tail = tail.max(t / h.norm().max(f64::MIN_POSITIVE));
            columns.push(h);
            basis.push(BasisElement::Jet {
                point: *i,
                functional: dual.column(c).iter().copied().collect(),
            });
        }
    }
    if tail * tail > TAIL_SQ_TOL {
        return Err(Error::TailBound {
            bound: tail,
            tol: TAIL_SQ_TOL.sqrt(),
        });
    }
    let j = CMatrix::from_columns(&columns);
    let gram = j.adjoint() * &j;
    let (_, _, gram_condition) = condition(&gram)?;
    if !(gram_condition <= GRAM_COND_LIMIT) {
        return Err(Error::IllConditioned {
            what: "jet Gram matrix",
            cond: gram_condition,
        });
    }
    let e = &j * inv_sqrt(&gram)?;
    let mats = (0..d)
        .map(|k| {
            let shifted: Vec<CVector> = e.column_iter().map(|c| trunc.shift_apply(k, &c.into_owned())).collect();
            e.adjoint() * CMatrix::from_columns(&shifted)
        })
        .collect::<Vec<_>>();
    let cyclic = e.row(0).adjoint();
    Ok(ModelTuple {
        provenance: Provenance::Jets {
            points: points.to_vec(),
            ideals: ideals.iter().map(IdealJson::from).collect(),
            orders,
            truncation_degree: trunc.max_degree(),
            tail_bound: tail,
            gram_condition,
        },
        basis,
        tuple: CommutingTuple::new(mats, COMMUTE_TOL)?,
        cyclic_vector: cyclic,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizationCheck {
    pub point: usize,
    pub order: usize,
    pub pass: bool,
    /// Largest residual of a basis jet of one side against the other.
    pub discrepancy: f64,
    pub detail: Option<String>,
}

/// Compare the localization of the model annihilator at each point with the
/// prescribed local ideal.
pub fn verify_localizations(
    model: &ModelTuple,
    points: &[Vec<C64>],
    ideals: &[PolyIdeal],
) -> Result<Vec<LocalizationCheck>> {
    let n = model.tuple.size();
    let mut orders = Vec::with_capacity(points.len());
    for (z, ideal) in points.iter().zip(ideals) {
        orders.push(ideal.polynomial_order(z)? + 1);
    }
    let max_mu = orders.iter().copied().max().unwrap_or(1);
    let ann = model.tuple.annihilator_slice(n + max_mu)?;
    let mut out = Vec::with_capacity(points.len());
    for (i, ((z, ideal), &mu)) in points.iter().zip(ideals).zip(&orders).enumerate() {
        let got = ann.localize(z, mu)?;
        let want = ideal.localize(z, mu)?;
        let residual = |from: &CMatrix, onto: &CMatrix| {
            (0..from.ncols())
                .map(|c| {
                    let v = from.columns(c, 1).into_owned();
                    (c, crate::numerics::projection_residual(&v, onto))
                })
                .fold((0, 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc })
        };
        let (wc, wr) = residual(want.basis(), got.basis());
        let (gc, gr) = residual(got.basis(), want.basis());
        let dims_match = got.dim() == want.dim();
        let pass = dims_match && wr < 1e-6 && gr < 1e-6;
        let detail = (!pass).then(|| {
            if !dims_match {
                format!("jet image dimension {} expected {}", got.dim(), want.dim())
            } else if wr >= gr {
                format!("expected jet basis vector {wc} missing from the model (residual {wr:.3e})")
            } else {
                format!("model jet basis vector {gc} not in the local ideal (residual {gr:.3e})")
            }
        });
        out.push(LocalizationCheck {
            point: i,
            order: mu,
            pass,
            discrepancy: wr.max(gr),
            detail,
        });
    }
    Ok(out)
}

/// Like [`verify_localizations`], failing on the first mismatch.
pub fn require_localizations(model: &ModelTuple, points: &[Vec<C64>], ideals: &[PolyIdeal]) -> Result<()> {
    for c in verify_localizations(model, points, ideals)? {
        if !c.pass {
            return Err(Error::LocalizationMismatch {
                point: c.point,
                detail: c.detail.unwrap_or_default(),
            });
        }
    }
    Ok(())
}

/// A cluster of the model spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    #[serde(with = "crate::numerics::json::complex_vec")]
    pub point: Vec<C64>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub provenance: Provenance,
    pub basis: Vec<BasisElement>,
    pub d: usize,
    pub dim: usize,
    #[serde(with = "crate::numerics::json::cmatrix_vec")]
    pub matrices: Vec<CMatrix>,
    #[serde(with = "crate::numerics::json::complex_vec")]
    pub cyclic_vector: Vec<C64>,
    pub commutator_defect: f64,
    /// `max(0, lambda_max(sum Z_j Z_j^*) - 1)`.
    pub row_defect: f64,
    pub row_contraction: bool,
    pub cyclic: bool,
    pub joint_eigenvalues: Vec<SpectrumEntry>,
    pub localizations: Option<Vec<LocalizationCheck>>,
}

impl ModelTuple {
    pub fn size(&self) -> usize {
        self.tuple.size()
    }

    pub fn is_cyclic(&self) -> Result<bool> {
        Ok(self.tuple.krylov(&self.cyclic_vector, self.size())?.is_cyclic)
    }

    pub fn report(&self, opts: &SpectralOptions, localizations: Option<Vec<LocalizationCheck>>) -> Result<ModelReport> {
        let spectrum = joint_eigenvalues(&self.tuple, opts)?;
        Ok(ModelReport {
            provenance: self.provenance.clone(),
            basis: self.basis.clone(),
            d: self.tuple.d(),
            dim: self.size(),
            matrices: self.tuple.matrices().to_vec(),
            cyclic_vector: self.cyclic_vector.iter().copied().collect(),
            commutator_defect: self.tuple.commutator_defect(),
            row_defect: self.tuple.row_defect(),
            row_contraction: self.tuple.row_defect() <= ROW_TOL,
            cyclic: self.is_cyclic()?,
            joint_eigenvalues: spectrum
                .clusters
                .iter()
                .map(|c| SpectrumEntry {
                    point: c.point.clone(),
                    multiplicity: c.multiplicity,
                })
                .collect(),
            localizations,
        })
    }
}

/// `m_z^{k}` plus the given extra generators, as an ideal with degree bound
/// `degree_bound`; a convenient way to describe local ideals.
pub fn local_ideal(z: &[C64], k: usize, extra: Vec<crate::poly::Polynomial>, degree_bound: usize) -> Result<PolyIdeal> {
    let mut gens = crate::polyideal::maximal_ideal_power(z, k, degree_bound)?.generators().to_vec();
    gens.extend(extra);
    PolyIdeal::from_generators(z.len(), gens, degree_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, frobenius, operator_norm};
    use crate::poly::Polynomial;
    use crate::spectral::jordan_decompose;
    use proptest::prelude::*;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn e(n: usize, i: usize, j: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        m[(i, j)] = real(1.0);
        m
    }

    #[test]
    fn monomial_generators_from_rotated_slice() {
        // (E21, E21 + t E31) is annihilated by exactly the degree-2 monomials.
        let t = 0.2;
        let mut e21 = CMatrix::zeros(3, 3);
        e21[(1, 0)] = c64(1.0, 0.0);
        let mut e31 = CMatrix::zeros(3, 3);
        e31[(2, 0)] = c64(1.0, 0.0);
        let r = CommutingTuple::new(vec![e21.clone(), &e21 + &e31 * c64(t, 0.0)], COMMUTE_TOL).unwrap();
        let ann = r.annihilator_slice(4).unwrap();
        let mut gens = monomial_generators(&ann).unwrap();
        gens.sort();
        let mut want = vec![MultiIndex::new(vec![2, 0]), MultiIndex::new(vec![1, 1]), MultiIndex::new(vec![0, 2])];
        want.sort();
        assert_eq!(gens, want);
        let diag = CommutingTuple::new(
            vec![CMatrix::from_diagonal(&CVector::from_vec(vec![c64(0.1, 0.0), c64(0.2, 0.0)]))],
            COMMUTE_TOL,
        )
        .unwrap();
        let ann = diag.annihilator_slice(3).unwrap();
        assert!(matches!(monomial_generators(&ann), Err(Error::NotMonomial(_))));
    }

    #[test]
    fn one_variable_square() {
        let m = monomial_model(&[mi(&[2])], 1).unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.tuple.get(0), &e(2, 1, 0));
    }

    #[test]
    fn example_64_nilpotent_pair() {
        let m = monomial_model(&[mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])], 2).unwrap();
        assert_eq!(m.size(), 3);
        assert_eq!(m.tuple.get(0), &e(3, 1, 0));
        assert_eq!(m.tuple.get(1), &e(3, 2, 0));
        assert!(m.is_cyclic().unwrap());
    }

    #[test]
    fn maximal_ideal_gives_zero_tuple() {
        let m = monomial_model(&[mi(&[1, 0, 0]), mi(&[0, 1, 0]), mi(&[0, 0, 1])], 3).unwrap();
        assert_eq!(m.size(), 1);
        assert!(m.tuple.matrices().iter().all(|z| z[(0, 0)].norm() == 0.0));
    }

    #[test]
    fn infinite_complement_is_rejected() {
        let err = monomial_model(&[mi(&[2, 0]), mi(&[1, 1])], 2).unwrap_err();
        assert!(matches!(err, Error::InfiniteComplement { variable: 1 }));
    }

    #[test]
    fn gauge_identities() {
        let m = monomial_model(&[mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])], 2).unwrap();
        assert_eq!(gauge_unitary(&m, 0.0).unwrap(), CMatrix::identity(3, 3));
        let t = std::f64::consts::FRAC_PI_3;
        let w = gauge_unitary(&m, t).unwrap();
        for z in m.tuple.matrices() {
            let lhs = &w * z * w.adjoint();
            assert!(frobenius(&(lhs - z * C64::from_polar(1.0, t))) < 1e-15);
        }
        let one = &w * &m.cyclic_vector;
        assert_eq!(one, m.cyclic_vector);
    }

    fn staircase(d: usize, caps: &[u32]) -> Vec<MultiIndex> {
        // Pure powers plus one mixed generator.
        let mut gens: Vec<MultiIndex> = (0..d)
            .map(|j| {
                let mut v = vec![0; d];
                v[j] = caps[j];
                MultiIndex::new(v)
            })
            .collect();
        if d > 1 {
            let mut v = vec![0; d];
            v[0] = 1;
            v[1] = 1;
            gens.push(MultiIndex::new(v));
        }
        gens
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gauge_relation_and_row_contraction(d in 1usize..4, caps in proptest::collection::vec(1u32..4, 3)) {
            let gens = staircase(d, &caps[..d]);
            let m = monomial_model(&gens, d).unwrap();
            prop_assert!(m.tuple.row_defect() <= ROW_TOL);
            let BasisElement::Monomial { .. } = &m.basis[0] else { unreachable!() };
            for b in &m.basis {
                let BasisElement::Monomial { alpha } = b else { unreachable!() };
                let v = m.tuple.monomial(alpha) * &m.cyclic_vector;
                let weight = alpha.multinomial_f64();
                prop_assert!((weight * v.norm_squared() - 1.0).abs() < 1e-12);
            }
            let w = gauge_unitary(&m, 0.7).unwrap();
            for z in m.tuple.matrices() {
                let lhs = &w * z * w.adjoint();
                prop_assert!(frobenius(&(lhs - z * C64::from_polar(1.0, 0.7))) < 1e-14);
            }
        }

        #[test]
        fn model_annihilator_is_the_ideal(d in 1usize..3, caps in proptest::collection::vec(1u32..4, 2)) {
            let gens = staircase(d, &caps[..d]);
            let m = monomial_model(&gens, d).unwrap();
            let degree = caps[..d].iter().map(|&c| c as usize).sum::<usize>() + 1;
            let ideal = PolyIdeal::from_generators(
                d,
                gens.iter().map(|g| Polynomial::monomial(g.clone(), real(1.0))).collect(),
                degree,
            ).unwrap();
            let ann = m.tuple.annihilator_slice(degree).unwrap();
            prop_assert!(ann.slice_contained_in(&ideal).unwrap());
            prop_assert!(ideal.slice_contained_in(&ann).unwrap());
        }
    }

    fn point_ideal(z: &[C64], k: usize) -> PolyIdeal {
        local_ideal(z, k, Vec::new(), k + 2).unwrap()
    }

    #[test]
    fn jet_model_of_origin_is_zero() {
        let z = vec![c64(0.0, 0.0); 2];
        let m = jet_model(&[z.clone()], &[point_ideal(&z, 1)], None).unwrap();
        assert_eq!(m.size(), 1);
        assert!(m.tuple.matrices().iter().all(|x| x[(0, 0)].norm() < 1e-15));
    }

    #[test]
    fn jet_model_of_one_point_is_the_point() {
        let z = vec![c64(0.3, -0.2), c64(0.1, 0.4)];
        let m = jet_model(&[z.clone()], &[point_ideal(&z, 1)], None).unwrap();
        assert_eq!(m.size(), 1);
        for (x, zj) in m.tuple.matrices().iter().zip(&z) {
            assert!((x[(0, 0)] - zj).norm() < 1e-12);
        }
    }

    #[test]
    fn two_point_model_has_the_points_as_spectrum() {
        let pts = vec![vec![c64(0.0, 0.0), c64(0.0, 0.0)], vec![c64(0.5, 0.0), c64(0.0, 0.0)]];
        let ideals: Vec<PolyIdeal> = pts.iter().map(|z| point_ideal(z, 1)).collect();
        let m = jet_model(&pts, &ideals, None).unwrap();
        assert_eq!(m.size(), 2);
        assert!(m.tuple.row_defect() <= ROW_TOL);
        let report = m.report(&SpectralOptions::default(), None).unwrap();
        assert!(report.cyclic);
        assert_eq!(report.joint_eigenvalues.len(), 2);
        for (got, want) in report.joint_eigenvalues.iter().zip(&pts) {
            for (a, b) in got.point.iter().zip(want) {
                assert!((a - b).norm() < 1e-9);
            }
        }
        let checks = verify_localizations(&m, &pts, &ideals).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn square_of_maximal_ideal_localizes_to_itself() {
        let z = vec![c64(0.0, 0.0); 2];
        let ideal = point_ideal(&z, 2);
        let m = jet_model(&[z.clone()], &[ideal.clone()], None).unwrap();
        assert_eq!(m.size(), 3);
        // At the origin the inverse system of m^2 is {1, x1, x2}: the model
        // is the monomial model of Example 6.4 up to a unitary.
        let ann = m.tuple.annihilator_slice(3).unwrap();
        let want = ideal.localize(&z, 2).unwrap();
        assert!(ann.localize(&z, 2).unwrap().same_as(&want));
        require_localizations(&m, &[z], &[ideal]).unwrap();
    }

    #[test]
    fn tangential_local_ideal_is_reproduced() {
        let z = vec![c64(0.3, 0.1), c64(-0.2, 0.2)];
        let x1 = Polynomial::shifted_variable(2, 0, z[0]);
        let ideal = local_ideal(&z, 2, vec![x1], 4).unwrap();
        let w = vec![c64(-0.4, 0.0), c64(0.1, -0.3)];
        let other = point_ideal(&w, 1);
        let pts = vec![z, w];
        let ideals = vec![ideal, other];
        let m = jet_model(&pts, &ideals, None).unwrap();
        assert_eq!(m.size(), 3);
        assert!(m.tuple.row_defect() <= ROW_TOL);
        let checks = verify_localizations(&m, &pts, &ideals).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        // A different local ideal at the first point is not reproduced.
        let x2 = Polynomial::shifted_variable(2, 1, pts[0][1]);
        let wrong = local_ideal(&pts[0], 2, vec![x2], 4).unwrap();
        let err = require_localizations(&m, &pts, &[wrong, ideals[1].clone()]).unwrap_err();
        assert!(matches!(err, Error::LocalizationMismatch { point: 0, .. }));
    }

    #[test]
    fn order_zero_models_are_diagonalizable_with_growing_condition() {
        let mut last = 0.0;
        for r in [0.5, 0.2, 0.05] {
            let pts = vec![vec![c64(0.0, 0.0), c64(0.0, 0.0)], vec![c64(r, 0.0), c64(0.0, 0.0)]];
            let ideals: Vec<PolyIdeal> = pts.iter().map(|z| point_ideal(z, 1)).collect();
            let m = jet_model(&pts, &ideals, None).unwrap();
            let dec = jordan_decompose(&m.tuple, &SpectralOptions::default()).unwrap();
            assert!(dec.blocks.iter().all(|b| b.dim == 1));
            assert!(dec.cond > last);
            last = dec.cond;
            assert!(operator_norm(m.tuple.get(0)) <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn jet_model_rejects_duplicates_and_mismatched_lengths() {
        let z = vec![c64(0.1, 0.0)];
        let i = point_ideal(&z, 1);
        assert!(matches!(
            jet_model(&[z.clone(), z.clone()], &[i.clone(), i.clone()], None),
            Err(Error::DuplicatePoints { .. })
        ));
        assert!(matches!(jet_model(&[z], &[], None), Err(Error::Dimension(_))));
    }
}
