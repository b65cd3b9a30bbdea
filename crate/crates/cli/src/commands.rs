use std::path::Path;

use arveson_core::interp::{pick_min_norm, separation_report, sign_pattern_constant, PointsJson};
use arveson_core::models::{jet_model, monomial_generators, monomial_model, verify_localizations};
use arveson_core::multiindex::MultiIndex;
use arveson_core::nilsim::{
    build_intertwiner_with_grid, build_similarity_with_grid, lemma_checks, necessity_check,
};
use arveson_core::numerics::{c64, C64};
use arveson_core::polyideal::{IdealJson, PolyIdeal};
use arveson_core::repro::{dichotomy_demo, example_one_variable, example_two_variable, ReproReport};
use arveson_core::spectral::{jordan_decompose, SpectralOptions, DEFAULT_CLUSTER_TOL};
use arveson_core::tuples::{CommutingTuple, TupleJson, KERNEL_TOL};
use arveson_core::Error;
use serde::{Deserialize, Serialize};

use crate::report::{read_json, to_value, Fail, Outcome, Tolerances};
use crate::Common;

pub fn tolerances(c: &Common) -> Tolerances {
    Tolerances {
        tol: c.tol,
        cluster_tol: DEFAULT_CLUSTER_TOL,
        rank_tol: KERNEL_TOL,
        degree: None,
        grid: None,
    }
}

fn spectral_options(c: &Common) -> SpectralOptions {
    SpectralOptions {
        cluster_tol: DEFAULT_CLUSTER_TOL,
        seed: c.seed,
    }
}

fn read_tuple(path: &Path) -> Result<(CommutingTuple, Option<arveson_core::numerics::CVector>), Fail> {
    Ok(read_json::<TupleJson>(path)?.into_tuple()?)
}

fn read_points(path: &Path) -> Result<Vec<Vec<C64>>, Fail> {
    let p: PointsJson = read_json(path)?;
    p.validate()?;
    Ok(p.points)
}

fn read_points_in(path: &Path, d: usize) -> Result<Vec<Vec<C64>>, Fail> {
    let p = read_points(path)?;
    if p[0].len() != d {
        return Err(Fail::Input(format!("{}: field `d`: expected {d}, got {}", path.display(), p[0].len())));
    }
    Ok(p)
}

#[derive(Serialize)]
struct CyclicSummary {
    rank: usize,
    dim: usize,
    cyclic: bool,
    layer_dims: Vec<usize>,
    direct: bool,
}

#[derive(Serialize)]
struct TupleSummary {
    d: usize,
    size: usize,
    commutator_defect: f64,
    commuting: bool,
    row_defect: f64,
    row_norm: f64,
    row_contraction: bool,
    cyclic_vector: Option<CyclicSummary>,
}

pub fn tuple_check(path: &Path, c: &Common) -> Result<Outcome, Fail> {
    let (t, xi) = read_tuple(path)?;
    let commuting = t.require_commuting(c.tol);
    let cyclic_vector = match (&xi, &commuting) {
        (Some(v), Ok(())) => {
            let k = t.krylov(v, t.size())?;
            Some(CyclicSummary {
                rank: k.basis.ncols(),
                dim: t.size(),
                cyclic: k.is_cyclic,
                layer_dims: k.layer_dims,
                direct: k.direct,
            })
        }
        _ => None,
    };
    let summary = TupleSummary {
        d: t.d(),
        size: t.size(),
        commutator_defect: t.commutator_defect(),
        commuting: commuting.is_ok(),
        row_defect: t.row_defect(),
        row_norm: t.row_norm(),
        row_contraction: t.is_row_contraction(c.tol),
        cyclic_vector,
    };
    Outcome::checked(&summary, commuting.err().map(Fail::from))
}

#[derive(Serialize)]
struct AnnihilatorSummary {
    degree_bound: usize,
    slice_dim: usize,
    ideal: IdealJson,
    monomial_generators: Option<Vec<MultiIndex>>,
}

pub fn tuple_ann(path: &Path, deg: Option<usize>, c: &Common, tol: &mut Tolerances) -> Result<Outcome, Fail> {
    let (t, _) = read_tuple(path)?;
    t.require_commuting(c.tol)?;
    let degree = deg.unwrap_or(2 * t.size());
    tol.degree = Some(degree);
    let ann = t.annihilator_slice(degree)?;
    Outcome::ok(&AnnihilatorSummary {
        degree_bound: degree,
        slice_dim: ann.slice_dim(),
        ideal: IdealJson::from(&ann),
        monomial_generators: monomial_generators(&ann).ok(),
    })
}

pub fn jordan(path: &Path, c: &Common) -> Result<Outcome, Fail> {
    let (t, _) = read_tuple(path)?;
    t.require_commuting(c.tol)?;
    let dec = jordan_decompose(&t, &spectral_options(c))?;
    let ch = dec.checks;
    let failure = (!(ch.residual && ch.nilpotent && ch.idempotents)).then(|| {
        Fail::Numerical(format!(
            "decomposition checks failed (residual {}, nilpotent {}, idempotents {})",
            ch.residual, ch.nilpotent, ch.idempotents
        ))
    });
    Outcome::checked(&dec, failure)
}

fn model_failure(t: &CommutingTuple, tol: f64) -> Option<Fail> {
    if let Err(e) = t.require_commuting(tol) {
        return Some(e.into());
    }
    t.require_row_contraction(tol).err().map(Fail::from)
}

pub fn model_monomial(path: &Path, c: &Common) -> Result<Outcome, Fail> {
    let ideal = PolyIdeal::try_from(read_json::<IdealJson>(path)?)?;
    let gens = monomial_generators(&ideal)?;
    let model = monomial_model(&gens, ideal.d())?;
    let failure = model_failure(&model.tuple, c.tol);
    Outcome::checked(&model.report(&spectral_options(c), None)?, failure)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JetJson {
    d: usize,
    #[serde(with = "arveson_core::numerics::json::points")]
    points: Vec<Vec<C64>>,
    ideals: Vec<IdealJson>,
    #[serde(default)]
    truncation_degree: Option<usize>,
}

pub fn model_jet(path: &Path, deg: Option<usize>, c: &Common, tol: &mut Tolerances) -> Result<Outcome, Fail> {
    let j: JetJson = read_json(path)?;
    if j.points.len() != j.ideals.len() {
        return Err(Fail::Input(format!(
            "{}: field `ideals`: {} ideals for {} points",
            path.display(),
            j.ideals.len(),
            j.points.len()
        )));
    }
    if let Some(i) = j.points.iter().position(|p| p.len() != j.d) {
        return Err(Fail::Input(format!("{}: field `points[{i}]`: expected {} coordinates", path.display(), j.d)));
    }
    let ideals = j.ideals.into_iter().map(PolyIdeal::try_from).collect::<Result<Vec<_>, Error>>()?;
    let degree = deg.or(j.truncation_degree);
    tol.degree = degree;
    let model = jet_model(&j.points, &ideals, degree)?;
    let checks = verify_localizations(&model, &j.points, &ideals)?;
    let failure = match checks.iter().find(|c| !c.pass) {
        Some(bad) => Some(Fail::Validation(format!(
            "localization mismatch at point {}: {}",
            bad.point,
            bad.detail.clone().unwrap_or_default()
        ))),
        None => model_failure(&model.tuple, c.tol),
    };
    Outcome::checked(&model.report(&spectral_options(c), Some(checks))?, failure)
}

#[derive(Serialize)]
struct InterpSummary {
    #[serde(flatten)]
    separation: arveson_core::interp::SeparationReport,
    /// Largest Pick norm over sign patterns, when at most 16 points.
    sign_pattern_constant: Option<f64>,
    /// `min eps_n >= 1 / sign_pattern_constant`.
    strong_bound_pass: Option<bool>,
}

pub fn interp_check(path: &Path) -> Result<Outcome, Fail> {
    let points = read_points(path)?;
    let separation = separation_report(&points)?;
    let constant = if points.len() <= 16 { Some(sign_pattern_constant(&points)?) } else { None };
    let pass = match (constant, separation.strong_min) {
        (Some(k), Some(e)) => Some(e >= 1.0 / k - 1e-8),
        _ => None,
    };
    let failure = (pass == Some(false)).then(|| Fail::Numerical("strong separation below the sign-pattern bound".into()));
    Outcome::checked(
        &InterpSummary {
            separation,
            sign_pattern_constant: constant,
            strong_bound_pass: pass,
        },
        failure,
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PickJson {
    d: usize,
    #[serde(with = "arveson_core::numerics::json::points")]
    points: Vec<Vec<C64>>,
    targets: Vec<[f64; 2]>,
}

pub fn pick(path: &Path) -> Result<Outcome, Fail> {
    let j: PickJson = read_json(path)?;
    PointsJson {
        d: j.d,
        points: j.points.clone(),
    }
    .validate()?;
    let targets: Vec<C64> = j.targets.iter().map(|&[re, im]| c64(re, im)).collect();
    Outcome::ok(&pick_min_norm(&j.points, &targets)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NilsimJson {
    tuple: TupleJson,
    #[serde(default)]
    generators: Option<Vec<MultiIndex>>,
}

#[derive(Serialize)]
struct NilsimSummary {
    generators: Vec<MultiIndex>,
    generator_source: &'static str,
    certificate: arveson_core::nilsim::SimilarityCertificate,
    necessity: arveson_core::nilsim::NecessityReport,
    lemmas: arveson_core::nilsim::LemmaReport,
}

pub fn nilsim(path: &Path, deg: Option<usize>, grid: usize, c: &Common, tol: &mut Tolerances) -> Result<Outcome, Fail> {
    if grid == 0 {
        return Err(Fail::Input("--grid must be positive".into()));
    }
    let j: NilsimJson = read_json(path)?;
    let (t, xi) = j.tuple.into_tuple()?;
    let xi = xi.ok_or_else(|| Fail::Input(format!("{}: field `tuple.cyclic_vector` is required", path.display())))?;
    t.require_commuting(c.tol)?;
    let (gens, source) = match j.generators {
        Some(g) => (g, "input"),
        None => {
            let degree = deg.unwrap_or(2 * t.size());
            tol.degree = Some(degree);
            (monomial_generators(&t.annihilator_slice(degree)?)?, "annihilator")
        }
    };
    let (certificate, mut failure) = match build_similarity_with_grid(&t, &xi, &gens, grid) {
        Ok(cert) => (cert, None),
        Err(e @ (Error::Inadmissible { .. } | Error::GaugeUnverified)) => {
            (build_intertwiner_with_grid(&t, &xi, &gens, grid)?, Some(Fail::from(e)))
        }
        Err(e) => return Err(e.into()),
    };
    let necessity = necessity_check(&t, &xi, &certificate.x, &gens)?;
    let h = &certificate.hypotheses;
    let lemmas = lemma_checks(&t, &xi, h.epsilon, h.top_degree, c.seed)?;
    if failure.is_none() {
        if certificate.pass_x == Some(false) || !certificate.pass_x_inv {
            failure = Some(Fail::Numerical("similarity bound violated".into()));
        } else if !(necessity.pass_weights && necessity.pass_gauge) {
            failure = Some(Fail::Numerical("necessary conditions violated".into()));
        }
    }
    Outcome::checked(
        &NilsimSummary {
            generators: gens,
            generator_source: source,
            certificate,
            necessity,
            lemmas,
        },
        failure,
    )
}

fn repro_outcome(r: ReproReport) -> Result<Outcome, Fail> {
    let failure = (!r.pass).then(|| {
        let bad: Vec<String> = r
            .rows
            .iter()
            .filter(|row| !row.pass)
            .map(|row| format!("{} at {}", row.quantity, row.parameter))
            .collect();
        Fail::Validation(format!("rows off their formula values: {}", bad.join(", ")))
    });
    Ok(Outcome {
        result: Some(to_value(&r)?),
        failure,
        table: Some(r.table()),
    })
}

pub fn repro_one_variable(path: Option<&Path>, eps: &[f64]) -> Result<Outcome, Fail> {
    let lambdas: Vec<C64> = match path {
        Some(p) => read_points_in(p, 1)?.into_iter().map(|z| z[0]).collect(),
        None => vec![c64(0.5, 0.0)],
    };
    repro_outcome(example_one_variable(&lambdas, eps)?)
}

pub fn repro_two_variable(path: Option<&Path>, eps: &[f64], c: &Common) -> Result<Outcome, Fail> {
    let targets = match path {
        Some(p) => read_points_in(p, 2)?,
        None => vec![vec![c64(0.0, 0.0), c64(0.0, 0.0)]],
    };
    repro_outcome(example_two_variable(eps, &targets, c.seed)?)
}

pub fn dichotomy(path: &Path, kappa: usize, eps: &[f64], c: &Common) -> Result<Outcome, Fail> {
    let points = read_points(path)?;
    repro_outcome(dichotomy_demo(&points, kappa, eps, c.seed)?)
}
