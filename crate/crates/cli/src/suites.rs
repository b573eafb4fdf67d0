//! Verification suites. Every case draws from its own seeded stream, so the
//! results do not depend on the number of worker threads.

use std::collections::BTreeMap;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use nonclassical::bloch::{partial_trace_qubit, partial_trace_qudit};
use nonclassical::geometry::{
    band_extrema_sampled, check_generic, no_circle_check, predicate_agreement, DEFAULT_PLANES,
};
use nonclassical::linalg::{mat3_trace, norm, quad_form, scale3, symmetric_eigen3, Vec3};
use nonclassical::measures::gmin_product;
use nonclassical::samplers::{sample_state, stream_rng, Family, FamilySpec};
use nonclassical::{
    density_from_bloch, distance_direct, distance_quadratic, extremize_closed, extremize_sampled,
    geometric_discord, gmin, min_measure, BlochState, LocalUnitary, Mode, Result, SetLabel,
};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::manifest::CaseResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quadform,
    Theorem1,
    Theorem4,
    Corollaries,
    Theorem2,
    Theorem3,
}

/// The set/mode pairs with closed forms.
pub const PAIRS: [(SetLabel, Mode); 6] = [
    (SetLabel::All, Mode::Max),
    (SetLabel::All, Mode::Min),
    (SetLabel::Traceless, Mode::Max),
    (SetLabel::Traceless, Mode::Min),
    (SetLabel::Cyclic, Mode::Max),
    (SetLabel::Cyclic, Mode::Min),
];

pub const DEFAULT_ORACLE_BUDGET: usize = 20_000;
pub const DEFAULT_BAND_BUDGET: usize = 100_000;
pub const ORACLE_REL_TOL: f64 = 1e-3;
pub const ORACLE_ABS_SLACK: f64 = 1e-9;
pub const QUADFORM_TOL: f64 = 1e-10;
pub const D2_CONSISTENCY_TOL: f64 = 1e-12;
pub const LAGRANGE_TOL: f64 = 1e-9;
pub const BAND_REL_TOL: f64 = 5e-3;
pub const AGREEMENT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub states: usize,
    pub budget: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
}

pub struct SuiteOutcome {
    pub cases: Vec<CaseResult>,
    pub tolerances: BTreeMap<String, f64>,
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    match suite {
        Suite::Quadform => quadform(cfg),
        Suite::Theorem1 => oracle(cfg, &[2]),
        Suite::Theorem4 => oracle(cfg, &[3, 4]),
        Suite::Corollaries => corollaries(cfg),
        Suite::Theorem2 => no_circle(cfg),
        Suite::Theorem3 => band(cfg),
    }
}

fn tolerances(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Runs `f` for case indices `0..n` in parallel and concatenates the records
/// in case order.
fn per_case<F>(n: usize, f: F) -> Result<Vec<CaseResult>>
where
    F: Fn(usize) -> Result<Vec<CaseResult>> + Sync + Send,
{
    let chunks: Vec<Vec<CaseResult>> = (0..n).into_par_iter().map(f).collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn mixed<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<BlochState> {
    sample_state(&FamilySpec::new(Family::Mixed { d, env: None }, 0), rng)
}

/// A random two-qubit state passing the genericity predicate.
pub fn generic_state<R: Rng + ?Sized>(rng: &mut R) -> Result<BlochState> {
    let mut last = None;
    for _ in 0..1_000 {
        let st = mixed(2, rng)?;
        match check_generic(&st) {
            Ok(_) => return Ok(st),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Result<LocalUnitary> {
    let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    nonclassical::construct_unitary(x[0], [x[1], x[2], x[3]])
}

fn pair_label(set: SetLabel, mode: Mode) -> String {
    format!("{}/{}", serde_plain(&set), serde_plain(&mode))
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn quadform(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let tol = cfg.tol.unwrap_or(QUADFORM_TOL);
    let dims = [2usize, 3, 4];
    let cases = per_case(cfg.states * dims.len(), |i| {
        let d = dims[i / cfg.states.max(1)];
        let mut rng = stream_rng(cfg.seed, i as u64);
        let st = mixed(d, &mut rng)?;
        let u = random_unitary(&mut rng)?;
        let direct = distance_direct(&density_from_bloch(&st)?, &u)?;
        let quad = distance_quadratic(&st, &u)?;
        Ok(vec![CaseResult::absolute(
            i, d, "quadform", quad, direct, tol,
        )])
    })?;
    Ok(SuiteOutcome {
        cases,
        tolerances: tolerances(&[("quadform_abs", tol)]),
    })
}

/// Acceptance bracket for a sampled extremum against its closed form.
pub fn oracle_bracket(mode: Mode, closed: f64, rel: f64) -> (f64, f64) {
    match mode {
        Mode::Max => (
            closed * (1.0 - rel) - ORACLE_ABS_SLACK,
            closed + ORACLE_ABS_SLACK,
        ),
        Mode::Min => (
            closed - ORACLE_ABS_SLACK,
            closed * (1.0 + rel) + ORACLE_ABS_SLACK,
        ),
    }
}

/// Closed forms for two qubits written directly in terms of `A = rrᵀ + TTᵀ`
/// without the qudit prefactors.
pub fn two_qubit_closed(st: &BlochState, set: SetLabel, mode: Mode) -> f64 {
    let tt = st.ttt();
    let rr = st.rrt();
    let a: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| rr[i][j] + tt[i][j]));
    let [l1, l2, l3] = symmetric_eigen3(&a).values;
    match (set, mode) {
        (SetLabel::All | SetLabel::Traceless, Mode::Max) => l1 + l2,
        (SetLabel::Traceless, Mode::Min) => l2 + l3,
        (SetLabel::Cyclic, Mode::Max) => {
            let len = norm(&st.r);
            if len > nonclassical::tolerances::TOL_R {
                mat3_trace(&tt) - quad_form(&tt, &scale3(&st.r, 1.0 / len))
            } else {
                mat3_trace(&tt) - symmetric_eigen3(&tt).values[2]
            }
        }
        _ => 0.0,
    }
}

fn oracle(cfg: &SuiteConfig, dims: &[usize]) -> Result<SuiteOutcome> {
    let rel = cfg.tol.unwrap_or(ORACLE_REL_TOL);
    let budget = cfg.budget.unwrap_or(DEFAULT_ORACLE_BUDGET);
    let qudit = dims.iter().any(|&d| d > 2);
    let cases = per_case(cfg.states * dims.len(), |i| {
        let d = dims[i / cfg.states.max(1)];
        let mut rng = stream_rng(cfg.seed, i as u64);
        let st = mixed(d, &mut rng)?;
        let mut out = Vec::new();
        for (set, mode) in PAIRS {
            let closed = extremize_closed(&st, set, mode)?.value;
            let sampled = extremize_sampled(&st, set, mode, budget, &mut rng)?.value;
            out.push(CaseResult::bracket(
                i,
                d,
                pair_label(set, mode),
                sampled,
                closed,
                oracle_bracket(mode, closed, rel),
            ));
            if mode == Mode::Min && set != SetLabel::Traceless {
                out.push(CaseResult::absolute(
                    i,
                    d,
                    format!("{}/exact-zero", pair_label(set, mode)),
                    closed,
                    0.0,
                    0.0,
                ));
            }
        }
        if qudit {
            let two = mixed(2, &mut rng)?;
            for (set, mode) in PAIRS {
                let general = extremize_closed(&two, set, mode)?.value;
                out.push(CaseResult::absolute(
                    i,
                    2,
                    format!("d2-consistency/{}", pair_label(set, mode)),
                    general,
                    two_qubit_closed(&two, set, mode),
                    D2_CONSISTENCY_TOL,
                ));
            }
        }
        Ok(out)
    })?;
    let mut tol = vec![("oracle_rel", rel), ("oracle_abs_slack", ORACLE_ABS_SLACK)];
    if qudit {
        tol.push(("d2_consistency_abs", D2_CONSISTENCY_TOL));
    }
    Ok(SuiteOutcome {
        cases,
        tolerances: tolerances(&tol),
    })
}

/// `Tr ρ²`.
fn purity(rho: &nonclassical::ComplexMatrix) -> f64 {
    rho.trace_product(rho).re
}

fn ball_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let g: Vec3 = std::array::from_fn(|_| rng.sample(StandardNormal));
    scale3(&g, rng.random::<f64>().cbrt() / norm(&g))
}

fn corollaries(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let schmidt_tol = cfg.tol.unwrap_or(1e-9);
    let product_tol = cfg.tol.unwrap_or(1e-10);
    let werner_tol = cfg.tol.unwrap_or(1e-10);
    let bell_tol = cfg.tol.unwrap_or(1e-12);
    let mut cases = per_case(cfg.states, |i| {
        let mut rng = stream_rng(cfg.seed, i as u64);
        let mut out = Vec::new();
        let schmidt = sample_state(
            &FamilySpec::new(Family::PureSchmidt { t: None }, 0),
            &mut rng,
        )?;
        out.push(CaseResult::absolute(
            i,
            2,
            "schmidt/gmin",
            gmin(&schmidt)?,
            2.0,
            schmidt_tol,
        ));

        let (x, y) = (ball_vector(&mut rng), ball_vector(&mut rng));
        let product = sample_state(
            &FamilySpec::new(
                Family::Product {
                    x: Some(x),
                    y: Some(y),
                },
                0,
            ),
            &mut rng,
        )?;
        let g = gmin(&product)?;
        out.push(CaseResult::absolute(
            i,
            2,
            "product/gmin-bloch",
            g,
            gmin_product(&x, &y)?,
            product_tol,
        ));
        let rho = density_from_bloch(&product)?;
        let p1 = purity(&partial_trace_qudit(&rho, 2)?);
        let p2 = purity(&partial_trace_qubit(&rho, 2)?);
        out.push(CaseResult::absolute(
            i,
            2,
            "product/gmin-purity",
            g,
            (4.0 * p1 - 2.0) * (4.0 * p2 - 1.0),
            product_tol,
        ));
        out.push(CaseResult::absolute(
            i,
            2,
            "product/gmin-purity-corrected",
            g,
            (2.0 * p1 - 1.0) * (2.0 * p2),
            product_tol,
        ));
        let unpolarised = sample_state(
            &FamilySpec::new(
                Family::Product {
                    x: Some([0.0; 3]),
                    y: Some(y),
                },
                0,
            ),
            &mut rng,
        )?;
        out.push(CaseResult::absolute(
            i,
            2,
            "product/identity-first",
            gmin(&unpolarised)?,
            0.0,
            0.0,
        ));

        let c: Vec3 = loop {
            let c: Vec3 = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            if sample_state(&FamilySpec::new(Family::BellDiagonal { c }, 0), &mut rng).is_ok() {
                break c;
            }
        };
        let bell = sample_state(&FamilySpec::new(Family::BellDiagonal { c }, 0), &mut rng)?;
        out.push(CaseResult::absolute(
            i,
            2,
            "bell-diagonal/min-gmin",
            min_measure(&bell)?,
            gmin(&bell)?,
            bell_tol,
        ));
        Ok(out)
    })?;
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let w = FamilySpec::new(Family::Werner { p }, 0).sample()?;
        let want = 2.0 * p * p;
        let case = cfg.states + k;
        cases.push(CaseResult::absolute(
            case,
            2,
            "werner/gd",
            geometric_discord(&w)?,
            want,
            werner_tol,
        ));
        cases.push(CaseResult::absolute(
            case,
            2,
            "werner/min",
            min_measure(&w)?,
            want,
            werner_tol,
        ));
        cases.push(CaseResult::absolute(
            case,
            2,
            "werner/gmin",
            gmin(&w)?,
            want,
            werner_tol,
        ));
    }
    Ok(SuiteOutcome {
        cases,
        tolerances: tolerances(&[
            ("schmidt_abs", schmidt_tol),
            ("product_abs", product_tol),
            ("werner_abs", werner_tol),
            ("bell_diagonal_abs", bell_tol),
        ]),
    })
}

fn no_circle(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let tol = cfg.tol.unwrap_or(LAGRANGE_TOL);
    let cases = per_case(cfg.states, |i| {
        let mut rng = stream_rng(cfg.seed, i as u64);
        let st = generic_state(&mut rng)?;
        let rep = no_circle_check(&st, DEFAULT_PLANES, &mut rng)?;
        let dual = rep.passing_planes
            + usize::from(
                rep.stationary.circle_max_attained_at_p && rep.stationary.circle_min_attained_at_g,
            );
        Ok(vec![
            CaseResult::absolute(
                i,
                2,
                "lagrange-residual",
                rep.stationary.max_residual,
                0.0,
                tol,
            ),
            CaseResult::absolute(i, 2, "dual-circles", dual as f64, 0.0, 0.0),
        ])
    })?;
    Ok(SuiteOutcome {
        cases,
        tolerances: tolerances(&[
            ("lagrange_abs", tol),
            ("attainment_abs", nonclassical::geometry::ATTAINMENT_TOL),
        ]),
    })
}

fn band(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let rel = cfg.tol.unwrap_or(BAND_REL_TOL);
    let budget = cfg.budget.unwrap_or(DEFAULT_BAND_BUDGET);
    let cases = per_case(cfg.states, |i| {
        let mut rng = stream_rng(cfg.seed, i as u64);
        let st = generic_state(&mut rng)?;
        let band = band_extrema_sampled(&st, budget, &mut rng)?;
        let c_max = extremize_closed(&st, SetLabel::Cyclic, Mode::Max)?.value;
        let t_min = extremize_closed(&st, SetLabel::Traceless, Mode::Min)?.value;
        let agreement = predicate_agreement(&st, AGREEMENT_SAMPLES, &mut rng)?;
        Ok(vec![
            CaseResult::absolute(i, 2, "band-max", band.max, c_max, rel * c_max),
            CaseResult::absolute(i, 2, "band-min", band.min, t_min, rel * t_min),
            CaseResult::absolute(
                i,
                2,
                "predicate-disagreements",
                agreement.disagreements as f64,
                0.0,
                0.0,
            ),
        ])
    })?;
    Ok(SuiteOutcome {
        cases,
        tolerances: tolerances(&[
            ("band_rel", rel),
            (
                "predicate_margin",
                nonclassical::geometry::PREDICATE_AGREEMENT_TOL,
            ),
        ]),
    })
}
