//! The perturbation distance `D(ρ, U) = ‖ρ − (U⊗I)ρ(U†⊗I)‖²` and its
//! extremization over the unitary sets, both in closed form (through the
//! spectrum of the correlation matrix `A`) and by a sampled search that only
//! ever evaluates the distance on density matrices.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bloch::{density_from_bloch, BlochState};
use crate::error::{Error, Result};
use crate::linalg::{
    dot, mat3_trace, norm, quad_form, scale3, symmetric_eigen3, ComplexMatrix, Mat3, Vec3,
};
use crate::tolerances::{TOL_DISTANCE_FORMS, TOL_R};
use crate::unitary::{conjugate_qubit_side, LocalUnitary, SetContext, SetLabel};

/// Upper bound on hill-climbing rounds after sampling.
pub const REFINE_MAX_ROUNDS: usize = 400;
/// Random tangent directions tried per refinement round.
pub const REFINE_TRIES: usize = 24;
/// Initial (and largest) refinement step on the unit sphere of `(n0, n)`.
pub const REFINE_INITIAL_STEP: f64 = 0.5;
/// Refinement stops once the step falls below this.
pub const REFINE_MIN_STEP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Max,
    Min,
}

impl Mode {
    pub fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Mode::Max => candidate > incumbent,
            Mode::Min => candidate < incumbent,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Self::Max),
            "min" => Ok(Self::Min),
            other => Err(Error::OutOfDomain(format!("unknown mode '{other}'"))),
        }
    }
}

/// `A`, its eigenvalues `λ1 ≥ λ2 ≥ λ3` and the matching eigenvectors
/// (column `i` ↔ `λ_{i+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationSpectrum {
    pub d: usize,
    pub a: Mat3,
    pub eigenvalues: Vec3,
    pub eigenvectors: Mat3,
}

impl CorrelationSpectrum {
    pub fn trace(&self) -> f64 {
        mat3_trace(&self.a)
    }

    pub fn eigenvector(&self, i: usize) -> Vec3 {
        [
            self.eigenvectors[0][i],
            self.eigenvectors[1][i],
            self.eigenvectors[2][i],
        ]
    }

    /// `4/d²`, the factor between `n(TrA·I − A)nᵀ` and the distance.
    pub fn distance_prefactor(&self) -> f64 {
        distance_prefactor(self.d)
    }
}

pub fn distance_prefactor(d: usize) -> f64 {
    4.0 / (d * d) as f64
}

/// `2(d−1)/d`, the factor between the raw MIN quantity and the cyclic maximum.
pub fn min_prefactor(d: usize) -> f64 {
    2.0 * (d - 1) as f64 / d as f64
}

/// `A = (d/2)·rrᵀ + (d(d−1)/2)·TTᵀ`; for two qubits this is `rrᵀ + TTᵀ`.
///
/// The `d/2` weight on `rrᵀ` is what makes `(4/d²)·n(TrA·I − A)nᵀ` equal the
/// Frobenius distance under the state normalisation of [`crate::bloch`].
pub fn correlation_matrix(state: &BlochState) -> Result<CorrelationSpectrum> {
    state.check_shape()?;
    let d = state.d as f64;
    let wr = d / 2.0;
    let wt = d * (d - 1.0) / 2.0;
    let rr = state.rrt();
    let tt = state.ttt();
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = wr * rr[i][j] + wt * tt[i][j];
        }
    }
    let eig = symmetric_eigen3(&a);
    Ok(CorrelationSpectrum {
        d: state.d,
        a,
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    })
}

/// `(U⊗I_d) ρ (U†⊗I_d)`.
pub fn perturb(rho: &ComplexMatrix, u: &LocalUnitary) -> Result<ComplexMatrix> {
    conjugate_qubit_side(rho, u)
}

/// Squared Frobenius distance between `ρ` and its perturbation. The norm form
/// and the trace form `2(Trρ² − Trρϱ)` are both evaluated and must agree.
pub fn distance_direct(rho: &ComplexMatrix, u: &LocalUnitary) -> Result<f64> {
    let perturbed = perturb(rho, u)?;
    let norm_form = (rho - &perturbed).frobenius_norm_sq();
    let trace_form = 2.0 * (rho.trace_product(rho).re - rho.trace_product(&perturbed).re);
    if (norm_form - trace_form).abs() > TOL_DISTANCE_FORMS {
        return Err(Error::NumericalMismatch(format!(
            "norm form {norm_form:e} vs trace form {trace_form:e}"
        )));
    }
    Ok(norm_form)
}

/// `(4/d²)·n(TrA·I − A)nᵀ`.
pub fn distance_quadratic(state: &BlochState, u: &LocalUnitary) -> Result<f64> {
    let spec = correlation_matrix(state)?;
    Ok(quadratic_with_spectrum(&spec, &u.n()))
}

pub(crate) fn quadratic_with_spectrum(spec: &CorrelationSpectrum, n: &Vec3) -> f64 {
    spec.distance_prefactor() * (spec.trace() * dot(n, n) - quad_form(&spec.a, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremumResult {
    pub set: SetLabel,
    pub mode: Mode,
    pub value: f64,
    #[serde(rename = "unitary")]
    pub optimal_unitary: LocalUnitary,
}

/// The unitary attaining the cyclic maximum: `i r̂·σ` when `r ≠ 0`, otherwise
/// `i v·σ` with `v` the eigenvector of the smallest eigenvalue of `TTᵀ`.
pub fn cyclic_max_unitary(state: &BlochState) -> Result<LocalUnitary> {
    let len = norm(&state.r);
    if len > TOL_R {
        LocalUnitary::traceless(scale3(&state.r, 1.0 / len))
    } else {
        LocalUnitary::traceless(symmetric_eigen3(&state.ttt()).vector(2))
    }
}

/// Closed-form extremum of `D` over `set`.
pub fn extremize_closed(state: &BlochState, set: SetLabel, mode: Mode) -> Result<ExtremumResult> {
    let spec = correlation_matrix(state)?;
    let k = spec.distance_prefactor();
    let [l1, l2, l3] = spec.eigenvalues;
    let (value, optimal_unitary) = match (set, mode) {
        (SetLabel::All | SetLabel::Traceless, Mode::Max) => {
            (k * (l1 + l2), LocalUnitary::traceless(spec.eigenvector(2))?)
        }
        (SetLabel::All | SetLabel::Cyclic, Mode::Min) => (0.0, LocalUnitary::identity()),
        (SetLabel::Traceless, Mode::Min) => {
            (k * (l2 + l3), LocalUnitary::traceless(spec.eigenvector(0))?)
        }
        (SetLabel::Cyclic, Mode::Max) => {
            let u = cyclic_max_unitary(state)?;
            let tt = state.ttt();
            let raw = mat3_trace(&tt) - quad_form(&tt, &u.n());
            (min_prefactor(state.d) * raw, u)
        }
        (SetLabel::Special, _) => {
            return Err(Error::Unsupported(
                "the special set is handled by the geometry module".into(),
            ))
        }
    };
    Ok(ExtremumResult {
        set,
        mode,
        value,
        optimal_unitary,
    })
}

/// Set context for `state`; the special set uses the cyclic maximiser as
/// its reference unitary.
pub fn set_context(state: &BlochState, set: SetLabel) -> Result<SetContext> {
    let reference = match set {
        SetLabel::Special => Some(cyclic_max_unitary(state)?),
        _ => None,
    };
    SetContext::new(set, Some(state), reference.as_ref())
}

/// Sampled extremum of `D` over `set`: `budget` draws from the set, then
/// random tangent-direction hill climbing restricted to the set.
pub fn extremize_sampled<R: Rng + ?Sized>(
    state: &BlochState,
    set: SetLabel,
    mode: Mode,
    budget: usize,
    rng: &mut R,
) -> Result<ExtremumResult> {
    if budget == 0 {
        return Err(Error::InvalidBudget(budget));
    }
    let ctx = set_context(state, set)?;
    let rho = density_from_bloch(state)?;
    let objective = |u: &LocalUnitary| distance_direct(&rho, u);
    let (best, value) = search(&ctx, mode, budget, rng, objective)?;
    Ok(ExtremumResult {
        set,
        mode,
        value,
        optimal_unitary: best,
    })
}

/// Sample-then-refine search over a unitary set for an arbitrary objective.
pub(crate) fn search<R, F>(
    ctx: &SetContext,
    mode: Mode,
    budget: usize,
    rng: &mut R,
    objective: F,
) -> Result<(LocalUnitary, f64)>
where
    R: Rng + ?Sized,
    F: Fn(&LocalUnitary) -> Result<f64>,
{
    let mut best = ctx.sample(rng)?;
    let mut best_value = objective(&best)?;
    for _ in 1..budget {
        let u = ctx.sample(rng)?;
        let v = objective(&u)?;
        if mode.better(v, best_value) {
            best = u;
            best_value = v;
        }
    }
    refine(
        ctx,
        mode,
        rng,
        &objective,
        &|u: &LocalUnitary| ctx.contains(u),
        best,
        best_value,
    )
}

/// Hill climbing on the unit sphere of `ctx`'s span; candidates failing
/// `member` are discarded. The step grows after an improving round and
/// halves after a fruitless one.
pub(crate) fn refine<R, F, M>(
    ctx: &SetContext,
    mode: Mode,
    rng: &mut R,
    objective: &F,
    member: &M,
    start: LocalUnitary,
    start_value: f64,
) -> Result<(LocalUnitary, f64)>
where
    R: Rng + ?Sized,
    F: Fn(&LocalUnitary) -> Result<f64>,
    M: Fn(&LocalUnitary) -> bool,
{
    let (mut x, mut value) = (start.as_array(), start_value);
    let mut step = REFINE_INITIAL_STEP;
    for _ in 0..REFINE_MAX_ROUNDS {
        if step < REFINE_MIN_STEP {
            break;
        }
        let mut improved = false;
        for _ in 0..REFINE_TRIES {
            let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let mut t = ctx.project(g);
            let radial: f64 = t.iter().zip(&x).map(|(a, b)| a * b).sum();
            for (ti, xi) in t.iter_mut().zip(&x) {
                *ti -= radial * xi;
            }
            let tn = t.iter().map(|v| v * v).sum::<f64>().sqrt();
            if tn < 1e-300 {
                continue;
            }
            let cand: [f64; 4] = std::array::from_fn(|i| x[i] + step * t[i] / tn);
            let u = LocalUnitary::from_array(ctx.project(cand))?;
            if !member(&u) {
                continue;
            }
            let v = objective(&u)?;
            if mode.better(v, value) {
                x = u.as_array();
                value = v;
                improved = true;
            }
        }
        step = if improved {
            (step * 1.5).min(REFINE_INITIAL_STEP)
        } else {
            step * 0.5
        };
    }
    Ok((LocalUnitary::from_array(x)?, value))
}
