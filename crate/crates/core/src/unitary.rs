//! Qubit unitaries `U = n0·I + i n·σ` and the unitary sets used for
//! extremization: all unitaries, traceless ones, those commuting with the
//! reduced qubit state, and the special band set.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bloch::{density_from_bloch, BlochState};
use crate::error::{Error, Result};
use crate::linalg::{cross, norm, scale3, ComplexMatrix, Vec3};
use crate::tolerances::{MAX_REJECTS, TOL_R, TOL_SET};

/// A qubit unitary up to global phase, `n0² + |n|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUnitary")]
pub struct LocalUnitary {
    n0: f64,
    n: Vec3,
}

#[derive(Deserialize)]
struct RawUnitary {
    n0: f64,
    n: Vec3,
}

impl TryFrom<RawUnitary> for LocalUnitary {
    type Error = Error;

    fn try_from(raw: RawUnitary) -> Result<Self> {
        construct_unitary(raw.n0, raw.n)
    }
}

/// Normalises `(n0, n)` onto the unit 3-sphere.
pub fn construct_unitary(n0: f64, n: Vec3) -> Result<LocalUnitary> {
    let len = (n0 * n0 + n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len == 0.0 || !len.is_finite() {
        return Err(Error::DegenerateParameters);
    }
    // Already-unit input is kept bit-for-bit so serialisation round trips.
    if (len - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(LocalUnitary { n0, n });
    }
    Ok(LocalUnitary {
        n0: n0 / len,
        n: scale3(&n, 1.0 / len),
    })
}

impl LocalUnitary {
    pub fn identity() -> Self {
        Self {
            n0: 1.0,
            n: [0.0; 3],
        }
    }

    /// The traceless unitary `i n̂·σ` for a direction `n` (normalised here).
    pub fn traceless(n: Vec3) -> Result<Self> {
        construct_unitary(0.0, n)
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn n(&self) -> Vec3 {
        self.n
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.n0, self.n[0], self.n[1], self.n[2]]
    }

    pub(crate) fn from_array(x: [f64; 4]) -> Result<Self> {
        construct_unitary(x[0], [x[1], x[2], x[3]])
    }

    pub fn negated(&self) -> Self {
        Self {
            n0: -self.n0,
            n: scale3(&self.n, -1.0),
        }
    }

    /// The 2×2 matrix `[[n0 + i n3, n2 + i n1], [−n2 + i n1, n0 − i n3]]`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let [n1, n2, n3] = self.n;
        [
            [Complex64::new(self.n0, n3), Complex64::new(n2, n1)],
            [Complex64::new(-n2, n1), Complex64::new(self.n0, -n3)],
        ]
    }
}

pub fn unitary_matrix(u: &LocalUnitary) -> ComplexMatrix {
    let m = u.matrix();
    ComplexMatrix::from_fn(2, 2, |i, j| m[i][j])
}

/// Qudit dimension of a `2d × 2d` operator.
pub(crate) fn qudit_dim(rho: &ComplexMatrix) -> Result<usize> {
    if !rho.is_square() || rho.rows() < 4 || !rho.rows().is_multiple_of(2) {
        return Err(Error::ShapeMismatch {
            expected: "2d x 2d matrix with d >= 2".into(),
            found: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(rho.rows() / 2)
}

/// `(U⊗I_d) ρ (U†⊗I_d)` using the block structure of `U⊗I_d`.
pub(crate) fn conjugate_qubit_side(rho: &ComplexMatrix, u: &LocalUnitary) -> Result<ComplexMatrix> {
    let d = qudit_dim(rho)?;
    let m = u.matrix();
    Ok(ComplexMatrix::from_fn(2 * d, 2 * d, |row, col| {
        let (a, i) = (row / d, row % d);
        let (b, j) = (col / d, col % d);
        let mut acc = Complex64::new(0.0, 0.0);
        for ap in 0..2 {
            for bp in 0..2 {
                acc += m[a][ap] * rho[(ap * d + i, bp * d + j)] * m[b][bp].conj();
            }
        }
        acc
    }))
}

/// `‖[ρ, U⊗I]‖² = 2Trρ² − 2Tr(ρ(U⊗I)ρ(U†⊗I))`, clamped at zero.
pub fn commutator_norm_sq(rho: &ComplexMatrix, u: &LocalUnitary) -> Result<f64> {
    let rotated = conjugate_qubit_side(rho, u)?;
    let purity = rho.trace_product(rho).re;
    let overlap = rho.trace_product(&rotated).re;
    Ok((2.0 * purity - 2.0 * overlap).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetLabel {
    All,
    Traceless,
    Cyclic,
    Special,
}

impl std::str::FromStr for SetLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "traceless" => Ok(Self::Traceless),
            "cyclic" => Ok(Self::Cyclic),
            "special" => Ok(Self::Special),
            other => Err(Error::OutOfDomain(format!("unknown unitary set '{other}'"))),
        }
    }
}

/// A unitary set together with the context its predicate needs.
#[derive(Debug, Clone)]
pub enum SetContext {
    All,
    Traceless,
    /// `[U, ρ_A] = 0`; `r_hat` is `None` when `r = 0` (then the set is `S_A`).
    Cyclic {
        r: Vec3,
        r_hat: Option<Vec3>,
    },
    /// Traceless unitaries whose commutator with `ρ` is no larger than the
    /// reference unitary's.
    Special {
        rho: ComplexMatrix,
        reference: LocalUnitary,
        reference_value: f64,
    },
}

impl SetContext {
    pub fn new(
        set: SetLabel,
        state: Option<&BlochState>,
        reference: Option<&LocalUnitary>,
    ) -> Result<Self> {
        match set {
            SetLabel::All => Ok(Self::All),
            SetLabel::Traceless => Ok(Self::Traceless),
            SetLabel::Cyclic => {
                let state = state.ok_or(Error::MissingContext(set, "state"))?;
                let len = norm(&state.r);
                let r_hat = (len > TOL_R).then(|| scale3(&state.r, 1.0 / len));
                Ok(Self::Cyclic { r: state.r, r_hat })
            }
            SetLabel::Special => {
                let state = state.ok_or(Error::MissingContext(set, "state"))?;
                let reference =
                    *reference.ok_or(Error::MissingContext(set, "reference unitary"))?;
                let rho = density_from_bloch(state)?;
                let reference_value = commutator_norm_sq(&rho, &reference)?;
                Ok(Self::Special {
                    rho,
                    reference,
                    reference_value,
                })
            }
        }
    }

    pub fn label(&self) -> SetLabel {
        match self {
            Self::All => SetLabel::All,
            Self::Traceless => SetLabel::Traceless,
            Self::Cyclic { .. } => SetLabel::Cyclic,
            Self::Special { .. } => SetLabel::Special,
        }
    }

    pub fn contains(&self, u: &LocalUnitary) -> bool {
        match self {
            Self::All => true,
            Self::Traceless => u.n0.abs() <= TOL_SET,
            Self::Cyclic { r, .. } => norm(&cross(r, &u.n)) <= TOL_SET,
            Self::Special {
                rho,
                reference_value,
                ..
            } => {
                u.n0.abs() <= TOL_SET
                    && commutator_norm_sq(rho, u)
                        .map(|v| *reference_value >= v - TOL_SET)
                        .unwrap_or(false)
            }
        }
    }

    /// Draws one unitary from the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LocalUnitary> {
        match self {
            Self::All | Self::Cyclic { r_hat: None, .. } => sample_sphere4(rng),
            Self::Traceless => sample_traceless(rng),
            Self::Cyclic {
                r_hat: Some(r_hat), ..
            } => {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                construct_unitary(theta.cos(), scale3(r_hat, theta.sin()))
            }
            Self::Special { .. } => {
                for _ in 0..MAX_REJECTS {
                    let u = sample_traceless(rng)?;
                    if self.contains(&u) {
                        return Ok(u);
                    }
                }
                Err(Error::SamplingExhausted {
                    set: SetLabel::Special,
                    rejects: MAX_REJECTS,
                })
            }
        }
    }

    /// Projects a 4-vector in `(n0, n)` coordinates onto the linear span the
    /// set lives in (the set's parameter manifold is that span's unit sphere).
    pub(crate) fn project(&self, x: [f64; 4]) -> [f64; 4] {
        match self {
            Self::All | Self::Cyclic { r_hat: None, .. } => x,
            Self::Traceless | Self::Special { .. } => [0.0, x[1], x[2], x[3]],
            Self::Cyclic { r_hat: Some(h), .. } => {
                let along = x[1] * h[0] + x[2] * h[1] + x[3] * h[2];
                [x[0], along * h[0], along * h[1], along * h[2]]
            }
        }
    }
}

fn sample_sphere4<R: Rng + ?Sized>(rng: &mut R) -> Result<LocalUnitary> {
    let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    LocalUnitary::from_array(x)
}

pub(crate) fn sample_traceless<R: Rng + ?Sized>(rng: &mut R) -> Result<LocalUnitary> {
    let n: Vec3 = std::array::from_fn(|_| rng.sample(StandardNormal));
    construct_unitary(0.0, n)
}

/// Membership of `u` in `set`; `Cyclic` needs `state`, `Special` needs both
/// `state` and the MIN-optimal `reference` unitary.
pub fn membership(
    u: &LocalUnitary,
    set: SetLabel,
    state: Option<&BlochState>,
    reference: Option<&LocalUnitary>,
) -> Result<bool> {
    Ok(SetContext::new(set, state, reference)?.contains(u))
}

/// Draws a unitary from `set` with the sampling scheme of [`SetContext::sample`].
pub fn sample_unitary<R: Rng + ?Sized>(
    set: SetLabel,
    state: Option<&BlochState>,
    reference: Option<&LocalUnitary>,
    rng: &mut R,
) -> Result<LocalUnitary> {
    SetContext::new(set, state, reference)?.sample(rng)
}
