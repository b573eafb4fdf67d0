//! Seeded state families used by tests, sweeps and verification runs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_from_density, density_from_bloch, validate_density, BlochState};
use crate::error::{Error, Result};
use crate::linalg::{norm, scale3, ComplexMatrix, Vec3};
use crate::tolerances::TOL_PSD;

/// Deterministic generator for stream `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `cos t|00⟩ + sin t|11⟩`; `t` drawn from `(0, π/4]` when absent.
    PureSchmidt {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
    },
    HaarPure {
        #[serde(default = "two")]
        d: usize,
    },
    /// Partial trace of a Haar pure state on `(2d)·env`; `env` defaults to `2d`.
    Mixed {
        #[serde(default = "two")]
        d: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        env: Option<usize>,
    },
    Werner {
        p: f64,
    },
    BellDiagonal {
        c: Vec3,
    },
    /// `½(I + x·σ) ⊗ ½(I + y·σ)`; missing vectors are drawn uniformly from the ball.
    Product {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<Vec3>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<Vec3>,
    },
    QuditMixed {
        d: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(family: Family, seed: u64) -> Self {
        Self { family, seed }
    }

    /// Samples with a generator seeded from `self.seed`.
    pub fn sample(&self) -> Result<BlochState> {
        sample_state(self, &mut ChaCha8Rng::seed_from_u64(self.seed))
    }
}

pub fn sample_state<R: Rng + ?Sized>(spec: &FamilySpec, rng: &mut R) -> Result<BlochState> {
    let state = match &spec.family {
        Family::PureSchmidt { t } => {
            let t = match t {
                Some(t) if (0.0..=std::f64::consts::FRAC_PI_2).contains(t) => *t,
                Some(t) => return Err(Error::OutOfDomain(format!("Schmidt angle {t}"))),
                None => std::f64::consts::FRAC_PI_4 * (1.0 - rng.random::<f64>()),
            };
            let mut psi = vec![Complex64::new(0.0, 0.0); 4];
            psi[0] = t.cos().into();
            psi[3] = t.sin().into();
            bloch_from_density(&projector(&psi), 2)?
        }
        Family::HaarPure { d } => {
            check_d(*d)?;
            bloch_from_density(&projector(&haar_vector(2 * d, rng)), *d)?
        }
        Family::Mixed { d, env } => {
            check_d(*d)?;
            let k = env.unwrap_or(2 * d);
            if k == 0 {
                return Err(Error::OutOfDomain("environment dimension 0".into()));
            }
            bloch_from_density(&purified_mixed(*d, k, rng), *d)?
        }
        Family::QuditMixed { d } => {
            check_d(*d)?;
            bloch_from_density(&purified_mixed(*d, 2 * d, rng), *d)?
        }
        Family::Werner { p } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::OutOfDomain(format!("Werner p = {p} outside [0, 1]")));
            }
            diagonal_correlations([-p, -p, -p])
        }
        Family::BellDiagonal { c } => diagonal_correlations(*c),
        Family::Product { x, y } => {
            let x = match x {
                Some(x) => *x,
                None => ball_vector(rng),
            };
            let y = match y {
                Some(y) => *y,
                None => ball_vector(rng),
            };
            product_state(&x, &y)?
        }
    };
    validate_density(&density_from_bloch(&state)?)?.ensure_valid(TOL_PSD)?;
    Ok(state)
}

/// `r = x`, `s = y`, `T = x yᵀ`.
pub fn product_state(x: &Vec3, y: &Vec3) -> Result<BlochState> {
    if norm(x) > 1.0 + 1e-12 || norm(y) > 1.0 + 1e-12 {
        return Err(Error::OutOfDomain(
            "product Bloch vector longer than 1".into(),
        ));
    }
    let t = (0..3)
        .map(|i| (0..3).map(|j| x[i] * y[j]).collect())
        .collect();
    BlochState::new(2, *x, y.to_vec(), t)
}

fn diagonal_correlations(c: Vec3) -> BlochState {
    let t = (0..3)
        .map(|i| (0..3).map(|j| if i == j { c[i] } else { 0.0 }).collect())
        .collect();
    BlochState {
        d: 2,
        r: [0.0; 3],
        s: vec![0.0; 3],
        t,
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

fn projector(psi: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj())
}

fn haar_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let len = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / len).collect()
}

fn purified_mixed<R: Rng + ?Sized>(d: usize, env: usize, rng: &mut R) -> ComplexMatrix {
    let n = 2 * d;
    let psi = haar_vector(n * env, rng);
    let rho = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..env)
            .map(|k| psi[i * env + k] * psi[j * env + k].conj())
            .sum()
    });
    let tr = rho.trace().re;
    rho.scale((1.0 / tr).into())
}

fn ball_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let g: Vec3 = std::array::from_fn(|_| rng.sample(StandardNormal));
    let radius = rng.random::<f64>().cbrt();
    scale3(&g, radius / norm(&g))
}
