//! Bloch representation of qubit–qudit states.
//!
//! A 2⊗d state is written as
//!
//! ```text
//! ρ = 1/(2d) [ I + (r·σ)⊗I + κ I⊗(s·G) + κ Σ T_ij σ_i⊗G_j ],   κ = √(d(d−1)/2)
//! ```
//!
//! where `σ` are the Pauli matrices and `G` the generalized Gell-Mann
//! matrices normalised to `Tr(G_i G_j) = 2δ_ij`. For `d = 2` this is the
//! familiar `¼[I + r·σ⊗I + I⊗s·σ + Σ T_ij σ_i⊗σ_j]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{outer3, ComplexMatrix, Mat3, Vec3};
use crate::tolerances::{TOL_HERMITIAN, TOL_PSD, TOL_TRACE};

/// Generators of SU(d): `d² − 1` Hermitian traceless matrices with
/// `Tr(G_i G_j) = 2δ_ij`.
///
/// Order: symmetric `E_jk + E_kj` for `j < k` (row-major pairs), then
/// antisymmetric `−iE_jk + iE_kj` in the same pair order, then the diagonal
/// generators `√(2/(l(l+1))) (Σ_{m<l} E_mm − l E_ll)` for `l = 1..d−1`.
/// For `d = 2` this yields `σ1, σ2, σ3`.
pub fn generator_basis(d: usize) -> Result<Vec<ComplexMatrix>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = one;
            m[(k, j)] = one;
            out.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = -i;
            m[(k, j)] = i;
            out.push(m);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for mm in 0..l {
            m[(mm, mm)] = Complex64::new(norm, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        out.push(m);
    }
    Ok(out)
}

/// The Pauli matrices `σ1, σ2, σ3`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let mut g = generator_basis(2).expect("d = 2 is valid").into_iter();
    [g.next().unwrap(), g.next().unwrap(), g.next().unwrap()]
}

/// A qubit–qudit state in Bloch form. `t` is stored as 3 rows of length
/// `d² − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub d: usize,
    pub r: Vec3,
    pub s: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
}

impl BlochState {
    /// Checks field shapes; does not check positivity.
    pub fn new(d: usize, r: Vec3, s: Vec<f64>, t: Vec<Vec<f64>>) -> Result<Self> {
        let state = Self { d, r, s, t };
        state.check_shape()?;
        Ok(state)
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidDimension(self.d));
        }
        let m = self.d * self.d - 1;
        if self.s.len() != m || self.t.len() != 3 || self.t.iter().any(|row| row.len() != m) {
            return Err(Error::ShapeMismatch {
                expected: format!("s of length {m} and T of shape 3x{m}"),
                found: format!(
                    "s of length {} and T with {} rows",
                    self.s.len(),
                    self.t.len()
                ),
            });
        }
        Ok(())
    }

    /// The maximally mixed state `I/(2d)`.
    pub fn maximally_mixed(d: usize) -> Result<Self> {
        let m = d.checked_mul(d).and_then(|x| x.checked_sub(1)).unwrap_or(0);
        Self::new(d, [0.0; 3], vec![0.0; m], vec![vec![0.0; m]; 3])
    }

    /// Dimension `d² − 1` of the qudit Bloch space.
    pub fn qudit_components(&self) -> usize {
        self.d * self.d - 1
    }

    /// `T Tᵀ` (3×3).
    pub fn ttt(&self) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.t[i].iter().zip(&self.t[j]).map(|(a, b)| a * b).sum();
            }
        }
        m
    }

    pub fn rrt(&self) -> Mat3 {
        outer3(&self.r, &self.r)
    }
}

fn generator_weight(d: usize) -> f64 {
    ((d * (d - 1)) as f64 / 2.0).sqrt()
}

/// Assembles the `2d × 2d` density matrix of a Bloch state.
pub fn density_from_bloch(state: &BlochState) -> Result<ComplexMatrix> {
    state.check_shape()?;
    let d = state.d;
    let sig = pauli();
    let gens = generator_basis(d)?;
    let kappa = generator_weight(d);
    let id2 = ComplexMatrix::identity(2);
    let idd = ComplexMatrix::identity(d);

    let mut local_a = ComplexMatrix::zeros(2, 2);
    for (k, s) in sig.iter().enumerate() {
        local_a = &local_a + &s.scale(state.r[k].into());
    }
    let mut local_b = ComplexMatrix::zeros(d, d);
    for (j, g) in gens.iter().enumerate() {
        local_b = &local_b + &g.scale(state.s[j].into());
    }
    let mut rho = &(&ComplexMatrix::identity(2 * d) + &local_a.kron(&idd))
        + &id2.kron(&local_b).scale(kappa.into());
    for (i, si) in sig.iter().enumerate() {
        let mut b = ComplexMatrix::zeros(d, d);
        for (j, g) in gens.iter().enumerate() {
            b = &b + &g.scale(state.t[i][j].into());
        }
        rho = &rho + &si.kron(&b).scale(kappa.into());
    }
    Ok(rho.scale((1.0 / (2 * d) as f64).into()))
}

/// Extracts the Bloch form of a validated `2d × 2d` density matrix:
/// `r_k = Tr ρ(σ_k⊗I)`, `s_j = w Tr ρ(I⊗G_j)`, `T_ij = w Tr ρ(σ_i⊗G_j)` with
/// `w = √(d / (2(d−1)))`.
pub fn bloch_from_density(rho: &ComplexMatrix, d: usize) -> Result<BlochState> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if rho.rows() != 2 * d || rho.cols() != 2 * d {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", 2 * d),
            found: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    validate_density(rho)?.ensure_valid(TOL_PSD)?;

    let sig = pauli();
    let gens = generator_basis(d)?;
    let w = (d as f64 / (2.0 * (d - 1) as f64)).sqrt();
    let id2 = ComplexMatrix::identity(2);
    let idd = ComplexMatrix::identity(d);

    let mut r = [0.0; 3];
    for (k, s) in sig.iter().enumerate() {
        r[k] = rho.trace_product(&s.kron(&idd)).re;
    }
    let s = gens
        .iter()
        .map(|g| w * rho.trace_product(&id2.kron(g)).re)
        .collect();
    let t = sig
        .iter()
        .map(|si| {
            gens.iter()
                .map(|g| w * rho.trace_product(&si.kron(g)).re)
                .collect()
        })
        .collect();
    BlochState::new(d, r, s, t)
}

/// `ρ_A = ½(I + r·σ)`.
pub fn reduced_qubit(state: &BlochState) -> Result<ComplexMatrix> {
    state.check_shape()?;
    let sig = pauli();
    let mut m = ComplexMatrix::identity(2);
    for (k, s) in sig.iter().enumerate() {
        m = &m + &s.scale(state.r[k].into());
    }
    Ok(m.scale(0.5.into()))
}

/// Partial trace over the qudit factor of a `2d × 2d` matrix.
pub fn partial_trace_qudit(rho: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    if rho.rows() != 2 * d || rho.cols() != 2 * d {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", 2 * d),
            found: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(ComplexMatrix::from_fn(2, 2, |a, b| {
        (0..d).map(|k| rho[(a * d + k, b * d + k)]).sum()
    }))
}

/// Partial trace over the qubit factor of a `2d × 2d` matrix.
pub fn partial_trace_qubit(rho: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    if rho.rows() != 2 * d || rho.cols() != 2 * d {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", 2 * d),
            found: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| {
        rho[(i, j)] + rho[(d + i, d + j)]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDiagnostics {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn is_valid(&self, tol_psd: f64) -> bool {
        self.trace_error <= TOL_TRACE
            && self.hermiticity_error <= TOL_HERMITIAN
            && self.min_eigenvalue >= -tol_psd
    }

    pub fn ensure_valid(&self, tol_psd: f64) -> Result<()> {
        if self.is_valid(tol_psd) {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "trace error {:.3e}, hermiticity error {:.3e}, min eigenvalue {:.3e}",
                self.trace_error, self.hermiticity_error, self.min_eigenvalue
            )))
        }
    }
}

/// Reports trace, hermiticity and positivity diagnostics; callers decide
/// acceptance via [`StateDiagnostics::ensure_valid`].
pub fn validate_density(rho: &ComplexMatrix) -> Result<StateDiagnostics> {
    let eig = rho.hermitian_eigen()?;
    Ok(StateDiagnostics {
        trace_error: (rho.trace() - Complex64::new(1.0, 0.0)).norm(),
        hermiticity_error: rho.hermiticity_error(),
        min_eigenvalue: eig.min_value(),
    })
}
