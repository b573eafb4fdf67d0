//! Geometric discord, measurement-induced nonlocality and its generalisation.
//!
//! These return the raw spectral quantities. The set distances carry extra
//! factors for `d > 2`: the traceless minimum is `(4/d²)·GD`, the traceless
//! maximum `(4/d²)·GMIN` and the cyclic maximum `(2(d−1)/d)·MIN`.

use serde::Serialize;

use crate::bloch::BlochState;
use crate::error::{Error, Result};
use crate::linalg::{dot, mat3_trace, norm, quad_form, scale3, symmetric_eigen3, Vec3};
use crate::perturbation::{
    correlation_matrix, distance_prefactor, min_prefactor, CorrelationSpectrum,
};
use crate::tolerances::TOL_R;

/// `TrA − λ1`.
pub fn geometric_discord(state: &BlochState) -> Result<f64> {
    let spec = correlation_matrix(state)?;
    Ok(spec.trace() - spec.eigenvalues[0])
}

/// `TrTTᵀ − r̂ᵀTTᵀr̂` for `r ≠ 0`, else `TrTTᵀ − λ_min(TTᵀ)`.
pub fn min_measure(state: &BlochState) -> Result<f64> {
    state.check_shape()?;
    let tt = state.ttt();
    let len = norm(&state.r);
    let subtract = if len > TOL_R {
        quad_form(&tt, &scale3(&state.r, 1.0 / len))
    } else {
        symmetric_eigen3(&tt).values[2]
    };
    Ok(mat3_trace(&tt) - subtract)
}

/// `λ1 + λ2`.
pub fn gmin(state: &BlochState) -> Result<f64> {
    let spec = correlation_matrix(state)?;
    Ok(spec.eigenvalues[0] + spec.eigenvalues[1])
}

/// GMIN of the product state `½(I + x·σ) ⊗ ½(I + y·σ)`: `|x|²(1 + |y|²)`.
pub fn gmin_product(x: &Vec3, y: &Vec3) -> Result<f64> {
    for (name, v) in [("x", x), ("y", y)] {
        if norm(v) > 1.0 + 1e-12 {
            return Err(Error::OutOfDomain(format!(
                "Bloch vector {name} has length {} > 1",
                norm(v)
            )));
        }
    }
    Ok(dot(x, x) * (1.0 + dot(y, y)))
}

/// Set-distance values (`4/d²` and `2(d−1)/d` applied).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledMeasures {
    pub gd_scaled: f64,
    pub min_scaled: f64,
    pub gmin_scaled: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureReport {
    pub d: usize,
    pub gd: f64,
    #[serde(rename = "min")]
    pub min_: f64,
    pub gmin: f64,
    pub lambda: Vec3,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub scaled: Option<ScaledMeasures>,
    #[serde(skip)]
    pub spectrum: CorrelationSpectrum,
}

impl MeasureReport {
    pub fn scaled_values(&self) -> ScaledMeasures {
        let k = distance_prefactor(self.d);
        ScaledMeasures {
            gd_scaled: k * self.gd,
            min_scaled: min_prefactor(self.d) * self.min_,
            gmin_scaled: k * self.gmin,
        }
    }
}

pub fn measure_report(state: &BlochState) -> Result<MeasureReport> {
    let spectrum = correlation_matrix(state)?;
    let [l1, l2, _] = spectrum.eigenvalues;
    let mut report = MeasureReport {
        d: state.d,
        gd: spectrum.trace() - l1,
        min_: min_measure(state)?,
        gmin: l1 + l2,
        lambda: spectrum.eigenvalues,
        scaled: None,
        spectrum,
    };
    if state.d > 2 {
        report.scaled = Some(report.scaled_values());
    }
    Ok(report)
}
