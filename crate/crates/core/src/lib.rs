//! Non-classical correlations of qubit–qudit states from local unitary
//! perturbations.
//!
//! A state `ρ` on `C² ⊗ C^d` is perturbed by a local unitary `U ⊗ I` and the
//! squared Frobenius distance `D = ‖ρ − (U⊗I)ρ(U†⊗I)‖²` is extremized over
//! four sets of qubit unitaries. The extrema reproduce geometric discord
//! (GD), measurement-induced nonlocality (MIN) and its generalisation (GMIN),
//! all expressed through the spectrum of a 3×3 correlation matrix.
//!
//! ```
//! use nonclassical::{measures::measure_report, samplers::{Family, FamilySpec}};
//!
//! let werner = FamilySpec::new(Family::Werner { p: 0.5 }, 0).sample().unwrap();
//! let report = measure_report(&werner).unwrap();
//! assert!((report.gd - 0.5).abs() < 1e-12);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod bloch;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod perturbation;
pub mod samplers;
pub mod tolerances;
pub mod unitary;

pub use bloch::{bloch_from_density, density_from_bloch, validate_density, BlochState};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Mat3, Vec3};
pub use measures::{geometric_discord, gmin, measure_report, min_measure, MeasureReport};
pub use perturbation::{
    correlation_matrix, distance_direct, distance_quadratic, extremize_closed, extremize_sampled,
    ExtremumResult, Mode,
};
pub use unitary::{construct_unitary, LocalUnitary, SetLabel};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
