//! Numerical thresholds shared across modules.

/// Largest negative eigenvalue accepted for a density matrix.
pub const TOL_PSD: f64 = 1e-9;

/// Maximum `|Tr ρ - 1|` accepted for a density matrix.
pub const TOL_TRACE: f64 = 1e-10;

/// Maximum entrywise `|ρ - ρ†|` accepted for a density matrix.
pub const TOL_HERMITIAN: f64 = 1e-10;

/// Slack used by every unitary-set membership predicate.
pub const TOL_SET: f64 = 1e-10;

/// Below this norm the local Bloch vector `r` is treated as zero.
pub const TOL_R: f64 = 1e-9;

/// Off-diagonal norm at which the Jacobi sweeps stop.
pub const JACOBI_THRESHOLD: f64 = 1e-13;

/// Normalisation tolerance for `n0² + |n|² = 1`.
pub const TOL_UNIT: f64 = 1e-12;

/// Allowed disagreement between the norm and trace forms of the distance.
pub const TOL_DISTANCE_FORMS: f64 = 1e-12;

/// Consecutive rejections tolerated by rejection samplers.
pub const MAX_REJECTS: usize = 1_000_000;
