//! The traceless unit sphere in the eigenframe of `A`.
//!
//! On traceless unitaries `D = (4/d²)(TrA − Σ σᵢ n′ᵢ²)` with `n′ = Vᵀn`, so GD
//! sits at `G = (±1,0,0)` and MIN at `P = (a,b,c) = Vᵀr̂`. This module builds
//! circles through both points, checks whether any of them attains MIN as its
//! maximum and GD as its minimum, and samples the band of unitaries whose
//! distance does not exceed the MIN value.

use rand::Rng;
use serde::Serialize;

use crate::bloch::{density_from_bloch, BlochState};
use crate::error::{Error, Result};
use crate::linalg::{add3, cross, dot, mat3_tvec, mat3_vec, norm, scale3, sub3, Mat3, Vec3};
use crate::perturbation::{
    correlation_matrix, cyclic_max_unitary, distance_direct, distance_prefactor, refine, Mode,
};
use crate::tolerances::{MAX_REJECTS, TOL_R};
use crate::unitary::{
    commutator_norm_sq, construct_unitary, sample_traceless, LocalUnitary, SetContext, SetLabel,
};

/// Value tolerance for "the circle attains MIN / GD".
pub const ATTAINMENT_TOL: f64 = 1e-6;
/// Default number of plane angles in the no-circle scan.
pub const DEFAULT_PLANES: usize = 720;
/// Dense samples per circle before golden-section refinement.
pub const CIRCLE_SAMPLES: usize = 512;
/// Slack of the spheroid predicate.
pub const SPHEROID_TOL: f64 = 1e-12;
/// Margin beyond which the spheroid and commutator predicates must agree.
pub const PREDICATE_AGREEMENT_TOL: f64 = 1e-10;
/// Smallest budget accepted by [`band_extrema_sampled`].
pub const MIN_BAND_BUDGET: usize = 1_000;

const E1: Vec3 = [1.0, 0.0, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenFrame {
    pub d: usize,
    /// Eigenvalues of `A`, descending.
    pub sigma: Vec3,
    /// Eigenvectors of `A` as columns, matching `sigma`.
    pub basis: Mat3,
    /// `Vᵀ r̂`.
    pub abc: Vec3,
    /// `Tr A`.
    pub trace: f64,
}

impl EigenFrame {
    pub fn to_frame(&self, n: &Vec3) -> Vec3 {
        mat3_tvec(&self.basis, n)
    }

    pub fn from_frame(&self, n: &Vec3) -> Vec3 {
        mat3_vec(&self.basis, n)
    }

    /// `Σ σᵢ pᵢ²`.
    pub fn weighted(&self, p: &Vec3) -> f64 {
        (0..3).map(|i| self.sigma[i] * p[i] * p[i]).sum()
    }

    /// `D` at the frame point `p` of the traceless sphere.
    pub fn distance_at(&self, p: &Vec3) -> f64 {
        distance_prefactor(self.d) * (self.trace - self.weighted(p))
    }

    /// `Δ = a²σ1 + b²σ2 + c²σ3`.
    pub fn delta(&self) -> f64 {
        self.weighted(&self.abc)
    }

    /// Distance at the MIN point `P`.
    pub fn min_point_value(&self) -> f64 {
        self.distance_at(&self.abc)
    }

    /// Distance at the GD point `G`.
    pub fn gd_point_value(&self) -> f64 {
        self.distance_at(&E1)
    }
}

pub fn eigen_frame(state: &BlochState) -> Result<EigenFrame> {
    let len = norm(&state.r);
    if len <= TOL_R {
        return Err(Error::FrameUndefined(format!(
            "|r| = {len:e}; the MIN direction is not fixed by r"
        )));
    }
    let spec = correlation_matrix(state)?;
    let abc = mat3_tvec(&spec.eigenvectors, &scale3(&state.r, 1.0 / len));
    Ok(EigenFrame {
        d: state.d,
        sigma: spec.eigenvalues,
        basis: spec.eigenvectors,
        abc: scale3(&abc, 1.0 / norm(&abc)),
        trace: spec.trace(),
    })
}

/// Rejects states for which the circle question degenerates, naming the
/// violated predicate.
pub fn check_generic(state: &BlochState) -> Result<EigenFrame> {
    let len = norm(&state.r);
    if len <= 1e-6 {
        return Err(Error::NonGeneric(format!("|r| = {len:e} <= 1e-6")));
    }
    let frame = eigen_frame(state)?;
    let [s1, s2, s3] = frame.sigma;
    let gap = (s1 - s2).min(s2 - s3);
    if gap <= 1e-6 * frame.trace {
        return Err(Error::NonGeneric(format!(
            "eigenvalue gap {gap:e} <= 1e-6 * TrA (degenerate spectrum)"
        )));
    }
    for (name, v) in ["a", "b", "c"].iter().zip(frame.abc) {
        if v.abs() <= 1e-3 {
            return Err(Error::NonGeneric(format!(
                "|{name}| = {:e} <= 1e-3 (MIN point on a coordinate plane)",
                v.abs()
            )));
        }
    }
    Ok(frame)
}

/// A circle on the unit sphere: the intersection with the plane `normal·p = offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleSpec {
    /// Coefficients of `p1 + M p2 + N p3 = 1`, when the plane can be written so.
    #[serde(rename = "M")]
    pub m: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<f64>,
    pub normal: Vec3,
    pub offset: f64,
    pub points: [Vec3; 3],
}

impl CircleSpec {
    fn from_plane(normal: Vec3, offset: f64, points: [Vec3; 3]) -> Result<Self> {
        let len = norm(&normal);
        if len < 1e-300 {
            return Err(Error::DegenerateCircle("zero plane normal".into()));
        }
        let (normal, offset) = (scale3(&normal, 1.0 / len), offset / len);
        let (normal, offset) = if offset < 0.0 {
            (scale3(&normal, -1.0), -offset)
        } else {
            (normal, offset)
        };
        let (m, n) = if (normal[0] - offset).abs() <= 1e-12 && normal[0].abs() > 1e-12 {
            (Some(normal[1] / normal[0]), Some(normal[2] / normal[0]))
        } else {
            (None, None)
        };
        Ok(Self {
            m,
            n,
            normal,
            offset,
            points,
        })
    }

    /// Circle through `(1,0,0)` in the plane `p1 + M p2 + N p3 = 1`.
    pub fn from_coefficients(m: f64, n: f64, points: [Vec3; 3]) -> Result<Self> {
        Self::from_plane([1.0, m, n], 1.0, points)
    }

    pub fn plane_coefficients(&self) -> Option<(f64, f64)> {
        self.m.zip(self.n)
    }

    pub fn center(&self) -> Vec3 {
        scale3(&self.normal, self.offset)
    }

    pub fn radius(&self) -> f64 {
        (1.0 - self.offset * self.offset).max(0.0).sqrt()
    }

    /// Orthonormal pair spanning the plane.
    pub fn plane_basis(&self) -> (Vec3, Vec3) {
        let k = self.normal;
        let axis = (0..3)
            .min_by(|&i, &j| k[i].abs().total_cmp(&k[j].abs()))
            .unwrap_or(0);
        let mut seed = [0.0; 3];
        seed[axis] = 1.0;
        let e1 = cross(&k, &seed);
        let e1 = scale3(&e1, 1.0 / norm(&e1));
        (e1, cross(&k, &e1))
    }

    pub fn point(&self, theta: f64) -> Vec3 {
        let (e1, e2) = self.plane_basis();
        let rim = add3(&scale3(&e1, theta.cos()), &scale3(&e2, theta.sin()));
        add3(&self.center(), &scale3(&rim, self.radius()))
    }

    /// Angle of a point lying on the circle.
    pub fn angle_of(&self, p: &Vec3) -> f64 {
        let (e1, e2) = self.plane_basis();
        let rel = sub3(p, &self.center());
        dot(&rel, &e2).atan2(dot(&rel, &e1))
    }

    /// `max |p1 + M p2 + N p3 − 1|` over the defining points, if `(M, N)` exist.
    pub fn plane_residual(&self) -> Option<f64> {
        let (m, n) = self.plane_coefficients()?;
        Some(
            self.points
                .iter()
                .map(|p| (p[0] + m * p[1] + n * p[2] - 1.0).abs())
                .fold(0.0, f64::max),
        )
    }
}

fn check_distinct(points: &[Vec3]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let gap = norm(&sub3(&points[i], &points[j]));
            if gap <= 1e-8 {
                return Err(Error::DegenerateCircle(format!(
                    "points {i} and {j} coincide (distance {gap:e})"
                )));
            }
        }
    }
    Ok(())
}

/// The circle through `(1,0,0)`, `abc` and `third`.
pub fn circle_through(abc: &Vec3, third: &Vec3) -> Result<CircleSpec> {
    check_distinct(&[*abc, *third, E1])?;
    let [a, b, c] = *abc;
    let [a2, b2, c2] = *third;
    let den = c2 * b - c * b2;
    if den.abs() <= 1e-12 {
        return Err(Error::DegenerateCircle(format!(
            "collinear configuration, c'b - cb' = {den:e}"
        )));
    }
    let m = (c2 - c2 * a + c * a2 - c) / den;
    let n = (b2 - b2 * a - b + a2 * b) / -den;
    CircleSpec::from_coefficients(m, n, [*abc, *third, E1])
}

/// Lagrange multipliers `(μ, λ)` making `(a,b,c)` stationary on a circle through `(1,0,0)`.
pub fn lagrange_multipliers(frame: &EigenFrame) -> Result<(f64, f64)> {
    let [a, b, c] = frame.abc;
    let [s1, s2, s3] = frame.sigma;
    if (1.0 - a).abs() <= 1e-12 {
        return Err(Error::DegenerateFrame(
            "a = 1: MIN and GD points coincide".into(),
        ));
    }
    let mu = (-a * s1 + a * a * s1 + b * b * s2 + c * c * s3) / (1.0 - a);
    let lambda = 2.0 * a * ((b * b + c * c) * s1 - b * b * s2 - c * c * s3) / (1.0 - a);
    Ok((mu, lambda))
}

/// The unique circle through `(1,0,0)` on which `(a,b,c)` is a stationary point of `D`.
pub fn stationary_circle(frame: &EigenFrame) -> Result<CircleSpec> {
    let [a, b, c] = frame.abc;
    let [s1, s2, s3] = frame.sigma;
    let den = a * ((b * b + c * c) * s1 - b * b * s2 - c * c * s3);
    if den.abs() <= 1e-12 {
        return Err(Error::DegenerateFrame(format!(
            "a[(b²+c²)σ1 − b²σ2 − c²σ3] = {den:e}"
        )));
    }
    lagrange_multipliers(frame)?;
    let n = c * (-(a - 1.0) * a * s1 - b * b * s2 + (a * a - a + b * b) * s3) / den;
    let m = b * (-(a - 1.0) * a * s1 - c * c * s3 + (a * a - a + c * c) * s2) / den;
    let mut circle = CircleSpec::from_coefficients(m, n, [frame.abc, E1, E1])?;
    let third = circle.point(circle.angle_of(&frame.abc) + std::f64::consts::FRAC_PI_2);
    circle.points[1] = third;
    Ok(circle)
}

/// `∂L/∂n′ᵢ` at `(a,b,c)` for the circle's `(M, N)` and the multipliers of
/// [`lagrange_multipliers`], followed by the plane residual.
pub fn lagrange_residuals(frame: &EigenFrame, circle: &CircleSpec) -> Result<[f64; 4]> {
    let (m, n) = circle
        .plane_coefficients()
        .ok_or_else(|| Error::DegenerateCircle("plane does not pass through (1,0,0)".into()))?;
    let (mu, lambda) = lagrange_multipliers(frame)?;
    let [a, b, c] = frame.abc;
    let [s1, s2, s3] = frame.sigma;
    Ok([
        -2.0 * a * s1 + 2.0 * mu * a + lambda,
        -2.0 * b * s2 + 2.0 * mu * b + lambda * m,
        -2.0 * c * s3 + 2.0 * mu * c + lambda * n,
        a + m * b + n * c - 1.0,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CirclePoint {
    pub theta: f64,
    pub point: Vec3,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleExtrema {
    pub max: CirclePoint,
    pub min: CirclePoint,
}

/// Global max and min of `D` on `circle`: dense evaluation at `samples`
/// angles, then golden-section refinement of the best bracket.
pub fn circle_extrema(
    frame: &EigenFrame,
    circle: &CircleSpec,
    samples: usize,
) -> Result<CircleExtrema> {
    if samples < 100 {
        return Err(Error::OutOfDomain(format!(
            "{samples} circle samples (need >= 100)"
        )));
    }
    let radius = circle.radius();
    if radius < 1e-8 {
        return Err(Error::DegenerateCircle(format!("radius {radius:e}")));
    }
    let (e1, e2) = circle.plane_basis();
    let center = circle.center();
    let at = |theta: f64| {
        let rim = add3(&scale3(&e1, theta.cos()), &scale3(&e2, theta.sin()));
        let p = add3(&center, &scale3(&rim, radius));
        CirclePoint {
            theta,
            point: p,
            value: frame.distance_at(&p),
        }
    };
    let step = std::f64::consts::TAU / samples as f64;
    let grid: Vec<CirclePoint> = (0..samples).map(|i| at(i as f64 * step)).collect();
    let pick = |mode: Mode| {
        let best = grid
            .iter()
            .copied()
            .reduce(|x, y| if mode.better(y.value, x.value) { y } else { x })
            .expect("samples >= 100");
        let refined = golden_section(&at, best.theta - step, best.theta + step, mode);
        if mode.better(refined.value, best.value) {
            refined
        } else {
            best
        }
    };
    Ok(CircleExtrema {
        max: pick(Mode::Max),
        min: pick(Mode::Min),
    })
}

fn golden_section<F: Fn(f64) -> CirclePoint>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    mode: Mode,
) -> CirclePoint {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-13 {
            break;
        }
        if mode.better(f1.value, f2.value) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if mode.better(f1.value, f2.value) {
        f1
    } else {
        f2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateSummary {
    pub d: usize,
    pub r_norm: f64,
    pub sigma: Vec3,
    pub abc: Vec3,
    /// `D` at the MIN point.
    pub p_value: f64,
    /// `D` at the GD point.
    pub g_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryCircleRecord {
    pub circle: CircleSpec,
    pub residuals: [f64; 4],
    pub max_residual: f64,
    pub extrema: CircleExtrema,
    pub circle_max_attained_at_p: bool,
    pub circle_min_attained_at_g: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRecord {
    pub phi: f64,
    pub max_value: f64,
    pub max_gap_to_p: f64,
    pub min_value: f64,
    pub min_gap_to_g: f64,
    /// Euclidean distance from the circle maximiser to `P`.
    pub max_location_gap: f64,
    /// Euclidean distance from the circle minimiser to `G`.
    pub min_location_gap: f64,
}

impl ScanRecord {
    pub fn passes(&self) -> bool {
        self.max_gap_to_p <= ATTAINMENT_TOL && self.min_gap_to_g <= ATTAINMENT_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoCircleReport {
    pub state: StateSummary,
    pub stationary: StationaryCircleRecord,
    pub scan: Vec<ScanRecord>,
    pub passing_planes: usize,
    /// True iff no circle attains MIN as its maximum and GD as its minimum.
    pub verdict: bool,
}

impl NoCircleReport {
    /// The plane scan as CSV with a header row.
    pub fn scan_csv(&self) -> String {
        let mut out = String::from("phi,max_value,max_gap_to_P,min_value,min_gap_to_G\n");
        for r in &self.scan {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.phi, r.max_value, r.max_gap_to_p, r.min_value, r.min_gap_to_g
            ));
        }
        out
    }
}

/// Searches the circles through `P` and `G` for one whose maximum of `D` is
/// the MIN value and whose minimum is the GD value. The stationary circle is
/// examined first, then `plane_scan` planes rotated about the chord `PG`
/// (with a random common angular offset).
pub fn no_circle_check<R: Rng + ?Sized>(
    state: &BlochState,
    plane_scan: usize,
    rng: &mut R,
) -> Result<NoCircleReport> {
    if plane_scan == 0 {
        return Err(Error::OutOfDomain(
            "plane scan needs at least one angle".into(),
        ));
    }
    let frame = check_generic(state)?;
    let p = frame.abc;
    let p_value = frame.min_point_value();
    let g_value = frame.gd_point_value();

    let circle = stationary_circle(&frame)?;
    let residuals = lagrange_residuals(&frame, &circle)?;
    let extrema = circle_extrema(&frame, &circle, CIRCLE_SAMPLES)?;
    let stationary = StationaryCircleRecord {
        circle,
        residuals,
        max_residual: residuals.iter().fold(0.0, |m, r| m.max(r.abs())),
        extrema,
        circle_max_attained_at_p: (extrema.max.value - p_value).abs() <= ATTAINMENT_TOL,
        circle_min_attained_at_g: (extrema.min.value - g_value).abs() <= ATTAINMENT_TOL,
    };

    let chord = sub3(&p, &E1);
    let chord = scale3(&chord, 1.0 / norm(&chord));
    let probe = CircleSpec::from_plane(chord, 0.0, [E1; 3])?;
    let (u1, u2) = probe.plane_basis();
    let spacing = std::f64::consts::PI / plane_scan as f64;
    let shift = rng.random::<f64>() * spacing;
    let mut scan = Vec::with_capacity(plane_scan);
    for j in 0..plane_scan {
        let phi = shift + j as f64 * spacing;
        let nu = add3(&scale3(&u1, phi.cos()), &scale3(&u2, phi.sin()));
        let c = CircleSpec::from_plane(nu, dot(&nu, &E1), [p, E1, E1])?;
        let ext = circle_extrema(&frame, &c, CIRCLE_SAMPLES)?;
        scan.push(ScanRecord {
            phi,
            max_value: ext.max.value,
            max_gap_to_p: (ext.max.value - p_value).abs(),
            min_value: ext.min.value,
            min_gap_to_g: (ext.min.value - g_value).abs(),
            max_location_gap: norm(&sub3(&ext.max.point, &p)),
            min_location_gap: norm(&sub3(&ext.min.point, &E1)),
        });
    }
    let passing_planes = scan.iter().filter(|r| r.passes()).count();
    let stationary_passes =
        stationary.circle_max_attained_at_p && stationary.circle_min_attained_at_g;
    Ok(NoCircleReport {
        state: StateSummary {
            d: frame.d,
            r_norm: norm(&state.r),
            sigma: frame.sigma,
            abc: frame.abc,
            p_value,
            g_value,
        },
        stationary,
        scan,
        passing_planes,
        verdict: passing_planes == 0 && !stationary_passes,
    })
}

/// `Σ σᵢ pᵢ² ≥ Δ` (up to [`SPHEROID_TOL`]) for a frame point `p`.
pub fn spheroid_membership(frame: &EigenFrame, point: &Vec3) -> Result<bool> {
    let delta = frame.delta();
    if delta <= 0.0 {
        return Err(Error::DegenerateFrame(format!("Δ = {delta:e} <= 0")));
    }
    Ok(frame.weighted(point) >= delta - SPHEROID_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PredicateAgreement {
    pub checked: usize,
    /// Samples on which the predicates differ although the point is farther
    /// than [`PREDICATE_AGREEMENT_TOL`] from the band boundary.
    pub disagreements: usize,
    /// Samples within the boundary margin (differences there are not counted).
    pub boundary: usize,
}

struct BandPredicates {
    frame: EigenFrame,
    rho: crate::linalg::ComplexMatrix,
    reference_value: f64,
}

impl BandPredicates {
    fn new(state: &BlochState) -> Result<Self> {
        let frame = eigen_frame(state)?;
        let rho = density_from_bloch(state)?;
        let reference_value = commutator_norm_sq(&rho, &cyclic_max_unitary(state)?)?;
        Ok(Self {
            frame,
            rho,
            reference_value,
        })
    }

    fn spheroid(&self, u: &LocalUnitary) -> Result<bool> {
        spheroid_membership(&self.frame, &self.frame.to_frame(&u.n()))
    }

    /// Signed distance of `u` from the band boundary in `Σσᵢn′ᵢ²` units.
    fn margin(&self, u: &LocalUnitary) -> f64 {
        self.frame.weighted(&self.frame.to_frame(&u.n())) - self.frame.delta()
    }

    /// Whether the commutator predicate (with `D(u)` already evaluated as
    /// `value`) disagrees with the spheroid verdict; `None` inside the
    /// boundary margin.
    fn disagrees(&self, u: &LocalUnitary, spheroid: bool, value: f64) -> Option<bool> {
        let commutator = value <= self.reference_value;
        (self.margin(u).abs() > PREDICATE_AGREEMENT_TOL).then_some(spheroid != commutator)
    }

    fn compare(&self, u: &LocalUnitary) -> Result<(bool, Option<bool>)> {
        let spheroid = self.spheroid(u)?;
        Ok((
            spheroid,
            self.disagrees(u, spheroid, commutator_norm_sq(&self.rho, u)?),
        ))
    }
}

/// Compares the spheroid predicate with the commutator predicate of the
/// special set on `samples` random traceless unitaries.
pub fn predicate_agreement<R: Rng + ?Sized>(
    state: &BlochState,
    samples: usize,
    rng: &mut R,
) -> Result<PredicateAgreement> {
    let preds = BandPredicates::new(state)?;
    let mut report = PredicateAgreement {
        checked: samples,
        disagreements: 0,
        boundary: 0,
    };
    for _ in 0..samples {
        match preds.compare(&sample_traceless(rng)?)?.1 {
            Some(true) => report.disagreements += 1,
            Some(false) => {}
            None => report.boundary += 1,
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandResult {
    pub max: f64,
    pub min: f64,
    pub max_unitary: LocalUnitary,
    pub min_unitary: LocalUnitary,
    pub accepted: usize,
    pub rejected: usize,
    /// Candidates on which both predicates were evaluated: every accepted
    /// draw and up to `budget` rejected ones.
    pub cross_checked: usize,
    /// Predicate disagreements among the cross-checked candidates.
    pub disagreements: usize,
}

/// Sampled max and min of `D` over the special set: `budget` accepted
/// traceless unitaries from the spheroid band, then refinement inside the
/// band. For `r = 0` the band is the whole traceless sphere.
pub fn band_extrema_sampled<R: Rng + ?Sized>(
    state: &BlochState,
    budget: usize,
    rng: &mut R,
) -> Result<BandResult> {
    if budget < MIN_BAND_BUDGET {
        return Err(Error::InvalidBudget(budget));
    }
    let rho = density_from_bloch(state)?;
    let objective = |u: &LocalUnitary| distance_direct(&rho, u);
    let preds = if norm(&state.r) > TOL_R {
        Some(BandPredicates::new(state)?)
    } else {
        None
    };

    let (mut accepted, mut rejected, mut disagreements, mut checked_rejects) = (0, 0, 0, 0);
    let mut best: Option<[(LocalUnitary, f64); 2]> = None;
    while accepted < budget {
        let mut misses = 0;
        let (u, v) = loop {
            let u = sample_traceless(rng)?;
            let Some(p) = &preds else {
                break (u, objective(&u)?);
            };
            if p.spheroid(&u)? {
                let v = objective(&u)?;
                disagreements += usize::from(p.disagrees(&u, true, v) == Some(true));
                break (u, v);
            }
            if checked_rejects < budget {
                checked_rejects += 1;
                let v = objective(&u)?;
                disagreements += usize::from(p.disagrees(&u, false, v) == Some(true));
            }
            rejected += 1;
            misses += 1;
            if misses >= MAX_REJECTS {
                return Err(Error::SamplingExhausted {
                    set: SetLabel::Special,
                    rejects: misses,
                });
            }
        };
        accepted += 1;
        best = Some(match best {
            None => [(u, v), (u, v)],
            Some([hi, lo]) => [
                if v > hi.1 { (u, v) } else { hi },
                if v < lo.1 { (u, v) } else { lo },
            ],
        });
    }
    let [(hi_u, hi_v), (lo_u, lo_v)] = best.expect("budget >= 1");

    let ctx = SetContext::new(SetLabel::Traceless, None, None)?;
    let member = |u: &LocalUnitary| match &preds {
        None => true,
        Some(p) => p.spheroid(u).unwrap_or(false),
    };
    let (max_unitary, max) = refine(&ctx, Mode::Max, rng, &objective, &member, hi_u, hi_v)?;
    let (min_unitary, min) = refine(&ctx, Mode::Min, rng, &objective, &member, lo_u, lo_v)?;
    Ok(BandResult {
        max,
        min,
        max_unitary,
        min_unitary,
        accepted,
        rejected,
        cross_checked: if preds.is_some() {
            accepted + checked_rejects
        } else {
            0
        },
        disagreements,
    })
}

/// The traceless unitary whose axis is the frame point `p`.
pub fn unitary_at(frame: &EigenFrame, p: &Vec3) -> Result<LocalUnitary> {
    construct_unitary(0.0, frame.from_frame(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat3_identity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frame(sigma: Vec3, abc: Vec3) -> EigenFrame {
        let len = norm(&abc);
        EigenFrame {
            d: 2,
            sigma,
            basis: mat3_identity(),
            abc: scale3(&abc, 1.0 / len),
            trace: sigma.iter().sum(),
        }
    }

    fn generic_state() -> BlochState {
        BlochState::new(
            2,
            [0.3, -0.2, 0.25],
            vec![0.1, 0.05, -0.1],
            vec![
                vec![0.4, 0.1, 0.0],
                vec![-0.05, -0.3, 0.1],
                vec![0.05, 0.1, 0.2],
            ],
        )
        .unwrap()
    }

    #[test]
    fn ket00_frame() {
        let st = BlochState::new(
            2,
            [0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![vec![0.0; 3], vec![0.0; 3], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        let f = eigen_frame(&st).unwrap();
        assert_eq!(f.sigma, [2.0, 0.0, 0.0]);
        assert!((f.abc[0].abs() - 1.0).abs() < 1e-15);
        assert!(f.abc[1].abs() < 1e-15 && f.abc[2].abs() < 1e-15);
    }

    #[test]
    fn frame_needs_local_vector() {
        let w = BlochState::maximally_mixed(2).unwrap();
        assert!(matches!(eigen_frame(&w), Err(Error::FrameUndefined(_))));
        assert!(matches!(check_generic(&w), Err(Error::NonGeneric(_))));
    }

    #[test]
    fn frame_abc_is_unit() {
        let f = eigen_frame(&generic_state()).unwrap();
        assert!((norm(&f.abc) - 1.0).abs() < 1e-12);
        assert!(f.sigma[0] >= f.sigma[1] && f.sigma[1] >= f.sigma[2]);
    }

    #[test]
    fn circle_through_examples() {
        let c = circle_through(&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(c.plane_coefficients(), Some((1.0, 1.0)));
        assert!(c.plane_residual().unwrap() < 1e-12);
        assert!(matches!(
            circle_through(&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]),
            Err(Error::DegenerateCircle(_))
        ));
    }

    #[test]
    fn stationary_circle_satisfies_lagrange_system() {
        let f = eigen_frame(&generic_state()).unwrap();
        let c = stationary_circle(&f).unwrap();
        for r in lagrange_residuals(&f, &c).unwrap() {
            assert!(r.abs() < 1e-12, "{r:e}");
        }
        assert!(c.plane_residual().unwrap() < 1e-10);
        for p in c.points {
            assert!((norm(&p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_circle_b_zero_has_m_zero() {
        let f = frame([3.0, 2.0, 1.0], [0.6, 0.0, 0.8]);
        let c = stationary_circle(&f).unwrap();
        assert_eq!(c.plane_coefficients().unwrap().0, 0.0);
        let f = frame([3.0, 2.0, 1.0], [0.0, 0.6, 0.8]);
        assert!(matches!(
            stationary_circle(&f),
            Err(Error::DegenerateFrame(_))
        ));
    }

    #[test]
    fn great_circle_extrema() {
        let f = frame([2.0, 1.0, 0.0], [1.0, 1.0, 1.0]);
        let c = CircleSpec::from_plane([0.0, 0.0, 1.0], 0.0, [E1; 3]).unwrap();
        let e = circle_extrema(&f, &c, 1000).unwrap();
        assert!((e.max.value - 2.0).abs() < 1e-12);
        assert!((e.min.value - 1.0).abs() < 1e-12);
        assert!(e.max.point[1].abs() > 1.0 - 1e-6);
        assert!(e.min.point[0].abs() > 1.0 - 1e-6);
    }

    #[test]
    fn isotropic_circle_is_flat() {
        let f = frame([0.5, 0.5, 0.5], [1.0, 1.0, 1.0]);
        let c = circle_through(&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        let e = circle_extrema(&f, &c, 200).unwrap();
        assert!((e.max.value - e.min.value).abs() < 1e-14);
    }

    #[test]
    fn extrema_converge_with_samples() {
        let f = eigen_frame(&generic_state()).unwrap();
        let c = stationary_circle(&f).unwrap();
        let a = circle_extrema(&f, &c, 10_000).unwrap();
        let b = circle_extrema(&f, &c, 20_000).unwrap();
        assert!((a.max.value - b.max.value).abs() < 1e-10);
        assert!((a.min.value - b.min.value).abs() < 1e-10);
    }

    #[test]
    fn spheroid_examples() {
        let f = frame([3.0, 2.0, 1.0], [0.5, 0.5, 0.7]);
        assert!(spheroid_membership(&f, &E1).unwrap());
        assert!(spheroid_membership(&f, &f.abc).unwrap());
        assert!(!spheroid_membership(&f, &[0.0, 0.0, 1.0]).unwrap());
        let zero = frame([0.0; 3], [1.0, 0.0, 0.0]);
        assert!(matches!(
            spheroid_membership(&zero, &E1),
            Err(Error::DegenerateFrame(_))
        ));
    }

    #[test]
    fn predicates_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rep = predicate_agreement(&generic_state(), 10_000, &mut rng).unwrap();
        assert_eq!(rep.disagreements, 0);
    }

    #[test]
    fn no_circle_rejects_werner() {
        let w = BlochState::new(
            2,
            [0.0; 3],
            vec![0.0; 3],
            vec![
                vec![-0.5, 0.0, 0.0],
                vec![0.0, -0.5, 0.0],
                vec![0.0, 0.0, -0.5],
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            no_circle_check(&w, 10, &mut rng),
            Err(Error::NonGeneric(_))
        ));
    }

    #[test]
    fn scan_csv_header() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rep = no_circle_check(&generic_state(), 8, &mut rng).unwrap();
        let csv = rep.scan_csv();
        assert!(csv.starts_with("phi,max_value,max_gap_to_P,min_value,min_gap_to_G\n"));
        assert_eq!(csv.lines().count(), 9);
        assert!(rep.stationary.max_residual < 1e-9);
    }
}
