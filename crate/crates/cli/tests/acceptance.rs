//! Acceptance criteria. Runs every criterion at its stated tolerance and
//! prints one PASS/FAIL line each; exits non-zero if any criterion fails.

use std::time::Instant;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use nonclassical::bloch::{partial_trace_qubit, partial_trace_qudit};
use nonclassical::geometry::{band_extrema_sampled, no_circle_check, predicate_agreement};
use nonclassical::measures::gmin_product;
use nonclassical::samplers::{sample_state, stream_rng, Family, FamilySpec};
use nonclassical::{
    density_from_bloch, distance_quadratic, extremize_closed, extremize_sampled, geometric_discord,
    gmin, min_measure, BlochState, ComplexMatrix, LocalUnitary, Mode, SetLabel,
};
use nonclassical_cli::suites::{generic_state, oracle_bracket, PAIRS};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn mixed(d: usize, rng: &mut ChaCha8Rng) -> BlochState {
    sample_state(&FamilySpec::new(Family::Mixed { d, env: None }, 0), rng).unwrap()
}

fn ball(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let g: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let len = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    let r = rng.random::<f64>().cbrt();
    g.map(|x| x * r / len)
}

fn random_unitary(rng: &mut ChaCha8Rng) -> LocalUnitary {
    let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    nonclassical::construct_unitary(x[0], [x[1], x[2], x[3]]).unwrap()
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// `‖ρ − (U⊗I)ρ(U⊗I)†‖²` with nalgebra's Kronecker product and matrix algebra.
fn oracle_distance(rho: &ComplexMatrix, u: &LocalUnitary, d: usize) -> f64 {
    let (n0, n) = (u.n0(), u.n());
    let c = Complex64::new;
    let small = DMatrix::from_row_slice(
        2,
        2,
        &[c(n0, n[2]), c(n[1], n[0]), c(-n[1], n[0]), c(n0, -n[2])],
    );
    let big = small.kronecker(&DMatrix::<Complex64>::identity(d, d));
    let rho = to_nalgebra(rho);
    let moved = &big * &rho * big.adjoint();
    (rho - moved).iter().map(|z| z.norm_sqr()).sum()
}

fn purity(m: &ComplexMatrix) -> f64 {
    let m = to_nalgebra(m);
    (&m * &m).trace().re
}

/// Two-qubit closed forms from nalgebra's eigen-decomposition of `rrᵀ + TTᵀ`.
fn theorem1_values(st: &BlochState) -> [f64; 6] {
    let r = nalgebra::Vector3::from_column_slice(&st.r);
    let t = Matrix3::from_fn(|i, j| st.t[i][j]);
    let tt = t * t.transpose();
    let a = r * r.transpose() + tt;
    let mut l: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    l.sort_by(|x, y| y.total_cmp(x));
    let cyclic = if r.norm() > 1e-9 {
        let h = r / r.norm();
        tt.trace() - (h.transpose() * tt * h)[0]
    } else {
        let mut lt: Vec<f64> = tt.symmetric_eigen().eigenvalues.iter().copied().collect();
        lt.sort_by(|x, y| y.total_cmp(x));
        tt.trace() - lt[2]
    };
    // Order of PAIRS: all/max, all/min, traceless/max, traceless/min, cyclic/max, cyclic/min.
    [l[0] + l[1], 0.0, l[0] + l[1], l[1] + l[2], cyclic, 0.0]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(101, 0);
    let spec = FamilySpec::new(Family::PureSchmidt { t: None }, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let st = sample_state(&spec, &mut rng).unwrap();
        worst = worst.max((gmin(&st).unwrap() - 2.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && secs < 1.0,
        format!(
            "200 Schmidt states: max |gmin - 2| = {worst:.2e} (tol 1e-9), {secs:.3} s (limit 1 s)"
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = stream_rng(102, 0);
    let (mut bloch_dev, mut purity_dev, mut corrected_dev): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut purity_fail = 0;
    let mut zero_ok = true;
    for _ in 0..200 {
        let (x, y) = (ball(&mut rng), ball(&mut rng));
        let st = FamilySpec::new(
            Family::Product {
                x: Some(x),
                y: Some(y),
            },
            0,
        )
        .sample()
        .unwrap();
        let g = gmin(&st).unwrap();
        bloch_dev = bloch_dev.max((g - gmin_product(&x, &y).unwrap()).abs());
        let rho = density_from_bloch(&st).unwrap();
        let p1 = purity(&partial_trace_qudit(&rho, 2).unwrap());
        let p2 = purity(&partial_trace_qubit(&rho, 2).unwrap());
        let dev = (g - (4.0 * p1 - 2.0) * (4.0 * p2 - 1.0)).abs();
        purity_fail += usize::from(dev > 1e-10);
        purity_dev = purity_dev.max(dev);
        corrected_dev = corrected_dev.max((g - (2.0 * p1 - 1.0) * (2.0 * p2)).abs());
        let unpolarised = FamilySpec::new(
            Family::Product {
                x: Some([0.0; 3]),
                y: Some(y),
            },
            0,
        )
        .sample()
        .unwrap();
        zero_ok &= gmin(&unpolarised).unwrap() == 0.0;
    }
    outcome(
        bloch_dev <= 1e-10 && purity_dev <= 1e-10 && zero_ok,
        format!(
            "200 product states: |gmin - |x|²(1+|y|²)| <= {bloch_dev:.2e}; \
             |gmin - (4Trρ1²-2)(4Trρ2²-1)| <= {purity_dev:.2e} ({purity_fail}/200 over 1e-10); \
             x = 0 gives exactly 0: {zero_ok}; [info] |gmin - (2Trρ1²-1)(2Trρ2²)| <= {corrected_dev:.2e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        let mut rng = stream_rng(103, d as u64);
        for _ in 0..1000 {
            let st = mixed(d, &mut rng);
            let u = random_unitary(&mut rng);
            let rho = density_from_bloch(&st).unwrap();
            let dev = (distance_quadratic(&st, &u).unwrap() - oracle_distance(&rho, &u, d)).abs();
            worst = worst.max(dev);
        }
    }
    outcome(
        worst <= 1e-10,
        format!("3000 pairs, d in {{2,3,4}}: max |quadratic - direct| = {worst:.2e} (tol 1e-10)"),
    )
}

/// Sampled-oracle protocol over `states` random states of dimension `d`;
/// returns (failures, checks, worst relative gap, exact-zero ok).
fn oracle_protocol(d: usize, states: usize, seed: u64) -> (usize, usize, f64, bool) {
    let (mut fails, mut checks, mut worst, mut zeros) = (0, 0, 0.0f64, true);
    for i in 0..states {
        let mut rng = stream_rng(seed, i as u64);
        let st = mixed(d, &mut rng);
        for (set, mode) in PAIRS {
            let closed = extremize_closed(&st, set, mode).unwrap().value;
            let sampled = extremize_sampled(&st, set, mode, 20_000, &mut rng)
                .unwrap()
                .value;
            let (lo, hi) = oracle_bracket(mode, closed, 1e-3);
            checks += 1;
            fails += usize::from(!(lo <= sampled && sampled <= hi));
            if closed > 0.0 {
                worst = worst.max((sampled - closed).abs() / closed);
            }
            if mode == Mode::Min && set != SetLabel::Traceless {
                zeros &= closed == 0.0;
            }
        }
    }
    (fails, checks, worst, zeros)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (fails, checks, worst, zeros) = oracle_protocol(2, 100, 104);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        fails == 0 && zeros && secs < 60.0,
        format!(
            "100 two-qubit states x 6 set/mode pairs: {fails}/{checks} outside bracket, \
             max relative gap {worst:.2e}, exact zeros: {zeros}, {secs:.1} s (limit 60 s)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let (f3, c3, w3, z3) = oracle_protocol(3, 30, 105);
    let (f4, c4, w4, z4) = oracle_protocol(4, 30, 205);
    let mut rng = stream_rng(305, 0);
    let mut d2_dev: f64 = 0.0;
    for _ in 0..100 {
        let st = mixed(2, &mut rng);
        let want = theorem1_values(&st);
        for (k, (set, mode)) in PAIRS.iter().enumerate() {
            let got = extremize_closed(&st, *set, *mode).unwrap().value;
            d2_dev = d2_dev.max((got - want[k]).abs());
        }
    }
    outcome(
        f3 + f4 == 0 && z3 && z4 && d2_dev <= 1e-12,
        format!(
            "d=3: {f3}/{c3} outside (max rel gap {w3:.2e}); d=4: {f4}/{c4} outside (max rel gap {w4:.2e}); \
             exact zeros: {}; d=2 general path vs two-qubit forms: max dev {d2_dev:.2e} (tol 1e-12)",
            z3 && z4
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut werner: f64 = 0.0;
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let w = FamilySpec::new(Family::Werner { p }, 0).sample().unwrap();
        let want = 2.0 * p * p;
        for v in [geometric_discord(&w), min_measure(&w), gmin(&w)] {
            werner = werner.max((v.unwrap() - want).abs());
        }
    }
    let mut rng = stream_rng(106, 0);
    let mut bell: f64 = 0.0;
    let mut n = 0;
    while n < 200 {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let Ok(st) = FamilySpec::new(Family::BellDiagonal { c }, 0).sample() else {
            continue;
        };
        bell = bell.max((min_measure(&st).unwrap() - gmin(&st).unwrap()).abs());
        n += 1;
    }
    outcome(
        werner <= 1e-10 && bell <= 1e-12,
        format!("Werner p = 0..1: max |measure - 2p²| = {werner:.2e} (tol 1e-10); 200 Bell-diagonal: max |min - gmin| = {bell:.2e} (tol 1e-12)"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let (mut residual, mut with_dual, mut stationary_dual, mut planes) = (0.0f64, 0, 0, 0);
    for i in 0..50 {
        let mut rng = stream_rng(107, i);
        let st = generic_state(&mut rng).unwrap();
        let rep = no_circle_check(&st, 720, &mut rng).unwrap();
        residual = residual.max(rep.stationary.max_residual);
        with_dual += usize::from(!rep.verdict);
        stationary_dual += usize::from(
            rep.stationary.circle_max_attained_at_p && rep.stationary.circle_min_attained_at_g,
        );
        planes += rep.passing_planes;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        with_dual == 0 && residual <= 1e-9 && secs < 300.0,
        format!(
            "50 generic states x 720 planes: {with_dual}/50 states admit a dual-attaining circle \
             (stationary circle: {stationary_dual}, scanned planes passing: {planes}); \
             max Lagrange residual {residual:.2e} (tol 1e-9), {secs:.1} s (limit 300 s)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let (mut max_gap, mut min_gap, mut disagreements, mut fails) = (0.0f64, 0.0f64, 0, 0);
    for i in 0..50 {
        let mut rng = stream_rng(108, i);
        let st = generic_state(&mut rng).unwrap();
        let band = band_extrema_sampled(&st, 100_000, &mut rng).unwrap();
        let c_max = extremize_closed(&st, SetLabel::Cyclic, Mode::Max)
            .unwrap()
            .value;
        let t_min = extremize_closed(&st, SetLabel::Traceless, Mode::Min)
            .unwrap()
            .value;
        let gmax = (band.max - c_max).abs() / c_max;
        let gmin = (band.min - t_min).abs() / t_min;
        fails += usize::from(gmax > 5e-3 || gmin > 5e-3);
        max_gap = max_gap.max(gmax);
        min_gap = min_gap.max(gmin);
        disagreements += predicate_agreement(&st, 10_000, &mut rng)
            .unwrap()
            .disagreements;
    }
    outcome(
        fails == 0 && disagreements == 0,
        format!(
            "50 generic states, budget 1e5: {fails} outside 0.5% (max rel gap: band max {max_gap:.2e}, \
             band min {min_gap:.2e}); predicate disagreements over 50 x 1e4 samples: {disagreements}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run_twice = |args: &[&str], name: &str| -> (bool, i32) {
        let mut bytes = Vec::new();
        let mut code = 0;
        for k in 0..2 {
            let path = dir.path().join(format!("{name}_{k}"));
            let mut argv = vec!["nonclassical".to_string()];
            argv.extend(args.iter().map(|s| s.to_string()));
            argv.extend(["--out".to_string(), path.display().to_string()]);
            code = code.max(nonclassical_cli::run(argv));
            bytes.push(std::fs::read(&path).unwrap_or_default());
        }
        (!bytes[0].is_empty() && bytes[0] == bytes[1], code)
    };
    let (q, qc) = run_twice(
        &[
            "verify", "--suite", "quadform", "--states", "200", "--seed", "9",
        ],
        "quadform",
    );
    let (t, tc) = run_twice(
        &[
            "verify", "--suite", "theorem1", "--states", "5", "--budget", "2000", "--seed", "9",
        ],
        "theorem1",
    );
    let (c, cc) = run_twice(
        &[
            "verify", "--suite", "quadform", "--states", "50", "--seed", "9", "--format", "csv",
        ],
        "quadform_csv",
    );
    let (s, sc) = run_twice(
        &[
            "sweep", "--family", "werner", "--from", "0", "--to", "1", "--steps", "11",
        ],
        "sweep",
    );
    let ok = q && t && c && s && qc == 0 && tc == 0 && cc == 0 && sc == 0;
    outcome(
        ok,
        format!("byte-identical reruns: verify quadform json {q}, verify theorem1 json {t}, verify csv {c}, sweep csv {s}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("Schmidt pure states have gmin = 2", criterion_1),
        ("product-state gmin formulas", criterion_2),
        ("quadratic form equals the direct distance", criterion_3),
        (
            "two-qubit closed forms match the sampled oracle",
            criterion_4,
        ),
        (
            "qubit-qudit closed forms match the sampled oracle",
            criterion_5,
        ),
        ("Werner sweep and Bell-diagonal identity", criterion_6),
        ("no circle reaches both MIN and GD", criterion_7),
        (
            "special-set band extrema and predicate equivalence",
            criterion_8,
        ),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "{} [{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
