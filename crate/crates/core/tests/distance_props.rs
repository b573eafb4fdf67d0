mod common;

use common::{kron_distance, mixed, random_unitary, rng};
use nonclassical::measures::{geometric_discord, gmin, min_measure};
use nonclassical::perturbation::{cyclic_max_unitary, distance_prefactor, min_prefactor};
use nonclassical::samplers::{Family, FamilySpec};
use nonclassical::unitary::unitary_matrix;
use nonclassical::{
    bloch_from_density, construct_unitary, density_from_bloch, distance_direct, distance_quadratic,
    extremize_closed, ComplexMatrix, LocalUnitary, Mode, SetLabel,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quadratic_form_equals_kron_distance(seed in any::<u64>(), d in 2usize..=4) {
        let mut g = rng(seed);
        let st = mixed(d, &mut g);
        let u = random_unitary(&mut g);
        let rho = density_from_bloch(&st).unwrap();
        let oracle = kron_distance(&rho, &u, d);
        prop_assert!((distance_direct(&rho, &u).unwrap() - oracle).abs() <= 1e-12);
        prop_assert!((distance_quadratic(&st, &u).unwrap() - oracle).abs() <= 1e-12);
    }

    #[test]
    fn global_phase_is_invisible(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = density_from_bloch(&mixed(3, &mut g)).unwrap();
        let u = random_unitary(&mut g);
        let a = distance_direct(&rho, &u).unwrap();
        let b = distance_direct(&rho, &u.negated()).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn local_unitary_covariance(seed in any::<u64>(), d in 2usize..=3) {
        // D((V⊗I)ρ(V⊗I)†, U) = D(ρ, V†UV)
        let mut g = rng(seed);
        let st = mixed(d, &mut g);
        let (u, v) = (random_unitary(&mut g), random_unitary(&mut g));
        let rho = density_from_bloch(&st).unwrap();
        let big_v = unitary_matrix(&v).kron(&ComplexMatrix::identity(d));
        let moved = &(&big_v * &rho) * &big_v.adjoint();
        let vm = unitary_matrix(&v);
        let inner = &(&vm.adjoint() * &unitary_matrix(&u)) * &vm;
        // Recover (n0, n) from the 2×2 matrix [[n0+i n3, n2+i n1], ...].
        let w = construct_unitary(inner[(0, 0)].re, [inner[(0, 1)].im, inner[(0, 1)].re, inner[(0, 0)].im])
            .unwrap();
        let lhs = distance_direct(&moved, &u).unwrap();
        let rhs = distance_direct(&rho, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
        // The spectrum of A, hence every closed form, is invariant too.
        let moved_state = bloch_from_density(&moved, d).unwrap();
        prop_assert!((gmin(&moved_state).unwrap() - gmin(&st).unwrap()).abs() <= 1e-12);
        prop_assert!((geometric_discord(&moved_state).unwrap() - geometric_discord(&st).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn closed_forms_bound_random_unitaries(seed in any::<u64>(), d in 2usize..=4) {
        let mut g = rng(seed);
        let st = mixed(d, &mut g);
        let rho = density_from_bloch(&st).unwrap();
        let t_max = extremize_closed(&st, SetLabel::Traceless, Mode::Max).unwrap().value;
        let t_min = extremize_closed(&st, SetLabel::Traceless, Mode::Min).unwrap().value;
        let c_max = extremize_closed(&st, SetLabel::Cyclic, Mode::Max).unwrap().value;
        let r_hat = cyclic_max_unitary(&st).unwrap().n();
        for _ in 0..50 {
            let u = random_unitary(&mut g);
            let v = distance_direct(&rho, &u).unwrap();
            prop_assert!(v <= t_max + 1e-12);
            let traceless = LocalUnitary::traceless(u.n()).unwrap();
            let vt = distance_direct(&rho, &traceless).unwrap();
            prop_assert!(vt >= t_min - 1e-12 && vt <= t_max + 1e-12);
            let theta: f64 = u.n0().acos();
            let cyc = construct_unitary(theta.cos(), [r_hat[0] * theta.sin(), r_hat[1] * theta.sin(), r_hat[2] * theta.sin()]).unwrap();
            prop_assert!(distance_direct(&rho, &cyc).unwrap() <= c_max + 1e-12);
        }
    }

    #[test]
    fn measures_obey_orderings(seed in any::<u64>(), d in 2usize..=4) {
        let st = mixed(d, &mut rng(seed));
        let k = distance_prefactor(d);
        let gd = k * geometric_discord(&st).unwrap();
        let min = min_prefactor(d) * min_measure(&st).unwrap();
        let gm = k * gmin(&st).unwrap();
        // GD ≤ MIN ≤ GMIN as set distances.
        prop_assert!(gd <= min + 1e-12 && min <= gm + 1e-12);
    }
}

#[test]
fn werner_gd_matches_brute_force_grid() {
    for p in [0.2, 0.6, 1.0] {
        let st = FamilySpec::new(Family::Werner { p }, 0).sample().unwrap();
        let rho = density_from_bloch(&st).unwrap();
        let mut best = f64::INFINITY;
        let steps = 60;
        for i in 0..=steps {
            let theta = std::f64::consts::PI * i as f64 / steps as f64;
            for j in 0..2 * steps {
                let phi = std::f64::consts::PI * j as f64 / steps as f64;
                let n = [
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                ];
                let u = LocalUnitary::traceless(n).unwrap();
                best = best.min(distance_direct(&rho, &u).unwrap());
            }
        }
        assert!((best - 2.0 * p * p).abs() < 1e-12, "p = {p}: {best}");
        assert!((geometric_discord(&st).unwrap() - best).abs() < 1e-12);
    }
}

#[test]
fn zero_local_vector_cyclic_max_is_traceless_max() {
    let mut g = rng(3);
    for d in 2..=4 {
        for _ in 0..20 {
            let mut st = mixed(d, &mut g);
            st.r = [0.0; 3];
            let c = extremize_closed(&st, SetLabel::Cyclic, Mode::Max)
                .unwrap()
                .value;
            let t = extremize_closed(&st, SetLabel::Traceless, Mode::Max)
                .unwrap()
                .value;
            assert!((c - t).abs() < 1e-12, "d = {d}: {c} vs {t}");
        }
    }
}

#[test]
fn cyclic_max_is_continuous_as_r_vanishes_along_min_eigenvector() {
    // Along r ∝ v3(TTᵀ) both branches of MIN coincide.
    let mut g = rng(4);
    let mut st = mixed(2, &mut g);
    st.r = [0.0; 3];
    let at_zero = min_measure(&st).unwrap();
    let v = nonclassical::linalg::symmetric_eigen3(&st.ttt()).vector(2);
    for eps in [1e-3, 1e-6, 1e-8] {
        st.r = [eps * v[0], eps * v[1], eps * v[2]];
        assert!((min_measure(&st).unwrap() - at_zero).abs() < 1e-10);
    }
}

#[test]
fn schmidt_states_have_gmin_two() {
    for t in [0.1, 0.4, std::f64::consts::FRAC_PI_4] {
        let st = FamilySpec::new(Family::PureSchmidt { t: Some(t) }, 0)
            .sample()
            .unwrap();
        assert!((gmin(&st).unwrap() - 2.0).abs() < 1e-12);
    }
}
