#![allow(dead_code)]

use nonclassical::linalg::ComplexMatrix;
use nonclassical::samplers::{sample_state, stream_rng, Family, FamilySpec};
use nonclassical::unitary::unitary_matrix;
use nonclassical::{BlochState, LocalUnitary};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0)
}

pub fn mixed(d: usize, rng: &mut ChaCha8Rng) -> BlochState {
    sample_state(&FamilySpec::new(Family::Mixed { d, env: None }, 0), rng).unwrap()
}

pub fn random_unitary(rng: &mut ChaCha8Rng) -> LocalUnitary {
    let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    nonclassical::construct_unitary(x[0], [x[1], x[2], x[3]]).unwrap()
}

/// `‖ρ − (U⊗I)ρ(U⊗I)†‖²` through the full Kronecker product.
pub fn kron_distance(rho: &ComplexMatrix, u: &LocalUnitary, d: usize) -> f64 {
    let big = unitary_matrix(u).kron(&ComplexMatrix::identity(d));
    let rotated = &(&big * rho) * &big.adjoint();
    (rho - &rotated).frobenius_norm_sq()
}

pub fn pauli_matrices() -> [ComplexMatrix; 3] {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        ComplexMatrix::from_rows(&[vec![z, one], vec![one, z]]).unwrap(),
        ComplexMatrix::from_rows(&[vec![z, -i], vec![i, z]]).unwrap(),
        ComplexMatrix::from_rows(&[vec![one, z], vec![z, -one]]).unwrap(),
    ]
}
