//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use qkern_core::encoding::{DataPoint, GeneralEvolution};
use qkern_core::linalg::{CMatrix, HermitianOperator, Unitary, C64};
use qkern_core::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(r: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<DataPoint> {
    (0..m)
        .map(|_| DataPoint::new((0..n).map(|_| r.random_range(-PI..PI)).collect()))
        .collect()
}

/// `m` points in `[−π, π)^n` labelled ±1 at random.
pub fn random_binary_dataset(r: &mut ChaCha8Rng, m: usize, n: usize) -> Dataset {
    let inputs = random_points(r, m, n);
    let labels = (0..m).map(|_| if r.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    Dataset::new(inputs, labels).expect("non-empty, matching lengths")
}

pub fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(r.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(m).expect("hermitian by construction")
}

pub fn random_unitary(r: &mut ChaCha8Rng, n: usize) -> Unitary {
    let a = CMatrix::from_fn(n, n, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    Unitary::new(a.qr().q()).expect("Q of a QR factorisation is unitary")
}

pub fn random_evolution(r: &mut ChaCha8Rng, n_qubits: usize, n_inputs: usize) -> GeneralEvolution {
    let d = 1 << n_qubits;
    let generator = random_hermitian(r, d);
    let ws = (0..=n_inputs).map(|_| random_unitary(r, d)).collect();
    GeneralEvolution::new(n_qubits, generator, ws).expect("valid spec")
}
