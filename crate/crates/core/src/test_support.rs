use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CMatrix, HermitianOperator, Unitary, C64};

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub(crate) fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
    let a = random_matrix(rng, n);
    let h = &a + a.adjoint();
    // exact symmetrisation to keep rounding out of the Hermiticity check
    let h = CMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => h[(i, j)],
        std::cmp::Ordering::Equal => C64::new(h[(i, i)].re, 0.0),
        std::cmp::Ordering::Greater => h[(j, i)].conj(),
    });
    HermitianOperator::new(h).unwrap()
}

pub(crate) fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Unitary {
    Unitary::new(random_matrix(rng, n).qr().q()).unwrap()
}
