//! Seeded random matrices and states.
//!
//! Every draw goes through a ChaCha stream selected by `(seed, stream)`, so
//! independent trials can run on any number of threads and still reproduce.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{ComplexMatrix, StateVector, C64};

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// GUE-style Hermitian matrix: real N(0,1) diagonal, complex normal
/// off-diagonal entries with unit variance.
pub fn gue(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        m[(r, r)] = C64::new(normal(rng), 0.0);
        for c in r + 1..n {
            let z = complex_normal(rng);
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    m
}

/// Haar-distributed pure state (normalized complex Gaussian vector).
pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Ok(s) = StateVector::normalized(amps) {
            return s;
        }
    }
}
