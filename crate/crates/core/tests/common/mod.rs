#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewharmonic::SkewMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0))
}

pub fn random_vector(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.gen_range(-1.0..1.0))
}

pub fn random_skew(r: &mut ChaCha8Rng, n: usize) -> SkewMatrix {
    let upper: Vec<f64> = (0..n * n.saturating_sub(1) / 2).map(|_| r.gen_range(-1.0..1.0)).collect();
    SkewMatrix::from_upper(n, &upper).unwrap()
}

/// Signed sum over perfect matchings of `0..n`, the textbook definition.
pub fn pfaffian_by_matchings(a: &DMatrix<f64>) -> f64 {
    fn rec(a: &DMatrix<f64>, free: &mut Vec<usize>) -> f64 {
        if free.is_empty() {
            return 1.0;
        }
        let i = free.remove(0);
        let mut total = 0.0;
        for k in 0..free.len() {
            let j = free.remove(k);
            // sign of moving j next to i
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * a[(i, j)] * rec(a, free);
            free.insert(k, j);
        }
        free.insert(0, i);
        total
    }
    let mut free: Vec<usize> = (0..a.nrows()).collect();
    rec(a, &mut free)
}
