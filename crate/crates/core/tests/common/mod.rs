#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::Rng;
use realclock_core::operator::{ComplexMatrix, DensityMatrix, HermitianOperator};
use realclock_oracles::CMatrix;

pub fn to_rows(m: &ComplexMatrix) -> CMatrix {
    let n = m.dim();
    (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> HermitianOperator {
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        entries[i * n + i] = C64::new(scale * rng.random_range(-1.0..1.0), 0.0);
        for j in (i + 1)..n {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
            entries[i * n + j] = z;
            entries[j * n + i] = z.conj();
        }
    }
    HermitianOperator::new(ComplexMatrix::from_row_slice(n, &entries).unwrap()).unwrap()
}

/// Mixture of `n` random pure states with random weights.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> DensityMatrix {
    let mut acc = ComplexMatrix::zeros(n);
    let mut total = 0.0;
    for _ in 0..n {
        let psi: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        let w: f64 = rng.random();
        total += w;
        acc = &acc + &ComplexMatrix::outer(&psi).scale(C64::new(w / norm, 0.0));
    }
    DensityMatrix::new(acc.scale(C64::new(1.0 / total, 0.0)).hermitian_part()).unwrap()
}

pub fn random_pure<R: Rng>(rng: &mut R, n: usize) -> DensityMatrix {
    let psi: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    DensityMatrix::pure(&psi).unwrap()
}

pub fn plus() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap()
}
