//! Matrix exponential by scaling and squaring of the Taylor series.

use num_complex::Complex64 as C64;

/// Dense row-major square matrix.
pub type CMatrix = Vec<Vec<C64>>;

pub fn identity(n: usize) -> CMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
                .collect()
        })
        .collect()
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

fn norm1(a: &CMatrix) -> f64 {
    let n = a.len();
    (0..n)
        .map(|j| (0..n).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)`.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.len();
    let norm = norm1(a);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let x: CMatrix = a.iter().map(|row| row.iter().map(|v| v * scale).collect()).collect();
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..30 {
        term = matmul(&term, &x);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation() {
        // exp(-i theta sigma_x) = cos theta - i sin theta sigma_x
        let theta = 2.3;
        let a = vec![
            vec![C64::new(0.0, 0.0), C64::new(0.0, -theta)],
            vec![C64::new(0.0, -theta), C64::new(0.0, 0.0)],
        ];
        let u = expm(&a);
        assert!((u[0][0] - theta.cos()).norm() < 1e-14);
        assert!((u[0][1] - C64::new(0.0, -theta.sin())).norm() < 1e-14);
    }
}
