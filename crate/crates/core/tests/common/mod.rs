//! Shared test oracles, deliberately independent of the library's solvers.

#![allow(dead_code, clippy::needless_range_loop)]

use compact_beam::linalg::BandedMatrix;
use rand::Rng;

/// Gaussian elimination with partial pivoting on a row-major copy.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(*v);
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap();
        m.swap(k, p);
        assert!(m[k][k] != 0.0, "oracle hit a singular matrix");
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..=n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Inverse by solving against the identity columns.
pub fn dense_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let e: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            dense_solve(a, &e)
        })
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect()
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn matvec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

/// Random tridiagonal bands `(lower, diag, upper)` with strict row dominance.
pub fn dominant_bands(rng: &mut impl Rng, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let lower: Vec<f64> = (0..n.saturating_sub(1))
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let upper: Vec<f64> = (0..n.saturating_sub(1))
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let off = if i > 0 { lower[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { upper[i].abs() } else { 0.0 };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            sign * (off + rng.gen_range(0.5..2.0))
        })
        .collect();
    (lower, diag, upper)
}

/// Random dense rows with the given band structure and strict row dominance.
pub fn dominant_banded(rng: &mut impl Rng, n: usize, kl: usize, ku: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0_f64; n]; n];
    for i in 0..n {
        let mut off = 0.0;
        for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
            if j != i {
                a[i][j] = rng.gen_range(-1.0..1.0);
                off += a[i][j].abs();
            }
        }
        a[i][i] = (off + rng.gen_range(0.5..2.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    }
    a
}

/// Copy the `(kl, ku)` band of dense rows into banded storage.
pub fn to_banded(rows: &[Vec<f64>], kl: usize, ku: usize) -> BandedMatrix {
    let n = rows.len();
    let mut band = BandedMatrix::zeros(n, kl, ku);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row
            .iter()
            .enumerate()
            .take((i + ku + 1).min(n))
            .skip(i.saturating_sub(kl))
        {
            band.set(i, j, *v);
        }
    }
    band
}
