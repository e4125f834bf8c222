use super::{check_len, DenseMatrix, LinalgError, PIVOT_TOLERANCE};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` is stored as the window of columns `i - kl ..= i + ku`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandedMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        m.data.iter_mut().for_each(|v| *v = 1.0);
        m
    }

    /// Copy the band of a dense matrix. Entries outside the band are dropped.
    pub fn from_dense(d: &DenseMatrix, kl: usize, ku: usize) -> Self {
        assert_eq!(d.rows(), d.cols(), "banded matrices are square");
        let mut m = Self::zeros(d.rows(), kl, ku);
        for i in 0..m.n {
            for j in m.col_range(i) {
                m.set(i, j, d.get(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn col_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.n && j < self.n && self.in_band(i, j) {
            self.data[i * self.width() + j + self.kl - i]
        } else {
            0.0
        }
    }

    /// # Panics
    /// If `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            i < self.n && j < self.n && self.in_band(i, j),
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let w = self.width();
        self.data[i * w + j + self.kl - i] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: f64) {
        let v = self.get(i, j);
        self.set(i, j, v + value);
    }

    /// `self + s * other`, both with the same shape.
    pub fn add_scaled(&self, other: &BandedMatrix, s: f64) -> Result<BandedMatrix, LinalgError> {
        check_len(self.n, other.n)?;
        let kl = self.kl.max(other.kl);
        let ku = self.ku.max(other.ku);
        let mut out = Self::zeros(self.n, kl, ku);
        for i in 0..self.n {
            for j in out.col_range(i) {
                out.set(i, j, self.get(i, j) + s * other.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.n);
        let w = self.width();
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * w..(i + 1) * w];
            let mut s = 0.0;
            for j in self.col_range(i) {
                s += row[j + self.kl - i] * v[j];
            }
            *o = s;
        }
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.col_range(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// LU factorization with partial pivoting. Fill-in from row interchanges
    /// widens the upper band to `kl + ku`.
    pub fn factor(&self) -> Result<BandedFactorization, LinalgError> {
        let n = self.n;
        let kl = self.kl;
        let wu = kl + self.ku; // upper bandwidth of U
        let w = kl + wu + 1;
        let tol = PIVOT_TOLERANCE * self.norm_inf();
        let mut lu = vec![0.0; n * w];
        let idx = |i: usize, j: usize| i * w + j + kl - i;
        for i in 0..n {
            for j in self.col_range(i) {
                lu[idx(i, j)] = self.get(i, j);
            }
        }
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + wu).min(n - 1);
            let mut p = k;
            let mut best = lu[idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = lu[idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= tol || !best.is_finite() {
                return Err(LinalgError::Singular {
                    row: k,
                    pivot: best,
                });
            }
            pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    lu.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = lu[idx(k, k)];
            for r in k + 1..=last_row {
                let l = lu[idx(r, k)] / pivot;
                lu[idx(r, k)] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        lu[idx(r, j)] -= l * lu[idx(k, j)];
                    }
                }
            }
        }
        Ok(BandedFactorization {
            n,
            kl,
            wu,
            lu,
            pivots,
        })
    }
}

/// Reusable LU factors of a [`BandedMatrix`]. Read-only once built, so one
/// factorization may serve concurrent solves.
#[derive(Debug, Clone)]
pub struct BandedFactorization {
    n: usize,
    kl: usize,
    wu: usize,
    lu: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<(), LinalgError> {
        check_len(self.n, b.len())?;
        let n = self.n;
        let w = self.kl + self.wu + 1;
        let kl = self.kl;
        let idx = |i: usize, j: usize| i * w + j + kl - i;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for r in k + 1..=(k + kl).min(n - 1) {
                    b[r] -= self.lu[idx(r, k)] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + self.wu).min(n - 1) {
                s -= self.lu[idx(k, j)] * b[j];
            }
            b[k] = s / self.lu[idx(k, k)];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factorization_is_trivial() {
        let f = BandedMatrix::identity(5).factor().unwrap();
        let b = [1.0, 2.0, -3.0, 4.5, 0.0];
        assert_eq!(f.solve(&b).unwrap(), b.to_vec());
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] needs a row swap.
        let mut m = BandedMatrix::zeros(2, 1, 1);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        let x = m.factor().unwrap().solve(&[3.0, 4.0]).unwrap();
        assert_eq!(x, vec![4.0, 3.0]);
    }

    #[test]
    fn fill_in_from_pivoting() {
        // Lower band dominates, forcing interchanges at every step.
        let n = 7;
        let mut m = BandedMatrix::zeros(n, 2, 1);
        for i in 0..n {
            m.set(i, i, 0.1 + i as f64 * 0.01);
            if i + 1 < n {
                m.set(i, i + 1, 0.3);
            }
            for d in 1..=2 {
                if i >= d {
                    m.set(i, i - d, 2.0 + d as f64);
                }
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = m.mul_vec(&x_true);
        let x = m.factor().unwrap().solve(&b).unwrap();
        for (a, e) in x.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn singular_band_is_reported() {
        let m = BandedMatrix::zeros(3, 1, 1);
        assert!(matches!(
            m.factor(),
            Err(LinalgError::Singular { row: 0, .. })
        ));
    }

    #[test]
    fn out_of_band_reads_zero() {
        let m = BandedMatrix::identity(4);
        assert_eq!(m.get(0, 3), 0.0);
        assert_eq!(m.get(2, 2), 1.0);
    }

    #[test]
    fn wrong_rhs_length() {
        let f = BandedMatrix::identity(3).factor().unwrap();
        assert!(f.solve(&[1.0]).is_err());
    }
}
