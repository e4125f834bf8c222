use super::{check_len, BandedMatrix, DenseMatrix, LinalgError, PIVOT_TOLERANCE};

#[derive(Debug, Clone, PartialEq)]
enum Bands {
    /// One value per band.
    Toeplitz { lower: f64, diag: f64, upper: f64 },
    /// `lower[i]` is entry `(i + 1, i)`, `upper[i]` is entry `(i, i + 1)`.
    General {
        lower: Vec<f64>,
        diag: Vec<f64>,
        upper: Vec<f64>,
    },
}

/// `n x n` tridiagonal matrix, either Toeplitz (`diag_n(a_-1, a_0, a_1)`) or
/// with per-entry bands.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagMatrix {
    n: usize,
    bands: Bands,
}

impl TridiagMatrix {
    /// `diag_n(lower, diag, upper)`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn toeplitz(n: usize, lower: f64, diag: f64, upper: f64) -> Self {
        assert!(n >= 1, "tridiagonal matrix needs n >= 1");
        TridiagMatrix {
            n,
            bands: Bands::Toeplitz { lower, diag, upper },
        }
    }

    pub fn from_bands(
        lower: Vec<f64>,
        diag: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        let n = diag.len();
        if n == 0 {
            return Err(LinalgError::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        check_len(n - 1, lower.len())?;
        check_len(n - 1, upper.len())?;
        Ok(TridiagMatrix {
            n,
            bands: Bands::General { lower, diag, upper },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_toeplitz(&self) -> bool {
        matches!(self.bands, Bands::Toeplitz { .. })
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        match &self.bands {
            Bands::Toeplitz { diag, .. } => *diag,
            Bands::General { diag, .. } => diag[i],
        }
    }

    /// Entry `(i + 1, i)`.
    #[inline]
    pub fn lower(&self, i: usize) -> f64 {
        match &self.bands {
            Bands::Toeplitz { lower, .. } => *lower,
            Bands::General { lower, .. } => lower[i],
        }
    }

    /// Entry `(i, i + 1)`.
    #[inline]
    pub fn upper(&self, i: usize) -> f64 {
        match &self.bands {
            Bands::Toeplitz { upper, .. } => *upper,
            Bands::General { upper, .. } => upper[i],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag(i)
        } else if i == j + 1 {
            self.lower(j)
        } else if j == i + 1 {
            self.upper(i)
        } else {
            0.0
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n - 1).all(|i| self.lower(i) == self.upper(i))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let bands = match &self.bands {
            Bands::Toeplitz { lower, diag, upper } => Bands::Toeplitz {
                lower: s * lower,
                diag: s * diag,
                upper: s * upper,
            },
            Bands::General { lower, diag, upper } => Bands::General {
                lower: lower.iter().map(|v| s * v).collect(),
                diag: diag.iter().map(|v| s * v).collect(),
                upper: upper.iter().map(|v| s * v).collect(),
            },
        };
        TridiagMatrix { n: self.n, bands }
    }

    /// Copy into per-entry storage so single entries can be edited.
    pub fn to_general(&self) -> Self {
        let n = self.n;
        TridiagMatrix {
            n,
            bands: Bands::General {
                lower: (0..n - 1).map(|i| self.lower(i)).collect(),
                diag: (0..n).map(|i| self.diag(i)).collect(),
                upper: (0..n - 1).map(|i| self.upper(i)).collect(),
            },
        }
    }

    /// Set entry `(i, j)` inside the band, converting to per-entry storage.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the tridiagonal band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if self.is_toeplitz() {
            *self = self.to_general();
        }
        let Bands::General { lower, diag, upper } = &mut self.bands else {
            unreachable!()
        };
        if i == j {
            diag[i] = value;
        } else if i == j + 1 {
            lower[j] = value;
        } else if j == i + 1 {
            upper[i] = value;
        } else {
            panic!("entry ({i}, {j}) is outside the tridiagonal band");
        }
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let mut s = self.diag(i).abs();
                if i > 0 {
                    s += self.lower(i - 1).abs();
                }
                if i + 1 < self.n {
                    s += self.upper(i).abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "vector length must match matrix dimension");
        (0..self.n)
            .map(|i| {
                let mut s = self.diag(i) * v[i];
                if i > 0 {
                    s += self.lower(i - 1) * v[i - 1];
                }
                if i + 1 < self.n {
                    s += self.upper(i) * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn to_banded(&self) -> BandedMatrix {
        let mut m = BandedMatrix::zeros(self.n, 1, 1);
        for i in 0..self.n {
            for j in i.saturating_sub(1)..(i + 2).min(self.n) {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }
}

/// Solve `M x = rhs` with the Thomas algorithm, falling back to a pivoted
/// band solve when a Thomas pivot drops below the singularity threshold.
pub fn tridiag_solve(m: &TridiagMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = m.n();
    check_len(n, rhs.len())?;
    let tol = PIVOT_TOLERANCE * m.norm_inf();
    match thomas(m, rhs, tol) {
        Some(x) => Ok(x),
        None => m.to_banded().factor()?.solve(rhs),
    }
}

fn thomas(m: &TridiagMatrix, rhs: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = m.n();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = m.diag(0);
    if pivot.abs() <= tol {
        return None;
    }
    if n > 1 {
        c[0] = m.upper(0) / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        let l = m.lower(i - 1);
        pivot = m.diag(i) - l * c[i - 1];
        if pivot.abs() <= tol {
            return None;
        }
        if i + 1 < n {
            c[i] = m.upper(i) / pivot;
        }
        d[i] = (rhs[i] - l * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Whether `A B = B A` up to `1e-13 ||A|| ||B||` in the infinity norm.
pub fn commutes(a: &TridiagMatrix, b: &TridiagMatrix) -> Result<bool, LinalgError> {
    check_len(a.n(), b.n())?;
    let (da, db) = (a.to_dense(), b.to_dense());
    let comm = da.matmul(&db)?.sub(&db.matmul(&da)?)?;
    Ok(comm.norm_inf() <= 1e-13 * a.norm_inf() * b.norm_inf())
}
