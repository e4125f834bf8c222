//! The linear-algebra layer on its own: Thomas solves, banded LU with
//! pivoting, a dense cross-check and the spectrum of the compact operator.

use compact_beam::linalg::{
    commutes, eigenvalues, norm_inf, tridiag_solve, BandedMatrix, DenseMatrix, TridiagMatrix,
};

fn main() -> Result<(), compact_beam::linalg::LinalgError> {
    let n = 8;
    let a = TridiagMatrix::toeplitz(n, 1.0 / 12.0, 5.0 / 6.0, 1.0 / 12.0);
    let b = TridiagMatrix::toeplitz(n, -1.0, 2.0, -1.0);
    let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();

    let x = tridiag_solve(&a, &rhs)?;
    let dense = a.to_dense().lu()?.solve(&rhs)?;
    let diff: Vec<f64> = x.iter().zip(&dense).map(|(p, q)| p - q).collect();
    println!("Thomas vs dense LU: {:.2e}", norm_inf(&diff));
    println!("A and B commute: {}", commutes(&a, &b)?);

    // A band matrix with a zero on the diagonal needs row interchanges.
    let mut m = BandedMatrix::zeros(n, 2, 1);
    for i in 0..n {
        m.set(i, i, if i % 3 == 0 { 0.0 } else { 4.0 });
        if i + 1 < n {
            m.set(i, i + 1, 1.0);
            m.set(i + 1, i, 2.0);
        }
        if i + 2 < n {
            m.set(i + 2, i, -1.0);
        }
    }
    let y = m.factor()?.solve(&rhs)?;
    let residual: Vec<f64> = m.mul_vec(&y).iter().zip(&rhs).map(|(p, q)| p - q).collect();
    println!("pivoted banded solve residual: {:.2e}", norm_inf(&residual));

    let spectrum = eigenvalues(&a.to_dense());
    let mut eig: Vec<f64> = spectrum.eigenvalues.iter().map(|z| z.re).collect();
    eig.sort_by(f64::total_cmp);
    println!("eig(A) = {eig:.6?}");
    let c = DenseMatrix::identity(n).scale(2.0).sub(&a.to_dense())?;
    println!("trace(2I - A) = {}", c.trace());
    Ok(())
}
