//! A 4×4 pair where every eigenvalue of ℬ has a non-positive real part but
//! 𝒜⁻¹ℬ has a pair in the right half-plane, so a spectrum check on ℬ alone
//! says nothing about the stability of the scheme.

use compact_beam::analysis::{left_half_plane_counterexample, stability_of_pair};

fn main() -> compact_beam::Result<()> {
    let (acal, bcal) = left_half_plane_counterexample();
    let report = stability_of_pair(&acal, &bcal, 0.1)?;
    println!("{:>28}   {:>28}", "eig(B)", "eig(A^-1 B)");
    for (b, c) in report
        .b_spectrum
        .sorted()
        .iter()
        .zip(report.spectrum.sorted())
    {
        println!(
            "{:>+13.4} {:>+13.4}i   {:>+13.4} {:>+13.4}i",
            b.re, b.im, c.re, c.im
        );
    }
    println!(
        "max Re eig(B)        = {:+.6}",
        report.b_spectrum.max_real_part()
    );
    println!("max Re eig(A^-1 B)   = {:+.6}", report.max_real_part);
    println!("rho(Q) at dt = 0.1   = {:.6}", report.rho_q);
    println!("stable               = {}", report.pass);
    Ok(())
}
