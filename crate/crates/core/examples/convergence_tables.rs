//! Error tables for the three built-in problems with dt = h² at t = 1.
//!
//! cargo run --release --example convergence_tables -- [max Nx]

use compact_beam::analysis::convergence_table;
use compact_beam::cli::BUILTINS;
use compact_beam::discretize::{BeamParams, DtRule};

fn main() -> compact_beam::Result<()> {
    let max: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(256);
    let ladder: Vec<usize> = std::iter::successors(Some(32), |n| Some(n * 2))
        .take_while(|n| *n <= max)
        .collect();
    let mut runs: Vec<(String, _)> = BUILTINS
        .iter()
        .map(|b| {
            (
                format!("example {}: u = {}", b.id, b.u_exact),
                b.problem(1.0),
            )
        })
        .collect();
    // The first problem also with unit constants.
    runs.insert(
        1,
        (
            "example 1 with EI = rho = c = 1".into(),
            BUILTINS[0].problem_with(BeamParams::new(1.0, 1.0, 1.0), 1.0),
        ),
    );

    for (title, problem) in runs {
        let report = convergence_table(&problem?, &ladder, DtRule::SquareOfH, 1.0)?;
        println!("{title}");
        println!("{:>5} {:>12} {:>24} {:>10}", "Nx", "h", "error", "order");
        for r in &report.rows {
            let order = r.order.map(|o| format!("{o:.4}")).unwrap_or_default();
            println!("{:>5} {:>12.6e} {:>24.16e} {order:>10}", r.nx, r.h, r.error);
        }
        if let Some(avg) = report.average_order {
            println!("average order {avg:.4}");
        }
        println!();
    }
    Ok(())
}
