//! Solve one built-in problem and print the displacement profile at the
//! final time next to the exact solution.
//!
//! cargo run --release --example solve_beam -- [example] [Nx] [dt]

use compact_beam::cli::builtin;
use compact_beam::discretize::{DtRule, Grid};
use compact_beam::stepper::{solve, SolveOptions};

fn main() -> compact_beam::Result<()> {
    let mut args = std::env::args().skip(1);
    let id: u8 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let nx: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let dt: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.005);

    let example = builtin(id).expect("examples are numbered 1 to 3");
    let problem = example.problem(1.0)?;
    let grid = Grid::for_problem(&problem, nx, DtRule::Fixed(dt))?;
    let traj = solve(&problem, &grid, SolveOptions::default())?;
    let last = traj.last();
    let exact = problem.u_exact().expect("built-ins carry their solution");

    println!(
        "u = {}  (EI = {}, rho = {}, c = {})",
        example.u_exact, example.params.ei, example.params.rho, example.params.c
    );
    println!("Nx = {nx}, Nt = {}, t = {}", grid.nt(), last.t);
    println!(
        "{:>6} {:>22} {:>22} {:>10}",
        "x", "numeric", "exact", "error"
    );
    let every = (nx / 10).max(1);
    for i in (0..=nx).step_by(every) {
        let x = grid.x(i);
        let e = exact.eval(x, last.t)?;
        println!(
            "{x:>6.3} {:>22.15e} {e:>22.15e} {:>10.3e}",
            last.u[i],
            (last.u[i] - e).abs()
        );
    }
    println!(
        "max error = {:.6e}",
        last.max_error(&problem, &grid)?.unwrap_or(f64::NAN)
    );
    Ok(())
}
