//! A problem given by its data rather than an exact solution: a beam at rest
//! under a suddenly applied uniform load. Damping drives the midspan
//! deflection to the static value q L⁴ (5 / 384) / EI.

use compact_beam::discretize::{BeamData, BeamParams, BeamProblem, DtRule, Grid};
use compact_beam::expr::parse;
use compact_beam::stepper::{solve, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (ei, rho, c, q) = (2.0, 1.0, 4.0, 1.0);
    let zero = parse("0")?;
    let data = BeamData {
        params: BeamParams::new(ei, rho, c),
        length: 1.0,
        time: 8.0,
        u_exact: None,
        xi1: zero.clone(),
        xi2: zero.clone(),
        mu0: zero.clone(),
        mu1: zero.clone(),
        mu2: zero.clone(),
        mu3: zero,
        f: parse(&q.to_string())?,
    };
    let problem = BeamProblem::new(data)?;
    let grid = Grid::for_problem(&problem, 32, DtRule::Fixed(1e-3))?;
    let opts = SolveOptions {
        stride: Some(grid.nt() / 16),
        ..Default::default()
    };
    let traj = solve(&problem, &grid, opts)?;
    let mid = grid.nx() / 2;
    let target = 5.0 * q / (384.0 * ei);
    println!("{:>6} {:>16}", "t", "u(L/2, t)");
    for s in &traj.snapshots {
        println!("{:>6.2} {:>16.10}", s.t, s.u[mid]);
    }
    let last = traj.last().u[mid];
    println!(
        "static deflection {target:.10}, relative gap {:.2e}",
        (last - target).abs() / target
    );
    Ok(())
}
