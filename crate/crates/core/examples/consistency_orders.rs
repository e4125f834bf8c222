//! Truncation residual of the scheme on exact-solution samples, with the
//! fitted orders in h (dt = h²) and in dt (fixed fine mesh).

use compact_beam::analysis::{consistency_order, ConsistencyLadder, Sweep};
use compact_beam::cli::BUILTINS;

fn main() -> compact_beam::Result<()> {
    let ladder = ConsistencyLadder::default();
    for b in BUILTINS {
        let report = consistency_order(&b.problem(1.0)?, &ladder)?;
        println!("example {}: u = {}", b.id, b.u_exact);
        for r in &report.rows {
            let sweep = if r.sweep == Sweep::Space {
                "space"
            } else {
                "time"
            };
            println!(
                "  {sweep:<5} Nx={:<4} dt={:<12.6e} residual={:.6e}",
                r.nx, r.dt, r.residual
            );
        }
        println!(
            "  order in h: {:.4}   order in dt: {:.4}\n",
            report.spatial_order.unwrap_or(f64::NAN),
            report.temporal_order.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
