//! Random sweep over beam constants, meshes and time steps, reporting the
//! worst real part of eig(𝒜⁻¹ℬ) and the worst spectral radius of Q.
//!
//! cargo run --release --example stability_sweep -- [count] [seed]

use compact_beam::analysis::stability_check;
use compact_beam::discretize::{BeamParams, DtRule, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> compact_beam::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (mut worst_re, mut worst_rho, mut failures) = (f64::NEG_INFINITY, 0.0_f64, 0);
    for _ in 0..count {
        let mut positive = || 100.0 * (1.0 - rng.gen::<f64>());
        let params = BeamParams::new(positive(), positive(), positive());
        let nx = rng.gen_range(4..=64);
        let dt = 10f64.powf(rng.gen_range(-4.0..=0.0));
        let grid = Grid::with_rule(1.0, 1.0, nx, DtRule::Fixed(dt))?;
        let r = stability_check(&params, &grid)?;
        worst_re = worst_re.max(r.max_real_part());
        worst_rho = worst_rho.max(r.rho_q());
        if !r.pass() || r.max_real_part() > 1e-10 {
            failures += 1;
            println!(
                "FAIL EI={:.3} rho={:.3} c={:.3} Nx={nx} dt={:.3e}: max Re={:.3e} rho(Q)-1={:.3e}",
                params.ei,
                params.rho,
                params.c,
                grid.dt(),
                r.max_real_part(),
                r.rho_q() - 1.0
            );
        }
    }
    println!("{count} configurations, {failures} failures");
    println!("worst max Re eig = {worst_re:.6e}");
    println!("worst rho(Q) - 1 = {:.6e}", worst_rho - 1.0);
    Ok(())
}
