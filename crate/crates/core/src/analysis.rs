//! Stability spectra, truncation-residual consistency and convergence tables.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::discretize::{
    assemble_block, boundary_force_interleaved, dense_blocks, BeamParams, BeamProblem, DtRule, Grid,
};
use crate::error::{Error, Result};
use crate::expr::{EvalError, Var};
use crate::linalg::{eigenvalues, norm_inf, spectral_radius, DenseMatrix, Spectrum};
use crate::stepper::{solve, SolveOptions};

/// Slack on `ρ(Q) ≤ 1` for eigensolver roundoff.
pub const STABILITY_TOLERANCE: f64 = 1e-10;

/// Spectral data of a pair `(𝒜, ℬ)` and the Crank–Nicolson amplification
/// matrix `Q = (𝒜 - dt/2 ℬ)⁻¹ (𝒜 + dt/2 ℬ)`.
#[derive(Debug, Clone)]
pub struct PairStability {
    pub dt: f64,
    /// Eigenvalues of `ℬ` alone.
    pub b_spectrum: Spectrum,
    /// Eigenvalues of `𝒜⁻¹ℬ`.
    pub spectrum: Spectrum,
    pub max_real_part: f64,
    /// Spectral radius of `Q`, from the eigenvalues of the dense product.
    pub rho_q: f64,
    /// Spectral radius of `Q` via `z ↦ (1 + dt z/2) / (1 - dt z/2)` on the
    /// eigenvalues of `𝒜⁻¹ℬ`; a cross-check on `rho_q`.
    pub rho_q_mapped: f64,
    pub converged: bool,
    pub pass: bool,
}

impl PairStability {
    /// Whether every eigenvalue of `𝒜⁻¹ℬ` has real part `≤ tol`.
    pub fn left_half_plane(&self, tol: f64) -> bool {
        self.max_real_part <= tol
    }
}

pub fn stability_of_pair(acal: &DenseMatrix, bcal: &DenseMatrix, dt: f64) -> Result<PairStability> {
    let lu = acal.lu()?;
    let c = lu.solve_matrix(bcal)?;
    let b_spectrum = eigenvalues(bcal);
    let spectrum = eigenvalues(&c);
    let q1 = acal.sub(&bcal.scale(0.5 * dt))?;
    let q2 = acal.add(&bcal.scale(0.5 * dt))?;
    let q = q1.lu()?.solve_matrix(&q2)?;
    let q_spectrum = eigenvalues(&q);
    let rho_q = spectral_radius(&q_spectrum);
    let half = Complex64::new(0.5 * dt, 0.0);
    let rho_q_mapped = spectrum
        .eigenvalues
        .iter()
        .map(|z| {
            ((Complex64::new(1.0, 0.0) + half * z) / (Complex64::new(1.0, 0.0) - half * z)).norm()
        })
        .fold(0.0, f64::max);
    let converged = b_spectrum.converged && spectrum.converged && q_spectrum.converged;
    Ok(PairStability {
        dt,
        max_real_part: spectrum.max_real_part(),
        b_spectrum,
        spectrum,
        rho_q,
        rho_q_mapped,
        converged,
        pass: rho_q <= 1.0 + STABILITY_TOLERANCE,
    })
}

/// Stability of the scheme for given beam constants on a given grid.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub params: BeamParams,
    pub nx: usize,
    pub h: f64,
    pub pair: PairStability,
}

impl StabilityReport {
    pub fn dt(&self) -> f64 {
        self.pair.dt
    }

    pub fn max_real_part(&self) -> f64 {
        self.pair.max_real_part
    }

    pub fn rho_q(&self) -> f64 {
        self.pair.rho_q
    }

    pub fn converged(&self) -> bool {
        self.pair.converged
    }

    pub fn pass(&self) -> bool {
        self.pair.pass
    }
}

pub fn stability_check(params: &BeamParams, grid: &Grid) -> Result<StabilityReport> {
    let (acal, bcal) = dense_blocks(params, grid);
    Ok(StabilityReport {
        params: *params,
        nx: grid.nx(),
        h: grid.h(),
        pair: stability_of_pair(&acal, &bcal, grid.dt())?,
    })
}

/// A 4×4 pair, `𝒜 = blockdiag(A₂, A₂)` with an `ℬ` whose eigenvalues lie in
/// the closed left half-plane while two eigenvalues of `𝒜⁻¹ℬ` do not.
pub fn left_half_plane_counterexample() -> (DenseMatrix, DenseMatrix) {
    let (s, d) = (1.0 / 12.0, 5.0 / 6.0);
    let acal = DenseMatrix::from_rows(&[
        [d, s, 0.0, 0.0],
        [s, d, 0.0, 0.0],
        [0.0, 0.0, d, s],
        [0.0, 0.0, s, d],
    ]);
    let bcal = DenseMatrix::from_rows(&[
        [-3.0, -4.0, 3.0, -2.0],
        [5.0, 0.0, 0.0, 2.0],
        [4.0, -1.0, -1.0, 5.0],
        [-2.0, 5.0, -4.0, -2.0],
    ]);
    (acal, bcal)
}

/// Which sweep a consistency row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Mesh refinement with `dt = h²`.
    Space,
    /// Time-step refinement at a fixed mesh.
    Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub sweep: Sweep,
    pub nx: usize,
    pub h: f64,
    pub dt: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub rows: Vec<ConsistencyRow>,
    /// Least-squares slope of `log residual` against `log h`.
    pub spatial_order: Option<f64>,
    /// Least-squares slope of `log residual` against `log dt`.
    pub temporal_order: Option<f64>,
}

/// Meshes used by [`consistency_order`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyLadder {
    pub spatial: Vec<usize>,
    pub temporal_nx: usize,
    pub temporal_dts: Vec<f64>,
}

impl Default for ConsistencyLadder {
    fn default() -> Self {
        ConsistencyLadder {
            spatial: vec![16, 32, 64, 128],
            temporal_nx: 256,
            temporal_dts: vec![0.1, 0.05, 0.025],
        }
    }
}

/// Max over time levels of the scheme's residual on exact-solution samples:
/// `‖𝒜(U*ⁿ⁺¹ - U*ⁿ)/dt - ℬ(U*ⁿ⁺¹ + U*ⁿ)/2 - (Fⁿ⁺¹ + Fⁿ)/2‖∞`.
pub fn consistency_residual(problem: &BeamProblem, grid: &Grid) -> Result<f64> {
    let exact = problem
        .u_exact()
        .ok_or_else(|| Error::InvalidProblem("consistency check needs an exact solution".into()))?;
    let phi = exact.diff(Var::T);
    let psi = exact.diff_n(Var::X, 2);
    let ops = assemble_block(&problem.params(), grid);
    let n = grid.interior();
    let sample = |t: f64| -> Result<Vec<f64>, EvalError> {
        let mut v = Vec::with_capacity(2 * n);
        for i in 1..=n {
            v.push(phi.eval(grid.x(i), t)?);
            v.push(psi.eval(grid.x(i), t)?);
        }
        Ok(v)
    };
    let mut samples = vec![0.0; grid.nx() + 1];
    let mut force = |t: f64| -> Result<Vec<f64>, EvalError> {
        let mut f = vec![0.0; 2 * n];
        boundary_force_interleaved(problem, grid, t, &mut samples, &mut f)?;
        Ok(f)
    };
    let dt = grid.dt();
    let mut u_now = sample(grid.t(0))?;
    let mut f_now = force(grid.t(0))?;
    let mut worst = 0.0_f64;
    for step in 1..=grid.nt() {
        let t = grid.t(step);
        let u_next = sample(t)?;
        let f_next = force(t)?;
        let du: Vec<f64> = u_next
            .iter()
            .zip(&u_now)
            .map(|(a, b)| (a - b) / dt)
            .collect();
        let mean: Vec<f64> = u_next
            .iter()
            .zip(&u_now)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let lhs = ops.acal.mul_vec(&du);
        let rhs = ops.bcal.mul_vec(&mean);
        let r: Vec<f64> = (0..2 * n)
            .map(|k| lhs[k] - rhs[k] - 0.5 * (f_next[k] + f_now[k]))
            .collect();
        worst = worst.max(norm_inf(&r));
        u_now = u_next;
        f_now = f_next;
    }
    Ok(worst)
}

pub fn consistency_order(
    problem: &BeamProblem,
    ladder: &ConsistencyLadder,
) -> Result<ConsistencyReport> {
    let (l, t) = (problem.length(), problem.time());
    let mut grids = Vec::new();
    for &nx in &ladder.spatial {
        grids.push((Sweep::Space, Grid::with_rule(l, t, nx, DtRule::SquareOfH)?));
    }
    for &dt in &ladder.temporal_dts {
        grids.push((
            Sweep::Time,
            Grid::with_rule(l, t, ladder.temporal_nx, DtRule::Fixed(dt))?,
        ));
    }
    let rows = grids
        .par_iter()
        .map(|(sweep, g)| {
            Ok(ConsistencyRow {
                sweep: *sweep,
                nx: g.nx(),
                h: g.h(),
                dt: g.dt(),
                residual: consistency_residual(problem, g)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = |sweep: Sweep, key: fn(&ConsistencyRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.sweep == sweep)
            .map(|r| (key(r).ln(), r.residual.ln()))
            .collect();
        least_squares_slope(&pts)
    };
    Ok(ConsistencyReport {
        spatial_order: fit(Sweep::Space, |r| r.h),
        temporal_order: fit(Sweep::Time, |r| r.dt),
        rows,
    })
}

/// Slope of the least-squares line through `points`; `None` with fewer than
/// two distinct abscissae or non-finite data.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub nx: usize,
    pub h: f64,
    pub dt: f64,
    pub error: f64,
    /// Order against the previous row; `None` for the first.
    pub order: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub t_eval: f64,
    pub rows: Vec<ConvergenceRow>,
    pub average_order: Option<f64>,
}

impl ConvergenceReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }
}

/// Max-norm displacement errors at `t_eval` along a mesh ladder.
///
/// The order between consecutive rows is `log(e_prev / e) / log(h_prev / h)`,
/// i.e. `log₂(e_{2h} / e_h)` when the ladder doubles.
pub fn convergence_table(
    problem: &BeamProblem,
    ladder: &[usize],
    rule: DtRule,
    t_eval: f64,
) -> Result<ConvergenceReport> {
    convergence_table_with(problem, ladder, rule, t_eval, SolveOptions::default())
}

pub fn convergence_table_with(
    problem: &BeamProblem,
    ladder: &[usize],
    rule: DtRule,
    t_eval: f64,
    options: SolveOptions,
) -> Result<ConvergenceReport> {
    if ladder.is_empty() {
        return Err(Error::InvalidGrid("mesh ladder is empty".into()));
    }
    if problem.u_exact().is_none() {
        return Err(Error::InvalidProblem(
            "convergence table needs an exact solution".into(),
        ));
    }
    let problem = problem.with_time(t_eval)?;
    let options = SolveOptions {
        stride: None,
        ..options
    };
    let solved = ladder
        .par_iter()
        .map(|&nx| {
            let grid = Grid::for_problem(&problem, nx, rule)?;
            let traj = solve(&problem, &grid, options)?;
            let error = traj.last().max_error(&problem, &grid)?.unwrap_or(f64::NAN);
            Ok((grid, error))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(solved.len());
    for (grid, error) in solved {
        let order = rows
            .last()
            .map(|prev| (prev.error / error).ln() / (prev.h / grid.h()).ln());
        rows.push(ConvergenceRow {
            nx: grid.nx(),
            h: grid.h(),
            dt: grid.dt(),
            error,
            order,
        });
    }
    let orders: Vec<f64> = rows.iter().filter_map(|r| r.order).collect();
    let average_order =
        (!orders.is_empty()).then(|| orders.iter().sum::<f64>() / orders.len() as f64);
    Ok(ConvergenceReport {
        t_eval,
        rows,
        average_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn problem(src: &str, ei: f64, rho: f64, c: f64) -> BeamProblem {
        BeamProblem::manufactured(parse(src).unwrap(), BeamParams::new(ei, rho, c), 1.0, 1.0)
            .unwrap()
    }

    #[test]
    fn example_one_is_stable_for_several_steps() {
        let p = BeamParams::new(98.0, 0.685, 0.75);
        for dt in [1e-3, 1e-2, 1e-1] {
            let grid = Grid::with_rule(1.0, 1.0, 16, DtRule::Fixed(dt)).unwrap();
            let r = stability_check(&p, &grid).unwrap();
            assert!(r.converged());
            assert!(r.pass(), "dt {dt}: rho(Q) = {}", r.rho_q());
            assert!(r.max_real_part() < 0.0);
            assert!((r.rho_q() - r.pair.rho_q_mapped).abs() < 1e-9);
        }
    }

    #[test]
    fn counterexample_has_positive_real_part() {
        let (a, b) = left_half_plane_counterexample();
        let r = stability_of_pair(&a, &b, 0.1).unwrap();
        assert!(r.b_spectrum.max_real_part() < 0.0);
        assert!(
            (r.max_real_part - 0.0751).abs() < 5e-5,
            "{}",
            r.max_real_part
        );
        assert!(!r.left_half_plane(0.0));
        assert!(!r.pass);
    }

    #[test]
    fn equal_rigidity_and_density_share_one_real_part() {
        // Every mode is underdamped here, so each eigenvalue pair sits on
        // Re = -c / (2 rho).
        let p = BeamParams::new(2.0, 2.0, 0.5);
        let grid = Grid::new(1.0, 1.0, 16, 100).unwrap();
        let r = stability_check(&p, &grid).unwrap();
        for z in &r.pair.spectrum.eigenvalues {
            assert!((z.re + 0.125).abs() < 1e-8, "{z}");
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..5).map(|k| (k as f64, 3.0 * k as f64 + 1.0)).collect();
        assert!((least_squares_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(least_squares_slope(&pts[..1]), None);
        assert_eq!(least_squares_slope(&[(1.0, 0.0), (1.0, 2.0)]), None);
    }

    #[test]
    fn residual_vanishes_on_low_degree_solution() {
        let p = problem("x^3*t + x*t + 2", 3.0, 2.0, 1.5);
        let grid = Grid::new(1.0, 1.0, 16, 8).unwrap();
        let r = consistency_residual(&p, &grid).unwrap();
        assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn spatial_consistency_order() {
        let p = problem("sin(pi*x)*cos(pi*t)", 98.0, 0.685, 0.75);
        let ladder = ConsistencyLadder {
            spatial: vec![8, 16, 32],
            temporal_nx: 64,
            temporal_dts: vec![0.1, 0.05],
        };
        let r = consistency_order(&p, &ladder).unwrap();
        let s = r.spatial_order.unwrap();
        let t = r.temporal_order.unwrap();
        assert!((3.7..=4.5).contains(&s), "{s}");
        assert!((1.8..=2.2).contains(&t), "{t}");
    }

    #[test]
    fn empty_ladder_is_rejected() {
        let p = problem("sin(pi*x)*cos(pi*t)", 1.0, 1.0, 1.0);
        assert!(matches!(
            convergence_table(&p, &[], DtRule::SquareOfH, 1.0),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn short_ladder_orders() {
        let p = problem("exp(-t)*sin(pi*x)", 98.0, 0.68, 7.5);
        let r = convergence_table(&p, &[8, 16, 32], DtRule::SquareOfH, 1.0).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows[0].order.is_none());
        let errs = r.errors();
        assert!(errs.windows(2).all(|w| w[1] < w[0]));
        assert!((r.rows[2].order.unwrap() - 4.0).abs() < 0.1);
    }
}
