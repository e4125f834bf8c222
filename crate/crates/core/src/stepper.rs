//! Crank–Nicolson time stepping and displacement recovery.

use crate::discretize::{
    assemble_block, boundary_force_interleaved, initial_state, BeamProblem, Grid, InitialMoment,
    StateVector, COMPACT_CENTER, COMPACT_SIDE,
};
use crate::error::Result;
use crate::linalg::{norm_inf, tridiag_solve, BandedFactorization, BandedMatrix};

/// Factored Crank–Nicolson map for one problem on one grid.
///
/// The left matrix `𝒜 - (dt/2)ℬ` is factored once at construction. A
/// negative `dt` yields the inverse of the forward map.
#[derive(Debug, Clone)]
pub struct CnStepper<'a> {
    problem: &'a BeamProblem,
    grid: Grid,
    dt: f64,
    left: BandedMatrix,
    factor: BandedFactorization,
    right: BandedMatrix,
}

impl<'a> CnStepper<'a> {
    pub fn new(problem: &'a BeamProblem, grid: Grid) -> Result<Self> {
        Self::with_dt(problem, grid, grid.dt())
    }

    pub fn with_dt(problem: &'a BeamProblem, grid: Grid, dt: f64) -> Result<Self> {
        let ops = assemble_block(&problem.params(), &grid);
        let left = ops.acal.add_scaled(&ops.bcal, -0.5 * dt)?;
        let right = ops.acal.add_scaled(&ops.bcal, 0.5 * dt)?;
        let factor = left.factor()?;
        Ok(CnStepper {
            problem,
            grid,
            dt,
            left,
            factor,
            right,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn left(&self) -> &BandedMatrix {
        &self.left
    }

    pub fn right(&self) -> &BandedMatrix {
        &self.right
    }

    /// `F(t)` in interleaved order.
    pub fn force(&self, t: f64) -> Result<Vec<f64>> {
        let mut samples = vec![0.0; self.grid.nx() + 1];
        let mut out = vec![0.0; 2 * self.grid.interior()];
        boundary_force_interleaved(self.problem, &self.grid, t, &mut samples, &mut out)?;
        Ok(out)
    }

    /// Right-hand side `(𝒜 + (dt/2)ℬ) U + (dt/2)(F_now + F_next)`.
    fn rhs_into(&self, u: &[f64], f_now: &[f64], f_next: &[f64], out: &mut [f64]) {
        self.right.mul_vec_into(u, out);
        let half = 0.5 * self.dt;
        for ((o, a), b) in out.iter_mut().zip(f_now).zip(f_next) {
            *o += half * (a + b);
        }
    }

    /// Advance interleaved `u` in place given the forcing at both ends of
    /// the step. `scratch` must have the same length as `u`.
    pub fn advance(
        &self,
        u: &mut [f64],
        f_now: &[f64],
        f_next: &[f64],
        scratch: &mut [f64],
    ) -> Result<()> {
        self.rhs_into(u, f_now, f_next, scratch);
        self.factor.solve_in_place(scratch)?;
        u.copy_from_slice(scratch);
        Ok(())
    }

    /// Relative residual `‖(𝒜 - (dt/2)ℬ) next - rhs‖∞ / ‖rhs‖∞` of one step.
    pub fn step_residual(&self, prev: &[f64], next: &[f64], f_now: &[f64], f_next: &[f64]) -> f64 {
        let mut rhs = vec![0.0; prev.len()];
        self.rhs_into(prev, f_now, f_next, &mut rhs);
        let lhs = self.left.mul_vec(next);
        let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let scale = norm_inf(&rhs);
        if scale == 0.0 {
            norm_inf(&diff)
        } else {
            norm_inf(&diff) / scale
        }
    }
}

/// One step from `state` at time `t` to `t + dt`.
pub fn cn_step(stepper: &CnStepper<'_>, state: &StateVector, t: f64) -> Result<StateVector> {
    let f_now = stepper.force(t)?;
    let f_next = stepper.force(t + stepper.dt())?;
    let mut u = state.interleaved();
    let mut scratch = vec![0.0; u.len()];
    stepper.advance(&mut u, &f_now, &f_next, &mut scratch)?;
    Ok(StateVector::from_interleaved(&u, state.time_index + 1))
}

/// Displacement at all `Nx + 1` nodes from the interior moments at time `t`.
///
/// Solves `δ²u_i / h² = (ψ_{i-1} + 10ψ_i + ψ_{i+1}) / 12` with the boundary
/// moments and displacements moved to the right-hand side.
pub fn recover_u(psi: &[f64], t: f64, problem: &BeamProblem, grid: &Grid) -> Result<Vec<f64>> {
    let n = grid.interior();
    if psi.len() != n {
        return Err(crate::linalg::LinalgError::DimensionMismatch {
            expected: n,
            actual: psi.len(),
        }
        .into());
    }
    let d = problem.data();
    let l = grid.length();
    let (u0, un) = (d.mu0.eval(0.0, t)?, d.mu1.eval(l, t)?);
    let (m0, mn) = (d.mu2.eval(0.0, t)?, d.mu3.eval(l, t)?);
    let h2 = grid.h() * grid.h();
    let at = |i: isize| -> f64 {
        if i < 0 {
            m0
        } else if i as usize >= n {
            mn
        } else {
            psi[i as usize]
        }
    };
    // With B = tridiag(-1, 2, -1): B u = -h² Ã ψ plus boundary displacements.
    let mut rhs: Vec<f64> = (0..n as isize)
        .map(|i| {
            -h2 * (COMPACT_SIDE * at(i - 1) + COMPACT_CENTER * at(i) + COMPACT_SIDE * at(i + 1))
        })
        .collect();
    rhs[0] += u0;
    rhs[n - 1] += un;
    let interior = tridiag_solve(&second_difference(n), &rhs)?;
    let mut u = Vec::with_capacity(n + 2);
    u.push(u0);
    u.extend(interior);
    u.push(un);
    Ok(u)
}

fn second_difference(n: usize) -> crate::linalg::TridiagMatrix {
    crate::linalg::TridiagMatrix::toeplitz(n, -1.0, 2.0, -1.0)
}

/// Options for [`solve`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Also record every `stride`-th level (the final level is always kept).
    pub stride: Option<usize>,
    pub initial_moment: InitialMoment,
}

/// One recorded time level.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time_index: usize,
    pub t: f64,
    pub state: StateVector,
    /// Displacement at all nodes, boundary values imposed.
    pub u: Vec<f64>,
}

impl Snapshot {
    /// `max_i |u_i - u_exact(x_i, t)|`, if the problem carries an exact solution.
    pub fn max_error(&self, problem: &BeamProblem, grid: &Grid) -> Result<Option<f64>> {
        let Some(exact) = problem.u_exact() else {
            return Ok(None);
        };
        let mut err = 0.0_f64;
        for (i, u) in self.u.iter().enumerate() {
            err = err.max((u - exact.eval(grid.x(i), self.t)?).abs());
        }
        Ok(Some(err))
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("trajectory always holds the final level")
    }
}

/// Integrate from `t = 0` to `T` on `grid`.
pub fn solve(problem: &BeamProblem, grid: &Grid, options: SolveOptions) -> Result<Trajectory> {
    let stepper = CnStepper::new(problem, *grid)?;
    let state = initial_state(problem, grid, options.initial_moment)?;
    let mut u = state.interleaved();
    let mut scratch = vec![0.0; u.len()];
    let mut samples = vec![0.0; grid.nx() + 1];
    let mut f_now = vec![0.0; u.len()];
    let mut f_next = vec![0.0; u.len()];
    boundary_force_interleaved(problem, grid, grid.t(0), &mut samples, &mut f_now)?;

    let snapshot = |u: &[f64], n: usize| -> Result<Snapshot> {
        let state = StateVector::from_interleaved(u, n);
        let t = grid.t(n);
        let disp = recover_u(&state.psi, t, problem, grid)?;
        Ok(Snapshot {
            time_index: n,
            t,
            state,
            u: disp,
        })
    };

    let mut snapshots = Vec::new();
    let keep = |n: usize| matches!(options.stride, Some(s) if s > 0 && n.is_multiple_of(s));
    if keep(0) {
        snapshots.push(snapshot(&u, 0)?);
    }
    for n in 1..=grid.nt() {
        boundary_force_interleaved(problem, grid, grid.t(n), &mut samples, &mut f_next)?;
        stepper.advance(&mut u, &f_now, &f_next, &mut scratch)?;
        std::mem::swap(&mut f_now, &mut f_next);
        if n == grid.nt() || keep(n) {
            snapshots.push(snapshot(&u, n)?);
        }
    }
    Ok(Trajectory {
        grid: *grid,
        snapshots,
    })
}
