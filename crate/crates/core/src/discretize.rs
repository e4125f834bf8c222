//! Semi-discrete system `𝒜 U_t = ℬ U + F(t)` for the simply supported beam.
//!
//! With `φ = u_t` and `ψ = u_xx` the fourth-order equation splits into
//!
//! ```text
//! ρ φ_t + c φ + EI ψ_xx = f
//!           ψ_t - φ_xx  = 0
//! ```
//!
//! and both second derivatives are replaced by the three-point compact
//! relation `(1/12) v''_{i-1} + (5/6) v''_i + (1/12) v''_{i+1} = δ² v_i / h²`.
//! Unknowns are `φ_i, ψ_i` at the interior nodes `i = 1 .. Nx-1`.

use log::warn;

use crate::error::{Error, Result};
use crate::expr::{manufacture_forcing, Compiled, EvalError, Expr, Var};
use crate::linalg::{tridiag_solve, BandedMatrix, DenseMatrix, TridiagMatrix};

/// Compact weights on the neighbouring and central node.
pub const COMPACT_SIDE: f64 = 1.0 / 12.0;
pub const COMPACT_CENTER: f64 = 5.0 / 6.0;

/// Tolerance for `ξ₁(0) = μ₀(0)` and `ξ₁(L) = μ₁(0)`.
const CORNER_TOLERANCE: f64 = 1e-10;

/// Physical constants of the beam: flexural rigidity `EI`, linear density
/// `rho` and damping coefficient `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    pub ei: f64,
    pub rho: f64,
    pub c: f64,
}

impl BeamParams {
    pub fn new(ei: f64, rho: f64, c: f64) -> Self {
        BeamParams { ei, rho, c }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("EI", self.ei), ("rho", self.rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::InvalidProblem(format!(
                "damping c must be non-negative, got {}",
                self.c
            )));
        }
        Ok(())
    }
}

/// Raw problem description. Every datum is an expression in `(x, t)`;
/// initial data only use `x`, boundary traces only use `t`.
#[derive(Debug, Clone)]
pub struct BeamData {
    pub params: BeamParams,
    pub length: f64,
    pub time: f64,
    pub u_exact: Option<Expr>,
    /// Initial displacement `u(x, 0)`.
    pub xi1: Expr,
    /// Initial velocity `u_t(x, 0)`.
    pub xi2: Expr,
    /// `u(0, t)`.
    pub mu0: Expr,
    /// `u(L, t)`.
    pub mu1: Expr,
    /// `u_xx(0, t)`.
    pub mu2: Expr,
    /// `u_xx(L, t)`.
    pub mu3: Expr,
    pub f: Expr,
}

/// Time derivatives of the boundary data that enter the boundary vector.
#[derive(Debug, Clone)]
struct EndTraces {
    /// `φ` at the end: time derivative of the displacement trace.
    phi: Expr,
    dphi: Expr,
    /// `ψ` at the end: the moment trace.
    psi: Expr,
    dpsi: Expr,
}

impl EndTraces {
    fn new(displacement: &Expr, moment: &Expr) -> Self {
        let phi = displacement.diff(Var::T);
        EndTraces {
            dphi: phi.diff(Var::T),
            phi,
            psi: moment.clone(),
            dpsi: moment.diff(Var::T),
        }
    }

    /// Contributions `(F₁, F₂)` of this end for row 1 (or row Nx-1).
    fn contributions(&self, p: &BeamParams, h: f64, t: f64) -> Result<(f64, f64), EvalError> {
        let phi = self.phi.eval(0.0, t)?;
        let dphi = self.dphi.eval(0.0, t)?;
        let psi = self.psi.eval(0.0, t)?;
        let dpsi = self.dpsi.eval(0.0, t)?;
        let h2 = h * h;
        let first = -p.ei * psi / h2 - p.rho * dphi / 12.0 - p.c * phi / 12.0;
        let second = phi / h2 - dpsi / 12.0;
        Ok((first, second))
    }
}

/// A validated damped-beam problem with constant coefficients.
#[derive(Debug, Clone)]
pub struct BeamProblem {
    data: BeamData,
    left: EndTraces,
    right: EndTraces,
    xi1_xx: Expr,
    forcing: Compiled,
}

impl BeamProblem {
    pub fn new(data: BeamData) -> Result<Self> {
        data.params.validate()?;
        for (name, v) in [("L", data.length), ("T", data.time)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if data.params.c == 0.0 {
            warn!("undamped beam (c = 0): stability is only guaranteed for c > 0");
        }
        let corners = [
            (
                "xi1(0) = mu0(0)",
                data.xi1.eval(0.0, 0.0)?,
                data.mu0.eval(0.0, 0.0)?,
            ),
            (
                "xi1(L) = mu1(0)",
                data.xi1.eval(data.length, 0.0)?,
                data.mu1.eval(data.length, 0.0)?,
            ),
        ];
        for (what, a, b) in corners {
            if (a - b).abs() > CORNER_TOLERANCE * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::InvalidProblem(format!(
                    "incompatible corner data: {what} violated ({a} vs {b})"
                )));
            }
        }
        Ok(BeamProblem {
            left: EndTraces::new(&data.mu0, &data.mu2),
            right: EndTraces::new(&data.mu1, &data.mu3),
            xi1_xx: data.xi1.diff_n(Var::X, 2),
            forcing: data.f.compile(),
            data,
        })
    }

    /// Problem whose exact solution is `u`: initial and boundary data are
    /// traces of `u` and the forcing is derived symbolically.
    pub fn manufactured(u: Expr, params: BeamParams, length: f64, time: f64) -> Result<Self> {
        let u_t = u.diff(Var::T);
        let u_xx = u.diff_n(Var::X, 2);
        let data = BeamData {
            params,
            length,
            time,
            xi1: u.substitute(Var::T, 0.0),
            xi2: u_t.substitute(Var::T, 0.0),
            mu0: u.substitute(Var::X, 0.0),
            mu1: u.substitute(Var::X, length),
            mu2: u_xx.substitute(Var::X, 0.0),
            mu3: u_xx.substitute(Var::X, length),
            f: manufacture_forcing(&u, params.ei, params.rho, params.c),
            u_exact: Some(u),
        };
        Self::new(data)
    }

    pub fn data(&self) -> &BeamData {
        &self.data
    }

    pub fn params(&self) -> BeamParams {
        self.data.params
    }

    pub fn length(&self) -> f64 {
        self.data.length
    }

    pub fn time(&self) -> f64 {
        self.data.time
    }

    pub fn u_exact(&self) -> Option<&Expr> {
        self.data.u_exact.as_ref()
    }

    /// Same problem on a different time horizon.
    pub fn with_time(&self, time: f64) -> Result<Self> {
        let mut data = self.data.clone();
        data.time = time;
        Self::new(data)
    }

    /// Every datum multiplied by `s` (the solution scales by `s` too).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let k = |e: &Expr| Expr::mul(Expr::constant(s), e.clone());
        let d = &self.data;
        Self::new(BeamData {
            params: d.params,
            length: d.length,
            time: d.time,
            u_exact: d.u_exact.as_ref().map(k),
            xi1: k(&d.xi1),
            xi2: k(&d.xi2),
            mu0: k(&d.mu0),
            mu1: k(&d.mu1),
            mu2: k(&d.mu2),
            mu3: k(&d.mu3),
            f: k(&d.f),
        })
    }
}

/// Uniform space-time grid: `Nx` intervals of width `h = L / Nx` and `Nt`
/// steps of `dt = T / Nt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    nt: usize,
    length: f64,
    time: f64,
}

/// How the time step is tied to the mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtRule {
    /// `dt ≈ h²`, rounded so that a whole number of steps reaches `T`.
    SquareOfH,
    /// `dt ≈ value`, rounded the same way.
    Fixed(f64),
}

impl Grid {
    pub fn new(length: f64, time: f64, nx: usize, nt: usize) -> Result<Self> {
        if nx < 3 {
            return Err(Error::InvalidGrid(format!(
                "Nx must be at least 3, got {nx}"
            )));
        }
        if nt == 0 {
            return Err(Error::InvalidGrid("Nt must be at least 1".into()));
        }
        if !(length > 0.0 && time > 0.0 && length.is_finite() && time.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "domain must be positive, got L = {length}, T = {time}"
            )));
        }
        Ok(Grid {
            nx,
            nt,
            length,
            time,
        })
    }

    pub fn for_problem(problem: &BeamProblem, nx: usize, rule: DtRule) -> Result<Self> {
        Self::with_rule(problem.length(), problem.time(), nx, rule)
    }

    pub fn with_rule(length: f64, time: f64, nx: usize, rule: DtRule) -> Result<Self> {
        let target = match rule {
            DtRule::SquareOfH => (length / nx as f64).powi(2),
            DtRule::Fixed(dt) => dt,
        };
        if !(target.is_finite() && target > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "time step must be positive, got {target}"
            )));
        }
        let nt = (time / target).round().max(1.0) as usize;
        Self::new(length, time, nx, nt)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Number of interior nodes, `Nx - 1`.
    pub fn interior(&self) -> usize {
        self.nx - 1
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn h(&self) -> f64 {
        self.length / self.nx as f64
    }

    pub fn dt(&self) -> f64 {
        self.time / self.nt as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx {
            self.length
        } else {
            i as f64 * self.h()
        }
    }

    pub fn t(&self, n: usize) -> f64 {
        if n == self.nt {
            self.time
        } else {
            n as f64 * self.dt()
        }
    }
}

/// `(Φ, Ψ)` at one time level, interior nodes only.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub time_index: usize,
}

impl StateVector {
    pub fn zeros(interior: usize) -> Self {
        StateVector {
            phi: vec![0.0; interior],
            psi: vec![0.0; interior],
            time_index: 0,
        }
    }

    /// `(φ₁, ψ₁, φ₂, ψ₂, ...)`, the ordering of the banded operators.
    pub fn interleaved(&self) -> Vec<f64> {
        self.phi
            .iter()
            .zip(&self.psi)
            .flat_map(|(a, b)| [*a, *b])
            .collect()
    }

    pub fn from_interleaved(v: &[f64], time_index: usize) -> Self {
        StateVector {
            phi: v.iter().step_by(2).copied().collect(),
            psi: v.iter().skip(1).step_by(2).copied().collect(),
            time_index,
        }
    }

    /// `(Φ, Ψ)` stacked.
    pub fn stacked(&self) -> Vec<f64> {
        self.phi.iter().chain(&self.psi).copied().collect()
    }

    pub fn norm2(&self) -> f64 {
        self.phi
            .iter()
            .chain(&self.psi)
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// Convert a stacked `(first, second)` vector to interleaved ordering.
pub fn interleave(stacked: &[f64]) -> Vec<f64> {
    let n = stacked.len() / 2;
    (0..n).flat_map(|i| [stacked[i], stacked[n + i]]).collect()
}

/// `A = diag_n(1/12, 5/6, 1/12)`.
pub fn build_a(n: usize) -> TridiagMatrix {
    TridiagMatrix::toeplitz(n, COMPACT_SIDE, COMPACT_CENTER, COMPACT_SIDE)
}

/// `B = diag_n(-1, 2, -1) / h²`.
pub fn build_b(n: usize, h: f64) -> TridiagMatrix {
    let s = 1.0 / (h * h);
    TridiagMatrix::toeplitz(n, -s, 2.0 * s, -s)
}

/// Block operators realized on interleaved unknowns (bandwidth 3).
#[derive(Debug, Clone)]
pub struct BlockOperators {
    /// `blockdiag(ρA, A)`.
    pub acal: BandedMatrix,
    /// `[[-cA, EI B], [-B, 0]]`.
    pub bcal: BandedMatrix,
}

impl BlockOperators {
    pub fn dim(&self) -> usize {
        self.acal.n()
    }
}

pub fn assemble_block(params: &BeamParams, grid: &Grid) -> BlockOperators {
    let n = grid.interior();
    let a = build_a(n);
    let b = build_b(n, grid.h());
    let mut acal = BandedMatrix::zeros(2 * n, 3, 3);
    let mut bcal = BandedMatrix::zeros(2 * n, 3, 3);
    for i in 0..n {
        for j in i.saturating_sub(1)..(i + 2).min(n) {
            let (aij, bij) = (a.get(i, j), b.get(i, j));
            acal.set(2 * i, 2 * j, params.rho * aij);
            acal.set(2 * i + 1, 2 * j + 1, aij);
            bcal.set(2 * i, 2 * j, -params.c * aij);
            bcal.set(2 * i, 2 * j + 1, params.ei * bij);
            bcal.set(2 * i + 1, 2 * j, -bij);
        }
    }
    BlockOperators { acal, bcal }
}

/// Dense `𝒜`, `ℬ` in stacked `(Φ, Ψ)` ordering, built block by block.
pub fn dense_blocks(params: &BeamParams, grid: &Grid) -> (DenseMatrix, DenseMatrix) {
    let n = grid.interior();
    let a = build_a(n).to_dense();
    let b = build_b(n, grid.h()).to_dense();
    let z = DenseMatrix::zeros(n, n);
    let acal = DenseMatrix::block2(&a.scale(params.rho), &z, &z, &a).expect("square blocks");
    let bcal = DenseMatrix::block2(&a.scale(-params.c), &b.scale(params.ei), &b.scale(-1.0), &z)
        .expect("square blocks");
    (acal, bcal)
}

/// `F(t)` in stacked order `(F₁, F₂)`.
///
/// `F₁` holds the compact-weighted forcing `(f_{i-1} + 10 f_i + f_{i+1}) / 12`
/// (boundary samples `f₀`, `f_Nx` included) plus the boundary terms in its
/// first and last entries; `F₂` is zero except for its end entries.
pub fn boundary_force(problem: &BeamProblem, grid: &Grid, t: f64) -> Result<Vec<f64>, EvalError> {
    let n = grid.interior();
    let mut out = vec![0.0; 2 * n];
    let mut samples = vec![0.0; grid.nx() + 1];
    boundary_force_into(problem, grid, t, &mut samples, |i, first, second| {
        out[i] = first;
        out[n + i] = second;
    })?;
    Ok(out)
}

/// `F(t)` in interleaved order, written into `out` (length `2 (Nx - 1)`).
/// `samples` is scratch space of length `Nx + 1`.
pub(crate) fn boundary_force_interleaved(
    problem: &BeamProblem,
    grid: &Grid,
    t: f64,
    samples: &mut [f64],
    out: &mut [f64],
) -> Result<(), EvalError> {
    boundary_force_into(problem, grid, t, samples, |i, first, second| {
        out[2 * i] = first;
        out[2 * i + 1] = second;
    })
}

fn boundary_force_into(
    problem: &BeamProblem,
    grid: &Grid,
    t: f64,
    samples: &mut [f64],
    mut put: impl FnMut(usize, f64, f64),
) -> Result<(), EvalError> {
    let n = grid.interior();
    match problem.data.f.as_const() {
        Some(v) => samples.iter_mut().for_each(|s| *s = v),
        None => {
            let xs: Vec<f64> = (0..samples.len()).map(|i| grid.x(i)).collect();
            problem.forcing.eval_many(&xs, t, samples)?;
        }
    }
    let p = problem.params();
    let h = grid.h();
    let (l1, l2) = problem.left.contributions(&p, h, t)?;
    let (r1, r2) = problem.right.contributions(&p, h, t)?;
    for i in 0..n {
        let node = i + 1;
        let mut first = COMPACT_SIDE * samples[node - 1]
            + COMPACT_CENTER * samples[node]
            + COMPACT_SIDE * samples[node + 1];
        let mut second = 0.0;
        if i == 0 {
            first += l1;
            second += l2;
        }
        if i == n - 1 {
            first += r1;
            second += r2;
        }
        put(i, first, second);
    }
    Ok(())
}

/// How the initial moment `Ψ⁰ = u_xx(x, 0)` is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialMoment {
    /// Sample the symbolic second derivative of `ξ₁`.
    #[default]
    Exact,
    /// Solve the compact relation against sampled `ξ₁` with the boundary
    /// moments `μ₂(0)`, `μ₃(0)` moved to the right-hand side.
    Compact,
}

pub fn initial_state(
    problem: &BeamProblem,
    grid: &Grid,
    moment: InitialMoment,
) -> Result<StateVector> {
    let n = grid.interior();
    let d = &problem.data;
    let phi = (1..=n)
        .map(|i| d.xi2.eval(grid.x(i), 0.0))
        .collect::<Result<Vec<_>, _>>()?;
    let psi = match moment {
        InitialMoment::Exact => (1..=n)
            .map(|i| problem.xi1_xx.eval(grid.x(i), 0.0))
            .collect::<Result<Vec<_>, _>>()?,
        InitialMoment::Compact => {
            let h2 = grid.h() * grid.h();
            let u = (0..=grid.nx())
                .map(|i| d.xi1.eval(grid.x(i), 0.0))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rhs: Vec<f64> = (1..=n)
                .map(|i| (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2)
                .collect();
            rhs[0] -= COMPACT_SIDE * d.mu2.eval(0.0, 0.0)?;
            rhs[n - 1] -= COMPACT_SIDE * d.mu3.eval(grid.length(), 0.0)?;
            tridiag_solve(&build_a(n), &rhs)?
        }
    };
    Ok(StateVector {
        phi,
        psi,
        time_index: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::linalg::eigenvalues;
    use std::f64::consts::PI;

    fn manufactured(src: &str, ei: f64, rho: f64, c: f64) -> BeamProblem {
        BeamProblem::manufactured(parse(src).unwrap(), BeamParams::new(ei, rho, c), 1.0, 1.0)
            .unwrap()
    }

    #[test]
    fn compact_matrix_entries() {
        let a = build_a(3).to_dense();
        let want = [
            [5.0 / 6.0, 1.0 / 12.0, 0.0],
            [1.0 / 12.0, 5.0 / 6.0, 1.0 / 12.0],
            [0.0, 1.0 / 12.0, 5.0 / 6.0],
        ];
        for (i, row) in want.iter().enumerate() {
            assert_eq!(a.row(i), row);
        }
        assert_eq!(build_a(1).to_dense().as_slice(), &[5.0 / 6.0]);
        let interior_sum: f64 = build_a(5).to_dense().row(2).iter().sum();
        assert_eq!(interior_sum, 1.0);
    }

    #[test]
    fn second_difference_matrix_entries() {
        let b = build_b(3, 1.0).to_dense();
        assert_eq!(b.row(0), &[2.0, -1.0, 0.0]);
        assert_eq!(b.row(1), &[-1.0, 2.0, -1.0]);
        assert_eq!(b.row(2), &[0.0, -1.0, 2.0]);
        let b2 = build_b(3, 0.5);
        assert_eq!(b2.get(1, 1), 8.0);
        assert_eq!(b2.get(1, 0), -4.0);
    }

    /// Max interior error of `-B u ≈ u_xx` and of `A u_xx ≈ -B u` for sin(pi x).
    fn difference_residuals(nx: usize) -> (f64, f64) {
        let h = 1.0 / nx as f64;
        let n = nx - 1;
        let u: Vec<f64> = (1..=n).map(|i| (PI * i as f64 * h).sin()).collect();
        let uxx: Vec<f64> = u.iter().map(|v| -PI * PI * v).collect();
        // Boundary values vanish, so no boundary terms.
        let neg_bu: Vec<f64> = build_b(n, h).mul_vec(&u).iter().map(|v| -v).collect();
        let auxx = build_a(n).mul_vec(&uxx);
        let plain = neg_bu
            .iter()
            .zip(&uxx)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let compact = neg_bu
            .iter()
            .zip(&auxx)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        (plain, compact)
    }

    #[test]
    fn compact_relation_is_fourth_order() {
        let (p32, c32) = difference_residuals(32);
        let (p64, c64) = difference_residuals(64);
        let plain_order = (p32 / p64).log2();
        let compact_order = (c32 / c64).log2();
        assert!((plain_order - 2.0).abs() < 0.05, "{plain_order}");
        assert!((compact_order - 4.0).abs() < 0.1, "{compact_order}");
    }

    #[test]
    fn banded_blocks_match_dense_construction() {
        let p = BeamParams::new(1.0, 1.0, 1.0);
        let grid = Grid::new(1.0, 1.0, 4, 4).unwrap();
        let ops = assemble_block(&p, &grid);
        let (acal, bcal) = dense_blocks(&p, &grid);
        // Hand-written blocks, h = 1/4 so 1/h² = 16.
        let a = [
            [5.0 / 6.0, 1.0 / 12.0, 0.0],
            [1.0 / 12.0, 5.0 / 6.0, 1.0 / 12.0],
            [0.0, 1.0 / 12.0, 5.0 / 6.0],
        ];
        let b = [[32.0, -16.0, 0.0], [-16.0, 32.0, -16.0], [0.0, -16.0, 32.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(acal.get(i, j), a[i][j]);
                assert_eq!(acal.get(i + 3, j + 3), a[i][j]);
                assert_eq!(acal.get(i, j + 3), 0.0);
                assert_eq!(bcal.get(i, j), -a[i][j]);
                assert_eq!(bcal.get(i, j + 3), b[i][j]);
                assert_eq!(bcal.get(i + 3, j), -b[i][j]);
                assert_eq!(bcal.get(i + 3, j + 3), 0.0);
            }
        }
        // Interleaved position of stacked index k.
        let pos = |k: usize| if k < 3 { 2 * k } else { 2 * (k - 3) + 1 };
        for r in 0..6 {
            for c in 0..6 {
                assert_eq!(ops.acal.get(pos(r), pos(c)), acal.get(r, c));
                assert_eq!(ops.bcal.get(pos(r), pos(c)), bcal.get(r, c));
            }
        }
    }

    #[test]
    fn unit_density_gives_blockdiag_a() {
        let grid = Grid::new(1.0, 1.0, 6, 6).unwrap();
        let (acal, _) = dense_blocks(&BeamParams::new(3.0, 1.0, 2.0), &grid);
        let a = build_a(5).to_dense();
        let z = DenseMatrix::zeros(5, 5);
        assert_eq!(acal, DenseMatrix::block2(&a, &z, &z, &a).unwrap());
    }

    #[test]
    fn semi_discrete_spectrum_in_left_half_plane() {
        let p = BeamParams::new(98.0, 0.685, 0.75);
        let grid = Grid::new(1.0, 1.0, 8, 64).unwrap();
        let (acal, bcal) = dense_blocks(&p, &grid);
        let c = acal.solve_matrix(&bcal).unwrap();
        let s = eigenvalues(&c);
        assert!(s.converged);
        assert!(s.max_real_part() <= 1e-10, "{}", s.max_real_part());
    }

    #[test]
    fn homogeneous_data_gives_zero_force() {
        let p = manufactured("0", 2.0, 1.0, 0.5);
        let grid = Grid::new(1.0, 1.0, 10, 10).unwrap();
        assert!(boundary_force(&p, &grid, 0.3)
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn boundary_terms_match_hand_evaluation() {
        // u = sinh(t) cos(pi x): mu0 = sinh t, mu2 = -pi² sinh t, mu1 = -sinh t,
        // mu3 = pi² sinh t.
        let (ei, rho, c) = (1.0, 1.0, 1.0);
        let p = manufactured("sinh(t)*cos(pi*x)", ei, rho, c);
        let grid = Grid::new(1.0, 1.0, 16, 16).unwrap();
        let (h, t) = (grid.h(), 0.5_f64);
        let n = grid.interior();
        let force = boundary_force(&p, &grid, t).unwrap();
        let f = p.data().f.clone();
        let fs = |i: usize| f.eval(grid.x(i), t).unwrap();
        let alpha =
            -ei * (-PI * PI * t.sinh()) / (h * h) - rho * t.sinh() / 12.0 - c * t.cosh() / 12.0;
        let alpha2 = t.cosh() / (h * h) - (-PI * PI * t.cosh()) / 12.0;
        let weighted = |i: usize| (fs(i - 1) + 10.0 * fs(i) + fs(i + 1)) / 12.0;
        assert!((force[0] - (weighted(1) + alpha)).abs() < 1e-9 * force[0].abs());
        assert!((force[n] - alpha2).abs() < 1e-12 * alpha2.abs());
        let beta =
            -ei * (PI * PI * t.sinh()) / (h * h) + rho * t.sinh() / 12.0 + c * t.cosh() / 12.0;
        let beta2 = -t.cosh() / (h * h) - (PI * PI * t.cosh()) / 12.0;
        assert!((force[n - 1] - (weighted(n) + beta)).abs() < 1e-9 * force[n - 1].abs());
        assert!((force[2 * n - 1] - beta2).abs() < 1e-12 * beta2.abs());
        for i in 2..n - 1 {
            assert!((force[i - 1] - weighted(i)).abs() < 1e-12 * weighted(i).abs().max(1.0));
            assert_eq!(force[n + i - 1], 0.0);
        }
    }

    #[test]
    fn force_is_linear_in_data() {
        let p = manufactured("sinh(t)*cos(pi*x) + x^3*t", 2.0, 0.5, 0.25);
        let grid = Grid::new(1.0, 1.0, 12, 12).unwrap();
        let f1 = boundary_force(&p, &grid, 0.7).unwrap();
        let f2 = boundary_force(&p.scaled(2.0).unwrap(), &grid, 0.7).unwrap();
        for (a, b) in f1.iter().zip(&f2) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn zero_initial_displacement_gives_zero_moment() {
        let p = manufactured("sinh(t)*cos(pi*x)", 1.0, 1.0, 1.0);
        let grid = Grid::new(1.0, 1.0, 16, 16).unwrap();
        for mode in [InitialMoment::Exact, InitialMoment::Compact] {
            let s = initial_state(&p, &grid, mode).unwrap();
            assert!(s.psi.iter().all(|v| v.abs() < 1e-12));
            for (i, phi) in s.phi.iter().enumerate() {
                assert!((phi - (PI * grid.x(i + 1)).cos()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn compact_initial_moment_is_fourth_order() {
        let p = manufactured("sin(pi*x)*cos(pi*t)", 98.0, 0.685, 0.75);
        let errs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&nx| {
                let grid = Grid::new(1.0, 1.0, nx, 1).unwrap();
                let s = initial_state(&p, &grid, InitialMoment::Compact).unwrap();
                s.psi
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v + PI * PI * (PI * grid.x(i + 1)).sin()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 4.0).abs() < 0.1, "order {order}");
        }
    }

    #[test]
    fn invalid_problems_are_rejected() {
        let u = parse("sin(pi*x)").unwrap();
        assert!(
            BeamProblem::manufactured(u.clone(), BeamParams::new(0.0, 1.0, 1.0), 1.0, 1.0).is_err()
        );
        assert!(
            BeamProblem::manufactured(u.clone(), BeamParams::new(1.0, -1.0, 1.0), 1.0, 1.0)
                .is_err()
        );
        assert!(
            BeamProblem::manufactured(u.clone(), BeamParams::new(1.0, 1.0, -0.1), 1.0, 1.0)
                .is_err()
        );
        assert!(
            BeamProblem::manufactured(u.clone(), BeamParams::new(1.0, 1.0, 0.0), 1.0, 1.0).is_ok()
        );
        assert!(BeamProblem::manufactured(u, BeamParams::new(1.0, 1.0, 1.0), 1.0, 0.0).is_err());
        let mut d = manufactured("sin(pi*x)", 1.0, 1.0, 1.0).data().clone();
        d.mu0 = Expr::constant(1.0);
        assert!(matches!(BeamProblem::new(d), Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn grid_rules() {
        let g = Grid::with_rule(1.0, 1.0, 32, DtRule::SquareOfH).unwrap();
        assert_eq!(g.nt(), 1024);
        assert_eq!(g.dt(), 1.0 / 1024.0);
        let g = Grid::with_rule(1.0, 1.0, 100, DtRule::Fixed(0.005)).unwrap();
        assert_eq!(g.nt(), 200);
        assert_eq!(g.x(100), 1.0);
        assert_eq!(g.t(200), 1.0);
        assert!(Grid::new(1.0, 1.0, 2, 1).is_err());
    }

    #[test]
    fn state_orderings_round_trip() {
        let s = StateVector {
            phi: vec![1.0, 2.0, 3.0],
            psi: vec![4.0, 5.0, 6.0],
            time_index: 7,
        };
        assert_eq!(s.interleaved(), vec![1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(StateVector::from_interleaved(&s.interleaved(), 7), s);
        assert_eq!(interleave(&s.stacked()), s.interleaved());
    }
}
