use super::ast::{BinOp, Expr, Func, Var};

impl Expr {
    /// Exact partial derivative with respect to `var`.
    ///
    /// The grammar is closed under differentiation: every rule maps onto
    /// nodes the parser already accepts.
    pub fn diff(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) | Expr::Pi => Expr::zero(),
            Expr::Var(v) => {
                if *v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(a) => Expr::neg(a.diff(var)),
            Expr::Binary(op, a, b) => {
                let (da, db) = (a.diff(var), b.diff(var));
                match op {
                    BinOp::Add => Expr::add(da, db),
                    BinOp::Sub => Expr::sub(da, db),
                    BinOp::Mul => Expr::add(
                        Expr::mul(da, b.as_ref().clone()),
                        Expr::mul(a.as_ref().clone(), db),
                    ),
                    BinOp::Div => {
                        if db.is_zero() {
                            Expr::div(da, b.as_ref().clone())
                        } else {
                            Expr::div(
                                Expr::sub(
                                    Expr::mul(da, b.as_ref().clone()),
                                    Expr::mul(a.as_ref().clone(), db),
                                ),
                                Expr::pow(b.as_ref().clone(), 2),
                            )
                        }
                    }
                }
            }
            Expr::Pow(a, n) => Expr::mul(
                Expr::mul(
                    Expr::constant(f64::from(*n)),
                    Expr::pow(a.as_ref().clone(), n - 1),
                ),
                a.diff(var),
            ),
            Expr::Func(f, a) => {
                let da = a.diff(var);
                if da.is_zero() {
                    return Expr::zero();
                }
                let inner = a.as_ref().clone();
                let outer = match f {
                    Func::Sin => Expr::func(Func::Cos, inner),
                    Func::Cos => Expr::neg(Expr::func(Func::Sin, inner)),
                    Func::Sinh => Expr::func(Func::Cosh, inner),
                    Func::Cosh => Expr::func(Func::Sinh, inner),
                    Func::Exp => Expr::func(Func::Exp, inner),
                };
                Expr::mul(outer, da)
            }
        }
    }

    /// `order`-fold derivative in one variable.
    pub fn diff_n(&self, var: Var, order: usize) -> Expr {
        (0..order).fold(self.clone(), |e, _| e.diff(var))
    }
}

/// Forcing that makes `u` an exact solution of the damped beam equation,
/// `EI u_xxxx + rho u_tt + c u_t`.
pub fn manufacture_forcing(u: &Expr, ei: f64, rho: f64, c: f64) -> Expr {
    let u_t = u.diff(Var::T);
    let stiffness = Expr::mul(Expr::constant(ei), u.diff_n(Var::X, 4));
    let inertia = Expr::mul(Expr::constant(rho), u_t.diff(Var::T));
    let damping = Expr::mul(Expr::constant(c), u_t);
    Expr::add(Expr::add(stiffness, inertia), damping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::f64::consts::PI;

    #[test]
    fn derivative_of_sine() {
        let d = parse("sin(pi*x)").unwrap().diff(Var::X);
        assert!((d.eval(0.0, 0.0).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert!(parse("3.5").unwrap().diff(Var::T).is_zero());
        assert!(parse("sin(pi*x)").unwrap().diff(Var::T).is_zero());
    }

    #[test]
    fn fourth_derivative_matches_richardson_finite_differences() {
        // Oracle: central fourth difference of eval at h and h/2, Richardson
        // extrapolated (error O(h^4)).
        let e = parse("sin(pi*x)").unwrap();
        let f = |x: f64| e.eval(x, 0.0).unwrap();
        let d4 = |x: f64, h: f64| {
            (f(x - 2.0 * h) - 4.0 * f(x - h) + 6.0 * f(x) - 4.0 * f(x + h) + f(x + 2.0 * h))
                / h.powi(4)
        };
        let h = 1e-2;
        let richardson = (4.0 * d4(0.5, h / 2.0) - d4(0.5, h)) / 3.0;
        let symbolic = e.diff_n(Var::X, 4).eval(0.5, 0.0).unwrap();
        assert!((symbolic - PI.powi(4)).abs() < 1e-11);
        assert!((richardson - symbolic).abs() / symbolic < 1e-5);
    }

    #[test]
    fn quotient_and_power_rules() {
        let e = parse("x^3/(1+t^2)").unwrap();
        let (x, t) = (0.7, 1.3);
        let dx = e.diff(Var::X).eval(x, t).unwrap();
        let dt = e.diff(Var::T).eval(x, t).unwrap();
        assert!((dx - 3.0 * x * x / (1.0 + t * t)).abs() < 1e-14);
        let expected_dt = -x.powi(3) * 2.0 * t / (1.0 + t * t).powi(2);
        assert!((dt - expected_dt).abs() < 1e-14);
    }

    #[test]
    fn forcing_for_cosine_in_time() {
        // f = (98 pi^4 - 0.685 pi^2) sin(pi x) cos(pi t) - 0.75 pi sin(pi x) sin(pi t)
        let u = parse("sin(pi*x)*cos(pi*t)").unwrap();
        let f = manufacture_forcing(&u, 98.0, 0.685, 0.75);
        for &(x, t) in &[(0.1, 0.2), (0.5, 0.9), (0.77, 0.33)] {
            let hand = (98.0 * PI.powi(4) - 0.685 * PI * PI) * (PI * x).sin() * (PI * t).cos()
                - 0.75 * PI * (PI * x).sin() * (PI * t).sin();
            assert!((f.eval(x, t).unwrap() - hand).abs() < 1e-10 * hand.abs().max(1.0));
        }
    }

    #[test]
    fn forcing_for_decaying_mode() {
        let u = parse("exp(-t)*sin(pi*x)").unwrap();
        let f = manufacture_forcing(&u, 98.0, 0.68, 7.5);
        let (x, t): (f64, f64) = (0.3, 0.6);
        let hand = (98.0 * PI.powi(4) + 0.68 - 7.5) * (-t).exp() * (PI * x).sin();
        assert!((f.eval(x, t).unwrap() - hand).abs() < 1e-10 * hand.abs());
    }

    #[test]
    fn zero_solution_needs_zero_forcing() {
        let f = manufacture_forcing(&Expr::zero(), 98.0, 0.685, 0.75);
        assert!(f.is_zero());
    }
}
