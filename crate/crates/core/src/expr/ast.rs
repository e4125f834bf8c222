use std::fmt;

use thiserror::Error;

/// Independent variable of a space-time expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::T => "t",
        }
    }
}

/// Elementary functions accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Sinh, Func::Cosh, Func::Exp];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    #[inline]
    pub(super) fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
            Func::Exp => v.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => PREC_SUM,
            BinOp::Mul | BinOp::Div => PREC_PRODUCT,
        }
    }
}

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
}

/// A closed-form expression in `x` and `t`.
///
/// Values are immutable trees; the smart constructors ([`Expr::add`],
/// [`Expr::mul`], ...) fold constants and drop additive/multiplicative
/// identities, while the parser builds nodes verbatim.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Func(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power. The exponent is part of the node, never an expression.
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(v) => Expr::Const(-v),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(z), _) if z == 0.0 => b,
            (_, Some(z)) if z == 0.0 => a,
            _ => match b {
                Expr::Neg(nb) => Expr::Binary(BinOp::Sub, Box::new(a), nb),
                b => Expr::Binary(BinOp::Add, Box::new(a), Box::new(b)),
            },
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(z), _) if z == 0.0 => Expr::neg(b),
            (_, Some(z)) if z == 0.0 => a,
            _ => match b {
                Expr::Neg(nb) => Expr::Binary(BinOp::Add, Box::new(a), nb),
                b => Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b)),
            },
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::zero();
        }
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            (Some(m), _) if m == -1.0 => Expr::neg(b),
            (_, Some(m)) if m == -1.0 => Expr::neg(a),
            _ => match (a, b) {
                (Expr::Neg(na), Expr::Neg(nb)) => Expr::mul(*na, *nb),
                (Expr::Neg(na), b) => Expr::neg(Expr::mul(*na, b)),
                (a, Expr::Neg(nb)) => Expr::neg(Expr::mul(a, *nb)),
                // Keep numeric coefficients on the left so they fold together.
                (a, Expr::Const(c)) => Expr::mul(Expr::Const(c), a),
                (Expr::Const(c), Expr::Binary(BinOp::Mul, l, r)) if l.as_const().is_some() => {
                    let lc = l.as_const().unwrap_or(1.0);
                    Expr::mul(Expr::Const(c * lc), *r)
                }
                (a, b) => Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b)),
            },
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (_, Some(z)) if z == 0.0 => Expr::Binary(BinOp::Div, Box::new(a), Box::new(b)),
            (Some(x), Some(y)) => Expr::Const(x / y),
            (Some(z), _) if z == 0.0 => Expr::zero(),
            _ if b.is_one() => a,
            _ => Expr::Binary(BinOp::Div, Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(base: Expr, exponent: i32) -> Expr {
        match (exponent, base.as_const()) {
            (0, _) => Expr::one(),
            (1, _) => base,
            (n, Some(c)) if c != 0.0 || n > 0 => Expr::Const(c.powi(n)),
            _ => Expr::Pow(Box::new(base), exponent),
        }
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        match arg.as_const() {
            Some(c) => Expr::Const(f.apply(c)),
            None => Expr::Func(f, Box::new(arg)),
        }
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::func(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::func(Func::Cos, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func(Func::Exp, arg)
    }

    /// Rebuild the tree through the folding constructors.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::neg(a.simplify()),
            Expr::Func(f, a) => Expr::func(*f, a.simplify()),
            Expr::Pow(a, n) => Expr::pow(a.simplify(), *n),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match op {
                    BinOp::Add => Expr::add(a, b),
                    BinOp::Sub => Expr::sub(a, b),
                    BinOp::Mul => Expr::mul(a, b),
                    BinOp::Div => Expr::div(a, b),
                }
            }
        }
    }

    /// Substitute a constant for one variable, folding what becomes constant.
    pub fn substitute(&self, var: Var, value: f64) -> Expr {
        match self {
            Expr::Var(v) if *v == var => Expr::Const(value),
            Expr::Const(_) | Expr::Pi | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(var, value)),
            Expr::Func(f, a) => Expr::func(*f, a.substitute(var, value)),
            Expr::Pow(a, n) => Expr::pow(a.substitute(var, value), *n),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.substitute(var, value), b.substitute(var, value));
                match op {
                    BinOp::Add => Expr::add(a, b),
                    BinOp::Sub => Expr::sub(a, b),
                    BinOp::Mul => Expr::mul(a, b),
                    BinOp::Div => Expr::div(a, b),
                }
            }
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Const(_) | Expr::Pi => false,
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Pow(a, _) => a.depends_on(var),
            Expr::Binary(_, a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Pow(a, _) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::T) => t,
            Expr::Neg(a) => -a.eval(x, t)?,
            Expr::Func(f, a) => f.apply(a.eval(x, t)?),
            Expr::Pow(a, n) => {
                let b = a.eval(x, t)?;
                if *n < 0 && b == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                b.powi(*n)
            }
            Expr::Binary(op, a, b) => {
                let (l, r) = (a.eval(x, t)?, b.eval(x, t)?);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        l / r
                    }
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(v) if v.is_sign_negative() => PREC_NEG,
            Expr::Const(_) | Expr::Pi | Expr::Var(_) | Expr::Func(..) => PREC_ATOM,
            Expr::Neg(_) => PREC_NEG,
            Expr::Pow(..) => PREC_POW,
            Expr::Binary(op, ..) => op.precedence(),
        }
    }

    fn write_with(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.precedence() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Const(v) => write!(f, "{v:?}")?,
            Expr::Pi => f.write_str("pi")?,
            Expr::Var(v) => f.write_str(v.name())?,
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_with(f, PREC_NEG)?;
            }
            Expr::Func(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write_with(f, 0)?;
                f.write_str(")")?;
            }
            Expr::Pow(a, n) => {
                a.write_with(f, PREC_ATOM)?;
                if *n < 0 {
                    write!(f, "^({n})")?;
                } else {
                    write!(f, "^{n}")?;
                }
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                a.write_with(f, p)?;
                write!(f, " {} ", op.symbol())?;
                b.write_with(f, p + 1)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_drops_identities() {
        let e = Expr::add(Expr::mul(Expr::one(), Expr::x()), Expr::zero());
        assert_eq!(e, Expr::x());
        assert_eq!(Expr::mul(Expr::x(), Expr::zero()), Expr::zero());
        assert_eq!(Expr::neg(Expr::neg(Expr::t())), Expr::t());
        assert_eq!(Expr::pow(Expr::x(), 0), Expr::one());
        assert_eq!(
            Expr::mul(
                Expr::constant(2.0),
                Expr::mul(Expr::constant(3.0), Expr::x())
            ),
            Expr::mul(Expr::constant(6.0), Expr::x())
        );
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = Expr::div(Expr::one(), Expr::x());
        assert_eq!(e.eval(0.0, 1.0), Err(EvalError::DivisionByZero));
        let p = Expr::pow(Expr::t(), -2);
        assert_eq!(p.eval(1.0, 0.0), Err(EvalError::DivisionByZero));
        assert_eq!(p.eval(1.0, 2.0), Ok(0.25));
    }

    #[test]
    fn display_parenthesizes_by_precedence() {
        let e = Expr::Binary(
            BinOp::Sub,
            Box::new(Expr::x()),
            Box::new(Expr::Binary(
                BinOp::Sub,
                Box::new(Expr::t()),
                Box::new(Expr::one()),
            )),
        );
        assert_eq!(e.to_string(), "x - (t - 1.0)");
        let p = Expr::Pow(Box::new(Expr::Neg(Box::new(Expr::x()))), -2);
        assert_eq!(p.to_string(), "(-x)^(-2)");
    }

    #[test]
    fn substitute_folds_to_constant() {
        let e = Expr::mul(Expr::sin(Expr::mul(Expr::Pi, Expr::x())), Expr::t());
        let at = e.substitute(Var::T, 0.0);
        assert!(at.is_zero());
        assert!(!e.substitute(Var::X, 0.3).depends_on(Var::X));
    }
}
