//! Flat evaluation program for an [`Expr`].
//!
//! Structurally equal subtrees share one slot, and slots that do not depend
//! on `x` are computed once per call of [`Compiled::eval_many`]. Every slot
//! performs the same floating-point operation as the tree walk, so results
//! are bit-identical to [`Expr::eval`].

use std::collections::HashMap;

use super::ast::{BinOp, EvalError, Expr, Func, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    Const(u64),
    X,
    T,
    Neg(usize),
    Func(Func, usize),
    Bin(BinOp, usize, usize),
    Pow(usize, i32),
}

#[derive(Debug, Clone)]
pub struct Compiled {
    ops: Vec<Op>,
    /// Slots depending on `x`, in evaluation order.
    varying: Vec<usize>,
    /// Slots independent of `x`, in evaluation order.
    fixed: Vec<usize>,
    root: usize,
}

struct Builder {
    ops: Vec<Op>,
    uses_x: Vec<bool>,
    index: HashMap<Op, usize>,
}

impl Builder {
    fn push(&mut self, op: Op) -> usize {
        if let Some(&i) = self.index.get(&op) {
            return i;
        }
        let uses_x = match op {
            Op::X => true,
            Op::Const(_) | Op::T => false,
            Op::Neg(a) | Op::Func(_, a) | Op::Pow(a, _) => self.uses_x[a],
            Op::Bin(_, a, b) => self.uses_x[a] || self.uses_x[b],
        };
        self.ops.push(op);
        self.uses_x.push(uses_x);
        self.index.insert(op, self.ops.len() - 1);
        self.ops.len() - 1
    }

    fn lower(&mut self, e: &Expr) -> usize {
        let op = match e {
            Expr::Const(v) => Op::Const(v.to_bits()),
            Expr::Pi => Op::Const(std::f64::consts::PI.to_bits()),
            Expr::Var(Var::X) => Op::X,
            Expr::Var(Var::T) => Op::T,
            Expr::Neg(a) => Op::Neg(self.lower(a)),
            Expr::Func(f, a) => Op::Func(*f, self.lower(a)),
            Expr::Pow(a, n) => Op::Pow(self.lower(a), *n),
            Expr::Binary(op, a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                Op::Bin(*op, a, b)
            }
        };
        self.push(op)
    }
}

impl Compiled {
    pub fn new(e: &Expr) -> Self {
        let mut b = Builder {
            ops: Vec::new(),
            uses_x: Vec::new(),
            index: HashMap::new(),
        };
        let root = b.lower(e);
        let (varying, fixed) = (0..b.ops.len()).partition(|&i| b.uses_x[i]);
        Compiled {
            ops: b.ops,
            varying,
            fixed,
            root,
        }
    }

    /// Number of distinct slots.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    #[inline]
    fn exec(&self, i: usize, regs: &mut [f64], x: f64, t: f64) -> Result<(), EvalError> {
        regs[i] = match self.ops[i] {
            Op::Const(bits) => f64::from_bits(bits),
            Op::X => x,
            Op::T => t,
            Op::Neg(a) => -regs[a],
            Op::Func(f, a) => f.apply(regs[a]),
            Op::Pow(a, n) => {
                if n < 0 && regs[a] == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                regs[a].powi(n)
            }
            Op::Bin(op, a, b) => {
                let (l, r) = (regs[a], regs[b]);
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
        };
        Ok(())
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64, EvalError> {
        let mut regs = vec![0.0; self.ops.len()];
        for i in 0..self.ops.len() {
            self.exec(i, &mut regs, x, t)?;
        }
        Ok(regs[self.root])
    }

    /// `out[k] = e(xs[k], t)`. `out` must be as long as `xs`.
    pub fn eval_many(&self, xs: &[f64], t: f64, out: &mut [f64]) -> Result<(), EvalError> {
        assert_eq!(xs.len(), out.len(), "output length must match inputs");
        let mut regs = vec![0.0; self.ops.len()];
        for &i in &self.fixed {
            self.exec(i, &mut regs, 0.0, t)?;
        }
        for (x, o) in xs.iter().zip(out.iter_mut()) {
            for &i in &self.varying {
                self.exec(i, &mut regs, *x, t)?;
            }
            *o = regs[self.root];
        }
        Ok(())
    }
}

impl Expr {
    pub fn compile(&self) -> Compiled {
        Compiled::new(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{manufacture_forcing, parse};

    #[test]
    fn shares_common_subtrees() {
        let u = parse("exp(-t)*sin(pi*x)").unwrap();
        let f = manufacture_forcing(&u, 98.0, 0.68, 7.5);
        let c = f.compile();
        let calls = c.ops.iter().filter(|op| matches!(op, Op::Func(..))).count();
        assert_eq!(calls, 2);
        assert!(c.len() < f.size());
    }

    #[test]
    fn matches_tree_walk_bitwise() {
        for src in [
            "sin(pi*x)*cos(pi*t)",
            "sinh(t)*cos(pi*x) + x^-2",
            "(x - t)/(1 + x*x)",
            "7",
        ] {
            let e = parse(src).unwrap();
            let c = e.compile();
            let xs: Vec<f64> = (1..20).map(|i| i as f64 / 19.0).collect();
            let mut out = vec![0.0; xs.len()];
            c.eval_many(&xs, 0.37, &mut out).unwrap();
            for (x, v) in xs.iter().zip(&out) {
                assert_eq!(v.to_bits(), e.eval(*x, 0.37).unwrap().to_bits(), "{src}");
                assert_eq!(c.eval(*x, 0.37).unwrap().to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn division_by_zero_is_reported() {
        let c = parse("1/(x - 0.5)").unwrap().compile();
        let mut out = [0.0; 3];
        assert_eq!(
            c.eval_many(&[0.0, 0.5, 1.0], 0.0, &mut out),
            Err(EvalError::DivisionByZero)
        );
        assert_eq!(
            parse("t^-1").unwrap().compile().eval(1.0, 0.0),
            Err(EvalError::DivisionByZero)
        );
    }
}
