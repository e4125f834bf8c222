//! Closed-form expressions in `(x, t)`: parsing, evaluation and exact
//! symbolic differentiation. Used for exact solutions, boundary traces and
//! manufactured forcing terms.

mod ast;
mod compile;
mod diff;
mod parse;

pub use ast::{BinOp, EvalError, Expr, Func, Var};
pub use compile::Compiled;
pub use diff::manufacture_forcing;
pub use parse::{parse, ParseError};
