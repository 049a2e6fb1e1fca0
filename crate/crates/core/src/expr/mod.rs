//! The expression language: AST, parser and evaluator.

mod ast;
mod eval;
mod parse;

pub use ast::{Arg, Expr, Func, JpItem};
pub use eval::{coefficient, eval, EvalError, EvalErrorKind, Evaluator};
pub use parse::{parse, ParseError, ParseErrorKind};
