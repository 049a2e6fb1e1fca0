use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::qproducts::{PochFactor, ProductError, QProduct, Sign};

/// Named functions of `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    G,
    H,
    R,
    Rinv,
    Phi,
    Psi,
    K,
}

impl Func {
    pub const ALL: [Func; 7] = [Func::G, Func::H, Func::R, Func::Rinv, Func::Phi, Func::Psi, Func::K];

    pub fn name(self) -> &'static str {
        match self {
            Func::G => "G",
            Func::H => "H",
            Func::R => "R",
            Func::Rinv => "Rinv",
            Func::Phi => "phi",
            Func::Psi => "psi",
            Func::K => "k",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Argument `±q^power` of a named function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arg {
    pub negate: bool,
    pub power: u64,
}

impl Arg {
    pub const Q: Arg = Arg { negate: false, power: 1 };
}

/// One entry `±q^offset` of a matrix product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JpItem {
    pub sign: Sign,
    pub offset: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Q,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(Func, Arg),
    /// `q -> q^m` applied to a whole subexpression.
    Subst(Box<Expr>, u64),
    /// `(numerator; denominator; q^modulus)_∞`.
    Jp { numerator: Vec<JpItem>, denominator: Vec<JpItem>, modulus: u64 },
    /// `$name`, a reference to a named definition.
    Ref(String),
}

impl Expr {
    pub fn call(f: Func) -> Expr {
        Expr::Call(f, Arg::Q)
    }

    pub fn q_pow(k: i64) -> Expr {
        if k == 1 {
            Expr::Q
        } else {
            Expr::Pow(Box::new(Expr::Q), k)
        }
    }

    /// The product this `Jp` node stands for.
    pub fn jp_product(&self) -> Option<Result<QProduct, ProductError>> {
        let Expr::Jp { numerator, denominator, modulus } = self else {
            return None;
        };
        let mut p = QProduct::new();
        let entries = numerator.iter().map(|i| (i, 1)).chain(denominator.iter().map(|i| (i, -1)));
        for (item, power) in entries {
            match PochFactor::new(item.sign, item.offset, *modulus, power) {
                Ok(f) => p.push(f),
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok(p))
    }

    /// Replaces every `$name` with the expression `lookup` returns for it.
    pub fn resolve<E>(&self, lookup: &mut dyn FnMut(&str) -> Result<Expr, E>) -> Result<Expr, E> {
        fn sub<E>(e: &Expr, l: &mut dyn FnMut(&str) -> Result<Expr, E>) -> Result<Box<Expr>, E> {
            e.resolve(l).map(Box::new)
        }
        Ok(match self {
            Expr::Ref(name) => lookup(name)?,
            Expr::Add(a, b) => Expr::Add(sub(a, lookup)?, sub(b, lookup)?),
            Expr::Sub(a, b) => Expr::Sub(sub(a, lookup)?, sub(b, lookup)?),
            Expr::Mul(a, b) => Expr::Mul(sub(a, lookup)?, sub(b, lookup)?),
            Expr::Div(a, b) => Expr::Div(sub(a, lookup)?, sub(b, lookup)?),
            Expr::Neg(a) => Expr::Neg(sub(a, lookup)?),
            Expr::Pow(a, k) => Expr::Pow(sub(a, lookup)?, *k),
            Expr::Subst(a, m) => Expr::Subst(sub(a, lookup)?, *m),
            leaf => leaf.clone(),
        })
    }

    /// Every `Jp` node, in left-to-right order.
    pub fn products(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if matches!(e, Expr::Jp { .. }) {
                out.push(e);
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Subst(a, _) => a.visit(f),
            _ => {}
        }
    }
}

// Printing. Precedence levels: 0 sum, 1 product, 2 unary minus, 3 atom.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 0,
        Expr::Mul(..) | Expr::Div(..) => 1,
        Expr::Neg(..) => 2,
        Expr::Pow(..) => 2,
        _ => 3,
    }
}

struct Wrapped<'a>(&'a Expr, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn write_q_power(f: &mut fmt::Formatter<'_>, negate: bool, power: u64) -> fmt::Result {
    if negate {
        f.write_str("-")?;
    }
    if power == 1 {
        f.write_str("q")
    } else {
        write!(f, "q^{power}")
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[JpItem]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write_q_power(f, item.sign == Sign::Minus, item.offset)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) if *n < 0 => write!(f, "({n})"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Q => f.write_str("q"),
            Expr::Add(a, b) => write!(f, "{} + {}", a, Wrapped(b, level(b) == 0)),
            Expr::Sub(a, b) => write!(f, "{} - {}", a, Wrapped(b, level(b) == 0)),
            Expr::Mul(a, b) => {
                write!(f, "{}*{}", Wrapped(a, level(a) == 0), Wrapped(b, level(b) <= 1))
            }
            Expr::Div(a, b) => {
                write!(f, "{}/{}", Wrapped(a, level(a) == 0), Wrapped(b, level(b) <= 1))
            }
            Expr::Neg(a) => write!(f, "-{}", Wrapped(a, level(a) <= 1)),
            Expr::Pow(a, k) => write!(f, "{}^{}", Wrapped(a, level(a) < 3), k),
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                write_q_power(f, arg.negate, arg.power)?;
                f.write_str(")")
            }
            Expr::Subst(a, m) => write!(f, "subst({a}, {m})"),
            Expr::Jp { numerator, denominator, modulus } => {
                f.write_str("JP(")?;
                write_items(f, numerator)?;
                f.write_str("; ")?;
                write_items(f, denominator)?;
                f.write_str("; ")?;
                write_q_power(f, false, *modulus)?;
                f.write_str(")")
            }
            Expr::Ref(name) => write!(f, "${name}"),
        }
    }
}
