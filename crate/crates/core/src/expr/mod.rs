//! Scalar expressions in `x`, `y`, `z` used to describe implicit surfaces
//! and maps to the plane.
//!
//! Trees are immutable after parsing. Differentiation is structural (see
//! [`Expr::derivative`]) with constant folding only.

mod diff;
mod parser;

use std::fmt;

use thiserror::Error;

pub(crate) use diff::{add, mul, sub};
pub use parser::parse_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        match s {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            "exp" => Some(Func::Exp),
            _ => None,
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
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power. The exponent is always a literal.
    Pow(Box<Expr>, i32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier '{name}' at column {column}")]
    UnknownIdentifier { column: usize, name: String },
    #[error("domain error in '{node}': {message}")]
    Domain { node: String, message: String },
}

impl Expr {
    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> Result<f64, ExprError> {
        self.eval_at(&[x, y, z])
    }

    pub fn eval_at(&self, p: &[f64; 3]) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::X) => p[0],
            Expr::Var(Var::Y) => p[1],
            Expr::Var(Var::Z) => p[2],
            Expr::Neg(e) => -e.eval_at(p)?,
            Expr::Call(f, e) => {
                let a = e.eval_at(p)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain(format!("sqrt of negative value {a}")));
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval_at(p)?;
                let b = r.eval_at(p)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 || !(a / b).is_finite() {
                            return Err(self.domain(format!("division by {b}")));
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(e, n) => {
                let a = e.eval_at(p)?;
                if *n < 0 && a == 0.0 {
                    return Err(self.domain("negative power of zero".to_string()));
                }
                a.powi(*n)
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain(format!("non-finite result {v}")))
        }
    }

    fn domain(&self, message: String) -> ExprError {
        ExprError::Domain {
            node: self.to_string(),
            message,
        }
    }

    /// Gradient `(d/dx, d/dy, d/dz)` as expressions.
    pub fn grad(&self) -> [Expr; 3] {
        Var::ALL.map(|v| self.derivative(v))
    }

    /// Constant value if the tree contains no variables.
    pub fn const_value(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Var(_) => None,
            _ => self.eval(0.0, 0.0, 0.0).ok().filter(|_| !self.has_var()),
        }
    }

    fn has_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(_) => true,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => e.has_var(),
            Expr::Binary(_, l, r) => l.has_var() || r.has_var(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => 1 + e.node_count(),
            Expr::Binary(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    // Printing levels: 1 = sum, 2 = product, 3 = unary, 4 = power/atom.
    fn fmt_level(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        let level = self.level();
        if level < min_level {
            write!(f, "(")?;
            self.fmt_inner(f)?;
            write!(f, ")")
        } else {
            self.fmt_inner(f)
        }
    }

    fn level(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
            _ => 4,
        }
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_level(f, 3)
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.fmt_level(f, 0)?;
                write!(f, ")")
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                l.fmt_level(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // Left associativity: an equal-precedence right child needs parens.
                r.fmt_level(f, p + 1)
            }
            Expr::Pow(e, n) => {
                e.fmt_level(f, 4)?;
                write!(f, "^{n}")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_level(f, 0)
    }
}
