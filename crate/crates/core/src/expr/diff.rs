use super::{BinOp, Expr, Func, Var};

// Smart constructors: constant folding and 0/1 elimination only.

fn is_const(e: &Expr, c: f64) -> bool {
    matches!(e, Expr::Const(v) if *v == c)
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ if is_const(&a, 0.0) => b,
        _ if is_const(&b, 0.0) => a,
        _ => Expr::Binary(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ if is_const(&b, 0.0) => a,
        _ if is_const(&a, 0.0) => neg(b),
        _ => Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(0.0),
        _ if is_const(&a, 1.0) => b,
        _ if is_const(&b, 1.0) => a,
        _ => Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&a, 0.0) => Expr::Const(0.0),
        _ if is_const(&b, 1.0) => a,
        _ => Expr::Binary(BinOp::Div, Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(x) => Expr::Const(-x),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

fn pow(a: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Const(1.0),
        1 => a,
        _ => match a {
            Expr::Const(x) => Expr::Const(x.powi(n)),
            other => Expr::Pow(Box::new(other), n),
        },
    }
}

impl Expr {
    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(w) => Expr::Const(if *w == v { 1.0 } else { 0.0 }),
            Expr::Neg(e) => neg(e.derivative(v)),
            Expr::Binary(op, l, r) => {
                let dl = l.derivative(v);
                let dr = r.derivative(v);
                match op {
                    BinOp::Add => add(dl, dr),
                    BinOp::Sub => sub(dl, dr),
                    BinOp::Mul => add(mul(dl, (**r).clone()), mul((**l).clone(), dr)),
                    BinOp::Div => div(
                        sub(mul(dl, (**r).clone()), mul((**l).clone(), dr)),
                        pow((**r).clone(), 2),
                    ),
                }
            }
            Expr::Call(f, e) => {
                let de = e.derivative(v);
                if is_const(&de, 0.0) {
                    return Expr::Const(0.0);
                }
                let inner = (**e).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Exp => call(Func::Exp, inner),
                    Func::Sqrt => div(Expr::Const(0.5), call(Func::Sqrt, inner)),
                };
                mul(outer, de)
            }
            Expr::Pow(e, n) => {
                if *n == 0 {
                    return Expr::Const(0.0);
                }
                let de = e.derivative(v);
                mul(mul(Expr::Const(*n as f64), pow((**e).clone(), n - 1)), de)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_expr;
    use super::*;

    #[test]
    fn folds_trivial_factors() {
        let e = parse_expr("3*x + y").unwrap();
        assert_eq!(e.derivative(Var::X), Expr::Const(3.0));
        assert_eq!(e.derivative(Var::Z), Expr::Const(0.0));
    }

    #[test]
    fn chain_rule_sqrt() {
        let e = parse_expr("sqrt(x^2 + y^2)").unwrap();
        let d = e.derivative(Var::X);
        let val = d.eval(3.0, 4.0, 0.0).unwrap();
        assert!((val - 0.6).abs() < 1e-15);
    }

    #[test]
    fn quotient_rule() {
        let e = parse_expr("x / (1 + y^2)").unwrap();
        let d = e.derivative(Var::Y);
        let val = d.eval(2.0, 1.0, 0.0).unwrap();
        assert!((val - (-2.0 * 2.0 * 1.0 / 4.0)).abs() < 1e-15);
    }
}
