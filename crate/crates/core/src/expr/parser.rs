use super::{BinOp, Expr, ExprError, Func, Var};

/// Parse an expression in `x`, `y`, `z`.
///
/// Grammar (lowest to highest precedence):
///
/// ```text
/// sum     := product (('+' | '-') product)*
/// product := unary (('*' | '/') unary)*
/// unary   := '-' unary | power
/// power   := atom ('^' '-'? integer)?
/// atom    := number | 'x' | 'y' | 'z' | 'pi' | func '(' sum ')' | '(' sum ')'
/// ```
///
/// Column numbers in errors are 1-based character positions.
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn error(&self, message: String) -> ExprError {
        ExprError::Syntax {
            column: self.pos + 1,
            message,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.error(format!("expected '{c}', found '{d}'"))),
            None => Err(self.error(format!("expected '{c}', found end of input"))),
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            let op_col = self.pos + 1;
            self.pos += 1;
            let rhs = self.unary()?;
            if op == BinOp::Div && rhs.const_value() == Some(0.0) {
                return Err(ExprError::Syntax {
                    column: op_col,
                    message: "division by a constant zero".to_string(),
                });
            }
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("exponent must be an integer literal".to_string()));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let n: i32 = digits.parse().map_err(|_| ExprError::Syntax {
            column: start + 1,
            message: format!("exponent '{digits}' out of range"),
        })?;
        Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.error("unexpected end of input".to_string())),
        };
        if c == '(' {
            self.pos += 1;
            let e = self.sum()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = self.pos;
            while self.pos < self.chars.len()
                && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
            {
                self.pos += 1;
            }
            let name: String = self.chars[start..self.pos].iter().collect();
            return match name.as_str() {
                "x" => Ok(Expr::Var(Var::X)),
                "y" => Ok(Expr::Var(Var::Y)),
                "z" => Ok(Expr::Var(Var::Z)),
                "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                _ => match Func::from_name(&name) {
                    Some(f) => {
                        self.expect('(')?;
                        let arg = self.sum()?;
                        self.expect(')')?;
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    None => Err(ExprError::UnknownIdentifier {
                        column: start + 1,
                        name,
                    }),
                },
            };
        }
        Err(self.error(format!("unexpected '{c}'")))
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let n = self.chars.len();
        while self.pos < n && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.') {
            self.pos += 1;
        }
        if self.pos < n && (self.chars[self.pos] == 'e' || self.chars[self.pos] == 'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < n && (self.chars[self.pos] == '+' || self.chars[self.pos] == '-') {
                self.pos += 1;
            }
            if self.pos < n && self.chars[self.pos].is_ascii_digit() {
                while self.pos < n && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // Not an exponent; leave 'e' for the identifier scanner to reject.
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map(Expr::Const).map_err(|_| ExprError::Syntax {
            column: start + 1,
            message: format!("malformed number '{text}'"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("1 + 2 * 3 ^ 2").unwrap();
        assert_eq!(e.eval(0.0, 0.0, 0.0).unwrap(), 19.0);
        let e = parse_expr("-2^2").unwrap();
        assert_eq!(e.eval(0.0, 0.0, 0.0).unwrap(), -4.0);
        let e = parse_expr("8 / 4 / 2").unwrap();
        assert_eq!(e.eval(0.0, 0.0, 0.0).unwrap(), 1.0);
        let e = parse_expr("5 - 3 - 1").unwrap();
        assert_eq!(e.eval(0.0, 0.0, 0.0).unwrap(), 1.0);
        let e = parse_expr("-x*y").unwrap();
        assert_eq!(e.eval(2.0, 3.0, 0.0).unwrap(), -6.0);
    }

    #[test]
    fn torus_parses() {
        let e = parse_expr("(sqrt(x^2+y^2)-2)^2 + z^2 - 1").unwrap();
        assert!(e.eval(3.0, 0.0, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn trailing_operator_reports_column() {
        assert_eq!(
            parse_expr("x +"),
            Err(ExprError::Syntax {
                column: 4,
                message: "unexpected end of input".to_string()
            })
        );
    }

    #[test]
    fn unknown_identifier() {
        match parse_expr("x + w") {
            Err(ExprError::UnknownIdentifier { column, name }) => {
                assert_eq!(column, 5);
                assert_eq!(name, "w");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_integer_exponent_rejected() {
        assert!(matches!(parse_expr("x^1.5"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("x^y"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("x^2^3"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn constant_zero_denominator_rejected() {
        assert!(matches!(
            parse_expr("x / (1 - 1)"),
            Err(ExprError::Syntax { column: 3, .. })
        ));
    }

    #[test]
    fn scientific_literals() {
        let e = parse_expr("1e-3 + 2.5E2").unwrap();
        assert_eq!(e.eval(0.0, 0.0, 0.0).unwrap(), 250.001);
    }
}
