//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' integer)?
//! integer := ['+' | '-'] digits | '(' ['+' | '-'] digits ')'
//! primary := number | 'pi' | 'x' | 't' | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'sinh' | 'cosh' | 'exp'
//! ```

use thiserror::Error;

use super::ast::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, integer: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let mut integer = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    integer = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        integer = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("`{text}`"),
                })?;
                out.push((Tok::Num { value, integer }, start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["operator", "operand"],
                    found: format!("`{ch}`"),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const OPERAND: &[&str] = &["number", "`x`", "`t`", "`pi`", "function", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exponent = self.integer()?;
        if *self.peek() == Tok::Caret {
            return Err(self.error(&["operator", "`)`", "end of input"]));
        }
        Ok(Expr::Pow(Box::new(base), exponent))
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1
            }
            Tok::Plus => {
                self.bump();
                1
            }
            _ => 1,
        };
        let value = match self.peek() {
            Tok::Num {
                value,
                integer: true,
            } if *value <= i32::MAX as f64 => *value as i32,
            _ => return Err(self.error(&["integer exponent"])),
        };
        self.bump();
        if parenthesized {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(sign * value)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.toks[self.pos].clone();
        if !matches!(tok, Tok::Num { .. } | Tok::LParen | Tok::Ident(_)) {
            return Err(self.error(OPERAND));
        }
        self.bump();
        match tok {
            Tok::Num { value, .. } => Ok(Expr::Const(value)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var(Var::X)),
                "t" => Ok(Expr::Var(Var::T)),
                "pi" => Ok(Expr::Pi),
                other => match Func::from_name(other) {
                    Some(f) => {
                        self.expect(Tok::LParen, "`(`")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Expr::Func(f, Box::new(arg)))
                    }
                    None => Err(ParseError::UnknownIdentifier { name, offset }),
                },
            },
            _ => unreachable!("non-operand tokens rejected above"),
        }
    }
}

/// Parse an expression in `x` and `t`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, x: f64, t: f64) -> f64 {
        parse(src).unwrap().eval(x, t).unwrap()
    }

    #[test]
    fn parses_exact_solution_shape() {
        let e = parse("sin(pi*x)*cos(pi*t)").unwrap();
        let pix = |v| Expr::Binary(BinOp::Mul, Box::new(Expr::Pi), Box::new(Expr::Var(v)));
        let expected = Expr::Binary(
            BinOp::Mul,
            Box::new(Expr::Func(Func::Sin, Box::new(pix(Var::X)))),
            Box::new(Expr::Func(Func::Cos, Box::new(pix(Var::T)))),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn zero_is_constant() {
        assert_eq!(parse("0").unwrap(), Expr::Const(0.0));
    }

    #[test]
    fn polynomial_arithmetic() {
        assert_eq!(ev("x^2 + 2*x*t", 1.0, 2.0), 5.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("-x^2", 3.0, 0.0), -9.0);
        assert_eq!(ev("8/4/2", 0.0, 0.0), 1.0);
        assert_eq!(ev("8-4-2", 0.0, 0.0), 2.0);
        assert_eq!(ev("2*3+4*5", 0.0, 0.0), 26.0);
        assert_eq!(ev("(x+1)^-2", 1.0, 0.0), 0.25);
        assert_eq!(ev("x^(-1)", 4.0, 0.0), 0.25);
        assert_eq!(ev("1.5e2 + .5", 0.0, 0.0), 150.5);
        assert_eq!(ev("--t", 0.0, 2.0), 2.0);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let err = parse("sin(x").unwrap_err();
        assert_eq!(err.offset(), 5);
        match err {
            ParseError::Syntax { expected, .. } => assert!(expected.contains(&"`)`")),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse("x +").unwrap_err().offset(), 3);
        assert_eq!(parse("x $ 2").unwrap_err().offset(), 2);
        assert_eq!(parse("x^2.5").unwrap_err().offset(), 2);
        assert_eq!(parse("x^2^3").unwrap_err().offset(), 3);
        assert_eq!(parse("(x))").unwrap_err().offset(), 3);
        assert!(parse("").is_err());
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse("2*y").unwrap_err(),
            ParseError::UnknownIdentifier {
                name: "y".into(),
                offset: 2
            }
        );
        assert!(matches!(
            parse("tan(x)").unwrap_err(),
            ParseError::UnknownIdentifier { .. }
        ));
    }
}
