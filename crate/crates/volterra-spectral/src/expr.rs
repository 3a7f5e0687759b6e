//! The expression language used by problem files.
//!
//! Grammar (whitespace-insensitive):
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          // right-associative
//! primary := NUMBER | 'x' | 't' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'
//! FUNC    := sin | cos | tan | exp | log | sqrt
//! ```
//! Numbers accept scientific notation (`1.5e-4`); that is unambiguous because
//! implicit multiplication is rejected (`2x` is a syntax error), so a trailing
//! `e`/`E` with digits can only be an exponent. The name `e` is Euler's
//! constant except when immediately followed by `(`. Exponents of `^` must be
//! variable-free subtrees (so derivative-free constant folding stays sound and
//! domains stay checkable); that is enforced at parse time.
//!
//! Syntax errors carry 0-based byte offsets; an unexpected end of input points
//! at the last non-whitespace byte. Evaluation reports domain errors (log of a
//! non-positive value, division by zero, square root of a negative, fractional
//! power of a negative, non-finite result) rather than producing NaN/∞.

use std::fmt;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates with the given variable bindings; unbound variables are
    /// domain errors (a coefficient expression has no business mentioning t).
    pub fn eval(&self, x: Option<f64>, t: Option<f64>) -> Result<f64, Error> {
        let v = match self {
            Expr::Num(c) => *c,
            Expr::Var(Var::X) => {
                x.ok_or_else(|| Error::domain("variable x is not bound in this context"))?
            }
            Expr::Var(Var::T) => {
                t.ok_or_else(|| Error::domain("variable t is not bound in this context"))?
            }
            Expr::Neg(e) => -e.eval(x, t)?,
            Expr::Bin(op, a, b) => {
                let a = a.eval(x, t)?;
                let b = b.eval(x, t)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::domain(format!("division by zero: {a} / 0")));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(Error::domain(format!(
                                "fractional power of a negative base: {a} ^ {b}"
                            )));
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(Error::domain(format!("zero to a negative power: 0 ^ {b}")));
                        }
                        a.powf(b)
                    }
                }
            }
            Expr::Call(func, arg) => {
                let a = arg.eval(x, t)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(Error::domain(format!("log of a non-positive value: {a}")));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(Error::domain(format!("square root of a negative: {a}")));
                        }
                        a.sqrt()
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::domain(format!("non-finite result in `{self}`")));
        }
        Ok(v)
    }

    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(e) | Expr::Call(_, e) => e.uses(var),
            Expr::Bin(_, a, b) => a.uses(var) || b.uses(var),
        }
    }

    pub fn is_constant(&self) -> bool {
        !self.uses(Var::X) && !self.uses(Var::T)
    }

    /// Evaluates a variable-free expression.
    pub fn constant_value(&self) -> Option<Result<f64, Error>> {
        self.is_constant().then(|| self.eval(None, None))
    }
}

// Precedence levels for the canonical printer.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_ATOM: u8 = 4;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => PREC_ATOM,
        Expr::Neg(_) => PREC_MUL,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
        Expr::Bin(BinOp::Pow, ..) => PREC_POW,
    }
}

impl fmt::Display for Expr {
    /// Canonical form: minimal parentheses, `Display` floats, one space around
    /// `+`/`-`, none around `*`, `/`, `^`. Printing then reparsing is the
    /// identity on ASTs, which makes print∘parse a fixed point on strings.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, need: bool) -> fmt::Result {
            if need {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                // `-x*t` parses as (-x)*t, so a negated product keeps its
                // parens; powers bind tighter and print bare (`-x^2`).
                paren(f, e, precedence(e) <= PREC_MUL)
            }
            Expr::Bin(op, a, b) => match op {
                BinOp::Add => {
                    paren(f, a, precedence(a) < PREC_ADD)?;
                    write!(f, " + ")?;
                    paren(f, b, precedence(b) < PREC_ADD)
                }
                BinOp::Sub => {
                    paren(f, a, precedence(a) < PREC_ADD)?;
                    write!(f, " - ")?;
                    // Right side needs parens at equal precedence: a − (b + c).
                    paren(f, b, precedence(b) <= PREC_ADD)
                }
                BinOp::Mul => {
                    paren(f, a, precedence(a) < PREC_MUL)?;
                    write!(f, "*")?;
                    paren(f, b, precedence(b) <= PREC_MUL)
                }
                BinOp::Div => {
                    paren(f, a, precedence(a) < PREC_MUL)?;
                    write!(f, "/")?;
                    paren(f, b, precedence(b) <= PREC_MUL)
                }
                BinOp::Pow => {
                    paren(f, a, precedence(a) < PREC_ATOM)?;
                    write!(f, "^")?;
                    // Right-associative: a bare power or atom needs no parens.
                    paren(f, b, precedence(b) < PREC_POW)
                }
            },
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Offset of the last non-whitespace byte, for end-of-input errors.
    fn last_content_offset(&self) -> usize {
        self.src
            .iter()
            .rposition(|b| !b.is_ascii_whitespace())
            .unwrap_or(0)
    }

    fn peek_byte(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// Next token plus its start offset; None at end of input.
    fn next_token(&mut self) -> Result<Option<(Token, usize)>, Error> {
        self.skip_ws();
        let start = self.pos;
        let Some(&b) = self.src.get(self.pos) else {
            return Ok(None);
        };
        let tok = match b {
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'0'..=b'9' | b'.' => return self.lex_number().map(Some),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end])
                    .expect("ascii ident")
                    .to_string();
                self.pos = end;
                return Ok(Some((Token::Ident(name), start)));
            }
            _ => {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("unexpected character `{}`", char::from(b)),
                })
            }
        };
        self.pos += 1;
        Ok(Some((tok, start)))
    }

    fn lex_number(&mut self) -> Result<(Token, usize), Error> {
        let start = self.pos;
        let mut end = self.pos;
        while end < self.src.len() && self.src[end].is_ascii_digit() {
            end += 1;
        }
        if end < self.src.len() && self.src[end] == b'.' {
            end += 1;
            while end < self.src.len() && self.src[end].is_ascii_digit() {
                end += 1;
            }
        }
        if end == start || (end == start + 1 && self.src[start] == b'.') {
            return Err(Error::Parse { offset: start, message: "malformed number".into() });
        }
        // Exponent part: only when digits follow (possibly after a sign), so a
        // bare `e` stays a separate token and `2e` fails as implicit
        // multiplication rather than being half-swallowed here.
        if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
            let mut probe = end + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                while probe < self.src.len() && self.src[probe].is_ascii_digit() {
                    probe += 1;
                }
                end = probe;
            }
        }
        let text = std::str::from_utf8(&self.src[start..end]).expect("ascii number");
        let value: f64 = text
            .parse()
            .map_err(|_| Error::Parse { offset: start, message: format!("malformed number `{text}`") })?;
        self.pos = end;
        Ok((Token::Num(value), start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    /// One-token lookahead.
    peeked: Option<(Token, usize)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { lexer: Lexer::new(src), peeked: None }
    }

    fn peek(&mut self) -> Result<Option<&(Token, usize)>, Error> {
        if self.peeked.is_none() {
            self.peeked = self.lexer.next_token()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn advance(&mut self) -> Result<Option<(Token, usize)>, Error> {
        if let Some(t) = self.peeked.take() {
            return Ok(Some(t));
        }
        self.lexer.next_token()
    }

    fn eof_error(&self, expected: &str) -> Error {
        Error::Parse {
            offset: self.lexer.last_content_offset(),
            message: format!("unexpected end of input, expected {expected}"),
        }
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek()? {
            let op = match tok {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.unary()?;
        while let Some((tok, _)) = self.peek()? {
            let op = match tok {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => break,
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if let Some((Token::Minus, _)) = self.peek()? {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, Error> {
        let base = self.primary()?;
        if let Some((Token::Caret, _)) = self.peek()? {
            let (_, caret_offset) = self.advance()?.expect("peeked caret");
            let exponent = self.unary()?;
            if !exponent.is_constant() {
                return Err(Error::Parse {
                    offset: caret_offset,
                    message: "exponent must be a constant expression".into(),
                });
            }
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, Error> {
        let Some((tok, offset)) = self.advance()? else {
            return Err(self.eof_error("an expression"));
        };
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let inner = self.expr()?;
                match self.advance()? {
                    Some((Token::RParen, _)) => Ok(inner),
                    Some((_, off)) => Err(Error::Parse {
                        offset: off,
                        message: "expected `)`".into(),
                    }),
                    None => Err(self.eof_error("`)`")),
                }
            }
            Token::Ident(name) => {
                let next_is_lparen = self.peeked.is_none() && self.lexer.peek_byte() == Some(b'(')
                    || matches!(self.peeked, Some((Token::LParen, _)));
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" if !next_is_lparen => Ok(Expr::Num(std::f64::consts::E)),
                    _ => {
                        if let Some(func) = Func::from_name(&name) {
                            match self.advance()? {
                                Some((Token::LParen, _)) => {}
                                Some((_, off)) => {
                                    return Err(Error::Parse {
                                        offset: off,
                                        message: format!("expected `(` after `{name}`"),
                                    })
                                }
                                None => return Err(self.eof_error("`(`")),
                            }
                            let arg = self.expr()?;
                            match self.advance()? {
                                Some((Token::RParen, _)) => {
                                    Ok(Expr::Call(func, Box::new(arg)))
                                }
                                Some((_, off)) => Err(Error::Parse {
                                    offset: off,
                                    message: "expected `)`".into(),
                                }),
                                None => Err(self.eof_error("`)`")),
                            }
                        } else {
                            Err(Error::Parse {
                                offset,
                                message: format!("unknown name `{name}`"),
                            })
                        }
                    }
                }
            }
            other => Err(Error::Parse {
                offset,
                message: format!("unexpected token `{}`", token_text(&other)),
            }),
        }
    }
}

fn token_text(tok: &Token) -> String {
    match tok {
        Token::Num(v) => v.to_string(),
        Token::Ident(s) => s.clone(),
        Token::Plus => "+".into(),
        Token::Minus => "-".into(),
        Token::Star => "*".into(),
        Token::Slash => "/".into(),
        Token::Caret => "^".into(),
        Token::LParen => "(".into(),
        Token::RParen => ")".into(),
    }
}

/// Parses a complete expression; trailing input (including the start of an
/// implicit multiplication like `2x`) is a syntax error.
pub fn parse(src: &str) -> Result<Expr, Error> {
    let mut parser = Parser::new(src);
    let expr = parser.expr()?;
    if let Some((tok, offset)) = parser.advance()? {
        return Err(Error::Parse {
            offset,
            message: format!(
                "unexpected trailing `{}` (implicit multiplication is not supported)",
                token_text(&tok)
            ),
        });
    }
    Ok(expr)
}
