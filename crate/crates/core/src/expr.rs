//! Expression language for `phi(t, s)`.
//!
//! Grammar (whitespace insignificant, numbers are decimal literals with an
//! optional exponent):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ['^' factor]
//! atom   := number | 't' | 's' | func '(' expr ')' | '(' expr ')' | '-' atom
//! func   := 'exp' | 'log' | 'sqrt'
//! ```
//!
//! `^` is right-associative. Exponents that are written as integer literals
//! are kept as [`Expr::Int`] and evaluated by repeated multiplication, which
//! stays exact for negative bases; every other exponent evaluates through
//! `exp(b * log(a))` and therefore needs a positive base.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// AST for a `phi(t, s)` expression. Integer literals are distinguished
/// from general numeric literals so that integer exponents can be flagged.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Num(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        Parser::new(text).parse()
    }

    /// `Some(k)` when this node is the integer literal `k`, possibly under
    /// a leading unary minus. Used to route `^` to the exact integer path.
    pub fn integer_literal(&self) -> Option<i64> {
        match self {
            Expr::Int(k) => Some(*k),
            Expr::Unary(UnaryOp::Neg, inner) => match **inner {
                Expr::Int(k) => Some(-k),
                _ => None,
            },
            _ => None,
        }
    }

    /// Evaluate the full second-order jet at `(t, s)`.
    pub fn eval_jet(&self, t: f64, s: f64) -> Result<Jet2> {
        match self {
            Expr::Int(k) => Ok(Jet2::constant(*k as f64)),
            Expr::Num(c) => Ok(Jet2::constant(*c)),
            Expr::Var(Var::T) => Ok(Jet2::seed_t(t)),
            Expr::Var(Var::S) => Ok(Jet2::seed_s(s)),
            Expr::Unary(op, e) => {
                let j = e.eval_jet(t, s)?;
                match op {
                    UnaryOp::Neg => Ok(-j),
                    UnaryOp::Exp => Ok(j.exp()),
                    UnaryOp::Log => j.ln(),
                    UnaryOp::Sqrt => j.sqrt(),
                }
            }
            Expr::Binary(op, a, b) => {
                let ja = a.eval_jet(t, s)?;
                match op {
                    BinaryOp::Add => Ok(ja + b.eval_jet(t, s)?),
                    BinaryOp::Sub => Ok(ja - b.eval_jet(t, s)?),
                    BinaryOp::Mul => Ok(ja * b.eval_jet(t, s)?),
                    BinaryOp::Div => ja.checked_div(b.eval_jet(t, s)?),
                    BinaryOp::Pow => match b.integer_literal() {
                        Some(k) => ja.powi(k),
                        None => ja.pow(b.eval_jet(t, s)?),
                    },
                }
            }
        }
    }
}

// Precedence levels used by the printer; must mirror the grammar.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_ATOM: u8 = 4;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_ADD,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_MUL,
        Expr::Binary(BinaryOp::Pow, ..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

impl fmt::Display for Expr {
    /// Prints a form that re-parses to the identical AST (tested by a
    /// round-trip property). Parentheses are inserted exactly where the
    /// grammar would otherwise reassociate.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
            write!(f, "(")?;
            fmt::Display::fmt(e, f)?;
            write!(f, ")")
        }
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
            if precedence(e) < min_prec {
                paren(f, e)
            } else {
                fmt::Display::fmt(e, f)
            }
        }
        match self {
            Expr::Int(k) => write!(f, "{k}"),
            // The trailing ".0" keeps a non-integer literal from re-parsing
            // as an integer one.
            Expr::Num(c) if c.fract() == 0.0 && c.is_finite() => write!(f, "{c:.1}"),
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Var(Var::S) => write!(f, "s"),
            Expr::Unary(UnaryOp::Neg, e) => {
                write!(f, "-")?;
                // The operand of unary minus must be an atom.
                if matches!(**e, Expr::Binary(..)) {
                    paren(f, e)
                } else {
                    fmt::Display::fmt(e, f)
                }
            }
            Expr::Unary(op, e) => {
                let name = match op {
                    UnaryOp::Exp => "exp",
                    UnaryOp::Log => "log",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}(")?;
                fmt::Display::fmt(e, f)?;
                write!(f, ")")
            }
            Expr::Binary(op, a, b) => match op {
                BinaryOp::Add | BinaryOp::Sub => {
                    child(f, a, PREC_ADD)?;
                    write!(f, " {} ", if *op == BinaryOp::Add { "+" } else { "-" })?;
                    // Left-associative: an equal-precedence right child must
                    // be parenthesized to survive re-parsing unchanged.
                    child(f, b, PREC_ADD + 1)
                }
                BinaryOp::Mul | BinaryOp::Div => {
                    child(f, a, PREC_MUL)?;
                    write!(f, "{}", if *op == BinaryOp::Mul { "*" } else { "/" })?;
                    child(f, b, PREC_MUL + 1)
                }
                BinaryOp::Pow => {
                    // Base must be an atom (possibly under unary minus).
                    if precedence(a) < PREC_ATOM {
                        paren(f, a)?;
                    } else {
                        fmt::Display::fmt(a, f)?;
                    }
                    write!(f, "^")?;
                    // Right-associative: a Pow right child needs no parens.
                    child(f, b, PREC_POW)
                }
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer + recursive-descent parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, int: Option<i64> },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    tok: Tok,
    tok_pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            tok: Tok::Eof,
            tok_pos: 0,
        };
        // An initial lex error is surfaced from parse() via a poisoned token.
        if let Err(e) = p.bump() {
            p.tok = Tok::Ident(format!("<lex error: {e}>"));
        }
        p
    }

    fn parse(mut self) -> Result<Expr> {
        let e = self.expr()?;
        match self.tok {
            Tok::Eof => Ok(e),
            _ => Err(self.unexpected(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"])),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> Error {
        Error::Parse {
            offset: self.tok_pos,
            expected: expected.join(" | "),
            found: self.tok.describe(),
        }
    }

    fn bump(&mut self) -> Result<()> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_pos = self.pos;
        if self.pos >= self.src.len() {
            self.tok = Tok::Eof;
            return Ok(());
        }
        let c = self.src[self.pos];
        self.tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => self.lex_number()?,
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            other => {
                return Err(Error::Parse {
                    offset: self.pos,
                    expected: "number | identifier | operator | parenthesis".into(),
                    found: format!("byte 0x{other:02x}"),
                })
            }
        };
        Ok(())
    }

    fn lex_number(&mut self) -> Result<Tok> {
        let start = self.pos;
        let mut saw_dot = false;
        let mut saw_exp = false;
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b'0'..=b'9' => self.pos += 1,
                b'.' if !saw_dot && !saw_exp => {
                    saw_dot = true;
                    self.pos += 1;
                }
                b'e' | b'E' if !saw_exp => {
                    saw_exp = true;
                    self.pos += 1;
                    if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            offset: start,
            expected: "numeric literal".into(),
            found: format!("'{text}'"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                offset: start,
                expected: "numeric literal representable as f64".into(),
                found: format!("'{text}'"),
            });
        }
        let int = if !saw_dot && !saw_exp {
            text.parse::<i64>().ok()
        } else {
            None
        };
        Ok(Tok::Num { value, int })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exp = self.factor()?; // right-associative
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tok.clone() {
            Tok::Num { value, int } => {
                self.bump()?;
                Ok(match int {
                    Some(k) => Expr::Int(k),
                    None => Expr::Num(value),
                })
            }
            Tok::Minus => {
                self.bump()?;
                Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.atom()?)))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(self.unexpected(&["')'"]));
                }
                self.bump()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump()?;
                match name.as_str() {
                    "t" => Ok(Expr::Var(Var::T)),
                    "s" => Ok(Expr::Var(Var::S)),
                    "exp" | "log" | "sqrt" => {
                        let op = match name.as_str() {
                            "exp" => UnaryOp::Exp,
                            "log" => UnaryOp::Log,
                            _ => UnaryOp::Sqrt,
                        };
                        if self.tok != Tok::LParen {
                            return Err(self.unexpected(&["'('"]));
                        }
                        self.bump()?;
                        let e = self.expr()?;
                        if self.tok != Tok::RParen {
                            return Err(self.unexpected(&["')'"]));
                        }
                        self.bump()?;
                        Ok(Expr::Unary(op, Box::new(e)))
                    }
                    _ => Err(Error::Parse {
                        offset: self.tok_pos,
                        expected: "'t' | 's' | 'exp' | 'log' | 'sqrt'".into(),
                        found: format!("identifier '{name}'"),
                    }),
                }
            }
            _ => Err(self.unexpected(&["number", "'t'", "'s'", "function", "'('", "'-'"])),
        }
    }
}
