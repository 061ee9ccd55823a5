//! Infix expression parser and evaluator for user-supplied surfaces.
//!
//! Grammar: `+ - * / ^` with usual precedence (`^` right-associative),
//! unary minus, parentheses, numeric literals, variables `x`, `y`, `r`,
//! `theta`, the constant `pi`, and the functions `tanh`, `exp`, `sqrt`,
//! `sin`, `cos`.

use crate::taylor::Scalar;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    R,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Tanh,
    Exp,
    Sqrt,
    Sin,
    Cos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluate with all four variables bound. Callers that only know
    /// Cartesian coordinates should check [`Expr::uses_polar`] first and
    /// derive (r, θ) when needed.
    pub fn eval<S: Scalar>(&self, x: S, y: S, r: S, theta: S) -> S {
        match self {
            Expr::Num(v) => S::lit(*v),
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Var(Var::R) => r,
            Expr::Var(Var::Theta) => theta,
            Expr::Unary(op, e) => {
                let v = e.eval(x, y, r, theta);
                match op {
                    UnOp::Neg => -v,
                    UnOp::Tanh => v.tanh(),
                    UnOp::Exp => v.exp(),
                    UnOp::Sqrt => v.sqrt(),
                    UnOp::Sin => v.sin(),
                    UnOp::Cos => v.cos(),
                }
            }
            Expr::Binary(op, a, b) => {
                let va = a.eval(x, y, r, theta);
                match op {
                    BinOp::Add => va + b.eval(x, y, r, theta),
                    BinOp::Sub => va - b.eval(x, y, r, theta),
                    BinOp::Mul => va * b.eval(x, y, r, theta),
                    BinOp::Div => va / b.eval(x, y, r, theta),
                    BinOp::Pow => match b.const_value() {
                        // constant exponents keep negative bases usable
                        Some(p) if p.fract() == 0.0 && p.abs() < 1e9 => va.powi(p as i32),
                        Some(p) => va.powf(p),
                        None => (b.eval(x, y, r, theta) * va.ln()).exp(),
                    },
                }
            }
        }
    }

    /// Value of a variable-free subexpression, if it is one.
    fn const_value(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Var(_) => None,
            Expr::Unary(op, e) => {
                let v = e.const_value()?;
                Some(match op {
                    UnOp::Neg => -v,
                    UnOp::Tanh => v.tanh(),
                    UnOp::Exp => v.exp(),
                    UnOp::Sqrt => v.sqrt(),
                    UnOp::Sin => v.sin(),
                    UnOp::Cos => v.cos(),
                })
            }
            Expr::Binary(op, a, b) => {
                let (va, vb) = (a.const_value()?, b.const_value()?);
                Some(match op {
                    BinOp::Add => va + vb,
                    BinOp::Sub => va - vb,
                    BinOp::Mul => va * vb,
                    BinOp::Div => va / vb,
                    BinOp::Pow if vb.fract() == 0.0 && vb.abs() < 1e9 => {
                        va.powi(vb as i32)
                    }
                    BinOp::Pow => va.powf(vb),
                })
            }
        }
    }

    /// True if the expression mentions `r` or `theta`.
    pub fn uses_polar(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => matches!(v, Var::R | Var::Theta),
            Expr::Unary(_, e) => e.uses_polar(),
            Expr::Binary(_, a, b) => a.uses_polar() || b.uses_polar(),
        }
    }

    /// True if the expression mentions `x` or `y`.
    pub fn uses_cartesian(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => matches!(v, Var::X | Var::Y),
            Expr::Unary(_, e) => e.uses_cartesian(),
            Expr::Binary(_, a, b) => a.uses_cartesian() || b.uses_cartesian(),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("unexpected trailing input in '{src}'")));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
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

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || bytes[i] == 'e'
                        || bytes[i] == 'E'
                        || ((bytes[i] == '+' || bytes[i] == '-')
                            && matches!(bytes[i - 1], 'e' | 'E')))
                {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                let v = s
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number '{s}'")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(bytes[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, got {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    e = Expr::Binary(BinOp::Add, Box::new(e), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    e = Expr::Binary(BinOp::Sub, Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    e = Expr::Binary(BinOp::Mul, Box::new(e), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    e = Expr::Binary(BinOp::Div, Box::new(e), Box::new(self.unary()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            // right-associative; exponent may carry its own unary minus
            let exp = self.unary_power()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary_power(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let e = self.unary_power()?;
            // fold −constant so Pow still sees a Num exponent
            if let Expr::Num(v) = e {
                return Ok(Expr::Num(-v));
            }
            return Ok(Expr::Unary(UnOp::Neg, Box::new(e)));
        }
        self.power()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let fun = match name.as_str() {
                    "tanh" => Some(UnOp::Tanh),
                    "exp" => Some(UnOp::Exp),
                    "sqrt" => Some(UnOp::Sqrt),
                    "sin" => Some(UnOp::Sin),
                    "cos" => Some(UnOp::Cos),
                    _ => None,
                };
                if let Some(op) = fun {
                    self.expect(Tok::LParen)?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Unary(op, Box::new(e)));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "y" => Ok(Expr::Var(Var::Y)),
                    "r" => Ok(Expr::Var(Var::R)),
                    "theta" => Ok(Expr::Var(Var::Theta)),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    other => Err(Error::Parse(format!("unknown identifier '{other}'"))),
                }
            }
            got => Err(Error::Parse(format!("unexpected token {got:?}"))),
        }
    }
}
