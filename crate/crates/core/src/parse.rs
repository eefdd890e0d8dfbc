//! Recursive-descent parser for coefficient expressions.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = atom [ "^" exponent ] ;
//! exponent = [ "+" | "-" ] integer | "(" [ "+" | "-" ] integer ")" ;
//! atom     = number | coordinate | function "(" expr ")" | "(" expr ")" ;
//! function = "sin" | "cos" | "exp" | "sqrt" ;
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::chart::Chart;
use crate::error::{ParseError, ParseErrorKind};
use crate::expr::{Expr, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn syntax(msg: &str, position: usize) -> ParseError {
    ParseError {
        kind: ParseErrorKind::Syntax(msg.to_string()),
        position,
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut integral = true;
            while i < bytes.len() && (bytes[i].1.is_ascii_digit() || bytes[i].1 == '.') {
                if bytes[i].1 == '.' {
                    integral = false;
                }
                i += 1;
            }
            if i < bytes.len() && (bytes[i].1 == 'e' || bytes[i].1 == 'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j].1 == '+' || bytes[j].1 == '-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].1.is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let end = if i < bytes.len() {
                bytes[i].0
            } else {
                text.len()
            };
            let lexeme = &text[pos..end];
            let value: f64 = lexeme
                .parse()
                .map_err(|_| syntax("malformed number", bytes[start].0))?;
            out.push((Tok::Num(value, integral), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].1.is_alphanumeric() || bytes[i].1 == '_') {
                i += 1;
            }
            let end = if i < bytes.len() {
                bytes[i].0
            } else {
                text.len()
            };
            out.push((Tok::Ident(text[pos..end].to_string()), pos));
            continue;
        }
        return Err(syntax("unexpected character", pos));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    depth: usize,
    chart: &'a Chart,
}

const MAX_DEPTH: usize = 200;

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(syntax(what, self.pos()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax("expression nested too deeply", self.pos()));
        }
        let out = self.sum();
        self.depth -= 1;
        out
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.at += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            self.depth += 1;
            if self.depth > MAX_DEPTH {
                return Err(syntax("expression nested too deeply", self.pos()));
            }
            let inner = self.unary();
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.at += 1;
        let parenthesized = self.peek() == Some(&Tok::LParen);
        if parenthesized {
            self.at += 1;
        }
        let mut sign = 1i64;
        match self.peek() {
            Some(Tok::Minus) => {
                sign = -1;
                self.at += 1;
            }
            Some(Tok::Plus) => self.at += 1,
            _ => {}
        }
        let pos = self.pos();
        let k = match self.bump() {
            Some(Tok::Num(v, true)) if v <= i32::MAX as f64 => sign * v as i64,
            Some(Tok::Num(..)) => return Err(syntax("exponent must be an integer", pos)),
            _ => return Err(syntax("expected integer exponent", pos)),
        };
        if parenthesized {
            self.expect(Tok::RParen, "expected `)` after exponent")?;
        }
        Ok(Expr::Pow(Box::new(base), k as i32))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(v, _)) => Ok(Expr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "expected `)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(f) = Func::from_name(&name) {
                    return self.call(f, name, pos);
                }
                if self.peek() == Some(&Tok::LParen) {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        position: pos,
                    });
                }
                match self.chart.axis_of(&name) {
                    Some(axis) => Ok(Expr::Var(axis)),
                    None => Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        position: pos,
                    }),
                }
            }
            Some(_) => Err(syntax("expected a number, coordinate or `(`", pos)),
            None => Err(syntax("unexpected end of input", pos)),
        }
    }

    fn call(&mut self, f: Func, name: String, pos: usize) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "expected `(` after function name")?;
        if self.peek() == Some(&Tok::RParen) {
            return Err(ParseError {
                kind: ParseErrorKind::Arity { name, got: 0 },
                position: pos,
            });
        }
        let arg = self.expr()?;
        let mut got = 1;
        while self.peek() == Some(&Tok::Comma) {
            self.at += 1;
            self.expr()?;
            got += 1;
        }
        self.expect(Tok::RParen, "expected `)` after argument")?;
        if got != 1 {
            return Err(ParseError {
                kind: ParseErrorKind::Arity { name, got },
                position: pos,
            });
        }
        Ok(Expr::Call(f, Box::new(arg)))
    }
}

/// Parse `text` against the coordinate names of `chart`.
pub fn parse_expression(text: &str, chart: &Chart) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(syntax("empty expression", 0));
    }
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        depth: 0,
        chart,
    };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return Err(syntax("unexpected trailing input", p.pos()));
    }
    Ok(e)
}
