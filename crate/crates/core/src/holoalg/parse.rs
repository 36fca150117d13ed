//! Text grammar for holomorphic expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' int | '^' '(' int ')')?
//! atom   := number | number 'i' | 'i' | 'pi' | name
//!         | 'exp' '(' expr ')'
//!         | 'log' '(' expr (';' int)? ')'
//!         | 'sqrt' '(' expr (';' int)? ')'
//!         | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-z^2` is `-(z^2)`. Constant
//! subexpressions are folded while parsing.

use std::f64::consts::PI;

use super::{HoloExpr, C64};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Colon,
    End,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// 1-based character column.
    pub column: usize,
    pub text: String,
}

/// Tokenizer shared by the expression and form grammars.
pub struct Lexer;

impl Lexer {
    pub fn tokenize(text: &str, line: usize) -> Result<Vec<Token>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let column = i + 1;
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            let single = match ch {
                '+' => Some(TokenKind::Plus),
                '-' => Some(TokenKind::Minus),
                '*' => Some(TokenKind::Star),
                '/' => Some(TokenKind::Slash),
                '^' => Some(TokenKind::Caret),
                '(' => Some(TokenKind::LParen),
                ')' => Some(TokenKind::RParen),
                '[' => Some(TokenKind::LBracket),
                ']' => Some(TokenKind::RBracket),
                ';' => Some(TokenKind::Semi),
                ',' => Some(TokenKind::Comma),
                ':' => Some(TokenKind::Colon),
                _ => None,
            };
            if let Some(kind) = single {
                out.push(Token {
                    kind,
                    column,
                    text: ch.to_string(),
                });
                i += 1;
                continue;
            }
            if ch.is_ascii_digit() || ch == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit: String = chars[start..i].iter().collect();
                let value: f64 = lit.parse().map_err(|_| Error::Parse {
                    line,
                    column,
                    token: lit.clone(),
                    message: "malformed number".into(),
                })?;
                let imag = i < chars.len()
                    && chars[i] == 'i'
                    && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_');
                if imag {
                    i += 1;
                    out.push(Token {
                        kind: TokenKind::Imag(value),
                        column,
                        text: format!("{lit}i"),
                    });
                } else {
                    out.push(Token {
                        kind: TokenKind::Number(value),
                        column,
                        text: lit,
                    });
                }
                continue;
            }
            if ch.is_alphabetic() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                out.push(Token {
                    kind: TokenKind::Ident(name.clone()),
                    column,
                    text: name,
                });
                continue;
            }
            return Err(Error::Parse {
                line,
                column,
                token: ch.to_string(),
                message: "unexpected character".into(),
            });
        }
        out.push(Token {
            kind: TokenKind::End,
            column: chars.len() + 1,
            text: "<end>".into(),
        });
        Ok(out)
    }
}

/// Recursive-descent parser over a token stream.
pub(crate) struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    line: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &str, vars: &'a [String], line: usize) -> Result<Self> {
        Ok(Parser {
            tokens: Lexer::tokenize(text, line)?,
            pos: 0,
            vars,
            line,
        })
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub(crate) fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, tok: &Token, message: &str) -> Error {
        Error::Parse {
            line: self.line,
            column: tok.column,
            token: tok.text.clone(),
            message: message.into(),
        }
    }

    pub(crate) fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token> {
        let t = self.advance();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(self.error(&t, &format!("expected {what}")))
        }
    }

    pub(crate) fn expression(&mut self) -> Result<HoloExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.advance();
                    acc = HoloExpr::add(acc, self.term()?);
                }
                TokenKind::Minus => {
                    self.advance();
                    acc = HoloExpr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<HoloExpr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().kind {
                TokenKind::Star => {
                    self.advance();
                    acc = HoloExpr::mul(acc, self.unary()?);
                }
                TokenKind::Slash => {
                    self.advance();
                    acc = HoloExpr::div(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<HoloExpr> {
        match self.peek().kind {
            TokenKind::Minus => {
                self.advance();
                Ok(HoloExpr::neg(self.unary()?))
            }
            TokenKind::Plus => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let negative = match self.peek().kind {
            TokenKind::Minus => {
                self.advance();
                true
            }
            TokenKind::Plus => {
                self.advance();
                false
            }
            _ => false,
        };
        let t = self.advance();
        match t.kind {
            TokenKind::Number(v) if v.fract() == 0.0 && v.abs() < 1e9 => {
                Ok(if negative { -(v as i64) } else { v as i64 })
            }
            _ => Err(self.error(&t, "expected an integer")),
        }
    }

    fn power(&mut self) -> Result<HoloExpr> {
        let base = self.atom()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        self.advance();
        let k = if self.peek().kind == TokenKind::LParen {
            self.advance();
            let k = self.integer()?;
            self.expect(TokenKind::RParen, "`)`")?;
            k
        } else {
            self.integer()?
        };
        if self.peek().kind == TokenKind::Caret {
            let t = self.peek().clone();
            return Err(self.error(&t, "chained exponents need parentheses"));
        }
        Ok(HoloExpr::powi(base, k as i32))
    }

    fn atom(&mut self) -> Result<HoloExpr> {
        let t = self.advance();
        match &t.kind {
            TokenKind::Number(v) => Ok(HoloExpr::real(*v)),
            TokenKind::Imag(v) => Ok(HoloExpr::constant(C64::new(0.0, *v))),
            TokenKind::LParen => {
                let e = self.expression()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(e)
            }
            TokenKind::Ident(name) => match name.as_str() {
                "i" => Ok(HoloExpr::constant(C64::new(0.0, 1.0))),
                "pi" => Ok(HoloExpr::real(PI)),
                "exp" | "log" | "sqrt" => {
                    self.expect(TokenKind::LParen, "`(` after function name")?;
                    let arg = self.expression()?;
                    let mut branch = 0;
                    if self.peek().kind == TokenKind::Semi {
                        if name == "exp" {
                            let t = self.peek().clone();
                            return Err(self.error(&t, "exp takes no branch"));
                        }
                        self.advance();
                        let bt = self.peek().clone();
                        branch = self.integer()?;
                        if name == "sqrt" && !(branch == 0 || branch == 1) {
                            return Err(self.error(&bt, "sqrt branch must be 0 or 1"));
                        }
                    }
                    self.expect(TokenKind::RParen, "`)`")?;
                    Ok(match name.as_str() {
                        "exp" => HoloExpr::exp(arg),
                        "log" => HoloExpr::log(arg, branch),
                        _ => HoloExpr::sqrt(arg, branch == 1),
                    })
                }
                _ => match self.vars.iter().position(|v| v == name) {
                    Some(i) => {
                        if self.peek().kind == TokenKind::LParen {
                            let t = self.peek().clone();
                            return Err(self.error(&t, "variables cannot be called"));
                        }
                        Ok(HoloExpr::var(i))
                    }
                    None => {
                        if self.peek().kind == TokenKind::LParen {
                            Err(Error::UnknownName(format!("function `{name}`")))
                        } else {
                            Err(Error::UnknownName(name.clone()))
                        }
                    }
                },
            },
            _ => Err(self.error(&t, "expected a number, variable, function or `(`")),
        }
    }
}

/// Parses `text` with the declared variable names (`Var(i)` is `vars[i]`).
pub fn parse_expr(text: &str, vars: &[String]) -> Result<HoloExpr> {
    for v in vars {
        if matches!(v.as_str(), "i" | "pi" | "exp" | "log" | "sqrt" | "d") {
            return Err(Error::Config(format!("`{v}` is reserved and cannot name a variable")));
        }
    }
    let mut p = Parser::new(text, vars, 1)?;
    let e = p.expression()?;
    let t = p.peek().clone();
    if t.kind != TokenKind::End {
        return Err(p.error(&t, "unexpected token after expression"));
    }
    Ok(e)
}
