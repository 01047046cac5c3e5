//! Parser for circle-map expressions such as `2*z - 0.3*cos(3*z + 1)`.

use std::f64::consts::TAU;

use flatreeb::circle_map::CircleMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("parse error at {position}: {message}")]
    ParseError { position: usize, message: String },
    #[error("coefficient of z must be an integer, found {value} at {position}")]
    NonIntegerDegree { position: usize, value: f64 },
    #[error("unsupported non-periodic term at {position}: {term}")]
    NonPeriodic { position: usize, term: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Sin,
    Cos,
}

/// `coefficient · trig(frequency · z + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExprHarmonic {
    pub coefficient: f64,
    pub trig: Trig,
    pub frequency: u32,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaExpr {
    pub degree: i64,
    pub constant: f64,
    pub harmonics: Vec<ExprHarmonic>,
}

impl ThetaExpr {
    pub fn periodic_value(&self, z: f64) -> f64 {
        self.constant
            + self
                .harmonics
                .iter()
                .map(|h| {
                    let arg = h.frequency as f64 * z + h.phase;
                    h.coefficient
                        * match h.trig {
                            Trig::Sin => arg.sin(),
                            Trig::Cos => arg.cos(),
                        }
                })
                .sum::<f64>()
    }

    pub fn value(&self, z: f64) -> f64 {
        self.degree as f64 * z + self.periodic_value(z)
    }

    pub fn sample(&self, n: usize) -> flatreeb::Result<CircleMap> {
        let h = TAU / n as f64;
        let periodic: Vec<f64> = (0..n).map(|j| self.periodic_value(h * j as f64)).collect();
        CircleMap::from_periodic(self.degree, &periodic)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Caret,
    Other(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            let value = text.parse::<f64>().map_err(|_| ExprError::ParseError {
                position: pos,
                message: format!("bad number '{text}'"),
            })?;
            out.push((pos, Tok::Num(value)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((
                pos,
                Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect()),
            ));
            continue;
        }
        out.push((
            pos,
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '^' => Tok::Caret,
                other => Tok::Other(other),
            },
        ));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.src.len(), |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::ParseError {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn non_periodic<T>(&self, start: usize) -> Result<T, ExprError> {
        let end = self
            .toks
            .get(self.at + 1)
            .map_or(self.src.len(), |(p, _)| *p);
        Err(ExprError::NonPeriodic {
            position: start,
            term: self.src[start..end.max(start)].trim().to_string(),
        })
    }

    /// Rejects `^` directly after a term.
    fn no_power(&self, start: usize) -> Result<(), ExprError> {
        if self.peek() == Some(&Tok::Caret) {
            return self.non_periodic(start);
        }
        Ok(())
    }

    fn signed_number(&mut self) -> Result<f64, ExprError> {
        let sign = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                -1.0
            }
            Some(Tok::Plus) => {
                self.at += 1;
                1.0
            }
            _ => 1.0,
        };
        match self.next() {
            Some(Tok::Num(v)) => Ok(sign * v),
            _ => {
                self.at -= 1;
                self.fail("expected a number")
            }
        }
    }

    /// `int '*'? 'z' (('+'|'-') number)?` or `'z' ...`, returning `(k, phase)`.
    fn argument(&mut self) -> Result<(u32, f64), ExprError> {
        let start = self.pos();
        let k = match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                if self.peek() == Some(&Tok::Star) {
                    self.at += 1;
                }
                if v.fract() != 0.0 {
                    return self.non_periodic(start);
                }
                if v < 1.0 {
                    return self.fail("frequency must be a positive integer");
                }
                v as u32
            }
            _ => 1,
        };
        match self.next() {
            Some(Tok::Ident(s)) if s == "z" => {}
            _ => {
                self.at -= 1;
                return self.fail("expected 'z' in the argument");
            }
        }
        self.no_power(start)?;
        let phase = match self.peek() {
            Some(Tok::Plus) | Some(Tok::Minus) => self.signed_number()?,
            _ => 0.0,
        };
        Ok((k, phase))
    }

    fn term(&mut self, sign: f64, out: &mut ThetaExpr) -> Result<(), ExprError> {
        let start = self.pos();
        let coefficient = match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                match self.peek() {
                    Some(Tok::Star) => {
                        self.at += 1;
                        Some(v)
                    }
                    Some(Tok::Ident(_)) => Some(v),
                    _ => {
                        out.constant += sign * v;
                        return self.no_power(start);
                    }
                }
            }
            _ => None,
        };
        match self.next() {
            Some(Tok::Ident(name)) if name == "z" => {
                self.no_power(start)?;
                let c = sign * coefficient.unwrap_or(1.0);
                if c.fract() != 0.0 {
                    return Err(ExprError::NonIntegerDegree {
                        position: start,
                        value: c,
                    });
                }
                out.degree += c as i64;
                Ok(())
            }
            Some(Tok::Ident(name)) if name == "sin" || name == "cos" => {
                self.expect(Tok::LParen, "'('")?;
                let (frequency, phase) = self.argument()?;
                self.expect(Tok::RParen, "')'")?;
                self.no_power(start)?;
                out.harmonics.push(ExprHarmonic {
                    coefficient: sign * coefficient.unwrap_or(1.0),
                    trig: if name == "sin" { Trig::Sin } else { Trig::Cos },
                    frequency,
                    phase,
                });
                Ok(())
            }
            Some(Tok::Ident(_)) => {
                self.at -= 1;
                self.non_periodic(start)
            }
            _ => {
                self.at -= 1;
                self.fail("expected a term")
            }
        }
    }
}

pub fn parse_theta(src: &str) -> Result<ThetaExpr, ExprError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
        src,
    };
    let mut out = ThetaExpr {
        degree: 0,
        constant: 0.0,
        harmonics: Vec::new(),
    };
    if p.toks.is_empty() {
        return p.fail("empty expression");
    }
    let mut sign = match p.peek() {
        Some(Tok::Minus) => {
            p.at += 1;
            -1.0
        }
        Some(Tok::Plus) => {
            p.at += 1;
            1.0
        }
        _ => 1.0,
    };
    loop {
        p.term(sign, &mut out)?;
        match p.next() {
            None => return Ok(out),
            Some(Tok::Plus) => sign = 1.0,
            Some(Tok::Minus) => sign = -1.0,
            Some(Tok::Star) | Some(Tok::Other('/')) => {
                p.at -= 1;
                let start = p.pos();
                return p.non_periodic(start);
            }
            Some(_) => {
                p.at -= 1;
                return p.fail("expected '+' or '-'");
            }
        }
    }
}
