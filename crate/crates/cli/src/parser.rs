//! Operator expression parser.
//!
//! Grammar (products are noncommutative, `s` is σ):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' sint)?
//! atom   := RATIONAL | 'z' | 'q' | 's' | '(' expr ')' | '-' factor
//! ```
//!
//! `RATIONAL` is `digits` or `digits/digits`. Commutation is applied during
//! lowering, so `s*z` evaluates to `q*z*s`.

use qslope_core::{Ctx, Error, LaurentSeries, OrePoly, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(i64, i64),
    Z,
    Q,
    S,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            'z' => {
                out.push((i, Token::Z));
                i += 1;
            }
            'q' => {
                out.push((i, Token::Q));
                i += 1;
            }
            's' => {
                out.push((i, Token::S));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let num: i64 = src[start..i].parse().map_err(|_| Error::Parse {
                    offset: start,
                    msg: "integer literal overflows i64".into(),
                })?;
                let mut den = 1i64;
                if i < bytes.len() && bytes[i] == b'/' {
                    let dstart = i + 1;
                    let mut j = dstart;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == dstart {
                        return Err(Error::Parse {
                            offset: i,
                            msg: "expected denominator digits after '/'".into(),
                        });
                    }
                    den = src[dstart..j].parse().map_err(|_| Error::Parse {
                        offset: dstart,
                        msg: "denominator overflows i64".into(),
                    })?;
                    if den == 0 {
                        return Err(Error::Parse {
                            offset: dstart,
                            msg: "zero denominator".into(),
                        });
                    }
                    i = j;
                }
                out.push((start, Token::Number(num, den)));
            }
            _ => {
                return Err(Error::Parse {
                    offset: i,
                    msg: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a Ctx,
    prec: i64,
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                offset: self.offset(),
                msg: format!("expected {t:?}"),
            })
        }
    }

    fn expr(&mut self) -> Result<OrePoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OrePoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OrePoly> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let off = self.offset();
            let exp = self.signed_int()?;
            return self.power(base, exp, off);
        }
        Ok(base)
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.bump() {
            Some(Token::Number(n, 1)) => Ok(if neg { -n } else { n }),
            _ => Err(Error::Parse {
                offset: self.offset(),
                msg: "expected an integer exponent".into(),
            }),
        }
    }

    fn power(&mut self, base: OrePoly, exp: i64, off: usize) -> Result<OrePoly> {
        if exp == 0 {
            return Ok(OrePoly::one(self.ctx, self.prec));
        }
        if exp > 0 {
            let mut acc = base.clone();
            for _ in 1..exp {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        // Negative powers only for nonzero monomials a·σ^k:
        // (a σ^k)⁻¹ = σ_q^(−k)(a⁻¹) σ^(−k).
        let mut terms: Vec<(i64, &LaurentSeries)> = base.terms().collect();
        if terms.len() != 1 {
            return Err(Error::Parse {
                offset: off,
                msg: "negative power of a non-monomial operator".into(),
            });
        }
        let (k, a) = terms.pop().unwrap();
        let inv = a
            .invert()
            .map_err(|_| Error::Parse {
                offset: off,
                msg: "negative power of a zero coefficient".into(),
            })?
            .sigma_pow(-k);
        let base_inv = OrePoly::term(inv, -k);
        let mut acc = base_inv.clone();
        for _ in 1..(-exp) {
            acc = acc.mul(&base_inv);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<OrePoly> {
        let off = self.offset();
        match self.bump() {
            Some(Token::Number(n, d)) => Ok(OrePoly::from_terms(
                self.ctx,
                vec![(
                    0,
                    LaurentSeries::constant(self.ctx, Scalar::from_ratio(n, d), self.prec),
                )],
            )),
            Some(Token::Z) => Ok(OrePoly::from_terms(
                self.ctx,
                vec![(0, LaurentSeries::monomial(self.ctx, Scalar::one(), 1, self.prec))],
            )),
            Some(Token::Q) => Ok(OrePoly::from_terms(
                self.ctx,
                vec![(
                    0,
                    LaurentSeries::constant(self.ctx, self.ctx.q().clone(), self.prec),
                )],
            )),
            Some(Token::S) => Ok(OrePoly::from_terms(
                self.ctx,
                vec![(1, LaurentSeries::one(self.ctx, self.prec))],
            )),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Minus) => Ok(self.factor()?.neg()),
            other => Err(Error::Parse {
                offset: off,
                msg: format!("expected an atom, found {other:?}"),
            }),
        }
    }
}

/// Parses an operator expression over the given context at the given series
/// precision.
pub fn parse_operator(ctx: &Ctx, prec: i64, src: &str) -> Result<OrePoly> {
    let tokens = lex(src)?;
    let mut p = Parser {
        ctx,
        prec,
        tokens,
        pos: 0,
        end: src.len(),
    };
    let out = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse {
            offset: p.offset(),
            msg: "trailing input".into(),
        });
    }
    Ok(out)
}
