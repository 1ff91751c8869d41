//! Determinant expressions for `zeta-det`.
//!
//! ```text
//! dexpr   := dfactor (('*' | '/') dfactor)*
//! dfactor := primary ['^' '(' ['-'] rational ')']
//! primary := 'detp' '(' [rational '*'] op '|' space ')' | 'vol' '(' ident ')'
//!          | '(' dexpr ')' | rational
//! op      := 'D' | 'Dp' | 'Dpp'
//! ```

use g2gauge::coeffring::Rational;
use g2gauge::regdet::{Atom, FormalDet, Op, PowerProduct, Space};
use num_traits::{One, Zero};

use crate::error::ParseError;
use crate::formexpr::parse_rational;
use crate::lexer::{Cursor, Tok};

struct Parser {
    cur: Cursor,
}

impl Parser {
    fn dexpr(&mut self) -> Result<FormalDet, ParseError> {
        let mut acc = self.dfactor()?;
        loop {
            let pos = self.cur.pos();
            if self.cur.eat(&Tok::Star) {
                acc = acc.mul(&self.dfactor()?);
            } else if self.cur.eat(&Tok::Slash) {
                let rhs = self.dfactor()?;
                acc = acc.div(&rhs).map_err(|e| ParseError::syntax(pos, e.to_string()))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn dfactor(&mut self) -> Result<FormalDet, ParseError> {
        let base = self.primary()?;
        if !self.cur.eat(&Tok::Caret) {
            return Ok(base);
        }
        self.cur.expect(Tok::LParen)?;
        let pos = self.cur.pos();
        let neg = self.cur.eat(&Tok::Minus);
        let mut e = parse_rational(&mut self.cur)?;
        if neg {
            e = -e;
        }
        self.cur.expect(Tok::RParen)?;
        base.pow(&e).map_err(|err| ParseError::syntax(pos, err.to_string()))
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.cur.peek().clone() {
            Tok::Ident(s) => {
                self.cur.bump();
                Ok(s)
            }
            _ => Err(self.cur.unexpected("a name")),
        }
    }

    fn primary(&mut self) -> Result<FormalDet, ParseError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::Num(_) => {
                let r = parse_rational(&mut self.cur)?;
                let prefactor = PowerProduct::from_rational(&r).map_err(|e| ParseError::syntax(pos, e.to_string()))?;
                Ok(FormalDet { prefactor, ..FormalDet::one() })
            }
            Tok::LParen => {
                self.cur.bump();
                let inner = self.dexpr()?;
                self.cur.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "detp" => {
                self.cur.bump();
                self.cur.expect(Tok::LParen)?;
                let scale = if matches!(self.cur.peek(), Tok::Num(_)) {
                    let spos = self.cur.pos();
                    let s = parse_rational(&mut self.cur)?;
                    if s.is_zero() {
                        return Err(ParseError::syntax(spos, "zero scale"));
                    }
                    self.cur.expect(Tok::Star)?;
                    s
                } else {
                    Rational::one()
                };
                let opos = self.cur.pos();
                let op = match self.ident()?.as_str() {
                    "D" => Op::Delta,
                    "Dp" => Op::DeltaP,
                    "Dpp" => Op::DeltaPP,
                    other => return Err(ParseError::unknown(opos, other)),
                };
                self.cur.expect(Tok::Pipe)?;
                let space = Space::parse(&self.ident()?);
                self.cur.expect(Tok::RParen)?;
                Ok(FormalDet::atom(Atom::Det { scale, op, space }))
            }
            Tok::Ident(name) if name == "vol" => {
                self.cur.bump();
                self.cur.expect(Tok::LParen)?;
                let v = self.ident()?;
                self.cur.expect(Tok::RParen)?;
                Ok(FormalDet::atom(Atom::Vol(v)))
            }
            Tok::Ident(name) => Err(ParseError::unknown(pos, &name)),
            _ => Err(self.cur.unexpected("`detp(...)`, `vol(...)`, a number or `(`")),
        }
    }
}

pub fn parse_det(text: &str) -> Result<FormalDet, ParseError> {
    let mut p = Parser { cur: Cursor::new(text)? };
    let d = p.dexpr()?;
    p.cur.finish()?;
    Ok(d)
}
