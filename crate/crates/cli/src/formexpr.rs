//! Text grammar for polynomials and exterior forms.
//!
//! ```text
//! poly   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := rational | symbol | factor '^' uint | '(' poly ')'
//! form   := ['+'|'-'] sterm (('+'|'-') sterm)*
//! sterm  := [term '*'] 'e[' uint (',' uint)* ']' | term
//! ```
//!
//! `x1..x7` are coordinates; other symbols must be declared in the [`Ring`].

use std::fmt;

use g2gauge::coeffring::{Poly, Rational, Ring};
use g2gauge::exterior::KForm;
use num_traits::Zero;

use crate::error::ParseError;
use crate::lexer::{Cursor, Pos, Tok};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    Sym(String),
    Pow(Box<Expr>, u32),
    Product(Vec<Expr>),
    /// Signed terms; `true` marks subtraction (or a leading minus).
    Sum(Vec<(bool, Expr)>),
    Paren(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormTerm {
    Basis { coeff: Option<Expr>, indices: Vec<u8> },
    Scalar(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormAst {
    pub terms: Vec<(bool, FormTerm)>,
}

impl FormAst {
    pub fn degree(&self) -> usize {
        match self.terms.first() {
            Some((_, FormTerm::Basis { indices, .. })) => indices.len(),
            _ => 0,
        }
    }

    pub fn to_form(&self, ring: &Ring) -> KForm {
        let mut out = KForm::zero(self.degree() as u8);
        for (neg, t) in &self.terms {
            let mut w = match t {
                FormTerm::Basis { coeff, indices } => {
                    let e = KForm::e(indices);
                    match coeff {
                        Some(c) => e.scale(&c.to_poly(ring)),
                        None => e,
                    }
                }
                FormTerm::Scalar(c) => KForm::scalar(c.to_poly(ring)),
            };
            if *neg {
                w = -&w;
            }
            out = &out + &w;
        }
        out
    }
}

impl Expr {
    /// Symbols were resolved against `ring` when parsing.
    pub fn to_poly(&self, ring: &Ring) -> Poly {
        match self {
            Expr::Num(r) => Poly::constant(r.clone()),
            Expr::Sym(s) => Poly::var(ring.lookup(s).expect("symbol resolved at parse time")),
            Expr::Pow(b, k) => b.to_poly(ring).pow(*k),
            Expr::Product(fs) => fs.iter().fold(Poly::one(), |acc, f| &acc * &f.to_poly(ring)),
            Expr::Sum(ts) => ts.iter().fold(Poly::zero(), |acc, (neg, t)| {
                let p = t.to_poly(ring);
                if *neg {
                    &acc - &p
                } else {
                    &acc + &p
                }
            }),
            Expr::Paren(e) => e.to_poly(ring),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Pow(b, k) => write!(f, "{b}^{k}"),
            Expr::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            Expr::Sum(ts) => write_signed(f, ts),
            Expr::Paren(e) => write!(f, "({e})"),
        }
    }
}

fn write_signed<T: fmt::Display>(f: &mut fmt::Formatter<'_>, ts: &[(bool, T)]) -> fmt::Result {
    for (i, (neg, t)) in ts.iter().enumerate() {
        match (i, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl fmt::Display for FormTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormTerm::Basis { coeff, indices } => {
                if let Some(c) = coeff {
                    write!(f, "{c}*")?;
                }
                let ix: Vec<String> = indices.iter().map(u8::to_string).collect();
                write!(f, "e[{}]", ix.join(","))
            }
            FormTerm::Scalar(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for FormAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed(f, &self.terms)
    }
}

struct Parser<'r> {
    cur: Cursor,
    ring: &'r Ring,
}

impl Parser<'_> {
    fn leading_sign(&mut self) -> bool {
        if self.cur.eat(&Tok::Minus) {
            true
        } else {
            self.cur.eat(&Tok::Plus);
            false
        }
    }

    fn poly(&mut self) -> Result<Expr, ParseError> {
        let neg = self.leading_sign();
        let mut terms = vec![(neg, self.term()?)];
        loop {
            let neg = match self.cur.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.cur.bump();
            terms.push((neg, self.term()?));
        }
        if terms.len() == 1 && !terms[0].0 {
            Ok(terms.pop().unwrap().1)
        } else {
            Ok(Expr::Sum(terms))
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut fs = vec![self.factor()?];
        while self.cur.eat(&Tok::Star) {
            fs.push(self.factor()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Product(fs) })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.cur.eat(&Tok::Caret) {
            base = Expr::Pow(Box::new(base), self.uint()?);
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let pos = self.cur.pos();
        match self.cur.bump().0 {
            Tok::Num(s) => s.parse().map_err(|_| ParseError::syntax(pos, format!("`{s}` is too large"))),
            t => Err(ParseError::syntax(pos, format!("expected an unsigned integer, found {}", t.describe()))),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::Num(_) => Ok(Expr::Num(parse_rational(&mut self.cur)?)),
            Tok::Ident(name) => {
                if name == "e" && self.cur.peek2() == &Tok::LBracket {
                    return Err(ParseError::syntax(pos, "basis form `e[...]` is not allowed here"));
                }
                if self.ring.lookup(&name).is_none() {
                    return Err(ParseError::unknown(pos, &name));
                }
                self.cur.bump();
                Ok(Expr::Sym(name))
            }
            Tok::LParen => {
                self.cur.bump();
                let inner = self.poly()?;
                self.cur.expect(Tok::RParen)?;
                Ok(Expr::Paren(Box::new(inner)))
            }
            _ => Err(self.cur.unexpected("a number, symbol or `(`")),
        }
    }

    fn at_basis(&self) -> bool {
        matches!(self.cur.peek(), Tok::Ident(s) if s == "e") && self.cur.peek2() == &Tok::LBracket
    }

    fn basis(&mut self) -> Result<Vec<u8>, ParseError> {
        self.cur.bump();
        self.cur.expect(Tok::LBracket)?;
        let mut out: Vec<u8> = Vec::new();
        loop {
            let pos = self.cur.pos();
            let k = self.uint()?;
            if !(1..=7).contains(&k) {
                return Err(ParseError::syntax(pos, format!("index {k} is outside 1..7")));
            }
            if out.contains(&(k as u8)) {
                return Err(ParseError::syntax(pos, format!("repeated index {k}")));
            }
            out.push(k as u8);
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        self.cur.expect(Tok::RBracket)?;
        Ok(out)
    }

    fn sterm(&mut self) -> Result<FormTerm, ParseError> {
        if self.at_basis() {
            return Ok(FormTerm::Basis { coeff: None, indices: self.basis()? });
        }
        let mut fs = vec![self.factor()?];
        while self.cur.eat(&Tok::Star) {
            if self.at_basis() {
                let coeff = if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Product(fs) };
                return Ok(FormTerm::Basis { coeff: Some(coeff), indices: self.basis()? });
            }
            fs.push(self.factor()?);
        }
        Ok(FormTerm::Scalar(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Product(fs) }))
    }

    fn form(&mut self) -> Result<FormAst, ParseError> {
        let mut terms = Vec::new();
        let mut degree: Option<usize> = None;
        let mut neg = self.leading_sign();
        loop {
            let pos: Pos = self.cur.pos();
            let t = self.sterm()?;
            let d = match &t {
                FormTerm::Basis { indices, .. } => indices.len(),
                FormTerm::Scalar(_) => 0,
            };
            match degree {
                None => degree = Some(d),
                Some(k) if k != d => {
                    return Err(ParseError::syntax(pos, format!("term of degree {d} in a form of degree {k}")))
                }
                _ => {}
            }
            terms.push((neg, t));
            neg = match self.cur.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.cur.bump();
        }
        Ok(FormAst { terms })
    }
}

/// `int ('/' uint)?`, the cursor sitting on the integer.
pub(crate) fn parse_rational(cur: &mut Cursor) -> Result<Rational, ParseError> {
    let pos = cur.pos();
    let Tok::Num(n) = cur.bump().0 else {
        return Err(ParseError::syntax(pos, "expected a number"));
    };
    let num: num_bigint::BigInt = n.parse().expect("digits");
    if cur.peek() == &Tok::Slash {
        cur.bump();
        let dpos = cur.pos();
        let Tok::Num(d) = cur.bump().0 else {
            return Err(ParseError::syntax(dpos, "expected a denominator"));
        };
        let den: num_bigint::BigInt = d.parse().expect("digits");
        if den.is_zero() {
            return Err(ParseError::syntax(dpos, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    Ok(Rational::from_integer(num))
}

pub fn parse_poly(text: &str, ring: &Ring) -> Result<Expr, ParseError> {
    let mut p = Parser { cur: Cursor::new(text)?, ring };
    let e = p.poly()?;
    p.cur.finish()?;
    Ok(e)
}

pub fn parse_form_ast(text: &str, ring: &Ring) -> Result<FormAst, ParseError> {
    let mut p = Parser { cur: Cursor::new(text)?, ring };
    let f = p.form()?;
    p.cur.finish()?;
    Ok(f)
}

pub fn parse_form(text: &str, ring: &Ring) -> Result<KForm, ParseError> {
    Ok(parse_form_ast(text, ring)?.to_form(ring))
}
