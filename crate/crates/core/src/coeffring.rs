//! Exact scalars: rationals, Gaussian rationals and multivariate polynomials
//! over the coordinates `x1..x7` plus declared parameters.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Lossy conversion used only by the floating-point search and reports.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("no value assigned to {0}")]
    MissingAssignment(String),
    #[error("{0} is a parameter, not a coordinate")]
    NotACoordinate(String),
    #[error("symbol {0} is reserved or declared twice")]
    BadParameter(String),
}

/// Element of Q(i).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }
    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }
    pub fn from_int(n: i64) -> Self {
        Self::real(int(n))
    }
    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }
    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn scale(&self, r: &Rational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im.is_negative() => write!(f, "{}-{}i", self.re, -self.im.clone()),
            _ => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for GaussianRational {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let n = o.norm_sq();
        let p = &self * &o.conj();
        Self { re: p.re / &n, im: p.im / n }
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

/// Symbol index: `0..7` are the coordinates `x1..x7`, later indices are parameters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub u16);

pub const NUM_COORDS: u16 = 7;

impl Var {
    /// Coordinate `x_i`, `i` in `1..=7`.
    pub fn x(i: u8) -> Var {
        assert!((1..=7).contains(&i), "coordinate index out of range");
        Var(i as u16 - 1)
    }
    pub fn param(k: u16) -> Var {
        Var(NUM_COORDS + k)
    }
    pub fn is_coordinate(self) -> bool {
        self.0 < NUM_COORDS
    }
    fn default_name(self) -> String {
        if self.is_coordinate() {
            alloc::format!("x{}", self.0 + 1)
        } else {
            alloc::format!("p{}", self.0 - NUM_COORDS)
        }
    }
}

/// Symbol table: the seven coordinates followed by declared parameters, in
/// declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ring {
    params: Vec<String>,
}

impl Ring {
    pub fn new<I, S>(params: I) -> Result<Self, CoeffError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ring = Ring::default();
        for p in params {
            ring.declare(p)?;
        }
        Ok(ring)
    }

    pub fn declare(&mut self, name: impl Into<String>) -> Result<Var, CoeffError> {
        let name = name.into();
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || coordinate_index(&name).is_some() || self.params.contains(&name) || name == "e" {
            return Err(CoeffError::BadParameter(name));
        }
        self.params.push(name);
        Ok(Var::param(self.params.len() as u16 - 1))
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        if let Some(i) = coordinate_index(name) {
            return Some(Var::x(i));
        }
        self.params.iter().position(|p| p == name).map(|k| Var::param(k as u16))
    }

    pub fn name(&self, v: Var) -> String {
        if v.is_coordinate() {
            return v.default_name();
        }
        self.params
            .get((v.0 - NUM_COORDS) as usize)
            .cloned()
            .unwrap_or_else(|| v.default_name())
    }
}

fn coordinate_index(name: &str) -> Option<u8> {
    let rest = name.strip_prefix('x')?;
    match rest {
        "1" | "2" | "3" | "4" | "5" | "6" | "7" => rest.parse().ok(),
        _ => None,
    }
}

/// Exponent vector, dense over the variable order with trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        let mut e = alloc::vec![0; v.0 as usize + 1];
        e[v.0 as usize] = 1;
        Monomial(e)
    }

    pub fn from_exponents(mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.get(v.0 as usize).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut e = long.0.clone();
        for (a, b) in e.iter_mut().zip(&short.0) {
            *a += b;
        }
        Monomial(e)
    }

    fn with_exp(&self, v: Var, k: u32) -> Monomial {
        let mut e = self.0.clone();
        if e.len() <= v.0 as usize {
            e.resize(v.0 as usize + 1, 0);
        }
        e[v.0 as usize] = k;
        Monomial::from_exponents(e)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| Var(i as u16))
    }

    /// Display order: higher degree first, then larger exponent on later symbols.
    fn display_cmp(&self, o: &Monomial) -> core::cmp::Ordering {
        o.degree().cmp(&self.degree()).then_with(|| {
            let n = self.0.len().max(o.0.len());
            for i in (0..n).rev() {
                let a = self.0.get(i).copied().unwrap_or(0);
                let b = o.0.get(i).copied().unwrap_or(0);
                if a != b {
                    return b.cmp(&a);
                }
            }
            core::cmp::Ordering::Equal
        })
    }
}

/// Multivariate polynomial with rational coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), Rational::one())
    }

    pub fn x(i: u8) -> Self {
        Self::var(Var::x(i))
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Coefficient of `v^k` as a polynomial in the remaining symbols.
    pub fn coeff_in(&self, v: Var, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.exp(v) == k {
                out.add_term(m.with_exp(v, 0), c.clone());
            }
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative; parameters are constants.
    pub fn partial(&self, v: Var) -> Result<Poly, CoeffError> {
        if !v.is_coordinate() {
            return Err(CoeffError::NotACoordinate(v.default_name()));
        }
        Ok(self.partial_unchecked(v))
    }

    pub(crate) fn partial_unchecked(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let k = m.exp(v);
            if k > 0 {
                out.add_term(m.with_exp(v, k - 1), c * int(k as i64));
            }
        }
        out
    }

    /// Exact value; every occurring symbol must be assigned.
    pub fn eval(&self, assignment: &BTreeMap<Var, Rational>) -> Result<Rational, CoeffError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m.vars() {
                let val = assignment
                    .get(&v)
                    .ok_or_else(|| CoeffError::MissingAssignment(v.default_name()))?;
                t *= pow_rat(val, m.exp(v));
            }
            total += t;
        }
        Ok(total)
    }

    /// Substitutes the assigned symbols, leaving the rest symbolic.
    pub fn eval_partial(&self, assignment: &BTreeMap<Var, Rational>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let mut e = m.0.clone();
            for v in m.vars() {
                if let Some(val) = assignment.get(&v) {
                    t *= pow_rat(val, m.exp(v));
                    e[v.0 as usize] = 0;
                }
            }
            out.add_term(Monomial::from_exponents(e), t);
        }
        out
    }

    /// Replaces `v` by the polynomial `q`.
    pub fn substitute(&self, v: Var, q: &Poly) -> Poly {
        let mut out = Poly::zero();
        let mut powers: Vec<Poly> = alloc::vec![Poly::one()];
        for (m, c) in &self.terms {
            let k = m.exp(v) as usize;
            while powers.len() <= k {
                let next = powers.last().unwrap() * q;
                powers.push(next);
            }
            let rest = Poly::monomial(m.with_exp(v, 0), c.clone());
            out += &(&rest * &powers[k]);
        }
        out
    }

    /// Leading monomial and coefficient in display order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().min_by(|a, b| a.0.display_cmp(b.0))
    }

    /// Scales to integer coefficients with gcd 1 and a positive leading coefficient.
    pub fn normalized(&self) -> Poly {
        let Some((_, lead)) = self.leading() else {
            return Poly::zero();
        };
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let mut s = Rational::new(den, num);
        if lead.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    pub fn display<'a>(&'a self, ring: &'a Ring) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, ring: Some(ring) }
    }
}

fn pow_rat(r: &Rational, k: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..k {
        out *= r;
    }
    out
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    ring: Option<&'a Ring>,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| a.0.display_cmp(b.0));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(a.to_string());
            }
            let mut vars: Vec<Var> = m.vars().collect();
            vars.sort_by_key(|v| (v.is_coordinate(), v.0));
            for v in vars {
                let name = match self.ring {
                    Some(r) => r.name(v),
                    None => v.default_name(),
                };
                match m.exp(v) {
                    1 => factors.push(name),
                    e => factors.push(alloc::format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        PolyDisplay { poly: self, ring: None }.fmt(f)
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl MulAssign<&Poly> for Poly {
    fn mul_assign(&mut self, o: &Poly) {
        *self = &*self * o;
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! by_value {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, o: Poly) -> Poly {
                (&self).$f(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
