//! Semiclassical bookkeeping for the higher-order U(1) Chern-Simons partition
//! function on `M x S^1`.
//!
//! Three layers:
//! * a mode-level action (`fourier_reduce`, `background_split`) whose terms are
//!   ordered wedge monomials of mode symbols, compared modulo Stokes on `M`;
//! * zeta-regularized products `prod_{n>0} (c n^k)^m` evaluated exactly over a
//!   basis of primes, `pi` and free symbols;
//! * a formal determinant calculus driven by named rewrite rules.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeffring::{int, GaussianRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegdetError {
    #[error("grading mismatch: {0}")]
    GradingMismatch(String),
    #[error("unsupported product: {0}")]
    UnsupportedPattern(String),
    #[error("rule `{rule}` does not apply: {reason}")]
    RuleFailure { rule: &'static str, reason: String },
}

// ---------------------------------------------------------------------------
// mode-level action

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    B,
    /// Background `B^b`.
    Bb,
    /// Fluctuation.
    Bq,
    A0,
    Cbar,
    C,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::B => "B",
            Field::Bb => "Bb",
            Field::Bq => "Bq",
            Field::A0 => "A0",
            Field::Cbar => "cbar",
            Field::C => "c",
        }
    }

    fn form_degree(self) -> u8 {
        match self {
            Field::B | Field::Bb | Field::Bq => 1,
            _ => 0,
        }
    }

    fn is_ghost(self) -> bool {
        matches!(self, Field::C | Field::Cbar)
    }
}

/// A mode symbol, possibly differentiated along `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub field: Field,
    pub d: bool,
    pub mode: i64,
}

impl Factor {
    pub fn new(field: Field, mode: i64) -> Self {
        Factor { field, d: false, mode }
    }

    pub fn d(field: Field, mode: i64) -> Self {
        Factor { field, d: true, mode }
    }

    pub fn degree(self) -> u8 {
        self.field.form_degree() + self.d as u8
    }

    pub fn is_odd(self) -> bool {
        self.field.is_ghost() || self.degree() % 2 == 1
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = if self.d { "d" } else { "" };
        if self.field == Field::A0 {
            write!(f, "{d}A0")
        } else {
            write!(f, "{d}{}[{}]", self.field.name(), self.mode)
        }
    }
}

/// A Fourier-expanded field truncated to modes `-N..=N`. With `real`, the
/// conjugate of mode `n` is mode `-n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeField {
    pub field: Field,
    pub truncation: u32,
    pub real: bool,
}

impl ModeField {
    pub fn modes(&self) -> core::ops::RangeInclusive<i64> {
        -(self.truncation as i64)..=self.truncation as i64
    }

    pub fn mode(&self, n: i64) -> Option<Factor> {
        (n.unsigned_abs() <= self.truncation as u64).then_some(Factor::new(self.field, n))
    }

    /// The conjugate of mode `n`; only available for real fields.
    pub fn conj(&self, n: i64) -> Option<Factor> {
        if self.real {
            self.mode(-n)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Integral {
    /// `int_M (...) ^ phi`
    Phi,
    /// `int_M dVol (...)`
    Vol,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub lambda: u32,
    pub pi: u32,
    pub integral: Integral,
    pub factors: Vec<Factor>,
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pi > 0 {
            write!(f, "pi^{} ", self.pi)?;
        }
        if self.lambda > 0 {
            write!(f, "lambda^{} ", self.lambda)?;
        }
        let body: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        match self.integral {
            Integral::Phi => write!(f, "int {} ^ phi", body.join(" ^ ")),
            Integral::Vol => write!(f, "int dVol {}", body.join(" ")),
        }
    }
}

/// Sorts factors into canonical order, returning the graded sign, or `None` if
/// an odd factor repeats.
pub fn canonical_order(factors: &[Factor]) -> Option<(Vec<Factor>, i64)> {
    let mut v = factors.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if v[j - 1].is_odd() && v[j].is_odd() {
                sign = -sign;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1] && w[0].is_odd()) {
        return None;
    }
    Some((v, sign))
}

/// Formal sum of mode monomials with Gaussian-rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolicAction {
    terms: BTreeMap<TermKey, GaussianRational>,
}

impl SymbolicAction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, lambda: u32, pi: u32, integral: Integral, factors: &[Factor], c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let Some((factors, s)) = canonical_order(factors) else { return };
        let key = TermKey { lambda, pi, integral, factors };
        let c = if s < 0 { -c } else { c };
        let entry = self.terms.entry(key.clone()).or_insert_with(GaussianRational::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn add_key(&mut self, key: &TermKey, c: GaussianRational) {
        self.add(key.lambda, key.pi, key.integral, &key.factors, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &TermKey) -> GaussianRational {
        self.terms.get(key).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn plus(&self, other: &SymbolicAction) -> SymbolicAction {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_key(k, c.clone());
        }
        out
    }

    pub fn minus(&self, other: &SymbolicAction) -> SymbolicAction {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_key(k, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> SymbolicAction {
        let mut out = SymbolicAction::new();
        for (k, v) in self.terms() {
            out.add_key(k, v * c);
        }
        out
    }

    pub fn filter(&self, pred: impl Fn(&TermKey) -> bool) -> SymbolicAction {
        SymbolicAction { terms: self.terms.iter().filter(|(k, _)| pred(k)).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    pub fn lambda_sector(&self, power: u32) -> SymbolicAction {
        self.filter(|k| k.lambda == power)
    }

    /// Whether every term of `self` occurs in `other` with the same coefficient.
    pub fn embeds_in(&self, other: &SymbolicAction) -> bool {
        self.terms.iter().all(|(k, v)| other.terms.get(k) == Some(v))
    }

    /// Sets the background to zero, forgets the `lambda` grading and renames the
    /// fluctuation to `B`.
    pub fn drop_background(&self) -> SymbolicAction {
        let mut out = SymbolicAction::new();
        for (k, v) in self.terms() {
            if k.factors.iter().any(|x| x.field == Field::Bb) {
                continue;
            }
            let factors: Vec<Factor> = k
                .factors
                .iter()
                .map(|x| if x.field == Field::Bq { Factor { field: Field::B, ..*x } } else { *x })
                .collect();
            out.add(0, k.pi, k.integral, &factors, v.clone());
        }
        out
    }

    /// Replaces every `B` factor by `Bb + lambda Bq`.
    pub fn substitute_background(&self) -> SymbolicAction {
        let mut out = SymbolicAction::new();
        for (k, v) in self.terms() {
            let slots: Vec<usize> = (0..k.factors.len()).filter(|&i| k.factors[i].field == Field::B).collect();
            for choice in 0u32..(1 << slots.len()) {
                let mut f = k.factors.clone();
                for (bit, &i) in slots.iter().enumerate() {
                    f[i].field = if choice >> bit & 1 == 1 { Field::Bq } else { Field::Bb };
                }
                out.add(k.lambda + choice.count_ones(), k.pi, k.integral, &f, v.clone());
            }
        }
        out
    }

    /// Stokes on `M` (with `d phi = 0`): in every `Phi` term with exactly one
    /// factor of `target`, moves the derivative off that factor.
    pub fn integrate_by_parts(&self, target: Field) -> SymbolicAction {
        let mut out = SymbolicAction::new();
        for (k, v) in self.terms() {
            let hits: Vec<usize> = (0..k.factors.len()).filter(|&i| k.factors[i].field == target).collect();
            if k.integral != Integral::Phi || hits.len() != 1 || !k.factors[hits[0]].d {
                out.add_key(k, v.clone());
                continue;
            }
            let i = hits[0];
            let mut base = k.factors.clone();
            base[i].d = false;
            let before = |j: usize| -> i64 { base[..j].iter().map(|x| x.degree() as i64).sum() };
            let pi_sign = if before(i) % 2 == 0 { 1 } else { -1 };
            for j in 0..base.len() {
                if j == i || base[j].d || base[j].field.is_ghost() {
                    continue;
                }
                let pj_sign = if before(j) % 2 == 0 { 1 } else { -1 };
                let mut f = base.clone();
                f[j].d = true;
                let c = v.scale(&int(-pi_sign * pj_sign));
                out.add(k.lambda, k.pi, k.integral, &f, c);
            }
        }
        out
    }

    pub fn display(&self) -> ActionDisplay<'_> {
        ActionDisplay(self)
    }
}

pub struct ActionDisplay<'a>(&'a SymbolicAction);

impl fmt::Display for ActionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.0.terms().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "({v}) {k}")?;
        }
        Ok(())
    }
}

fn gi(re: i64, im: i64) -> GaussianRational {
    GaussianRational::new(int(re), int(im))
}

fn triples(n: u32) -> impl Iterator<Item = (i64, i64, i64)> {
    let n = n as i64;
    (-n..=n).flat_map(move |a| (-n..=n).filter_map(move |b| (-(a + b)).abs().le(&n).then_some((a, b, -a - b))))
}

/// Truncated mode expansion of the gauge-fixed action: triple terms
/// `4 pi i (n+m) B_n ^ dB_m ^ B_{-n-m} ^ phi`, the `3 A0 dB_n ^ dB_{-n} ^ phi`
/// term and the ghost term `2 pi n cbar_n c_n`.
pub fn fourier_reduce(n: u32) -> SymbolicAction {
    let b = ModeField { field: Field::B, truncation: n, real: true };
    let mut s = SymbolicAction::new();
    for (p, q, r) in triples(n) {
        s.add(0, 1, Integral::Phi, &[Factor::new(Field::B, p), Factor::d(Field::B, q), Factor::new(Field::B, r)], gi(0, 4 * (p + q)));
    }
    for p in b.modes() {
        let conj = b.conj(p).expect("real field");
        s.add(0, 0, Integral::Phi, &[Factor::new(Field::A0, 0), Factor::d(Field::B, p), Factor { d: true, ..conj }], gi(3, 0));
        s.add(0, 1, Integral::Vol, &[Factor::new(Field::Cbar, p), Factor::new(Field::C, p)], gi(2 * p, 0));
    }
    s
}

/// The expected graded pieces: `S_q` (overall factor 3), `S_int` and `S_gh`.
pub fn zss_expected(n: u32) -> (SymbolicAction, SymbolicAction, SymbolicAction) {
    let mut bracket = SymbolicAction::new();
    let mut s_int = SymbolicAction::new();
    let mut s_gh = SymbolicAction::new();
    for (p, q, r) in triples(n) {
        // B^b_m ^ d BB_n ^ BB_{-m-n} with (n, m) = (p, q)
        bracket.add(2, 1, Integral::Phi, &[Factor::new(Field::Bb, q), Factor::d(Field::Bq, p), Factor::new(Field::Bq, r)], gi(0, 4 * (p + q)));
        s_int.add(3, 1, Integral::Phi, &[Factor::new(Field::Bq, p), Factor::d(Field::Bq, q), Factor::new(Field::Bq, r)], gi(0, 4 * (p + q)));
    }
    let n = n as i64;
    for p in -n..=n {
        bracket.add(2, 0, Integral::Phi, &[Factor::new(Field::A0, 0), Factor::d(Field::Bq, p), Factor::d(Field::Bq, -p)], gi(1, 0));
        s_gh.add(0, 1, Integral::Vol, &[Factor::new(Field::Cbar, p), Factor::new(Field::C, p)], gi(2 * p, 0));
    }
    (bracket.scale(&gi(3, 0)), s_int, s_gh)
}

/// Background equations at truncation `n`, as rewrite rules on mode monomials.
#[derive(Clone, Copy, Debug)]
pub struct BackgroundRules {
    pub truncation: u32,
}

impl BackgroundRules {
    /// `dA0 ^ dB^b_m ^ phi = 0`: drops every term containing both factors.
    pub fn apply_e3(&self, s: &SymbolicAction) -> SymbolicAction {
        s.filter(|k| {
            let has_da0 = k.factors.iter().any(|x| x.field == Field::A0 && x.d);
            let has_dbb = k.factors.iter().any(|x| x.field == Field::Bb && x.d);
            !(k.integral == Integral::Phi && has_da0 && has_dbb)
        })
    }

    /// `sum_{m+n=k} n dB^b_m ^ B^b_n ^ phi = 0`: eliminates the monomial
    /// `B^b_{n0} ^ dB^b_{k-n0}` with the largest admissible `n0`.
    pub fn apply_e2(&self, s: &SymbolicAction) -> SymbolicAction {
        let nmax = self.truncation as i64;
        let range = |k: i64| (-nmax..=nmax).filter(move |n| (k - n).abs() <= nmax);
        let mut out = SymbolicAction::new();
        for (key, v) in s.terms() {
            let bb: Vec<usize> = (0..key.factors.len()).filter(|&i| key.factors[i].field == Field::Bb).collect();
            let pair = (bb.len() == 2).then(|| {
                let (x, y) = (key.factors[bb[0]], key.factors[bb[1]]);
                if x.d == y.d {
                    None
                } else if y.d {
                    Some((x.mode, y.mode))
                } else {
                    Some((y.mode, x.mode))
                }
            });
            let Some(Some((n0, m0))) = pair else {
                out.add_key(key, v.clone());
                continue;
            };
            let k = n0 + m0;
            let pivot = range(k).filter(|&n| n != 0).max();
            if pivot != Some(n0) {
                out.add_key(key, v.clone());
                continue;
            }
            let rest: Vec<Factor> = (0..key.factors.len()).filter(|i| !bb.contains(i)).map(|i| key.factors[i]).collect();
            let mut with_pair = rest.clone();
            with_pair.extend([Factor::new(Field::Bb, n0), Factor::d(Field::Bb, m0)]);
            let (_, s_pair) = canonical_order(&with_pair).expect("distinct factors");
            for n in range(k).filter(|&n| n != n0 && n != 0) {
                let mut f = rest.clone();
                f.extend([Factor::new(Field::Bb, n), Factor::d(Field::Bb, k - n)]);
                let c = v.scale(&(Rational::new(BigInt::from(-n * s_pair), BigInt::from(n0))));
                out.add(key.lambda, key.pi, key.integral, &f, c);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackgroundSplit {
    pub s_q: SymbolicAction,
    pub s_int: SymbolicAction,
    pub s_gh: SymbolicAction,
    /// The pure-background action at order `lambda^0`.
    pub background: SymbolicAction,
    /// Order-`lambda` terms after Stokes, before the background equations.
    pub linear_raw: SymbolicAction,
    /// Order-`lambda` terms after the background equations.
    pub linear: SymbolicAction,
}

fn first_difference(a: &SymbolicAction, b: &SymbolicAction) -> Option<String> {
    let d = a.minus(b);
    let first = d.terms().next().map(|(k, v)| format!("{k} off by {v}"));
    first
}

/// Substitutes `B = B^b + lambda BB`, grades by `lambda` and checks each
/// sector against [`zss_expected`]. Sectors are compared modulo Stokes on `M`
/// (derivatives moved off the background at order 2 and off the fluctuation at order 1).
pub fn background_split(s: &SymbolicAction, truncation: u32) -> Result<BackgroundSplit, RegdetError> {
    let sub = s.substitute_background();
    if sub.terms().any(|(k, _)| k.lambda > 3) {
        return Err(RegdetError::GradingMismatch("degree above 3 in lambda".into()));
    }
    let (exp_q, exp_int, exp_gh) = zss_expected(truncation);
    let s_q = sub.lambda_sector(2).integrate_by_parts(Field::Bb);
    let s_int = sub.lambda_sector(3);
    let zero = sub.lambda_sector(0);
    let s_gh = zero.filter(|k| k.integral == Integral::Vol);
    let background = zero.filter(|k| k.integral == Integral::Phi);
    let rules = BackgroundRules { truncation };
    let linear_raw = sub.lambda_sector(1).integrate_by_parts(Field::Bq);
    let linear = rules.apply_e2(&rules.apply_e3(&linear_raw));
    let checks = [("lambda^2", &s_q, &exp_q.integrate_by_parts(Field::Bb)), ("lambda^3", &s_int, &exp_int), ("ghost", &s_gh, &exp_gh)];
    for (name, got, want) in checks {
        if let Some(d) = first_difference(got, want) {
            return Err(RegdetError::GradingMismatch(format!("{name}: {d}")));
        }
    }
    if let Some((k, v)) = linear.terms().next() {
        return Err(RegdetError::GradingMismatch(format!("lambda^1 survives: ({v}) {k}")));
    }
    Ok(BackgroundSplit { s_q, s_int, s_gh, background, linear_raw, linear })
}

// ---------------------------------------------------------------------------
// exact power products

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    Prime(u64),
    Pi,
    Sym(String),
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Prime(p) => write!(f, "{p}"),
            Base::Pi => write!(f, "pi"),
            Base::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// `sign * prod base^exponent` with rational exponents; primes are kept
/// factored so that cancellation is exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerProduct {
    negative: bool,
    factors: BTreeMap<Base, Rational>,
}

impl Default for PowerProduct {
    fn default() -> Self {
        Self::one()
    }
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct { negative: false, factors: BTreeMap::new() }
    }

    pub fn base(b: Base) -> Self {
        Self::one().times(&b, &Rational::one())
    }

    pub fn pi() -> Self {
        Self::base(Base::Pi)
    }

    pub fn sym(name: &str) -> Self {
        Self::base(Base::Sym(name.into()))
    }

    pub fn from_rational(r: &Rational) -> Result<Self, RegdetError> {
        if r.is_zero() {
            return Err(RegdetError::UnsupportedPattern("zero constant".into()));
        }
        let mut out = Self::one();
        out.negative = r.is_negative();
        for (part, sign) in [(r.numer(), 1), (r.denom(), -1)] {
            let v = part.abs().to_u64().ok_or_else(|| RegdetError::UnsupportedPattern(format!("constant {r} too large")))?;
            for (p, e) in factor_u64(v) {
                out = out.times(&Base::Prime(p), &int(sign * e as i64));
            }
        }
        Ok(out)
    }

    fn times(mut self, b: &Base, e: &Rational) -> Self {
        let entry = self.factors.entry(b.clone()).or_insert_with(Rational::zero);
        *entry += e;
        if entry.is_zero() {
            self.factors.remove(b);
        }
        self
    }

    pub fn mul(&self, o: &PowerProduct) -> PowerProduct {
        let mut out = self.clone();
        out.negative ^= o.negative;
        for (b, e) in &o.factors {
            out = out.times(b, e);
        }
        out
    }

    pub fn pow(&self, e: &Rational) -> Result<PowerProduct, RegdetError> {
        let negative = if self.negative {
            if !e.is_integer() {
                return Err(RegdetError::UnsupportedPattern("fractional power of a negative constant".into()));
            }
            e.to_integer().is_odd()
        } else {
            false
        };
        Ok(PowerProduct { negative, factors: self.factors.iter().map(|(b, x)| (b.clone(), x * e)).collect() })
    }

    pub fn exponent(&self, b: &Base) -> Rational {
        self.factors.get(b).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Base, &Rational)> {
        self.factors.iter()
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.factors.is_empty()
    }

    /// The exact rational value, when every exponent is an integer on a prime.
    pub fn as_rational(&self) -> Option<Rational> {
        let mut out = Rational::one();
        for (b, e) in &self.factors {
            let Base::Prime(p) = b else { return None };
            if !e.is_integer() {
                return None;
            }
            let k = e.to_integer().to_i32()?;
            let pr = Rational::from_integer(BigInt::from(*p));
            out *= num_traits::pow::Pow::pow(&pr, k);
        }
        Some(if self.negative { -out } else { out })
    }
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut parts = Vec::new();
        if self.negative {
            parts.push("-1".to_string());
        }
        for (b, e) in &self.factors {
            if e.is_one() {
                parts.push(b.to_string());
            } else if e.is_integer() {
                parts.push(format!("{b}^{e}"));
            } else {
                parts.push(format!("{b}^({e})"));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// `prod_{n>0} (c n^k)^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaProduct {
    pub c: PowerProduct,
    pub k: Rational,
    pub m: Rational,
}

impl ZetaProduct {
    pub fn new(c: PowerProduct, k: Rational, m: Rational) -> Self {
        ZetaProduct { c, k, m }
    }

    /// The ghost product `prod_{n>0} (2 pi n)^2`.
    pub fn ghost() -> Self {
        ZetaProduct::new(PowerProduct::from_rational(&int(2)).unwrap().mul(&PowerProduct::pi()), int(1), int(2))
    }
}

/// Regularized value `c^{m zeta(0)} exp(-k m zeta'(0))` with `zeta(0) = -1/2`
/// and `exp(-zeta'(0)) = sqrt(2 pi)`, i.e. `c^{-m/2} (2 pi)^{k m / 2}`.
pub fn zeta_product_eval(z: &ZetaProduct) -> Result<PowerProduct, RegdetError> {
    if z.c.negative {
        return Err(RegdetError::UnsupportedPattern("negative constant".into()));
    }
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let two_pi = PowerProduct::from_rational(&int(2))?.mul(&PowerProduct::pi());
    let a = z.c.pow(&(-&z.m * &half))?;
    let b = two_pi.pow(&(&z.k * &z.m * &half))?;
    Ok(a.mul(&b))
}

// ---------------------------------------------------------------------------
// formal determinants

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    /// Full Laplacian.
    Delta,
    /// `d^dagger d`.
    DeltaP,
    /// `d d^dagger`.
    DeltaPP,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Delta => "D",
            Op::DeltaP => "Dp",
            Op::DeltaPP => "Dpp",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    /// All `p`-forms on `M`.
    Lambda(u8),
    /// The 7-dimensional summand of 4-forms.
    Lambda4_2,
    /// 1-forms with `d alpha ^ phi = 0`.
    Lambda1Phi,
    /// Background-dependent spaces; no rules act on them.
    Lambda1A0Tilde,
    Lambda2A0Tilde,
    Named(String),
}

impl Space {
    pub fn name(&self) -> String {
        match self {
            Space::Lambda(p) => format!("L{p}"),
            Space::Lambda4_2 => "L4_2".into(),
            Space::Lambda1Phi => "L1_phi".into(),
            Space::Lambda1A0Tilde => "L1_A0t".into(),
            Space::Lambda2A0Tilde => "L2_A0t".into(),
            Space::Named(s) => s.clone(),
        }
    }

    pub fn parse(s: &str) -> Space {
        match s {
            "L4_2" => Space::Lambda4_2,
            "L1_phi" => Space::Lambda1Phi,
            "L1_A0t" => Space::Lambda1A0Tilde,
            "L2_A0t" => Space::Lambda2A0Tilde,
            _ => match s.strip_prefix('L').and_then(|d| d.parse::<u8>().ok()) {
                Some(p) if p <= 7 => Space::Lambda(p),
                _ => Space::Named(s.into()),
            },
        }
    }

    pub fn depends_on_background(&self) -> bool {
        matches!(self, Space::Lambda1A0Tilde | Space::Lambda2A0Tilde)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `det'(scale * op | space)`.
    Det { scale: Rational, op: Op, space: Space },
    Vol(String),
    /// `det'(d/dt | Lambda^0(S^1))`.
    GhostDet,
    /// The ghost path integral.
    GhostIntegral,
    /// The quadratic path integral over `B^b` and the fluctuation; `zero_modes`
    /// once only zero modes remain.
    QuadraticIntegral { zero_modes: bool },
    /// `int_{M^b} DA0 DB0^b`.
    ModuliMeasure,
}

impl Atom {
    pub fn det(scale: i64, op: Op, space: Space) -> Atom {
        Atom::Det { scale: int(scale), op, space }
    }

    pub fn vol(name: &str) -> Atom {
        Atom::Vol(name.into())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Det { scale, op, space } if scale.is_one() => write!(f, "detp({}|{})", op.name(), space.name()),
            Atom::Det { scale, op, space } => write!(f, "detp({}*{}|{})", scale, op.name(), space.name()),
            Atom::Vol(s) => write!(f, "vol({s})"),
            Atom::GhostDet => write!(f, "detp(dt|L0(S1))"),
            Atom::GhostIntegral => write!(f, "Z_gh"),
            Atom::QuadraticIntegral { zero_modes: false } => write!(f, "Z_q"),
            Atom::QuadraticIntegral { zero_modes: true } => write!(f, "Z_q0"),
            Atom::ModuliMeasure => write!(f, "int_Mb"),
        }
    }
}

/// `prefactor * prod atom^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FormalDet {
    pub prefactor: PowerProduct,
    pub atoms: BTreeMap<Atom, Rational>,
}

impl FormalDet {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn atom(a: Atom) -> Self {
        Self::one().with(a, Rational::one())
    }

    pub fn with(mut self, a: Atom, e: Rational) -> Self {
        let entry = self.atoms.entry(a.clone()).or_insert_with(Rational::zero);
        *entry += e;
        if entry.is_zero() {
            self.atoms.remove(&a);
        }
        self
    }

    pub fn exponent(&self, a: &Atom) -> Rational {
        self.atoms.get(a).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mul(&self, o: &FormalDet) -> FormalDet {
        let mut out = self.clone();
        out.prefactor = out.prefactor.mul(&o.prefactor);
        for (a, e) in &o.atoms {
            out = out.with(a.clone(), e.clone());
        }
        out
    }

    pub fn pow(&self, e: &Rational) -> Result<FormalDet, RegdetError> {
        Ok(FormalDet {
            prefactor: self.prefactor.pow(e)?,
            atoms: self.atoms.iter().map(|(a, x)| (a.clone(), x * e)).collect(),
        })
    }

    pub fn div(&self, o: &FormalDet) -> Result<FormalDet, RegdetError> {
        Ok(self.mul(&o.pow(&int(-1))?))
    }

    /// Replaces `a^e` by `replacement^e`.
    fn replace(&self, a: &Atom, replacement: &FormalDet) -> Result<FormalDet, RegdetError> {
        let e = self.exponent(a);
        let mut rest = self.clone();
        rest.atoms.remove(a);
        Ok(rest.mul(&replacement.pow(&e)?))
    }

    fn find(&self, pred: impl Fn(&Atom) -> bool) -> Option<Atom> {
        self.atoms.keys().find(|a| pred(a)).cloned()
    }

    /// The determinant atoms with their exponents.
    pub fn det_pattern(&self) -> Vec<(Atom, Rational)> {
        self.atoms.iter().filter(|(a, _)| matches!(a, Atom::Det { .. })).map(|(a, e)| (a.clone(), e.clone())).collect()
    }
}

impl fmt::Display for FormalDet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.prefactor.is_one() || self.atoms.is_empty() {
            parts.push(format!("{}", self.prefactor));
        }
        for (a, e) in &self.atoms {
            if e.is_one() {
                parts.push(a.to_string());
            } else {
                parts.push(format!("{a}^({e})"));
            }
        }
        write!(f, "{}", parts.join(" * "))
    }
}

/// Extracts the constant `c` from every scaled `det'(s Delta | Lambda^p)`,
/// `s != 1`: `det'(s Delta) = c^{-b_p} det'((s/c) Delta)`.
pub fn det_rescale(d: &FormalDet, c: &Rational, p: u8, betti: u32) -> Result<FormalDet, RegdetError> {
    if c.is_zero() {
        return Err(RegdetError::RuleFailure { rule: "rescale", reason: "zero scale".into() });
    }
    if c.is_one() {
        return Ok(d.clone());
    }
    let factor = PowerProduct::from_rational(c)?.pow(&-int(betti as i64))?;
    let mut out = FormalDet { prefactor: d.prefactor.clone(), atoms: BTreeMap::new() };
    for (a, e) in &d.atoms {
        match a {
            Atom::Det { scale, op: Op::Delta, space: Space::Lambda(q) } if *q == p && !scale.is_one() => {
                out.prefactor = out.prefactor.mul(&factor.pow(e)?);
                out = out.with(Atom::Det { scale: scale / c, op: Op::Delta, space: Space::Lambda(p) }, e.clone());
            }
            _ => out = out.with(a.clone(), e.clone()),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: &'static str,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub b0: u32,
    pub b1: u32,
    pub steps: Vec<TraceStep>,
    pub result: FormalDet,
}

impl Derivation {
    pub fn rule_names(&self) -> Vec<&'static str> {
        self.steps.iter().map(|s| s.rule).collect()
    }
}

fn rule_failure(rule: &'static str, reason: &str) -> RegdetError {
    RegdetError::RuleFailure { rule, reason: reason.into() }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Named rewrite rules of the derivation. Each fails if its left side is absent.
pub mod rules {
    use super::*;

    pub fn ghost_determinant(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        const RULE: &str = "ghost-determinant";
        if x.exponent(&Atom::GhostIntegral).is_zero() {
            return Err(rule_failure(RULE, "no ghost integral"));
        }
        let value = zeta_product_eval(&ZetaProduct::ghost())?;
        let out = x.replace(&Atom::GhostIntegral, &FormalDet::atom(Atom::GhostDet))?;
        out.replace(&Atom::GhostDet, &FormalDet { prefactor: value, atoms: BTreeMap::new() })
    }

    pub fn zero_mode_reduction(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        let from = Atom::QuadraticIntegral { zero_modes: false };
        if x.exponent(&from).is_zero() {
            return Err(rule_failure("zero-mode reduction", "no full quadratic integral"));
        }
        x.replace(&from, &FormalDet::atom(Atom::QuadraticIntegral { zero_modes: true }))
    }

    /// Gaussian integral over the zero mode of the fluctuation.
    pub fn gaussian_integral(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        let from = Atom::QuadraticIntegral { zero_modes: true };
        if x.exponent(&from).is_zero() {
            return Err(rule_failure("gaussian-integral", "no zero-mode integral"));
        }
        let inner = FormalDet::one()
            .with(Atom::det(9, Op::DeltaP, Space::Lambda2A0Tilde), r(-1, 4))
            .with(Atom::det(9, Op::DeltaP, Space::Lambda4_2), r(-1, 4))
            .with(Atom::vol("EL2_A0"), int(1))
            .with(Atom::vol("EL2_phi"), int(1));
        x.replace(&from, &inner.pow(&r(1, 2))?)
    }

    pub fn exact_volume(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        const RULE: &str = "exact-volume";
        let (a, b) = (Atom::vol("EL2_A0"), Atom::vol("EL2_phi"));
        let e = x.exponent(&a);
        if e.is_zero() || e != x.exponent(&b) {
            return Err(rule_failure(RULE, "needs Vol(EL2_A0) Vol(EL2_phi) with equal exponents"));
        }
        let repl = FormalDet::one()
            .with(Atom::vol("L1_A0"), int(1))
            .with(Atom::vol("L1_phi"), int(1))
            .with(Atom::vol("L0"), int(-2))
            .with(Atom::vol("H0"), int(2))
            .with(Atom::vol("H1"), int(-2))
            .with(Atom::det(1, Op::DeltaP, Space::Lambda1A0Tilde), r(1, 2))
            .with(Atom::det(1, Op::DeltaP, Space::Lambda1Phi), r(1, 2))
            .with(Atom::det(1, Op::Delta, Space::Lambda(0)), int(-1));
        let mut rest = x.clone();
        rest.atoms.remove(&a);
        rest.atoms.remove(&b);
        Ok(rest.mul(&repl.pow(&e)?))
    }

    /// `Vol(G) = Vol(G') Vol(G/G')`; the quotient becomes the moduli measure and
    /// `Vol(G') = [Vol(L1_A0) Vol(L1_phi)]^{1/2} / Vol(L0)`.
    pub fn gauge_volume(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        let g = Atom::vol("G");
        let e = x.exponent(&g);
        if e != int(-1) {
            return Err(rule_failure("gauge-volume renormalization", "needs 1/Vol(G)"));
        }
        let gp = FormalDet::one()
            .with(Atom::vol("L1_A0"), r(1, 2))
            .with(Atom::vol("L1_phi"), r(1, 2))
            .with(Atom::vol("L0"), int(-1));
        let mut rest = x.clone();
        rest.atoms.remove(&g);
        rest = rest.with(Atom::ModuliMeasure, int(1));
        rest.div(&gp)
    }

    /// `Vol(H0) / Vol(H1) = 1`.
    pub fn cohomology_volume(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        let (h0, h1) = (Atom::vol("H0"), Atom::vol("H1"));
        let e = x.exponent(&h0);
        if e.is_zero() || x.exponent(&h1) != -e.clone() {
            return Err(rule_failure("cohomology-volume renormalization", "needs (Vol(H0)/Vol(H1))^e"));
        }
        let mut out = x.clone();
        out.atoms.remove(&h0);
        out.atoms.remove(&h1);
        Ok(out)
    }

    /// `det'(c Dp | L4_2) = det'(c Dp | L1)`.
    pub fn lambda4_2_to_lambda1(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        let a = x
            .find(|a| matches!(a, Atom::Det { op: Op::DeltaP, space: Space::Lambda4_2, .. }))
            .ok_or_else(|| rule_failure("lambda4_2≅lambda1", "no det' on L4_2"))?;
        let Atom::Det { scale, .. } = &a else { unreachable!() };
        x.replace(&a, &FormalDet::atom(Atom::Det { scale: scale.clone(), op: Op::DeltaP, space: Space::Lambda(1) }))
    }

    /// `det'(c Dp | L1) = det'(c D | L1) / det'(c Dpp | L1)`.
    pub fn hodge_split(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        let a = x
            .find(|a| matches!(a, Atom::Det { op: Op::DeltaP, space: Space::Lambda(1), .. }))
            .ok_or_else(|| rule_failure("hodge split", "no det'(Dp|L1)"))?;
        let Atom::Det { scale, .. } = &a else { unreachable!() };
        let repl = FormalDet::one()
            .with(Atom::Det { scale: scale.clone(), op: Op::Delta, space: Space::Lambda(1) }, int(1))
            .with(Atom::Det { scale: scale.clone(), op: Op::DeltaPP, space: Space::Lambda(1) }, int(-1));
        x.replace(&a, &repl)
    }

    /// `det'(c Dpp | L1) = det'(c D | L0)`.
    pub fn coexact_shift(x: &FormalDet) -> Result<FormalDet, RegdetError> {
        let a = x
            .find(|a| matches!(a, Atom::Det { op: Op::DeltaPP, space: Space::Lambda(1), .. }))
            .ok_or_else(|| rule_failure("coexact shift", "no det'(Dpp|L1)"))?;
        let Atom::Det { scale, .. } = &a else { unreachable!() };
        x.replace(&a, &FormalDet::atom(Atom::Det { scale: scale.clone(), op: Op::Delta, space: Space::Lambda(0) }))
    }

    /// Extracts every scale from full Laplacians on `L0` and `L1`.
    pub fn rescale(x: &FormalDet, b0: u32, b1: u32) -> Result<FormalDet, RegdetError> {
        let scaled: Vec<(Rational, u8)> = x
            .atoms
            .keys()
            .filter_map(|a| match a {
                Atom::Det { scale, op: Op::Delta, space: Space::Lambda(p) } if *p <= 1 && !scale.is_one() => Some((scale.clone(), *p)),
                _ => None,
            })
            .collect();
        if scaled.is_empty() {
            return Err(rule_failure("rescale", "no scaled full Laplacian on L0 or L1"));
        }
        let mut out = x.clone();
        for (c, p) in scaled {
            out = det_rescale(&out, &c, p, if p == 0 { b0 } else { b1 })?;
        }
        Ok(out)
    }
}

/// The starting expression `Z_gh * Z_q / Vol(G)`.
pub fn initial_zsc() -> FormalDet {
    FormalDet::one()
        .with(Atom::vol("G"), int(-1))
        .with(Atom::GhostIntegral, int(1))
        .with(Atom::QuadraticIntegral { zero_modes: false }, int(1))
}

/// Runs the derivation chain, recording each named rule.
pub fn assemble_zsc(b0: u32, b1: u32) -> Result<Derivation, RegdetError> {
    type Step = fn(&FormalDet) -> Result<FormalDet, RegdetError>;
    let chain: [(&'static str, Step); 9] = [
        ("ghost-determinant", rules::ghost_determinant),
        ("zero-mode reduction", rules::zero_mode_reduction),
        ("gaussian-integral", rules::gaussian_integral),
        ("exact-volume", rules::exact_volume),
        ("gauge-volume renormalization", rules::gauge_volume),
        ("cohomology-volume renormalization", rules::cohomology_volume),
        ("lambda4_2≅lambda1", rules::lambda4_2_to_lambda1),
        ("hodge split", rules::hodge_split),
        ("coexact shift", rules::coexact_shift),
    ];
    let mut x = initial_zsc();
    let mut steps = Vec::new();
    for (rule, f) in chain {
        x = f(&x)?;
        steps.push(TraceStep { rule, result: x.to_string() });
    }
    x = rules::rescale(&x, b0, b1)?;
    steps.push(TraceStep { rule: "rescale", result: x.to_string() });
    Ok(Derivation { b0, b1, steps, result: x })
}

/// Applies the determinant rules (`lambda4_2≅lambda1`, hodge split, coexact
/// shift, rescale) until none applies.
pub fn normalize(x: &FormalDet, b0: u32, b1: u32) -> (FormalDet, Vec<TraceStep>) {
    type Step = fn(&FormalDet) -> Result<FormalDet, RegdetError>;
    let chain: [(&'static str, Step); 3] = [
        ("lambda4_2≅lambda1", rules::lambda4_2_to_lambda1),
        ("hodge split", rules::hodge_split),
        ("coexact shift", rules::coexact_shift),
    ];
    let mut x = x.clone();
    let mut steps = Vec::new();
    loop {
        let mut progressed = false;
        for (rule, f) in chain {
            if let Ok(y) = f(&x) {
                x = y;
                steps.push(TraceStep { rule, result: x.to_string() });
                progressed = true;
            }
        }
        if let Ok(y) = rules::rescale(&x, b0, b1) {
            x = y;
            steps.push(TraceStep { rule: "rescale", result: x.to_string() });
            progressed = true;
        }
        if !progressed {
            return (x, steps);
        }
    }
}

/// The determinant exponents of the final formula.
pub fn expected_zsc_pattern() -> Vec<(Atom, Rational)> {
    let mut v = vec![
        (Atom::det(1, Op::DeltaP, Space::Lambda1Phi), r(1, 4)),
        (Atom::det(1, Op::Delta, Space::Lambda(1)), r(-1, 8)),
        (Atom::det(1, Op::Delta, Space::Lambda(0)), r(-3, 8)),
        (Atom::det(1, Op::DeltaP, Space::Lambda1A0Tilde), r(1, 4)),
        (Atom::det(9, Op::DeltaP, Space::Lambda2A0Tilde), r(-1, 8)),
    ];
    v.sort();
    v
}
