//! Differential forms on R^7 with polynomial coefficients.
//!
//! A basis monomial `e^{i1..ik}` is an [`IndexTuple`], stored as a bitmask.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::coeffring::{Poly, Rational, Ring, Var};

pub const DIM: u8 = 7;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u8, u8),
    #[error("index {0} out of range 1..7")]
    IndexOutOfRange(u8),
    #[error("repeated index {0}")]
    RepeatedIndex(u8),
}

/// Strictly increasing index set in `1..=7`; bit `i-1` marks index `i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct IndexTuple(u8);

impl IndexTuple {
    pub const EMPTY: IndexTuple = IndexTuple(0);
    pub const TOP: IndexTuple = IndexTuple(0x7f);

    pub fn from_mask(mask: u8) -> Self {
        IndexTuple(mask & 0x7f)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    /// Sorts `indices`, returning the tuple and the permutation sign.
    pub fn from_indices(indices: &[u8]) -> Result<(IndexTuple, i8), FormError> {
        let mut mask = 0u8;
        let mut sign = 1i8;
        for (k, &i) in indices.iter().enumerate() {
            if !(1..=DIM).contains(&i) {
                return Err(FormError::IndexOutOfRange(i));
            }
            if mask & (1 << (i - 1)) != 0 {
                return Err(FormError::RepeatedIndex(i));
            }
            mask |= 1 << (i - 1);
            if indices[..k].iter().filter(|&&j| j > i).count() % 2 == 1 {
                sign = -sign;
            }
        }
        Ok((IndexTuple(mask), sign))
    }

    pub fn degree(self) -> u8 {
        self.0.count_ones() as u8
    }

    pub fn contains(self, i: u8) -> bool {
        (1..=DIM).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn indices(self) -> Vec<u8> {
        (1..=DIM).filter(|&i| self.contains(i)).collect()
    }

    pub fn complement(self) -> IndexTuple {
        IndexTuple(!self.0 & 0x7f)
    }

    /// Sign of `e^self ∧ e^other`, or `None` when they share an index.
    pub fn wedge_sign(self, other: IndexTuple) -> Option<i8> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count pairs (i in self, j in other) with i > j
        let mut inversions = 0;
        for j in other.indices() {
            inversions += (self.0 >> j).count_ones();
        }
        Some(if inversions % 2 == 0 { 1 } else { -1 })
    }

    /// All tuples of degree `k` in lexicographic order of their index lists.
    pub fn all(k: u8) -> Vec<IndexTuple> {
        let mut v: Vec<IndexTuple> = (0u8..128).filter(|m| m.count_ones() == k as u32).map(IndexTuple).collect();
        v.sort_by_key(|t| t.indices());
        v
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[")?;
        for (k, i) in self.indices().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

/// Sign `ς` multiplying the volume form `e^{1..7}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> i64 {
        match self {
            Orientation::Positive => 1,
            Orientation::Negative => -1,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KForm {
    degree: u8,
    terms: BTreeMap<IndexTuple, Poly>,
}

impl KForm {
    pub fn zero(degree: u8) -> Self {
        KForm { degree: degree.min(DIM), terms: BTreeMap::new() }
    }

    pub fn scalar(p: Poly) -> Self {
        Self::monomial(IndexTuple::EMPTY, p)
    }

    pub fn monomial(t: IndexTuple, p: Poly) -> Self {
        let mut f = Self::zero(t.degree());
        f.add_term(t, p);
        f
    }

    /// `e^{i1} ∧ ... ∧ e^{ik}` in the given index order.
    pub fn basis(indices: &[u8]) -> Result<Self, FormError> {
        let (t, s) = IndexTuple::from_indices(indices)?;
        Ok(Self::monomial(t, Poly::from_int(s as i64)))
    }

    /// Shorthand for [`KForm::basis`] on literal indices.
    pub fn e(indices: &[u8]) -> Self {
        Self::basis(indices).expect("valid basis indices")
    }

    pub fn volume() -> Self {
        Self::monomial(IndexTuple::TOP, Poly::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (IndexTuple, Poly)>>(degree: u8, terms: I) -> Result<Self, FormError> {
        let mut f = Self::zero(degree);
        for (t, p) in terms {
            if t.degree() != degree {
                return Err(FormError::DegreeMismatch(degree, t.degree()));
            }
            f.add_term(t, p);
        }
        Ok(f)
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexTuple, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, t: IndexTuple) -> Poly {
        self.terms.get(&t).cloned().unwrap_or_default()
    }

    /// Coefficient of `e^{indices}` (with the permutation sign of `indices`).
    pub fn coeff_of(&self, indices: &[u8]) -> Poly {
        match IndexTuple::from_indices(indices) {
            Ok((t, s)) if t.degree() == self.degree => self.coeff(t).scale(&Rational::from_integer((s as i64).into())),
            _ => Poly::zero(),
        }
    }

    fn add_term(&mut self, t: IndexTuple, p: Poly) {
        if p.is_zero() {
            return;
        }
        debug_assert_eq!(t.degree(), self.degree);
        let slot = self.terms.entry(t).or_default();
        *slot += &p;
        if slot.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&Poly) -> Poly) -> KForm {
        let mut out = KForm::zero(self.degree);
        for (t, p) in &self.terms {
            out.add_term(*t, f(p));
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> KForm {
        self.map_coeffs(|p| p * c)
    }

    pub fn scale_rat(&self, c: &Rational) -> KForm {
        self.map_coeffs(|p| p.scale(c))
    }

    pub fn wedge(&self, other: &KForm) -> KForm {
        let mut out = KForm::zero(self.degree + other.degree);
        if self.degree + other.degree > DIM {
            return out;
        }
        for (t1, p1) in &self.terms {
            for (t2, p2) in &other.terms {
                if let Some(s) = t1.wedge_sign(*t2) {
                    let prod = p1 * p2;
                    let prod = if s < 0 { -prod } else { prod };
                    out.add_term(IndexTuple(t1.0 | t2.0), prod);
                }
            }
        }
        out
    }

    /// Exterior derivative; parameters are constants.
    pub fn d(&self) -> KForm {
        let mut out = KForm::zero(self.degree + 1);
        if self.degree == DIM {
            return out;
        }
        for (t, p) in &self.terms {
            for i in 1..=DIM {
                if t.contains(i) {
                    continue;
                }
                let dp = p.partial_unchecked(Var::x(i));
                if dp.is_zero() {
                    continue;
                }
                let ei = IndexTuple(1 << (i - 1));
                let s = ei.wedge_sign(*t).unwrap();
                out.add_term(IndexTuple(t.0 | ei.0), if s < 0 { -dp } else { dp });
            }
        }
        out
    }

    pub fn hodge(&self, ori: Orientation) -> KForm {
        let mut out = KForm::zero(DIM - self.degree);
        for (t, p) in &self.terms {
            let c = t.complement();
            let s = t.wedge_sign(c).unwrap() as i64 * ori.sign();
            out.add_term(c, if s < 0 { -p } else { p.clone() });
        }
        out
    }

    /// Interior product with the basis vector `e_i`.
    pub fn contract(&self, i: u8) -> KForm {
        let mut out = KForm::zero(self.degree.saturating_sub(1));
        if !(1..=DIM).contains(&i) {
            return out;
        }
        for (t, p) in &self.terms {
            if t.contains(i) {
                let before = (t.0 & ((1 << (i - 1)) - 1)).count_ones();
                let rest = IndexTuple(t.0 & !(1 << (i - 1)));
                out.add_term(rest, if before % 2 == 1 { -p } else { p.clone() });
            }
        }
        out
    }

    /// Pointwise metric pairing `c` with `ω ∧ ⋆η = c · ς e^{1..7}`.
    pub fn inner(&self, other: &KForm) -> Poly {
        self.inner_oriented(other, Orientation::Positive).expect("same degree")
    }

    /// The coefficient `c` with `ω ∧ ⋆_ς η = c · e^{1..7}`, divided by `ς`.
    pub fn inner_oriented(&self, other: &KForm, ori: Orientation) -> Result<Poly, FormError> {
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch(self.degree, other.degree));
        }
        let top = self.wedge(&other.hodge(ori)).coeff(IndexTuple::TOP);
        Ok(if ori.sign() < 0 { -top } else { top })
    }

    /// Coefficient of the volume form for a 7-form (0 otherwise).
    pub fn top_coeff(&self) -> Poly {
        if self.degree == DIM {
            self.coeff(IndexTuple::TOP)
        } else {
            Poly::zero()
        }
    }

    pub fn eval_partial(&self, assignment: &BTreeMap<Var, Rational>) -> KForm {
        self.map_coeffs(|p| p.eval_partial(assignment))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.values().all(Poly::is_constant)
    }

    /// Coordinates in the lexicographic basis of degree-`k` tuples; `None` if a
    /// coefficient is not constant.
    pub fn to_vector(&self) -> Option<Vec<Rational>> {
        IndexTuple::all(self.degree).into_iter().map(|t| self.coeff(t).constant_value()).collect()
    }

    pub fn from_vector(degree: u8, v: &[Rational]) -> KForm {
        let mut out = KForm::zero(degree);
        for (t, c) in IndexTuple::all(degree).into_iter().zip(v) {
            out.add_term(t, Poly::constant(c.clone()));
        }
        out
    }

    /// Pulls back along the index map `i -> perm[i-1]`: `e^i` becomes `e^{perm(i)}`.
    pub fn relabel(&self, perm: &[u8; 7]) -> KForm {
        let mut out = KForm::zero(self.degree);
        for (t, p) in &self.terms {
            let mapped: Vec<u8> = t.indices().into_iter().map(|i| perm[i as usize - 1]).collect();
            let (nt, s) = IndexTuple::from_indices(&mapped).expect("permutation");
            out.add_term(nt, if s < 0 { -p } else { p.clone() });
        }
        out
    }

    pub fn display<'a>(&'a self, ring: &'a Ring) -> FormDisplay<'a> {
        FormDisplay { form: self, ring: Some(ring) }
    }
}

pub struct FormDisplay<'a> {
    form: &'a KForm,
    ring: Option<&'a Ring>,
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.form.terms.iter().collect();
        terms.sort_by_key(|(t, _)| t.indices());
        let default_ring = Ring::default();
        let ring = self.ring.unwrap_or(&default_ring);
        for (k, (t, p)) in terms.into_iter().enumerate() {
            let mut coeff: String = alloc::format!("{}", p.display(ring));
            let negative = p.num_terms() == 1 && coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let is_one = coeff == "1";
            if t.degree() == 0 {
                if p.num_terms() > 1 {
                    write!(f, "({coeff})")?;
                } else {
                    write!(f, "{coeff}")?;
                }
            } else if is_one {
                write!(f, "{t}")?;
            } else if p.num_terms() > 1 {
                write!(f, "({coeff})*{t}")?;
            } else {
                write!(f, "{coeff}*{t}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        FormDisplay { form: self, ring: None }.fmt(f)
    }
}

impl Add for &KForm {
    type Output = KForm;
    fn add(self, o: &KForm) -> KForm {
        assert_eq!(self.degree, o.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (t, p) in &o.terms {
            out.add_term(*t, p.clone());
        }
        out
    }
}

impl Sub for &KForm {
    type Output = KForm;
    fn sub(self, o: &KForm) -> KForm {
        self + &(-o)
    }
}

impl Neg for &KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.map_coeffs(|p| -p)
    }
}

impl Add for KForm {
    type Output = KForm;
    fn add(self, o: KForm) -> KForm {
        &self + &o
    }
}

impl Sub for KForm {
    type Output = KForm;
    fn sub(self, o: KForm) -> KForm {
        &self - &o
    }
}

impl Neg for KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        -&self
    }
}

impl Zero for KForm {
    fn zero() -> Self {
        KForm::zero(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::int;

    fn example_b() -> (Ring, KForm) {
        let ring = Ring::new(["a", "b"]).unwrap();
        let a = Poly::var(ring.lookup("a").unwrap());
        let b = Poly::var(ring.lookup("b").unwrap());
        let f = &(&KForm::e(&[3]).scale(&Poly::x(2)) + &KForm::e(&[5]).scale(&(&a * &Poly::x(4))))
            + &KForm::e(&[7]).scale(&(&b * &Poly::x(6)));
        (ring, f)
    }

    #[test]
    fn wedge_basics() {
        assert_eq!(KForm::e(&[1]).wedge(&KForm::e(&[2])), KForm::e(&[1, 2]));
        assert_eq!(KForm::e(&[2]).wedge(&KForm::e(&[1])), -KForm::e(&[1, 2]));
        let b = KForm::e(&[3]).scale(&Poly::x(2));
        assert!(b.wedge(&b.d()).is_zero());
    }

    #[test]
    fn derivative_examples() {
        let b = KForm::e(&[3]).scale(&Poly::x(2));
        assert_eq!(b.d(), KForm::e(&[2, 3]));
        let (ring, b) = example_b();
        let a = Poly::var(ring.lookup("a").unwrap());
        let bb = Poly::var(ring.lookup("b").unwrap());
        let expected = &(&KForm::e(&[2, 3]) + &KForm::e(&[4, 5]).scale(&a)) + &KForm::e(&[6, 7]).scale(&bb);
        assert_eq!(b.d(), expected);
        assert!(b.d().d().is_zero());
    }

    #[test]
    fn hodge_and_contract() {
        let one = KForm::scalar(Poly::one());
        assert_eq!(one.hodge(Orientation::Positive), KForm::volume());
        assert_eq!(one.hodge(Orientation::Negative), -KForm::volume());
        assert_eq!(KForm::e(&[1]).hodge(Orientation::Positive), KForm::e(&[2, 3, 4, 5, 6, 7]));
        assert_eq!(KForm::e(&[1, 2]).contract(1), KForm::e(&[2]));
        assert_eq!(KForm::e(&[1, 2]).contract(2), -KForm::e(&[1]));
        assert!(KForm::e(&[1, 2]).contract(3).is_zero());
    }

    #[test]
    fn inner_examples() {
        assert_eq!(KForm::e(&[1]).inner(&KForm::e(&[1])), Poly::one());
        assert!(KForm::e(&[1]).inner(&KForm::e(&[2])).is_zero());
        assert_eq!(
            KForm::e(&[1]).inner_oriented(&KForm::e(&[1, 2]), Orientation::Positive),
            Err(FormError::DegreeMismatch(1, 2))
        );
        assert_eq!(KForm::e(&[1, 2]).inner_oriented(&KForm::e(&[1, 2]), Orientation::Negative).unwrap(), Poly::one());
    }

    #[test]
    fn basis_rejects_bad_indices() {
        assert_eq!(KForm::basis(&[1, 1]), Err(FormError::RepeatedIndex(1)));
        assert_eq!(KForm::basis(&[8]), Err(FormError::IndexOutOfRange(8)));
    }

    #[test]
    fn relabel_swaps() {
        // 4<->6, 5<->7
        let perm = [1, 2, 3, 6, 7, 4, 5];
        assert_eq!(KForm::e(&[4, 7]).relabel(&perm), -KForm::e(&[5, 6]));
        let id = [1, 2, 3, 4, 5, 6, 7];
        let f = KForm::e(&[1, 4, 5]).scale_rat(&int(3));
        assert_eq!(f.relabel(&id), f);
    }

    #[test]
    fn display_form() {
        let (ring, b) = example_b();
        assert_eq!(b.display(&ring).to_string(), "x2*e[3] + a*x4*e[5] + b*x6*e[7]");
    }
}
