//! The standard G2 structure on R^7.
//!
//! `phi0 = e123 + e145 + e246 + e347 - e167 + e257 - e356`. The orientation is
//! not fixed by hand: [`FundamentalForm::build`] picks the sign for which
//! `beta -> *(phi0 ^ beta)` on 2-forms has eigenvalues `-2` and `+1`.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::coeffring::{int, rat, Poly, Rational};
use crate::exterior::{IndexTuple, KForm, Orientation};
use crate::linalg;

pub const PHI0_TERMS: [([u8; 3], i64); 7] = [
    ([1, 2, 3], 1),
    ([1, 4, 5], 1),
    ([2, 4, 6], 1),
    ([3, 4, 7], 1),
    ([1, 6, 7], -1),
    ([2, 5, 7], 1),
    ([3, 5, 6], -1),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalForm {
    pub phi0: KForm,
    pub star_phi0: KForm,
    pub orientation: Orientation,
}

impl FundamentalForm {
    pub fn build() -> Self {
        let phi0 = PHI0_TERMS
            .iter()
            .fold(KForm::zero(3), |acc, (idx, c)| &acc + &KForm::e(idx).scale_rat(&int(*c)));
        let orientation = derive_orientation(&phi0);
        let star_phi0 = phi0.hodge(orientation);
        FundamentalForm { phi0, star_phi0, orientation }
    }

    pub fn hodge(&self, w: &KForm) -> KForm {
        w.hodge(self.orientation)
    }

    /// `beta -> *(phi0 ^ beta)` on 2-forms.
    pub fn lambda2_operator(&self, beta: &KForm) -> KForm {
        self.hodge(&self.phi0.wedge(beta))
    }

    /// Splits a 2-form into its 7- and 14-dimensional parts.
    pub fn lambda2_split(&self, beta: &KForm) -> (KForm, KForm) {
        let t = self.lambda2_operator(beta);
        let b1 = (beta - &t).scale_rat(&rat(1, 3));
        let b2 = (&beta.scale_rat(&int(2)) + &t).scale_rat(&rat(1, 3));
        (b1, b2)
    }

    /// Orthogonal bases (unnormalized) of the three summands of 3-forms.
    pub fn lambda3_bases(&self) -> [Vec<KForm>; 3] {
        let s1 = alloc::vec![self.phi0.clone()];
        let s2: Vec<KForm> = (1..=7).map(|i| self.star_phi0.contract(i)).collect();
        split_bases(3, s1, s2)
    }

    /// Orthogonal bases (unnormalized) of the three summands of 4-forms.
    pub fn lambda4_bases(&self) -> [Vec<KForm>; 3] {
        let s1 = alloc::vec![self.star_phi0.clone()];
        let s2: Vec<KForm> = (1..=7).map(|i| KForm::e(&[i]).wedge(&self.phi0)).collect();
        split_bases(4, s1, s2)
    }

    pub fn lambda3_split(&self, beta: &KForm) -> (KForm, KForm, KForm) {
        split3(beta, &self.lambda3_bases())
    }

    pub fn lambda4_split(&self, beta: &KForm) -> (KForm, KForm, KForm) {
        split3(beta, &self.lambda4_bases())
    }

    /// Component of a 4-form in `{alpha ^ phi0}`.
    pub fn lambda4_2_part(&self, beta: &KForm) -> KForm {
        self.lambda4_split(beta).1
    }

    pub fn t_tensor(&self) -> TTensor {
        TTensor::from_phi(&self.phi0)
    }
}

fn derive_orientation(phi0: &KForm) -> Orientation {
    // the operator M with vol = +e^{1..7}; the orientation is positive iff (M+2)(M-1) = 0
    let m = |b: &KForm| phi0.wedge(b).hodge(Orientation::Positive);
    let positive = IndexTuple::all(2).into_iter().all(|t| {
        let b = KForm::monomial(t, Poly::one());
        let mb = m(&b);
        let lhs = &(&m(&mb) + &mb) - &b.scale_rat(&int(2));
        lhs.is_zero()
    });
    if positive {
        Orientation::Positive
    } else {
        Orientation::Negative
    }
}

/// Gram-Schmidt without normalization; drops dependent vectors.
pub fn orthogonalize(vectors: &[KForm]) -> Vec<KForm> {
    let mut out: Vec<KForm> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            w = &w - &project_onto(&w, u);
        }
        if !w.is_zero() {
            out.push(w);
        }
    }
    out
}

/// Orthogonal projection of `v` onto the line of a constant form `u`.
pub fn project_onto(v: &KForm, u: &KForm) -> KForm {
    let uu = u.inner(u).constant_value().expect("constant basis form");
    let c = v.inner(u).scale(&(Rational::one() / uu));
    u.scale(&c)
}

pub fn project_onto_basis(v: &KForm, basis: &[KForm]) -> KForm {
    basis.iter().fold(KForm::zero(v.degree()), |acc, u| &acc + &project_onto(v, u))
}

fn split_bases(degree: u8, s1: Vec<KForm>, s2: Vec<KForm>) -> [Vec<KForm>; 3] {
    let rest: Vec<KForm> = IndexTuple::all(degree).into_iter().map(|t| KForm::monomial(t, Poly::one())).collect();
    let mut all = s1.clone();
    all.extend(s2.iter().cloned());
    let n1 = orthogonalize(&s1).len();
    let n12 = orthogonalize(&all).len();
    all.extend(rest);
    let full = orthogonalize(&all);
    [full[..n1].to_vec(), full[n1..n12].to_vec(), full[n12..].to_vec()]
}

fn split3(beta: &KForm, bases: &[Vec<KForm>; 3]) -> (KForm, KForm, KForm) {
    let b1 = project_onto_basis(beta, &bases[0]);
    let b2 = project_onto_basis(beta, &bases[1]);
    let b3 = &(beta - &b1) - &b2;
    (b1, b2, b3)
}

/// Matrix (columns = images of the lexicographic basis) of a linear map on constant `k`-forms.
pub fn operator_matrix(degree: u8, f: impl Fn(&KForm) -> KForm) -> Vec<Vec<Rational>> {
    let cols: Vec<Vec<Rational>> = IndexTuple::all(degree)
        .into_iter()
        .map(|t| f(&KForm::monomial(t, Poly::one())).to_vector().expect("constant image"))
        .collect();
    linalg::transpose(&cols)
}

/// `T_{ij}^{kl} = (1/6) eps_{ijklpqr} phi_{pqr}`, full sum over `p, q, r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TTensor {
    entries: Vec<Rational>,
}

fn idx4(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 7 + j) * 7 + k) * 7 + l
}

impl TTensor {
    pub fn from_phi(phi: &KForm) -> Self {
        let mut entries = alloc::vec![Rational::zero(); 7 * 7 * 7 * 7];
        let sixth = rat(1, 6);
        for i in 1..=7u8 {
            for j in 1..=7u8 {
                for k in 1..=7u8 {
                    for l in 1..=7u8 {
                        let Ok((t, _)) = IndexTuple::from_indices(&[i, j, k, l]) else {
                            continue;
                        };
                        // sum over ordered (p,q,r) filling the complement: 3! orderings,
                        // each contributing eps * phi_{pqr} with the same total sign
                        let comp = t.complement().indices();
                        let (_, s2) = IndexTuple::from_indices(&[i, j, k, l, comp[0], comp[1], comp[2]]).unwrap();
                        let phi_c = phi.coeff_of(&comp).constant_value().expect("constant phi");
                        entries[idx4(i as usize - 1, j as usize - 1, k as usize - 1, l as usize - 1)] =
                            &sixth * int(6 * s2 as i64) * phi_c;
                    }
                }
            }
        }
        TTensor { entries }
    }

    /// `T_{ij}^{kl}` for indices in `1..=7`.
    pub fn get(&self, i: u8, j: u8, k: u8, l: u8) -> &Rational {
        &self.entries[idx4(i as usize - 1, j as usize - 1, k as usize - 1, l as usize - 1)]
    }

    /// `(F_{ij}) -> (1/2) T_{ij}^{kl} F_{kl}` (full sum) on a constant 2-form.
    pub fn half_contract(&self, f: &KForm) -> KForm {
        let mut terms = Vec::new();
        for t in IndexTuple::all(2) {
            let ij = t.indices();
            let mut acc = Rational::zero();
            for k in 1..=7u8 {
                for l in 1..=7u8 {
                    let fkl = f.coeff_of(&[k, l]);
                    if k == l || fkl.is_zero() {
                        continue;
                    }
                    acc += self.get(ij[0], ij[1], k, l) * fkl.constant_value().expect("constant form");
                }
            }
            terms.push((t, Poly::constant(acc * rat(1, 2))));
        }
        KForm::from_terms(2, terms).unwrap()
    }
}

/// Antisymmetrized spin-connection coefficients `Omega^s_{ij}`, `s, i, j` in `1..=7`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinConnection {
    omega: Vec<Rational>,
}

/// Index pairs whose relations are listed, in order.
pub const ASD_PAIRS: [(u8, u8); 7] = [(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (2, 3)];

impl SpinConnection {
    pub fn zero() -> Self {
        SpinConnection { omega: alloc::vec![Rational::zero(); 7 * 7 * 7] }
    }

    /// Sets `Omega^s_{ij}` and `Omega^s_{ji} = -Omega^s_{ij}`.
    pub fn set(&mut self, s: u8, i: u8, j: u8, v: Rational) {
        assert!(i != j || v.is_zero(), "diagonal entries vanish");
        let (s, i, j) = (s as usize - 1, i as usize - 1, j as usize - 1);
        self.omega[(s * 7 + j) * 7 + i] = -v.clone();
        self.omega[(s * 7 + i) * 7 + j] = v;
    }

    pub fn with(mut self, s: u8, i: u8, j: u8, v: Rational) -> Self {
        self.set(s, i, j, v);
        self
    }

    pub fn get(&self, s: u8, i: u8, j: u8) -> &Rational {
        &self.omega[((s as usize - 1) * 7 + i as usize - 1) * 7 + j as usize - 1]
    }

    /// Row `s` as the 2-form `sum_{i<j} Omega^s_{ij} e^{ij}`.
    pub fn row_form(&self, s: u8) -> KForm {
        let terms = IndexTuple::all(2).into_iter().map(|t| {
            let ij = t.indices();
            (t, Poly::constant(self.get(s, ij[0], ij[1]).clone()))
        });
        KForm::from_terms(2, terms).unwrap()
    }
}

/// For each `s`, the residuals `Omega^s_{ij} - (1/2) T_{ij}^{kl} Omega^s_{kl}` on [`ASD_PAIRS`].
pub fn asd_relation_check(omega: &SpinConnection, t: &TTensor) -> Vec<[Rational; 7]> {
    (1..=7)
        .map(|s| {
            let row = omega.row_form(s);
            let img = t.half_contract(&row);
            core::array::from_fn(|k| {
                let (i, j) = ASD_PAIRS[k];
                omega.get(s, i, j) - img.coeff_of(&[i, j]).constant_value().unwrap()
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis2() -> Vec<KForm> {
        IndexTuple::all(2).into_iter().map(|t| KForm::monomial(t, Poly::one())).collect()
    }

    #[test]
    fn phi0_coefficients() {
        let f = FundamentalForm::build();
        assert_eq!(f.phi0.coeff_of(&[1, 2, 3]), Poly::one());
        assert_eq!(f.phi0.coeff_of(&[1, 6, 7]), -Poly::one());
        assert_eq!(f.phi0.inner(&f.phi0), Poly::from_int(7));
        assert_eq!(f.orientation, Orientation::Positive);
    }

    #[test]
    fn lambda2_eigenvalues() {
        let f = FundamentalForm::build();
        for b in basis2() {
            let (b1, b2) = f.lambda2_split(&b);
            assert_eq!(&b1 + &b2, b);
            assert_eq!(f.lambda2_operator(&b1), b1.scale_rat(&int(-2)));
            assert_eq!(f.lambda2_operator(&b2), b2);
        }
        let v1 = &KForm::e(&[5, 6]) + &KForm::e(&[1, 2]);
        let (b1, b2) = f.lambda2_split(&v1);
        assert!(b1.is_zero());
        assert_eq!(b2, v1);
        let (z1, z2) = f.lambda2_split(&KForm::zero(2));
        assert!(z1.is_zero() && z2.is_zero());
    }

    #[test]
    fn projector_ranks() {
        let f = FundamentalForm::build();
        let p1 = operator_matrix(2, |b| f.lambda2_split(b).0);
        let p2 = operator_matrix(2, |b| f.lambda2_split(b).1);
        assert_eq!((linalg::rank(&p1), linalg::rank(&p2)), (7, 14));
        for deg in [3u8, 4] {
            let split = |b: &KForm| if deg == 3 { f.lambda3_split(b) } else { f.lambda4_split(b) };
            let ranks: Vec<usize> = (0..3)
                .map(|k| {
                    linalg::rank(&operator_matrix(deg, |b| {
                        let s = split(b);
                        [s.0, s.1, s.2][k].clone()
                    }))
                })
                .collect();
            assert_eq!(ranks, [1, 7, 27]);
        }
    }

    #[test]
    fn split_examples() {
        let f = FundamentalForm::build();
        let (a, b, c) = f.lambda3_split(&f.phi0);
        assert_eq!((a, b.is_zero(), c.is_zero()), (f.phi0.clone(), true, true));
        let x = f.star_phi0.contract(1);
        let (a, b, c) = f.lambda3_split(&x);
        assert!(a.is_zero() && c.is_zero());
        assert_eq!(b, x);
        let (a, b, c) = f.lambda4_split(&f.star_phi0);
        assert!(b.is_zero() && c.is_zero());
        assert_eq!(a, f.star_phi0);
        let y = KForm::e(&[1]).wedge(&f.phi0);
        let (a, b, c) = f.lambda4_split(&y);
        assert!(a.is_zero() && c.is_zero());
        assert_eq!(b, y);
    }

    #[test]
    fn third_summands_satisfy_membership() {
        let f = FundamentalForm::build();
        for t in IndexTuple::all(3) {
            let (_, _, b3) = f.lambda3_split(&KForm::monomial(t, Poly::one()));
            assert!(f.phi0.wedge(&b3).is_zero());
            assert!(f.star_phi0.wedge(&b3).is_zero());
        }
        for t in IndexTuple::all(4) {
            let (_, _, b3) = f.lambda4_split(&KForm::monomial(t, Poly::one()));
            assert!(f.phi0.wedge(&b3).is_zero());
            assert!(f.phi0.wedge(&f.hodge(&b3)).is_zero());
        }
    }

    #[test]
    fn t_tensor_is_star_phi() {
        let f = FundamentalForm::build();
        let t = f.t_tensor();
        for q in IndexTuple::all(4) {
            let ix = q.indices();
            assert_eq!(Poly::constant(t.get(ix[0], ix[1], ix[2], ix[3]).clone()), f.star_phi0.coeff(q));
        }
        assert!(t.get(1, 2, 1, 2).is_zero());
    }

    #[test]
    fn t_tensor_brute_force() {
        // independent: loop over all 7^6 assignments of (k, l, p, q, r) with a Levi-Civita symbol
        let f = FundamentalForm::build();
        let t = f.t_tensor();
        let eps = |v: &[u8]| -> i64 {
            let mut s = 1;
            for a in 0..v.len() {
                for b in a + 1..v.len() {
                    if v[a] == v[b] {
                        return 0;
                    }
                    if v[a] > v[b] {
                        s = -s;
                    }
                }
            }
            s
        };
        let phi = |p: u8, q: u8, r: u8| f.phi0.coeff_of(&[p, q, r]).constant_value().unwrap_or_default();
        for (i, j) in [(1u8, 2u8), (3, 5), (6, 7)] {
            for k in 1..=7u8 {
                for l in 1..=7u8 {
                    let mut acc = Rational::zero();
                    for p in 1..=7u8 {
                        for q in 1..=7u8 {
                            for r in 1..=7u8 {
                                let e = eps(&[i, j, k, l, p, q, r]);
                                if e != 0 {
                                    acc += int(e) * phi(p, q, r);
                                }
                            }
                        }
                    }
                    assert_eq!(&acc * rat(1, 6), *t.get(i, j, k, l));
                }
            }
        }
    }

    #[test]
    fn asd_relations() {
        let f = FundamentalForm::build();
        let t = f.t_tensor();
        assert!(asd_relation_check(&SpinConnection::zero(), &t).iter().flatten().all(Zero::is_zero));
        let ok = SpinConnection::zero().with(3, 5, 6, int(1)).with(3, 1, 2, int(1));
        assert!(asd_relation_check(&ok, &t).iter().flatten().all(Zero::is_zero));
        let bad = SpinConnection::zero().with(3, 1, 2, int(1));
        let r = asd_relation_check(&bad, &t);
        assert_eq!(r[2][0], int(1));
    }
}
