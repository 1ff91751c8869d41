use std::collections::BTreeMap;
use std::sync::OnceLock;

use g2gauge::cliffordspin::{
    gamma_matrices, invariant_spinor, psi_form, rotation_derivation, sigma_shadow, G2Basis, Gen, SpinGenerators,
};
use g2gauge::coeffring::{int, rat, GaussianRational, Monomial, Poly, Rational, Var};
use g2gauge::dbcech::{
    gauge_variation, BackgroundCocycle, CechCochain, Cover, DBClass, GaugeData, PolyDecomp,
};
use g2gauge::exterior::{IndexTuple, KForm, Orientation};
use g2gauge::g2core::FundamentalForm;
use g2gauge::instanton::{classify, energy_identity_check, Condition, Connection1Form, Verdict};
use g2gauge::regdet::{
    det_rescale, fourier_reduce, zeta_product_eval, Atom, FormalDet, Op, PowerProduct, Space, ZetaProduct,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn phi() -> &'static FundamentalForm {
    static F: OnceLock<FundamentalForm> = OnceLock::new();
    F.get_or_init(FundamentalForm::build)
}

fn spin() -> &'static (SpinGenerators, G2Basis) {
    static S: OnceLock<(SpinGenerators, G2Basis)> = OnceLock::new();
    S.get_or_init(|| {
        let g = gamma_matrices().unwrap();
        let b = G2Basis::new(&g);
        (g, b)
    })
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

/// Polynomials in x1..x3 and one parameter, at most 4 terms of degree <= 2 per variable.
fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..=2, 8), small_rat()), 0..4).prop_map(|ts| {
        let mut p = Poly::zero();
        for (mut e, c) in ts {
            for x in e.iter_mut().skip(3).take(4) {
                *x = 0;
            }
            p += &Poly::monomial(Monomial::from_exponents(e), c);
        }
        p
    })
}

fn form(degree: u8) -> impl Strategy<Value = KForm> {
    let tuples = IndexTuple::all(degree);
    let n = tuples.len();
    prop::collection::vec((0..n, poly()), 0..4).prop_map(move |ts| {
        let mut out = KForm::zero(degree);
        for (i, p) in ts {
            out = &out + &KForm::monomial(tuples[i], p);
        }
        out
    })
}

fn const_form(degree: u8) -> impl Strategy<Value = KForm> {
    let n = IndexTuple::all(degree).len();
    prop::collection::vec(small_rat(), n).prop_map(move |v| KForm::from_vector(degree, &v))
}

fn gauss() -> impl Strategy<Value = GaussianRational> {
    (small_rat(), small_rat()).prop_map(|(a, b)| GaussianRational::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_axioms(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&p + &q, &q + &p);
    }

    #[test]
    fn partials_commute(p in poly(), i in 1u8..=3, j in 1u8..=3) {
        let (xi, xj) = (Var::x(i), Var::x(j));
        let a = p.partial(xi).unwrap().partial(xj).unwrap();
        let b = p.partial(xj).unwrap().partial(xi).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gaussian_norm_is_real(z in gauss()) {
        let w = z.clone() * z.conj();
        prop_assert!(w.im.is_zero());
        prop_assert_eq!(w.re, z.norm_sq());
    }

    #[test]
    fn wedge_graded_commutative(w in form(2), e in form(3), a in form(1)) {
        prop_assert_eq!(w.wedge(&e), e.wedge(&w));
        prop_assert_eq!(&a.wedge(&e) + &e.wedge(&a), KForm::zero(4));
        prop_assert_eq!(a.wedge(&a), KForm::zero(2));
        prop_assert_eq!(a.wedge(&w), w.wedge(&a));
    }

    #[test]
    fn d_squared_zero(w in form(1), e in form(2)) {
        prop_assert!(w.d().d().is_zero());
        prop_assert!(e.d().d().is_zero());
    }

    #[test]
    fn contraction_antiderivation(w in form(2), e in form(1), i in 1u8..=7) {
        let lhs = w.wedge(&e).contract(i);
        let rhs = &w.contract(i).wedge(&e) + &w.wedge(&e.contract(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hodge_isometry_involution(w in form(3), e in form(3)) {
        let o = Orientation::Positive;
        prop_assert_eq!(w.inner(&e), w.hodge(o).inner(&e.hodge(o)));
        prop_assert_eq!(w.hodge(o).hodge(o), w.clone());
    }

    #[test]
    fn lambda2_eigenvalues(b in const_form(2)) {
        let f = phi();
        let (p1, p2) = f.lambda2_split(&b);
        prop_assert_eq!(&p1 + &p2, b);
        prop_assert!((&f.lambda2_operator(&p1) + &p1.scale_rat(&int(2))).is_zero());
        prop_assert!((&f.lambda2_operator(&p2) - &p2).is_zero());
        prop_assert_eq!(f.t_tensor().half_contract(&p2), p2);
    }

    #[test]
    fn lambda3_lambda4_orthogonal(b in const_form(3), c in const_form(4)) {
        let f = phi();
        let (a1, a2, a3) = f.lambda3_split(&b);
        prop_assert_eq!(&(&a1 + &a2) + &a3, b);
        prop_assert!(a1.inner(&a2).is_zero() && a2.inner(&a3).is_zero() && a1.inner(&a3).is_zero());
        prop_assert!(f.phi0.wedge(&a3).is_zero() && f.star_phi0.wedge(&a3).is_zero());
        let (c1, c2, c3) = f.lambda4_split(&c);
        prop_assert_eq!(&(&c1 + &c2) + &c3, c);
        prop_assert!(c1.inner(&c2).is_zero() && c2.inner(&c3).is_zero() && c1.inner(&c3).is_zero());
    }

    #[test]
    fn jacobi(cx in prop::collection::vec(-2i64..=2, 14),
              cy in prop::collection::vec(-2i64..=2, 14),
              cz in prop::collection::vec(-2i64..=2, 14)) {
        let (_, b) = spin();
        let mk = |c: &[i64]| b.combine(&c.iter().zip(Gen::all()).map(|(&k, g)| (int(k), g)).collect::<Vec<_>>());
        let (x, y, z) = (mk(&cx), mk(&cy), mk(&cz));
        let j = x.commutator(&y.commutator(&z))
            .add(&y.commutator(&z.commutator(&x)))
            .add(&z.commutator(&x.commutator(&y)));
        prop_assert!(j.is_zero());
        prop_assert!(b.coordinates(&x.commutator(&y)).is_some());
    }

    #[test]
    fn energy_identity_iff_higher_order(f2 in const_form(2)) {
        let (lhs, rhs, ho) = energy_identity_check(&f2, phi());
        prop_assert_eq!(lhs == rhs, ho.is_zero());
    }

    #[test]
    fn verdict_implications(entries in prop::collection::vec((1u8..=7, 1u8..=7, -2i64..=2), 1..4)) {
        let mut b = KForm::zero(1);
        for (x, e, c) in entries {
            b = &b + &KForm::e(&[e]).scale(&Poly::x(x).scale(&int(c)));
        }
        let r = classify(&Connection1Form::new(b), phi());
        let holds = |c: Condition| match r.get(c) {
            Verdict::Holds(v) => *v,
            Verdict::Conditions(_) => unreachable!("no parameters"),
        };
        if holds(Condition::TrivialSpecial) { prop_assert!(holds(Condition::Special)); }
        if holds(Condition::Flat) { prop_assert!(holds(Condition::HigherOrderFlat)); }
        if holds(Condition::HigherOrderFlat) {
            prop_assert!(holds(Condition::HigherOrder));
            prop_assert!(holds(Condition::AsdHigherOrder));
            prop_assert!(holds(Condition::SdHigherOrder));
        }
        prop_assert_eq!(holds(Condition::SdHigherOrder), holds(Condition::HigherOrderFlat));
    }

    #[test]
    fn det_rescale_multiplicative(s in 2i64..12, c in 2i64..5, c2 in 2i64..5, e in -3i64..=3, betti in 0u32..3, p in 0u8..2) {
        prop_assume!(s != c && s != c * c2);
        let d = FormalDet::one().with(Atom::det(s, Op::Delta, Space::Lambda(p)), rat(e, 4));
        let once = det_rescale(&det_rescale(&d, &int(c), p, betti).unwrap(), &int(c2), p, betti).unwrap();
        let both = det_rescale(&d, &int(c * c2), p, betti).unwrap();
        prop_assert_eq!(once, both);
    }

    #[test]
    fn zeta_trivial_product(m in -6i64..=6) {
        let z = ZetaProduct::new(PowerProduct::one(), Rational::zero(), int(m));
        prop_assert!(zeta_product_eval(&z).unwrap().is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fourier_truncations_embed(n in 0u32..3) {
        prop_assert!(fourier_reduce(n).embeds_in(&fourier_reduce(n + 1)));
    }

    #[test]
    fn cech_delta_squared(seed in any::<u64>(), q in 0usize..2, k in 0usize..3) {
        let cover = Cover::sphere(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = CechCochain::random_forms(&cover, q, k, &mut rng);
        prop_assert!(c.delta(&cover).delta(&cover).is_zero());
        let z = CechCochain::random_integral(&cover, q, &mut rng);
        prop_assert!(z.delta(&cover).delta(&cover).is_zero());
    }

    #[test]
    fn sphere_gauge_behaviour(seed in any::<u64>()) {
        let cover = Cover::sphere(3);
        let p = PolyDecomp::build(&cover);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z0 = CechCochain::random_integral(&cover, 1, &mut rng);
        let a = DBClass::from_integral_cocycle(&cover, &z0.delta(&cover))
            .local_gauge(&cover, &CechCochain::random_forms(&cover, 0, 0, &mut rng)).unwrap();
        let b = DBClass::zero().local_gauge(&cover, &CechCochain::random_forms(&cover, 0, 0, &mut rng)).unwrap();
        let mut theta = CechCochain::integral(0);
        for v in cover.nerve(0) {
            theta.set_constant(v.clone(), int(2));
        }
        let bg = BackgroundCocycle::new(&cover, theta).unwrap();
        let classes = vec![a, b];
        for class in 0..2 {
            let f = CechCochain::random_forms(&cover, 0, 0, &mut rng);
            let v = gauge_variation(&cover, &p, &classes, &bg, &GaugeData::Local { class, f }).unwrap();
            prop_assert!(v.is_zero());
            let z = CechCochain::random_integral(&cover, 1, &mut rng);
            let v = gauge_variation(&cover, &p, &classes, &bg, &GaugeData::Large { class, z }).unwrap();
            prop_assert!(v.is_integer());
        }
    }
}

#[test]
fn shadows_lie_in_lambda2_14() {
    let (g, b) = spin();
    let f = phi();
    for x in b.all() {
        let w = sigma_shadow(&x, g).expect("generator is a real combination of Sigma_ij");
        assert_eq!(f.lambda2_operator(&w), w);
    }
}

#[test]
fn psi_is_g2_invariant() {
    let (g, b) = spin();
    let eta = invariant_spinor(b).unwrap();
    let psi = psi_form(&eta, g).unwrap();
    for x in b.all() {
        let w = sigma_shadow(&x, g).unwrap();
        assert!(rotation_derivation(&w, &psi).is_zero());
    }
}

#[test]
fn example_family_specialisations() {
    let f = phi();
    let (a, b) = (Var::param(0), Var::param(1));
    let r = classify(&g2gauge::instanton::example_connection(&Poly::var(a), &Poly::var(b)), f);
    let at = |x: Rational, y: Rational| -> BTreeMap<Var, Rational> { [(a, x), (b, y)].into_iter().collect() };
    let check = |c: Condition, x: Rational, y: Rational| r.get(c).at(&at(x, y));
    assert!(check(Condition::AsdInstanton, int(0), int(1)));
    assert!(!check(Condition::AsdHigherOrder, int(0), int(1)));
    assert!(check(Condition::AsdHigherOrder, int(1), rat(1, 2)));
    assert!(check(Condition::Special, int(0), int(0)));
    assert!(check(Condition::HigherOrderFlat, int(0), int(0)));
    assert!(Rational::one().is_one());
}
