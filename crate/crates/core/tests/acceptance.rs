//! Acceptance suite: one line per criterion.
//!
//! Criteria 3, 4, 6 and 9 contain reference values that disagree with the exact
//! computation; they are checked literally and reported as known failures. The
//! process exits nonzero only on an unexpected failure.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::oracle::{action, Oracle};
use g2gauge::cliffordspin::{
    closure_check, commutator_table, gamma_matrices, invariant_spinor, psi_form, resolve_frame, FrameResolution,
    G2Basis, Gen, Mat8, Spinor, LISTED_BRACKETS, REFERENCE_FRAME,
};
use g2gauge::coeffring::{int, rat, GaussianRational, Poly, Rational, Ring};
use g2gauge::dbcech::{
    action_terms, gauge_variation, kuhn_winding, BackgroundCocycle, CechCochain, Cover, DBClass, GaugeData,
    PolyDecomp,
};
use g2gauge::exterior::{IndexTuple, KForm};
use g2gauge::g2core::{operator_matrix, FundamentalForm};
use g2gauge::instanton::{
    alpha_beta_infeasibility_check, classify, example_connection, pointwise_corollary_check,
    sd_infeasibility_search, worked_example, Condition, Verdict,
};
use g2gauge::linalg;
use g2gauge::regdet::{
    assemble_zsc, background_split, expected_zsc_pattern, fourier_reduce, zeta_product_eval, zss_expected,
    ZetaProduct,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: [u32; 4] = [3, 4, 6, 9];
const SD_RATIO_FLOOR: f64 = 1e-2;
const SD_RESTARTS: usize = 10_000;
const SD_STEPS: usize = 60;
/// Wall-clock limits in seconds.
const TIME_LIMITS: [(u32, f64); 2] = [(1, 1.0), (2, 5.0)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn nullity(mut m: Vec<Vec<Rational>>, shift: i64) -> usize {
    let n = m.len();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= int(shift);
    }
    n - linalg::rank(&m)
}

fn criterion_1() -> Outcome {
    let g = match gamma_matrices() {
        Ok(g) => g,
        Err(e) => return outcome(false, format!("{e:?}")),
    };
    let id = Mat8::identity();
    let mut pairs = 0;
    let mut bad = Vec::new();
    for i in 0..7 {
        for j in i..7 {
            let ac = g.gamma[i].mul(&g.gamma[j]).add(&g.gamma[j].mul(&g.gamma[i]));
            let want = if i == j { id.scale_rat(&int(2)) } else { Mat8::zero() };
            if i != j {
                pairs += 1;
            }
            if ac != want {
                bad.push((i + 1, j + 1));
            }
        }
    }
    let prod = g.gamma[..6].iter().fold(Mat8::identity(), |a, m| a.mul(m)).scale(&GaussianRational::i());
    let g7 = prod == g.gamma[6];
    outcome(bad.is_empty() && g7 && pairs == 21, format!("anticommutators bad={bad:?}, Gamma7 = i*Gamma1..6: {g7}"))
}

fn criterion_2() -> Outcome {
    let g = gamma_matrices().unwrap();
    let b = G2Basis::new(&g);
    let table = match commutator_table(&b) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("{e:?}")),
    };
    let expand = |v: &[(i64, Gen)]| -> Vec<(Rational, Gen)> {
        let mut out: Vec<(Rational, Gen)> = v.iter().map(|&(c, g)| (int(c), g)).collect();
        out.sort_by_key(|(_, g)| Gen::all().iter().position(|h| h == g));
        out
    };
    let mut mismatched = Vec::new();
    let mut listed_pairs = BTreeSet::new();
    let mut listed_values = BTreeSet::new();
    for (x, y, v) in LISTED_BRACKETS.iter() {
        let entry = table.iter().find(|e| (e.x, e.y) == (*x, *y) || (e.x, e.y) == (*y, *x));
        let want = expand(v);
        let ok = match entry {
            Some(e) if (e.x, e.y) == (*x, *y) => e.value == want,
            Some(e) => e.value.iter().map(|(c, g)| (-c, *g)).collect::<Vec<_>>() == want,
            None => false,
        };
        if !ok {
            mismatched.push(format!("[{x},{y}]"));
        }
        listed_pairs.insert(format!("{x}{y}"));
        listed_pairs.insert(format!("{y}{x}"));
        listed_values.insert(format!("{want:?}"));
        listed_values.insert(format!("{:?}", want.iter().map(|(c, g)| (-c, *g)).collect::<Vec<_>>()));
    }
    let mut unlisted_nonzero = Vec::new();
    let mut unlisted_bad = Vec::new();
    for e in &table {
        if listed_pairs.contains(&format!("{}{}", e.x, e.y)) || e.value.is_empty() {
            continue;
        }
        unlisted_nonzero.push(e.to_string());
        if !listed_values.contains(&format!("{:?}", e.value)) {
            unlisted_bad.push(e.to_string());
        }
    }
    let dim = closure_check(&b.all());
    outcome(
        mismatched.is_empty() && unlisted_bad.is_empty() && dim == 14,
        format!(
            "{} listed entries, mismatched={mismatched:?}; unlisted nonzero {unlisted_nonzero:?}; closure dim {dim}",
            LISTED_BRACKETS.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let g = gamma_matrices().unwrap();
    let b = G2Basis::new(&g);
    let rows: Vec<Vec<GaussianRational>> = b.all().iter().flat_map(Mat8::rows).collect();
    let nullity = linalg::nullspace(&rows, 8).len();
    let eta = match invariant_spinor(&b) {
        Ok(e) => e,
        Err(e) => return outcome(false, format!("{e:?}")),
    };
    let want = Spinor::from_ints([0, 1, 0, 0, 0, 0, 0, -1]);
    let rep = eta == want;
    let norm = eta.norm_sq == int(2);
    outcome(
        nullity == 1 && rep && norm,
        format!("nullity {nullity}; computed representative {eta}, expected {want}; norm^2 = {}", eta.norm_sq),
    )
}

fn criterion_4() -> Outcome {
    let g = gamma_matrices().unwrap();
    let b = G2Basis::new(&g);
    let f = FundamentalForm::build();
    let psi = psi_form(&invariant_spinor(&b).unwrap(), &g).unwrap();
    let want: [([u8; 3], i64); 7] =
        [([1, 2, 3], 1), ([2, 4, 6], 1), ([1, 6, 7], 1), ([2, 5, 7], 1), ([3, 5, 6], 1), ([3, 4, 7], -1), ([1, 4, 5], -1)];
    let expected = want.iter().fold(KForm::zero(3), |acc, (ix, c)| &acc + &KForm::e(ix).scale_rat(&int(*c)));
    let listed = psi == expected;
    let frame = resolve_frame(&psi, &REFERENCE_FRAME, &f.phi0);
    let nonzero: Vec<String> = psi.terms().map(|(t, p)| format!("{t}:{p}")).collect();
    outcome(
        listed && frame != FrameResolution::Neither,
        format!("psi components {nonzero:?} match list: {listed}; relabeled psi vs phi0: {frame:?}"),
    )
}

fn criterion_5() -> Outcome {
    let f = FundamentalForm::build();
    let m = operator_matrix(2, |b| f.lambda2_operator(b));
    let (m7, m14) = (nullity(m.clone(), -2), nullity(m.clone(), 1));
    let eigen_ok = m7 == 7 && m14 == 14;
    let rank = |basis: &[KForm]| linalg::rank(&basis.iter().map(|k| k.to_vector().unwrap()).collect::<Vec<_>>());
    let b3 = f.lambda3_bases();
    let b4 = f.lambda4_bases();
    let r3: Vec<usize> = b3.iter().map(|b| rank(b)).collect();
    let r4: Vec<usize> = b4.iter().map(|b| rank(b)).collect();
    let mut proj_ok = true;
    for t in IndexTuple::all(3) {
        let x = KForm::e(&t.indices());
        let (a, b, c) = f.lambda3_split(&x);
        proj_ok &= &(&a + &b) + &c == x;
        proj_ok &= f.lambda3_split(&a) == (a.clone(), KForm::zero(3), KForm::zero(3));
        proj_ok &= f.lambda3_split(&b) == (KForm::zero(3), b.clone(), KForm::zero(3));
        proj_ok &= f.lambda3_split(&c) == (KForm::zero(3), KForm::zero(3), c.clone());
        proj_ok &= a.inner(&b).is_zero() && b.inner(&c).is_zero() && a.inner(&c).is_zero();
    }
    for t in IndexTuple::all(4) {
        let x = KForm::e(&t.indices());
        let (a, b, c) = f.lambda4_split(&x);
        proj_ok &= &(&a + &b) + &c == x;
        proj_ok &= f.lambda4_split(&a) == (a.clone(), KForm::zero(4), KForm::zero(4));
        proj_ok &= f.lambda4_split(&b) == (KForm::zero(4), b.clone(), KForm::zero(4));
        proj_ok &= f.lambda4_split(&c) == (KForm::zero(4), KForm::zero(4), c.clone());
        proj_ok &= a.inner(&b).is_zero() && b.inner(&c).is_zero() && a.inner(&c).is_zero();
    }
    outcome(
        eigen_ok && r3 == [1, 7, 27] && r4 == [1, 7, 27] && proj_ok,
        format!("eigenspaces -2:{m7} +1:{m14}; ranks L3 {r3:?} L4 {r4:?}; projectors exact: {proj_ok}"),
    )
}

fn criterion_6() -> Outcome {
    let f = FundamentalForm::build();
    let ring = Ring::new(["a", "b"]).unwrap();
    let a = Poly::var(ring.lookup("a").unwrap());
    let b = Poly::var(ring.lookup("b").unwrap());
    let rows = worked_example(&a, &b, &f);
    let bad: Vec<&str> = rows.iter().filter(|r| !r.matches()).map(|r| r.name).collect();
    let rep = classify(&example_connection(&a, &b), &f);
    let one = Poly::one();
    let polys = |c| -> BTreeSet<String> {
        match rep.get(c) {
            Verdict::Conditions(ps) => ps.iter().map(|p| format!("{}", p.normalized().display(&ring))).collect(),
            v => BTreeSet::from([format!("{v:?}")]),
        }
    };
    let set = |ps: Vec<Poly>| -> BTreeSet<String> {
        ps.iter().map(|p| format!("{}", p.normalized().display(&ring))).collect()
    };
    let asd = polys(Condition::AsdInstanton) == set(vec![&(&b - &a) - &one]);
    let asd_ho = polys(Condition::AsdHigherOrder) == set(vec![&(&b - &a) + &(&a * &b)]);
    let special = polys(Condition::Special) == set(vec![a.clone(), b.clone()]);
    outcome(
        bad.is_empty() && asd && asd_ho && special,
        format!(
            "{}/{} rows match (mismatched {bad:?}); ASD {asd}, ASD higher-order {asd_ho}, special {special}",
            rows.len() - bad.len(),
            rows.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let f = FundamentalForm::build();
    let rep = alpha_beta_infeasibility_check(200, 7, &f);
    let search = sd_infeasibility_search(SD_RESTARTS, SD_STEPS, 2024, &f);
    let floor = search.min_ratio >= SD_RATIO_FLOOR;
    outcome(
        rep.theorem_step3_inconsistent && floor,
        format!(
            "step-3 system inconsistent: {}; min ratio over {SD_RESTARTS} restarts {:.4} (floor {SD_RATIO_FLOOR})",
            rep.theorem_step3_inconsistent, search.min_ratio
        ),
    )
}

fn criterion_8() -> Outcome {
    let f = FundamentalForm::build();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = 0;
    for _ in 0..1000 {
        let v: Vec<Rational> = (0..21).map(|_| rat(rng.random_range(-5..=5), rng.random_range(1..=4))).collect();
        if !pointwise_corollary_check(&KForm::from_vector(2, &v), &f).holds() {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("1000 random F, {failures} failures"))
}

fn criterion_9() -> Outcome {
    let zeta = zeta_product_eval(&ZetaProduct::ghost()).map(|v| v.is_one()).unwrap_or(false);
    let d = match assemble_zsc(1, 0) {
        Ok(d) => d,
        Err(e) => return outcome(false, format!("{e:?}")),
    };
    let prefactor = d.result.prefactor.as_rational();
    let pre_ok = prefactor == Some(rat(1, 9));
    let pattern = d.result.det_pattern() == expected_zsc_pattern();
    let names = d.rule_names();
    let trace = names.len() == d.steps.len() && !names.is_empty();
    outcome(
        zeta && pre_ok && pattern && trace,
        format!(
            "ghost product = 1: {zeta}; prefactor {} (expected 1/9); exponent pattern: {pattern}; trace {names:?}",
            d.result.prefactor
        ),
    )
}

fn criterion_10() -> Outcome {
    let s = fourier_reduce(3);
    let split = match background_split(&s, 3) {
        Ok(x) => x,
        Err(e) => return outcome(false, format!("{e:?}")),
    };
    let (_, want_int, want_gh) = zss_expected(3);
    let graded = split.s_int == want_int && split.s_gh == want_gh;
    let cancel = split.linear.is_empty() && !split.linear_raw.is_empty();
    outcome(
        graded && cancel,
        format!(
            "sectors lambda^2 {} terms, lambda^3 {} terms, ghost {} terms match: {graded}; lambda^1 {} -> {} terms",
            split.s_q.len(),
            split.s_int.len(),
            split.s_gh.len(),
            split.linear_raw.len(),
            split.linear.len()
        ),
    )
}

fn constant_theta(cover: &Cover) -> CechCochain {
    let mut theta = CechCochain::integral(0);
    for v in cover.nerve(0) {
        theta.set_constant(v.clone(), int(1));
    }
    theta
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sphere = Cover::sphere(3);
    let torus = Cover::kuhn_torus(3, 3);
    let mut delta_ok = true;
    for cover in [&sphere, &torus] {
        for (q, k) in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2)] {
            let c = CechCochain::random_forms(cover, q, k, &mut rng);
            delta_ok &= c.delta(cover).delta(cover).is_zero();
        }
        let z = CechCochain::random_integral(cover, 1, &mut rng);
        delta_ok &= z.delta(cover).delta(cover).is_zero();
    }

    let p = PolyDecomp::build(&torus);
    let u: Vec<CechCochain> = (0..3).map(|a| kuhn_winding(&torus, 3, a)).collect();
    let class = |ups: &CechCochain, rng: &mut ChaCha8Rng| {
        DBClass::from_integral_cocycle(&torus, ups)
            .local_gauge(&torus, &CechCochain::random_forms(&torus, 0, 0, rng))
            .unwrap()
    };
    let classes = vec![class(&u[0].cech_cup(&u[1], &torus), &mut rng), class(&u[1].cech_cup(&u[2], &torus), &mut rng)];
    let cocycles = classes.iter().all(|c| c.cocycle_check(&torus).is_cocycle());
    let bg = BackgroundCocycle::new(&torus, constant_theta(&torus)).unwrap();

    let mut local_nonzero = 0;
    for i in 0..100 {
        let f = CechCochain::random_forms(&torus, 0, 0, &mut rng);
        let v = gauge_variation(&torus, &p, &classes, &bg, &GaugeData::Local { class: i % 2, f }).unwrap();
        if !v.is_zero() {
            local_nonzero += 1;
        }
    }
    let mut large_bad = 0;
    let mut large_values = BTreeSet::new();
    for i in 0..20 {
        let z = CechCochain::random_integral(&torus, 1, &mut rng);
        let v = gauge_variation(&torus, &p, &classes, &bg, &GaugeData::Large { class: i % 2, z }).unwrap();
        if !v.is_integer() {
            large_bad += 1;
        }
        large_values.insert(v.to_string());
    }

    let o = Oracle::new(&torus, &torus.top_simplices().map(|(s, o)| {
        let mut t = s.to_vec();
        if o < 0 {
            t.swap(0, 1);
        }
        t
    }).collect::<Vec<_>>());
    let mut oracle_ok = true;
    let bg2 = BackgroundCocycle::new(&torus, u[0].cech_cup(&u[1], &torus)).unwrap();
    for (cls, b) in [(&classes[..], &bg), (&classes[1..], &bg2)] {
        let lib = action_terms(&torus, &p, cls, b).unwrap();
        let ora = action(&o, cls, b);
        oracle_ok &= lib.ladder == ora.ladder && lib.chi_term == ora.chi_term && lib.tau_term == ora.tau_term;
    }
    outcome(
        delta_ok && cocycles && local_nonzero == 0 && large_bad == 0 && oracle_ok,
        format!(
            "delta^2 = 0: {delta_ok}; cocycles: {cocycles}; 100 local draws, {local_nonzero} nonzero; \
             20 large draws, {large_bad} non-integral (values {large_values:?}); oracle agreement: {oracle_ok}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut unexpected = 0;
    for (n, run) in criteria {
        let start = Instant::now();
        let mut o = run();
        let elapsed: Duration = start.elapsed();
        if let Some((_, limit)) = TIME_LIMITS.iter().find(|(k, _)| *k == n) {
            if elapsed.as_secs_f64() >= *limit {
                o.pass = false;
                o.detail.push_str(&format!("; exceeded {limit}s"));
            }
        }
        let known = KNOWN_FAILURES.contains(&n);
        let status = match (o.pass, known) {
            (true, false) => "PASS",
            (true, true) => "XPASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if !o.pass && !known || o.pass && known {
            unexpected += 1;
        }
        println!("criterion {n}: {status} [{:.2}s] {}", elapsed.as_secs_f64(), o.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
