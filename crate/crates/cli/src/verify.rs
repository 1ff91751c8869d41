//! The `verify` suite.

use std::collections::BTreeSet;

use g2gauge::cliffordspin::{
    closure_check, commutator_table, gamma_matrices, invariant_spinor, psi_form, resolve_frame, spin7_bracket_check,
    FrameResolution, G2Basis, Gen, Mat8, SpinGenerators, Spinor, GAMMA_PATTERNS, LISTED_BRACKETS, REFERENCE_FRAME,
};
use g2gauge::coeffring::{int, rat, GaussianRational, Poly, Rational, Ring};
use g2gauge::exterior::{IndexTuple, KForm};
use g2gauge::g2core::{operator_matrix, FundamentalForm};
use g2gauge::instanton::{classify, example_connection, worked_example, Condition, Verdict};
use g2gauge::linalg;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{Check, Report};

pub const DEFAULT_SEED: u64 = 20240607;

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub seed: Option<u64>,
    /// Test mode: adds 1 to entry `(row, col)` (1-based) of `Gamma_1`.
    pub corrupt_gamma: Option<(usize, usize)>,
}

type Item = (&'static str, Box<dyn Fn(&VerifyOptions, u64) -> Check + Send + Sync>);

fn items() -> Vec<Item> {
    vec![
        ("clifford", Box::new(|o, _| clifford(o.corrupt_gamma))),
        ("closure", Box::new(|_, _| closure())),
        ("commutator-table", Box::new(|_, _| commutator())),
        ("eigenvalues", Box::new(|_, s| eigenvalues(s))),
        ("frame-relabeling", Box::new(|_, _| frame())),
        ("invariant-spinor", Box::new(|_, _| spinor())),
        ("projector-ranks", Box::new(|_, _| projectors())),
        ("psi-table", Box::new(|_, _| psi_table())),
        ("spin7-brackets", Box::new(|_, _| spin7())),
        ("t-tensor", Box::new(|_, s| t_tensor(s))),
        ("worked-example", Box::new(|_, _| example())),
    ]
}

pub fn item_names() -> Vec<&'static str> {
    items().into_iter().map(|(n, _)| n).collect()
}

pub fn run_verify(opts: &VerifyOptions) -> Report {
    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    let items = items();
    let checks = std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|(_, f)| s.spawn(move || f(opts, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("suite item panicked")).collect()
    });
    Report::new("verify", Some(seed), checks)
}

fn gamma() -> SpinGenerators {
    gamma_matrices().expect("built-in gamma matrices")
}

fn clifford(corrupt: Option<(usize, usize)>) -> Check {
    const NAME: &str = "clifford";
    let mut g: [Mat8; 7] = std::array::from_fn(|k| Mat8::imaginary(&GAMMA_PATTERNS[k]));
    if let Some((r, c)) = corrupt {
        if !(1..=8).contains(&r) || !(1..=8).contains(&c) {
            return Check::fail(NAME, "corruption target outside 1..8", json!({ "row": r, "col": c }));
        }
        let v = g[0].get(r - 1, c - 1).clone() + GaussianRational::from_int(1);
        g[0].set(r - 1, c - 1, v);
    }
    let id = Mat8::identity();
    for i in 0..7 {
        for j in i..7 {
            let ac = g[i].mul(&g[j]).add(&g[j].mul(&g[i]));
            let want = if i == j { id.scale_rat(&int(2)) } else { Mat8::zero() };
            if let Some((r, c)) = first_difference(&ac, &want) {
                return Check::fail(
                    NAME,
                    format!("{{Gamma_{}, Gamma_{}}} is not {}", i + 1, j + 1, if i == j { "2I" } else { "0" }),
                    json!({
                        "pair": [i + 1, j + 1],
                        "entry": [r + 1, c + 1],
                        "value": ac.get(r, c).to_string(),
                        "expected": want.get(r, c).to_string(),
                    }),
                );
            }
        }
    }
    let prod = g[..6].iter().fold(Mat8::identity(), |a, m| a.mul(m)).scale(&GaussianRational::i());
    if let Some((r, c)) = first_difference(&g[6], &prod) {
        return Check::fail(
            NAME,
            "Gamma_7 differs from i Gamma_1...Gamma_6",
            json!({ "entry": [r + 1, c + 1], "value": g[6].get(r, c).to_string(), "expected": prod.get(r, c).to_string() }),
        );
    }
    if let Err(e) = SpinGenerators::new(g) {
        return Check::fail(NAME, e.to_string(), json!({ "error": e.to_string() }));
    }
    Check::pass(NAME, "28 anticommutators exact; Gamma_7 = i Gamma_1...Gamma_6")
}

fn first_difference(a: &Mat8, b: &Mat8) -> Option<(usize, usize)> {
    (0..64).map(|k| (k / 8, k % 8)).find(|&(r, c)| a.get(r, c) != b.get(r, c))
}

fn spin7() -> Check {
    let ok = spin7_bracket_check(&gamma());
    Check::from_bool("spin7-brackets", ok, "[S_ij, S_kl] over all 2401 index quadruples", json!({ "holds": ok }))
}

fn signed(v: &[(Rational, Gen)], s: i64) -> Vec<(Rational, Gen)> {
    v.iter().map(|(c, g)| (c * int(s), *g)).collect()
}

fn commutator() -> Check {
    const NAME: &str = "commutator-table";
    let b = G2Basis::new(&gamma());
    let table = match commutator_table(&b) {
        Ok(t) => t,
        Err(e) => return Check::fail(NAME, e.to_string(), json!({ "error": e.to_string() })),
    };
    let order = |g: &Gen| Gen::all().iter().position(|h| h == g);
    let mut mismatched = Vec::new();
    let mut listed_pairs = BTreeSet::new();
    let mut listed_values = BTreeSet::new();
    for (x, y, v) in LISTED_BRACKETS.iter() {
        let mut want: Vec<(Rational, Gen)> = v.iter().map(|&(c, g)| (int(c), g)).collect();
        want.sort_by_key(|(_, g)| order(g));
        let got = table.iter().find_map(|e| {
            if (e.x, e.y) == (*x, *y) {
                Some(e.value.clone())
            } else if (e.x, e.y) == (*y, *x) {
                Some(signed(&e.value, -1))
            } else {
                None
            }
        });
        if got.as_ref() != Some(&want) {
            mismatched.push(format!("[{x},{y}]"));
        }
        listed_pairs.insert((*x, *y));
        listed_pairs.insert((*y, *x));
        listed_values.insert(signed(&want, -1));
        listed_values.insert(want);
    }
    let mut unlisted_nonzero = Vec::new();
    let mut unexplained = Vec::new();
    for e in &table {
        if listed_pairs.contains(&(e.x, e.y)) || e.value.is_empty() {
            continue;
        }
        unlisted_nonzero.push(e.to_string());
        if !listed_values.contains(&e.value) {
            unexplained.push(e.to_string());
        }
    }
    let ok = mismatched.is_empty() && unexplained.is_empty();
    Check::from_bool(
        NAME,
        ok,
        format!(
            "{} listed brackets, {} mismatched; {} unlisted nonzero",
            LISTED_BRACKETS.len(),
            mismatched.len(),
            unlisted_nonzero.len()
        ),
        json!({ "mismatched": mismatched, "unlisted_nonzero": unlisted_nonzero, "unexplained": unexplained }),
    )
}

fn closure() -> Check {
    let dim = closure_check(&G2Basis::new(&gamma()).all());
    Check::from_bool("closure", dim == 14, format!("span of V, W closes in dimension {dim}"), json!({ "dimension": dim }))
}

fn spinor() -> Check {
    const NAME: &str = "invariant-spinor";
    let b = G2Basis::new(&gamma());
    let eta = match invariant_spinor(&b) {
        Ok(e) => e,
        Err(e) => return Check::fail(NAME, e.to_string(), json!({ "error": e.to_string() })),
    };
    let want = Spinor::from_ints([0, 1, 0, 0, 0, 0, 0, -1]);
    let ok = eta == want && eta.norm_sq == int(2);
    Check::from_bool(
        NAME,
        ok,
        format!("one-dimensional common nullspace spanned by {eta}"),
        json!({ "computed": eta.to_string(), "expected": want.to_string(), "norm_sq": eta.norm_sq.to_string() }),
    )
}

fn psi() -> KForm {
    let g = gamma();
    let eta = invariant_spinor(&G2Basis::new(&g)).expect("one-dimensional nullspace");
    psi_form(&eta, &g).expect("real coefficients")
}

fn form_json(w: &KForm) -> serde_json::Value {
    w.terms().map(|(t, p)| (t.to_string(), json!(p.to_string()))).collect::<serde_json::Map<_, _>>().into()
}

fn psi_table() -> Check {
    let listed: [([u8; 3], i64); 7] =
        [([1, 2, 3], 1), ([2, 4, 6], 1), ([1, 6, 7], 1), ([2, 5, 7], 1), ([3, 5, 6], 1), ([3, 4, 7], -1), ([1, 4, 5], -1)];
    let want = listed.iter().fold(KForm::zero(3), |acc, (ix, c)| &acc + &KForm::e(ix).scale_rat(&int(*c)));
    let got = psi();
    Check::from_bool(
        "psi-table",
        got == want,
        format!("{} nonzero components", got.num_terms()),
        json!({ "computed": form_json(&got), "expected": form_json(&want) }),
    )
}

fn frame() -> Check {
    let f = FundamentalForm::build();
    let res = resolve_frame(&psi(), &REFERENCE_FRAME, &f.phi0);
    Check::from_bool(
        "frame-relabeling",
        res != FrameResolution::Neither,
        format!("relabeled psi against phi0: {res:?}"),
        json!({ "frame": REFERENCE_FRAME, "resolution": format!("{res:?}") }),
    )
}

fn multiplicity(m: &[Vec<Rational>], value: i64) -> usize {
    let mut m = m.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= int(value);
    }
    m.len() - linalg::rank(&m)
}

fn random_two_form(rng: &mut ChaCha8Rng) -> KForm {
    let v: Vec<Rational> = (0..21).map(|_| rat(rng.random_range(-5..=5), rng.random_range(1..=4))).collect();
    KForm::from_vector(2, &v)
}

fn t_tensor(seed: u64) -> Check {
    let f = FundamentalForm::build();
    let t = f.t_tensor();
    let m = operator_matrix(2, |b| t.half_contract(b));
    let (plus, minus) = (multiplicity(&m, 1), multiplicity(&m, -2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7);
    let bad = (0..50)
        .map(|_| random_two_form(&mut rng))
        .find(|b| t.half_contract(b) != f.lambda2_operator(b));
    Check::from_bool(
        "t-tensor",
        plus == 14 && minus == 7 && bad.is_none(),
        format!("(1/2)T on 2-forms: eigenvalue +1 x{plus}, -2 x{minus}; agrees with *(phi0 ^ .)"),
        json!({ "plus_one": plus, "minus_two": minus, "disagreement": bad.map(|b| form_json(&b)) }),
    )
}

fn eigenvalues(seed: u64) -> Check {
    let f = FundamentalForm::build();
    let m = operator_matrix(2, |b| f.lambda2_operator(b));
    let (m7, m14) = (multiplicity(&m, -2), multiplicity(&m, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bad = (0..50).map(|_| random_two_form(&mut rng)).find(|b| {
        let (p7, p14) = f.lambda2_split(b);
        &p7 + &p14 != *b
            || !(&f.lambda2_operator(&p7) + &p7.scale_rat(&int(2))).is_zero()
            || f.lambda2_operator(&p14) != p14
    });
    Check::from_bool(
        "eigenvalues",
        m7 == 7 && m14 == 14 && bad.is_none(),
        format!("*(phi0 ^ .) on 2-forms: -2 x{m7}, +1 x{m14}; 50 random splits exact"),
        json!({ "minus_two": m7, "plus_one": m14, "bad_split": bad.map(|b| form_json(&b)) }),
    )
}

fn projectors() -> Check {
    let f = FundamentalForm::build();
    let rank = |basis: &[KForm]| linalg::rank(&basis.iter().map(|k| k.to_vector().unwrap()).collect::<Vec<_>>());
    let r3: Vec<usize> = f.lambda3_bases().iter().map(|b| rank(b)).collect();
    let r4: Vec<usize> = f.lambda4_bases().iter().map(|b| rank(b)).collect();
    let mut failures = Vec::new();
    for deg in [3u8, 4] {
        let split = |x: &KForm| if deg == 3 { f.lambda3_split(x) } else { f.lambda4_split(x) };
        let z = KForm::zero(deg);
        for t in IndexTuple::all(deg) {
            let x = KForm::e(&t.indices());
            let (a, b, c) = split(&x);
            let ok = &(&a + &b) + &c == x
                && split(&a) == (a.clone(), z.clone(), z.clone())
                && split(&b) == (z.clone(), b.clone(), z.clone())
                && split(&c) == (z.clone(), z.clone(), c.clone())
                && a.inner(&b).is_zero()
                && b.inner(&c).is_zero()
                && a.inner(&c).is_zero();
            if !ok {
                failures.push(t.to_string());
            }
        }
    }
    Check::from_bool(
        "projector-ranks",
        r3 == [1, 7, 27] && r4 == [1, 7, 27] && failures.is_empty(),
        format!("ranks on 3-forms {r3:?}, on 4-forms {r4:?}; idempotent and orthogonal"),
        json!({ "lambda3": r3, "lambda4": r4, "failing_basis_forms": failures }),
    )
}

fn example() -> Check {
    let f = FundamentalForm::build();
    let ring = Ring::new(["a", "b"]).expect("fresh ring");
    let a = Poly::var(ring.lookup("a").unwrap());
    let b = Poly::var(ring.lookup("b").unwrap());
    let rows = worked_example(&a, &b, &f);
    let mismatched: Vec<serde_json::Value> = rows
        .iter()
        .filter(|r| !r.matches())
        .map(|r| {
            json!({
                "row": r.name,
                "computed": r.computed.display(&ring).to_string(),
                "expected": r.expected.display(&ring).to_string(),
            })
        })
        .collect();
    let rep = classify(&example_connection(&a, &b), &f);
    let show = |ps: &[Poly]| -> BTreeSet<String> { ps.iter().map(|p| p.normalized().display(&ring).to_string()).collect() };
    let got = |c| match rep.get(c) {
        Verdict::Conditions(ps) => show(ps),
        v => BTreeSet::from([format!("{v:?}")]),
    };
    let one = Poly::one();
    let expected = [
        (Condition::AsdInstanton, show(&[&(&b - &a) - &one])),
        (Condition::AsdHigherOrder, show(&[&(&b - &a) + &(&a * &b)])),
        (Condition::Special, show(&[a.clone(), b.clone()])),
    ];
    let wrong: Vec<serde_json::Value> = expected
        .iter()
        .filter(|(c, want)| got(*c) != *want)
        .map(|(c, want)| json!({ "condition": c.name(), "computed": got(*c), "expected": want }))
        .collect();
    Check::from_bool(
        "worked-example",
        mismatched.is_empty() && wrong.is_empty(),
        format!("{}/{} rows match; {} of 3 classifications match", rows.len() - mismatched.len(), rows.len(), 3 - wrong.len()),
        json!({ "rows": mismatched, "classification": wrong }),
    )
}
