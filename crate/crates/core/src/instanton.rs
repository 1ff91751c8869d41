//! Abelian connections on R^7: instanton classification, the worked example,
//! and the identities behind the higher-order instanton results.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffring::{int, rat, to_f64, Monomial, Poly, Rational, Ring, Var};
use crate::exterior::{IndexTuple, KForm};
use crate::g2core::{operator_matrix, FundamentalForm};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstantonError {
    #[error("F^F vanishes at this sample")]
    DegenerateSample,
    #[error("{row} differs from the closed form at {coefficients:?}")]
    MismatchWithReference { row: &'static str, coefficients: Vec<String> },
}

/// A U(1) connection `B` with cached curvature `F = dB`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection1Form {
    pub b: KForm,
    pub f: KForm,
}

impl Connection1Form {
    pub fn new(b: KForm) -> Self {
        assert_eq!(b.degree(), 1, "connection must be a 1-form");
        let f = b.d();
        Connection1Form { b, f }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Flat,
    SdInstanton,
    AsdInstanton,
    HigherOrder,
    HigherOrderFlat,
    SdHigherOrder,
    AsdHigherOrder,
    Special,
    TrivialSpecial,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::Flat,
        Condition::SdInstanton,
        Condition::AsdInstanton,
        Condition::HigherOrder,
        Condition::HigherOrderFlat,
        Condition::SdHigherOrder,
        Condition::AsdHigherOrder,
        Condition::Special,
        Condition::TrivialSpecial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Flat => "flat",
            Condition::SdInstanton => "sd-instanton",
            Condition::AsdInstanton => "asd-instanton",
            Condition::HigherOrder => "higher-order",
            Condition::HigherOrderFlat => "higher-order-flat",
            Condition::SdHigherOrder => "sd-higher-order",
            Condition::AsdHigherOrder => "asd-higher-order",
            Condition::Special => "special",
            Condition::TrivialSpecial => "trivial-special",
        }
    }

    /// Forms that must vanish identically.
    pub fn residuals(self, c: &Connection1Form, f: &FundamentalForm) -> Vec<KForm> {
        let ff = || c.f.wedge(&c.f);
        let bdb = || c.b.wedge(&c.f);
        match self {
            Condition::Flat => alloc::vec![c.f.clone()],
            Condition::SdInstanton => {
                alloc::vec![&f.hodge(&c.f).scale_rat(&int(2)) + &c.f.wedge(&f.phi0)]
            }
            Condition::AsdInstanton => alloc::vec![&f.hodge(&c.f) - &c.f.wedge(&f.phi0)],
            Condition::HigherOrder => alloc::vec![ff().wedge(&f.phi0)],
            Condition::HigherOrderFlat => alloc::vec![ff()],
            Condition::SdHigherOrder => {
                let x = ff();
                alloc::vec![&x - &f.lambda4_2_part(&x)]
            }
            Condition::AsdHigherOrder => {
                let x = ff();
                alloc::vec![f.phi0.wedge(&x), f.phi0.wedge(&f.hodge(&x))]
            }
            Condition::Special => {
                let x = bdb();
                alloc::vec![x.wedge(&f.phi0), x.wedge(&f.star_phi0)]
            }
            Condition::TrivialSpecial => alloc::vec![bdb()],
        }
    }
}

/// Outcome of one condition: a truth value when no parameters occur, otherwise
/// parameter polynomials whose common vanishing is equivalent to the condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds(bool),
    Conditions(Vec<Poly>),
}

impl Verdict {
    /// Evaluates the verdict at a parameter assignment.
    pub fn at(&self, assignment: &BTreeMap<Var, Rational>) -> bool {
        match self {
            Verdict::Holds(b) => *b,
            Verdict::Conditions(ps) => ps.iter().all(|p| p.eval_partial(assignment).is_zero()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub verdicts: Vec<(Condition, Verdict)>,
}

impl ClassificationReport {
    pub fn get(&self, c: Condition) -> &Verdict {
        &self.verdicts.iter().find(|(k, _)| *k == c).expect("all conditions present").1
    }

    pub fn display<'a>(&'a self, ring: &'a Ring) -> ReportDisplay<'a> {
        ReportDisplay { report: self, ring }
    }
}

pub struct ReportDisplay<'a> {
    report: &'a ClassificationReport,
    ring: &'a Ring,
}

impl fmt::Display for ReportDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, v) in &self.report.verdicts {
            match v {
                Verdict::Holds(b) => writeln!(f, "{:<18} {}", c.name(), b)?,
                Verdict::Conditions(ps) => {
                    let list: Vec<String> = ps.iter().map(|p| alloc::format!("{}", p.display(self.ring))).collect();
                    writeln!(f, "{:<18} iff {{{}}} = 0", c.name(), list.join(", "))?
                }
            }
        }
        Ok(())
    }
}

pub fn classify(c: &Connection1Form, f: &FundamentalForm) -> ClassificationReport {
    let verdicts = Condition::ALL
        .iter()
        .map(|&cond| {
            let coeffs = parameter_coefficients(&cond.residuals(c, f));
            let has_params = coeffs.iter().any(|p| !p.is_constant());
            let v = if has_params {
                Verdict::Conditions(simplify_conditions(coeffs))
            } else {
                Verdict::Holds(coeffs.iter().all(Poly::is_zero))
            };
            (cond, v)
        })
        .collect();
    ClassificationReport { verdicts }
}

/// Splits every coefficient into its parts per coordinate monomial, leaving
/// polynomials in the parameters only.
fn parameter_coefficients(forms: &[KForm]) -> Vec<Poly> {
    let mut out = Vec::new();
    for form in forms {
        for (_, p) in form.terms() {
            let mut by_x: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
            for (m, c) in p.terms() {
                let e = m.exponents();
                let split = e.len().min(7);
                let mut xs = e[..split].to_vec();
                while xs.last() == Some(&0) {
                    xs.pop();
                }
                let mut rest = alloc::vec![0; split];
                rest.extend_from_slice(&e[split..]);
                let entry = by_x.entry(xs).or_default();
                *entry += &Poly::monomial(Monomial::from_exponents(rest), c.clone());
            }
            out.extend(by_x.into_values().filter(|p| !p.is_zero()));
        }
    }
    out
}

/// Triangular simplification of a system `{p = 0}`: eliminate parameters that
/// occur linearly with a constant coefficient, replace univariate polynomials in
/// one parameter by their gcd, and back-substitute values found that way.
pub fn simplify_conditions(polys: Vec<Poly>) -> Vec<Poly> {
    let mut work = normalize_set(polys);
    if work.iter().any(Poly::is_constant) {
        return alloc::vec![Poly::one()];
    }
    let mut pivots: Vec<(Var, Poly)> = Vec::new();
    loop {
        let found = work.iter().enumerate().find_map(|(k, p)| {
            let mut vars = p.vars();
            vars.reverse();
            vars.into_iter()
                .find(|&v| p.degree_in(v) == 1 && p.coeff_in(v, 1).is_constant())
                .map(|v| (k, v))
        });
        let Some((k, v)) = found else { break };
        let p = work.remove(k);
        let c = p.coeff_in(v, 1).constant_value().unwrap();
        let value = p.coeff_in(v, 0).scale(&(-Rational::one() / c));
        work = normalize_set(work.iter().map(|q| q.substitute(v, &value)).collect());
        for (_, q) in pivots.iter_mut() {
            *q = q.substitute(v, &value);
        }
        pivots.push((v, p));
        if work.iter().any(Poly::is_constant) {
            return alloc::vec![Poly::one()];
        }
    }
    // univariate gcds
    let mut by_var: BTreeMap<Var, Poly> = BTreeMap::new();
    let mut rest = Vec::new();
    for p in work {
        let vars = p.vars();
        if vars.len() == 1 {
            let g = match by_var.remove(&vars[0]) {
                Some(q) => univariate_gcd(&q, &p, vars[0]),
                None => p,
            };
            by_var.insert(vars[0], g);
        } else {
            rest.push(p);
        }
    }
    if by_var.values().any(Poly::is_constant) {
        return alloc::vec![Poly::one()];
    }
    // values fixed by linear univariate conditions
    let mut values: BTreeMap<Var, Rational> = BTreeMap::new();
    for (v, p) in &by_var {
        if p.degree_in(*v) == 1 {
            let c1 = p.coeff_in(*v, 1).constant_value().unwrap();
            let c0 = p.coeff_in(*v, 0).constant_value().unwrap();
            values.insert(*v, -c0 / c1);
        }
    }
    let mut out: Vec<Poly> = by_var.into_values().collect();
    out.extend(rest.into_iter().map(|p| p.eval_partial(&values)));
    for (_, p) in pivots.into_iter().rev() {
        out.push(p.eval_partial(&values));
    }
    let out = normalize_set(out);
    if out.iter().any(Poly::is_constant) {
        return alloc::vec![Poly::one()];
    }
    out
}

fn normalize_set(polys: Vec<Poly>) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    for p in polys {
        let n = p.normalized();
        if !n.is_zero() && !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

fn univariate_gcd(a: &Poly, b: &Poly, v: Var) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = univariate_rem(&a, &b, v);
        a = b;
        b = r;
    }
    a.normalized()
}

fn univariate_rem(a: &Poly, b: &Poly, v: Var) -> Poly {
    let db = b.degree_in(v);
    let lb = b.coeff_in(v, db).constant_value().expect("univariate");
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeff_in(v, dr).constant_value().expect("univariate");
        let q = Poly::var(v).pow(dr - db).scale(&(lr / &lb));
        r = &r - &(&q * b);
    }
    r
}

/// The example connection `x2 e^3 + a x4 e^5 + b x6 e^7` with `a`, `b` given as polynomials.
pub fn example_connection(a: &Poly, b: &Poly) -> Connection1Form {
    let form = &(&KForm::e(&[3]).scale(&Poly::x(2)) + &KForm::e(&[5]).scale(&(a * &Poly::x(4))))
        + &KForm::e(&[7]).scale(&(b * &Poly::x(6)));
    Connection1Form::new(form)
}

#[derive(Clone, Debug)]
pub struct ExampleRow {
    pub name: &'static str,
    pub computed: KForm,
    pub expected: KForm,
}

impl ExampleRow {
    pub fn matches(&self) -> bool {
        self.computed == self.expected
    }
}

fn form_of(terms: &[(&[u8], Poly)]) -> KForm {
    terms
        .iter()
        .fold(None::<KForm>, |acc, (idx, p)| {
            let t = KForm::e(idx).scale(p);
            Some(match acc {
                Some(a) => &a + &t,
                None => t,
            })
        })
        .unwrap()
}

/// The eight products of the worked example with their reference closed forms.
pub fn worked_example(a: &Poly, b: &Poly, f: &FundamentalForm) -> Vec<ExampleRow> {
    let c = example_connection(a, b);
    let (x2, x4, x6) = (Poly::x(2), Poly::x(4), Poly::x(6));
    let one = Poly::one();
    let ab = a * b;
    let bdb = c.b.wedge(&c.f);
    let ff = c.f.wedge(&c.f);
    let mut rows = Vec::new();
    let mut push = |name, computed: KForm, expected: KForm| rows.push(ExampleRow { name, computed, expected });
    push(
        "B^dB",
        bdb.clone(),
        form_of(&[
            (&[3, 4, 5], a * &x2),
            (&[2, 3, 5], a * &x4),
            (&[2, 3, 7], b * &x6),
            (&[3, 6, 7], b * &x2),
            (&[5, 6, 7], &ab * &x4),
            (&[4, 5, 7], &ab * &x6),
        ]),
    );
    push(
        "dB^dB",
        ff.clone(),
        form_of(&[
            (&[2, 3, 4, 5], a.scale(&int(2))),
            (&[2, 3, 6, 7], b.scale(&int(2))),
            (&[4, 5, 6, 7], ab.scale(&int(2))),
        ]),
    );
    push(
        "dB^phi0",
        c.f.wedge(&f.phi0),
        form_of(&[
            (&[1, 2, 3, 4, 5], &one + a),
            (&[1, 2, 3, 6, 7], b - &one),
            (&[1, 4, 5, 6, 7], b - a),
        ]),
    );
    push("dB^*phi0", c.f.wedge(&f.star_phi0), form_of(&[(&[2, 3, 4, 5, 6, 7], &(&one + a) - b)]));
    push(
        "B^dB^phi0",
        bdb.wedge(&f.phi0),
        form_of(&[
            (&[1, 3, 4, 5, 6, 7], -&(&(b - a) * &x2)),
            (&[1, 2, 3, 5, 6, 7], -&(&(a * &(b - &one)) * &x4)),
            (&[1, 2, 3, 4, 5, 7], -&(&(b * &(&one + a)) * &x6)),
        ]),
    );
    push(
        "dB^dB^phi0",
        ff.wedge(&f.phi0),
        form_of(&[(&[1, 2, 3, 4, 5, 6, 7], &(&ab + b) - a)]),
    );
    push("B^dB^*phi0", bdb.wedge(&f.star_phi0), KForm::zero(7));
    push("dB^dB^*phi0", ff.wedge(&f.star_phi0), KForm::zero(7));
    rows
}

/// Checks every row of [`worked_example`], reporting the first mismatch.
pub fn check_worked_example(rows: &[ExampleRow]) -> Result<(), InstantonError> {
    for r in rows {
        if !r.matches() {
            let diff = &r.computed - &r.expected;
            let coefficients = diff.terms().map(|(t, p)| alloc::format!("{t}: {p}")).collect();
            return Err(InstantonError::MismatchWithReference { row: r.name, coefficients });
        }
    }
    Ok(())
}

/// `(2|F|^2, |F ^ phi0|^2, F ^ F ^ phi0)`.
pub fn energy_identity_check(f2: &KForm, f: &FundamentalForm) -> (Poly, Poly, KForm) {
    let lhs = f2.inner(f2).scale(&int(2));
    let g = f2.wedge(&f.phi0);
    let rhs = g.inner(&g);
    (lhs, rhs, f2.wedge(f2).wedge(&f.phi0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryCheck {
    /// `F^F^phi0 / vol` for the 7-dimensional part.
    pub type1_value: Rational,
    pub type1_expected: Rational,
    /// `F^F^phi0 / vol` for the 14-dimensional part.
    pub type2_value: Rational,
    pub type2_expected: Rational,
}

impl CorollaryCheck {
    pub fn holds(&self) -> bool {
        self.type1_value == self.type1_expected && self.type2_value == self.type2_expected
    }
}

/// For a constant 2-form `F`, evaluates `G^G^phi0` against `-2|G|^2` on the
/// 7-dimensional part and `+|G|^2` on the 14-dimensional part.
pub fn pointwise_corollary_check(f2: &KForm, f: &FundamentalForm) -> CorollaryCheck {
    let (p1, p2) = f.lambda2_split(f2);
    let top = |g: &KForm| g.wedge(g).wedge(&f.phi0).top_coeff().constant_value().expect("constant form");
    let norm = |g: &KForm| g.inner(g).constant_value().expect("constant form");
    CorollaryCheck {
        type1_value: top(&p1),
        type1_expected: norm(&p1) * int(-2),
        type2_value: top(&p2),
        type2_expected: norm(&p2),
    }
}

/// `r(F) = |G - P(G)|^2 / |G|^2` with `G = F^F` and `P` the projection onto `{alpha ^ phi0}`.
pub fn sd_ratio_exact(f2: &KForm, f: &FundamentalForm) -> Result<Rational, InstantonError> {
    let g = f2.wedge(f2);
    let gg = g.inner(&g).constant_value().expect("constant form");
    if gg.is_zero() {
        return Err(InstantonError::DegenerateSample);
    }
    let q = &g - &f.lambda4_2_part(&g);
    Ok(q.inner(&q).constant_value().unwrap() / gg)
}

/// Floating-point evaluator for the same ratio, with gradient.
pub struct SdObjective {
    wedge: Vec<(usize, usize, usize, f64)>,
    complement: Vec<Vec<f64>>,
}

impl SdObjective {
    pub fn new(f: &FundamentalForm) -> Self {
        let two = IndexTuple::all(2);
        let four = IndexTuple::all(4);
        let mut wedge = Vec::new();
        for (i, a) in two.iter().enumerate() {
            for (j, b) in two.iter().enumerate() {
                if let Some(s) = a.wedge_sign(*b) {
                    let k = four.iter().position(|t| t.mask() == a.mask() | b.mask()).unwrap();
                    wedge.push((i, j, k, s as f64));
                }
            }
        }
        let p2 = operator_matrix(4, |b| f.lambda4_2_part(b));
        let complement = (0..35)
            .map(|r| (0..35).map(|c| if r == c { 1.0 } else { 0.0 } - to_f64(&p2[r][c])).collect())
            .collect();
        SdObjective { wedge, complement }
    }

    fn square(&self, x: &[f64; 21]) -> [f64; 35] {
        let mut g = [0.0; 35];
        for &(i, j, k, s) in &self.wedge {
            g[k] += s * x[i] * x[j];
        }
        g
    }

    /// Ratio and its gradient; `None` when `|F^F|` is negligible.
    pub fn eval(&self, x: &[f64; 21]) -> Option<(f64, [f64; 21])> {
        let g = self.square(x);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg < 1e-24 {
            return None;
        }
        let q: Vec<f64> = self.complement.iter().map(|row| row.iter().zip(&g).map(|(a, b)| a * b).sum()).collect();
        let qq: f64 = q.iter().map(|v| v * v).sum();
        let r = qq / gg;
        // d r / d g = 2 (Q g - r g) / |g|^2, with Q symmetric idempotent
        let dg: Vec<f64> = q.iter().zip(&g).map(|(qk, gk)| 2.0 * (qk - r * gk) / gg).collect();
        let mut grad = [0.0; 21];
        for &(i, j, k, s) in &self.wedge {
            grad[i] += s * x[j] * dg[k];
            grad[j] += s * x[i] * dg[k];
        }
        Some((r, grad))
    }

    pub fn ratio(&self, x: &[f64; 21]) -> Option<f64> {
        self.eval(x).map(|(r, _)| r)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub min_ratio: f64,
    pub best: [f64; 21],
    pub degenerate_samples: usize,
}

fn normalize(x: &mut [f64; 21]) {
    let n = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    x.iter_mut().for_each(|v| *v /= n);
}

/// Multi-restart descent on the unit sphere of constant 2-forms. The step grows
/// by 1.2 after an accepted move and halves after a rejected one.
pub fn sd_infeasibility_search(restarts: usize, steps: usize, seed: u64, f: &FundamentalForm) -> SearchResult {
    assert!(restarts >= 1 && steps >= 1);
    let obj = SdObjective::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut result = SearchResult { min_ratio: f64::INFINITY, best: [0.0; 21], degenerate_samples: 0 };
    for _ in 0..restarts {
        let (mut x, mut r, mut grad) = loop {
            let mut x = [0.0; 21];
            x.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
            normalize(&mut x);
            match obj.eval(&x) {
                Some((r, g)) => break (x, r, g),
                None => result.degenerate_samples += 1,
            }
        };
        let mut eta = 0.1;
        for _ in 0..steps {
            let mut y = x;
            y.iter_mut().zip(&grad).for_each(|(v, g)| *v -= eta * g);
            normalize(&mut y);
            match obj.eval(&y) {
                Some((ry, gy)) if ry < r => {
                    (x, r, grad) = (y, ry, gy);
                    eta *= 1.2;
                }
                _ => eta *= 0.5,
            }
        }
        if r < result.min_ratio {
            result.min_ratio = r;
            result.best = x;
        }
    }
    result
}

/// The linear system for `u_jk = b_jk / (a_j a_k)` on the four triples of a
/// 4-element index set: the coefficient of `e^{ijk}` in `a ^ b`, divided by
/// `a_i a_j a_k`, equals `u_jk - u_ik + u_ij`. Unknowns are ordered as the six
/// pairs of `set`; returns `(rows, triples)`.
pub fn pair_system(set: [u8; 4]) -> (Vec<Vec<Rational>>, Vec<[u8; 3]>) {
    let pairs: Vec<(u8, u8)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (set[i], set[j]))).collect();
    let col = |p: (u8, u8)| pairs.iter().position(|&q| q == p).unwrap();
    let triples: Vec<[u8; 3]> = (0..4)
        .flat_map(|i| (i + 1..4).flat_map(move |j| (j + 1..4).map(move |k| [set[i], set[j], set[k]])))
        .collect();
    let rows = triples
        .iter()
        .map(|&[i, j, k]| {
            let mut row = alloc::vec![Rational::zero(); 6];
            row[col((j, k))] += int(1);
            row[col((i, k))] -= int(1);
            row[col((i, j))] += int(1);
            row
        })
        .collect();
    (rows, triples)
}

/// Whether the 3-form `w` is divisible by a nonzero 1-form, i.e. whether
/// `alpha -> alpha ^ w` has a kernel.
pub fn has_linear_factor(w: &KForm) -> bool {
    let cols: Vec<Vec<Rational>> = (1..=7).map(|i| KForm::e(&[i]).wedge(w).to_vector().unwrap()).collect();
    let m = linalg::transpose(&cols);
    !linalg::nullspace(&m, 7).is_empty()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaBetaReport {
    pub trials: usize,
    /// Random samples with `alpha ^ beta != 0` whose third component vanished.
    pub counterexamples: usize,
    /// The contracted target `-e246 - e347 + e257 - e356` on `{3,4,5,6}`.
    pub theorem_step3_inconsistent: bool,
    /// Cases I-III on `{1,2,3,4}`.
    pub lemma_systems_inconsistent: [bool; 3],
    /// None of the four lemma targets nor the theorem target has a linear factor.
    pub no_linear_factor: bool,
}

impl AlphaBetaReport {
    pub fn holds(&self) -> bool {
        self.counterexamples == 0
            && self.theorem_step3_inconsistent
            && self.lemma_systems_inconsistent.iter().all(|&b| b)
            && self.no_linear_factor
    }
}

/// `-e246 - e347 + e257 - e356`.
pub fn theorem_target() -> KForm {
    form_of(&[
        (&[2, 4, 6], Poly::from_int(-1)),
        (&[3, 4, 7], Poly::from_int(-1)),
        (&[2, 5, 7], Poly::from_int(1)),
        (&[3, 5, 6], Poly::from_int(-1)),
    ])
}

/// Targets of cases I-IV.
pub fn lemma_targets(f: &FundamentalForm) -> [KForm; 4] {
    let extra = form_of(&[
        (&[3, 5, 7], Poly::from_int(1)),
        (&[2, 5, 6], Poly::from_int(1)),
        (&[3, 4, 6], Poly::from_int(1)),
        (&[2, 4, 7], Poly::from_int(-1)),
    ]);
    [&f.phi0 + &extra, &f.phi0 - &extra, f.phi0.clone(), extra]
}

fn system_inconsistent(target: &KForm, set: [u8; 4]) -> bool {
    let (rows, triples) = pair_system(set);
    let rhs: Vec<Rational> = triples.iter().map(|t| target.coeff_of(t).constant_value().unwrap()).collect();
    linalg::solve(&rows, &rhs, 6).is_none()
}

pub fn alpha_beta_infeasibility_check(trials: usize, seed: u64, f: &FundamentalForm) -> AlphaBetaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = f.lambda3_bases();
    let mut counterexamples = 0;
    for _ in 0..trials {
        let mut r = || rat(rng.random_range(-4..=4), rng.random_range(1..=3));
        let alpha = KForm::from_vector(1, &(0..7).map(|_| r()).collect::<Vec<_>>());
        let beta = KForm::from_vector(2, &(0..21).map(|_| r()).collect::<Vec<_>>());
        let w = alpha.wedge(&beta);
        if w.is_zero() {
            continue;
        }
        let p12 = &crate::g2core::project_onto_basis(&w, &bases[0]) + &crate::g2core::project_onto_basis(&w, &bases[1]);
        if p12 == w {
            counterexamples += 1;
        }
    }
    let target = theorem_target();
    let cases = lemma_targets(f);
    let lemma_systems_inconsistent = core::array::from_fn(|k| system_inconsistent(&cases[k], [1, 2, 3, 4]));
    let no_linear_factor = !has_linear_factor(&target) && cases.iter().all(|c| !has_linear_factor(c));
    AlphaBetaReport {
        trials,
        counterexamples,
        theorem_step3_inconsistent: system_inconsistent(&target, [3, 4, 5, 6]),
        lemma_systems_inconsistent,
        no_linear_factor,
    }
}

/// Abelian tangent residual `2 da ^ dB ^ phi0`.
pub fn tangent_check(c: &Connection1Form, a: &KForm, f: &FundamentalForm) -> KForm {
    a.d().wedge(&c.f).wedge(&f.phi0).scale_rat(&int(2))
}

/// The six `d`-terms of the closedness computation (abelian case).
pub fn presymplectic_d_terms(a: [&KForm; 3], f: &FundamentalForm) -> KForm {
    let [a1, a2, a3] = a;
    let t = |x: &KForm, y: &KForm, z: &KForm| x.d().wedge(y).wedge(z).wedge(&f.phi0);
    let terms = [
        t(a1, a2, a3),
        -t(a2, a1, a3),
        t(a3, a1, a2),
        -t(a1, a3, a2),
        t(a2, a3, a1),
        -t(a3, a2, a1),
    ];
    terms.iter().fold(KForm::zero(7), |acc, x| &acc + x)
}

/// The twelve `B`-terms; they cancel in pairs for an abelian connection.
pub fn presymplectic_b_terms(b: &KForm, a: [&KForm; 3], f: &FundamentalForm) -> KForm {
    let [a1, a2, a3] = a;
    let w = |xs: [&KForm; 4]| xs[0].wedge(xs[1]).wedge(xs[2]).wedge(xs[3]).wedge(&f.phi0);
    let plus = [
        w([b, a1, a2, a3]),
        w([a1, b, a2, a3]),
        w([b, a2, a3, a1]),
        w([a2, b, a3, a1]),
        w([b, a3, a1, a2]),
        w([a3, b, a1, a2]),
    ];
    let minus = [
        w([b, a1, a3, a2]),
        w([a1, b, a3, a2]),
        w([b, a2, a1, a3]),
        w([a2, b, a1, a3]),
        w([b, a3, a2, a1]),
        w([a3, b, a2, a1]),
    ];
    let p = plus.iter().fold(KForm::zero(7), |acc, x| &acc + x);
    minus.iter().fold(p, |acc, x| &acc - x)
}

/// The six `d`-terms equal `d(2 a1^a2^a3) ^ phi0`, which is the exact form `d(2 a1^a2^a3^phi0)`.
pub fn presymplectic_integrand_check(a: [&KForm; 3], f: &FundamentalForm) -> bool {
    let lhs = presymplectic_d_terms(a, f);
    let core = a[0].wedge(a[1]).wedge(a[2]).scale_rat(&int(2));
    let rhs = core.d().wedge(&f.phi0);
    let exact = core.wedge(&f.phi0).d();
    lhs == rhs && rhs == exact
}
