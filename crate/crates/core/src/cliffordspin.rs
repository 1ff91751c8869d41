//! Spin(7) Clifford data: the seven 8x8 gamma matrices, `Sigma_ij`, the
//! fourteen g2 generators `V_k`, `W_k`, their brackets and the invariant spinor.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coeffring::{int, rat, GaussianRational as C, Poly, Rational};
use crate::exterior::{IndexTuple, KForm};
use crate::g2core::{asd_relation_check, SpinConnection, TTensor};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpinError {
    #[error("construction check failed: {0}")]
    ConstructionFailure(String),
    #[error("bracket [{0},{1}] leaves the span of V, W")]
    NotInSpan(Gen, Gen),
    #[error("common nullspace has dimension {0}, expected 1")]
    WrongNullity(usize),
    #[error("psi_{0}{1}{2} has nonzero imaginary part")]
    NonRealCoefficient(u8, u8, u8),
    #[error("connection row {0} violates the g2 relations")]
    NotInG2(u8),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat8 {
    e: Vec<C>,
}

impl Mat8 {
    pub fn zero() -> Self {
        Mat8 { e: alloc::vec![C::zero(); 64] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..8 {
            m.e[i * 9] = C::one();
        }
        m
    }

    /// Matrix `i * pattern`, with `pattern` entries in `{-1, 0, 1}`.
    pub fn imaginary(pattern: &[[i8; 8]; 8]) -> Self {
        let mut m = Self::zero();
        for (r, row) in pattern.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                m.e[r * 8 + c] = C::new(Rational::zero(), int(x as i64));
            }
        }
        m
    }

    pub fn from_rows(rows: &[[C; 8]; 8]) -> Self {
        Mat8 { e: rows.iter().flat_map(|r| r.iter().cloned()).collect() }
    }

    pub fn get(&self, r: usize, c: usize) -> &C {
        &self.e[r * 8 + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C) {
        self.e[r * 8 + c] = v;
    }

    pub fn entries(&self) -> &[C] {
        &self.e
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, o: &Mat8) -> Mat8 {
        let mut out = Mat8::zero();
        for r in 0..8 {
            for k in 0..8 {
                let a = &self.e[r * 8 + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..8 {
                    let b = &o.e[k * 8 + c];
                    if !b.is_zero() {
                        out.e[r * 8 + c] = out.e[r * 8 + c].clone() + a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat8) -> Mat8 {
        Mat8 { e: self.e.iter().zip(&o.e).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, o: &Mat8) -> Mat8 {
        Mat8 { e: self.e.iter().zip(&o.e).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn scale(&self, s: &C) -> Mat8 {
        Mat8 { e: self.e.iter().map(|a| a * s).collect() }
    }

    pub fn scale_rat(&self, s: &Rational) -> Mat8 {
        Mat8 { e: self.e.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn commutator(&self, o: &Mat8) -> Mat8 {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn conj_transpose(&self) -> Mat8 {
        let mut out = Mat8::zero();
        for r in 0..8 {
            for c in 0..8 {
                out.e[c * 8 + r] = self.e[r * 8 + c].conj();
            }
        }
        out
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..8)
            .map(|r| (0..8).fold(C::zero(), |acc, c| acc + &self.e[r * 8 + c] * &v[c]))
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<C>> {
        self.e.chunks(8).map(<[C]>::to_vec).collect()
    }
}

impl fmt::Display for Mat8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.e.chunks(8) {
            for (k, x) in row.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x:>5}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Gamma matrices as `i` times these sign patterns.
pub const GAMMA_PATTERNS: [[[i8; 8]; 8]; 7] = [
    [
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, -1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, -1, 0, 0, 0, 0],
        [-1, 0, 0, 0, 0, 0, 0, 0],
    ],
    [
        [0, 0, -1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, -1, 0, 0, 0, 0],
        [0, 0, 0, 0, -1, 0, 0, 0],
        [0, -1, 0, 0, 0, 0, 0, 0],
    ],
    [
        [0, 1, 0, 0, 0, 0, 0, 0],
        [-1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, -1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, -1, 0, 0, 0, 0, 0],
    ],
    [
        [0, 0, 0, 0, 0, 0, -1, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, -1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, -1, 0, 0, 0, 0],
    ],
    [
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [0, 0, 0, -1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [-1, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, -1, 0, 0, 0],
    ],
    [
        [0, 0, 0, 0, -1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [0, -1, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
    ],
    [
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [-1, 0, 0, 0, 0, 0, 0, 0],
        [0, -1, 0, 0, 0, 0, 0, 0],
        [0, 0, -1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, -1, 0],
    ],
];

#[derive(Clone, Debug)]
pub struct SpinGenerators {
    pub gamma: [Mat8; 7],
    sigma: Vec<Mat8>,
}

/// `Gamma_1..Gamma_7` from [`GAMMA_PATTERNS`], checked.
pub fn gamma_matrices() -> Result<SpinGenerators, SpinError> {
    SpinGenerators::new(core::array::from_fn(|k| Mat8::imaginary(&GAMMA_PATTERNS[k])))
}

impl SpinGenerators {
    /// Builds `Sigma_ij = [Gamma_i, Gamma_j] / 4` after checking the Clifford
    /// relations and `Gamma_7 = i Gamma_1 ... Gamma_6`.
    pub fn new(gamma: [Mat8; 7]) -> Result<Self, SpinError> {
        let id = Mat8::identity();
        for i in 0..7 {
            for j in i..7 {
                let ac = gamma[i].mul(&gamma[j]).add(&gamma[j].mul(&gamma[i]));
                let expected = if i == j { id.scale_rat(&int(2)) } else { Mat8::zero() };
                if let Some((r, c)) = first_difference(&ac, &expected) {
                    return Err(SpinError::ConstructionFailure(alloc::format!(
                        "{{Gamma_{}, Gamma_{}}} differs at entry ({}, {})",
                        i + 1,
                        j + 1,
                        r + 1,
                        c + 1
                    )));
                }
            }
        }
        let prod = gamma[..6].iter().fold(Mat8::identity(), |acc, g| acc.mul(g)).scale(&C::i());
        if let Some((r, c)) = first_difference(&gamma[6], &prod) {
            return Err(SpinError::ConstructionFailure(alloc::format!(
                "Gamma_7 differs from i Gamma_1...Gamma_6 at entry ({}, {})",
                r + 1,
                c + 1
            )));
        }
        let quarter = rat(1, 4);
        let mut sigma = Vec::with_capacity(49);
        for i in 0..7 {
            for j in 0..7 {
                sigma.push(gamma[i].commutator(&gamma[j]).scale_rat(&quarter));
            }
        }
        Ok(SpinGenerators { gamma, sigma })
    }

    /// `Sigma_ij` for `i, j` in `1..=7`.
    pub fn sigma(&self, i: u8, j: u8) -> &Mat8 {
        &self.sigma[(i as usize - 1) * 7 + j as usize - 1]
    }

    /// `Gamma_i Gamma_j Gamma_k` antisymmetrized (a plain product for distinct indices).
    pub fn gamma3(&self, i: u8, j: u8, k: u8) -> Mat8 {
        let g = |a: u8| &self.gamma[a as usize - 1];
        let mut acc = Mat8::zero();
        let perms: [([u8; 3], i64); 6] = [
            ([i, j, k], 1),
            ([j, k, i], 1),
            ([k, i, j], 1),
            ([j, i, k], -1),
            ([i, k, j], -1),
            ([k, j, i], -1),
        ];
        for (p, s) in perms {
            acc = acc.add(&g(p[0]).mul(g(p[1])).mul(g(p[2])).scale_rat(&int(s)));
        }
        acc.scale_rat(&rat(1, 6))
    }
}

fn first_difference(a: &Mat8, b: &Mat8) -> Option<(usize, usize)> {
    (0..64).find(|&k| a.e[k] != b.e[k]).map(|k| (k / 8, k % 8))
}

/// Checks `[S_ij, S_kl] = S_il d_jk + S_jk d_il - S_ik d_jl - S_jl d_ik` for all quadruples.
pub fn spin7_bracket_check(g: &SpinGenerators) -> bool {
    let d = |a: u8, b: u8| if a == b { C::one() } else { C::zero() };
    for i in 1..=7 {
        for j in 1..=7 {
            for k in 1..=7 {
                for l in 1..=7 {
                    let lhs = g.sigma(i, j).commutator(g.sigma(k, l));
                    let rhs = g
                        .sigma(i, l)
                        .scale(&d(j, k))
                        .add(&g.sigma(j, k).scale(&d(i, l)))
                        .sub(&g.sigma(i, k).scale(&d(j, l)))
                        .sub(&g.sigma(j, l).scale(&d(i, k)));
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// A g2 generator `V_k` or `W_k`, `k` in `1..=7`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Gen {
    V(u8),
    W(u8),
}

impl Gen {
    pub fn all() -> [Gen; 14] {
        core::array::from_fn(|k| if k < 7 { Gen::V(k as u8 + 1) } else { Gen::W(k as u8 - 6) })
    }

    fn slot(self) -> usize {
        match self {
            Gen::V(k) => k as usize - 1,
            Gen::W(k) => k as usize + 6,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::V(k) => write!(f, "V{k}"),
            Gen::W(k) => write!(f, "W{k}"),
        }
    }
}

/// `(first pair, second pair, sign)`: the generator is `S_first + sign * S_second`.
pub const V_DEF: [((u8, u8), (u8, u8), i64); 7] = [
    ((5, 6), (1, 2), 1),
    ((5, 7), (1, 3), 1),
    ((3, 6), (1, 4), -1),
    ((3, 7), (1, 5), -1),
    ((2, 5), (1, 6), 1),
    ((3, 5), (1, 7), 1),
    ((6, 7), (2, 3), 1),
];

pub const W_DEF: [((u8, u8), (u8, u8), i64); 7] = [
    ((4, 7), (1, 2), -1),
    ((4, 6), (1, 3), 1),
    ((2, 7), (1, 4), 1),
    ((2, 6), (1, 5), -1),
    ((3, 4), (1, 6), 1),
    ((2, 4), (1, 7), -1),
    ((4, 5), (2, 3), -1),
];

#[derive(Clone, Debug)]
pub struct G2Basis {
    pub v: [Mat8; 7],
    pub w: [Mat8; 7],
}

impl G2Basis {
    pub fn new(g: &SpinGenerators) -> Self {
        let build = |def: &[((u8, u8), (u8, u8), i64); 7]| -> [Mat8; 7] {
            core::array::from_fn(|k| {
                let ((a, b), (c, d), s) = def[k];
                g.sigma(a, b).add(&g.sigma(c, d).scale_rat(&int(s)))
            })
        };
        G2Basis { v: build(&V_DEF), w: build(&W_DEF) }
    }

    pub fn get(&self, x: Gen) -> &Mat8 {
        match x {
            Gen::V(k) => &self.v[k as usize - 1],
            Gen::W(k) => &self.w[k as usize - 1],
        }
    }

    pub fn all(&self) -> Vec<Mat8> {
        Gen::all().iter().map(|&x| self.get(x).clone()).collect()
    }

    /// Coordinates of `m` in the basis `V_1..V_7, W_1..W_7`, if it lies in their span.
    pub fn coordinates(&self, m: &Mat8) -> Option<[Rational; 14]> {
        let cols: Vec<Vec<C>> = self.all().iter().map(|x| x.entries().to_vec()).collect();
        let rows = linalg::transpose(&cols);
        let x = linalg::solve(&rows, m.entries(), 14)?;
        if x.iter().any(|c| !c.is_real()) {
            return None;
        }
        Some(core::array::from_fn(|k| x[k].re.clone()))
    }

    pub fn combine(&self, coeffs: &[(Rational, Gen)]) -> Mat8 {
        coeffs.iter().fold(Mat8::zero(), |acc, (c, x)| acc.add(&self.get(*x).scale_rat(c)))
    }
}

/// A bracket `[X, Y]` expanded in the V/W basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub x: Gen,
    pub y: Gen,
    pub value: Vec<(Rational, Gen)>,
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}] = ", self.x, self.y)?;
        if self.value.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, g)) in self.value.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if k > 0 { "+" } else { "" };
            let a = c.abs();
            if a.is_one() {
                write!(f, "{sign}{g}")?;
            } else {
                write!(f, "{sign}{a}{g}")?;
            }
        }
        Ok(())
    }
}

/// All 91 brackets `[X, Y]` with `X < Y` in the order `V_1..V_7, W_1..W_7`.
pub fn commutator_table(b: &G2Basis) -> Result<Vec<Bracket>, SpinError> {
    let gens = Gen::all();
    let mut out = Vec::new();
    for (a, &x) in gens.iter().enumerate() {
        for &y in &gens[a + 1..] {
            let m = b.get(x).commutator(b.get(y));
            let coords = b.coordinates(&m).ok_or(SpinError::NotInSpan(x, y))?;
            let value = gens
                .iter()
                .filter_map(|&g| {
                    let c = &coords[g.slot()];
                    (!c.is_zero()).then(|| (c.clone(), g))
                })
                .collect();
            out.push(Bracket { x, y, value });
        }
    }
    Ok(out)
}

/// The reference bracket table, as `(X, Y, [(coefficient, Z)])`.
pub const LISTED_BRACKETS: [(Gen, Gen, &[(i64, Gen)]); 83] = {
    use Gen::{V, W};
    [
        (V(1), V(2), &[(-1, V(7))]),
        (V(1), V(3), &[(1, V(6)), (1, W(6))]),
        (V(1), V(4), &[(1, V(5))]),
        (V(1), V(5), &[(-2, W(4))]),
        (V(1), V(6), &[(-1, V(3)), (-1, W(3))]),
        (V(1), V(7), &[(1, V(2))]),
        (V(1), W(2), &[(1, W(7))]),
        (V(1), W(3), &[(-1, W(6))]),
        (V(1), W(4), &[(2, V(5))]),
        (V(1), W(5), &[(-1, W(4))]),
        (V(1), W(6), &[(1, W(3))]),
        (V(1), W(7), &[(-1, W(2))]),
        (V(2), V(3), &[(1, W(5))]),
        (V(2), V(4), &[(2, V(6))]),
        (V(2), V(5), &[(-1, V(3)), (-1, W(3))]),
        (V(2), V(6), &[(-2, V(4))]),
        (V(2), V(7), &[(-1, V(1))]),
        (V(2), W(1), &[(1, W(7))]),
        (V(2), W(3), &[(1, V(5)), (-1, W(5))]),
        (V(2), W(4), &[(1, V(6))]),
        (V(2), W(5), &[(-1, V(3))]),
        (V(2), W(7), &[(-1, W(1))]),
        (V(3), V(4), &[(-1, V(7)), (-1, W(7))]),
        (V(3), V(5), &[(1, W(2))]),
        (V(3), V(6), &[(1, V(1)), (1, W(1))]),
        (V(3), V(7), &[(1, V(4)), (-1, W(4))]),
        (V(3), W(1), &[(1, W(6))]),
        (V(3), W(2), &[(-2, W(5))]),
        (V(3), W(4), &[(-1, W(7))]),
        (V(3), W(5), &[(2, W(2))]),
        (V(3), W(6), &[(-1, W(1))]),
        (V(3), W(7), &[(1, W(4))]),
        (V(4), V(5), &[(1, V(1))]),
        (V(4), V(6), &[(2, V(2))]),
        (V(4), V(7), &[(-1, V(3)), (-1, W(3))]),
        (V(4), W(1), &[(1, V(5)), (-1, W(5))]),
        (V(4), W(2), &[(-1, V(6))]),
        (V(4), W(3), &[(-1, W(7))]),
        (V(4), W(5), &[(1, V(1)), (1, W(1))]),
        (V(4), W(6), &[(-1, V(2))]),
        (V(4), W(7), &[(1, W(3))]),
        (V(5), V(6), &[(-1, V(7))]),
        (V(5), V(7), &[(1, V(6))]),
        (V(5), W(1), &[(-1, W(4))]),
        (V(5), W(2), &[(1, V(3))]),
        (V(5), W(3), &[(-1, V(2)), (1, W(2))]),
        (V(5), W(4), &[(-2, V(1))]),
        (V(5), W(6), &[(1, V(7)), (1, W(7))]),
        (V(5), W(7), &[(-1, V(6)), (-1, W(6))]),
        (V(6), V(7), &[(-1, V(5))]),
        (V(6), W(1), &[(-1, W(3))]),
        (V(6), W(2), &[(1, V(4))]),
        (V(6), W(3), &[(1, W(1))]),
        (V(6), W(4), &[(-1, V(2))]),
        (V(6), W(5), &[(1, V(7)), (1, W(7))]),
        (V(6), W(7), &[(1, V(5)), (-1, W(5))]),
        (V(7), W(1), &[(1, W(2))]),
        (V(7), W(2), &[(-1, W(1))]),
        (V(7), W(3), &[(-1, V(4)), (1, W(4))]),
        (V(7), W(4), &[(-1, V(3)), (-1, W(3))]),
        (V(7), W(5), &[(1, W(6))]),
        (V(7), W(6), &[(-1, W(5))]),
        (W(1), W(2), &[(1, V(7))]),
        (W(1), W(3), &[(2, W(6))]),
        (W(1), W(4), &[(-1, V(5))]),
        (W(1), W(5), &[(-1, V(4)), (1, W(4))]),
        (W(1), W(6), &[(-2, W(3))]),
        (W(1), W(7), &[(1, V(2))]),
        (W(2), W(3), &[(-1, W(5))]),
        (W(2), W(4), &[(1, V(6)), (1, W(6))]),
        (W(2), W(5), &[(-2, V(3))]),
        (W(2), W(6), &[(1, V(4)), (-1, W(4))]),
        (W(2), W(7), &[(1, V(1))]),
        (W(3), W(4), &[(1, V(7)), (1, W(7))]),
        (W(3), W(5), &[(-1, W(2))]),
        (W(3), W(6), &[(2, W(1))]),
        (W(3), W(7), &[(-1, V(4))]),
        (W(4), W(5), &[(1, V(1))]),
        (W(4), W(6), &[(-1, V(2)), (1, W(2))]),
        (W(4), W(7), &[(-1, V(3))]),
        (W(5), W(6), &[(1, V(7))]),
        (W(5), W(7), &[(1, V(6)), (1, W(6))]),
        (W(6), W(7), &[(1, V(5)), (-1, W(5))]),
    ]
};

/// Dimension of the smallest bracket-closed span containing `gens`.
pub fn closure_check(gens: &[Mat8]) -> usize {
    let mut basis: Vec<Vec<C>> = Vec::new();
    let mut mats: Vec<Mat8> = Vec::new();
    let push = |m: &Mat8, basis: &mut Vec<Vec<C>>, mats: &mut Vec<Mat8>| {
        if m.is_zero() || linalg::in_span(basis, m.entries()) {
            return false;
        }
        basis.push(m.entries().to_vec());
        mats.push(m.clone());
        true
    };
    for g in gens {
        push(g, &mut basis, &mut mats);
    }
    loop {
        let n = mats.len();
        let mut grew = false;
        for a in 0..n {
            for b in a + 1..n {
                let c = mats[a].commutator(&mats[b]);
                grew |= push(&c, &mut basis, &mut mats);
            }
        }
        if !grew {
            return mats.len();
        }
    }
}

/// Unnormalized spinor; `norm_sq = v^dagger v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spinor {
    pub vec: [C; 8],
    pub norm_sq: Rational,
}

impl Spinor {
    pub fn new(vec: [C; 8]) -> Self {
        let norm_sq = vec.iter().map(C::norm_sq).fold(Rational::zero(), |a, b| a + b);
        Spinor { vec, norm_sq }
    }

    pub fn from_ints(v: [i64; 8]) -> Self {
        Self::new(core::array::from_fn(|k| C::from_int(v[k])))
    }
}

impl fmt::Display for Spinor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.vec.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Common nullspace of the fourteen generators, with the first nonzero entry
/// real positive and entries coprime integers.
pub fn invariant_spinor(b: &G2Basis) -> Result<Spinor, SpinError> {
    let rows: Vec<Vec<C>> = b.all().iter().flat_map(Mat8::rows).collect();
    let kernel = linalg::nullspace(&rows, 8);
    if kernel.len() != 1 {
        return Err(SpinError::WrongNullity(kernel.len()));
    }
    let v = &kernel[0];
    let lead = v.iter().find(|x| !x.is_zero()).unwrap().clone();
    let v: Vec<C> = v.iter().map(|x| x.clone() / lead.clone()).collect();
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for x in &v {
        for r in [&x.re, &x.im] {
            den = den.lcm(r.denom());
            num = num.gcd(r.numer());
        }
    }
    let s = Rational::new(den, num);
    Ok(Spinor::new(core::array::from_fn(|k| v[k].scale(&s))))
}

/// `psi_ijk = i eta^dagger Gamma_[ijk] eta / |eta|^2` for `i < j < k`, as the
/// 3-form `sum_{i<j<k} psi_ijk e^{ijk}` (the sum over all orderings is six times this).
pub fn psi_form(eta: &Spinor, g: &SpinGenerators) -> Result<KForm, SpinError> {
    let conj: Vec<C> = eta.vec.iter().map(C::conj).collect();
    let mut terms = Vec::new();
    for t in IndexTuple::all(3) {
        let ix = t.indices();
        let gv = g.gamma3(ix[0], ix[1], ix[2]).apply(&eta.vec);
        let z = conj.iter().zip(&gv).fold(C::zero(), |acc, (a, b)| acc + a * b);
        let z = (&C::i() * &z).scale(&(Rational::one() / &eta.norm_sq));
        if !z.is_real() {
            return Err(SpinError::NonRealCoefficient(ix[0], ix[1], ix[2]));
        }
        terms.push((t, Poly::constant(z.re)));
    }
    Ok(KForm::from_terms(3, terms).unwrap())
}

/// `frame_relabel`: `e^i` goes to `e^{perm[i-1]}`.
pub fn frame_relabel(w: &KForm, perm: &[u8; 7]) -> KForm {
    w.relabel(perm)
}

/// The frame list `{e1,e2,e3,e6,e7,e4,e5}` that is reassigned to `{e1,...,e7}`.
pub const REFERENCE_FRAME: [u8; 7] = [1, 2, 3, 6, 7, 4, 5];

/// Which reading of a frame reassignment sends a form to a target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameResolution {
    /// `e_{src[i]} -> e_{i+1}`.
    Forward,
    /// `e_{i+1} -> e_{src[i]}`.
    Backward,
    Both,
    Neither,
}

pub fn frame_directions(src: &[u8; 7]) -> ([u8; 7], [u8; 7]) {
    let mut forward = [0u8; 7];
    for (i, &s) in src.iter().enumerate() {
        forward[s as usize - 1] = i as u8 + 1;
    }
    (forward, *src)
}

/// Tries both directions of the reassignment `src -> (1..7)` on `w`.
pub fn resolve_frame(w: &KForm, src: &[u8; 7], target: &KForm) -> FrameResolution {
    let (fwd, bwd) = frame_directions(src);
    match (&frame_relabel(w, &fwd) == target, &frame_relabel(w, &bwd) == target) {
        (true, true) => FrameResolution::Both,
        (true, false) => FrameResolution::Forward,
        (false, true) => FrameResolution::Backward,
        (false, false) => FrameResolution::Neither,
    }
}

/// The 2-form `sum_{i<j} c_ij e^{ij}` for `m = sum_{i<j} c_ij Sigma_ij`.
pub fn sigma_shadow(m: &Mat8, g: &SpinGenerators) -> Option<KForm> {
    let pairs = IndexTuple::all(2);
    let cols: Vec<Vec<C>> = pairs
        .iter()
        .map(|t| {
            let ix = t.indices();
            g.sigma(ix[0], ix[1]).entries().to_vec()
        })
        .collect();
    let x = linalg::solve(&linalg::transpose(&cols), m.entries(), pairs.len())?;
    if x.iter().any(|c| !c.is_real()) {
        return None;
    }
    let terms = pairs.into_iter().zip(x).map(|(t, c)| (t, Poly::constant(c.re)));
    Some(KForm::from_terms(2, terms).unwrap())
}

/// Infinitesimal rotation by the 2-form `w`, acting as a derivation on forms:
/// `e^k -> sum_j w_jk e^j`.
pub fn rotation_derivation(w: &KForm, form: &KForm) -> KForm {
    let mut out = KForm::zero(form.degree());
    for k in 1..=7u8 {
        let dk = (1..=7u8)
            .filter(|&j| j != k)
            .fold(KForm::zero(1), |acc, j| &acc + &KForm::e(&[j]).scale(&w.coeff_of(&[j, k])));
        if dk.is_zero() {
            continue;
        }
        // replace e^k in each monomial: e^k ^ (e_k ⌟ form)
        let part = dk.wedge(&form.contract(k));
        out = &out + &part;
    }
    out
}

/// Per row `i`, coefficients `(c_1..c_7, d_1..d_7)` with
/// `(1/2) Omega^i_jk Sigma_jk = sum c_k V_k + d_k W_k`.
pub fn g2_rewrite(
    omega: &SpinConnection,
    t: &TTensor,
    g: &SpinGenerators,
    b: &G2Basis,
) -> Result<Vec<[Rational; 14]>, SpinError> {
    let residuals = asd_relation_check(omega, t);
    let mut out = Vec::new();
    for i in 1..=7u8 {
        if residuals[i as usize - 1].iter().any(|r| !r.is_zero()) {
            return Err(SpinError::NotInG2(i));
        }
        let mut m = Mat8::zero();
        for j in 1..=7u8 {
            for k in 1..=7u8 {
                let c = omega.get(i, j, k);
                if !c.is_zero() {
                    m = m.add(&g.sigma(j, k).scale_rat(&(c * rat(1, 2))));
                }
            }
        }
        let coords = b.coordinates(&m).ok_or(SpinError::NotInG2(i))?;
        let rebuilt = b.combine(&Gen::all().iter().map(|&x| (coords[x.slot()].clone(), x)).collect::<Vec<_>>());
        if rebuilt != m {
            return Err(SpinError::NotInG2(i));
        }
        out.push(coords);
    }
    Ok(out)
}
