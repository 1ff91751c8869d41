//! Cech and Deligne-Beilinson cochains on simplicial covers.
//!
//! The cover is the closed-star cover of an oriented closed pseudomanifold `L`:
//! charts are the vertices of `L`, and the nerve is `L` itself. Local forms live
//! on the barycentric subdivision `K = sd(L)`, whose simplices are flags
//! `t0 < t1 < ... < tq` of simplices of `L` (stored as ascending id lists). The
//! chart region of a nerve tuple `s` is the subcomplex `K_s` of flags whose
//! first element contains `s`.
//!
//! Forms are simplicial cochains: wedge is the Alexander-Whitney cup product and
//! `d` is the simplicial coboundary. The Cech side uses increasing tuples with
//! the Alexander-Whitney product as well, and the bicomplex product is
//! `(x.y)_{a0..a(m+m')} = (-1)^{k_x m'} x_{a0..am} cup y_{am..a(m+m')}`.
//! The total differential is `D = delta + (-1)^m d`.
//!
//! Every value is stored after dividing out the `(2 pi i)^l` factors, so the
//! integral lattice is plain `Z`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::Rng;

use crate::coeffring::{int, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DbError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid gauge data: {0}")]
    InvalidGaugeData(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("invalid cochain: {0}")]
    InvalidCochain(String),
}

/// A simplex of `K = sd(L)`: strictly increasing chain of `L`-simplex ids.
pub type Flag = Vec<u32>;

fn perm_sign(v: &[u32]) -> i64 {
    let mut s = 1;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                s = -s;
            }
        }
    }
    s
}

/// Sort a tuple, returning the sign of the sorting permutation, or `None` when an
/// index repeats.
pub fn sort_tuple(t: &[u32]) -> Option<(Vec<u32>, i64)> {
    let mut v = t.to_vec();
    let s = perm_sign(&v);
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, s))
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    let mut j = 0;
    for x in a {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        if j == b.len() || b[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

fn sign_of(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(-1)^{m(m+1)/2}`.
pub fn tri_sign(m: usize) -> i64 {
    sign_of((m * (m + 1) / 2) % 2)
}

/// Nerve `L` together with its barycentric subdivision.
#[derive(Debug, Clone)]
pub struct Cover {
    dim: usize,
    charts: usize,
    simplices: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, u32>,
    star: Vec<Vec<u32>>,
    orientation: BTreeMap<u32, i64>,
}

impl Cover {
    /// Build from oriented top simplices. The vertex order of each top simplex
    /// gives its orientation; the result must be a closed, coherently oriented
    /// pseudomanifold whose charts are `0..V`.
    pub fn from_oriented_tops(tops: &[Vec<u32>]) -> Result<Self, DbError> {
        let first = tops
            .first()
            .ok_or_else(|| DbError::InvalidComplex("no top simplices".into()))?;
        if first.is_empty() {
            return Err(DbError::InvalidComplex("empty simplex".into()));
        }
        let dim = first.len() - 1;
        let mut all: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut orient_of: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for t in tops {
            if t.len() != dim + 1 {
                return Err(DbError::InvalidComplex("top simplices of mixed dimension".into()));
            }
            let (sorted, s) = sort_tuple(t)
                .ok_or_else(|| DbError::InvalidComplex("repeated vertex in a simplex".into()))?;
            if orient_of.insert(sorted.clone(), s).is_some() {
                return Err(DbError::InvalidComplex("duplicate top simplex".into()));
            }
            let n = sorted.len();
            for mask in 1u32..(1u32 << n) {
                let face: Vec<u32> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| sorted[i]).collect();
                all.insert(face);
            }
        }
        let charts = all.iter().filter(|s| s.len() == 1).count();
        if all.iter().any(|s| s.len() == 1 && s[0] as usize >= charts) {
            return Err(DbError::InvalidComplex("chart labels must be 0..V".into()));
        }
        let mut simplices: Vec<Vec<u32>> = all.into_iter().collect();
        simplices.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let index: BTreeMap<Vec<u32>, u32> =
            simplices.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let mut star = vec![Vec::new(); simplices.len()];
        for (id, s) in simplices.iter().enumerate() {
            let n = s.len();
            for mask in 1u32..((1u32 << n) - 1) {
                let face: Vec<u32> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
                star[index[&face] as usize].push(id as u32);
            }
        }
        let mut orientation = BTreeMap::new();
        for (s, o) in &orient_of {
            orientation.insert(index[s], *o);
        }
        let cover = Cover { dim, charts, simplices, index, star, orientation };
        cover.check_pseudomanifold()?;
        Ok(cover)
    }

    fn check_pseudomanifold(&self) -> Result<(), DbError> {
        if self.dim == 0 {
            return Ok(());
        }
        let mut induced: BTreeMap<u32, Vec<i64>> = BTreeMap::new();
        for (&t, &o) in &self.orientation {
            let s = &self.simplices[t as usize];
            for i in 0..s.len() {
                let mut face = s.clone();
                face.remove(i);
                induced.entry(self.index[&face]).or_default().push(o * sign_of(i));
            }
        }
        for (f, signs) in induced {
            if signs.len() != 2 {
                return Err(DbError::InvalidComplex(alloc::format!(
                    "face {:?} lies in {} top simplices",
                    self.simplices[f as usize],
                    signs.len()
                )));
            }
            if signs[0] + signs[1] != 0 {
                return Err(DbError::InvalidComplex(alloc::format!(
                    "incoherent orientation across face {:?}",
                    self.simplices[f as usize]
                )));
            }
        }
        Ok(())
    }

    /// Boundary of the `(dim+1)`-simplex: a sphere with `dim + 2` charts.
    pub fn sphere(dim: usize) -> Self {
        let n = dim as u32 + 2;
        let tops: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut t: Vec<u32> = (0..n).filter(|&v| v != i).collect();
                if i % 2 == 1 {
                    t.swap(0, 1);
                }
                t
            })
            .collect();
        Self::from_oriented_tops(&tops).expect("sphere boundary is a closed pseudomanifold")
    }

    /// Kuhn (Freudenthal) triangulation of the torus `(R/side Z)^dim`, `side >= 3`.
    pub fn kuhn_torus(dim: usize, side: u32) -> Self {
        assert!(side >= 3, "side must be at least 3");
        let tops = kuhn_tops(dim, side);
        Self::from_oriented_tops(&tops).expect("Kuhn triangulation is a closed pseudomanifold")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_charts(&self) -> usize {
        self.charts
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplex(&self, id: u32) -> &[u32] {
        &self.simplices[id as usize]
    }

    pub fn id(&self, tuple: &[u32]) -> Option<u32> {
        self.index.get(tuple).copied()
    }

    /// Nerve tuples (sorted vertex lists) with `m + 1` entries.
    pub fn nerve(&self, m: usize) -> impl Iterator<Item = &Vec<u32>> + '_ {
        self.simplices.iter().filter(move |s| s.len() == m + 1)
    }

    pub fn in_nerve(&self, tuple: &[u32]) -> bool {
        self.index.contains_key(tuple)
    }

    /// Simplices strictly containing `id`.
    pub fn star(&self, id: u32) -> &[u32] {
        &self.star[id as usize]
    }

    pub fn top_simplices(&self) -> impl Iterator<Item = (&[u32], i64)> + '_ {
        self.orientation.iter().map(move |(&t, &o)| (self.simplex(t), o))
    }

    /// Orientation sign of the top simplex `t` with respect to the vertex order `order`.
    pub fn orientation_of(&self, t: u32, order: &[u32]) -> i64 {
        self.orientation[&t] * perm_sign(order)
    }

    /// Whether the flag lies in `K_tuple`.
    pub fn flag_in(&self, flag: &[u32], tuple: &[u32]) -> bool {
        flag.first().is_some_and(|&f| is_subset(tuple, self.simplex(f)))
    }

    /// All `q`-simplices of `K_tuple`.
    pub fn local_simplices(&self, tuple: &[u32], q: usize) -> Vec<Flag> {
        let Some(id) = self.id(tuple) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut starts = vec![id];
        starts.extend_from_slice(self.star(id));
        for s in starts {
            self.extend_flags(&mut vec![s], q, &mut out);
        }
        out
    }

    fn extend_flags(&self, cur: &mut Flag, q: usize, out: &mut Vec<Flag>) {
        if cur.len() == q + 1 {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap();
        for &nxt in self.star(last) {
            cur.push(nxt);
            self.extend_flags(cur, q, out);
            cur.pop();
        }
    }

    /// Total number of simplices of `K`.
    pub fn num_subdivision_simplices(&self) -> usize {
        let mut total = 0;
        for v in 0..self.charts as u32 {
            // flags whose first element has minimal vertex v are counted once
            for q in 0..=self.dim {
                total += self
                    .local_simplices(&[v], q)
                    .iter()
                    .filter(|f| self.simplex(f[0])[0] == v)
                    .count();
            }
        }
        total
    }

    /// Partition of unity: `xi_chart(b(t)) = 1/|t|` if `chart` is a vertex of `t`.
    pub fn xi(&self, chart: u32, vertex: u32) -> Rational {
        let t = self.simplex(vertex);
        if t.binary_search(&chart).is_ok() {
            rat(1, t.len() as i64)
        } else {
            Rational::zero()
        }
    }
}

fn kuhn_tops(dim: usize, side: u32) -> Vec<Vec<u32>> {
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in &perms {
            for a in 0..dim {
                if !p.contains(&a) {
                    let mut q = p.clone();
                    q.push(a);
                    next.push(q);
                }
            }
        }
        perms = next;
    }
    let cells = (side as usize).pow(dim as u32);
    let id = |c: &[u32]| -> u32 {
        c.iter().rev().fold(0u32, |acc, &x| acc * side + x)
    };
    let mut tops = Vec::new();
    for cell in 0..cells {
        let mut base = vec![0u32; dim];
        let mut r = cell as u32;
        for b in base.iter_mut() {
            *b = r % side;
            r /= side;
        }
        for p in &perms {
            let mut cur = base.clone();
            let mut t = vec![id(&cur)];
            for &a in p {
                cur[a] = (cur[a] + 1) % side;
                t.push(id(&cur));
            }
            let ps: Vec<u32> = p.iter().map(|&a| a as u32).collect();
            if perm_sign(&ps) < 0 {
                let n = t.len();
                t.swap(n - 2, n - 1);
            }
            tops.push(t);
        }
    }
    tops
}

/// Integer winding 1-cocycle of the Kuhn torus along `axis`:
/// `u_{ab} = (X_b - X_a - dx_{ab}) / side`, with `dx` the lifted displacement.
pub fn kuhn_winding(cover: &Cover, side: u32, axis: usize) -> CechCochain {
    let coord = |v: u32| -> i64 { ((v / side.pow(axis as u32)) % side) as i64 };
    let mut c = CechCochain::integral(1);
    for e in cover.nerve(1) {
        let (xa, xb) = (coord(e[0]), coord(e[1]));
        let raw = (xb - xa).rem_euclid(side as i64);
        let dx = if raw == side as i64 - 1 { -1 } else { raw };
        let u = (xb - xa - dx) / side as i64;
        if u != 0 {
            c.set_constant(e.clone(), int(u));
        }
    }
    c
}

/// Chain of `K` with integer coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Chain {
    terms: BTreeMap<Flag, i64>,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, f: Flag, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(f).or_insert(0);
        *e += c;
        if *e == 0 {
            let k: Vec<Flag> = self.terms.iter().filter(|(_, v)| **v == 0).map(|(k, _)| k.clone()).collect();
            for k in k {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add_chain(&mut self, other: &Chain, c: i64) {
        for (f, v) in &other.terms {
            self.add(f.clone(), c * v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Flag, i64)> {
        self.terms.iter().map(|(f, c)| (f, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn boundary(&self) -> Chain {
        let mut out = Chain::new();
        for (f, c) in &self.terms {
            if f.len() < 2 {
                continue;
            }
            for i in 0..f.len() {
                let mut g = f.clone();
                g.remove(i);
                out.add(g, c * sign_of(i));
            }
        }
        out
    }

    /// Evaluate a cochain on the chain.
    pub fn pair(&self, f: impl Fn(&[u32]) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (flag, c) in &self.terms {
            let v = f(flag);
            if !v.is_zero() {
                acc += v * int(*c);
            }
        }
        acc
    }
}

/// Dual-cell decomposition subordinate to the cover.
///
/// For a nerve tuple `s` of `m + 1` charts, `P_s` is the sum over maximal flags
/// `s = t0 < t1 < ... < t(n-m)` of `e_m sign(T; s, v(m+1), ..., v(n)) [flag]`, with
/// `v(i)` the vertex added at step `i`, `T` the final top simplex and
/// `e_m = (-1)^{m(m+1)/2}`. With this sign, `dP_s = sum_b (-1)^{i_b} P_{s+b}`,
/// where `i_b` is the sorted position of `b`.
#[derive(Debug, Clone)]
pub struct PolyDecomp {
    dim: usize,
    cells: BTreeMap<Vec<u32>, Chain>,
}

impl PolyDecomp {
    pub fn build(cover: &Cover) -> Self {
        let n = cover.dim();
        let mut cells = BTreeMap::new();
        for m in 0..=n {
            for s in cover.nerve(m) {
                let mut chain = Chain::new();
                let sid = cover.id(s).unwrap();
                let mut stack: Vec<(Flag, Vec<u32>)> = vec![(vec![sid], s.clone())];
                while let Some((flag, order)) = stack.pop() {
                    let last = *flag.last().unwrap();
                    if cover.simplex(last).len() == n + 1 {
                        chain.add(flag, tri_sign(m) * cover.orientation_of(last, &order));
                        continue;
                    }
                    let cur = cover.simplex(last);
                    for &nxt in cover.star(last) {
                        let t = cover.simplex(nxt);
                        if t.len() != cur.len() + 1 {
                            continue;
                        }
                        let v = *t.iter().find(|x| cur.binary_search(x).is_err()).unwrap();
                        let mut f = flag.clone();
                        f.push(nxt);
                        let mut o = order.clone();
                        o.push(v);
                        stack.push((f, o));
                    }
                }
                cells.insert(s.clone(), chain);
            }
        }
        PolyDecomp { dim: n, cells }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `P_tuple` for a sorted nerve tuple (empty chain otherwise).
    pub fn cell(&self, tuple: &[u32]) -> Option<&Chain> {
        self.cells.get(tuple)
    }

    pub fn cells(&self, m: usize) -> impl Iterator<Item = (&Vec<u32>, &Chain)> {
        self.cells.iter().filter(move |(s, _)| s.len() == m + 1)
    }

    /// Tuples whose cell fails `dd = 0`.
    pub fn dd_failures(&self) -> Vec<Vec<u32>> {
        self.cells
            .iter()
            .filter(|(_, c)| !c.boundary().boundary().is_empty())
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Tuples whose cell fails the alternating-insertion boundary rule.
    pub fn insertion_failures(&self, cover: &Cover) -> Vec<Vec<u32>> {
        let mut bad = Vec::new();
        for (s, c) in &self.cells {
            let mut rhs = Chain::new();
            for b in 0..cover.num_charts() as u32 {
                if s.binary_search(&b).is_ok() {
                    continue;
                }
                let mut t = s.clone();
                let pos = t.partition_point(|x| *x < b);
                t.insert(pos, b);
                if let Some(cell) = self.cells.get(&t) {
                    rhs.add_chain(cell, sign_of(pos));
                }
            }
            if c.boundary() != rhs {
                bad.push(s.clone());
            }
        }
        bad
    }

    /// Sum of the top-dimensional cells, the fundamental cycle of `K`.
    pub fn fundamental_cycle(&self) -> Chain {
        let mut out = Chain::new();
        for (_, c) in self.cells(0) {
            out.add_chain(c, 1);
        }
        out
    }
}

/// Value of a Cech cochain on one nerve tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Local {
    /// Locally constant function (form degree 0).
    Constant(Rational),
    /// Simplicial cochain on `K_tuple`.
    Cochain(BTreeMap<Flag, Rational>),
}

/// Cech `q`-cochain with values in local `k`-forms (or integers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CechCochain {
    q: usize,
    k: usize,
    integral: bool,
    values: BTreeMap<Vec<u32>, Local>,
}

impl CechCochain {
    pub fn forms(q: usize, k: usize) -> Self {
        CechCochain { q, k, integral: false, values: BTreeMap::new() }
    }

    pub fn integral(q: usize) -> Self {
        CechCochain { q, k: 0, integral: true, values: BTreeMap::new() }
    }

    pub fn cech_degree(&self) -> usize {
        self.q
    }

    pub fn form_degree(&self) -> usize {
        self.k
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn values(&self) -> impl Iterator<Item = (&Vec<u32>, &Local)> {
        self.values.iter()
    }

    pub fn get(&self, tuple: &[u32]) -> Option<&Local> {
        self.values.get(tuple)
    }

    pub fn set_constant(&mut self, tuple: Vec<u32>, c: Rational) {
        debug_assert_eq!(tuple.len(), self.q + 1);
        if c.is_zero() {
            self.values.remove(&tuple);
        } else {
            self.values.insert(tuple, Local::Constant(c));
        }
    }

    pub fn set_value(&mut self, tuple: Vec<u32>, flag: Flag, c: Rational) {
        debug_assert_eq!(flag.len(), self.k + 1);
        let e = self.values.entry(tuple).or_insert_with(|| Local::Cochain(BTreeMap::new()));
        if let Local::Constant(_) = e {
            *e = Local::Cochain(BTreeMap::new());
        }
        if let Local::Cochain(m) = e {
            if c.is_zero() {
                m.remove(&flag);
            } else {
                m.insert(flag, c);
            }
        }
    }

    /// Value on a sorted nerve tuple and a flag of `K_tuple`.
    pub fn eval(&self, tuple: &[u32], flag: &[u32]) -> Rational {
        if flag.len() != self.k + 1 {
            return Rational::zero();
        }
        match self.values.get(tuple) {
            None => Rational::zero(),
            Some(Local::Constant(c)) => c.clone(),
            Some(Local::Cochain(m)) => m.get(flag).cloned().unwrap_or_else(Rational::zero),
        }
    }

    /// Value on an arbitrary ordered tuple via antisymmetric extension.
    pub fn eval_antisym(&self, tuple: &[u32], flag: &[u32]) -> Rational {
        match sort_tuple(tuple) {
            None => Rational::zero(),
            Some((t, s)) => self.eval(&t, flag) * int(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| match v {
            Local::Constant(c) => c.is_zero(),
            Local::Cochain(m) => m.values().all(|x| x.is_zero()),
        })
    }

    fn densify(&self, cover: &Cover, tuple: &[u32]) -> BTreeMap<Flag, Rational> {
        match self.values.get(tuple) {
            None => BTreeMap::new(),
            Some(Local::Cochain(m)) => m.clone(),
            Some(Local::Constant(c)) => cover
                .local_simplices(tuple, 0)
                .into_iter()
                .map(|f| (f, c.clone()))
                .collect(),
        }
    }

    /// Pointwise sum; both operands must have the same bidegree.
    pub fn add(&self, other: &CechCochain, cover: &Cover) -> CechCochain {
        assert_eq!((self.q, self.k), (other.q, other.k), "bidegree mismatch");
        let mut out = CechCochain {
            q: self.q,
            k: self.k,
            integral: self.integral && other.integral,
            values: BTreeMap::new(),
        };
        let keys: BTreeSet<&Vec<u32>> = self.values.keys().chain(other.values.keys()).collect();
        for t in keys {
            match (self.values.get(t), other.values.get(t)) {
                (Some(Local::Constant(a)), Some(Local::Constant(b))) => out.set_constant(t.clone(), a + b),
                (Some(Local::Constant(a)), None) | (None, Some(Local::Constant(a))) => {
                    out.set_constant(t.clone(), a.clone())
                }
                _ => {
                    let mut m = self.densify(cover, t);
                    for (f, v) in other.densify(cover, t) {
                        let e = m.entry(f).or_insert_with(Rational::zero);
                        *e += v;
                    }
                    m.retain(|_, v| !v.is_zero());
                    if !m.is_empty() {
                        out.values.insert(t.clone(), Local::Cochain(m));
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> CechCochain {
        let mut out = self.clone();
        out.integral = self.integral && c.is_integer();
        for v in out.values.values_mut() {
            match v {
                Local::Constant(x) => *x *= c,
                Local::Cochain(m) => {
                    for x in m.values_mut() {
                        *x *= c;
                    }
                }
            }
        }
        out.values.retain(|_, v| match v {
            Local::Constant(x) => !x.is_zero(),
            Local::Cochain(m) => {
                m.retain(|_, x| !x.is_zero());
                !m.is_empty()
            }
        });
        out
    }

    pub fn sub(&self, other: &CechCochain, cover: &Cover) -> CechCochain {
        self.add(&other.scale(&int(-1)), cover)
    }

    /// Cech coboundary `(delta c)_{a0..a(q+1)} = sum_i (-1)^i c_{..^ai..}`, restricted to `K_tuple`.
    pub fn delta(&self, cover: &Cover) -> CechCochain {
        let mut out = CechCochain { q: self.q + 1, k: self.k, integral: self.integral, values: BTreeMap::new() };
        for t in cover.nerve(self.q + 1) {
            let faces: Vec<(Vec<u32>, i64)> = (0..t.len())
                .map(|i| {
                    let mut f = t.clone();
                    f.remove(i);
                    (f, sign_of(i))
                })
                .collect();
            let present: Vec<&(Vec<u32>, i64)> = faces.iter().filter(|(f, _)| self.values.contains_key(f)).collect();
            if present.is_empty() {
                continue;
            }
            if present.iter().all(|(f, _)| matches!(self.values[f], Local::Constant(_))) {
                let mut acc = Rational::zero();
                for (f, s) in &present {
                    if let Local::Constant(c) = &self.values[f] {
                        acc += c * int(*s);
                    }
                }
                out.set_constant(t.clone(), acc);
                continue;
            }
            let mut m: BTreeMap<Flag, Rational> = BTreeMap::new();
            for (f, s) in &present {
                match &self.values[f] {
                    Local::Constant(c) => {
                        for v in cover.local_simplices(t, 0) {
                            *m.entry(v).or_insert_with(Rational::zero) += c * int(*s);
                        }
                    }
                    Local::Cochain(vals) => {
                        for (fl, v) in vals {
                            if cover.flag_in(fl, t) {
                                *m.entry(fl.clone()).or_insert_with(Rational::zero) += v * int(*s);
                            }
                        }
                    }
                }
            }
            m.retain(|_, v| !v.is_zero());
            if !m.is_empty() {
                out.values.insert(t.clone(), Local::Cochain(m));
            }
        }
        out
    }

    /// Simplicial coboundary on each `K_tuple`.
    pub fn d(&self, cover: &Cover) -> CechCochain {
        let mut out = CechCochain::forms(self.q, self.k + 1);
        for (t, v) in &self.values {
            let Local::Cochain(vals) = v else { continue };
            let mut m = BTreeMap::new();
            for s in cover.local_simplices(t, self.k + 1) {
                let mut acc = Rational::zero();
                for i in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(i);
                    if let Some(x) = vals.get(&f) {
                        acc += x * int(sign_of(i));
                    }
                }
                if !acc.is_zero() {
                    m.insert(s, acc);
                }
            }
            if !m.is_empty() {
                out.values.insert(t.clone(), Local::Cochain(m));
            }
        }
        out
    }

    /// Alexander-Whitney product of two integral cochains on the nerve.
    pub fn cech_cup(&self, other: &CechCochain, cover: &Cover) -> CechCochain {
        assert!(self.integral && other.integral, "cech_cup expects integral cochains");
        let q = self.q + other.q;
        let mut out = CechCochain::integral(q);
        for t in cover.nerve(q) {
            let a = self.eval(&t[..=self.q], &[0]);
            let b = other.eval(&t[self.q..], &[0]);
            out.set_constant(t.clone(), a * b);
        }
        out
    }

    /// Random local forms with small rational values on every simplex of every `K_tuple`.
    pub fn random_forms<R: Rng>(cover: &Cover, q: usize, k: usize, rng: &mut R) -> Self {
        let mut c = CechCochain::forms(q, k);
        for t in cover.nerve(q) {
            let mut m = BTreeMap::new();
            for s in cover.local_simplices(t, k) {
                let v = rat(rng.random_range(-4i64..=4), rng.random_range(1i64..=3));
                if !v.is_zero() {
                    m.insert(s, v);
                }
            }
            if !m.is_empty() {
                c.values.insert(t.clone(), Local::Cochain(m));
            }
        }
        c
    }

    /// Random integer constants on every nerve tuple.
    pub fn random_integral<R: Rng>(cover: &Cover, q: usize, rng: &mut R) -> Self {
        let mut c = CechCochain::integral(q);
        for t in cover.nerve(q) {
            c.set_constant(t.clone(), int(rng.random_range(-3i64..=3)));
        }
        c
    }
}

/// Element of the Cech-de Rham bicomplex, indexed by `(cech degree, form degree)`.
#[derive(Debug, Clone, Default)]
pub struct TotalCochain {
    comps: BTreeMap<(usize, usize), CechCochain>,
}

impl TotalCochain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, c: CechCochain, cover: &Cover) {
        let key = (c.q, c.k);
        let merged = match self.comps.remove(&key) {
            Some(old) => old.add(&c, cover),
            None => c,
        };
        self.comps.insert(key, merged);
    }

    pub fn component(&self, m: usize, k: usize) -> Option<&CechCochain> {
        self.comps.get(&(m, k))
    }

    pub fn components(&self) -> impl Iterator<Item = &CechCochain> {
        self.comps.values()
    }

    /// `D = delta + (-1)^m d`.
    pub fn d_total(&self, cover: &Cover) -> TotalCochain {
        let mut out = TotalCochain::new();
        for ((m, _), c) in &self.comps {
            out.insert(c.delta(cover), cover);
            if c.k < cover.dim() {
                out.insert(c.d(cover).scale(&int(sign_of(*m))), cover);
            }
        }
        out
    }
}

/// Value of a product of single-bidegree factors on a nerve tuple and a flag.
pub fn eval_product(factors: &[&CechCochain], tuple: &[u32], flag: &[u32]) -> Rational {
    let mq: usize = factors.iter().map(|c| c.q).sum();
    let mk: usize = factors.iter().map(|c| c.k).sum();
    if mq + 1 != tuple.len() || mk + 1 != flag.len() {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    let (mut a, mut b) = (0, 0);
    let mut sign = 1i64;
    for (i, c) in factors.iter().enumerate() {
        let v = c.eval(&tuple[a..=a + c.q], &flag[b..=b + c.k]);
        if v.is_zero() {
            return v;
        }
        acc *= v;
        let later: usize = factors[i + 1..].iter().map(|x| x.q).sum();
        sign *= sign_of(c.k * later);
        a += c.q;
        b += c.k;
    }
    acc * int(sign)
}

/// `<P, x> = sum_m (-1)^{m(m+1)/2} sum_s <P_s, x_s^{(m, n-m)}>`.
pub fn pair(decomp: &PolyDecomp, x: &TotalCochain) -> Rational {
    let n = decomp.dim();
    let mut acc = Rational::zero();
    for m in 0..=n {
        let Some(c) = x.component(m, n - m) else { continue };
        let mut level = Rational::zero();
        for (s, cell) in decomp.cells(m) {
            level += cell.pair(|f| c.eval(s, f));
        }
        acc += level * int(tri_sign(m));
    }
    acc
}

/// Pairing of a single product term.
pub fn pair_product(decomp: &PolyDecomp, factors: &[&CechCochain]) -> Result<Rational, DbError> {
    let n = decomp.dim();
    let m: usize = factors.iter().map(|c| c.q).sum();
    let k: usize = factors.iter().map(|c| c.k).sum();
    if m + k != n {
        return Err(DbError::DimensionMismatch { expected: n, found: m + k });
    }
    let mut acc = Rational::zero();
    for (s, cell) in decomp.cells(m) {
        acc += cell.pair(|f| eval_product(factors, s, f));
    }
    Ok(acc * int(tri_sign(m)))
}

/// Deligne-Beilinson cocycle `(A, Gamma, Upsilon)` of degree 2.
#[derive(Debug, Clone)]
pub struct DBClass {
    pub connection: CechCochain,
    pub gamma: CechCochain,
    pub upsilon: CechCochain,
}

/// One nonzero entry of a residual cochain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub tuple: Vec<u32>,
    pub flag: Option<Flag>,
    pub value: Rational,
}

fn residual_list(c: &CechCochain) -> Vec<Residual> {
    let mut out = Vec::new();
    for (t, v) in c.values() {
        match v {
            Local::Constant(x) if !x.is_zero() => {
                out.push(Residual { tuple: t.clone(), flag: None, value: x.clone() })
            }
            Local::Cochain(m) => {
                for (f, x) in m {
                    if !x.is_zero() {
                        out.push(Residual { tuple: t.clone(), flag: Some(f.clone()), value: x.clone() });
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Residuals of the three cocycle conditions.
#[derive(Debug, Clone)]
pub struct CocycleReport {
    /// `A_b - A_a - d Gamma_ab`.
    pub connection: Vec<Residual>,
    /// `(delta Gamma)_abc - Upsilon_abc`.
    pub transition: Vec<Residual>,
    /// `(delta Upsilon)_abcd`.
    pub integral: Vec<Residual>,
    /// Upsilon takes integer values.
    pub upsilon_integral: bool,
    /// `g = exp(-2 pi i Gamma)` satisfies the cocycle property: `delta Gamma` is a
    /// locally constant integer on every triple.
    pub transition_cocycle: bool,
}

impl CocycleReport {
    pub fn is_cocycle(&self) -> bool {
        self.connection.is_empty()
            && self.transition.is_empty()
            && self.integral.is_empty()
            && self.upsilon_integral
            && self.transition_cocycle
    }
}

impl DBClass {
    pub fn zero() -> Self {
        DBClass {
            connection: CechCochain::forms(0, 1),
            gamma: CechCochain::forms(1, 0),
            upsilon: CechCochain::integral(2),
        }
    }

    pub fn new(connection: CechCochain, gamma: CechCochain, upsilon: CechCochain) -> Result<Self, DbError> {
        let want = [((0, 1), &connection, "connection"), ((1, 0), &gamma, "gamma"), ((2, 0), &upsilon, "upsilon")];
        for ((q, k), c, name) in want {
            if (c.q, c.k) != (q, k) {
                return Err(DbError::InvalidCochain(alloc::format!(
                    "{name} has bidegree ({}, {}), expected ({q}, {k})",
                    c.q,
                    c.k
                )));
            }
        }
        Ok(DBClass { connection, gamma, upsilon })
    }

    /// Class with the given integral 2-cocycle, built from the partition of unity:
    /// `Gamma_ab = sum_c xi_c Upsilon_abc`, `A_a = sum_c xi_c cup d Gamma_ca`.
    pub fn from_integral_cocycle(cover: &Cover, upsilon: &CechCochain) -> Self {
        let charts = cover.num_charts() as u32;
        let mut gamma = CechCochain::forms(1, 0);
        for e in cover.nerve(1) {
            for v in cover.local_simplices(e, 0) {
                let mut acc = Rational::zero();
                for c in 0..charts {
                    let x = cover.xi(c, v[0]);
                    if !x.is_zero() {
                        acc += x * upsilon.eval_antisym(&[e[0], e[1], c], &[0]);
                    }
                }
                gamma.set_value(e.clone(), v, acc);
            }
        }
        let mut conn = CechCochain::forms(0, 1);
        for a in cover.nerve(0) {
            for s in cover.local_simplices(a, 1) {
                let mut acc = Rational::zero();
                for c in 0..charts {
                    let x = cover.xi(c, s[0]);
                    if x.is_zero() {
                        continue;
                    }
                    let g1 = gamma.eval_antisym(&[c, a[0]], &s[1..]);
                    let g0 = gamma.eval_antisym(&[c, a[0]], &s[..1]);
                    acc += x * (g1 - g0);
                }
                conn.set_value(a.clone(), s, acc);
            }
        }
        DBClass { connection: conn, gamma, upsilon: upsilon.clone() }
    }

    /// Add a globally defined 1-cochain to every local connection form.
    pub fn with_global_connection(&self, cover: &Cover, g: &BTreeMap<Flag, Rational>) -> Self {
        let mut add = CechCochain::forms(0, 1);
        for a in cover.nerve(0) {
            for s in cover.local_simplices(a, 1) {
                if let Some(v) = g.get(&s) {
                    add.set_value(a.clone(), s, v.clone());
                }
            }
        }
        DBClass { connection: self.connection.add(&add, cover), ..self.clone() }
    }

    pub fn curvature(&self, cover: &Cover) -> CechCochain {
        self.connection.d(cover)
    }

    /// `a = A + Gamma` as a total cochain of degree 1.
    pub fn total(&self, cover: &Cover) -> TotalCochain {
        let mut t = TotalCochain::new();
        t.insert(self.connection.clone(), cover);
        t.insert(self.gamma.clone(), cover);
        t
    }

    pub fn cocycle_check(&self, cover: &Cover) -> CocycleReport {
        let r1 = self.connection.delta(cover).sub(&self.gamma.d(cover), cover);
        let dg = self.gamma.delta(cover);
        let r2 = dg.sub(&self.upsilon, cover);
        let r3 = self.upsilon.delta(cover);
        let upsilon_integral = self.upsilon.values().all(|(_, v)| match v {
            Local::Constant(c) => c.is_integer(),
            Local::Cochain(m) => m.values().all(|x| x.is_integer()),
        });
        let mut transition_cocycle = true;
        for t in cover.nerve(2) {
            let vals: Vec<Rational> =
                cover.local_simplices(t, 0).iter().map(|v| dg.eval(t, v)).collect();
            let first = vals.first().cloned().unwrap_or_else(Rational::zero);
            if !first.is_integer() || vals.iter().any(|x| *x != first) {
                transition_cocycle = false;
            }
        }
        CocycleReport {
            connection: residual_list(&r1),
            transition: residual_list(&r2),
            integral: residual_list(&r3),
            upsilon_integral,
            transition_cocycle,
        }
    }

    /// `A_a += d f_a`, `Gamma_ab += f_b - f_a`.
    pub fn local_gauge(&self, cover: &Cover, f: &CechCochain) -> Result<Self, DbError> {
        if (f.q, f.k) != (0, 0) {
            return Err(DbError::InvalidGaugeData("local gauge data must be a Cech 0-cochain of functions".into()));
        }
        Ok(DBClass {
            connection: self.connection.add(&f.d(cover), cover),
            gamma: self.gamma.add(&f.delta(cover), cover),
            upsilon: self.upsilon.clone(),
        })
    }

    /// `Gamma_ab += z_ab`, `Upsilon += delta z`, with `z` integral.
    pub fn large_gauge(&self, cover: &Cover, z: &CechCochain) -> Result<Self, DbError> {
        if (z.q, z.k) != (1, 0) {
            return Err(DbError::InvalidGaugeData("large gauge data must be a Cech 1-cochain".into()));
        }
        for (t, v) in z.values() {
            let ok = match v {
                Local::Constant(c) => c.is_integer(),
                Local::Cochain(_) => false,
            };
            if !ok {
                return Err(DbError::InvalidGaugeData(alloc::format!(
                    "z on {t:?} is not a locally constant integer"
                )));
            }
        }
        let mut zf = z.clone();
        zf.integral = false;
        Ok(DBClass {
            connection: self.connection.clone(),
            gamma: self.gamma.add(&zf, cover),
            upsilon: self.upsilon.add(&z.delta(cover), cover),
        })
    }
}

/// Background integral cocycle `theta` with its partition-of-unity descendants
/// `tau = sum_e theta_{..e} xi_e` and `chi = -sum_c xi_c cup d tau_{..c}`.
#[derive(Debug, Clone)]
pub struct BackgroundCocycle {
    pub theta: CechCochain,
    pub tau: Option<CechCochain>,
    pub chi: Option<CechCochain>,
}

impl BackgroundCocycle {
    pub fn new(cover: &Cover, theta: CechCochain) -> Result<Self, DbError> {
        if !theta.integral {
            return Err(DbError::InvalidCochain("theta must be integral".into()));
        }
        let p = theta.q;
        let charts = cover.num_charts() as u32;
        let tau = (p >= 1).then(|| {
            let mut tau = CechCochain::forms(p - 1, 0);
            for s in cover.nerve(p - 1) {
                for v in cover.local_simplices(s, 0) {
                    let mut acc = Rational::zero();
                    for e in 0..charts {
                        let x = cover.xi(e, v[0]);
                        if x.is_zero() {
                            continue;
                        }
                        let mut t = s.clone();
                        t.push(e);
                        acc += x * theta.eval_antisym(&t, &[0]);
                    }
                    tau.set_value(s.clone(), v, acc);
                }
            }
            tau
        });
        let chi = match (&tau, p >= 2) {
            (Some(tau), true) => {
                let dtau = tau.d(cover);
                let mut chi = CechCochain::forms(p - 2, 1);
                for s in cover.nerve(p - 2) {
                    for e in cover.local_simplices(s, 1) {
                        let mut acc = Rational::zero();
                        for c in 0..charts {
                            let x = cover.xi(c, e[0]);
                            if x.is_zero() {
                                continue;
                            }
                            let mut t = s.clone();
                            t.push(c);
                            acc -= x * dtau.eval_antisym(&t, &e);
                        }
                        chi.set_value(s.clone(), e, acc);
                    }
                }
                Some(chi)
            }
            _ => None,
        };
        Ok(BackgroundCocycle { theta, tau, chi })
    }

    pub fn degree(&self) -> usize {
        self.theta.q
    }

    /// Residuals of the two defining relations, recomputed independently of the
    /// stored `tau` and `chi`:
    /// `chi_s + sum_c xi_c cup d tau_{s c} = 0` and `tau_s - sum_e theta_{s e} xi_e = 0`.
    pub fn relation_residuals(&self, cover: &Cover) -> (Vec<Residual>, Vec<Residual>) {
        let charts = cover.num_charts() as u32;
        let mut chi_res = Vec::new();
        let mut tau_res = Vec::new();
        if let Some(tau) = &self.tau {
            for s in cover.nerve(tau.q) {
                for v in cover.local_simplices(s, 0) {
                    let mut r = tau.eval(s, &v);
                    for e in 0..charts {
                        let mut t = s.clone();
                        t.push(e);
                        r -= self.theta.eval_antisym(&t, &[0]) * cover.xi(e, v[0]);
                    }
                    if !r.is_zero() {
                        tau_res.push(Residual { tuple: s.clone(), flag: Some(v), value: r });
                    }
                }
            }
            if let Some(chi) = &self.chi {
                for s in cover.nerve(chi.q) {
                    for e in cover.local_simplices(s, 1) {
                        let mut r = chi.eval(s, &e);
                        for c in 0..charts {
                            let x = cover.xi(c, e[0]);
                            if x.is_zero() {
                                continue;
                            }
                            let mut t = s.clone();
                            t.push(c);
                            let d = tau.eval_antisym(&t, &e[1..]) - tau.eval_antisym(&t, &e[..1]);
                            r += x * d;
                        }
                        if !r.is_zero() {
                            chi_res.push(Residual { tuple: s.clone(), flag: Some(e), value: r });
                        }
                    }
                }
            }
        }
        (chi_res, tau_res)
    }
}

/// Ladder pattern: `k` classes of degree 2 against a background of Cech degree
/// `p` on a closed `dim`-dimensional complex, `dim = p + 2k - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pattern {
    pub dim: usize,
    pub p: usize,
    pub k: usize,
}

impl Pattern {
    pub fn check(&self) -> Result<(), DbError> {
        let want = self.p + 2 * self.k;
        if self.k == 0 || want != self.dim + 1 {
            return Err(DbError::DimensionMismatch { expected: self.dim + 1, found: want });
        }
        Ok(())
    }
}

/// Values of the action terms.
///
/// `ladder[2(j-1)]` is the connection part and `ladder[2j-1]` the transition part
/// of `s_j <P, R_j a_j Q_j theta>`, where `R_j = U_1 ... U_{j-1}` (integral
/// cocycles), `Q_j = F_{j+1} ... F_k` (curvatures) and `s_j = (-1)^{j-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTerms {
    pub ladder: Vec<Rational>,
    /// `-<P, chi F_1 ... F_k>`.
    pub chi_term: Rational,
    /// `+<P, tau F_1 ... F_k>`.
    pub tau_term: Rational,
}

impl ActionTerms {
    pub fn ladder_sum(&self) -> Rational {
        self.ladder.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn total(&self) -> Rational {
        self.ladder_sum() + &self.chi_term + &self.tau_term
    }

    pub fn total_mod_lattice(&self) -> Rational {
        mod_lattice(&self.total())
    }
}

/// Representative in `[0, 1)`.
pub fn mod_lattice(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn action_terms(
    cover: &Cover,
    decomp: &PolyDecomp,
    classes: &[DBClass],
    bg: &BackgroundCocycle,
) -> Result<ActionTerms, DbError> {
    let pattern = Pattern { dim: decomp.dim(), p: bg.degree(), k: classes.len() };
    pattern.check()?;
    let k = classes.len();
    let curv: Vec<CechCochain> = classes.iter().map(|c| c.curvature(cover)).collect();
    let mut ladder = Vec::with_capacity(2 * k);
    for j in 0..k {
        let s = int(sign_of(j));
        for part in [&classes[j].connection, &classes[j].gamma] {
            let mut f: Vec<&CechCochain> = classes[..j].iter().map(|c| &c.upsilon).collect();
            f.push(part);
            f.extend(curv[j + 1..].iter());
            f.push(&bg.theta);
            ladder.push(pair_product(decomp, &f)? * &s);
        }
    }
    let chi_term = match &bg.chi {
        Some(chi) => {
            let mut f = vec![chi];
            f.extend(curv.iter());
            -pair_product(decomp, &f)?
        }
        None => Rational::zero(),
    };
    let tau_term = match &bg.tau {
        Some(tau) => {
            let mut f = vec![tau];
            f.extend(curv.iter());
            pair_product(decomp, &f)?
        }
        None => Rational::zero(),
    };
    Ok(ActionTerms { ladder, chi_term, tau_term })
}

pub fn action_total(
    cover: &Cover,
    decomp: &PolyDecomp,
    classes: &[DBClass],
    bg: &BackgroundCocycle,
) -> Result<Rational, DbError> {
    Ok(action_terms(cover, decomp, classes, bg)?.total())
}

/// Gauge transformation applied to one class.
#[derive(Debug, Clone)]
pub enum GaugeData {
    Local { class: usize, f: CechCochain },
    Large { class: usize, z: CechCochain },
}

pub fn apply_gauge(cover: &Cover, classes: &[DBClass], g: &GaugeData) -> Result<Vec<DBClass>, DbError> {
    let mut out = classes.to_vec();
    let idx = match g {
        GaugeData::Local { class, .. } | GaugeData::Large { class, .. } => *class,
    };
    let target = out
        .get(idx)
        .ok_or_else(|| DbError::InvalidGaugeData(alloc::format!("no class with index {idx}")))?;
    out[idx] = match g {
        GaugeData::Local { f, .. } => target.local_gauge(cover, f)?,
        GaugeData::Large { z, .. } => target.large_gauge(cover, z)?,
    };
    Ok(out)
}

/// `S(after) - S(before)` for the transformed classes.
pub fn gauge_variation(
    cover: &Cover,
    decomp: &PolyDecomp,
    classes: &[DBClass],
    bg: &BackgroundCocycle,
    g: &GaugeData,
) -> Result<Rational, DbError> {
    let after = apply_gauge(cover, classes, g)?;
    Ok(action_total(cover, decomp, &after, bg)? - action_total(cover, decomp, classes, bg)?)
}

/// Which branch of the Deligne-Beilinson cup product degree table applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CupCase {
    /// One factor sits at degree `weight + 1`: target `(q+t, l+j+1)`.
    Same,
    /// One factor is purely topological: target `(q+t-1, l+j+1)`.
    Shifted,
    /// Both factors topological: target `(q+t, l+j+1)`, isomorphic to integral cohomology.
    Integral,
    /// Product vanishes.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CupTarget {
    pub case: CupCase,
    pub degree: usize,
    pub weight: usize,
}

impl CupTarget {
    /// `H^n_DB(X, Z(n-1))` of a closed oriented `n`-manifold is `R/Z`.
    pub fn is_circle_valued(&self, dim: usize) -> bool {
        self.case != CupCase::Zero && self.degree == dim && self.weight + 1 == dim
    }
}

/// Target of `H^q(Z(l)) x H^t(Z(j))` under the cup product.
pub fn cup_degree(q: usize, l: usize, t: usize, j: usize) -> CupTarget {
    let w = l + j + 1;
    let case = if (q == l + 1 && t <= j + 1) || (t == j + 1 && q <= l + 1) {
        CupCase::Same
    } else if (q >= l + 2 && t <= j + 1) || (t >= j + 2 && q <= l + 1) {
        CupCase::Shifted
    } else if q >= l + 2 && t >= j + 2 {
        CupCase::Integral
    } else {
        CupCase::Zero
    };
    match case {
        CupCase::Same | CupCase::Integral => CupTarget { case, degree: q + t, weight: w },
        CupCase::Shifted => CupTarget { case, degree: q + t - 1, weight: w },
        CupCase::Zero => CupTarget { case, degree: 0, weight: 0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complexes() {
        let s = Cover::sphere(3);
        assert_eq!(s.num_charts(), 5);
        assert_eq!(s.num_simplices(), 30);
        let t = Cover::kuhn_torus(3, 3);
        assert_eq!(t.num_charts(), 27);
        let counts: Vec<usize> = (0..4).map(|m| t.nerve(m).count()).collect();
        assert_eq!(counts, vec![27, 189, 324, 162]);
        assert!(Cover::from_oriented_tops(&[vec![0, 1, 2], vec![0, 1, 3]]).is_err());
    }

    #[test]
    fn decomposition_boundaries() {
        for cover in [Cover::sphere(3), Cover::sphere(2), Cover::kuhn_torus(2, 3)] {
            let p = PolyDecomp::build(&cover);
            assert!(p.dd_failures().is_empty());
            assert!(p.insertion_failures(&cover).is_empty());
            assert!(p.fundamental_cycle().boundary().is_empty());
        }
    }

    #[test]
    fn delta_squared() {
        let cover = Cover::sphere(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (q, k) in [(0, 0), (0, 1), (1, 1), (1, 2)] {
            let c = CechCochain::random_forms(&cover, q, k, &mut rng);
            assert!(c.delta(&cover).delta(&cover).is_zero());
            assert!(c.d(&cover).d(&cover).is_zero());
        }
        let z = CechCochain::random_integral(&cover, 1, &mut rng);
        assert!(z.delta(&cover).delta(&cover).is_zero());
        let f = CechCochain::random_forms(&cover, 0, 0, &mut rng);
        let df = f.delta(&cover);
        for e in cover.nerve(1) {
            for v in cover.local_simplices(e, 0) {
                assert_eq!(df.eval(e, &v), f.eval(&e[1..], &v) - f.eval(&e[..1], &v));
            }
        }
    }

    #[test]
    fn stokes_pairing() {
        let cover = Cover::sphere(3);
        let p = PolyDecomp::build(&cover);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut y = TotalCochain::new();
        for m in 0..3 {
            y.insert(CechCochain::random_forms(&cover, m, 2 - m, &mut rng), &cover);
        }
        assert!(pair(&p, &y.d_total(&cover)).is_zero());
    }

    #[test]
    fn class_construction_and_gauge() {
        let cover = Cover::kuhn_torus(3, 3);
        let p = PolyDecomp::build(&cover);
        let ux = kuhn_winding(&cover, 3, 0);
        let uy = kuhn_winding(&cover, 3, 1);
        assert!(ux.delta(&cover).is_zero());
        let ups = ux.cech_cup(&uy, &cover);
        assert!(ups.delta(&cover).is_zero());
        let a = DBClass::from_integral_cocycle(&cover, &ups);
        assert!(a.cocycle_check(&cover).is_cocycle());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = DBClass::from_integral_cocycle(&cover, &CechCochain::integral(2));
        let b = b.local_gauge(&cover, &CechCochain::random_forms(&cover, 0, 0, &mut rng)).unwrap();
        let mut theta = CechCochain::integral(0);
        for v in cover.nerve(0) {
            theta.set_constant(v.clone(), int(1));
        }
        let bg = BackgroundCocycle::new(&cover, theta).unwrap();
        let classes = vec![a, b];
        let f = CechCochain::random_forms(&cover, 0, 0, &mut rng);
        let g = GaugeData::Local { class: 0, f };
        assert!(gauge_variation(&cover, &p, &classes, &bg, &g).unwrap().is_zero());
        let z = CechCochain::random_integral(&cover, 1, &mut rng);
        let v = gauge_variation(&cover, &p, &classes, &bg, &GaugeData::Large { class: 0, z }).unwrap();
        assert!(v.is_integer());
    }

    #[test]
    fn bad_gauge_rejected() {
        let cover = Cover::sphere(3);
        let mut z = CechCochain::integral(1);
        z.set_constant(vec![0, 1], rat(1, 2));
        assert!(matches!(DBClass::zero().large_gauge(&cover, &z), Err(DbError::InvalidGaugeData(_))));
    }

    #[test]
    fn cup_table() {
        assert_eq!(cup_degree(2, 1, 2, 1), CupTarget { case: CupCase::Same, degree: 4, weight: 3 });
        let abc = cup_degree(4, 3, 2, 1);
        assert_eq!((abc.degree, abc.weight), (6, 5));
        let full = cup_degree(3, 1, abc.degree, abc.weight);
        assert_eq!((full.degree, full.weight), (8, 7));
        assert!(full.is_circle_valued(8));
        assert_eq!(cup_degree(0, 1, 0, 1).case, CupCase::Zero);
        assert_eq!(cup_degree(3, 0, 3, 0).case, CupCase::Integral);
    }

    #[test]
    fn pattern_mismatch() {
        let cover = Cover::sphere(3);
        let p = PolyDecomp::build(&cover);
        let bg = BackgroundCocycle::new(&cover, CechCochain::integral(1)).unwrap();
        let r = action_terms(&cover, &p, &[DBClass::zero(), DBClass::zero()], &bg);
        assert!(matches!(r, Err(DbError::DimensionMismatch { .. })));
    }
}
