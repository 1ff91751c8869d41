//! Direct-summation oracle for the Cech pairing and the ladder action.
//!
//! Everything here is rebuilt from the oriented top simplices: faces, flags of the
//! barycentric subdivision, dual cells (oriented by a barycentric determinant),
//! the Alexander-Whitney products, the curvature and the background descendants.
//! Library cochains are only read through `eval`.

use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use g2gauge::coeffring::{int, rat, Rational};
use g2gauge::dbcech::{BackgroundCocycle, CechCochain, Cover, DBClass};
use num_traits::{One, Signed, Zero};

type Simplex = Vec<u32>;
type OFlag = Vec<Simplex>;

/// A lazily evaluated cochain of bidegree `(q, k)`: a function of a sorted chart
/// tuple and a flag of simplices.
#[derive(Clone)]
pub struct Lazy<'a> {
    pub q: usize,
    pub k: usize,
    f: Rc<dyn Fn(&[u32], &[Simplex]) -> Rational + 'a>,
}

impl<'a> Lazy<'a> {
    fn new(q: usize, k: usize, f: impl Fn(&[u32], &[Simplex]) -> Rational + 'a) -> Self {
        Lazy { q, k, f: Rc::new(f) }
    }

    pub fn at(&self, t: &[u32], fl: &[Simplex]) -> Rational {
        (self.f)(t, fl)
    }
}

pub struct Oracle<'c> {
    cover: &'c Cover,
    n: usize,
    /// Sorted top simplex -> sign of its sorted vertex order.
    tops: BTreeMap<Simplex, i64>,
    faces: BTreeSet<Simplex>,
    cofaces: BTreeMap<Simplex, Vec<Simplex>>,
}

fn subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.contains(x))
}

fn perm_parity(v: &[u32]) -> Option<i64> {
    let mut s = 1;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                return None;
            }
            if v[i] > v[j] {
                s = -s;
            }
        }
    }
    Some(s)
}

fn sorted(v: &[u32]) -> Simplex {
    let mut w = v.to_vec();
    w.sort_unstable();
    w
}

fn det(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c].clone();
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for j in c..n {
                let v = &a[c][j] * &f;
                a[r][j] -= v;
            }
        }
    }
    d
}

fn tri(m: usize) -> i64 {
    if (m * (m + 1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

impl<'c> Oracle<'c> {
    /// `tops` lists each top simplex in an orientation-defining vertex order.
    pub fn new(cover: &'c Cover, tops: &[Vec<u32>]) -> Self {
        let n = tops[0].len() - 1;
        let mut tmap = BTreeMap::new();
        let mut faces = BTreeSet::new();
        for t in tops {
            let s = sorted(t);
            tmap.insert(s.clone(), perm_parity(t).unwrap());
            for mask in 1u32..(1 << s.len()) {
                faces.insert((0..s.len()).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect::<Simplex>());
            }
        }
        let mut cofaces: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
        for a in &faces {
            let up: Vec<Simplex> = faces.iter().filter(|b| b.len() > a.len() && subset(a, b)).cloned().collect();
            cofaces.insert(a.clone(), up);
        }
        Oracle { cover, n, tops: tmap, faces, cofaces }
    }

    /// Flags of length `len` whose first simplex contains `t`.
    pub fn flags(&self, t: &[u32], len: usize) -> Vec<OFlag> {
        let mut out = Vec::new();
        for s in self.faces.iter().filter(|s| subset(t, s)) {
            self.grow(&mut vec![s.clone()], len, &mut out);
        }
        out
    }

    fn grow(&self, cur: &mut OFlag, len: usize, out: &mut Vec<OFlag>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for nx in &self.cofaces[cur.last().unwrap()] {
            cur.push(nx.clone());
            self.grow(cur, len, out);
            cur.pop();
        }
    }

    pub fn nerve(&self, m: usize) -> impl Iterator<Item = &Simplex> {
        self.faces.iter().filter(move |s| s.len() == m + 1)
    }

    /// Orientation of the `n`-simplex spanned by the directions of `t` and the
    /// barycenters along `flag`, relative to the oriented top simplex of the flag.
    fn geometric_sign(&self, t: &[u32], flag: &[Simplex]) -> i64 {
        let top = flag.last().unwrap();
        let pos = |v: u32| top.iter().position(|&w| w == v).unwrap();
        let bary = |s: &Simplex| -> Vec<Rational> {
            let mut x = vec![Rational::zero(); self.n + 1];
            for &v in s {
                x[pos(v)] = rat(1, s.len() as i64);
            }
            x
        };
        let mut rows = Vec::new();
        for &v in &t[1..] {
            let mut x = vec![Rational::zero(); self.n + 1];
            x[pos(v)] += Rational::one();
            x[pos(t[0])] -= Rational::one();
            rows.push(x);
        }
        let b0 = bary(&flag[0]);
        for s in &flag[1..] {
            rows.push(bary(s).iter().zip(&b0).map(|(a, b)| a - b).collect());
        }
        let m: Vec<Vec<Rational>> = rows.into_iter().map(|r| r[1..].to_vec()).collect();
        let d = det(m);
        assert!(!d.is_zero(), "degenerate dual simplex");
        (if d.is_positive() { 1 } else { -1 }) * self.tops[top]
    }

    /// The dual cell of the chart tuple `t`: maximal flags starting at `t`.
    pub fn cell(&self, t: &[u32]) -> Vec<(OFlag, i64)> {
        let m = t.len() - 1;
        let mut out = Vec::new();
        let mut stack = vec![vec![t.to_vec()]];
        while let Some(fl) = stack.pop() {
            let last = fl.last().unwrap();
            if last.len() == self.n + 1 {
                out.push((fl.clone(), tri(m) * self.geometric_sign(t, &fl)));
                continue;
            }
            for nx in &self.cofaces[last] {
                if nx.len() == last.len() + 1 {
                    let mut f = fl.clone();
                    f.push(nx.clone());
                    stack.push(f);
                }
            }
        }
        out
    }

    /// `sum_m (-1)^{m(m+1)/2} sum_t <cell(t), x_t>` for `x` of total degree `n`.
    pub fn pair(&self, x: &Lazy) -> Rational {
        assert_eq!(x.q + x.k, self.n);
        let mut acc = Rational::zero();
        for t in self.nerve(x.q) {
            for (fl, c) in self.cell(t) {
                acc += x.at(t, &fl) * int(c);
            }
        }
        acc * int(tri(x.q))
    }

    /// Sum of `geometric_sign * x` over all top flags starting at a vertex.
    pub fn integrate_global(&self, x: impl Fn(&[Simplex]) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for top in self.tops.keys() {
            let mut stack: Vec<OFlag> = top.iter().map(|&v| vec![vec![v]]).collect();
            while let Some(fl) = stack.pop() {
                let last = fl.last().unwrap();
                if last.len() == self.n + 1 {
                    acc += x(&fl) * int(self.geometric_sign(&fl[0], &fl));
                    continue;
                }
                for &v in top {
                    if !last.contains(&v) {
                        let mut f = fl.clone();
                        f.push(sorted(&[last.as_slice(), &[v]].concat()));
                        stack.push(f);
                    }
                }
            }
        }
        acc
    }

    pub fn ids(&self, fl: &[Simplex]) -> Vec<u32> {
        fl.iter().map(|s| self.cover.id(s).expect("face of the cover")).collect()
    }

    pub fn read<'a>(&'a self, c: &'a CechCochain) -> Lazy<'a> {
        Lazy::new(c.cech_degree(), c.form_degree(), move |t, fl| {
            if fl.len() != c.form_degree() + 1 {
                return Rational::zero();
            }
            c.eval(t, &self.ids(fl))
        })
    }

    pub fn d<'a>(x: &Lazy<'a>) -> Lazy<'a> {
        let x = x.clone();
        Lazy::new(x.q, x.k + 1, move |t, fl| {
            let mut acc = Rational::zero();
            for i in 0..fl.len() {
                let mut f = fl.to_vec();
                f.remove(i);
                let v = x.at(t, &f);
                acc += if i % 2 == 0 { v } else { -v };
            }
            acc
        })
    }

    /// `(x u y)_{a0..a(p+q)}(f0..f(k+l)) = (-1)^{k q} x_{a0..ap}(f0..fk) y_{ap..}(fk..)`.
    pub fn cup<'a>(x: &Lazy<'a>, y: &Lazy<'a>) -> Lazy<'a> {
        let (x, y) = (x.clone(), y.clone());
        let sign = if x.k * y.q % 2 == 0 { 1 } else { -1 };
        Lazy::new(x.q + y.q, x.k + y.k, move |t, fl| {
            let a = x.at(&t[..=x.q], &fl[..=x.k]);
            if a.is_zero() {
                return a;
            }
            a * y.at(&t[x.q..], &fl[x.k..]) * int(sign)
        })
    }

    pub fn xi(chart: u32, v: &Simplex) -> Rational {
        if v.contains(&chart) {
            rat(1, v.len() as i64)
        } else {
            Rational::zero()
        }
    }

    fn antisym(x: &Lazy, t: &[u32], fl: &[Simplex]) -> Rational {
        match perm_parity(t) {
            None => Rational::zero(),
            Some(s) => x.at(&sorted(t), fl) * int(s),
        }
    }

    pub fn tau<'a>(&self, theta: &Lazy<'a>) -> Lazy<'a> {
        let theta = theta.clone();
        let charts = self.cover.num_charts() as u32;
        Lazy::new(theta.q - 1, 0, move |t, fl| {
            let mut acc = Rational::zero();
            for e in 0..charts {
                let x = Self::xi(e, &fl[0]);
                if !x.is_zero() {
                    acc += x * Self::antisym(&theta, &[t, &[e]].concat(), &[vec![e]]);
                }
            }
            acc
        })
    }

    pub fn chi<'a>(&self, tau: &Lazy<'a>) -> Lazy<'a> {
        let tau = tau.clone();
        let charts = self.cover.num_charts() as u32;
        Lazy::new(tau.q - 1, 1, move |t, fl| {
            let mut acc = Rational::zero();
            for c in 0..charts {
                let x = Self::xi(c, &fl[0]);
                if x.is_zero() {
                    continue;
                }
                let tc = [t, &[c]].concat();
                acc -= x * (Self::antisym(&tau, &tc, &fl[1..]) - Self::antisym(&tau, &tc, &fl[..1]));
            }
            acc
        })
    }
}

/// Oracle values of the ladder, chi and tau terms.
pub struct OracleTerms {
    pub ladder: Vec<Rational>,
    pub chi_term: Rational,
    pub tau_term: Rational,
}

/// Pairing of the left-nested product `((f0 u f1) u f2) ...`.
pub fn pair_product(o: &Oracle, fs: &[Lazy]) -> Rational {
    let mut acc = fs[0].clone();
    for f in &fs[1..] {
        acc = Oracle::cup(&acc, f);
    }
    o.pair(&acc)
}

/// `sum_j (-1)^(j-1) <U_1..U_(j-1) (A_j + Gamma_j) F_(j+1)..F_k theta> - <chi F..> + <tau F..>`.
pub fn action(o: &Oracle, classes: &[DBClass], bg: &BackgroundCocycle) -> OracleTerms {
    let theta = o.read(&bg.theta);
    let ups: Vec<Lazy> = classes.iter().map(|c| o.read(&c.upsilon)).collect();
    let conn: Vec<Lazy> = classes.iter().map(|c| o.read(&c.connection)).collect();
    let gam: Vec<Lazy> = classes.iter().map(|c| o.read(&c.gamma)).collect();
    let curv: Vec<Lazy> = conn.iter().map(Oracle::d).collect();
    let k = classes.len();
    let mut ladder = Vec::new();
    for j in 0..k {
        for part in [&conn[j], &gam[j]] {
            let mut fs: Vec<Lazy> = ups[..j].to_vec();
            fs.push(part.clone());
            fs.extend(curv[j + 1..].iter().cloned());
            fs.push(theta.clone());
            let v = pair_product(o, &fs);
            ladder.push(if j % 2 == 0 { v } else { -v });
        }
    }
    let (mut chi_term, mut tau_term) = (Rational::zero(), Rational::zero());
    if bg.theta.cech_degree() >= 1 {
        let tau = o.tau(&theta);
        let mut fs = vec![tau.clone()];
        fs.extend(curv.iter().cloned());
        tau_term = pair_product(o, &fs);
        if bg.theta.cech_degree() >= 2 {
            let mut fs = vec![o.chi(&tau)];
            fs.extend(curv.iter().cloned());
            chi_term = -pair_product(o, &fs);
        }
    }
    OracleTerms { ladder, chi_term, tau_term }
}
