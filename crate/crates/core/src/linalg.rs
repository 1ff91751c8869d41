//! Dense exact linear algebra over any field (row reduction, rank, kernels).

use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub trait Field:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Field for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
{
}

/// Reduces `rows` in place to reduced row echelon form and returns the pivot columns.
pub fn rref<F: Field>(rows: &mut Vec<Vec<F>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = F::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in c..ncols {
                let v = rows[r][j].clone() * f.clone();
                rows[i][j] = rows[i][j].clone() - v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank<F: Field>(rows: &[Vec<F>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : A x = 0}` for `A` given by rows of length `ncols`.
pub fn nullspace<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = alloc::vec![F::zero(); ncols];
        v[free] = F::one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `A x = b`, or `None` when the system is inconsistent.
pub fn solve<F: Field>(rows: &[Vec<F>], rhs: &[F], ncols: usize) -> Option<Vec<F>> {
    let mut m: Vec<Vec<F>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = alloc::vec![F::zero(); ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

pub fn mat_vec<F: Field>(rows: &[Vec<F>], v: &[F]) -> Vec<F> {
    rows.iter()
        .map(|r| r.iter().zip(v).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).fold(F::zero(), |acc, (x, brow)| acc + x.clone() * brow[j].clone()))
                .collect()
        })
        .collect()
}

pub fn transpose<F: Clone>(a: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Whether `v` lies in the row span of `rows`.
pub fn in_span<F: Field>(rows: &[Vec<F>], v: &[F]) -> bool {
    let mut m = rows.to_vec();
    let r0 = rref(&mut m).len();
    m.push(v.to_vec());
    rank(&m) == r0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{int, Rational};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let k = nullspace(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&a, &k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn inconsistent_system() {
        let a = m(&[&[1, 1], &[1, 1]]);
        assert!(solve(&a, &[int(1), int(2)], 2).is_none());
        let x = solve(&a, &[int(3), int(3)], 2).unwrap();
        assert_eq!(mat_vec(&a, &x), alloc::vec![int(3), int(3)]);
    }
}
