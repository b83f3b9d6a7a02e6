//! Independent oracles and random instance generators shared by the
//! integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use itertools::Itertools;
use morse_core::{build_complex, CriticalPointId, IntMatrix, MorseComplex, SignedCount};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub type Dense = Vec<Vec<i64>>;

pub fn to_int(m: &Dense, rows: usize, cols: usize) -> IntMatrix {
    let entries = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| BigInt::from(m[r][c])))
        .collect();
    IntMatrix::from_entries(rows, cols, entries).unwrap()
}

pub fn big_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.get(r, c).clone()).collect())
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn laplace_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * laplace_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// gcd of all `k x k` minors; zero when every minor vanishes.
pub fn minor_gcd(m: &[Vec<BigInt>], rows: usize, cols: usize, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rs in (0..rows).combinations(k) {
        for cs in (0..cols).combinations(k) {
            let sub: Vec<Vec<BigInt>> = rs
                .iter()
                .map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect())
                .collect();
            g = g.gcd(&laplace_det(&sub));
        }
    }
    g
}

/// Invariant factors from determinantal divisors `D_k / D_{k-1}`.
pub fn invariant_factors(m: &[Vec<BigInt>], rows: usize, cols: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=rows.min(cols) {
        let d = minor_gcd(m, rows, cols, k);
        if d.is_zero() {
            break;
        }
        out.push(&d / &prev);
        prev = d;
    }
    out
}

/// Rank over the rationals by Gaussian elimination.
pub fn rational_rank(m: &[Vec<BigInt>], cols: usize) -> usize {
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for j in c..cols {
                    let t = &f * &a[rank][j];
                    a[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn int_rank(m: &IntMatrix) -> usize {
    rational_rank(&big_rows(m), m.cols())
}

/// Betti numbers from rational ranks of the boundary matrices.
pub fn rational_betti(c: &MorseComplex) -> Vec<usize> {
    let n = c.dimension();
    (0..=n)
        .map(|k| {
            let out = int_rank(&c.boundary(k));
            let inc = int_rank(&c.boundary(k + 1));
            c.generators(k).len() - out - inc
        })
        .collect()
}

/// Boundary matrices `d[k]: C_k -> C_{k-1}` (with `d[0]` empty) with
/// `d[k] d[k+1] = 0` and entries in `[-bound, bound]`.
///
/// Starts from block-structured matrices whose composites vanish and
/// conjugates by random elementary shears `I + s E_ij` in each degree.
pub fn random_boundaries<R: Rng>(rng: &mut R, sizes: &[usize], bound: i64) -> Vec<Dense> {
    let dim = sizes.len() - 1;
    loop {
        // killed[k]: degree-k generators sent to zero by d[k]
        let killed: Vec<Vec<bool>> = sizes
            .iter()
            .map(|&n| (0..n).map(|_| rng.random_bool(0.5)).collect())
            .collect();
        let mut d: Vec<Dense> = vec![Vec::new()];
        for k in 1..=dim {
            let m: Dense = (0..sizes[k - 1])
                .map(|r| {
                    (0..sizes[k])
                        .map(|c| {
                            let zero_col = killed[k][c];
                            let zero_row = k >= 2 && !killed[k - 1][r];
                            if zero_col || zero_row || rng.random_bool(0.3) {
                                0
                            } else {
                                rng.random_range(-bound..=bound)
                            }
                        })
                        .collect()
                })
                .collect();
            d.push(m);
        }
        for _ in 0..rng.random_range(0..6) {
            let k = rng.random_range(0..=dim);
            if sizes[k] < 2 {
                continue;
            }
            let i = rng.random_range(0..sizes[k]);
            let j = (i + rng.random_range(1..sizes[k])) % sizes[k];
            let s = if rng.random_bool(0.5) { 1 } else { -1 };
            // column j of d[k] -= s * column i
            if k >= 1 {
                for row in d[k].iter_mut() {
                    row[j] -= s * row[i];
                }
            }
            // row i of d[k+1] += s * row j
            if k < dim {
                let rj = d[k + 1][j].clone();
                for (x, y) in d[k + 1][i].iter_mut().zip(rj) {
                    *x += s * y;
                }
            }
        }
        if d.iter().flatten().flatten().all(|x| x.abs() <= bound) {
            return d;
        }
    }
}

pub fn label(k: usize, i: usize) -> String {
    format!("g{k}_{i}")
}

pub fn complex_from(sizes: &[usize], d: &[Dense]) -> MorseComplex {
    let dim = sizes.len() - 1;
    let gens = (0..=dim)
        .rev()
        .flat_map(|k| (0..sizes[k]).map(move |i| CriticalPointId::new(label(k, i), k)));
    let mut counts = Vec::new();
    for k in 1..=dim {
        for (r, row) in d[k].iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    counts.push(SignedCount::new(label(k, c), label(k - 1, r), v));
                }
            }
        }
    }
    build_complex(dim, gens.collect(), counts).unwrap()
}

pub fn random_complex<R: Rng>(rng: &mut R, max_dim: usize, max_gens: usize, bound: i64) -> MorseComplex {
    random_complex_from(rng, 0, max_dim, max_gens, bound)
}

pub fn random_complex_from<R: Rng>(
    rng: &mut R,
    min_dim: usize,
    max_dim: usize,
    max_gens: usize,
    bound: i64,
) -> MorseComplex {
    let dim = rng.random_range(min_dim..=max_dim);
    let sizes: Vec<usize> = (0..=dim).map(|_| rng.random_range(0..=max_gens)).collect();
    let d = random_boundaries(rng, &sizes, bound);
    complex_from(&sizes, &d)
}

pub fn is_unit(x: &BigInt) -> bool {
    x.abs().is_one()
}
