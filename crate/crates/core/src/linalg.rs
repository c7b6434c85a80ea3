//! Exact Gaussian elimination over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn to_rational(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|row| row.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
        .collect()
}

/// Row-reduces in place and returns the rank.
fn eliminate(m: &mut [Vec<BigRational>]) -> (usize, bool) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut odd_swaps = false;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            odd_swaps = !odd_swaps;
        }
        let pivot = m[rank][c].clone();
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &pivot;
            for k in c..cols {
                let d = &f * &m[rank][k];
                m[r][k] -= d;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    (rank, odd_swaps)
}

pub fn rank(m: &[Vec<BigRational>]) -> usize {
    let mut a = m.to_vec();
    eliminate(&mut a).0
}

/// Determinant of a square matrix.
pub fn det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "det of a non-square matrix");
    let mut a = m.to_vec();
    let (r, odd) = eliminate(&mut a);
    if r < n {
        return BigRational::zero();
    }
    let mut d = BigRational::one();
    for (i, row) in a.iter().enumerate() {
        d *= &row[i];
    }
    if odd {
        -d
    } else {
        d
    }
}
