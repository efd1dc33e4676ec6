//! Exact and modular rank, and exact rational inversion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{IntMatrix, ModMatrix, Rat, RatMatrix};
use crate::error::{invalid, Error, Result};

/// Rank over `Q` by fraction-free (Bareiss) elimination.
pub fn rank_exact(m: &IntMatrix) -> usize {
    bareiss_rank(m.rows(), m.cols(), m.data().to_vec())
}

fn bareiss_rank(n: usize, m: usize, mut a: Vec<BigInt>) -> usize {
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..m {
        if rank == n {
            break;
        }
        let Some(pr) = (rank..n).find(|&r| !a[r * m + c].is_zero()) else { continue };
        if pr != rank {
            for j in 0..m {
                a.swap(pr * m + j, rank * m + j);
            }
        }
        let piv = a[rank * m + c].clone();
        for r in rank + 1..n {
            let lead = a[r * m + c].clone();
            for j in c + 1..m {
                let x = &piv * &a[r * m + j] - &lead * &a[rank * m + j];
                a[r * m + j] = x / &prev;
            }
            a[r * m + c] = BigInt::zero();
        }
        // Rows above the current pivot keep their scaling; only the running
        // divisor changes.
        prev = piv;
        rank += 1;
    }
    rank
}

/// Rank over `Q`; each row is scaled to integers first.
pub fn rank_exact_rat(m: &RatMatrix) -> usize {
    let cols = m.cols();
    let mut data = Vec::with_capacity(m.data().len());
    for i in 0..m.rows() {
        let row = m.row(i);
        let d = row.iter().fold(BigInt::one(), |d, x| d.lcm(x.denom()));
        data.extend(row.iter().map(|x| x.numer() * (&d / x.denom())));
    }
    bareiss_rank(m.rows(), cols, data)
}

fn check_prime(p: u64) -> Result<()> {
    if super::is_prime(p) {
        Ok(())
    } else {
        Err(invalid(format!("{p} is not prime")))
    }
}

/// Rank over `F_p`; a lower bound for the rank over `Q`.
pub fn rank_modp(m: &IntMatrix, p: u64) -> Result<usize> {
    check_prime(p)?;
    Ok(ModMatrix::from_int(m, p)?.rank())
}

pub fn rank_modp_rat(m: &RatMatrix, p: u64) -> Result<usize> {
    check_prime(p)?;
    Ok(ModMatrix::from_rat(m, p)?.rank())
}

/// Exact inverse by Gauss-Jordan elimination.
pub fn inverse_rat(m: &RatMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("cannot invert a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut a: Vec<Vec<Rat>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<Rat>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    for c in 0..n {
        let pr = (c..n).find(|&r| !a[r][c].is_zero()).ok_or_else(|| invalid("matrix is singular"))?;
        a.swap(pr, c);
        inv.swap(pr, c);
        let pinv = a[c][c].recip();
        for j in 0..n {
            a[c][j] *= &pinv;
            inv[c][j] *= &pinv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                let (x, y) = (&a[c][j] * &f, &inv[c][j] * &f);
                a[r][j] -= x;
                inv[r][j] -= y;
            }
        }
    }
    RatMatrix::new(n, n, inv.into_iter().flatten().collect())?.with_families(m.col_family(), m.row_family())
}
