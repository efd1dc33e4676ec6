//! Prime-field arithmetic in Montgomery form and dense elimination mod `p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{IntMatrix, RatMatrix};
use crate::error::{invalid, Error, Result};

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &b in &BASES {
        let mut x = powmod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly drawn prime in `[2^(bits-1), 2^bits)`, `bits` in `3..=62`.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> u64 {
    assert!((3..=62).contains(&bits), "prime size must be 3..=62 bits");
    let lo = 1u64 << (bits - 1);
    loop {
        let c = rng.gen_range(lo..lo << 1) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Montgomery arithmetic modulo an odd `p < 2^62` with `R = 2^64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Montgomery {
    p: u64,
    neg_pinv: u64,
    r2: u64,
}

impl Montgomery {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p % 2 == 0 || p >= 1 << 62 {
            return Err(invalid(format!("modulus {p} must be odd and below 2^62")));
        }
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r1 = ((1u128 << 64) % p as u128) as u64;
        Ok(Montgomery { p, neg_pinv: inv.wrapping_neg(), r2: mulmod(r1, r1, p) })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_pinv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    pub fn to_mont(&self, x: u64) -> u64 {
        self.reduce(x as u128 * self.r2 as u128)
    }

    #[inline]
    pub fn from_mont(&self, x: u64) -> u64 {
        self.reduce(x as u128)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element, both in Montgomery form.
    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    /// Residue of an integer, in Montgomery form.
    pub fn from_i64(&self, x: i64) -> u64 {
        self.to_mont(x.rem_euclid(self.p as i64) as u64)
    }

    pub fn from_bigint(&self, x: &BigInt) -> u64 {
        if let Some(v) = x.to_i64() {
            return self.from_i64(v);
        }
        let r = x.mod_floor(&BigInt::from(self.p)).to_u64().expect("residue fits");
        self.to_mont(r)
    }
}

/// Dense matrix over `F_p`, entries kept in Montgomery form.
#[derive(Clone, Debug)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
    field: Montgomery,
}

impl ModMatrix {
    pub fn from_int(m: &IntMatrix, p: u64) -> Result<Self> {
        let field = Montgomery::new(p)?;
        let data = m.data().iter().map(|x| field.from_bigint(x)).collect();
        Ok(ModMatrix { rows: m.rows(), cols: m.cols(), data, field })
    }

    /// Fails when `p` divides some denominator.
    pub fn from_rat(m: &RatMatrix, p: u64) -> Result<Self> {
        let field = Montgomery::new(p)?;
        let mut data = Vec::with_capacity(m.data().len());
        for x in m.data() {
            let d = field.from_bigint(x.denom());
            if d == 0 {
                return Err(Error::PrimeDividesDenominator { p, denom: x.denom().to_string() });
            }
            data.push(field.mul(field.from_bigint(x.numer()), field.inv(d)));
        }
        Ok(ModMatrix { rows: m.rows(), cols: m.cols(), data, field })
    }

    pub fn from_fn(rows: usize, cols: usize, p: u64, f: impl Fn(usize, usize) -> i64) -> Result<Self> {
        let field = Montgomery::new(p)?;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(field.from_i64(f(i, j)));
            }
        }
        Ok(ModMatrix { rows, cols, data, field })
    }

    pub fn field(&self) -> Montgomery {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)` as a plain residue.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.field.from_mont(self.data[i * self.cols + j])
    }

    /// `self - c I` for a Montgomery-form scalar `c`.
    pub fn sub_scalar_identity(&self, c: u64) -> ModMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let idx = i * self.cols + i;
            m.data[idx] = self.field.sub(m.data[idx], c);
        }
        m
    }

    /// `self * x` with `x` and the result in Montgomery form.
    pub fn matvec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| if a == 0 { acc } else { f.add(acc, f.mul(a, b)) })
            })
            .collect()
    }

    /// Rank by row reduction; only nonzero pivot-row entries are propagated,
    /// which keeps sparse inputs cheap.
    pub fn rank(&self) -> usize {
        let (n, m) = (self.rows, self.cols);
        let f = self.field;
        let mut a = self.data.clone();
        let mut rank = 0;
        let mut nz: Vec<usize> = Vec::with_capacity(m);
        let mut pivot_row: Vec<u64> = vec![0; m];
        for c in 0..m {
            if rank == n {
                break;
            }
            let Some(pr) = (rank..n).find(|&r| a[r * m + c] != 0) else { continue };
            if pr != rank {
                for j in c..m {
                    a.swap(pr * m + j, rank * m + j);
                }
            }
            let inv = f.inv(a[rank * m + c]);
            nz.clear();
            for j in c + 1..m {
                let x = a[rank * m + j];
                if x != 0 {
                    let y = f.mul(x, inv);
                    pivot_row[j] = y;
                    nz.push(j);
                }
            }
            for r in rank + 1..n {
                let factor = a[r * m + c];
                if factor == 0 {
                    continue;
                }
                a[r * m + c] = 0;
                let row = &mut a[r * m..(r + 1) * m];
                for &j in &nz {
                    row[j] = f.sub(row[j], f.mul(factor, pivot_row[j]));
                }
            }
            rank += 1;
        }
        rank
    }
}
