//! Combinatorial primitives: subsets in lexicographic order, extended
//! binomial coefficients, Stirling numbers, falling factorials and the scalar
//! generating functions `psi` and `xi` whose values are the entries of the
//! polynomial matrices `F` and `X`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exactalg::{Poly, Rat, Ring};

/// Binomial coefficient with the extended conventions
/// `C(n, k) = 0` for `k < 0` and `C(n, k) = (-1)^k C(k - n - 1, k)` for `n < 0`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if n < 0 {
        let c = binomial(k - n - 1, k);
        return if k % 2 == 0 { c } else { -c };
    }
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(n, k)` as a rational.
pub fn binomial_rat(n: i64, k: i64) -> Rat {
    Rat::from_integer(binomial(n, k))
}

/// Ordinary binomial in `u64`, `None` on overflow.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Stirling numbers of the second kind `S(n, k)`.
pub fn stirling2(n: usize, k: usize) -> BigInt {
    stirling_table(n, false)[k.min(n + 1)].clone()
}

/// Signed Stirling numbers of the first kind `s(n, k)`.
pub fn stirling1(n: usize, k: usize) -> BigInt {
    stirling_table(n, true)[k.min(n + 1)].clone()
}

// Row n of the triangle, padded with a trailing zero so that any k > n maps to it.
fn stirling_table(n: usize, first_kind: bool) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for m in 0..n {
        let mut next = vec![BigInt::zero(); m + 2];
        for (k, slot) in next.iter_mut().enumerate() {
            let stay = if k <= m { row[k].clone() } else { BigInt::zero() };
            let from_below = if k >= 1 { row[k - 1].clone() } else { BigInt::zero() };
            let factor = if first_kind { -BigInt::from(m) } else { BigInt::from(k) };
            *slot = factor * stay + from_below;
        }
        row = next;
    }
    row.push(BigInt::zero());
    row
}

/// Falling factorial `(x)_n = x (x - 1) ... (x - n + 1)` over any ring that
/// contains the integers, with `(x)_0 = 1`.
pub fn falling_factorial<T: Ring + FromInt>(x: &T, n: i64) -> Result<T> {
    if n < 0 {
        return Err(invalid(format!("falling factorial of negative length {n}")));
    }
    let mut acc = T::one();
    for i in 0..n {
        acc = acc.mul_ref(&x.sub_ref(&T::from_int(i)));
    }
    Ok(acc)
}

/// Embedding of the integers into a ring.
pub trait FromInt {
    fn from_int(n: i64) -> Self;
}

impl FromInt for Rat {
    fn from_int(n: i64) -> Self {
        Rat::from_integer(n.into())
    }
}

impl FromInt for BigInt {
    fn from_int(n: i64) -> Self {
        BigInt::from(n)
    }
}

impl FromInt for Poly {
    fn from_int(n: i64) -> Self {
        Poly::from_int(n)
    }
}

/// `psi_{theta,t}(z) = sum_{i=0}^{t} C(theta, i) z^i`, the entry of `F^t` at
/// intersection size `theta`.
pub fn psi(theta: i64, t: i64) -> Poly {
    Poly::new((0..=t.max(-1)).map(|i| binomial_rat(theta, i)).collect())
}

/// `xi^k_{theta,t}(z) = sum_i C(theta, i) / C(k - i, t - i) z^i`, the entry of
/// `X^k_{st}` at intersection size `theta`. Requires `0 <= theta <= t <= k`.
pub fn xi(theta: i64, t: i64, k: i64) -> Result<Poly> {
    if !(0 <= theta && theta <= t && t <= k) {
        return Err(invalid(format!("xi needs 0 <= theta <= t <= k, got theta={theta} t={t} k={k}")));
    }
    Ok(Poly::new(
        (0..=theta)
            .map(|i| Rat::new(binomial(theta, i), binomial(k - i, t - i)))
            .collect(),
    ))
}

/// Closed form for `xi^k_{theta,t}(-1)`:
/// `(-1)^theta (k - t) / ((k - t + theta) C(k, t - theta))`, taking the value 1
/// at `(k - t, theta) = (0, 0)` where the factor `k - t` cancels.
pub fn xi_at_minus_one(theta: i64, t: i64, k: i64) -> Result<Rat> {
    if !(0 <= theta && theta <= t && t <= k) {
        return Err(invalid(format!("xi needs 0 <= theta <= t <= k, got theta={theta} t={t} k={k}")));
    }
    if k == t && theta == 0 {
        return Ok(Rat::one());
    }
    let sign = if theta % 2 == 0 { 1 } else { -1 };
    Ok(Rat::new(
        BigInt::from(sign * (k - t)),
        BigInt::from(k - t + theta) * binomial(k, t - theta),
    ))
}

/// An `s`-subset of `{1, ..., v}`, stored as a strictly increasing list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    elements: Vec<u32>,
}

impl Subset {
    pub fn new(elements: Vec<u32>) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) || elements.first() == Some(&0) {
            return Err(Error::MalformedSubset(format!("{elements:?}")));
        }
        Ok(Subset { elements })
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Bit `x - 1` is set for each element `x`.
    pub fn mask(&self) -> u64 {
        self.elements.iter().fold(0, |m, &x| m | (1u64 << (x - 1)))
    }

    pub fn from_mask(mask: u64) -> Self {
        Subset {
            elements: (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect(),
        }
    }

    pub fn intersection_size(&self, other: &Subset) -> u32 {
        (self.mask() & other.mask()).count_ones()
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// All `s`-subsets of `{1, ..., v}` in lexicographic order of their sorted
/// element lists.
///
/// The first `C(v-1, s-1)` members contain the element 1 and the remaining
/// `C(v-1, s)` do not, which is what makes the recursive block decompositions work.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetFamily {
    pub v: u32,
    pub s: u32,
}

/// Largest ground set supported by the bitmask representation.
pub const MAX_V: u32 = 63;

impl SubsetFamily {
    pub fn new(v: u32, s: u32) -> Result<Self> {
        if v > MAX_V {
            return Err(invalid(format!("ground set size {v} exceeds {MAX_V}")));
        }
        if s > v {
            return Err(invalid(format!("subset size {s} exceeds ground set size {v}")));
        }
        Ok(SubsetFamily { v, s })
    }

    pub fn size(&self) -> u64 {
        binomial_u64(self.v as u64, self.s as u64).expect("family size fits in u64")
    }

    /// Number of leading members that contain the element 1.
    pub fn containing_one(&self) -> u64 {
        if self.s == 0 {
            0
        } else {
            binomial_u64(self.v as u64 - 1, self.s as u64 - 1).unwrap()
        }
    }

    pub fn rank(&self, subset: &Subset) -> Result<u64> {
        let el = subset.elements();
        if el.len() != self.s as usize || el.last().is_some_and(|&x| x > self.v) {
            return Err(Error::MalformedSubset(format!(
                "{subset:?} is not a {}-subset of 1..={}",
                self.s, self.v
            )));
        }
        let (v, s) = (self.v as u64, self.s as u64);
        let mut rank = 0u64;
        let mut prev = 0u64;
        for (i, &c) in el.iter().enumerate() {
            let c = c as u64;
            for x in prev + 1..c {
                rank += binomial_u64(v - x, s - i as u64 - 1).unwrap();
            }
            prev = c;
        }
        Ok(rank)
    }

    pub fn unrank(&self, mut rank: u64) -> Result<Subset> {
        let size = self.size();
        if rank >= size {
            return Err(Error::RankOutOfRange { rank, size });
        }
        let (v, s) = (self.v as u64, self.s as u64);
        let mut out = Vec::with_capacity(s as usize);
        let mut x = 1u64;
        for i in 0..s {
            loop {
                let block = binomial_u64(v - x, s - i - 1).unwrap();
                if rank < block {
                    break;
                }
                rank -= block;
                x += 1;
            }
            out.push(x as u32);
            x += 1;
        }
        Subset::new(out)
    }

    /// Members as bitmasks, in order.
    pub fn masks(&self) -> Vec<u64> {
        let (v, s) = (self.v as usize, self.s as usize);
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            out.push(idx.iter().fold(0u64, |m, &b| m | 1 << b));
            // advance to the next combination in lex order
            let Some(i) = (0..s).rev().find(|&i| idx[i] < v - s + i) else {
                return out;
            };
            idx[i] += 1;
            for j in i + 1..s {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> {
        self.masks().into_iter().map(Subset::from_mask)
    }

    /// The family of complements, `(v - s)`-subsets.
    pub fn complement(&self) -> SubsetFamily {
        SubsetFamily { v: self.v, s: self.v - self.s }
    }
}

impl fmt::Display for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P_{}({})", self.s, self.v)
    }
}

/// Permutation sending the rank of `S` in `fam` to the rank of `{1..v} \ S` in
/// the complementary family.
pub fn complement_perm(fam: SubsetFamily) -> Vec<usize> {
    let full = if fam.v == 64 { u64::MAX } else { (1u64 << fam.v) - 1 };
    let comp = fam.complement();
    let comp_masks = comp.masks();
    let index: std::collections::HashMap<u64, usize> =
        comp_masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    fam.masks().iter().map(|m| index[&(full & !m)]).collect()
}
