//! Univariate polynomials in `z` with exact rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Rat, Ring};

/// A polynomial `c_0 + c_1 z + ... + c_d z^d`.
///
/// Coefficients are stored lowest degree first and trailing zeros are always
/// stripped, so two equal polynomials have identical representations. The zero
/// polynomial has an empty coefficient list and [`Poly::degree`] returns `None`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Poly::new(coeffs.into_iter().map(|c| Rat::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_int(c: impl Into<BigInt>) -> Self {
        Poly::constant(Rat::from_integer(c.into()))
    }

    /// `c z^n`
    pub fn monomial(c: Rat, n: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = c;
        Poly { coeffs }
    }

    /// The indeterminate `z`.
    pub fn z() -> Self {
        Poly::monomial(Rat::one(), 1)
    }

    /// `(z + 1)^n`, built from binomial coefficients.
    pub fn z_plus_one_pow(n: usize) -> Self {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut c = BigInt::one();
        for i in 0..=n {
            coeffs.push(Rat::from_integer(c.clone()));
            c = c * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// The constant term, if the polynomial has degree at most zero.
    pub fn as_constant(&self) -> Option<Rat> {
        self.is_constant().then(|| self.coeff(0))
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplication by `z^n`.
    pub fn shift_up(&self, n: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Formal derivative `d/dz`.
    pub fn derive(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn derive_n(&self, n: usize) -> Poly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derive();
        }
        p
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, a: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * a + c;
        }
        acc
    }

    /// Coefficients `a_l` with `p(z) = sum_l a_l (z - c)^l`.
    ///
    /// Computed by repeated synthetic division by `(z - c)`.
    pub fn shift_basis(&self, c: &Rat) -> Vec<Rat> {
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(work.len());
        while !work.is_empty() {
            // divide work by (z - c); remainder is work(c)
            let n = work.len();
            let mut q = vec![Rat::zero(); n - 1];
            let mut acc = Rat::zero();
            for i in (0..n).rev() {
                acc = &acc * c + &work[i];
                if i > 0 {
                    q[i - 1] = acc.clone();
                }
            }
            out.push(acc);
            work = q;
        }
        while out.last().is_some_and(|a| a.is_zero()) {
            out.pop();
        }
        out
    }

    /// Inverse of [`Poly::shift_basis`]: `sum_l a_l (z - c)^l`.
    pub fn from_shift_basis(a: &[Rat], c: &Rat) -> Poly {
        let lin = Poly::new(vec![-c.clone(), Rat::one()]);
        let mut acc = Poly::zero();
        for coef in a.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(coef.clone()));
        }
        acc
    }

    /// Exact division by `(z + 1)^n`; `None` when the division leaves a remainder.
    pub fn div_z_plus_one_pow(&self, n: usize) -> Option<Poly> {
        let minus_one = -Rat::one();
        let a = self.shift_basis(&minus_one);
        if a.iter().take(n).any(|x| !x.is_zero()) {
            return None;
        }
        let rest: Vec<Rat> = a.into_iter().skip(n).collect();
        Some(Poly::from_shift_basis(&rest, &minus_one))
    }

    pub fn pow(&self, n: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Coefficients as strings (`"p"` or `"p/q"`), lowest degree first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(super::rat_to_string).collect()
    }
}

impl std::ops::Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        Poly::add(&self, &o)
    }
}

impl std::ops::Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        Poly::mul(&self, &o)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::one()
    }
}

impl Ring for Poly {
    fn add_ref(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Poly::sub(self, o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
    fn neg_ref(&self) -> Self {
        Poly::neg(self)
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mag_s = super::rat_to_string(&mag);
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag_s}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag_s}z")?,
                (_, true) => write!(f, "z^{i}")?,
                (_, false) => write!(f, "{mag_s}z^{i}")?,
            }
        }
        Ok(())
    }
}
