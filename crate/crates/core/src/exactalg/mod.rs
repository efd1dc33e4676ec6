//! Exact dense linear algebra over the integers, the rationals, polynomials
//! with rational coefficients, and prime fields.

mod matrix;
mod modp;
mod poly;
mod rank;

pub use matrix::{equiv_check, IntMatrix, Matrix, Mismatch, PolyMatrix, RatMatrix};
pub use modp::{is_prime, random_prime, Montgomery, ModMatrix};
pub use poly::Poly;
pub use rank::{inverse_rat, rank_exact, rank_exact_rat, rank_modp, rank_modp_rat};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational, always in lowest terms with positive denominator.
pub type Rat = BigRational;

/// Minimal ring interface shared by matrix entry types.
pub trait Ring: Clone + PartialEq + std::fmt::Debug + Send + Sync + Zero + One {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// Human-readable form used in failure witnesses.
    fn to_text(&self) -> String;
}

impl Ring for BigInt {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Ring for Rat {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn to_text(&self) -> String {
        rat_to_string(self)
    }
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// `"p"` when the denominator is 1, otherwise `"p/q"`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rat::new(p.trim().parse().ok()?, q))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}
