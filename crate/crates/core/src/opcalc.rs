//! The `zD` operator calculus: expressions `sum_r c_r z^r D^r` with
//! `D = d/dz`, their composition, and their action on polynomial matrices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::build;
use crate::combinat::{binomial, binomial_rat, falling_factorial, stirling2};
use crate::error::{invalid, Error, Result};
use crate::exactalg::{rat_to_string, Poly, PolyMatrix, Rat};

/// `sum_r c_r z^r D^r`, stored without zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    terms: BTreeMap<u32, Rat>,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

impl OperatorExpr {
    pub fn zero() -> Self {
        OperatorExpr::default()
    }

    pub fn identity() -> Self {
        OperatorExpr::term(Rat::one(), 0)
    }

    /// `c z^r D^r`
    pub fn term(c: Rat, r: u32) -> Self {
        OperatorExpr::from_terms([(r, c)])
    }

    pub fn constant(c: Rat) -> Self {
        OperatorExpr::term(c, 0)
    }

    /// The Euler operator `zD`.
    pub fn zd() -> Self {
        OperatorExpr::term(Rat::one(), 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, Rat)>) -> Self {
        let mut out = BTreeMap::new();
        for (r, c) in terms {
            *out.entry(r).or_insert_with(Rat::zero) += c;
        }
        out.retain(|_, c: &mut Rat| !c.is_zero());
        OperatorExpr { terms: out }
    }

    pub fn terms(&self) -> &BTreeMap<u32, Rat> {
        &self.terms
    }

    pub fn coeff(&self, r: u32) -> Rat {
        self.terms.get(&r).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, o: &Self) -> Self {
        OperatorExpr::from_terms(self.terms.iter().chain(&o.terms).map(|(&r, c)| (r, c.clone())))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        OperatorExpr::from_terms(self.terms.iter().map(|(&r, x)| (r, x * c)))
    }

    /// `self ∘ o`, normalized with
    /// `(z^a D^a)(z^b D^b) = sum_j C(a, j) (b)_j z^(a+b-j) D^(a+b-j)`.
    pub fn compose(&self, o: &Self) -> Self {
        let mut out = Vec::new();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &o.terms {
                for j in 0..=a.min(b) {
                    let ff = falling_factorial(&Rat::from_integer(b.into()), j as i64).expect("j >= 0");
                    out.push((a + b - j, ca * cb * binomial_rat(a as i64, j as i64) * ff));
                }
            }
        }
        OperatorExpr::from_terms(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(OperatorExpr::identity(), |acc, _| acc.compose(self))
    }

    /// Action on a polynomial: `z^m` maps to `(sum_r c_r (m)_r) z^m`.
    pub fn apply_poly(&self, p: &Poly) -> Poly {
        let coeffs = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(m, a)| {
                let mr = Rat::from_integer(BigInt::from(m));
                let factor: Rat = self
                    .terms
                    .iter()
                    .map(|(&r, c)| c * falling_factorial(&mr, r as i64).expect("r >= 0"))
                    .sum();
                a * factor
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn apply(&self, m: &PolyMatrix) -> PolyMatrix {
        m.map(|p| self.apply_poly(p))
    }
}

impl fmt::Debug for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&r, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let op = match r {
                0 => String::new(),
                1 => "zD".to_string(),
                _ => format!("z^{r}D^{r}"),
            };
            if r == 0 {
                write!(f, "{}", rat_to_string(&mag))?;
            } else if mag.is_one() {
                write!(f, "{op}")?;
            } else {
                write!(f, "{}{op}", rat_to_string(&mag))?;
            }
        }
        Ok(())
    }
}

/// `(zD)^n = sum_k S(n, k) z^k D^k`.
pub fn zd_power(n: u32) -> OperatorExpr {
    OperatorExpr::from_terms((1..=n).map(|k| (k, Rat::from_integer(stirling2(n as usize, k as usize)))))
        .add(&if n == 0 { OperatorExpr::identity() } else { OperatorExpr::zero() })
}

/// `(zD)_n = z^n D^n`.
pub fn zd_falling(n: u32) -> OperatorExpr {
    OperatorExpr::term(Rat::one(), n)
}

/// `(zD - k)_n = n! sum_r C(n + k - r - 1, n - r) (-1)^(n-r) z^r D^r / r!`.
pub fn zd_shifted_falling(k: i64, n: u32) -> OperatorExpr {
    let nf = Rat::from_integer(factorial(n));
    OperatorExpr::from_terms((0..=n).map(|r| {
        let sign = if (n - r) % 2 == 0 { 1 } else { -1 };
        let c = binomial(n as i64 + k - r as i64 - 1, (n - r) as i64) * sign;
        (r, &nf * Rat::new(c, factorial(r)))
    }))
}

/// `(zD - k)(zD - k - 1) ... (zD - k - n + 1)` by explicit composition.
pub fn zd_shifted_falling_composed(k: i64, n: u32) -> OperatorExpr {
    (0..n as i64).fold(OperatorExpr::identity(), |acc, j| {
        acc.compose(&OperatorExpr::zd().sub(&OperatorExpr::constant(Rat::from_integer((k + j).into()))))
    })
}

fn check_l(s: u32, i: u32) -> Result<()> {
    if i > s {
        Err(invalid(format!("L(s, i) needs i <= s, got s={s} i={i}")))
    } else {
        Ok(())
    }
}

/// `L_{si} = sum_{r=0}^{s-i} (-1)^r C(s - r, i) z^r D^r / r!`, the operator with
/// `W_{is}^T F^t_{ik} = L_{si} F^t_{sk}`.
pub fn l_op(s: u32, i: u32) -> Result<OperatorExpr> {
    check_l(s, i)?;
    Ok(OperatorExpr::from_terms((0..=s - i).map(|r| {
        let sign = if r % 2 == 0 { 1 } else { -1 };
        (r, Rat::new(binomial((s - r) as i64, i as i64) * sign, factorial(r)))
    })))
}

/// `L_{si}` as the product `(s - zD)(s - 1 - zD) ... (i + 1 - zD) / (s - i)!`.
pub fn l_op_product(s: u32, i: u32) -> Result<OperatorExpr> {
    check_l(s, i)?;
    let prod = (i + 1..=s).rev().fold(OperatorExpr::identity(), |acc, m| {
        acc.compose(&OperatorExpr::constant(Rat::from_integer(m.into())).sub(&OperatorExpr::zd()))
    });
    Ok(prod.scale(&Rat::new(BigInt::one(), factorial(s - i))))
}

/// `L_{si}` through the shifted falling factorial: `(-1)^(s-i) (zD - i - 1)_{s-i} / (s - i)!`.
pub fn l_op_falling(s: u32, i: u32) -> Result<OperatorExpr> {
    check_l(s, i)?;
    let sign = if (s - i) % 2 == 0 { 1 } else { -1 };
    Ok(zd_shifted_falling(i as i64 + 1, s - i).scale(&Rat::new(sign.into(), factorial(s - i))))
}

/// Multiply every entry by `(z + 1)^e`; negative `e` divides exactly.
pub fn times_z_plus_one_pow(m: &PolyMatrix, e: i64) -> Result<PolyMatrix> {
    if e >= 0 {
        return Ok(m.mul_poly(&Poly::z_plus_one_pow(e as usize)));
    }
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for p in m.data() {
        out.push(p.div_z_plus_one_pow((-e) as usize).ok_or_else(|| {
            Error::OutsideHypotheses(format!("entry {p} is not divisible by (z+1)^{}", -e))
        })?);
    }
    PolyMatrix::new(m.rows(), m.cols(), out)?.with_families(m.row_family(), m.col_family())
}

fn check_wf(s: u32, j: u32, k: u32, v: u32) -> Result<()> {
    if !(s <= j && j <= v && k <= v) {
        return Err(invalid(format!("W_sj F_jk needs s <= j <= v and k <= v, got s={s} j={j} k={k} v={v}")));
    }
    Ok(())
}

/// `(z+1)^(j+k-v) sum_{r=0}^{j-s} (-1)^r C(v-s-r, v-j) z^r D^r / r! ((z+1)^(v-s-k) F_{sk})`,
/// the operator form of `W_{sj} F_{jk}`.
pub fn wf_operator_form(s: u32, j: u32, k: u32, v: u32) -> Result<PolyMatrix> {
    check_wf(s, j, k, v)?;
    let (si, ji, ki, vi) = (s as i64, j as i64, k as i64, v as i64);
    let op = OperatorExpr::from_terms((0..=j - s).map(|r| {
        let sign = if r % 2 == 0 { 1 } else { -1 };
        (r, Rat::new(binomial(vi - si - r as i64, vi - ji) * sign, factorial(r)))
    }));
    let inner = times_z_plus_one_pow(&build::f_full(s, k, v)?, vi - si - ki)?;
    times_z_plus_one_pow(&op.apply(&inner), ji + ki - vi)
}

/// `a_{p,l} = sum_{r=0}^{j-s} (-1)^r C(r, l) C(v-s-r, v-j) C(v-s-k, r-p)`.
///
/// The sign `(-1)^r` comes from expanding `(-z/(z+1))^r = (-1 + 1/(z+1))^r`;
/// without it the expansion below is wrong already for `W_{01} F_{10}(1)`.
pub fn a_pl(p: i64, l: i64, s: u32, j: u32, k: u32, v: u32) -> BigInt {
    a_pl_range(p, l, s, j, k, v, 0..=(j as i64 - s as i64), true)
}

/// The same sum without the alternating sign.
pub fn a_pl_unsigned(p: i64, l: i64, s: u32, j: u32, k: u32, v: u32) -> BigInt {
    a_pl_range(p, l, s, j, k, v, 0..=(j as i64 - s as i64), false)
}

/// The terms of `a_{p,l}` with `r < p`, which the extended binomial makes vanish.
pub fn a_pl_low_terms(p: i64, l: i64, s: u32, j: u32, k: u32, v: u32) -> BigInt {
    a_pl_range(p, l, s, j, k, v, 0..=(p - 1).min(j as i64 - s as i64), true)
}

fn a_pl_range(
    p: i64,
    l: i64,
    s: u32,
    j: u32,
    k: u32,
    v: u32,
    rs: std::ops::RangeInclusive<i64>,
    alternating: bool,
) -> BigInt {
    let (s, j, k, v) = (s as i64, j as i64, k as i64, v as i64);
    rs.map(|r| {
        let t = binomial(r, l) * binomial(v - s - r, v - j) * binomial(v - s - k, r - p);
        if alternating && r % 2 == 1 {
            -t
        } else {
            t
        }
    })
    .sum()
}

/// `sum_p (z+1)^p D^p F_{sk} / p! sum_l (-1)^l a_{p,l} (z+1)^(j-s-l)`, the
/// expanded form of `W_{sj} F_{jk}`.
pub fn wf_expansion(s: u32, j: u32, k: u32, v: u32) -> Result<PolyMatrix> {
    wf_expansion_with(s, j, k, v, a_pl)
}

/// [`wf_expansion`] with a caller-supplied coefficient `a_{p,l}`.
pub fn wf_expansion_with(
    s: u32,
    j: u32,
    k: u32,
    v: u32,
    coeff: fn(i64, i64, u32, u32, u32, u32) -> BigInt,
) -> Result<PolyMatrix> {
    check_wf(s, j, k, v)?;
    let f = build::f_full(s, k, v)?;
    let d = (j - s) as usize;
    let mut acc = PolyMatrix::zeros(f.rows(), f.cols()).with_families(f.row_family(), f.col_family())?;
    let mut deriv = f.clone();
    for p in 0..=d {
        let weight = (0..=d).fold(Poly::zero(), |w, l| {
            let sign = if l % 2 == 0 { 1 } else { -1 };
            let c = Rat::from_integer(coeff(p as i64, l as i64, s, j, k, v) * sign);
            w.add(&Poly::z_plus_one_pow(d - l).scale(&c))
        });
        let scale = Poly::z_plus_one_pow(p).scale(&Rat::new(BigInt::one(), factorial(p as u32)));
        acc = acc.add(&deriv.mul_poly(&scale.mul(&weight)))?;
        deriv = deriv.derive();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn op(terms: &[(u32, i64)]) -> OperatorExpr {
        OperatorExpr::from_terms(terms.iter().map(|&(r, c)| (r, rat(c))))
    }

    #[test]
    fn zd_squared() {
        assert_eq!(OperatorExpr::zd().compose(&OperatorExpr::zd()), op(&[(1, 1), (2, 1)]));
        assert_eq!(zd_power(3), op(&[(1, 1), (2, 3), (3, 1)]));
        assert_eq!(zd_power(0), OperatorExpr::identity());
    }

    #[test]
    fn falling_product_is_monomial() {
        let zd = OperatorExpr::zd();
        let prod = zd.compose(&zd.sub(&op(&[(0, 1)]))).compose(&zd.sub(&op(&[(0, 2)])));
        assert_eq!(prod, zd_falling(3));
        assert_eq!(zd_shifted_falling(0, 5), zd_falling(5));
    }

    #[test]
    fn identity_is_neutral_for_composition() {
        let p = op(&[(0, 2), (3, -1)]);
        assert_eq!(OperatorExpr::identity().compose(&p), p);
        assert_eq!(p.compose(&OperatorExpr::identity()), p);
    }

    #[test]
    fn l_operator_forms() {
        for s in 0..7 {
            assert_eq!(l_op(s, s).unwrap(), OperatorExpr::identity());
            if s > 0 {
                assert_eq!(l_op(s, s - 1).unwrap(), op(&[(0, s as i64), (1, -1)]));
            }
            for i in 0..=s {
                let l = l_op(s, i).unwrap();
                assert_eq!(l, l_op_product(s, i).unwrap(), "s={s} i={i}");
                assert_eq!(l, l_op_falling(s, i).unwrap(), "s={s} i={i}");
            }
        }
        let l20 = l_op(2, 0).unwrap();
        assert_eq!(l20.coeff(2), Rat::new(1.into(), 2.into()));
        assert_eq!(l20.to_string(), "1 - zD + 1/2z^2D^2");
        assert!(l_op(1, 2).is_err());
    }

    #[test]
    fn monomial_action() {
        for n in 0..=8u32 {
            for m in 0..=8usize {
                let z_m = Poly::monomial(Rat::one(), m);
                let ff = falling_factorial(&rat(m as i64), n as i64).unwrap();
                assert_eq!(zd_falling(n).apply_poly(&z_m), z_m.scale(&ff));
            }
        }
    }

    #[test]
    fn low_terms_of_a_vanish() {
        for v in 0..=8 {
            for k in 0..=v {
                for j in 0..=v {
                    for s in 0..=j {
                        for p in 0..=(j - s) as i64 {
                            for l in 0..=(j - s) as i64 {
                                assert!(a_pl_low_terms(p, l, s, j, k, v).is_zero());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn w_times_f_both_forms() {
        for v in 1..=6u32 {
            for k in 0..=v {
                for j in 0..=v {
                    for s in 0..=j {
                        let lhs = build::w(s, j, v).unwrap().to_poly().mul(&build::f_full(j, k, v).unwrap()).unwrap();
                        assert_eq!(wf_operator_form(s, j, k, v).unwrap(), lhs, "s={s} j={j} k={k} v={v}");
                        assert_eq!(wf_expansion(s, j, k, v).unwrap(), lhs, "s={s} j={j} k={k} v={v}");
                    }
                }
            }
        }
    }

    #[test]
    fn unsigned_coefficient_breaks_the_expansion() {
        let lhs = build::w(0, 1, 1).unwrap().to_poly().mul(&build::f_full(1, 0, 1).unwrap()).unwrap();
        assert_eq!(lhs.get(0, 0), &Poly::one());
        let bad = wf_expansion_with(0, 1, 0, 1, a_pl_unsigned).unwrap();
        assert_eq!(bad.get(0, 0), &Poly::from_ints([1, 2]));
    }

    fn arb_op() -> impl proptest::strategy::Strategy<Value = OperatorExpr> {
        use proptest::prelude::*;
        proptest::collection::vec((0u32..4, -3i64..4), 0..4)
            .prop_map(|ts| OperatorExpr::from_terms(ts.into_iter().map(|(r, c)| (r, rat(c)))))
    }

    proptest::proptest! {
        #[test]
        fn composition_is_associative(a in arb_op(), b in arb_op(), c in arb_op()) {
            proptest::prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        }

        #[test]
        fn composition_acts_in_turn(a in arb_op(), b in arb_op(), cs in proptest::collection::vec(-4i64..5, 0..7)) {
            let p = Poly::from_ints(cs);
            proptest::prop_assert_eq!(a.compose(&b).apply_poly(&p), a.apply_poly(&b.apply_poly(&p)));
        }
    }
}
