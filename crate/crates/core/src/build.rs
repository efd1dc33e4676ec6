//! Entrywise constructors for the intersection-matrix families and their
//! recursive block decompositions.
//!
//! Every matrix here has entry `(S, K)` depending only on `theta = |S ∩ K|`,
//! so each builder computes a table indexed by `theta` and fills the matrix
//! from the bitmask intersections of the lex-ordered families.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::{binomial, psi, xi, SubsetFamily};
use crate::error::{invalid, Error, Result};
use crate::exactalg::{IntMatrix, Matrix, Mismatch, Poly, PolyMatrix, Rat, RatMatrix, Ring};

/// Family tag together with its own indices. `F { t: None }` is the full
/// generating matrix `F_{sk}` with `t = min(s, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Kind {
    W,
    Wbar,
    U { l: u32 },
    Uge { l: u32 },
    A { i: u32 },
    N { t: u32 },
    F { t: Option<u32> },
    Utl { t: u32, l: u32 },
    /// `X^k_{st}`, an `s x t` matrix.
    X { t: u32 },
    /// `Y^{kl}_{st}`, an `s x t` matrix.
    Y { t: u32, l: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixKind {
    #[serde(flatten)]
    pub kind: Kind,
    pub s: u32,
    pub k: u32,
    pub v: u32,
}

impl MatrixKind {
    pub fn new(kind: Kind, s: u32, k: u32, v: u32) -> Self {
        MatrixKind { kind, s, k, v }
    }

    pub fn row_family(&self) -> Result<SubsetFamily> {
        SubsetFamily::new(self.v, self.s)
    }

    pub fn col_family(&self) -> Result<SubsetFamily> {
        match self.kind {
            Kind::X { t } | Kind::Y { t, .. } => SubsetFamily::new(self.v, t),
            _ => SubsetFamily::new(self.v, self.k),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (s, k, v) = (self.s, self.k, self.v);
        if s > v || k > v {
            return Err(invalid(format!("need s, k <= v, got s={s} k={k} v={v}")));
        }
        self.row_family()?;
        match self.kind {
            Kind::Utl { t, l } if l > t => Err(invalid(format!("U^(t,l) needs l <= t, got t={t} l={l}"))),
            Kind::X { t } if t > k => Err(invalid(format!("X needs t <= k, got t={t} k={k}"))),
            Kind::Y { t, l } if t > k || l > t => {
                Err(invalid(format!("Y needs l <= t <= k, got t={t} l={l} k={k}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_square(&self) -> bool {
        match self.kind {
            Kind::X { t } | Kind::Y { t, .. } => self.s == t,
            _ => self.s == self.k,
        }
    }

    /// Short name used in documents, e.g. `"Utl"`.
    pub fn tag(&self) -> &'static str {
        match self.kind {
            Kind::W => "W",
            Kind::Wbar => "Wbar",
            Kind::U { .. } => "U",
            Kind::Uge { .. } => "Uge",
            Kind::A { .. } => "A",
            Kind::N { .. } => "N",
            Kind::F { .. } => "F",
            Kind::Utl { .. } => "Utl",
            Kind::X { .. } => "X",
            Kind::Y { .. } => "Y",
        }
    }
}

/// A built matrix in its natural entry ring.
#[derive(Clone, Debug, PartialEq)]
pub enum Built {
    Int(IntMatrix),
    Rat(RatMatrix),
    Poly(PolyMatrix),
}

impl Built {
    pub fn entry_type(&self) -> &'static str {
        match self {
            Built::Int(_) => "integer",
            Built::Rat(_) => "rational",
            Built::Poly(_) => "polynomial",
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            Built::Int(m) => m.rows(),
            Built::Rat(m) => m.rows(),
            Built::Poly(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Built::Int(m) => m.cols(),
            Built::Rat(m) => m.cols(),
            Built::Poly(m) => m.cols(),
        }
    }

    pub fn to_poly(&self) -> PolyMatrix {
        match self {
            Built::Int(m) => m.to_poly(),
            Built::Rat(m) => m.to_poly(),
            Built::Poly(m) => m.clone(),
        }
    }

    pub fn into_int(self) -> Option<IntMatrix> {
        match self {
            Built::Int(m) => Some(m),
            _ => None,
        }
    }
}

/// Fill a matrix over `rows x cols` from a table indexed by intersection size.
pub fn from_theta_table<T: Ring>(rows: SubsetFamily, cols: SubsetFamily, table: &[T]) -> Result<Matrix<T>> {
    let rm = rows.masks();
    let cm = cols.masks();
    let data: Vec<T> = rm
        .par_iter()
        .flat_map_iter(|&r| cm.iter().map(move |&c| table[(r & c).count_ones() as usize].clone()))
        .collect();
    Matrix::new(rm.len(), cm.len(), data)?.with_families(Some(rows), Some(cols))
}

fn int_table(n: u32, f: impl Fn(i64) -> BigInt) -> Vec<BigInt> {
    (0..=n as i64).map(f).collect()
}

fn ind(b: bool) -> BigInt {
    if b {
        BigInt::one()
    } else {
        BigInt::zero()
    }
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Entry of `U^{tl}` at intersection size `theta`:
/// `(-1)^(t-l) C(theta, l) C(theta - l - 1, t - l)`.
pub fn utl_entry(t: i64, l: i64, theta: i64) -> BigInt {
    sign(t - l) * binomial(theta, l) * binomial(theta - l - 1, t - l)
}

/// Numerator of the `Y` entries. Only `KMinusT` factors `U^{tl}` through `W_{tk}`;
/// the other form is kept so the factorization can be tested against both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum YNumerator {
    KMinusT,
    KMinusL,
}

impl YNumerator {
    pub fn label(&self) -> &'static str {
        match self {
            YNumerator::KMinusT => "(k-t)",
            YNumerator::KMinusL => "(k-l)",
        }
    }
}

/// Entry of `Y^{kl}_{st}` at intersection size `theta`. A vanishing
/// `C(theta, l)` gives 0; the indeterminate case `k = t, theta = l` gives 1.
pub fn y_entry(k: i64, t: i64, l: i64, theta: i64, numerator: YNumerator) -> Rat {
    let c = binomial(theta, l);
    if c.is_zero() {
        return Rat::zero();
    }
    let den = k - t + theta - l;
    if den == 0 {
        return Rat::one();
    }
    let num = match numerator {
        YNumerator::KMinusT => k - t,
        YNumerator::KMinusL => k - l,
    };
    Rat::new(sign(theta - l) * c * BigInt::from(num), BigInt::from(den) * binomial(k - l, t - theta))
}

pub fn build(kind: &MatrixKind) -> Result<Built> {
    kind.validate()?;
    let rows = kind.row_family()?;
    let cols = kind.col_family()?;
    let top = rows.s.min(cols.s);
    let (s, k) = (kind.s as i64, kind.k as i64);
    let int = |f: &dyn Fn(i64) -> BigInt| -> Result<Built> {
        Ok(Built::Int(from_theta_table(rows, cols, &int_table(top, f))?))
    };
    match kind.kind {
        Kind::W => int(&|th| ind(th == s)),
        Kind::Wbar => int(&|th| ind(th == 0)),
        Kind::U { l } => int(&|th| ind(th == l as i64)),
        Kind::Uge { l } => int(&|th| ind(th >= l as i64)),
        Kind::A { i } => int(&|th| binomial(th, i as i64)),
        Kind::N { t } => int(&|th| binomial(th - 1, t as i64)),
        Kind::Utl { t, l } => int(&|th| utl_entry(t as i64, l as i64, th)),
        Kind::F { t } => {
            let t = t.map_or(s.min(k), |t| t as i64);
            let table: Vec<Poly> = (0..=top as i64).map(|th| psi(th, t)).collect();
            Ok(Built::Poly(from_theta_table(rows, cols, &table)?))
        }
        Kind::X { t } => {
            let table = (0..=top as i64).map(|th| xi(th, t as i64, k)).collect::<Result<Vec<_>>>()?;
            Ok(Built::Poly(from_theta_table(rows, cols, &table)?))
        }
        Kind::Y { t, l } => {
            let table: Vec<Rat> =
                (0..=top as i64).map(|th| y_entry(k, t as i64, l as i64, th, YNumerator::KMinusT)).collect();
            Ok(Built::Rat(from_theta_table(rows, cols, &table)?))
        }
    }
}

fn expect_int(b: Built) -> IntMatrix {
    b.into_int().expect("integer kind builds an integer matrix")
}

fn expect_poly(b: Built) -> PolyMatrix {
    match b {
        Built::Poly(m) => m,
        other => other.to_poly(),
    }
}

pub fn w(s: u32, k: u32, v: u32) -> Result<IntMatrix> {
    build(&MatrixKind::new(Kind::W, s, k, v)).map(expect_int)
}

pub fn wbar(s: u32, k: u32, v: u32) -> Result<IntMatrix> {
    build(&MatrixKind::new(Kind::Wbar, s, k, v)).map(expect_int)
}

pub fn u(l: u32, s: u32, k: u32, v: u32) -> Result<IntMatrix> {
    build(&MatrixKind::new(Kind::U { l }, s, k, v)).map(expect_int)
}

pub fn uge(l: u32, s: u32, k: u32, v: u32) -> Result<IntMatrix> {
    build(&MatrixKind::new(Kind::Uge { l }, s, k, v)).map(expect_int)
}

pub fn a(i: u32, s: u32, k: u32, v: u32) -> Result<IntMatrix> {
    build(&MatrixKind::new(Kind::A { i }, s, k, v)).map(expect_int)
}

pub fn n(t: u32, s: u32, k: u32, v: u32) -> Result<IntMatrix> {
    build(&MatrixKind::new(Kind::N { t }, s, k, v)).map(expect_int)
}

pub fn utl(t: u32, l: u32, s: u32, k: u32, v: u32) -> Result<IntMatrix> {
    build(&MatrixKind::new(Kind::Utl { t, l }, s, k, v)).map(expect_int)
}

/// `F^t_{sk}(z)`.
pub fn f(t: u32, s: u32, k: u32, v: u32) -> Result<PolyMatrix> {
    build(&MatrixKind::new(Kind::F { t: Some(t) }, s, k, v)).map(expect_poly)
}

/// `F_{sk}(z)`, entry `(z + 1)^theta`.
pub fn f_full(s: u32, k: u32, v: u32) -> Result<PolyMatrix> {
    build(&MatrixKind::new(Kind::F { t: None }, s, k, v)).map(expect_poly)
}

pub fn x(t: u32, s: u32, k: u32, v: u32) -> Result<PolyMatrix> {
    build(&MatrixKind::new(Kind::X { t }, s, k, v)).map(expect_poly)
}

pub fn y(t: u32, l: u32, s: u32, k: u32, v: u32) -> Result<RatMatrix> {
    y_with(t, l, s, k, v, YNumerator::KMinusT)
}

pub fn y_with(t: u32, l: u32, s: u32, k: u32, v: u32, numerator: YNumerator) -> Result<RatMatrix> {
    let kind = MatrixKind::new(Kind::Y { t, l }, s, k, v);
    kind.validate()?;
    let rows = kind.row_family()?;
    let cols = kind.col_family()?;
    let table: Vec<Rat> = (0..=rows.s.min(t) as i64)
        .map(|th| y_entry(k as i64, t as i64, l as i64, th, numerator))
        .collect();
    from_theta_table(rows, cols, &table)
}

/// `sum_{theta in B} C(s, theta) C(v - s, k - theta)` with
/// `B = {l} ∪ {t+1, ..., min(s, k)}`: the number of nonzero entries in each
/// row of `U^{tl}_{sk}`.
pub fn row_support_formula(t: u32, l: u32, s: u32, k: u32, v: u32) -> Result<BigInt> {
    if !(l <= t && t <= s.min(k)) {
        return Err(invalid(format!("support count needs l <= t <= min(s,k), got l={l} t={t} s={s} k={k}")));
    }
    if s > v || k > v {
        return Err(invalid(format!("need s, k <= v, got s={s} k={k} v={v}")));
    }
    let (s, k, v) = (s as i64, k as i64, v as i64);
    let term = |th: i64| binomial(s, th) * binomial(v - s, k - th);
    Ok(std::iter::once(l as i64).chain(t as i64 + 1..=s.min(k)).map(term).sum())
}

/// Which recursive structure to split along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockPart {
    W,
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
}

impl BlockPart {
    pub const ALL: [BlockPart; 7] =
        [BlockPart::W, BlockPart::I, BlockPart::Ii, BlockPart::Iii, BlockPart::Iv, BlockPart::V, BlockPart::Vi];
}

/// The four blocks of an order-`v` matrix split at the element-1 boundary,
/// next to the blocks predicted from order `v - 1`. Order: top-left,
/// top-right, bottom-left, bottom-right.
#[derive(Clone, Debug)]
pub struct Blocks {
    pub actual: [PolyMatrix; 4],
    pub expected: [PolyMatrix; 4],
}

impl Blocks {
    /// Index of the first differing block and the differing entry.
    pub fn first_mismatch(&self) -> Option<(usize, Mismatch)> {
        (0..4).find_map(|b| self.actual[b].first_mismatch(&self.expected[b]).map(|m| (b, m)))
    }
}

fn size(v: i64, s: i64) -> usize {
    if s < 0 || s > v {
        0
    } else {
        binomial(v, s).try_into().expect("family size fits")
    }
}

// Builds at order v - 1, where the family sizes may exceed the ground set
// (giving empty matrices) and negative indices denote zero matrices.
struct Sub {
    v: i64,
}

impl Sub {
    fn shape(&self, s: i64, k: i64) -> (usize, usize) {
        (size(self.v, s), size(self.v, k))
    }

    fn get(&self, kind: impl Fn(u32) -> Option<Kind>, param: i64, s: i64, k: i64) -> Result<PolyMatrix> {
        let (r, c) = self.shape(s, k);
        if r == 0 || c == 0 || param < 0 {
            return Ok(PolyMatrix::zeros(r, c));
        }
        let kind = kind(param as u32).expect("kind for nonnegative index");
        Ok(build(&MatrixKind::new(kind, s as u32, k as u32, self.v as u32))?.to_poly().untagged())
    }
}

pub fn block_decompose(kind: &MatrixKind, part: BlockPart) -> Result<Blocks> {
    kind.validate()?;
    let (s, k, v) = (kind.s as i64, kind.k as i64, kind.v as i64);
    if s == 0 || k == 0 {
        return Err(invalid("block decomposition needs s, k >= 1"));
    }
    let expected_part = match kind.kind {
        Kind::W => BlockPart::W,
        Kind::F { t: Some(_) } => BlockPart::I,
        Kind::F { t: None } => BlockPart::Ii,
        Kind::Utl { .. } => BlockPart::Iii,
        Kind::U { .. } => BlockPart::Iv,
        Kind::N { .. } => BlockPart::V,
        Kind::A { .. } => BlockPart::Vi,
        _ => return Err(Error::Unsupported(format!("no block structure for {}", kind.tag()))),
    };
    if expected_part != part {
        return Err(invalid(format!("{} matrices decompose by part {expected_part:?}, not {part:?}", kind.tag())));
    }
    let whole = build(kind)?.to_poly();
    let rs = kind.row_family()?.containing_one() as usize;
    let cs = kind.col_family()?.containing_one() as usize;
    let (r, c) = (whole.rows(), whole.cols());
    let actual = [
        whole.submatrix(0, rs, 0, cs),
        whole.submatrix(0, rs, cs, c),
        whole.submatrix(rs, r, 0, cs),
        whole.submatrix(rs, r, cs, c),
    ];
    let sub = Sub { v: v - 1 };
    let same = |m: &Kind| {
        let m = *m;
        move |_: u32| Some(m)
    };
    // Lower-order blocks that keep the kind unchanged.
    let rest = |m: Kind| -> Result<[PolyMatrix; 3]> {
        Ok([sub.get(same(&m), 0, s - 1, k)?, sub.get(same(&m), 0, s, k - 1)?, sub.get(same(&m), 0, s, k)?])
    };
    let top_left = match kind.kind {
        Kind::W => sub.get(same(&Kind::W), 0, s - 1, k - 1)?,
        Kind::F { t: Some(t) } => {
            let t = t as i64;
            let f = sub.get(|p| Some(Kind::F { t: Some(p) }), t - 1, s - 1, k - 1)?;
            let a = sub.get(|p| Some(Kind::A { i: p }), t, s - 1, k - 1)?;
            f.mul_poly(&Poly::z_plus_one_pow(1)).add(&a.mul_poly(&Poly::monomial(Rat::one(), t as usize)))?
        }
        Kind::F { t: None } => sub.get(same(&Kind::F { t: None }), 0, s - 1, k - 1)?.mul_poly(&Poly::z_plus_one_pow(1)),
        Kind::Utl { t, l } => {
            let (t, l) = (t as i64, l as i64);
            let prev = if l == 0 {
                let (r, c) = sub.shape(s - 1, k - 1);
                PolyMatrix::zeros(r, c)
            } else {
                sub.get(|p| Some(Kind::Utl { t: p, l: l as u32 - 1 }), t - 1, s - 1, k - 1)?
            };
            let coef = Rat::from_integer(sign(t - l) * binomial(t, l));
            let a = sub.get(|p| Some(Kind::A { i: p }), t, s - 1, k - 1)?;
            prev.add(&a.scale(&Poly::constant(coef)))?
        }
        Kind::U { l } => sub.get(|p| Some(Kind::U { l: p }), l as i64 - 1, s - 1, k - 1)?,
        Kind::N { t } => sub.get(|p| Some(Kind::A { i: p }), t as i64, s - 1, k - 1)?,
        Kind::A { i } => {
            let i = i as i64;
            let a = sub.get(|p| Some(Kind::A { i: p }), i, s - 1, k - 1)?;
            a.add(&sub.get(|p| Some(Kind::A { i: p }), i - 1, s - 1, k - 1)?)?
        }
        _ => unreachable!(),
    };
    let [tr, bl, br] = match kind.kind {
        Kind::W => {
            let (r, c) = sub.shape(s - 1, k);
            [PolyMatrix::zeros(r, c), sub.get(same(&Kind::W), 0, s, k - 1)?, sub.get(same(&Kind::W), 0, s, k)?]
        }
        other => rest(other)?,
    };
    Ok(Blocks { actual, expected: [top_left, tr, bl, br] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn inclusion_matrix_small() {
        let m = w(1, 2, 3).unwrap();
        assert_eq!(m, IntMatrix::from_i64(3, 3, &[1, 1, 0, 1, 0, 1, 0, 1, 1]).unwrap());
        assert_eq!(m.row_family(), Some(SubsetFamily { v: 3, s: 1 }));
        assert_eq!(m.col_family(), Some(SubsetFamily { v: 3, s: 2 }));
    }

    #[test]
    fn n_examples_have_small_support() {
        let m = n(6, 7, 7, 14).unwrap();
        assert_eq!(m.rows(), 3432);
        for r in (0..3432).step_by(97) {
            assert_eq!(m.row_support(r), 2);
            assert_eq!(m.get(r, r), &BigInt::one());
        }
        assert!(m.data().iter().all(|x| x.is_zero() || x.is_one()));
        let m = n(5, 6, 6, 13).unwrap();
        for r in (0..1716).step_by(61) {
            assert_eq!(m.row_support(r), 8);
            let row = m.row(r);
            assert_eq!(row.iter().filter(|x| **x == BigInt::from(-1)).count(), 7);
            assert_eq!(row[r], BigInt::one());
        }
    }

    #[test]
    fn full_f_entries_are_powers() {
        let m = f_full(2, 3, 5).unwrap();
        let fam_s = SubsetFamily::new(5, 2).unwrap().masks();
        let fam_k = SubsetFamily::new(5, 3).unwrap().masks();
        for (i, a) in fam_s.iter().enumerate() {
            for (j, b) in fam_k.iter().enumerate() {
                assert_eq!(m.get(i, j), &Poly::z_plus_one_pow((a & b).count_ones() as usize));
            }
        }
    }

    #[test]
    fn validation_is_permissive_where_meaningful() {
        assert!(u(5, 2, 3, 6).unwrap().is_zero());
        assert!(utl(1, 2, 2, 2, 4).is_err());
        assert!(x(4, 2, 3, 6).is_err());
        assert!(y(2, 3, 2, 3, 6).is_err());
        assert!(w(4, 2, 3).is_err());
        assert!(w(3, 2, 5).unwrap().is_zero());
    }

    #[test]
    fn y_entry_conventions() {
        assert_eq!(y_entry(3, 3, 1, 1, YNumerator::KMinusT), rat(1));
        assert_eq!(y_entry(3, 2, 2, 1, YNumerator::KMinusT), rat(0));
        // theta = 1, l = 0, t = 1, k = 2: -1 * 1 / (2 * C(2, 0))
        assert_eq!(y_entry(2, 1, 0, 1, YNumerator::KMinusT), Rat::new((-1).into(), 2.into()));
    }

    #[test]
    fn support_formula_examples() {
        assert_eq!(row_support_formula(6, 0, 7, 7, 14).unwrap(), BigInt::from(2));
        assert_eq!(row_support_formula(5, 0, 6, 6, 13).unwrap(), BigInt::from(8));
        // t = l = s = k: only theta = s contributes
        assert_eq!(row_support_formula(3, 3, 3, 3, 7).unwrap(), BigInt::one());
        assert_eq!(utl(3, 3, 3, 3, 7).unwrap().row_support(0), 1);
        assert!(row_support_formula(2, 3, 3, 3, 7).is_err());
    }

    #[test]
    fn w_block_top_right_vanishes() {
        let b = block_decompose(&MatrixKind::new(Kind::W, 2, 3, 6), BlockPart::W).unwrap();
        assert!(b.actual[1].is_zero());
        assert!(b.first_mismatch().is_none());
    }

    #[test]
    fn every_block_part_holds_on_a_small_grid() {
        for v in 1..=6u32 {
            for s in 1..=v {
                for k in 1..=v {
                    let m = s.min(k);
                    let mut kinds = vec![Kind::W, Kind::F { t: None }];
                    for t in 0..=m + 1 {
                        kinds.push(Kind::F { t: Some(t) });
                        kinds.push(Kind::N { t });
                        kinds.push(Kind::A { i: t });
                        kinds.push(Kind::U { l: t });
                        for l in 0..=t {
                            kinds.push(Kind::Utl { t, l });
                        }
                    }
                    for kind in kinds {
                        let mk = MatrixKind::new(kind, s, k, v);
                        let part = match kind {
                            Kind::W => BlockPart::W,
                            Kind::F { t: Some(_) } => BlockPart::I,
                            Kind::F { t: None } => BlockPart::Ii,
                            Kind::Utl { .. } => BlockPart::Iii,
                            Kind::U { .. } => BlockPart::Iv,
                            Kind::N { .. } => BlockPart::V,
                            _ => BlockPart::Vi,
                        };
                        let b = block_decompose(&mk, part).unwrap();
                        assert!(b.first_mismatch().is_none(), "{mk:?}: {:?}", b.first_mismatch());
                    }
                }
            }
        }
    }

    #[test]
    fn mismatched_part_is_rejected() {
        let mk = MatrixKind::new(Kind::W, 2, 3, 6);
        assert!(block_decompose(&mk, BlockPart::Vi).is_err());
        assert!(block_decompose(&MatrixKind::new(Kind::W, 0, 3, 6), BlockPart::W).is_err());
    }
}
