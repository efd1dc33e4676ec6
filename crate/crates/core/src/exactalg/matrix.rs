//! Dense row-major matrices tagged with the subset families indexing their
//! rows and columns.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{Poly, Rat, Ring};
use crate::combinat::SubsetFamily;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    row_family: Option<SubsetFamily>,
    col_family: Option<SubsetFamily>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rat>;
/// Matrix with polynomial entries; degree-0 entries stand for scalars.
pub type PolyMatrix = Matrix<Poly>;

/// Equality compares shape and entries; family tags are checked by the
/// operations that combine matrices.
impl<T: PartialEq> PartialEq for Matrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

/// First entry at which two matrices differ.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub row: usize,
    pub col: usize,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entry ({}, {}): {} != {}", self.row, self.col, self.left, self.right)
    }
}

fn fam_str(f: Option<SubsetFamily>) -> String {
    f.map_or_else(|| "untagged".to_string(), |f| f.to_string())
}

fn merge_family(a: Option<SubsetFamily>, b: Option<SubsetFamily>) -> Result<Option<SubsetFamily>> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(Error::FamilyMismatch { left: x.to_string(), right: y.to_string() }),
        (Some(x), _) | (None, Some(x)) => Ok(Some(x)),
        (None, None) => Ok(None),
    }
}

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data, row_family: None, col_family: None })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols], row_family: None, col_family: None }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data, row_family: None, col_family: None }
    }

    /// Attach family tags; fails when a tag's size disagrees with the dimension.
    pub fn with_families(mut self, row: Option<SubsetFamily>, col: Option<SubsetFamily>) -> Result<Self> {
        if let Some(f) = row {
            if f.size() as usize != self.rows {
                return Err(Error::Dimension(format!("{} rows tagged with {f}", self.rows)));
            }
        }
        if let Some(f) = col {
            if f.size() as usize != self.cols {
                return Err(Error::Dimension(format!("{} columns tagged with {f}", self.cols)));
            }
        }
        self.row_family = row;
        self.col_family = col;
        Ok(self)
    }

    pub fn untagged(mut self) -> Self {
        self.row_family = None;
        self.col_family = None;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row_family(&self) -> Option<SubsetFamily> {
        self.row_family
    }

    pub fn col_family(&self) -> Option<SubsetFamily> {
        self.col_family
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut m = Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone());
        m.row_family = self.col_family;
        m.col_family = self.row_family;
        m
    }

    fn check_same_shape(&self, o: &Self) -> Result<(Option<SubsetFamily>, Option<SubsetFamily>)> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok((merge_family(self.row_family, o.row_family)?, merge_family(self.col_family, o.col_family)?))
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        let (rf, cf) = self.check_same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data, row_family: rf, col_family: cf })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip_with(o, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip_with(o, |a, b| a.sub_ref(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg_ref())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.mul_ref(c))
    }

    /// Sum of `sum_i c_i M_i`; all terms must share a shape.
    pub fn linear_combination<'a>(terms: impl IntoIterator<Item = (T, &'a Matrix<T>)>, rows: usize, cols: usize) -> Result<Self>
    where
        T: 'a,
    {
        let mut acc = Matrix::zeros(rows, cols);
        for (c, m) in terms {
            if c.is_zero() {
                let (rf, cf) = acc.check_same_shape(m)?;
                acc.row_family = rf;
                acc.col_family = cf;
                continue;
            }
            acc = acc.add(&m.scale(&c))?;
        }
        Ok(acc)
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            row_family: self.row_family,
            col_family: self.col_family,
        }
    }

    /// Schoolbook product, usable for any entry ring.
    pub fn mul_naive(&self, o: &Self) -> Result<Self> {
        let (rf, cf) = check_mul(self, o)?;
        let data: Vec<T> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut acc = vec![T::zero(); o.cols];
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    for (j, slot) in acc.iter_mut().enumerate() {
                        let b = o.get(k, j);
                        if !b.is_zero() {
                            *slot = slot.add_ref(&a.mul_ref(b));
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(Matrix { rows: self.rows, cols: o.cols, data, row_family: rf, col_family: cf })
    }

    /// Rows `r0..r1`, columns `c0..c1`, untagged.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// The matrix `P` with `P(i, j) = self(row_perm[i], col_perm[j])`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        check_perm(row_perm, self.rows)?;
        check_perm(col_perm, self.cols)?;
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| self.get(row_perm[i], col_perm[j]).clone()))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc.add_ref(self.get(i, i)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// `None` when equal, otherwise the first differing entry (or a shape report).
    pub fn first_mismatch(&self, o: &Self) -> Option<Mismatch> {
        if self.rows != o.rows || self.cols != o.cols {
            return Some(Mismatch {
                row: usize::MAX,
                col: usize::MAX,
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", o.rows, o.cols),
            });
        }
        self.data.iter().zip(&o.data).position(|(a, b)| a != b).map(|p| Mismatch {
            row: p / self.cols,
            col: p % self.cols,
            left: self.data[p].to_text(),
            right: o.data[p].to_text(),
        })
    }

    /// Number of nonzero entries in row `i`.
    pub fn row_support(&self, i: usize) -> usize {
        self.row(i).iter().filter(|x| !x.is_zero()).count()
    }

    /// Describes the row and column tags, for diagnostics.
    pub fn tag_summary(&self) -> String {
        format!("{} x {}", fam_str(self.row_family), fam_str(self.col_family))
    }
}

fn check_mul<T, U>(a: &Matrix<T>, b: &Matrix<U>) -> Result<(Option<SubsetFamily>, Option<SubsetFamily>)> {
    if a.cols != b.rows {
        return Err(Error::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    if let (Some(x), Some(y)) = (a.col_family, b.row_family) {
        if x != y {
            return Err(Error::FamilyMismatch { left: x.to_string(), right: y.to_string() });
        }
    }
    Ok((a.row_family, b.col_family))
}

fn check_perm(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::NotAPermutation(format!("length {} for size {n}", p.len())));
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return Err(Error::NotAPermutation(format!("entry {x} repeated or out of range")));
        }
        seen[x] = true;
    }
    Ok(())
}

/// True iff `a(i, j) = b(row_perm[i], col_perm[j])` for all `i, j`.
pub fn equiv_check<T: Ring>(a: &Matrix<T>, b: &Matrix<T>, row_perm: &[usize], col_perm: &[usize]) -> Result<bool> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::Dimension(format!("{}x{} vs {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    check_perm(row_perm, a.rows)?;
    check_perm(col_perm, a.cols)?;
    Ok((0..a.rows).all(|i| (0..a.cols).all(|j| a.get(i, j) == b.get(row_perm[i], col_perm[j]))))
}

// Integer kernel: machine arithmetic when the entry bounds rule out overflow,
// BigInt schoolbook otherwise.
fn to_i64_vec(m: &IntMatrix) -> Option<(Vec<i64>, u128)> {
    let mut max = 0u128;
    let mut out = Vec::with_capacity(m.data.len());
    for x in &m.data {
        let v = x.to_i64()?;
        max = max.max(v.unsigned_abs() as u128);
        out.push(v);
    }
    Some((out, max))
}

fn kernel_i64(a: &[i64], b: &[i64], n: usize, inner: usize, m: usize) -> Vec<i64> {
    let mut out = vec![0i64; n * m];
    out.par_chunks_mut(m.max(1)).enumerate().for_each(|(i, acc)| {
        if m == 0 {
            return;
        }
        for k in 0..inner {
            let x = a[i * inner + k];
            if x == 0 {
                continue;
            }
            let brow = &b[k * m..(k + 1) * m];
            for (slot, &y) in acc.iter_mut().zip(brow) {
                *slot += x * y;
            }
        }
    });
    out
}

fn kernel_i128(a: &[i64], b: &[i64], n: usize, inner: usize, m: usize) -> Vec<i128> {
    let mut out = vec![0i128; n * m];
    out.par_chunks_mut(m.max(1)).enumerate().for_each(|(i, acc)| {
        if m == 0 {
            return;
        }
        for k in 0..inner {
            let x = a[i * inner + k] as i128;
            if x == 0 {
                continue;
            }
            let brow = &b[k * m..(k + 1) * m];
            for (slot, &y) in acc.iter_mut().zip(brow) {
                *slot += x * y as i128;
            }
        }
    });
    out
}

impl IntMatrix {
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        Matrix::new(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn mul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        let (rf, cf) = check_mul(self, o)?;
        if let (Some((a, ma)), Some((b, mb))) = (to_i64_vec(self), to_i64_vec(o)) {
            let bound = ma.saturating_mul(mb).saturating_mul(self.cols.max(1) as u128);
            let data: Option<Vec<BigInt>> = if bound < (1u128 << 62) {
                Some(kernel_i64(&a, &b, self.rows, self.cols, o.cols).into_iter().map(BigInt::from).collect())
            } else if bound < (1u128 << 126) {
                Some(kernel_i128(&a, &b, self.rows, self.cols, o.cols).into_iter().map(BigInt::from).collect())
            } else {
                None
            };
            if let Some(data) = data {
                return Ok(Matrix { rows: self.rows, cols: o.cols, data, row_family: rf, col_family: cf });
            }
        }
        self.mul_naive(o)
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| Rat::from_integer(x.clone()))
    }

    pub fn to_poly(&self) -> PolyMatrix {
        self.map(|x| Poly::from_int(x.clone()))
    }

    pub fn sub_scalar_identity(&self, c: &BigInt) -> IntMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let x = m.get(i, i) - c;
            m.set(i, i, x);
        }
        m
    }

    /// `self^p` by repeated squaring.
    pub fn pow(&self, mut p: u32) -> Result<IntMatrix> {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.rows).with_families(self.row_family, self.col_family)?;
        while p > 0 {
            if p & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            p >>= 1;
            if p > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }
}

/// Integer matrix and common denominator with `m = ints / denom`.
fn clear_denominators(m: &RatMatrix) -> (IntMatrix, BigInt) {
    let denom = m.data.iter().fold(BigInt::one(), |d, x| d.lcm(x.denom()));
    let ints = m.map(|x| x.numer() * (&denom / x.denom()));
    (ints, denom)
}

impl RatMatrix {
    pub fn mul(&self, o: &RatMatrix) -> Result<RatMatrix> {
        check_mul(self, o)?;
        let (a, da) = clear_denominators(self);
        let (b, db) = clear_denominators(o);
        let d = da * db;
        Ok(a.mul(&b)?.map(|x| Rat::new(x.clone(), d.clone())))
    }

    /// The integer matrix, if every entry is integral.
    pub fn to_int(&self) -> Option<IntMatrix> {
        if self.data.iter().all(|x| x.is_integer()) {
            Some(self.map(|x| x.numer().clone()))
        } else {
            None
        }
    }

    pub fn to_poly(&self) -> PolyMatrix {
        self.map(|x| Poly::constant(x.clone()))
    }

    pub fn max_abs(&self) -> Rat {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero)
    }
}

impl PolyMatrix {
    pub fn max_degree(&self) -> Option<usize> {
        self.data.iter().filter_map(|p| p.degree()).max()
    }

    /// The rational matrix `[z^i] self`.
    pub fn coeff_matrix(&self, i: usize) -> RatMatrix {
        self.map(|p| p.coeff(i))
    }

    pub fn coeff_matrices(&self) -> Vec<RatMatrix> {
        match self.max_degree() {
            None => vec![],
            Some(d) => (0..=d).map(|i| self.coeff_matrix(i)).collect(),
        }
    }

    /// `sum_i C_i z^i`
    pub fn from_coeff_matrices(cs: &[RatMatrix], rows: usize, cols: usize) -> Result<PolyMatrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for c in cs {
            if c.rows != rows || c.cols != cols {
                return Err(Error::Dimension("coefficient matrices of different shapes".into()));
            }
        }
        for p in 0..rows * cols {
            data.push(Poly::new(cs.iter().map(|c| c.data[p].clone()).collect()));
        }
        let (rf, cf) = cs.first().map_or((None, None), |c| (c.row_family, c.col_family));
        Ok(Matrix { rows, cols, data, row_family: rf, col_family: cf })
    }

    pub fn eval(&self, a: &Rat) -> RatMatrix {
        self.map(|p| p.eval(a))
    }

    pub fn derive(&self) -> PolyMatrix {
        self.map(|p| p.derive())
    }

    /// Entrywise multiplication by a polynomial.
    pub fn mul_poly(&self, q: &Poly) -> PolyMatrix {
        self.map(|p| p.mul(q))
    }

    /// Coefficient matrix of `(z - c)^l` in the Taylor expansion about `c`.
    pub fn shift_coeff(&self, c: &Rat, l: usize) -> RatMatrix {
        self.map(|p| p.shift_basis(c).get(l).cloned().unwrap_or_else(Rat::zero))
    }

    /// Product computed degree by degree from integer kernels.
    pub fn mul(&self, o: &PolyMatrix) -> Result<PolyMatrix> {
        let (rf, cf) = check_mul(self, o)?;
        let (n, m) = (self.rows, o.cols);
        let ca: Vec<(IntMatrix, BigInt)> = self.coeff_matrices().iter().map(clear_denominators).collect();
        let cb: Vec<(IntMatrix, BigInt)> = o.coeff_matrices().iter().map(clear_denominators).collect();
        if ca.is_empty() || cb.is_empty() {
            return Ok(Matrix { rows: n, cols: m, data: vec![Poly::zero(); n * m], row_family: rf, col_family: cf });
        }
        let deg = ca.len() + cb.len() - 1;
        let mut coeffs = Vec::with_capacity(deg);
        for d in 0..deg {
            let pairs: Vec<(usize, usize)> =
                (0..ca.len()).filter(|&a| d >= a && d - a < cb.len()).map(|a| (a, d - a)).collect();
            let common = pairs.iter().fold(BigInt::one(), |acc, &(a, b)| acc.lcm(&(&ca[a].1 * &cb[b].1)));
            let mut acc = IntMatrix::zeros(n, m);
            for &(a, b) in &pairs {
                if ca[a].0.is_zero() || cb[b].0.is_zero() {
                    continue;
                }
                let f = &common / (&ca[a].1 * &cb[b].1);
                let prod = ca[a].0.mul(&cb[b].0)?.untagged();
                acc = acc.add(&if f.is_one() { prod } else { prod.scale(&f) })?;
            }
            coeffs.push(acc.map(|x| Rat::new(x.clone(), common.clone())));
        }
        let mut out = PolyMatrix::from_coeff_matrices(&coeffs, n, m)?;
        out.row_family = rf;
        out.col_family = cf;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use proptest::prelude::*;

    fn int(rows: usize, cols: usize, d: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, d).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let a = int(2, 3, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(IntMatrix::identity(2).mul(&a).unwrap(), a);
        assert_eq!(a.mul(&IntMatrix::identity(3)).unwrap(), a);
    }

    #[test]
    fn dimension_and_family_errors() {
        let a = int(2, 3, &[1, 2, 3, 4, 5, 6]);
        assert!(matches!(a.mul(&a), Err(Error::Dimension(_))));
        let f3 = SubsetFamily::new(3, 1).unwrap();
        let g3 = SubsetFamily::new(3, 2).unwrap();
        let x = IntMatrix::identity(3).with_families(Some(f3), Some(f3)).unwrap();
        let y = IntMatrix::identity(3).with_families(Some(g3), Some(g3)).unwrap();
        assert!(matches!(x.mul(&y), Err(Error::FamilyMismatch { .. })));
        assert!(matches!(x.add(&y), Err(Error::FamilyMismatch { .. })));
        assert!(IntMatrix::identity(2).with_families(Some(f3), None).is_err());
    }

    #[test]
    fn big_entries_fall_back_to_bigint() {
        let big = BigInt::from(1u64 << 62) * BigInt::from(1u64 << 40);
        let a = IntMatrix::new(1, 1, vec![big.clone()]).unwrap();
        assert_eq!(a.mul(&a).unwrap().get(0, 0), &(&big * &big));
        let c = IntMatrix::from_i64(1, 1, &[i64::MAX]).unwrap();
        assert_eq!(c.mul(&c).unwrap().get(0, 0), &(BigInt::from(i64::MAX) * BigInt::from(i64::MAX)));
    }

    #[test]
    fn poly_product_matches_naive() {
        let a = PolyMatrix::from_fn(3, 2, |i, j| {
            Poly::new(vec![rat(i as i64), Rat::new(1.into(), (j as i64 + 2).into()), rat(-(i as i64))])
        });
        let b = PolyMatrix::from_fn(2, 4, |i, j| Poly::from_ints([j as i64 - 1, i as i64 + 1]));
        assert_eq!(a.mul(&b).unwrap(), a.mul_naive(&b).unwrap());
    }

    #[test]
    fn rational_product_matches_naive() {
        let a = RatMatrix::from_fn(3, 3, |i, j| Rat::new((i as i64 - j as i64).into(), (i + j + 1).into()));
        assert_eq!(a.mul(&a).unwrap(), a.mul_naive(&a).unwrap());
    }

    #[test]
    fn equivalence_and_permutation_checks() {
        let a = int(2, 2, &[1, 2, 3, 4]);
        assert!(equiv_check(&a, &a, &[0, 1], &[0, 1]).unwrap());
        let b = int(2, 2, &[4, 3, 2, 1]);
        assert!(equiv_check(&a, &b, &[1, 0], &[1, 0]).unwrap());
        assert!(!equiv_check(&a, &b, &[0, 1], &[0, 1]).unwrap());
        assert!(matches!(equiv_check(&a, &b, &[0, 0], &[0, 1]), Err(Error::NotAPermutation(_))));
    }

    #[test]
    fn mismatch_reports_first_entry() {
        let a = int(2, 2, &[1, 2, 3, 4]);
        let b = int(2, 2, &[1, 2, 5, 4]);
        let m = a.first_mismatch(&b).unwrap();
        assert_eq!((m.row, m.col, m.left.as_str(), m.right.as_str()), (1, 0, "3", "5"));
        assert!(a.first_mismatch(&a).is_none());
    }

    fn small_int_matrix(n: usize, m: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(-20i64..20, n * m).prop_map(move |d| IntMatrix::from_i64(n, m, &d).unwrap())
    }

    proptest! {
        #[test]
        fn product_is_associative_and_distributive(
            a in small_int_matrix(3, 4), b in small_int_matrix(4, 2), c in small_int_matrix(4, 2), d in small_int_matrix(2, 3)
        ) {
            let ab_d = a.mul(&b).unwrap().mul(&d).unwrap();
            let a_bd = a.mul(&b.mul(&d).unwrap()).unwrap();
            prop_assert_eq!(ab_d, a_bd);
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(a.mul(&b).unwrap().transpose(), b.transpose().mul(&a.transpose()).unwrap());
        }
    }
}
