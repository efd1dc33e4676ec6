//! The Johnson scheme J(v,k): class matrices, the three Bose-Mesner bases,
//! change of basis and the structure constants.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::build;
use crate::combinat::binomial;
use crate::error::{Error, Result};
use crate::exactalg::{inverse_rat, rank_exact_rat, IntMatrix, Rat, RatMatrix};
use crate::spectra::CheckOutcome;

/// `r_{ij}^l` with `A^i A^j = sum_l r_{ij}^l A^l` on `k`-subsets.
pub fn intersection_r(v: u32, k: u32, i: u32, j: u32, l: u32) -> BigInt {
    let (v, k, i, j, l) = (v as i64, k as i64, i as i64, j as i64, l as i64);
    binomial(v - i - j, k - i - j + l) * binomial(k - l, i - l) * binomial(k - l, j - l)
}

/// `p_{ij}^l` with `U^i U^j = sum_l p_{ij}^l U^l` on `k`-subsets, all indices
/// being intersection sizes.
pub fn intersection_p(v: u32, k: u32, i: u32, j: u32, l: u32) -> BigInt {
    let (v, k, i, j, l) = (v as i64, k as i64, i as i64, j as i64, l as i64);
    (0..=l)
        .map(|e| {
            binomial(l, e) * binomial(k - l, i - e) * binomial(k - l, j - e) * binomial(v - 2 * k + l, k - i - j + e)
        })
        .sum()
}

/// Class matrices are indexed by co-intersection: `X_i` marks pairs meeting
/// in `k - i` points. Structure constants are indexed by intersection size.
/// All conversions between the two go through this map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassIndex {
    pub k: u32,
}

impl ClassIndex {
    pub fn intersection_of_class(&self, i: u32) -> u32 {
        self.k - i
    }

    pub fn class_of_intersection(&self, theta: u32) -> u32 {
        self.k - theta
    }

    /// `p'` with `X_i X_j = sum_l p'_{ij}^l X_l`.
    pub fn class_p(&self, v: u32, i: u32, j: u32, l: u32) -> BigInt {
        let f = |x| self.intersection_of_class(x);
        intersection_p(v, self.k, f(i), f(j), f(l))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisTag {
    X,
    A,
    Uge,
}

impl BasisTag {
    pub const ALL: [BasisTag; 3] = [BasisTag::X, BasisTag::A, BasisTag::Uge];

    pub fn label(&self) -> &'static str {
        match self {
            BasisTag::X => "X",
            BasisTag::A => "A",
            BasisTag::Uge => "Uge",
        }
    }
}

impl std::str::FromStr for BasisTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(BasisTag::X),
            "A" | "a" => Ok(BasisTag::A),
            "Uge" | "uge" => Ok(BasisTag::Uge),
            _ => Err(Error::Parse(format!("unknown basis {s:?}"))),
        }
    }
}

/// `k + 1` members of the Bose-Mesner algebra of J(v,k), in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeBasis {
    pub v: u32,
    pub k: u32,
    pub tag: BasisTag,
    pub members: Vec<IntMatrix>,
}

fn check_vk(v: u32, k: u32) -> Result<()> {
    if k > v || v > crate::combinat::MAX_V {
        return Err(Error::InvalidParams(format!("J(v,k) needs k <= v <= {}, got v={v} k={k}", crate::combinat::MAX_V)));
    }
    Ok(())
}

impl SchemeBasis {
    /// `X_i = U^{k-i}_{kk}`, `A^i_{kk}` or `U^{>=i}_{kk}` for `i = 0..=k`.
    pub fn build(v: u32, k: u32, tag: BasisTag) -> Result<SchemeBasis> {
        check_vk(v, k)?;
        let idx = ClassIndex { k };
        let members = (0..=k)
            .map(|i| match tag {
                BasisTag::X => build::u(idx.intersection_of_class(i), k, k, v),
                BasisTag::A => build::a(i, k, k, v),
                BasisTag::Uge => build::uge(i, k, k, v),
            })
            .collect::<Result<_>>()?;
        Ok(SchemeBasis { v, k, tag, members })
    }
}

/// Row `m` holds the coordinates of member `m` of `tag` in the X basis.
pub fn x_coordinates(k: u32, tag: BasisTag) -> RatMatrix {
    let idx = ClassIndex { k };
    let n = k as usize + 1;
    RatMatrix::from_fn(n, n, |m, i| {
        let theta = idx.intersection_of_class(i as u32) as i64;
        match tag {
            BasisTag::X => Rat::from_integer(BigInt::from((m == i) as i64)),
            BasisTag::A => Rat::from_integer(binomial(theta, m as i64)),
            BasisTag::Uge => Rat::from_integer(BigInt::from((theta >= m as i64) as i64)),
        }
    })
}

/// `T` with `to_m = sum_n T[m][n] from_n`.
pub fn change_of_basis(k: u32, from: BasisTag, to: BasisTag) -> Result<RatMatrix> {
    x_coordinates(k, to).mul(&inverse_rat(&x_coordinates(k, from))?)
}

/// Re-expresses `from` in the basis `to` by exact linear combination of its
/// members. Returns the new basis and the conversion matrix.
pub fn basis_convert(from: &SchemeBasis, to: BasisTag) -> Result<(SchemeBasis, RatMatrix)> {
    let t = change_of_basis(from.k, from.tag, to)?;
    let n = from.members[0].rows();
    let rat_members: Vec<RatMatrix> = from.members.iter().map(|m| m.to_rat().untagged()).collect();
    let mut members = Vec::with_capacity(from.members.len());
    for m in 0..=from.k as usize {
        let combo = RatMatrix::linear_combination(
            (0..=from.k as usize).map(|j| (t.get(m, j).clone(), &rat_members[j])),
            n,
            n,
        )?;
        let int = combo.to_int().ok_or_else(|| Error::InvalidParams("non-integral basis member".into()))?;
        members.push(int.with_families(from.members[0].row_family(), from.members[0].col_family())?);
    }
    Ok((SchemeBasis { v: from.v, k: from.k, tag: to, members }, t))
}

/// Converts `b` into `to` after checking it belongs to `(v, k)`.
pub fn basis_convert_for(v: u32, k: u32, b: &SchemeBasis, to: BasisTag) -> Result<(SchemeBasis, RatMatrix)> {
    if b.v != v || b.k != k {
        return Err(Error::InvalidParams(format!("basis is for J({},{}), expected J({v},{k})", b.v, b.k)));
    }
    basis_convert(b, to)
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeReport {
    pub v: u32,
    pub k: u32,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

fn outcome(name: String, mismatch: Option<String>, ok_detail: String) -> CheckOutcome {
    CheckOutcome { name, passed: mismatch.is_none(), detail: mismatch.unwrap_or(ok_detail) }
}

fn combination(ms: &[IntMatrix], coeffs: impl Fn(usize) -> BigInt) -> Result<IntMatrix> {
    let n = ms[0].rows();
    IntMatrix::linear_combination(ms.iter().enumerate().map(|(l, m)| (coeffs(l), m)), n, n)
}

/// Checks `X_0 = I`, `sum X_i = J`, symmetry, `X_i X_j = sum p' X_l`,
/// `A^i A^j = sum r A^l`, `p_{ij} = p_{ji}`, and linear independence of the A
/// and U^{>=} bases.
pub fn verify_scheme_axioms(v: u32, k: u32) -> Result<SchemeReport> {
    let xs = SchemeBasis::build(v, k, BasisTag::X)?.members;
    let a_s = SchemeBasis::build(v, k, BasisTag::A)?.members;
    let idx = ClassIndex { k };
    let n = xs[0].rows();
    let mut checks = Vec::new();

    let id = IntMatrix::identity(n).with_families(xs[0].row_family(), xs[0].col_family())?;
    checks.push(outcome("X_0 = I".into(), xs[0].first_mismatch(&id).map(|m| m.to_string()), format!("order {n}")));

    let sum = combination(&xs, |_| BigInt::one())?;
    let ones = IntMatrix::from_fn(n, n, |_, _| BigInt::one());
    checks.push(outcome("sum X_i = J".into(), sum.untagged().first_mismatch(&ones).map(|m| m.to_string()), format!("{} classes", k + 1)));

    let asym = xs.iter().position(|x| !x.is_symmetric());
    checks.push(outcome("X_i symmetric".into(), asym.map(|i| format!("X_{i} is not symmetric")), "all classes".into()));

    let mut bad = None;
    'outer: for i in 0..=k {
        for j in 0..=k {
            for l in 0..=k {
                let (a, b) = (idx.class_p(v, i, j, l), idx.class_p(v, j, i, l));
                if a != b {
                    bad = Some(format!("p'_({i},{j})^{l} = {a} but p'_({j},{i})^{l} = {b}"));
                    break 'outer;
                }
            }
        }
    }
    checks.push(outcome("p symmetric".into(), bad, "p_ij = p_ji".into()));

    let mut bad = None;
    'x: for i in 0..=k {
        for j in i..=k {
            let lhs = xs[i as usize].mul(&xs[j as usize])?;
            let rhs = combination(&xs, |l| idx.class_p(v, i, j, l as u32))?;
            if let Some(m) = lhs.first_mismatch(&rhs) {
                bad = Some(format!("X_{i} X_{j}: {m}"));
                break 'x;
            }
        }
    }
    checks.push(outcome("X_i X_j = sum p' X_l".into(), bad, format!("{} products", (k + 1) * (k + 2) / 2)));

    let mut bad = None;
    'a: for i in 0..=k {
        for j in i..=k {
            let lhs = a_s[i as usize].mul(&a_s[j as usize])?;
            let rhs = combination(&a_s, |l| intersection_r(v, k, i, j, l as u32))?;
            if let Some(m) = lhs.first_mismatch(&rhs) {
                bad = Some(format!("A^{i} A^{j}: {m}"));
                break 'a;
            }
        }
    }
    checks.push(outcome("A^i A^j = sum r A^l".into(), bad, format!("{} products", (k + 1) * (k + 2) / 2)));

    for tag in [BasisTag::A, BasisTag::Uge] {
        let r = rank_exact_rat(&x_coordinates(k, tag));
        checks.push(outcome(
            format!("{} basis independent", tag.label()),
            (r != k as usize + 1).then(|| format!("coordinate rank {r}")),
            format!("rank {r}"),
        ));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(SchemeReport { v, k, checks, passed })
}

/// `(i, j, l, p_{ij}^l)` over all intersection-size indices.
pub fn p_table(v: u32, k: u32) -> Result<Vec<(u32, u32, u32, BigInt)>> {
    check_vk(v, k)?;
    let mut out = Vec::new();
    for i in 0..=k {
        for j in 0..=k {
            for l in 0..=k {
                let p = intersection_p(v, k, i, j, l);
                if !p.is_zero() {
                    out.push((i, j, l, p));
                }
            }
        }
    }
    Ok(out)
}
