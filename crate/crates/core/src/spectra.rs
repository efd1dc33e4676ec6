//! Closed-form spectra and ranks of square intersection matrices on `k`-subsets,
//! and an engine that checks a claimed spectrum against an explicit matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::build::{self, Kind, MatrixKind};
use crate::combinat::binomial;
use crate::error::{Error, Result};
use crate::exactalg::{
    inverse_rat, random_prime, rat_to_string, IntMatrix, ModMatrix, Poly, Rat, RatMatrix,
};
use crate::opcalc::l_op;

/// Tolerance used when clustering floating-point eigenvalues.
pub const FLOAT_TOLERANCE: f64 = 1e-6;
/// Largest order for which exact power traces are computed.
pub const EXACT_TRACE_MAX_ORDER: usize = 300;
/// Largest order for the floating-point cross-check.
pub const FLOAT_MAX_ORDER: usize = 200;

fn ri(x: BigInt) -> Rat {
    Rat::from_integer(x)
}

fn b(n: i64, k: i64) -> BigInt {
    binomial(n, k)
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `dim V_j = C(v, j) - C(v, j - 1)`.
pub fn multiplicity(v: u32, j: u32) -> BigInt {
    b(v as i64, j as i64) - b(v as i64, j as i64 - 1)
}

fn check_half(v: u32, k: u32) -> Result<()> {
    if 2 * k > v {
        return Err(Error::OutsideHypotheses(format!("spectral formulas need k <= v/2, got k={k} v={v}")));
    }
    Ok(())
}

fn check_order(what: &str, ok: bool, detail: String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{what}: {detail}")))
    }
}

/// Eigenvalue of `A^i_{kk}` on `V_j`: `C(k-j, i-j) C(v-j-i, k-i)`, zero when `i < j`.
pub fn a_eigenvalue(v: u32, k: u32, i: u32, j: u32) -> BigInt {
    let (v, k, i, j) = (v as i64, k as i64, i as i64, j as i64);
    if i < j {
        return BigInt::zero();
    }
    b(k - j, i - j) * b(v - j - i, k - i)
}

/// `mu_j(z) = sum_{i=j}^{t} C(k-j, i-j) C(v-j-i, k-i) z^i`, eigenvalue of `F^t_{kk}` on `V_j`.
pub fn mu(v: u32, k: u32, t: u32, j: u32) -> Result<Poly> {
    check_order("mu", j <= t && t <= k, format!("need j <= t <= k, got j={j} t={t} k={k}"))?;
    check_half(v, k)?;
    Ok(Poly::new((0..=t).map(|i| ri(a_eigenvalue(v, k, i, j))).collect()))
}

/// Eigenvalue of `U^{tl}_{kk}` on `V_j`:
/// `sum_{i=l}^{t} (-1)^(l+i) C(i, l) C(k-j, i-j) C(v-j-i, k-i)`.
pub fn lambda_utl(v: u32, k: u32, t: u32, l: u32, j: u32) -> Result<Rat> {
    lambda_utl_from(v, k, t, l, j, l as i64)
}

/// [`lambda_utl`] with the summation started at `lower` instead of `l`.
pub fn lambda_utl_from(v: u32, k: u32, t: u32, l: u32, j: u32, lower: i64) -> Result<Rat> {
    check_order("lambda", j <= t && t <= k && l <= t, format!("need j, l <= t <= k, got j={j} l={l} t={t} k={k}"))?;
    check_half(v, k)?;
    let (v, k, t, l, j) = (v as i64, k as i64, t as i64, l as i64, j as i64);
    Ok(ri((lower..=t).map(|i| sign(l + i) * b(i, l) * b(k - j, i - j) * b(v - j - i, k - i)).sum()))
}

/// `sum_{i=0}^{l} (-1)^(l-i) C(k-i, l-i) C(k-j, i) C(v-k+i-j, i)`, the eigenvalue
/// of `U^{k-l}_{kk}` on `V_j`.
pub fn eberlein(v: u32, k: u32, l: u32, j: u32) -> Rat {
    let (v, k, l, j) = (v as i64, k as i64, l as i64, j as i64);
    ri((0..=l).map(|i| sign(l - i) * b(k - i, l - i) * b(k - j, i) * b(v - k + i - j, i)).sum())
}

/// Eigenvalue of `U^{>=l}_{kk}` on `V_j` for `l > 0`.
pub fn lambda_uge(v: u32, k: u32, l: u32, j: u32) -> Result<Rat> {
    check_order("lambda_uge", l > 0 && j <= k, format!("need l > 0 and j <= k, got l={l} j={j}"))?;
    check_half(v, k)?;
    let (v, k, l, j) = (v as i64, k as i64, l as i64, j as i64);
    Ok(ri((l..=k).map(|i| sign(l + i) * b(i - 1, l - 1) * b(k - j, i - j) * b(v - j - i, k - i)).sum()))
}

/// `alpha_j(z) = (-1)^(k+s) sum_{i=j}^{t} C(k-j, i-j) C(v-j-i, k-i) C(i-s-1, k-s) z^i`,
/// eigenvalue of `W_{sk}^T F^t_{sk}` on `V_j`.
pub fn alpha(v: u32, k: u32, s: u32, t: u32, j: u32) -> Result<Poly> {
    check_order("alpha", j <= t && t <= s && s <= k, format!("need j <= t <= s <= k, got j={j} t={t} s={s} k={k}"))?;
    check_half(v, k)?;
    let (vi, ki, si, ji) = (v as i64, k as i64, s as i64, j as i64);
    let sg = sign(ki + si);
    Ok(Poly::new(
        (0..=t as i64)
            .map(|i| {
                if i < ji {
                    return Rat::zero();
                }
                ri(sg * b(ki - ji, i - ji) * b(vi - ji - i, ki - i) * b(i - si - 1, ki - si))
            })
            .collect(),
    ))
}

/// `alpha_j` computed as `L_{ks}` applied to `mu_j`.
pub fn alpha_via_operator(v: u32, k: u32, s: u32, t: u32, j: u32) -> Result<Poly> {
    check_order("alpha", j <= t && t <= s && s <= k, format!("need j <= t <= s <= k, got j={j} t={t} s={s} k={k}"))?;
    Ok(l_op(k, s)?.apply_poly(&mu(v, k, t, j)?))
}

/// `tau_j = (-1)^(k+s+l) sum_{i=min(j,l)}^{k} (-1)^i C(i, l) C(k-j, i-j) C(v-j-i, k-i) C(i-s-1, k-s)`,
/// eigenvalue of `W_{sk}^T U^l_{sk}` on `V_j`.
pub fn tau(v: u32, k: u32, s: u32, l: u32, j: u32) -> Result<Rat> {
    tau_from(v, k, s, l, j, j.min(l) as i64)
}

/// [`tau`] with the summation started at `lower`.
pub fn tau_from(v: u32, k: u32, s: u32, l: u32, j: u32, lower: i64) -> Result<Rat> {
    check_order("tau", j <= s && s <= k, format!("need j <= s <= k, got j={j} s={s} k={k}"))?;
    check_half(v, k)?;
    let (v, k, s, l, j) = (v as i64, k as i64, s as i64, l as i64, j as i64);
    let sum: BigInt = (lower..=k)
        .map(|i| sign(i) * b(i, l) * b(k - j, i - j) * b(v - j - i, k - i) * b(i - s - 1, k - s))
        .sum();
    Ok(ri(sign(k + s + l) * sum))
}

/// Eigenvalues with multiplicities, on ascending `j` followed by the zero tail.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSpec {
    pub pairs: Vec<(Poly, BigInt)>,
    pub order: BigInt,
}

/// A spectrum with rational eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarSpectrum {
    #[serde(serialize_with = "ser_pairs")]
    pub pairs: Vec<(Rat, BigInt)>,
    #[serde(serialize_with = "ser_big")]
    pub order: BigInt,
}

fn ser_pairs<S: serde::Serializer>(pairs: &[(Rat, BigInt)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(pairs.len()))?;
    for (l, m) in pairs {
        seq.serialize_element(&(rat_to_string(l), m.to_string()))?;
    }
    seq.end()
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl SpectrumSpec {
    /// From per-`j` eigenvalues for `j = 0..=t` and the zero tail `C(v,k) - C(v,t)`.
    pub fn from_levels(v: u32, k: u32, values: Vec<Poly>) -> Self {
        let t = values.len() as i64 - 1;
        let mut pairs: Vec<(Poly, BigInt)> =
            values.into_iter().enumerate().map(|(j, p)| (p, multiplicity(v, j as u32))).collect();
        let tail = b(v as i64, k as i64) - b(v as i64, t);
        if !tail.is_zero() {
            pairs.push((Poly::zero(), tail));
        }
        SpectrumSpec { pairs, order: b(v as i64, k as i64) }
    }

    /// Constant eigenvalues, if every level is constant.
    pub fn to_scalar(&self) -> Option<ScalarSpectrum> {
        let pairs = self.pairs.iter().map(|(p, m)| p.as_constant().map(|c| (c, m.clone()))).collect::<Option<_>>()?;
        Some(ScalarSpectrum { pairs, order: self.order.clone() })
    }

    pub fn eval(&self, z: &Rat) -> ScalarSpectrum {
        ScalarSpectrum {
            pairs: self.pairs.iter().map(|(p, m)| (p.eval(z), m.clone())).collect(),
            order: self.order.clone(),
        }
    }

    pub fn multiplicity_sum(&self) -> BigInt {
        self.pairs.iter().map(|(_, m)| m).sum()
    }
}

impl ScalarSpectrum {
    /// Equal eigenvalues combined, in order of first appearance; zero
    /// multiplicities dropped.
    pub fn merged(&self) -> ScalarSpectrum {
        let mut out: Vec<(Rat, BigInt)> = Vec::new();
        for (l, m) in &self.pairs {
            if m.is_zero() {
                continue;
            }
            match out.iter_mut().find(|(x, _)| x == l) {
                Some(slot) => slot.1 += m,
                None => out.push((l.clone(), m.clone())),
            }
        }
        ScalarSpectrum { pairs: out, order: self.order.clone() }
    }

    pub fn multiplicity_sum(&self) -> BigInt {
        self.pairs.iter().map(|(_, m)| m).sum()
    }

    /// `sum m_j lambda_j^p`
    pub fn power_sum(&self, p: u32) -> Rat {
        self.pairs.iter().map(|(l, m)| num_traits::pow(l.clone(), p as usize) * ri(m.clone())).sum()
    }

    /// Rank implied by the spectrum: total multiplicity of nonzero eigenvalues.
    pub fn rank(&self) -> BigInt {
        self.pairs.iter().filter(|(l, _)| !l.is_zero()).map(|(_, m)| m).sum()
    }

    /// Eigenvalues listed with repetition, ascending.
    pub fn expanded_f64(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (l, m) in &self.pairs {
            let x = l.to_f64().unwrap_or(f64::NAN);
            out.extend(std::iter::repeat(x).take(m.to_usize().unwrap_or(0)));
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }
}

/// Claimed spectrum of a square kind on `k`-subsets, refusing `k > v/2`.
pub fn spectrum_of(kind: &MatrixKind) -> Result<SpectrumSpec> {
    kind.validate()?;
    let (s, k, v) = (kind.s, kind.k, kind.v);
    if s != k || matches!(kind.kind, Kind::X { .. } | Kind::Y { .. }) {
        return Err(Error::Unsupported(format!("spectra need a square kind on k-subsets, got {}", kind.tag())));
    }
    check_half(v, k)?;
    let constant = |xs: Result<Vec<Rat>>| -> Result<SpectrumSpec> {
        Ok(SpectrumSpec::from_levels(v, k, xs?.into_iter().map(Poly::constant).collect()))
    };
    let beyond = |what: &str, t: u32| {
        Error::OutsideHypotheses(format!("{what} with index {t} > k = {k} has no closed-form spectrum"))
    };
    match kind.kind {
        Kind::F { t } => {
            let t = t.unwrap_or(k).min(k);
            Ok(SpectrumSpec::from_levels(v, k, (0..=t).map(|j| mu(v, k, t, j)).collect::<Result<_>>()?))
        }
        Kind::Utl { t, l } => {
            if t > k {
                return Err(beyond("U^(t,l)", t));
            }
            constant((0..=t).map(|j| lambda_utl(v, k, t, l, j)).collect())
        }
        Kind::U { l } => {
            if l > k {
                return Ok(SpectrumSpec::from_levels(v, k, vec![Poly::zero(); k as usize + 1]).compact());
            }
            constant(Ok((0..=k).map(|j| eberlein(v, k, k - l, j)).collect()))
        }
        Kind::A { i } => {
            if i > k {
                return Ok(SpectrumSpec::from_levels(v, k, vec![Poly::zero(); k as usize + 1]).compact());
            }
            constant((0..=i).map(|j| lambda_utl(v, k, i, i, j)).collect())
        }
        Kind::N { t } => {
            if t > k {
                return Err(beyond("N^t", t));
            }
            let sg = Rat::from_integer(sign(t as i64).into());
            constant((0..=t).map(|j| lambda_utl(v, k, t, 0, j).map(|x| x * &sg)).collect())
        }
        Kind::Uge { l } => {
            if l == 0 {
                return constant((0..=0).map(|j| lambda_utl(v, k, 0, 0, j)).collect());
            }
            constant((0..=k).map(|j| lambda_uge(v, k, l, j)).collect())
        }
        Kind::W => constant(Ok(vec![Rat::one(); k as usize + 1])),
        Kind::Wbar => constant(Ok((0..=k).map(|j| eberlein(v, k, k, j)).collect())),
        Kind::X { .. } | Kind::Y { .. } => unreachable!(),
    }
}

impl SpectrumSpec {
    fn compact(self) -> SpectrumSpec {
        let order = self.order.clone();
        SpectrumSpec { pairs: vec![(Poly::zero(), order.clone())], order }
    }
}

/// Spectrum of `W_{sk}^T F^t_{sk}` for `t <= s <= k <= v/2`.
pub fn spectrum_wtf(v: u32, k: u32, s: u32, t: u32) -> Result<SpectrumSpec> {
    Ok(SpectrumSpec::from_levels(v, k, (0..=t).map(|j| alpha(v, k, s, t, j)).collect::<Result<_>>()?))
}

/// Spectrum of `W_{sk}^T U^l_{sk}` for `s <= k <= v/2`.
pub fn spectrum_wtu(v: u32, k: u32, s: u32, l: u32) -> Result<SpectrumSpec> {
    let vals = (0..=s).map(|j| tau(v, k, s, l, j).map(Poly::constant)).collect::<Result<_>>()?;
    Ok(SpectrumSpec::from_levels(v, k, vals))
}

/// Closed-form rank: `C(2k,k)/2` and `C(v, k-1)` for `N^{k-1}_{kk}`, the
/// `tau_j` count for `U^l_{sk}`, otherwise the nonzero part of [`spectrum_of`].
pub fn rank_formula(kind: &MatrixKind) -> Result<BigInt> {
    kind.validate()?;
    let (s, k, v) = (kind.s, kind.k, kind.v);
    match kind.kind {
        Kind::N { t } if s == k && k >= 1 && t == k - 1 => {
            check_half(v, k)?;
            if 2 * k == v {
                Ok(b(2 * k as i64, k as i64) / 2)
            } else {
                Ok(b(v as i64, k as i64 - 1))
            }
        }
        Kind::U { l } if s != k => {
            let (s, k) = (s.min(k), s.max(k));
            check_half(v, k)?;
            let mut r = BigInt::zero();
            for j in 0..=s {
                if !tau(v, k, s, l, j)?.is_zero() {
                    r += multiplicity(v, j);
                }
            }
            Ok(r)
        }
        _ => {
            let spec = spectrum_of(kind)?;
            spec.to_scalar()
                .map(|s| s.rank())
                .ok_or_else(|| Error::Unsupported("rank of a polynomial matrix".into()))
        }
    }
}

/// Exact square matrices whose spectrum can be checked.
pub trait SpectralInput: Sync {
    fn order(&self) -> usize;
    fn to_modp(&self, p: u64) -> Result<ModMatrix>;
    fn trace_rat(&self) -> Rat;
    /// `trace(M^p)` for `p = 1..=up_to`.
    fn power_traces(&self, up_to: u32) -> Result<Vec<Rat>>;
    fn to_f64(&self) -> DMatrix<f64>;
    fn symmetric(&self) -> bool;
}

impl SpectralInput for IntMatrix {
    fn order(&self) -> usize {
        self.rows()
    }
    fn to_modp(&self, p: u64) -> Result<ModMatrix> {
        ModMatrix::from_int(self, p)
    }
    fn trace_rat(&self) -> Rat {
        ri(self.trace())
    }
    fn power_traces(&self, up_to: u32) -> Result<Vec<Rat>> {
        let mut out = Vec::new();
        let mut p = self.clone();
        for e in 1..=up_to {
            if e > 1 {
                p = p.mul(self)?;
            }
            out.push(ri(p.trace()));
        }
        Ok(out)
    }
    fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
    }
    fn symmetric(&self) -> bool {
        self.is_symmetric()
    }
}

impl SpectralInput for RatMatrix {
    fn order(&self) -> usize {
        self.rows()
    }
    fn to_modp(&self, p: u64) -> Result<ModMatrix> {
        ModMatrix::from_rat(self, p)
    }
    fn trace_rat(&self) -> Rat {
        self.trace()
    }
    fn power_traces(&self, up_to: u32) -> Result<Vec<Rat>> {
        let mut out = Vec::new();
        let mut p = self.clone();
        for e in 1..=up_to {
            if e > 1 {
                p = p.mul(self)?;
            }
            out.push(p.trace());
        }
        Ok(out)
    }
    fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
    }
    fn symmetric(&self) -> bool {
        self.is_symmetric()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Modp,
    Exact,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub mode: CheckMode,
    pub seed: u64,
    /// Probe vectors per prime.
    pub probes: usize,
    pub float_check: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mode: CheckMode::Modp, seed: 0x5eed, probes: 8, float_check: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub order: usize,
    pub primes: Vec<u64>,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl SpectrumReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn outcome(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.to_string(), passed, detail }
}

// A prime not dividing any denominator of the matrix or the spectrum.
fn usable_prime<M: SpectralInput + ?Sized>(
    m: &M,
    spec: &ScalarSpectrum,
    rng: &mut ChaCha8Rng,
    avoid: &[u64],
) -> Result<(u64, ModMatrix, Vec<u64>)> {
    for _ in 0..16 {
        let p = random_prime(rng, 62);
        if avoid.contains(&p) {
            continue;
        }
        let mm = match m.to_modp(p) {
            Ok(mm) => mm,
            Err(Error::PrimeDividesDenominator { .. }) => continue,
            Err(e) => return Err(e),
        };
        let f = mm.field();
        let lams: Option<Vec<u64>> = spec
            .pairs
            .iter()
            .map(|(l, _)| {
                let d = f.from_bigint(l.denom());
                (d != 0).then(|| f.mul(f.from_bigint(l.numer()), f.inv(d)))
            })
            .collect();
        if let Some(lams) = lams {
            return Ok((p, mm, lams));
        }
    }
    Err(Error::Unsupported("no usable prime found".into()))
}

/// Check a claimed spectrum against an explicit matrix: multiplicity sum,
/// annihilation of random probes by `prod (M - lambda I)` modulo two primes,
/// `rank(M - lambda I) = order - mult` modulo a prime (retried with a fresh
/// prime on mismatch), the exact trace, and in exact mode the power traces.
pub fn verify_spectrum<M: SpectralInput + ?Sized>(m: &M, spec: &ScalarSpectrum, opts: &VerifyOptions) -> Result<SpectrumReport> {
    let n = m.order();
    let spec = spec.merged();
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let total = spec.multiplicity_sum();
    checks.push(outcome(
        "multiplicity-sum",
        total == BigInt::from(n) && spec.order == BigInt::from(n),
        format!("sum of multiplicities {total}, declared order {}, matrix order {n}", spec.order),
    ));

    let (p1, m1, l1) = usable_prime(m, &spec, &mut rng, &[])?;
    let (p2, m2, l2) = usable_prime(m, &spec, &mut rng, &[p1])?;
    let mut primes = vec![p1, p2];

    for (p, mm, lams) in [(p1, &m1, &l1), (p2, &m2, &l2)] {
        let f = mm.field();
        let mut bad = None;
        for probe in 0..opts.probes {
            let x0: Vec<u64> = (0..n).map(|_| f.to_mont(rng.gen_range(0..p))).collect();
            let mut x = x0;
            for &lam in lams {
                let y = mm.matvec(&x);
                x = y.iter().zip(&x).map(|(&a, &b)| f.sub(a, f.mul(lam, b))).collect();
            }
            if let Some(pos) = x.iter().position(|&c| c != 0) {
                bad = Some((probe, pos));
                break;
            }
        }
        checks.push(outcome(
            &format!("annihilation mod {p}"),
            bad.is_none(),
            match bad {
                None => format!("{} probes annihilated by the product over {} eigenvalues", opts.probes, lams.len()),
                Some((probe, pos)) => format!("probe {probe} has nonzero component {pos}"),
            },
        ));
    }

    for (idx, (lam, mult)) in spec.pairs.iter().enumerate() {
        let expected = BigInt::from(n) - mult;
        let rank_at = |mm: &ModMatrix, lam_m: u64| BigInt::from(mm.sub_scalar_identity(lam_m).rank());
        let mut got = rank_at(&m1, l1[idx]);
        let mut detail = format!("rank(M - ({}) I) = {got} mod {p1}, expected {expected}", rat_to_string(lam));
        if got != expected {
            let (p3, m3, l3) = usable_prime(m, &spec, &mut rng, &primes)?;
            primes.push(p3);
            got = rank_at(&m3, l3[idx]);
            detail.push_str(&format!("; retried mod {p3}: {got}"));
        }
        checks.push(outcome(&format!("rank at {}", rat_to_string(lam)), got == expected, detail));
    }

    let tr = m.trace_rat();
    let want = spec.power_sum(1);
    checks.push(outcome(
        "trace",
        tr == want,
        format!("trace {} vs sum of eigenvalues {}", rat_to_string(&tr), rat_to_string(&want)),
    ));

    if opts.mode == CheckMode::Exact {
        if n <= EXACT_TRACE_MAX_ORDER {
            let d = spec.pairs.len() as u32;
            let traces = m.power_traces(d)?;
            let bad = (1..=d).find(|&p| traces[p as usize - 1] != spec.power_sum(p));
            checks.push(outcome(
                "power-traces",
                bad.is_none(),
                match bad {
                    None => format!("trace(M^p) matches for p = 1..={d}"),
                    Some(p) => format!(
                        "trace(M^{p}) = {} but the spectrum gives {}",
                        rat_to_string(&traces[p as usize - 1]),
                        rat_to_string(&spec.power_sum(p))
                    ),
                },
            ));
        } else {
            checks.push(outcome("power-traces", true, format!("skipped: order {n} exceeds {EXACT_TRACE_MAX_ORDER}")));
        }
    }

    if opts.float_check && n <= FLOAT_MAX_ORDER && m.symmetric() {
        let got = float_eigenvalues(&m.to_f64());
        let want = spec.expanded_f64();
        let ok = multisets_close(&got, &want, FLOAT_TOLERANCE);
        checks.push(outcome(
            "float-eigenvalues",
            ok,
            format!("{} eigenvalues compared within {FLOAT_TOLERANCE}", got.len()),
        ));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(SpectrumReport { order: n, primes, checks, passed })
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn float_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Sorted eigenvalues grouped into clusters closer than `tol` (scaled by the
/// spectral radius), as `(mean, count)`.
pub fn cluster(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let scale = sorted.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some((sum, cnt, last)) if (x - *last).abs() <= tol * scale => {
                *sum += x;
                *cnt += 1;
                *last = x;
            }
            _ => out.push((x, 1, x)),
        }
    }
    out.into_iter().map(|(sum, cnt, _)| (sum / cnt as f64, cnt)).collect()
}

/// Two sorted lists agree elementwise within `tol` scaled by their magnitude.
pub fn multisets_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// Orthogonal projector onto the row space of a full-row-rank matrix,
/// `W^T (W W^T)^{-1} W`.
pub fn row_space_projector(w: &IntMatrix) -> Result<RatMatrix> {
    let wr = w.to_rat().untagged();
    let wt = wr.transpose();
    let gram = wr.mul(&wt)?;
    wt.mul(&inverse_rat(&gram)?)?.mul(&wr)
}

/// Projectors onto `V_j = R_j ∩ R_{j-1}^⊥`, `j = 0..=k`, where `R_j` is the
/// row space of `W_{jk}`.
pub fn eigenspace_projectors(v: u32, k: u32) -> Result<Vec<RatMatrix>> {
    check_half(v, k)?;
    let mut prev: Option<RatMatrix> = None;
    let mut out = Vec::new();
    for j in 0..=k {
        let p = row_space_projector(&build::w(j, k, v)?)?;
        out.push(match &prev {
            Some(q) => p.sub(q)?,
            None => p.clone(),
        });
        prev = Some(p);
    }
    Ok(out)
}

/// Checks `A^i_{kk} P_j = lambda_j P_j` and `trace(P_j) = dim V_j` for every
/// `i, j <= k`. Returns the first failing `(i, j)`.
pub fn projector_eigen_check(v: u32, k: u32) -> Result<Option<(u32, u32)>> {
    let ps = eigenspace_projectors(v, k)?;
    for (j, pj) in ps.iter().enumerate() {
        if pj.trace() != ri(multiplicity(v, j as u32)) {
            return Ok(Some((u32::MAX, j as u32)));
        }
    }
    for i in 0..=k {
        let a = build::a(i, k, k, v)?.to_rat().untagged();
        for (j, pj) in ps.iter().enumerate() {
            let lam = ri(a_eigenvalue(v, k, i, j as u32));
            if a.mul(pj)? != pj.scale(&lam) {
                return Ok(Some((i, j as u32)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn scalar(pairs: &[(i64, i64)]) -> Vec<(Rat, BigInt)> {
        pairs.iter().map(|&(l, m)| (rat(l), BigInt::from(m))).collect()
    }

    #[test]
    fn golden_n_spectra() {
        let s = spectrum_of(&MatrixKind::new(Kind::N { t: 6 }, 7, 7, 14)).unwrap().to_scalar().unwrap().merged();
        assert_eq!(s.pairs, scalar(&[(2, 1716), (0, 1716)]));
        assert_eq!(s.order, BigInt::from(3432));
        let s = spectrum_of(&MatrixKind::new(Kind::N { t: 5 }, 6, 6, 13)).unwrap().to_scalar().unwrap().merged();
        assert_eq!(s.pairs, scalar(&[(-6, 1), (7, 12), (-4, 65), (5, 208), (-2, 429), (3, 572), (0, 429)]));
        assert_eq!(s.rank(), BigInt::from(1287));
    }

    #[test]
    fn golden_ranks() {
        assert_eq!(rank_formula(&MatrixKind::new(Kind::N { t: 6 }, 7, 7, 14)).unwrap(), BigInt::from(1716));
        assert_eq!(rank_formula(&MatrixKind::new(Kind::N { t: 5 }, 6, 6, 13)).unwrap(), BigInt::from(1287));
        assert!(matches!(
            rank_formula(&MatrixKind::new(Kind::N { t: 5 }, 6, 6, 11)),
            Err(Error::OutsideHypotheses(_))
        ));
    }

    #[test]
    fn johnson_graph_j52() {
        let s = spectrum_of(&MatrixKind::new(Kind::U { l: 1 }, 2, 2, 5)).unwrap().to_scalar().unwrap();
        assert_eq!(s.pairs, scalar(&[(6, 1), (1, 4), (-2, 5)]));
        assert_eq!(eberlein(5, 2, 1, 0), rat(6));
        assert_eq!(eberlein(5, 2, 1, 1), rat(1));
        assert_eq!(eberlein(5, 2, 1, 2), rat(-2));
        let m = build::u(1, 2, 2, 5).unwrap();
        let r = verify_spectrum(&m, &s, &VerifyOptions { mode: CheckMode::Exact, ..Default::default() }).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn all_ones_spectrum() {
        let s = spectrum_of(&MatrixKind::new(Kind::A { i: 0 }, 2, 2, 5)).unwrap().to_scalar().unwrap();
        assert_eq!(s.pairs, scalar(&[(10, 1), (0, 9)]));
        assert_eq!(mu(5, 2, 0, 0).unwrap(), Poly::from_int(10));
    }

    #[test]
    fn trivial_closed_forms() {
        for v in 2..=8u32 {
            for k in 1..=v / 2 {
                for j in 0..=k {
                    assert_eq!(lambda_utl(v, k, k, k, j).unwrap(), rat(1));
                    assert_eq!(eberlein(v, k, 0, j), rat(1));
                    assert_eq!(lambda_uge(v, k, k, j).unwrap(), rat(1));
                    assert_eq!(tau(v, k, k, k, j).unwrap(), rat(1));
                }
            }
        }
    }

    #[test]
    fn wrong_spectrum_is_caught() {
        let m = build::u(1, 2, 2, 5).unwrap();
        let bad = ScalarSpectrum { pairs: scalar(&[(6, 1), (1, 5), (-2, 4)]), order: 10.into() };
        let r = verify_spectrum(&m, &bad, &VerifyOptions::default()).unwrap();
        assert!(!r.passed);
        assert!(r.checks.iter().filter(|c| c.name.starts_with("annihilation")).all(|c| c.passed));
        assert!(r.failures().any(|c| c.name.starts_with("rank at")));
        let missing = ScalarSpectrum { pairs: scalar(&[(6, 1), (1, 9)]), order: 10.into() };
        let r = verify_spectrum(&m, &missing, &VerifyOptions::default()).unwrap();
        assert!(r.failures().any(|c| c.name.starts_with("annihilation")));
    }

    #[test]
    fn identity_and_all_ones() {
        let i = IntMatrix::identity(7);
        let s = ScalarSpectrum { pairs: scalar(&[(1, 7)]), order: 7.into() };
        assert!(verify_spectrum(&i, &s, &VerifyOptions::default()).unwrap().passed);
        for v in 2..=8u32 {
            for k in 1..=v / 2 {
                let j = build::a(0, k, k, v).unwrap();
                let n = b(v as i64, k as i64).to_i64().unwrap();
                let s = ScalarSpectrum { pairs: scalar(&[(n, 1), (0, n - 1)]), order: n.into() };
                assert!(verify_spectrum(&j, &s, &VerifyOptions::default()).unwrap().passed);
            }
        }
    }

    #[test]
    fn projectors_diagonalize_a() {
        for v in 2..=7 {
            for k in 1..=v / 2 {
                assert_eq!(projector_eigen_check(v, k).unwrap(), None, "v={v} k={k}");
            }
        }
    }

    fn verify_kind(kind: MatrixKind, z: &Rat) {
        let spec = spectrum_of(&kind).unwrap().eval(z);
        let m = build::build(&kind).unwrap().to_poly().eval(z);
        let r = verify_spectrum(&m, &spec, &VerifyOptions { float_check: false, ..Default::default() }).unwrap();
        assert!(r.passed, "{kind:?}: {:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn closed_forms_match_built_matrices() {
        for z in [rat(1), rat(2), rat(-2)] {
        for v in 2..=7u32 {
            for k in 1..=v / 2 {
                for t in 0..=k {
                    verify_kind(MatrixKind::new(Kind::F { t: Some(t) }, k, k, v), &z);
                    verify_kind(MatrixKind::new(Kind::N { t }, k, k, v), &z);
                    verify_kind(MatrixKind::new(Kind::A { i: t }, k, k, v), &z);
                    verify_kind(MatrixKind::new(Kind::U { l: t }, k, k, v), &z);
                    verify_kind(MatrixKind::new(Kind::Uge { l: t }, k, k, v), &z);
                    for l in 0..=t {
                        verify_kind(MatrixKind::new(Kind::Utl { t, l }, k, k, v), &z);
                    }
                }
                verify_kind(MatrixKind::new(Kind::Wbar, k, k, v), &z);
            }
        }
        }
    }

    #[test]
    fn lambda_from_a_eigenvalues_and_eberlein_index_map() {
        for v in 2..=8u32 {
            for k in 1..=v / 2 {
                for j in 0..=k {
                    for t in j..=k {
                        for l in 0..=t {
                            let via_a: BigInt = (l..=t)
                                .map(|i| sign((i - l) as i64) * b(i as i64, l as i64) * a_eigenvalue(v, k, i, j))
                                .sum();
                            assert_eq!(lambda_utl(v, k, t, l, j).unwrap(), ri(via_a));
                        }
                    }
                    for l in 0..=k {
                        assert_eq!(eberlein(v, k, l, j), lambda_utl(v, k, k, k - l, j).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn u_rank_formula_on_v8() {
        for v in 2..=8u32 {
            for k in 1..=v / 2 {
                for s in 0..=k {
                    for l in 0..=s {
                        let r = rank_formula(&MatrixKind::new(Kind::U { l }, s, k, v)).unwrap();
                        let m = build::u(l, s, k, v).unwrap();
                        assert_eq!(r, BigInt::from(crate::exactalg::rank_modp(&m, 1_000_000_007).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn products_with_w_transpose() {
        let z = rat(-2);
        for v in 2..=7u32 {
            for k in 1..=v / 2 {
                for s in 0..=k {
                    let w = build::w(s, k, v).unwrap();
                    let wt = w.to_rat().transpose();
                    for t in 0..=s {
                        for j in 0..=t {
                            assert_eq!(alpha(v, k, s, t, j).unwrap(), alpha_via_operator(v, k, s, t, j).unwrap());
                        }
                        let m = wt.mul(&build::f(t, s, k, v).unwrap().eval(&z)).unwrap();
                        let spec = spectrum_wtf(v, k, s, t).unwrap().eval(&z);
                        assert!(verify_spectrum(&m, &spec, &VerifyOptions::default()).unwrap().passed);
                    }
                    for l in 0..=k {
                        for j in 0..=s {
                            for lower in 0..=(j.min(l) as i64) {
                                assert_eq!(tau_from(v, k, s, l, j, lower).unwrap(), tau(v, k, s, l, j).unwrap());
                            }
                        }
                        let m = w.transpose().mul(&build::u(l, s, k, v).unwrap()).unwrap();
                        let spec = spectrum_wtu(v, k, s, l).unwrap().to_scalar().unwrap();
                        assert!(verify_spectrum(&m, &spec, &VerifyOptions::default()).unwrap().passed);
                        let r = rank_formula(&MatrixKind::new(Kind::U { l }, s, k, v)).unwrap();
                        assert_eq!(r, BigInt::from(crate::exactalg::rank_exact(&build::u(l, s, k, v).unwrap())));
                    }
                }
            }
        }
    }

    #[test]
    fn clustering() {
        let c = cluster(&[-2.0, -2.0 + 1e-9, 1.0, 6.0], FLOAT_TOLERANCE);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].1, 2);
    }
}
