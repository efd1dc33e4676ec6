//! The identity catalog. Each entry names an identity, enumerates its
//! parameter grid up to a ground-set bound, and compares both sides exactly.
//! Left sides come from products of entrywise-built matrices, right sides
//! from closed forms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::build::{self, BlockPart, Kind, MatrixKind, YNumerator};
use crate::combinat::{binomial, complement_perm, xi, xi_at_minus_one, SubsetFamily};
use crate::error::{Error, Result};
use crate::exactalg::{equiv_check, IntMatrix, Matrix, Poly, PolyMatrix, Rat, RatMatrix, Ring};
use crate::opcalc::{self, OperatorExpr};
use crate::scheme;

/// Named integer parameters of one case, e.g. `s=2 k=3 v=6`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Params(pub BTreeMap<String, i64>);

impl Params {
    pub fn of(pairs: &[(&str, u32)]) -> Params {
        Params(pairs.iter().map(|&(k, v)| (k.to_string(), v as i64)).collect())
    }

    pub fn get(&self, key: &str) -> Result<u32> {
        let v = *self.0.get(key).ok_or_else(|| Error::InvalidParams(format!("missing parameter {key}")))?;
        u32::try_from(v).map_err(|_| Error::InvalidParams(format!("parameter {key}={v} must be nonnegative")))
    }

    fn take<const N: usize>(&self, keys: [&str; N]) -> Result<[u32; N]> {
        let mut out = [0; N];
        for (o, k) in out.iter_mut().zip(keys) {
            *o = self.get(k)?;
        }
        Ok(out)
    }

    /// Parses `s=2,k=3,v=6` (commas or whitespace).
    pub fn parse(text: &str) -> Result<Params> {
        let mut map = BTreeMap::new();
        for item in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("expected name=value, got {item:?}")))?;
            let v: i64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad value in {item:?}")))?;
            map.insert(k.trim().to_string(), v);
        }
        Ok(Params(map))
    }

    fn bound(&self) -> u32 {
        self.0.values().map(|&v| v.clamp(0, u32::MAX as i64) as u32).max().unwrap_or(0).max(1)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `None` on agreement, otherwise a witness.
type Outcome = Result<Option<String>>;

pub struct IdentityCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub domain: &'static str,
    grid: fn(u32) -> Vec<Params>,
    check: fn(&Params) -> Outcome,
    note: Option<fn(u32) -> String>,
}

impl IdentityCheck {
    pub fn grid(&self, v_max: u32) -> Vec<Params> {
        (self.grid)(v_max)
    }

    pub fn in_domain(&self, p: &Params) -> bool {
        p.0.values().all(|&v| v >= 0) && self.grid(p.bound()).contains(p)
    }

    pub fn note(&self, v_max: u32) -> Option<String> {
        self.note.map(|f| f(v_max))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub params: Params,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Runs one identity at one parameter tuple.
pub fn run_identity(name: &str, params: &Params) -> Result<CheckResult> {
    let id = lookup(name)?;
    if !id.in_domain(params) {
        return Err(Error::InvalidParams(format!("{params} is outside the domain of {name}: {}", id.domain)));
    }
    Ok(run_case(id, params))
}

fn run_case(id: &IdentityCheck, params: &Params) -> CheckResult {
    let (passed, witness) = match (id.check)(params) {
        Ok(None) => (true, None),
        Ok(Some(w)) => (false, Some(w)),
        Err(e) => (false, Some(format!("error: {e}"))),
    };
    CheckResult { name: id.name.to_string(), params: params.clone(), passed, witness }
}

pub fn lookup(name: &str) -> Result<&'static IdentityCheck> {
    registry().iter().find(|c| c.name == name).ok_or_else(|| Error::UnknownIdentity(name.to_string()))
}

pub fn registry_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name).collect()
}

/// Failure witnesses kept per identity.
pub const MAX_WITNESSES: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct IdentitySummary {
    pub name: String,
    pub statement: String,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<CheckResult>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub v_max: u32,
    pub filter: String,
    pub identities: Vec<IdentitySummary>,
    pub total_cases: usize,
    pub total_failures: usize,
    pub wall_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.total_failures == 0
    }
}

/// Identities whose names match `filter` (`all`, an exact name, or a glob).
pub fn select(filter: &str) -> Result<Vec<&'static IdentityCheck>> {
    if filter == "all" {
        return Ok(registry().iter().collect());
    }
    let pat = glob::Pattern::new(filter).map_err(|e| Error::Parse(format!("bad filter {filter:?}: {e}")))?;
    let out: Vec<_> = registry().iter().filter(|c| pat.matches(c.name)).collect();
    if out.is_empty() {
        return Err(Error::UnknownIdentity(filter.to_string()));
    }
    Ok(out)
}

/// Every selected identity over its full grid with `v <= v_max`. Cases run
/// in parallel; the report is ordered by registry position and grid order.
pub fn run_suite(v_max: u32, filter: &str) -> Result<SuiteReport> {
    if v_max < 2 {
        return Err(Error::InvalidParams(format!("v_max must be at least 2, got {v_max}")));
    }
    let start = Instant::now();
    let ids = select(filter)?;
    let jobs: Vec<(usize, Params)> =
        ids.iter().enumerate().flat_map(|(n, id)| id.grid(v_max).into_iter().map(move |p| (n, p))).collect();
    let results: Vec<(usize, CheckResult)> =
        jobs.par_iter().map(|(n, p)| (*n, run_case(ids[*n], p))).collect();
    let notes: Vec<Option<String>> = ids.par_iter().map(|id| id.note(v_max)).collect();

    let mut identities: Vec<IdentitySummary> = ids
        .iter()
        .zip(notes)
        .map(|(id, note)| IdentitySummary {
            name: id.name.to_string(),
            statement: id.statement.to_string(),
            cases: 0,
            passed: 0,
            failed: 0,
            failures: Vec::new(),
            note,
        })
        .collect();
    for (n, r) in results {
        let s = &mut identities[n];
        s.cases += 1;
        if r.passed {
            s.passed += 1;
        } else {
            s.failed += 1;
            if s.failures.len() < MAX_WITNESSES {
                s.failures.push(r);
            }
        }
    }
    let total_cases = identities.iter().map(|s| s.cases).sum();
    let total_failures = identities.iter().map(|s| s.failed).sum();
    Ok(SuiteReport {
        v_max,
        filter: filter.to_string(),
        identities,
        total_cases,
        total_failures,
        wall_ms: start.elapsed().as_millis(),
    })
}

// ---- comparison helpers ----

fn same<T: Ring>(lhs: &Matrix<T>, rhs: &Matrix<T>) -> Option<String> {
    if let Some(m) = lhs.first_mismatch(rhs) {
        return Some(m.to_string());
    }
    for (side, a, b) in [("row", lhs.row_family(), rhs.row_family()), ("column", lhs.col_family(), rhs.col_family())] {
        if let (Some(a), Some(b)) = (a, b) {
            if a != b {
                return Some(format!("{side} families differ: {a} vs {b}"));
            }
        }
    }
    None
}

fn labelled(label: &str, r: Option<String>) -> Option<String> {
    r.map(|w| format!("{label}: {w}"))
}

fn first_failure(parts: impl IntoIterator<Item = Option<String>>) -> Option<String> {
    parts.into_iter().flatten().next()
}

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn ones(rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::one())
}

fn combo(terms: Vec<(BigInt, IntMatrix)>, rows: usize, cols: usize) -> Result<IntMatrix> {
    IntMatrix::linear_combination(terms.iter().map(|(c, m)| (c.clone(), m)), rows, cols)
}

fn pcombo(terms: Vec<(Poly, PolyMatrix)>, rows: usize, cols: usize) -> Result<PolyMatrix> {
    PolyMatrix::linear_combination(terms.iter().map(|(c, m)| (c.clone(), m)), rows, cols)
}

fn size(v: u32, s: u32) -> usize {
    SubsetFamily::new(v, s).map(|f| f.size() as usize).unwrap_or(0)
}

/// `s F - z D F`, with `s` a scalar.
fn s_minus_zd(s: u32, f: &PolyMatrix) -> PolyMatrix {
    let zdf = f.derive().mul_poly(&Poly::z());
    OperatorExpr::identity()
        .scale(&Rat::from_integer(s.into()))
        .apply(f)
        .sub(&zdf)
        .expect("same shape")
}

/// `[(z+1)^l] m` computed as `D^l m / l!` at `z = -1`.
fn taylor_at_minus_one(m: &PolyMatrix, l: u32) -> RatMatrix {
    let mut d = m.clone();
    for _ in 0..l {
        d = d.derive();
    }
    let fact: BigInt = (1..=l as i64).map(BigInt::from).product();
    d.eval(&Rat::from_integer((-1).into())).scale(&Rat::new(BigInt::one(), fact))
}

/// `U^{tl}_{sk}`, zero when `l > t`.
fn utl_or_zero(t: u32, l: u32, s: u32, k: u32, v: u32) -> Result<IntMatrix> {
    if l > t {
        let m = MatrixKind::new(Kind::U { l: 0 }, s, k, v);
        return IntMatrix::zeros(size(v, s), size(v, k)).with_families(Some(m.row_family()?), Some(m.col_family()?));
    }
    build::utl(t, l, s, k, v)
}

// ---- grids ----

fn vs(v_max: u32) -> std::ops::RangeInclusive<u32> {
    1..=v_max
}

fn grid_skv(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 0..=v {
            for k in 0..=v {
                g.push(Params::of(&[("s", s), ("k", k), ("v", v)]));
            }
        }
    }
    g
}

/// `(idx, s, k, v)` with `idx` in `0..=min(s,k)+1`.
fn grid_skv_idx(v_max: u32, idx: &'static str) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 0..=v {
            for k in 0..=v {
                for i in 0..=s.min(k) + 1 {
                    g.push(Params::of(&[(idx, i), ("s", s), ("k", k), ("v", v)]));
                }
            }
        }
    }
    g
}

fn grid_tl_skv(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 0..=v {
            for k in 0..=v {
                for t in 0..=s.min(k) + 1 {
                    for l in 0..=t {
                        g.push(Params::of(&[("t", t), ("l", l), ("s", s), ("k", k), ("v", v)]));
                    }
                }
            }
        }
    }
    g
}

fn grid_kkv(v_max: u32, many: bool) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for k in 0..=v {
            for i in 0..=k {
                for j in 0..=k {
                    if many || i < j {
                        g.push(Params::of(&[("i", i), ("j", j), ("k", k), ("v", v)]));
                    }
                }
            }
        }
    }
    g
}

fn grid_abc(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for a in 0..=v {
            for b in 0..=v {
                for c in 0..=v {
                    for i in 0..=a.min(b) {
                        for j in 0..=b.min(c) {
                            g.push(Params::of(&[("a", a), ("b", b), ("c", c), ("i", i), ("j", j), ("v", v)]));
                        }
                    }
                }
            }
        }
    }
    g
}

fn grid_abkv(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for k in 0..=v {
            for a in 0..=k {
                for b in 0..=k {
                    g.push(Params::of(&[("a", a), ("b", b), ("k", k), ("v", v)]));
                }
            }
        }
    }
    g
}

fn grid_abv(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for a in 0..=v {
            for b in 0..=v {
                g.push(Params::of(&[("a", a), ("b", b), ("v", v)]));
            }
        }
    }
    g
}

/// `s >= 1` or `k >= 1` as required by the one-step recursions.
fn grid_step(v_max: u32, on_rows: bool, with_t: bool, with_l: bool) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 0..=v {
            for k in 0..=v {
                if (on_rows && s == 0) || (!on_rows && k == 0) {
                    continue;
                }
                let ts: Vec<u32> = if with_t { (0..=s.min(k) + 1).collect() } else { vec![0] };
                for t in ts {
                    let ls: Vec<u32> = if with_l { (0..=if with_t { t } else { s.min(k) }).collect() } else { vec![0] };
                    for l in ls {
                        let mut p = vec![("s", s), ("k", k), ("v", v)];
                        if with_t {
                            p.push(("t", t));
                        }
                        if with_l {
                            p.push(("l", l));
                        }
                        g.push(Params::of(&p));
                    }
                }
            }
        }
    }
    g
}

/// `(i, s, k, v, t)` with `i <= s`, `t <= s`; plus `l <= t` when requested.
fn grid_iskv(v_max: u32, with_t: bool, with_l: bool) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 0..=v {
            for k in 0..=v {
                for i in 0..=s {
                    let ts: Vec<u32> = if with_t { (0..=s).collect() } else { vec![0] };
                    for t in ts {
                        let top = if with_t { t } else { s.min(k) };
                        let ls: Vec<u32> = if with_l { (0..=top).collect() } else { vec![0] };
                        for l in ls {
                            let mut p = vec![("i", i), ("s", s), ("k", k), ("v", v)];
                            if with_t {
                                p.push(("t", t));
                            }
                            if with_l {
                                p.push(("l", l));
                            }
                            g.push(Params::of(&p));
                        }
                    }
                }
            }
        }
    }
    g
}

fn grid_sjkv(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for k in 0..=v {
            for j in 0..=v {
                for s in 0..=j {
                    g.push(Params::of(&[("s", s), ("j", j), ("k", k), ("v", v)]));
                }
            }
        }
    }
    g
}

fn grid_tskv(v_max: u32, with_l: bool) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for k in 0..=v {
            for s in 0..=v {
                for t in 0..=k {
                    for l in 0..=if with_l { t } else { 0 } {
                        let mut p = vec![("t", t), ("s", s), ("k", k), ("v", v)];
                        if with_l {
                            p.push(("l", l));
                        }
                        g.push(Params::of(&p));
                    }
                }
            }
        }
    }
    g
}

fn grid_theta_tk(bound: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for k in 0..=bound {
        for t in 0..=k {
            for th in 0..=t {
                g.push(Params::of(&[("theta", th), ("t", t), ("k", k)]));
            }
        }
    }
    g
}

fn grid_blocks(v_max: u32, with: &'static str, with_l: bool) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 1..=v {
            for k in 1..=v {
                if with.is_empty() {
                    g.push(Params::of(&[("s", s), ("k", k), ("v", v)]));
                    continue;
                }
                for t in 0..=s.min(k) + 1 {
                    for l in 0..=if with_l { t } else { 0 } {
                        let mut p = vec![(with, t), ("s", s), ("k", k), ("v", v)];
                        if with_l {
                            p.push(("l", l));
                        }
                        g.push(Params::of(&p));
                    }
                }
            }
        }
    }
    g
}

// ---- checks ----

fn eq1(p: &Params) -> Outcome {
    let [i, s, k, v] = p.take(["i", "s", "k", "v"])?;
    let lhs = build::w(i, s, v)?.mul(&build::w(s, k, v)?)?;
    let rhs = build::w(i, k, v)?.scale(&binomial((k - i) as i64, (s - i) as i64));
    Ok(same(&lhs, &rhs))
}

fn eq2(p: &Params) -> Outcome {
    let [s, k, v] = p.take(["s", "k", "v"])?;
    let terms = (0..=s)
        .map(|i| Ok((int(sign(i as i64)), build::w(i, s, v)?.transpose().mul(&build::w(i, k, v)?)?)))
        .collect::<Result<_>>()?;
    Ok(same(&build::wbar(s, k, v)?, &combo(terms, size(v, s), size(v, k))?))
}

fn eq3(p: &Params) -> Outcome {
    let [s, k, v] = p.take(["s", "k", "v"])?;
    let terms = (0..=s)
        .map(|i| Ok((int(sign(i as i64)), build::w(i, s, v)?.transpose().mul(&build::wbar(i, k, v)?)?)))
        .collect::<Result<_>>()?;
    Ok(same(&build::w(s, k, v)?, &combo(terms, size(v, s), size(v, k))?))
}

fn eq4(p: &Params) -> Outcome {
    let [i, s, k, v] = p.take(["i", "s", "k", "v"])?;
    let rhs = build::w(i, s, v)?.transpose().mul(&build::w(i, k, v)?)?;
    Ok(same(&build::a(i, s, k, v)?, &rhs))
}

fn eq5(p: &Params) -> Outcome {
    let [s, k, v] = p.take(["s", "k", "v"])?;
    let terms = (0..=s).map(|i| Ok((int(sign(i as i64)), build::a(i, s, k, v)?))).collect::<Result<_>>()?;
    let alt = build::n(s.min(k), s, k, v)?.scale(&int(sign(s.min(k) as i64)));
    let wbar = build::wbar(s, k, v)?;
    Ok(first_failure([
        same(&wbar, &combo(terms, size(v, s), size(v, k))?),
        labelled("signed N at min(s,k)", same(&wbar, &alt)),
    ]))
}

fn eq6(p: &Params) -> Outcome {
    let [t, s, k, v] = p.take(["t", "s", "k", "v"])?;
    let terms = (0..=t).map(|i| Ok((int(sign((t - i) as i64)), build::a(i, s, k, v)?))).collect::<Result<_>>()?;
    Ok(same(&build::n(t, s, k, v)?, &combo(terms, size(v, s), size(v, k))?))
}

fn eq12(p: &Params) -> Outcome {
    let [t, s, k, v] = p.take(["t", "s", "k", "v"])?;
    let terms = (0..=t).map(|l| Ok((Poly::z_plus_one_pow(l as usize), build::utl(t, l, s, k, v)?.to_poly()))).collect::<Result<_>>()?;
    let f = build::f(t, s, k, v)?;
    let shifted = (0..=t).map(|l| Ok((Rat::one(), taylor_at_minus_one(&f, l)))).collect::<Result<Vec<_>>>()?;
    let from_f = (0..=t).find_map(|l| labelled(&format!("coefficient of (z+1)^{l}"), same(&shifted[l as usize].1, &build::utl(t, l, s, k, v).ok()?.to_rat())));
    Ok(first_failure([same(&f, &pcombo(terms, size(v, s), size(v, k))?), from_f]))
}

fn eq15(p: &Params) -> Outcome {
    let [t, l, s, k, v] = p.take(["t", "l", "s", "k", "v"])?;
    let terms = (l..=t)
        .map(|i| Ok((int(sign((i - l) as i64)) * binomial(i as i64, l as i64), build::a(i, s, k, v)?)))
        .collect::<Result<_>>()?;
    Ok(same(&build::utl(t, l, s, k, v)?, &combo(terms, size(v, s), size(v, k))?))
}

fn eq16(p: &Params) -> Outcome {
    let [t, l, s, k, v] = p.take(["t", "l", "s", "k", "v"])?;
    let i = l;
    let terms = (i..=t)
        .map(|m| Ok((binomial(m as i64, i as i64), build::utl(t, m, s, k, v)?)))
        .collect::<Result<_>>()?;
    Ok(same(&build::a(i, s, k, v)?, &combo(terms, size(v, s), size(v, k))?))
}

fn thm2_i(p: &Params) -> Outcome {
    let [t, l, s, k, v] = p.take(["t", "l", "s", "k", "v"])?;
    let built = build::utl(t, l, s, k, v)?;
    let via_f = taylor_at_minus_one(&build::f(t, s, k, v)?, l);
    let mut out = vec![labelled("entries", same(&built.to_rat(), &via_f))];
    if t <= s.min(k) {
        let want = build::row_support_formula(t, l, s, k, v)?;
        let bad = (0..built.rows()).find(|&r| BigInt::from(built.row_support(r)) != want);
        out.push(bad.map(|r| format!("row {r} has support {} but the count is {want}", built.row_support(r))));
    }
    // nonzero only on B = {l} ∪ {t+1..min(s,k)}
    let in_b = |th: i64| th == l as i64 || (th > t as i64 && th <= s.min(k) as i64);
    let bad = (0..=s.min(k) as i64).find(|&th| !in_b(th) && !build::utl_entry(t as i64, l as i64, th).is_zero());
    out.push(bad.map(|th| format!("nonzero entry at theta={th} outside B")));
    Ok(first_failure(out))
}

fn thm2_ii(p: &Params) -> Outcome {
    let [t, s, k, v] = p.take(["t", "s", "k", "v"])?;
    let mut out = vec![
        labelled("U^(t,0)", same(&build::utl(t, 0, s, k, v)?, &build::n(t, s, k, v)?.scale(&int(sign(t as i64))))),
        labelled("U^(t,t)", same(&build::utl(t, t, s, k, v)?, &build::a(t, s, k, v)?)),
    ];
    if t == s {
        for l in 0..=s {
            out.push(labelled(&format!("U^(s,{l})"), same(&build::utl(s, l, s, k, v)?, &build::u(l, s, k, v)?)));
        }
    }
    Ok(first_failure(out))
}

fn thm2_iii(p: &Params) -> Outcome {
    let [t, l, s, k, v] = p.take(["t", "l", "s", "k", "v"])?;
    let m = s.min(k);
    let coef = |th: u32| {
        int(sign((t - l) as i64)) * binomial(th as i64, l as i64) * binomial(th as i64 - l as i64 - 1, (t - l) as i64)
    };
    let mut terms = vec![(coef(l), build::u(l, s, k, v)?)];
    for th in t + 1..=m {
        terms.push((coef(th), build::u(th, s, k, v)?));
    }
    let short: Vec<(BigInt, IntMatrix)> = std::iter::once(Ok((BigInt::one(), build::u(l, s, k, v)?)))
        .chain((t + 1..=m).map(|th| Ok((coef(th), build::u(th, s, k, v)?))))
        .collect::<Result<_>>()?;
    let u = build::utl(t, l, s, k, v)?;
    let (r, c) = (size(v, s), size(v, k));
    Ok(first_failure([same(&u, &combo(terms, r, c)?), labelled("second form", same(&u, &combo(short, r, c)?))]))
}

fn lemma3_i(p: &Params) -> Outcome {
    let [t, s, k, v] = p.take(["t", "s", "k", "v"])?;
    let fst = build::f(t, s, k, v)?;
    let mut out = vec![same(&fst.transpose(), &build::f(t, k, s, v)?)];
    if s == k {
        out.push((!fst.is_symmetric()).then(|| "F^t_kk is not symmetric".to_string()));
    }
    Ok(first_failure(out))
}

fn lemma3_ii(p: &Params) -> Outcome {
    let [t, s, k, v] = p.take(["t", "s", "k", "v"])?;
    Ok(same(&build::f(t, s, k, v)?, &build::f_full(s, k, v)?))
}

fn grid_lemma3_ii(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 0..=v {
            for k in 0..=v {
                for t in s.min(k)..=s.min(k) + 2 {
                    g.push(Params::of(&[("t", t), ("s", s), ("k", k), ("v", v)]));
                }
            }
        }
    }
    g
}

fn lemma3_iii(p: &Params) -> Outcome {
    let [k, v] = p.take(["k", "v"])?;
    let f = build::f_full(k, k, v)?;
    for (a, b) in [(Rat::new(1.into(), 2.into()), Rat::from_integer((-3).into())), (Rat::from_integer(2.into()), Rat::from_integer(5.into()))] {
        let (fa, fb) = (f.eval(&a), f.eval(&b));
        if let Some(w) = same(&fa.mul(&fb)?, &fb.mul(&fa)?) {
            return Ok(Some(format!("z={a}, u={b}: {w}")));
        }
    }
    Ok(None)
}

fn grid_kv(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for k in 0..=v {
            g.push(Params::of(&[("k", k), ("v", v)]));
        }
    }
    g
}

fn lemma3_iv(p: &Params) -> Outcome {
    let [i, j, k, v] = p.take(["i", "j", "k", "v"])?;
    let (a, b) = (build::a(i, k, k, v)?, build::a(j, k, k, v)?);
    Ok(same(&a.mul(&b)?, &b.mul(&a)?))
}

fn lemma3_v(p: &Params) -> Outcome {
    let [i, j, k, v] = p.take(["i", "j", "k", "v"])?;
    let (a, b) = (build::u(i, k, k, v)?, build::u(j, k, k, v)?);
    Ok(same(&a.mul(&b)?, &b.mul(&a)?))
}

fn eq17(p: &Params) -> Outcome {
    let [a, b, v] = p.take(["a", "b", "v"])?;
    let fab = build::f_full(a, b, v)?;
    let fc = build::f_full(v - a, v - b, v)?;
    let e = v as i64 - a as i64 - b as i64;
    let (lhs, rhs) = if e >= 0 {
        (opcalc::times_z_plus_one_pow(&fab, e)?, fc)
    } else {
        (fab, opcalc::times_z_plus_one_pow(&fc, -e)?)
    };
    let rp = complement_perm(SubsetFamily::new(v, a)?);
    let cp = complement_perm(SubsetFamily::new(v, b)?);
    Ok((!equiv_check(&lhs, &rhs, &rp, &cp)?).then(|| "not equivalent under the complement permutations".to_string()))
}

fn eq18(p: &Params) -> Outcome {
    let [a, b, k, v] = p.take(["a", "b", "k", "v"])?;
    let lhs = build::w(a, k, v)?.mul(&build::w(b, k, v)?.transpose())?;
    let terms = (0..=a.min(b))
        .map(|n| Ok((binomial(v as i64 - b as i64 - a as i64, v as i64 - k as i64 - n as i64), build::a(n, a, b, v)?)))
        .collect::<Result<_>>()?;
    Ok(same(&lhs, &combo(terms, size(v, a), size(v, b))?))
}

fn eq19(p: &Params) -> Outcome {
    let [a, b, c, i, j, v] = p.take(["a", "b", "c", "i", "j", "v"])?;
    let lhs = build::a(i, a, b, v)?.mul(&build::a(j, b, c, v)?)?;
    let (a_, b_, c_, i_, j_, v_) = (a as i64, b as i64, c as i64, i as i64, j as i64, v as i64);
    let terms = (0..=i.min(j))
        .map(|n| {
            let n_ = n as i64;
            let coef = binomial(a_ - n_, i_ - n_) * binomial(c_ - n_, j_ - n_) * binomial(v_ - i_ - j_, b_ + n_ - i_ - j_);
            Ok((coef, build::a(n, a, c, v)?))
        })
        .collect::<Result<_>>()?;
    Ok(same(&lhs, &combo(terms, size(v, a), size(v, c))?))
}

fn eq20(p: &Params) -> Outcome {
    let [a, b, c, i, j, v] = p.take(["a", "b", "c", "i", "j", "v"])?;
    let lhs = build::u(i, a, b, v)?.mul(&build::u(j, b, c, v)?)?;
    let (a_, b_, c_, i_, j_, v_) = (a as i64, b as i64, c as i64, i as i64, j as i64, v as i64);
    let terms = (0..=a.min(c))
        .map(|l| {
            let l_ = l as i64;
            let coef: BigInt = (0..=l_)
                .map(|n| {
                    binomial(l_, n) * binomial(c_ - l_, j_ - n) * binomial(a_ - l_, i_ - n) * binomial(v_ - a_ - c_ + l_, b_ - i_ - j_ + n)
                })
                .sum();
            Ok((coef, build::u(l, a, c, v)?))
        })
        .collect::<Result<_>>()?;
    Ok(same(&lhs, &combo(terms, size(v, a), size(v, c))?))
}

fn grid_knuth(bound: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for l in 0..=bound {
        for m in 0..=bound {
            for n in 0..=bound {
                for s in 0..=bound {
                    g.push(Params::of(&[("l", l), ("m", m), ("n", n), ("s", s)]));
                }
            }
        }
    }
    g
}

fn eq21(p: &Params) -> Outcome {
    let [l, m, n, s] = p.take(["l", "m", "n", "s"])?;
    let (l, m, n, s) = (l as i64, m as i64, n as i64, s as i64);
    // terms with k < n vanish, so the sum runs over n..=l
    let lhs: BigInt = (0..=l).map(|k| int(sign(k)) * binomial(l - k, m) * binomial(s, k - n)).sum();
    let rhs = int(sign(l + m)) * binomial(s - m - 1, l - m - n);
    Ok((lhs != rhs).then(|| format!("left {lhs}, right {rhs}")))
}

fn grid_n(bound: u32) -> Vec<Params> {
    (1..=bound).map(|n| Params::of(&[("n", n)])).collect()
}

fn grid_nk(bound: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for n in 1..=bound {
        for k in 0..=bound {
            g.push(Params::of(&[("n", n), ("k", k)]));
        }
    }
    g
}

fn op_same(lhs: &OperatorExpr, rhs: &OperatorExpr) -> Option<String> {
    (lhs != rhs).then(|| format!("{lhs} vs {rhs}"))
}

fn lemma6_i(p: &Params) -> Outcome {
    let n = p.get("n")?;
    Ok(op_same(&OperatorExpr::zd().pow(n), &opcalc::zd_power(n)))
}

fn lemma6_ii(p: &Params) -> Outcome {
    let n = p.get("n")?;
    Ok(op_same(&opcalc::zd_shifted_falling_composed(0, n), &opcalc::zd_falling(n)))
}

fn lemma6_iii(p: &Params) -> Outcome {
    let [n, k] = p.take(["n", "k"])?;
    Ok(op_same(&opcalc::zd_shifted_falling_composed(k as i64, n), &opcalc::zd_shifted_falling(k as i64, n)))
}

fn grid_si(bound: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for s in 0..=bound {
        for i in 0..=s {
            g.push(Params::of(&[("s", s), ("i", i)]));
        }
    }
    g
}

fn eq22(p: &Params) -> Outcome {
    let [s, i] = p.take(["s", "i"])?;
    let prod = opcalc::l_op_product(s, i)?;
    Ok(first_failure([
        labelled("falling form", op_same(&prod, &opcalc::l_op_falling(s, i)?)),
        labelled("expanded form", op_same(&prod, &opcalc::l_op(s, i)?)),
    ]))
}

fn prop5_i(p: &Params) -> Outcome {
    let [s, k, v, t] = p.take(["s", "k", "v", "t"])?;
    let lhs = build::w(s - 1, s, v)?.transpose().to_poly().mul(&build::f(t, s - 1, k, v)?)?;
    Ok(same(&lhs, &s_minus_zd(s, &build::f(t, s, k, v)?)))
}

fn prop5_i_t(p: &Params) -> Outcome {
    let [s, k, v, t] = p.take(["s", "k", "v", "t"])?;
    let lhs = build::f(t, s, k - 1, v)?.mul(&build::w(k - 1, k, v)?.to_poly())?;
    Ok(same(&lhs, &s_minus_zd(k, &build::f(t, s, k, v)?)))
}

fn prop5_ii(p: &Params) -> Outcome {
    let [s, k, v] = p.take(["s", "k", "v"])?;
    let lhs = build::w(s - 1, s, v)?.transpose().to_poly().mul(&build::f_full(s - 1, k, v)?)?;
    Ok(same(&lhs, &s_minus_zd(s, &build::f_full(s, k, v)?)))
}

fn prop5_ii_t(p: &Params) -> Outcome {
    let [s, k, v] = p.take(["s", "k", "v"])?;
    let lhs = build::f_full(s, k - 1, v)?.mul(&build::w(k - 1, k, v)?.to_poly())?;
    Ok(same(&lhs, &s_minus_zd(k, &build::f_full(s, k, v)?)))
}

fn step_rhs(c: u32, l: u32, here: IntMatrix, next: IntMatrix) -> Result<IntMatrix> {
    let (r, cl) = (here.rows(), here.cols());
    combo(vec![(int(c as i64 - l as i64), here), (int(l as i64 + 1), next)], r, cl)
}

fn prop5_iii(p: &Params) -> Outcome {
    let [s, k, v, t, l] = p.take(["s", "k", "v", "t", "l"])?;
    let lhs = build::w(s - 1, s, v)?.transpose().mul(&build::utl(t, l, s - 1, k, v)?)?;
    Ok(same(&lhs, &step_rhs(s, l, build::utl(t, l, s, k, v)?, utl_or_zero(t, l + 1, s, k, v)?)?))
}

fn prop5_iii_t(p: &Params) -> Outcome {
    let [s, k, v, t, l] = p.take(["s", "k", "v", "t", "l"])?;
    let lhs = build::utl(t, l, s, k - 1, v)?.mul(&build::w(k - 1, k, v)?)?;
    Ok(same(&lhs, &step_rhs(k, l, build::utl(t, l, s, k, v)?, utl_or_zero(t, l + 1, s, k, v)?)?))
}

fn prop5_iv(p: &Params) -> Outcome {
    let [s, k, v, l] = p.take(["s", "k", "v", "l"])?;
    let lhs = build::w(s - 1, s, v)?.transpose().mul(&build::u(l, s - 1, k, v)?)?;
    Ok(same(&lhs, &step_rhs(s, l, build::u(l, s, k, v)?, build::u(l + 1, s, k, v)?)?))
}

fn prop5_iv_t(p: &Params) -> Outcome {
    let [s, k, v, l] = p.take(["s", "k", "v", "l"])?;
    let lhs = build::u(l, s, k - 1, v)?.mul(&build::w(k - 1, k, v)?)?;
    Ok(same(&lhs, &step_rhs(k, l, build::u(l, s, k, v)?, build::u(l + 1, s, k, v)?)?))
}

fn prop7_i(p: &Params) -> Outcome {
    let [i, s, k, v, t] = p.take(["i", "s", "k", "v", "t"])?;
    let l = opcalc::l_op(s, i)?;
    let w = build::w(i, s, v)?.to_poly();
    let lhs = w.transpose().mul(&build::f(t, i, k, v)?)?;
    let rhs = l.apply(&build::f(t, s, k, v)?);
    // the right-multiplication form, by transposition
    let lhs_t = build::f(t, k, i, v)?.mul(&w)?;
    let rhs_t = l.apply(&build::f(t, k, s, v)?);
    Ok(first_failure([same(&lhs, &rhs), labelled("right form", same(&lhs_t, &rhs_t))]))
}

fn prop7_ii(p: &Params) -> Outcome {
    let [i, s, k, v, t, l] = p.take(["i", "s", "k", "v", "t", "l"])?;
    let lhs = build::w(i, s, v)?.transpose().mul(&utl_or_zero(t, l, i, k, v)?)?;
    let terms = (l..=l + s - i.min(s))
        .map(|h| Ok((binomial(h as i64, l as i64) * binomial(s as i64 - h as i64, i as i64 - l as i64), utl_or_zero(t, h, s, k, v)?)))
        .collect::<Result<_>>()?;
    Ok(same(&lhs, &combo(terms, size(v, s), size(v, k))?))
}

fn prop7_ii_u(p: &Params) -> Outcome {
    let [i, s, k, v, l] = p.take(["i", "s", "k", "v", "l"])?;
    let lhs = build::w(i, s, v)?.transpose().mul(&build::u(l, i, k, v)?)?;
    let terms = (l..=s)
        .map(|h| Ok((binomial(h as i64, l as i64) * binomial(s as i64 - h as i64, i as i64 - l as i64), build::u(h, s, k, v)?)))
        .collect::<Result<_>>()?;
    Ok(same(&lhs, &combo(terms, size(v, s), size(v, k))?))
}

fn wf_lhs(s: u32, j: u32, k: u32, v: u32) -> Result<PolyMatrix> {
    build::w(s, j, v)?.to_poly().mul(&build::f_full(j, k, v)?)
}

fn eq23(p: &Params) -> Outcome {
    let [s, j, k, v] = p.take(["s", "j", "k", "v"])?;
    Ok(same(&wf_lhs(s, j, k, v)?, &opcalc::wf_operator_form(s, j, k, v)?))
}

fn eq24(p: &Params) -> Outcome {
    let [s, j, k, v] = p.take(["s", "j", "k", "v"])?;
    Ok(same(&wf_lhs(s, j, k, v)?, &opcalc::wf_expansion(s, j, k, v)?))
}

fn eq25(p: &Params) -> Outcome {
    let [s, j, k, v] = p.take(["s", "j", "k", "v"])?;
    let d = (j - s) as i64;
    for pp in 0..=d {
        for l in 0..=d {
            let low = opcalc::a_pl_low_terms(pp, l, s, j, k, v);
            if !low.is_zero() {
                return Ok(Some(format!("terms r<p of a_(p={pp},l={l}) sum to {low}")));
            }
        }
    }
    eq24(p)
}

fn eq26(p: &Params) -> Outcome {
    let [t, s, k, v] = p.take(["t", "s", "k", "v"])?;
    let rhs = build::x(t, s, k, v)?.mul(&build::w(t, k, v)?.to_poly())?;
    Ok(same(&build::f(t, s, k, v)?, &rhs))
}

fn eq27(p: &Params) -> Outcome {
    let [th, t, k] = p.take(["theta", "t", "k"])?;
    let (th, t, k) = (th as i64, t as i64, k as i64);
    let lhs = xi(th + 1, t + 1, k + 1)?;
    let rhs = xi(th, t + 1, k + 1)?.add(&Poly::z().mul(&xi(th, t, k)?));
    Ok((lhs != rhs).then(|| format!("{lhs} vs {rhs}")))
}

fn eq28_with(p: &Params, offset: i64) -> Outcome {
    let [th, t, k] = p.take(["theta", "t", "k"])?;
    let (th, t, k) = (th as i64, t as i64, k as i64);
    let lhs = xi(th + 1, t + 1, k + 1)?.derive();
    let rhs = xi(th, t, k)?.scale(&Rat::from_integer((th + offset).into()));
    Ok((lhs != rhs).then(|| format!("{lhs} vs {rhs}")))
}

fn eq28(p: &Params) -> Outcome {
    eq28_with(p, 1)
}

fn eq29(p: &Params) -> Outcome {
    let [th, t, k] = p.take(["theta", "t", "k"])?;
    let (th, t, k) = (th as i64, t as i64, k as i64);
    let direct = xi(th, t, k)?.eval(&Rat::from_integer((-1).into()));
    let closed = xi_at_minus_one(th, t, k)?;
    Ok((direct != closed).then(|| format!("sum gives {direct}, closed form {closed}")))
}

fn eq30_with(p: &Params, numerator: YNumerator) -> Outcome {
    let [t, s, k, v, l] = p.take(["t", "s", "k", "v", "l"])?;
    let rhs = build::y_with(t, l, s, k, v, numerator)?.mul(&build::w(t, k, v)?.to_rat())?;
    Ok(same(&build::utl(t, l, s, k, v)?.to_rat(), &rhs))
}

fn eq30(p: &Params) -> Outcome {
    eq30_with(p, YNumerator::KMinusT)
}

fn blocks_with(kind: Kind, part: BlockPart, p: &Params) -> Outcome {
    let [s, k, v] = p.take(["s", "k", "v"])?;
    let b = build::block_decompose(&MatrixKind::new(kind, s, k, v), part)?;
    const NAMES: [&str; 4] = ["top-left", "top-right", "bottom-left", "bottom-right"];
    Ok(b.first_mismatch().map(|(i, m)| format!("{} block: {m}", NAMES[i])))
}

fn blocks_i(p: &Params) -> Outcome {
    blocks_with(Kind::F { t: Some(p.get("t")?) }, BlockPart::I, p)
}

fn blocks_ii(p: &Params) -> Outcome {
    let out = blocks_with(Kind::F { t: None }, BlockPart::Ii, p)?;
    // the inclusion matrix splits the same way, with a zero top-right block
    Ok(out.or(blocks_with(Kind::W, BlockPart::W, p)?))
}

fn blocks_iii(p: &Params) -> Outcome {
    blocks_with(Kind::Utl { t: p.get("t")?, l: p.get("l")? }, BlockPart::Iii, p)
}

fn blocks_iv(p: &Params) -> Outcome {
    blocks_with(Kind::U { l: p.get("l")? }, BlockPart::Iv, p)
}

fn blocks_v(p: &Params) -> Outcome {
    blocks_with(Kind::N { t: p.get("t")? }, BlockPart::V, p)
}

fn blocks_vi(p: &Params) -> Outcome {
    blocks_with(Kind::A { i: p.get("t")? }, BlockPart::Vi, p)
}

fn grid_remark(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 0..=v {
            for k in 0..=v {
                for t in 0..=s.max(k) + 1 {
                    g.push(Params::of(&[("t", t), ("s", s), ("k", k), ("v", v)]));
                }
            }
        }
    }
    g
}

fn remark7(p: &Params) -> Outcome {
    let [t, s, k, v] = p.take(["t", "s", "k", "v"])?;
    let terms = (0..=s.min(t).min(k)).map(|l| Ok((BigInt::one(), build::utl(t, l, s, k, v)?))).collect::<Result<_>>()?;
    let sum = combo(terms, size(v, s), size(v, k))?;
    Ok(first_failure([
        labelled("row sums", same(&sum, &ones(size(v, s), size(v, k)))),
        labelled("transpose", same(&build::u(t, s, k, v)?.transpose(), &build::u(t, k, s, v)?)),
    ]))
}

fn eq31(p: &Params) -> Outcome {
    let [l, s, k, v] = p.take(["l", "s", "k", "v"])?;
    let terms = (l..=s)
        .map(|i| Ok((int(sign((i - l) as i64)) * binomial(i as i64 - 1, l as i64 - 1), build::a(i, s, k, v)?)))
        .collect::<Result<_>>()?;
    let uge = build::uge(l, s, k, v)?;
    let diff = uge.sub(&build::uge(l + 1, s, k, v)?)?;
    Ok(first_failure([
        same(&uge, &combo(terms, size(v, s), size(v, k))?),
        labelled("U^l as a difference", same(&build::u(l, s, k, v)?, &diff)),
    ]))
}

fn grid_eq31(v_max: u32) -> Vec<Params> {
    grid_skv_idx(v_max, "l").into_iter().filter(|p| p.0["l"] >= 1).collect()
}

fn prop11(p: &Params) -> Outcome {
    let [i, j, k, v] = p.take(["i", "j", "k", "v"])?;
    let n = size(v, k);
    let a_lhs = build::a(i, k, k, v)?.mul(&build::a(j, k, k, v)?)?;
    let a_terms = (0..=k).map(|l| Ok((scheme::intersection_r(v, k, i, j, l), build::a(l, k, k, v)?))).collect::<Result<_>>()?;
    let u_lhs = build::u(i, k, k, v)?.mul(&build::u(j, k, k, v)?)?;
    let u_terms = (0..=k).map(|l| Ok((scheme::intersection_p(v, k, i, j, l), build::u(l, k, k, v)?))).collect::<Result<_>>()?;
    Ok(first_failure([
        labelled("r numbers", same(&a_lhs, &combo(a_terms, n, n)?)),
        labelled("p numbers", same(&u_lhs, &combo(u_terms, n, n)?)),
    ]))
}

// ---- notes on validated variants ----

fn count_failures(grid: Vec<Params>, f: impl Fn(&Params) -> Outcome + Sync) -> (usize, usize) {
    let bad = grid.par_iter().filter(|p| !matches!(f(p), Ok(None))).count();
    (bad, grid.len())
}

fn note_eq25(v_max: u32) -> String {
    let (bad, n) = count_failures(grid_sjkv(v_max), |p| {
        let [s, j, k, v] = p.take(["s", "j", "k", "v"])?;
        Ok(same(&wf_lhs(s, j, k, v)?, &opcalc::wf_expansion_with(s, j, k, v, opcalc::a_pl_unsigned)?))
    });
    format!("a_(p,l) carries (-1)^r inside the sum; without it the expansion fails on {bad} of {n} cases")
}

fn note_eq28(v_max: u32) -> String {
    let (bad, n) = count_failures(grid_theta_tk(v_max), |p| eq28_with(p, 0));
    format!("validated factor theta+1; the factor theta fails on {bad} of {n} cases")
}

fn note_eq30(v_max: u32) -> String {
    let g = grid_tskv(v_max, true);
    let (bad_t, n) = count_failures(g.clone(), |p| eq30_with(p, YNumerator::KMinusT));
    let (bad_l, _) = count_failures(g, |p| eq30_with(p, YNumerator::KMinusL));
    format!(
        "Y numerator {} fails on {bad_t} of {n} cases; numerator {} fails on {bad_l} of {n}; shipped {}",
        YNumerator::KMinusT.label(),
        YNumerator::KMinusL.label(),
        YNumerator::KMinusT.label()
    )
}

macro_rules! id {
    ($name:expr, $stmt:expr, $dom:expr, $grid:expr, $check:expr) => {
        IdentityCheck { name: $name, statement: $stmt, domain: $dom, grid: $grid, check: $check, note: None }
    };
    ($name:expr, $stmt:expr, $dom:expr, $grid:expr, $check:expr, $note:expr) => {
        IdentityCheck { name: $name, statement: $stmt, domain: $dom, grid: $grid, check: $check, note: Some($note) }
    };
}

fn grid_i_s_k(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for k in 0..=v {
            for s in 0..=k {
                for i in 0..=s {
                    g.push(Params::of(&[("i", i), ("s", s), ("k", k), ("v", v)]));
                }
            }
        }
    }
    g
}

fn grid_is_kv(v_max: u32) -> Vec<Params> {
    let mut g = Vec::new();
    for v in vs(v_max) {
        for s in 0..=v {
            for k in 0..=v {
                for i in 0..=s {
                    g.push(Params::of(&[("i", i), ("s", s), ("k", k), ("v", v)]));
                }
            }
        }
    }
    g
}

fn grid_tkv_t(v_max: u32) -> Vec<Params> {
    grid_skv_idx(v_max, "t")
}

/// All registered identities, in catalog order.
pub fn registry() -> &'static [IdentityCheck] {
    static REG: OnceLock<Vec<IdentityCheck>> = OnceLock::new();
    REG.get_or_init(|| {
        vec![
            id!("eq1", "W_is W_sk = C(k-i, s-i) W_ik", "i <= s <= k <= v", grid_i_s_k, eq1),
            id!("eq2", "Wbar_sk = sum_i (-1)^i W_is^T W_ik", "s, k <= v", grid_skv, eq2),
            id!("eq3", "W_sk = sum_i (-1)^i W_is^T Wbar_ik", "s, k <= v", grid_skv, eq3),
            id!("eq4", "A^i_sk = W_is^T W_ik", "i <= s, k <= v", grid_is_kv, eq4),
            id!("eq5", "Wbar_sk = sum_i (-1)^i A^i_sk = (-1)^min(s,k) N^min(s,k)_sk", "s, k <= v", grid_skv, eq5),
            id!("eq6", "N^t_sk = sum_i (-1)^(t-i) A^i_sk", "t <= min(s,k)+1", grid_tkv_t, eq6),
            id!("eq12", "F^t_sk = sum_l U^tl_sk (z+1)^l", "t <= min(s,k)+1", grid_tkv_t, eq12),
            id!("eq15", "U^tl = sum_{i=l}^t (-1)^(i-l) C(i,l) A^i", "l <= t <= min(s,k)+1", grid_tl_skv, eq15),
            id!("eq16", "A^i = sum_{l=i}^t C(l,i) U^tl", "i <= t <= min(s,k)+1 (i passed as l)", grid_tl_skv, eq16),
            id!("thm2.i", "U^tl entries, support on B and row support counts", "l <= t <= min(s,k)+1", grid_tl_skv, thm2_i),
            id!("thm2.ii", "U^t0 = (-1)^t N^t, U^sl = U^l, U^tt = A^t", "t <= min(s,k)+1", grid_tkv_t, thm2_ii),
            id!("thm2.iii", "U^tl = sum_{theta in B} c_theta U^theta", "l <= t <= min(s,k)+1", grid_tl_skv, thm2_iii),
            id!("lemma3.i", "(F^t_sk)^T = F^t_ks", "t <= min(s,k)+1", grid_tkv_t, lemma3_i),
            id!("lemma3.ii", "F^t_sk = F_sk for t >= min(s,k)", "min(s,k) <= t <= min(s,k)+2", grid_lemma3_ii, lemma3_ii),
            id!("lemma3.iii", "F_kk(z) F_kk(u) = F_kk(u) F_kk(z) at rational points", "k <= v", grid_kv, lemma3_iii),
            id!("lemma3.iv", "A^i_kk A^j_kk = A^j_kk A^i_kk", "i < j <= k <= v", |m| grid_kkv(m, false), lemma3_iv),
            id!("lemma3.v", "U^i_kk U^j_kk = U^j_kk U^i_kk", "i < j <= k <= v", |m| grid_kkv(m, false), lemma3_v),
            id!("eq17", "F_(v-a,v-b) ~ (z+1)^(v-a-b) F_ab", "a, b <= v", grid_abv, eq17),
            id!("eq18", "W_ak W_bk^T = sum_n C(v-b-a, v-k-n) A^n_ab", "a, b <= k <= v", grid_abkv, eq18),
            id!("eq19", "A^i_ab A^j_bc = sum_n C(a-n,i-n) C(c-n,j-n) C(v-i-j,b+n-i-j) A^n_ac", "i <= min(a,b), j <= min(b,c)", grid_abc, eq19),
            id!("eq20", "U^i_ab U^j_bc = sum_l sum_n C(l,n) C(c-l,j-n) C(a-l,i-n) C(v-a-c+l,b-i-j+n) U^l_ac", "i <= min(a,b), j <= min(b,c)", grid_abc, eq20),
            id!("eq21", "sum_k (-1)^k C(l-k,m) C(s,k-n) = (-1)^(l+m) C(s-m-1, l-m-n)", "l, m, n, s <= bound", grid_knuth, eq21),
            id!("lemma6.i", "(zD)^n = sum_k S(n,k) z^k D^k", "1 <= n <= bound", grid_n, lemma6_i),
            id!("lemma6.ii", "(zD)_n = z^n D^n", "1 <= n <= bound", grid_n, lemma6_ii),
            id!("lemma6.iii", "(zD-k)_n closed form", "1 <= n, k <= bound", grid_nk, lemma6_iii),
            id!("eq22", "L_si product = (-1)^(s-i)/(s-i)! (zD-i-1)_(s-i) = expanded form", "i <= s <= bound", grid_si, eq22),
            id!("prop5.i", "W_(s-1,s)^T F^t_(s-1,k) = s F^t_sk - zD F^t_sk", "s >= 1, t <= min(s,k)+1", |m| grid_step(m, true, true, false), prop5_i),
            id!("prop5.i'", "F^t_(s,k-1) W_(k-1,k) = k F^t_sk - zD F^t_sk", "k >= 1, t <= min(s,k)+1", |m| grid_step(m, false, true, false), prop5_i_t),
            id!("prop5.ii", "W_(s-1,s)^T F_(s-1,k) = s F_sk - zD F_sk", "s >= 1", |m| grid_step(m, true, false, false), prop5_ii),
            id!("prop5.ii'", "F_(s,k-1) W_(k-1,k) = k F_sk - zD F_sk", "k >= 1", |m| grid_step(m, false, false, false), prop5_ii_t),
            id!("prop5.iii", "W_(s-1,s)^T U^tl_(s-1,k) = (s-l) U^tl_sk + (l+1) U^(t,l+1)_sk", "s >= 1, l <= t", |m| grid_step(m, true, true, true), prop5_iii),
            id!("prop5.iii'", "U^tl_(s,k-1) W_(k-1,k) = (k-l) U^tl_sk + (l+1) U^(t,l+1)_sk", "k >= 1, l <= t", |m| grid_step(m, false, true, true), prop5_iii_t),
            id!("prop5.iv", "W_(s-1,s)^T U^l_(s-1,k) = (s-l) U^l_sk + (l+1) U^(l+1)_sk", "s >= 1, l <= min(s,k)", |m| grid_step(m, true, false, true), prop5_iv),
            id!("prop5.iv'", "U^l_(s,k-1) W_(k-1,k) = (k-l) U^l_sk + (l+1) U^(l+1)_sk", "k >= 1, l <= min(s,k)", |m| grid_step(m, false, false, true), prop5_iv_t),
            id!("prop7.i", "W_is^T F^t_ik = L_si F^t_sk, and F^t_ki W_is = L_si F^t_ks", "i <= s, t <= s", |m| grid_iskv(m, true, false), prop7_i),
            id!("prop7.ii", "W_is^T U^tl_ik = sum_h C(h,l) C(s-h,i-l) U^th_sk", "i <= s, l <= t <= s", |m| grid_iskv(m, true, true), prop7_ii),
            id!("prop7.ii'", "W_is^T U^l_ik = sum_h C(h,l) C(s-h,i-l) U^h_sk", "i <= s, l <= min(s,k)", |m| grid_iskv(m, false, true), prop7_ii_u),
            id!("eq23", "W_sj F_jk in operator form", "s <= j <= v, k <= v", grid_sjkv, eq23),
            id!("eq24", "W_sj F_jk expanded in derivatives of F_sk", "s <= j <= v, k <= v", grid_sjkv, eq24),
            id!("eq25", "a_(p,l) coefficients: terms r<p vanish and the expansion holds", "s <= j <= v, k <= v", grid_sjkv, eq25, note_eq25),
            id!("eq26", "F^t_sk = X^k_st W_tk", "t <= k <= v, s <= v", |m| grid_tskv(m, false), eq26),
            id!("eq27", "xi^(k+1)_(theta+1,t+1) = xi^(k+1)_(theta,t+1) + z xi^k_(theta,t)", "theta <= t <= k <= bound", grid_theta_tk, eq27),
            id!("eq28", "D xi^(k+1)_(theta+1,t+1) = (theta+1) xi^k_(theta,t)", "theta <= t <= k <= bound", grid_theta_tk, eq28, note_eq28),
            id!("eq29", "xi^k_(theta,t)(-1) closed form", "theta <= t <= k <= bound", grid_theta_tk, eq29),
            id!("eq30", "U^tl_sk = Y^kl_st W_tk", "l <= t <= k <= v, s <= v", |m| grid_tskv(m, true), eq30, note_eq30),
            id!("blocks.i", "block split of F^t_sk", "s, k >= 1, t <= min(s,k)+1", |m| grid_blocks(m, "t", false), blocks_i),
            id!("blocks.ii", "block split of F_sk (and of W_sk)", "s, k >= 1", |m| grid_blocks(m, "", false), blocks_ii),
            id!("blocks.iii", "block split of U^tl_sk", "s, k >= 1, l <= t <= min(s,k)+1", |m| grid_blocks(m, "t", true), blocks_iii),
            id!("blocks.iv", "block split of U^l_sk", "s, k >= 1, l <= min(s,k)+1", |m| grid_blocks(m, "l", false), blocks_iv),
            id!("blocks.v", "block split of N^t_sk", "s, k >= 1, t <= min(s,k)+1", |m| grid_blocks(m, "t", false), blocks_v),
            id!("blocks.vi", "block split of A^t_sk", "s, k >= 1, t <= min(s,k)+1", |m| grid_blocks(m, "t", false), blocks_vi),
            id!("remark7", "sum_l U^tl_sk = J and (U^t_sk)^T = U^t_ks", "t <= max(s,k)+1", grid_remark, remark7),
            id!("eq31", "U^(>=l)_sk = sum_{i>=l} (-1)^(i-l) C(i-1,l-1) A^i_sk", "1 <= l <= min(s,k)+1", grid_eq31, eq31),
            id!("prop11", "A^i A^j = sum r A^l and U^i U^j = sum p U^l on k-subsets", "i, j <= k <= v", |m| grid_kkv(m, true), prop11),
        ]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_examples() {
        let ok = |name: &str, p: &[(&str, u32)]| {
            let r = run_identity(name, &Params::of(p)).unwrap();
            assert!(r.passed, "{name}: {:?}", r.witness);
        };
        ok("eq1", &[("i", 0), ("s", 1), ("k", 2), ("v", 3)]);
        ok("eq26", &[("s", 2), ("k", 3), ("t", 2), ("v", 6)]);
        ok("blocks.i", &[("s", 2), ("k", 2), ("t", 1), ("v", 5)]);
    }

    #[test]
    fn registry_key_set() {
        let want = [
            "eq1", "eq2", "eq3", "eq4", "eq5", "eq6", "eq12", "eq15", "eq16", "thm2.i", "thm2.ii", "thm2.iii",
            "lemma3.i", "lemma3.ii", "lemma3.iii", "lemma3.iv", "lemma3.v", "eq17", "eq18", "eq19", "eq20", "eq21",
            "lemma6.i", "lemma6.ii", "lemma6.iii", "eq22", "prop5.i", "prop5.i'", "prop5.ii", "prop5.ii'",
            "prop5.iii", "prop5.iii'", "prop5.iv", "prop5.iv'", "prop7.i", "prop7.ii", "prop7.ii'", "eq23", "eq24",
            "eq25", "eq26", "eq27", "eq28", "eq29", "eq30", "blocks.i", "blocks.ii", "blocks.iii", "blocks.iv",
            "blocks.v", "blocks.vi", "remark7", "eq31", "prop11",
        ];
        assert_eq!(registry_names(), want);
    }

    #[test]
    fn unknown_and_out_of_domain() {
        assert!(matches!(run_identity("nosuch", &Params::default()), Err(Error::UnknownIdentity(_))));
        let p = Params::of(&[("i", 2), ("s", 1), ("k", 2), ("v", 3)]);
        assert!(matches!(run_identity("eq1", &p), Err(Error::InvalidParams(_))));
        assert!(matches!(run_identity("eq1", &Params::of(&[("s", 1)])), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn params_parse_and_print() {
        let p = Params::parse("s=2, k=3 v=6").unwrap();
        assert_eq!(p, Params::of(&[("v", 6), ("k", 3), ("s", 2)]));
        assert_eq!(p.to_string(), "k=3 s=2 v=6");
        assert!(Params::parse("s2").is_err());
    }

    #[test]
    fn small_suite_is_clean() {
        let r = run_suite(4, "all").unwrap();
        for s in &r.identities {
            assert_eq!(s.failed, 0, "{}: {:?}", s.name, s.failures);
            assert!(s.cases > 0, "{} has an empty grid", s.name);
        }
        let eq = run_suite(4, "eq*").unwrap();
        assert!(eq.passed());
        assert!(eq.total_cases >= 200);
    }

    #[test]
    fn a_broken_identity_reports_a_witness() {
        let p = Params::of(&[("theta", 1), ("t", 1), ("k", 2)]);
        assert!(matches!(eq28_with(&p, 0), Ok(Some(_))));
        let p = Params::of(&[("t", 1), ("s", 2), ("k", 3), ("v", 5), ("l", 0)]);
        assert!(matches!(eq30_with(&p, YNumerator::KMinusL), Ok(Some(_))));
    }
}
