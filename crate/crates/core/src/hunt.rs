//! Desk-scale searches and certificates: polynomial-equals-factorial
//! enumeration with modular pre-sieving, per-l non-representability
//! certificates with independently re-checkable witnesses, the
//! x^2 - y^2 = a! family, empirical prime-gap checks, and parity scans.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, PrimeFactorization};
use crate::bhargava::{self, BhargavaSet};
use crate::formclass::{pset_status, BinaryForm, PsetStatus};
use crate::genfact::{self, FactorizationVector, FieldSplitting, HSeqKind};
use crate::quadrep::{self, NotRepReason, QuadForm, RepVerdict};
use crate::{Error, Limits, Result};

// ---------------------------------------------------------------------------
// Report schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Solution,
    NoSolution,
    Blocked,
    Representable,
    NotRepresentable,
    Unknown,
}

/// Which check produced a verdict. Names say what the rule tests.
#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// An eligible prime divides the target to an exponent not divisible by
    /// the form degree.
    ExponentDivisibility,
    /// The positive definite quadratic criterion: parity of the 2-adic and
    /// odd-inert exponents of a*N/g (decisive at class number one).
    QuadParity,
    /// Restricted norm form: every eligible prime exponent must be >= 2.
    NormFormMinExponent,
    /// The form content must divide the target.
    ContentDivisibility,
    /// Excluded by residue classes: no x mod m hits the target value.
    ModularSieve,
    /// Exact integer root search on the materialized target.
    RootSearch,
    /// Complete bounded search of a positive definite form.
    CompleteSearch,
}

#[derive(Serialize, Clone, Debug)]
pub struct Entry {
    pub l: u64,
    pub verdict: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Entry {
    fn bare(l: u64, verdict: VerdictKind) -> Self {
        Entry {
            l,
            verdict,
            prime: None,
            exponent: None,
            witness: None,
            rule: None,
            reason: None,
        }
    }
}

#[derive(Serialize, Clone, Copy, Debug)]
pub struct RangeSpec {
    pub lo: u64,
    pub hi: u64,
}

#[derive(Serialize, Clone, Debug, Default)]
pub struct Meta {
    pub runtime_ms: u64,
    pub truncation: Vec<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct SearchReport {
    pub equation: String,
    pub range: RangeSpec,
    pub entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl SearchReport {
    pub fn unknown_fraction(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        let u = self
            .entries
            .iter()
            .filter(|e| e.verdict == VerdictKind::Unknown)
            .count();
        u as f64 / self.entries.len() as f64
    }
}

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

/// What sits on the right of the equation, indexed by l.
#[derive(Clone, Debug)]
pub enum RhsKind {
    Hseq(HSeqKind),
    Pi(FieldSplitting),
    Bhargava { set: BhargavaSet, prime_bound: u64 },
}

impl RhsKind {
    pub fn describe(&self) -> String {
        match self {
            RhsKind::Hseq(HSeqKind::Factorial) => "l!".into(),
            RhsKind::Hseq(HSeqKind::Lcm) => "lcm(1..l)".into(),
            RhsKind::Hseq(HSeqKind::Primorial) => "primorial(l)".into(),
            RhsKind::Hseq(HSeqKind::Multinomial(a)) => format!("multinomial({a};l)"),
            RhsKind::Pi(field) => format!("normproduct[{}](l)", field.describe()),
            RhsKind::Bhargava { set, prime_bound } => {
                format!("l!_S, S = {} (primes <= {prime_bound})", set.describe())
            }
        }
    }
}

/// Per-l profiles for a contiguous range, built incrementally.
pub(crate) struct ProfileSeries {
    lo: u64,
    profiles: Vec<FactorizationVector>,
    truncated_at: Option<u64>,
    unstable: Vec<Vec<u64>>, // parallel to profiles; empty when exact
}

impl ProfileSeries {
    fn at(&self, l: u64) -> &FactorizationVector {
        &self.profiles[(l - self.lo) as usize]
    }

    fn unstable_at(&self, l: u64) -> &[u64] {
        if self.unstable.is_empty() {
            &[]
        } else {
            &self.unstable[(l - self.lo) as usize]
        }
    }
}

const MAX_RANGE_LEN: u64 = 50_000;

/// Ranges are processed in chunks of this many l values so that only a
/// bounded number of profiles is alive at a time.
const SERIES_CHUNK: u64 = 256;

/// Run `visit` over the range in bounded chunks, rebuilding each chunk's
/// profiles incrementally from l = 1 (cheap relative to holding the whole
/// range in memory).
pub(crate) fn with_series_chunks<F>(
    rhs: &RhsKind,
    lo: u64,
    hi: u64,
    limits: &Limits,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&ProfileSeries) -> Result<()>,
{
    if lo < 1 || hi < lo {
        return Err(Error::Parse(format!("bad range {lo}:{hi}")));
    }
    if hi - lo + 1 > MAX_RANGE_LEN {
        return Err(Error::BoundExceeded {
            what: "range length",
            value: hi - lo + 1,
            bound: MAX_RANGE_LEN,
        });
    }
    let mut chunk_lo = lo;
    while chunk_lo <= hi {
        let chunk_hi = (chunk_lo + SERIES_CHUNK - 1).min(hi);
        let series = build_series(rhs, chunk_lo, chunk_hi, limits)?;
        visit(&series)?;
        chunk_lo = chunk_hi + 1;
    }
    Ok(())
}

pub(crate) fn build_series(
    rhs: &RhsKind,
    lo: u64,
    hi: u64,
    limits: &Limits,
) -> Result<ProfileSeries> {
    if lo < 1 || hi < lo {
        return Err(Error::Parse(format!("bad range {lo}:{hi}")));
    }
    let mut profiles = Vec::with_capacity((hi - lo + 1) as usize);
    let mut unstable: Vec<Vec<u64>> = Vec::new();
    let mut truncated_at = None;

    match rhs {
        RhsKind::Hseq(kind) => {
            let bound_needed = match kind {
                HSeqKind::Multinomial(a) => hi
                    .checked_mul(*a)
                    .ok_or_else(|| Error::Overflow("a*l".into()))?,
                _ => hi,
            };
            if bound_needed > limits.hseq_l_bound {
                return Err(Error::BoundExceeded {
                    what: "sequence index",
                    value: bound_needed,
                    bound: limits.hseq_l_bound,
                });
            }
            match kind {
                HSeqKind::Factorial => {
                    let mut cur = FactorizationVector::new();
                    for l in 1..=hi {
                        for (p, e) in arith::factor_u64(l) {
                            cur.add(p, e as u64);
                        }
                        if l >= lo {
                            profiles.push(cur.clone());
                        }
                    }
                }
                HSeqKind::Lcm => {
                    let mut cur = FactorizationVector::new();
                    for l in 1..=hi {
                        let fac = arith::factor_u64(l);
                        if fac.len() == 1 {
                            cur.add(fac[0].0, 1); // l is a prime power
                        }
                        if l >= lo {
                            profiles.push(cur.clone());
                        }
                    }
                }
                HSeqKind::Primorial => {
                    let mut bound = 16u64.max((hi as f64 * ((hi as f64).ln() + 3.0)) as u64);
                    let primes = loop {
                        let ps = arith::sieve_primes(bound);
                        if ps.len() as u64 >= hi {
                            break ps;
                        }
                        bound *= 2;
                    };
                    let mut cur = FactorizationVector::new();
                    for l in 1..=hi {
                        cur.add(primes[(l - 1) as usize], 1);
                        if l >= lo {
                            profiles.push(cur.clone());
                        }
                    }
                }
                HSeqKind::Multinomial(a) if *a < 2 => {
                    return Err(Error::Unsupported(
                        "multinomial sequences need a >= 2".into(),
                    ))
                }
                HSeqKind::Multinomial(a) => {
                    let mut small = FactorizationVector::new();
                    let mut big = FactorizationVector::new();
                    for l in 1..=hi {
                        for (p, e) in arith::factor_u64(l) {
                            small.add(p, e as u64);
                        }
                        for m in (a * (l - 1) + 1)..=(a * l) {
                            for (p, e) in arith::factor_u64(m) {
                                big.add(p, e as u64);
                            }
                        }
                        if l >= lo {
                            let mut v = FactorizationVector::new();
                            for (p, e) in big.iter() {
                                let s = a * small.get(p);
                                debug_assert!(e >= s);
                                v.add(p, e - s);
                            }
                            profiles.push(v);
                        }
                    }
                }
            }
        }
        RhsKind::Pi(field) => {
            if hi > limits.pik_l_bound {
                return Err(Error::BoundExceeded {
                    what: "norm threshold",
                    value: hi,
                    bound: limits.pik_l_bound,
                });
            }
            let counts = genfact::ideal_counts_upto(field, hi)?;
            let mut cur = FactorizationVector::new();
            for l in 1..=hi {
                let a_l = counts[l as usize] as u64;
                if a_l > 0 {
                    for (p, e) in arith::factor_u64(l) {
                        cur.add(p, e as u64 * a_l);
                    }
                }
                if l >= lo {
                    profiles.push(cur.clone());
                }
            }
        }
        RhsKind::Bhargava { set, prime_bound } => {
            let vals = bhargava::valuations_upto(
                set,
                hi,
                *prime_bound,
                bhargava::DEFAULT_WINDOW_MULTIPLIER,
            )?;
            truncated_at = vals.truncated_at;
            for l in lo..=hi {
                let prof = bhargava::profile_from(&vals, l);
                profiles.push(prof.vector);
                unstable.push(prof.unstable_primes);
            }
        }
    }
    Ok(ProfileSeries {
        lo,
        profiles,
        truncated_at,
        unstable,
    })
}

fn fv_to_factorization(v: &FactorizationVector) -> PrimeFactorization {
    PrimeFactorization::from_prime_powers(1, v.iter().map(|(p, e)| (BigUint::from(p), e)))
        .expect("profile primes are prime")
}

// ---------------------------------------------------------------------------
// Integer roots of P(x) = N
// ---------------------------------------------------------------------------

fn eval_poly(coeffs_asc: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs_asc.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Root magnitude bound: 2 * max_i (|a_{n-i}| / |a_n|)^(1/i), rounded up.
fn fujiwara_bound(coeffs_asc: &[BigInt]) -> BigUint {
    let n = coeffs_asc.len() - 1;
    let lead = coeffs_asc[n].magnitude();
    let mut best = BigUint::one();
    for i in 1..=n {
        let c = coeffs_asc[n - i].magnitude();
        if c.is_zero() {
            continue;
        }
        // ceil(c / lead)
        let ratio = (c + lead - BigUint::one()) / lead;
        let (root, exact) = arith::integer_nth_root(&ratio, i as u32);
        let r = if exact { root } else { root + BigUint::one() };
        if r > best {
            best = r;
        }
    }
    best * BigUint::from(2u32) + BigUint::one()
}

/// All integer solutions of P(x) = N, exact. Critical region enumerated,
/// monotone tails binary-searched; the tail bound scales like |N|^(1/deg).
pub fn integer_roots(coeffs_asc: &[BigInt], n: &BigInt, limits: &Limits) -> Result<Vec<BigInt>> {
    let mut coeffs = coeffs_asc.to_vec();
    while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Err(Error::InvalidForm(
            "polynomial must have degree >= 1".into(),
        ));
    }
    arith::check_digits(n.bits(), limits.max_digits)?;
    let deg = coeffs.len() - 1;

    if deg == 1 {
        let (q, r) = (n - &coeffs[0]).div_rem(&coeffs[1]);
        return Ok(if r.is_zero() { vec![q] } else { vec![] });
    }

    // q(x) = P(x) - N
    let mut q = coeffs.clone();
    q[0] -= n;
    let outer = BigInt::from(fujiwara_bound(&q));

    // Critical points of P live inside the Fujiwara bound of P'.
    let deriv: Vec<BigInt> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i as u64))
        .collect();
    let inner = BigInt::from(fujiwara_bound(&deriv)) + BigInt::one();
    let inner = inner.min(outer.clone());
    let inner_i = inner
        .to_i64()
        .filter(|&v| v <= 10_000_000)
        .ok_or_else(|| Error::Unsupported("critical region too large to enumerate".into()))?;

    let mut roots = Vec::new();
    for x in -inner_i..=inner_i {
        let xb = BigInt::from(x);
        if eval_poly(&coeffs, &xb) == *n {
            roots.push(xb);
        }
    }
    // Monotone tails: strictly monotone beyond every critical point.
    for (lo, hi) in [
        (inner.clone() + 1, outer.clone()),
        (-outer.clone(), -inner.clone() - 1),
    ] {
        if lo > hi {
            continue;
        }
        if let Some(x) = monotone_search(&coeffs, n, lo, hi) {
            if !roots.contains(&x) {
                roots.push(x);
            }
        }
    }
    roots.sort();
    Ok(roots)
}

/// Roots of P(x) = N with the target given in factored view: materialized
/// under the digit bound, then solved exactly.
pub fn integer_roots_profile(
    coeffs_asc: &[BigInt],
    target: &FactorizationVector,
    limits: &Limits,
) -> Result<Vec<BigInt>> {
    let n = BigInt::from(target.materialize(limits.max_digits)?);
    integer_roots(coeffs_asc, &n, limits)
}

fn monotone_search(
    coeffs: &[BigInt],
    n: &BigInt,
    mut lo: BigInt,
    mut hi: BigInt,
) -> Option<BigInt> {
    let increasing = eval_poly(coeffs, &hi) >= eval_poly(coeffs, &lo);
    while lo <= hi {
        let mid: BigInt = (&lo + &hi) >> 1;
        let v = eval_poly(coeffs, &mid);
        match v.cmp(n) {
            std::cmp::Ordering::Equal => return Some(mid),
            std::cmp::Ordering::Less => {
                if increasing {
                    lo = mid + 1;
                } else {
                    hi = mid - 1;
                }
            }
            std::cmp::Ordering::Greater => {
                if increasing {
                    hi = mid - 1;
                } else {
                    lo = mid + 1;
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Brocard-style search
// ---------------------------------------------------------------------------

const MAX_BROCARD_L: u64 = 2000;

/// All (x, l) with P(x) = l! for 1 <= l <= l_max. Residue classes exclude
/// most l before anything is materialized; survivors get an exact root
/// search. Correctness never depends on the sieve (it only skips work).
pub fn brocard_search(coeffs_asc: &[BigInt], l_max: u64, limits: &Limits) -> Result<SearchReport> {
    let start = Instant::now();
    let mut coeffs = coeffs_asc.to_vec();
    while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        coeffs.pop();
    }
    if coeffs.len() < 3 {
        return Err(Error::InvalidForm(
            "the search needs a polynomial of degree >= 2".into(),
        ));
    }
    if l_max > MAX_BROCARD_L {
        return Err(Error::BoundExceeded {
            what: "l_max",
            value: l_max,
            bound: MAX_BROCARD_L,
        });
    }

    let moduli = sieve_moduli(&coeffs);
    // Value sets of P mod m.
    let images: Vec<(u64, Vec<bool>)> = moduli
        .iter()
        .map(|&m| {
            let mb = BigInt::from(m);
            let red: Vec<u64> = coeffs
                .iter()
                .map(|c| c.mod_floor(&mb).to_u64().unwrap())
                .collect();
            let mut img = vec![false; m as usize];
            for x in 0..m {
                let mut acc = 0u64;
                for c in red.iter().rev() {
                    acc = (acc * x + c) % m;
                }
                img[acc as usize] = true;
            }
            (m, img)
        })
        .collect();

    let mut entries = Vec::with_capacity(l_max as usize);
    let mut fact = BigInt::one();
    let mut fact_mod: Vec<u64> = moduli.iter().map(|_| 1).collect();
    for l in 1..=l_max {
        fact *= BigInt::from(l);
        arith::check_digits(fact.bits(), limits.max_digits)?;
        for (i, &m) in moduli.iter().enumerate() {
            fact_mod[i] = (fact_mod[i] * (l % m)) % m;
        }
        let excluded = images
            .iter()
            .zip(fact_mod.iter())
            .any(|((_, img), &fm)| !img[fm as usize]);
        if excluded {
            let mut e = Entry::bare(l, VerdictKind::NoSolution);
            e.rule = Some(Rule::ModularSieve);
            entries.push(e);
            continue;
        }
        let roots = integer_roots(&coeffs, &fact, limits)?;
        if roots.is_empty() {
            let mut e = Entry::bare(l, VerdictKind::NoSolution);
            e.rule = Some(Rule::RootSearch);
            entries.push(e);
        } else {
            let mut e = Entry::bare(l, VerdictKind::Solution);
            e.rule = Some(Rule::RootSearch);
            e.witness = Some(roots.iter().map(|r| r.to_string()).collect());
            entries.push(e);
        }
    }

    let equation = format!("{} = l!", poly_to_string(&coeffs));
    Ok(SearchReport {
        equation,
        range: RangeSpec { lo: 1, hi: l_max },
        entries,
        meta: Some(Meta {
            runtime_ms: start.elapsed().as_millis() as u64,
            truncation: vec![],
        }),
    })
}

fn sieve_moduli(coeffs_asc: &[BigInt]) -> Vec<u64> {
    let mut moduli: Vec<u64> = arith::sieve_primes(64);
    moduli.extend_from_slice(&[4, 8, 16, 32, 9, 27, 25, 49]);
    // Discriminant-derived odd prime moduli, when cheap to find.
    let desc: Vec<BigInt> = coeffs_asc.iter().rev().cloned().collect();
    let disc = crate::formclass::poly_discriminant_desc(&desc);
    if !disc.is_zero() {
        let mut d = disc.magnitude().clone();
        for p in arith::sieve_primes(1000) {
            let pb = BigUint::from(p);
            if (&d % &pb).is_zero() {
                while (&d % &pb).is_zero() {
                    d /= &pb;
                }
                if !moduli.contains(&p) {
                    moduli.push(p);
                }
            }
        }
    }
    moduli.sort_unstable();
    moduli.dedup();
    moduli
}

pub(crate) fn poly_to_string(coeffs_asc: &[BigInt]) -> String {
    let mut s = String::new();
    for (i, c) in coeffs_asc.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.magnitude().to_string();
        if s.is_empty() {
            if c.is_negative() {
                s.push('-');
            }
        } else if c.is_negative() {
            s.push('-');
        } else {
            s.push('+');
        }
        let unit = mag == "1";
        match i {
            0 => s.push_str(&mag),
            1 => {
                if !unit {
                    s.push_str(&mag);
                }
                s.push('x');
            }
            _ => {
                if !unit {
                    s.push_str(&mag);
                }
                s.push_str(&format!("x^{i}"));
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
pub struct CertifyOptions {
    /// Treat the form as the two-variable restriction of a norm form of a
    /// larger field: certificates then additionally use the rule that every
    /// eligible prime must appear to exponent >= 2.
    pub norm_form_rule: bool,
}

/// Decide each l in the range: a blocking certificate (re-checkable prime +
/// exponent + rule), a representation (witness when the target is small
/// enough to search), a completed exhaustive search, or an honest unknown.
pub fn certificate_search(
    form: &BinaryForm,
    rhs: &RhsKind,
    lo: u64,
    hi: u64,
    opts: &CertifyOptions,
    limits: &Limits,
) -> Result<SearchReport> {
    let start = Instant::now();
    let deg = form.degree() as u64;
    if deg < 2 && !opts.norm_form_rule {
        return Err(Error::Unsupported(
            "no rule applies to a degree-1 form".into(),
        ));
    }
    let g_fact = arith::factorize(form.content(), &arith::Effort::default())?;
    if g_fact.factors().any(|(p, _)| p.to_u64().is_none()) {
        return Err(Error::Unsupported(
            "form content has a prime factor beyond 64 bits".into(),
        ));
    }
    let quad: Option<QuadForm> = if deg == 2 {
        QuadForm::from_binary(form)
            .ok()
            .filter(|q| q.is_positive_definite())
    } else {
        None
    };

    // Eligibility caches grow as chunks introduce new primes.
    let mut in_set: HashMap<u64, bool> = HashMap::new();
    let mut nf_coprime: HashMap<u64, bool> = HashMap::new();
    let mut entries: Vec<Entry> = Vec::with_capacity((hi - lo + 1) as usize);
    let mut truncated_bound: Option<u64> = None;

    with_series_chunks(rhs, lo, hi, limits, |series| {
        let mut new_primes: BTreeSet<u64> = BTreeSet::new();
        for prof in &series.profiles {
            for (p, _) in prof.iter() {
                if !in_set.contains_key(&p) {
                    new_primes.insert(p);
                }
            }
        }
        for &p in &new_primes {
            in_set.insert(p, pset_status(form, p) == PsetStatus::InSet);
            if opts.norm_form_rule {
                let pb = BigInt::from(p);
                let ok = !form.constant().mod_floor(&pb).is_zero()
                    && !form.disc().mod_floor(&pb).is_zero();
                nf_coprime.insert(p, ok);
            }
        }
        if series.truncated_at.is_some() {
            truncated_bound = series.truncated_at;
        }
        let truncated = series.truncated_at.is_some();
        let ls: Vec<u64> = (series.lo..series.lo + series.profiles.len() as u64).collect();
        let chunk: Vec<Entry> = ls
            .par_iter()
            .map(|&l| {
                decide_one(
                    l,
                    deg,
                    series,
                    &g_fact,
                    &in_set,
                    &nf_coprime,
                    quad.as_ref(),
                    truncated,
                    opts,
                    limits,
                )
            })
            .collect();
        entries.extend(chunk);
        Ok(())
    })?;

    let mut truncation = Vec::new();
    if let Some(b) = truncated_bound {
        truncation.push(format!(
            "right-hand-side profiles truncated at prime bound {b}"
        ));
    }
    Ok(SearchReport {
        equation: format!("{} = {}", form, rhs.describe()),
        range: RangeSpec { lo, hi },
        entries,
        meta: Some(Meta {
            runtime_ms: start.elapsed().as_millis() as u64,
            truncation,
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn decide_one(
    l: u64,
    deg: u64,
    series: &ProfileSeries,
    g_fact: &PrimeFactorization,
    in_set: &HashMap<u64, bool>,
    nf_coprime: &HashMap<u64, bool>,
    quad: Option<&QuadForm>,
    truncated: bool,
    opts: &CertifyOptions,
    limits: &Limits,
) -> Entry {
    let profile = series.at(l);
    let unstable = series.unstable_at(l);

    // Content must divide the target.
    for (q, ge) in g_fact.factors() {
        let p = q.to_u64().expect("content factors fit u64 in practice");
        let have = profile.get(p);
        if have < ge && !unstable.contains(&p) {
            let mut e = Entry::bare(l, VerdictKind::Blocked);
            e.prime = Some(p);
            e.exponent = Some(have);
            e.rule = Some(Rule::ContentDivisibility);
            return e;
        }
    }

    // Blocking candidates, stable exponents only. When the run speaks for a
    // full norm form, that rule labels the certificate (its conclusion is
    // the stronger one).
    let mut candidates: Vec<(u64, u64, Rule)> = Vec::new();
    for (p, e) in profile.iter() {
        if unstable.contains(&p) {
            continue;
        }
        if opts.norm_form_rule
            && e == 1
            && in_set.get(&p).copied().unwrap_or(false)
            && nf_coprime.get(&p).copied().unwrap_or(false)
        {
            candidates.push((p, 1, Rule::NormFormMinExponent));
            continue;
        }
        let vg = g_fact.exponent_of(&BigUint::from(p));
        let reduced = e.saturating_sub(vg);
        if deg >= 2 && reduced > 0 && reduced % deg != 0 && in_set.get(&p).copied().unwrap_or(false)
        {
            candidates.push((p, reduced, Rule::ExponentDivisibility));
        }
    }
    if !candidates.is_empty() {
        // Exponent-one witnesses are self-evidently indivisible; prefer them.
        candidates.sort_by_key(|&(p, e, _)| (e != 1, p));
        let (p, e, rule) = candidates[0];
        let mut entry = Entry::bare(l, VerdictKind::Blocked);
        entry.prime = Some(p);
        entry.exponent = Some(e);
        entry.rule = Some(rule);
        return entry;
    }

    if truncated {
        let mut e = Entry::bare(l, VerdictKind::Unknown);
        e.reason = Some("profile truncated; no stable blocking prime below the bound".into());
        return e;
    }

    // Full quadratic criterion, decisive at class number one.
    if let Some(q) = quad {
        let nf = fv_to_factorization(profile);
        match quadrep::representable_criterion(q, &nf) {
            Ok(RepVerdict::Representable) => {
                let mut entry = Entry::bare(l, VerdictKind::Representable);
                entry.rule = Some(Rule::QuadParity);
                entry.witness = witness_for(q, profile, limits);
                return entry;
            }
            Ok(RepVerdict::NotRepresentable(reason)) => {
                let mut entry = Entry::bare(l, VerdictKind::Blocked);
                entry.rule = Some(Rule::QuadParity);
                match reason {
                    NotRepReason::ContentMismatch { prime } => {
                        entry.prime = prime.to_u64();
                        entry.exponent = prime.to_u64().map(|p| profile.get(p));
                    }
                    NotRepReason::TwoAdicParity { exponent } => {
                        entry.prime = Some(2);
                        entry.exponent = Some(exponent);
                    }
                    NotRepReason::InertParity { prime, exponent } => {
                        entry.prime = prime.to_u64();
                        entry.exponent = Some(exponent);
                    }
                }
                return entry;
            }
            Err(_) => {}
        }
        // Criterion unsupported (class number, coefficient shape): complete
        // search still decides when the target is small enough.
        if let Ok(target) = profile.materialize(limits.max_digits) {
            let tb = BigInt::from(target);
            if let Ok(found) = quadrep::representable_bruteforce(q, &tb, limits) {
                return match found {
                    Some((x, y)) => {
                        let mut entry = Entry::bare(l, VerdictKind::Representable);
                        entry.rule = Some(Rule::CompleteSearch);
                        entry.witness = Some(vec![x.to_string(), y.to_string()]);
                        entry
                    }
                    None => {
                        let mut entry = Entry::bare(l, VerdictKind::NotRepresentable);
                        entry.rule = Some(Rule::CompleteSearch);
                        entry
                    }
                };
            }
        }
    }

    let mut e = Entry::bare(l, VerdictKind::Unknown);
    e.reason = Some("necessary conditions pass; no decision procedure applies".into());
    e
}

fn witness_for(
    q: &QuadForm,
    profile: &FactorizationVector,
    limits: &Limits,
) -> Option<Vec<String>> {
    let target = profile.materialize(limits.max_digits).ok()?;
    let tb = BigInt::from(target);
    match quadrep::representable_bruteforce(q, &tb, limits) {
        Ok(Some((x, y))) => Some(vec![x.to_string(), y.to_string()]),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Infinite family x^2 - y^2 = a!
// ---------------------------------------------------------------------------

#[derive(Serialize, Clone, Debug)]
pub struct FamilyEntry {
    pub a: u64,
    pub x: String,
    pub y: String,
    pub pass: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct FamilyReport {
    pub entries: Vec<FamilyEntry>,
    pub all_pass: bool,
}

/// Verify (a!/4 + 1)^2 - (a!/4 - 1)^2 = a! exactly for each a in the range.
pub fn family_check(lo: u64, hi: u64, limits: &Limits) -> Result<FamilyReport> {
    if lo < 4 {
        return Err(Error::Unsupported(
            "the family needs a >= 4 (a!/4 must be integral)".into(),
        ));
    }
    if hi < lo {
        return Err(Error::Parse(format!("bad range {lo}:{hi}")));
    }
    let mut fact = BigInt::one();
    for k in 1..=lo {
        fact *= BigInt::from(k);
    }
    let mut entries = Vec::new();
    let four = BigInt::from(4);
    let mut a = lo;
    loop {
        arith::check_digits(fact.bits(), limits.max_digits)?;
        let (u, r) = fact.div_rem(&four);
        debug_assert!(r.is_zero());
        let x: BigInt = &u + BigInt::one();
        let y: BigInt = &u - BigInt::one();
        let pass = (&x * &x - &y * &y) == fact;
        entries.push(FamilyEntry {
            a,
            x: x.to_string(),
            y: y.to_string(),
            pass,
        });
        if a == hi {
            break;
        }
        a += 1;
        fact *= BigInt::from(a);
    }
    let all_pass = entries.iter().all(|e| e.pass);
    Ok(FamilyReport { entries, all_pass })
}

// ---------------------------------------------------------------------------
// Empirical gap checks
// ---------------------------------------------------------------------------

/// Which primes count as eligible for the gap scan.
pub enum GapClass<'a> {
    Residue { a: u64, b: u64 },
    FormPset(&'a BinaryForm),
}

/// For each eligible p in [lo, hi] with ratio*p <= hi, require an eligible
/// successor in the open interval (p, ratio*p); returns the violators.
pub fn bertrand_gap_check(
    class: &GapClass,
    lo: u64,
    hi: u64,
    ratio: f64,
    limits: &Limits,
) -> Result<Vec<u64>> {
    if ratio <= 1.0 {
        return Err(Error::Unsupported("gap ratio must exceed 1".into()));
    }
    if hi > limits.sieve_bound {
        return Err(Error::BoundExceeded {
            what: "sieve endpoint",
            value: hi,
            bound: limits.sieve_bound,
        });
    }
    let eligible: Vec<u64> = match class {
        GapClass::Residue { a, b } => arith::primes_in(2, hi, Some((*a, *b)))?,
        GapClass::FormPset(form) => arith::sieve_primes(hi)
            .into_iter()
            .filter(|&p| pset_status(form, p) == PsetStatus::InSet)
            .collect(),
    };
    let mut violations = Vec::new();
    for (i, &p) in eligible.iter().enumerate() {
        if p < lo {
            continue;
        }
        let window_hi = ratio * p as f64;
        if window_hi > hi as f64 {
            break; // not enough sieved range to decide
        }
        let ok = eligible
            .get(i + 1)
            .map(|&q| (q as f64) < window_hi)
            .unwrap_or(false);
        if !ok {
            violations.push(p);
        }
    }
    Ok(violations)
}

// ---------------------------------------------------------------------------
// Parity scan
// ---------------------------------------------------------------------------

#[derive(Serialize, Clone, Debug)]
pub struct ParityEntry {
    pub l: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u64>,
}

#[derive(Serialize, Clone, Debug)]
pub struct ParityReport {
    pub delta: i64,
    pub source: String,
    pub entries: Vec<ParityEntry>,
}

/// Per-l parity conditions of the principal form of discriminant delta
/// against a profile source: the 2-adic condition when delta is 5 mod 8 and
/// evenness of every odd inert exponent, with the witnessing prime.
pub fn parity_blocker(
    delta: i64,
    source: &RhsKind,
    lo: u64,
    hi: u64,
    limits: &Limits,
) -> Result<ParityReport> {
    if matches!(source, RhsKind::Bhargava { .. }) {
        return Err(Error::Unsupported(
            "parity scans read exact profiles; generalized factorials are truncated".into(),
        ));
    }
    if !quadrep::is_fundamental(&BigInt::from(delta))? {
        return Err(Error::Unsupported(format!(
            "{delta} is not a fundamental discriminant"
        )));
    }
    let mut entries = Vec::with_capacity((hi - lo + 1) as usize);
    with_series_chunks(source, lo, hi, limits, |series| {
        for l in series.lo..series.lo + series.profiles.len() as u64 {
            let profile = series.at(l);
            let mut fail: Option<(u64, u64)> = None;
            for (p, e) in profile.iter() {
                if e % 2 == 0 {
                    continue;
                }
                let inert = if p == 2 {
                    delta.rem_euclid(8) == 5
                } else {
                    arith::kronecker_i64(delta, p) == -1
                };
                if inert {
                    fail = Some((p, e));
                    break;
                }
            }
            entries.push(match fail {
                Some((p, e)) => ParityEntry {
                    l,
                    pass: false,
                    prime: Some(p),
                    exponent: Some(e),
                },
                None => ParityEntry {
                    l,
                    pass: true,
                    prime: None,
                    exponent: None,
                },
            });
        }
        Ok(())
    })?;
    Ok(ParityReport {
        delta,
        source: source.describe(),
        entries,
    })
}

// ---------------------------------------------------------------------------
// Independent re-verification of reports
// ---------------------------------------------------------------------------

/// Re-check every certificate in a report from raw inputs: profiles are
/// rebuilt, eligibility is re-decided, and witnesses are re-evaluated.
pub fn verify_certify_report(
    form: &BinaryForm,
    rhs: &RhsKind,
    opts: &CertifyOptions,
    report: &SearchReport,
    limits: &Limits,
) -> Result<()> {
    let lo = report.range.lo;
    let hi = report.range.hi;
    let g_fact = arith::factorize(form.content(), &arith::Effort::default())?;
    let deg = form.degree() as u64;
    let mut by_l: HashMap<u64, &Entry> = HashMap::new();
    for e in &report.entries {
        by_l.insert(e.l, e);
    }
    if by_l.len() != (hi - lo + 1) as usize {
        return Err(Error::Unsupported(
            "report does not cover its range with one entry per l".into(),
        ));
    }
    with_series_chunks(rhs, lo, hi, limits, |series| {
        for l in series.lo..series.lo + series.profiles.len() as u64 {
            let entry = by_l[&l];
            let profile = series.at(entry.l);
            let fail = |why: &str| {
                Err(Error::Unsupported(format!(
                    "certificate at l = {} failed re-verification: {why}",
                    entry.l
                )))
            };
            match entry.verdict {
                VerdictKind::Blocked => {
                    let p = match entry.prime {
                        Some(p) => p,
                        None => return fail("blocked entry without a prime"),
                    };
                    let e = match entry.exponent {
                        Some(e) => e,
                        None => return fail("blocked entry without an exponent"),
                    };
                    match entry.rule {
                        Some(Rule::ContentDivisibility) => {
                            let ge = g_fact.exponent_of(&BigUint::from(p));
                            if profile.get(p) != e || e >= ge {
                                return fail("content divisibility does not re-check");
                            }
                        }
                        Some(Rule::ExponentDivisibility) => {
                            let vg = g_fact.exponent_of(&BigUint::from(p));
                            let reduced = profile.get(p).saturating_sub(vg);
                            if reduced != e || reduced % deg == 0 {
                                return fail("exponent does not re-check");
                            }
                            if pset_status(form, p) != PsetStatus::InSet {
                                return fail("prime is not eligible");
                            }
                        }
                        Some(Rule::NormFormMinExponent) => {
                            if !opts.norm_form_rule {
                                return fail("min-exponent rule was not enabled for this run");
                            }
                            if profile.get(p) != 1 || e != 1 {
                                return fail("min-exponent witness must be exactly 1");
                            }
                            if pset_status(form, p) != PsetStatus::InSet {
                                return fail("prime is not eligible");
                            }
                            let pb = BigInt::from(p);
                            if form.constant().mod_floor(&pb).is_zero()
                                || form.disc().mod_floor(&pb).is_zero()
                            {
                                return fail("prime meets the excluded divisors");
                            }
                        }
                        Some(Rule::QuadParity) => {
                            let q = QuadForm::from_binary(form)
                                .map_err(|_| Error::InvalidForm("not quadratic".into()))?;
                            let nf = fv_to_factorization(profile);
                            match quadrep::representable_criterion(&q, &nf) {
                                Ok(RepVerdict::NotRepresentable(reason)) => {
                                    let (rp, re) = match reason {
                                        NotRepReason::ContentMismatch { prime } => {
                                            (prime.to_u64(), entry.exponent)
                                        }
                                        NotRepReason::TwoAdicParity { exponent } => {
                                            (Some(2), Some(exponent))
                                        }
                                        NotRepReason::InertParity { prime, exponent } => {
                                            (prime.to_u64(), Some(exponent))
                                        }
                                    };
                                    if rp != entry.prime || re != entry.exponent {
                                        return fail("parity witness does not match");
                                    }
                                }
                                _ => return fail("criterion no longer blocks"),
                            }
                        }
                        _ => return fail("blocked entry with an unexpected rule"),
                    }
                }
                VerdictKind::Representable => match &entry.witness {
                    Some(w) => {
                        if w.len() != 2 {
                            return fail("witness needs two coordinates");
                        }
                        let x: BigInt = w[0].parse().map_err(|_| Error::Parse("witness".into()))?;
                        let y: BigInt = w[1].parse().map_err(|_| Error::Parse("witness".into()))?;
                        let target = BigInt::from(profile.materialize(limits.max_digits)?);
                        if form.eval(&x, &y) != target {
                            return fail("witness does not evaluate to the target");
                        }
                    }
                    None => {
                        let q = QuadForm::from_binary(form)
                            .map_err(|_| Error::InvalidForm("not quadratic".into()))?;
                        let nf = fv_to_factorization(profile);
                        if !matches!(
                            quadrep::representable_criterion(&q, &nf),
                            Ok(RepVerdict::Representable)
                        ) {
                            return fail("criterion no longer proves representability");
                        }
                    }
                },
                VerdictKind::NotRepresentable => {
                    let q = QuadForm::from_binary(form)
                        .map_err(|_| Error::InvalidForm("not quadratic".into()))?;
                    let target = BigInt::from(profile.materialize(limits.max_digits)?);
                    if quadrep::representable_bruteforce(&q, &target, limits)?.is_some() {
                        return fail("complete search now finds a witness");
                    }
                }
                VerdictKind::Unknown => {}
                _ => return fail("unexpected verdict kind in a certify report"),
            }
        }
        Ok(())
    })?;
    Ok(())
}

/// Re-check a search report for P(x) = l! without the sieve: every l is
/// decided by materialize-and-root, and sieve exclusions must agree.
pub fn verify_brocard_report(
    coeffs_asc: &[BigInt],
    report: &SearchReport,
    limits: &Limits,
) -> Result<()> {
    let mut fact = BigInt::one();
    let mut by_l: HashMap<u64, &Entry> = HashMap::new();
    for e in &report.entries {
        by_l.insert(e.l, e);
    }
    for l in 1..=report.range.hi {
        fact *= BigInt::from(l);
        if l < report.range.lo {
            continue;
        }
        let entry = by_l
            .get(&l)
            .ok_or_else(|| Error::Unsupported(format!("report misses l = {l}")))?;
        let roots = integer_roots(coeffs_asc, &fact, limits)?;
        let expect: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
        match entry.verdict {
            VerdictKind::Solution => {
                if entry.witness.as_deref() != Some(&expect[..]) {
                    return Err(Error::Unsupported(format!(
                        "solutions at l = {l} do not re-check"
                    )));
                }
            }
            VerdictKind::NoSolution => {
                if !roots.is_empty() {
                    return Err(Error::Unsupported(format!(
                        "root search finds solutions at l = {l} but the report excludes it"
                    )));
                }
            }
            _ => return Err(Error::Unsupported(format!("unexpected verdict at l = {l}"))),
        }
    }
    Ok(())
}
