//! Generalized factorials over subsets of the integers: greedy p-orderings
//! with a window-doubling stability check, closed forms for arithmetic
//! progressions, the quadratic-image valuation table, and radical-growth
//! evidence tables.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith;
use crate::genfact::FactorizationVector;
use crate::{Error, Result};

pub const DEFAULT_WINDOW_MULTIPLIER: u32 = 8;

/// An infinite subset of the integers we can enumerate, or an explicit
/// finite window taken as authoritative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BhargavaSet {
    Integers,
    /// { step * n + offset }, step nonzero.
    Ap { step: i64, offset: i64 },
    /// { f(n) } for a non-constant integer polynomial of degree <= 3,
    /// coefficients descending.
    PolyImage { coeffs: Vec<i64> },
    /// Explicit distinct elements, used as-is.
    Window { values: Vec<i64> },
}

impl BhargavaSet {
    pub fn ap(step: i64, offset: i64) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidForm("progression step must be nonzero".into()));
        }
        Ok(BhargavaSet::Ap { step, offset })
    }

    pub fn poly_image(coeffs_desc: Vec<i64>) -> Result<Self> {
        let lead_zeros = coeffs_desc.iter().take_while(|&&c| c == 0).count();
        let trimmed: Vec<i64> = coeffs_desc[lead_zeros..].to_vec();
        if trimmed.len() < 2 || trimmed.len() > 4 {
            return Err(Error::InvalidForm(
                "polynomial image needs degree 1..=3 and a non-constant polynomial".into(),
            ));
        }
        Ok(BhargavaSet::PolyImage { coeffs: trimmed })
    }

    pub fn window(values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidForm("empty window".into()));
        }
        let mut sorted = values.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != values.len() {
            return Err(Error::InvalidForm("window elements must be distinct".into()));
        }
        Ok(BhargavaSet::Window { values })
    }

    /// Closed-form valuation when the descriptor admits one:
    /// the ordinary factorial for Z, step^l * l! for progressions.
    fn closed_form(&self) -> Option<ClosedForm> {
        match self {
            BhargavaSet::Integers => Some(ClosedForm { step: 1 }),
            BhargavaSet::Ap { step, .. } => Some(ClosedForm {
                step: step.unsigned_abs(),
            }),
            _ => None,
        }
    }

    /// Enumerate `want` distinct elements.
    fn enumerate(&self, want: usize) -> Result<Vec<i64>> {
        let mut out = Vec::with_capacity(want);
        match self {
            BhargavaSet::Integers => {
                for k in 0..want as i64 {
                    out.push(k);
                }
            }
            BhargavaSet::Ap { step, offset } => {
                for k in 0..want as i64 {
                    let v = step
                        .checked_mul(k)
                        .and_then(|t| t.checked_add(*offset))
                        .ok_or_else(|| Error::Overflow("progression element".into()))?;
                    out.push(v);
                }
            }
            BhargavaSet::PolyImage { coeffs } => {
                let mut seen = std::collections::HashSet::new();
                let mut n = 0i64;
                let cap = 8 * want as i64 + 64;
                while out.len() < want {
                    for v in [n, -n] {
                        if out.len() >= want {
                            break;
                        }
                        let val = eval_i64(coeffs, v)?;
                        if seen.insert(val) {
                            out.push(val);
                        }
                        if v == 0 {
                            break;
                        }
                    }
                    n += 1;
                    if n > cap {
                        return Err(Error::Overflow(
                            "polynomial image enumeration stalled".into(),
                        ));
                    }
                }
            }
            BhargavaSet::Window { values } => {
                out.extend_from_slice(values);
            }
        }
        Ok(out)
    }

    #[cfg(test)]
    fn enumerate_starts(&self, n: usize) -> Vec<i64> {
        self.enumerate(n).unwrap()
    }

    pub fn describe(&self) -> String {
        match self {
            BhargavaSet::Integers => "Z".into(),
            BhargavaSet::Ap { step, offset } => format!("AP {step} {offset}"),
            BhargavaSet::PolyImage { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                format!("POLY {}", parts.join(" "))
            }
            BhargavaSet::Window { values } => format!("WINDOW ({} values)", values.len()),
        }
    }
}

struct ClosedForm {
    step: u64,
}

fn eval_i64(coeffs_desc: &[i64], x: i64) -> Result<i64> {
    let mut acc = 0i128;
    for &c in coeffs_desc {
        acc = acc * x as i128 + c as i128;
    }
    i64::try_from(acc).map_err(|_| Error::Overflow("polynomial value".into()))
}

fn vp_i64(x: i64, p: u64) -> u64 {
    debug_assert!(x != 0);
    let mut m = x.unsigned_abs();
    let mut e = 0;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    e
}

/// A greedy p-ordering over a finite window with its valuation sequence.
/// `values[n]` is the valuation of prod_{k<n} (a_n - a_k); unstable entries
/// are upper bounds only (the doubled window still lowered the minimum).
#[derive(Clone, Debug, Serialize)]
pub struct PSequence {
    pub prime: u64,
    pub ordering: Vec<i64>,
    pub values: Vec<u64>,
    pub stable: Vec<bool>,
}

/// Greedy p-ordering of length `len + 1` (indices 0..=len) with the default
/// window multiplier.
pub fn p_ordering(set: &BhargavaSet, p: u64, len: u64) -> Result<PSequence> {
    p_ordering_opts(set, p, len, DEFAULT_WINDOW_MULTIPLIER)
}

/// Greedy p-ordering with an explicit window multiplier: the base window
/// holds `max(64, multiplier * (len+1) * p)` set elements and the run is
/// repeated at twice that size; an index is stable when both runs agree.
pub fn p_ordering_opts(
    set: &BhargavaSet,
    p: u64,
    len: u64,
    multiplier: u32,
) -> Result<PSequence> {
    if !arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if let BhargavaSet::Window { values } = set {
        if (len as usize) >= values.len() {
            return Err(Error::BoundExceeded {
                what: "ordering length over an explicit window",
                value: len,
                bound: values.len() as u64 - 1,
            });
        }
        let (ordering, values) = greedy(&set.enumerate(values.len())?, p, len as usize, None);
        let stable = vec![true; values.len()];
        return Ok(PSequence {
            prime: p,
            ordering,
            values,
            stable,
        });
    }

    let base = window_size(p, len, multiplier);
    let small = set.enumerate(base)?;
    let big = set.enumerate(base * 2)?;
    let (_, v_small) = greedy(&small, p, len as usize, None);
    let (ordering, v_big) = greedy(&big, p, len as usize, None);
    let stable: Vec<bool> = v_small
        .iter()
        .zip(v_big.iter())
        .map(|(a, b)| a == b)
        .collect();
    Ok(PSequence {
        prime: p,
        ordering,
        values: v_big,
        stable,
    })
}

/// Same greedy run but pinned to a chosen first element; the valuation
/// sequence must not depend on this choice on stable indices.
pub fn p_ordering_with_first(
    set: &BhargavaSet,
    p: u64,
    len: u64,
    first: i64,
) -> Result<PSequence> {
    if !arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let base = match set {
        BhargavaSet::Window { values } => values.len(),
        _ => window_size(p, len, DEFAULT_WINDOW_MULTIPLIER),
    };
    let window = set.enumerate(base)?;
    if !window.contains(&first) {
        return Err(Error::InvalidForm(format!(
            "{first} is not in the enumerated window of {}",
            set.describe()
        )));
    }
    let (ordering, values) = greedy(&window, p, len as usize, Some(first));
    let stable = vec![true; values.len()];
    Ok(PSequence {
        prime: p,
        ordering,
        values,
        stable,
    })
}

fn window_size(p: u64, len: u64, multiplier: u32) -> usize {
    (64u64.max(multiplier as u64 * (len + 1) * p)) as usize
}

/// Greedy minimization: each step picks an unused window element minimizing
/// the accumulated valuation sum, tie-broken by smallest absolute value,
/// positive first. Any valid choice yields the same valuation sequence; the
/// tie-break only fixes which ordering gets reported.
fn greedy(window: &[i64], p: u64, len: usize, first: Option<i64>) -> (Vec<i64>, Vec<u64>) {
    let n = window.len();
    let mut used = vec![false; n];
    let mut acc = vec![0u64; n];
    let mut ordering = Vec::with_capacity(len + 1);
    let mut values = Vec::with_capacity(len + 1);

    let a0_idx = match first {
        Some(f) => window.iter().position(|&x| x == f).expect("checked by caller"),
        None => {
            let mut best = 0usize;
            for i in 1..n {
                if tie_key(window[i]) < tie_key(window[best]) {
                    best = i;
                }
            }
            best
        }
    };
    used[a0_idx] = true;
    ordering.push(window[a0_idx]);
    values.push(0);
    let mut last = window[a0_idx];

    for _ in 1..=len {
        for i in 0..n {
            if !used[i] {
                acc[i] += vp_i64(window[i] - last, p);
            }
        }
        let mut best: Option<usize> = None;
        for i in 0..n {
            if used[i] {
                continue;
            }
            best = Some(match best {
                None => i,
                Some(b) => {
                    if (acc[i], tie_key(window[i])) < (acc[b], tie_key(window[b])) {
                        i
                    } else {
                        b
                    }
                }
            });
        }
        let b = best.expect("window larger than requested length");
        used[b] = true;
        ordering.push(window[b]);
        values.push(acc[b]);
        last = window[b];
    }
    (ordering, values)
}

fn tie_key(x: i64) -> (u64, bool) {
    (x.unsigned_abs(), x < 0)
}

// ---------------------------------------------------------------------------
// Per-set valuation tables and profiles
// ---------------------------------------------------------------------------

/// Valuations v_p(l; S) for all l <= len at every tracked prime, with
/// stability flags. Closed-form descriptors are exact and untruncated;
/// enumerated descriptors are truncated at the prime bound.
#[derive(Clone, Debug)]
pub struct SetValuations {
    pub len: u64,
    pub per_prime: BTreeMap<u64, (Vec<u64>, Vec<bool>)>,
    pub truncated_at: Option<u64>,
}

/// Compute the valuation table once; profiles for every l <= len read off it.
pub fn valuations_upto(
    set: &BhargavaSet,
    len: u64,
    prime_bound: u64,
    multiplier: u32,
) -> Result<SetValuations> {
    let mut per_prime = BTreeMap::new();
    match set.closed_form() {
        Some(cf) => {
            let mut primes = arith::sieve_primes(len);
            for (p, _) in arith::factor_u64(cf.step.max(1)) {
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
            primes.sort_unstable();
            for p in primes {
                let step_v = if cf.step > 0 { vp_i64(cf.step as i64, p) } else { 0 };
                let mut vals = Vec::with_capacity(len as usize + 1);
                let mut acc = 0u64;
                vals.push(0);
                for l in 1..=len {
                    acc += if l % p == 0 { vp_i64(l as i64, p) } else { 0 };
                    vals.push(acc + step_v * l);
                }
                let stable = vec![true; vals.len()];
                per_prime.insert(p, (vals, stable));
            }
            Ok(SetValuations {
                len,
                per_prime,
                truncated_at: None,
            })
        }
        None => {
            for p in arith::sieve_primes(prime_bound) {
                let seq = p_ordering_opts(set, p, len, multiplier)?;
                per_prime.insert(p, (seq.values, seq.stable));
            }
            Ok(SetValuations {
                len,
                per_prime,
                truncated_at: Some(prime_bound),
            })
        }
    }
}

/// Exponent vector of the generalized factorial, with truncation and
/// stability flags carried along.
#[derive(Clone, Debug, Serialize)]
pub struct BhargavaProfile {
    pub vector: FactorizationVector,
    pub truncated_at: Option<u64>,
    pub unstable_primes: Vec<u64>,
}

pub fn profile_from(vals: &SetValuations, l: u64) -> BhargavaProfile {
    assert!(l <= vals.len);
    let mut vector = FactorizationVector::new();
    let mut unstable = Vec::new();
    for (&p, (vs, stable)) in &vals.per_prime {
        let v = vs[l as usize];
        if v > 0 {
            vector.add(p, v);
        }
        if !stable[l as usize] {
            unstable.push(p);
        }
    }
    BhargavaProfile {
        vector,
        truncated_at: vals.truncated_at,
        unstable_primes: unstable,
    }
}

/// Exponent vector of `l!_S` over primes up to `prime_bound` (closed forms
/// ignore the bound and are exact).
pub fn profile(set: &BhargavaSet, l: u64, prime_bound: u64) -> Result<BhargavaProfile> {
    let vals = valuations_upto(set, l, prime_bound, DEFAULT_WINDOW_MULTIPLIER)?;
    Ok(profile_from(&vals, l))
}

// ---------------------------------------------------------------------------
// Closed-form image facts
// ---------------------------------------------------------------------------

/// Valuation of l!_S for S the image of a quadratic f = ax^2+bx+c at an odd
/// prime not dividing a, valid for 0 <= l <= p: zero through (p-1)/2, one
/// through p-1, two at l = p.
pub fn quad_image_valuation(p: u64, l: u64, quad_coeffs: (i64, i64, i64)) -> Result<u8> {
    if !arith::is_prime_u64(p) || p == 2 {
        return Err(Error::NotPrime(format!("{p} (need an odd prime)")));
    }
    let (a, _b, _c) = quad_coeffs;
    if a == 0 || a.unsigned_abs() % p == 0 {
        return Err(Error::Unsupported(
            "the quadratic image table needs p not dividing the leading coefficient".into(),
        ));
    }
    if l > p {
        return Err(Error::Unsupported(format!(
            "the image valuation table stops at l = p (asked for l = {l}, p = {p})"
        )));
    }
    Ok(if l <= (p - 1) / 2 {
        0
    } else if l < p {
        1
    } else {
        2
    })
}

/// Size of the cube image mod p: (p+2)/3 when p = 1 mod 3, otherwise p
/// (cubing is then a bijection).
pub fn cube_image_count(p: u64) -> u64 {
    if p % 3 == 1 {
        p.div_ceil(3)
    } else {
        p
    }
}

// ---------------------------------------------------------------------------
// Radical growth evidence
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub l: u64,
    pub log_radical: f64,
    pub log_value: f64,
    pub ratio: f64,
    pub truncated: bool,
}

/// Raw monotone evidence for radical smallness: per l, the log of the
/// radical of l!_S (restricted to tracked primes) against the log of l!_S
/// itself. No asymptotic claim is made.
pub fn radical_growth_report(
    set: &BhargavaSet,
    lo: u64,
    hi: u64,
    prime_bound: u64,
) -> Result<Vec<GrowthRow>> {
    if lo > hi {
        return Err(Error::Parse("empty range".into()));
    }
    let vals = valuations_upto(set, hi, prime_bound, DEFAULT_WINDOW_MULTIPLIER)?;
    let mut out = Vec::new();
    for l in lo..=hi {
        let prof = profile_from(&vals, l);
        let log_value = prof.vector.log_value();
        let log_radical = prof.vector.log_radical();
        out.push(GrowthRow {
            l,
            log_radical,
            log_value,
            ratio: if log_value > 0.0 {
                log_radical / log_value
            } else {
                1.0
            },
            truncated: prof.truncated_at.is_some(),
        });
    }
    Ok(out)
}
