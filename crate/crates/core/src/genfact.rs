//! Exponent profiles of factorial-like right-hand sides: l!, lcm(1..l),
//! primorials, central multinomials, and the product of all ideal norms up
//! to l in a quadratic (or user-profiled) number field. Everything stays in
//! factored view; nothing here materializes the underlying integer unless
//! explicitly asked to.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::arith;
use crate::{Error, Limits, Result};

/// Sparse prime-to-exponent map. No zero exponents are stored; exponent
/// queries never materialize the product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FactorizationVector {
    exps: BTreeMap<u64, u64>,
}

impl FactorizationVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(u64, u64)]) -> Self {
        let mut v = Self::new();
        for &(p, e) in pairs {
            v.add(p, e);
        }
        v
    }

    pub fn get(&self, p: u64) -> u64 {
        self.exps.get(&p).copied().unwrap_or(0)
    }

    pub fn add(&mut self, p: u64, e: u64) {
        if e > 0 {
            *self.exps.entry(p).or_insert(0) += e;
        }
    }

    pub fn set(&mut self, p: u64, e: u64) {
        if e == 0 {
            self.exps.remove(&p);
        } else {
            self.exps.insert(p, e);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.exps.iter().map(|(&p, &e)| (p, e))
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    /// Natural log of the represented value; reporting only, about 1e-9
    /// relative accuracy.
    pub fn log_value(&self) -> f64 {
        self.iter().map(|(p, e)| e as f64 * (p as f64).ln()).sum()
    }

    /// Natural log of the radical (product of the distinct primes).
    pub fn log_radical(&self) -> f64 {
        self.iter().map(|(p, _)| (p as f64).ln()).sum()
    }

    /// Build the integer, subject to the digit bound.
    pub fn materialize(&self, max_digits: usize) -> Result<BigUint> {
        let digits_est = self.log_value() / std::f64::consts::LN_10;
        if digits_est > max_digits as f64 {
            return Err(Error::DigitBound {
                digits: digits_est as usize + 1,
                bound: max_digits,
            });
        }
        let mut acc = BigUint::one();
        for (p, e) in self.iter() {
            acc *= BigUint::from(p).pow(e as u32);
        }
        Ok(acc)
    }

    /// Exponent-wise difference; None when any exponent would go negative.
    pub fn difference(&self, other: &FactorizationVector) -> Option<FactorizationVector> {
        let mut out = self.clone();
        for (p, e) in other.iter() {
            let have = out.get(p);
            if have < e {
                return None;
            }
            out.set(p, have - e);
        }
        Some(out)
    }
}

/// Highly divisible sequence selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HSeqKind {
    Factorial,
    Lcm,
    Primorial,
    Multinomial(u64),
}

impl std::fmt::Display for HSeqKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HSeqKind::Factorial => write!(f, "factorial"),
            HSeqKind::Lcm => write!(f, "lcm"),
            HSeqKind::Primorial => write!(f, "primorial"),
            HSeqKind::Multinomial(a) => write!(f, "multinomial:{a}"),
        }
    }
}

/// Exponent profile of the l-th term of a highly divisible sequence.
///
/// Factorial uses Legendre's sums, lcm uses floor(log_p l), the primorial
/// marks the first l primes, and multinomial(a) is the profile of
/// (al)! / (l!)^a.
pub fn hseq_profile(kind: HSeqKind, l: u64, limits: &Limits) -> Result<FactorizationVector> {
    if l < 1 {
        return Err(Error::BoundExceeded {
            what: "sequence index (needs l >= 1)",
            value: l,
            bound: 1,
        });
    }
    let check = |v: u64| -> Result<()> {
        if v > limits.hseq_l_bound {
            return Err(Error::BoundExceeded {
                what: "sequence index",
                value: v,
                bound: limits.hseq_l_bound,
            });
        }
        Ok(())
    };
    let mut out = FactorizationVector::new();
    match kind {
        HSeqKind::Factorial => {
            check(l)?;
            for p in arith::sieve_primes(l) {
                out.add(p, arith::factorial_valuation(p, l));
            }
        }
        HSeqKind::Lcm => {
            check(l)?;
            for p in arith::sieve_primes(l) {
                let mut e = 0u64;
                let mut q = p;
                while q <= l {
                    e += 1;
                    match q.checked_mul(p) {
                        Some(next) => q = next,
                        None => break,
                    }
                }
                out.add(p, e);
            }
        }
        HSeqKind::Primorial => {
            check(l)?;
            let mut bound = 16u64.max((l as f64 * ((l as f64).ln() + 3.0)) as u64);
            loop {
                let primes = arith::sieve_primes(bound);
                if primes.len() as u64 >= l {
                    for &p in primes.iter().take(l as usize) {
                        out.add(p, 1);
                    }
                    break;
                }
                bound *= 2;
            }
        }
        HSeqKind::Multinomial(a) => {
            if a < 2 {
                return Err(Error::Unsupported(
                    "multinomial sequences need a >= 2".into(),
                ));
            }
            let al = a.checked_mul(l).ok_or_else(|| Error::Overflow("a*l".into()))?;
            check(al)?;
            for p in arith::sieve_primes(al) {
                let big = arith::factorial_valuation(p, al);
                let small = a * arith::factorial_valuation(p, l);
                debug_assert!(big >= small);
                out.add(p, big - small);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Splitting data and ideal counting
// ---------------------------------------------------------------------------

/// Local data at one prime: ramified, or the multiset of inertia degrees of
/// the primes above p (degree -> how many).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalSplitting {
    Ramified,
    Unramified { counts: BTreeMap<u32, u32> },
}

impl LocalSplitting {
    pub fn from_cycle_type(parts: &[u32]) -> Self {
        let mut counts = BTreeMap::new();
        for &d in parts {
            *counts.entry(d).or_insert(0) += 1;
        }
        LocalSplitting::Unramified { counts }
    }

    /// Number of primes above p with inertia degree i.
    pub fn g(&self, i: u32) -> u32 {
        match self {
            LocalSplitting::Ramified => 0,
            LocalSplitting::Unramified { counts } => counts.get(&i).copied().unwrap_or(0),
        }
    }
}

/// Per-prime cycle types supplied as a text table. Lines are
/// `p f_1,f_2,...,f_r` or `p ramified`; `#` starts a comment. Queries at
/// primes absent from the table fail loudly.
#[derive(Clone, Debug)]
pub struct SplittingTable {
    degree: u32,
    entries: BTreeMap<u64, LocalSplitting>,
}

impl SplittingTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut degree: Option<u32> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let p: u64 = it
                .next()
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad prime", lineno + 1)))?;
            if !arith::is_prime_u64(p) {
                return Err(Error::Parse(format!("line {}: {p} is not prime", lineno + 1)));
            }
            let rest = it.next().ok_or_else(|| {
                Error::Parse(format!("line {}: missing cycle type", lineno + 1))
            })?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("line {}: trailing tokens", lineno + 1)));
            }
            let local = if rest.eq_ignore_ascii_case("ramified") {
                LocalSplitting::Ramified
            } else {
                let parts: Vec<u32> = rest
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .ok()
                            .filter(|&v| v >= 1)
                            .ok_or_else(|| {
                                Error::Parse(format!("line {}: bad inertia degree", lineno + 1))
                            })
                    })
                    .collect::<Result<_>>()?;
                let sum: u32 = parts.iter().sum();
                match degree {
                    None => degree = Some(sum),
                    Some(k) if k == sum => {}
                    Some(k) => {
                        return Err(Error::Parse(format!(
                            "line {}: inertia degrees sum to {sum}, expected {k}",
                            lineno + 1
                        )))
                    }
                }
                LocalSplitting::from_cycle_type(&parts)
            };
            if entries.insert(p, local).is_some() {
                return Err(Error::Parse(format!("duplicate prime {p} in table")));
            }
        }
        let degree = degree.ok_or_else(|| {
            Error::Parse("table needs at least one unramified line".into())
        })?;
        Ok(SplittingTable { degree, entries })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// Field descriptor: a quadratic field by fundamental discriminant, or a
/// user-supplied splitting table.
#[derive(Clone, Debug)]
pub enum FieldSplitting {
    Quadratic { delta: i64 },
    Table(SplittingTable),
}

impl FieldSplitting {
    pub fn quadratic(delta: i64) -> Result<Self> {
        if !crate::quadrep::is_fundamental(&delta.into())? {
            return Err(Error::Unsupported(format!(
                "{delta} is not a fundamental discriminant"
            )));
        }
        Ok(FieldSplitting::Quadratic { delta })
    }

    pub fn degree(&self) -> u32 {
        match self {
            FieldSplitting::Quadratic { .. } => 2,
            FieldSplitting::Table(t) => t.degree(),
        }
    }

    pub fn local(&self, p: u64) -> Result<LocalSplitting> {
        match self {
            FieldSplitting::Quadratic { delta } => Ok(match arith::kronecker_i64(*delta, p) {
                1 => LocalSplitting::from_cycle_type(&[1, 1]),
                -1 => LocalSplitting::from_cycle_type(&[2]),
                _ => LocalSplitting::Ramified,
            }),
            FieldSplitting::Table(t) => t
                .entries
                .get(&p)
                .cloned()
                .ok_or_else(|| Error::Unsupported(format!("prime {p} absent from the splitting table"))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FieldSplitting::Quadratic { delta } => format!("quadratic:{delta}"),
            FieldSplitting::Table(t) => format!("table(degree {})", t.degree()),
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Number of ideals of norm p^m over the local splitting data: stars-and-
/// bars composition over the inertia degrees,
/// sum over a_1 + 2 a_2 + ... + m a_m = m of prod C(G(i) + a_i - 1, a_i).
/// Ramified primes count one ideal per norm by convention (the unique prime
/// above p in the quadratic case).
pub fn ideal_count_prime_power(local: &LocalSplitting, m: u64) -> u64 {
    if m == 0 {
        return 1;
    }
    match local {
        LocalSplitting::Ramified => 1,
        LocalSplitting::Unramified { counts } => {
            let degs: Vec<(u32, u32)> = counts
                .iter()
                .filter(|&(_, &g)| g > 0)
                .map(|(&d, &g)| (d, g))
                .collect();
            count_rec(&degs, 0, m)
        }
    }
}

fn count_rec(degs: &[(u32, u32)], idx: usize, rem: u64) -> u64 {
    if rem == 0 {
        return 1;
    }
    if idx == degs.len() {
        return 0;
    }
    let (d, g) = degs[idx];
    let d = d as u64;
    let mut total = 0u64;
    let mut a = 0u64;
    while a * d <= rem {
        let ways = binomial(g as u64 + a - 1, a);
        if ways > 0 {
            total += ways * count_rec(degs, idx + 1, rem - a * d);
        }
        a += 1;
    }
    total
}

/// Number of ideals of norm n, multiplicative over prime powers.
pub fn ideal_count(field: &FieldSplitting, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let mut acc = 1u64;
    for (p, e) in arith::factor_u64(n) {
        acc *= ideal_count_prime_power(&field.local(p)?, e as u64);
        if acc == 0 {
            return Ok(0);
        }
    }
    Ok(acc)
}

/// a(n) for all n <= l. For quadratic fields this is the divisor sum
/// sum_{d | n} (delta | d) computed by convolution; for tables it is the
/// multiplicative extension of the prime-power counts.
pub fn ideal_counts_upto(field: &FieldSplitting, l: u64) -> Result<Vec<i64>> {
    let n = l as usize;
    let mut a = vec![0i64; n + 1];
    if n >= 1 {
        a[1] = 1;
    }
    match field {
        FieldSplitting::Quadratic { delta } => {
            let spf = arith::smallest_prime_factors(n);
            // chi is completely multiplicative
            let mut chi = vec![0i8; n + 1];
            if n >= 1 {
                chi[1] = 1;
            }
            for d in 2..=n {
                let p = spf[d] as usize;
                let cp = arith::kronecker_i64(*delta, p as u64);
                chi[d] = chi[d / p] * cp;
            }
            for (d, &chi_d) in chi.iter().enumerate().skip(1) {
                let c = chi_d as i64;
                if c == 0 {
                    continue;
                }
                let mut m = d;
                while m <= n {
                    a[m] += c;
                    m += d;
                }
            }
            if n >= 1 {
                a[1] = 1;
            }
        }
        FieldSplitting::Table(_) => {
            let spf = arith::smallest_prime_factors(n);
            for m in 2..=n {
                let p = spf[m] as usize;
                let mut rest = m;
                let mut e = 0u64;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                let local = field.local(p as u64)?;
                a[m] = a[rest] * ideal_count_prime_power(&local, e) as i64;
            }
        }
    }
    Ok(a)
}

/// Exponent profile of the product of all ideal norms at most l:
/// v_p = sum_{n <= l} a(n) * v_p(n), computed per prime power without
/// materializing the product.
pub fn pi_profile(field: &FieldSplitting, l: u64, limits: &Limits) -> Result<FactorizationVector> {
    if l < 1 {
        return Err(Error::BoundExceeded {
            what: "norm threshold (needs l >= 1)",
            value: l,
            bound: 1,
        });
    }
    if l > limits.pik_l_bound {
        return Err(Error::BoundExceeded {
            what: "norm threshold",
            value: l,
            bound: limits.pik_l_bound,
        });
    }
    let counts = ideal_counts_upto(field, l)?;
    let mut out = FactorizationVector::new();
    for p in arith::sieve_primes(l) {
        let mut total = 0u64;
        let mut q = p;
        while q <= l {
            let mut m = q;
            while m <= l {
                total += counts[m as usize] as u64;
                m += q;
            }
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
        }
        out.add(p, total);
    }
    Ok(out)
}

/// Eligible prime of least exponent in the vector (ties to the smaller
/// prime). None when no eligible prime divides.
pub fn min_exponent_prime<F: Fn(u64) -> bool>(
    v: &FactorizationVector,
    eligible: F,
) -> Option<(u64, u64)> {
    let mut best: Option<(u64, u64)> = None;
    for (p, e) in v.iter() {
        if !eligible(p) {
            continue;
        }
        match best {
            Some((_, be)) if be <= e => {}
            _ => best = Some((p, e)),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn factorial_profile_of_ten() {
        let v = hseq_profile(HSeqKind::Factorial, 10, &limits()).unwrap();
        assert_eq!(v.get(2), 8);
        assert_eq!(v.get(3), 4);
        assert_eq!(v.get(5), 2);
        assert_eq!(v.get(7), 1);
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn lcm_profile_of_ten() {
        let v = hseq_profile(HSeqKind::Lcm, 10, &limits()).unwrap();
        assert_eq!(
            v.materialize(100).unwrap(),
            BigUint::from(2520u32)
        );
    }

    #[test]
    fn primorial_profile() {
        let v = hseq_profile(HSeqKind::Primorial, 4, &limits()).unwrap();
        let pairs: Vec<(u64, u64)> = v.iter().collect();
        assert_eq!(pairs, vec![(2, 1), (3, 1), (5, 1), (7, 1)]);
    }

    #[test]
    fn multinomial_profile() {
        // C(4,2) = 6
        let v = hseq_profile(HSeqKind::Multinomial(2), 2, &limits()).unwrap();
        assert_eq!(v.get(2), 1);
        assert_eq!(v.get(3), 1);
        assert_eq!(v.len(), 2);
        assert!(hseq_profile(HSeqKind::Multinomial(1), 2, &limits()).is_err());
    }

    #[test]
    fn factorial_materializes_for_small_l() {
        let mut fact = BigUint::one();
        for l in 1u64..=20 {
            fact *= BigUint::from(l);
            let v = hseq_profile(HSeqKind::Factorial, l, &limits()).unwrap();
            assert_eq!(v.materialize(1000).unwrap(), fact, "l = {l}");
        }
    }

    #[test]
    fn prime_power_counts() {
        let split = LocalSplitting::from_cycle_type(&[1, 1]);
        assert_eq!(ideal_count_prime_power(&split, 2), 3);
        let inert = LocalSplitting::from_cycle_type(&[2]);
        assert_eq!(ideal_count_prime_power(&inert, 3), 0);
        assert_eq!(ideal_count_prime_power(&inert, 4), 1);
        assert_eq!(ideal_count_prime_power(&split, 0), 1);
        assert_eq!(ideal_count_prime_power(&LocalSplitting::Ramified, 5), 1);
    }

    #[test]
    fn parity_of_prime_power_counts() {
        // All odd-index multiplicities even forces even counts at odd m.
        for g1 in [0u32, 2, 4] {
            let mut parts = vec![2u32; 1]; // one degree-2 prime as filler
            parts.extend(std::iter::repeat_n(1, g1 as usize));
            let local = LocalSplitting::from_cycle_type(&parts);
            for m in (1..=11u64).step_by(2) {
                let c = ideal_count_prime_power(&local, m);
                assert_eq!(c % 2, 0, "g1={g1} m={m} count={c}");
            }
        }
    }

    #[test]
    fn gaussian_ideal_counts() {
        let field = FieldSplitting::quadratic(-4).unwrap();
        assert_eq!(ideal_count(&field, 25).unwrap(), 3);
        assert_eq!(ideal_count(&field, 9).unwrap(), 1);
        assert_eq!(ideal_count(&field, 3).unwrap(), 0);
        assert_eq!(ideal_count(&field, 1).unwrap(), 1);
        assert_eq!(ideal_count(&field, 2).unwrap(), 1);
        assert_eq!(ideal_count(&field, 5).unwrap(), 2);
    }

    #[test]
    fn counts_upto_agree_with_pointwise() {
        let field = FieldSplitting::quadratic(-4).unwrap();
        let a = ideal_counts_upto(&field, 300).unwrap();
        for n in 1..=300u64 {
            assert_eq!(a[n as usize] as u64, ideal_count(&field, n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn gaussian_norm_product_at_five() {
        let field = FieldSplitting::quadratic(-4).unwrap();
        let v = pi_profile(&field, 5, &limits()).unwrap();
        // norms <= 5: 2, 4, 5, 5 -> product 200 = 2^3 * 5^2
        assert_eq!(v.get(2), 3);
        assert_eq!(v.get(5), 2);
        assert_eq!(v.len(), 2);
        let v1 = pi_profile(&field, 1, &limits()).unwrap();
        assert!(v1.is_empty());
        let v2 = pi_profile(&field, 2, &limits()).unwrap();
        assert_eq!(v2.iter().collect::<Vec<_>>(), vec![(2, 1)]);
    }

    #[test]
    fn pi_additivity() {
        let field = FieldSplitting::quadratic(-4).unwrap();
        let counts = ideal_counts_upto(&field, 500).unwrap();
        let mut prev = pi_profile(&field, 1, &limits()).unwrap();
        for l in 2..=500u64 {
            let cur = pi_profile(&field, l, &limits()).unwrap();
            let delta = cur.difference(&prev).expect("profiles are monotone");
            let mut expect = FactorizationVector::new();
            let a_l = counts[l as usize] as u64;
            for (p, e) in FactorizationVector::from_pairs(
                &arith::factor_u64(l)
                    .into_iter()
                    .map(|(p, e)| (p, e as u64))
                    .collect::<Vec<_>>(),
            )
            .iter()
            {
                expect.add(p, e * a_l);
            }
            assert_eq!(delta, expect, "l = {l}");
            prev = cur;
        }
    }

    #[test]
    fn min_exponent_examples() {
        let l = limits();
        let seven = hseq_profile(HSeqKind::Factorial, 7, &l).unwrap();
        let is_3_mod_4 = |p: u64| p % 4 == 3;
        assert_eq!(min_exponent_prime(&seven, is_3_mod_4), Some((7, 1)));
        let six = hseq_profile(HSeqKind::Factorial, 6, &l).unwrap();
        assert_eq!(min_exponent_prime(&six, is_3_mod_4), Some((3, 2)));
        let two = FactorizationVector::from_pairs(&[(2, 1)]);
        assert_eq!(min_exponent_prime(&two, is_3_mod_4), None);
    }

    #[test]
    fn quadratic_local_degrees_sum_to_two() {
        let field = FieldSplitting::quadratic(-4).unwrap();
        for p in arith::sieve_primes(200) {
            match field.local(p).unwrap() {
                LocalSplitting::Ramified => assert_eq!(p, 2),
                LocalSplitting::Unramified { ref counts } => {
                    let total: u32 = counts.iter().map(|(&d, &g)| d * g).sum();
                    assert_eq!(total, 2);
                }
            }
        }
    }

    #[test]
    fn table_parsing_and_lookup() {
        let table = SplittingTable::parse(
            "# cubic field sample\n2 ramified\n3 1,1,1\n5 3\n7 1,2\n",
        )
        .unwrap();
        assert_eq!(table.degree(), 3);
        let field = FieldSplitting::Table(table);
        assert_eq!(ideal_count(&field, 3).unwrap(), 3);
        assert_eq!(ideal_count(&field, 5).unwrap(), 0);
        assert_eq!(ideal_count(&field, 7).unwrap(), 1);
        // 11 absent: fail loudly
        assert!(ideal_count(&field, 11).is_err());
        // degree mismatch
        assert!(SplittingTable::parse("3 1,1\n5 1,1,1\n").is_err());
    }

    #[test]
    fn materialize_honors_digit_bound() {
        let v = hseq_profile(HSeqKind::Factorial, 1000, &limits()).unwrap();
        assert!(v.materialize(10).is_err());
        assert!(v.materialize(10_000).is_ok());
        let _ = v.log_value().to_u64();
    }
}
