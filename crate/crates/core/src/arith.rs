//! Exact integer primitives: factorization with an effort budget, primality,
//! sieves (optionally filtered to an arithmetic progression), valuations,
//! radicals, integer nth roots, and Kronecker symbols.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Effort budget for [`factorize`]. When the budget runs out the result
/// carries the remaining composite cofactor instead of a wrong answer.
#[derive(Clone, Debug)]
pub struct Effort {
    /// Trial-divide by primes up to this bound first.
    pub trial_bound: u64,
    /// Total rho iterations allowed across all recursive splits.
    pub rho_iterations: u64,
    /// Refuse inputs with more decimal digits than this.
    pub max_digits: usize,
}

impl Default for Effort {
    fn default() -> Self {
        Effort {
            trial_bound: 100_000,
            rho_iterations: 1 << 22,
            max_digits: 100_000,
        }
    }
}

/// A signed integer in factored view: `sign * prod p^e`, plus an optional
/// composite cofactor left over when the effort budget was exhausted.
///
/// Keys are prime, strictly increasing (map order), exponents >= 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactorization {
    sign: i8,
    factors: BTreeMap<BigUint, u64>,
    residual: Option<BigUint>,
}

impl PrimeFactorization {
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn factors(&self) -> impl Iterator<Item = (&BigUint, u64)> {
        self.factors.iter().map(|(p, &e)| (p, e))
    }

    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }

    /// Exponent of `p`, zero when absent. Does not look into the residual.
    pub fn exponent_of(&self, p: &BigUint) -> u64 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.residual.is_none()
    }

    pub fn residual(&self) -> Option<&BigUint> {
        self.residual.as_ref()
    }

    /// Reconstruct the signed integer (complete factorizations only).
    pub fn value(&self) -> Result<BigInt> {
        if !self.is_complete() {
            return Err(Error::IncompleteFactorization(
                "cannot reconstruct a value with a residual cofactor".into(),
            ));
        }
        let mut acc = BigUint::one();
        for (p, &e) in &self.factors {
            acc *= p.pow(e as u32);
        }
        let mag = BigInt::from(acc);
        Ok(if self.sign < 0 { -mag } else { mag })
    }

    fn insert(&mut self, p: BigUint, e: u64) {
        if e > 0 {
            *self.factors.entry(p).or_insert(0) += e;
        }
    }

    /// Assemble a factorization from known prime powers. Every key must
    /// actually be prime.
    pub fn from_prime_powers<I>(sign: i8, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigUint, u64)>,
    {
        let mut out = PrimeFactorization {
            sign: if sign < 0 { -1 } else { 1 },
            factors: BTreeMap::new(),
            residual: None,
        };
        for (p, e) in pairs {
            if !is_prime_big(&p) {
                return Err(Error::NotPrime(p.to_string()));
            }
            out.insert(p, e);
        }
        Ok(out)
    }
}

fn approx_digits(bits: u64) -> usize {
    // log10(2) = 0.30103, rounded up.
    (bits as usize) * 30103 / 100_000 + 1
}

pub(crate) fn check_digits(bits: u64, max_digits: usize) -> Result<()> {
    let digits = approx_digits(bits);
    if digits > max_digits {
        return Err(Error::DigitBound {
            digits,
            bound: max_digits,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// u64 modular arithmetic
// ---------------------------------------------------------------------------

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // This witness set decides primality for all n < 2^64.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin for arbitrary-precision inputs: deterministic below 2^64,
/// the first 40 primes as fixed witnesses beyond.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let witnesses = sieve_primes(180); // first 40+ primes
    'witness: for &a in witnesses.iter().take(40) {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(100_000))
}

/// Factor a nonzero integer into primes, trial division first, then Brent's
/// rho on whatever survives. A spent budget yields a flagged residual, never
/// a silently wrong result.
pub fn factorize(n: &BigInt, effort: &Effort) -> Result<PrimeFactorization> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_digits(n.bits(), effort.max_digits)?;

    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.magnitude().clone();
    let mut out = PrimeFactorization {
        sign,
        factors: BTreeMap::new(),
        residual: None,
    };
    if m.is_one() {
        return Ok(out);
    }

    let trial_primes: Vec<u64> = if effort.trial_bound <= 100_000 {
        small_primes()
            .iter()
            .copied()
            .take_while(|&p| p <= effort.trial_bound)
            .collect()
    } else {
        sieve_primes(effort.trial_bound)
    };

    for &p in &trial_primes {
        if m.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0u64;
        loop {
            let (q, r) = m.div_rem(&pb);
            if r.is_zero() {
                m = q;
                e += 1;
            } else {
                break;
            }
        }
        out.insert(pb, e);
    }
    if m.is_one() {
        return Ok(out);
    }

    let mut budget = effort.rho_iterations;
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime_big(&c) {
            out.insert(c, 1);
            continue;
        }
        // Perfect powers split for free; rho struggles on them otherwise.
        if let Some((root, k)) = perfect_power(&c) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        match rho_split(&c, &mut budget) {
            Some(d) => {
                stack.push(&c / &d);
                stack.push(d);
            }
            None => {
                // Budget exhausted: fold every unsplit cofactor into one
                // residual marker.
                let res = match out.residual.take() {
                    Some(r) => r * &c,
                    None => c,
                };
                out.residual = Some(res);
            }
        }
    }
    Ok(out)
}

/// Largest k >= 2 with n = root^k, if any.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits();
    for k in (2..=bits.max(2) as u32).rev() {
        let (root, exact) = integer_nth_root(n, k);
        if exact && root > BigUint::one() {
            return Some((root, k));
        }
    }
    None
}

/// Brent's cycle-finding rho with a deterministic sequence of offsets.
fn rho_split(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    let one = BigUint::one();
    for c in 1u64..64 {
        if *budget == 0 {
            return None;
        }
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut count = 0u64;
        while d.is_one() {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            count += 1;
            x = f(&x);
            y = f(&f(&y));
            let diff = if x >= y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break; // cycle collapsed, retry with the next offset
            }
            d = diff.gcd(n);
            if count > 1 << 26 {
                break;
            }
        }
        if !d.is_one() && &d != n {
            return Some(d);
        }
    }
    None
}

/// Product of the distinct primes dividing the factored integer.
pub fn radical(f: &PrimeFactorization) -> Result<BigInt> {
    if !f.is_complete() {
        return Err(Error::IncompleteFactorization(
            "radical requires a complete factorization".into(),
        ));
    }
    let mut acc = BigUint::one();
    for (p, _) in f.factors() {
        acc *= p;
    }
    Ok(BigInt::from(acc))
}

/// Exponent of the prime `p` in `f` (zero when absent).
pub fn p_valuation(p: &BigUint, f: &PrimeFactorization) -> Result<u64> {
    if !is_prime_big(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if let Some(r) = f.residual() {
        if (r % p).is_zero() {
            return Err(Error::IncompleteFactorization(format!(
                "residual cofactor is divisible by {p}, exponent unknown"
            )));
        }
    }
    Ok(f.exponent_of(p))
}

/// Floor of the k-th root together with an exactness flag.
pub fn integer_nth_root(n: &BigUint, k: u32) -> (BigUint, bool) {
    assert!(k >= 1, "root index must be positive");
    let root = n.nth_root(k);
    let exact = root.pow(k) == *n;
    (root, exact)
}

// ---------------------------------------------------------------------------
// Kronecker symbols
// ---------------------------------------------------------------------------

/// Kronecker symbol (delta | p) for prime p, with the mod-8 rule at p = 2.
pub fn kronecker(delta: &BigInt, p: u64) -> i8 {
    if p == 2 {
        return match delta.mod_floor(&BigInt::from(8)).to_u64().unwrap() {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0, // even discriminant ramifies
        };
    }
    let r = delta.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    legendre(r, p)
}

/// Convenience wrapper for machine-sized discriminants.
pub fn kronecker_i64(delta: i64, p: u64) -> i8 {
    if p == 2 {
        return match delta.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    legendre(delta.rem_euclid(p as i64) as u64, p)
}

/// Legendre symbol via Euler's criterion; `a` already reduced mod odd prime p.
pub(crate) fn legendre(a: u64, p: u64) -> i8 {
    debug_assert!(p % 2 == 1);
    if a.is_multiple_of(p) {
        return 0;
    }
    let e = powmod(a % p, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol at an arbitrary-precision prime.
pub fn kronecker_big(delta: &BigInt, p: &BigUint) -> i8 {
    if let Some(v) = p.to_u64() {
        return kronecker(delta, v);
    }
    // p is odd here: even p > 2 is never prime.
    let pb = BigInt::from(p.clone());
    let r = delta.mod_floor(&pb).to_biguint().unwrap();
    if r.is_zero() {
        return 0;
    }
    let exp = (p - 1u32) >> 1;
    let e = r.modpow(&exp, p);
    if e.is_one() {
        1
    } else {
        -1
    }
}

/// Completely multiplicative extension of the Kronecker symbol to an
/// arbitrary positive second argument, via the factored view of `m`.
pub fn kronecker_multiplicative(delta: i64, m: u64, spf: &[u32]) -> i8 {
    debug_assert!((m as usize) < spf.len());
    let mut m = m;
    let mut acc = 1i8;
    while m > 1 {
        let p = spf[m as usize] as u64;
        acc *= kronecker_i64(delta, p);
        if acc == 0 {
            return 0;
        }
        m /= p;
    }
    acc
}

// ---------------------------------------------------------------------------
// Sieves
// ---------------------------------------------------------------------------

/// All primes up to `bound` (inclusive) by a plain sieve of Eratosthenes.
pub fn sieve_primes(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return vec![];
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Smallest-prime-factor table for 0..=bound. `spf[1] = 1`.
pub fn smallest_prime_factors(bound: usize) -> Vec<u32> {
    let mut spf = vec![0u32; bound + 1];
    if bound >= 1 {
        spf[1] = 1;
    }
    for i in 2..=bound {
        if spf[i] == 0 {
            let mut j = i;
            while j <= bound {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

const MAX_SIEVE_SPAN: u64 = 2_000_000_000;

/// Ascending primes in `[lo, hi]`, optionally filtered to `p = a (mod b)`.
///
/// A residue class with `gcd(a, b) > 1` holds at most one prime and is
/// rejected as degenerate.
pub fn primes_in(lo: u64, hi: u64, residue: Option<(u64, u64)>) -> Result<Vec<u64>> {
    if hi < lo {
        return Ok(vec![]);
    }
    if hi > MAX_SIEVE_SPAN {
        return Err(Error::BoundExceeded {
            what: "sieve endpoint",
            value: hi,
            bound: MAX_SIEVE_SPAN,
        });
    }
    if let Some((a, b)) = residue {
        if b == 0 {
            return Err(Error::EmptyResidueClass { a, b });
        }
        let a = a % b;
        if a.gcd(&b) > 1 {
            return Err(Error::EmptyResidueClass { a, b });
        }
    }
    let lo = lo.max(2);
    let mut out = Vec::new();
    let keep = |p: u64| match residue {
        Some((a, b)) => p % b == a % b,
        None => true,
    };
    if hi <= 4_000_000 {
        for p in sieve_primes(hi) {
            if p >= lo && keep(p) {
                out.push(p);
            }
        }
        return Ok(out);
    }

    // Segmented sieve over [lo, hi].
    let root = (hi as f64).sqrt() as u64 + 2;
    let base = sieve_primes(root);
    const BLOCK: u64 = 1 << 20;
    let mut seg_lo = lo;
    let mut mark = vec![false; BLOCK as usize];
    while seg_lo <= hi {
        let seg_hi = (seg_lo + BLOCK - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        mark[..len].fill(false);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut start = seg_lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut j = start;
            while j <= seg_hi {
                mark[(j - seg_lo) as usize] = true;
                j += p;
            }
        }
        for (i, &marked) in mark.iter().enumerate().take(len) {
            let v = seg_lo + i as u64;
            if v >= 2 && !marked && keep(v) {
                out.push(v);
            }
        }
        seg_lo = seg_hi + 1;
    }
    Ok(out)
}

/// Factor a machine-sized integer: trial division, then Brent's rho.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out: BTreeMap<u64, u32> = BTreeMap::new();
    let mut stack = vec![n];
    while let Some(mut m) = stack.pop() {
        if m <= 1 {
            continue;
        }
        for p in [2u64, 3, 5] {
            while m % p == 0 {
                *out.entry(p).or_insert(0) += 1;
                m /= p;
            }
        }
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let mut d = 7u64;
        let mut split = false;
        while d * d <= m && d < 100_000 {
            if m % d == 0 {
                stack.push(d);
                stack.push(m / d);
                split = true;
                break;
            }
            d += 2;
        }
        if !split {
            let f = rho_u64(m);
            stack.push(f);
            stack.push(m / f);
        }
    }
    out.into_iter().collect()
}

fn rho_u64(n: u64) -> u64 {
    // n composite, odd, no factor below 1e5
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        loop {
            x = f(x);
            y = f(f(y));
            if x == y {
                break;
            }
            let d = x.abs_diff(y).gcd(&n);
            if d > 1 {
                return d;
            }
        }
    }
    unreachable!("composite inputs always split")
}

/// Legendre's formula: exponent of prime p in l!.
pub fn factorial_valuation(p: u64, l: u64) -> u64 {
    let mut acc = 0u64;
    let mut q = p;
    while q <= l {
        acc += l / q;
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    acc
}
