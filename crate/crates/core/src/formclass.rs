//! Binary forms and their behavior at primes: discriminants, Frobenius cycle
//! types read off from distinct-degree factorization, membership in the set
//! of primes forcing both variables divisible, and empirical root densities.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, Effort};
use crate::polyfp;
use crate::{Error, Result};

/// Homogeneous two-variable integer form `sum a_i x^i y^(n-i)`, stored as the
/// coefficient list `a_n, ..., a_0`. Carries its content, the discriminant of
/// the dehomogenization, and the modified discriminant
/// `disc / content^(2n-2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>, // descending: a_n first
    degree: usize,
    content: BigInt,
    disc: BigInt,
    disc_mod: BigInt,
}

impl BinaryForm {
    /// Build a form from `a_n, ..., a_0`. At least two coefficients, not all
    /// zero, and the two end coefficients must not both vanish (no common
    /// `x` and `y` factor hiding the degree).
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidForm(
                "need at least two coefficients (degree >= 1)".into(),
            ));
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidForm("zero form".into()));
        }
        let n = coeffs.len() - 1;
        if coeffs[0].is_zero() && coeffs[n].is_zero() {
            return Err(Error::InvalidForm(
                "leading and constant coefficients both vanish; divide out x and y first".into(),
            ));
        }
        let mut content = BigInt::zero();
        for c in &coeffs {
            content = content.gcd(c);
        }
        let disc = form_discriminant(&coeffs);
        let weight = 2 * n as u32 - 2;
        let scale = content.pow(weight);
        let (disc_mod, rem) = disc.div_rem(&scale);
        debug_assert!(rem.is_zero(), "discriminant scaling must be exact");
        Ok(BinaryForm {
            degree: n,
            coeffs,
            content,
            disc,
            disc_mod,
        })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn content(&self) -> &BigInt {
        &self.content
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn disc_mod(&self) -> &BigInt {
        &self.disc_mod
    }

    /// Coefficient of x^i y^(n-i).
    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[self.degree - i]
    }

    pub fn leading(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn constant(&self) -> &BigInt {
        &self.coeffs[self.degree]
    }

    /// `a_n, ..., a_0`
    pub fn coeffs_descending(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// F(x,1) with ascending coefficients.
    pub fn poly_ascending(&self) -> Vec<BigInt> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let n = self.degree;
        let mut acc = BigInt::zero();
        for (k, a) in self.coeffs.iter().enumerate() {
            // a multiplies x^(n-k) y^k
            acc += a * x.pow((n - k) as u32) * y.pow(k as u32);
        }
        acc
    }

    /// The form divided by its signed content (positive leading nonzero
    /// coefficient, content one).
    pub fn primitive(&self) -> BinaryForm {
        let lead_sign = self
            .coeffs
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| if c.is_negative() { -1 } else { 1 })
            .unwrap_or(1);
        let div = &self.content * BigInt::from(lead_sign);
        let coeffs = self.coeffs.iter().map(|c| c / &div).collect();
        BinaryForm::new(coeffs).expect("primitive part of a valid form is valid")
    }

    pub fn product(&self, other: &BinaryForm) -> Result<BinaryForm> {
        let mut out = vec![BigInt::zero(); self.degree + other.degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinaryForm::new(out)
    }
}

impl std::fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.degree;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let xp = n - k;
            let yp = k;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let unit_coeff = mag.is_one();
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            match xp {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{xp}")?,
            }
            match yp {
                0 => {}
                1 => write!(f, "y")?,
                _ => write!(f, "y^{yp}")?,
            }
            if xp == 0 && yp == 0 && unit_coeff {
                write!(f, "1")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Discriminant of a univariate polynomial given by descending coefficients
/// with nonzero leading coefficient.
pub(crate) fn poly_discriminant_desc(coeffs_desc: &[BigInt]) -> BigInt {
    let mut work = coeffs_desc.to_vec();
    while work.first().map(|c| c.is_zero()).unwrap_or(false) {
        work.remove(0);
    }
    if work.len() < 3 {
        return BigInt::one();
    }
    form_discriminant(&work)
}

/// Discriminant of the dehomogenization with the formal-degree convention:
/// when the leading coefficient vanishes the reversed polynomial is used
/// (swapping x and y leaves the discriminant of a binary form unchanged).
fn form_discriminant(coeffs_desc: &[BigInt]) -> BigInt {
    let n = coeffs_desc.len() - 1;
    if n == 1 {
        return BigInt::one();
    }
    let work: Vec<BigInt> = if coeffs_desc[0].is_zero() {
        coeffs_desc.iter().rev().cloned().collect()
    } else {
        coeffs_desc.to_vec()
    };
    // P descending, P' descending
    let deriv: Vec<BigInt> = work[..n]
        .iter()
        .enumerate()
        .map(|(k, a)| a * BigInt::from((n - k) as u64))
        .collect();
    let res = resultant_formal(&work, &deriv);
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
    let signed = res * BigInt::from(sign);
    let (q, r) = signed.div_rem(&work[0]);
    debug_assert!(r.is_zero(), "resultant must be divisible by the leading coefficient");
    q
}

/// Sylvester resultant with formal degrees len-1, exact via fraction-free
/// (Bareiss) elimination.
fn resultant_formal(p: &[BigInt], q: &[BigInt]) -> BigInt {
    let m = p.len() - 1;
    let k = q.len() - 1;
    let size = m + k;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..k {
        for (j, c) in p.iter().enumerate() {
            mat[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in q.iter().enumerate() {
            mat[k + row][row + j] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for kk in 0..n {
        if m[kk][kk].is_zero() {
            match (kk + 1..n).find(|&r| !m[r][kk].is_zero()) {
                Some(r) => {
                    m.swap(kk, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in kk + 1..n {
            for j in kk + 1..n {
                let num = &m[kk][kk] * &m[i][j] - &m[i][kk] * &m[kk][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                m[i][j] = q;
            }
            m[i][kk] = BigInt::zero();
        }
        prev = m[kk][kk].clone();
    }
    if sign < 0 {
        -prev
    } else {
        prev
    }
}

// ---------------------------------------------------------------------------
// Cycle types
// ---------------------------------------------------------------------------

/// Ascending degrees of the irreducible factors of the form mod a good
/// prime; equals the cycle structure of the Frobenius permutation there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleType(pub Vec<u32>);

impl CycleType {
    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn min_part(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }
}

impl std::fmt::Display for CycleType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

fn reduce_poly_mod_p(coeffs_asc: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    polyfp::trim(
        coeffs_asc
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect(),
    )
}

fn divides(d: &BigInt, p: u64) -> bool {
    d.mod_floor(&BigInt::from(p)).is_zero()
}

/// Cycle type of an irreducible form at a good prime (`p` dividing neither
/// the leading coefficient nor the modified discriminant). Only the factor
/// degrees are needed, so distinct-degree factorization is enough.
pub fn cycle_type(form: &BinaryForm, p: u64) -> Result<CycleType> {
    if divides(form.leading(), p) {
        return Err(Error::BadPrime {
            p,
            reason: "divides the leading coefficient".into(),
        });
    }
    if divides(form.disc_mod(), p) {
        return Err(Error::BadPrime {
            p,
            reason: "divides the modified discriminant".into(),
        });
    }
    if !is_irreducible(form)? {
        return Err(Error::InvalidForm(
            "cycle type is defined for irreducible forms only".into(),
        ));
    }
    Ok(cycle_type_unchecked(form, p, false))
}

/// Degree multiset of the mod-p factorization; `reversed` reads the form
/// with x and y swapped. Caller guarantees squarefreeness mod p.
fn cycle_type_unchecked(form: &BinaryForm, p: u64, reversed: bool) -> CycleType {
    let asc: Vec<BigInt> = if reversed {
        form.coeffs_descending().to_vec()
    } else {
        form.poly_ascending()
    };
    let f = reduce_poly_mod_p(&asc, p);
    debug_assert!(
        polyfp::gcd(&f, &polyfp::derivative(&f, p), p).len() <= 1,
        "good primes give squarefree reductions"
    );
    let mut parts = Vec::new();
    for (d, count) in polyfp::distinct_degree_counts(&f, p) {
        for _ in 0..count {
            parts.push(d);
        }
    }
    parts.sort_unstable();
    CycleType(parts)
}

// ---------------------------------------------------------------------------
// Membership in the prime set where the form forces p | x and p | y
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsetStatus {
    /// Nontrivial zeros mod p are impossible: p | F(x,y) forces p | x, p | y.
    InSet,
    /// The form has a nontrivial zero mod p.
    NotInSet,
    /// p fails the eligibility condition (divides the modified discriminant,
    /// or both end coefficients); no criterion applies at p.
    Bad,
}

/// Eligibility per the coprimality disjunction: p must avoid the modified
/// discriminant and at least one of the end coefficients.
fn is_bad_prime(form: &BinaryForm, p: u64) -> bool {
    divides(form.disc_mod(), p)
        || (divides(form.leading(), p) && divides(form.constant(), p))
}

/// Decide membership by a root test: at eligible primes the form has no
/// nontrivial zero mod p iff its dehomogenization (in whichever direction
/// keeps full degree) has no root mod p. Uses gcd with x^p - x; no full
/// factorization is performed. Works for reducible forms.
pub fn pset_status(form: &BinaryForm, p: u64) -> PsetStatus {
    if is_bad_prime(form, p) {
        return PsetStatus::Bad;
    }
    if divides(form.leading(), p) {
        // (1, 0) is a nontrivial zero.
        return PsetStatus::NotInSet;
    }
    let f = reduce_poly_mod_p(&form.poly_ascending(), p);
    if polyfp::has_root(&f, p) {
        PsetStatus::NotInSet
    } else {
        PsetStatus::InSet
    }
}

/// Same decision for a prime beyond 64 bits.
pub fn pset_status_big(form: &BinaryForm, p: &BigUint) -> PsetStatus {
    if let Some(small) = p.to_u64() {
        return pset_status(form, small);
    }
    let pb = BigInt::from(p.clone());
    let div_big = |d: &BigInt| d.mod_floor(&pb).is_zero();
    if div_big(form.disc_mod()) || (div_big(form.leading()) && div_big(form.constant())) {
        return PsetStatus::Bad;
    }
    if div_big(form.leading()) {
        return PsetStatus::NotInSet;
    }
    let f = polyfp::big::reduce(&form.poly_ascending(), p);
    if polyfp::big::has_root(&f, p) {
        PsetStatus::NotInSet
    } else {
        PsetStatus::InSet
    }
}

// ---------------------------------------------------------------------------
// Per-prime status reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct PrimeStatus {
    pub p: u64,
    pub tag: PrimeTag,
    pub divides_disc_mod: bool,
    pub divides_lead: bool,
    pub divides_const: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimeTag {
    Bad,
    Good(CycleType),
}

/// Status of one prime: bad when ineligible, otherwise the factor-degree
/// multiset mod p (reading the form backwards when p divides the leading
/// coefficient; eligibility then guarantees the constant one is free).
pub fn prime_status(form: &BinaryForm, p: u64) -> PrimeStatus {
    let divides_disc_mod = divides(form.disc_mod(), p);
    let divides_lead = divides(form.leading(), p);
    let divides_const = divides(form.constant(), p);
    let tag = if is_bad_prime(form, p) {
        PrimeTag::Bad
    } else {
        PrimeTag::Good(cycle_type_unchecked(form, p, divides_lead))
    };
    PrimeStatus {
        p,
        tag,
        divides_disc_mod,
        divides_lead,
        divides_const,
    }
}

// ---------------------------------------------------------------------------
// Root density
// ---------------------------------------------------------------------------

/// Exact hit count over the scanned good primes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DensityEstimate {
    pub hits: u64,
    pub sample: u64,
}

impl DensityEstimate {
    pub fn value(&self) -> f64 {
        if self.sample == 0 {
            0.0
        } else {
            self.hits as f64 / self.sample as f64
        }
    }
}

/// Fraction of good primes up to `prime_bound` at which the dehomogenized
/// form has a root — the complement of the in-set frequency.
pub fn root_density(form: &BinaryForm, prime_bound: u64) -> Result<DensityEstimate> {
    if prime_bound < 100 {
        return Err(Error::BoundExceeded {
            what: "density prime bound (must be at least 100)",
            value: prime_bound,
            bound: 100,
        });
    }
    let primes = arith::sieve_primes(prime_bound);
    let small = prepared_i64(form);
    let (hits, sample) = primes
        .par_chunks(4096)
        .map(|chunk| {
            let mut hits = 0u64;
            let mut sample = 0u64;
            for &p in chunk {
                match status_fast(form, small.as_deref(), p) {
                    PsetStatus::Bad => {}
                    PsetStatus::NotInSet => {
                        hits += 1;
                        sample += 1;
                    }
                    PsetStatus::InSet => sample += 1,
                }
            }
            (hits, sample)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(DensityEstimate { hits, sample })
}

/// Cumulative density estimates at several bounds in one ascending pass.
pub fn root_density_checkpoints(
    form: &BinaryForm,
    bounds: &[u64],
) -> Result<Vec<(u64, DensityEstimate)>> {
    let mut bounds = bounds.to_vec();
    bounds.sort_unstable();
    bounds.dedup();
    let hi = *bounds.last().ok_or_else(|| Error::Parse("no bounds".into()))?;
    let primes = arith::sieve_primes(hi);
    let small = prepared_i64(form);
    let mut out = Vec::new();
    let mut hits = 0u64;
    let mut sample = 0u64;
    let mut idx = 0usize;
    for &p in &primes {
        while idx < bounds.len() && p > bounds[idx] {
            out.push((bounds[idx], DensityEstimate { hits, sample }));
            idx += 1;
        }
        match status_fast(form, small.as_deref(), p) {
            PsetStatus::Bad => {}
            PsetStatus::NotInSet => {
                hits += 1;
                sample += 1;
            }
            PsetStatus::InSet => sample += 1,
        }
    }
    while idx < bounds.len() {
        out.push((bounds[idx], DensityEstimate { hits, sample }));
        idx += 1;
    }
    Ok(out)
}

fn prepared_i64(form: &BinaryForm) -> Option<Vec<i64>> {
    form.coeffs_descending()
        .iter()
        .map(|c| c.to_i64())
        .collect()
}

fn status_fast(form: &BinaryForm, small_desc: Option<&[i64]>, p: u64) -> PsetStatus {
    match small_desc {
        None => pset_status(form, p),
        Some(desc) => {
            let dm = form.disc_mod().to_i64();
            let rem = |v: i64| v.rem_euclid(p as i64) as u64;
            let bad = match dm {
                Some(d) => d.rem_euclid(p as i64) == 0,
                None => divides(form.disc_mod(), p),
            } || (rem(desc[0]) == 0 && rem(desc[desc.len() - 1]) == 0);
            if bad {
                return PsetStatus::Bad;
            }
            if rem(desc[0]) == 0 {
                return PsetStatus::NotInSet;
            }
            let f = polyfp::trim(desc.iter().rev().map(|&c| rem(c)).collect());
            if polyfp::has_root(&f, p) {
                PsetStatus::NotInSet
            } else {
                PsetStatus::InSet
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Factorization over the integers
// ---------------------------------------------------------------------------

/// `unit * content * prod factor_i^(mult_i)`, factors primitive with positive
/// leading nonzero coefficient, sorted by (degree, coefficients).
#[derive(Clone, Debug)]
pub struct FormFactorization {
    pub unit: i8,
    pub content: BigInt,
    pub factors: Vec<(BinaryForm, u32)>,
}

impl FormFactorization {
    pub fn product(&self) -> Result<BinaryForm> {
        let mut acc: Option<BinaryForm> = None;
        for (f, m) in &self.factors {
            for _ in 0..*m {
                acc = Some(match acc {
                    None => f.clone(),
                    Some(a) => a.product(f)?,
                });
            }
        }
        let base = acc.ok_or_else(|| Error::InvalidForm("empty factorization".into()))?;
        let scale = &self.content * BigInt::from(self.unit);
        BinaryForm::new(
            base.coeffs_descending()
                .iter()
                .map(|c| c * &scale)
                .collect(),
        )
    }
}

/// Irreducible factorization over the integers for degree at most four.
/// Content and sign are split off; factors of x and y come out as the
/// degree-one forms they are.
pub fn factor_over_z(form: &BinaryForm) -> Result<FormFactorization> {
    let n = form.degree;
    let prim = form.primitive();
    let unit = if form
        .coeffs_descending()
        .iter()
        .find(|c| !c.is_zero())
        .map(|c| c.is_negative())
        .unwrap_or(false)
    {
        -1
    } else {
        1
    };

    let desc = prim.coeffs_descending();
    let y_power = desc.iter().take_while(|c| c.is_zero()).count();
    let x_power = desc.iter().rev().take_while(|c| c.is_zero()).count();
    let middle: Vec<BigInt> = desc[y_power..desc.len() - x_power].to_vec();

    let mut raw: Vec<BinaryForm> = Vec::new();
    for _ in 0..x_power {
        raw.push(BinaryForm::from_i64(&[1, 0])?); // x
    }
    for _ in 0..y_power {
        raw.push(BinaryForm::from_i64(&[0, 1])?); // y
    }

    let deg_mid = middle.len() - 1;
    if deg_mid >= 1 {
        if deg_mid > 4 {
            return Err(Error::Unsupported(format!(
                "factorization over the integers is implemented through degree 4 (got {n}); \
                 supply a factorization to verify instead"
            )));
        }
        for fac in factor_univariate(&middle)? {
            raw.push(homogenize(&fac)?);
        }
    }

    let mut factors: Vec<(BinaryForm, u32)> = Vec::new();
    raw.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs_descending().cmp(b.coeffs_descending()))
    });
    for f in raw {
        match factors.last_mut() {
            Some((g, m)) if *g == f => *m += 1,
            _ => factors.push((f, 1)),
        }
    }
    Ok(FormFactorization {
        unit,
        content: form.content().clone(),
        factors,
    })
}

/// True iff the form is irreducible over the rationals (content ignored).
pub fn is_irreducible(form: &BinaryForm) -> Result<bool> {
    let n = form.degree;
    if n == 1 {
        return Ok(true);
    }
    if form.leading().is_zero() || form.constant().is_zero() {
        return Ok(false); // an x or y factor splits off
    }
    let prim = form.primitive();
    // A prime where the reduction stays degree n, is squarefree, and comes
    // out irreducible certifies irreducibility over the rationals.
    let asc = prim.poly_ascending();
    for p in arith::sieve_primes(200) {
        if divides(prim.leading(), p) {
            continue;
        }
        let f = reduce_poly_mod_p(&asc, p);
        if polyfp::gcd(&f, &polyfp::derivative(&f, p), p).len() > 1 {
            continue;
        }
        let counts = polyfp::distinct_degree_counts(&f, p);
        if counts == vec![(n as u32, 1)] {
            return Ok(true);
        }
    }
    if n > 4 {
        return Err(Error::Unsupported(format!(
            "cannot decide irreducibility of a degree-{n} form without a modular certificate"
        )));
    }
    let fac = factor_over_z(&prim)?;
    Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
}

/// Check a user-supplied factorization: exact product match plus an
/// irreducibility certificate for every factor.
pub fn verify_factorization(form: &BinaryForm, factors: &FormFactorization) -> Result<()> {
    let prod = factors.product()?;
    if prod != *form {
        return Err(Error::InvalidForm(format!(
            "supplied factorization multiplies to {prod}, not {form}"
        )));
    }
    for (f, _) in &factors.factors {
        if !is_irreducible(f)? {
            return Err(Error::InvalidForm(format!("supplied factor {f} is reducible")));
        }
    }
    Ok(())
}

fn homogenize(poly_desc: &[BigInt]) -> Result<BinaryForm> {
    BinaryForm::new(poly_desc.to_vec())
}

/// Positive divisors of n (complete factorization required), capped.
fn divisors(n: &BigInt, cap: usize) -> Result<Vec<BigInt>> {
    let f = arith::factorize(n, &Effort::default())?;
    if !f.is_complete() {
        return Err(Error::Unsupported(
            "coefficient too hard to factor for the divisor search".into(),
        ));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in f.factors() {
        let pb = BigInt::from(p.clone());
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut cur = d.clone();
            next.push(cur.clone());
            for _ in 0..e {
                cur = &cur * &pb;
                next.push(cur.clone());
            }
        }
        divs = next;
        if divs.len() > cap {
            return Err(Error::Unsupported(
                "too many divisors for the factor search".into(),
            ));
        }
    }
    divs.sort();
    Ok(divs)
}

fn eval_desc(poly_desc: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in poly_desc {
        acc = acc * x + c;
    }
    acc
}

/// Factor a primitive integer polynomial (descending, degree 1..=4, nonzero
/// ends) into irreducibles over the integers, each primitive with positive
/// leading coefficient.
fn factor_univariate(poly_desc: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut cur = poly_desc.to_vec();
    normalize_sign(&mut cur);

    // Rational roots num/den correspond to primitive linear factors
    // (den x - num).
    'roots: loop {
        let deg = cur.len() - 1;
        if deg == 0 {
            break;
        }
        if deg == 1 {
            out.push(cur.clone());
            cur = vec![BigInt::one()];
            break;
        }
        let lead_divs = divisors(&cur[0], 4096)?;
        let const_divs = divisors(&cur[deg], 4096)?;
        for den in &lead_divs {
            for num in &const_divs {
                for sign in [1i64, -1] {
                    let num = num * BigInt::from(sign);
                    if num.gcd(den) != BigInt::one() {
                        continue;
                    }
                    // root num/den iff homogeneous evaluation vanishes
                    let mut acc = BigInt::zero();
                    let n = cur.len() - 1;
                    for (k, c) in cur.iter().enumerate() {
                        acc += c * num.pow((n - k) as u32) * den.pow(k as u32);
                    }
                    if acc.is_zero() {
                        let lin = vec![den.clone(), -num.clone()];
                        cur = divide_exact(&cur, &lin)?;
                        normalize_sign(&mut cur);
                        out.push(lin);
                        continue 'roots;
                    }
                }
            }
        }
        break;
    }

    let deg = cur.len() - 1;
    match deg {
        0 => {}
        2 | 3 => out.push(cur), // rootless quadratics and cubics are irreducible
        4 => match quartic_quadratic_split(&cur)? {
            Some((a, b)) => {
                out.push(a);
                out.push(b);
            }
            None => out.push(cur),
        },
        _ => out.push(cur),
    }
    for f in &mut out {
        normalize_sign(f);
    }
    Ok(out)
}

fn normalize_sign(poly: &mut [BigInt]) {
    if poly.first().map(|c| c.is_negative()).unwrap_or(false) {
        for c in poly.iter_mut() {
            *c = -c.clone();
        }
    }
}

fn divide_exact(num: &[BigInt], den: &[BigInt]) -> Result<Vec<BigInt>> {
    let mut rem = num.to_vec();
    let dn = den.len();
    if rem.len() < dn {
        return Err(Error::InvalidForm("division underflow".into()));
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dn + 1];
    for i in 0..quot.len() {
        let (q, r) = rem[i].div_rem(&den[0]);
        if !r.is_zero() {
            return Err(Error::InvalidForm("inexact polynomial division".into()));
        }
        quot[i] = q.clone();
        for (j, d) in den.iter().enumerate() {
            let t = &q * d;
            rem[i + j] -= t;
        }
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return Err(Error::InvalidForm("inexact polynomial division".into()));
    }
    Ok(quot)
}

/// Try to split a rootless quartic into two integer quadratics by divisor
/// interpolation at -1, 0, 1.
fn quartic_quadratic_split(p: &[BigInt]) -> Result<Option<(Vec<BigInt>, Vec<BigInt>)>> {
    let v_m1 = eval_desc(p, &BigInt::from(-1));
    let v_0 = eval_desc(p, &BigInt::from(0));
    let v_1 = eval_desc(p, &BigInt::from(1));
    // No rational roots remain, so all three values are nonzero.
    let d_m1 = divisors(&v_m1, 4096)?;
    let d_0 = divisors(&v_0, 4096)?;
    let d_1 = divisors(&v_1, 4096)?;
    let combos = d_m1.len() * d_0.len() * d_1.len() * 8;
    if combos > 2_000_000 {
        return Err(Error::Unsupported(
            "quartic coefficient values have too many divisors for the split search".into(),
        ));
    }
    let two = BigInt::from(2);
    for dm in signed(&d_m1) {
        for d0 in signed(&d_0) {
            for d1 in signed(&d_1) {
                // q(x) = q2 x^2 + q1 x + q0 through (-1, dm), (0, d0), (1, d1)
                let s: BigInt = &d1 + &dm;
                let t: BigInt = &d1 - &dm;
                let s_shift: BigInt = &s - &d0 * 2;
                if s_shift.mod_floor(&two) != BigInt::zero()
                    || t.mod_floor(&two) != BigInt::zero()
                {
                    continue;
                }
                let q2: BigInt = &s_shift / &two;
                let q1: BigInt = &t / &two;
                let q0 = d0.clone();
                if q2.is_zero() {
                    continue;
                }
                let rem_lead = p[0].mod_floor(&q2.abs());
                if !rem_lead.is_zero() {
                    continue;
                }
                let cand = vec![q2, q1, q0];
                if let Ok(quot) = divide_exact(p, &cand) {
                    if quot.len() == 3 {
                        return Ok(Some((cand, quot)));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn signed(divs: &[BigInt]) -> impl Iterator<Item = BigInt> + '_ {
    divs.iter()
        .flat_map(|d| [d.clone(), -d.clone()].into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(coeffs: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(coeffs).unwrap()
    }

    #[test]
    fn discriminants_of_quadratics() {
        let f = form(&[1, 0, 1]);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.content(), &BigInt::from(1));
        assert_eq!(f.disc(), &BigInt::from(-4));
        assert_eq!(f.disc_mod(), &BigInt::from(-4));

        let g = form(&[2, 0, 2]);
        assert_eq!(g.content(), &BigInt::from(2));
        assert_eq!(g.disc(), &BigInt::from(-16));
        assert_eq!(g.disc_mod(), &BigInt::from(-4));

        let h = form(&[1, 1, 1]);
        assert_eq!(h.disc(), &BigInt::from(-3));
    }

    #[test]
    fn disc_mod_is_scaling_invariant() {
        let base = form(&[1, 1, 1, 1]); // degree 3
        for g in 1..=9i64 {
            let scaled = form(&[g, g, g, g]);
            assert_eq!(scaled.disc_mod(), base.disc_mod(), "g={g}");
        }
    }

    #[test]
    fn cubic_discriminant_matches_formula() {
        // disc(x^3 + px + q) = -4p^3 - 27q^2; here x^3 - 2: -27*4 = -108
        let f = form(&[1, 0, 0, -2]);
        assert_eq!(f.disc(), &BigInt::from(-108));
    }

    #[test]
    fn rejects_degenerate_forms() {
        assert!(BinaryForm::from_i64(&[5]).is_err());
        assert!(BinaryForm::from_i64(&[0, 0, 0]).is_err());
        // x*y has both end coefficients zero
        assert!(BinaryForm::from_i64(&[0, 1, 0]).is_err());
    }

    #[test]
    fn cycle_type_examples() {
        let f = form(&[1, 0, 1]);
        assert_eq!(cycle_type(&f, 3).unwrap(), CycleType(vec![2]));
        assert_eq!(cycle_type(&f, 5).unwrap(), CycleType(vec![1, 1]));
        let g = form(&[1, 0, 0, -2]);
        assert_eq!(cycle_type(&g, 5).unwrap(), CycleType(vec![1, 2]));
        assert!(matches!(
            cycle_type(&f, 2),
            Err(Error::BadPrime { p: 2, .. })
        ));
    }

    #[test]
    fn pset_examples() {
        let f = form(&[1, 0, 1]);
        assert_eq!(pset_status(&f, 7), PsetStatus::InSet);
        assert_eq!(pset_status(&f, 13), PsetStatus::NotInSet);
        assert_eq!(pset_status(&f, 2), PsetStatus::Bad);
    }

    #[test]
    fn pset_handles_leading_divisor() {
        // 5x^2 + xy + y^2: disc = 1 - 20 = -19, eligible at 5, but (1,0)
        // is a zero mod 5.
        let f = form(&[5, 1, 1]);
        assert_eq!(pset_status(&f, 5), PsetStatus::NotInSet);
    }

    #[test]
    fn linear_form_always_has_roots() {
        let f = form(&[1, -1]);
        for p in [2u64, 3, 5, 97] {
            assert_eq!(pset_status(&f, p), PsetStatus::NotInSet);
        }
    }

    #[test]
    fn factor_difference_of_fourth_powers() {
        let f = form(&[1, 0, 0, 0, -1]);
        let fac = factor_over_z(&f).unwrap();
        assert_eq!(fac.unit, 1);
        assert_eq!(fac.content, BigInt::from(1));
        let printed: Vec<String> = fac
            .factors
            .iter()
            .map(|(g, m)| format!("({g})^{m}"))
            .collect();
        assert_eq!(printed, vec!["(x-y)^1", "(x+y)^1", "(x^2+y^2)^1"]);
        assert_eq!(fac.product().unwrap(), f);
    }

    #[test]
    fn factor_perfect_square() {
        let f = form(&[1, -2, 1]);
        let fac = factor_over_z(&f).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0].1, 2);
        assert_eq!(format!("{}", fac.factors[0].0), "x-y");
    }

    #[test]
    fn irreducible_quadratic_stays_whole() {
        let f = form(&[1, 0, 1]);
        let fac = factor_over_z(&f).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0].1, 1);
        assert!(is_irreducible(&f).unwrap());
    }

    #[test]
    fn quartic_with_no_roots_but_quadratic_split() {
        // (x^2+1)(x^2+2) = x^4 + 3x^2 + 2
        let f = form(&[1, 0, 3, 0, 2]);
        let fac = factor_over_z(&f).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert!(!is_irreducible(&f).unwrap());
        assert_eq!(fac.product().unwrap(), f);
    }

    #[test]
    fn x4_plus_1_is_irreducible_despite_splitting_everywhere() {
        let f = form(&[1, 0, 0, 0, 1]);
        assert!(is_irreducible(&f).unwrap());
    }

    #[test]
    fn strips_x_and_y_factors() {
        // x y^2 (x^2 + y^2) = x^3 y^2 + x y^4: degree 5,
        // coefficients a_5..a_0 = [0, 0, 1, 0, 1, 0]
        let f = BinaryForm::new(
            [0i64, 0, 1, 0, 1, 0]
                .iter()
                .map(|&c| BigInt::from(c))
                .collect(),
        );
        // both ends zero: rejected as constructed
        assert!(f.is_err());
        // y^2 (x^2+y^2) = x^2 y^2 + y^4 is fine
        let g = form(&[0, 0, 1, 0, 1]);
        let fac = factor_over_z(&g).unwrap();
        let printed: Vec<String> = fac
            .factors
            .iter()
            .map(|(h, m)| format!("({h})^{m}"))
            .collect();
        assert_eq!(printed, vec!["(y)^2", "(x^2+y^2)^1"]);
    }

    #[test]
    fn density_of_linear_form_is_one() {
        let f = form(&[1, -1]);
        let d = root_density(&f, 1000).unwrap();
        assert_eq!(d.hits, d.sample);
        assert!(d.sample > 0);
    }

    #[test]
    fn display_roundtrip_shapes() {
        assert_eq!(form(&[1, 0, 1]).to_string(), "x^2+y^2");
        assert_eq!(form(&[1, 1, -1]).to_string(), "x^2+xy-y^2");
        assert_eq!(form(&[2, 0, 2]).to_string(), "2x^2+2y^2");
        assert_eq!(form(&[1, 0, 0, -2]).to_string(), "x^3-2y^3");
    }

    #[test]
    fn verify_supplied_factorization() {
        let f = form(&[1, 0, 0, 0, -1]);
        let fac = factor_over_z(&f).unwrap();
        verify_factorization(&f, &fac).unwrap();
        // Tampered product fails.
        let bad = FormFactorization {
            unit: 1,
            content: BigInt::from(1),
            factors: vec![(form(&[1, 1]), 1), (form(&[1, -1]), 1)],
        };
        assert!(verify_factorization(&f, &bad).is_err());
    }
}
