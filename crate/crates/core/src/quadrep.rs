//! Quadratic-form representability: the exponent necessary condition for
//! arbitrary binary forms, a complete criterion for positive definite forms
//! with fundamental class-number-one discriminant, the three-squares test,
//! and principal norm forms.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, Effort, PrimeFactorization};
use crate::formclass::{pset_status, pset_status_big, BinaryForm, PsetStatus};
use crate::{Error, Limits, Result};

/// Integral quadratic form a x^2 + b x y + c y^2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    disc: BigInt,
    content: BigInt,
}

impl QuadForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return Err(Error::InvalidForm("zero form".into()));
        }
        let disc = &b * &b - BigInt::from(4) * &a * &c;
        let content = a.gcd(&b).gcd(&c);
        Ok(QuadForm {
            a,
            b,
            c,
            disc,
            content,
        })
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(BigInt::from(a), BigInt::from(b), BigInt::from(c))
    }

    pub fn from_binary(form: &BinaryForm) -> Result<Self> {
        if form.degree() != 2 {
            return Err(Error::InvalidForm(format!(
                "expected a quadratic form, got degree {}",
                form.degree()
            )));
        }
        Self::new(
            form.coeff(2).clone(),
            form.coeff(1).clone(),
            form.coeff(0).clone(),
        )
    }

    pub fn to_binary(&self) -> BinaryForm {
        BinaryForm::new(vec![self.a.clone(), self.b.clone(), self.c.clone()])
            .expect("a quadratic form is a valid binary form")
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn disc(&self) -> &BigInt {
        &self.disc
    }
    pub fn content(&self) -> &BigInt {
        &self.content
    }

    pub fn disc_mod(&self) -> BigInt {
        let g2 = &self.content * &self.content;
        let (q, r) = self.disc.div_rem(&g2);
        debug_assert!(r.is_zero());
        q
    }

    pub fn is_positive_definite(&self) -> bool {
        self.disc.is_negative() && self.a.is_positive()
    }

    /// The same form read with x and y swapped.
    pub fn swapped(&self) -> QuadForm {
        QuadForm {
            a: self.c.clone(),
            b: self.b.clone(),
            c: self.a.clone(),
            disc: self.disc.clone(),
            content: self.content.clone(),
        }
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }
}

impl std::fmt::Display for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_binary())
    }
}

/// Splitting behavior of a prime in the quadratic field of discriminant d.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitTag {
    Split,
    Inert,
    Ramified,
}

pub fn split_tag(delta: &BigInt, p: u64) -> SplitTag {
    match arith::kronecker(delta, p) {
        1 => SplitTag::Split,
        -1 => SplitTag::Inert,
        _ => SplitTag::Ramified,
    }
}

/// Fundamental discriminant test: 1 mod 4 and squarefree, or 4m with
/// m = 2, 3 mod 4 squarefree. Inputs that are 2 or 3 mod 4 are not
/// discriminants at all and are rejected.
pub fn is_fundamental(delta: &BigInt) -> Result<bool> {
    if delta.is_zero() {
        return Err(Error::ZeroInput);
    }
    let four = BigInt::from(4);
    match delta.mod_floor(&four).to_u8().unwrap() {
        1 => squarefree(delta),
        0 => {
            let m = delta / &four;
            let r = m.mod_floor(&four).to_u8().unwrap();
            if r == 2 || r == 3 {
                squarefree(&m)
            } else {
                Ok(false)
            }
        }
        _ => Err(Error::Unsupported(format!(
            "{delta} is 2 or 3 mod 4, not a discriminant"
        ))),
    }
}

fn squarefree(n: &BigInt) -> Result<bool> {
    let f = arith::factorize(n, &Effort::default())?;
    if !f.is_complete() {
        return Err(Error::IncompleteFactorization(
            "squarefreeness undecidable without a complete factorization".into(),
        ));
    }
    let all_single = f.factors().all(|(_, e)| e == 1);
    Ok(all_single)
}

// ---------------------------------------------------------------------------
// Exponent criterion (necessary condition, any degree)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExponentVerdict {
    /// Every eligible prime divides N/content to an exponent divisible by
    /// the degree. Necessary only; says nothing about sufficiency.
    PassesNecessary,
    Blocked { prime: BigUint, exponent: u64 },
}

/// Necessary condition for N to be represented by the form: each eligible
/// prime in the set forcing p | x, p | y must divide N/content to an
/// exponent divisible by deg F. Primes violating content divisibility are
/// blocking too (the content always divides a represented integer).
pub fn exponent_criterion(
    form: &BinaryForm,
    n: &PrimeFactorization,
) -> Result<ExponentVerdict> {
    if !n.is_complete() {
        return Err(Error::IncompleteFactorization(
            "the exponent criterion needs a complete factorization".into(),
        ));
    }
    let deg = form.degree() as u64;
    let g_fact = arith::factorize(form.content(), &Effort::default())?;
    for (q, ge) in g_fact.factors() {
        if n.exponent_of(q) < ge {
            return Ok(ExponentVerdict::Blocked {
                prime: q.clone(),
                exponent: n.exponent_of(q),
            });
        }
    }
    for (q, e) in n.factors() {
        let l = e - g_fact.exponent_of(q);
        if l == 0 || l % deg == 0 {
            continue;
        }
        let eligible = match q.to_u64() {
            Some(small) => pset_status(form, small) == PsetStatus::InSet,
            None => pset_status_big(form, q) == PsetStatus::InSet,
        };
        if eligible {
            return Ok(ExponentVerdict::Blocked {
                prime: q.clone(),
                exponent: l,
            });
        }
    }
    Ok(ExponentVerdict::PassesNecessary)
}

// ---------------------------------------------------------------------------
// Complete brute-force search (positive definite forms)
// ---------------------------------------------------------------------------

fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exhaustive representation search for a positive definite form; the bound
/// |y| <= sqrt(4aN/|D|) makes it complete. Returns the solution with the
/// smallest |y| (positive sign first), then smallest |x|.
pub fn representable_bruteforce(
    form: &QuadForm,
    n: &BigInt,
    limits: &Limits,
) -> Result<Option<(i64, i64)>> {
    if !form.is_positive_definite() {
        return Err(Error::Unsupported(
            "complete search needs a positive definite form".into(),
        ));
    }
    if !n.is_positive() {
        return Err(Error::Unsupported("search target must be positive".into()));
    }
    let n128 = n
        .to_u64()
        .filter(|&v| v <= limits.brute_force_bound)
        .ok_or(Error::BoundExceeded {
            what: "brute-force target",
            value: u64::MAX,
            bound: limits.brute_force_bound,
        })? as i128;
    let (a, b, c) = (
        form.a.to_i128().ok_or_else(|| Error::Overflow("form coefficient".into()))?,
        form.b.to_i128().ok_or_else(|| Error::Overflow("form coefficient".into()))?,
        form.c.to_i128().ok_or_else(|| Error::Overflow("form coefficient".into()))?,
    );
    let d = b * b - 4 * a * c; // negative
    let ymax = isqrt_u128((4 * a * n128 / -d) as u128) as i128;
    let _ = c;

    let mut ys = Vec::with_capacity(2 * ymax as usize + 1);
    ys.push(0i128);
    for y in 1..=ymax {
        ys.push(y);
        ys.push(-y);
    }
    for y in ys {
        // a x^2 + (b y) x + (c y^2 - n) = 0
        let under = d * y * y + 4 * a * n128;
        if under < 0 {
            continue;
        }
        let s = isqrt_u128(under as u128) as i128;
        if s * s != under {
            continue;
        }
        let mut xs: Vec<i128> = Vec::new();
        for num in [-b * y + s, -b * y - s] {
            if num.rem_euclid(2 * a) == 0 {
                xs.push(num / (2 * a));
            }
        }
        xs.sort_by_key(|&x| (x.unsigned_abs(), x < 0));
        xs.dedup();
        if let Some(&x) = xs.first() {
            return Ok(Some((x as i64, y as i64)));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Full criterion at class number one
// ---------------------------------------------------------------------------

/// The nine imaginary quadratic fields of class number one, by fundamental
/// discriminant.
pub const CLASS_NUMBER_ONE_DISCS: [i64; 9] = [-3, -4, -7, -8, -11, -19, -43, -67, -163];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepVerdict {
    Representable,
    NotRepresentable(NotRepReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotRepReason {
    /// The form content does not divide the target.
    ContentMismatch { prime: BigUint },
    /// Two-adic exponent is odd while the modified discriminant is 5 mod 8.
    TwoAdicParity { exponent: u64 },
    /// An odd inert prime appears to an odd exponent.
    InertParity { prime: BigUint, exponent: u64 },
}

impl std::fmt::Display for NotRepReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NotRepReason::ContentMismatch { prime } => {
                write!(f, "content does not divide the target at {prime}")
            }
            NotRepReason::TwoAdicParity { exponent } => {
                write!(f, "2 is inert and appears to the odd exponent {exponent}")
            }
            NotRepReason::InertParity { prime, exponent } => {
                write!(f, "inert prime {prime} appears to the odd exponent {exponent}")
            }
        }
    }
}

/// Decide representability of a positive N by a positive definite form whose
/// modified discriminant is fundamental with class number one and whose
/// reduced outer coefficient (a, or c after swapping) is prime or 1.
///
/// The decision reads exponents of a*N/g only: parity of the 2-exponent when
/// the discriminant is 5 mod 8, parity of every odd inert prime exponent.
/// Principality is automatic at class number one, so the two parity checks
/// are also sufficient. Ramified and split exponents are unconstrained.
/// x = 0 and y = 0 count as representations.
pub fn representable_criterion(
    form: &QuadForm,
    n: &PrimeFactorization,
) -> Result<RepVerdict> {
    if !n.is_complete() {
        return Err(Error::IncompleteFactorization(
            "criterion needs a complete factorization".into(),
        ));
    }
    if n.sign() < 0 {
        return Err(Error::Unsupported(
            "criterion applies to positive targets".into(),
        ));
    }
    if !form.is_positive_definite() {
        return Err(Error::Unsupported(
            "criterion applies to positive definite forms".into(),
        ));
    }
    let disc_mod = form.disc_mod();
    if !is_fundamental(&disc_mod)? {
        return Err(Error::Unsupported(format!(
            "modified discriminant {disc_mod} is not fundamental"
        )));
    }
    let dm = disc_mod
        .to_i64()
        .ok_or_else(|| Error::Overflow("discriminant".into()))?;
    if !CLASS_NUMBER_ONE_DISCS.contains(&dm) {
        return Err(Error::Unsupported(format!(
            "discriminant {dm} has class number > 1; only the nine imaginary \
             class-number-one discriminants are supported"
        )));
    }

    // Reduce to the primitive form and pick a prime-or-one outer coefficient.
    let g = form.content().clone();
    let a_red = form.a() / &g;
    let c_red = form.c() / &g;
    let prime_or_one = |v: &BigInt| {
        v.is_one() || (v.is_positive() && arith::is_prime_big(v.magnitude()))
    };
    let side = if prime_or_one(&a_red) {
        a_red
    } else if prime_or_one(&c_red) {
        c_red
    } else {
        return Err(Error::Unsupported(
            "neither outer coefficient of the primitive form is prime or 1".into(),
        ));
    };

    // Exponents of side * N / g.
    let g_fact = arith::factorize(&g, &Effort::default())?;
    let mut exps: std::collections::BTreeMap<BigUint, i64> = std::collections::BTreeMap::new();
    for (p, e) in n.factors() {
        *exps.entry(p.clone()).or_insert(0) += e as i64;
    }
    if !side.is_one() {
        *exps.entry(side.magnitude().clone()).or_insert(0) += 1;
    }
    for (p, e) in g_fact.factors() {
        *exps.entry(p.clone()).or_insert(0) -= e as i64;
    }
    for (p, e) in &exps {
        if *e < 0 {
            return Ok(RepVerdict::NotRepresentable(NotRepReason::ContentMismatch {
                prime: p.clone(),
            }));
        }
    }

    let two = BigUint::from(2u32);
    for (p, e) in &exps {
        let e = *e as u64;
        if e.is_multiple_of(2) {
            continue;
        }
        if *p == two {
            if dm.rem_euclid(8) == 5 {
                return Ok(RepVerdict::NotRepresentable(NotRepReason::TwoAdicParity {
                    exponent: e,
                }));
            }
        } else {
            let inert = match p.to_u64() {
                Some(small) => arith::kronecker_i64(dm, small) == -1,
                None => arith::kronecker_big(&disc_mod, p) == -1,
            };
            if inert {
                return Ok(RepVerdict::NotRepresentable(NotRepReason::InertParity {
                    prime: p.clone(),
                    exponent: e,
                }));
            }
        }
    }
    Ok(RepVerdict::Representable)
}

// ---------------------------------------------------------------------------
// Three squares, principal forms
// ---------------------------------------------------------------------------

/// Sum-of-three-squares test: strip factors of 4, then require the residue
/// to differ from 7 mod 8.
pub fn is_sum_three_squares(n: &BigUint) -> bool {
    if n.is_zero() {
        return true;
    }
    let mut m = n.clone();
    let four = BigUint::from(4u32);
    while (&m % &four).is_zero() {
        m /= &four;
    }
    (m % BigUint::from(8u32)) != BigUint::from(7u32)
}

/// Principal form of a discriminant: x^2 - (d/4) y^2 for even d, or
/// x^2 + xy + ((1-d)/4) y^2 for d = 1 mod 4. This is the two-variable
/// restriction of the norm form on the basis {1, w} of the order.
pub fn principal_form(delta: &BigInt) -> Result<QuadForm> {
    if delta.is_zero() {
        return Err(Error::ZeroInput);
    }
    let four = BigInt::from(4);
    match delta.mod_floor(&four).to_u8().unwrap() {
        0 => QuadForm::new(BigInt::one(), BigInt::zero(), -(delta / &four)),
        1 => QuadForm::new(
            BigInt::one(),
            BigInt::one(),
            (BigInt::one() - delta) / &four,
        ),
        _ => Err(Error::Unsupported(format!(
            "{delta} is 2 or 3 mod 4, not a discriminant"
        ))),
    }
}
