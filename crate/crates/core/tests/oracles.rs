//! Independent brute-force oracles for everything the fast paths compute:
//! full mod-p factorization for cycle types, square-root solvability for
//! Kronecker symbols, lattice-point enumeration for ideal counts, exhaustive
//! searches for representability, and sieve-free searches for the
//! polynomial-factorial runs.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use formfact::arith::{self, Effort};
use formfact::bhargava::{self, BhargavaSet};
use formfact::formclass::{self, BinaryForm, PsetStatus};
use formfact::genfact::{self, FieldSplitting, LocalSplitting};
use formfact::hunt::{self, VerdictKind};
use formfact::quadrep::{self, ExponentVerdict, RepVerdict};
use formfact::Limits;

// ---------------------------------------------------------------------------
// Oracle: complete factorization of a polynomial over F_p by trial division
// with ascending-degree monic divisors. Returns the multiset of factor
// degrees (degrees <= 4 suffice for the corpus).
// ---------------------------------------------------------------------------

fn poly_mod_p(form: &BinaryForm, p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut asc: Vec<u64> = form
        .poly_ascending()
        .iter()
        .map(|c| {
            use num_integer::Integer;
            c.mod_floor(&pb).to_u64().unwrap()
        })
        .collect();
    while asc.last() == Some(&0) {
        asc.pop();
    }
    asc
}

fn poly_divmod(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rem = a.to_vec();
    if rem.len() < m.len() {
        return (vec![], rem);
    }
    let inv = |x: u64| -> u64 {
        // p prime, x nonzero
        let mut acc = 1u64;
        let mut b = x % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    };
    let lead_inv = inv(*m.last().unwrap());
    let mut q = vec![0u64; rem.len() - m.len() + 1];
    for i in (0..q.len()).rev() {
        let c = rem[i + m.len() - 1] % p * lead_inv % p;
        q[i] = c;
        for (j, &mj) in m.iter().enumerate() {
            rem[i + j] = (rem[i + j] + p - c * mj % p) % p;
        }
    }
    while rem.last() == Some(&0) {
        rem.pop();
    }
    while q.last() == Some(&0) {
        q.pop();
    }
    (q, rem)
}

/// Degree multiset by exhaustive trial division (that the divisors come out
/// irreducible is forced by extracting degrees in ascending order).
fn factor_degrees_oracle(form: &BinaryForm, p: u64) -> Vec<u32> {
    let mut f = poly_mod_p(form, p);
    assert!(f.len() >= 2, "oracle expects full degree at good primes");
    let mut degrees = Vec::new();
    for d in 1..=2u64 {
        // enumerate monic polynomials of degree d
        let count = p.pow(d as u32);
        let mut c = 0u64;
        while c < count && f.len() as u64 > d {
            let mut g = Vec::with_capacity(d as usize + 1);
            let mut t = c;
            for _ in 0..d {
                g.push(t % p);
                t /= p;
            }
            g.push(1);
            loop {
                let (q, r) = poly_divmod(&f, &g, p);
                if r.is_empty() && !q.is_empty() {
                    degrees.push(d as u32);
                    f = q;
                } else {
                    break;
                }
                if (f.len() as u64) <= d {
                    break;
                }
            }
            c += 1;
        }
    }
    if f.len() > 1 {
        degrees.push((f.len() - 1) as u32);
    }
    degrees.sort_unstable();
    degrees
}

fn corpus() -> Vec<BinaryForm> {
    vec![
        BinaryForm::from_i64(&[1, 0, 1]).unwrap(),          // x^2+y^2
        BinaryForm::from_i64(&[1, 1, 1]).unwrap(),          // x^2+xy+y^2
        BinaryForm::from_i64(&[1, 0, -2]).unwrap(),         // x^2-2y^2
        BinaryForm::from_i64(&[1, 0, 0, -2]).unwrap(),      // x^3-2y^3
        BinaryForm::from_i64(&[1, 1, 1, 1, 1]).unwrap(),    // quartic, cyclotomic shape
        BinaryForm::from_i64(&[1, 0, 0, 0, 1]).unwrap(),    // x^4+y^4
        BinaryForm::from_i64(&[2, 1, 3]).unwrap(),          // 2x^2+xy+3y^2
    ]
}

#[test]
fn cycle_types_match_full_factorization() {
    use num_integer::Integer;
    for form in corpus() {
        let n = form.degree() as u32;
        for p in arith::sieve_primes(500) {
            let pb = BigInt::from(p);
            if form.leading().mod_floor(&pb).to_u64().unwrap() == 0
                || form.disc_mod().mod_floor(&pb).to_u64().unwrap() == 0
            {
                continue;
            }
            let status = formclass::prime_status(&form, p);
            let ct = match status.tag {
                formclass::PrimeTag::Good(ct) => ct,
                formclass::PrimeTag::Bad => panic!("{form} should be good at {p}"),
            };
            assert_eq!(ct.sum(), n, "degree sum at p={p} for {form}");
            let oracle = factor_degrees_oracle(&form, p);
            assert_eq!(ct.parts(), &oracle[..], "p={p} form={form}");
        }
    }
}

#[test]
fn pset_membership_is_min_part_at_least_two() {
    use num_integer::Integer;
    for form in corpus() {
        if !formclass::is_irreducible(&form).unwrap() {
            continue;
        }
        for p in arith::sieve_primes(500) {
            let pb = BigInt::from(p);
            if form.leading().mod_floor(&pb).to_u64().unwrap() == 0
                || form.disc_mod().mod_floor(&pb).to_u64().unwrap() == 0
            {
                continue;
            }
            let ct = formclass::cycle_type(&form, p).unwrap();
            let in_set = formclass::pset_status(&form, p) == PsetStatus::InSet;
            assert_eq!(in_set, ct.min_part() >= 2, "p={p} form={form}");
        }
    }
}

// ---------------------------------------------------------------------------
// Kronecker vs. square solvability
// ---------------------------------------------------------------------------

#[test]
fn kronecker_matches_square_solvability() {
    for delta in -50i64..=50 {
        if delta == 0 {
            continue;
        }
        for p in arith::sieve_primes(200) {
            if p == 2 {
                continue;
            }
            let k = arith::kronecker_i64(delta, p);
            let has_sqrt = (0..p).any(|x| {
                (x * x % p) as i64 == delta.rem_euclid(p as i64)
            });
            let divides = delta.rem_euclid(p as i64) == 0;
            if divides {
                assert_eq!(k, 0, "delta={delta} p={p}");
            } else {
                assert_eq!(k == 1, has_sqrt, "delta={delta} p={p}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Ideal counts vs. lattice enumeration (class number one fields)
// ---------------------------------------------------------------------------

fn exact_isqrt(n: i64) -> Option<i64> {
    debug_assert!(n >= 0);
    let mut s = (n as f64).sqrt() as i64;
    while s > 0 && s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    (s * s == n).then_some(s)
}

/// Number of ideals of norm n in the maximal order of the field with
/// fundamental discriminant delta in {-3, -4, -8}: count elements of norm n
/// (solutions of the principal form) and divide by the unit count, which is
/// exact at class number one.
fn ideal_count_lattice(delta: i64, n: u64) -> u64 {
    let (b, c, units) = match delta {
        -3 => (1i64, 1i64, 6u64),
        -4 => (0, 1, 4),
        -8 => (0, 2, 2),
        _ => panic!("unsupported discriminant {delta}"),
    };
    // Solve x^2 + b x y + c y^2 = n per y: x = (-b y +- s)/2, s^2 = D y^2 + 4n.
    let disc = b * b - 4 * c; // negative
    let mut count = 0u64;
    let ymax = ((4.0 * n as f64 / (-disc) as f64).sqrt() as i64) + 2;
    for y in -ymax..=ymax {
        let under = disc * y * y + 4 * n as i64;
        if under < 0 {
            continue;
        }
        if let Some(s) = exact_isqrt(under) {
            let roots: &[i64] = if s == 0 { &[0] } else { &[1, -1] };
            for &sign in roots {
                if (-b * y + sign * s).rem_euclid(2) == 0 {
                    count += 1;
                }
            }
        }
    }
    assert_eq!(count % units, 0, "delta={delta} n={n} count={count}");
    count / units
}

#[test]
fn prime_power_ideal_counts_match_lattice() {
    for &delta in &[-4i64, -3, -8] {
        let field = FieldSplitting::quadratic(delta).unwrap();
        for p in arith::sieve_primes(13) {
            for m in 0..=4u64 {
                let norm = p.pow(m as u32);
                let fast = genfact::ideal_count_prime_power(&field.local(p).unwrap(), m);
                let slow = ideal_count_lattice(delta, norm);
                assert_eq!(fast, slow, "delta={delta} p={p} m={m}");
            }
        }
    }
}

#[test]
fn composite_ideal_counts_match_divisor_sum() {
    for &delta in &[-4i64, -3, -8] {
        let field = FieldSplitting::quadratic(delta).unwrap();
        let upto = genfact::ideal_counts_upto(&field, 500).unwrap();
        let spf = arith::smallest_prime_factors(500);
        for n in 1..=500u64 {
            // literal divisor sum of the Kronecker character
            let mut sum = 0i64;
            for d in 1..=n {
                if n % d == 0 {
                    sum += arith::kronecker_multiplicative(delta, d, &spf) as i64;
                }
            }
            assert_eq!(upto[n as usize], sum, "delta={delta} n={n}");
            assert_eq!(
                genfact::ideal_count(&field, n).unwrap() as i64,
                sum,
                "delta={delta} n={n}"
            );
        }
    }
}

#[test]
fn local_degree_identity_for_quadratic_fields() {
    for &delta in &[-4i64, -3, -8, -7, 5, 13] {
        let field = FieldSplitting::quadratic(delta).unwrap();
        for p in arith::sieve_primes(300) {
            match field.local(p).unwrap() {
                LocalSplitting::Ramified => {}
                l @ LocalSplitting::Unramified { .. } => {
                    assert_eq!(l.g(1) + 2 * l.g(2), 2, "delta={delta} p={p}");
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Representability: criterion vs. complete search, necessity of exponents
// ---------------------------------------------------------------------------

#[test]
fn criterion_agrees_with_complete_search_small_grid() {
    let limits = Limits::default();
    for &delta in &[-3i64, -4, -7, -8, -11] {
        let form = quadrep::principal_form(&BigInt::from(delta)).unwrap();
        for n in 1..=600i64 {
            let nf = arith::factorize(&BigInt::from(n), &Effort::default()).unwrap();
            let verdict = quadrep::representable_criterion(&form, &nf).unwrap();
            let found = quadrep::representable_bruteforce(&form, &BigInt::from(n), &limits)
                .unwrap()
                .is_some();
            assert_eq!(
                matches!(verdict, RepVerdict::Representable),
                found,
                "delta={delta} n={n}"
            );
        }
    }
}

#[test]
fn exponent_criterion_is_necessary() {
    let limits = Limits::default();
    for &delta in &[-3i64, -4, -7, -8, -11] {
        let qform = quadrep::principal_form(&BigInt::from(delta)).unwrap();
        let bform = qform.to_binary();
        for n in 1..=600i64 {
            let found = quadrep::representable_bruteforce(&qform, &BigInt::from(n), &limits)
                .unwrap()
                .is_some();
            if found {
                let nf = arith::factorize(&BigInt::from(n), &Effort::default()).unwrap();
                assert_eq!(
                    quadrep::exponent_criterion(&bform, &nf).unwrap(),
                    ExponentVerdict::PassesNecessary,
                    "delta={delta} n={n}"
                );
            }
        }
    }
}

#[test]
fn three_squares_matches_exhaustive() {
    // all sums of three squares up to 4096
    let bound = 4096u64;
    let mut table = vec![false; bound as usize + 1];
    let r = (bound as f64).sqrt() as u64 + 1;
    for a in 0..=r {
        for b in 0..=r {
            let ab = a * a + b * b;
            if ab > bound {
                break;
            }
            for c in 0..=r {
                let s = ab + c * c;
                if s > bound {
                    break;
                }
                table[s as usize] = true;
            }
        }
    }
    for n in 0..=bound {
        assert_eq!(
            quadrep::is_sum_three_squares(&BigUint::from(n)),
            table[n as usize],
            "n={n}"
        );
    }
}

// ---------------------------------------------------------------------------
// Legendre sums, factorize round trips at factorial scale
// ---------------------------------------------------------------------------

#[test]
fn factorial_valuations_match_legendre_sums() {
    let mut fact = BigInt::from(1);
    for l in 1..=200u64 {
        fact *= BigInt::from(l);
        let f = arith::factorize(&fact, &Effort::default()).unwrap();
        for p in arith::sieve_primes(l) {
            let direct: u64 = {
                let mut acc = 0;
                let mut q = p;
                while q <= l {
                    acc += l / q;
                    match q.checked_mul(p) {
                        Some(next) => q = next,
                        None => break,
                    }
                }
                acc
            };
            assert_eq!(
                arith::p_valuation(&BigUint::from(p), &f).unwrap(),
                direct,
                "p={p} l={l}"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Generalized factorial closed forms vs. greedy orderings
// ---------------------------------------------------------------------------

#[test]
fn progression_closed_forms_match_greedy() {
    for (a, b) in [(2i64, 0i64), (2, 1), (3, 0), (3, 1)] {
        let set = BhargavaSet::ap(a, b).unwrap();
        for p in [2u64, 3, 5, 7, 11] {
            let seq = bhargava::p_ordering(&set, p, 10).unwrap();
            for l in 0..=10u64 {
                assert!(seq.stable[l as usize], "a={a} b={b} p={p} l={l}");
                let mut expect = 0u64;
                // v_p(a^l * l!)
                let mut m = a.unsigned_abs();
                while m % p == 0 {
                    expect += l;
                    m /= p;
                }
                let mut q = p;
                while q <= l {
                    expect += l / q;
                    q *= p;
                }
                assert_eq!(seq.values[l as usize], expect, "a={a} b={b} p={p} l={l}");
            }
        }
    }
}

#[test]
fn quadratic_image_table_matches_greedy() {
    let set = BhargavaSet::poly_image(vec![1, 0, 0]).unwrap();
    for p in [3u64, 5, 7, 11, 13] {
        let seq = bhargava::p_ordering(&set, p, p).unwrap();
        for l in 0..=p {
            assert!(seq.stable[l as usize], "p={p} l={l}");
            let expect = bhargava::quad_image_valuation(p, l, (1, 0, 0)).unwrap() as u64;
            assert_eq!(seq.values[l as usize], expect, "p={p} l={l}");
        }
    }
}

#[test]
fn cube_image_counts_match_enumeration() {
    for p in arith::sieve_primes(100) {
        let mut seen = vec![false; p as usize];
        for n in 0..p {
            seen[((n * n % p) * n % p) as usize] = true;
        }
        let direct = seen.iter().filter(|&&s| s).count() as u64;
        assert_eq!(bhargava::cube_image_count(p), direct, "p={p}");
    }
}

// ---------------------------------------------------------------------------
// Brocard runs: the sieve must be a pure accelerator
// ---------------------------------------------------------------------------

#[test]
fn sieved_search_equals_naive_search() {
    let limits = Limits::default();
    let polys: Vec<Vec<BigInt>> = vec![
        [-1, 0, 1].iter().map(|&c| BigInt::from(c)).collect(),
        [-2, 0, 1].iter().map(|&c| BigInt::from(c)).collect(),
        [-1, 0, 0, 0, 1].iter().map(|&c| BigInt::from(c)).collect(),
        [5, -1, 3].iter().map(|&c| BigInt::from(c)).collect(),
    ];
    for poly in &polys {
        let report = hunt::brocard_search(poly, 25, &limits).unwrap();
        let mut fact = BigInt::from(1);
        for l in 1..=25u64 {
            fact *= BigInt::from(l);
            let naive = hunt::integer_roots(poly, &fact, &limits).unwrap();
            let entry = report.entries.iter().find(|e| e.l == l).unwrap();
            if naive.is_empty() {
                assert_eq!(entry.verdict, VerdictKind::NoSolution, "l={l}");
            } else {
                assert_eq!(entry.verdict, VerdictKind::Solution, "l={l}");
                let got: Vec<String> = entry.witness.clone().unwrap();
                let expect: Vec<String> = naive.iter().map(|r| r.to_string()).collect();
                assert_eq!(got, expect, "l={l}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Density convergence
// ---------------------------------------------------------------------------

#[test]
fn root_density_converges_on_the_corpus() {
    for form in [
        BinaryForm::from_i64(&[1, 0, 1]).unwrap(),
        BinaryForm::from_i64(&[1, 0, 0, -2]).unwrap(),
    ] {
        let rows =
            formclass::root_density_checkpoints(&form, &[500_000, 1_000_000]).unwrap();
        let half = rows[0].1.value();
        let full = rows[1].1.value();
        assert!(
            (half - full).abs() <= 0.02,
            "{form}: {half} vs {full}"
        );
    }
}
