//! Dense univariate polynomial arithmetic over F_p, enough for
//! distinct-degree factorization and root detection. Coefficients ascending,
//! always trimmed (empty vector = zero polynomial).

use crate::arith::{mulmod, powmod};

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

pub(crate) fn degree(f: &[u64]) -> Option<usize> {
    if f.is_empty() {
        None
    } else {
        Some(f.len() - 1)
    }
}

fn inv(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(ai, bj, p)) % p;
        }
    }
    trim(out)
}

/// (quotient, remainder) with divisor nonzero.
pub(crate) fn divmod(a: &[u64], m: &[u64], p: u64) -> (Poly, Poly) {
    assert!(!m.is_empty(), "division by zero polynomial");
    if a.len() < m.len() {
        return (vec![], a.to_vec());
    }
    let mut r = a.to_vec();
    let mut q = vec![0u64; a.len() - m.len() + 1];
    let lead_inv = inv(*m.last().unwrap(), p);
    for i in (0..q.len()).rev() {
        let top = r[i + m.len() - 1];
        if top == 0 {
            continue;
        }
        let c = mulmod(top, lead_inv, p);
        q[i] = c;
        for (j, &mj) in m.iter().enumerate() {
            let t = mulmod(c, mj, p);
            let idx = i + j;
            r[idx] = (r[idx] + p - t) % p;
        }
    }
    (trim(q), trim(r))
}

pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
    divmod(a, m, p).1
}

pub(crate) fn monic(f: &[u64], p: u64) -> Poly {
    match f.last() {
        None => vec![],
        Some(&1) => f.to_vec(),
        Some(&lc) => {
            let c = inv(lc, p);
            f.iter().map(|&x| mulmod(x, c, p)).collect()
        }
    }
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + p - y) % p;
    }
    trim(out)
}

/// g^e mod m, square-and-multiply.
pub(crate) fn powmod_poly(g: &[u64], e: u64, m: &[u64], p: u64) -> Poly {
    let mut base = rem(g, m, p);
    let mut acc = rem(&[1], m, p);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &base, p), m, p);
        }
        base = rem(&mul(&base, &base, p), m, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn derivative(f: &[u64], p: u64) -> Poly {
    if f.len() <= 1 {
        return vec![];
    }
    let mut out = Vec::with_capacity(f.len() - 1);
    for (i, &c) in f.iter().enumerate().skip(1) {
        out.push(mulmod(c, (i as u64) % p, p));
    }
    trim(out)
}

/// True iff f has a root in F_p, via gcd(x^p - x, f). Zero polynomial counts
/// as having roots.
pub(crate) fn has_root(f: &[u64], p: u64) -> bool {
    match degree(f) {
        None => true,
        Some(0) => false,
        Some(1) => true,
        _ => {
            let x = vec![0u64, 1];
            let xp = powmod_poly(&x, p, f, p);
            let g = gcd(&sub(&xp, &x, p), f, p);
            degree(&g).is_some_and(|d| d > 0)
        }
    }
}

/// Distinct-degree factorization of a squarefree monic-izable polynomial.
/// Returns ascending (degree d, number of irreducible factors of degree d).
pub(crate) fn distinct_degree_counts(f: &[u64], p: u64) -> Vec<(u32, u32)> {
    let mut f = monic(f, p);
    let mut out = Vec::new();
    let x = vec![0u64, 1];
    let mut h = rem(&x, &f, p);
    let mut d = 0u32;
    while degree(&f).unwrap_or(0) >= 2 * (d as usize + 1) {
        d += 1;
        h = powmod_poly(&h, p, &f, p);
        let g = gcd(&sub(&h, &x, p), &f, p);
        if let Some(gd) = degree(&g) {
            if gd > 0 {
                out.push((d, (gd / d as usize) as u32));
                f = divmod(&f, &g, p).0;
                h = rem(&h, &f, p);
            }
        }
    }
    if let Some(fd) = degree(&f) {
        if fd > 0 {
            out.push((fd as u32, 1));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The same root test with arbitrary-precision prime modulus. Only needed when
// an exponent criterion meets a prime factor beyond 64 bits.
// ---------------------------------------------------------------------------

pub(crate) mod big {
    use num_bigint::{BigInt, BigUint};
    use num_integer::Integer;
    use num_traits::{One, Zero};

    type BPoly = Vec<BigUint>;

    fn trim(mut f: BPoly) -> BPoly {
        while f.last().is_some_and(|c| c.is_zero()) {
            f.pop();
        }
        f
    }

    fn inv(a: &BigUint, p: &BigUint) -> BigUint {
        a.modpow(&(p - 2u32), p)
    }

    fn mul(a: &[BigUint], b: &[BigUint], p: &BigUint) -> BPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                out[i + j] = (&out[i + j] + ai * bj) % p;
            }
        }
        trim(out)
    }

    fn rem(a: &[BigUint], m: &[BigUint], p: &BigUint) -> BPoly {
        if a.len() < m.len() {
            return trim(a.to_vec());
        }
        let mut r = a.to_vec();
        let lead_inv = inv(m.last().unwrap(), p);
        for i in (0..=(a.len() - m.len())).rev() {
            let top = r[i + m.len() - 1].clone();
            if top.is_zero() {
                continue;
            }
            let c = (&top * &lead_inv) % p;
            for (j, mj) in m.iter().enumerate() {
                let t = (&c * mj) % p;
                let idx = i + j;
                r[idx] = ((&r[idx] + p) - t) % p;
            }
        }
        trim(r)
    }

    fn gcd(a: &[BigUint], b: &[BigUint], p: &BigUint) -> BPoly {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn sub(a: &[BigUint], b: &[BigUint], p: &BigUint) -> BPoly {
        let n = a.len().max(b.len());
        let zero = BigUint::zero();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i).unwrap_or(&zero);
            let y = b.get(i).unwrap_or(&zero);
            out.push(((x + p) - y) % p);
        }
        trim(out)
    }

    /// Reduce integer coefficients (ascending) mod p.
    pub(crate) fn reduce(coeffs: &[BigInt], p: &BigUint) -> BPoly {
        let pb = BigInt::from(p.clone());
        trim(
            coeffs
                .iter()
                .map(|c| c.mod_floor(&pb).to_biguint().unwrap())
                .collect(),
        )
    }

    /// Root test mod an arbitrary-precision prime, via gcd(x^p - x, f).
    pub(crate) fn has_root(f: &[BigUint], p: &BigUint) -> bool {
        let f = trim(f.to_vec());
        match f.len() {
            0 => true,
            1 => false,
            2 => true,
            _ => {
                // x^p mod f by square-and-multiply over the bits of p.
                let x = vec![BigUint::zero(), BigUint::one()];
                let mut acc = vec![BigUint::one()];
                let mut base = rem(&x, &f, p);
                let bits = p.bits();
                for i in 0..bits {
                    if p.bit(i) {
                        acc = rem(&mul(&acc, &base, p), &f, p);
                    }
                    base = rem(&mul(&base, &base, p), &f, p);
                }
                let g = gcd(&sub(&acc, &x, p), &f, p);
                g.len() > 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::{BigInt, BigUint};

    #[test]
    fn divmod_roundtrip() {
        let p = 13;
        let a = vec![3, 0, 7, 1, 9]; // 9x^4 + x^3 + 7x^2 + 3
        let m = vec![5, 1, 2]; // 2x^2 + x + 5
        let (q, r) = divmod(&a, &m, p);
        let back = trim(
            mul(&q, &m, p)
                .iter()
                .zip(r.iter().chain(std::iter::repeat(&0)))
                .map(|(x, y)| (x + y) % p)
                .collect(),
        );
        // add r properly (lengths differ)
        let mut sum = mul(&q, &m, p);
        for (i, &c) in r.iter().enumerate() {
            if i < sum.len() {
                sum[i] = (sum[i] + c) % p;
            } else {
                sum.push(c);
            }
        }
        assert_eq!(trim(sum), trim(a));
        let _ = back;
    }

    #[test]
    fn root_detection() {
        // x^2 + 1 over F_5 has roots, over F_3 it does not.
        assert!(has_root(&[1, 0, 1], 5));
        assert!(!has_root(&[1, 0, 1], 3));
        // x^2 - 2 over F_7: 3^2 = 2, root exists.
        assert!(has_root(&[5, 0, 1], 7));
    }

    #[test]
    fn ddf_degree_counts() {
        // x^3 - 2 mod 5 = (x - 3)(x^2 + 3x + 4), degrees [1, 2]
        let f = vec![3u64, 0, 0, 1]; // x^3 + 3 = x^3 - 2 mod 5
        let counts = distinct_degree_counts(&f, 5);
        assert_eq!(counts, vec![(1, 1), (2, 1)]);
        // x^2 + 1 mod 5 splits into two linears
        assert_eq!(distinct_degree_counts(&[1, 0, 1], 5), vec![(1, 2)]);
        // x^2 + 1 mod 3 irreducible
        assert_eq!(distinct_degree_counts(&[1, 0, 1], 3), vec![(2, 1)]);
    }

    #[test]
    fn big_root_test_agrees_with_small() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let pb = BigUint::from(p);
            for f in [vec![1i64, 0, 1], vec![-2, 0, 0, 1], vec![1, 1, 1, 1]] {
                let small: Vec<u64> = f
                    .iter()
                    .map(|&c| c.rem_euclid(p as i64) as u64)
                    .collect();
                let small = trim(small);
                let bigf = big::reduce(
                    &f.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>(),
                    &pb,
                );
                assert_eq!(
                    has_root(&small, p),
                    big::has_root(&bigf, &pb),
                    "p={p} f={f:?}"
                );
            }
        }
    }
}
