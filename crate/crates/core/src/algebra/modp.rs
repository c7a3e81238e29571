//! Reduction of Q(i) polynomials modulo primes `p ≡ 1 (mod 4)`, where `i`
//! maps to a square root of −1 in F_p.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::gaussian::GaussianRational;
use super::poly::ComplexPoly;

/// `(p, s)` with `p ≡ 1 (mod 4)` prime and `s² ≡ −1 (mod p)`.
const PRIMES: [(u64, u64); 3] = [
    (2305843009213693921, 583529827753931384),
    (2305843009213693693, 966685122347009555),
    (2305843009213693669, 1015389886790033265),
];

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn add(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn sub(a: u64, b: u64, p: u64) -> u64 {
    add(a, p - b, p)
}

fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv(a: u64, p: u64) -> u64 {
    pow(a, p - 2, p)
}

fn reduce_int(n: &BigInt, p: u64) -> u64 {
    let r = n % BigInt::from(p);
    let r = if r < BigInt::zero() { r + BigInt::from(p) } else { r };
    r.to_u64().expect("reduced below p")
}

fn reduce_rational(q: &BigRational, p: u64) -> Option<u64> {
    let den = reduce_int(q.denom(), p);
    (den != 0).then(|| mul(reduce_int(q.numer(), p), inv(den, p), p))
}

fn reduce(c: &GaussianRational, p: u64, s: u64) -> Option<u64> {
    Some(add(reduce_rational(&c.re, p)?, mul(reduce_rational(&c.im, p)?, s, p), p))
}

/// Image of `a` in F_p[z], or `None` when `p` divides a denominator or the
/// leading coefficient.
fn reduce_poly(a: &ComplexPoly, p: u64, s: u64) -> Option<Vec<u64>> {
    let v: Option<Vec<u64>> = a.coeffs().iter().map(|c| reduce(c, p, s)).collect();
    v.filter(|v| v.last().is_some_and(|&l| l != 0))
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lead_inv = inv(b[db], p);
    while a.len() > db {
        let t = mul(*a.last().unwrap(), lead_inv, p);
        let shift = a.len() - 1 - db;
        for (j, &bc) in b.iter().enumerate() {
            a[shift + j] = sub(a[shift + j], mul(t, bc, p), p);
        }
        a.pop();
        trim(&mut a);
    }
    a
}

fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    while !b.is_empty() {
        let r = rem(a, &b, p);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

/// True when some prime of good reduction shows `gcd(a, b) = 1`. A `false`
/// answer proves nothing.
pub(crate) fn provably_coprime(a: &ComplexPoly, b: &ComplexPoly) -> bool {
    if a.is_zero() || b.is_zero() {
        return false;
    }
    PRIMES.iter().any(|&(p, s)| match (reduce_poly(a, p, s), reduce_poly(b, p, s)) {
        (Some(x), Some(y)) => gcd_degree(x, y, p) == 0,
        _ => false,
    })
}
