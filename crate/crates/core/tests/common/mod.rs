//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's number theory.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use k3fm_core::lattice::IntegerLattice;

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn distinct_primes(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p))
}

pub fn squarefree(n: u64) -> bool {
    (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p * p))
}

/// Euler's totient by counting units.
pub fn phi_count(m: u64) -> u64 {
    (1..=m).filter(|&k| gcd(k as i128, m as i128) == 1).count() as u64
}

/// Units `u mod 2n` with `u^2 = 1 mod 4n`: the isometries of `<1/(2n)>`.
pub fn rank_one_isometries(n: u64) -> u64 {
    let m = 2 * n;
    (0..m)
        .filter(|&u| gcd(u as i128, m as i128) == 1 && (u * u) % (4 * n) == 1 % (4 * n))
        .count() as u64
}

pub fn isqrt(n: i128) -> i128 {
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Smallest `(t, u)` with `u >= 1` and `t^2 - d u^2 = 4`, by search.
pub fn pell_brute(d: i128) -> (i128, i128) {
    let mut u = 1i128;
    loop {
        let t2 = d * u * u + 4;
        let t = isqrt(t2);
        if t * t == t2 {
            return (t, u);
        }
        u += 1;
    }
}

pub type Form = (i128, i128, i128);

/// Gauss-reduced forms of discriminant `d`:
/// `0 < b < sqrt d` and `sqrt d - b < 2|a| < sqrt d + b`.
pub fn gauss_reduced(d: i128) -> Vec<Form> {
    let mut out = Vec::new();
    for b in 1..=isqrt(d) {
        if b * b >= d || (d - b * b) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        for a_abs in 1..=2 * isqrt(d) {
            let lo = d < (2 * a_abs + b) * (2 * a_abs + b);
            let hi = 2 * a_abs - b < 0 || (2 * a_abs - b) * (2 * a_abs - b) < d;
            if !(lo && hi) || ac % a_abs != 0 {
                continue;
            }
            for a in [a_abs, -a_abs] {
                out.push((a, b, ac / a));
            }
        }
    }
    out
}

/// The neighbour `(c, b', a')` with `b' = -b mod 2c` in `(sqrt d - 2|c|, sqrt d)`.
pub fn gauss_rho(d: i128, (_, b, c): Form) -> Form {
    let r = isqrt(d);
    let m = 2 * c.abs();
    let b2 = r - (r + b).rem_euclid(m);
    (c, b2, (b2 * b2 - d) / (4 * c))
}

/// Cycles of Gauss-reduced forms, each as a sorted set.
pub fn gauss_cycles(d: i128) -> Vec<BTreeSet<Form>> {
    let forms = gauss_reduced(d);
    let mut seen = HashSet::new();
    let mut cycles = Vec::new();
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        let mut c = BTreeSet::new();
        let mut g = f;
        while c.insert(g) {
            seen.insert(g);
            g = gauss_rho(d, g);
        }
        assert_eq!(g, f, "rho left the cycle of {f:?}");
        cycles.push(c);
    }
    cycles
}

pub fn class_number_oracle(d: i128) -> usize {
    gauss_cycles(d).len()
}

fn legendre(a: i128, p: i128) -> i8 {
    let mut result = 1i128;
    let mut base = a.rem_euclid(p);
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

/// Genus characters `(m / p)` for `p | d`, `m` a value of the form prime to `p`.
pub fn genus_characters(d: i128, (a, b, c): Form) -> Vec<i8> {
    distinct_primes(d as u64)
        .into_iter()
        .map(|p| {
            let p = p as i128;
            for x in -5i128..=5 {
                for y in -5i128..=5 {
                    let m = a * x * x + b * x * y + c * y * y;
                    if m.rem_euclid(p) != 0 {
                        return legendre(m, p);
                    }
                }
            }
            panic!("form {a},{b},{c} represents no unit mod {p}")
        })
        .collect()
}

/// Gram matrix `[[2a, b], [b, 2c]]` of a form.
pub fn form_lattice((a, b, c): Form) -> IntegerLattice {
    IntegerLattice::from_i64(&[&[2 * a as i64, b as i64], &[b as i64, 2 * c as i64]]).unwrap()
}

/// The principal form of discriminant `d`.
pub fn principal_form(d: i128) -> Form {
    let delta = d % 2;
    (1, delta, (delta - d) / 4)
}
