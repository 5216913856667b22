use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{check_discriminant, is_properly_equivalent, mat2, BinaryQuadraticForm};
use crate::error::Result;
use crate::matrix::IntMatrix;

/// An integral matrix fixing a form: `M^T G M = G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorph {
    pub matrix: IntMatrix,
    pub det: i8,
}

/// Floor of `(p + sqrt(d)) / q` for non-square `d`, given `r = isqrt(d)`.
fn floor_quadratic(p: &BigInt, q: &BigInt, r: &BigInt) -> BigInt {
    let n = p + r;
    if q.is_positive() {
        n.div_floor(q)
    } else {
        -n.div_floor(&-q) - 1
    }
}

/// Smallest `(t, u)` with `t, u > 0` and `t^2 - D u^2 = 4`.
///
/// Expands `(-δ + sqrt(D)) / 2`, `δ = D mod 4`, as a continued fraction;
/// a convergent `p/q` gives `t = 2p + δq`, `u = q`. The first convergent
/// of norm `±4` is the fundamental unit; a norm `-4` unit is squared.
pub fn pell_fundamental(d: &BigInt) -> Result<(BigInt, BigInt)> {
    check_discriminant(d)?;
    let delta = d.mod_floor(&BigInt::from(4));
    let r = d.sqrt();
    let four = BigInt::from(4);
    let mut p = -delta.clone();
    let mut q = BigInt::from(2);
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    loop {
        let a = floor_quadratic(&p, &q, &r);
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        let t = BigInt::from(2) * &h + &delta * &k;
        let norm = &t * &t - d * &k * &k;
        if norm == four {
            return Ok((t, k));
        }
        if norm == -&four {
            let t2 = (&t * &t + d * &k * &k) / 2;
            let u2 = &t * &k;
            return Ok((t2, u2));
        }
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
        p = &a * &q - &p;
        q = (d - &p * &p) / &q;
    }
}

/// `[[(t - bu)/2, -cu], [au, (t + bu)/2]]` from the fundamental Pell
/// solution: the generator of the proper automorphs modulo `±1`.
pub fn fundamental_automorph(f: &BinaryQuadraticForm) -> Result<Automorph> {
    let (t, u) = pell_fundamental(&f.check_hyperbolic()?)?;
    let bu = &f.b * &u;
    let matrix = mat2((&t - &bu) / 2, -(&f.c * &u), &f.a * &u, (&t + &bu) / 2);
    Ok(Automorph { matrix, det: 1 })
}

/// A determinant `-1` automorph, present iff `f` is properly equivalent to
/// its opposite.
pub fn improper_automorph(f: &BinaryQuadraticForm) -> Result<Option<Automorph>> {
    let Some(w) = is_properly_equivalent(f, &f.opposite())? else {
        return Ok(None);
    };
    let flip = mat2(BigInt::one(), BigInt::zero(), BigInt::zero(), -BigInt::one());
    Ok(Some(Automorph {
        matrix: &w * &flip,
        det: -1,
    }))
}
