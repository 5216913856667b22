use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{mat2, BinaryQuadraticForm};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// A form together with the matrix carrying its origin onto it:
/// `transform^T G_origin transform = G_form`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedForm {
    pub form: BinaryQuadraticForm,
    pub transform: IntMatrix,
    pub origin: BinaryQuadraticForm,
}

/// One neighbor step `(a, b, c) -> (c, b', (b'^2 - D) / 4c)` with
/// `b' = -b mod 2|c|` normalized into the reduction window, and the matrix
/// `[[0, -1], [1, s]]` realizing it.
pub fn rho(f: &BinaryQuadraticForm) -> Result<(BinaryQuadraticForm, IntMatrix)> {
    let d = f.check_hyperbolic()?;
    Ok(rho_unchecked(f, &d, &d.sqrt()))
}

pub(crate) fn rho_unchecked(f: &BinaryQuadraticForm, d: &BigInt, r: &BigInt) -> (BinaryQuadraticForm, IntMatrix) {
    let c = &f.c;
    let two_c = BigInt::from(2) * c.abs();
    // Window of length 2|c|: (-|c|, |c|] when |c| > sqrt(D), else (r - 2|c|, r].
    let lo = if c * c > *d { -c.abs() + 1 } else { r - &two_c + 1 };
    let shift: BigInt = -&f.b - &lo;
    let b_new = &lo + shift.mod_floor(&two_c);
    let s = (&b_new + &f.b) / (BigInt::from(2) * c);
    let c_new = (&b_new * &b_new - d) / (BigInt::from(4) * c);
    let m = mat2(BigInt::zero(), -BigInt::one(), BigInt::one(), s);
    (BinaryQuadraticForm::new(c.clone(), b_new, c_new), m)
}

/// Iterates the neighbor step until the form is reduced.
pub fn reduce(f: &BinaryQuadraticForm) -> Result<TransformedForm> {
    let d = f.check_hyperbolic()?;
    let r = d.sqrt();
    let mut cur = f.clone();
    let mut m = IntMatrix::identity(2);
    while !cur.is_reduced() {
        let (next, step) = rho_unchecked(&cur, &d, &r);
        m = &m * &step;
        cur = next;
    }
    Ok(TransformedForm {
        form: cur,
        transform: m,
        origin: f.clone(),
    })
}

/// The cycle of reduced forms through `f`, starting at `f`.
pub fn cycle(f: &BinaryQuadraticForm) -> Result<Vec<BinaryQuadraticForm>> {
    let d = f.check_hyperbolic()?;
    if !f.is_reduced() {
        return Err(Error::invalid(format!("{f} is not reduced")));
    }
    let r = d.sqrt();
    let mut out = vec![f.clone()];
    let mut cur = rho_unchecked(f, &d, &r).0;
    while cur != *f {
        out.push(cur.clone());
        cur = rho_unchecked(&cur, &d, &r).0;
    }
    Ok(out)
}

/// Decides proper (`SL(2, Z)`) equivalence; on success returns `W` with
/// `det W = 1` and `W^T G_f W = G_g`.
pub fn is_properly_equivalent(f: &BinaryQuadraticForm, g: &BinaryQuadraticForm) -> Result<Option<IntMatrix>> {
    let d = f.check_hyperbolic()?;
    if g.disc() != d {
        return Err(Error::invalid("discriminants differ"));
    }
    let r = d.sqrt();
    let rf = reduce(f)?;
    let rg = reduce(g)?;
    let mut walk = IntMatrix::identity(2);
    let mut cur = rf.form.clone();
    loop {
        if cur == rg.form {
            let back = rg
                .transform
                .inverse_unimodular()
                .ok_or_else(|| Error::invariant("reduction transform is not unimodular"))?;
            return Ok(Some(&(&rf.transform * &walk) * &back));
        }
        let (next, step) = rho_unchecked(&cur, &d, &r);
        walk = &walk * &step;
        cur = next;
        if cur == rf.form {
            return Ok(None);
        }
    }
}
