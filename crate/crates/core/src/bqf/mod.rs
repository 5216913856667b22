//! Indefinite binary quadratic forms `a x^2 + b xy + c y^2`: reduction
//! cycles, proper classes, automorphs from the Pell equation, and genera.
//!
//! A form is identified with the even lattice of Gram matrix
//! `[[2a, b], [b, 2c]]`. Matrices act on coordinate columns, so `M`
//! transforms the Gram `G` into `M^T G M`.

mod classes;
mod pell;
mod reduce;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{IntegerLattice, Signature};
use crate::matrix::IntMatrix;

pub use classes::{
    class_number, genus_partition, improper_class_count, is_fundamental, proper_classes, ClassGroupData,
};
pub use pell::{fundamental_automorph, improper_automorph, pell_fundamental, Automorph};
pub use reduce::{cycle, is_properly_equivalent, reduce, rho, TransformedForm};

/// `a x^2 + b xy + c y^2` with arbitrary-precision coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryQuadraticForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl BinaryQuadraticForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        BinaryQuadraticForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    /// `b^2 - 4ac`.
    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn gram(&self) -> IntMatrix {
        let two = BigInt::from(2);
        IntMatrix::from_rows(vec![
            vec![&two * &self.a, self.b.clone()],
            vec![self.b.clone(), &two * &self.c],
        ])
        .expect("2x2")
    }

    /// `(a, -b, c)`, the image under `diag(1, -1)`.
    pub fn opposite(&self) -> Self {
        BinaryQuadraticForm::new(self.a.clone(), -&self.b, self.c.clone())
    }

    /// The form with Gram `M^T G M`.
    pub fn transform(&self, m: &IntMatrix) -> Self {
        let g = &(&m.transpose() * &self.gram()) * m;
        BinaryQuadraticForm::new(g[(0, 0)].clone() / 2, g[(0, 1)].clone(), g[(1, 1)].clone() / 2)
    }

    /// Value at `(x, y)`.
    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// `gcd(a, b, c)`.
    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    /// Reduced in the sense `0 < b < sqrt(D)` and
    /// `sqrt(D) - b < 2|a| < sqrt(D) + b`.
    ///
    /// Only meaningful for positive non-square discriminants, where all
    /// inequalities are strict and can be decided with `isqrt(D)`.
    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        if !d.is_positive() {
            return false;
        }
        let r = d.sqrt();
        let two_a = BigInt::from(2) * self.a.abs();
        self.b.is_positive() && self.b <= r && &two_a + &self.b > r && &two_a - &self.b <= r
    }

    /// Rejects discriminants outside the indefinite anisotropic range.
    pub fn check_hyperbolic(&self) -> Result<BigInt> {
        check_discriminant(&self.disc())?;
        Ok(self.disc())
    }
}

impl fmt::Display for BinaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl fmt::Debug for BinaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn is_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    }
}

/// `D > 0`, not a square, and `D = 0, 1 mod 4`.
pub(crate) fn check_discriminant(d: &BigInt) -> Result<()> {
    if !d.is_positive() {
        return Err(Error::invalid(format!("discriminant {d} must be positive")));
    }
    if is_square(d) {
        return Err(Error::invalid("isotropic discriminant unsupported"));
    }
    let r = d.mod_floor(&BigInt::from(4));
    if !(r.is_zero() || r.is_one()) {
        return Err(Error::invalid(format!("discriminant {d} must be 0 or 1 mod 4")));
    }
    Ok(())
}

/// Reads `(a, b, c)` off the Gram `[[2a, b], [b, 2c]]` of an even
/// hyperbolic rank-2 lattice.
pub fn lattice_to_form(lattice: &IntegerLattice) -> Result<BinaryQuadraticForm> {
    if lattice.rank() != 2 {
        return Err(Error::invalid("binary form requires a rank 2 lattice"));
    }
    if !lattice.is_even() {
        return Err(Error::OddLattice);
    }
    if lattice.signature() != Signature::new(1, 1) {
        return Err(Error::invalid("binary form requires signature (1,1)"));
    }
    let g = lattice.gram();
    let f = BinaryQuadraticForm::new(g[(0, 0)].clone() / 2, g[(0, 1)].clone(), g[(1, 1)].clone() / 2);
    check_discriminant(&f.disc())?;
    Ok(f)
}

pub fn form_to_lattice(f: &BinaryQuadraticForm) -> Result<IntegerLattice> {
    IntegerLattice::new(f.gram())
}

pub fn opposite(f: &BinaryQuadraticForm) -> BinaryQuadraticForm {
    f.opposite()
}

/// A 2x2 integer matrix built from four entries.
pub(crate) fn mat2(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> IntMatrix {
    IntMatrix::from_rows(vec![vec![a, b], vec![c, d]]).expect("2x2")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[&[i64]]) -> IntegerLattice {
        IntegerLattice::from_i64(rows).unwrap()
    }

    #[test]
    fn lattice_form_bridge() {
        let f = lattice_to_form(&lat(&[&[2, 1], &[1, -2]])).unwrap();
        assert_eq!(f, BinaryQuadraticForm::new(1, 1, -1));
        assert_eq!(f.disc(), BigInt::from(5));
        let g = lattice_to_form(&lat(&[&[2, 1], &[1, -648]])).unwrap();
        assert_eq!(g, BinaryQuadraticForm::new(1, 1, -324));
        assert_eq!(g.disc(), BigInt::from(1297));
        assert_eq!(
            form_to_lattice(&g).unwrap().gram(),
            &IntMatrix::from_i64(&[&[2, 1], &[1, -648]])
        );
        let h = BinaryQuadraticForm::new(3, 1, -19);
        assert_eq!(form_to_lattice(&h).unwrap().det(), BigInt::from(-229));
    }

    #[test]
    fn bridge_rejections() {
        let err = lattice_to_form(&IntegerLattice::hyperbolic_plane()).unwrap_err();
        assert_eq!(err.to_string(), "isotropic discriminant unsupported");
        assert!(lattice_to_form(&lat(&[&[2, 0], &[0, 2]])).is_err());
        assert_eq!(lattice_to_form(&lat(&[&[1, 0], &[0, -1]])), Err(Error::OddLattice));
        assert!(lattice_to_form(&lat(&[&[2]])).is_err());
    }

    #[test]
    fn opposite_is_involution() {
        let f = BinaryQuadraticForm::new(3, 1, -19);
        assert_eq!(
            opposite(&BinaryQuadraticForm::new(1, 1, -1)),
            BinaryQuadraticForm::new(1, -1, -1)
        );
        assert_eq!(opposite(&opposite(&f)), f);
        assert_eq!(opposite(&f).disc(), f.disc());
    }

    #[test]
    fn reducedness() {
        assert!(BinaryQuadraticForm::new(1, 1, -1).is_reduced());
        assert!(BinaryQuadraticForm::new(-1, 1, 1).is_reduced());
        assert!(BinaryQuadraticForm::new(1, 15, -1).is_reduced());
        assert!(!BinaryQuadraticForm::new(3, 1, -19).is_reduced());
        assert!(!BinaryQuadraticForm::new(1, -1, -1).is_reduced());
    }
}
