//! The discriminant form `(A_L, q_L)` of an even lattice, with explicit
//! coordinates so that lattice automorphisms and dual vectors can be
//! transported to the finite side.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::IntegerLattice;
use crate::matrix::{smith_normal_form, IntMatrix, RatMatrix};
use crate::qform::{FiniteFormMap, FiniteQuadraticForm, QValue, Sign};

/// `A_L = L*/L` in invariant-factor coordinates.
///
/// With `U G V = D` the Smith decomposition of the Gram matrix, a dual
/// vector `x` has integer coordinates `y = G x`, and its class in `A_L` is
/// `(U y)_i mod d_i` over the indices with `d_i > 1`.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    lattice: IntegerLattice,
    form: Arc<FiniteQuadraticForm>,
    u: IntMatrix,
    factors: Vec<BigInt>,
    active: Vec<usize>,
    gram_inv: RatMatrix,
    lifts: Vec<Vec<BigRational>>,
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

fn mat_vec(m: &RatMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..m.nrows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

fn int_mat_vec(m: &IntMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..m.nrows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .fold(BigRational::zero(), |acc, (a, b)| acc + rat(a) * b)
        })
        .collect()
}

fn dot(x: &[BigRational], y: &[BigRational]) -> BigRational {
    x.iter().zip(y).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
}

/// Reduces a rational into `[0, modulus)` as a `QValue`.
fn to_qvalue(r: &BigRational, modulus: i64) -> Result<QValue> {
    let den = r.denom().clone();
    let num = r.numer().mod_floor(&(&den * BigInt::from(modulus)));
    let (Some(n), Some(d)) = (num.to_i128(), den.to_i128()) else {
        return Err(Error::unsupported("discriminant value denominator exceeds 2^62"));
    };
    Ok(if modulus == 2 {
        QValue::mod2(n, d)
    } else {
        QValue::mod1(n, d)
    })
}

impl DiscriminantGroup {
    pub fn new(lattice: &IntegerLattice) -> Result<Self> {
        if !lattice.is_even() {
            return Err(Error::OddLattice);
        }
        let gram = lattice.gram();
        let snf = smith_normal_form(gram);
        let factors = snf.invariant_factors();
        let active: Vec<usize> = (0..factors.len()).filter(|&i| !factors[i].is_one()).collect();
        let u_inv = snf
            .u
            .inverse_unimodular()
            .ok_or_else(|| Error::invariant("Smith transform is not unimodular"))?;
        let gram_inv = gram.inverse_rational().ok_or(Error::DegenerateLattice)?;

        // y_i = U^-1 e_i, x_i = G^-1 y_i
        let ys: Vec<Vec<BigRational>> = active
            .iter()
            .map(|&i| (0..gram.nrows()).map(|r| rat(&u_inv[(r, i)])).collect())
            .collect();
        let lifts: Vec<Vec<BigRational>> = ys.iter().map(|y| mat_vec(&gram_inv, y)).collect();

        let mut orders = Vec::with_capacity(active.len());
        for &i in &active {
            let d = factors[i]
                .to_u64()
                .ok_or_else(|| Error::unsupported("discriminant group order exceeds 2^64"))?;
            orders.push(d);
        }
        let k = active.len();
        let mut q_gens = Vec::with_capacity(k);
        let mut b = vec![vec![QValue::ZERO; k]; k];
        for i in 0..k {
            q_gens.push(to_qvalue(&dot(&ys[i], &lifts[i]), 2)?);
            for j in 0..k {
                b[i][j] = to_qvalue(&dot(&ys[i], &lifts[j]), 1)?;
            }
        }
        let form = FiniteQuadraticForm::new(orders, q_gens, b)?;
        Ok(DiscriminantGroup {
            lattice: lattice.clone(),
            form: Arc::new(form),
            u: snf.u,
            factors,
            active,
            gram_inv,
            lifts,
        })
    }

    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    pub fn form(&self) -> &Arc<FiniteQuadraticForm> {
        &self.form
    }

    /// Generator `g_i` as a dual vector in lattice coordinates.
    pub fn lift(&self, i: usize) -> &[BigRational] {
        &self.lifts[i]
    }

    /// A dual vector representing the element with coefficients `a`.
    pub fn lift_element(&self, a: &[u64]) -> Vec<BigRational> {
        let n = self.lattice.rank();
        let mut out = vec![BigRational::zero(); n];
        for (c, x) in a.iter().zip(&self.lifts) {
            if *c == 0 {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(*c));
            for r in 0..n {
                out[r] += &c * &x[r];
            }
        }
        out
    }

    /// Class in `A_L` of a dual vector given in lattice coordinates.
    pub fn coordinates(&self, x: &[BigRational]) -> Result<Vec<u64>> {
        if x.len() != self.lattice.rank() {
            return Err(Error::invalid("vector length does not match lattice rank"));
        }
        let y = int_mat_vec(self.lattice.gram(), x);
        if y.iter().any(|v| !v.is_integer()) {
            return Err(Error::invalid("vector is not in the dual lattice"));
        }
        let y: Vec<BigRational> = y;
        let uy = int_mat_vec(&self.u, &y);
        Ok(self
            .active
            .iter()
            .map(|&i| {
                let v = uy[i].to_integer().mod_floor(&self.factors[i]);
                v.to_u64().expect("reduced below an order that fits u64")
            })
            .collect())
    }

    /// The map `A_L -> A_L` induced by an automorphism `m` of `L` acting on
    /// coordinate columns.
    pub fn induced_map(&self, m: &IntMatrix) -> Result<FiniteFormMap> {
        if !self.lattice.is_automorphism(m) {
            return Err(Error::invalid("matrix is not an automorphism of the lattice"));
        }
        let images = self
            .lifts
            .iter()
            .map(|x| self.coordinates(&int_mat_vec(m, x)))
            .collect::<Result<Vec<_>>>()?;
        FiniteFormMap::new(self.form.clone(), self.form.clone(), images, Sign::Plus)
    }

    /// `G^-1`, whose columns span the dual lattice.
    pub fn gram_inverse(&self) -> &RatMatrix {
        &self.gram_inv
    }
}

/// The discriminant form of an even nondegenerate lattice.
pub fn discriminant_form(lattice: &IntegerLattice) -> Result<FiniteQuadraticForm> {
    Ok((*DiscriminantGroup::new(lattice)?.form).clone())
}
