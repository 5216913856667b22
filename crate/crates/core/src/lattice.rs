//! Integral lattices given by Gram matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{smith_normal_form, IntMatrix};

/// Counts of positive and negative squares of a nondegenerate real form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Signature {
    pub fn new(n_plus: usize, n_minus: usize) -> Self {
        Signature { n_plus, n_minus }
    }

    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn is_definite(&self) -> bool {
        self.n_plus == 0 || self.n_minus == 0
    }
}

impl std::ops::Add for Signature {
    type Output = Signature;
    fn add(self, rhs: Signature) -> Signature {
        Signature::new(self.n_plus + rhs.n_plus, self.n_minus + rhs.n_minus)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_plus, self.n_minus)
    }
}

/// A free Z-module of finite rank with a nondegenerate symmetric integral
/// pairing, stored as its Gram matrix in a fixed basis.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerLattice {
    gram: IntMatrix,
    name: Option<String>,
}

impl IntegerLattice {
    /// Validates that `gram` is square, symmetric, nonempty and nondegenerate.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::invalid("gram must be square"));
        }
        if gram.nrows() == 0 {
            return Err(Error::invalid("gram must have positive rank"));
        }
        if !gram.is_symmetric() {
            return Err(Error::invalid("gram must be symmetric"));
        }
        if gram.det().is_zero() {
            return Err(Error::DegenerateLattice);
        }
        Ok(IntegerLattice { gram, name: None })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// The rank one lattice `<n>`.
    pub fn cyclic(n: i64) -> Result<Self> {
        Self::from_i64(&[&[n]])
    }

    pub fn hyperbolic_plane() -> Self {
        Self::from_i64(&[&[0, 1], &[1, 0]])
            .expect("U is nondegenerate")
            .with_name("U")
    }

    /// The positive definite E8 root lattice in the Bourbaki basis.
    pub fn e8() -> Self {
        let mut g = IntMatrix::identity(8).scale(&BigInt::from(2));
        // Dynkin diagram edges: chain 1-3-4-5-6-7-8 with 2 attached to 4.
        let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
        for (i, j) in edges {
            g[(i, j)] = BigInt::from(-1);
            g[(j, i)] = BigInt::from(-1);
        }
        Self::new(g).expect("E8 is nondegenerate").with_name("E8")
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn signature(&self) -> Signature {
        signature_of_gram(&self.gram).expect("lattice gram is nondegenerate")
    }

    /// The lattice with pairing multiplied by `k`, e.g. `L(-1)` for `k = -1`.
    pub fn rescaled(&self, k: i64) -> Result<Self> {
        Self::new(self.gram.scale(&BigInt::from(k)))
    }

    pub fn direct_sum(&self, other: &IntegerLattice) -> IntegerLattice {
        direct_sum(self, other)
    }

    /// Pairing of two coordinate vectors.
    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let n = self.rank();
        let mut s = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                s += &x[i] * &self.gram[(i, j)] * &y[j];
            }
        }
        s
    }

    /// Whether `m` (acting on coordinate columns) preserves the pairing.
    pub fn is_automorphism(&self, m: &IntMatrix) -> bool {
        m.nrows() == self.rank()
            && m.ncols() == self.rank()
            && &(&m.transpose() * &self.gram) * m == self.gram
            && m.det().abs().is_one()
    }
}

impl fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => write!(f, "{n}{}", self.gram),
            None => write!(f, "{}", self.gram),
        }
    }
}

impl fmt::Display for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gram)
    }
}

/// Signature of a symmetric integer matrix by exact congruence
/// diagonalization over Q.
///
/// Zero pivots are repaired by replacing `e_i` with `e_i + e_j` for some `j`
/// with nonzero off-diagonal pairing, which makes the new diagonal entry
/// `2 b_ij` nonzero.
pub fn signature_of_gram(gram: &IntMatrix) -> Result<Signature> {
    if !gram.is_symmetric() {
        return Err(Error::invalid("gram must be symmetric"));
    }
    let n = gram.nrows();
    let mut a: Vec<Vec<BigRational>> = gram
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut plus, mut minus) = (0, 0);
    while !active.is_empty() {
        let pivot = match active.iter().position(|&i| !a[i][i].is_zero()) {
            Some(p) => p,
            None => {
                let pair = active.iter().enumerate().find_map(|(pi, &i)| {
                    active
                        .iter()
                        .find(|&&j| j != i && !a[i][j].is_zero())
                        .map(|&j| (pi, i, j))
                });
                let Some((pi, i, j)) = pair else {
                    return Err(Error::DegenerateLattice);
                };
                // e_i <- e_i + e_j
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                pi
            }
        };
        let p = active.remove(pivot);
        let d = a[p][p].clone();
        if d.is_positive() {
            plus += 1;
        } else {
            minus += 1;
        }
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for &j in &active {
                let v = &f * &a[p][j];
                a[i][j] -= v;
            }
        }
        for &i in &active {
            a[i][p] = BigRational::zero();
            a[p][i] = BigRational::zero();
        }
    }
    Ok(Signature::new(plus, minus))
}

pub fn signature(lattice: &IntegerLattice) -> Signature {
    lattice.signature()
}

/// Block-diagonal orthogonal sum.
pub fn direct_sum(l1: &IntegerLattice, l2: &IntegerLattice) -> IntegerLattice {
    let name = match (l1.name(), l2.name()) {
        (Some(a), Some(b)) => Some(format!("{a}+{b}")),
        _ => None,
    };
    IntegerLattice {
        gram: l1.gram.block_diag(&l2.gram),
        name,
    }
}

/// Number of invariant factors of the Gram matrix exceeding one, i.e. the
/// minimal number of generators of the discriminant group.
pub fn min_generators(lattice: &IntegerLattice) -> usize {
    smith_normal_form(lattice.gram())
        .invariant_factors()
        .iter()
        .filter(|d| !d.is_one())
        .count()
}

/// `E8(-1)^2 + U^3`: even, unimodular, signature (3,19).
pub fn k3_lattice() -> IntegerLattice {
    let e8m = IntegerLattice::e8().rescaled(-1).expect("nondegenerate");
    let u = IntegerLattice::hyperbolic_plane();
    let g = e8m
        .gram()
        .block_diag(e8m.gram())
        .block_diag(u.gram())
        .block_diag(u.gram())
        .block_diag(u.gram());
    IntegerLattice::new(g).expect("nondegenerate").with_name("K3")
}
