//! Generators of `O(S)` for the lattices whose automorphism groups the
//! engines can compute: rank one, binary indefinite, and binary definite.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::bqf::{fundamental_automorph, improper_automorph, lattice_to_form};
use crate::discriminant::discriminant_form;
use crate::error::{Error, Result};
use crate::lattice::IntegerLattice;
use crate::matrix::IntMatrix;

/// All automorphisms of a definite lattice of rank at most two, sorted.
pub fn definite_automorphisms(lattice: &IntegerLattice) -> Result<Vec<IntMatrix>> {
    if !lattice.signature().is_definite() {
        return Err(Error::invalid("lattice is not definite"));
    }
    let g = if lattice.signature().n_plus == 0 {
        lattice.gram().neg()
    } else {
        lattice.gram().clone()
    };
    match lattice.rank() {
        1 => Ok(vec![IntMatrix::identity(1).neg(), IntMatrix::identity(1)]),
        2 => {
            let (a, b, c) = (&g[(0, 0)], &g[(0, 1)], &g[(1, 1)]);
            let delta = a * c - b * b;
            let vectors_of_norm = |n: &BigInt| -> Vec<(BigInt, BigInt)> {
                // x^T G x = n forces x_1^2 <= n c / delta and x_2^2 <= n a / delta
                let b1: BigInt = (n * c / &delta).sqrt();
                let b2: BigInt = (n * a / &delta).sqrt();
                let mut out = Vec::new();
                let mut x = -b1.clone();
                while x <= b1 {
                    let mut y = -b2.clone();
                    while y <= b2 {
                        if &(a * &x * &x) + &(BigInt::from(2) * b * &x * &y) + &(c * &y * &y) == *n {
                            out.push((x.clone(), y.clone()));
                        }
                        y += 1;
                    }
                    x += 1;
                }
                out
            };
            let firsts = vectors_of_norm(a);
            let seconds = vectors_of_norm(c);
            let mut out = Vec::new();
            for (v1, v2) in &firsts {
                for (w1, w2) in &seconds {
                    let pair = a * v1 * w1 + b * (v1 * w2 + v2 * w1) + c * v2 * w2;
                    if pair == *b {
                        out.push(
                            IntMatrix::from_rows(vec![vec![v1.clone(), w1.clone()], vec![v2.clone(), w2.clone()]])
                                .expect("2x2"),
                        );
                    }
                }
            }
            out.sort_by_key(|x| x.to_rows());
            Ok(out)
        }
        _ => Err(Error::unsupported("automorphisms of definite lattices of rank above 2")),
    }
}

/// Generators of `O(S)` as matrices acting on coordinate columns.
///
/// Lattices with trivial discriminant group get no generators, since only
/// the image in `O(A_S)` is ever used.
pub fn orthogonal_generators(lattice: &IntegerLattice) -> Result<Vec<IntMatrix>> {
    if discriminant_form(lattice)?.is_trivial() {
        return Ok(vec![]);
    }
    let n = lattice.rank();
    if n == 1 {
        return Ok(vec![IntMatrix::identity(1).neg()]);
    }
    if n == 2 && lattice.signature().is_definite() {
        return definite_automorphisms(lattice);
    }
    if n == 2 {
        let f = lattice_to_form(lattice)?;
        let mut gens = vec![IntMatrix::identity(2).neg(), fundamental_automorph(&f)?.matrix];
        if let Some(m) = improper_automorph(&f)? {
            gens.push(m.matrix);
        }
        return Ok(gens);
    }
    Err(Error::unsupported(
        "automorphism generators for lattices of rank 3 or more with nontrivial discriminant",
    ))
}

/// Order of an invertible matrix, searching up to `bound`.
pub fn matrix_order(m: &IntMatrix, bound: u64) -> Option<u64> {
    let id = IntMatrix::identity(m.nrows());
    let mut p = m.clone();
    for k in 1..=bound {
        if p == id {
            return Some(k);
        }
        p = &p * m;
    }
    None
}

/// A definite rank two automorphism `g` of order `order` with
/// `g^(order/2) = -1`, the first in sorted order.
pub fn cyclic_hodge_candidate(lattice: &IntegerLattice, order: u64) -> Result<Option<IntMatrix>> {
    if order == 0 || order % 2 == 1 {
        return Err(Error::invalid("Hodge group order must be even"));
    }
    let neg = IntMatrix::identity(lattice.rank()).neg();
    for g in definite_automorphisms(lattice)? {
        if g.det().is_negative() && order > 2 {
            continue;
        }
        if matrix_order(&g, order) != Some(order) {
            continue;
        }
        let mut half = IntMatrix::identity(lattice.rank());
        for _ in 0..order / 2 {
            half = &half * &g;
        }
        if half == neg {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn lat(rows: &[&[i64]]) -> IntegerLattice {
        IntegerLattice::from_i64(rows).unwrap()
    }

    #[test]
    fn definite_groups() {
        assert_eq!(definite_automorphisms(&lat(&[&[2, 1], &[1, 2]])).unwrap().len(), 12);
        assert_eq!(definite_automorphisms(&lat(&[&[2, 0], &[0, 2]])).unwrap().len(), 8);
        assert_eq!(definite_automorphisms(&lat(&[&[2, 1], &[1, 4]])).unwrap().len(), 4);
        assert_eq!(definite_automorphisms(&lat(&[&[-2, -1], &[-1, -2]])).unwrap().len(), 12);
        for m in definite_automorphisms(&lat(&[&[2, 1], &[1, 2]])).unwrap() {
            assert!(lat(&[&[2, 1], &[1, 2]]).is_automorphism(&m));
        }
    }

    #[test]
    fn hyperbolic_generators() {
        let s = lat(&[&[2, 1], &[1, -2]]);
        let gens = orthogonal_generators(&s).unwrap();
        assert_eq!(gens.len(), 3);
        for m in &gens {
            assert!(s.is_automorphism(m));
        }
        assert!(orthogonal_generators(&IntegerLattice::hyperbolic_plane())
            .unwrap()
            .is_empty());
        let big = lat(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, -2]]);
        assert!(matches!(orthogonal_generators(&big), Err(Error::Unsupported(_))));
    }

    #[test]
    fn hodge_candidates() {
        let a2 = lat(&[&[2, 1], &[1, 2]]);
        let g6 = cyclic_hodge_candidate(&a2, 6).unwrap().unwrap();
        assert_eq!(matrix_order(&g6, 12), Some(6));
        let g4 = cyclic_hodge_candidate(&lat(&[&[2, 0], &[0, 2]]), 4).unwrap().unwrap();
        assert!(g4.det().is_one());
        assert!(cyclic_hodge_candidate(&a2, 4).unwrap().is_none());
        assert!(cyclic_hodge_candidate(&a2, 2).unwrap().is_some());
    }
}
