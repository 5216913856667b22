mod common;

use std::sync::Arc;

use k3fm_core::bqf::{
    class_number, cycle, improper_class_count, is_properly_equivalent, lattice_to_form, pell_fundamental, reduce,
    BinaryQuadraticForm,
};
use k3fm_core::discriminant::{discriminant_form, DiscriminantGroup};
use k3fm_core::lattice::{direct_sum, signature_of_gram, IntegerLattice, Signature};
use k3fm_core::matrix::{hermite_normal_form, smith_normal_form, IntMatrix};
use k3fm_core::qform::{are_isometric, orthogonal_group, DEFAULT_CAP};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use common::*;

fn matrix(rows: Vec<Vec<i64>>) -> IntMatrix {
    let r: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    IntMatrix::from_i64(&r)
}

fn small_matrix(max_dim: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r).prop_map(matrix))
}

/// Even symmetric matrices of rank at most four, possibly degenerate.
fn even_gram() -> impl Strategy<Value = IntMatrix> {
    (1..=4usize).prop_flat_map(|n| {
        prop::collection::vec(-6i64..=6, n * n).prop_map(move |v| {
            let mut rows = vec![vec![0i64; n]; n];
            for i in 0..n {
                rows[i][i] = 2 * v[i * n + i];
                for j in 0..i {
                    rows[i][j] = v[i * n + j];
                    rows[j][i] = v[i * n + j];
                }
            }
            matrix(rows)
        })
    })
}

fn is_diagonal_chain(d: &IntMatrix) -> bool {
    let k = d.nrows().min(d.ncols());
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            if i != j && !d[(i, j)].is_zero() {
                return false;
            }
        }
    }
    (0..k).all(|i| !d[(i, i)].is_negative())
        && (1..k)
            .all(|i| d[(i, i)].is_zero() || (&d[(i, i)] % &d[(i - 1, i - 1)]).is_zero() && !d[(i - 1, i - 1)].is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_decomposition(m in small_matrix(4)) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
        prop_assert!(s.u.det().abs().is_one());
        prop_assert!(s.v.det().abs().is_one());
        prop_assert!(is_diagonal_chain(&s.d));
    }

    #[test]
    fn hermite_form_is_canonical(m in small_matrix(4)) {
        let h = hermite_normal_form(&m);
        // idempotent, and invariant under a unimodular row operation
        prop_assert_eq!(hermite_normal_form(&h), h.clone());
        if m.nrows() >= 2 {
            let mut rows = m.to_rows();
            let r0 = rows[0].clone();
            for (x, y) in rows[1].iter_mut().zip(&r0) {
                *x += y * BigInt::from(3);
            }
            rows.swap(0, 1);
            prop_assert_eq!(hermite_normal_form(&IntMatrix::from_rows(rows).unwrap()), h);
        }
    }

    #[test]
    fn discriminant_order_is_det(g in even_gram()) {
        if let Ok(l) = IntegerLattice::new(g) {
            let a = discriminant_form(&l).unwrap();
            prop_assert_eq!(BigInt::from(a.order().unwrap()), l.det().abs());
        }
    }

    #[test]
    fn sums_are_componentwise(g1 in even_gram(), g2 in even_gram()) {
        if let (Ok(l1), Ok(l2)) = (IntegerLattice::new(g1), IntegerLattice::new(g2)) {
            let sum = direct_sum(&l1, &l2);
            prop_assert_eq!(sum.signature(), l1.signature() + l2.signature());
            let a1 = discriminant_form(&l1).unwrap();
            let a2 = discriminant_form(&l2).unwrap();
            if a1.order().unwrap() * a2.order().unwrap() <= 64 {
                let lhs = Arc::new(discriminant_form(&sum).unwrap());
                let rhs = Arc::new(a1.orthogonal_sum(&a2));
                prop_assert!(are_isometric(&lhs, &rhs, DEFAULT_CAP).unwrap());
            }
        }
    }

    #[test]
    fn basis_change_preserves_discriminant_form(g in even_gram(), seed in prop::collection::vec(-2i64..=2, 16)) {
        let Ok(l) = IntegerLattice::new(g.clone()) else { return Ok(()) };
        let n = l.rank();
        // unit upper triangular change of basis
        let mut p = vec![vec![0i64; n]; n];
        for i in 0..n {
            p[i][i] = 1;
            for j in i + 1..n {
                p[i][j] = seed[i * 4 + j];
            }
        }
        let p = matrix(p);
        let l2 = IntegerLattice::new(&(&p.transpose() * &g) * &p).unwrap();
        let a = Arc::new(discriminant_form(&l).unwrap());
        let b = Arc::new(discriminant_form(&l2).unwrap());
        if a.order().unwrap() <= 64 {
            prop_assert!(are_isometric(&a, &b, DEFAULT_CAP).unwrap());
        }
        prop_assert_eq!(l.signature(), l2.signature());
    }

    #[test]
    fn reduction_is_proper_equivalence(a in -30i64..=30, b in -30i64..=30, c in -30i64..=30) {
        let f = BinaryQuadraticForm::new(a, b, c);
        let d = f.disc();
        prop_assume!(d.is_positive() && !is_square(&d) && a != 0 && c != 0);
        let r = reduce(&f).unwrap();
        prop_assert!(r.form.is_reduced());
        prop_assert_eq!(f.transform(&r.transform), r.form.clone());
        prop_assert!(r.transform.det().is_one());
        let w = is_properly_equivalent(&f, &r.form).unwrap().unwrap();
        prop_assert_eq!(&(&w.transpose() * &f.gram()) * &w, r.form.gram());
    }
}

fn is_square(d: &BigInt) -> bool {
    let r = d.sqrt();
    &r * &r == *d
}

#[test]
fn class_numbers_match_gauss_cycles() {
    for d in 5..=3000i128 {
        if d % 4 > 1 || isqrt(d) * isqrt(d) == d {
            continue;
        }
        assert_eq!(
            class_number(&BigInt::from(d)).unwrap(),
            class_number_oracle(d),
            "D = {d}"
        );
    }
}

#[test]
fn improper_counts_match_oracle() {
    // GL(2,Z) classes: Gauss cycles merged under (a, b, c) -> (-a, b, -c)
    // composed with the improper reflection, which maps reduced cycles to
    // reduced cycles as (a, b, c) -> (c, b, a).
    for d in 5..=600i128 {
        if d % 4 > 1 || isqrt(d) * isqrt(d) == d {
            continue;
        }
        let cycles = gauss_cycles(d);
        let find = |f: Form| cycles.iter().position(|c| c.contains(&f)).unwrap();
        let mut merged = std::collections::BTreeSet::new();
        for c in &cycles {
            let f = *c.iter().next().unwrap();
            let g = find((f.2, f.1, f.0));
            merged.insert(find(f).min(g));
        }
        assert_eq!(improper_class_count(&BigInt::from(d)).unwrap(), merged.len(), "D = {d}");
    }
}

#[test]
fn cycles_have_even_length_and_close() {
    for d in [5i64, 13, 60, 229, 1297] {
        let f = reduce(&BinaryQuadraticForm::new(1, d % 2, (d % 2 - d) / 4))
            .unwrap()
            .form;
        let c = cycle(&f).unwrap();
        assert_eq!(c.len() % 2, 0);
        assert_eq!(c[0], f);
    }
}

#[test]
fn pell_matches_search() {
    // minimality by search where the fundamental solution is small enough
    for d in 5..=400i128 {
        if d % 4 > 1 || isqrt(d) * isqrt(d) == d {
            continue;
        }
        let (t, u) = pell_fundamental(&BigInt::from(d)).unwrap();
        assert_eq!(&t * &t - BigInt::from(d) * &u * &u, BigInt::from(4), "D = {d}");
        if u <= BigInt::from(2_000_000) {
            let (bt, bu) = pell_brute(d);
            assert_eq!((t, u), (BigInt::from(bt), BigInt::from(bu)), "D = {d}");
        }
    }
}

#[test]
fn pell_large_solution() {
    // D = 4 * 661 has a fundamental solution far beyond 64 bits.
    let d = BigInt::from(4 * 661);
    let (t, u) = pell_fundamental(&d).unwrap();
    assert_eq!(&t * &t - &d * &u * &u, BigInt::from(4));
    assert!(t.bits() > 64);
}

#[test]
fn rank_one_groups_match_unit_count() {
    for n in 1..=300u64 {
        let a = Arc::new(k3fm_core::qform::FiniteQuadraticForm::rank_one(n).unwrap());
        assert_eq!(
            orthogonal_group(&a, DEFAULT_CAP).unwrap().len() as u64,
            rank_one_isometries(n),
            "n = {n}"
        );
    }
}

#[test]
fn discriminant_coordinates_roundtrip() {
    let l = IntegerLattice::from_i64(&[&[2, 1, 0], &[1, -4, 1], &[0, 1, 6]]).unwrap();
    let d = DiscriminantGroup::new(&l).unwrap();
    for x in d.form().elements() {
        assert_eq!(d.coordinates(&d.lift_element(&x)).unwrap(), x);
    }
}

#[test]
fn form_lattice_roundtrip() {
    let l = IntegerLattice::from_i64(&[&[2, 3], &[3, -4]]).unwrap();
    let f = lattice_to_form(&l).unwrap();
    assert_eq!(f, BinaryQuadraticForm::new(1, 3, -2));
    assert_eq!(f.disc(), BigInt::from(17));
    assert_eq!(signature_of_gram(l.gram()).unwrap(), Signature::new(1, 1));
}
