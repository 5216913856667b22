use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{check_discriminant, form_to_lattice, reduce, BinaryQuadraticForm};
use crate::arith::{factorize, is_squarefree};
use crate::discriminant::discriminant_form;
use crate::error::{Error, Result};
use crate::qform::{are_isometric, FiniteQuadraticForm};

/// Proper classes of forms of one discriminant, as cycles of reduced forms.
#[derive(Clone, Debug)]
pub struct ClassGroupData {
    pub d: BigInt,
    /// One cycle per proper class, each starting at its canonical
    /// representative. The principal class comes first.
    pub cycles: Vec<Vec<BinaryQuadraticForm>>,
    pub h: usize,
    /// Class indices grouped by isometry class of the discriminant form.
    pub genus_partition: Vec<Vec<usize>>,
    /// Classes fixed by `(a, b, c) -> (a, -b, c)`.
    pub ambiguous_indices: Vec<usize>,
    /// Index of the class of the opposite form, per class.
    pub opposite: Vec<usize>,
    index: HashMap<BinaryQuadraticForm, usize>,
}

impl ClassGroupData {
    pub fn representative(&self, i: usize) -> &BinaryQuadraticForm {
        &self.cycles[i][0]
    }

    /// Proper class of an arbitrary form of this discriminant.
    pub fn class_of(&self, f: &BinaryQuadraticForm) -> Result<usize> {
        if f.disc() != self.d {
            return Err(Error::invalid("discriminants differ"));
        }
        let r = reduce(f)?.form;
        self.index
            .get(&r)
            .copied()
            .ok_or_else(|| Error::invariant(format!("reduced form {r} missing from enumeration")))
    }

    pub fn genus_of(&self, i: usize) -> usize {
        self.genus_partition
            .iter()
            .position(|g| g.contains(&i))
            .expect("every class lies in a genus")
    }

    /// Number of `GL(2, Z)` classes.
    pub fn improper_class_count(&self) -> usize {
        (self.h + self.ambiguous_indices.len()) / 2
    }

    /// Classes in `indices` folded under the opposite involution: the
    /// smaller index of each pair `{i, opposite(i)}` is kept.
    pub fn fold_opposites(&self, indices: &[usize]) -> Vec<usize> {
        indices
            .iter()
            .copied()
            .filter(|&i| self.opposite[i] >= i || !indices.contains(&self.opposite[i]))
            .collect()
    }
}

fn rep_key(f: &BinaryQuadraticForm) -> (BigInt, bool, BigInt) {
    (f.a.abs(), f.a.is_negative(), f.b.clone())
}

/// All reduced forms of discriminant `d`, sorted.
fn reduced_forms(d: &BigInt) -> Result<Vec<BinaryQuadraticForm>> {
    check_discriminant(d)?;
    let dd = d
        .to_i128()
        .filter(|&v| v <= u64::MAX as i128)
        .ok_or_else(|| Error::unsupported("class enumeration requires D < 2^64"))?;
    let r = d.sqrt().to_i128().expect("fits");
    let mut out = Vec::new();
    let mut b = if dd % 2 == 0 { 2 } else { 1 };
    while b <= r {
        let m = (dd - b * b) / 4;
        let lo = ((r + 1 - b) + 1) / 2;
        let hi = (r + b) / 2;
        for a0 in lo.max(1)..=hi {
            if m % a0 != 0 {
                continue;
            }
            for a in [a0, -a0] {
                out.push(BinaryQuadraticForm::new(a, b, -m / a));
            }
        }
        b += 2;
    }
    out.sort();
    Ok(out)
}

/// The reduced cycles and the cycle index of each reduced form.
type Cycles = (Vec<Vec<BinaryQuadraticForm>>, HashMap<BinaryQuadraticForm, usize>);

fn cycles_of(d: &BigInt) -> Result<Cycles> {
    let forms = reduced_forms(d)?;
    let mut seen: HashMap<BinaryQuadraticForm, ()> = HashMap::new();
    let mut cycles = Vec::new();
    for f in &forms {
        if seen.contains_key(f) {
            continue;
        }
        let mut c = super::cycle(f)?;
        for g in &c {
            seen.insert(g.clone(), ());
        }
        let start = (0..c.len()).min_by_key(|&i| rep_key(&c[i])).expect("nonempty cycle");
        c.rotate_left(start);
        cycles.push(c);
    }
    cycles.sort_by_key(|c| rep_key(&c[0]));
    if seen.len() != forms.len() {
        return Err(Error::invariant("cycle walk left the reduced set"));
    }
    let mut index = HashMap::new();
    for (i, c) in cycles.iter().enumerate() {
        for f in c {
            index.insert(f.clone(), i);
        }
    }
    Ok((cycles, index))
}

/// Whether `d` is the discriminant of a real quadratic field.
pub fn is_fundamental(d: &BigInt) -> bool {
    let Some(d) = d.to_u64() else {
        return false;
    };
    if d < 5 {
        return false;
    }
    match d % 4 {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            (m % 4 == 2 || m % 4 == 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Number of proper classes of forms of discriminant `d`.
pub fn class_number(d: &BigInt) -> Result<usize> {
    Ok(cycles_of(d)?.0.len())
}

fn discriminant_forms(cycles: &[Vec<BinaryQuadraticForm>]) -> Result<Vec<Arc<FiniteQuadraticForm>>> {
    cycles
        .iter()
        .map(|c| Ok(Arc::new(discriminant_form(&form_to_lattice(&c[0])?)?)))
        .collect()
}

fn partition_by_genus(forms: &[Arc<FiniteQuadraticForm>], cap: u64) -> Result<Vec<Vec<usize>>> {
    let mut genera: Vec<Vec<usize>> = Vec::new();
    'outer: for (i, a) in forms.iter().enumerate() {
        for g in genera.iter_mut() {
            if are_isometric(&forms[g[0]], a, cap)? {
                g.push(i);
                continue 'outer;
            }
        }
        genera.push(vec![i]);
    }
    Ok(genera)
}

/// Enumerates the proper classes of discriminant `d` with their genus
/// partition and ambiguous classes.
///
/// For square-free `d = 1 mod 4` with `n` prime factors the structure
/// `#ambiguous = #genera = 2^(n-1)` with equinumerous genera is checked and
/// a violation is reported as an invariant error.
pub fn proper_classes(d: &BigInt, cap: u64) -> Result<ClassGroupData> {
    let (cycles, index) = cycles_of(d)?;
    let h = cycles.len();
    let mut opposite = Vec::with_capacity(h);
    for c in &cycles {
        let r = reduce(&c[0].opposite())?.form;
        opposite.push(index[&r]);
    }
    let ambiguous_indices: Vec<usize> = (0..h).filter(|&i| opposite[i] == i).collect();
    let genus_partition = partition_by_genus(&discriminant_forms(&cycles)?, cap)?;
    let data = ClassGroupData {
        d: d.clone(),
        cycles,
        h,
        genus_partition,
        ambiguous_indices,
        opposite,
        index,
    };
    if let Some(du) = d.to_u64().filter(|&v| v % 4 == 1 && is_squarefree(v)) {
        let expected = 1usize << (factorize(du).len() - 1);
        let sizes: Vec<usize> = data.genus_partition.iter().map(Vec::len).collect();
        if data.ambiguous_indices.len() != expected || sizes.len() != expected || sizes.iter().any(|&s| s != sizes[0]) {
            return Err(Error::invariant(format!(
                "genus structure of D = {d}: {} ambiguous classes, genus sizes {sizes:?}, expected {expected} equal genera",
                data.ambiguous_indices.len()
            )));
        }
    }
    Ok(data)
}

/// `GL(2, Z)` classes of discriminant `d`: proper classes folded under the
/// opposite involution.
pub fn improper_class_count(d: &BigInt) -> Result<usize> {
    let (cycles, index) = cycles_of(d)?;
    let mut amb = 0;
    for (i, c) in cycles.iter().enumerate() {
        if index[&reduce(&c[0].opposite())?.form] == i {
            amb += 1;
        }
    }
    Ok((cycles.len() + amb) / 2)
}

/// Proper classes of discriminant `d` grouped by genus.
pub fn genus_partition(d: &BigInt, cap: u64) -> Result<Vec<Vec<usize>>> {
    let (cycles, _) = cycles_of(d)?;
    partition_by_genus(&discriminant_forms(&cycles)?, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qform::DEFAULT_CAP;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn small_class_numbers() {
        assert_eq!(class_number(&big(5)).unwrap(), 1);
        let c = proper_classes(&big(5), DEFAULT_CAP).unwrap();
        assert_eq!(
            c.cycles[0],
            vec![BinaryQuadraticForm::new(1, 1, -1), BinaryQuadraticForm::new(-1, 1, 1)]
        );
        assert_eq!(c.ambiguous_indices, vec![0]);
        assert_eq!(improper_class_count(&big(5)).unwrap(), 1);
    }

    #[test]
    fn table_class_numbers() {
        assert_eq!(class_number(&big(229)).unwrap(), 3);
        assert_eq!(class_number(&big(1297)).unwrap(), 11);
        assert_eq!(improper_class_count(&big(229)).unwrap(), 2);
        assert_eq!(improper_class_count(&big(1297)).unwrap(), 6);
    }

    #[test]
    fn principal_class_first() {
        for d in [13i64, 229, 1297] {
            let c = proper_classes(&big(d), DEFAULT_CAP).unwrap();
            assert!(c.representative(0).a == big(1));
            assert!(c.ambiguous_indices.contains(&0));
        }
    }

    #[test]
    fn genera() {
        assert_eq!(genus_partition(&big(229), DEFAULT_CAP).unwrap().len(), 1);
        let g = genus_partition(&big(205), DEFAULT_CAP).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].len(), g[1].len());
    }

    #[test]
    fn cycle_lengths_are_even() {
        for d in 5..=200i64 {
            if d % 4 > 1 || crate::bqf::is_square(&big(d)) {
                continue;
            }
            let (cycles, _) = cycles_of(&big(d)).unwrap();
            assert!(cycles.iter().all(|c| c.len() % 2 == 0), "D = {d}");
        }
    }

    #[test]
    fn fundamental_discriminants() {
        let f: Vec<i64> = (5..=40).filter(|&d| is_fundamental(&big(d))).collect();
        assert_eq!(f, vec![5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40]);
    }

    #[test]
    fn class_lookup() {
        let c = proper_classes(&big(229), DEFAULT_CAP).unwrap();
        for i in 0..c.h {
            for f in &c.cycles[i] {
                assert_eq!(c.class_of(f).unwrap(), i);
            }
            assert_eq!(c.opposite[c.opposite[i]], i);
        }
    }
}
