use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::{isometries_signed, FiniteFormMap, FiniteQuadraticForm, Sign};
use crate::error::{Error, Result};

/// The full group `O(A, q)` of isometries of a finite quadratic form,
/// enumerated explicitly.
#[derive(Clone, Debug)]
pub struct FiniteOrthogonalGroup {
    form: Arc<FiniteQuadraticForm>,
    elements: Vec<FiniteFormMap>,
    index: HashMap<Vec<Vec<u64>>, usize>,
}

/// Partition of a group into double cosets `H x K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCosets {
    /// Element indices of each double coset, ordered by smallest member.
    pub cosets: Vec<Vec<usize>>,
}

impl DoubleCosets {
    pub fn count(&self) -> usize {
        self.cosets.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.cosets.iter().map(Vec::len).collect()
    }
}

/// Enumerates `O(A, q)` by brute force.
pub fn orthogonal_group(form: &Arc<FiniteQuadraticForm>, cap: u64) -> Result<FiniteOrthogonalGroup> {
    let elements = isometries_signed(form, form, Sign::Plus, cap)?;
    let index = elements
        .iter()
        .enumerate()
        .map(|(i, m)| (m.images().to_vec(), i))
        .collect();
    let group = FiniteOrthogonalGroup {
        form: form.clone(),
        elements,
        index,
    };
    if group.identity_index().is_none() {
        return Err(Error::invariant("orthogonal group enumeration missed the identity"));
    }
    Ok(group)
}

impl FiniteOrthogonalGroup {
    pub fn form(&self) -> &Arc<FiniteQuadraticForm> {
        &self.form
    }

    pub fn elements(&self) -> &[FiniteFormMap] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn identity(&self) -> FiniteFormMap {
        FiniteFormMap::identity(self.form.clone())
    }

    pub fn negation(&self) -> FiniteFormMap {
        FiniteFormMap::negation(self.form.clone())
    }

    pub fn identity_index(&self) -> Option<usize> {
        self.position(&self.identity())
    }

    /// Index of `map` in the element list, if it is an isometry of this form.
    pub fn position(&self, map: &FiniteFormMap) -> Option<usize> {
        if map.sign() != Sign::Plus || **map.source() != *self.form || **map.target() != *self.form {
            return None;
        }
        self.index.get(map.images()).copied()
    }

    pub fn contains(&self, map: &FiniteFormMap) -> bool {
        self.position(map).is_some()
    }

    fn require(&self, gens: &[FiniteFormMap]) -> Result<Vec<usize>> {
        gens.iter()
            .map(|g| {
                self.position(g)
                    .ok_or_else(|| Error::invalid(format!("{g} is not an element of O(A)")))
            })
            .collect()
    }

    /// `elements[i] ∘ elements[j]` as an index.
    fn compose_idx(&self, i: usize, j: usize) -> usize {
        let c = self.elements[i].compose_unchecked(&self.elements[j]);
        self.index[c.images()]
    }

    /// Smallest subgroup containing `gens`, as element indices in ascending order.
    pub fn subgroup_indices(&self, gens: &[FiniteFormMap]) -> Result<Vec<usize>> {
        let gens = self.require(gens)?;
        let id = self.identity_index().expect("identity present");
        let mut seen = vec![false; self.len()];
        seen[id] = true;
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.compose_idx(g, x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        Ok((0..self.len()).filter(|&i| seen[i]).collect())
    }

    /// Smallest subset containing `gens` and the identity that is closed
    /// under composition (hence a subgroup, the group being finite).
    pub fn subgroup_generated(&self, gens: &[FiniteFormMap]) -> Result<Vec<FiniteFormMap>> {
        Ok(self
            .subgroup_indices(gens)?
            .into_iter()
            .map(|i| self.elements[i].clone())
            .collect())
    }

    /// Orbits of `(h, k) . x = h ∘ x ∘ k^-1` with `h` ranging over the
    /// subgroup generated by `h_gens` and `k` over that of `k_gens`.
    pub fn double_cosets(&self, h_gens: &[FiniteFormMap], k_gens: &[FiniteFormMap]) -> Result<DoubleCosets> {
        let hs = self.require(h_gens)?;
        let ks = self.require(k_gens)?;
        let mut label = vec![usize::MAX; self.len()];
        let mut cosets = Vec::new();
        for start in 0..self.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let c = cosets.len();
            label[start] = c;
            let mut members = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let left = hs.iter().map(|&h| self.compose_idx(h, x));
                // Orbits under right multiplication by k and by k^-1 agree
                // in a finite group.
                let right = ks.iter().map(|&k| self.compose_idx(x, k));
                for y in left.chain(right).collect::<Vec<_>>() {
                    if label[y] == usize::MAX {
                        label[y] = c;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            cosets.push(members);
        }
        Ok(DoubleCosets { cosets })
    }

    pub fn double_coset_count(&self, h_gens: &[FiniteFormMap], k_gens: &[FiniteFormMap]) -> Result<u64> {
        Ok(self.double_cosets(h_gens, k_gens)?.count() as u64)
    }
}
