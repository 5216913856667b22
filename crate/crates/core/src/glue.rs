//! Even unimodular overlattices of `S + T` glued along anti-isometries
//! `A_T -> A_S`, and the orbit count of gluings that the double coset
//! formula predicts.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::automorphisms::{cyclic_hodge_candidate, orthogonal_generators};
use crate::discriminant::DiscriminantGroup;
use crate::error::{Error, Result};
use crate::fm::summand_data;
use crate::hodge::{HodgeAction, HodgeGroupSpec};
use crate::lattice::{direct_sum, IntegerLattice};
use crate::matrix::{hermite_normal_form, integer_kernel, smith_normal_form, IntMatrix, RatMatrix};
use crate::qform::{isometries_signed, FiniteFormMap, Sign};

/// `S`, `T` and an anti-isometry `phi: A_T -> A_S`, meaning
/// `q_S(phi(x)) = -q_T(x)`.
#[derive(Clone, Debug)]
pub struct GluingDatum {
    pub s: IntegerLattice,
    pub t: IntegerLattice,
    pub phi: FiniteFormMap,
}

/// A lattice `L` with `S + T ⊂ L ⊂ S* + T*`, given by a basis of rational
/// vectors in the coordinates of `S + T` (first `rank S` entries for `S`).
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub ambient_basis: Vec<Vec<BigRational>>,
    pub gram: IntMatrix,
    pub index: BigInt,
    pub s_rank: usize,
    pub t_rank: usize,
    /// The anti-isometry used to build `L`, if it was glued.
    pub phi: Option<FiniteFormMap>,
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// The lattice spanned by rational row vectors, as an integral basis of
/// rational rows, via the Hermite form of the rows scaled to integers.
fn saturate(rows: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let n = rows.first().map_or(0, Vec::len);
    let denom = rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * rat(denom.clone())).to_integer()).collect())
        .collect();
    let h = hermite_normal_form(&IntMatrix::from_rows(scaled).expect("rectangular"));
    if h.nrows() != n {
        return Err(Error::invariant("glue generators do not span a full-rank lattice"));
    }
    Ok((0..n)
        .map(|i| {
            h.row(i)
                .iter()
                .map(|x| BigRational::new(x.clone(), denom.clone()))
                .collect()
        })
        .collect())
}

/// HNF of the basis scaled by a common denominator: equal for equal lattices.
fn lattice_key(rows: &[Vec<BigRational>], denom: &BigInt) -> Result<IntMatrix> {
    let scaled: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let y = x * rat(denom.clone());
                    if y.is_integer() {
                        Ok(y.to_integer())
                    } else {
                        Err(Error::invariant("lattice key denominator too small"))
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(hermite_normal_form(&IntMatrix::from_rows(scaled).expect("rectangular")))
}

fn gram_of(basis: &[Vec<BigRational>], ambient: &IntMatrix) -> RatMatrix {
    let b = RatMatrix::from_rows(basis.to_vec());
    let g = RatMatrix::from_int(ambient);
    &(&b * &g) * &b.transpose()
}

impl Overlattice {
    fn from_basis(
        basis: Vec<Vec<BigRational>>,
        s: &IntegerLattice,
        t: &IntegerLattice,
        phi: Option<FiniteFormMap>,
    ) -> Result<Self> {
        let ambient = direct_sum(s, t);
        let gram = gram_of(&basis, ambient.gram())
            .to_int()
            .ok_or_else(|| Error::invariant("glued form is not integral"))?;
        let b = RatMatrix::from_rows(basis.clone());
        let denom = b.common_denominator();
        let n = basis.len();
        let det_scaled = b.scaled_to_int(&denom).det().abs();
        // [L : S + T] = 1 / |det B| = denom^n / |det(denom B)|
        let (index, rem) = denom.pow(n as u32).div_rem(&det_scaled);
        if !rem.is_zero() {
            return Err(Error::invariant("S + T is not contained in the overlattice"));
        }
        Ok(Overlattice {
            ambient_basis: basis,
            gram,
            index,
            s_rank: s.rank(),
            t_rank: t.rank(),
            phi,
        })
    }

    /// `S + T` itself, index one.
    pub fn direct_sum(s: &IntegerLattice, t: &IntegerLattice) -> Result<Self> {
        let n = s.rank() + t.rank();
        let basis = (0..n)
            .map(|i| (0..n).map(|j| rat(BigInt::from((i == j) as i64))).collect())
            .collect();
        Self::from_basis(basis, s, t, None)
    }

    pub fn rank(&self) -> usize {
        self.s_rank + self.t_rank
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.gram.det().abs().is_one()
    }

    /// Coordinates in the basis of `L` of a vector of `S + T`.
    fn coordinates_in_basis(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        let b = RatMatrix::from_rows(self.ambient_basis.clone());
        let inv = b
            .inverse()
            .ok_or_else(|| Error::invariant("singular overlattice basis"))?;
        let row = RatMatrix::from_rows(vec![v.to_vec()]);
        Ok((&row * &inv).row(0).to_vec())
    }
}

/// Glues `S + T` along `phi`: adjoins `lift(phi(a)) + lift(a)` for the
/// generators `a` of `A_T` and saturates.
pub fn glue(s: &IntegerLattice, t: &IntegerLattice, phi: &FiniteFormMap) -> Result<Overlattice> {
    let ds = DiscriminantGroup::new(s)?;
    let dt = DiscriminantGroup::new(t)?;
    if **phi.source() != **dt.form() || **phi.target() != **ds.form() {
        return Err(Error::invalid(
            "gluing map must go from A_T to A_S in their standard coordinates",
        ));
    }
    if phi.sign() != Sign::Minus || !phi.is_bijective() {
        return Err(Error::invalid("gluing map must be a bijective anti-isometry"));
    }
    let n = s.rank() + t.rank();
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| rat(BigInt::from((i == j) as i64))).collect())
        .collect();
    for i in 0..dt.form().num_generators() {
        let a = dt.form().generator(i);
        let mut v = ds.lift_element(&phi.apply(&a));
        v.extend(dt.lift_element(&a));
        rows.push(v);
    }
    let basis = saturate(&rows)?;
    let l = Overlattice::from_basis(basis, s, t, Some(phi.clone()))?;
    if !l.is_even() {
        return Err(Error::invariant("glued lattice is odd"));
    }
    Ok(l)
}

/// Structural checks on an overlattice of `S + T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OverlatticeReport {
    pub even: bool,
    pub unimodular: bool,
    pub t_primitive: bool,
    pub complement_is_s: bool,
    /// The gluing map read back from `L / (S + T)` is a bijection and
    /// equals the stored one when there is one.
    pub roundtrip: bool,
    pub index_law: bool,
}

impl OverlatticeReport {
    pub fn all(&self) -> bool {
        self.even && self.unimodular && self.t_primitive && self.complement_is_s && self.roundtrip && self.index_law
    }
}

/// The map `A_T -> A_S` whose graph is `L / (S + T)`, if it is one.
pub fn recovered_gluing(l: &Overlattice, s: &IntegerLattice, t: &IntegerLattice) -> Result<Option<FiniteFormMap>> {
    let ds = DiscriminantGroup::new(s)?;
    let dt = DiscriminantGroup::new(t)?;
    let (rs, rt) = (s.rank(), t.rank());
    let mut gens = Vec::new();
    for v in &l.ambient_basis {
        let ps = ds.coordinates(&v[..rs])?;
        let pt = dt.coordinates(&v[rs..rs + rt])?;
        gens.push((pt, ps));
    }
    // Walk the subgroup generated by the pairs, keyed by the A_T component.
    let mut graph: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
    graph.insert(dt.form().zero(), ds.form().zero());
    let mut queue = VecDeque::from([(dt.form().zero(), ds.form().zero())]);
    while let Some((x, y)) = queue.pop_front() {
        for (gt, gs) in &gens {
            let nx = dt.form().add(&x, gt);
            let ny = ds.form().add(&y, gs);
            match graph.get(&nx) {
                Some(old) if *old != ny => return Ok(None),
                Some(_) => {}
                None => {
                    graph.insert(nx.clone(), ny.clone());
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    let order = dt.form().order().unwrap_or(0);
    if graph.len() as u128 != order {
        return Ok(None);
    }
    let images = (0..dt.form().num_generators())
        .map(|i| graph[&dt.form().generator(i)].clone())
        .collect();
    match FiniteFormMap::new(dt.form().clone(), ds.form().clone(), images, Sign::Minus) {
        Ok(f) if f.is_bijective() => Ok(Some(f)),
        _ => Ok(None),
    }
}

pub fn verify_overlattice(l: &Overlattice, s: &IntegerLattice, t: &IntegerLattice) -> Result<OverlatticeReport> {
    let (rs, rt) = (s.rank(), t.rank());
    if l.s_rank != rs || l.t_rank != rt {
        return Err(Error::invalid("overlattice does not match the ranks of S and T"));
    }
    let n = rs + rt;
    let even = l.is_even();
    let unimodular = l.is_unimodular();

    // T basis vectors in L coordinates: integral since S + T ⊂ L.
    let mut t_coords = Vec::with_capacity(rt);
    for k in 0..rt {
        let e: Vec<BigRational> = (0..n).map(|j| rat(BigInt::from((j == rs + k) as i64))).collect();
        let c = l.coordinates_in_basis(&e)?;
        if c.iter().any(|x| !x.is_integer()) {
            return Err(Error::invalid("T is not contained in the overlattice"));
        }
        t_coords.push(c.into_iter().map(|x| x.to_integer()).collect::<Vec<_>>());
    }
    let t_mat = IntMatrix::from_rows(t_coords).expect("rectangular");
    let t_primitive = smith_normal_form(&t_mat).invariant_factors().iter().all(|d| d.is_one());

    // T^⊥ in L: integer c with (c B) G e_t = 0 for every basis vector e_t of T.
    let ambient = direct_sum(s, t);
    let b = RatMatrix::from_rows(l.ambient_basis.clone());
    let bg = &b * &RatMatrix::from_int(ambient.gram());
    let pair_cols: Vec<Vec<BigRational>> = (0..rt)
        .map(|k| (0..n).map(|i| bg[(i, rs + k)].clone()).collect())
        .collect();
    let pm = RatMatrix::from_rows(pair_cols);
    let pm_int = pm.scaled_to_int(&pm.common_denominator());
    let kernel = integer_kernel(&pm_int);
    let mut complement_is_s = kernel.len() == rs;
    if complement_is_s {
        let mut s_part = Vec::new();
        for c in &kernel {
            let crow = RatMatrix::from_rows(vec![c.iter().cloned().map(rat).collect()]);
            let v = (&crow * &b).row(0).to_vec();
            if v[rs..].iter().any(|x| !x.is_zero()) || v[..rs].iter().any(|x| !x.is_integer()) {
                complement_is_s = false;
                break;
            }
            s_part.push(v[..rs].iter().map(|x| x.to_integer()).collect::<Vec<_>>());
        }
        if complement_is_s {
            let h = hermite_normal_form(&IntMatrix::from_rows(s_part).expect("rectangular"));
            complement_is_s = h == IntMatrix::identity(rs);
        }
    }

    let roundtrip = match recovered_gluing(l, s, t)? {
        Some(f) => l.phi.as_ref().is_none_or(|p| *p == f),
        None => false,
    };
    let det_l = l.gram.det().abs();
    let det_st = (s.det() * t.det()).abs();
    let index_law = &l.index * &l.index * det_l == det_st;
    Ok(OverlatticeReport {
        even,
        unimodular,
        t_primitive,
        complement_is_s,
        roundtrip,
        index_law,
    })
}

/// The Hodge generator on `T` as a lattice matrix.
///
/// The generic group uses `-1`. A larger group uses the supplied matrix or,
/// for definite `T` of rank at most two, the first automorphism `g` of
/// the requested order with `g^I = -1`.
pub fn hodge_matrix(t: &IntegerLattice, hodge: &HodgeGroupSpec) -> Result<IntMatrix> {
    let neg = IntMatrix::identity(t.rank()).neg();
    match &hodge.action {
        None if hodge.is_generic() => Ok(neg),
        None => {
            if t.rank() > 2 || !t.signature().is_definite() {
                return Err(Error::invalid("explicit Hodge action required"));
            }
            cyclic_hodge_candidate(t, hodge.order)?
                .ok_or_else(|| Error::invalid(format!("T has no automorphism of order {} squaring to -1", hodge.order)))
        }
        Some(HodgeAction::Lattice(m)) => {
            if !t.is_automorphism(m) {
                return Err(Error::invalid("Hodge action is not an automorphism of T"));
            }
            Ok(m.clone())
        }
        Some(HodgeAction::Discriminant(_)) => {
            Err(Error::invalid("gluing orbits need the Hodge action as a matrix on T"))
        }
    }
}

/// Orbits of gluings of `S` and `T` under `O(S) x G`.
#[derive(Clone, Debug)]
pub struct GluingClasses {
    pub count: usize,
    /// One anti-isometry per orbit.
    pub representatives: Vec<FiniteFormMap>,
    /// All anti-isometries `A_T -> A_S`.
    pub total: usize,
}

/// Enumerates every anti-isometry, glues it, and counts orbits of the
/// resulting overlattices under `h + g` for `h` in `O(S)` and `g` in `G`,
/// acting on `S + T` itself.
pub fn gluing_classes(
    s: &IntegerLattice,
    t: &IntegerLattice,
    hodge: &HodgeGroupSpec,
    cap: u64,
) -> Result<GluingClasses> {
    let ds = DiscriminantGroup::new(s)?;
    let dt = DiscriminantGroup::new(t)?;
    let antis = isometries_signed(dt.form(), ds.form(), Sign::Minus, cap)?;
    let (rs, rt) = (s.rank(), t.rank());
    let mut movers: Vec<IntMatrix> = orthogonal_generators(s)?
        .iter()
        .map(|h| h.block_diag(&IntMatrix::identity(rt)))
        .collect();
    movers.push(IntMatrix::identity(rs).block_diag(&hodge_matrix(t, hodge)?));
    let denom = (s.det() * t.det()).abs();

    let mut keys = Vec::with_capacity(antis.len());
    let mut bases = Vec::with_capacity(antis.len());
    let mut by_key: HashMap<IntMatrix, usize> = HashMap::new();
    for (i, phi) in antis.iter().enumerate() {
        let l = glue(s, t, phi)?;
        let key = lattice_key(&l.ambient_basis, &denom)?;
        by_key.insert(key.clone(), i);
        keys.push(key);
        bases.push(l.ambient_basis);
    }
    if by_key.len() != antis.len() {
        return Err(Error::invariant("distinct gluing maps gave equal overlattices"));
    }

    let mut label = vec![usize::MAX; antis.len()];
    let mut representatives = Vec::new();
    for start in 0..antis.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let c = representatives.len();
        representatives.push(antis[start].clone());
        label[start] = c;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for m in &movers {
                // rows are coordinate vectors, so v -> M v becomes B -> B M^T
                let mt = RatMatrix::from_int(&m.transpose());
                let moved = &RatMatrix::from_rows(bases[i].clone()) * &mt;
                let rows: Vec<Vec<BigRational>> = (0..moved.nrows()).map(|r| moved.row(r).to_vec()).collect();
                let key = lattice_key(&rows, &denom)?;
                let j = *by_key
                    .get(&key)
                    .ok_or_else(|| Error::invariant("isometry image is not a glued overlattice"))?;
                if label[j] == usize::MAX {
                    label[j] = c;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(GluingClasses {
        count: representatives.len(),
        representatives,
        total: antis.len(),
    })
}

/// Per-genus comparison of gluing orbits with double cosets.
#[derive(Clone, Debug)]
pub struct OrbitCountRow {
    pub s: IntegerLattice,
    pub orbits: usize,
    pub double_cosets: u64,
}

impl OrbitCountRow {
    pub fn equal(&self) -> bool {
        self.orbits as u64 == self.double_cosets
    }
}

#[derive(Clone, Debug)]
pub struct OrbitCountReport {
    pub rows: Vec<OrbitCountRow>,
    pub total_orbits: usize,
    pub total_double_cosets: u64,
}

impl OrbitCountReport {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(OrbitCountRow::equal) && self.total_orbits as u64 == self.total_double_cosets
    }
}

/// Compares, for each `S_j`, the gluing orbit count with
/// `|O(S_j) \ O(A_{S_j}) / G|` computed from the transported Hodge image.
pub fn verify_orbit_counts(
    s_list: &[IntegerLattice],
    t: &IntegerLattice,
    hodge: &HodgeGroupSpec,
    cap: u64,
) -> Result<OrbitCountReport> {
    let dt = DiscriminantGroup::new(t)?;
    let g = dt.induced_map(&hodge_matrix(t, hodge)?)?;
    let a_t: Arc<_> = dt.form().clone();
    let mut rows = Vec::new();
    for s in s_list {
        let orbits = gluing_classes(s, t, hodge, cap)?.count;
        let double_cosets = summand_data(s, &a_t, std::slice::from_ref(&g), cap)?.count()?;
        rows.push(OrbitCountRow {
            s: s.clone(),
            orbits,
            double_cosets,
        });
    }
    let total_orbits = rows.iter().map(|r| r.orbits).sum();
    let total_double_cosets = rows.iter().map(|r| r.double_cosets).sum();
    Ok(OrbitCountReport {
        rows,
        total_orbits,
        total_double_cosets,
    })
}
