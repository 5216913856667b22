//! Counting Fourier-Mukai partners:
//! `|FM(X)| = Σ_j |O(S_j) \ O(A_{S_j}) / G|` over the genus of `NS(X)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{is_prime, tau};
use crate::automorphisms::orthogonal_generators;
use crate::bqf::{form_to_lattice, lattice_to_form, proper_classes, BinaryQuadraticForm};
use crate::discriminant::DiscriminantGroup;
use crate::error::{Error, Result};
use crate::hodge::HodgeGroupSpec;
use crate::lattice::{min_generators, IntegerLattice, Signature};
use crate::qform::{first_isometry, orthogonal_group, FiniteFormMap, FiniteOrthogonalGroup, FiniteQuadraticForm, Sign};

/// Rank of the K3 lattice.
const K3_RANK: usize = 22;

/// The primes of the class-number table.
pub const TABLE_PRIMES: [u64; 14] = [
    229, 257, 401, 577, 733, 761, 1009, 1093, 1129, 1229, 1297, 1373, 1429, 1489,
];

/// A Néron-Severi lattice: even and hyperbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeronSeveriSpec {
    pub lattice: IntegerLattice,
}

impl NeronSeveriSpec {
    pub fn new(lattice: IntegerLattice) -> Result<Self> {
        if !lattice.is_even() {
            return Err(Error::OddLattice);
        }
        let n = lattice.rank();
        if lattice.signature() != Signature::new(1, n - 1) {
            return Err(Error::invalid(format!(
                "Neron-Severi lattice must have signature (1,{}), got {}",
                n - 1,
                lattice.signature()
            )));
        }
        if n > 20 {
            return Err(Error::invalid("Picard number of a K3 surface is at most 20"));
        }
        Ok(NeronSeveriSpec { lattice })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountMethod {
    Rank1,
    Nikulin,
    Rank2,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMethod::Rank1 => "rank1",
            CountMethod::Nikulin => "nikulin",
            CountMethod::Rank2 => "rank2",
        })
    }
}

/// One genus member `S_j` and its double coset count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub lattice: IntegerLattice,
    pub form: Option<BinaryQuadraticForm>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FMCountResult {
    pub total: u64,
    pub breakdown: Vec<Summand>,
    pub method: CountMethod,
}

impl FMCountResult {
    fn from_summands(breakdown: Vec<Summand>, method: CountMethod) -> Result<Self> {
        let total = breakdown.iter().map(|s| s.count).sum();
        if total == 0 || breakdown.iter().any(|s| s.count == 0) {
            return Err(Error::invariant("empty double coset summand"));
        }
        Ok(FMCountResult {
            total,
            breakdown,
            method,
        })
    }
}

/// The data of one summand `|O(S_j) \ O(A_{S_j}) / G|`.
#[derive(Clone, Debug)]
pub struct SummandData {
    pub group: FiniteOrthogonalGroup,
    /// Image of `O(S_j)` in `O(A_{S_j})`.
    pub h_gens: Vec<FiniteFormMap>,
    /// Image of `G` transported by `phi`: `phi ∘ g ∘ phi^-1`.
    pub k_gens: Vec<FiniteFormMap>,
    /// The lexicographically first anti-isometry `A_T -> A_{S_j}`.
    pub phi: FiniteFormMap,
}

impl SummandData {
    pub fn count(&self) -> Result<u64> {
        self.group.double_coset_count(&self.h_gens, &self.k_gens)
    }
}

/// Assembles the double coset data for `S_j` against `A_T` with Hodge
/// generators `g_bar` acting on `A_T`.
pub fn summand_data(
    s: &IntegerLattice,
    a_t: &Arc<FiniteQuadraticForm>,
    g_bar: &[FiniteFormMap],
    cap: u64,
) -> Result<SummandData> {
    let ds = DiscriminantGroup::new(s)?;
    let group = orthogonal_group(ds.form(), cap)?;
    let h_gens = orthogonal_generators(s)?
        .iter()
        .map(|m| ds.induced_map(m))
        .collect::<Result<Vec<_>>>()?;
    let phi = first_isometry(a_t, ds.form(), Sign::Minus, cap)?
        .ok_or_else(|| Error::invalid(format!("A_T is not anti-isometric to A_S for S = {s}")))?;
    let phi_inv = phi.inverse(cap)?;
    let k_gens = g_bar
        .iter()
        .map(|g| phi.compose(&g.compose(&phi_inv)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(SummandData {
        group,
        h_gens,
        k_gens,
        phi,
    })
}

/// `A_T` for a transcendental lattice complementary to `ns`: the
/// discriminant form of `ns` with `q` negated, in the same coordinates.
pub fn transcendental_form(ns: &IntegerLattice) -> Result<Arc<FiniteQuadraticForm>> {
    Ok(Arc::new(DiscriminantGroup::new(ns)?.form().negated()))
}

fn hodge_generator(
    ns: &IntegerLattice,
    a_t: &Arc<FiniteQuadraticForm>,
    hodge: &HodgeGroupSpec,
) -> Result<FiniteFormMap> {
    hodge.check_rank(K3_RANK - ns.rank())?;
    hodge.generator_on(a_t, None)
}

/// `2^(τ(n) - 1)` for `NS = <2n>` and the generic Hodge group, cross-checked
/// against the double coset count in the enumerated `O(Z/2n)`.
pub fn fm_number_rank1(n: u64, cap: u64) -> Result<FMCountResult> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let expected = 1u64 << (tau(n) - 1);
    let lattice = IntegerLattice::cyclic(i64::try_from(2 * n as u128).map_err(|_| Error::unsupported("n too large"))?)?;
    let a = Arc::new(FiniteQuadraticForm::rank_one(n)?);
    let group = orthogonal_group(&a, cap)?;
    let neg = [group.negation()];
    let brute = group.double_coset_count(&neg, &neg)?;
    if brute != expected || (n >= 2 && group.len() as u64 != 2 * expected) {
        return Err(Error::invariant(format!(
            "rank one count for n = {n}: formula {expected}, |O| = {}, double cosets {brute}",
            group.len()
        )));
    }
    Ok(FMCountResult {
        total: expected,
        breakdown: vec![Summand {
            lattice,
            form: None,
            count: expected,
        }],
        method: CountMethod::Rank1,
    })
}

/// `1` when `rank >= l(A) + 2`, otherwise `None`.
pub fn fm_number_nikulin(ns: &NeronSeveriSpec) -> Option<FMCountResult> {
    let n = ns.rank();
    if n < 3 || n < min_generators(&ns.lattice) + 2 {
        return None;
    }
    Some(FMCountResult {
        total: 1,
        breakdown: vec![Summand {
            lattice: ns.lattice.clone(),
            form: None,
            count: 1,
        }],
        method: CountMethod::Nikulin,
    })
}

/// Genus representatives `S_1 = NS, S_2, ...` for a rank two `NS`, one per
/// isometry class.
pub fn rank2_genus(ns: &IntegerLattice, cap: u64) -> Result<Vec<(IntegerLattice, BinaryQuadraticForm)>> {
    let f = lattice_to_form(ns)?;
    let data = proper_classes(&f.disc(), cap)?;
    let own = data.class_of(&f)?;
    let genus = &data.genus_partition[data.genus_of(own)];
    let own_pair = [own, data.opposite[own]];
    let mut out = vec![(ns.clone(), f.clone())];
    for i in data.fold_opposites(genus) {
        if own_pair.contains(&i) {
            continue;
        }
        let rep = data.representative(i).clone();
        out.push((form_to_lattice(&rep)?, rep));
    }
    Ok(out)
}

/// The counting formula for Picard number two.
pub fn fm_number_rank2(ns: &NeronSeveriSpec, hodge: &HodgeGroupSpec, cap: u64) -> Result<FMCountResult> {
    if ns.rank() != 2 {
        return Err(Error::invalid("rank two Neron-Severi lattice required"));
    }
    let a_t = transcendental_form(&ns.lattice)?;
    let g = hodge_generator(&ns.lattice, &a_t, hodge)?;
    let mut breakdown = Vec::new();
    for (s, f) in rank2_genus(&ns.lattice, cap)? {
        let count = summand_data(&s, &a_t, std::slice::from_ref(&g), cap)?.count()?;
        breakdown.push(Summand {
            lattice: s,
            form: Some(f),
            count,
        });
    }
    FMCountResult::from_summands(breakdown, CountMethod::Rank2)
}

fn fm_number_rank1_general(ns: &NeronSeveriSpec, hodge: &HodgeGroupSpec, cap: u64) -> Result<FMCountResult> {
    let a_t = transcendental_form(&ns.lattice)?;
    let g = hodge_generator(&ns.lattice, &a_t, hodge)?;
    let count = summand_data(&ns.lattice, &a_t, &[g], cap)?.count()?;
    FMCountResult::from_summands(
        vec![Summand {
            lattice: ns.lattice.clone(),
            form: None,
            count,
        }],
        CountMethod::Rank1,
    )
}

/// Dispatches on the Picard number.
pub fn fm_number(ns: &NeronSeveriSpec, hodge: &HodgeGroupSpec, cap: u64) -> Result<FMCountResult> {
    match ns.rank() {
        1 => {
            let two_n: BigInt = ns.lattice.gram()[(0, 0)].clone();
            match (hodge.is_generic(), (two_n / 2u32).to_u64()) {
                (true, Some(n)) => fm_number_rank1(n, cap),
                _ => fm_number_rank1_general(ns, hodge, cap),
            }
        }
        2 => fm_number_rank2(ns, hodge, cap),
        _ => fm_number_nikulin(ns).ok_or_else(|| {
            Error::unsupported(
                "rank >= 3 with l(S) > rank - 2 requires general indefinite genus enumeration (out of scope)",
            )
        }),
    }
}

/// One row `(p, h(p), |FM|)` of the class-number table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub p: u64,
    pub h: usize,
    pub fm: u64,
}

/// The lattice `[[2, 1], [1, (1 - p) / 2]]` of determinant `-p`.
pub fn principal_lattice(p: u64) -> Result<IntegerLattice> {
    if p % 4 != 1 {
        return Err(Error::invalid(format!("{p} is not 1 mod 4")));
    }
    let c = (1 - p as i128) / 2;
    let c = i64::try_from(c).map_err(|_| Error::unsupported("p too large"))?;
    IntegerLattice::from_i64(&[&[2, 1], &[1, c]])
}

/// `(p, h(p), |FM|)` for a prime `p = 1 mod 4`, where `|FM|` comes from the
/// counting formula and `h` from the reduced-cycle enumeration; the two are
/// required to satisfy `|FM| = (h + 1) / 2`.
pub fn fm_row(p: u64, cap: u64) -> Result<TableRow> {
    if !is_prime(p) || p % 4 != 1 {
        return Err(Error::invalid(format!("{p} is not a prime congruent to 1 mod 4")));
    }
    let h = proper_classes(&BigInt::from(p), cap)?.h;
    let ns = NeronSeveriSpec::new(principal_lattice(p)?)?;
    let fm = fm_number_rank2(&ns, &HodgeGroupSpec::generic(), cap)?.total;
    if fm != (h as u64).div_ceil(2) {
        return Err(Error::invariant(format!("p = {p}: |FM| = {fm} but h = {h}")));
    }
    Ok(TableRow { p, h, fm })
}

pub fn fm_table(primes: &[u64], cap: u64) -> Vec<Result<TableRow>> {
    primes.iter().map(|&p| fm_row(p, cap)).collect()
}

/// `|FM|` over all primes `p = 1 mod 4` up to a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub bound: u64,
    pub rows: Vec<TableRow>,
    /// Primes with `|FM| = 1`.
    pub fm_one: Vec<u64>,
    /// `(p, |FM|)` at each strict increase of the running maximum.
    pub running_max: Vec<(u64, u64)>,
}

pub fn gauss_scan(bound: u64, cap: u64) -> Result<ScanReport> {
    if bound < 5 {
        return Err(Error::invalid("scan bound must be at least 5"));
    }
    let mut rows = Vec::new();
    let mut fm_one = Vec::new();
    let mut running_max: Vec<(u64, u64)> = Vec::new();
    for p in (5..=bound).step_by(4).filter(|&p| is_prime(p)) {
        let row = fm_row(p, cap)?;
        if row.fm == 1 {
            fm_one.push(p);
        }
        if running_max.last().is_none_or(|&(_, m)| row.fm > m) {
            running_max.push((p, row.fm));
        }
        rows.push(row);
    }
    Ok(ScanReport {
        bound,
        rows,
        fm_one,
        running_max,
    })
}
