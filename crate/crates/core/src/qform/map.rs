use std::fmt;
use std::sync::Arc;

use super::FiniteQuadraticForm;
use crate::error::{Error, Result};

/// Whether a map multiplies `q` by `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(s: i8) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A homomorphism between finite quadratic forms, given by the images of the
/// source generators, with `q_target(f(x)) = sign * q_source(x)`.
#[derive(Clone)]
pub struct FiniteFormMap {
    source: Arc<FiniteQuadraticForm>,
    target: Arc<FiniteQuadraticForm>,
    images: Vec<Vec<u64>>,
    sign: Sign,
}

impl PartialEq for FiniteFormMap {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign
            && self.images == other.images
            && self.source == other.source
            && self.target == other.target
    }
}

impl Eq for FiniteFormMap {}

impl FiniteFormMap {
    /// Builds a map from generator images and checks that it is a
    /// well-defined homomorphism scaling `q` by `sign`.
    ///
    /// Bijectivity is not checked here; see [`FiniteFormMap::is_bijective`].
    pub fn new(
        source: Arc<FiniteQuadraticForm>,
        target: Arc<FiniteQuadraticForm>,
        images: Vec<Vec<u64>>,
        sign: Sign,
    ) -> Result<Self> {
        if images.len() != source.num_generators() {
            return Err(Error::invalid(format!(
                "map needs {} generator images, got {}",
                source.num_generators(),
                images.len()
            )));
        }
        let mut norm = Vec::with_capacity(images.len());
        for (i, y) in images.iter().enumerate() {
            if y.len() != target.num_generators() {
                return Err(Error::invalid(format!(
                    "image of generator {i} has {} coefficients, expected {}",
                    y.len(),
                    target.num_generators()
                )));
            }
            let y: Vec<u64> = y.iter().zip(target.orders()).map(|(&c, &d)| c % d).collect();
            if !target.is_killed_by(source.orders()[i], &y) {
                return Err(Error::invalid(format!(
                    "image of generator {i} has order not dividing {}",
                    source.orders()[i]
                )));
            }
            norm.push(y);
        }
        if source.exponent() != target.exponent() && !source.is_trivial() {
            return Err(Error::invalid("source and target exponents differ"));
        }
        let map = FiniteFormMap {
            source,
            target,
            images: norm,
            sign,
        };
        if !map.preserves_form() {
            return Err(Error::invalid(format!(
                "map does not scale the quadratic form by {}",
                sign.as_i8()
            )));
        }
        Ok(map)
    }

    /// Construction without validation, for enumerators that have already
    /// checked every condition.
    pub(crate) fn from_parts_unchecked(
        source: Arc<FiniteQuadraticForm>,
        target: Arc<FiniteQuadraticForm>,
        images: Vec<Vec<u64>>,
        sign: Sign,
    ) -> Self {
        FiniteFormMap {
            source,
            target,
            images,
            sign,
        }
    }

    pub fn identity(form: Arc<FiniteQuadraticForm>) -> Self {
        let images = (0..form.num_generators()).map(|i| form.generator(i)).collect();
        FiniteFormMap {
            source: form.clone(),
            target: form,
            images,
            sign: Sign::Plus,
        }
    }

    /// The map `x -> -x`.
    pub fn negation(form: Arc<FiniteQuadraticForm>) -> Self {
        let images = (0..form.num_generators())
            .map(|i| form.neg(&form.generator(i)))
            .collect();
        FiniteFormMap {
            source: form.clone(),
            target: form,
            images,
            sign: Sign::Plus,
        }
    }

    pub fn source(&self) -> &Arc<FiniteQuadraticForm> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteQuadraticForm> {
        &self.target
    }

    pub fn images(&self) -> &[Vec<u64>] {
        &self.images
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self
                .images
                .iter()
                .enumerate()
                .all(|(i, y)| *y == self.source.generator(i))
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let t = &self.target;
        let mut acc = t.zero();
        for (c, y) in x.iter().zip(&self.images) {
            if *c != 0 {
                acc = t.add(&acc, &t.mul(*c, y));
            }
        }
        acc
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FiniteFormMap) -> Result<FiniteFormMap> {
        if *other.target != *self.source {
            return Err(Error::invalid("composition of maps with mismatched forms"));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &FiniteFormMap) -> FiniteFormMap {
        FiniteFormMap {
            source: other.source.clone(),
            target: self.target.clone(),
            images: other.images.iter().map(|y| self.apply(y)).collect(),
            sign: self.sign * other.sign,
        }
    }

    /// Checks `q(f(g_i)) = s q(g_i)` and `b(f(g_i), f(g_j)) = s b(g_i, g_j)`.
    fn preserves_form(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        let e = s.exponent();
        if s.is_trivial() {
            return true;
        }
        let signed = |v: u64, m: u64| match self.sign {
            Sign::Plus => v % m,
            Sign::Minus => (m - v % m) % m,
        };
        let k = s.num_generators();
        for i in 0..k {
            if t.q_scaled_of(&self.images[i]) != signed(s.q_scaled_gen(i), 2 * e) {
                return false;
            }
            for j in i + 1..k {
                if t.b_scaled_of(&self.images[i], &self.images[j]) != signed(s.b_scaled_gen(i, j), e) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the images generate the target and the groups have equal order.
    pub fn is_bijective(&self) -> bool {
        self.source.order() == self.target.order() && generates(&self.images, self.target.orders())
    }

    /// The inverse of a bijective map, found by scanning the source.
    pub fn inverse(&self, cap: u64) -> Result<FiniteFormMap> {
        self.source.order_within(cap)?;
        if !self.is_bijective() {
            return Err(Error::invalid("map is not bijective"));
        }
        let t = &self.target;
        let mut images: Vec<Option<Vec<u64>>> = vec![None; t.num_generators()];
        let targets: Vec<Vec<u64>> = (0..t.num_generators()).map(|i| t.generator(i)).collect();
        let mut remaining = targets.len();
        for x in self.source.elements() {
            if remaining == 0 {
                break;
            }
            let y = self.apply(&x);
            if let Some(i) = targets.iter().position(|g| *g == y) {
                if images[i].is_none() {
                    images[i] = Some(x);
                    remaining -= 1;
                }
            }
        }
        let images = images
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::invariant("bijective map has no preimage for a generator"))?;
        Ok(FiniteFormMap {
            source: self.target.clone(),
            target: self.source.clone(),
            images,
            sign: self.sign,
        })
    }

    /// Multiplicative order of an endomorphism.
    pub fn order(&self) -> Result<u64> {
        if self.source != self.target {
            return Err(Error::invalid("order of a map between distinct forms"));
        }
        let mut power = self.clone();
        let mut n = 1u64;
        while !power.is_identity() {
            power = self.compose_unchecked(&power);
            n += 1;
            if n > 1 << 32 {
                return Err(Error::invariant("map has no finite order"));
            }
        }
        Ok(n)
    }

    /// `self^n`.
    pub fn pow(&self, n: u64) -> Result<FiniteFormMap> {
        if self.source != self.target {
            return Err(Error::invalid("power of a map between distinct forms"));
        }
        let mut acc = FiniteFormMap::identity(self.source.clone());
        for _ in 0..n {
            acc = self.compose_unchecked(&acc);
        }
        Ok(acc)
    }
}

impl fmt::Debug for FiniteFormMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FiniteFormMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, y)| {
                let c: Vec<String> = y.iter().map(u64::to_string).collect();
                format!("g{i}->({})", c.join(","))
            })
            .collect();
        let s = if self.sign == Sign::Plus { "+" } else { "-" };
        write!(f, "[{}]{s}", parts.join(" "))
    }
}

/// Whether the vectors `images` generate `Z/d_1 + ... + Z/d_k`.
///
/// A subgroup `H` of a finite abelian group `B` equals `B` iff `H + pB = B`
/// for every prime `p`, so it suffices to compare ranks over `F_p` for the
/// primes dividing the exponent.
pub(crate) fn generates(images: &[Vec<u64>], orders: &[u64]) -> bool {
    let exponent = orders.iter().fold(1u64, |acc, &d| num_integer::lcm(acc, d));
    for p in crate::arith::prime_factors(exponent) {
        let coords: Vec<usize> = (0..orders.len()).filter(|&i| orders[i].is_multiple_of(p)).collect();
        let rows: Vec<Vec<u64>> = images
            .iter()
            .map(|y| coords.iter().map(|&i| y[i] % p).collect())
            .collect();
        if rank_mod_p(rows, coords.len(), p) < coords.len() {
            return false;
        }
    }
    true
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, cols: usize, p: u64) -> usize {
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let inv = |a: u64| {
        // Fermat: a^(p-2)
        let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulm(acc, base);
            }
            base = mulm(base, base);
            e >>= 1;
        }
        acc
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let f = inv(rows[rank][c]);
        for j in c..cols {
            rows[rank][j] = mulm(rows[rank][j], f);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][c] == 0 {
                continue;
            }
            let m = rows[r][c];
            for j in c..cols {
                let sub = mulm(m, rows[rank][j]);
                rows[r][j] = (rows[r][j] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}
